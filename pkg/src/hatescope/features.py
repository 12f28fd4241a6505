"""Tokenization and sparse character / word n-gram features."""

from __future__ import annotations

import json
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, NamedTuple

from hatescope.errors import ParameterError

SparseVector = dict  # feature-id -> weight; zero weights are never stored

_URL = re.compile(r"^(?:[a-z][a-z0-9+.-]*://|www\.)\S+$", re.IGNORECASE)
# keep these attached when they lead a word: @mentions and #hashtags
_HANDLE_MARKS = "@#"


class Token(NamedTuple):
    surface: str
    offset: int
    end: int


def _is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_" or unicodedata.category(ch)[0] == "M"


def is_word(surface: str) -> bool:
    """True when the token contains at least one letter or digit."""
    return any(ch.isalnum() for ch in surface)


def _fold(s: str) -> str:
    return unicodedata.normalize("NFC", s.casefold())


def _split_chunk(chunk: str, start: int, out: list[Token]) -> None:
    n = len(chunk)
    i = 0
    while i < n and not _is_word_char(chunk[i]):
        if chunk[i] in _HANDLE_MARKS and i + 1 < n and _is_word_char(chunk[i + 1]):
            break
        i += 1
    j = n
    if _URL.match(chunk[i:]):
        # URLs keep everything except trailing sentence punctuation
        while j > i and chunk[j - 1] in ".,;:!?)]}\"'":
            j -= 1
    else:
        while j > i and not _is_word_char(chunk[j - 1]):
            j -= 1
    for k in range(i):
        out.append(Token(_fold(chunk[k]), start + k, start + k + 1))
    if j > i:
        out.append(Token(_fold(chunk[i:j]), start + i, start + j))
    for k in range(j, n):
        out.append(Token(_fold(chunk[k]), start + k, start + k + 1))


def tokenize(text: str) -> list[Token]:
    """Split text into lowercased tokens with character offsets.

    Whitespace separates chunks; leading and trailing punctuation characters
    become one-character tokens, internal apostrophes and hyphens stay put.
    URLs, @mentions and #hashtags survive as single tokens.

    >>> [t.surface for t in tokenize("SAD!")]
    ['sad', '!']
    """
    text = unicodedata.normalize("NFC", text)
    out: list[Token] = []
    for m in re.finditer(r"\S+", text):
        _split_chunk(m.group(), m.start(), out)
    return out


def surfaces(text: str) -> list[str]:
    return [t.surface for t in tokenize(text)]


def wc(tokens: Iterable) -> dict[str, int]:
    """Count token surfaces. Accepts Tokens or plain strings."""
    return dict(Counter(t.surface if isinstance(t, Token) else t for t in tokens))


def char_ngrams(token, n: int) -> dict[str, int]:
    """Contiguous length-``n`` substrings of a single token."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    s = token.surface if isinstance(token, Token) else token
    return dict(Counter(s[i : i + n] for i in range(len(s) - n + 1)))


def word_ngrams(words: list[str], n: int) -> dict[str, int]:
    if n < 1:
        raise ParameterError("n must be >= 1")
    return dict(Counter(" ".join(words[i : i + n]) for i in range(len(words) - n + 1)))


@dataclass(frozen=True)
class FeatureConfig:
    char_ngrams: frozenset = frozenset({1, 2, 3})
    word_ngrams: frozenset = frozenset({1, 2})
    weighting: str = "count"

    def __post_init__(self):
        object.__setattr__(self, "char_ngrams", frozenset(int(n) for n in self.char_ngrams))
        object.__setattr__(self, "word_ngrams", frozenset(int(n) for n in self.word_ngrams))
        if not self.char_ngrams <= {1, 2, 3}:
            raise ParameterError(f"char n-gram sizes must be in {{1,2,3}}, got {sorted(self.char_ngrams)}")
        if not self.word_ngrams <= {1, 2}:
            raise ParameterError(f"word n-gram sizes must be in {{1,2}}, got {sorted(self.word_ngrams)}")
        if not self.char_ngrams and not self.word_ngrams:
            raise ParameterError("at least one n-gram family must be enabled")
        if self.weighting not in ("count", "binary"):
            raise ParameterError(f"weighting must be 'count' or 'binary', got {self.weighting!r}")

    def to_dict(self) -> dict:
        return {
            "char_ngrams": sorted(self.char_ngrams),
            "word_ngrams": sorted(self.word_ngrams),
            "weighting": self.weighting,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FeatureConfig":
        return cls(frozenset(d["char_ngrams"]), frozenset(d["word_ngrams"]), d["weighting"])

    @classmethod
    def words(cls, *ns: int, weighting: str = "count") -> "FeatureConfig":
        """Word n-grams only; ``FeatureConfig.words(1)`` is a plain word count."""
        return cls(frozenset(), frozenset(ns or (1,)), weighting)


DEFAULT_CONFIG = FeatureConfig()


def vectorize(text: str, config: FeatureConfig = DEFAULT_CONFIG) -> SparseVector:
    """Map text to namespaced n-gram features ("c3:fil", "w2:filthy pigs")."""
    words = surfaces(text)
    counts: Counter = Counter()
    for n in sorted(config.char_ngrams):
        prefix = f"c{n}:"
        for w in words:
            for i in range(len(w) - n + 1):
                counts[prefix + w[i : i + n]] += 1
    for n in sorted(config.word_ngrams):
        prefix = f"w{n}:"
        for i in range(len(words) - n + 1):
            counts[prefix + " ".join(words[i : i + n])] += 1
    if config.weighting == "binary":
        return {f: 1.0 for f in counts}
    return {f: float(c) for f, c in counts.items()}


def dumps_vector(vector: SparseVector) -> str:
    return json.dumps(vector, sort_keys=True, ensure_ascii=False)


def loads_vector(s: str) -> SparseVector:
    return {k: float(v) for k, v in json.loads(s).items() if float(v) != 0.0}
