"""Dictionary-based profiling: polarity, LIWC-style categories, negativity
markers and closed-class stylometric rates.

Lexicon entries are words or prefixes; a prefix ends with ``*`` and covers
every token starting with it (``parasit*`` matches ``parasiten``).
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Generic, Iterable, Mapping, TypeVar

from hatescope.errors import FormatError
from hatescope.features import is_word, tokenize

V = TypeVar("V")

MIN_PREFIX = 3


def _fold(entry: str) -> str:
    return " ".join(t.surface for t in tokenize(entry.rstrip("*"))) + ("*" if entry.endswith("*") else "")


class EntryTable(Generic[V]):
    """Exact and prefix entries with longest-match lookup.

    Entries may span several words ("bruine aap"); only the last word of an
    entry can carry the prefix star.
    """

    def __init__(self, entries: Mapping[str, V]):
        self.entries: dict[str, V] = {}
        self._exact: dict[tuple[str, ...], str] = {}
        self._prefix: dict[tuple[str, ...], list[tuple[str, str]]] = {}
        self.max_words = 1
        for raw, value in entries.items():
            entry = raw.strip()
            is_prefix = entry.endswith("*")
            stem = entry[:-1] if is_prefix else entry
            if not stem or "*" in stem:
                raise FormatError(f"bad lexicon entry {raw!r}")
            words = tuple(t.surface for t in tokenize(stem))
            if not words:
                raise FormatError(f"bad lexicon entry {raw!r}")
            if is_prefix and len(words[-1]) < MIN_PREFIX:
                raise FormatError(f"prefix entry {raw!r} needs at least {MIN_PREFIX} characters before '*'")
            key = " ".join(words) + ("*" if is_prefix else "")
            self.entries[key] = value
            if is_prefix:
                self._prefix.setdefault(words[:-1], []).append((words[-1], key))
            else:
                self._exact[words] = key
            self.max_words = max(self.max_words, len(words))
        for lst in self._prefix.values():
            lst.sort(key=lambda p: (-len(p[0]), p[0]))

    def __len__(self):
        return len(self.entries)

    def __contains__(self, entry: str) -> bool:
        return entry in self.entries

    def match_at(self, words: list[str], i: int) -> tuple[str, int] | None:
        """Longest entry starting at ``words[i]``: ``(entry, n_words)`` or None.

        Longer spans win; within a span an exact entry beats a prefix, and a
        longer prefix beats a shorter one.
        """
        for n in range(min(self.max_words, len(words) - i), 0, -1):
            span = tuple(words[i : i + n])
            key = self._exact.get(span)
            if key is not None:
                return key, n
            for stem, key in self._prefix.get(span[:-1], ()):
                if span[-1].startswith(stem):
                    return key, n
        return None

    def lookup(self, word: str) -> str | None:
        m = self.match_at([word], 0)
        return m[0] if m else None


def read_tsv(path) -> list[tuple[int, list[str]]]:
    rows = []
    text = Path(path).read_text(encoding="utf-8")
    for n, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        rows.append((n, line.rstrip("\n").split("\t")))
    return rows


class SentimentLexicon(EntryTable[float]):
    def __init__(self, entries: Mapping[str, float]):
        for entry, score in entries.items():
            if not -1.0 <= score <= 1.0:
                raise FormatError(f"score for {entry!r} outside [-1, 1]: {score}")
        super().__init__(entries)
        if self.max_words > 1:
            raise FormatError("sentiment entries must be single words")

    @classmethod
    def load(cls, path) -> "SentimentLexicon":
        """Read ``entry<TAB>score`` lines."""
        entries = {}
        for n, cols in read_tsv(path):
            if len(cols) != 2:
                raise FormatError("expected entry<TAB>score", n)
            try:
                entries[cols[0]] = float(cols[1])
            except ValueError:
                raise FormatError(f"non-numeric score {cols[1]!r}", n) from None
        return cls(entries)

    def override(self, changes: Mapping[str, float | None]) -> "SentimentLexicon":
        """Copy with entries re-scored, or removed where the new score is None.

        Use it for domain words a general lexicon misjudges (e.g. a
        historical term that is neutral in the target debate).
        """
        entries = dict(self.entries)
        for entry, score in changes.items():
            key = _fold(entry)
            if score is None:
                entries.pop(key, None)
            else:
                entries[key] = score
        return SentimentLexicon(entries)

    def scaled(self, factor: float) -> "SentimentLexicon":
        return SentimentLexicon({e: s * factor for e, s in self.entries.items()})


class CategoryLexicon(EntryTable[frozenset]):
    def __init__(self, entries: Mapping[str, Iterable[str]]):
        clean = {}
        for entry, cats in entries.items():
            cats = frozenset(c.strip() for c in cats)
            if not cats or any(not c for c in cats):
                raise FormatError(f"entry {entry!r} needs non-empty category names")
            clean[entry] = cats
        super().__init__(clean)

    @classmethod
    def load(cls, path) -> "CategoryLexicon":
        """Read ``entry<TAB>cat1,cat2,...`` lines."""
        entries = {}
        for n, cols in read_tsv(path):
            if len(cols) != 2:
                raise FormatError("expected entry<TAB>categories", n)
            entries[cols[0]] = cols[1].split(",")
        return cls(entries)


def _words(text: str) -> list[str]:
    return [t.surface for t in tokenize(text) if is_word(t.surface)]


def polarity(text: str, lexicon: SentimentLexicon) -> tuple[float, int]:
    """Mean score of lexicon hits in ``text`` and the number of hits.

    Texts without hits score 0.0 (objective).
    """
    total, hits = 0.0, 0
    for w in _words(text):
        entry = lexicon.lookup(w)
        if entry is not None:
            total += lexicon.entries[entry]
            hits += 1
    return (total / hits if hits else 0.0), hits


def category_profile(text: str, lexicon: CategoryLexicon) -> dict[str, float]:
    """Share of word tokens falling in each category (zero categories omitted)."""
    words = _words(text)
    if not words:
        return {}
    counts: dict[str, int] = {}
    for w in words:
        entry = lexicon.lookup(w)
        if entry is None:
            continue
        for cat in lexicon.entries[entry]:
            counts[cat] = counts.get(cat, 0) + 1
    return {cat: counts[cat] / len(words) for cat in sorted(counts)}


@dataclass(frozen=True)
class NegativityMarkers:
    allcaps_ratio: float
    exclamation_density: float
    angry_emoji_count: int

    def to_dict(self) -> dict:
        return {
            "allcaps_ratio": self.allcaps_ratio,
            "exclamation_density": self.exclamation_density,
            "angry_emoji_count": self.angry_emoji_count,
        }


def count_sequences(text: str, sequences: Iterable[str]) -> int:
    """Non-overlapping occurrences, longer sequences matched first."""
    seqs = sorted({s for s in sequences if s}, key=lambda s: (-len(s), s))
    n, i = 0, 0
    while i < len(text):
        for s in seqs:
            if text.startswith(s, i):
                n += 1
                i += len(s)
                break
        else:
            i += 1
    return n


def negativity_markers(text: str, emoji: Iterable[str] | None = None) -> NegativityMarkers:
    """All-caps share, "!" per word token and angry emoji count.

    Only alphabetic tokens of 3+ letters take part in the all-caps ratio, so
    acronyms like "US" are ignored. Every "!" character counts; punctuation
    tokens are left out of the word-token denominator.
    """
    if emoji is None:
        emoji = demo_emoji()
    words = [t for t in tokenize(text) if is_word(t.surface)]
    raw = unicodedata.normalize("NFC", text)
    caps_pool = [raw[t.offset : t.end] for t in words]
    caps_pool = [w for w in caps_pool if w.isalpha() and len(w) >= 3]
    caps = sum(1 for w in caps_pool if w.isupper())
    return NegativityMarkers(
        allcaps_ratio=caps / len(caps_pool) if caps_pool else 0.0,
        exclamation_density=raw.count("!") / len(words) if words else 0.0,
        angry_emoji_count=count_sequences(raw, emoji),
    )


PERSONAL_PRONOUNS = frozenset(
    "i me my mine myself we us our ours ourselves you your yours yourself yourselves "
    "he him his himself she her hers herself they them their theirs themselves".split()
)
DETERMINERS = frozenset("the a an this that these those".split())
QUANTIFIERS = frozenset(
    "few most many much more less least several some any all every each both "
    "none lots plenty enough".split()
)


def style_profile(text: str) -> dict[str, float]:
    """Rates of personal pronouns, determiners and quantifiers per word token."""
    words = _words(text)
    n = len(words)
    out = {}
    for name, vocab in (
        ("personal_pronoun_rate", PERSONAL_PRONOUNS),
        ("determiner_rate", DETERMINERS),
        ("quantifier_rate", QUANTIFIERS),
    ):
        out[name] = sum(1 for w in words if w in vocab) / n if n else 0.0
    return out


# -- bundled demo resources --------------------------------------------------


def _data(name: str):
    return resources.files("hatescope") / "data" / name


def demo_sentiment() -> SentimentLexicon:
    with resources.as_file(_data("sentiment_demo.tsv")) as p:
        return SentimentLexicon.load(p)


def demo_categories() -> CategoryLexicon:
    with resources.as_file(_data("categories_demo.tsv")) as p:
        return CategoryLexicon.load(p)


def load_emoji(path) -> list[str]:
    """One emoji (code point sequence) per line; ``#`` starts a comment line."""
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        s = line.strip()
        if s and not s.startswith("#"):
            out.append(s)
    return out


@lru_cache(maxsize=None)
def demo_emoji() -> tuple[str, ...]:
    with resources.as_file(_data("angry_emoji.txt")) as p:
        return tuple(load_emoji(p))
