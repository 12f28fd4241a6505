"""Biased keywords between two corpora (chi-square, posterior), PMI
collocations and dictionary highlighting for moderators."""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import asdict, dataclass
from importlib import resources
from typing import Iterable, Mapping

from hatescope.corpus import Corpus
from hatescope.errors import DatasetError, FormatError, ParameterError
from hatescope.features import is_word, tokenize
from hatescope.lexicon import EntryTable, read_tsv

# chi-square critical values, 1 degree of freedom
CRITICAL_VALUES = {0.05: 3.841, 0.01: 6.635, 0.001: 10.828}


def critical_value(alpha: float) -> float:
    try:
        return CRITICAL_VALUES[alpha]
    except KeyError:
        raise ParameterError(f"alpha must be one of {sorted(CRITICAL_VALUES)}, got {alpha}") from None


def chi_square(a: int, b: int, c: int, d: int) -> float:
    """Pearson chi-square of the 2x2 table [[a, b], [c, d]], no continuity correction."""
    if min(a, b, c, d) < 0:
        raise ParameterError("counts must be non-negative")
    margins = (a + b) * (c + d) * (a + c) * (b + d)
    if margins == 0:
        raise ParameterError(f"zero marginal in table {(a, b, c, d)}")
    n = a + b + c + d
    # exact integer numerator keeps large tables free of cancellation error
    return n * (a * d - b * c) ** 2 / margins


def posterior(count_a: int, n_a: int, count_b: int, n_b: int) -> float:
    """Share of the word's relative frequency that falls in corpus A."""
    if n_a <= 0 or n_b <= 0:
        raise ParameterError("corpus sizes must be positive")
    ra, rb = count_a / n_a, count_b / n_b
    if ra + rb == 0:
        return 0.5
    return ra / (ra + rb)


@dataclass(frozen=True)
class KeywordStat:
    word: str
    count_a: int
    count_b: int
    n_a: int
    n_b: int
    chi2: float
    significant: bool
    posterior: float

    @property
    def direction(self) -> str:
        if self.posterior > 0.5:
            return "a"
        if self.posterior < 0.5:
            return "b"
        return "none"

    def to_dict(self) -> dict:
        d = asdict(self)
        d["direction"] = self.direction
        return d


def _counts(corpus: Corpus, unit: str) -> tuple[Counter, int]:
    counts: Counter = Counter()
    total = 0
    for doc in corpus:
        words = [t.surface for t in tokenize(doc.text)]
        if unit == "document":
            counts.update(set(words))
            total += 1
        else:
            counts.update(words)
            total += len(words)
    return counts, total


def extract_keywords(
    corpus_a: Corpus,
    corpus_b: Corpus,
    min_count: int = 5,
    alpha: float = 0.05,
    unit: str = "document",
) -> list[KeywordStat]:
    """Rank tokens by how strongly their frequency differs between A and B.

    With ``unit="document"`` the table counts documents containing the token
    (n = number of documents); ``unit="token"`` counts raw occurrences
    (n = number of tokens). Tokens with fewer than ``min_count`` hits in A
    and B together are skipped. Sorted by chi2 descending, then word.
    """
    if unit not in ("document", "token"):
        raise ParameterError(f"unit must be 'document' or 'token', got {unit!r}")
    if len(corpus_a) == 0 or len(corpus_b) == 0:
        raise DatasetError("both corpora must be non-empty")
    threshold = critical_value(alpha)
    ca, na = _counts(corpus_a, unit)
    cb, nb = _counts(corpus_b, unit)
    if na == 0 or nb == 0:
        raise DatasetError("both corpora must contain tokens")
    stats = []
    for word in ca.keys() | cb.keys():
        a, c = ca.get(word, 0), cb.get(word, 0)
        if a + c < min_count:
            continue
        try:
            x2 = chi_square(a, na - a, c, nb - c)
        except ParameterError:
            # word present everywhere in both corpora: no association to measure
            x2 = 0.0
        stats.append(KeywordStat(word, a, c, na, nb, x2, x2 > threshold, posterior(a, na, c, nb)))
    stats.sort(key=lambda s: (-s.chi2, s.word))
    return stats


def keywords_csv(stats: Iterable[KeywordStat]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["word", "count_a", "count_b", "chi2", "significant", "posterior", "direction"])
    for s in stats:
        w.writerow([s.word, s.count_a, s.count_b, repr(s.chi2), str(s.significant).lower(), repr(s.posterior), s.direction])
    return buf.getvalue()


@dataclass(frozen=True)
class Collocation:
    left: str
    right: str
    count: int
    pmi: float


def collocations(corpus: Corpus, min_count: int = 5, words_only: bool = True) -> list[Collocation]:
    """Adjacent token pairs ranked by pointwise mutual information.

    ``PMI = log2(p(x, y) / (p(x) p(y)))`` with every probability taken over
    the corpus token count. Pairs never cross document boundaries. With
    ``words_only`` pairs touching a punctuation token are not reported (they
    still count towards the totals).
    """
    if len(corpus) == 0:
        raise DatasetError("corpus must be non-empty")
    unigrams: Counter = Counter()
    bigrams: Counter = Counter()
    for doc in corpus:
        words = [t.surface for t in tokenize(doc.text)]
        unigrams.update(words)
        bigrams.update(zip(words, words[1:]))
    n = sum(unigrams.values())
    out = []
    for (x, y), cxy in bigrams.items():
        if cxy < min_count:
            continue
        if words_only and not (is_word(x) and is_word(y)):
            continue
        pmi = math.log2(cxy * n / (unigrams[x] * unigrams[y]))
        out.append(Collocation(x, y, cxy, pmi))
    out.sort(key=lambda c: (-c.pmi, -c.count, c.left, c.right))
    return out


# -- highlighting ------------------------------------------------------------


class KeywordLexicon(EntryTable):
    """Entries (words, phrases, ``prefix*``) mapped to an optional category."""

    def __init__(self, entries: Mapping[str, str | None] | Iterable[str]):
        if not isinstance(entries, Mapping):
            entries = {e: None for e in entries}
        super().__init__(entries)

    @classmethod
    def load(cls, path) -> "KeywordLexicon":
        """Read ``entry<TAB>category`` lines; the category column is optional."""
        entries = {}
        for n, cols in read_tsv(path):
            if len(cols) > 2 or not cols[0].strip():
                raise FormatError("expected entry[<TAB>category]", n)
            cat = cols[1].strip() if len(cols) == 2 and cols[1].strip() else None
            entries[cols[0]] = cat
        return cls(entries)


def demo_keywords() -> KeywordLexicon:
    with resources.as_file(resources.files("hatescope") / "data" / "keywords_demo.tsv") as p:
        return KeywordLexicon.load(p)


@dataclass(frozen=True)
class HighlightSpan:
    start: int
    end: int
    matched_entry: str
    category: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def highlight(text: str, lexicon: KeywordLexicon) -> list[HighlightSpan]:
    """Character spans of lexicon hits, sorted and non-overlapping.

    Matching is token-level and greedy left to right; at each token the
    longest entry wins (see :meth:`EntryTable.match_at`). Offsets index the
    NFC-normalized text, which equals the input for NFC input.
    """
    tokens = tokenize(text)
    words = [t.surface for t in tokens]
    spans = []
    i = 0
    while i < len(tokens):
        m = lexicon.match_at(words, i)
        if m is None:
            i += 1
            continue
        entry, n = m
        spans.append(HighlightSpan(tokens[i].offset, tokens[i + n - 1].end, entry, lexicon.entries[entry]))
        i += n
    return spans
