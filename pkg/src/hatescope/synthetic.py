"""Seeded synthetic corpora and embedding fixtures with planted signal.

The real hate-speech corpora are not redistributable; these generators make
datasets whose ground truth is known, for tests and demos.
"""

from __future__ import annotations

import random

import numpy as np

from hatescope.corpus import Corpus, Document
from hatescope.embed import EmbeddingTable
from hatescope.keywords import demo_keywords
from hatescope.lexicon import SentimentLexicon, demo_categories, demo_sentiment

_ONSETS = "b c d f g h j k l m n p r s t v w z br ch cl dr fl gr kr pl sh st tr".split()
_VOWELS = "a e i o u ai ea oo".split()


def filler_vocabulary(size: int = 600, seed: int = 0) -> list[str]:
    """Pronounceable pseudo-words, none of them in the demo lexicons."""
    rng = random.Random(seed)
    lexicons = (demo_sentiment(), demo_categories(), demo_keywords())
    words: set[str] = set()
    while len(words) < size:
        n = rng.choice((2, 2, 3))
        w = "".join(rng.choice(_ONSETS) + rng.choice(_VOWELS) for _ in range(n)) + rng.choice("knrstx")
        if all(lex.lookup(w) is None for lex in lexicons):
            words.add(w)
    return sorted(words)


def _filler(rng: random.Random, vocab: list[str], lo: int = 6, hi: int = 14) -> list[str]:
    # Zipf-ish: low-index words are more common
    weights = [1.0 / (i + 1) for i in range(len(vocab))]
    return rng.choices(vocab, weights=weights, k=rng.randint(lo, hi))


def planted_token_corpus(
    n_per_class: int = 200,
    token: str = "vermin",
    labels: tuple[str, str] = ("HATE", "SAFE"),
    seed: int = 0,
) -> Corpus:
    """Noiseless two-class corpus: a document is ``labels[0]`` iff it contains ``token``."""
    rng = random.Random(seed)
    vocab = filler_vocabulary(seed=seed)
    docs = []
    for i in range(2 * n_per_class):
        words = _filler(rng, vocab)
        label = labels[i % 2]
        if label == labels[0]:
            words.insert(rng.randrange(len(words) + 1), token)
        docs.append(Document(f"d{i}", " ".join(words), label))
    return Corpus(tuple(docs))


LEFT_TAGS = ("#resist", "#dumptrump", "#boycottrump", "#theresistance", "#impeach")
RIGHT_TAGS = ("#libtard", "#maga", "#draintheswamp", "#buildthewall", "#kag")


def maga_like_corpus(
    n_docs: int = 2000,
    noise: float = 0.2,
    seed: int = 0,
    left_tags=LEFT_TAGS,
    right_tags=RIGHT_TAGS,
) -> Corpus:
    """Tweets whose single hashtag decides left-wing vs right-wing, with a
    fraction ``noise`` of labels flipped at random.

    The best achievable accuracy is ``1 - noise``.
    """
    rng = random.Random(seed)
    vocab = filler_vocabulary(seed=seed + 1)
    tags = [(t, "left-wing") for t in left_tags] + [(t, "right-wing") for t in right_tags]
    docs = []
    for i in range(n_docs):
        tag, label = tags[rng.randrange(len(tags))]
        if rng.random() < noise:
            label = "right-wing" if label == "left-wing" else "left-wing"
        words = _filler(rng, vocab)
        words.insert(rng.randrange(len(words) + 1), tag)
        docs.append(Document(f"t{i}", " ".join(words), label))
    return Corpus(tuple(docs))


PLANTED_KEYWORDS = ("kuffar", "vermin", "gesindel", "kakkerlakken", "murtadd")


def keyword_corpora(
    n_docs: int = 2000,
    planted=PLANTED_KEYWORDS,
    rate: float = 0.05,
    seed: int = 0,
) -> tuple[Corpus, Corpus]:
    """Corpora A and B drawn from one filler distribution; each planted word
    appears in a document of A with probability ``rate`` and never in B."""
    rng = random.Random(seed)
    vocab = filler_vocabulary(seed=seed + 2)
    a, b = [], []
    for i in range(n_docs):
        words = _filler(rng, vocab)
        for w in planted:
            if rng.random() < rate:
                words.insert(rng.randrange(len(words) + 1), w)
        a.append(Document(f"a{i}", " ".join(words), "A"))
    for i in range(n_docs):
        b.append(Document(f"b{i}", " ".join(_filler(rng, vocab)), "B"))
    return Corpus(tuple(a)), Corpus(tuple(b))


def styled_corpus(
    lexicon: SentimentLexicon,
    negative_density: float,
    positive_density: float = 0.03,
    n_docs: int = 500,
    seed: int = 0,
) -> Corpus:
    """Documents whose tokens are negative lexicon adjectives with probability
    ``negative_density``, positive ones with ``positive_density``, and
    lexicon-free filler otherwise."""
    rng = random.Random(seed)
    vocab = filler_vocabulary(seed=seed + 3)
    neg = sorted(e for e, s in lexicon.entries.items() if s < 0 and not e.endswith("*"))
    pos = sorted(e for e, s in lexicon.entries.items() if s > 0 and not e.endswith("*"))
    docs = []
    for i in range(n_docs):
        words = []
        for _ in range(rng.randint(10, 25)):
            r = rng.random()
            if r < negative_density:
                words.append(rng.choice(neg))
            elif r < negative_density + positive_density:
                words.append(rng.choice(pos))
            else:
                words.append(rng.choice(vocab))
        docs.append(Document(f"s{i}", " ".join(words)))
    return Corpus(tuple(docs))


def blob_embeddings(
    sizes=(3, 3),
    dim: int = 10,
    spread: float = 0.15,
    seed: int = 0,
    prefix: str = "c",
) -> tuple[EmbeddingTable, dict[str, int]]:
    """Clusters of vectors around mutually orthogonal axes.

    Member ``j`` of cluster ``i`` is named ``f"{prefix}{i}_{j}"``. With the
    default spread, cosines are above 0.9 inside a cluster and below 0.3
    across clusters. Returns the table and the ground-truth assignment.
    """
    if len(sizes) > dim:
        raise ValueError("need dim >= number of clusters")
    rng = np.random.default_rng(seed)
    words, rows, truth = [], [], {}
    for i, n in enumerate(sizes):
        center = np.zeros(dim)
        center[i] = 1.0
        for j in range(n):
            v = center + spread * rng.standard_normal(dim) / np.sqrt(dim)
            name = f"{prefix}{i}_{j}"
            words.append(name)
            rows.append(v)
            truth[name] = i
    return EmbeddingTable(words, np.array(rows)), truth


def planar_embeddings(n: int = 20, dim: int = 8, seed: int = 0, scales=(3.0, 1.0)) -> EmbeddingTable:
    """Points on a random 2-D affine plane inside ``dim`` dimensions."""
    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.standard_normal((dim, 2)))
    coeffs = rng.standard_normal((n, 2)) * np.asarray(scales)
    offset = rng.standard_normal(dim)
    X = coeffs @ basis.T + offset
    return EmbeddingTable([f"p{i}" for i in range(n)], X)
