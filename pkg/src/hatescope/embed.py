"""Pretrained word vectors: neighbor queries, dictionary expansion,
spherical k-means and a 2-D PCA projection."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from hatescope.errors import FormatError, ParameterError

log = logging.getLogger(__name__)


class EmbeddingTable:
    """Word -> dense vector map backed by one ``(n_words, dim)`` matrix."""

    def __init__(self, words: Sequence[str], matrix, duplicates: int = 0):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(words):
            raise ParameterError("matrix must have one row per word")
        if len(set(words)) != len(words):
            raise ParameterError("words must be unique")
        self.words = list(words)
        self.matrix = matrix
        self.index = {w: i for i, w in enumerate(self.words)}
        self.duplicates = duplicates
        norms = np.linalg.norm(matrix, axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            self._unit = np.where(norms > 0, matrix / norms, 0.0)

    @classmethod
    def from_dict(cls, vectors: dict[str, Sequence[float]]) -> "EmbeddingTable":
        words = list(vectors)
        return cls(words, np.array([vectors[w] for w in words], dtype=np.float64).reshape(len(words), -1))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[1]

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self.index

    def __getitem__(self, word) -> np.ndarray:
        return self.matrix[self.index[word]]

    @property
    def vectors(self) -> dict[str, np.ndarray]:
        return {w: self.matrix[i] for i, w in enumerate(self.words)}


def load_embeddings(path) -> EmbeddingTable:
    """Read the word2vec text format: optional ``count dim`` header line, then
    ``word v1 ... vd`` per line. A repeated word keeps its last vector and is
    counted in ``table.duplicates``.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    rows: dict[str, list[float]] = {}
    dim = None
    duplicates = 0
    start = 0
    if lines:
        head = lines[0].split()
        if len(head) == 2 and all(p.isdigit() for p in head):
            dim = int(head[1])
            start = 1
    for n, line in enumerate(lines[start:], start=start + 1):
        parts = line.rstrip().split(" ")
        if not line.strip():
            continue
        word, comps = parts[0], parts[1:]
        try:
            vec = [float(c) for c in comps]
        except ValueError:
            raise FormatError(f"non-numeric component for {word!r}", n) from None
        if not vec:
            raise FormatError(f"no vector for {word!r}", n)
        if dim is None:
            dim = len(vec)
        elif len(vec) != dim:
            raise FormatError(f"expected {dim} components, got {len(vec)}", n)
        if word in rows:
            duplicates += 1
            del rows[word]
        rows[word] = vec
    if not rows:
        raise FormatError("no vectors found")
    if duplicates:
        log.warning("%d duplicate words in %s; last occurrence kept", duplicates, path)
    words = list(rows)
    return EmbeddingTable(words, np.array([rows[w] for w in words]), duplicates)


def save_embeddings(table: EmbeddingTable, path, header: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as f:
        if header:
            f.write(f"{len(table)} {table.dimension}\n")
        for w, row in zip(table.words, table.matrix):
            f.write(w + " " + " ".join(repr(float(x)) for x in row) + "\n")


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ParameterError(f"dimension mismatch {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ParameterError("cosine undefined for a zero vector")
    return float(min(1.0, max(-1.0, float(u @ v) / (nu * nv))))


def nearest(table: EmbeddingTable, word: str, k: int = 10) -> list[tuple[str, float]]:
    """The ``k`` most cosine-similar words to ``word`` (exact scan)."""
    if k < 1:
        raise ParameterError("k must be >= 1")
    if word not in table:
        raise KeyError(word)
    q = table[word]
    if not np.any(q):
        raise ParameterError(f"zero vector for {word!r}")
    sims = table._unit @ (q / np.linalg.norm(q))
    np.clip(sims, -1.0, 1.0, out=sims)
    qi = table.index[word]
    ranked = sorted(
        ((float(sims[i]), w) for i, w in enumerate(table.words) if i != qi),
        key=lambda p: (-p[0], p[1]),
    )
    return [(w, s) for s, w in ranked[:k]]


@dataclass(frozen=True)
class Expansion:
    words: frozenset[str]
    skipped: int  # seeds missing from the table

    def __iter__(self):
        return iter(sorted(self.words))

    def __len__(self):
        return len(self.words)

    def __contains__(self, w):
        return w in self.words


def expand_dictionary(seeds: Iterable[str], table: EmbeddingTable, k: int = 10, threshold: float = 0.5) -> Expansion:
    """Grow a seed dictionary with each seed's near neighbors.

    One pass only: neighbors of added words are not followed. Seeds missing
    from the table are skipped and counted.
    """
    if k < 1:
        raise ParameterError("k must be >= 1")
    if not 0 < threshold <= 1:
        raise ParameterError("threshold must be in (0, 1]")
    seeds = set(seeds)
    found: set[str] = set()
    skipped = 0
    for s in sorted(seeds):
        if s not in table:
            skipped += 1
            continue
        found.update(w for w, sim in nearest(table, s, k) if sim >= threshold)
    if skipped:
        log.warning("%d seed words not in the embedding table", skipped)
    return Expansion(frozenset(found - seeds), skipped)


@dataclass
class ClusterResult:
    k: int
    assignments: dict[str, int]
    centroids: np.ndarray
    objective: float
    iterations: int
    history: list[float] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "objective": self.objective,
            "iterations": self.iterations,
            "assignments": self.assignments,
            "centroids": self.centroids.tolist(),
        }


def _kmeanspp(X: np.ndarray, k: int, rng: random.Random) -> list[int]:
    n = len(X)
    chosen = [rng.randrange(n)]
    best = X @ X[chosen[0]]
    while len(chosen) < k:
        dist = np.clip(1.0 - best, 0.0, None)
        dist[chosen] = 0.0
        total = float(dist.sum())
        if total <= 0:
            rest = [i for i in range(n) if i not in chosen]
            nxt = rest[rng.randrange(len(rest))]
        else:
            r = rng.random() * total
            nxt = int(np.searchsorted(np.cumsum(dist), r, side="right"))
            nxt = min(nxt, n - 1)
            while nxt in chosen:  # guard against rounding at the cumsum edge
                nxt = (nxt - 1) % n
        chosen.append(nxt)
        best = np.maximum(best, X @ X[nxt])
    return chosen


def spherical_kmeans(
    table: EmbeddingTable, words: Sequence[str], k: int, seed: int = 0, max_iters: int = 50
) -> ClusterResult:
    """Cluster unit-normalized word vectors by cosine similarity.

    Seeding is k-means++ on cosine distance over distinct members. Each
    round assigns every word to its most similar centroid and resets each
    centroid to the normalized mean of its members; an empty cluster keeps
    its previous centroid. Stops when assignments no longer change.
    """
    words = list(words)
    if k < 1:
        raise ParameterError("k must be >= 1")
    if len(words) < k:
        raise ParameterError(f"k={k} exceeds the number of words ({len(words)})")
    missing = [w for w in words if w not in table]
    if missing:
        raise KeyError(missing[0])
    X = np.array([table[w] for w in words], dtype=np.float64)
    norms = np.linalg.norm(X, axis=1)
    if np.any(norms == 0):
        raise ParameterError(f"zero vector for {words[int(np.argmin(norms))]!r}")
    X = X / norms[:, None]
    rng = random.Random(seed)
    C = X[_kmeanspp(X, k, rng)].copy()
    assign = None
    history: list[float] = []
    iterations = 0
    for iterations in range(1, max_iters + 1):
        sims = X @ C.T
        new = np.argmax(sims, axis=1)
        if assign is not None and np.array_equal(new, assign):
            iterations -= 1
            break
        assign = new
        for j in range(k):
            members = X[assign == j]
            if len(members) == 0:
                continue
            s = members.sum(axis=0)
            norm = np.linalg.norm(s)
            if norm > 0:
                C[j] = s / norm
        obj = float(np.sum(X * C[assign]))
        # assignment and mean steps can only raise the total similarity
        assert not history or obj >= history[-1] - 1e-9 * max(1.0, abs(obj)), (history[-1], obj)
        history.append(obj)
    objective = history[-1] if history else float(np.sum(X * C[np.argmax(X @ C.T, axis=1)]))
    return ClusterResult(
        k=k,
        assignments={w: int(a) for w, a in zip(words, assign)},
        centroids=C,
        objective=objective,
        iterations=iterations,
        history=history,
    )


@dataclass
class Projection:
    coords: dict[str, tuple[float, float]]
    variances: tuple[float, float]  # variance along each axis
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {
            "degenerate": self.degenerate,
            "variances": list(self.variances),
            "coords": {w: list(xy) for w, xy in self.coords.items()},
        }


def _power_iteration(A: np.ndarray, rng: np.random.Generator, tol: float = 1e-9, max_iters: int = 100_000):
    v = rng.standard_normal(A.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iters):
        w = A @ v
        norm = np.linalg.norm(w)
        if norm == 0:
            return 0.0, v
        w /= norm
        if np.dot(w, v) < 0:
            w = -w
        done = np.linalg.norm(w - v) < tol
        v = w
        if done:
            break
    lam = float(v @ A @ v)
    return lam, v


def project_2d(table: EmbeddingTable, words: Sequence[str], seed: int = 0) -> Projection:
    """Project vectors onto their top two principal components.

    Components come from power iteration with deflation on the covariance
    matrix. Each axis is oriented so its largest-magnitude loading is
    positive. Identical inputs give all-zero coordinates and
    ``degenerate=True``.
    """
    words = list(words)
    if len(words) < 2:
        raise ParameterError("need at least two words")
    X = np.array([table[w] for w in words], dtype=np.float64)
    Xc = X - X.mean(axis=0)
    scale = float(np.abs(Xc).max())
    if scale == 0:
        return Projection({w: (0.0, 0.0) for w in words}, (0.0, 0.0), degenerate=True)
    cov = Xc.T @ Xc / len(words)
    rng = np.random.default_rng(seed)
    axes, lams = [], []
    A = cov.copy()
    for _ in range(2):
        lam, v = _power_iteration(A, rng)
        if lam <= 1e-12 * max(lams[0] if lams else lam, 1e-300):
            lam, v = 0.0, np.zeros(A.shape[0])
        else:
            i = int(np.argmax(np.abs(v)))
            if v[i] < 0:
                v = -v
            A = A - lam * np.outer(v, v)
        axes.append(v)
        lams.append(max(lam, 0.0))
    P = Xc @ np.column_stack(axes)
    coords = {w: (float(P[i, 0]), float(P[i, 1])) for i, w in enumerate(words)}
    return Projection(coords, (lams[0], lams[1]))
