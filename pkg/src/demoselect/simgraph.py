"""Jaccard similarity graph over demonstrations and its kNN sparsification.

The dense graph holds pairwise Jaccard similarity of token-ID sets with a
zero diagonal. Sparsification keeps, per node, the k most similar
neighbors by rank (ties at the k-th rank go to the lower node index), then
symmetrizes by union (an edge survives if either endpoint kept it) and
resets every surviving edge weight to 1. Union symmetrization guarantees
no isolated nodes, which keeps the normalized Laplacian well-defined; a
mutual-AND mode exists as a diagnostic knob and may isolate nodes.

Pairwise intersection counts are computed with one sparse matrix product
over the token incidence matrix, which is exact (integer counts) and fast
enough for the few-thousand-row tables this targets.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import sparse

from .errors import GraphError
from .tokens import TokenSet


@dataclass
class DenseSimilarity:
    n: int
    w: np.ndarray  # (n, n) float64, symmetric, zero diagonal, values in [0, 1]

    def __post_init__(self):
        if self.w.shape != (self.n, self.n):
            raise GraphError(f"similarity matrix shape {self.w.shape} != ({self.n}, {self.n})")
        if np.any(np.diag(self.w) != 0.0):
            raise GraphError("similarity matrix must have a zero diagonal")
        if not np.array_equal(self.w, self.w.T):
            raise GraphError("similarity matrix must be symmetric")
        if np.any(self.w < 0.0) or np.any(self.w > 1.0):
            raise GraphError("similarity values must lie in [0, 1]")


@dataclass
class KnnGraph:
    n: int
    adjacency: np.ndarray  # (n, n) uint8, entries in {0, 1}
    k: int
    symmetrization: str = "union"

    def __post_init__(self):
        a = self.adjacency
        if a.shape != (self.n, self.n):
            raise GraphError(f"adjacency shape {a.shape} != ({self.n}, {self.n})")
        if np.any((a != 0) & (a != 1)):
            raise GraphError("adjacency entries must be 0 or 1")
        if np.any(np.diag(a) != 0):
            raise GraphError("adjacency must have a zero diagonal")
        if not np.array_equal(a, a.T):
            raise GraphError("adjacency must be symmetric")
        if self.symmetrization == "union":
            min_degree = min(self.k, self.n - 1)
            if np.any(a.sum(axis=1) < min_degree):
                raise GraphError(f"union-symmetrized kNN graph has a node of degree < {min_degree}")

    def degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1).astype(np.float64)


def jaccard(a: TokenSet, b: TokenSet) -> float:
    """|a ∩ b| / |a ∪ b| over the deduplicated token-ID sets."""
    # ids are sorted and unique: two-pointer merge for the intersection count
    i = j = inter = 0
    while i < len(a.ids) and j < len(b.ids):
        if a.ids[i] == b.ids[j]:
            inter += 1
            i += 1
            j += 1
        elif a.ids[i] < b.ids[j]:
            i += 1
        else:
            j += 1
    union = len(a.ids) + len(b.ids) - inter
    return inter / union


def build_dense(tokensets: Sequence[TokenSet]) -> DenseSimilarity:
    """Pairwise Jaccard similarity matrix with zero diagonal."""
    n = len(tokensets)
    if n < 2:
        raise GraphError(f"need at least 2 token sets, got {n}")

    vocab: dict[int, int] = {}
    for ts in tokensets:
        for t in ts.ids:
            if t not in vocab:
                vocab[t] = len(vocab)

    rows, cols = [], []
    for i, ts in enumerate(tokensets):
        for t in ts.ids:
            rows.append(i)
            cols.append(vocab[t])
    incidence = sparse.csr_matrix(
        (np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(n, len(vocab))
    )
    inter = np.asarray((incidence @ incidence.T).todense(), dtype=np.int64)
    sizes = np.array([len(ts.ids) for ts in tokensets], dtype=np.int64)
    union = sizes[:, None] + sizes[None, :] - inter

    w = inter / union
    np.fill_diagonal(w, 0.0)
    return DenseSimilarity(n=n, w=w)


def sparsify_knn(dense: DenseSimilarity, k: int, symmetrization: str = "union") -> KnnGraph:
    """0/1 kNN graph: keep each node's top-k neighbors by similarity rank.

    symmetrization="union" keeps an edge if either endpoint selected it;
    "mutual" requires both and can isolate nodes (diagnostic use only).
    """
    n = dense.n
    if not 1 <= k <= n - 1:
        raise GraphError(f"k must satisfy 1 <= k <= n-1 = {n - 1}, got {k}")
    if symmetrization not in ("union", "mutual"):
        raise GraphError(f"unknown symmetrization {symmetrization!r}")

    directed = np.zeros((n, n), dtype=np.uint8)
    indices = np.arange(n)
    for i in range(n):
        sims = dense.w[i].copy()
        sims[i] = -np.inf  # never pick self
        # descending similarity, ties broken toward the lower node index
        order = np.lexsort((indices, -sims))
        directed[i, order[:k]] = 1

    if symmetrization == "union":
        adjacency = np.maximum(directed, directed.T)
    else:
        adjacency = np.minimum(directed, directed.T)
    np.fill_diagonal(adjacency, 0)
    return KnnGraph(n=n, adjacency=adjacency, k=k, symmetrization=symmetrization)


def dump_dense_csv(dense: DenseSimilarity, path: str | Path) -> None:
    np.savetxt(path, dense.w, delimiter=",", fmt="%.17g")


def dump_edges_csv(graph: KnnGraph, path: str | Path) -> None:
    """Edge list (i,j with i < j) of the kNN graph."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j"])
        src, dst = np.nonzero(np.triu(graph.adjacency, k=1))
        for i, j in zip(src.tolist(), dst.tolist()):
            writer.writerow([i, j])
