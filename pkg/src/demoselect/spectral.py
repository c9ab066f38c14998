"""Normalized Laplacian spectrum, spectral-gap cluster count, and clustering.

The cluster count d is read off the ascending spectrum of
D^{-1/2} (D - A) D^{-1/2}: it is the 1-based position i maximizing the
gap between consecutive eigenvalues over the first m = min(n, horizon)
of them, ties toward the smallest i. Nodes are then embedded as rows of
the d leading eigenvectors, row-normalized, and clustered with a
deterministic seeded k-means (greedy farthest-point init, 10 restarts,
squared-Euclidean objective, best restart by objective then restart
index).

Eigensolving uses a full dense symmetric decomposition up to n = 512 and
a Lanczos-type iterative solver (smallest algebraic, tol 1e-9, at most
10 n iterations) for the leading pairs above that.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .errors import EigenError, GraphError
from .seeds import substream
from .simgraph import KnnGraph

DENSE_MAX_N = 512
SPECTRUM_TOL = 1e-8


@dataclass
class SpectrumResult:
    eigenvalues: np.ndarray  # ascending, first `inspected` at least
    eigenvectors: np.ndarray  # column j pairs with eigenvalues[j]
    d: int
    gap_index: int  # 0-based index i: the chosen gap is between i and i+1
    inspected: int  # m, how many leading eigenvalues the gap search saw

    def __post_init__(self):
        ev = self.eigenvalues
        if np.any(np.diff(ev) < -SPECTRUM_TOL):
            raise EigenError("eigenvalues are not ascending")
        if not -SPECTRUM_TOL <= ev[0] <= SPECTRUM_TOL:
            raise EigenError(f"smallest eigenvalue {ev[0]} not within {SPECTRUM_TOL} of 0")
        if np.any(ev < -SPECTRUM_TOL) or np.any(ev > 2.0 + SPECTRUM_TOL):
            raise EigenError("normalized-Laplacian eigenvalues must lie in [0, 2]")
        if not 1 <= self.d <= self.inspected - 1:
            raise EigenError(f"d={self.d} outside [1, {self.inspected - 1}]")


@dataclass
class Clustering:
    assignments: np.ndarray  # node -> cluster id in [0, d)
    d: int
    seed: int

    def __post_init__(self):
        present = set(np.unique(self.assignments).tolist())
        if present != set(range(self.d)):
            raise ValueError(f"cluster ids {sorted(present)} != 0..{self.d - 1}")


def normalized_laplacian(graph: KnnGraph) -> np.ndarray:
    """Symmetric normalized Laplacian of a 0/1 graph with no isolated nodes."""
    deg = graph.degrees()
    if np.any(deg == 0):
        isolated = np.nonzero(deg == 0)[0].tolist()
        raise GraphError(f"isolated nodes {isolated[:5]} make D^-1/2 undefined")
    inv_sqrt = 1.0 / np.sqrt(deg)
    lap = -(inv_sqrt[:, None] * graph.adjacency * inv_sqrt[None, :])
    np.fill_diagonal(lap, 1.0)
    return (lap + lap.T) / 2.0  # kill last-ulp asymmetry from the broadcasts


def eigen_ascending(
    matrix: np.ndarray, count: int, method: str = "auto"
) -> tuple[np.ndarray, np.ndarray]:
    """Leading `count` eigenpairs of a symmetric matrix, ascending.

    method "dense" runs a full decomposition; "iterative" runs the Lanczos
    path; "auto" picks dense for small problems. Raises EigenError on
    asymmetric input or iterative non-convergence.
    """
    n = matrix.shape[0]
    if matrix.shape != (n, n):
        raise EigenError(f"matrix must be square, got {matrix.shape}")
    if not 1 <= count <= n:
        raise EigenError(f"count must be in [1, {n}], got {count}")
    asym = float(np.max(np.abs(matrix - matrix.T))) if n else 0.0
    if asym > 1e-10:
        raise EigenError(f"matrix is not symmetric (max |M - M^T| = {asym:.3g})")

    if method == "auto":
        method = "dense" if (n <= DENSE_MAX_N or count > n - 2) else "iterative"
    if method == "dense":
        values, vectors = np.linalg.eigh(matrix)
        return values[:count], vectors[:, :count]
    if method != "iterative":
        raise EigenError(f"unknown eigensolver method {method!r}")

    if count > n - 2:
        raise EigenError(f"iterative solver needs count <= n-2 = {n - 2}, got {count}")
    maxiter = 10 * n
    v0 = substream(0, "eigsh-v0", n).standard_normal(n)  # fixed start for reproducibility
    try:
        values, vectors = eigsh(
            sparse.csr_matrix(matrix), k=count, which="SA", tol=1e-9, maxiter=maxiter, v0=v0
        )
    except ArpackNoConvergence as exc:
        raise EigenError(
            f"iterative eigensolver did not converge: {len(exc.eigenvalues)}/{count} "
            "eigenvalues found",
            iterations=maxiter,
        ) from exc
    order = np.argsort(values)
    return values[order], vectors[:, order]


def spectral_gap(eigenvalues: np.ndarray, m: int) -> tuple[int, int]:
    """Cluster count from the largest gap between consecutive eigenvalues.

    Positions are 1-based over the first m ascending eigenvalues; the gap
    between positions i and i+1 yields d = i, ties toward the smallest i.
    Returns (d, gap_index) with gap_index the 0-based array index where
    the winning gap starts (gap_index = d - 1).
    """
    eigenvalues = np.asarray(eigenvalues, dtype=np.float64)
    if eigenvalues.ndim != 1 or len(eigenvalues) < 2:
        raise EigenError("need at least 2 eigenvalues to find a gap")
    if not 2 <= m <= len(eigenvalues):
        raise EigenError(f"search horizon m must be in [2, {len(eigenvalues)}], got {m}")
    if np.any(np.diff(eigenvalues) < -SPECTRUM_TOL):
        raise EigenError("eigenvalues must be ascending")
    gaps = np.diff(eigenvalues[:m])
    gap_index = int(np.argmax(gaps))  # first maximum wins ties
    return gap_index + 1, gap_index


def _kmeans_single(
    points: np.ndarray, k: int, first_center: int, max_iter: int = 100
) -> tuple[np.ndarray, float]:
    """One k-means run: greedy farthest-point init from `first_center`."""
    n = points.shape[0]
    center_idx = [first_center]
    min_d2 = ((points - points[first_center]) ** 2).sum(axis=1)
    for _ in range(k - 1):
        nxt = int(np.argmax(min_d2))  # ties -> lower index
        center_idx.append(nxt)
        min_d2 = np.minimum(min_d2, ((points - points[nxt]) ** 2).sum(axis=1))
    centers = points[center_idx].copy()

    labels = np.full(n, -1, dtype=np.int64)
    for _ in range(max_iter):
        d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = d2.argmin(axis=1)

        # repair empty clusters: seed each with the point farthest from its
        # own center, never stealing the last member of another cluster
        counts = np.bincount(new_labels, minlength=k)
        for empty in np.nonzero(counts == 0)[0]:
            per_point = d2[np.arange(n), new_labels].copy()
            per_point[counts[new_labels] <= 1] = -np.inf
            victim = int(np.argmax(per_point))
            counts[new_labels[victim]] -= 1
            new_labels[victim] = empty
            counts[empty] += 1
            centers[empty] = points[victim]

        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(k):
            members = points[labels == c]
            if len(members):
                centers[c] = members.mean(axis=0)

    d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    objective = float(d2[np.arange(n), labels].sum())
    return labels, objective


def _canonical_labels(labels: np.ndarray, k: int) -> np.ndarray:
    """Relabel clusters by order of first appearance."""
    mapping: dict[int, int] = {}
    for lab in labels.tolist():
        if lab not in mapping:
            mapping[lab] = len(mapping)
    return np.array([mapping[lab] for lab in labels.tolist()], dtype=np.int64)


def kmeans(points: np.ndarray, k: int, seed: int, restarts: int = 10) -> np.ndarray:
    """Seeded best-of-restarts k-means; deterministic for fixed inputs."""
    n = points.shape[0]
    if k > n:
        raise ValueError(f"cannot form {k} clusters from {n} points")
    best_labels, best_obj = None, np.inf
    for r in range(restarts):
        first = int(substream(seed, "kmeans", r).integers(n))
        labels, obj = _kmeans_single(points, k, first)
        if obj < best_obj:  # strict: ties keep the earliest restart
            best_labels, best_obj = labels, obj
    return _canonical_labels(best_labels, k)


def spectral_embed_cluster(spectrum: SpectrumResult, seed: int, restarts: int = 10) -> Clustering:
    """Cluster nodes into spectrum.d groups via the spectral embedding.

    Rows of the n x d matrix of the d leading eigenvectors are normalized
    to unit length (all-zero rows are left alone) and clustered with
    k-means, k = d. d = 1 short-circuits to a single cluster.
    """
    d = spectrum.d
    n = spectrum.eigenvectors.shape[0]
    if d > n:
        raise ValueError(f"d={d} exceeds node count {n}")
    if d == 1:
        return Clustering(assignments=np.zeros(n, dtype=np.int64), d=1, seed=seed)

    embedding = spectrum.eigenvectors[:, :d].copy()
    norms = np.linalg.norm(embedding, axis=1)
    nonzero = norms > 0
    embedding[nonzero] /= norms[nonzero, None]

    labels = kmeans(embedding, d, seed, restarts=restarts)
    return Clustering(assignments=labels, d=d, seed=seed)
