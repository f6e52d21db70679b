"""Subspace transforms applied to episode features before classification.

Both transforms work on ``dim x M`` matrices (one column per sample) and are
fit on whatever pool of samples the caller hands them; the episode pipeline
fits them on the pooled support, unlabeled and query features of one view.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import DisconnectedGraph, InvalidInput, ShapeMismatch
from .numerics import as_matrix, sym_eigen

PCA_DEFAULT_DIM = 256
LE_DEFAULT_DIM = 32
LE_DEFAULT_NEIGHBORS = 10


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray  # (dim,)
    components: np.ndarray  # dim x d, orthonormal columns
    explained_variance: np.ndarray  # (d,), descending

    @property
    def n_components(self) -> int:
        return self.components.shape[1]


def fit_pca(x, d: int) -> PcaModel:
    """Fit PCA on the columns of ``x`` keeping ``d`` components.

    The covariance uses the ``N - 1`` denominator. If it has fewer than ``d``
    positive eigenvalues the trailing components span part of its kernel;
    they are still deterministic.
    """
    x = as_matrix(x, "x")
    dim, n = x.shape
    if n < 2:
        raise InvalidInput("PCA needs at least two samples")
    if not 1 <= d <= min(dim, n):
        raise InvalidInput(f"d={d} must lie in [1, min(dim, N)={min(dim, n)}]")
    mean = x.mean(axis=1)
    centered = x - mean[:, None]
    cov = centered @ centered.T / (n - 1)
    values, vectors = sym_eigen(cov)
    return PcaModel(mean, vectors[:, :d].copy(), np.clip(values[:d], 0.0, None))


def apply_pca(model: PcaModel, x) -> np.ndarray:
    x = as_matrix(x, "x")
    if x.shape[0] != model.mean.shape[0]:
        raise ShapeMismatch(f"x has {x.shape[0]} rows, model expects {model.mean.shape[0]}")
    return model.components.T @ (x - model.mean[:, None])


@dataclass(frozen=True)
class LeConfig:
    target_dim: int = LE_DEFAULT_DIM
    neighbors: int = LE_DEFAULT_NEIGHBORS
    heat_sigma: float | None = None  # None: binary weights


def pairwise_sq_dists(x: np.ndarray) -> np.ndarray:
    sq = np.sum(x * x, axis=0)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x.T @ x)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def knn_graph(x, k: int, heat_sigma: float | None = None) -> np.ndarray:
    """Symmetric kNN affinity matrix over the columns of ``x``.

    ``i`` and ``j`` are joined when either is among the other's ``k`` nearest
    neighbours. Distance ties go to the lower column index.
    """
    x = as_matrix(x, "x")
    m = x.shape[1]
    if not 1 <= k < m:
        raise InvalidInput(f"k={k} must lie in [1, {m})")
    d2 = pairwise_sq_dists(x)
    ranking = d2 + np.diag(np.full(m, np.inf))
    nearest = np.argsort(ranking, axis=1, kind="stable")[:, :k]
    adj = np.zeros((m, m), dtype=bool)
    adj[np.repeat(np.arange(m), k), nearest.ravel()] = True
    adj |= adj.T
    if heat_sigma is None:
        return adj.astype(np.float64)
    if heat_sigma <= 0:
        raise InvalidInput("heat_sigma must be positive")
    return np.where(adj, np.exp(-d2 / (2.0 * heat_sigma**2)), 0.0)


def graph_laplacian(w: np.ndarray) -> np.ndarray:
    return np.diag(w.sum(axis=1)) - w


def laplacian_eigenmap(x, cfg: LeConfig = LeConfig()) -> np.ndarray:
    """Embed the columns of ``x`` into ``cfg.target_dim`` dimensions.

    Returns a ``d x M`` matrix whose rows are the eigenvectors of the
    unnormalized graph Laplacian for the 2nd..(d+1)-th smallest eigenvalues
    (the constant vector is dropped), each of unit norm.

    Raises
    ------
    DisconnectedGraph
        If the kNN graph has more than one connected component.
    """
    x = as_matrix(x, "x")
    m = x.shape[1]
    d = cfg.target_dim
    if d < 1 or m < d + 2:
        raise InvalidInput(f"need at least d+2={d + 2} samples, got {m}")
    w = knn_graph(x, cfg.neighbors, cfg.heat_sigma)
    n_comp, _ = connected_components(w != 0, directed=False)
    if n_comp > 1:
        raise DisconnectedGraph(f"kNN graph has {n_comp} components; raise k")
    values, vectors = sym_eigen(graph_laplacian(w))
    ascending = vectors[:, ::-1]
    emb = ascending[:, 1:d + 1].T
    return emb / np.linalg.norm(emb, axis=1, keepdims=True)


def l2_normalize(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=0, keepdims=True)
    return x / np.where(norms > 0, norms, 1.0)


@dataclass(frozen=True)
class TransformSpec:
    """A parsed ``none | pca[:d] | le[:d[,k]]`` transform description."""

    kind: str = "none"
    dim: int | None = None
    neighbors: int | None = None
    heat_sigma: float | None = None
    l2_normalize: bool = False

    @classmethod
    def parse(cls, text: str, l2_normalize: bool = False) -> "TransformSpec":
        text = text.strip().lower()
        kind, _, args = text.partition(":")
        try:
            nums = [int(a) for a in args.split(",")] if args else []
        except ValueError:
            raise InvalidInput(f"bad transform spec {text!r}") from None
        if kind == "none" and not nums:
            return cls("none", l2_normalize=l2_normalize)
        if kind == "pca" and len(nums) <= 1:
            return cls("pca", nums[0] if nums else None, l2_normalize=l2_normalize)
        if kind == "le" and len(nums) <= 2:
            dim = nums[0] if nums else None
            k = nums[1] if len(nums) > 1 else None
            return cls("le", dim, k, l2_normalize=l2_normalize)
        raise InvalidInput(f"bad transform spec {text!r}; expected none | pca:<d> | le:<d>,<k>")

    def __str__(self) -> str:
        if self.kind == "pca":
            return f"pca:{self.dim}" if self.dim else "pca"
        if self.kind == "le":
            d = self.dim or LE_DEFAULT_DIM
            k = self.neighbors or LE_DEFAULT_NEIGHBORS
            return f"le:{d},{k}"
        return "none"

    def apply(self, pool: np.ndarray) -> np.ndarray:
        """Fit on ``pool`` (``dim x M``) and return the transformed pool."""
        if self.kind == "pca":
            d = self.dim or min(pool.shape[0], pool.shape[1], PCA_DEFAULT_DIM)
            out = apply_pca(fit_pca(pool, d), pool)
        elif self.kind == "le":
            cfg = LeConfig(self.dim or LE_DEFAULT_DIM,
                           self.neighbors or LE_DEFAULT_NEIGHBORS, self.heat_sigma)
            out = laplacian_eigenmap(pool, cfg)
        else:
            out = pool
        return l2_normalize(out) if self.l2_normalize else out
