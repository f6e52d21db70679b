"""Loss-weighted fusion of per-view decisions.

The view weights minimize ``sum_v w_v F_v + eta ||w||^2`` over the
probability simplex, where ``F_v`` is view ``v``'s training loss. Completing
the square shows this is the Euclidean projection of ``-F / (2 eta)`` onto
the simplex, so the weights come from an exact sort-based projection.

At the optimum every active weight has the form

    w_v = (mean(F) + 2 eta / V - F_v - lambda_avg) / (2 eta)

for one scalar ``lambda_avg`` shared by all views; :func:`multiplier_average`
recovers that scalar and :func:`weights_from_multiplier` evaluates the form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classifier import argmax_labels
from .errors import InvalidInput, LengthMismatch, ShapeMismatch

DEFAULT_ETA = 0.5


@dataclass(frozen=True)
class FusionWeights:
    omega: np.ndarray
    eta: float

    @property
    def n_views(self) -> int:
        return self.omega.shape[0]


def simplex_threshold(v: np.ndarray) -> float:
    """Return ``tau`` such that ``max(v - tau, 0)`` sums to one."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, u.size + 1)
    rho = np.count_nonzero(u - css / ind > 0)
    return float(css[rho - 1] / rho)


def project_simplex(v) -> np.ndarray:
    """Euclidean projection of a vector onto ``{w : w >= 0, sum(w) = 1}``."""
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size == 0:
        raise InvalidInput("cannot project an empty vector")
    return np.maximum(v - simplex_threshold(v), 0.0)


def _check_losses(losses, eta) -> np.ndarray:
    f = np.asarray(losses, dtype=np.float64).ravel()
    if f.size < 1:
        raise InvalidInput("need at least one view loss")
    if not np.all(np.isfinite(f)) or np.any(f < 0):
        raise InvalidInput(f"losses must be finite and non-negative, got {f}")
    if not (np.isfinite(eta) and eta > 0):
        raise InvalidInput(f"eta must be positive, got {eta}")
    return f


def fusion_objective(omega, losses, eta: float) -> float:
    omega = np.asarray(omega, dtype=np.float64)
    return float(omega @ np.asarray(losses, dtype=np.float64) + eta * omega @ omega)


def solve_weights(losses, eta: float = DEFAULT_ETA) -> FusionWeights:
    f = _check_losses(losses, eta)
    # Shift by the mean before scaling: the projection is shift-invariant and
    # this keeps large, nearly equal losses from cancelling catastrophically.
    v = -(f - f.mean()) / (2.0 * eta)
    omega = project_simplex(v)
    omega /= omega.sum()
    return FusionWeights(omega, float(eta))


def multiplier_average(losses, eta: float = DEFAULT_ETA) -> float:
    """The shared constant ``lambda_avg`` of the closed-form weight expression."""
    f = _check_losses(losses, eta)
    tau = simplex_threshold(-(f - f.mean()) / (2.0 * eta))
    return float(2.0 * eta / f.size + 2.0 * eta * tau)


def weights_from_multiplier(losses, eta: float, lambda_avg: float) -> np.ndarray:
    f = np.asarray(losses, dtype=np.float64)
    return np.maximum(f.mean() + 2.0 * eta / f.size - f - lambda_avg, 0.0) / (2.0 * eta)


def fuse_scores(view_scores, weights: FusionWeights) -> np.ndarray:
    """Weighted sum ``sum_v omega_v * scores_v`` of per-view ``C x M`` scores."""
    view_scores = [np.asarray(s, dtype=np.float64) for s in view_scores]
    if len(view_scores) != weights.n_views:
        raise LengthMismatch(f"{len(view_scores)} score matrices for {weights.n_views} weights")
    shape = view_scores[0].shape
    if any(s.shape != shape for s in view_scores):
        raise ShapeMismatch("score matrices differ in shape")
    out = np.zeros(shape)
    for w, s in zip(weights.omega, view_scores):
        out += w * s
    return out


def predict_fused(view_scores, weights: FusionWeights) -> np.ndarray:
    return argmax_labels(fuse_scores(view_scores, weights))
