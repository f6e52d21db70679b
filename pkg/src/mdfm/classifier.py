"""Closed-form ridge-regression classifier on one view.

Given features ``X`` (``dim x N``) and one-hot targets ``Y`` (``C x N``) the
classifier minimizes ``||Y - W X||_F^2 + mu ||W||_F^2``, whose minimizer is
``W = Y X^T (X X^T + mu I)^{-1}``. The minimum objective value is kept as the
classifier's ``training_loss``; fusion uses it to weight views.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, ShapeMismatch
from .numerics import as_matrix, solve_spd

DEFAULT_MU = 1.0


@dataclass(frozen=True)
class RidgeClassifier:
    weights: np.ndarray  # C x dim
    mu: float
    training_loss: float

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    def scores(self, x) -> np.ndarray:
        return scores(self, x)

    def predict(self, x) -> np.ndarray:
        return predict(self, x)


def one_hot(labels, n_classes: int) -> np.ndarray:
    """``C x N`` one-hot matrix for integer ``labels``."""
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
        raise InvalidInput(f"labels outside [0, {n_classes})")
    y = np.zeros((n_classes, labels.size))
    y[labels, np.arange(labels.size)] = 1.0
    return y


def ridge_objective(w: np.ndarray, x: np.ndarray, y: np.ndarray, mu: float) -> float:
    r = y - w @ x
    return float(np.sum(r * r) + mu * np.sum(w * w))


def fit_ridge(x, y, mu: float = DEFAULT_MU) -> RidgeClassifier:
    x = as_matrix(x, "x")
    y = as_matrix(y, "y")
    if not mu > 0:
        raise InvalidInput(f"mu must be positive, got {mu}")
    if x.shape[1] < 1 or y.shape[1] != x.shape[1]:
        raise ShapeMismatch(f"x has {x.shape[1]} samples, y has {y.shape[1]}")
    gram = x @ x.T
    gram[np.diag_indices_from(gram)] += mu
    # W G = Y X^T  <=>  G W^T = X Y^T, G symmetric
    w = solve_spd(gram, x @ y.T).T
    return RidgeClassifier(w, float(mu), ridge_objective(w, x, y, mu))


def scores(clf: RidgeClassifier, x) -> np.ndarray:
    x = as_matrix(x, "x")
    if x.shape[0] != clf.weights.shape[1]:
        raise ShapeMismatch(f"x has {x.shape[0]} rows, classifier expects {clf.weights.shape[1]}")
    return clf.weights @ x


def argmax_labels(s: np.ndarray) -> np.ndarray:
    # np.argmax returns the first maximal index, i.e. ties go to the lowest class.
    return np.argmax(s, axis=0)


def predict(clf: RidgeClassifier, x) -> np.ndarray:
    return argmax_labels(scores(clf, x))
