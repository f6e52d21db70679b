"""Self-training extension: grow each view's support set with pseudo-labels.

Each round, per view: fit the ridge classifier on the current support set,
score the remaining unlabeled pool, move the single most confident sample
(with its one-hot pseudo-label) from the pool into the support set. Views
select independently, so their support label matrices may drift apart.

Two selection rules are available. ``"global"`` takes the largest soft score
anywhere in the pool. ``"balanced"`` (the default) cycles a target class
``t mod C`` over rounds and takes the most confident sample among those
predicted as that class; a least-squares classifier scores larger classes
higher, so the global rule tends to feed one class until it swallows the
pool.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classifier import RidgeClassifier, fit_ridge, one_hot, scores
from .episodes import Episode, EpisodeConfig, EpisodeResult, episode_features, fuse_and_score
from .errors import EmptyPool, IterationBudgetExceedsPool, InvalidInput
from .features import MultiViewDataset

SELECTION_RULES = ("balanced", "global")


@dataclass
class ViewTrainState:
    """Mutable self-training bookkeeping for one view."""

    support_features: np.ndarray  # dim x N_s
    support_labels: np.ndarray  # C x N_s one-hot
    pool_features: np.ndarray  # dim x N_u
    pool_original_indices: list[int]
    selected: list[tuple[int, int]] = field(default_factory=list)  # (original index, pseudo class)

    @property
    def support_size(self) -> int:
        return self.support_features.shape[1]

    @property
    def pool_size(self) -> int:
        return self.pool_features.shape[1]


def predict_unlabeled(clf: RidgeClassifier, pool) -> np.ndarray:
    """Soft labels ``W @ X_u`` for the unlabeled pool (``C x N_u``, unnormalized)."""
    pool = np.asarray(pool, dtype=np.float64)
    if pool.ndim != 2 or pool.shape[1] == 0:
        raise EmptyPool("unlabeled pool is empty")
    return scores(clf, pool)


def select_most_confident(soft, target_class: int | None = None) -> tuple[int, np.ndarray]:
    """Pick the most confident pool column; confidence is its max soft score.

    Returns ``(pool_position, one_hot_pseudo_label)`` with the label at the
    column's argmax class. With ``target_class`` set, only columns predicted
    as that class compete; if there are none, the next class (cyclically)
    with candidates is used. Ties go to the lowest pool position, then the
    lowest class index.
    """
    soft = np.asarray(soft, dtype=np.float64)
    if soft.ndim != 2 or soft.shape[1] == 0:
        raise EmptyPool("unlabeled pool is empty")
    n_classes = soft.shape[0]
    predicted = np.argmax(soft, axis=0)
    confidence = soft[predicted, np.arange(soft.shape[1])]
    if target_class is None:
        position = int(np.argmax(confidence))
    else:
        for offset in range(n_classes):
            cls = (target_class + offset) % n_classes
            candidates = np.flatnonzero(predicted == cls)
            if candidates.size:
                break
        position = int(candidates[np.argmax(confidence[candidates])])
    label = np.zeros(n_classes)
    label[predicted[position]] = 1.0
    return position, label


def self_train_step(state: ViewTrainState, mu: float, selection: str = "balanced") -> None:
    clf = fit_ridge(state.support_features, state.support_labels, mu)
    soft = predict_unlabeled(clf, state.pool_features)
    target = len(state.selected) % soft.shape[0] if selection == "balanced" else None
    position, label = select_most_confident(soft, target)
    state.support_features = np.hstack([state.support_features,
                                        state.pool_features[:, position:position + 1]])
    state.support_labels = np.hstack([state.support_labels, label[:, None]])
    state.pool_features = np.delete(state.pool_features, position, axis=1)
    original = state.pool_original_indices.pop(position)
    state.selected.append((original, int(np.argmax(label))))


def self_train(states: list[ViewTrainState], mu: float, iterations: int,
               selection: str = "balanced") -> list[RidgeClassifier]:
    """Run ``iterations`` self-training rounds on every view, then refit.

    ``states`` are updated in place. The returned classifiers are fit on the
    final expanded support sets, so their ``training_loss`` is the loss the
    fusion weights should see.
    """
    if iterations < 0:
        raise InvalidInput("iterations must be >= 0")
    if not mu > 0:
        raise InvalidInput("mu must be positive")
    if selection not in SELECTION_RULES:
        raise InvalidInput(f"unknown selection rule {selection!r}")
    for state in states:
        if iterations > state.pool_size:
            raise IterationBudgetExceedsPool(
                f"{iterations} iterations but only {state.pool_size} unlabeled samples")
    for _ in range(iterations):
        for state in states:
            self_train_step(state, mu, selection)
    return [fit_ridge(s.support_features, s.support_labels, mu) for s in states]


def run_semisupervised_episode(dataset: MultiViewDataset, episode: Episode,
                               cfg: EpisodeConfig) -> EpisodeResult:
    feats = episode_features(dataset, episode, cfg)
    ys = one_hot(episode.local_labels(dataset, episode.support_idx), cfg.ways)
    states = [
        ViewTrainState(xs, ys.copy(), xu, episode.unlabeled_idx.tolist())
        for xs, xu, _ in feats
    ]
    classifiers = self_train(states, cfg.mu, cfg.iterations, cfg.selection)
    yq = episode.local_labels(dataset, episode.query_idx)
    return fuse_and_score(classifiers, [xq for _, _, xq in feats], yq, episode, cfg)
