"""C-way M-shot episode sampling, the supervised fusion pipeline, and reporting.

Every episode is a pure function of ``(dataset, config, episode_index)``: its
random stream is seeded from ``base_seed`` and the index alone, so episodes
can run in any order and on any number of workers without changing the
report.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .classifier import DEFAULT_MU, RidgeClassifier, fit_ridge, one_hot
from .errors import InsufficientClasses, InsufficientSamples, InvalidInput, LabelOutOfRange
from .features import MultiViewDataset
from .fusion import DEFAULT_ETA, FusionWeights, predict_fused, solve_weights
from .transforms import TransformSpec

_MASK64 = (1 << 64) - 1
_GOLDEN64 = 0x9E3779B97F4A7C15
Z95 = 1.96


def episode_seed(base_seed: int, episode_index: int) -> int:
    return (base_seed & _MASK64) ^ ((episode_index * _GOLDEN64) & _MASK64)


def episode_rng(base_seed: int, episode_index: int) -> np.random.Generator:
    """PCG64 stream for one episode; PCG64 output is platform independent."""
    return np.random.Generator(np.random.PCG64(episode_seed(base_seed, episode_index)))


@dataclass(frozen=True)
class EpisodeConfig:
    ways: int = 5
    shots: int = 1
    queries: int = 15
    unlabeled: int = 0
    mu: float = DEFAULT_MU
    eta: float = DEFAULT_ETA
    transform: TransformSpec = field(default_factory=TransformSpec)
    episodes: int = 600
    base_seed: int = 0
    mode: str = "supervised"
    st_iterations: int | None = None  # None: exhaust the unlabeled pool
    selection: str = "balanced"
    fixed_weights: tuple[float, ...] | None = None  # bypasses the weight solver

    def __post_init__(self):
        if self.ways < 2:
            raise InvalidInput("ways must be >= 2")
        if self.shots < 1 or self.queries < 1 or self.episodes < 1:
            raise InvalidInput("shots, queries and episodes must be >= 1")
        if self.unlabeled < 0:
            raise InvalidInput("unlabeled must be >= 0")
        if self.mode not in ("supervised", "semi"):
            raise InvalidInput(f"unknown mode {self.mode!r}")
        if self.mode == "semi" and self.unlabeled < 1:
            raise InvalidInput("semi mode needs unlabeled >= 1")
        if self.selection not in ("balanced", "global"):
            raise InvalidInput(f"unknown selection rule {self.selection!r}")
        if self.st_iterations is not None and self.st_iterations < 0:
            raise InvalidInput("st_iterations must be >= 0")
        if not (self.mu > 0 and self.eta > 0):
            raise InvalidInput("mu and eta must be positive")

    @property
    def iterations(self) -> int:
        if self.st_iterations is None:
            return self.ways * self.unlabeled
        return self.st_iterations

    def to_json(self) -> dict:
        return {
            "ways": self.ways,
            "shots": self.shots,
            "queries": self.queries,
            "unlabeled": self.unlabeled,
            "mu": self.mu,
            "eta": self.eta,
            "transform": str(self.transform),
            "l2_normalize": self.transform.l2_normalize,
            "episodes": self.episodes,
            "base_seed": self.base_seed,
            "mode": self.mode,
            "st_iterations": self.iterations if self.mode == "semi" else 0,
            "selection": self.selection,
            "fixed_weights": list(self.fixed_weights) if self.fixed_weights else None,
        }


@dataclass(frozen=True)
class Episode:
    class_ids: np.ndarray  # (C,) dataset class ids; position = episode-local label
    support_idx: np.ndarray  # (C*M,)
    unlabeled_idx: np.ndarray  # (C*u,)
    query_idx: np.ndarray  # (C*q,)

    def local_labels(self, dataset: MultiViewDataset, idx: np.ndarray) -> np.ndarray:
        lookup = np.full(dataset.class_count, -1, dtype=np.int64)
        lookup[self.class_ids] = np.arange(self.class_ids.size)
        return lookup[dataset.labels[idx]]


@dataclass(frozen=True)
class EpisodeResult:
    accuracy: float
    fused_confusion: np.ndarray  # C x C counts, rows = true class
    per_view_accuracy: np.ndarray
    omega: FusionWeights
    view_losses: np.ndarray
    class_ids: np.ndarray
    predictions: np.ndarray
    view_predictions: np.ndarray  # V x M

    def to_json(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "class_ids": self.class_ids.tolist(),
            "omega": self.omega.omega.tolist(),
            "view_losses": self.view_losses.tolist(),
            "per_view_accuracy": self.per_view_accuracy.tolist(),
            "confusion": self.fused_confusion.ravel().tolist(),
        }


@dataclass(frozen=True)
class EvalReport:
    per_episode: list[EpisodeResult]
    mean_accuracy: float
    ci95_halfwidth: float
    config: dict
    view_names: list[str]

    @property
    def accuracies(self) -> np.ndarray:
        return np.array([r.accuracy for r in self.per_episode])

    @property
    def per_view_mean_accuracy(self) -> np.ndarray:
        return np.mean([r.per_view_accuracy for r in self.per_episode], axis=0)

    def summary_line(self) -> str:
        return f"mean={self.mean_accuracy:.4f} ci95={self.ci95_halfwidth:.4f}"

    def to_json(self, per_episode: bool = True) -> dict:
        out = {
            "mean_accuracy": self.mean_accuracy,
            "ci95_halfwidth": self.ci95_halfwidth,
            "n_episodes": len(self.per_episode),
            "views": list(self.view_names),
            "per_view_mean_accuracy": self.per_view_mean_accuracy.tolist(),
            "config": self.config,
        }
        if per_episode:
            out["per_episode"] = [r.to_json() for r in self.per_episode]
        return out

    def dumps(self, per_episode: bool = True) -> str:
        return json.dumps(self.to_json(per_episode), indent=2) + "\n"


def mean_and_ci95(accuracies) -> tuple[float, float]:
    """Mean and 95% half-width ``1.96 * s / sqrt(n)`` (``s`` with ``n - 1``)."""
    acc = np.asarray(accuracies, dtype=np.float64)
    n = acc.size
    if n == 0:
        raise InvalidInput("no accuracies")
    mean = float(acc.mean())
    if n == 1:
        return mean, 0.0
    s = float(np.std(acc, ddof=1))
    return mean, Z95 * s / math.sqrt(n)


def confusion_matrix(true_labels, predicted_labels, n_classes: int) -> np.ndarray:
    t = np.asarray(true_labels, dtype=np.int64)
    p = np.asarray(predicted_labels, dtype=np.int64)
    if t.shape != p.shape:
        raise InvalidInput("label vectors differ in length")
    for labels in (t, p):
        if labels.size and (labels.min() < 0 or labels.max() >= n_classes):
            raise LabelOutOfRange(f"labels outside [0, {n_classes})")
    out = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(out, (t, p), 1)
    return out


def class_members(dataset: MultiViewDataset) -> list[np.ndarray]:
    labels = dataset.labels
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(dataset.class_count + 1))
    return [order[bounds[c]:bounds[c + 1]] for c in range(dataset.class_count)]


def sample_episode(dataset: MultiViewDataset, cfg: EpisodeConfig, episode_index: int,
                   members: list[np.ndarray] | None = None) -> Episode:
    """Draw episode ``episode_index``: ``C`` classes, then ``M + u + q`` samples each.

    Each class's draw is split in order into support, unlabeled and query.
    """
    if members is None:
        members = class_members(dataset)
    per_class = cfg.shots + cfg.unlabeled + cfg.queries
    if dataset.class_count < cfg.ways:
        raise InsufficientClasses(f"{dataset.class_count} classes, {cfg.ways}-way requested")
    short = [c for c, m in enumerate(members) if m.size < per_class]
    if short:
        raise InsufficientSamples(f"classes {short[:5]} have fewer than {per_class} samples")
    rng = episode_rng(cfg.base_seed, episode_index)
    class_ids = rng.choice(dataset.class_count, size=cfg.ways, replace=False)
    s, u, q = [], [], []
    for c in class_ids:
        picked = rng.choice(members[c], size=per_class, replace=False)
        s.append(picked[:cfg.shots])
        u.append(picked[cfg.shots:cfg.shots + cfg.unlabeled])
        q.append(picked[cfg.shots + cfg.unlabeled:])
    return Episode(class_ids.astype(np.int64), np.concatenate(s), np.concatenate(u),
                   np.concatenate(q))


def episode_features(dataset: MultiViewDataset, episode: Episode, cfg: EpisodeConfig):
    """Per view ``(X_s, X_u, X_q)``, transformed on the pooled episode samples."""
    ns, nu = episode.support_idx.size, episode.unlabeled_idx.size
    pool_idx = np.concatenate([episode.support_idx, episode.unlabeled_idx, episode.query_idx])
    out = []
    for fs in dataset.view_sets:
        pool = cfg.transform.apply(fs.features[:, pool_idx])
        out.append((pool[:, :ns], pool[:, ns:ns + nu], pool[:, ns + nu:]))
    return out


def fuse_and_score(classifiers: list[RidgeClassifier], query_features: list[np.ndarray],
                   query_labels: np.ndarray, episode: Episode, cfg: EpisodeConfig) -> EpisodeResult:
    """Weight the views by their training losses and score the fused query predictions."""
    losses = np.array([clf.training_loss for clf in classifiers])
    if cfg.fixed_weights is not None:
        if len(cfg.fixed_weights) != len(classifiers):
            raise InvalidInput("fixed_weights length differs from view count")
        weights = FusionWeights(np.asarray(cfg.fixed_weights, dtype=np.float64), cfg.eta)
    else:
        weights = solve_weights(losses, cfg.eta)
    view_scores = [clf.scores(xq) for clf, xq in zip(classifiers, query_features)]
    fused = predict_fused(view_scores, weights)
    view_preds = np.array([np.argmax(s, axis=0) for s in view_scores])
    return EpisodeResult(
        accuracy=float(np.mean(fused == query_labels)),
        fused_confusion=confusion_matrix(query_labels, fused, cfg.ways),
        per_view_accuracy=np.mean(view_preds == query_labels[None, :], axis=1),
        omega=weights,
        view_losses=losses,
        class_ids=episode.class_ids,
        predictions=fused,
        view_predictions=view_preds,
    )


def run_supervised_episode(dataset: MultiViewDataset, episode: Episode,
                           cfg: EpisodeConfig) -> EpisodeResult:
    feats = episode_features(dataset, episode, cfg)
    ys = one_hot(episode.local_labels(dataset, episode.support_idx), cfg.ways)
    classifiers = [fit_ridge(xs, ys, cfg.mu) for xs, _, _ in feats]
    yq = episode.local_labels(dataset, episode.query_idx)
    return fuse_and_score(classifiers, [xq for _, _, xq in feats], yq, episode, cfg)


def run_episode(dataset: MultiViewDataset, cfg: EpisodeConfig, episode_index: int,
                members: list[np.ndarray] | None = None) -> EpisodeResult:
    episode = sample_episode(dataset, cfg, episode_index, members)
    if cfg.mode == "semi":
        from .semisup import run_semisupervised_episode

        return run_semisupervised_episode(dataset, episode, cfg)
    return run_supervised_episode(dataset, episode, cfg)


def evaluate(dataset: MultiViewDataset, cfg: EpisodeConfig, workers: int = 1) -> EvalReport:
    """Run ``cfg.episodes`` episodes and aggregate them, ordered by episode index."""
    members = class_members(dataset)

    def job(i):
        return run_episode(dataset, cfg, i, members)

    if workers <= 1:
        results = [job(i) for i in range(cfg.episodes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, range(cfg.episodes)))
    mean, half = mean_and_ci95([r.accuracy for r in results])
    return EvalReport(results, mean, half, cfg.to_json(), dataset.view_names)

