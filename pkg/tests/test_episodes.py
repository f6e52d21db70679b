import numpy as np
import pytest

from mdfm.episodes import (
    EpisodeConfig,
    confusion_matrix,
    evaluate,
    mean_and_ci95,
    run_episode,
    sample_episode,
)
from mdfm.errors import InsufficientClasses, InsufficientSamples, InvalidInput, LabelOutOfRange
from mdfm.classifier import fit_ridge, one_hot
from mdfm.features import make_dataset
from mdfm.synth import SynthSpec, generate
from mdfm.transforms import TransformSpec

from oracles import grid_search_weights, tally


@pytest.fixture(scope="module")
def data():
    return generate(SynthSpec(class_count=8, samples_per_class=30, dim=10, view_count=3,
                              noise_sigma=2.0, shift_sigma=2.0, seed=3))


def test_sampling_is_deterministic(data):
    cfg = EpisodeConfig(unlabeled=2, base_seed=11)
    a, b = sample_episode(data, cfg, 5), sample_episode(data, cfg, 5)
    for name in ("class_ids", "support_idx", "unlabeled_idx", "query_idx"):
        np.testing.assert_array_equal(getattr(a, name), getattr(b, name))
    c = sample_episode(data, cfg, 6)
    assert not np.array_equal(a.query_idx, c.query_idx)


def test_partition_sizes_and_disjointness(data):
    cfg = EpisodeConfig(ways=4, shots=2, queries=5, unlabeled=3)
    ep = sample_episode(data, cfg, 0)
    assert (ep.support_idx.size, ep.unlabeled_idx.size, ep.query_idx.size) == (8, 12, 20)
    everything = np.concatenate([ep.support_idx, ep.unlabeled_idx, ep.query_idx])
    assert np.unique(everything).size == everything.size
    assert np.unique(ep.class_ids).size == 4
    assert set(data.labels[everything]) == set(ep.class_ids)
    for part, per in ((ep.support_idx, 2), (ep.unlabeled_idx, 3), (ep.query_idx, 5)):
        local = ep.local_labels(data, part)
        np.testing.assert_array_equal(np.bincount(local, minlength=4), [per] * 4)


def test_insufficient_classes(data):
    with pytest.raises(InsufficientClasses):
        sample_episode(data, EpisodeConfig(ways=9), 0)


def test_insufficient_samples(data):
    with pytest.raises(InsufficientSamples):
        sample_episode(data, EpisodeConfig(queries=30), 0)


def test_config_validation():
    with pytest.raises(InvalidInput):
        EpisodeConfig(mode="semi", unlabeled=0)
    with pytest.raises(InvalidInput):
        EpisodeConfig(ways=1)


def test_ci_examples():
    mean, half = mean_and_ci95([0.6, 1.0])
    assert mean == pytest.approx(0.8)
    assert half == pytest.approx(1.96 * np.sqrt(0.08) / np.sqrt(2))
    assert half == pytest.approx(0.392, abs=1e-12)
    assert mean_and_ci95([0.7]) == (0.7, 0.0)
    assert mean_and_ci95([0.5] * 10)[1] == 0.0


def test_confusion_examples():
    np.testing.assert_array_equal(confusion_matrix([0, 1, 1], [0, 1, 0], 2), [[1, 0], [1, 1]])
    with pytest.raises(LabelOutOfRange):
        confusion_matrix([0, 2], [0, 0], 2)


def test_confusion_matches_tally(rng):
    t, p = rng.integers(0, 5, 200), rng.integers(0, 5, 200)
    np.testing.assert_array_equal(confusion_matrix(t, p, 5), tally(t, p, 5))


def test_single_view_equals_plain_classifier(data):
    single = data.select_views(["view1"])
    report = evaluate(single, EpisodeConfig(episodes=20))
    for r in report.per_episode:
        np.testing.assert_array_equal(r.omega.omega, [1.0])
        np.testing.assert_array_equal(r.predictions, r.view_predictions[0])
        assert r.accuracy == r.per_view_accuracy[0]


def test_identical_views_get_uniform_weights(data):
    x = data.view_sets[0].features
    twin = make_dataset("twin", {"a": x, "b": x.copy(), "c": x.copy()}, data.labels)
    r = run_episode(twin, EpisodeConfig(), 0)
    np.testing.assert_allclose(r.omega.omega, 1 / 3, atol=1e-15)


def test_episode_recomputed_independently(data):
    """Rebuild one episode with textbook formulas and a brute-force weight search."""
    cfg = EpisodeConfig(ways=5, shots=2, queries=6, mu=0.7, eta=0.05, base_seed=9)
    ep = sample_episode(data, cfg, 3)
    result = run_episode(data, cfg, 3)
    ys = np.zeros((5, 10))
    ys[ep.local_labels(data, ep.support_idx), np.arange(10)] = 1
    yq = ep.local_labels(data, ep.query_idx)
    losses, view_scores = [], []
    for fs in data.view_sets:
        xs, xq = fs.features[:, ep.support_idx], fs.features[:, ep.query_idx]
        w = ys @ xs.T @ np.linalg.inv(xs @ xs.T + 0.7 * np.eye(xs.shape[0]))
        losses.append(np.sum((ys - w @ xs) ** 2) + 0.7 * np.sum(w * w))
        view_scores.append(w @ xq)
    np.testing.assert_allclose(result.view_losses, losses, rtol=1e-9)
    ref_omega = grid_search_weights(losses, 0.05)
    np.testing.assert_allclose(result.omega.omega, ref_omega, atol=2e-3)
    fused = sum(o * s for o, s in zip(result.omega.omega, view_scores))
    np.testing.assert_array_equal(result.predictions, np.argmax(fused, axis=0))
    assert result.accuracy == pytest.approx(np.mean(np.argmax(fused, axis=0) == yq))


def test_fixed_weights_are_used(data):
    r = run_episode(data, EpisodeConfig(fixed_weights=(0.0, 1.0, 0.0)), 2)
    np.testing.assert_array_equal(r.predictions, r.view_predictions[1])


def test_report_independent_of_workers(data):
    cfg = EpisodeConfig(episodes=30, base_seed=4)
    assert evaluate(data, cfg, workers=1).dumps() == evaluate(data, cfg, workers=8).dumps()


def test_report_fields(data):
    report = evaluate(data, EpisodeConfig(episodes=5))
    doc = report.to_json()
    assert doc["n_episodes"] == 5
    assert doc["views"] == ["view0", "view1", "view2"]
    assert len(doc["per_episode"][0]["confusion"]) == 25
    assert sum(doc["per_episode"][0]["confusion"]) == 75
    assert "per_episode" not in report.to_json(per_episode=False)
    assert report.summary_line().startswith("mean=")


def test_full_pca_matches_centred_features(data):
    """A full-rank PCA is a rotation of the centred pool, which ridge fits cannot see."""
    cfg = EpisodeConfig(queries=10, transform=TransformSpec("pca", 10))
    for i in range(10):
        ep = sample_episode(data, cfg, i)
        result = run_episode(data, cfg, i)
        ys = one_hot(ep.local_labels(data, ep.support_idx), cfg.ways)
        pool_idx = np.concatenate([ep.support_idx, ep.query_idx])
        view_scores = []
        for fs in data.view_sets:
            pool = fs.features[:, pool_idx]
            pool = pool - pool.mean(axis=1, keepdims=True)
            clf = fit_ridge(pool[:, :5], ys, cfg.mu)
            np.testing.assert_allclose(clf.training_loss, result.view_losses[len(view_scores)],
                                       rtol=1e-9)
            view_scores.append(clf.scores(pool[:, 5:]))
        fused = sum(w * s for w, s in zip(result.omega.omega, view_scores))
        np.testing.assert_array_equal(result.predictions, np.argmax(fused, axis=0))


def test_published_protocol_defaults():
    cfg = EpisodeConfig()
    assert (cfg.ways, cfg.shots, cfg.queries, cfg.episodes, cfg.eta) == (5, 1, 15, 600, 0.5)
