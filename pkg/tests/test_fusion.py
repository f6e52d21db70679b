import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdfm.errors import InvalidInput, LengthMismatch, ShapeMismatch
from mdfm.fusion import (
    FusionWeights,
    fuse_scores,
    fusion_objective,
    multiplier_average,
    predict_fused,
    project_simplex,
    solve_weights,
    weights_from_multiplier,
)

from oracles import grid_search_weights, weighted_argmax

losses_st = st.lists(st.floats(0, 50, allow_nan=False), min_size=1, max_size=8)
eta_st = st.floats(1e-3, 1e3)


@pytest.mark.parametrize("losses,expected", [
    ((0.3, 0.3), (0.5, 0.5)),
    ((0.0, 0.5), (0.75, 0.25)),
    ((0.0, 1.0), (1.0, 0.0)),
    ((0.0, 5.0), (1.0, 0.0)),
    ((0.2, 0.4, 0.6), (8 / 15, 5 / 15, 2 / 15)),
    ((7.0,), (1.0,)),
])
def test_weight_examples(losses, expected):
    np.testing.assert_allclose(solve_weights(losses, 0.5).omega, expected, atol=1e-12)


def test_closed_form_multiplier():
    lam = multiplier_average([0.0, 0.5], 0.5)
    assert lam == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(weights_from_multiplier([0.0, 0.5], 0.5, lam), [0.75, 0.25])


@given(losses_st, eta_st)
def test_closed_form_agrees_with_projection(losses, eta):
    omega = solve_weights(losses, eta).omega
    lam = multiplier_average(losses, eta)
    np.testing.assert_allclose(weights_from_multiplier(losses, eta, lam), omega, atol=1e-9)


@given(losses_st, eta_st)
def test_feasible(losses, eta):
    omega = solve_weights(losses, eta).omega
    assert np.all(omega >= 0)
    assert abs(omega.sum() - 1) < 1e-12


@given(losses_st, eta_st, st.data())
def test_lower_loss_never_less_weight(losses, eta, data):
    omega = solve_weights(losses, eta).omega
    i = data.draw(st.integers(0, len(losses) - 1))
    j = data.draw(st.integers(0, len(losses) - 1))
    if losses[i] < losses[j]:
        assert omega[i] >= omega[j] - 1e-12


@given(losses_st, eta_st, st.floats(0, 100))
def test_shift_invariant(losses, eta, shift):
    a = solve_weights(losses, eta).omega
    b = solve_weights(np.asarray(losses) + shift, eta).omega
    np.testing.assert_allclose(a, b, atol=1e-9)


@given(losses_st)
def test_large_eta_is_uniform(losses):
    omega = solve_weights(losses, 1e9).omega
    np.testing.assert_allclose(omega, 1 / len(losses), atol=1e-7)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 3), min_size=2, max_size=3), st.floats(0.05, 5))
def test_matches_grid_search(losses, eta):
    omega = solve_weights(losses, eta).omega
    ref = grid_search_weights(losses, eta, step=1e-3)
    assert fusion_objective(omega, losses, eta) <= fusion_objective(ref, losses, eta) + 1e-12
    np.testing.assert_allclose(omega, ref, atol=2e-3)


def test_beats_random_feasible_points(rng):
    losses = rng.uniform(0, 2, 5)
    omega = solve_weights(losses, 0.3).omega
    best = fusion_objective(omega, losses, 0.3)
    for _ in range(2000):
        p = rng.dirichlet(np.ones(5))
        assert fusion_objective(p, losses, 0.3) >= best - 1e-12


def test_projection_fixed_point():
    p = np.array([0.2, 0.3, 0.5])
    np.testing.assert_allclose(project_simplex(p), p)


@pytest.mark.parametrize("losses,eta", [([], 0.5), ([-1.0, 0.0], 0.5), ([np.nan], 0.5),
                                        ([1.0], 0.0), ([1.0], -1.0)])
def test_rejects_bad_input(losses, eta):
    with pytest.raises(InvalidInput):
        solve_weights(losses, eta)


def test_fuse_scores_example():
    s1 = np.array([[1.0, 0.0], [0.0, 1.0]])
    s2 = np.array([[0.0, 0.0], [1.0, 0.5]])
    w = FusionWeights(np.array([0.75, 0.25]), 0.5)
    np.testing.assert_allclose(fuse_scores([s1, s2], w), [[0.75, 0.0], [0.25, 0.875]])
    np.testing.assert_array_equal(predict_fused([s1, s2], w), [0, 1])


def test_fuse_against_loop_oracle(rng):
    views = [rng.standard_normal((4, 30)) for _ in range(3)]
    w = solve_weights([0.1, 0.4, 0.2], 0.5)
    np.testing.assert_array_equal(predict_fused(views, w), weighted_argmax(views, w.omega))


def test_fuse_errors():
    w = FusionWeights(np.array([0.5, 0.5]), 0.5)
    with pytest.raises(LengthMismatch):
        fuse_scores([np.zeros((2, 2))], w)
    with pytest.raises(ShapeMismatch):
        fuse_scores([np.zeros((2, 2)), np.zeros((2, 3))], w)


def test_fuse_single_view_identity(rng):
    s = rng.standard_normal((3, 4))
    np.testing.assert_array_equal(fuse_scores([s], FusionWeights(np.array([1.0]), 0.5)), s)


def test_fuse_cancellation(rng):
    a = rng.standard_normal((3, 4))
    out = fuse_scores([a, -a], FusionWeights(np.array([0.5, 0.5]), 0.5))
    np.testing.assert_array_equal(out, np.zeros((3, 4)))


def test_zero_weight_view_ignored():
    v1 = np.array([[5.0, 5.0], [0.0, 0.0]])
    v2 = np.array([[0.0, 0.0], [9.0, 9.0]])
    np.testing.assert_array_equal(predict_fused([v1, v2], FusionWeights(np.array([1.0, 0.0]), 0.5)),
                                  [0, 0])
