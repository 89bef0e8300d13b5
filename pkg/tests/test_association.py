"""Tests for the user-association solvers and their shared evaluation."""

import numpy as np
import pytest

from vlcrf.association import (
    EXHAUSTIVE_MAX_USERS,
    AssociationContext,
    associate_exhaustive,
    associate_gibbs,
    associate_iterative,
    associate_random,
    evaluate_assignment,
    gibbs_exponential_scores,
    gibbs_score_transform,
)
from vlcrf.channel import RfParams, VlcParams, build_channel_matrices
from vlcrf.clustering import cluster_full
from vlcrf.rates import rf_network_config, vlc_network_config
from vlcrf.scenario import Room, Scenario, deploy_aps, place_users


def _trial_context(n_users=6, seed=1):
    room = Room()
    layout = deploy_aps(room, 16, 9)
    rng = np.random.default_rng(seed)
    users = place_users(room, n_users, rng)
    sc = Scenario(room=room, aps=layout, users=users)
    mats = build_channel_matrices(sc, VlcParams(), RfParams(), rng)
    return AssociationContext(
        Hv=mats.Hv, Hr=mats.Hr,
        Av=cluster_full(n_users, 16), Ar=cluster_full(n_users, 9),
        cfg_v=vlc_network_config(), cfg_r=rf_network_config(),
    )


def test_context_reports_user_count():
    assert _trial_context(n_users=5).n_users == 5


def test_evaluate_assignment_returns_rates_and_total():
    ctx = _trial_context()
    b = np.array([1, 0, 1, 0, 1, 0], dtype=np.uint8)
    rates, total = evaluate_assignment(ctx, b)
    assert rates.shape == (6,)
    assert np.all(rates >= 0.0)
    assert total == pytest.approx(float(rates.sum()))


def test_associate_random_is_fair_and_reproducible():
    a = associate_random(1000, np.random.default_rng(3))
    b = associate_random(1000, np.random.default_rng(3))
    np.testing.assert_array_equal(a, b)
    assert set(np.unique(a)) == {0, 1}
    assert 380 <= a.sum() <= 620
    with pytest.raises(ValueError):
        associate_random(0, np.random.default_rng(0))


def test_score_transform_is_a_distribution():
    p = gibbs_score_transform([1.0e9, 3.0e9, 2.0e9])
    assert p.sum() == pytest.approx(1.0, rel=1e-12)
    assert np.all(p >= 0.0)
    # Squaring the normalized scores sharpens toward the best entry.
    assert p.argmax() == 1
    assert p[1] > 2.0 * p[2]
    assert p[0] == 0.0


def test_score_transform_uniform_on_ties():
    np.testing.assert_allclose(
        gibbs_score_transform([5.0, 5.0, 5.0, 5.0]), np.full(4, 0.25)
    )


def test_score_transform_frozen_example():
    # Frozen oracle, hand-computed: scores (0, 1, 3) min-max to
    # (0, 1/3, 1), sum 4/3, normalized (0, 1/4, 3/4), squared
    # (0, 1/16, 9/16), renormalized (0, 0.1, 0.9).
    np.testing.assert_allclose(
        gibbs_score_transform([0.0, 1.0, 3.0]),
        [0.0, 0.1, 0.9],
        rtol=1e-12,
    )


def test_exponential_scores_prefer_higher_rates():
    p = gibbs_exponential_scores([1.0e9, 2.0e9, 4.0e9], beta=1.0e9)
    assert p.sum() == pytest.approx(1.0, rel=1e-12)
    assert p[2] > p[1] > p[0]


def test_exponential_scores_zero_rate_handling():
    p = gibbs_exponential_scores([0.0, 1.0e9], beta=1.0e9)
    assert p[0] == 0.0
    assert p[1] == pytest.approx(1.0)
    np.testing.assert_allclose(
        gibbs_exponential_scores([0.0, 0.0], beta=1.0), [0.5, 0.5]
    )


def test_gibbs_solver_converges_and_traces():
    ctx = _trial_context(n_users=8, seed=5)
    b, trace = associate_gibbs(ctx, rng=np.random.default_rng(11))
    assert b.shape == (8,)
    assert set(np.unique(b)) <= {0, 1}
    assert trace.iterations >= 1
    assert trace.rate_trace.shape == (trace.iterations,)
    assert trace.changes <= trace.iterations
    # The returned vector scores what the trace says it scores.
    final = evaluate_assignment(ctx, b)[1]
    if trace.converged:
        assert final == pytest.approx(trace.rate_trace[-1], rel=1e-12)
    else:
        # Without convergence the best vector seen is returned, which
        # is at least as good as every sampled incumbent.
        assert final >= trace.rate_trace.max() * (1.0 - 1e-12)


def test_gibbs_solver_is_seed_deterministic():
    ctx = _trial_context(n_users=8, seed=5)
    b1, t1 = associate_gibbs(ctx, rng=np.random.default_rng(4))
    b2, t2 = associate_gibbs(ctx, rng=np.random.default_rng(4))
    np.testing.assert_array_equal(b1, b2)
    np.testing.assert_array_equal(t1.rate_trace, t2.rate_trace)


def test_gibbs_exponential_weighting_runs():
    ctx = _trial_context(n_users=6, seed=2)
    b, trace = associate_gibbs(
        ctx, rng=np.random.default_rng(1), weighting="exponential"
    )
    assert b.shape == (6,)
    assert trace.iterations >= 1


def test_gibbs_solver_validates_arguments():
    ctx = _trial_context()
    with pytest.raises(ValueError):
        associate_gibbs(ctx, t_max=0)
    with pytest.raises(ValueError):
        associate_gibbs(ctx, beta=0.0)
    with pytest.raises(ValueError):
        associate_gibbs(ctx, weighting="boltzmann")


def test_gibbs_nonconverged_returns_best_seen():
    ctx = _trial_context(n_users=8, seed=5)
    b, trace = associate_gibbs(ctx, t_max=2, rng=np.random.default_rng(0))
    if not trace.converged:
        final = evaluate_assignment(ctx, b)[1]
        assert final >= trace.rate_trace.max() - 1e-6


def test_iterative_solver_improves_and_terminates():
    ctx = _trial_context(n_users=10, seed=7)
    b, trace = associate_iterative(ctx)
    assert trace.converged
    assert trace.iterations >= 1
    assert trace.changes == trace.rate_trace.size
    # Accepted sum-rates strictly increase.
    assert np.all(np.diff(trace.rate_trace) > 0.0)
    # The result beats the all-optical starting point.
    start = evaluate_assignment(ctx, np.ones(10, dtype=np.uint8))[1]
    final = evaluate_assignment(ctx, b)[1]
    assert final >= start


def test_iterative_solver_reaches_single_flip_optimum():
    ctx = _trial_context(n_users=8, seed=9)
    b, _ = associate_iterative(ctx)
    best = evaluate_assignment(ctx, b)[1]
    for j in range(8):
        flipped = b.copy()
        flipped[j] ^= 1
        assert evaluate_assignment(ctx, flipped)[1] <= best


def test_iterative_solver_is_deterministic():
    ctx = _trial_context(n_users=10, seed=7)
    b1, t1 = associate_iterative(ctx)
    b2, t2 = associate_iterative(ctx)
    np.testing.assert_array_equal(b1, b2)
    np.testing.assert_array_equal(t1.rate_trace, t2.rate_trace)


def test_exhaustive_matches_brute_force():
    ctx = _trial_context(n_users=5, seed=3)
    best = associate_exhaustive(ctx)
    best_rate = evaluate_assignment(ctx, best)[1]
    for k in range(1 << 5):
        b = np.array([(k >> j) & 1 for j in range(5)], dtype=np.uint8)
        assert evaluate_assignment(ctx, b)[1] <= best_rate + 1e-6


def test_exhaustive_beats_or_ties_other_solvers():
    ctx = _trial_context(n_users=6, seed=13)
    exact = evaluate_assignment(ctx, associate_exhaustive(ctx))[1]
    greedy = evaluate_assignment(ctx, associate_iterative(ctx)[0])[1]
    sampled = evaluate_assignment(
        ctx, associate_gibbs(ctx, rng=np.random.default_rng(2))[0]
    )[1]
    assert exact >= greedy - 1e-6
    assert exact >= sampled - 1e-6


def test_exhaustive_tie_break_is_lowest_index():
    # Dead channels score every assignment at zero; the first
    # enumerated vector (all radio) must win the tie.
    n = 4
    ctx = AssociationContext(
        Hv=np.zeros((n, 4)), Hr=np.zeros((n, 4), dtype=complex),
        Av=np.ones((n, 4)), Ar=np.ones((n, 4)),
        cfg_v=vlc_network_config(), cfg_r=rf_network_config(),
    )
    np.testing.assert_array_equal(
        associate_exhaustive(ctx), np.zeros(n, dtype=np.uint8)
    )


def test_exhaustive_guards_against_large_instances():
    ctx = _trial_context(n_users=EXHAUSTIVE_MAX_USERS + 1, seed=0)
    with pytest.raises(ValueError, match="at most"):
        associate_exhaustive(ctx)
