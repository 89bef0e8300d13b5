"""Tests for partial zero-forcing precoding and equal power allocation."""

import numpy as np
import pytest

from vlcrf.clustering import cluster_full, cluster_top_n, row_diag
from vlcrf.precoding import allocate_powers, partial_zf, shared_ap_set


def _random_instance(rng, n_users, n_aps, complex_valued=False):
    h = rng.normal(size=(n_users, n_aps))
    if complex_valued:
        h = h + 1j * rng.normal(size=(n_users, n_aps))
    return h * 1.0e-5


def test_shared_ap_set_collects_overlapping_users():
    a = np.array([
        [1.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])
    # Users 0 and 1 overlap on AP 2; user 2 is isolated on AP 3.
    assert shared_ap_set(a, 0) == {0, 1}
    assert shared_ap_set(a, 1) == {0, 1}
    assert shared_ap_set(a, 2) == {2}
    with pytest.raises(IndexError):
        shared_ap_set(a, 3)


@pytest.mark.parametrize("complex_valued", [False, True])
def test_full_clustering_underloaded_zeroes_interference(complex_valued):
    # With every AP serving every user and more APs than users, the
    # precoder nulls all cross terms exactly up to rounding.
    rng = np.random.default_rng(0)
    for _ in range(20):
        h = _random_instance(rng, 6, 9, complex_valued)
        a = cluster_full(6, 9)
        w = partial_zf(h, a)
        t = h @ w
        diag = np.abs(np.diag(t))
        off = np.abs(t - np.diag(np.diag(t)))
        assert diag.min() > 0.0
        assert off.max() <= 1e-9 * diag.min()


@pytest.mark.parametrize("complex_valued", [False, True])
def test_full_clustering_underloaded_hits_unit_targets(complex_valued):
    rng = np.random.default_rng(1)
    h = _random_instance(rng, 5, 8, complex_valued)
    w = partial_zf(h, cluster_full(5, 8))
    np.testing.assert_allclose(h @ w, np.eye(5), atol=1e-9)


def test_matches_pseudoinverse_when_underloaded():
    rng = np.random.default_rng(2)
    h = _random_instance(rng, 4, 7)
    w = partial_zf(h, cluster_full(4, 7))
    np.testing.assert_allclose(w, np.linalg.pinv(h), rtol=1e-9, atol=1e-18)


def test_overloaded_returns_least_squares_fit():
    # More users than APs: exact nulling is impossible, the solve
    # falls back to the least-squares fit through the normal equations.
    rng = np.random.default_rng(3)
    h = _random_instance(rng, 9, 4)
    w = partial_zf(h, cluster_full(9, 4))
    np.testing.assert_allclose(
        w, np.linalg.pinv(h), rtol=1e-8, atol=1e-18
    )


def test_precoder_support_respects_clustering():
    # AP l contributes to user j's stream only when a[j, l] = 1.
    rng = np.random.default_rng(4)
    users = np.column_stack([
        rng.uniform(0, 10, 5), rng.uniform(0, 10, 5), np.full(5, 0.85)
    ])
    aps = np.column_stack([
        rng.uniform(0, 10, 8), rng.uniform(0, 10, 8), np.full(8, 3.0)
    ])
    a = cluster_top_n(users, aps, 4)
    h = _random_instance(rng, 5, 8)
    w = partial_zf(h, a)
    assert np.all(w[a.T == 0.0] == 0.0)


def test_masked_interference_is_nulled_within_groups():
    # Users sharing an identical clustering row see zero interference
    # from each other through the masked channel.
    rng = np.random.default_rng(5)
    h = _random_instance(rng, 4, 9)
    a = np.zeros((4, 9))
    a[0, :4] = 1.0
    a[1, :4] = 1.0
    a[2, 4:] = 1.0
    a[3, 4:] = 1.0
    w = partial_zf(h, a)
    for j, l in [(0, 1), (1, 0), (2, 3), (3, 2)]:
        cross = abs(h[j] @ row_diag(a, l) @ w[:, l])
        own = abs(h[j] @ row_diag(a, j) @ w[:, j])
        assert cross <= 1e-9 * own


def test_zero_channel_rows_get_zero_columns():
    h = _random_instance(np.random.default_rng(6), 4, 6)
    h[2] = 0.0
    w = partial_zf(h, cluster_full(4, 6))
    assert np.all(w[:, 2] == 0.0)
    # The remaining users still get their unit targets.
    keep = [0, 1, 3]
    np.testing.assert_allclose(
        (h @ w)[np.ix_(keep, keep)], np.eye(3), atol=1e-9
    )


def test_zero_clustering_rows_get_zero_columns():
    h = _random_instance(np.random.default_rng(7), 3, 5)
    a = cluster_full(3, 5)
    a[1] = 0.0
    w = partial_zf(h, a)
    assert np.all(w[:, 1] == 0.0)
    assert np.any(w[:, 0] != 0.0)


def test_partial_zf_validates_inputs():
    h = np.ones((3, 4))
    with pytest.raises(ValueError):
        partial_zf(h, np.ones((2, 4)))
    with pytest.raises(ValueError):
        partial_zf(h, np.ones((3, 5)))
    bad = np.ones((3, 4))
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        partial_zf(bad, np.ones((3, 4)))


def test_allocate_powers_saturates_the_binding_ap():
    rng = np.random.default_rng(8)
    w = rng.normal(size=(6, 4))
    alloc = allocate_powers(w)
    p = alloc.P
    assert p.shape == (4,)
    # Equal power across users.
    assert np.all(p == p[0])
    per_ap = (np.abs(w) ** 2 * p[None, :]).sum(axis=1)
    assert per_ap.max() <= 1.0
    assert per_ap.max() >= 1.0 - 1e-9


def test_allocate_powers_complex_precoder():
    rng = np.random.default_rng(9)
    w = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
    p = allocate_powers(w).P
    per_ap = (np.abs(w) ** 2 * p[None, :]).sum(axis=1)
    assert per_ap.max() <= 1.0
    assert per_ap.max() >= 1.0 - 1e-9


def test_allocate_powers_zero_precoder_gives_zero_power():
    p = allocate_powers(np.zeros((4, 3))).P
    np.testing.assert_array_equal(p, np.zeros(3))


def test_allocate_powers_empty_precoder():
    p = allocate_powers(np.zeros((4, 0))).P
    assert p.shape == (0,)


def test_distinct_groups_are_solved_independently():
    # Two disjoint AP groups: the solution equals solving each block
    # on its own and embedding the results.
    rng = np.random.default_rng(10)
    h = _random_instance(rng, 4, 10)
    a = np.zeros((4, 10))
    a[:2, :5] = 1.0
    a[2:, 5:] = 1.0
    w = partial_zf(h, a)
    w_left = partial_zf(h[:2, :5], cluster_full(2, 5))
    w_right = partial_zf(h[2:, 5:], cluster_full(2, 5))
    np.testing.assert_allclose(w[:5, :2], w_left, rtol=1e-10, atol=1e-18)
    np.testing.assert_allclose(w[5:, 2:], w_right, rtol=1e-10, atol=1e-18)
