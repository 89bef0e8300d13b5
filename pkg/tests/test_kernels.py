"""Tests for the hot-path kernels and compiled/numpy backend parity."""

import numpy as np
import pytest

from vlcrf import _ratecore_py as refimpl
from vlcrf import kernels

compiled_only = pytest.mark.skipif(
    kernels.BACKEND != "compiled",
    reason="compiled extension not active",
)


def _stack(rng, m, n, complex_valued=False, scale=1.0e-5):
    s = rng.normal(size=(m, n))
    if complex_valued:
        s = s + 1j * rng.normal(size=(m, n))
    return s * scale


def test_backend_identifier_is_known():
    assert kernels.BACKEND in ("compiled", "numpy")


def test_reference_zf_solve_is_pseudoinverse():
    rng = np.random.default_rng(0)
    s = _stack(rng, 4, 6)
    pos = np.array([0, 2], dtype=np.int64)
    w = refimpl.zf_solve(s, pos)
    np.testing.assert_allclose(w, np.linalg.pinv(s)[:, [0, 2]],
                               rtol=1e-12, atol=0.0)


def test_zf_solve_empty_inputs():
    w = kernels.zf_solve(np.zeros((0, 5)), np.zeros(0, dtype=np.int64))
    assert w.shape == (5, 0)
    w = kernels.zf_solve(np.zeros((3, 0)), np.array([1], dtype=np.int64))
    assert w.shape == (0, 1)


@pytest.mark.parametrize("complex_valued", [False, True])
@pytest.mark.parametrize("m,n", [(3, 8), (8, 8), (8, 3)])
def test_zf_solve_matches_pseudoinverse(m, n, complex_valued):
    rng = np.random.default_rng(42)
    for _ in range(25):
        s = _stack(rng, m, n, complex_valued)
        k = int(rng.integers(1, m + 1))
        pos = np.sort(rng.choice(m, size=k, replace=False)).astype(np.int64)
        w = kernels.zf_solve(s, pos)
        ref = np.linalg.pinv(s)[:, pos]
        np.testing.assert_allclose(w, ref, rtol=1e-8, atol=1e-16)


def test_zf_solve_overloaded_skips_dead_columns():
    # Tall stacks with all-zero columns keep those rows of the answer
    # at zero and solve the live block exactly like the dense route.
    rng = np.random.default_rng(1)
    s = _stack(rng, 7, 4)
    s[:, 2] = 0.0
    pos = np.array([0, 3, 5], dtype=np.int64)
    w = kernels.zf_solve(s, pos)
    assert np.all(w[2] == 0.0)
    np.testing.assert_allclose(w, np.linalg.pinv(s)[:, pos],
                               rtol=1e-8, atol=1e-16)


def test_zf_solve_rank_deficient_falls_back_cleanly():
    # Duplicated rows make the Gram matrix singular; the wrapper must
    # still return the pseudoinverse columns.
    rng = np.random.default_rng(2)
    s = _stack(rng, 4, 6)
    s[1] = s[0]
    pos = np.arange(4, dtype=np.int64)
    w = kernels.zf_solve(s, pos)
    np.testing.assert_allclose(w, np.linalg.pinv(s)[:, pos],
                               rtol=1e-8, atol=1e-16)


def test_gain_table_matches_definition():
    rng = np.random.default_rng(3)
    h = _stack(rng, 6, 9)
    w = rng.normal(size=(9, 6)) * 1.0e4
    g = kernels.gain_table(h, w, power=2.5e-10, scale=140.45)
    expected = 140.45 * 2.5e-10 * np.abs(h @ w) ** 2
    np.testing.assert_allclose(g, expected, rtol=1e-12, atol=0.0)


def test_gain_table_complex_channel():
    rng = np.random.default_rng(4)
    h = _stack(rng, 5, 7, complex_valued=True)
    w = (rng.normal(size=(7, 5)) + 1j * rng.normal(size=(7, 5))) * 1.0e4
    g = kernels.gain_table(h, w, power=1.0e-9, scale=5.0)
    expected = 5.0e-9 * np.abs(h @ w) ** 2
    assert not np.iscomplexobj(g)
    np.testing.assert_allclose(g, expected, rtol=1e-12, atol=0.0)


def _rate_fixture(rng, n=10):
    gv = np.abs(rng.normal(size=(n, n))) * 1.0e-9
    gr = np.abs(rng.normal(size=(n, n))) * 1.0e-11
    b = rng.integers(0, 2, size=n).astype(np.uint8)
    return gv, gr, b


def test_per_user_rates_matches_loop_reference():
    rng = np.random.default_rng(5)
    gv, gr, b = _rate_fixture(rng)
    noise_v, noise_r = 3.6e-14, 1.5e-12
    bw_v, bw_r = 20.0e6, 15.0e6
    rates = kernels.per_user_rates(gv, gr, b, noise_v, noise_r, bw_v, bw_r)
    for j in range(10):
        if b[j]:
            interf = sum(gv[j, l] for l in range(10) if l != j and b[l])
            gamma = gv[j, j] / (interf + noise_v)
            expected = bw_v * np.log2(1.0 + gamma)
        else:
            interf = sum(gr[j, l] for l in range(10) if l != j and not b[l])
            gamma = gr[j, j] / (interf + noise_r)
            expected = bw_r * np.log2(1.0 + gamma)
        assert rates[j] == pytest.approx(expected, rel=1e-12)


def test_per_user_rates_clamps_extreme_sinr():
    gv = np.array([[1.0]])
    gr = np.array([[0.0]])
    b = np.array([1], dtype=np.uint8)
    rates = kernels.per_user_rates(gv, gr, b, 1.0e-300, 1.0, 1.0, 1.0)
    assert rates[0] == pytest.approx(np.log2(1.0 + 1.0e30), rel=1e-12)


@compiled_only
def test_compiled_zf_solve_agrees_with_reference():
    from vlcrf import _ratecore as fast

    rng = np.random.default_rng(6)
    worst = 0.0
    for trial in range(60):
        m = int(rng.integers(1, 12))
        n = int(rng.integers(1, 12))
        complex_valued = bool(rng.integers(0, 2))
        s = _stack(rng, m, n, complex_valued)
        k = int(rng.integers(1, m + 1))
        pos = np.sort(rng.choice(m, size=k, replace=False)).astype(np.int64)
        ref = refimpl.zf_solve(s, pos)
        if complex_valued:
            w, ok = fast.zf_solve_complex(
                np.ascontiguousarray(s, dtype=np.complex128), pos
            )
        else:
            w, ok = fast.zf_solve_real(np.ascontiguousarray(s), pos)
        assert ok
        worst = max(worst, np.abs(w - ref).max() / np.abs(ref).max())
    assert worst < 1e-9


@compiled_only
def test_compiled_zf_solve_reports_degenerate_input():
    from vlcrf import _ratecore as fast

    s = np.zeros((2, 4))
    pos = np.array([0], dtype=np.int64)
    w, ok = fast.zf_solve_real(s, pos)
    assert not ok


@compiled_only
def test_compiled_gain_table_agrees_with_reference():
    from vlcrf import _ratecore as fast

    rng = np.random.default_rng(7)
    h = _stack(rng, 8, 12)
    w = rng.normal(size=(12, 8)) * 1.0e4
    a = fast.gain_table_real(np.ascontiguousarray(h),
                             np.ascontiguousarray(w), 1.0e-10, 140.45)
    b = refimpl.gain_table(h, w, 1.0e-10, 140.45)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=0.0)
    hc = _stack(rng, 8, 12, complex_valued=True)
    wc = (rng.normal(size=(12, 8)) + 1j * rng.normal(size=(12, 8))) * 1.0e4
    a = fast.gain_table_complex(
        np.ascontiguousarray(hc, dtype=np.complex128),
        np.ascontiguousarray(wc, dtype=np.complex128), 1.0e-10, 5.0,
    )
    b = refimpl.gain_table(hc, wc, 1.0e-10, 5.0)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=0.0)


@compiled_only
def test_compiled_per_user_rates_agrees_with_reference():
    from vlcrf import _ratecore as fast

    rng = np.random.default_rng(8)
    for _ in range(20):
        gv, gr, b = _rate_fixture(rng, n=12)
        args = (3.6e-14, 1.5e-12, 20.0e6, 15.0e6)
        a = fast.per_user_rates(
            np.ascontiguousarray(gv), np.ascontiguousarray(gr),
            np.ascontiguousarray(b), *args,
        )
        ref = refimpl.per_user_rates(gv, gr, b, *args)
        np.testing.assert_allclose(a, ref, rtol=1e-10, atol=1e-6)


@compiled_only
def test_single_candidate_evaluation_matches_reference_backend(monkeypatch):
    # One full candidate evaluation (two refits plus the rate sum)
    # agrees between backends far below any accept/reject margin that
    # matters; full solver trajectories may still differ because the
    # greedy branch amplifies last-digit ties.
    from vlcrf.association import AssociationContext, evaluate_assignment
    from vlcrf.channel import RfParams, VlcParams, build_channel_matrices
    from vlcrf.clustering import cluster_full
    from vlcrf.rates import rf_network_config, vlc_network_config
    from vlcrf.scenario import Room, Scenario, deploy_aps, place_users

    room = Room()
    layout = deploy_aps(room, 16, 9)
    rng = np.random.default_rng(21)
    users = place_users(room, 14, rng)
    sc = Scenario(room=room, aps=layout, users=users)
    mats = build_channel_matrices(sc, VlcParams(), RfParams(), rng)
    ctx = AssociationContext(
        Hv=mats.Hv, Hr=mats.Hr,
        Av=cluster_full(14, 16), Ar=cluster_full(14, 9),
        cfg_v=vlc_network_config(), cfg_r=rf_network_config(),
    )
    for seed in range(5):
        b = np.random.default_rng(seed).integers(0, 2, size=14)
        b = b.astype(np.uint8)
        rates_fast, total_fast = evaluate_assignment(ctx, b)

        # Same evaluation with the numpy reference kernels swapped in.
        monkeypatch.setattr(kernels, "zf_solve", refimpl.zf_solve)
        monkeypatch.setattr(kernels, "gain_table", refimpl.gain_table)
        monkeypatch.setattr(kernels, "per_user_rates",
                            refimpl.per_user_rates)
        rates_ref, total_ref = evaluate_assignment(ctx, b)
        monkeypatch.undo()

        np.testing.assert_allclose(rates_fast, rates_ref,
                                   rtol=1e-9, atol=1e-3)
        assert total_fast == pytest.approx(total_ref, rel=1e-9)
