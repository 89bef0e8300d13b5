"""Reference numpy implementations of the evaluation kernels.

These are the fallback backend behind ``kernels``: the zero-forcing
column solve, the pairwise gain table, and the per-user rate
reduction. The compiled extension mirrors these signatures; both
backends agree to floating-point accuracy on non-degenerate inputs.
"""

from __future__ import annotations

import numpy as np

_CLAMP = 1.0e30


def zf_solve(stacked: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """Zero-forcing solution columns for selected rows of a stack.

    Args:
        stacked: masked channel rows, shape (m, n), real or complex.
        positions: indices into the m rows naming the target users.

    Returns:
        Array of shape (n, len(positions)); column t is the
        minimum-norm (m <= n) or least-squares (m > n) solution x of
        stacked @ x = e_{positions[t]}.
    """
    stacked = np.asarray(stacked)
    positions = np.asarray(positions, dtype=np.int64)
    n = stacked.shape[1] if stacked.ndim == 2 else 0
    if stacked.size == 0 or positions.size == 0:
        return np.zeros((n, positions.size), dtype=stacked.dtype)
    return np.linalg.pinv(stacked)[:, positions]


def gain_table(h: np.ndarray, w: np.ndarray, power: float, scale: float) -> np.ndarray:
    """Pairwise received powers G[j, l] = scale * power * |h_j^T w_l|^2."""
    t = np.asarray(h) @ np.asarray(w)
    return (scale * power) * np.abs(t) ** 2


def per_user_rates(gv, gr, b, noise_v, noise_r, bw_v, bw_r) -> np.ndarray:
    """Rates in bits/s for every user under the assignment b.

    gv and gr are the pairwise gain tables of the two networks (with
    all scale factors and powers folded in), noise_* the denominator
    noise powers, and bw_* the bandwidths with pre-log factors already
    applied. A user's SINR is its own diagonal gain over the masked
    off-diagonal row sum plus noise, clamped before the logarithm.
    """
    bf = np.asarray(b, dtype=np.float64)
    dv = np.diagonal(gv)
    dr = np.diagonal(gr)
    iv = gv @ bf - dv * bf
    ir = gr @ (1.0 - bf) - dr * (1.0 - bf)
    sinr_v = np.minimum(dv / (iv + noise_v), _CLAMP)
    sinr_r = np.minimum(dr / (ir + noise_r), _CLAMP)
    return bf * bw_v * np.log2(1.0 + sinr_v) + (1.0 - bf) * bw_r * np.log2(
        1.0 + sinr_r
    )
