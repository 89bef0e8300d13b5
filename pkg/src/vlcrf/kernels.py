"""Backend selection for the precoding and rate-evaluation kernels.

The compiled extension is preferred when it imported cleanly; setting
the environment variable VLCRF_PURE_PYTHON to a nonempty value forces
the NumPy fallback. ``BACKEND`` names the active implementation, and
the test suite checks the two backends against each other. The
compiled zero-forcing solve reports rank-deficient stacks through a
flag instead of raising; such calls are retried on the SVD route.
"""

from __future__ import annotations

import os

import numpy as np

from . import _ratecore_py

if os.environ.get("VLCRF_PURE_PYTHON"):
    _compiled = None
else:
    try:
        from . import _ratecore as _compiled  # type: ignore[no-redef]
    except ImportError:
        _compiled = None

BACKEND = "numpy" if _compiled is None else "compiled"


def zf_solve(stacked: np.ndarray, positions) -> np.ndarray:
    """Zero-forcing solution columns for selected rows of a stack.

    Column t of the result is the minimum-norm (wide stack) or
    least-squares (tall stack) solution x of
    stacked @ x = e_{positions[t]}. All-zero columns are stripped
    before the solve and their rows of the answer pinned to exact
    zeros: masked transmitters then never make the normal equations
    singular and never pick up rounding fuzz, and the wide/tall
    split is decided by the live column count.
    """
    stacked = np.ascontiguousarray(stacked)
    positions = np.ascontiguousarray(positions, dtype=np.int64)
    m = stacked.shape[0]
    n = stacked.shape[1]
    k = positions.shape[0]
    if m == 0 or n == 0 or k == 0:
        return np.zeros((n, k), dtype=stacked.dtype)
    support = np.flatnonzero(np.abs(stacked).sum(axis=0) > 0.0)
    if support.size < n:
        block = zf_solve(stacked[:, support], positions)
        out = np.zeros((n, k), dtype=block.dtype)
        out[support] = block
        return out
    if _compiled is not None:
        if np.iscomplexobj(stacked):
            w, ok = _compiled.zf_solve_complex(
                stacked.astype(np.complex128, copy=False), positions
            )
        else:
            w, ok = _compiled.zf_solve_real(
                stacked.astype(np.float64, copy=False), positions
            )
        if ok:
            return w
    return _ratecore_py.zf_solve(stacked, positions)


def gain_table(h, w, power: float, scale: float) -> np.ndarray:
    """Pairwise received powers G[j, l] = scale * power * |h_j^T w_l|^2."""
    if _compiled is None:
        return _ratecore_py.gain_table(h, w, power, scale)
    h = np.ascontiguousarray(h)
    w = np.ascontiguousarray(w)
    if np.iscomplexobj(h) or np.iscomplexobj(w):
        return _compiled.gain_table_complex(
            h.astype(np.complex128, copy=False),
            w.astype(np.complex128, copy=False),
            float(power), float(scale),
        )
    return _compiled.gain_table_real(
        h.astype(np.float64, copy=False),
        w.astype(np.float64, copy=False),
        float(power), float(scale),
    )


def per_user_rates(gv, gr, b, noise_v, noise_r, bw_v, bw_r) -> np.ndarray:
    """Rates in bits/s for every user under the assignment b."""
    if _compiled is None:
        return _ratecore_py.per_user_rates(
            gv, gr, b, noise_v, noise_r, bw_v, bw_r
        )
    return _compiled.per_user_rates(
        np.ascontiguousarray(gv, dtype=np.float64),
        np.ascontiguousarray(gr, dtype=np.float64),
        np.ascontiguousarray(b, dtype=np.uint8),
        float(noise_v), float(noise_r), float(bw_v), float(bw_r),
    )
