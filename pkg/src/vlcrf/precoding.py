"""Clustering-aware zero-forcing precoder and equal power allocation.

The precoder of user j only nulls interference toward users that share
at least one serving AP with j (the shared set S_j), so each column is
computed from a small stacked system instead of the full channel
matrix. Stacking the masked channel rows g_i = mask_j * h_i for every
i in S_j, where mask_j is user j's clustering row, the column w_j is
the minimum-norm solution of

    g_i^T w_j = 1 if i == j else 0,   for all i in S_j,

obtained through the Moore-Penrose pseudo-inverse of the stacked
matrix. For real channels this coincides with the Gram-matrix form
(sum of g_l g_l^H)^+ g_j; for complex channels it is its conjugate,
which is the reading that nulls the transpose-convention cross terms
h_i^T diag(mask_j) w_j appearing in the rate model. Rank-deficient
stacks degrade continuously through the pseudo-inverse instead of
failing.

Power is allocated equally: every user gets P = 1 / max_i sum_j
|w_{i,j}|^2, which makes the most loaded AP meet its (normalized) unit
power budget with equality.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels


@dataclass(frozen=True)
class PowerAllocation:
    """Per-user transmit power scalars in normalized units."""

    P: np.ndarray


def shared_ap_set(a: np.ndarray, j: int) -> set:
    """Users whose clustering rows overlap user j's row in at least one AP."""
    a = np.asarray(a, dtype=float)
    if not 0 <= j < a.shape[0]:
        raise IndexError(f"user index {j} out of range")
    overlap = a @ a[j]
    return set(np.nonzero(overlap > 0.0)[0].tolist())


def partial_zf(h: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Zero-forcing precoding matrix restricted by the clustering.

    Args:
        h: channel matrix, shape (n_users, n_aps), real or complex.
        a: binary clustering matrix of the same shape.

    Returns:
        Precoding matrix W of shape (n_aps, n_users); column j has
        support inside user j's clustering row, and users with an empty
        shared set get an all-zero column.
    """
    h = np.asarray(h)
    a = np.asarray(a, dtype=float)
    if h.shape != a.shape:
        raise ValueError("channel and clustering shapes differ")
    if not np.all(np.isfinite(h)):
        raise ValueError("channel matrix has non-finite entries")
    n_users, n_aps = h.shape
    w = np.zeros((n_aps, n_users), dtype=h.dtype)
    if n_aps == 0 or n_users == 0:
        return w

    # Users with identical clustering rows share the same stacked
    # system, so solve once per distinct row pattern. Under full
    # clustering this collapses to a single pseudo-inverse.
    groups: dict = {}
    for j in range(n_users):
        groups.setdefault(a[j].tobytes(), []).append(j)
    for members in groups.values():
        mask = a[members[0]]
        if not mask.any():
            continue
        shared = np.nonzero(a @ mask > 0.0)[0]
        stacked = h[shared] * mask[None, :]
        # All-zero rows (out-of-view or blocked receivers) add nothing
        # to the solution and would only degrade the Gram systems, so
        # drop them; targets among them keep their all-zero column.
        live = np.flatnonzero(np.abs(stacked).sum(axis=1) > 0.0)
        if live.size == 0:
            continue
        shared_live = shared[live]
        live_set = set(shared_live.tolist())
        targets = np.asarray(
            [j for j in members if j in live_set], dtype=np.int64
        )
        if targets.size == 0:
            continue
        positions = np.searchsorted(shared_live, targets)
        block = kernels.zf_solve(stacked[live], positions)
        w[:, targets] = block
    return w


def allocate_powers(w: np.ndarray) -> PowerAllocation:
    """Equal per-user power meeting every AP's unit budget.

    All users receive P = 1 / max_i sum_j |w_{i, j}|^2. The scalar is
    then nudged down by single ulps until the realized per-AP load is
    at most 1 under both evaluation orders (sum of products and product
    of sums), so the budget check never fails to rounding.
    """
    w = np.asarray(w)
    n_users = w.shape[1] if w.ndim == 2 else 0
    if w.size == 0 or not w.any():
        return PowerAllocation(P=np.zeros(n_users))
    squared = np.abs(w) ** 2
    per_ap = squared.sum(axis=1)
    p = 1.0 / per_ap.max()
    while max((squared * p).sum(axis=1).max(), (per_ap * p).max()) > 1.0:
        p = np.nextafter(p, 0.0)
    return PowerAllocation(P=np.full(n_users, p))
