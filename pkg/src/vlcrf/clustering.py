"""User-to-AP serving assignments.

A clustering matrix A has one row per user and one column per AP, with
A[j, i] = 1 when AP i serves user j. Three constructions are provided:
a distance ball around each user, a nearest-N-users rule per AP, and
the trivial all-ones matrix that lets every AP serve every user.
Matrices are float arrays holding 0.0 and 1.0 so they combine directly
with real and complex channel matrices.
"""

from __future__ import annotations

import numpy as np


def _distances(user_positions, ap_positions) -> np.ndarray:
    """Pairwise 3D Euclidean distances, shape (n_users, n_aps)."""
    users = np.asarray(user_positions, dtype=float)
    aps = np.asarray(ap_positions, dtype=float)
    diff = users[:, None, :] - aps[None, :, :]
    return np.sqrt((diff**2).sum(axis=2))


def cluster_distance(user_positions, ap_positions, d_max: float) -> np.ndarray:
    """Serve user j from AP i whenever their distance is at most d_max."""
    if d_max <= 0.0:
        raise ValueError("d_max must be positive")
    return (_distances(user_positions, ap_positions) <= d_max).astype(float)


def cluster_top_n(user_positions, ap_positions, n_max: int) -> np.ndarray:
    """Each AP serves its n_max nearest users.

    Every column gets exactly min(n_max, n_users) ones. Ties in
    distance are broken in favor of the lower user index via a stable
    sort.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    d = _distances(user_positions, ap_positions)
    n_users, n_aps = d.shape
    a = np.zeros((n_users, n_aps))
    keep = min(n_max, n_users)
    order = np.argsort(d, axis=0, kind="stable")
    for i in range(n_aps):
        a[order[:keep, i], i] = 1.0
    return a


def cluster_full(n_users: int, n_aps: int) -> np.ndarray:
    """All APs serve all users (the no-clustering special case)."""
    return np.ones((n_users, n_aps))


def row_diag(a: np.ndarray, l: int) -> np.ndarray:
    """Diagonal selector built from row l of the clustering matrix."""
    a = np.asarray(a)
    if not 0 <= l < a.shape[0]:
        raise IndexError(f"user index {l} out of range")
    return np.diag(a[l])
