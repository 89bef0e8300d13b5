"""Indoor layout generation: room, ceiling AP grids, users, blockage.

The simulated space is a rectangular room. Access points sit on the
ceiling plane in centered square grids (one grid per network), users
are dropped uniformly at random over the floor at a fixed receiver
altitude, and a per-trial blockage mask marks the users whose optical
line of sight is obstructed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Room:
    """Rectangular room with a fixed receiver plane below the ceiling."""

    length: float = 10.0
    width: float = 10.0
    height: float = 3.0
    user_altitude: float = 0.85

    def __post_init__(self):
        for name in ("length", "width", "height", "user_altitude"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.user_altitude >= self.height:
            raise ValueError("user_altitude must be below the room height")


@dataclass(frozen=True)
class ApLayout:
    """Ceiling positions of the VLC and RF access points.

    Both arrays have shape (count, 3) with z equal to the room height.
    A count of zero is represented by an empty (0, 3) array.
    """

    vlc_positions: np.ndarray
    rf_positions: np.ndarray


@dataclass
class UserState:
    """User positions, shape (n_users, 3), plus the VLC blockage mask."""

    positions: np.ndarray
    vlc_blocked: np.ndarray


@dataclass
class Scenario:
    """One trial's physical layout: room, AP grids, and user drop."""

    room: Room
    aps: ApLayout
    users: UserState

    @property
    def n_users(self) -> int:
        return self.users.positions.shape[0]

    @property
    def n_vlc_aps(self) -> int:
        return self.aps.vlc_positions.shape[0]

    @property
    def n_rf_aps(self) -> int:
        return self.aps.rf_positions.shape[0]


def _square_grid(n_aps: int, room: Room) -> np.ndarray:
    """Centers of a sqrt(n) x sqrt(n) equal subdivision of the ceiling."""
    side = math.isqrt(n_aps)
    if side * side != n_aps:
        raise ValueError(f"AP count {n_aps} is not a perfect square")
    points = np.zeros((n_aps, 3))
    k = 0
    for ix in range(side):
        for iy in range(side):
            points[k, 0] = (ix + 0.5) * room.length / side
            points[k, 1] = (iy + 0.5) * room.width / side
            points[k, 2] = room.height
            k += 1
    return points


def deploy_aps(room: Room, n_vap: int, n_rap: int) -> ApLayout:
    """Deterministically place both AP grids on the ceiling.

    Each network gets the centers of an equal-area square subdivision
    of the ceiling, ordered with x increasing in the outer loop and y
    in the inner loop. Counts must be perfect squares (zero is allowed
    and yields an empty grid).
    """
    return ApLayout(
        vlc_positions=_square_grid(n_vap, room),
        rf_positions=_square_grid(n_rap, room),
    )


def place_users(room: Room, n_users: int, rng: np.random.Generator) -> UserState:
    """Drop users uniformly over the floor at the receiver altitude.

    Args:
        room: room geometry.
        n_users: number of users, at least 1.
        rng: seeded random generator; the draw is reproducible.

    Returns:
        UserState with positions filled and an all-False blockage mask.
    """
    if n_users < 1:
        raise ValueError("n_users must be at least 1")
    x = rng.uniform(0.0, room.length, n_users)
    y = rng.uniform(0.0, room.width, n_users)
    z = np.full(n_users, room.user_altitude)
    return UserState(
        positions=np.column_stack([x, y, z]),
        vlc_blocked=np.zeros(n_users, dtype=bool),
    )


def sample_blockage(
    n_users: int, blockage_rate: float, rng: np.random.Generator
) -> np.ndarray:
    """Mark exactly round(rate * n_users) users as VLC-blocked.

    The blocked set is drawn uniformly without replacement, so the
    count is deterministic and only the identity of the blocked users
    varies between trials.
    """
    if not 0.0 <= blockage_rate <= 1.0:
        raise ValueError("blockage_rate must lie in [0, 1]")
    n_blocked = int(math.floor(blockage_rate * n_users + 0.5))
    mask = np.zeros(n_users, dtype=bool)
    if n_blocked > 0:
        mask[rng.choice(n_users, size=n_blocked, replace=False)] = True
    return mask
