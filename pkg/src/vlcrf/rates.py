"""Per-user SINR and achievable rate evaluation for both networks.

Given a trial's channels H, clustering A, and the binary association
vector b (1 selects the optical network, 0 the radio network), the
effective amplitude from user l's stream into user j's receiver is
t_{j,l} = h_j^T diag(a_l) w_l. The optical SINR of an associated user
is

    gamma_j = |rho sqrt(rho_f) t_{j,j} sqrt(P_j)|^2 /
              (sum_{l != j, b_l = 1} |rho sqrt(rho_f) t_{j,l} sqrt(P_l)|^2
               + noise_factor * sigma^2),

with conversion factor rho and a noise_factor of 9 in the optical
denominator (kept as the model states it; configurable). The radio
SINR is the same expression with rho = 1, noise_factor = 1, and the
sum running over users with b_l = 0. Rates follow as

    R_j = b_j * (B_v / 2) * log2(1 + gamma_v) +
          (1 - b_j) * B_r * log2(1 + gamma_r),

where the 1/2 pre-log reflects the real-valued intensity-modulation
constraint of the optical link. SINRs are clamped at 1e30 before the
logarithm; no physical instance reaches the clamp.

The association gates the clustering: the two per-user serving sets
are mutually exclusive, so a user assigned to the radio network
contributes no row to the optical clustering and vice versa. The
zero-forcing precoders, the equal power level, and the pairwise gain
tables of both networks therefore depend on b and are refit for every
association vector that gets evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .precoding import allocate_powers, partial_zf

SINR_CLAMP = 1.0e30


@dataclass(frozen=True)
class NetworkConfig:
    """Bandwidth, power, noise, and scaling constants of one network."""

    bandwidth: float
    ap_power_budget: float
    noise_psd: float
    conversion_factor: float = 1.0
    noise_factor: float = 1.0
    rate_prelog: float = 1.0

    def __post_init__(self):
        for name in ("bandwidth", "ap_power_budget", "noise_psd",
                     "conversion_factor", "noise_factor", "rate_prelog"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")

    @property
    def noise_variance(self) -> float:
        """Noise power in watts: PSD times bandwidth."""
        return self.noise_psd * self.bandwidth


def vlc_network_config(
    bandwidth: float = 40.0e6,
    ap_power_budget: float = 5.0,
    noise_psd: float = 1.0e-22,
    conversion_factor: float = 5.3,
    noise_factor: float = 9.0,
) -> NetworkConfig:
    """Optical network defaults; the rate carries the IM/DD 1/2 pre-log."""
    return NetworkConfig(
        bandwidth=bandwidth,
        ap_power_budget=ap_power_budget,
        noise_psd=noise_psd,
        conversion_factor=conversion_factor,
        noise_factor=noise_factor,
        rate_prelog=0.5,
    )


def rf_network_config(
    bandwidth: float = 15.0e6,
    ap_power_budget: float = 5.0,
    noise_psd: float = 1.0e-19,
) -> NetworkConfig:
    """Radio network defaults with the plain Shannon rate."""
    return NetworkConfig(
        bandwidth=bandwidth,
        ap_power_budget=ap_power_budget,
        noise_psd=noise_psd,
    )


@dataclass
class RateReport:
    """Per-user outcome of one association: SINRs, rates, and the total."""

    per_user_rate: np.ndarray
    per_user_sinr: np.ndarray
    network_of_user: np.ndarray
    sum_rate: float


@dataclass(frozen=True)
class RateTables:
    """Pairwise effective gains of one refit, for fast rate evaluation.

    G[j, l] is the received power at user j from user l's stream
    including all scale factors and powers, so the SINR of user j
    reduces to a masked row sum plus the noise term. Bandwidths are
    stored with their pre-log factors folded in.
    """

    Gv: np.ndarray
    Gr: np.ndarray
    noise_v: float
    noise_r: float
    bw_v: float
    bw_r: float

    @property
    def n_users(self) -> int:
        return self.Gv.shape[0]


@dataclass(frozen=True)
class NetworkState:
    """One network's gated clustering and the fit it induces."""

    A: np.ndarray
    W: np.ndarray
    P: np.ndarray
    G: np.ndarray


@dataclass(frozen=True)
class AssociationState:
    """Both networks refit under one association vector's gating."""

    vlc: NetworkState
    rf: NetworkState
    tables: RateTables


def _effective_gains(h, a, w, p, cfg: NetworkConfig) -> np.ndarray:
    """G[j, l] = rho^2 rho_f |h_j^T diag(a_l) w_l|^2 P_l."""
    t = h @ (w * a.T)
    scale = cfg.conversion_factor**2 * cfg.ap_power_budget
    return scale * np.abs(t) ** 2 * p[None, :]


def gated_clusterings(b, ctx):
    """Clustering matrices restricted to each network's assigned users.

    The per-user serving sets of the two networks are mutually
    exclusive: row j of the optical clustering survives only when
    b_j = 1 and row j of the radio clustering only when b_j = 0.
    Networks with a recluster callback on ``ctx`` rebuild their matrix
    for the member subset instead of just zeroing rows, so load-capped
    rules spend their serving slots on the network's own users.
    """
    gate = np.asarray(b).astype(bool)
    if ctx.recluster_v is not None:
        av = ctx.recluster_v(gate)
    else:
        av = np.where(gate[:, None], ctx.Av, 0.0)
    if ctx.recluster_r is not None:
        ar = ctx.recluster_r(~gate)
    else:
        ar = np.where(gate[:, None], 0.0, ctx.Ar)
    return av, ar


def fit_network(h, a, cfg: NetworkConfig) -> NetworkState:
    """Zero-forcing precoders, powers, and gain table for one network.

    ``a`` is the (already gated) clustering; users with an all-zero
    row get all-zero precoding columns and a zero diagonal gain.
    """
    w = partial_zf(h, a)
    p = allocate_powers(w).P
    level = float(p[0]) if p.size else 0.0
    scale = cfg.conversion_factor**2 * cfg.ap_power_budget
    g = np.ascontiguousarray(
        kernels.gain_table(h, w, level, scale), dtype=np.float64
    )
    return NetworkState(A=a, W=w, P=p, G=g)


def association_state(b, ctx) -> AssociationState:
    """Refit both networks under the gating induced by b.

    ``ctx`` carries one trial's state: channel matrices Hv and Hr,
    ungated clustering matrices Av and Ar, the NetworkConfig objects
    cfg_v and cfg_r, and the optional recluster callbacks.
    """
    av, ar = gated_clusterings(b, ctx)
    vlc = fit_network(ctx.Hv, av, ctx.cfg_v)
    rf = fit_network(ctx.Hr, ar, ctx.cfg_r)
    tables = RateTables(
        Gv=vlc.G,
        Gr=rf.G,
        noise_v=ctx.cfg_v.noise_factor * ctx.cfg_v.noise_variance,
        noise_r=ctx.cfg_r.noise_factor * ctx.cfg_r.noise_variance,
        bw_v=ctx.cfg_v.rate_prelog * ctx.cfg_v.bandwidth,
        bw_r=ctx.cfg_r.rate_prelog * ctx.cfg_r.bandwidth,
    )
    return AssociationState(vlc=vlc, rf=rf, tables=tables)


def gain_tables(b, ctx) -> RateTables:
    """Pairwise gain tables of the refit induced by one vector b."""
    return association_state(b, ctx).tables


def _amplitude(h_row, a, w, p, l: int):
    """Effective amplitude of user l's stream at a given receiver row."""
    return (h_row * a[l]) @ w[:, l] * math.sqrt(p[l])


def vlc_sinr(j: int, hv, wv, av, b, pv, cfg: NetworkConfig) -> float:
    """Optical SINR of user j; 0 unless the user is on the optical network."""
    if not b[j]:
        return 0.0
    scale = cfg.conversion_factor * math.sqrt(cfg.ap_power_budget)
    desired = abs(scale * _amplitude(hv[j], av, wv, pv, j)) ** 2
    interference = 0.0
    for l in range(len(b)):
        if l != j and b[l]:
            interference += abs(scale * _amplitude(hv[j], av, wv, pv, l)) ** 2
    gamma = desired / (interference + cfg.noise_factor * cfg.noise_variance)
    return min(gamma, SINR_CLAMP)


def rf_sinr(j: int, hr, wr, ar, b, pr, cfg: NetworkConfig) -> float:
    """Radio SINR of user j; 0 unless the user is on the radio network."""
    if b[j]:
        return 0.0
    scale = cfg.conversion_factor * math.sqrt(cfg.ap_power_budget)
    desired = abs(scale * _amplitude(hr[j], ar, wr, pr, j)) ** 2
    interference = 0.0
    for l in range(len(b)):
        if l != j and not b[l]:
            interference += abs(scale * _amplitude(hr[j], ar, wr, pr, l)) ** 2
    gamma = desired / (interference + cfg.noise_factor * cfg.noise_variance)
    return min(gamma, SINR_CLAMP)


def user_rate(j: int, b, ctx, state: AssociationState | None = None) -> float:
    """Rate of user j in bits/s on whichever network b assigns it to.

    Refits both networks for b unless a matching precomputed state is
    supplied.
    """
    st = association_state(b, ctx) if state is None else state
    if b[j]:
        gamma = vlc_sinr(j, ctx.Hv, st.vlc.W, st.vlc.A, b, st.vlc.P,
                         ctx.cfg_v)
        cfg = ctx.cfg_v
    else:
        gamma = rf_sinr(j, ctx.Hr, st.rf.W, st.rf.A, b, st.rf.P, ctx.cfg_r)
        cfg = ctx.cfg_r
    return cfg.rate_prelog * cfg.bandwidth * math.log2(1.0 + gamma)


def sum_rate(b, ctx) -> float:
    """Total rate over all users for a given association vector.

    The vector gates each network's clustering, so precoders, powers,
    and gain tables are refit for the supplied b before summing.
    """
    t = gain_tables(b, ctx)
    rates = kernels.per_user_rates(
        t.Gv, t.Gr, np.ascontiguousarray(b, dtype=np.uint8),
        t.noise_v, t.noise_r, t.bw_v, t.bw_r,
    )
    return float(rates.sum())


def rate_report(b, ctx) -> RateReport:
    """Full per-user breakdown for one association vector.

    Walks the loop-based SINR reference path over the refit state, so
    it doubles as the slow cross-check of the kernel evaluation.
    """
    st = association_state(b, ctx)
    n = len(b)
    rates = np.zeros(n)
    sinrs = np.zeros(n)
    for j in range(n):
        if b[j]:
            sinrs[j] = vlc_sinr(j, ctx.Hv, st.vlc.W, st.vlc.A, b, st.vlc.P,
                                ctx.cfg_v)
            cfg = ctx.cfg_v
        else:
            sinrs[j] = rf_sinr(j, ctx.Hr, st.rf.W, st.rf.A, b, st.rf.P,
                               ctx.cfg_r)
            cfg = ctx.cfg_r
        rates[j] = cfg.rate_prelog * cfg.bandwidth * math.log2(1.0 + sinrs[j])
    return RateReport(
        per_user_rate=rates,
        per_user_sinr=sinrs,
        network_of_user=np.asarray(b).astype(np.uint8).copy(),
        sum_rate=float(rates.sum()),
    )
