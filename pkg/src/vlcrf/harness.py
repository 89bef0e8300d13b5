"""Monte Carlo experiment runner and CSV reporting.

An experiment is described by a flat ExperimentConfig: room and
physics parameters (defaulting to the standard indoor setup), the
system variant (hybrid, vlc-only, rf-only), the association solver,
the clustering mode, and an optional one-dimensional sweep over the
number of users, the total AP count, or the receiver field of view.
Standalone variants fold both AP budgets into a single network so the
comparison against the hybrid system uses the same total AP count.

Each trial reseeds its generator with base_seed XOR trial_index, so
trials are independent, reproducible, and order-insensitive. Reports
aggregate mean sum-rates and pool per-user rates for empirical CDFs;
``write_report`` emits one of two stable CSV schemas (sweep or CDF).
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, fields, replace

import numpy as np

from .association import (
    AssociationContext,
    associate_exhaustive,
    associate_gibbs,
    associate_iterative,
    associate_random,
)
from .channel import RfParams, VlcParams, build_channel_matrices
from .clustering import cluster_distance, cluster_full, cluster_top_n
from .rates import rate_report, rf_network_config, vlc_network_config
from .scenario import Room, Scenario, deploy_aps, place_users, sample_blockage


class ConfigError(ValueError):
    """Invalid experiment configuration or configuration file."""


# Joint AP-count and room-dimension scaling: total APs -> (VLC APs,
# RF APs, square room side in meters). Keeps the VLC grid pitch near
# 2.5 m as the deployment grows.
ROOM_SCALING = {
    25: (16, 9, 10.0),
    32: (16, 16, 11.0),
    45: (36, 9, 14.0),
    65: (49, 16, 16.0),
    80: (64, 16, 19.0),
    97: (81, 16, 22.0),
    125: (100, 25, 25.0),
}

SYSTEMS = ("hybrid", "vlc-only", "rf-only")
SOLVERS = ("gibbs", "iterative", "random", "exhaustive", "none")
CLUSTERINGS = ("none", "a1", "a2")
SWEEP_PARAMS = ("none", "n_users", "total_aps", "fov_deg")
OUTPUTS = ("sweep", "cdf")
PRESETS = tuple(f"fig{i}" for i in range(4, 14))

SWEEP_HEADER = (
    "sweep_param,sweep_value,system,solver,clustering,"
    "mean_sum_rate_bps,trials,mean_iterations,mean_changes"
)
CDF_HEADER = "system,solver,clustering,n_users,rate_bps,cdf"


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of one experiment series."""

    # Geometry and population.
    room_length: float = 10.0
    room_width: float = 10.0
    room_height: float = 3.0
    user_altitude: float = 0.85
    n_users: int = 30
    n_vlc_aps: int = 16
    n_rf_aps: int = 9
    blockage_rate: float = 0.1
    # Optical front end.
    pd_area: float = 1.0e-4
    half_intensity_deg: float = 60.0
    fov_deg: float = 60.0
    refractive_index: float = 1.5
    optical_filter_gain: float = 1.0
    eo_factor: float = 0.53
    oe_factor: float = 10.0
    # Radio propagation.
    rician_k: float = 10.0
    ref_loss_db: float = 68.0
    ref_distance: float = 1.0
    pathloss_exp: float = 1.6
    shadow_sigma_db: float = 1.8
    # Network-level constants.
    vlc_bandwidth: float = 40.0e6
    rf_bandwidth: float = 15.0e6
    vlc_noise_psd: float = 1.0e-22
    rf_noise_psd: float = 1.0e-19
    vlc_ap_power: float = 5.0
    rf_ap_power: float = 5.0
    vlc_noise_factor: float = 9.0
    # Experiment design.
    system: str = "hybrid"
    solver: str = "iterative"
    clustering: str = "none"
    d_max_vlc: float = 4.0
    d_max_rf: float = 6.0
    n_max_vlc: int = 3
    n_max_rf: int = 5
    gibbs_beta: float = 1.0e4
    gibbs_t_max: int = 500
    gibbs_weighting: str = "transform"
    trials: int = 100
    seed: int = 1
    output: str = "sweep"
    sweep_param: str = "none"
    sweep_values: tuple = ()
    label: str = ""

    def validate(self) -> None:
        if self.system not in SYSTEMS:
            raise ConfigError(f"unknown system: {self.system}")
        if self.solver not in SOLVERS:
            raise ConfigError(f"unknown solver: {self.solver}")
        if self.system == "hybrid" and self.solver == "none":
            raise ConfigError("the hybrid system needs an association solver")
        if self.clustering not in CLUSTERINGS:
            raise ConfigError(f"unknown clustering: {self.clustering}")
        if self.output not in OUTPUTS:
            raise ConfigError(f"unknown output kind: {self.output}")
        if self.sweep_param not in SWEEP_PARAMS:
            raise ConfigError(f"unknown sweep parameter: {self.sweep_param}")
        if self.sweep_param != "none" and not self.sweep_values:
            raise ConfigError("sweep requested without sweep values")
        if self.gibbs_weighting not in ("transform", "exponential"):
            raise ConfigError(f"unknown gibbs weighting: {self.gibbs_weighting}")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.n_users < 1:
            raise ConfigError("n_users must be at least 1")
        if not 0.0 <= self.blockage_rate <= 1.0:
            raise ConfigError("blockage_rate must lie in [0, 1]")
        if not 0.0 < self.fov_deg <= 90.0:
            raise ConfigError("fov_deg must lie in (0, 90]")
        if not 0.0 < self.half_intensity_deg < 90.0:
            raise ConfigError("half_intensity_deg must lie in (0, 90)")
        if self.n_vlc_aps < 0 or self.n_rf_aps < 0:
            raise ConfigError("AP counts must be nonnegative")
        if self.n_vlc_aps + self.n_rf_aps == 0:
            raise ConfigError("at least one AP is required")
        for value in self.sweep_values_for_run():
            sub = apply_sweep_value(self, value)
            n_vap, n_rap = sub.effective_ap_counts()
            for count in (n_vap, n_rap):
                if count and math.isqrt(count) ** 2 != count:
                    raise ConfigError(
                        f"AP count {count} is not a perfect square"
                    )

    def effective_ap_counts(self) -> tuple:
        """Per-network AP counts after applying the standalone rule."""
        total = self.n_vlc_aps + self.n_rf_aps
        if self.system == "vlc-only":
            return total, 0
        if self.system == "rf-only":
            return 0, total
        return self.n_vlc_aps, self.n_rf_aps

    def sweep_values_for_run(self):
        """Validated sweep values, or a single None for no sweep."""
        if self.sweep_param == "none":
            return (None,)
        values = []
        for value in self.sweep_values:
            if self.sweep_param == "n_users":
                value = int(value)
                if value < 1:
                    raise ConfigError("swept n_users must be at least 1")
            elif self.sweep_param == "total_aps":
                value = int(value)
                if value not in ROOM_SCALING:
                    known = sorted(ROOM_SCALING)
                    raise ConfigError(
                        f"total_aps value {value} has no AP/room scaling row; "
                        f"known values: {known}"
                    )
            else:
                value = float(value)
                if not 0.0 < value <= 90.0:
                    raise ConfigError("swept fov_deg must lie in (0, 90]")
            values.append(value)
        return tuple(values)


@dataclass
class TrialResult:
    """Outcome of one seeded trial."""

    seed: int
    b: np.ndarray
    per_user_rates: np.ndarray
    sum_rate: float
    iterations: int
    changes: int
    converged: bool


@dataclass
class SweepPoint:
    """Aggregated results of all trials at one sweep value."""

    sweep_param: str
    sweep_value: object
    system: str
    solver: str
    clustering: str
    n_users: int
    trials: int
    mean_sum_rate: float
    mean_iterations: float
    mean_changes: float
    rate_pool: np.ndarray


@dataclass
class ExperimentReport:
    """All sweep points of one or more series, plus the output kind."""

    kind: str
    points: list


def apply_sweep_value(cfg: ExperimentConfig, value) -> ExperimentConfig:
    """Specialize a config to one point of its sweep."""
    if value is None or cfg.sweep_param == "none":
        return cfg
    if cfg.sweep_param == "n_users":
        return replace(cfg, n_users=int(value))
    if cfg.sweep_param == "total_aps":
        n_vlc, n_rf, side = ROOM_SCALING[int(value)]
        return replace(
            cfg, n_vlc_aps=n_vlc, n_rf_aps=n_rf,
            room_length=side, room_width=side,
        )
    return replace(cfg, fov_deg=float(value))


def _clustering_matrix(mode, user_positions, ap_positions, d_max, n_max):
    n_users = user_positions.shape[0]
    n_aps = ap_positions.shape[0]
    if n_aps == 0:
        return np.zeros((n_users, 0))
    if mode == "none":
        return cluster_full(n_users, n_aps)
    if mode == "a1":
        return cluster_distance(user_positions, ap_positions, d_max)
    return cluster_top_n(user_positions, ap_positions, n_max)


def _top_n_recluster(user_positions, ap_positions, n_max):
    """Membership-aware nearest-N rule for the per-candidate refits.

    Returns a callable mapping a boolean member mask to a full-size
    clustering matrix where each AP serves its n_max nearest members,
    so serving slots are never spent on users of the other network.
    """
    n_users = user_positions.shape[0]
    n_aps = ap_positions.shape[0]

    def recluster(mask):
        a = np.zeros((n_users, n_aps))
        members = np.flatnonzero(mask)
        if members.size and n_aps:
            a[members] = cluster_top_n(
                user_positions[members], ap_positions, n_max
            )
        return a

    return recluster


def trial_context(cfg: ExperimentConfig, trial_index: int):
    """Build one seeded trial's association inputs.

    Draws the scenario and the channel matrices, assembles the
    clustering, and returns (ctx, rng) with the generator advanced
    past all scenario draws, ready for a randomized solver. Trial t
    of an experiment uses the seed ``cfg.seed ^ t``.
    """
    seed = cfg.seed ^ trial_index
    rng = np.random.default_rng(seed)

    room = Room(
        length=cfg.room_length, width=cfg.room_width,
        height=cfg.room_height, user_altitude=cfg.user_altitude,
    )
    n_vap, n_rap = cfg.effective_ap_counts()
    layout = deploy_aps(room, n_vap, n_rap)
    users = place_users(room, cfg.n_users, rng)
    users.vlc_blocked = sample_blockage(cfg.n_users, cfg.blockage_rate, rng)
    scenario = Scenario(room=room, aps=layout, users=users)

    vlc_params = VlcParams(
        pd_area=cfg.pd_area,
        half_intensity_angle=math.radians(cfg.half_intensity_deg),
        fov_semi_angle=math.radians(cfg.fov_deg),
        refractive_index=cfg.refractive_index,
        optical_filter_gain=cfg.optical_filter_gain,
        eo_factor=cfg.eo_factor,
        oe_factor=cfg.oe_factor,
    )
    rf_params = RfParams(
        rician_k=cfg.rician_k,
        ref_loss_db=cfg.ref_loss_db,
        ref_distance=cfg.ref_distance,
        pathloss_exp=cfg.pathloss_exp,
        shadow_sigma_db=cfg.shadow_sigma_db,
    )
    channels = build_channel_matrices(scenario, vlc_params, rf_params, rng)

    positions = users.positions
    av = _clustering_matrix(
        cfg.clustering, positions, layout.vlc_positions,
        cfg.d_max_vlc, cfg.n_max_vlc,
    )
    ar = _clustering_matrix(
        cfg.clustering, positions, layout.rf_positions,
        cfg.d_max_rf, cfg.n_max_rf,
    )
    recluster_v = recluster_r = None
    if cfg.clustering == "a2":
        recluster_v = _top_n_recluster(
            positions, layout.vlc_positions, cfg.n_max_vlc
        )
        recluster_r = _top_n_recluster(
            positions, layout.rf_positions, cfg.n_max_rf
        )
    ctx = AssociationContext(
        Hv=channels.Hv, Hr=channels.Hr, Av=av, Ar=ar,
        recluster_v=recluster_v, recluster_r=recluster_r,
        cfg_v=vlc_network_config(
            bandwidth=cfg.vlc_bandwidth,
            ap_power_budget=cfg.vlc_ap_power,
            noise_psd=cfg.vlc_noise_psd,
            conversion_factor=vlc_params.conversion,
            noise_factor=cfg.vlc_noise_factor,
        ),
        cfg_r=rf_network_config(
            bandwidth=cfg.rf_bandwidth,
            ap_power_budget=cfg.rf_ap_power,
            noise_psd=cfg.rf_noise_psd,
        ),
    )
    return ctx, rng


def run_trial(cfg: ExperimentConfig, trial_index: int) -> TrialResult:
    """Generate, solve, and evaluate a single seeded trial."""
    ctx, rng = trial_context(cfg, trial_index)
    seed = cfg.seed ^ trial_index

    trace = None
    if cfg.system == "vlc-only":
        b = np.ones(cfg.n_users, dtype=np.uint8)
    elif cfg.system == "rf-only":
        b = np.zeros(cfg.n_users, dtype=np.uint8)
    elif cfg.solver == "gibbs":
        b, trace = associate_gibbs(
            ctx, beta=cfg.gibbs_beta, t_max=cfg.gibbs_t_max, rng=rng,
            weighting=cfg.gibbs_weighting,
        )
    elif cfg.solver == "iterative":
        b, trace = associate_iterative(ctx)
    elif cfg.solver == "random":
        b = associate_random(cfg.n_users, rng)
    elif cfg.solver == "exhaustive":
        b = associate_exhaustive(ctx)
    else:
        raise ConfigError(f"solver {cfg.solver} requires the hybrid system")

    report = rate_report(b, ctx)
    return TrialResult(
        seed=seed,
        b=b,
        per_user_rates=report.per_user_rate,
        sum_rate=report.sum_rate,
        iterations=trace.iterations if trace else 0,
        changes=trace.changes if trace else 0,
        converged=trace.converged if trace else True,
    )


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Run all sweep points of one series, `trials` trials each."""
    cfg.validate()
    points = []
    for value in cfg.sweep_values_for_run():
        sub = apply_sweep_value(cfg, value)
        results = []
        for t in range(sub.trials):
            try:
                results.append(run_trial(sub, t))
            except Exception as exc:
                raise RuntimeError(
                    f"trial {t} (seed {sub.seed ^ t}) failed: {exc}"
                ) from exc
        points.append(
            SweepPoint(
                sweep_param="none" if value is None else cfg.sweep_param,
                sweep_value=0 if value is None else value,
                system=cfg.label or cfg.system,
                solver=cfg.solver,
                clustering=cfg.clustering,
                n_users=sub.n_users,
                trials=sub.trials,
                mean_sum_rate=float(
                    np.mean([r.sum_rate for r in results])
                ),
                mean_iterations=float(
                    np.mean([r.iterations for r in results])
                ),
                mean_changes=float(np.mean([r.changes for r in results])),
                rate_pool=np.concatenate(
                    [r.per_user_rates for r in results]
                ),
            )
        )
    return ExperimentReport(kind=cfg.output, points=points)


def merge_reports(reports) -> ExperimentReport:
    """Concatenate series reports of the same output kind."""
    kinds = {r.kind for r in reports}
    if len(kinds) != 1:
        raise ConfigError("cannot mix sweep and cdf outputs in one file")
    points = []
    for r in reports:
        points.extend(r.points)
    return ExperimentReport(kind=kinds.pop(), points=points)


def compute_cdf(rate_pool) -> list:
    """Empirical CDF of a pool of rates as (rate, fraction) pairs."""
    pool = np.sort(np.asarray(rate_pool, dtype=float))
    if pool.size == 0:
        raise ValueError("cannot build a CDF from an empty rate pool")
    n = pool.size
    return [(float(v), (i + 1) / n) for i, v in enumerate(pool)]


def _fmt(x) -> str:
    """Full-precision, round-trippable decimal text for a float cell."""
    return repr(float(x))


def write_report(report: ExperimentReport, path: str) -> None:
    """Write a report as CSV; identical inputs give identical bytes."""
    try:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            if report.kind == "cdf":
                writer.writerow(CDF_HEADER.split(","))
                for pt in report.points:
                    for rate, frac in compute_cdf(pt.rate_pool):
                        writer.writerow([
                            pt.system, pt.solver, pt.clustering,
                            pt.n_users, _fmt(rate), _fmt(frac),
                        ])
            else:
                writer.writerow(SWEEP_HEADER.split(","))
                for pt in report.points:
                    writer.writerow([
                        pt.sweep_param, pt.sweep_value, pt.system,
                        pt.solver, pt.clustering, _fmt(pt.mean_sum_rate),
                        pt.trials, _fmt(pt.mean_iterations),
                        _fmt(pt.mean_changes),
                    ])
    except OSError as exc:
        raise RuntimeError(f"cannot write report to {path}: {exc}") from exc


_CONFIG_FIELDS = {
    f.name: f.type for f in fields(ExperimentConfig)
    if f.name not in ("sweep_param", "sweep_values")
}
_INT_FIELDS = {
    name for name, kind in _CONFIG_FIELDS.items()
    if kind == "int" or kind is int
}
_STR_FIELDS = {
    name for name, kind in _CONFIG_FIELDS.items()
    if kind == "str" or kind is str
}


def _coerce(key: str, text: str):
    name = key.replace("-", "_")
    if name not in _CONFIG_FIELDS:
        raise ConfigError(f"unknown config key: {key}")
    text = text.strip()
    try:
        if name in _INT_FIELDS:
            return name, int(text)
        if name in _STR_FIELDS:
            return name, text.lower() if name != "label" else text
        return name, float(text)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {text!r}") from None


def load_config(path: str) -> ExperimentConfig:
    """Parse a flat key-value experiment file.

    The format is INI-style with two recognized sections. Keys in
    [experiment] mirror the ExperimentConfig field names with hyphens
    (for example ``n-users``); [sweep] takes ``parameter`` (n-users,
    total-aps, or fov-deg) and a whitespace- or comma-separated
    ``values`` list. An empty file runs the default setup.
    """
    import configparser

    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    unknown = set(parser.sections()) - {"experiment", "sweep"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")

    overrides = {}
    if parser.has_section("experiment"):
        for key, text in parser.items("experiment"):
            name, value = _coerce(key, text)
            overrides[name] = value
    if parser.has_section("sweep"):
        keys = dict(parser.items("sweep"))
        extra = set(keys) - {"parameter", "values"}
        if extra:
            raise ConfigError(f"unknown sweep keys: {sorted(extra)}")
        if "parameter" not in keys or "values" not in keys:
            raise ConfigError("[sweep] needs both 'parameter' and 'values'")
        param = keys["parameter"].strip().lower().replace("-", "_")
        if param not in SWEEP_PARAMS or param == "none":
            raise ConfigError(f"unknown sweep parameter: {keys['parameter']}")
        tokens = keys["values"].replace(",", " ").split()
        if not tokens:
            raise ConfigError("[sweep] values list is empty")
        try:
            values = tuple(
                float(t) if param == "fov_deg" else int(t) for t in tokens
            )
        except ValueError:
            raise ConfigError(
                f"invalid sweep values: {keys['values']!r}"
            ) from None
        overrides["sweep_param"] = param
        overrides["sweep_values"] = values

    cfg = replace(ExperimentConfig(), **overrides)
    cfg.validate()
    return cfg


def preset_configs(name: str, base: ExperimentConfig) -> list:
    """Expand a named experiment preset into its config series.

    Presets override the design fields of ``base`` (system, solver,
    clustering, sweep, output) while keeping its physics, trial count,
    and seed, so a config file can still tune those.
    """
    users_sweep = (5, 10, 15, 20, 25, 30)
    hybrid_solvers = ("gibbs", "iterative")

    def mk(**kw):
        kw.setdefault("clustering", "none")
        kw.setdefault("output", "sweep")
        kw.setdefault("label", "")
        return replace(base, **kw)

    if name == "fig4":
        series = [
            mk(system="hybrid", solver=s, sweep_param="n_users",
               sweep_values=users_sweep)
            for s in ("gibbs", "iterative", "random")
        ]
        series += [
            mk(system=s, solver="none", sweep_param="n_users",
               sweep_values=users_sweep)
            for s in ("vlc-only", "rf-only")
        ]
        return series
    if name == "fig5":
        return [
            mk(system="hybrid", solver=s, n_users=30,
               sweep_param="total_aps",
               sweep_values=tuple(sorted(ROOM_SCALING)))
            for s in hybrid_solvers
        ]
    if name == "fig6":
        fovs = (15.0, 30.0, 45.0, 60.0, 75.0, 90.0)
        series = []
        for n_users in (5, 10, 20):
            for system, solver in (
                ("hybrid", "gibbs"),
                ("hybrid", "iterative"),
                ("vlc-only", "none"),
            ):
                series.append(
                    mk(system=system, solver=solver, n_users=n_users,
                       sweep_param="fov_deg", sweep_values=fovs,
                       label=f"{system}[n_users={n_users}]")
                )
        return series
    if name in ("fig7", "fig10", "fig11"):
        clustering = {"fig7": "none", "fig10": "a1", "fig11": "a2"}[name]
        series = []
        for n_users in (10, 20):
            for system, solver in (
                ("hybrid", "gibbs"),
                ("hybrid", "iterative"),
                ("hybrid", "random"),
                ("vlc-only", "none"),
                ("rf-only", "none"),
            ):
                series.append(
                    mk(system=system, solver=solver, n_users=n_users,
                       clustering=clustering, output="cdf")
                )
        return series
    if name == "fig8":
        series = []
        for label, total in (("hybrid[aps=25]", 25), ("hybrid[aps=65]", 65)):
            n_vlc, n_rf, side = ROOM_SCALING[total]
            series.append(
                mk(system="hybrid", solver="gibbs", sweep_param="n_users",
                   sweep_values=users_sweep, n_vlc_aps=n_vlc, n_rf_aps=n_rf,
                   room_length=side, room_width=side, label=label)
            )
        return series
    if name == "fig9":
        return [
            mk(system="hybrid", solver="iterative", sweep_param="n_users",
               sweep_values=(10, 20, 30))
        ]
    if name in ("fig12", "fig13"):
        clustering = "a1" if name == "fig12" else "a2"
        return [
            mk(system="hybrid", solver=s, clustering=clustering,
               sweep_param="n_users", sweep_values=users_sweep)
            for s in hybrid_solvers
        ]
    raise ConfigError(f"unknown preset: {name}")
