"""Seedable Monte Carlo simulator for a hybrid optical/radio downlink.

The package models an indoor cell-free deployment where every user
terminal carries both a photodiode and a radio front end and must be
served by exactly one of the two networks. It generates random room
scenarios, builds line-of-sight optical and Rician radio channels,
forms zero-forcing precoders over per-user AP clusters, and balances
the user-to-network assignment with either a Gibbs sampler or an
iterative greedy search. A small experiment harness reproduces the
headline result curves as CSV files.
"""

from .association import (
    EXHAUSTIVE_MAX_USERS,
    GIBBS_BETA,
    GIBBS_T_MAX,
    AssociationContext,
    SolveTrace,
    associate_exhaustive,
    associate_gibbs,
    associate_iterative,
    associate_random,
    evaluate_assignment,
    gibbs_exponential_scores,
    gibbs_score_transform,
)
from .channel import (
    H_DIRECT,
    ChannelMatrices,
    RfParams,
    VlcParams,
    build_channel_matrices,
    concentrator_gain,
    lambertian_order,
    path_loss_db,
    rf_channel_gain,
    vlc_channel_gain,
)
from .clustering import cluster_distance, cluster_full, cluster_top_n, row_diag
from .harness import (
    PRESETS,
    ROOM_SCALING,
    ConfigError,
    ExperimentConfig,
    ExperimentReport,
    SweepPoint,
    TrialResult,
    apply_sweep_value,
    compute_cdf,
    load_config,
    merge_reports,
    preset_configs,
    run_experiment,
    run_trial,
    trial_context,
    write_report,
)
from .kernels import BACKEND
from .precoding import PowerAllocation, allocate_powers, partial_zf, shared_ap_set
from .rates import (
    SINR_CLAMP,
    AssociationState,
    NetworkConfig,
    NetworkState,
    RateReport,
    RateTables,
    association_state,
    fit_network,
    gain_tables,
    gated_clusterings,
    rate_report,
    rf_network_config,
    rf_sinr,
    sum_rate,
    user_rate,
    vlc_network_config,
    vlc_sinr,
)
from .scenario import (
    ApLayout,
    Room,
    Scenario,
    UserState,
    deploy_aps,
    place_users,
    sample_blockage,
)

__version__ = "0.1.0"

__all__ = [
    "ApLayout",
    "AssociationContext",
    "AssociationState",
    "BACKEND",
    "ChannelMatrices",
    "ConfigError",
    "EXHAUSTIVE_MAX_USERS",
    "ExperimentConfig",
    "ExperimentReport",
    "GIBBS_BETA",
    "GIBBS_T_MAX",
    "H_DIRECT",
    "NetworkConfig",
    "NetworkState",
    "PRESETS",
    "PowerAllocation",
    "RateReport",
    "RateTables",
    "RfParams",
    "ROOM_SCALING",
    "Room",
    "Scenario",
    "SINR_CLAMP",
    "SolveTrace",
    "SweepPoint",
    "TrialResult",
    "UserState",
    "VlcParams",
    "allocate_powers",
    "apply_sweep_value",
    "associate_exhaustive",
    "associate_gibbs",
    "associate_iterative",
    "associate_random",
    "association_state",
    "build_channel_matrices",
    "cluster_distance",
    "cluster_full",
    "cluster_top_n",
    "compute_cdf",
    "concentrator_gain",
    "deploy_aps",
    "evaluate_assignment",
    "fit_network",
    "gain_tables",
    "gated_clusterings",
    "gibbs_exponential_scores",
    "gibbs_score_transform",
    "lambertian_order",
    "load_config",
    "merge_reports",
    "partial_zf",
    "path_loss_db",
    "place_users",
    "preset_configs",
    "rate_report",
    "rf_channel_gain",
    "rf_network_config",
    "rf_sinr",
    "row_diag",
    "run_experiment",
    "run_trial",
    "trial_context",
    "sample_blockage",
    "shared_ap_set",
    "sum_rate",
    "user_rate",
    "vlc_channel_gain",
    "vlc_network_config",
    "vlc_sinr",
    "write_report",
]
