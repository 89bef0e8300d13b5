"""Optical and radio channel models for the indoor downlink.

VLC links follow the Lambertian line-of-sight model. An LED with
half-intensity angle theta_1/2 radiates with Lambertian order
m = -1 / log2(cos(theta_1/2)), and a photodetector of area A_p behind
an optical concentrator collects

    h = (m + 1) * A_p / (2 pi d^2) * cos(phi)^m * G_of * f(theta) * cos(theta),

where f(theta) = n^2 / sin^2(Theta) inside the field of view and 0
outside. LEDs point straight down and PDs straight up, so the
radiance angle phi and the incidence angle theta coincide and
cos(theta) equals the height gap over the 3D distance.

RF links combine Rician small-scale fading with log-normal shadowing:

    h = sqrt(10^(-L(d)/10)) * (sqrt(K/(K+1)) * h_d + sqrt(1/(K+1)) * h_s),
    L(d) = L(d0) + 10 * v * log10(d / d0) + X,

with deterministic LoS phasor h_d = sqrt(0.5) * (1 + 1j), scattered
component h_s ~ CN(0, 1), and shadowing X ~ Normal(0, sigma^2) in dB.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# LoS fading phasor, unit magnitude.
H_DIRECT = math.sqrt(0.5) * (1.0 + 1.0j)


@dataclass(frozen=True)
class VlcParams:
    """Photodetector and LED parameters of the optical network."""

    pd_area: float = 1.0e-4
    half_intensity_angle: float = math.radians(60.0)
    fov_semi_angle: float = math.radians(60.0)
    refractive_index: float = 1.5
    optical_filter_gain: float = 1.0
    eo_factor: float = 0.53
    oe_factor: float = 10.0

    def __post_init__(self):
        if self.pd_area <= 0.0:
            raise ValueError("pd_area must be positive")
        if not 0.0 < self.half_intensity_angle < math.pi / 2:
            raise ValueError("half_intensity_angle must lie in (0, pi/2)")
        if not 0.0 < self.fov_semi_angle <= math.pi / 2:
            raise ValueError("fov_semi_angle must lie in (0, pi/2]")
        if self.refractive_index < 1.0:
            raise ValueError("refractive_index must be at least 1")
        if self.optical_filter_gain <= 0.0:
            raise ValueError("optical_filter_gain must be positive")

    @property
    def conversion(self) -> float:
        """Equivalent conversion factor, the product of both factors."""
        return self.oe_factor * self.eo_factor


@dataclass(frozen=True)
class RfParams:
    """Rician fading and path-loss parameters of the radio network."""

    rician_k: float = 10.0
    ref_loss_db: float = 68.0
    ref_distance: float = 1.0
    pathloss_exp: float = 1.6
    shadow_sigma_db: float = 1.8

    def __post_init__(self):
        if self.rician_k < 0.0:
            raise ValueError("rician_k must be nonnegative")
        if self.ref_distance <= 0.0:
            raise ValueError("ref_distance must be positive")
        if self.pathloss_exp <= 0.0:
            raise ValueError("pathloss_exp must be positive")
        if self.shadow_sigma_db < 0.0:
            raise ValueError("shadow_sigma_db must be nonnegative")


@dataclass
class ChannelMatrices:
    """Per-trial channel gains: Hv real (n_users, n_vap), Hr complex."""

    Hv: np.ndarray
    Hr: np.ndarray


def lambertian_order(half_intensity_angle: float) -> float:
    """Lambertian order m = -1 / log2(cos(theta_1/2))."""
    if not 0.0 < half_intensity_angle < math.pi / 2:
        raise ValueError("half_intensity_angle must lie in (0, pi/2)")
    return -1.0 / math.log2(math.cos(half_intensity_angle))


def concentrator_gain(
    theta: float, fov_semi_angle: float, refractive_index: float
) -> float:
    """Optical concentrator gain: n^2 / sin^2(Theta) inside the FoV, else 0."""
    if theta > fov_semi_angle:
        return 0.0
    return refractive_index**2 / math.sin(fov_semi_angle) ** 2


def vlc_channel_gain(user_pos, ap_pos, blocked: bool, params: VlcParams) -> float:
    """Lambertian LoS gain between one LED and one photodetector.

    Returns 0 for blocked users and for geometries outside the
    receiver's field of view. The AP must sit above the user.
    """
    user_pos = np.asarray(user_pos, dtype=float)
    ap_pos = np.asarray(ap_pos, dtype=float)
    delta = ap_pos - user_pos
    d = float(np.sqrt(np.dot(delta, delta)))
    if d == 0.0:
        raise ValueError("user and AP positions coincide")
    if delta[2] <= 0.0:
        raise ValueError("AP must be above the user plane")
    if blocked:
        return 0.0
    cos_theta = delta[2] / d
    if cos_theta < math.cos(params.fov_semi_angle):
        return 0.0
    m = lambertian_order(params.half_intensity_angle)
    f0 = params.refractive_index**2 / math.sin(params.fov_semi_angle) ** 2
    return (
        (m + 1.0)
        * params.pd_area
        / (2.0 * math.pi * d**2)
        * cos_theta**m
        * params.optical_filter_gain
        * f0
        * cos_theta
    )


def path_loss_db(d: float, shadow_sample_db: float, params: RfParams) -> float:
    """Distance-dependent path loss in dB with an additive shadowing term."""
    if d <= 0.0:
        raise ValueError("distance must be positive")
    return (
        params.ref_loss_db
        + 10.0 * params.pathloss_exp * math.log10(d / params.ref_distance)
        + shadow_sample_db
    )


def rf_channel_gain(user_pos, ap_pos, params: RfParams, rng: np.random.Generator):
    """One complex RF gain draw for a user-AP pair.

    Consumes three draws from ``rng`` in a fixed order: the shadowing
    sample, then the real and imaginary scattered-path components.
    """
    user_pos = np.asarray(user_pos, dtype=float)
    ap_pos = np.asarray(ap_pos, dtype=float)
    delta = ap_pos - user_pos
    d = float(np.sqrt(np.dot(delta, delta)))
    if d == 0.0:
        raise ValueError("user and AP positions coincide")
    shadow = rng.normal(0.0, params.shadow_sigma_db)
    h_s = (rng.standard_normal() + 1j * rng.standard_normal()) / math.sqrt(2.0)
    loss = path_loss_db(d, shadow, params)
    k = params.rician_k
    if math.isinf(k):
        mix = H_DIRECT
    else:
        mix = math.sqrt(k / (k + 1.0)) * H_DIRECT + math.sqrt(1.0 / (k + 1.0)) * h_s
    return math.sqrt(10.0 ** (-loss / 10.0)) * mix


def build_channel_matrices(
    scenario,
    vlc_params: VlcParams,
    rf_params: RfParams,
    rng: np.random.Generator,
) -> ChannelMatrices:
    """Assemble the per-trial gain matrices for both networks.

    VLC gains are pure geometry; rows of blocked users are zeroed.
    RF gains draw one shadowing sample and one scattered component per
    user-AP pair. Fixed seeds give bit-identical matrices.
    """
    users = scenario.users.positions
    blocked = scenario.users.vlc_blocked
    n_users = users.shape[0]

    vaps = scenario.aps.vlc_positions
    n_vap = vaps.shape[0]
    if n_vap > 0:
        delta = vaps[None, :, :] - users[:, None, :]
        d2 = (delta**2).sum(axis=2)
        d = np.sqrt(d2)
        if np.any(d == 0.0):
            raise ValueError("user and AP positions coincide")
        cos_theta = delta[:, :, 2] / d
        inside = cos_theta >= math.cos(vlc_params.fov_semi_angle)
        cos_theta = np.where(inside, cos_theta, 0.0)
        m = lambertian_order(vlc_params.half_intensity_angle)
        f0 = (
            vlc_params.refractive_index**2
            / math.sin(vlc_params.fov_semi_angle) ** 2
        )
        Hv = (
            (m + 1.0)
            * vlc_params.pd_area
            / (2.0 * math.pi * d**2)
            * cos_theta**m
            * vlc_params.optical_filter_gain
            * f0
            * cos_theta
        )
        Hv[blocked, :] = 0.0
    else:
        Hv = np.zeros((n_users, 0))

    raps = scenario.aps.rf_positions
    n_rap = raps.shape[0]
    if n_rap > 0:
        delta = raps[None, :, :] - users[:, None, :]
        d = np.sqrt((delta**2).sum(axis=2))
        if np.any(d == 0.0):
            raise ValueError("user and AP positions coincide")
        shape = (n_users, n_rap)
        shadow = rng.normal(0.0, rf_params.shadow_sigma_db, shape)
        h_s = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / (
            math.sqrt(2.0)
        )
        loss = (
            rf_params.ref_loss_db
            + 10.0 * rf_params.pathloss_exp * np.log10(d / rf_params.ref_distance)
            + shadow
        )
        k = rf_params.rician_k
        if math.isinf(k):
            mix = np.full(shape, H_DIRECT)
        else:
            mix = (
                math.sqrt(k / (k + 1.0)) * H_DIRECT
                + math.sqrt(1.0 / (k + 1.0)) * h_s
            )
        Hr = np.sqrt(10.0 ** (-loss / 10.0)) * mix
    else:
        Hr = np.zeros((n_users, 0), dtype=complex)

    if not (np.all(np.isfinite(Hv)) and np.all(np.isfinite(Hr))):
        raise ValueError("channel matrices contain non-finite entries")
    return ChannelMatrices(Hv=Hv, Hr=Hr)
