"""Stochastic mid-band urban-canyon channel sampler.

Simplified documented model (full standardized channel internals are out of
scope): log-distance path loss with Rician small-scale fading on the air links
(gNB-RIS, RIS-UAV, gNB-UAV) and Rayleigh on the street-level eavesdropper
links, i.i.d. per RIS element. Channels are redrawn once per CPI (block
fading).

Scale conventions: direct channels and the outgoing cascade vectors carry the
absolute link scale; the incoming vector g_in is a unit-power shape, so the
per-element cascade coefficient is conj(g_out[m]) * g_in[m]. Cascade strength
is parameterized relative to the direct path by the config gain knobs, and
clutter gains are relative to unit sensing noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.special import i0e, i1e
from scipy.stats import ncx2

from .codebook import RisProfile
from .scenario import Geometry, ScenarioConfig, ValidationError

__all__ = [
    "ChannelRealization",
    "SnrCalibration",
    "sample_channels",
    "effective_channel",
    "slot_snr",
    "path_gain",
    "rician_amplitude_mean",
    "calibrate_for_snr",
]

Node = Literal["user", "eve"]


@dataclass(frozen=True)
class ChannelRealization:
    """One CPI's channel draw for a single user plus the eavesdropper."""

    h_dir_u: complex
    h_dir_e: complex
    g_in: np.ndarray        # (M,) gNB -> RIS, unit-power shape
    g_out_u: np.ndarray     # (M,) RIS -> user, carries cascade scale
    g_out_e: np.ndarray     # (M,) RIS -> eavesdropper, carries cascade scale
    clutter_gains: np.ndarray    # (K,) complex, power relative to unit sensing noise
    clutter_delays: np.ndarray   # (K,) integer delay bins
    sigma_sq: float              # per-sample sensing noise variance (normalized domain)

    def __post_init__(self) -> None:
        m = len(self.g_in)
        if len(self.g_out_u) != m or len(self.g_out_e) != m:
            raise ValidationError(["cascade vector lengths must all equal m_elements"])
        if len(self.clutter_gains) != len(self.clutter_delays):
            raise ValidationError(["clutter gains and delays must have equal length"])
        if not self.sigma_sq > 0:
            raise ValidationError([f"sigma_sq must be positive, got {self.sigma_sq}"])

    def g_out(self, node: Node) -> np.ndarray:
        return self.g_out_u if node == "user" else self.g_out_e

    def h_dir(self, node: Node) -> complex:
        return self.h_dir_u if node == "user" else self.h_dir_e


@dataclass(frozen=True)
class SnrCalibration:
    """Direct-path RMS overrides fitted so the median user SNR hits a sweep target."""

    rms_dir_u: float
    rms_dir_e: float


def path_gain(distance_m: float, exponent: float, wavelength_m: float) -> float:
    """Log-distance power gain (lambda/4pi)^2 * d^-n with 1 m reference distance."""
    d = max(distance_m, 1.0)
    return (wavelength_m / (4.0 * math.pi)) ** 2 * d ** (-exponent)


def rician_amplitude_mean(k_linear: float) -> float:
    """E|h| for a unit-power Rician fade with K-factor k (linear)."""
    if k_linear == 0.0:
        return math.sqrt(math.pi) / 2.0
    # exp-scaled Bessels keep this stable for large K
    half = k_linear / 2.0
    bracket = (1.0 + k_linear) * i0e(half) + k_linear * i1e(half)
    return 0.5 * math.sqrt(math.pi / (k_linear + 1.0)) * bracket


def _rician_unit(k_linear: float, rng: np.random.Generator, size=None) -> np.ndarray | complex:
    los = math.sqrt(k_linear / (k_linear + 1.0))
    sig = math.sqrt(1.0 / (2.0 * (k_linear + 1.0)))
    theta = rng.uniform(0.0, 2.0 * math.pi, size=size)
    scatter = rng.standard_normal(size=size) + 1j * rng.standard_normal(size=size)
    return los * np.exp(1j * theta) + sig * scatter


def _rayleigh_unit(rng: np.random.Generator, size=None) -> np.ndarray | complex:
    return (rng.standard_normal(size=size) + 1j * rng.standard_normal(size=size)) / math.sqrt(2.0)


def _median_unit_power(k_linear: float) -> float:
    """Median of |h|^2 for the unit-power fade used on that link."""
    if k_linear == 0.0:
        return math.log(2.0)
    return float(ncx2.ppf(0.5, 2, 2 * k_linear)) / (2.0 * (k_linear + 1.0))


def link_scales(config: ScenarioConfig, geometry: Geometry, uav_index: int = 0,
                calibration: SnrCalibration | None = None) -> tuple[float, float, float, float]:
    """(rms_dir_u, rms_dir_e, sigma_out_u, sigma_out_e) for one user draw."""
    lam = 299792458.0 / config.carrier_freq
    if calibration is None:
        if geometry.uav_positions.shape[0] <= uav_index:
            raise ValidationError([f"uav_index {uav_index} outside geometry with {geometry.uav_positions.shape[0]} UAVs"])
        d_u = float(np.linalg.norm(geometry.uav_positions[uav_index] - geometry.x_gnb))
        d_e = float(np.linalg.norm(geometry.eve_position - geometry.x_gnb))
        rms_u = math.sqrt(path_gain(d_u, config.pathloss_exp_los, lam))
        rms_e = math.sqrt(path_gain(d_e, config.pathloss_exp_nlos, lam)) * 10 ** (config.eve_offset_db / 20.0)
    else:
        rms_u, rms_e = calibration.rms_dir_u, calibration.rms_dir_e

    k_lin = 10 ** (config.rician_k_db / 10.0)
    amp = rician_amplitude_mean(k_lin)
    m = config.m_elements
    # Aligned-profile mean amplitude = rms_u * 10^(G_u/20): per-element product
    # mean |g_out_u * g_in| = sigma_out_u * amp^2.
    sigma_out_u = (10 ** (config.user_cascade_gain_db / 20.0) - 1.0) * rms_u / (m * amp * amp)
    # Eavesdropper exploitable cascade POWER = rms_e^2 * 10^(G_e/10).
    sigma_out_e = math.sqrt(rms_e ** 2 * 10 ** (config.eve_cascade_gain_db / 10.0) / m)
    return rms_u, rms_e, sigma_out_u, sigma_out_e


def sample_channels(
    geometry: Geometry,
    config: ScenarioConfig,
    rng: np.random.Generator,
    uav_index: int = 0,
    calibration: SnrCalibration | None = None,
) -> ChannelRealization:
    """Draw one CPI's block-fading realization.

    With a calibration the direct-path RMS values are taken from it instead of
    the geometric path-loss model (used by the SNR-sweep experiments).
    """
    rms_u, rms_e, sigma_out_u, sigma_out_e = link_scales(config, geometry, uav_index, calibration)
    k_lin = 10 ** (config.rician_k_db / 10.0)
    m = config.m_elements

    h_dir_u = complex(rms_u * _rician_unit(k_lin, rng))
    h_dir_e = complex(rms_e * _rayleigh_unit(rng))
    g_in = np.asarray(_rician_unit(k_lin, rng, size=m))
    g_out_u = sigma_out_u * np.asarray(_rician_unit(k_lin, rng, size=m))
    g_out_e = sigma_out_e * np.asarray(_rayleigh_unit(rng, size=m))

    k = config.k_clutter
    if k:
        p_cl = 10 ** (config.clutter_cnr_db / 10.0)
        gains = math.sqrt(p_cl / k) * np.asarray(_rayleigh_unit(rng, size=k))
        delays = rng.integers(0, config.delay_bins, size=k)
    else:
        gains = np.zeros(0, dtype=complex)
        delays = np.zeros(0, dtype=np.int64)

    return ChannelRealization(
        h_dir_u=h_dir_u,
        h_dir_e=h_dir_e,
        g_in=g_in,
        g_out_u=g_out_u,
        g_out_e=g_out_e,
        clutter_gains=gains,
        clutter_delays=delays,
        sigma_sq=1.0,
    )


def cascade_terms(real: ChannelRealization, node: Node) -> np.ndarray:
    """Per-element cascade coefficients t_m = conj(g_out[m]) * g_in[m]."""
    return np.conj(real.g_out(node)) * real.g_in


def effective_channel(real: ChannelRealization, profile: RisProfile, node: Node) -> complex:
    """h_dir + sum_m conj(g_out[m]) e^{j phi_m} g_in[m] (unit-modulus reflection)."""
    if len(profile) != len(real.g_in):
        raise ValidationError([f"profile length {len(profile)} != m_elements {len(real.g_in)}"])
    return complex(real.h_dir(node) + np.sum(cascade_terms(real, node) * profile.phasors))


def slot_snr(real: ChannelRealization, profile: RisProfile, config: ScenarioConfig, node: Node) -> float:
    """Linear slot SNR rho = P_c |h_eff|^2 / (N0 B)."""
    if config.p_c <= 0:
        raise ValidationError([f"p_c must be positive, got {config.p_c}"])
    h = effective_channel(real, profile, node)
    return config.p_c * abs(h) ** 2 / config.noise_power


def calibrate_for_snr(config: ScenarioConfig, target_snr_db: float) -> SnrCalibration:
    """Fit direct-path RMS values so the median user direct SNR equals the target.

    The eavesdropper's direct median follows the user's plus the configured
    offset; cascade scales track their direct paths through the gain knobs.
    """
    k_lin = 10 ** (config.rician_k_db / 10.0)
    target = 10 ** (target_snr_db / 10.0)
    noise = config.noise_power
    rms_u = math.sqrt(target * noise / (config.p_c * _median_unit_power(k_lin)))
    target_e = target * 10 ** (config.eve_offset_db / 10.0)
    rms_e = math.sqrt(target_e * noise / (config.p_c * _median_unit_power(0.0)))
    return SnrCalibration(rms_dir_u=rms_u, rms_dir_e=rms_e)
