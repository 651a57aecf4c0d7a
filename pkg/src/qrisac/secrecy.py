"""Physical-layer secrecy metrics: slot SNRs, secrecy capacity, rate compliance.

The eavesdropper's achievable SNR depends on how much of the RIS cascade she
can coherently exploit, which the scheme ladder controls: known (public or
static) codes let her matched-combine the full cascade, secret per-CPI codes
reduce her to uniform per-slot guessing over the codebook.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, calibrate_for_snr, cascade_terms, sample_channels
from .codebook import RisProfile
from .numerics import seeded_stream
from .scenario import ScenarioConfig, ValidationError
from .scene_auth import AdversaryModel
from .schemes import SchemeSpec, get_scheme

__all__ = [
    "SecrecyReport",
    "secrecy_capacity",
    "rate",
    "scheme_snrs",
    "secrecy_sweep",
]

_DOM_SECRECY = 21


@dataclass(frozen=True)
class SecrecyReport:
    rho_u: float
    rho_e: float
    c_s: float          # bits/s
    r: float            # bits/s
    compliant: bool     # r <= c_s

    def __post_init__(self) -> None:
        if self.c_s < 0:
            raise ValidationError([f"c_s must be non-negative, got {self.c_s}"])
        if self.compliant != (self.r <= self.c_s):
            raise ValidationError(["compliant flag must equal r <= c_s"])

    @classmethod
    def evaluate(cls, rho_u: float, rho_e: float, tau: float, bandwidth: float, r: float) -> "SecrecyReport":
        c_s = secrecy_capacity(rho_u, rho_e, tau, bandwidth)
        return cls(rho_u=rho_u, rho_e=rho_e, c_s=c_s, r=r, compliant=r <= c_s)


def secrecy_capacity(rho_u: float, rho_e: float, tau: float, bandwidth: float) -> float:
    """C_s = [(1-tau) B log2(1+rho_u) - (1-tau) B log2(1+rho_e)]^+ in bits/s."""
    if rho_u < 0 or rho_e < 0:
        raise ValidationError([f"SNRs must be non-negative, got rho_u={rho_u}, rho_e={rho_e}"])
    if not (0.0 <= tau < 1.0):
        raise ValidationError([f"tau must lie in [0,1), got {tau}"])
    if bandwidth <= 0:
        raise ValidationError([f"bandwidth must be positive, got {bandwidth}"])
    gap = math.log2(1.0 + rho_u) - math.log2(1.0 + rho_e)
    return max(0.0, (1.0 - tau) * bandwidth * gap)


def rate(rho_u: float, tau: float, bandwidth: float) -> float:
    """Data-plane rate R = (1-tau) B log2(1+rho_u) in bits/s."""
    if rho_u < 0:
        raise ValidationError([f"rho_u must be non-negative, got {rho_u}"])
    if not (0.0 <= tau < 1.0):
        raise ValidationError([f"tau must lie in [0,1), got {tau}"])
    if bandwidth <= 0:
        raise ValidationError([f"bandwidth must be positive, got {bandwidth}"])
    return (1.0 - tau) * bandwidth * math.log2(1.0 + rho_u)


def scheme_snrs(
    real: ChannelRealization,
    scheme: SchemeSpec,
    config: ScenarioConfig,
    adversary: AdversaryModel | None = None,
    profile: RisProfile | None = None,
) -> tuple[float, float]:
    """(rho_u, rho_e) under the scheme's RIS profile policy and the
    eavesdropper's code-exploitation level. A precomputed steered profile can
    be passed to share the optimization across schemes on one draw."""
    noise = config.noise_power
    if not scheme.ris_enabled:
        rho_u = config.p_c * abs(real.h_dir_u) ** 2 / noise
        rho_e = config.p_c * abs(real.h_dir_e) ** 2 / noise
        return rho_u, rho_e

    f = 0.0
    if adversary is not None and adversary.code_knowledge == "learned":
        f = adversary.learned_fraction
    chi = scheme.eve_code_exploitation(config.codebook_size, f)

    if scheme.optimized_profile:
        if profile is None:
            from .optimizer import relax_project  # runtime import avoids a module cycle

            profile = relax_project(real, config).profile
        casc_u = complex(np.sum(cascade_terms(real, "user") * profile.phasors))
        casc_e = complex(np.sum(cascade_terms(real, "eve") * profile.phasors))
    else:
        # deployment-time static beam: partial alignment toward the corridor
        # serves the user; the street-level eavesdropper sees only spillover
        aligned = float(np.sum(np.abs(cascade_terms(real, "user"))))
        phase = real.h_dir_u / abs(real.h_dir_u) if abs(real.h_dir_u) > 0 else 1.0
        casc_u = config.static_user_coherence * aligned * phase
        profile = RisProfile.from_indices([0] * config.m_elements, config.b_phi)
        casc_e = math.sqrt(config.static_eve_gain) * complex(
            np.sum(cascade_terms(real, "eve") * profile.phasors)
        )
    rho_u = config.p_c * abs(real.h_dir_u + casc_u) ** 2 / noise
    rho_e = config.p_c * abs(real.h_dir_e + chi * casc_e) ** 2 / noise
    return rho_u, rho_e


def secrecy_point(
    config: ScenarioConfig,
    schemes: list[SchemeSpec],
    snr_db: float,
    snr_index: int,
    trials: int,
    seed: int,
    adversaries: dict[str, AdversaryModel],
    tau: float,
) -> dict[str, np.ndarray]:
    """Per-draw C_s/B samples for several schemes on common channel draws.

    One channel realization (and one steered profile, when any scheme needs
    it) is shared per trial, so scheme comparisons are paired.
    """
    from .optimizer import relax_project  # runtime import avoids a module cycle

    calibration = calibrate_for_snr(config, snr_db)
    needs_profile = any(s.optimized_profile for s in schemes)
    out = {s.id: np.empty(trials) for s in schemes}
    for t in range(trials):
        rng = seeded_stream(seed, _DOM_SECRECY, snr_index, t)
        real = sample_channels(None, config, rng, calibration=calibration)
        profile = relax_project(real, config).profile if needs_profile else None
        for s in schemes:
            rho_u, rho_e = scheme_snrs(real, s, config, adversaries[s.id], profile=profile)
            out[s.id][t] = secrecy_capacity(rho_u, rho_e, tau, config.bandwidth_b) / config.bandwidth_b
    return out


def secrecy_sweep(
    config: ScenarioConfig,
    scheme: SchemeSpec | str,
    snr_grid_db: list[float],
    trials: int,
    seed: int | None = None,
    adversary: AdversaryModel | None = None,
    tau: float | None = None,
) -> list[dict]:
    """Mean C_s/B per SNR point for one scheme (rows for the secrecy CSV).

    Channel draws are keyed by (seed, snr index, trial) only, so sweeps over
    schemes with the same seed are common-random-number paired.
    """
    if trials < 1000:
        raise ValidationError([f"trials must be >= 1000, got {trials}"])
    scheme = get_scheme(scheme) if isinstance(scheme, str) else scheme
    seed = config.master_seed if seed is None else seed
    tau = config.tau if tau is None else tau
    if adversary is None:
        adversary = AdversaryModel.for_class("A1_classical", config)

    rows = []
    for j, snr_db in enumerate(snr_grid_db):
        cs = secrecy_point(config, [scheme], snr_db, j, trials, seed, {scheme.id: adversary}, tau)[scheme.id]
        rows.append(
            {
                "scheme": scheme.id,
                "snr_db": float(snr_db),
                "mean_cs_bps_hz": float(np.mean(cs)),
                "stderr": float(np.std(cs, ddof=1) / math.sqrt(trials)),
                "trials": trials,
                "seed": seed,
            }
        )
    return rows
