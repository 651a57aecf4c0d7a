"""RIS-coded scene authentication: code embedding, GLRT detection, adversary echoes.

Per-slot model, in a normalized sensing domain with unit per-slot noise: the
matched-filter output of slot p is

    r_p = a * (kd * h_dir + kc * c_p) + k_b + w_p,      w_p ~ CN(0, 1),

where c_p is the RIS cascade under the slot's phase profile, k_b the frozen
clutter at the test bin, a = sqrt(tau/tau_ref) the sensing-duty amplitude, and
(kd, kc) calibration scales. The authent receiver derotates each slot by the
predicted cascade phase and averages; a profile sequence unknown to the
emitter makes its coherent mean collapse toward the false-alarm floor, while
frozen clutter and the code-free direct term scramble across dwell runs.

Adversary echoes come in two flavors:
  replay     -- an amplitude-true recording retransmitted with one continuous
                timing offset per CPI (the strongest attack on codeA-free or
                static-coded scenes; useless against fresh per-CPI codes);
  synthesis  -- per-slot regeneration using the adversary's code view
                (public / guessed / partially learned), with per-slot timing
                jitter and phase noise bounding its generative fidelity.
Adversaries emit at their configured envelope; no closed-loop power adaptation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Literal

import numpy as np
from scipy.stats import chi2, ncx2

from .channel import ChannelRealization, SnrCalibration, cascade_terms, link_scales, sample_channels
from .codebook import Codebook, CodeSchedule, RisProfile, schedule_from_seed
from .numerics import invert_marcum_b, marcum_b_from_pfa, marcum_q1, seeded_stream, threshold_from_pfa
from .scenario import ScenarioConfig, ValidationError
from .schemes import SchemeSpec, sensing_policy

__all__ = [
    "AdversaryModel",
    "EchoObservation",
    "GlrtOutcome",
    "SensingScales",
    "sensing_scales",
    "embed_and_observe",
    "glrt_decide",
    "cfar_decide",
    "cfar_threshold",
    "noncentrality",
    "detection_probability",
    "simulate_detection_trials",
    "roc_curve",
    "scale_realization",
]

ADVERSARY_CLASSES = ("A1_classical", "A2_hndl", "A3_quantum_aided", "A4_fusion")

# RNG stream domains (keep trial streams disjoint across uses)
_DOM_ENV = 11       # channel + receiver noise, shared across schemes per trial
_DOM_ADV = 12       # adversary draws, per scheme
_DOM_CODEBOOK = 13
_DOM_POOL = 14


@dataclass(frozen=True)
class AdversaryModel:
    """Adversary capability envelope for one attack campaign."""

    klass: str = "A1_classical"
    code_knowledge: Literal["none", "public", "learned"] = "none"
    learned_fraction: float = 0.0
    delay_jitter_samples: int = 2
    key_recovery: bool = False
    mimicry_gain: float = 0.8
    attack: Literal["synthesis", "replay"] = "synthesis"

    def __post_init__(self) -> None:
        if self.klass not in ADVERSARY_CLASSES:
            raise ValidationError([f"unknown adversary class {self.klass!r}"])
        if not (0.0 <= self.learned_fraction <= 1.0):
            raise ValidationError([f"learned_fraction must lie in [0,1], got {self.learned_fraction}"])
        if not (0.0 < self.mimicry_gain <= 1.0):
            raise ValidationError([f"mimicry_gain must lie in (0,1], got {self.mimicry_gain}"])
        if self.delay_jitter_samples < 0:
            raise ValidationError([f"delay_jitter_samples must be >= 0, got {self.delay_jitter_samples}"])

    @classmethod
    def for_class(cls, klass: str, config: ScenarioConfig) -> "AdversaryModel":
        """Default capability presets per class."""
        base = dict(
            klass=klass,
            delay_jitter_samples=config.spoofer_jitter,
            mimicry_gain=config.mimicry_gain,
        )
        if klass == "A1_classical":
            return cls(**base)
        if klass == "A2_hndl":
            return cls(**base)  # harvest-now storage changes nothing physically today
        if klass == "A3_quantum_aided":
            return cls(**base, key_recovery=True, learned_fraction=0.05)
        if klass == "A4_fusion":
            return cls(**{**base, "mimicry_gain": min(1.0, config.mimicry_gain + 0.1)},
                       key_recovery=True, learned_fraction=0.10)
        raise ValidationError([f"unknown adversary class {klass!r}"])

    def with_knowledge(self, knowledge: str) -> "AdversaryModel":
        return replace(self, code_knowledge=knowledge)


@dataclass(frozen=True)
class SensingScales:
    """Calibration of the normalized sensing domain against the channel draw."""

    kappa_cascade: float   # multiplies the raw cascade sum c_p
    kappa_direct: float    # multiplies the raw direct channel
    tau_ref: float


def sensing_scales(config: ScenarioConfig, calibration: SnrCalibration) -> SensingScales:
    """Scales chosen so the median authentic non-centrality at tau_ref matches
    config.sensing_lambda0_ref, and the code-free direct echo contributes a
    weak lambda of ~1 (no-RIS sensing floor)."""
    rms_u, _, sigma_out_u, _ = link_scales(config, None, calibration=calibration)
    m, mc = config.m_elements, config.m_code
    beta = math.sqrt(config.sensing_lambda0_ref / (2.0 * mc * (math.pi / 4.0)))
    kappa_cascade = beta / (sigma_out_u * math.sqrt(m))
    kappa_direct = math.sqrt(config.sensing_lambda0_dir / (2.0 * mc)) / rms_u
    return SensingScales(kappa_cascade=kappa_cascade, kappa_direct=kappa_direct, tau_ref=config.tau_ref)


@dataclass(frozen=True)
class EchoObservation:
    """One CPI's sensing observation plus the combined GLRT input z."""

    z: complex
    per_slot: np.ndarray        # raw matched-filter outputs r_p
    derotated: np.ndarray       # code-derotated slot outputs y_p feeding z
    sigma_sq: float             # per-slot noise variance (normalized domain)
    truth: str                  # "authentic" | "spoof" | "null"
    runs: tuple[tuple[int, int, int], ...]

    def __post_init__(self) -> None:
        if self.sigma_sq <= 0:
            raise ValidationError([f"sigma_sq must be positive, got {self.sigma_sq}"])

    @property
    def m_code(self) -> int:
        return len(self.per_slot)

    @cached_property
    def statistic(self) -> float:
        """T = |z|^2."""
        return abs(self.z) ** 2

    @cached_property
    def residual_power(self) -> float:
        """Sum |y_p - mean|^2 over slots (CFAR noise evidence)."""
        return float(np.sum(np.abs(self.derotated - np.mean(self.derotated)) ** 2))

    @cached_property
    def run_statistic(self) -> float:
        """Run-noncoherent statistic sum_r n_r |mean_r y|^2 (legacy detector)."""
        starts = np.fromiter((s for s, _, _ in self.runs), dtype=np.int64)
        lengths = np.fromiter((n for _, n, _ in self.runs), dtype=np.int64)
        sums = np.add.reduceat(self.derotated, starts)
        return float(np.sum(np.abs(sums) ** 2 / lengths))


@dataclass(frozen=True)
class GlrtOutcome:
    statistic_t: float
    gamma: float
    decision: Literal["authentic", "reject"]
    lambda0: float
    p_fa_target: float
    p_d_predicted: float

    def __post_init__(self) -> None:
        if (self.decision == "authentic") != (self.statistic_t > self.gamma):
            raise ValidationError(["decision must equal statistic_t > gamma"])
        if not (0.0 <= self.p_d_predicted <= 1.0):
            raise ValidationError([f"p_d_predicted must lie in [0,1], got {self.p_d_predicted}"])


def scale_realization(real: ChannelRealization, c: complex) -> ChannelRealization:
    """Scale all channel gains (direct paths and cascade coefficients) by c."""
    return ChannelRealization(
        h_dir_u=real.h_dir_u * c,
        h_dir_e=real.h_dir_e * c,
        g_in=real.g_in,
        g_out_u=real.g_out_u * np.conj(c),
        g_out_e=real.g_out_e * np.conj(c),
        clutter_gains=real.clutter_gains,
        clutter_delays=real.clutter_delays,
        sigma_sq=real.sigma_sq,
    )


def _acf(delta: np.ndarray | float, width: float) -> np.ndarray | float:
    """Waveform autocorrelation vs timing offset (samples), Gaussian shape."""
    return np.exp(-np.asarray(delta, dtype=float) ** 2 / (2.0 * width * width))


def mean_jitter_coherence(config: ScenarioConfig, jitter_samples: int) -> float:
    """E[acf(delta)] over delta ~ U(-J, J) continuous (J=0 gives 1)."""
    j = float(jitter_samples)
    if j == 0.0:
        return 1.0
    grid = np.linspace(-j, j, 201)
    return float(np.trapezoid(_acf(grid, config.jitter_acf_width), grid) / (2.0 * j))


def _clutter_at_bin(real: ChannelRealization, bin_index: int = 0) -> complex:
    if real.clutter_gains.size == 0:
        return 0.0 + 0.0j
    mask = real.clutter_delays == bin_index
    return complex(np.sum(real.clutter_gains[mask]))


def _slot_cascades(real: ChannelRealization, schedule: CodeSchedule) -> np.ndarray:
    """c_p = sum_m conj(g_out_u[m]) e^{j phi_m,p} g_in[m] per slot."""
    t = cascade_terms(real, "user")
    return schedule.slot_phasors @ t


def _signal_from_cascades(
    real: ChannelRealization,
    scales: SensingScales,
    cascade_scale: float,
    tau: float,
    c_p: np.ndarray,
) -> np.ndarray:
    amp = math.sqrt(tau / scales.tau_ref)
    return amp * (scales.kappa_direct * real.h_dir_u + scales.kappa_cascade * cascade_scale * c_p)


def _slot_signal(
    real: ChannelRealization,
    schedule: CodeSchedule,
    config: ScenarioConfig,
    scales: SensingScales,
    cascade_scale: float,
    tau: float,
    slot_phasors: np.ndarray | None = None,
) -> np.ndarray:
    t = cascade_terms(real, "user")
    phasors = schedule.slot_phasors if slot_phasors is None else slot_phasors
    c_p = phasors @ t if cascade_scale != 0.0 else np.zeros(phasors.shape[0], dtype=complex)
    return _signal_from_cascades(real, scales, cascade_scale, tau, c_p)


def _derotators_from_cascades(c_p: np.ndarray) -> np.ndarray:
    """Unit phasors conj(c_p)/|c_p| for the code-matched receiver."""
    mag = np.abs(c_p)
    mag = np.where(mag == 0.0, 1.0, mag)
    return np.conj(c_p) / mag


def _derotators(real: ChannelRealization, schedule: CodeSchedule, cascade_scale: float) -> np.ndarray:
    if cascade_scale == 0.0:
        return np.ones(schedule.m_code, dtype=complex)
    return _derotators_from_cascades(_slot_cascades(real, schedule))


def _guessed_phasors(
    schedule: CodeSchedule,
    codebook: Codebook,
    adversary: AdversaryModel,
    rng: np.random.Generator,
) -> np.ndarray:
    """Per-slot phasor matrix of the adversary's code view.

    Dwell-run boundaries are protocol structure, so a guessing adversary draws
    one codebook guess per run (not per slot) and holds it through the run.
    """
    true_ph = schedule.slot_phasors
    if adversary.code_knowledge == "public":
        return true_ph
    runs = schedule.runs
    run_guess = rng.integers(0, len(codebook), size=len(runs))
    guess = np.empty_like(true_ph)
    for (start, length, _ref), g in zip(runs, run_guess):
        guess[start: start + length] = codebook.phasor_matrix[g]
    if adversary.code_knowledge == "learned" and adversary.learned_fraction > 0.0:
        known_runs = rng.random(len(runs)) < adversary.learned_fraction
        for (start, length, _ref), known in zip(runs, known_runs):
            if known:
                guess[start: start + length] = true_ph[start: start + length]
    return guess


def embed_and_observe(
    real: ChannelRealization,
    schedule: CodeSchedule,
    config: ScenarioConfig,
    rng: np.random.Generator,
    hypothesis: Literal["h1", "h0"],
    scales: SensingScales,
    *,
    adversary: AdversaryModel | None = None,
    codebook: Codebook | None = None,
    cascade_scale: float = 1.0,
    receiver: Literal["coded", "plain"] = "coded",
    tau: float | None = None,
    cascades: np.ndarray | None = None,
) -> EchoObservation:
    """Simulate one CPI's per-slot matched-filter outputs and the combined z.

    Under h1 the authentic echo carries the scheduled code phases through the
    cascade; under h0 the adversary emits per its model. Clutter and CN(0,1)
    noise are always present. Precomputed slot cascades can be passed in when
    the caller evaluates both hypotheses on one draw.
    """
    if schedule.m_code != config.m_code:
        raise ValidationError([f"schedule has {schedule.m_code} slots, config expects {config.m_code}"])
    tau = config.tau if tau is None else tau
    mc = config.m_code
    k_b = _clutter_at_bin(real)
    noise = (rng.standard_normal(mc) + 1j * rng.standard_normal(mc)) / math.sqrt(2.0)
    if cascade_scale != 0.0:
        c_p = _slot_cascades(real, schedule) if cascades is None else cascades
    else:
        c_p = np.zeros(mc, dtype=complex)

    if hypothesis == "h1":
        emission = _signal_from_cascades(real, scales, cascade_scale, tau, c_p)
        truth = "authentic"
    else:
        if adversary is None:
            raise ValidationError(["h0 requires an adversary model"])
        jit = adversary.delay_jitter_samples
        if adversary.attack == "replay":
            delta = rng.uniform(-jit, jit) if jit else 0.0
            rho = float(_acf(delta, config.jitter_acf_width))
            emission = rho * _signal_from_cascades(real, scales, cascade_scale, tau, c_p)
        else:
            if codebook is None:
                raise ValidationError(["synthesis attack requires the codebook"])
            guessed = _guessed_phasors(schedule, codebook, adversary, rng)
            c_hat = guessed @ cascade_terms(real, "user") if cascade_scale != 0.0 else c_p
            clean = _signal_from_cascades(real, scales, cascade_scale, tau, c_hat)
            deltas = rng.uniform(-jit, jit, size=mc) if jit else np.zeros(mc)
            sigma_eps = math.sqrt(max(0.0, -2.0 * math.log(adversary.mimicry_gain)))
            eps = rng.standard_normal(mc) * sigma_eps
            emission = _acf(deltas, config.jitter_acf_width) * np.exp(1j * eps) * clean
        truth = "spoof"

    r_p = emission + k_b + noise
    if receiver == "coded" and cascade_scale != 0.0:
        y_p = r_p * _derotators_from_cascades(c_p)
    else:
        y_p = r_p
    return EchoObservation(
        z=complex(np.mean(y_p)),
        per_slot=r_p,
        derotated=y_p,
        sigma_sq=1.0,
        truth=truth,
        runs=schedule.runs,
    )


def noncentrality(
    real: ChannelRealization,
    schedule: CodeSchedule,
    config: ScenarioConfig,
    scales: SensingScales,
    *,
    cascade_scale: float = 1.0,
    receiver: Literal["coded", "plain"] = "coded",
    tau: float | None = None,
) -> float:
    """lambda0 = 2 |mu_z|^2 / var(z) for the authentic hypothesis given the draw.

    mu_z is the exact conditional mean of z (clutter and the code-free direct
    term are frozen per CPI, so they contribute to the mean, scrambled by the
    derotators); var(z) = sigma^2 / m_code from the per-slot noise.
    """
    tau = config.tau if tau is None else tau
    sig = _slot_signal(real, schedule, config, scales, cascade_scale, tau)
    rot = _derotators(real, schedule, cascade_scale) if receiver == "coded" else np.ones(schedule.m_code)
    mu = np.mean((sig + _clutter_at_bin(real)) * rot)
    var_z = real.sigma_sq / config.m_code
    return float(2.0 * abs(mu) ** 2 / var_z)


def glrt_decide(obs: EchoObservation, p_fa: float, lambda0: float) -> GlrtOutcome:
    """Threshold test on T = |z|^2 with a known noise level.

    gamma inverts the exponential null P_FA = exp(-gamma/var_z); the predicted
    detection probability is the Marcum form Q1(sqrt(lambda0), sqrt(2 gamma/var_z)).
    """
    if lambda0 < 0:
        raise ValidationError([f"lambda0 must be >= 0, got {lambda0}"])
    var_z = obs.sigma_sq / obs.m_code
    gamma = threshold_from_pfa(var_z, p_fa)
    t = obs.statistic
    return GlrtOutcome(
        statistic_t=t,
        gamma=gamma,
        decision="authentic" if t > gamma else "reject",
        lambda0=lambda0,
        p_fa_target=p_fa,
        p_d_predicted=marcum_q1(a=math.sqrt(lambda0), b=math.sqrt(2.0 * gamma / var_z)),
    )


def cfar_threshold(residual_power: float, n_samples: int, p_fa: float) -> float:
    """Exact finite-sample CFAR threshold for T = |mean|^2 from the same window.

    With S = sum |y_p - mean|^2 over n i.i.d. complex-Gaussian slots,
    P(|mean|^2 > alpha S) = (1 + alpha n)^(1-n); solving for the target
    p_fa gives alpha = (p_fa^(-1/(n-1)) - 1) / n.
    """
    if n_samples < 2:
        raise ValidationError([f"CFAR needs >= 2 slots, got {n_samples}"])
    if not (0.0 < p_fa < 1.0):
        raise ValidationError([f"p_fa must lie in (0,1), got {p_fa}"])
    alpha = (p_fa ** (-1.0 / (n_samples - 1)) - 1.0) / n_samples
    return alpha * residual_power


def cfar_decide(obs: EchoObservation, p_fa: float, lambda0: float = 0.0) -> GlrtOutcome:
    """GLRT decision with the noise level estimated from the observation itself."""
    gamma = cfar_threshold(obs.residual_power, obs.m_code, p_fa)
    t = obs.statistic
    est_var_z = obs.residual_power / (obs.m_code - 1) / obs.m_code
    return GlrtOutcome(
        statistic_t=t,
        gamma=gamma,
        decision="authentic" if t > gamma else "reject",
        lambda0=lambda0,
        p_fa_target=p_fa,
        p_d_predicted=marcum_q1(a=math.sqrt(lambda0), b=math.sqrt(2.0 * gamma / est_var_z)),
    )


# ---------------------------------------------------------------------------
# Closed-form spoof-discrimination model (cross-checked by the Monte Carlo)
# ---------------------------------------------------------------------------

def _spoof_amplitude_ratio(scheme: SchemeSpec, adversary: AdversaryModel,
                           config: ScenarioConfig, codebook_size: int) -> float:
    """Coherent-mean amplitude of the synthesized spoof relative to authentic."""
    g = adversary.mimicry_gain * mean_jitter_coherence(config, adversary.delay_jitter_samples)
    if not scheme.codes_secret or adversary.code_knowledge == "public":
        return g
    f = adversary.learned_fraction if adversary.code_knowledge == "learned" else 0.0
    return g * (f + (1.0 - f) / codebook_size)


def detection_probability(
    scheme: SchemeSpec,
    lambda0: float,
    p_fa: float,
    adversary: AdversaryModel,
    config: ScenarioConfig,
    n_runs: int | None = None,
) -> float:
    """P(accept authentic) at the threshold holding P(accept spoof) = p_fa.

    This is the spoof-discrimination operating point: the threshold is set on
    the scheme's spoof statistic (its ROC x-axis), then applied to the
    authentic one.
    """
    if lambda0 <= 0:
        return p_fa
    policy = sensing_policy(scheme, config)
    if policy.receiver == "plain":
        # replay adversary: one continuous timing offset per CPI
        j = adversary.delay_jitter_samples

        def spoof_accept(b: float) -> float:
            if j == 0:
                return marcum_q1(a=math.sqrt(lambda0), b=b)
            grid = np.linspace(-j, j, 81)
            vals = [marcum_q1(a=math.sqrt(float(_acf(d, config.jitter_acf_width)) ** 2 * lambda0), b=b)
                    for d in grid]
            return float(np.trapezoid(vals, grid) / (2.0 * j))

        lo, hi = 0.0, 80.0
        for _ in range(120):
            mid = 0.5 * (lo + hi)
            if spoof_accept(mid) > p_fa:
                lo = mid
            else:
                hi = mid
        return marcum_q1(a=math.sqrt(lambda0), b=0.5 * (lo + hi))

    ratio = _spoof_amplitude_ratio(scheme, adversary, config, config.codebook_size)
    lambda_spoof = ratio * ratio * lambda0
    if scheme.scene_auth_enabled:
        b_star = invert_marcum_b(math.sqrt(lambda_spoof), p_fa) if lambda_spoof > 0 else marcum_b_from_pfa(p_fa)
        return marcum_q1(a=math.sqrt(lambda0), b=b_star)
    # legacy run-noncoherent detector: chi-square with 2R dof
    r = n_runs if n_runs else max(2, config.m_code // (3 * config.d_min))
    dof = 2 * r
    thr = chi2.isf(p_fa, dof) if lambda_spoof == 0.0 else ncx2.isf(p_fa, dof, lambda_spoof)
    return float(ncx2.sf(thr, dof, lambda0))


# ---------------------------------------------------------------------------
# Monte Carlo detection trials and ROC assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DetectionSamples:
    """Statistics from paired H1/H0 campaigns (one scheme)."""

    scheme_id: str
    t_authentic: np.ndarray
    t_spoof: np.ndarray


def build_codebook(config: ScenarioConfig, seed: int) -> Codebook:
    rng = seeded_stream(seed, _DOM_CODEBOOK)
    return Codebook.random(config.codebook_size, config.m_elements, config.b_phi, rng)


def _static_schedule(config: ScenarioConfig) -> CodeSchedule:
    prof = RisProfile.from_indices([0] * config.m_elements, config.b_phi)
    return CodeSchedule((prof,), tuple([0] * config.m_code), (0,))


def schedule_pool(
    config: ScenarioConfig, codebook: Codebook, seed: int, size: int
) -> list[CodeSchedule]:
    """Pool of fresh per-CPI schedules (trials cycle through the pool)."""
    rng = seeded_stream(seed, _DOM_POOL)
    out = []
    for i in range(size):
        seed_bytes = rng.bytes(32)
        out.append(schedule_from_seed(seed_bytes, codebook, config, cpi_index=i))
    return out


def simulate_detection_trials(
    config: ScenarioConfig,
    scheme: SchemeSpec,
    adversary: AdversaryModel,
    calibration: SnrCalibration,
    seed: int,
    n_trials: int,
    trial_offset: int = 0,
    pool_size: int = 128,
) -> DetectionSamples:
    """Paired authentic/spoof statistics under common per-trial environment draws.

    The channel and receiver noise stream is keyed by the trial only, so
    scheme comparisons are common-random-number paired; adversary draws get a
    scheme-specific stream.
    """
    policy = sensing_policy(scheme, config)
    scales = sensing_scales(config, calibration)
    adv = adversary
    if policy.attack == "replay" and adv.attack != "replay":
        adv = replace(adv, attack="replay")
    if not scheme.codes_secret and scheme.ris_enabled and policy.attack == "synthesis":
        adv = adv.with_knowledge("public")

    codebook = build_codebook(config, seed)
    if policy.hopping:
        pool = schedule_pool(config, codebook, seed, min(pool_size, n_trials))
    else:
        pool = [_static_schedule(config)]

    scheme_idx = scheme.index
    t1 = np.empty(n_trials)
    t0 = np.empty(n_trials)
    for i in range(n_trials):
        trial = trial_offset + i
        rng_env = seeded_stream(seed, _DOM_ENV, trial)
        rng_adv = seeded_stream(seed, _DOM_ADV, trial, scheme_idx)
        real = sample_channels(None, config, rng_env, calibration=calibration)
        schedule = pool[trial % len(pool)]
        c_p = _slot_cascades(real, schedule) if policy.cascade_scale != 0.0 else None

        obs1 = embed_and_observe(
            real, schedule, config, rng_env, "h1", scales,
            cascade_scale=policy.cascade_scale, receiver=policy.receiver, cascades=c_p,
        )
        obs0 = embed_and_observe(
            real, schedule, config, rng_adv, "h0", scales,
            adversary=adv, codebook=codebook,
            cascade_scale=policy.cascade_scale, receiver=policy.receiver, cascades=c_p,
        )
        if scheme.ris_enabled and not scheme.scene_auth_enabled and policy.receiver == "coded":
            t1[i] = obs1.run_statistic
            t0[i] = obs0.run_statistic
        else:
            t1[i] = obs1.statistic
            t0[i] = obs0.statistic
    return DetectionSamples(scheme_id=scheme.id, t_authentic=t1, t_spoof=t0)


def roc_curve(
    config: ScenarioConfig,
    adversary: AdversaryModel,
    scheme: SchemeSpec,
    p_fa_grid: list[float],
    trials_per_point: int,
    seed: int | None = None,
    snr_db: float = 10.0,
) -> list[dict]:
    """Empirical ROC rows for one scheme.

    Each row's threshold is the spoof-statistic quantile at the target level,
    calibrated on one half of the spoof trials and reported against the other
    half, so p_fa_emp is an out-of-sample estimate.
    """
    if trials_per_point < 1000:
        raise ValidationError([f"trials_per_point must be >= 1000, got {trials_per_point}"])
    seed = config.master_seed if seed is None else seed
    from .channel import calibrate_for_snr

    calibration = calibrate_for_snr(config, snr_db)
    samples = simulate_detection_trials(
        config, scheme, adversary, calibration, seed, trials_per_point
    )
    calib = np.sort(samples.t_spoof[0::2])
    test = samples.t_spoof[1::2]
    rows = []
    for p_fa in sorted(p_fa_grid, reverse=True):
        thr = float(np.quantile(calib, 1.0 - p_fa)) if p_fa < 1.0 else 0.0
        rows.append(
            {
                "scheme": scheme.id,
                "p_fa_target": p_fa,
                "p_fa_emp": float(np.mean(test > thr)),
                "p_d_emp": float(np.mean(samples.t_authentic > thr)),
                "trials": trials_per_point,
                "seed": seed,
            }
        )
    return rows
