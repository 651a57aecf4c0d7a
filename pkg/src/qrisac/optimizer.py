"""Secure ISAC Utility: evaluation, RIS phase selection, tau sweeps, scheduling.

relax_project solves the continuous RIS steering problem in closed form (the
rank-one cascade objective is maximized by aligning every element's cascade
term with the direct path) and projects onto the quantized alphabet; that
separability is what the runtime comparison against naive exhaustive search
measures.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, calibrate_for_snr, cascade_terms, sample_channels
from .codebook import RisProfile
from .numerics import marcum_q1, seeded_stream
from .scenario import ScenarioConfig, ValidationError
from .scene_auth import (
    AdversaryModel,
    detection_probability,
    noncentrality,
    schedule_pool,
    build_codebook,
    sensing_scales,
)
from .schemes import SchemeSpec, get_scheme, sensing_policy
from .secrecy import scheme_snrs, secrecy_capacity, rate

__all__ = [
    "SiuWeights",
    "EnergyLatency",
    "ProjectionResult",
    "UavOption",
    "Assignment",
    "InfeasibleAssignmentError",
    "siu",
    "relax_project",
    "exhaustive_best_profile",
    "sweep_tau",
    "greedy_schedule",
    "runtime_scaling",
]

_DOM_SIU = 31
_DOM_RUNTIME = 32


@dataclass(frozen=True)
class SiuWeights:
    """Weighted normalized utility: lambda1..3 sum to 1; 4 and 5 are penalties."""

    lambda1: float = 0.34
    lambda2: float = 0.33
    lambda3: float = 0.33
    lambda4: float = 0.0
    lambda5: float = 0.0
    r0: float = 1.0
    c0: float = 1.0
    pd0: float = 1.0
    e0: float = 1.0
    t0: float = 1.0

    def __post_init__(self) -> None:
        lam = (self.lambda1, self.lambda2, self.lambda3, self.lambda4, self.lambda5)
        if any(x < 0 for x in lam):
            raise ValidationError([f"weights must be non-negative, got {lam}"])
        if abs(self.lambda1 + self.lambda2 + self.lambda3 - 1.0) > 1e-9:
            raise ValidationError(
                [f"lambda1+lambda2+lambda3 must equal 1, got {self.lambda1 + self.lambda2 + self.lambda3}"]
            )
        if any(n <= 0 for n in (self.r0, self.c0, self.pd0, self.e0, self.t0)):
            raise ValidationError(["normalizers must be positive"])


@dataclass(frozen=True)
class EnergyLatency:
    """Per-CPI energy (transmit + RIS switching + PQC compute) and control latency."""

    e_joules: float
    t_lat_s: float

    def __post_init__(self) -> None:
        if self.e_joules < 0 or self.t_lat_s < 0:
            raise ValidationError(["energy and latency must be non-negative"])

    @classmethod
    def for_cpi(cls, config: ScenarioConfig, tau: float, switches_per_cpi: int,
                control_bytes: int = 0) -> "EnergyLatency":
        e = (tau * config.p_s + (1.0 - tau) * config.p_c) * config.t_cpi
        e += config.energy_per_switch * switches_per_cpi + config.energy_pqc
        t_lat = config.crypto_compute_s + config.t_sw
        t_lat += 8.0 * control_bytes / config.control_bus_rate_bps
        return cls(e_joules=e, t_lat_s=t_lat)


def siu(r: float, c_s: float, p_d: float, weights: SiuWeights,
        extras: EnergyLatency | None = None) -> float:
    """U = l1 R/R0 + l2 Cs/C0 + l3 Pd/Pd0, minus l4 E/E0 + l5 Tlat/T0 when given."""
    if r < 0 or c_s < 0 or p_d < 0:
        raise ValidationError([f"metrics must be non-negative, got R={r}, Cs={c_s}, Pd={p_d}"])
    u = weights.lambda1 * r / weights.r0 + weights.lambda2 * c_s / weights.c0 + weights.lambda3 * p_d / weights.pd0
    if extras is not None:
        u -= weights.lambda4 * extras.e_joules / weights.e0 + weights.lambda5 * extras.t_lat_s / weights.t0
    return u


@dataclass(frozen=True)
class ProjectionResult:
    profile: RisProfile
    degenerate: bool
    continuous_magnitude: float   # |h_dir| + sum |t_m| at the continuous optimum


def _nearest_index(phi: float, n: int, step: float) -> int:
    """Nearest alphabet index to phase phi, ties toward the smaller index."""
    x = (phi % (2.0 * math.pi)) / step
    k = math.floor(x)
    frac = x - k
    if frac > 0.5:
        k += 1
    elif frac == 0.5:
        k = min(k, (k + 1) % n)
    return k % n


def relax_project(real: ChannelRealization, config: ScenarioConfig,
                  objective: str = "max_rho_u", refine_passes: int = 2) -> ProjectionResult:
    """Closed-form phase alignment, nearest-alphabet projection, local repair.

    The continuous stage sets phi_m = ref - arg(t_m), aligning every cascade
    term with the direct path (or with element 1 when the direct path is
    zero); this attains |h_eff| = |h_dir| + sum|t_m| exactly and is the
    continuous optimum. Projection rounds each phase to the nearest alphabet
    member (ties toward the smaller index); a few coordinate-descent passes
    then repair the quantization loss element by element with incremental sum
    updates, so the whole routine stays linear in the element count. Both
    stated objectives share this path: the utility surrogate's profile
    dependence enters through rho_u alone.
    """
    if objective not in ("max_rho_u", "max_siu_surrogate"):
        raise ValidationError([f"unknown objective {objective!r}"])
    t = [complex(v) for v in cascade_terms(real, "user")]
    m = len(t)
    n = config.n_phases
    step = 2.0 * math.pi / n

    h_d = complex(real.h_dir_u)
    args_t = [cmath.phase(ti) if ti != 0j else 0.0 for ti in t]
    cont_sum = abs(h_d) + sum(abs(ti) for ti in t)
    degenerate = all(ti == 0j for ti in t)
    if degenerate:
        return ProjectionResult(
            profile=RisProfile.from_indices([0] * m, config.b_phi),
            degenerate=True,
            continuous_magnitude=cont_sum,
        )
    if abs(h_d) > 0.0:
        ref = cmath.phase(h_d)
    else:
        ref = next(args_t[i] for i in range(m) if t[i] != 0j)  # global phase anchored to first live element

    # Small alphabets and few elements leave global rotation structure in the
    # quantization loss, so sweep a few rounding directions there; at larger M
    # the per-element loss self-averages and one start suffices.
    n_starts = 4 if m <= 32 else 1
    phasor_table = [cmath.exp(1j * step * k) for k in range(n)]
    two_pi = 2.0 * math.pi
    phase = cmath.phase
    floor = math.floor

    best: tuple[float, list[int]] | None = None
    for s in range(n_starts):
        psi = ref + (s * two_pi / n_starts if n_starts > 1 else 0.0)
        indices = [0] * m
        contribs = [0j] * m
        total = h_d
        for i in range(m):
            ti = t[i]
            if ti == 0j:
                continue
            x = ((psi - args_t[i]) % two_pi) / step
            k = floor(x)
            frac = x - k
            if frac > 0.5:
                k += 1
            elif frac == 0.5:
                k = min(k, (k + 1) % n)
            k %= n
            indices[i] = k
            c = ti * phasor_table[k]
            contribs[i] = c
            total += c

        for _ in range(refine_passes):
            changed = False
            for i in range(m):
                ti = t[i]
                if ti == 0j:
                    continue
                rest = total - contribs[i]
                if rest == 0j:
                    continue
                x = ((phase(rest) - args_t[i]) % two_pi) / step
                k = floor(x)
                frac = x - k
                if frac > 0.5:
                    k += 1
                elif frac == 0.5:
                    k = min(k, (k + 1) % n)
                k %= n
                if k != indices[i]:
                    cand = ti * phasor_table[k]
                    if abs(rest + cand) > abs(total):
                        indices[i] = k
                        total = rest + cand
                        contribs[i] = cand
                        changed = True
            if not changed:
                break
        if best is None or abs(total) > best[0]:
            best = (abs(total), indices)

    return ProjectionResult(
        profile=RisProfile.from_indices(best[1], config.b_phi),
        degenerate=False,
        continuous_magnitude=cont_sum,
    )


def exhaustive_best_profile(real: ChannelRealization, config: ScenarioConfig,
                            slot_level: bool = False) -> tuple[RisProfile, float]:
    """Brute force over all 2^(b_phi * m) profiles, maximizing rho_u.

    With slot_level=True each candidate is scored the naive way, by pushing it
    through the per-slot CPI evaluation (m_code slot SNRs) instead of a single
    channel evaluation; this is the reference cost model for the runtime
    comparison. Guarded to tiny alphabets.
    """
    m, b = config.m_elements, config.b_phi
    if b * m > 20:
        raise ValidationError([f"exhaustive search needs 2^(b_phi*m) <= 2^20, got 2^{b * m}"])
    from .channel import slot_snr

    t = cascade_terms(real, "user")
    h_d = complex(real.h_dir_u)
    n = 1 << b
    best_idx: tuple[int, ...] | None = None
    best_rho = -1.0
    noise = config.noise_power
    for code in range(n ** m):
        digits = []
        c = code
        for _ in range(m):
            digits.append(c % n)
            c //= n
        if slot_level:
            prof = RisProfile.from_indices(digits, b)
            acc = 0.0
            for _slot in range(config.m_code):
                acc += slot_snr(real, prof, config, "user")
            rho = acc / config.m_code
        else:
            h = h_d + complex(np.sum(t * np.exp(2j * np.pi * np.asarray(digits) / n)))
            rho = config.p_c * abs(h) ** 2 / noise
        if rho > best_rho:
            best_rho = rho
            best_idx = tuple(digits)
    assert best_idx is not None
    return RisProfile.from_indices(best_idx, b), best_rho


# ---------------------------------------------------------------------------
# tau sweep
# ---------------------------------------------------------------------------

def default_weights_for_sweep(
    config: ScenarioConfig,
    tau_grid: list[float],
    trials: int,
    seed: int,
    snr_db: float,
    adversary: AdversaryModel,
) -> SiuWeights:
    """Normalizers pinned to the no-RIS baseline at the sweep midpoint.

    Floors keep a near-zero baseline metric from blowing the scale up.
    """
    tau_mid = tau_grid[len(tau_grid) // 2]
    b0 = _sweep_metrics(config, get_scheme("B0"), [tau_mid], trials, seed, snr_db, adversary)[0]
    bw = config.bandwidth_b
    return SiuWeights(
        r0=max(b0["mean_r"], 0.05 * bw),
        c0=max(b0["mean_cs"], 0.02 * bw),
        pd0=max(b0["mean_pd"], 0.05),
    )


def _sweep_metrics(
    config: ScenarioConfig,
    scheme: SchemeSpec,
    tau_grid: list[float],
    trials: int,
    seed: int,
    snr_db: float,
    adversary: AdversaryModel,
    lambda_subsample: int = 400,
) -> list[dict]:
    """Mean (R, Cs, Pd) per tau for one scheme, with common draws across schemes.

    rho draws are tau-independent; the sensing non-centrality scales linearly
    with tau, so one pass over trials feeds the whole grid.
    """
    calibration = calibrate_for_snr(config, snr_db)
    scales = sensing_scales(config, calibration)
    policy = sensing_policy(scheme, config)
    codebook = build_codebook(config, seed)
    pool = (
        schedule_pool(config, codebook, seed, min(64, trials))
        if policy.hopping
        else [_static_pool_schedule(config)]
    )

    log_u = np.empty(trials)
    log_gap = np.empty(trials)
    lam_ref = np.empty(trials)
    for t_i in range(trials):
        rng = seeded_stream(seed, _DOM_SIU, t_i)
        real = sample_channels(None, config, rng, calibration=calibration)
        rho_u, rho_e = scheme_snrs(real, scheme, config, adversary)
        log_u[t_i] = math.log2(1.0 + rho_u)
        log_gap[t_i] = max(0.0, math.log2(1.0 + rho_u) - math.log2(1.0 + rho_e))
        lam_ref[t_i] = noncentrality(
            real, pool[t_i % len(pool)], config, scales,
            cascade_scale=policy.cascade_scale, receiver=policy.receiver, tau=config.tau_ref,
        )

    sub = lam_ref[:: max(1, trials // lambda_subsample)]
    bw = config.bandwidth_b
    rows = []
    for tau in tau_grid:
        mean_r = (1.0 - tau) * bw * float(np.mean(log_u))
        mean_cs = (1.0 - tau) * bw * float(np.mean(log_gap))
        lam_tau = sub * (tau / config.tau_ref)
        mean_lam = float(np.mean(lam_tau))
        if policy.receiver == "coded" and scheme.scene_auth_enabled and mean_lam > 0:
            # operating threshold set at the mean draw, Q1 averaged over the spread
            b_star = _threshold_for(scheme, mean_lam, 1e-3, adversary, config)
            mean_pd = float(np.mean([marcum_q1(a=math.sqrt(l), b=b_star) for l in lam_tau]))
        else:
            mean_pd = detection_probability(scheme, mean_lam, 1e-3, adversary, config)
        rows.append(
            {
                "scheme": scheme.id,
                "tau": float(tau),
                "mean_r": mean_r,
                "mean_cs": mean_cs,
                "mean_pd": mean_pd,
                "trials": trials,
                "seed": seed,
            }
        )
    return rows


def _threshold_for(scheme: SchemeSpec, lambda0: float, p_fa: float,
                   adversary: AdversaryModel, config: ScenarioConfig) -> float:
    """Normalized threshold b* holding the scheme's spoof acceptance at p_fa."""
    from .numerics import invert_marcum_b, marcum_b_from_pfa  # local: tiny helpers
    from .scene_auth import _spoof_amplitude_ratio

    ratio = _spoof_amplitude_ratio(scheme, adversary, config, config.codebook_size)
    lam_spoof = ratio * ratio * lambda0
    if lam_spoof <= 0:
        return marcum_b_from_pfa(p_fa)
    return invert_marcum_b(math.sqrt(lam_spoof), p_fa)


def _static_pool_schedule(config: ScenarioConfig):
    from .scene_auth import _static_schedule

    return _static_schedule(config)


def sweep_tau(
    config: ScenarioConfig,
    scheme: SchemeSpec | str,
    tau_grid: list[float],
    weights: SiuWeights | None = None,
    trials: int = 2000,
    seed: int | None = None,
    snr_db: float = 10.0,
    adversary: AdversaryModel | None = None,
) -> tuple[list[dict], float]:
    """Mean U(tau) rows for one scheme plus the grid argmax tau*.

    U is affine in (R, Cs, Pd), so the mean utility equals the utility of the
    mean metrics.
    """
    if not tau_grid or not all(0.0 < t < 1.0 for t in tau_grid):
        raise ValidationError(["tau_grid must be non-empty and inside (0,1)"])
    scheme = get_scheme(scheme) if isinstance(scheme, str) else scheme
    seed = config.master_seed if seed is None else seed
    if adversary is None:
        adversary = AdversaryModel.for_class("A1_classical", config)
    if weights is None:
        weights = default_weights_for_sweep(config, tau_grid, trials, seed, snr_db, adversary)

    metric_rows = _sweep_metrics(config, scheme, list(tau_grid), trials, seed, snr_db, adversary)
    rows = []
    for mr in metric_rows:
        extras = None
        if weights.lambda4 > 0 or weights.lambda5 > 0:
            extras = EnergyLatency.for_cpi(config, mr["tau"], switches_per_cpi=config.s_max * config.m_code // 4)
        u = siu(mr["mean_r"], mr["mean_cs"], mr["mean_pd"], weights, extras)
        rows.append({**mr, "mean_u": u})
    tau_star = max(rows, key=lambda r: (r["mean_u"], -r["tau"]))["tau"]
    return rows, tau_star


# ---------------------------------------------------------------------------
# greedy multi-UAV scheduling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UavOption:
    """One candidate operating point for a UAV: transmit power plus the
    metrics it would achieve."""

    power_w: float
    r: float
    c_s: float
    p_d: float
    extras: EnergyLatency | None = None
    label: str = ""


@dataclass(frozen=True)
class Assignment:
    uav_index: int
    option_index: int
    utility: float


class InfeasibleAssignmentError(ValueError):
    """No option fits the remaining power budget for some UAV."""


def greedy_schedule(
    uav_options: list[list[UavOption]],
    weights: SiuWeights,
    config: ScenarioConfig,
) -> list[Assignment]:
    """Assign every UAV an option by largest marginal aggregate-SIU gain.

    Each round re-evaluates all remaining (UAV, option) pairs against the
    remaining power budget (O(n^2) evaluations over the run) and picks the
    best, ties to the lowest (uav, option) index. A pick is admissible only
    if it leaves enough budget to serve every remaining UAV's cheapest
    option, so greedy never strands a UAV a feasible assignment could serve.
    """
    if not uav_options or any(not opts for opts in uav_options):
        raise ValidationError(["every UAV needs at least one candidate option"])
    budget = config.p_max
    min_power = [min(o.power_w for o in opts) for opts in uav_options]
    reserve = sum(min_power)
    if reserve > budget + 1e-12:
        raise InfeasibleAssignmentError(
            f"cheapest options alone need {reserve:.4f} W > budget {budget:.4f} W"
        )
    unassigned = set(range(len(uav_options)))
    chosen: dict[int, Assignment] = {}
    while unassigned:
        best: tuple[float, int, int] | None = None
        for i in sorted(unassigned):
            for k, opt in enumerate(uav_options[i]):
                if opt.power_w + (reserve - min_power[i]) > budget + 1e-12:
                    continue
                gain = siu(opt.r, opt.c_s, opt.p_d, weights, opt.extras)
                if best is None or gain > best[0] + 1e-15:
                    best = (gain, i, k)
        if best is None:
            raise InfeasibleAssignmentError(
                f"power budget {budget:.4f} W cannot serve remaining UAVs {sorted(unassigned)}"
            )
        gain, i, k = best
        chosen[i] = Assignment(uav_index=i, option_index=k, utility=gain)
        budget -= uav_options[i][k].power_w
        reserve -= min_power[i]
        unassigned.remove(i)
    return [chosen[i] for i in sorted(chosen)]


def exhaustive_assignment(
    uav_options: list[list[UavOption]],
    weights: SiuWeights,
    config: ScenarioConfig,
) -> tuple[list[int], float]:
    """Brute-force best option per UAV under the power budget (oracle for tests)."""
    import itertools

    best_combo: tuple[int, ...] | None = None
    best_total = -math.inf
    for combo in itertools.product(*[range(len(o)) for o in uav_options]):
        power = sum(uav_options[i][k].power_w for i, k in enumerate(combo))
        if power > config.p_max + 1e-12:
            continue
        total = sum(
            siu(o.r, o.c_s, o.p_d, weights, o.extras)
            for o in (uav_options[i][k] for i, k in enumerate(combo))
        )
        if total > best_total:
            best_total = total
            best_combo = combo
    if best_combo is None:
        raise InfeasibleAssignmentError("no option combination satisfies the power budget")
    return list(best_combo), best_total


# ---------------------------------------------------------------------------
# runtime scaling measurements
# ---------------------------------------------------------------------------

def _synthetic_options(n_uav: int, n_options: int, p_max: float, rng: np.random.Generator) -> list[list[UavOption]]:
    out = []
    for _ in range(n_uav):
        opts = []
        for _ in range(n_options):
            opts.append(
                UavOption(
                    power_w=float(rng.uniform(0.1, 0.9)) * p_max / n_uav,
                    r=float(rng.uniform(0.2, 1.0)),
                    c_s=float(rng.uniform(0.1, 1.0)),
                    p_d=float(rng.uniform(0.3, 1.0)),
                )
            )
        out.append(opts)
    return out


def runtime_scaling(
    n_grid: list[int],
    config: ScenarioConfig,
    seed: int | None = None,
    m_grid: list[int] | None = None,
    include_exhaustive: bool = True,
    repeats: int = 5,
) -> list[dict]:
    """Measured wall times: relax_project vs element count, greedy scheduling
    vs UAV count, and (tiny instances only) naive exhaustive search."""
    seed = (config.master_seed if seed is None else seed)
    m_grid = m_grid or [64, 128, 256, 512, 1024]
    weights = SiuWeights(r0=1.0, c0=1.0, pd0=1.0)
    rows: list[dict] = []

    for m in m_grid:
        cfg = config.replace(m_elements=m, s_max=max(1, m // 4))
        rng = seeded_stream(seed, _DOM_RUNTIME, 1, m)
        calib = calibrate_for_snr(cfg, 10.0)
        reals = [sample_channels(None, cfg, rng, calibration=calib) for _ in range(repeats)]
        for real in reals:
            relax_project(real, cfg)  # warm caches before timing
        t0 = time.perf_counter()
        for real in reals:
            relax_project(real, cfg)
        dt = (time.perf_counter() - t0) / repeats
        rows.append({"method": "relax_project", "size": m, "wall_time_s": dt, "repeats": repeats, "seed": seed})

    for n in n_grid:
        rng = seeded_stream(seed, _DOM_RUNTIME, 2, n)
        opts = _synthetic_options(n, 4, config.p_max, rng)
        greedy_schedule(opts, weights, config)
        t0 = time.perf_counter()
        for _ in range(repeats):
            greedy_schedule(opts, weights, config)
        dt = (time.perf_counter() - t0) / repeats
        rows.append({"method": "greedy_schedule", "size": n, "wall_time_s": dt, "repeats": repeats, "seed": seed})

    if include_exhaustive:
        tiny = config.replace(m_elements=8, b_phi=1, s_max=2, codebook_size=16)
        n_tiny = 4
        rng = seeded_stream(seed, _DOM_RUNTIME, 3)
        calib = calibrate_for_snr(tiny, 10.0)
        reals = [sample_channels(None, tiny, rng, calibration=calib) for _ in range(n_tiny)]
        t0 = time.perf_counter()
        for real in reals:
            exhaustive_best_profile(real, tiny, slot_level=True)
        dt_exh = time.perf_counter() - t0
        rows.append({"method": "exhaustive", "size": n_tiny, "wall_time_s": dt_exh, "repeats": 1, "seed": seed})

        fast_reps = 20
        t0 = time.perf_counter()
        for _ in range(fast_reps):
            options = []
            for real in reals:
                res = relax_project(real, tiny)
                # closed-form option metrics: the separable route never expands slots
                rho = tiny.p_c * res.continuous_magnitude**2 / tiny.noise_power
                options.append([UavOption(power_w=tiny.p_c / n_tiny, r=math.log2(1 + rho), c_s=0.5, p_d=0.9)])
            greedy_schedule(options, weights, tiny)
        dt_fast = (time.perf_counter() - t0) / fast_reps
        rows.append({"method": "relax_greedy", "size": n_tiny, "wall_time_s": dt_fast, "repeats": fast_reps, "seed": seed})
    return rows
