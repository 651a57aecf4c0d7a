"""Experiment orchestration: scheme ladder comparisons, CSV emission, manifest.

Four experiments mirror the comparative study: spoof-detection ROC, secrecy
vs. user SNR, utility vs. sensing fraction, and runtime scaling. Monte Carlo
outputs are byte-identical for a given (config, master_seed) regardless of
worker count; the runtime experiment reports measured wall times and is the
documented exception.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

import numpy as np

from .channel import calibrate_for_snr
from .optimizer import default_weights_for_sweep, runtime_scaling, sweep_tau
from .scenario import ScenarioConfig, ValidationError
from .scene_auth import AdversaryModel, simulate_detection_trials
from .schemes import SCHEME_ORDER, SCHEMES, SchemeSpec, get_scheme
from .secrecy import secrecy_point

__all__ = [
    "ExperimentResult",
    "run_roc_experiment",
    "run_secrecy_experiment",
    "run_siu_experiment",
    "run_runtime_experiment",
    "run_all",
    "run_robustness_grid",
    "write_csv",
    "write_manifest",
    "EXPERIMENT_SCHEMAS",
]

ROC_PFA_GRID = [0.5, 0.2, 0.1, 0.03, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4]
SECRECY_SNR_GRID = [-5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0]
SIU_TAU_GRID = [0.01, 0.02, 0.05, 0.08, 0.12, 0.2, 0.3, 0.5, 0.7, 0.9]
RUNTIME_N_GRID = [8, 16, 32, 48, 64]
ROC_SNR_DB = 10.0

EXPERIMENT_SCHEMAS = {
    "roc": ["scheme", "p_fa_target", "p_fa_emp", "p_d_emp", "trials", "seed"],
    "secrecy": ["scheme", "snr_db", "mean_cs_bps_hz", "stderr", "trials", "seed"],
    "siu": ["scheme", "tau", "mean_r", "mean_cs", "mean_pd", "mean_u", "tau_star", "trials", "seed"],
    "runtime": ["method", "size", "wall_time_s", "repeats", "seed"],
}


@dataclass
class ExperimentResult:
    experiment_id: str
    columns: list[str]
    rows: list[dict]
    trials: int
    seed: int
    wall_time_s: float = 0.0
    extras: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.columns:
            raise ValidationError(["experiment result needs metric columns"])
        for row in self.rows:
            missing = [c for c in self.columns if c not in row]
            if missing:
                raise ValidationError([f"row missing columns {missing}"])


def scheme_adversary(scheme: SchemeSpec, config: ScenarioConfig, klass: str = "A1_classical") -> AdversaryModel:
    """Canonical adversary view per scheme: public codes are known, secret
    codes are guessed (or partially learned by quantum-aided classes)."""
    adv = AdversaryModel.for_class(klass, config)
    if scheme.ris_enabled and not scheme.codes_secret:
        return adv.with_knowledge("public")
    if adv.learned_fraction > 0.0:
        return adv.with_knowledge("learned")
    return adv


def _resolve(config: ScenarioConfig, seed: int | None, trials: int | None,
             schemes: list[str] | None) -> tuple[int, int, list[SchemeSpec]]:
    seed = config.master_seed if seed is None else seed
    trials = config.trials if trials is None else trials
    ids = list(SCHEME_ORDER) if not schemes else list(schemes)
    return seed, trials, [get_scheme(s) for s in ids]


def _roc_chunk(args: tuple) -> tuple[np.ndarray, np.ndarray]:
    config_json, scheme_id, klass, seed, n_trials, offset, snr_db = args
    config = ScenarioConfig.from_json(config_json)
    scheme = get_scheme(scheme_id)
    adv = scheme_adversary(scheme, config, klass)
    calibration = calibrate_for_snr(config, snr_db)
    samples = simulate_detection_trials(
        config, scheme, adv, calibration, seed, n_trials, trial_offset=offset
    )
    return samples.t_authentic, samples.t_spoof


def _parallel_chunks(fn, payloads: list[tuple], workers: int) -> list:
    if workers <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, payloads))


def run_roc_experiment(
    config: ScenarioConfig,
    seed: int | None = None,
    trials: int | None = None,
    schemes: list[str] | None = None,
    workers: int = 1,
    adversary_class: str = "A1_classical",
    p_fa_grid: list[float] | None = None,
) -> ExperimentResult:
    """Spoof-detection ROC per scheme at the 10 dB operating point.

    Per row, the threshold is the (out-of-sample) quantile of the scheme's
    spoof statistic at the target level; p_fa_emp and p_d_emp are measured on
    held-out spoof trials and all authentic trials.
    """
    t0 = time.perf_counter()
    seed, trials, scheme_specs = _resolve(config, seed, trials, schemes)
    grid = sorted(p_fa_grid or ROC_PFA_GRID, reverse=True)
    rows: list[dict] = []
    extras: dict = {}
    for scheme in scheme_specs:
        n_chunks = max(1, min(workers, trials // 1000)) if workers > 1 else 1
        bounds = np.linspace(0, trials, n_chunks + 1, dtype=int)
        payloads = [
            (config.to_json(), scheme.id, adversary_class, seed,
             int(b - a), int(a), ROC_SNR_DB)
            for a, b in zip(bounds, bounds[1:]) if b > a
        ]
        parts = _parallel_chunks(_roc_chunk, payloads, workers)
        t_auth = np.concatenate([p[0] for p in parts])
        t_spoof = np.concatenate([p[1] for p in parts])

        calib_half = np.sort(t_spoof[0::2])
        test_half = t_spoof[1::2]
        for p_fa in grid:
            thr = float(np.quantile(calib_half, 1.0 - p_fa))
            rows.append(
                {
                    "scheme": scheme.id,
                    "p_fa_target": p_fa,
                    "p_fa_emp": float(np.mean(test_half > thr)),
                    "p_d_emp": float(np.mean(t_auth > thr)),
                    "trials": trials,
                    "seed": seed,
                }
            )
        extras[scheme.id] = {"t_authentic": t_auth, "t_spoof": t_spoof}
    return ExperimentResult(
        experiment_id="roc",
        columns=EXPERIMENT_SCHEMAS["roc"],
        rows=rows,
        trials=trials,
        seed=seed,
        wall_time_s=time.perf_counter() - t0,
        extras=extras,
    )


def _secrecy_chunk(args: tuple) -> dict[str, np.ndarray]:
    config_json, scheme_ids, snr_db, snr_index, trials, seed, klass, tau = args
    config = ScenarioConfig.from_json(config_json)
    scheme_specs = [get_scheme(s) for s in scheme_ids]
    advs = {s.id: scheme_adversary(s, config, klass) for s in scheme_specs}
    return secrecy_point(config, scheme_specs, snr_db, snr_index, trials, seed, advs, tau)


def run_secrecy_experiment(
    config: ScenarioConfig,
    seed: int | None = None,
    trials: int | None = None,
    schemes: list[str] | None = None,
    workers: int = 1,
    adversary_class: str = "A1_classical",
    snr_grid_db: list[float] | None = None,
) -> ExperimentResult:
    """Mean C_s/B vs. user SNR per scheme, common channel draws across schemes."""
    t0 = time.perf_counter()
    seed, trials, scheme_specs = _resolve(config, seed, trials, schemes)
    grid = list(snr_grid_db or SECRECY_SNR_GRID)
    payloads = [
        (config.to_json(), [s.id for s in scheme_specs], float(snr), j, trials, seed,
         adversary_class, config.tau)
        for j, snr in enumerate(grid)
    ]
    points = _parallel_chunks(_secrecy_chunk, payloads, workers)
    rows: list[dict] = []
    for scheme in scheme_specs:
        for snr, samples in zip(grid, points):
            cs = samples[scheme.id]
            rows.append(
                {
                    "scheme": scheme.id,
                    "snr_db": float(snr),
                    "mean_cs_bps_hz": float(np.mean(cs)),
                    "stderr": float(np.std(cs, ddof=1) / math.sqrt(len(cs))),
                    "trials": trials,
                    "seed": seed,
                }
            )
    return ExperimentResult(
        experiment_id="secrecy",
        columns=EXPERIMENT_SCHEMAS["secrecy"],
        rows=rows,
        trials=trials,
        seed=seed,
        wall_time_s=time.perf_counter() - t0,
    )


def run_siu_experiment(
    config: ScenarioConfig,
    seed: int | None = None,
    trials: int | None = None,
    schemes: list[str] | None = None,
    workers: int = 1,
    adversary_class: str = "A1_classical",
    tau_grid: list[float] | None = None,
) -> ExperimentResult:
    """Mean U(tau) per scheme at 10 dB with shared baseline normalizers."""
    t0 = time.perf_counter()
    seed, trials, scheme_specs = _resolve(config, seed, trials, schemes)
    trials = min(trials, 4000)  # smooth means well before this
    grid = list(tau_grid or SIU_TAU_GRID)
    base_adv = AdversaryModel.for_class(adversary_class, config)
    weights = default_weights_for_sweep(config, grid, trials, seed, ROC_SNR_DB, base_adv)
    rows: list[dict] = []
    for scheme in scheme_specs:
        adv = scheme_adversary(scheme, config, adversary_class)
        scheme_rows, tau_star = sweep_tau(
            config, scheme, grid, weights=weights, trials=trials, seed=seed,
            snr_db=ROC_SNR_DB, adversary=adv,
        )
        for r in scheme_rows:
            rows.append({**r, "tau_star": tau_star})
    return ExperimentResult(
        experiment_id="siu",
        columns=EXPERIMENT_SCHEMAS["siu"],
        rows=rows,
        trials=trials,
        seed=seed,
        wall_time_s=time.perf_counter() - t0,
        extras={"weights": weights},
    )


def run_runtime_experiment(
    config: ScenarioConfig,
    seed: int | None = None,
    trials: int | None = None,
    schemes: list[str] | None = None,
    workers: int = 1,
    n_grid: list[int] | None = None,
) -> ExperimentResult:
    """Wall-time scaling of the separable optimizer vs. naive exhaustive search."""
    t0 = time.perf_counter()
    seed = config.master_seed if seed is None else seed
    rows = runtime_scaling(list(n_grid or RUNTIME_N_GRID), config, seed=seed)
    return ExperimentResult(
        experiment_id="runtime",
        columns=EXPERIMENT_SCHEMAS["runtime"],
        rows=rows,
        trials=trials or 0,
        seed=seed,
        wall_time_s=time.perf_counter() - t0,
    )


EXPERIMENTS = {
    "roc": run_roc_experiment,
    "secrecy": run_secrecy_experiment,
    "siu": run_siu_experiment,
    "runtime": run_runtime_experiment,
}


def run_all(config: ScenarioConfig, out_dir: str | Path, seed: int | None = None,
            trials: int | None = None, schemes: list[str] | None = None,
            workers: int = 1) -> dict[str, Path]:
    """Run every experiment and write CSVs plus the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}
    for name, runner in EXPERIMENTS.items():
        result = runner(config, seed=seed, trials=trials, schemes=schemes, workers=workers)
        paths[name] = write_csv(result, out / f"{name}.csv")
    paths["manifest"] = write_manifest(config, out, seed=seed)
    return paths


def run_robustness_grid(
    config: ScenarioConfig,
    out_dir: str | Path,
    carrier_freqs: list[float] = (7e9, 10e9, 15e9),
    m_codes: list[int] = (32, 64),
    b_phis: list[int] = (2, 3),
    k_clutters: list[int] = (200, 400),
    trials: int = 2000,
    seed: int | None = None,
) -> list[Path]:
    """Off-by-default parameter-grid wrapper over the four experiments."""
    out = Path(out_dir)
    written = []
    for fc in carrier_freqs:
        for mc in m_codes:
            for b in b_phis:
                for k in k_clutters:
                    variant = config.replace(carrier_freq=fc, m_code=mc, b_phi=b, k_clutter=k)
                    tag = f"f{fc / 1e9:g}_mc{mc}_b{b}_k{k}"
                    paths = run_all(variant, out / tag, seed=seed, trials=trials)
                    written.extend(paths.values())
    return written


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(result: ExperimentResult, path: str | Path) -> Path:
    path = Path(path)
    lines = [",".join(result.columns)]
    for row in result.rows:
        lines.append(",".join(_format_cell(row[c]) for c in result.columns))
    path.write_text("\n".join(lines) + "\n")
    return path


def config_hash(config: ScenarioConfig) -> str:
    return hashlib.sha256(config.to_json().encode()).hexdigest()


def write_manifest(config: ScenarioConfig, out_dir: str | Path, seed: int | None = None) -> Path:
    try:
        version = metadata.version("qrisac")
    except metadata.PackageNotFoundError:
        version = "unknown"
    manifest = {
        "config_hash": config_hash(config),
        "master_seed": config.master_seed if seed is None else seed,
        "package_version": version,
        "experiments": {name: {"csv": f"{name}.csv", "columns": cols}
                        for name, cols in EXPERIMENT_SCHEMAS.items()},
        "schemes": list(SCHEME_ORDER),
        "config": json.loads(config.to_json()),
    }
    path = Path(out_dir) / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path
