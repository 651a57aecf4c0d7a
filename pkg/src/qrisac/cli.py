"""Batch command-line entry point.

Machine-readable JSON summaries go to stdout; progress lines go to stderr.
Exit codes: 0 success, 1 runtime failure, 2 config validation failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .control_plane import DeterministicProvider, control_overhead, establish_session
from .experiments import EXPERIMENTS, run_all, write_csv, write_manifest
from .numerics import seeded_stream
from .scenario import ScenarioConfig, ValidationError, slot_timing
from .schemes import SCHEME_ORDER
from .scene_auth import AdversaryModel

__all__ = ["main", "build_parser"]


def _progress(message: str) -> None:
    print(message, file=sys.stderr)


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrisac",
        description="Monte Carlo experiments for secure RIS-assisted ISAC in UAV corridors",
    )
    parser.add_argument("--config", type=Path, default=None, help="JSON config file (defaults built in)")
    parser.add_argument("--out", type=Path, default=None,
                        help="output directory (env QRISAC_OUT_DIR, default ./out)")
    parser.add_argument("--seed", type=int, default=None, help="override master seed")
    parser.add_argument("--trials", type=int, default=None, help="override Monte Carlo trials")
    parser.add_argument("--schemes", type=str, default=None,
                        help=f"comma-separated subset of {','.join(SCHEME_ORDER)}")
    parser.add_argument("--workers", type=int, default=None,
                        help="trial-level worker processes (env QRISAC_WORKERS, default 1)")
    parser.add_argument(
        "command",
        choices=["roc", "secrecy", "siu", "runtime", "all", "validate", "timing"],
        help="experiment to run, or validate/timing reports",
    )
    return parser


def _load_config(path: Path | None) -> ScenarioConfig:
    if path is None:
        return ScenarioConfig()
    return ScenarioConfig.from_file(path)


def _resolve_out(arg: Path | None) -> Path:
    if arg is not None:
        return arg
    env = os.environ.get("QRISAC_OUT_DIR")
    return Path(env) if env else Path("out")


def _resolve_workers(arg: int | None) -> int:
    if arg is not None:
        return max(1, arg)
    env = os.environ.get("QRISAC_WORKERS")
    return max(1, int(env)) if env else 1


def _scheme_filter(arg: str | None) -> list[str] | None:
    if not arg:
        return None
    requested = [s.strip() for s in arg.split(",") if s.strip()]
    unknown = [s for s in requested if s not in SCHEME_ORDER]
    if unknown:
        raise ValidationError([f"unknown scheme {s!r}" for s in unknown])
    return requested


def _cmd_validate(config: ScenarioConfig) -> int:
    violations = config.validate()
    if violations:
        _emit({"status": "invalid", "violations": violations})
        return 2
    _emit({"status": "ok", "violations": []})
    return 0


def _cmd_timing(config: ScenarioConfig) -> int:
    t_slot, feasible, budget = slot_timing(config)
    provider = DeterministicProvider(config)
    session = establish_session(
        provider, AdversaryModel.for_class("A1_classical", config), seeded_stream(config.master_seed, 0)
    )
    overhead = control_overhead(session, provider, config)
    report = {
        "t_slot_s": t_slot,
        "slot_update_budget_s": budget,
        "slot_update_feasible": feasible,
        "control_bytes_per_cpi": overhead.bytes_per_cpi,
        "control_latency_s": overhead.latency_s,
        "control_feasible": overhead.feasible,
    }
    if not feasible:
        report["recommendation"] = (
            "per-slot update budget exceeded: reduce m_code (longer slots), "
            "extend t_cpi, or lower n_upd/t_sw"
        )
    if not overhead.feasible:
        report["recommendation_control"] = (
            "control latency exceeds the CPI budget: reduce m_elements or crypto compute time"
        )
    status = "ok" if (feasible and overhead.feasible) else "infeasible"
    _emit({"status": status, "timing": report})
    return 0 if status == "ok" else 2


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load_config(args.config)
        if args.seed is not None:
            config = config.replace(master_seed=args.seed)
        if args.trials is not None:
            config = config.replace(trials=args.trials)
        schemes = _scheme_filter(args.schemes)
    except (ValidationError, OSError, json.JSONDecodeError) as exc:
        violations = exc.violations if isinstance(exc, ValidationError) else [str(exc)]
        _emit({"status": "invalid", "violations": violations})
        return 2

    if args.command == "validate":
        return _cmd_validate(config)
    if args.command == "timing":
        return _cmd_timing(config)

    out_dir = _resolve_out(args.out)
    workers = _resolve_workers(args.workers)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "all":
            _progress(f"running all experiments -> {out_dir}")
            paths = run_all(config, out_dir, seed=args.seed, trials=args.trials,
                            schemes=schemes, workers=workers)
            _emit({"status": "ok", "outputs": {k: str(v) for k, v in paths.items()}})
            return 0
        runner = EXPERIMENTS[args.command]
        _progress(f"running {args.command} experiment -> {out_dir}")
        result = runner(config, seed=args.seed, trials=args.trials, schemes=schemes, workers=workers)
        csv_path = write_csv(result, out_dir / f"{args.command}.csv")
        manifest = write_manifest(config, out_dir, seed=args.seed)
        _progress(f"{args.command}: {len(result.rows)} rows in {result.wall_time_s:.1f}s")
        _emit(
            {
                "status": "ok",
                "outputs": {args.command: str(csv_path), "manifest": str(manifest)},
                "rows": len(result.rows),
            }
        )
        return 0
    except ValidationError as exc:
        _emit({"status": "invalid", "violations": exc.violations})
        return 2
    except Exception as exc:  # runtime failure -> exit 1 with a machine-readable report
        _emit({"status": "error", "error": f"{type(exc).__name__}: {exc}"})
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
