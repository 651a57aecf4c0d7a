"""Render the four comparison figures from qrisac experiment CSVs.

No computation beyond plotting transforms: the CSVs and manifest.json are the
only inputs, schemas are checked strictly against the manifest, and rendering
is deterministic (fixed styles, no embedded timestamps).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

__all__ = ["FigureSpec", "SchemaError", "NoDataError", "FIGURES", "render", "load_rows"]

SCHEME_STYLE = {
    "QRTM": {"color": "#1f77b4", "marker": "o"},
    "B3": {"color": "#2ca02c", "marker": "s"},
    "B2": {"color": "#ff7f0e", "marker": "^"},
    "B1": {"color": "#9467bd", "marker": "v"},
    "B0": {"color": "#7f7f7f", "marker": "x"},
}
METHOD_STYLE = {
    "relax_project": {"color": "#1f77b4", "marker": "o"},
    "greedy_schedule": {"color": "#2ca02c", "marker": "s"},
    "exhaustive": {"color": "#d62728", "marker": "^"},
    "relax_greedy": {"color": "#9467bd", "marker": "v"},
}


class SchemaError(ValueError):
    """Input CSV does not match the manifest schema."""


class NoDataError(ValueError):
    """Input CSV parsed but holds no plottable rows."""


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str          # fig2_roc | fig3_secrecy | fig4_siu | fig5_runtime
    input_csv: Path
    output_path: Path
    manifest_path: Path


FIGURES = {
    "fig2_roc": "roc",
    "fig3_secrecy": "secrecy",
    "fig4_siu": "siu",
    "fig5_runtime": "runtime",
}


def load_manifest(path: Path) -> dict:
    if not path.exists():
        raise SchemaError(f"manifest not found: {path}")
    return json.loads(path.read_text())


def load_rows(spec: FigureSpec) -> list[dict]:
    """Read and schema-check the figure's CSV against the manifest."""
    experiment = FIGURES.get(spec.figure_id)
    if experiment is None:
        raise SchemaError(f"unknown figure id {spec.figure_id!r}; expected one of {sorted(FIGURES)}")
    manifest = load_manifest(spec.manifest_path)
    expected = manifest["experiments"][experiment]["columns"]
    if not spec.input_csv.exists():
        raise SchemaError(f"input CSV not found: {spec.input_csv}")
    with open(spec.input_csv, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in expected if c not in header]
        if missing:
            raise SchemaError(
                f"{spec.input_csv.name} is missing columns {missing} (expected {expected})"
            )
        rows = list(reader)
    return rows


def _by_scheme(rows: list[dict], schemes: list[str]) -> dict[str, list[dict]]:
    out: dict[str, list[dict]] = {}
    for row in rows:
        out.setdefault(row["scheme"], []).append(row)
    return {s: out[s] for s in schemes if s in out} | {
        s: v for s, v in out.items() if s not in schemes
    }


def _no_data_figure(spec: FigureSpec, ax, fig) -> None:
    ax.annotate("no data", xy=(0.5, 0.5), xycoords="axes fraction",
                ha="center", va="center", fontsize=18, color="#d62728")
    _save(fig, spec.output_path)


def _save(fig, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    # empty metadata keeps PNG output byte-stable across renders
    fig.savefig(path, dpi=150, metadata={})
    plt.close(fig)


def _render_roc(spec: FigureSpec, rows: list[dict], schemes: list[str]) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.set_xlabel("false-acceptance probability of spoofed echoes")
    ax.set_ylabel("detection probability of authentic echoes")
    ax.set_xscale("log")
    ax.set_ylim(0.0, 1.02)
    if not rows:
        raise NoDataError("roc.csv has no rows")
    for scheme, srows in _by_scheme(rows, schemes).items():
        style = SCHEME_STYLE.get(scheme, {})
        pts = sorted((float(r["p_fa_target"]), float(r["p_d_emp"])) for r in srows)
        ax.plot([p for p, _ in pts], [d for _, d in pts], label=scheme, **style)
    ax.legend(loc="lower right")
    ax.grid(True, which="both", alpha=0.3)
    _save(fig, spec.output_path)


def _render_secrecy(spec: FigureSpec, rows: list[dict], schemes: list[str]) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.set_xlabel("user SNR (dB)")
    ax.set_ylabel("mean secrecy rate (bps/Hz)")
    if not rows:
        raise NoDataError("secrecy.csv has no rows")
    for scheme, srows in _by_scheme(rows, schemes).items():
        style = SCHEME_STYLE.get(scheme, {})
        pts = sorted(
            (float(r["snr_db"]), float(r["mean_cs_bps_hz"]), float(r["stderr"])) for r in srows
        )
        xs, ys, es = zip(*pts)
        ax.errorbar(xs, ys, yerr=es, label=scheme, capsize=2, **style)
    ax.legend(loc="upper left")
    ax.grid(True, alpha=0.3)
    _save(fig, spec.output_path)


def _render_siu(spec: FigureSpec, rows: list[dict], schemes: list[str]) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.set_xlabel("sensing fraction tau")
    ax.set_ylabel("secure ISAC utility U(tau)")
    if not rows:
        raise NoDataError("siu.csv has no rows")
    for scheme, srows in _by_scheme(rows, schemes).items():
        style = SCHEME_STYLE.get(scheme, {})
        pts = sorted((float(r["tau"]), float(r["mean_u"])) for r in srows)
        xs, ys = zip(*pts)
        ax.plot(xs, ys, label=scheme, **style)
        tau_star = float(srows[0]["tau_star"])
        u_star = dict(pts).get(tau_star)
        if u_star is not None:
            ax.plot([tau_star], [u_star], marker="*", markersize=14,
                    color=style.get("color", "k"), linestyle="none")
    ax.legend(loc="upper right")
    ax.grid(True, alpha=0.3)
    _save(fig, spec.output_path)


def _render_runtime(spec: FigureSpec, rows: list[dict], schemes: list[str]) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    ax.set_xlabel("problem size (UAV count or RIS elements)")
    ax.set_ylabel("wall time (s)")
    ax.set_xscale("log")
    ax.set_yscale("log")
    if not rows:
        raise NoDataError("runtime.csv has no rows")
    by_method: dict[str, list[dict]] = {}
    for row in rows:
        by_method.setdefault(row["method"], []).append(row)
    for method, mrows in by_method.items():
        style = METHOD_STYLE.get(method, {})
        pts = sorted((float(r["size"]), float(r["wall_time_s"])) for r in mrows)
        xs, ys = zip(*pts)
        if len(pts) == 1:
            ax.plot(xs, ys, label=method, linestyle="none", **style)
        else:
            ax.plot(xs, ys, label=method, **style)
    ax.legend(loc="upper left")
    ax.grid(True, which="both", alpha=0.3)
    _save(fig, spec.output_path)


_RENDERERS = {
    "fig2_roc": _render_roc,
    "fig3_secrecy": _render_secrecy,
    "fig4_siu": _render_siu,
    "fig5_runtime": _render_runtime,
}


def render(spec: FigureSpec) -> Path:
    """Render one figure; raises SchemaError / NoDataError loudly on bad input.

    On NoDataError an annotated empty-axes image is still written so the
    failure is visible in artifact listings.
    """
    rows = load_rows(spec)
    manifest = load_manifest(spec.manifest_path)
    schemes = list(manifest.get("schemes", []))
    renderer = _RENDERERS[spec.figure_id]
    try:
        renderer(spec, rows, schemes)
    except NoDataError:
        fig, ax = plt.subplots(figsize=(6.4, 4.8))
        _no_data_figure(spec, ax, fig)
        raise
    return spec.output_path
