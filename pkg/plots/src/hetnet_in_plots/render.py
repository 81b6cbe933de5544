"""Figure rendering from hetnet-in CSV outputs.

Display-only: no model quantity is recomputed here.  Rendering is
deterministic — fixed Agg backend, fixed style and DPI, and stripped image
metadata, so the same CSV and spec always produce identical bytes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .errors import ConfigError, EmptyInput, MissingColumn  # noqa: E402

FIGURE_KINDS = ("theta_pmf", "validation_curve", "method_comparison")

_REQUIRED = {
    "theta_pmf": ("theta", "frequency", "analytic_pmf"),
    "validation_curve": ("axis_value",),
    "method_comparison": ("axis_value", "method", "ase_exact"),
}

# metrics with paired simulated/analytic columns in simulate.csv
_VALIDATION_METRICS = ("q1", "q2", "ase")

_DPI = 150
_FIGSIZE = (6.4, 4.2)


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    figure_kind: str
    output_image: str
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""

    def __post_init__(self):
        if self.figure_kind not in FIGURE_KINDS:
            raise ConfigError(
                f"figure_kind must be one of {FIGURE_KINDS}, "
                f"got {self.figure_kind!r}")
        if not self.input_csv or not self.output_image:
            raise ConfigError("input_csv and output_image are required")


def _read_rows(spec: PlotSpec) -> list[dict]:
    try:
        with open(spec.input_csv, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            rows = list(reader)
    except OSError as e:
        raise ConfigError(f"cannot read {spec.input_csv}: {e}") from e
    for col in _REQUIRED[spec.figure_kind]:
        if col not in header:
            raise MissingColumn(col, spec.input_csv)
    if not rows:
        raise EmptyInput(f"{spec.input_csv} has no data rows")
    return rows


def _new_axes(spec: PlotSpec):
    fig, ax = plt.subplots(figsize=_FIGSIZE, dpi=_DPI)
    if spec.title:
        ax.set_title(spec.title)
    if spec.xlabel:
        ax.set_xlabel(spec.xlabel)
    if spec.ylabel:
        ax.set_ylabel(spec.ylabel)
    return fig, ax


def _save(fig, spec: PlotSpec):
    fig.savefig(spec.output_image, dpi=_DPI, metadata={"Software": None})
    plt.close(fig)


def _theta_pmf(spec: PlotSpec, rows):
    theta = [int(r["theta"]) for r in rows]
    freq = [float(r["frequency"]) for r in rows]
    pmf = [float(r["analytic_pmf"]) for r in rows]
    fig, ax = _new_axes(spec)
    ax.bar(theta, freq, width=0.8, color="#4878d0", label="empirical")
    ax.plot(theta, pmf, "ks", markerfacecolor="none", label="analytic")
    ax.set_xticks(theta)
    if not spec.xlabel:
        ax.set_xlabel("nulling requests per SBS")
    if not spec.ylabel:
        ax.set_ylabel("probability")
    ax.legend()
    _save(fig, spec)


def _validation_curve(spec: PlotSpec, rows):
    header = rows[0].keys()
    metrics = [m for m in _VALIDATION_METRICS
               if f"{m}_sim" in header and f"{m}_analytic" in header]
    if not metrics:
        raise MissingColumn("q1_sim/q1_analytic (no metric pair)",
                            spec.input_csv)
    x = [float(r["axis_value"]) for r in rows]
    fig, ax = _new_axes(spec)
    colors = {"q1": "#4878d0", "q2": "#ee854a", "ase": "#6acc64"}
    for m in metrics:
        ana = [float(r[f"{m}_analytic"]) for r in rows]
        sim = [float(r[f"{m}_sim"]) for r in rows]
        ax.plot(x, ana, "-", color=colors[m], label=f"{m} analytic")
        ax.plot(x, sim, "o", color=colors[m], markerfacecolor="none",
                label=f"{m} simulated")
    if not spec.xlabel:
        ax.set_xlabel(rows[0].get("axis", "axis") or "axis")
    ax.legend()
    _save(fig, spec)


def _method_comparison(spec: PlotSpec, rows):
    methods = []
    for r in rows:
        if r["method"] not in methods:
            methods.append(r["method"])
    fig, ax = _new_axes(spec)
    markers = ["o", "s", "^", "d", "v", "*"]
    for i, m in enumerate(methods):
        pts = [(float(r["axis_value"]), float(r["ase_exact"]))
               for r in rows if r["method"] == m]
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts],
                marker=markers[i % len(markers)], label=m)
    if not spec.xlabel:
        ax.set_xlabel(rows[0].get("axis", "axis") or "axis")
    if not spec.ylabel:
        ax.set_ylabel("ASE (exact)")
    ax.legend()
    _save(fig, spec)


_RENDERERS = {
    "theta_pmf": _theta_pmf,
    "validation_curve": _validation_curve,
    "method_comparison": _method_comparison,
}


def render(spec: PlotSpec) -> str:
    """Renders the figure described by ``spec``; returns the image path."""
    rows = _read_rows(spec)
    _RENDERERS[spec.figure_kind](spec, rows)
    return spec.output_image
