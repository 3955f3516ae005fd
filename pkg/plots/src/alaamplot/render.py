"""Render figures from the simulation engine's CSV outputs.

Five figure kinds, one per diagnostic file schema:

- sweep-scatter:   sweep samples CSV -> statistic vs parameter scatter
- sweep-variance:  sweep summary CSV -> per-point variance vs parameter
- mean-degree:     sweep samples CSV -> attribute-node mean degree vs parameter
- degree-boxplot:  degree-distribution CSV -> per-degree boxplots, model vs
                   random baseline, with observed/model/baseline mean lines
- degeneracy-grid: statistic trace CSV (+ band summary CSV) -> trace plots
                   and histograms per effect with mean/95% band and observed

The renderer only knows the documented CSV schemas; it never imports the
engine. Observed values are drawn as dashed horizontal lines on sweep-style
panels and as vertical lines on distribution panels.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURE_KINDS = ("sweep-scatter", "sweep-variance", "mean-degree",
                "degree-boxplot", "degeneracy-grid")

MODEL_COLOR = "tab:orange"
BASELINE_COLOR = "purple"
OBSERVED_COLOR = "red"
BAND_COLOR = "tab:blue"

_NON_EFFECT_COLUMNS = {"sample", "theta", "mean_degree_y1",
                       "mean_indegree_y1", "mean_outdegree_y1"}


class SchemaError(ValueError):
    """Input CSV does not match the producing subcommand's schema."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    input: str
    output: str
    summary: str | None = None      # band/means CSV for grid and boxplot kinds
    column: str | None = None       # statistic column for sweep-style kinds
    degree_kind: str | None = None  # degree flavor in distribution CSVs
    observed: float | None = None

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}; "
                              f"valid: {', '.join(FIGURE_KINDS)}")


def read_csv(path) -> dict[str, list[str]]:
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    if not rows:
        raise SchemaError(f"{path}: empty CSV")
    return {name: [r[name] for r in rows] for name in rows[0]}


def _require(table: dict, path, *columns) -> None:
    missing = [c for c in columns if c not in table]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")


def _floats(table, name) -> np.ndarray:
    return np.array([float(v) for v in table[name]])


def _pick_column(table: dict, requested: str | None, path) -> str:
    if requested is not None:
        _require(table, path, requested)
        return requested
    effects = [c for c in table if c not in _NON_EFFECT_COLUMNS]
    if not effects:
        raise SchemaError(f"{path}: no statistic column found")
    return effects[0]


def _observed_line(ax, value, orientation: str) -> None:
    if value is None:
        return
    if orientation == "h":
        ax.axhline(value, color=OBSERVED_COLOR, linestyle="--", linewidth=1.2,
                   label="observed")
    else:
        ax.axvline(value, color=OBSERVED_COLOR, linestyle="-", linewidth=1.2,
                   label="observed")


def build_sweep_scatter(spec: FigureSpec):
    table = read_csv(spec.input)
    _require(table, spec.input, "theta", "sample")
    column = _pick_column(table, spec.column, spec.input)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.scatter(_floats(table, "theta"), _floats(table, column), s=4, alpha=0.4,
               color="black")
    _observed_line(ax, spec.observed, "h")
    ax.set_xlabel("parameter value")
    ax.set_ylabel(column)
    return fig


def build_sweep_variance(spec: FigureSpec):
    table = read_csv(spec.input)
    _require(table, spec.input, "theta", "variance")
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(_floats(table, "theta"), _floats(table, "variance"),
            marker="o", markersize=2.5, linewidth=0.8, color="black")
    _observed_line(ax, spec.observed, "h")
    ax.set_xlabel("parameter value")
    ax.set_ylabel("statistic variance")
    return fig


def build_mean_degree(spec: FigureSpec):
    table = read_csv(spec.input)
    _require(table, spec.input, "theta")
    column = spec.column or "mean_degree_y1"
    _require(table, spec.input, column)
    theta = _floats(table, "theta")
    values = _floats(table, column)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.scatter(theta, values, s=4, alpha=0.4, color="black")
    _observed_line(ax, spec.observed, "h")
    ax.set_xlabel("parameter value")
    ax.set_ylabel(f"{column} (attribute nodes)")
    return fig


def build_degree_boxplot(spec: FigureSpec):
    table = read_csv(spec.input)
    _require(table, spec.input, "source", "sample", "kind", "degree", "count")
    kinds = sorted(set(table["kind"]))
    kind = spec.degree_kind or kinds[0]
    if kind not in kinds:
        raise SchemaError(f"{spec.input}: no degree kind {kind!r}; have {kinds}")

    def per_degree(source):
        rows = [(int(s), int(d), float(c)) for src, s, k, d, c
                in zip(table["source"], table["sample"], table["kind"],
                       table["degree"], table["count"])
                if src == source and k == kind]
        if not rows:
            raise SchemaError(f"{spec.input}: no rows for source {source!r}")
        degrees = sorted({d for _, d, _ in rows})
        samples = sorted({s for s, _, _ in rows})
        grid = np.zeros((len(samples), len(degrees)))
        dindex = {d: j for j, d in enumerate(degrees)}
        sindex = {s: i for i, s in enumerate(samples)}
        for s, d, c in rows:
            grid[sindex[s], dindex[d]] = c
        return np.array(degrees), grid

    degrees, model = per_degree("alaam")
    _, baseline = per_degree("random")
    shown = degrees[degrees <= max(int(degrees.max()), 1)]

    fig, ax = plt.subplots(figsize=(9, 4))
    ax.boxplot([model[:, j] for j in range(len(degrees))],
               positions=degrees - 0.2, widths=0.3, patch_artist=True,
               boxprops=dict(facecolor=MODEL_COLOR, alpha=0.6),
               medianprops=dict(color="black"), showfliers=False)
    ax.boxplot([baseline[:, j] for j in range(len(degrees))],
               positions=degrees + 0.2, widths=0.3, patch_artist=True,
               boxprops=dict(facecolor=BASELINE_COLOR, alpha=0.5),
               medianprops=dict(color="black"), showfliers=False)

    observed = spec.observed
    if spec.summary:
        summ = read_csv(spec.summary)
        _require(summ, spec.summary, "kind", "observed_mean", "alaam_mean",
                 "random_mean")
        for i, k in enumerate(summ["kind"]):
            if k == kind:
                if observed is None:
                    observed = float(summ["observed_mean"][i])
                ax.axvline(float(summ["alaam_mean"][i]), color=MODEL_COLOR,
                           linestyle="--", linewidth=1.2, label="model mean")
                ax.axvline(float(summ["random_mean"][i]), color=BASELINE_COLOR,
                           linestyle="--", linewidth=1.2, label="baseline mean")
    if observed is not None:
        ax.axvline(observed, color="green", linestyle="-", linewidth=1.4,
                   label="observed")
    ax.set_xticks(shown[:: max(1, len(shown) // 20)])
    ax.set_xlabel(f"{kind} degree")
    ax.set_ylabel("attribute nodes per degree")
    ax.legend(loc="upper right", fontsize=8)
    return fig


def build_degeneracy_grid(spec: FigureSpec):
    table = read_csv(spec.input)
    _require(table, spec.input, "sample")
    effects = [c for c in table if c not in _NON_EFFECT_COLUMNS]
    if not effects:
        raise SchemaError(f"{spec.input}: no statistic columns")
    bands = {}
    if spec.summary:
        summ = read_csv(spec.summary)
        _require(summ, spec.summary, "effect", "observed", "sim_mean", "lo", "hi")
        for i, name in enumerate(summ["effect"]):
            bands[name] = (float(summ["observed"][i]), float(summ["sim_mean"][i]),
                           float(summ["lo"][i]), float(summ["hi"][i]))

    sample = _floats(table, "sample")
    fig, axes = plt.subplots(len(effects), 2,
                             figsize=(8, 2.2 * len(effects)), squeeze=False)
    for row, name in enumerate(effects):
        values = _floats(table, name)
        tr, hist = axes[row]
        tr.plot(sample, values, linewidth=0.7, color="black")
        tr.set_ylabel(name, fontsize=8)
        hist.hist(values, bins=min(20, max(5, len(values) // 5)),
                  color="lightgray", edgecolor="gray")
        info = bands.get(name)
        if info:
            observed, mean, lo, hi = info
            tr.axhline(observed, color=OBSERVED_COLOR, linewidth=1.2)
            for v, style in ((mean, "-"), (lo, "--"), (hi, "--")):
                hist.axvline(v, color=BAND_COLOR, linestyle=style, linewidth=1.1)
            hist.axvline(observed, color=OBSERVED_COLOR, linewidth=1.2)
        elif spec.observed is not None and row == 0:
            tr.axhline(spec.observed, color=OBSERVED_COLOR, linewidth=1.2)
            hist.axvline(spec.observed, color=OBSERVED_COLOR, linewidth=1.2)
    axes[-1][0].set_xlabel("sample")
    axes[-1][1].set_xlabel("statistic value")
    return fig


_BUILDERS = {
    "sweep-scatter": build_sweep_scatter,
    "sweep-variance": build_sweep_variance,
    "mean-degree": build_mean_degree,
    "degree-boxplot": build_degree_boxplot,
    "degeneracy-grid": build_degeneracy_grid,
}


def build_figure(spec: FigureSpec):
    """Figure object for a spec (exposed so tests can inspect plot contents)."""
    return _BUILDERS[spec.kind](spec)


def render(spec: FigureSpec) -> Path:
    """Render one figure to spec.output and return the written path."""
    fig = build_figure(spec)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out
