"""Goodness-of-fit t-ratios, degeneracy checks, and attribute-degree comparisons.

All three simulate at the fitted parameters starting from the observed
vector and post-process the retained batch; nothing here feeds back into
estimation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .effects import EffectSpec, Model
from .graph import CovariateTable, Graph, OutcomeVector
from .sampler import SampleBatch, SamplerConfig, closed_form_vector, derive_seed, simulate

# Structural statistics reported in goodness-of-fit suites, by directionality.
GOF_SUITE_DIRECTED = (
    "AlterInTwoStar2", "AlterOutTwoStar2", "Contagion", "ContagionReciprocity",
    "CyclicTriangleC1", "CyclicTriangleC3", "Density",
    "EgoInThreeStar", "EgoInTwoStar", "EgoOutThreeStar", "EgoOutTwoStar",
    "GWReceiver", "GWSender", "MixedTwoStar", "MixedTwoStarSink",
    "MixedTwoStarSource", "Receiver", "Reciprocity", "Sender",
    "TransitiveTriangleD1", "TransitiveTriangleT1", "TransitiveTriangleT3",
    "TransitiveTriangleU1",
)
GOF_SUITE_UNDIRECTED = ("Activity", "Contagion", "Density", "GWActivity")


def default_gof_suite(g: Graph, model: Model) -> list[EffectSpec]:
    """Structural suite for the graph's directionality plus the model's
    covariate-based effects."""
    kinds = GOF_SUITE_DIRECTED if g.directed else GOF_SUITE_UNDIRECTED
    suite = [EffectSpec(k) for k in kinds]
    for e in model.effects:
        if e not in suite:
            suite.append(e)
    return suite


def _default_cfg(g: Graph, n_samples: int, seed: int) -> SamplerConfig:
    return SamplerConfig(burn_in=100 * g.n, interval=10 * g.n,
                         n_samples=n_samples, seed=seed, initial_y="observed")


@dataclass
class GofRow:
    effect: str
    observed: float
    sim_mean: float
    sim_sd: float
    t_ratio: float
    adequate: bool      # |t| < 1.0
    degenerate: bool    # zero simulated variance


@dataclass
class GofReport:
    rows: list[GofRow]
    batch: SampleBatch

    def row(self, effect: str) -> GofRow:
        return next(r for r in self.rows if r.effect == effect)

    @property
    def all_adequate(self) -> bool:
        return all(r.adequate for r in self.rows if not r.degenerate)

    def to_text(self) -> str:
        lines = [f"{'effect':<28} {'observed':>12} {'sim_mean':>12} {'sim_sd':>12} {'t_ratio':>10}"]
        for r in self.rows:
            flag = " degenerate" if r.degenerate else ("" if r.adequate else " *")
            lines.append(f"{r.effect:<28} {r.observed:>12.4f} {r.sim_mean:>12.4f} "
                         f"{r.sim_sd:>12.4f} {r.t_ratio:>10.4f}{flag}")
        return "\n".join(lines)

    def write_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("effect,observed,sim_mean,sim_sd,t_ratio,adequate,degenerate\n")
            for r in self.rows:
                f.write(f"{r.effect},{r.observed!r},{r.sim_mean!r},{r.sim_sd!r},"
                        f"{r.t_ratio!r},{int(r.adequate)},{int(r.degenerate)}\n")


def gof(m: Model, g: Graph, w: CovariateTable | None, y_obs: OutcomeVector,
        suite: list[EffectSpec] | None = None,
        cfg: SamplerConfig | None = None) -> GofReport:
    """Simulate at the fitted parameters and t-ratio every suite statistic.

    t = (simulated mean - observed) / simulated sd; |t| < 1 is read as an
    adequate fit for statistics not in the model. Zero-variance rows are
    flagged degenerate instead of dividing by zero.
    """
    if suite is None:
        suite = default_gof_suite(g, m)
    cfg = cfg or _default_cfg(g, 1000, 0)
    batch = simulate(m, g, w, cfg, y_obs=y_obs, record_effects=suite)
    effects = list(m.effects) + [e for e in suite if e not in m.effects]
    observed = closed_form_vector(effects, g, w, y_obs.values)

    rows = []
    for j, e in enumerate(effects):
        col = batch.stats[:, j]
        mean, sd = float(col.mean()), float(col.std(ddof=1))
        if sd > 0:
            t = (mean - observed[j]) / sd
            rows.append(GofRow(e.name, float(observed[j]), mean, sd, t, abs(t) < 1.0, False))
        else:
            exact = mean == observed[j]
            rows.append(GofRow(e.name, float(observed[j]), mean, 0.0,
                               0.0 if exact else math.inf, exact, True))
    rows.sort(key=lambda r: r.effect)
    return GofReport(rows, batch)


@dataclass
class EffectBand:
    effect: str
    observed: float
    sim_mean: float
    lo: float
    hi: float
    passed: bool
    degenerate: bool
    hist_counts: np.ndarray
    hist_edges: np.ndarray


@dataclass
class DegeneracyCheck:
    bands: list[EffectBand]
    batch: SampleBatch
    band_percent: float

    @property
    def passed(self) -> bool:
        return all(b.passed for b in self.bands)

    def band(self, effect: str) -> EffectBand:
        return next(b for b in self.bands if b.effect == effect)

    def to_text(self) -> str:
        lines = [f"{'effect':<28} {'observed':>12} {'sim_mean':>12} "
                 f"{'lo':>12} {'hi':>12} verdict"]
        for b in self.bands:
            verdict = "pass" if b.passed else "FAIL"
            if b.degenerate:
                verdict += " (zero variance)"
            lines.append(f"{b.effect:<28} {b.observed:>12.4f} {b.sim_mean:>12.4f} "
                         f"{b.lo:>12.4f} {b.hi:>12.4f} {verdict}")
        lines.append(f"overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def write_summary_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("effect,observed,sim_mean,lo,hi,passed,degenerate\n")
            for b in self.bands:
                f.write(f"{b.effect},{b.observed!r},{b.sim_mean!r},{b.lo!r},{b.hi!r},"
                        f"{int(b.passed)},{int(b.degenerate)}\n")

    def write_trace_csv(self, path) -> None:
        self.batch.write_csv(path)


def degeneracy_check(m: Model, g: Graph, w: CovariateTable | None,
                     y_obs: OutcomeVector, cfg: SamplerConfig | None = None,
                     band: float = 95.0) -> DegeneracyCheck:
    """Simulate at the fitted parameters and test that each observed model
    statistic is central in its simulated distribution.

    The verdict passes iff the observed value sits inside the simulated
    2.5-97.5 percentile band (for band = 95).
    """
    cfg = cfg or _default_cfg(g, 100, 0)
    batch = simulate(m, g, w, cfg, y_obs=y_obs)
    observed = closed_form_vector(m.effects, g, w, y_obs.values)
    tail = (100.0 - band) / 2.0

    bands = []
    for j, e in enumerate(m.effects):
        col = batch.stats[:, j]
        lo, hi = np.percentile(col, [tail, 100.0 - tail])
        degenerate = float(col.std(ddof=1)) == 0.0
        counts, edges = np.histogram(col, bins=min(20, max(5, batch.n_samples // 5)))
        bands.append(EffectBand(e.name, float(observed[j]), float(col.mean()),
                                float(lo), float(hi),
                                bool(lo <= observed[j] <= hi), degenerate,
                                counts, edges))
    return DegeneracyCheck(bands, batch, band)


@dataclass
class AttributeDegreeReport:
    """Degree distributions of attribute nodes: model vs random baseline."""

    kinds: list[str]                       # ["degree"] or ["in", "out"]
    bins: np.ndarray                       # unit-width degree bins
    model_counts: dict                     # kind -> (n_samples, len(bins))
    baseline_counts: dict
    model_mean_degree: dict                # kind -> (n_samples,)
    baseline_mean_degree: dict
    observed_mean_degree: dict             # kind -> float
    model_mean_density: float              # target for the baseline generator
    baseline_realized_density: float

    def write_dist_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("source,sample,kind,degree,count\n")
            for source, table in (("alaam", self.model_counts),
                                  ("random", self.baseline_counts)):
                for kind in self.kinds:
                    counts = table[kind]
                    for s in range(counts.shape[0]):
                        for b, c in zip(self.bins, counts[s]):
                            f.write(f"{source},{s},{kind},{b},{int(c)}\n")

    def write_summary_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("kind,observed_mean,alaam_mean,random_mean,alaam_mean_density\n")
            for kind in self.kinds:
                f.write(f"{kind},{self.observed_mean_degree[kind]!r},"
                        f"{float(np.nanmean(self.model_mean_degree[kind]))!r},"
                        f"{float(np.nanmean(self.baseline_mean_degree[kind]))!r},"
                        f"{self.model_mean_density!r}\n")


def attribute_degree_gof(m: Model, g: Graph, w: CovariateTable | None,
                         y_obs: OutcomeVector,
                         cfg: SamplerConfig | None = None) -> AttributeDegreeReport:
    """Compare attribute-node degree distributions against a density-matched
    random baseline.

    The baseline assigns each node the attribute independently with
    probability equal to the simulated batch's mean density, so differences
    in the degree profile are attributable to the model's structure, not its
    density.
    """
    cfg = cfg or _default_cfg(g, 100, 0)
    cfg = SamplerConfig(**{**cfg.__dict__, "store_y": True})
    batch = simulate(m, g, w, cfg, y_obs=y_obs)
    ys = batch.y_samples
    n_samples = ys.shape[0]

    p_bar = float(ys.mean())
    rng = np.random.Generator(np.random.PCG64(derive_seed(cfg.seed, 7)))
    baseline = (rng.random(ys.shape) < p_bar).astype(np.int8)

    kinds = {"degree": g.deg} if not g.directed else {"in": g.deg_in, "out": g.deg_out}
    max_deg = int(max(d.max() for d in kinds.values()))
    bins = np.arange(0, int(max_deg * 1.1) + 2)

    def tables(samples):
        counts = {k: np.zeros((n_samples, bins.size)) for k in kinds}
        means = {k: np.full(n_samples, math.nan) for k in kinds}
        for s in range(n_samples):
            onesel = samples[s] == 1
            for k, degs in kinds.items():
                dsel = degs[onesel]
                counts[k][s] = np.bincount(dsel, minlength=bins.size)[:bins.size]
                if dsel.size:
                    means[k][s] = float(dsel.mean())
        return counts, means

    model_counts, model_means = tables(ys)
    base_counts, base_means = tables(baseline)
    obs_sel = y_obs.values == 1
    observed = {k: (float(d[obs_sel].mean()) if obs_sel.any() else math.nan)
                for k, d in kinds.items()}
    return AttributeDegreeReport(list(kinds), bins, model_counts, base_counts,
                                 model_means, base_means, observed, p_bar,
                                 float(baseline.mean()))
