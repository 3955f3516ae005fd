import math

import numpy as np
import pytest
from scipy.stats import ks_2samp

from alaam import (EffectSpec, Model, OutcomeVector, SamplerConfig,
                   attribute_degree_gof, default_gof_suite, degeneracy_check,
                   estimate_sa, gof, simulate)
from alaam.estimation import SaConfig
from conftest import random_graph


def quick_cfg(g, n_samples=200, seed=0):
    return SamplerConfig(burn_in=20 * g.n, interval=2 * g.n, n_samples=n_samples,
                         seed=seed, initial_y="observed")


def test_density_only_gof_small_t(rng):
    g, _ = random_graph(rng, 60, False, p=0.12)
    y = OutcomeVector((rng.random(60) < 0.4).astype(np.int8))
    fit = estimate_sa(Model([EffectSpec("Density")]), g, None, y, SaConfig(seed=2))
    assert fit.converged
    report = gof(Model([EffectSpec("Density")], fit.theta_hat), g, None, y,
                 suite=[EffectSpec("Density")],
                 cfg=SamplerConfig(burn_in=50 * g.n, interval=10 * g.n,
                                   n_samples=1000, seed=3, initial_y="observed"))
    assert abs(report.row("Density").t_ratio) < 0.1


def test_gof_default_suite_covers_model(rng):
    g, _ = random_graph(rng, 25, True, p=0.2)
    m = Model([EffectSpec("Density"), EffectSpec("Sender")])
    suite = default_gof_suite(g, m)
    names = {e.name for e in suite}
    assert {"Density", "Sender", "GWSender", "TransitiveTriangleT3",
            "AlterInTwoStar2"} <= names
    y = OutcomeVector(rng.integers(0, 2, size=25).astype(np.int8))
    report = gof(m, g, None, y, cfg=quick_cfg(g, 100))
    got = [r.effect for r in report.rows]
    assert got == sorted(got)
    assert len(got) == len(suite)


def test_gof_t_recomputable_from_batch(rng):
    g, _ = random_graph(rng, 30, False, p=0.15)
    m = Model([EffectSpec("Density"), EffectSpec("Contagion")], [-0.2, 0.3])
    y = OutcomeVector(rng.integers(0, 2, size=30).astype(np.int8))
    report = gof(m, g, None, y, suite=[EffectSpec("Density"), EffectSpec("Contagion"),
                                       EffectSpec("GWActivity")],
                 cfg=quick_cfg(g, 150, seed=5))
    for row in report.rows:
        col = report.batch.column(row.effect)
        assert row.sim_mean == pytest.approx(col.mean(), abs=1e-12)
        assert row.sim_sd == pytest.approx(col.std(ddof=1), abs=1e-12)
        if row.sim_sd > 0:
            assert row.t_ratio == pytest.approx(
                (col.mean() - row.observed) / col.std(ddof=1), abs=1e-12)


def test_gof_zero_variance_flagged(rng):
    g, _ = random_graph(rng, 20, False, p=0.2)
    m = Model([EffectSpec("Density")], [0.1])
    y = OutcomeVector(rng.integers(0, 2, size=20).astype(np.int8),
                      free=np.zeros(20, dtype=bool))
    report = gof(m, g, None, y, suite=[EffectSpec("Density")], cfg=quick_cfg(g, 50))
    row = report.row("Density")
    assert row.degenerate and row.sim_sd == 0.0


def test_degeneracy_check_passes_on_true_model(rng):
    g, _ = random_graph(rng, 50, False, p=0.15)
    m = Model([EffectSpec("Density"), EffectSpec("Contagion")], [-0.3, 0.25])
    sim = simulate(m, g, None, SamplerConfig(burn_in=30 * g.n, interval=g.n,
                                             n_samples=1, seed=11,
                                             initial_y="random:0.4", store_y=True))
    y_obs = OutcomeVector(sim.y_samples[0])
    check = degeneracy_check(m, g, None, y_obs, cfg=quick_cfg(g, 100, seed=12))
    assert check.passed
    for band in check.bands:
        assert band.lo <= band.observed <= band.hi
        assert band.hist_counts.sum() == 100


def test_degeneracy_check_fails_in_supercritical_phase(rng):
    g, _ = random_graph(rng, 50, False, p=0.15)
    # observed vector of moderate density, checked against a model whose
    # simulated outcomes saturate toward all-ones
    y_obs = OutcomeVector((rng.random(50) < 0.3).astype(np.int8))
    m = Model([EffectSpec("Density"), EffectSpec("Activity")], [1.0, 1.0])
    check = degeneracy_check(m, g, None, y_obs, cfg=quick_cfg(g, 100, seed=13))
    assert not check.passed


def test_degeneracy_zero_variance_flagged(rng):
    g, _ = random_graph(rng, 20, False, p=0.2)
    m = Model([EffectSpec("Density")], [0.0])
    y = OutcomeVector(rng.integers(0, 2, size=20).astype(np.int8),
                      free=np.zeros(20, dtype=bool))
    check = degeneracy_check(m, g, None, y, cfg=quick_cfg(g, 30))
    assert check.bands[0].degenerate
    assert check.passed  # constant batch equal to the observed value


def test_degeneracy_verdict_monotone_in_band(rng):
    for seed in range(4):
        g, _ = random_graph(rng, 40, False, p=0.15)
        m = Model([EffectSpec("Density"), EffectSpec("Contagion")], [-0.2, 0.2])
        y = OutcomeVector((rng.random(40) < 0.4).astype(np.int8))
        c95 = degeneracy_check(m, g, None, y, cfg=quick_cfg(g, 80, seed=seed), band=95.0)
        c99 = degeneracy_check(m, g, None, y, cfg=quick_cfg(g, 80, seed=seed), band=99.0)
        for b95, b99 in zip(c95.bands, c99.bands):
            if b95.passed:
                assert b99.passed


def test_attribute_degree_null_model_matches_baseline(rng):
    g, _ = random_graph(rng, 80, False, p=0.08)
    y = OutcomeVector((rng.random(80) < 0.35).astype(np.int8))
    m = Model([EffectSpec("Density")], [-0.6])
    rep = attribute_degree_gof(m, g, None, y, cfg=quick_cfg(g, 200, seed=21))
    a = rep.model_mean_degree["degree"]
    b = rep.baseline_mean_degree["degree"]
    stat = ks_2samp(a[~np.isnan(a)], b[~np.isnan(b)])
    assert stat.pvalue > 0.01
    # baseline generator hits its target density within 3 standard errors
    p = rep.model_mean_density
    se = math.sqrt(p * (1 - p) / (200 * g.n))
    assert abs(rep.baseline_realized_density - p) < 3 * se


def test_attribute_degree_csv(tmp_path, rng):
    g, _ = random_graph(rng, 30, True, p=0.15)
    y = OutcomeVector((rng.random(30) < 0.4).astype(np.int8))
    m = Model([EffectSpec("Density"), EffectSpec("GWSender")], [-0.4, 1.0])
    rep = attribute_degree_gof(m, g, None, y, cfg=quick_cfg(g, 40, seed=2))
    assert rep.kinds == ["in", "out"]
    dist, summ = tmp_path / "d.csv", tmp_path / "s.csv"
    rep.write_dist_csv(dist)
    rep.write_summary_csv(summ)
    lines = dist.read_text().splitlines()
    assert lines[0] == "source,sample,kind,degree,count"
    assert len(lines) == 1 + 2 * 2 * 40 * rep.bins.size
    assert summ.read_text().splitlines()[0] == \
        "kind,observed_mean,alaam_mean,random_mean,alaam_mean_density"


def test_gof_csv(tmp_path, rng):
    g, _ = random_graph(rng, 20, False, p=0.2)
    m = Model([EffectSpec("Density")], [0.0])
    y = OutcomeVector(rng.integers(0, 2, size=20).astype(np.int8))
    report = gof(m, g, None, y, suite=[EffectSpec("Density"), EffectSpec("Contagion")],
                 cfg=quick_cfg(g, 50))
    p = tmp_path / "gof.csv"
    report.write_csv(p)
    assert p.read_text().splitlines()[0] == \
        "effect,observed,sim_mean,sim_sd,t_ratio,adequate,degenerate"
