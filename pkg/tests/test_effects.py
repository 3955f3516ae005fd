import math

import numpy as np
import pytest

from alaam import EffectSpec, Model, OutcomeVector, change_stat, statistic, statistic_vector
from alaam.effects import (BoundaryStatisticError, EffectDirectionError, LN2,
                           UnknownEffectError, check_inside_range, parse_effect,
                           statistic_range)
from alaam.graph import CovariateTable, Graph
from conftest import effects_for, naive_kwargs, random_covariates, random_graph
from naive import naive_change, naive_statistic

COUNT_KINDS = {  # integer-valued change statistics
    "Density", "Activity", "Sender", "Receiver", "Contagion", "Reciprocity",
    "ContagionReciprocity", "EgoInTwoStar", "EgoOutTwoStar", "EgoInThreeStar",
    "EgoOutThreeStar", "MixedTwoStar", "MixedTwoStarSource", "MixedTwoStarSink",
    "TransitiveTriangleT1", "TransitiveTriangleT3", "TransitiveTriangleD1",
    "TransitiveTriangleU1", "CyclicTriangleC1", "CyclicTriangleC3",
    "AlterInTwoStar2", "AlterOutTwoStar2", "SenderMatch", "ReceiverMatch",
    "ReciprocityMatch",
}


def star_with_center_degree(d):
    """Star graph whose center (node 0) has degree d, plus one isolated node."""
    n = d + 2
    edges = np.array([[0, i] for i in range(1, d + 1)], dtype=np.int64).reshape(-1, 2)
    if d == 0:
        edges = np.array([[1, 2]], dtype=np.int64)  # keep the graph non-empty
        return Graph(edges, 3, directed=False), 0
    return Graph(edges, n, directed=False), 0


def test_gw_activity_closed_form_exact():
    for d in range(0, 31):
        g, center = star_with_center_degree(d)
        delta = change_stat(EffectSpec("GWActivity"), g, None,
                            np.zeros(g.n, dtype=np.int8), center)
        assert abs(delta - 2.0 ** (-d)) <= 1e-12


def test_gw_sender_receiver_closed_form_exact():
    for d in range(0, 31):
        n = max(d + 1, 3)
        edges = [[0, i] for i in range(1, d + 1)] or [[1, 2]]
        g = Graph(np.array(edges, dtype=np.int64), n, directed=True)
        y0 = np.zeros(n, dtype=np.int8)
        assert abs(change_stat(EffectSpec("GWSender"), g, None, y0, 0)
                   - 2.0 ** (-g.deg_out[0])) <= 1e-12
        assert abs(change_stat(EffectSpec("GWReceiver"), g, None, y0, 0)
                   - 2.0 ** (-g.deg_in[0])) <= 1e-12


def test_activity_change_is_degree():
    g, center = star_with_center_degree(7)
    assert change_stat(EffectSpec("Activity"), g, None,
                       np.zeros(g.n, dtype=np.int8), center) == 7.0


def test_contagion_triangle():
    g = Graph(np.array([[0, 1], [1, 2], [0, 2]]), 3, directed=False)
    y = np.array([0, 1, 1], dtype=np.int8)
    assert change_stat(EffectSpec("Contagion"), g, None, y, 0) == 2.0


def test_ego_in_two_star_binomial():
    edges = np.array([[i, 0] for i in range(1, 5)])
    g = Graph(edges, 5, directed=True)
    assert change_stat(EffectSpec("EgoInTwoStar"), g, None,
                       np.zeros(5, dtype=np.int8), 0) == 6.0


def test_transitive_t1_broker():
    # transitive triad j -> i -> k with bypass j -> k; broker is i = 1
    g = Graph(np.array([[0, 1], [1, 2], [0, 2]]), 3, directed=True)
    y0 = np.zeros(3, dtype=np.int8)
    assert change_stat(EffectSpec("TransitiveTriangleT1"), g, None, y0, 1) == 1.0
    # frozen from the brute-force triad enumeration oracle
    A = np.zeros((3, 3), dtype=int)
    A[0, 1] = A[1, 2] = A[0, 2] = 1
    assert naive_change("TransitiveTriangleT1", A, y0, 1, directed=True) == 1.0
    assert change_stat(EffectSpec("TransitiveTriangleD1"), g, None, y0, 0) == 1.0
    assert change_stat(EffectSpec("TransitiveTriangleU1"), g, None, y0, 2) == 1.0


def test_contagion_reciprocity_mutual_dyad():
    g = Graph(np.array([[0, 1], [1, 0]]), 2, directed=True)
    m = Model([EffectSpec("ContagionReciprocity")])
    y = OutcomeVector([1, 1])
    assert statistic(m.effects[0], g, None, y) == 1.0
    # build-up over both add orders must agree
    assert statistic_vector(m, g, None, y, order=np.array([0, 1]))[0] == 1.0
    assert statistic_vector(m, g, None, y, order=np.array([1, 0]))[0] == 1.0


def test_density_statistic():
    g = Graph(np.array([[0, 1]]), 4, directed=False)
    assert statistic(EffectSpec("Density"), g, None, np.array([1, 0, 1, 1])) == 3.0


def test_gwactivity_path_value():
    g = Graph(np.array([[0, 1], [1, 2]]), 3, directed=False)
    assert statistic(EffectSpec("GWActivity"), g, None,
                     np.ones(3, dtype=np.int8)) == pytest.approx(1.25, abs=1e-12)


def test_statistic_vector_star():
    edges = np.array([[0, i] for i in range(1, 5)])
    g = Graph(edges, 5, directed=False)
    m = Model([EffectSpec("Density"), EffectSpec("Activity")])
    y = OutcomeVector([1, 0, 0, 0, 0])
    assert list(statistic_vector(m, g, None, y)) == [1.0, 4.0]
    assert list(statistic_vector(m, g, None, OutcomeVector.zeros(5))) == [0.0, 0.0]


def test_statistics_match_naive_oracle(rng):
    for directed in (False, True):
        for _ in range(6):
            n = int(rng.integers(6, 16))
            g, A = random_graph(rng, n, directed, p=0.3)
            w = random_covariates(rng, n)
            y = rng.integers(0, 2, size=n).astype(np.int8)
            for e in effects_for(directed):
                got = statistic(e, g, w, y)
                want = naive_statistic(e.kind, A, y, directed, **naive_kwargs(e, w))
                assert got == pytest.approx(want, abs=1e-9), e.name


def test_change_stats_match_naive_oracle(rng):
    for directed in (False, True):
        for _ in range(6):
            n = int(rng.integers(6, 16))
            g, A = random_graph(rng, n, directed, p=0.3)
            w = random_covariates(rng, n)
            y = rng.integers(0, 2, size=n).astype(np.int8)
            i = int(rng.integers(n))
            for e in effects_for(directed):
                got = change_stat(e, g, w, y, i)
                want = naive_change(e.kind, A, y, i, directed, **naive_kwargs(e, w))
                assert got == pytest.approx(want, abs=1e-9), e.name


def test_change_equals_statistic_difference(rng):
    for directed in (False, True):
        for _ in range(8):
            n = int(rng.integers(5, 18))
            g, _ = random_graph(rng, n, directed, p=0.35)
            w = random_covariates(rng, n)
            y = rng.integers(0, 2, size=n).astype(np.int8)
            i = int(rng.integers(n))
            y1, y0 = y.copy(), y.copy()
            y1[i], y0[i] = 1, 0
            for e in effects_for(directed):
                diff = statistic(e, g, w, y1) - statistic(e, g, w, y0)
                assert abs(diff - change_stat(e, g, w, y, i)) < 1e-10, e.name


def test_buildup_order_independent(rng):
    for directed in (False, True):
        n = 14
        g, _ = random_graph(rng, n, directed, p=0.35)
        w = random_covariates(rng, n)
        m = Model(effects_for(directed))
        y = OutcomeVector(rng.integers(0, 2, size=n).astype(np.int8))
        ones = np.flatnonzero(y.values)
        z1 = statistic_vector(m, g, w, y, order=rng.permutation(ones))
        z2 = statistic_vector(m, g, w, y, order=rng.permutation(ones))
        closed = np.array([statistic(e, g, w, y) for e in m.effects])
        assert np.max(np.abs(z1 - z2)) < 1e-10
        assert np.max(np.abs(z1 - closed)) < 1e-10


def test_gw_change_positive_nonincreasing():
    deltas = []
    for d in range(0, 25):
        g, center = star_with_center_degree(d)
        deltas.append(change_stat(EffectSpec("GWActivity", alpha=0.3), g, None,
                                  np.zeros(g.n, dtype=np.int8), center))
    assert all(d > 0 for d in deltas)
    assert all(a >= b for a, b in zip(deltas, deltas[1:]))


def test_gw_alpha_to_zero_approaches_density(rng):
    g, _ = random_graph(rng, 12, False, p=0.3)
    y = rng.integers(0, 2, size=12).astype(np.int8)
    dens = statistic(EffectSpec("Density"), g, None, y)
    val = statistic(EffectSpec("GWActivity", alpha=1e-9), g, None, y)
    assert val == pytest.approx(dens, rel=1e-6)


def test_symmetric_directed_matches_undirected(rng):
    g, A = random_graph(rng, 15, False, p=0.3)
    src, dst = np.nonzero(A)  # both arc orientations of every edge
    gd = Graph(np.stack([src, dst], axis=1), 15, directed=True)
    y = rng.integers(0, 2, size=15).astype(np.int8)
    act = statistic(EffectSpec("Activity"), g, None, y)
    gwact = statistic(EffectSpec("GWActivity"), g, None, y)
    assert statistic(EffectSpec("Sender"), gd, None, y) == act
    assert statistic(EffectSpec("Receiver"), gd, None, y) == act
    assert statistic(EffectSpec("GWSender"), gd, None, y) == pytest.approx(gwact, abs=1e-12)
    assert statistic(EffectSpec("GWReceiver"), gd, None, y) == pytest.approx(gwact, abs=1e-12)


def test_count_changes_are_nonnegative_integers(rng):
    for directed in (False, True):
        g, _ = random_graph(rng, 12, directed, p=0.4)
        w = random_covariates(rng, 12)
        y = rng.integers(0, 2, size=12).astype(np.int8)
        for e in effects_for(directed):
            if e.kind not in COUNT_KINDS:
                continue
            d = change_stat(e, g, w, y, int(rng.integers(12)))
            assert d >= 0 and d == int(d), e.name


def test_direction_validation(rng):
    gu, _ = random_graph(rng, 8, False)
    gd, _ = random_graph(rng, 8, True)
    with pytest.raises(EffectDirectionError):
        statistic(EffectSpec("Sender"), gu, None, np.zeros(8, dtype=np.int8))
    with pytest.raises(EffectDirectionError):
        statistic(EffectSpec("Activity"), gd, None, np.zeros(8, dtype=np.int8))


def test_covariate_validation(rng):
    g, _ = random_graph(rng, 8, True)
    w = CovariateTable(8, {"age": ("continuous", np.arange(8.0))})
    with pytest.raises(ValueError, match="not available"):
        statistic(EffectSpec("SenderMatch", column="class"), g, w, np.zeros(8, dtype=np.int8))
    with pytest.raises(ValueError, match="categorical"):
        statistic(EffectSpec("SenderMatch", column="age"), g, w, np.zeros(8, dtype=np.int8))


def test_effect_spec_validation():
    with pytest.raises(UnknownEffectError):
        EffectSpec("Frobnicate")
    with pytest.raises(ValueError, match="alpha"):
        EffectSpec("GWActivity", alpha=-1.0)
    with pytest.raises(ValueError, match="column"):
        EffectSpec("SenderMatch")
    assert EffectSpec("GWActivity").alpha == pytest.approx(LN2)


def test_parse_effect_grammar():
    assert parse_effect("GWSender").name == "GWSender"
    assert parse_effect("GWSender:0.5").alpha == 0.5
    assert parse_effect("SenderMatch:class").column == "class"
    assert parse_effect("oOc:age").kind == "ContinuousCovariate"
    w = CovariateTable(2, {"age": ("continuous", [1.0, 2.0])})
    assert parse_effect("age", w).kind == "ContinuousCovariate"
    with pytest.raises(UnknownEffectError, match="valid kinds"):
        parse_effect("NotAnEffect")


def test_model_validation():
    with pytest.raises(ValueError, match="duplicate"):
        Model([EffectSpec("Density"), EffectSpec("Density")])
    with pytest.raises(ValueError, match="entries"):
        Model([EffectSpec("Density")], [1.0, 2.0])


def test_statistic_range_and_boundary(rng):
    g, _ = random_graph(rng, 10, False, p=0.3)
    w = CovariateTable(10, {"age": ("continuous", rng.normal(size=10))})
    m = Model([EffectSpec("Density"), EffectSpec("ContinuousCovariate", column="age")])
    lo, hi = statistic_range(m.effects[0], g, w)
    assert (lo, hi) == (0.0, 10.0)
    vals = w.values("age")
    lo2, hi2 = statistic_range(m.effects[1], g, w)
    assert lo2 == pytest.approx(vals[vals < 0].sum())
    assert hi2 == pytest.approx(vals[vals > 0].sum())
    with pytest.raises(BoundaryStatisticError, match="Density"):
        check_inside_range(m, g, w, np.array([10.0, 0.0]))


def test_statistic_vector_reproducible(rng):
    g, _ = random_graph(rng, 30, True, p=0.2)
    w = random_covariates(rng, 30)
    m = Model(effects_for(True))
    y = OutcomeVector(rng.integers(0, 2, size=30).astype(np.int8))
    z1 = statistic_vector(m, g, w, y)
    z2 = statistic_vector(m, g, w, y)
    assert np.array_equal(z1, z2)
    assert np.isfinite(z1).all()
