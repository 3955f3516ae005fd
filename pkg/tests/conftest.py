import numpy as np
import pytest

from alaam import CovariateTable, EffectSpec, Graph
from alaam.effects import _CATALOGUE, LN2


def random_graph(rng, n, directed, p=0.3):
    """Random graph plus its dense adjacency matrix (for the naive oracle)."""
    A = (rng.random((n, n)) < p).astype(np.int64)
    np.fill_diagonal(A, 0)
    if not directed:
        A = np.triu(A, 1)
        A = A + A.T
    src, dst = np.nonzero(A if directed else np.triu(A, 1))
    if src.size == 0:  # keep at least one edge so the graph is non-trivial
        A[0, 1] = 1
        if not directed:
            A[1, 0] = 1
        src, dst = np.nonzero(A if directed else np.triu(A, 1))
    g = Graph(np.stack([src, dst], axis=1), n, directed)
    return g, A


def random_covariates(rng, n):
    return CovariateTable(n, {
        "age": ("continuous", rng.normal(30, 8, size=n)),
        "flag": ("binary", rng.integers(0, 2, size=n)),
        "grp": ("categorical", rng.integers(0, 4, size=n)),
    })


def effects_for(directed, with_covariates=True):
    """Every catalogue effect valid for the directionality."""
    out = []
    for kind, (direction, arg) in _CATALOGUE.items():
        if direction == "directed" and not directed:
            continue
        if direction == "undirected" and directed:
            continue
        if arg == "alpha":
            out.append(EffectSpec(kind, alpha=LN2))
        elif arg == "continuous":
            if with_covariates:
                out.append(EffectSpec(kind, column="age"))
        elif arg == "categorical":
            if with_covariates:
                out.append(EffectSpec(kind, column="grp"))
        else:
            out.append(EffectSpec(kind))
    return out


def naive_kwargs(e, w):
    kw = {}
    if e.alpha is not None:
        kw["alpha"] = e.alpha
    if e.kind == "ContinuousCovariate":
        kw["w"] = w.values(e.column)
    elif e.column is not None:
        kw["c"] = w.values(e.column)
    return kw


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))
