"""Effect catalogue: network-attribute statistics and their change statistics.

Every effect is a statistic z(y) of the outcome vector y given the fixed
network and covariates, together with the change statistic delta_i(y) =
z(y with y_i=1) - z(y with y_i=0). Change statistics are always evaluated
with y_i taken as 0; a 1->0 flip uses -delta. Most effects depend on y only
through node i itself ("static" effects, constant per node given the graph);
the rest also count attribute-bearing nodes in i's neighborhood.

Statistics here are closed forms; ``statistic_vector`` is the independent
build-up evaluation that adds attribute nodes one at a time and accumulates
change statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph import CovariateTable, Graph, OutcomeVector

LN2 = math.log(2.0)


class UnknownEffectError(ValueError):
    """Effect name not in the catalogue."""


class BoundaryStatisticError(ValueError):
    """Observed statistic sits on its attainable boundary: no MLE exists."""


class EffectDirectionError(ValueError):
    """Effect used on a graph of the wrong directionality."""


# kind -> (directionality, argument kind)
_CATALOGUE: dict[str, tuple[str, str | None]] = {
    "Density": ("both", None),
    "Activity": ("undirected", None),
    "Contagion": ("both", None),
    "ContinuousCovariate": ("both", "continuous"),
    "GWActivity": ("undirected", "alpha"),
    "Sender": ("directed", None),
    "Receiver": ("directed", None),
    "GWSender": ("directed", "alpha"),
    "GWReceiver": ("directed", "alpha"),
    "Reciprocity": ("directed", None),
    "ContagionReciprocity": ("directed", None),
    "EgoInTwoStar": ("directed", None),
    "EgoOutTwoStar": ("directed", None),
    "EgoInThreeStar": ("directed", None),
    "EgoOutThreeStar": ("directed", None),
    "MixedTwoStar": ("directed", None),
    "MixedTwoStarSource": ("directed", None),
    "MixedTwoStarSink": ("directed", None),
    "TransitiveTriangleT1": ("directed", None),
    "TransitiveTriangleT3": ("directed", None),
    "TransitiveTriangleD1": ("directed", None),
    "TransitiveTriangleU1": ("directed", None),
    "CyclicTriangleC1": ("directed", None),
    "CyclicTriangleC3": ("directed", None),
    "AlterInTwoStar2": ("directed", None),
    "AlterOutTwoStar2": ("directed", None),
    "SenderMatch": ("directed", "categorical"),
    "ReceiverMatch": ("directed", "categorical"),
    "ReciprocityMatch": ("directed", "categorical"),
}

EFFECT_KINDS = tuple(_CATALOGUE)

# effects whose change statistic depends on other nodes' outcomes
DYNAMIC_KINDS = frozenset({
    "Contagion", "ContagionReciprocity", "TransitiveTriangleT3",
    "CyclicTriangleC3", "AlterInTwoStar2", "AlterOutTwoStar2",
})


@dataclass(frozen=True)
class EffectSpec:
    """One model effect: a kind plus its decay or covariate argument."""

    kind: str
    alpha: float | None = None
    column: str | None = None

    def __post_init__(self):
        if self.kind not in _CATALOGUE:
            raise UnknownEffectError(
                f"unknown effect {self.kind!r}; valid kinds: {', '.join(EFFECT_KINDS)}")
        _, arg = _CATALOGUE[self.kind]
        if arg == "alpha":
            if self.alpha is None:
                object.__setattr__(self, "alpha", LN2)
            if not self.alpha > 0:
                raise ValueError(f"{self.kind}: decay alpha must be > 0, got {self.alpha}")
        elif self.alpha is not None:
            raise ValueError(f"{self.kind} takes no decay argument")
        if arg in ("continuous", "categorical"):
            if not self.column:
                raise ValueError(f"{self.kind} requires a covariate column name")
        elif self.column is not None:
            raise ValueError(f"{self.kind} takes no covariate column")

    @property
    def name(self) -> str:
        """Canonical display/CLI name, e.g. GWSender, SenderMatch:class, oOc:age."""
        if self.kind == "ContinuousCovariate":
            return f"oOc:{self.column}"
        if self.column is not None:
            return f"{self.kind}:{self.column}"
        if self.alpha is not None and abs(self.alpha - LN2) > 1e-12:
            return f"{self.kind}:{self.alpha:g}"
        return self.kind

    def validate(self, g: Graph, w: CovariateTable | None) -> None:
        direction, arg = _CATALOGUE[self.kind]
        if direction == "directed" and not g.directed:
            raise EffectDirectionError(f"{self.name} requires a directed graph")
        if direction == "undirected" and g.directed:
            raise EffectDirectionError(f"{self.name} requires an undirected graph")
        if arg in ("continuous", "categorical"):
            if w is None or self.column not in w:
                raise ValueError(f"{self.name}: covariate column {self.column!r} not available")
            if w.kind(self.column) != arg:
                raise ValueError(
                    f"{self.name}: column {self.column!r} must be {arg}, is {w.kind(self.column)}")

    def __str__(self) -> str:
        return self.name


def parse_effect(text: str, covariates: CovariateTable | None = None) -> EffectSpec:
    """Parse a CLI/config effect name into an EffectSpec.

    Grammar: ``Kind``, ``Kind:arg`` where arg is the decay for GW kinds and
    the column for covariate kinds; ``oOc:age`` or a bare continuous column
    name gives the covariate effect.
    """
    head, _, arg = text.strip().partition(":")
    if head == "oOc":
        return EffectSpec("ContinuousCovariate", column=arg)
    if head in _CATALOGUE:
        _, argkind = _CATALOGUE[head]
        if argkind == "alpha":
            return EffectSpec(head, alpha=float(arg) if arg else None)
        if argkind in ("continuous", "categorical"):
            return EffectSpec(head, column=arg)
        if arg:
            raise UnknownEffectError(f"{head} takes no argument, got {text!r}")
        return EffectSpec(head)
    if covariates is not None and head in covariates and covariates.kind(head) == "continuous":
        return EffectSpec("ContinuousCovariate", column=head)
    raise UnknownEffectError(
        f"unknown effect {text!r}; valid kinds: {', '.join(EFFECT_KINDS)} "
        "(or a continuous covariate column name)")


@dataclass(frozen=True, eq=False)
class Model:
    """Ordered effect list with its parameter vector."""

    effects: tuple[EffectSpec, ...]
    theta: np.ndarray

    def __init__(self, effects: Sequence[EffectSpec], theta=None):
        effects = tuple(effects)
        if len(set(effects)) != len(effects):
            raise ValueError("duplicate effect in model")
        if theta is None:
            theta = np.zeros(len(effects))
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (len(effects),):
            raise ValueError(f"theta has {theta.size} entries for {len(effects)} effects")
        object.__setattr__(self, "effects", effects)
        object.__setattr__(self, "theta", theta)

    @property
    def k(self) -> int:
        return len(self.effects)

    @property
    def names(self) -> list[str]:
        return [e.name for e in self.effects]

    def validate(self, g: Graph, w: CovariateTable | None = None) -> None:
        for e in self.effects:
            e.validate(g, w)

    def with_theta(self, theta) -> "Model":
        return Model(self.effects, np.asarray(theta, dtype=np.float64).copy())

    def index_of(self, effect: EffectSpec) -> int:
        return self.effects.index(effect)

    def __str__(self) -> str:
        return ", ".join(f"{e.name}={t:g}" for e, t in zip(self.effects, self.theta))


# --- helpers ----------------------------------------------------------------


def _row_sums(indptr: np.ndarray, indices: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Per-row sums of values[indices] for a CSR structure."""
    c = np.concatenate([[0.0], np.cumsum(values[indices], dtype=np.float64)])
    return c[indptr[1:]] - c[indptr[:-1]]


def _count_sorted_common(a: np.ndarray, b: np.ndarray) -> int:
    """|a intersect b| for sorted unique integer arrays."""
    if a.size > b.size:
        a, b = b, a
    if a.size == 0:
        return 0
    pos = np.searchsorted(b, a)
    ok = pos < b.size
    return int((b[pos[ok]] == a[ok]).sum())


def _ones_in(y: np.ndarray, nodes: np.ndarray) -> int:
    return int(y[nodes].sum())


def node_contrib(e: EffectSpec, g: Graph, w: CovariateTable | None) -> np.ndarray | None:
    """Per-node change statistics for static effects, None for dynamic ones.

    For every static effect z(y) = sum_i y_i * contrib_i, so this vector is
    both the change statistic and the coefficient of the closed form.
    """
    e.validate(g, w)
    kind = e.kind
    if kind in DYNAMIC_KINDS:
        return None
    n = g.n
    d_in = g.deg_in.astype(np.float64)
    d_out = g.deg_out.astype(np.float64)
    if kind == "Density":
        return np.ones(n)
    if kind == "Activity":
        return g.deg.astype(np.float64)
    if kind == "GWActivity":
        return np.exp(-e.alpha * g.deg)
    if kind == "Sender":
        return d_out
    if kind == "Receiver":
        return d_in
    if kind == "GWSender":
        return np.exp(-e.alpha * g.deg_out)
    if kind == "GWReceiver":
        return np.exp(-e.alpha * g.deg_in)
    if kind == "Reciprocity":
        return g.mut_degree.astype(np.float64)
    if kind == "EgoInTwoStar":
        return d_in * (d_in - 1) / 2.0
    if kind == "EgoOutTwoStar":
        return d_out * (d_out - 1) / 2.0
    if kind == "EgoInThreeStar":
        return d_in * (d_in - 1) * (d_in - 2) / 6.0
    if kind == "EgoOutThreeStar":
        return d_out * (d_out - 1) * (d_out - 2) / 6.0
    if kind == "MixedTwoStar":
        # two-paths j->i->k need distinct endpoints, so mutual pairs drop out
        return d_in * d_out - g.mut_degree
    if kind == "MixedTwoStarSource":
        return _row_sums(g.out_indptr, g.out_indices, d_out) - g.mut_degree
    if kind == "MixedTwoStarSink":
        return _row_sums(g.in_indptr, g.in_indices, d_in) - g.mut_degree
    if kind == "TransitiveTriangleT1":
        out = np.zeros(n)
        for i in range(n):
            tgt = g.out_neighbors(i)
            out[i] = sum(_count_sorted_common(g.out_neighbors(j), tgt)
                         for j in g.in_neighbors(i))
        return out
    if kind == "TransitiveTriangleD1":
        out = np.zeros(n)
        for i in range(n):
            tgt = g.out_neighbors(i)
            out[i] = sum(_count_sorted_common(g.out_neighbors(j), tgt) for j in tgt)
        return out
    if kind == "TransitiveTriangleU1":
        out = np.zeros(n)
        for i in range(n):
            src = g.in_neighbors(i)
            out[i] = sum(_count_sorted_common(g.out_neighbors(j), src) for j in src)
        return out
    if kind == "CyclicTriangleC1":
        out = np.zeros(n)
        for i in range(n):
            back = g.in_neighbors(i)
            out[i] = sum(_count_sorted_common(g.out_neighbors(j), back)
                         for j in g.out_neighbors(i))
        return out
    if kind == "ContinuousCovariate":
        return w.values(e.column).astype(np.float64)
    if kind in ("SenderMatch", "ReceiverMatch", "ReciprocityMatch"):
        c = w.values(e.column)
        indptr, indices = {
            "SenderMatch": (g.out_indptr, g.out_indices),
            "ReceiverMatch": (g.in_indptr, g.in_indices),
            "ReciprocityMatch": (g.mut_indptr, g.mut_indices),
        }[kind]
        src = np.repeat(np.arange(n), np.diff(indptr))
        match = (c[indices] == c[src]).astype(np.float64)
        cum = np.concatenate([[0.0], np.cumsum(match)])
        return cum[indptr[1:]] - cum[indptr[:-1]]
    raise AssertionError(f"unhandled static kind {kind}")


def change_stat(e: EffectSpec, g: Graph, w: CovariateTable | None,
                y: OutcomeVector | np.ndarray, i: int) -> float:
    """Change statistic at node i, with y_i treated as 0.

    Returns z(y with y_i=1) - z(y with y_i=0); the caller negates it for a
    1->0 flip.
    """
    e.validate(g, w)
    yv = y.values if isinstance(y, OutcomeVector) else np.asarray(y)
    kind = e.kind

    if kind == "Density":
        return 1.0
    if kind == "Activity":
        return float(g.deg[i])
    if kind == "GWActivity":
        return math.exp(-e.alpha * g.deg[i])
    if kind == "Sender":
        return float(g.deg_out[i])
    if kind == "Receiver":
        return float(g.deg_in[i])
    if kind == "GWSender":
        return math.exp(-e.alpha * g.deg_out[i])
    if kind == "GWReceiver":
        return math.exp(-e.alpha * g.deg_in[i])
    if kind == "Reciprocity":
        return float(g.mut_degree[i])
    if kind == "EgoInTwoStar":
        return float(math.comb(int(g.deg_in[i]), 2))
    if kind == "EgoOutTwoStar":
        return float(math.comb(int(g.deg_out[i]), 2))
    if kind == "EgoInThreeStar":
        return float(math.comb(int(g.deg_in[i]), 3))
    if kind == "EgoOutThreeStar":
        return float(math.comb(int(g.deg_out[i]), 3))
    if kind == "MixedTwoStar":
        return float(g.deg_in[i] * g.deg_out[i] - g.mut_degree[i])
    if kind == "MixedTwoStarSource":
        return float(sum(g.deg_out[v] - g.has_edge(v, i) for v in g.out_neighbors(i)))
    if kind == "MixedTwoStarSink":
        return float(sum(g.deg_in[v] - g.has_edge(i, v) for v in g.in_neighbors(i)))
    if kind == "TransitiveTriangleT1":
        tgt = g.out_neighbors(i)
        return float(sum(_count_sorted_common(g.out_neighbors(j), tgt)
                         for j in g.in_neighbors(i)))
    if kind == "TransitiveTriangleD1":
        tgt = g.out_neighbors(i)
        return float(sum(_count_sorted_common(g.out_neighbors(j), tgt) for j in tgt))
    if kind == "TransitiveTriangleU1":
        src = g.in_neighbors(i)
        return float(sum(_count_sorted_common(g.out_neighbors(j), src) for j in src))
    if kind == "CyclicTriangleC1":
        back = g.in_neighbors(i)
        return float(sum(_count_sorted_common(g.out_neighbors(j), back)
                         for j in g.out_neighbors(i)))
    if kind == "ContinuousCovariate":
        return float(w.values(e.column)[i])
    if kind == "SenderMatch":
        c = w.values(e.column)
        return float(np.count_nonzero(c[g.out_neighbors(i)] == c[i]))
    if kind == "ReceiverMatch":
        c = w.values(e.column)
        return float(np.count_nonzero(c[g.in_neighbors(i)] == c[i]))
    if kind == "ReciprocityMatch":
        c = w.values(e.column)
        return float(np.count_nonzero(c[g.mutual_neighbors(i)] == c[i]))

    # dynamic effects: count attribute-bearing nodes around i
    if kind == "Contagion":
        count = _ones_in(yv, g.out_neighbors(i))
        if g.directed:
            count += _ones_in(yv, g.in_neighbors(i))
        return float(count)
    if kind == "ContagionReciprocity":
        return float(_ones_in(yv, g.mutual_neighbors(i)))
    if kind == "TransitiveTriangleT3":
        count = 0
        out_i, in_i = g.out_neighbors(i), g.in_neighbors(i)
        for b in out_i:  # i the source: i->b, b->c, i->c
            if yv[b]:
                common = np.intersect1d(g.out_neighbors(b), out_i, assume_unique=True)
                count += _ones_in(yv, common)
        for a in in_i:  # i the middle: a->i, i->c, a->c
            if yv[a]:
                common = np.intersect1d(g.out_neighbors(a), out_i, assume_unique=True)
                count += _ones_in(yv, common)
        for b in in_i:  # i the sink: a->b, b->i, a->i
            if yv[b]:
                common = np.intersect1d(g.in_neighbors(b), in_i, assume_unique=True)
                count += _ones_in(yv, common)
        return float(count)
    if kind == "CyclicTriangleC3":
        count = 0
        for j in g.out_neighbors(i):  # cycle i->j->k->i
            if yv[j]:
                for k in g.out_neighbors(j):
                    if yv[k] and g.has_edge(k, i):
                        count += 1
        return float(count)
    if kind == "AlterInTwoStar2":
        # peers k != i with k->v and y_k = 1; i is always among v's
        # in-neighbors here, and its own outcome counts as 0
        count = 0
        for v in g.out_neighbors(i):
            count += _ones_in(yv, g.in_neighbors(v)) - int(yv[i])
        return float(count)
    if kind == "AlterOutTwoStar2":
        count = 0
        for v in g.in_neighbors(i):
            count += _ones_in(yv, g.out_neighbors(v)) - int(yv[i])
        return float(count)
    raise AssertionError(f"unhandled kind {kind}")


def statistic(e: EffectSpec, g: Graph, w: CovariateTable | None,
              y: OutcomeVector | np.ndarray) -> float:
    """Closed-form statistic z(y) for one effect."""
    e.validate(g, w)
    yv = (y.values if isinstance(y, OutcomeVector) else np.asarray(y)).astype(np.float64)
    kind = e.kind

    contrib = node_contrib(e, g, w)
    if contrib is not None:
        return float(contrib @ yv)

    if kind == "Contagion":
        ties = float(yv @ _row_sums(g.out_indptr, g.out_indices, yv))
        return ties if g.directed else ties / 2.0
    if kind == "ContagionReciprocity":
        return float(yv @ _row_sums(g.mut_indptr, g.mut_indices, yv)) / 2.0
    if kind == "TransitiveTriangleT3":
        count = 0
        for a in np.flatnonzero(yv):
            out_a = g.out_neighbors(a)
            for b in out_a:
                if yv[b]:
                    common = np.intersect1d(g.out_neighbors(b), out_a, assume_unique=True)
                    count += _ones_in(yv, common)
        return float(count)
    if kind == "CyclicTriangleC3":
        count = 0
        for a in np.flatnonzero(yv):
            for b in g.out_neighbors(a):
                if b > a and yv[b]:
                    for c in g.out_neighbors(b):
                        if c > a and yv[c] and g.has_edge(c, a):
                            count += 1
        return float(count)
    if kind == "AlterInTwoStar2":
        s = _row_sums(g.in_indptr, g.in_indices, yv)
        return float((s * (s - 1) / 2.0).sum())
    if kind == "AlterOutTwoStar2":
        s = _row_sums(g.out_indptr, g.out_indices, yv)
        return float((s * (s - 1) / 2.0).sum())
    raise AssertionError(f"unhandled kind {kind}")


def statistic_range(e: EffectSpec, g: Graph, w: CovariateTable | None) -> tuple[float, float]:
    """Attainable [min, max] of one statistic over fully free outcome vectors.

    Every effect except the continuous covariate has non-negative change
    statistics, so its statistic is monotone in the attribute set: the range
    runs from the empty vector (0) to the all-ones vector. The covariate
    effect ranges over the subset sums of its column.
    """
    if e.kind == "ContinuousCovariate":
        vals = w.values(e.column)
        return float(np.minimum(vals, 0).sum()), float(np.maximum(vals, 0).sum())
    ones = np.ones(g.n, dtype=np.int8)
    return 0.0, statistic(e, g, w, ones)


def check_inside_range(m: Model, g: Graph, w: CovariateTable | None,
                       z_obs: np.ndarray) -> None:
    """Raise BoundaryStatisticError unless every observed statistic is strictly
    inside its attainable range (a necessary condition for the MLE to exist)."""
    for e, z in zip(m.effects, z_obs):
        lo, hi = statistic_range(e, g, w)
        if not (lo < z < hi):
            raise BoundaryStatisticError(
                f"observed {e.name} = {z:g} on the attainable boundary [{lo:g}, {hi:g}]; "
                "maximum likelihood estimate does not exist")


def statistic_vector(m: Model, g: Graph, w: CovariateTable | None,
                     y: OutcomeVector | np.ndarray,
                     order: np.ndarray | None = None) -> np.ndarray:
    """All model statistics at y, by build-up over attribute nodes.

    Starts from the empty outcome vector and adds attribute nodes one at a
    time, accumulating change statistics; any addition order gives the same
    result because each delta is a set-function difference.
    """
    m.validate(g, w)
    yv = y.values if isinstance(y, OutcomeVector) else np.asarray(y, dtype=np.int8)
    ones = np.flatnonzero(yv)
    if order is not None:
        ones = np.asarray(order)
    z = np.zeros(m.k)
    partial = np.zeros(g.n, dtype=np.int8)
    for i in ones:
        for k, e in enumerate(m.effects):
            z[k] += change_stat(e, g, w, partial, int(i))
        partial[i] = 1
    return z
