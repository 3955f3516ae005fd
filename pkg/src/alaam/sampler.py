"""MCMC simulation of outcome vectors at fixed parameters.

Single-flip Metropolis with uniform proposals over free nodes. Statistics
are maintained incrementally from change statistics and resynchronized
against the closed forms every ``resync_every`` retained samples; any
disagreement beyond 1e-6 is a kernel bug and raises immediately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _chain
from .effects import EffectSpec, Model, change_stat, node_contrib, statistic
from .graph import CovariateTable, Graph, OutcomeVector


class KernelInconsistencyError(RuntimeError):
    """Incremental statistics drifted from the closed forms."""


@dataclass(frozen=True)
class SamplerConfig:
    burn_in: int = 0
    interval: int = 1
    n_samples: int = 1
    seed: int = 0
    initial_y: str = "observed"  # "observed", "zeros", "random" or "random:p"
    store_y: bool = False
    resync_every: int = 100

    def __post_init__(self):
        if self.burn_in < 0 or self.interval < 1 or self.n_samples < 1:
            raise ValueError("need burn_in >= 0, interval >= 1, n_samples >= 1")


@dataclass
class SampleBatch:
    """Retained statistic vectors with attribute-degree summaries."""

    effect_names: list[str]
    stats: np.ndarray  # (n_samples, k)
    mean_degree_y1: np.ndarray
    mean_indegree_y1: np.ndarray
    mean_outdegree_y1: np.ndarray
    provenance: dict
    y_samples: np.ndarray | None = None  # (n_samples, n) int8 when stored

    @property
    def n_samples(self) -> int:
        return self.stats.shape[0]

    def column(self, name: str) -> np.ndarray:
        return self.stats[:, self.effect_names.index(name)]

    def write_csv(self, path) -> None:
        header = ["sample"] + self.effect_names + [
            "mean_degree_y1", "mean_indegree_y1", "mean_outdegree_y1"]
        with open(path, "w") as f:
            f.write(",".join(header) + "\n")
            for s in range(self.n_samples):
                row = [str(s)] + [repr(float(v)) for v in self.stats[s]]
                row += [repr(float(self.mean_degree_y1[s])),
                        repr(float(self.mean_indegree_y1[s])),
                        repr(float(self.mean_outdegree_y1[s]))]
                f.write(",".join(row) + "\n")


def _compile_effects(effects: Sequence[EffectSpec], g: Graph,
                     w: CovariateTable | None) -> tuple[np.ndarray, np.ndarray]:
    """Static per-node contribution matrix plus dynamic kind codes."""
    k = len(effects)
    static = np.zeros((g.n, k), dtype=np.float64)
    dyn = np.zeros(k, dtype=np.int64)
    for j, e in enumerate(effects):
        contrib = node_contrib(e, g, w)
        if contrib is None:
            dyn[j] = _chain.DYN_CODES[e.kind]
        else:
            static[:, j] = contrib
    return np.ascontiguousarray(static), dyn


def closed_form_vector(effects: Sequence[EffectSpec], g: Graph,
                       w: CovariateTable | None, y) -> np.ndarray:
    """Statistics of every effect from the closed forms (not build-up)."""
    return np.array([statistic(e, g, w, y) for e in effects], dtype=np.float64)


def _initial_values(cfg: SamplerConfig, g: Graph, y_obs: OutcomeVector | None,
                    state) -> tuple[np.ndarray, np.ndarray]:
    """Resolve the starting outcome vector and the free-node list."""
    mode, _, arg = cfg.initial_y.partition(":")
    free = y_obs.free.copy() if y_obs is not None else np.ones(g.n, dtype=np.bool_)
    if mode == "observed":
        if y_obs is None:
            raise ValueError("initial_y='observed' requires an observed outcome vector")
        values = y_obs.values.copy()
    elif mode == "zeros":
        values = np.zeros(g.n, dtype=np.int8)
        if y_obs is not None:
            values[~free] = y_obs.values[~free]
    elif mode == "random":
        if arg:
            p = float(arg)
        elif y_obs is not None:
            p = y_obs.density()
        else:
            raise ValueError("initial_y='random' needs a probability or an observed vector")
        values = np.empty(g.n, dtype=np.int8)
        for i in range(g.n):  # consume the chain's own RNG for determinism
            values[i] = 1 if _chain._next_uniform(state) < p else 0
        if y_obs is not None:
            values[~free] = y_obs.values[~free]
    else:
        raise ValueError(f"unknown initial_y {cfg.initial_y!r}")
    return values, np.flatnonzero(free).astype(np.int64)


def derive_seed(master: int, *branch: int) -> int:
    """Independent child seed for a named branch of a master seed."""
    return int(np.random.SeedSequence((master,) + branch).generate_state(1, np.uint64)[0])


class LiveChain:
    """A persistent chain whose parameters may change between bursts.

    Used by the estimators, which interleave short runs with parameter
    updates. The incremental statistics can be resynchronized against the
    closed forms at any time.
    """

    def __init__(self, effects: Sequence[EffectSpec], g: Graph,
                 w: CovariateTable | None, y0: np.ndarray, free: np.ndarray,
                 seed: int):
        self.effects = list(effects)
        self.g, self.w = g, w
        self.y = np.ascontiguousarray(y0, dtype=np.int8).copy()
        self.free_nodes = np.flatnonzero(free).astype(np.int64)
        self.state = _chain.make_state(seed)
        self.static, self.dyn = _compile_effects(self.effects, g, w)
        self.z = closed_form_vector(self.effects, g, w, self.y)
        self._args = (self.static, self.dyn, self.free_nodes,
                      g.out_indptr, g.out_indices, g.in_indptr, g.in_indices,
                      g.mut_indptr, g.mut_indices, g.directed)

    def advance(self, theta: np.ndarray, steps: int) -> int:
        if not self.free_nodes.size or steps <= 0:
            return 0
        return _chain.run_chain(self.state, self.y, self.z,
                                np.asarray(theta, dtype=np.float64),
                                *self._args, steps)

    def resync(self) -> None:
        z_exact = closed_form_vector(self.effects, self.g, self.w, self.y)
        if np.max(np.abs(self.z - z_exact)) > 1e-6:
            raise KernelInconsistencyError(
                f"incremental statistics drifted by {np.max(np.abs(self.z - z_exact)):.3g}")
        self.z[:] = z_exact


def mcmc_step(m: Model, g: Graph, w: CovariateTable | None, y: OutcomeVector,
              rng: np.random.Generator) -> tuple[OutcomeVector, bool, np.ndarray]:
    """One Metropolis proposal; reference implementation of the kernel.

    Picks a free node uniformly, computes the change-statistic vector with
    y_i taken as 0, and accepts with probability min(1, exp(+-theta.delta)).
    Returns the (possibly new) outcome vector, the acceptance flag, and the
    realized statistic change.
    """
    free = np.flatnonzero(y.free)
    if free.size == 0:
        raise ValueError("no free nodes to flip")
    i = int(free[rng.integers(free.size)])
    delta = np.array([change_stat(e, g, w, y, i) for e in m.effects])
    s_old = int(y.values[i])
    log_ratio = float(m.theta @ delta) * (1.0 if s_old == 0 else -1.0)
    accept = log_ratio >= 0.0 or rng.random() < math.exp(log_ratio)
    if not accept:
        return y, False, np.zeros(m.k)
    out = y.copy()
    out.values[i] = 1 - s_old
    return out, True, delta if s_old == 0 else -delta


def simulate(m: Model, g: Graph, w: CovariateTable | None, cfg: SamplerConfig,
             y_obs: OutcomeVector | None = None,
             record_effects: Sequence[EffectSpec] | None = None) -> SampleBatch:
    """Run the chain and retain n_samples statistic vectors.

    ``record_effects`` may extend the model's effects; the extras carry zero
    parameters, so they are tracked without influencing the dynamics (used
    by goodness-of-fit suites).
    """
    m.validate(g, w)
    effects = list(m.effects)
    theta = m.theta
    if record_effects is not None:
        extras = [e for e in record_effects if e not in m.effects]
        for e in extras:
            e.validate(g, w)
        effects = effects + extras
        theta = np.concatenate([m.theta, np.zeros(len(extras))])

    state = _chain.make_state(cfg.seed)
    values, free_nodes = _initial_values(cfg, g, y_obs, state)
    static, dyn = _compile_effects(effects, g, w)
    z = closed_form_vector(effects, g, w, values)

    k = len(effects)
    stats = np.empty((cfg.n_samples, k))
    md = np.empty(cfg.n_samples)
    mdi = np.empty(cfg.n_samples)
    mdo = np.empty(cfg.n_samples)
    y_store = np.empty((cfg.n_samples, g.n), dtype=np.int8) if cfg.store_y else None

    args = (theta, static, dyn, free_nodes,
            g.out_indptr, g.out_indices, g.in_indptr, g.in_indices,
            g.mut_indptr, g.mut_indices, g.directed)
    accepted = 0
    proposals = 0
    if free_nodes.size and cfg.burn_in:
        accepted += _chain.run_chain(state, values, z, *args, cfg.burn_in)
        proposals += cfg.burn_in
    for s in range(cfg.n_samples):
        if free_nodes.size:
            accepted += _chain.run_chain(state, values, z, *args, cfg.interval)
            proposals += cfg.interval
        if (s + 1) % cfg.resync_every == 0:
            z_exact = closed_form_vector(effects, g, w, values)
            if np.max(np.abs(z - z_exact)) > 1e-6:
                raise KernelInconsistencyError(
                    f"incremental statistics drifted by {np.max(np.abs(z - z_exact)):.3g} "
                    f"at sample {s}")
            z[:] = z_exact
        stats[s] = z
        ones = values.sum()
        if ones:
            md[s] = float(g.deg @ values) / ones
            mdi[s] = float(g.deg_in @ values) / ones
            mdo[s] = float(g.deg_out @ values) / ones
        else:
            md[s] = mdi[s] = mdo[s] = math.nan
        if y_store is not None:
            y_store[s] = values

    provenance = {
        "seed": cfg.seed, "burn_in": cfg.burn_in, "interval": cfg.interval,
        "n_samples": cfg.n_samples, "initial_y": cfg.initial_y,
        "model": str(Model(tuple(effects), theta)),
        "graph_digest": g.digest(),
        "accept_rate": accepted / proposals if proposals else 0.0,
    }
    return SampleBatch([e.name for e in effects], stats, md, mdi, mdo,
                       provenance, y_samples=y_store)
