"""Maximum-likelihood point estimates and standard errors.

Two regimes: three-phase Robbins-Monro stochastic approximation for
networks up to a few thousand nodes, and the equilibrium-expectation
scheme (small parameter corrections interleaved with short chain runs,
averaged over independent replicates) for much larger ones.

Standard errors for stochastic approximation come from the inverse
statistic covariance at the estimate (the exponential-family Fisher
information); equilibrium expectation combines between-replicate spread
with within-replicate batch-means variance. A fit is reported converged
only when every included effect's t-ratio is below 0.1 in magnitude, and
diverged when a parameter crosses the divergence bound or the final
t-ratios show the simulated statistics cannot reach the observed ones.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import logit

from .effects import Model, check_inside_range
from .graph import CovariateTable, Graph, OutcomeVector
from .sampler import LiveChain, closed_form_vector, derive_seed


class CollinearEffectsError(RuntimeError):
    """Statistic covariance is singular; some effects carry the same signal."""


@dataclass(frozen=True)
class SaConfig:
    seed: int = 0
    steps_per_update: int | None = None   # chain proposals between updates; default 10n
    phase1_samples: int = 100
    subphases: int = 5
    updates_per_subphase: int = 200
    a0: float = 0.1
    phase3_samples: int = 1000
    divergence_bound: float = 100.0
    degeneracy_t: float = 3.0
    converged_t: float = 0.1
    theta0: np.ndarray | None = None
    free: tuple[bool, ...] | None = None  # effects to estimate; others stay at theta0


@dataclass(frozen=True)
class EeConfig:
    seed: int = 0
    replicates: int = 20
    updates: int = 2000
    steps_per_update: int | None = None   # default n/10, floored at 100, capped at 1e5
    c1: float = 1e-2
    eps: float = 1e-2
    ewma_half_life: float = 100.0
    warmup_updates: int = 20
    check_samples: int = 100
    divergence_bound: float = 100.0
    degeneracy_t: float = 3.0
    converged_t: float = 0.1
    threads: int | None = None
    theta0: np.ndarray | None = None
    free: tuple[bool, ...] | None = None  # effects to estimate; others stay at theta0


@dataclass
class EstimationResult:
    effect_names: list[str]
    theta_hat: np.ndarray
    std_err: np.ndarray
    convergence_t: np.ndarray
    runs_used: int
    diverged: bool
    converged: bool
    trajectory: np.ndarray | None = None
    unstable: bool = False

    @property
    def significant(self) -> np.ndarray:
        """|estimate| > 1.96 SE per effect."""
        with np.errstate(invalid="ignore"):
            return np.abs(self.theta_hat) > 1.96 * self.std_err

    def to_text(self) -> str:
        lines = [f"{'effect':<28} {'estimate':>12} {'std_err':>12} {'t_ratio':>10} sig"]
        for i, name in enumerate(self.effect_names):
            sig = "*" if self.significant[i] else ""
            lines.append(f"{name:<28} {self.theta_hat[i]:>12.4f} "
                         f"{self.std_err[i]:>12.4f} {self.convergence_t[i]:>10.4f} {sig}")
        status = "diverged" if self.diverged else ("converged" if self.converged else "not converged")
        lines.append(f"status: {status} (runs used: {self.runs_used})")
        return "\n".join(lines)

    def write_csv(self, path) -> None:
        with open(path, "w") as f:
            f.write("effect,estimate,std_err,t_ratio,significant\n")
            for i, name in enumerate(self.effect_names):
                f.write(f"{name},{self.theta_hat[i]!r},{self.std_err[i]!r},"
                        f"{self.convergence_t[i]!r},{int(self.significant[i])}\n")


def default_theta0(m: Model, y_obs: OutcomeVector) -> np.ndarray:
    """Density starts at the observed log-odds, everything else at zero."""
    theta0 = np.zeros(m.k)
    p = float(np.clip(y_obs.values.mean(), 1e-9, 1 - 1e-9))
    for j, e in enumerate(m.effects):
        if e.kind == "Density":
            theta0[j] = logit(p)
    return theta0


def _check_covariance(cov: np.ndarray, names: list[str]) -> None:
    var = np.diag(cov)
    dead = [names[i] for i in np.flatnonzero(var <= 0)]
    if dead:
        raise CollinearEffectsError(
            f"statistic(s) with zero sampled variance: {', '.join(dead)}")
    corr = cov / np.sqrt(np.outer(var, var))
    k = len(names)
    pairs = [(names[i], names[j]) for i in range(k) for j in range(i + 1, k)
             if abs(corr[i, j]) > 1.0 - 1e-6]
    if pairs:
        joined = "; ".join(f"{a} ~ {b}" for a, b in pairs)
        raise CollinearEffectsError(f"collinear effect statistics: {joined}")


def _free_mask(free, m0: Model) -> np.ndarray:
    if free is None:
        return np.ones(m0.k, dtype=bool)
    mask = np.asarray(free, dtype=bool)
    if mask.shape != (m0.k,):
        raise ValueError(f"free mask needs {m0.k} entries")
    if not mask.any():
        raise ValueError("at least one effect must be free to estimate")
    return mask


def _t_ratios(sim_mean, sim_sd, z_obs) -> np.ndarray:
    diff = sim_mean - z_obs
    with np.errstate(divide="ignore", invalid="ignore"):
        t = diff / sim_sd
    return np.where(sim_sd > 0, t, np.where(diff == 0, 0.0, np.inf))


def _diverged_result(m: Model, theta, trajectory, runs: int) -> EstimationResult:
    nan = np.full(m.k, np.nan)
    return EstimationResult(m.names, np.asarray(theta, dtype=float), nan.copy(),
                            nan.copy(), runs, diverged=True, converged=False,
                            trajectory=np.asarray(trajectory) if len(trajectory) else None)


def estimate_sa(m0: Model, g: Graph, w: CovariateTable | None,
                y_obs: OutcomeVector, cfg: SaConfig = SaConfig()) -> EstimationResult:
    """Three-phase Robbins-Monro moment matching.

    Phase 1 estimates the statistic covariance at theta0; phase 2 runs
    halving-gain updates theta -= a_k (z_sim - z_obs) / Var(z), averaging the
    final sub-phase; phase 3 simulates at the estimate for t-ratios and the
    Fisher-information standard errors.
    """
    m0.validate(g, w)
    z_obs = closed_form_vector(m0.effects, g, w, y_obs.values)
    free = _free_mask(cfg.free, m0)
    check_inside_range(Model([e for e, f in zip(m0.effects, free) if f]),
                       g, w, z_obs[free])
    steps = cfg.steps_per_update or 10 * g.n
    theta0 = np.asarray(cfg.theta0, dtype=float) if cfg.theta0 is not None \
        else default_theta0(m0, y_obs)

    chain = LiveChain(m0.effects, g, w, y_obs.values, y_obs.free,
                      derive_seed(cfg.seed, 1))
    free_names = [n for n, f in zip(m0.names, free) if f]

    # phase 1: covariance scale at theta0
    chain.advance(theta0, 10 * steps)
    z1 = np.empty((cfg.phase1_samples, m0.k))
    for s in range(cfg.phase1_samples):
        chain.advance(theta0, steps)
        z1[s] = chain.z
    chain.resync()
    cov1 = np.cov(z1, rowvar=False, ddof=1).reshape(m0.k, m0.k)
    _check_covariance(cov1[np.ix_(free, free)], free_names)
    dvar = np.diag(cov1).copy()

    # phase 2: halving-gain Robbins-Monro updates on a persistent chain
    theta = theta0.copy()
    trajectory = []
    for k in range(cfg.subphases):
        gain = cfg.a0 * 2.0 ** (-k)
        for _ in range(cfg.updates_per_subphase):
            chain.advance(theta, steps)
            step = gain * (chain.z - z_obs) / dvar
            theta = np.where(free, theta - step, theta)
            trajectory.append(theta.copy())
            if np.max(np.abs(theta[free])) > cfg.divergence_bound:
                return _diverged_result(m0, theta, trajectory, 1)
        chain.resync()
    theta_hat = np.mean(trajectory[-cfg.updates_per_subphase:], axis=0)

    # phase 3: long run at the estimate
    chain.advance(theta_hat, 10 * steps)
    z3 = np.empty((cfg.phase3_samples, m0.k))
    for s in range(cfg.phase3_samples):
        chain.advance(theta_hat, steps)
        if (s + 1) % 100 == 0:
            chain.resync()
        z3[s] = chain.z
    cov3 = np.cov(z3, rowvar=False, ddof=1).reshape(m0.k, m0.k)
    t = _t_ratios(z3.mean(axis=0), z3.std(axis=0, ddof=1), z_obs)
    _check_covariance(cov3[np.ix_(free, free)], free_names)
    std_err = np.full(m0.k, np.nan)
    std_err[free] = np.sqrt(np.diag(np.linalg.inv(cov3[np.ix_(free, free)])))

    max_t = float(np.max(np.abs(t[free])))
    diverged = max_t > cfg.degeneracy_t
    converged = not diverged and max_t < cfg.converged_t
    return EstimationResult(m0.names, theta_hat, std_err, t, 1, diverged,
                            converged, trajectory=np.asarray(trajectory))


def _ee_replicate(m0: Model, g: Graph, w, y_obs: OutcomeVector, z_obs,
                  theta0, steps: int, cfg: EeConfig, free: np.ndarray,
                  idx: int) -> dict:
    chain = LiveChain(m0.effects, g, w, y_obs.values, y_obs.free,
                      derive_seed(cfg.seed, 10, idx))
    beta = 1.0 - 2.0 ** (-1.0 / cfg.ewma_half_life)
    theta = np.asarray(theta0, dtype=float).copy()

    v = np.zeros(m0.k)
    for _ in range(cfg.warmup_updates):
        chain.advance(theta, steps)
        v += (chain.z - z_obs) ** 2
    v /= max(cfg.warmup_updates, 1)

    traj = np.empty((cfg.updates, m0.k))
    for t in range(cfg.updates):
        chain.advance(theta, steps)
        d = chain.z - z_obs
        v = (1.0 - beta) * v + beta * d * d
        theta = np.where(free, theta - (cfg.c1 / (cfg.eps + v)) * d, theta)
        traj[t] = theta
        if np.max(np.abs(theta[free])) > cfg.divergence_bound:
            return {"diverged": True, "trajectory": traj[:t + 1]}
    chain.resync()

    half = traj[cfg.updates // 2:]
    est = half.mean(axis=0)
    nb = 10  # batch-means variance of the half-trajectory mean
    batches = np.array_split(half, nb)
    bmeans = np.array([b.mean(axis=0) for b in batches])
    within = bmeans.var(axis=0, ddof=1) / nb
    return {"diverged": False, "estimate": est, "within": within, "trajectory": traj}


def estimate_ee(m0: Model, g: Graph, w: CovariateTable | None,
                y_obs: OutcomeVector, cfg: EeConfig = EeConfig()) -> EstimationResult:
    """Equilibrium-expectation estimation over independent replicates.

    Each replicate starts the chain at the observed vector and repeatedly
    nudges each parameter against its statistic's deviation from the
    observed value, with a per-parameter adaptive gain; the point estimate
    averages the second half of the trajectory. Replicates run in parallel
    and are merged by their mean, with between+within standard errors.
    """
    m0.validate(g, w)
    z_obs = closed_form_vector(m0.effects, g, w, y_obs.values)
    free = _free_mask(cfg.free, m0)
    check_inside_range(Model([e for e, f in zip(m0.effects, free) if f]),
                       g, w, z_obs[free])
    steps = cfg.steps_per_update or min(max(g.n // 10, 100), 100_000)
    theta0 = np.asarray(cfg.theta0, dtype=float) if cfg.theta0 is not None \
        else default_theta0(m0, y_obs)

    workers = cfg.threads or min(cfg.replicates, os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        reps = list(pool.map(
            lambda i: _ee_replicate(m0, g, w, y_obs, z_obs, theta0, steps, cfg,
                                    free, i),
            range(cfg.replicates)))

    bad = [r for r in reps if r["diverged"]]
    if bad:
        return _diverged_result(m0, bad[0]["trajectory"][-1], bad[0]["trajectory"],
                                cfg.replicates)

    estimates = np.stack([r["estimate"] for r in reps])
    within_mean = np.mean([r["within"] for r in reps], axis=0)
    theta_hat = estimates.mean(axis=0)
    between = estimates.var(axis=0, ddof=1) if cfg.replicates > 1 else np.zeros(m0.k)
    r = cfg.replicates
    std_err = np.sqrt(between / r + within_mean / r)
    unstable = bool(np.any(np.sqrt(between) > 5.0 * np.sqrt(within_mean + 1e-300)))

    # final t-ratio check from a fresh run at the estimate
    from .sampler import SamplerConfig, simulate
    check = simulate(m0.with_theta(theta_hat), g, w,
                     SamplerConfig(burn_in=10 * steps, interval=steps,
                                   n_samples=cfg.check_samples,
                                   seed=derive_seed(cfg.seed, 999),
                                   initial_y="observed"),
                     y_obs=y_obs)
    t = _t_ratios(check.stats.mean(axis=0), check.stats.std(axis=0, ddof=1), z_obs)

    std_err[~free] = np.nan
    max_t = float(np.max(np.abs(t[free])))
    diverged = max_t > cfg.degeneracy_t
    converged = not diverged and max_t < cfg.converged_t
    return EstimationResult(m0.names, theta_hat, std_err, t, cfg.replicates,
                            diverged, converged, trajectory=reps[0]["trajectory"],
                            unstable=unstable)
