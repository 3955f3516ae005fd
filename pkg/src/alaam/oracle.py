"""Exact enumeration of the outcome distribution on tiny graphs.

The only place the normalizing constant is ever computed. States are walked
in Gray-code order so each step flips one node and reuses the change-stat
kernels; the full statistics are recomputed from the closed forms every
4096 states to keep the walk honest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .effects import BoundaryStatisticError, Model, change_stat
from .graph import CovariateTable, Graph
from .sampler import closed_form_vector

ENUM_MAX_NODES = 22
MLE_MAX_NODES = 18


@dataclass
class ExactDistribution:
    """Full probability table over the 2^n outcome vectors."""

    effect_names: list[str]
    log_kappa: float
    probs: np.ndarray       # (2^n,), indexed by sum_i y_i 2^i
    expected_z: np.ndarray  # (k,)
    cov_z: np.ndarray       # (k, k)

    def prob(self, y) -> float:
        idx = int(np.dot(np.asarray(y, dtype=np.int64),
                         1 << np.arange(len(np.asarray(y)), dtype=np.int64)))
        return float(self.probs[idx])


def state_table(m: Model, g: Graph, w: CovariateTable | None) -> np.ndarray:
    """(2^n, k) statistics of every outcome vector, in bitmask order."""
    n, k = g.n, m.k
    size = 1 << n
    table = np.empty((size, k))
    y = np.zeros(n, dtype=np.int8)
    z = closed_form_vector(m.effects, g, w, y)
    table[0] = z
    code = 0
    for t in range(1, size):
        bit = (t & -t).bit_length() - 1
        if y[bit] == 0:
            for j, e in enumerate(m.effects):
                z[j] += change_stat(e, g, w, y, bit)
            y[bit] = 1
        else:
            y[bit] = 0
            for j, e in enumerate(m.effects):
                z[j] -= change_stat(e, g, w, y, bit)
        code ^= 1 << bit
        if t % 4096 == 0:
            z_exact = closed_form_vector(m.effects, g, w, y)
            if np.max(np.abs(z - z_exact)) > 1e-8:
                raise AssertionError("change statistics inconsistent with closed forms")
            z = z_exact
        table[code] = z
    return table


def _distribution_from(table: np.ndarray, theta: np.ndarray,
                       names: list[str]) -> ExactDistribution:
    logits = table @ theta
    log_kappa = float(logsumexp(logits))
    probs = np.exp(logits - log_kappa)
    expected = probs @ table
    centered = table - expected
    cov = (centered * probs[:, None]).T @ centered
    return ExactDistribution(names, log_kappa, probs, expected, cov)


def enumerate_distribution(m: Model, g: Graph,
                           w: CovariateTable | None = None) -> ExactDistribution:
    """Exact probabilities, expectations and covariance at the model's theta."""
    m.validate(g, w)
    if g.n > ENUM_MAX_NODES:
        raise ValueError(
            f"exact enumeration needs 2^n work; refusing n = {g.n} > {ENUM_MAX_NODES}")
    return _distribution_from(state_table(m, g, w), m.theta, m.names)


def exact_mle(z_obs, m: Model, g: Graph, w: CovariateTable | None = None,
              tol: float = 1e-8, max_iter: int = 200) -> np.ndarray:
    """Exact maximum-likelihood parameters by damped Newton ascent.

    The gradient of the log-likelihood is z_obs - E_theta[z] and its Hessian
    is -Cov_theta(z), both exact from enumeration, so Newton steps converge
    quadratically once near the optimum. Observed statistics on the
    attainable boundary raise BoundaryStatisticError.
    """
    m.validate(g, w)
    if g.n > MLE_MAX_NODES:
        raise ValueError(f"exact MLE refuses n = {g.n} > {MLE_MAX_NODES}")
    z_obs = np.asarray(z_obs, dtype=np.float64)
    if z_obs.shape != (m.k,):
        raise ValueError(f"need {m.k} observed statistics, got {z_obs.shape}")

    table = state_table(m, g, w)
    zmin, zmax = table.min(axis=0), table.max(axis=0)
    for name, z, lo, hi in zip(m.names, z_obs, zmin, zmax):
        if not (lo + 1e-12 < z < hi - 1e-12):
            raise BoundaryStatisticError(
                f"observed {name} = {z:g} on the attainable boundary [{lo:g}, {hi:g}]; "
                "maximum likelihood estimate does not exist")

    theta = m.theta.astype(np.float64).copy()

    def loglik(th):
        return float(th @ z_obs - logsumexp(table @ th))

    ll = loglik(theta)
    for _ in range(max_iter):
        dist = _distribution_from(table, theta, m.names)
        grad = z_obs - dist.expected_z
        if np.max(np.abs(grad)) < tol:
            return theta
        try:
            step = np.linalg.solve(dist.cov_z, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(dist.cov_z, grad, rcond=None)[0]
        lam = 1.0
        for _ in range(60):
            cand = theta + lam * step
            ll_new = loglik(cand)
            if ll_new >= ll - 1e-12:
                break
            lam /= 2
        theta, ll = theta + lam * step, ll_new
        if np.max(np.abs(theta)) > 100.0:
            raise BoundaryStatisticError(
                "Newton iterates diverged; observed statistics lie on or near "
                "the boundary of the attainable hull")
    raise RuntimeError(f"exact MLE did not converge in {max_iter} iterations")
