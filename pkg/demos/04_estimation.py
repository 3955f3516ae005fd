"""Estimate parameters two ways and cross-check against the exact answer.

A known model simulates an outcome vector on a small graph; stochastic
approximation and equilibrium expectation then recover the parameters,
compared against the exact maximum-likelihood estimate from enumeration.
"""

import numpy as np

import alaam
from alaam import EeConfig, EffectSpec, Model, SaConfig, SamplerConfig
from alaam.sampler import closed_form_vector

rng = np.random.default_rng(37)
n = 16
pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.4]
g = alaam.Graph(np.array(pairs), n, directed=False)

effects = [EffectSpec("Density"), EffectSpec("GWActivity"), EffectSpec("Contagion")]
truth = Model(effects, [-0.3, 0.6, 0.3])
sim = alaam.simulate(truth, g, None,
                     SamplerConfig(burn_in=20_000, interval=1000, n_samples=1,
                                   seed=37, initial_y="random:0.5", store_y=True))
y_obs = alaam.OutcomeVector(sim.y_samples[0])
z_obs = closed_form_vector(effects, g, None, y_obs.values)
print("observed statistics:", z_obs)

theta_mle = alaam.exact_mle(z_obs, Model(effects), g)
print("exact MLE:          ", np.round(theta_mle, 4))

sa = alaam.estimate_sa(Model(effects), g, None, y_obs, SaConfig(seed=1))
print("\nstochastic approximation:")
print(sa.to_text())

ee = alaam.estimate_ee(Model(effects), g, None, y_obs,
                       EeConfig(seed=2, replicates=10, updates=8000, c1=0.02))
print("\nequilibrium expectation (10 replicates):")
print(ee.to_text())
