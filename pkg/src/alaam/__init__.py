"""Autologistic actor attribute models: simulation, estimation, diagnostics.

Models a binary node attribute conditional on a fixed network through an
exponential-family distribution over outcome vectors. The effect catalogue
includes the geometrically weighted activity/sender/receiver statistics
that keep simple models estimable on large networks where the plain
activity statistics go near-degenerate.
"""

from .effects import (BoundaryStatisticError, EffectSpec, Model,
                      change_stat, parse_effect, statistic, statistic_range,
                      statistic_vector)
from .estimation import (CollinearEffectsError, EeConfig, EstimationResult,
                         SaConfig, estimate_ee, estimate_sa)
from .diagnostics import (attribute_degree_gof, default_gof_suite,
                          degeneracy_check, gof)
from .experiments import SweepConfig, SweepResult, detect_transition, sweep
from .fixtures import gnp_graph, heavy_tailed_graph
from .graph import (CovariateTable, Graph, OutcomeVector, descriptive_stats,
                    load_covariates, load_graph, outcome_degree_stats,
                    outcome_from)
from .oracle import ExactDistribution, enumerate_distribution, exact_mle
from .sampler import (KernelInconsistencyError, SampleBatch, SamplerConfig,
                      mcmc_step, simulate)

__version__ = "0.1.0"

__all__ = [
    "BoundaryStatisticError", "CollinearEffectsError", "CovariateTable",
    "EeConfig", "EffectSpec", "EstimationResult", "ExactDistribution",
    "Graph", "KernelInconsistencyError", "Model", "OutcomeVector",
    "SaConfig", "SampleBatch", "SamplerConfig", "SweepConfig", "SweepResult",
    "attribute_degree_gof", "change_stat", "default_gof_suite",
    "degeneracy_check", "descriptive_stats", "detect_transition",
    "enumerate_distribution", "estimate_ee", "estimate_sa", "exact_mle",
    "gnp_graph", "gof", "heavy_tailed_graph", "load_covariates", "load_graph",
    "mcmc_step", "outcome_degree_stats", "outcome_from", "parse_effect",
    "simulate", "statistic", "statistic_range", "statistic_vector", "sweep",
]
