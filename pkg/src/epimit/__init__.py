"""Edge deletion for epidemic mitigation on contact networks.

Three models share one edge-id space: the deterministic D-SIR dynamics with
its convex surrogate, the IC-SIR cascade with Monte Carlo estimators, and a
G-SIR Markov-chain simulator used as ground truth.
"""

from .dsir import (
    DsirSystem,
    NonConvergenceError,
    UnstableSystemError,
    check_stability,
    greedy_dsir,
    sigma_hat,
    simulate_sigma,
)
from .graph import Graph, analyze, build_hardness_instance, gen_er, gen_sbm, load_edge_list
from .gsir import GsirParams, estimate_infections
from .icsir import (
    EstimatorConfig,
    EstimatorUnavailable,
    IcInstance,
    ResampleExhausted,
    estimate_sigma,
    estimate_sigma_prime,
    greedy_icsir,
)
from .optimize import GreedyTrace, brute_force_opt, check_supermodular, greedy

__all__ = [
    "DsirSystem", "NonConvergenceError", "UnstableSystemError", "check_stability", "greedy_dsir",
    "sigma_hat", "simulate_sigma", "Graph", "analyze", "build_hardness_instance", "gen_er", "gen_sbm",
    "load_edge_list", "GsirParams", "estimate_infections", "EstimatorConfig", "EstimatorUnavailable",
    "IcInstance", "ResampleExhausted", "estimate_sigma", "estimate_sigma_prime", "greedy_icsir",
    "GreedyTrace", "brute_force_opt", "check_supermodular", "greedy",
]
