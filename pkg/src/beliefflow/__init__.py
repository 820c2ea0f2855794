"""Belief propagation under external control on scale-free networks.

Exact and iterative solvers for neighborhood-averaging dynamics, network
synthesis under plain and clustering-weighted preferential attachment,
closed-form O(N) estimators of control power, control-set selection,
learning of the clustering weight, and a seeded experiment harness.
"""

__version__ = "0.1.0"

from .errors import (BeliefFlowError, CombinatorialGuardError, ConfigError, EmptyGraphError,
                     LearningError, NonConvergenceError, ParseError, SolveError)
from .graph import Graph, parse_edge_list, read_edge_list, snowball_sample, write_edge_list
from .synthesis import SynthesisConfig, synthesize, synthesize_ba, synthesize_gmg
from .engine import (NO_CONTROL, ControlStrategy, ExactSolver, PrivateBeliefDistribution,
                     control_power_exact, converge_exact, converge_iterative)
from .estimators import ModelParams, beta, edge_prob_matrix, eta, model_control_power
from .control import brute_force_control_set, check_gmg_condition, optimal_control_set
from .alpha import AlphaFit, AlphaSearchConfig, learn_alpha_full, learn_alpha_partial
from .harness import ExperimentConfig, ExperimentReport, run_experiment
