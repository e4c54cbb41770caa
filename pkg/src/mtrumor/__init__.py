"""Maki-Thompson rumour model toolkit.

Exact final-size distribution (arbitrary-precision d_j recursion plus an
independent jump-chain oracle), stochastic simulation with reproducible
parallel streams, rate functions, and numerical verification tables for
the LLN, CLT, LDP and MDP of the final ignorant count.
"""

from .automata import (AutomataTable, asymptotic_log_d, asymptotic_ratio,
                       compute_exact, get_table, hybrid_log_d, log_d)
from .config import DEFAULT_CAPS, ResourceCaps
from .constants import (ModelConstants, default_constants, derive_constants,
                        fixed_point_residual, solve_fixed_point)
from .exact_dist import (FinalSizeDistribution, dp_distribution, distribution,
                         left_layer_log_prob, log_pmf_V, moments,
                         tail_log_prob, tail_log_prob_detail)
from .harness import (DeviationReport, ScaleChoice, SCALES, clt_check,
                      endpoint_probe, ldp_table, local_mdp_check, mdp_table,
                      scale_by_name, tightness_check, total_variation)
from .rates import (h_derivatives_check, lattice_point,
                    point_log_prob_prediction, quadratic_bound_radius,
                    rate_H, rate_J, rate_h, rate_h_prime)
from .simulate import (ChainState, RATE_FORMULA, RATE_PAPER_LITERAL,
                       SimConfig, Trajectory, sample_batch,
                       sample_final_size, sample_trajectory,
                       step_probabilities)

__version__ = "0.1.0"
