"""Privacy mechanism design under alpha-lift leakage with mutual-information utility."""

from .alpha import SweepConfig, SweepGrid, build_eps_grid, candidate_pool, filter_band, run_algorithm1
from .exact import PutSolution, extract_mechanism, solve_maxlift_put
from .lift import (
    INF,
    alpha_lift,
    eps_max,
    lift_table,
    max_lift_leakage,
    mechanism_leakage,
    posterior_alpha_lift,
)
from .linprog import MixtureSolution, solve_min_cost_mixture
from .polytope import VertexFamily, VertexSet, enumerate_vertices
from .prob import (
    Channel,
    JointDistribution,
    Mechanism,
    conditional_s_given_x,
    entropy,
    forward_channel,
    mutual_information,
    validate_joint,
)
from .watchdog import watchdog_merge

__version__ = "0.1.0"
