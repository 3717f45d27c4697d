"""Randomized optimization for chance-constrained programs."""
__version__ = "0.1.0"

from .problem import (  # noqa: E402
    BoxDomain,
    ChanceConstrainedProblem,
    DisturbanceKind,
    DisturbanceModel,
    EvaluationError,
    evaluate_constraint,
    evaluate_cost,
    from_pointwise,
    get_problem,
    make_benchmark,
)
from .sampling import DEFAULT_SEED, Purpose, RngStream, sample_decisions, sample_disturbances  # noqa: E402
from .violation import ViolationEstimate, estimate_violation, indicator, oracle_violation  # noqa: E402
from .random_search import NeighborhoodSpec, SearchConfig, random_optimize  # noqa: E402
from .explorer import ExplorerConfig, ExplorerTrace, explore, filter_feasible  # noqa: E402
from .scenario import ScenarioConfig, scenario_bound, solve_scenario  # noqa: E402
