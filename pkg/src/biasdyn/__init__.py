"""Opinion dynamics on weighted influence graphs with per-edge disagreement biases."""

from .analysis import (
    ConvergenceReport,
    Prediction,
    check_extreme_reduction,
    check_max_decrease_horizon,
    check_update_bounds,
    detect_convergence,
    predict_consensus,
    run_to_verdict,
)
from .bias import BiasSpec, classify_bias, continuity_probe, eval_bias, make_bias, region_membership
from .dynamics import Trajectory, clamp01, simulate, update, update_unclamped
from .errors import DomainError, NumericError, PreconditionUnmet, ValidationError
from .graph import (
    ComponentPartition,
    InfluenceGraph,
    build_graph,
    has_path,
    influencers,
    is_strongly_connected,
    proportional_influence,
    strongly_connected_components,
)
from .scenario import ScenarioConfig, ScenarioError, builtin_scenarios, get_builtin, parse_scenario

__version__ = "0.1.0"
