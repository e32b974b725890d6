"""Iterative deliberation dynamics over metric opinion spaces.

Agents hold points in a shared metric space; each iteration a voting rule
aggregates the current profile into a winner and every agent moves a fixed
step toward it.  The package provides the spaces (real vectors, ballots,
rankings), the rules, the movement policies and their constraint checks,
a run engine with full tracing, and the analysis tools that test when and
how fast the process must converge.
"""

from .analysis import (
    BoundKind,
    BoundPrediction,
    Comparison,
    PotentialVector,
    ball_containment,
    enclosing_ball_l2,
    iteration_bound,
    kemeny_bruteforce,
    lex_compare,
    potential_scoring,
    potential_stv,
    sum_distance_to_winner,
    winner_stability,
)
from .engine import (
    EngineConfig,
    IterationRecord,
    Outcome,
    RunReport,
    is_consensus,
    run,
    step,
)
from .errors import (
    ConfigurationError,
    ConstraintViolationError,
    DelibError,
    InfeasibleStepError,
    InvalidPointError,
    ParseError,
    UnsupportedSizeError,
)
from .policies import (
    ConstraintMode,
    L1Mode,
    MovePolicy,
    PolicyKind,
    PolicySpec,
    check_constraints,
)
from .profiles import (
    GeneratorSpec,
    generate,
    load_profile,
    load_script,
    save_profile,
    save_script,
    worst_case_swf,
    worst_case_vnw,
    write_summary_csv,
    write_trace_jsonl,
)
from .rules import Profile, RuleSpec, VotingRule, winner
from .spaces import (
    Family,
    Metric,
    Point,
    SpaceSpec,
    dist,
    point_from_json,
    point_to_json,
    points_equal,
    validate_point,
)

__version__ = "0.1.0"

__all__ = [
    "BoundKind",
    "BoundPrediction",
    "Comparison",
    "ConfigurationError",
    "ConstraintMode",
    "ConstraintViolationError",
    "DelibError",
    "EngineConfig",
    "Family",
    "GeneratorSpec",
    "InfeasibleStepError",
    "InvalidPointError",
    "IterationRecord",
    "L1Mode",
    "Metric",
    "MovePolicy",
    "Outcome",
    "ParseError",
    "Point",
    "PolicyKind",
    "PolicySpec",
    "PotentialVector",
    "Profile",
    "RuleSpec",
    "RunReport",
    "SpaceSpec",
    "UnsupportedSizeError",
    "VotingRule",
    "ball_containment",
    "check_constraints",
    "dist",
    "enclosing_ball_l2",
    "generate",
    "is_consensus",
    "iteration_bound",
    "kemeny_bruteforce",
    "lex_compare",
    "load_profile",
    "load_script",
    "point_from_json",
    "point_to_json",
    "points_equal",
    "potential_scoring",
    "potential_stv",
    "run",
    "save_profile",
    "save_script",
    "step",
    "sum_distance_to_winner",
    "validate_point",
    "winner",
    "winner_stability",
    "worst_case_swf",
    "worst_case_vnw",
    "write_summary_csv",
    "write_trace_jsonl",
]
