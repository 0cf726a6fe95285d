"""circleform: exact simulation of anonymous robots forming patterns on a circle.

Robots are oblivious, share no orientation, and activate under an adversarial
semi-synchronous scheduler.  All angles are exact rationals, so every
geometric predicate in the decision rule is decided without rounding.
"""

from .angles import (
    FULL_TURN,
    Direction,
    Turn,
    angle_between,
    bisector_points,
    canonical_cycle,
    format_turn,
    gaps_of,
    lex_compare,
    min_rotation,
    mod1,
    parse_turn,
    prefix_sums,
    rotational_fold,
)
from .configuration import (
    ConfigClass,
    Configuration,
    DoubleNomineeTied,
    LeaderConfig,
    Snapshot,
    Symmetric,
    arc_population,
    classify,
    nominees,
    pivotal_direction,
    snapshot_of,
)
from .errors import (
    CircleFormError,
    ClassificationError,
    DegenerateInputError,
    EmptyIntervalError,
    GenerationError,
    InvariantViolationError,
    PatternError,
    PreconditionError,
    StructuralError,
    SymmetricConfigurationError,
    TraceParseError,
)
from .formation import (
    Decision,
    DecisionKind,
    Embedding,
    IntervalChoice,
    RoleFrame,
    TargetPattern,
    compute,
    embed_targets,
    forbidden_epsilons_bisector,
    is_pfc,
    is_rfc,
    move_ready,
    pattern_formed,
    randomized_nominee_move,
    select_in_interval,
)
from .formats import (
    load_config,
    load_pattern,
    read_trace,
    save_config,
    save_pattern,
    write_trace,
)
from .simulator import (
    POLICIES,
    SYMMETRY_RULES,
    ActivationPolicy,
    CollisionWitness,
    ExploreReport,
    FullSync,
    LazyAdversary,
    OrientationAdversary,
    RandomSubset,
    RoundRecord,
    RoundRobinSingleton,
    RunReport,
    ScheduleCounterexample,
    detect_collision,
    explore_schedules,
    fsync_symmetry_experiment,
    phase_of,
    run,
    step_round,
)
from .cli import batch, gen_instance, symmetric_instance, verify_trace

__version__ = "0.1.0"

__all__ = [
    "FULL_TURN",
    "Direction",
    "Turn",
    "angle_between",
    "bisector_points",
    "canonical_cycle",
    "format_turn",
    "gaps_of",
    "lex_compare",
    "min_rotation",
    "mod1",
    "parse_turn",
    "prefix_sums",
    "rotational_fold",
    "ConfigClass",
    "Configuration",
    "DoubleNomineeTied",
    "LeaderConfig",
    "Snapshot",
    "Symmetric",
    "arc_population",
    "classify",
    "nominees",
    "pivotal_direction",
    "snapshot_of",
    "CircleFormError",
    "ClassificationError",
    "DegenerateInputError",
    "EmptyIntervalError",
    "GenerationError",
    "InvariantViolationError",
    "PatternError",
    "PreconditionError",
    "StructuralError",
    "SymmetricConfigurationError",
    "TraceParseError",
    "Decision",
    "DecisionKind",
    "Embedding",
    "IntervalChoice",
    "RoleFrame",
    "TargetPattern",
    "compute",
    "embed_targets",
    "forbidden_epsilons_bisector",
    "is_pfc",
    "is_rfc",
    "move_ready",
    "pattern_formed",
    "randomized_nominee_move",
    "select_in_interval",
    "load_config",
    "load_pattern",
    "read_trace",
    "save_config",
    "save_pattern",
    "write_trace",
    "POLICIES",
    "SYMMETRY_RULES",
    "ActivationPolicy",
    "CollisionWitness",
    "ExploreReport",
    "FullSync",
    "LazyAdversary",
    "OrientationAdversary",
    "RandomSubset",
    "RoundRecord",
    "RoundRobinSingleton",
    "RunReport",
    "ScheduleCounterexample",
    "detect_collision",
    "explore_schedules",
    "fsync_symmetry_experiment",
    "phase_of",
    "run",
    "step_round",
    "batch",
    "gen_instance",
    "symmetric_instance",
    "verify_trace",
    "__version__",
]
