"""dynagrid: procedural grid worlds with text-described per-episode dynamics."""

from .dynamics import DynamicsMap, Outcome, TileProperty, Transition, resolve_action
from .episode import (
    EpisodeState,
    EpisodeTrace,
    Observation,
    StepResult,
    SteppingTerminatedEpisode,
    record_trace,
    replay,
    reset,
    start_episode,
    step,
)
from .evaluation import Comparison, EvalStats, MismatchedMetrics, compare, evaluate
from .grid import (
    AgentPose,
    GridState,
    ObjDesc,
    geometric_move,
    observe,
)
from .levels import (
    EnvInstance,
    InvalidLevel,
    LevelSpec,
    Mission,
    UnknownLevel,
    UnsatisfiableLevel,
    builtin_levels,
    get_level,
    mission_satisfied,
    sample_instance,
)
from .planner import Unsolvable, plan_greedy_ignorant, plan_optimal
from .policies import GreedyIgnorantPolicy, OptimalPolicy, Policy, RandomPolicy, random_policy
from .text import (
    DescriptionSet,
    Vocabulary,
    ablation_text,
    build_vocabulary,
    describe,
    detokenize,
    instruction,
    parse_descriptions,
    tokenize,
)

__version__ = "0.1.0"
