"""Pursuit-evasion simulation with a capture-guaranteed pursuit law.

The core objects: the evader's dominance disc (the classical fixed-ratio
locus over the two agent positions), the fixed capture disc built by
inflating it at the start, and a pursuit law that provably confines every
later dominance disc inside that capture disc until the gap closes.  The
engine verifies each provable property at runtime; the games layer answers
who wins a guarding game and at what payoff; the two-wall lab reproduces the
chattering failure of the naive guarding law that motivates all of this.
"""

from .errors import (
    DegenerateStateError,
    DomainError,
    GeometryError,
    PursuitError,
    ScenarioError,
    SingularPolicyError,
)
from .geometry import (
    ApolloniusCoefficients,
    Disc,
    Offsets,
    Vec2,
    apollonius_disc,
    capture_disc,
    capture_margin,
    capture_time_bound,
    coefficients,
    lyapunov_envelope,
    offsets,
)
from .strategies import (
    BangBangPursuer,
    ConstantHeadingEvader,
    DeadzonePursuer,
    ExternalEvader,
    GameState,
    GuaranteedPursuer,
    PurePursuitPursuer,
    RadialEscapeEvader,
    ScriptedEvader,
    ToPointEvader,
    evader_velocity,
    guaranteed_direction,
    make_state,
    pure_pursuit_direction,
    z_evader,
    z_pursuer,
)
from .engine import (
    Captured,
    EvaderReachedTarget,
    HorizonExceeded,
    MonitorReport,
    MonitorViolation,
    MultiPursuer,
    Outcome,
    RunResult,
    SimConfig,
    Simulation,
    TrajectoryRecord,
    delta1_excess,
    monitor_suite,
    run,
    run_multi,
    sensing_check,
    step,
)
from .games import (
    DiscTarget,
    DistanceField,
    GameVerdict,
    LinearField,
    PointTarget,
    PolylineTarget,
    RadialField,
    SegmentTarget,
    TargetSet,
    VerticalLineTarget,
    critical_speed,
    delta_for_margin,
    final_location_value,
    guarding_verdict,
    multi_pursuer_membership,
    phi_eval,
    phi_star,
)
from .two_target import (
    DivergenceReport,
    TwoTargetScenario,
    aim_points,
    predicted_divergence_rate,
    run_experiment,
    threshold_nu,
)

__version__ = "0.1.0"
