"""Sensor access signaling game between mobile apps and a defense mechanism."""
from .beliefs import (
    Beliefs,
    BestResponse,
    InfeasibleBeliefs,
    UnderdeterminedBeliefs,
    bayes_update,
    dm_best_response,
    dm_expected_utilities,
    invert_bayes,
)
from .equilibria import (
    InfeasibleMixing,
    MixedEquilibriumError,
    MixedPbne,
    PbneCategory,
    PbneProfile,
    SeparatingCertificate,
    SingularIndifferenceSystem,
    ThetaMismatch,
    VerificationResult,
    WeakDeviationError,
    brute_force_pure_pbne,
    check_separating,
    enumerate_pure_pbne,
    solve_mixed,
    verify_pbne,
)
from .game import (
    DEFAULT_PARAMS,
    EPS_INDIFF,
    EPS_NUM,
    AppType,
    DmAction,
    GameParameters,
    ParameterError,
    PayoffPair,
    Signal,
    StrategyProfile,
    expected_payoffs,
    payoff,
    validate,
)
from .repeated import Regime, RepeatedGameConfig, RepeatedGameTrace, run_repeated
from .sweep import DegenerateSample, Scenario, SweepConfig, SweepRow, expected_sweep, run_sweep

__version__ = "0.1.0"
