"""Multi-criteria modal-choice modelling: survey ingestion, descriptive
statistics, a weighted-score decision engine with cognitive-bias variants,
synthetic population generation, and a policy what-if simulator.
"""

from .biases import (
    DEFAULT_HALO_COMPARISON,
    HaloComparison,
    ReactanceParams,
    ReactanceScope,
    apply_reactance,
    crowd_medians,
    halo_mask,
    halo_rationality_report,
    halo_rescue_table,
)
from .decision import (
    TIE_TOLERANCE,
    Classification,
    Crowd,
    DecisionOutcome,
    Overlay,
    SelfEvals,
    argmax_modes,
    classify,
    decide,
    rationality_report,
    score,
)
from .errors import (
    AllModesUnavailable,
    BadConfig,
    BadGender,
    BadMode,
    BadNumeric,
    BadRating,
    BadSplit,
    DegeneratePriorities,
    EmptyGroup,
    LengthMismatch,
    MalformedDocument,
    MissingColumn,
    ModalSimError,
    ValidationError,
)
from .model import (
    CRITERIA,
    GENDERS,
    MODES,
    Criterion,
    EvaluationMatrix,
    Gender,
    Mode,
    Population,
    PriorityProfile,
    Respondent,
    SurveyProvenance,
    SyntheticProvenance,
)
from .policy import (
    EMISSION_WEIGHTS,
    BiasConfig,
    GameState,
    PolicyScenario,
    ScenarioResult,
    advance_turn,
    builtin_scenarios,
    emissions_index,
    new_game,
    run_scenario,
    transfer_matrix,
)
from .stats import (
    EVERYONE,
    GroupFilter,
    Membership,
    accessibility_stats,
    deviation_users_vs_nonusers,
    gender_report,
    mean_evaluations,
    mean_priorities,
    modal_split,
    pairwise_mode_deviation,
    score_stats,
)
from .survey import (
    DEFAULT_SCHEMA_MAP,
    parse_survey_csv,
    read_canonical_json,
    write_canonical_json,
)
from .synthesis import (
    SynthesisConfig,
    SynthesisProfile,
    default_config,
    synthesize,
)

__version__ = "0.1.0"

__all__ = [
    "AllModesUnavailable",
    "BadConfig",
    "BadGender",
    "BadMode",
    "BadNumeric",
    "BadRating",
    "BadSplit",
    "BiasConfig",
    "CRITERIA",
    "Classification",
    "Criterion",
    "Crowd",
    "DEFAULT_HALO_COMPARISON",
    "DEFAULT_SCHEMA_MAP",
    "DecisionOutcome",
    "DegeneratePriorities",
    "EMISSION_WEIGHTS",
    "EVERYONE",
    "EmptyGroup",
    "EvaluationMatrix",
    "GENDERS",
    "GameState",
    "Gender",
    "GroupFilter",
    "HaloComparison",
    "LengthMismatch",
    "MODES",
    "MalformedDocument",
    "Membership",
    "MissingColumn",
    "ModalSimError",
    "Mode",
    "Overlay",
    "PolicyScenario",
    "Population",
    "PriorityProfile",
    "ReactanceParams",
    "ReactanceScope",
    "Respondent",
    "ScenarioResult",
    "SelfEvals",
    "SurveyProvenance",
    "SynthesisConfig",
    "SynthesisProfile",
    "SyntheticProvenance",
    "TIE_TOLERANCE",
    "ValidationError",
    "accessibility_stats",
    "advance_turn",
    "apply_reactance",
    "argmax_modes",
    "builtin_scenarios",
    "classify",
    "crowd_medians",
    "decide",
    "default_config",
    "deviation_users_vs_nonusers",
    "emissions_index",
    "gender_report",
    "halo_mask",
    "halo_rationality_report",
    "halo_rescue_table",
    "mean_evaluations",
    "mean_priorities",
    "modal_split",
    "new_game",
    "pairwise_mode_deviation",
    "parse_survey_csv",
    "rationality_report",
    "read_canonical_json",
    "run_scenario",
    "score",
    "score_stats",
    "synthesize",
    "transfer_matrix",
    "write_canonical_json",
]
