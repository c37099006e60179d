"""Hidden-variable theories, Bell certificates and completeness checks for
two-party correlation experiments."""
from .errors import (
    BellCheckError,
    DecompositionMismatch,
    InternalInconsistency,
    InvalidPhenomenon,
    InvalidState,
    InvalidTheory,
    NotFactorizable,
    NumericallyAmbiguous,
    PreconditionsNotMet,
    ScenarioTooLarge,
    ShapeError,
    UnsupportedOutcomeMap,
)
from .scenario import (
    ChshSettings,
    Phenomenon,
    Scenario,
    chsh_value,
    correlator,
    is_predictable,
    is_signal_local,
    rationalize,
    validate_phenomenon,
)
from .theory import (
    PropertyVector,
    Status,
    Theory,
    averaged_correlator,
    classify,
    is_deterministic,
    is_factorizable,
    is_fragile_local,
    is_jarrett_complete,
    is_local,
    predict,
    reproduces,
)
from .lhv import (
    BellCertificate,
    DeterministicStrategy,
    LhvModel,
    determinize,
    enumerate_strategies,
    solve_lhv,
    verify_certificate,
    verify_model,
)
from .quantum import (
    MeasurementSetting,
    TwoQubitState,
    born_phenomenon,
    boxes_oqm_theory,
    boxes_phenomenon,
    chsh_optimal_settings,
    oqm_theory,
    singlet,
    werner,
)
from .epr import (
    EprReport,
    check_completeness_implication,
    check_jcfl_implies_rep,
    check_lc_predictability,
    epr_element,
    rep_in_theory,
)
from .battery import BatteryConfig, run_theorem_battery

__version__ = "0.1.0"
