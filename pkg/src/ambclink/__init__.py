"""Link-level simulator and analysis toolkit for ambient backscatter
receivers with and without a low-noise amplifier."""

__version__ = "0.1.0"

from .analysis import (
    HypothesisMoments,
    ber_closed_form,
    deflection_lna_approx,
    deflection_lna_full,
    deflection_no_lna,
    hypothesis_moments,
    lna_moments,
    near_optimal_threshold,
    nolna_moments,
    q_function,
)
from .channel import ChannelRealization, bdpr, channels_with_bdpr, draw_channels
from .config import (
    LNA,
    NO_LNA,
    PAPER_DEFAULTS,
    SystemParams,
    db_to_power_gain,
    dbm_to_watts,
    load_scenario,
    read_scenario,
    watts_to_dbm,
)
from .errors import (
    AmbclinkError,
    ConfigError,
    EstimationError,
    ModelValidityError,
    NoSeparationError,
    UndefinedRatioError,
)
from .estimation import (
    PilotPlan,
    estimate_moments,
    estimated_threshold,
    relative_threshold_error,
)
from .frontend import SymbolFrame, generate_frame, symbol_energies
from .montecarlo import (
    BerPoint,
    SweepSpec,
    TrialResult,
    ber_trial,
    detect,
    run_pilot_sweep,
    run_sweep,
)

__all__ = [
    "AmbclinkError",
    "BerPoint",
    "ChannelRealization",
    "ConfigError",
    "EstimationError",
    "HypothesisMoments",
    "ModelValidityError",
    "NoSeparationError",
    "UndefinedRatioError",
    "LNA",
    "NO_LNA",
    "PAPER_DEFAULTS",
    "PilotPlan",
    "SweepSpec",
    "SymbolFrame",
    "SystemParams",
    "TrialResult",
    "bdpr",
    "ber_closed_form",
    "ber_trial",
    "channels_with_bdpr",
    "db_to_power_gain",
    "dbm_to_watts",
    "deflection_lna_approx",
    "deflection_lna_full",
    "deflection_no_lna",
    "detect",
    "draw_channels",
    "estimate_moments",
    "estimated_threshold",
    "generate_frame",
    "hypothesis_moments",
    "lna_moments",
    "load_scenario",
    "near_optimal_threshold",
    "nolna_moments",
    "q_function",
    "read_scenario",
    "relative_threshold_error",
    "run_pilot_sweep",
    "run_sweep",
    "symbol_energies",
    "watts_to_dbm",
]
