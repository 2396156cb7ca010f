"""Partial decomposition of Granger causality for multivariate time series.

Fit vector autoregressions, move to state-space form, compute spectral
Granger causality from any driver subset to a target, split it over the
redundancy lattice into unique, redundant and synergistic components, and
assess significance with amplitude-adjusted surrogates.
"""

from .exceptions import (
    EstimationError,
    NumericalError,
    ParseError,
    PdgcError,
    ValidationError,
)
from .series import (
    Band,
    FrequencyGrid,
    MultivariateSeries,
    load_csv,
    preprocess,
    write_csv,
)
from .var import VarModel, estimate_var, is_stable, select_order, simulate_var
from .state_space import (
    ReducedSsModel,
    StateSpaceModel,
    psd,
    reduce_ss,
    transfer_function,
    var_to_ss,
)
from .spectral import (
    GcValue,
    SpectralFunction,
    conditional_gc,
    integrate_band,
    spectral_gc,
    time_gc_from_variance,
)
from .lattice import (
    Atom,
    CoarseComponents,
    GcLattice,
    PdgcResult,
    build_lattice,
    classify_atom,
    coarse_grain,
    decompose,
    moebius_invert,
    spectral_redundancy,
)
from .surrogates import SignificanceReport, SurrogateConfig, iaaft, surrogate_test
from .scenarios import Scenario, get_scenario, scenario, scenario_names
from .estimator import PartialGCDecomposition

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "Band",
    "CoarseComponents",
    "EstimationError",
    "FrequencyGrid",
    "GcLattice",
    "GcValue",
    "MultivariateSeries",
    "NumericalError",
    "ParseError",
    "PartialGCDecomposition",
    "PdgcError",
    "PdgcResult",
    "ReducedSsModel",
    "Scenario",
    "SignificanceReport",
    "SpectralFunction",
    "StateSpaceModel",
    "SurrogateConfig",
    "ValidationError",
    "VarModel",
    "build_lattice",
    "classify_atom",
    "coarse_grain",
    "conditional_gc",
    "decompose",
    "estimate_var",
    "get_scenario",
    "iaaft",
    "integrate_band",
    "is_stable",
    "load_csv",
    "moebius_invert",
    "preprocess",
    "psd",
    "reduce_ss",
    "scenario",
    "scenario_names",
    "select_order",
    "simulate_var",
    "spectral_gc",
    "spectral_redundancy",
    "surrogate_test",
    "time_gc_from_variance",
    "transfer_function",
    "var_to_ss",
    "write_csv",
]
