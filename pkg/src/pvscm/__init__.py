"""Screening-curve estimation of household PV + battery sizing, with the
exact LP sizing problem alongside for verification."""

from .domain import (
    Scenario,
    SizingEstimate,
    TariffAndCostParams,
    validate_scenario,
    viability,
)
from .scm import (
    ScreeningCurveSet,
    SliceDecomposition,
    build_curves,
    decompose,
    estimate_sizing,
)

__version__ = "0.1.0"

__all__ = [
    "Scenario",
    "SizingEstimate",
    "TariffAndCostParams",
    "validate_scenario",
    "viability",
    "ScreeningCurveSet",
    "SliceDecomposition",
    "build_curves",
    "decompose",
    "estimate_sizing",
    "__version__",
]
