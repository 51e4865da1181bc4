"""Siegel sets for SL(n,R): explicit coordinates, volumes, reduction, and
intersection bounds for the SL(n,Z) action.

The package cross-verifies every closed-form quantity three ways where
possible: exact symbolic algebra, independent numerical quadrature /
Monte Carlo, and exhaustive small-case enumeration.
"""

__version__ = "0.1.0"

from .errors import (
    DimensionTooLargeError,
    InvalidArgumentError,
    InvalidRangeError,
    InvalidWitnessError,
    MalformedConfigError,
    NonInvertibleError,
    NonPositiveEntryError,
    NotUnimodularError,
    RngExhaustedError,
    SiegelError,
    ToleranceNotMetError,
)
from .iwasawa import (
    IwasawaFactors,
    MINIMAL_PARAMS,
    NakFactors,
    SiegelParams,
    UnimodularIntMatrix,
    decompose,
    decompose_nak,
    recompose,
    siegel_membership,
)
from .haar import (
    MonteCarloReport,
    RngStream,
    SiegelCoordinatePoint,
    a_integral_mc,
    a_integral_quadrature,
    conjugation_jacobian,
    sample_haar_so,
    sample_siegel_point,
    siegel_density,
)
from .volumes import (
    GrowthRow,
    SymbolicVolume,
    growth_table,
    harder_volume,
    normalization_ratio,
    ratio_C,
    signed_perm_order,
    sphere_volume,
    vol_quotient,
    vol_siegel,
    vol_so,
    vol_symmetric_space,
    zeta,
)
from .reduction import ReductionResult, siegel_reduce
from .intersections import (
    IntersectionReport,
    PartitionAnalysis,
    count_bounds,
    enumerate_intersections,
    find_witness,
    finest_partition,
    height,
    height_bound,
    lemma_filter_chain,
    leading_entries,
)

__all__ = [
    "DimensionTooLargeError",
    "GrowthRow",
    "IntersectionReport",
    "InvalidArgumentError",
    "InvalidRangeError",
    "InvalidWitnessError",
    "IwasawaFactors",
    "MINIMAL_PARAMS",
    "MalformedConfigError",
    "MonteCarloReport",
    "NakFactors",
    "NonInvertibleError",
    "NonPositiveEntryError",
    "NotUnimodularError",
    "PartitionAnalysis",
    "ReductionResult",
    "RngExhaustedError",
    "RngStream",
    "SiegelCoordinatePoint",
    "SiegelError",
    "SiegelParams",
    "SymbolicVolume",
    "ToleranceNotMetError",
    "UnimodularIntMatrix",
    "a_integral_mc",
    "a_integral_quadrature",
    "conjugation_jacobian",
    "count_bounds",
    "decompose",
    "decompose_nak",
    "enumerate_intersections",
    "find_witness",
    "finest_partition",
    "growth_table",
    "harder_volume",
    "height",
    "height_bound",
    "leading_entries",
    "lemma_filter_chain",
    "normalization_ratio",
    "ratio_C",
    "recompose",
    "sample_haar_so",
    "sample_siegel_point",
    "siegel_density",
    "siegel_membership",
    "siegel_reduce",
    "signed_perm_order",
    "sphere_volume",
    "vol_quotient",
    "vol_siegel",
    "vol_so",
    "vol_symmetric_space",
    "zeta",
]
