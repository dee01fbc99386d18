"""Exact measures and permutation-module categories for the homeomorphism group of the Cantor set.

Everything reduces to finite combinatorics on bitmask-encoded subsets of
finite products: orbit decompositions (``gsets``), the two regular measures
(``measures``), block-matrix categories (``permcat``) and matrix monoid
algebras over F2 and the Boolean semiring (``linmon``).
"""

from .errors import ArgumentError, CantorPermError, CapacityError, IntegrityError
from .finsets import (
    FinSet,
    ProductSubset,
    SetMap,
    count_ample_power2,
    enumerate_ample,
    fiber_image,
    fiber_product_subset,
    is_ample,
    project_subset,
)
from .gsets import (
    EqRelFamily,
    FormalGSet,
    GMap,
    QuotientDescription,
    TransitivePiece,
    eqrel_classify,
    eqrel_from_group,
    eqrel_validate,
    multiway_orbit_decompose,
    x_product_decompose,
    y_set_decompose,
)
from .linmon import (
    AlgebraReport,
    MonAlgElement,
    SRMatrix,
    enumerate_nonzero,
    find_trace_witness,
    gram_matrix,
    phi,
    phi_linear,
    radical_basis,
    semisimplicity_report,
    sr_kron,
    sr_multiply,
)
from .measures import (
    MU,
    NU,
    MeasureSpec,
    ThetaElement,
    eval_measure,
    map_measure,
    quotient_measure,
    solve_regular_parameters,
    theta_arith,
    theta_of,
    y_measure,
)
from .permcat import (
    PermMatrix,
    PermObject,
    compose,
    convert_basis,
    dimension,
    duality_data,
    identity_matrix,
    indicator_matrix,
    tensor_matrix,
    trace,
    y_object,
)

__version__ = "0.1.0"

__all__ = [
    "ArgumentError",
    "CantorPermError",
    "CapacityError",
    "IntegrityError",
    "FinSet",
    "ProductSubset",
    "SetMap",
    "count_ample_power2",
    "enumerate_ample",
    "fiber_image",
    "fiber_product_subset",
    "is_ample",
    "project_subset",
    "EqRelFamily",
    "FormalGSet",
    "GMap",
    "QuotientDescription",
    "TransitivePiece",
    "eqrel_classify",
    "eqrel_from_group",
    "eqrel_validate",
    "multiway_orbit_decompose",
    "x_product_decompose",
    "y_set_decompose",
    "AlgebraReport",
    "MonAlgElement",
    "SRMatrix",
    "enumerate_nonzero",
    "find_trace_witness",
    "gram_matrix",
    "phi",
    "phi_linear",
    "radical_basis",
    "semisimplicity_report",
    "sr_kron",
    "sr_multiply",
    "MU",
    "NU",
    "MeasureSpec",
    "ThetaElement",
    "eval_measure",
    "map_measure",
    "quotient_measure",
    "solve_regular_parameters",
    "theta_arith",
    "theta_of",
    "y_measure",
    "PermMatrix",
    "PermObject",
    "compose",
    "convert_basis",
    "dimension",
    "duality_data",
    "identity_matrix",
    "indicator_matrix",
    "tensor_matrix",
    "trace",
    "y_object",
]
