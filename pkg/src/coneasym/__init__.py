"""Limit operators and convergence certificates for positive matrices and
positive matrix semigroups on the nonnegative orthant."""
from .exceptions import (
    HypothesisError,
    MultipleFixedPointsError,
    NotConvergedError,
    NotFixedPointError,
    RegularityError,
    SpectralRadiusError,
    UnboundedPowersError,
)
from .ordered_space import (
    ConeSpace,
    DualBase,
    OrderUnit,
    dual_base,
    in_cone,
    in_interior,
    nonflat_decompose,
    order_le,
    u_norm,
)
from .operator import PositiveOperator, op_norm
from .oscillation import (
    OscillationTrace,
    RateCertificate,
    certify_rate,
    limit_functional,
    oscillation_step,
    trace_basis,
    trace_until,
)
from .asymptotics import (
    FundamentalInverse,
    LimitDecomposition,
    check_simple_eigenvalue,
    corollary1_check,
    find_positivity_index,
    find_uniform_index,
    fundamental_inverse,
    limit_decomposition,
    normalize_spectral_radius,
    perron_vector,
)

__version__ = "0.1.0"
