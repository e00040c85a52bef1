"""Exact arithmetic for brackets of vector-valued modular forms, index-m
two-variable forms through their theta decomposition, closed-form Petersson
pairings and adjoints, and a numerical verification layer.

The exact backend works over big rationals with symbolic transcendental
bookkeeping, so the structural identities of the theory hold with ``==``;
the float backend (mpmath) and the quadrature layer (numpy) cross-check
the closed-form values numerically.
"""

__version__ = "0.1.0"

from .errors import (
    BackendMismatchError,
    InternalConsistencyError,
    MetaMismatchError,
    OffsetMismatchError,
    PoleDegeneracyError,
    PrecisionError,
    RcvvError,
    SupportError,
)
from .symbolic import SymbolicValue
from .qseries import FourierSeries, add, agree_up_to, diag_pow, mul, scale, sub, to_float
from .vvforms import (
    BracketPlan,
    MultiplierData,
    VVForm,
    as_tensor,
    bracket_plan,
    gamma_ratio,
    gen_binomial,
    rc_bracket,
    scalar_form,
    swap_slots,
    tensor_meta,
    vv_add,
    vv_scale,
    vv_sub,
)
from .jacobi import (
    JacobiCoefficientView,
    ThetaComponentForm,
    heat_apply,
    heat_eigenvalue,
    jacobi_rc_bracket,
    theta_decompose,
    theta_recompose,
    theta_series,
)
from .skewjacobi import (
    SkewCoefficientView,
    SkewThetaForm,
    conj_derivative,
    skew_rc_bracket,
    skew_theta_decompose,
    skew_theta_recompose,
)
from .pairing import (
    AdjointResult,
    DualModeReport,
    PairingResult,
    bracket_adjoint,
    bracket_pairing,
    jacobi_bracket_adjoint,
    jacobi_bracket_pairing,
    poincare_pairing,
    skew_bracket_adjoint,
    skew_bracket_pairing,
)
from .numcheck import (
    CosetRep,
    NumericResult,
    QuadratureSpec,
    coset_reps,
    petersson_integral,
    poincare_batch,
    poincare_eval,
    series_evaluator,
)
