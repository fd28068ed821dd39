"""Numerics for hyperbolic polynomial systems (V, p, e).

Eigenvalue maps, semi-inner products, cone queries, derivative systems,
scaled and Jordan frame verification, minimality certificates, and
majorization through doubly stochastic maps.
"""

from .errors import (
    DimensionMismatch,
    HyperbolicityViolation,
    HyperError,
    InputError,
    InvalidDirection,
    NotHomogeneous,
    PreconditionError,
)
from .frames import (
    FrameSet,
    certify_minimality,
    derivative_persistence_check,
    frame_combination_spectrum,
    jordan_product,
    verify_jordan_frame,
    verify_scaled_frame,
)
from .majorize import (
    adjoint_S,
    build_T,
    diag_operator,
    hlp_transfer,
    majorizes,
    verify_ds_map,
    verify_e_ds_tuple,
    verify_lambda_ds_tuple,
)
from .poly import Polynomial, elementary_symmetric
from .roots import all_roots
from .system import (
    SystemDef,
    Tolerances,
    cone_membership,
    derivative_system,
    eigenvalues,
    eigenvalues_many,
    new_system,
    rank,
    redirect,
    semi_inner_product,
    trace,
    verify_hyperbolic,
)

__version__ = "0.1.0"
