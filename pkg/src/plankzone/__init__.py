"""Constructive checks of the sharp real plank (zone) theorem.

Every set of n unit vectors admits a vector v of norm sqrt(n) with
|<v_k, v>| >= sqrt(n) sin(pi/2n).  This package finds such witnesses through
inverse eigenvectors of the Gram matrix and exercises the trigonometric
polynomial machinery behind the bound.
"""

from plankzone.errors import (
    CertificationError,
    ConvergenceError,
    NormalizationError,
    PreconditionError,
    UnsupportedInputError,
)
from plankzone.geom_core import (
    GramMatrix,
    SignPattern,
    UnitVectorSet,
    Zone,
    extremal_configuration,
    gram,
    kernel_basis,
    zone_covers,
)
from plankzone.inverse_eigen import (
    InverseEigenSolution,
    enumerate_all,
    residual,
    solve_dual,
    solve_in_quadrant,
    verify_w_bounds,
)
from plankzone.witness import (
    ConjugatedMatrix,
    WitnessResult,
    build_M,
    certify_zone_bound,
    check_M_bounds,
    maximize_product,
    witness_from_w,
)

__version__ = "0.1.0"
