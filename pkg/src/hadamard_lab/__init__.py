"""Construction, verification and equivalence testing of 6x6 complex Hadamard
matrices, including the non-affine family M6(x) connecting F6 and D6."""

from .catalogue import (
    CATALOGUE,
    AffineFamilyData,
    FamilyDescriptor,
    SingularParameter,
    ValidationFailed,
    bjorck_c6,
    d6_symmetric,
    dita_construction,
    dita_d6,
    fourier,
    load_affine_family,
    m6_discrete,
    m6_family,
    m6_one,
    tao_s6,
)
from .classify import SolutionReport, SymmetricAnsatz, classify_real_diagonal, solve, solve_pattern
from .completion import NoCompletion, RowCompletion, complete_row, haagerup_product
from .core import (
    CHMatrix,
    DimensionMismatch,
    Tolerances,
    UnitComplex,
    ZeroEntry,
    adjoint,
    conjugate,
    dephase,
    gram_residual,
    is_hadamard,
    transpose,
)
from .equivalence import (
    EquivalenceCertificate,
    LambdaSet,
    OrderTooLarge,
    are_equivalent,
    conjugate_equivalent,
    lambda_contains,
    lambda_equal,
    lambda_set,
)

__version__ = "0.1.0"
