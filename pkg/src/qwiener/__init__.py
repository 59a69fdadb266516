"""Computational quaternionic Wiener algebras.

Arithmetic and invertibility in the discrete, continuous, and almost-periodic
quaternionic Wiener algebras; Wiener-Hopf factorization with partial indices;
canonical factorization of rational symbols through state-space realizations;
and half-line difference and convolution solvers driven by those
factorizations.
"""

from .errors import (
    DegreeCapExceeded,
    DimensionMismatch,
    GridTooCoarse,
    ImproperInput,
    InternalInvariantViolation,
    MathematicalObstruction,
    NotInvertible,
    NotInvertibleOnCircle,
    NotScalar,
    ObstructionConditionI,
    ObstructionConditionII,
    OutOfScope,
    PoleOnBoundary,
    PoleOnCircle,
    QWienerError,
    ResidualTooLarge,
    SingularPencil,
    SingularPoint,
    SymbolNotInvertible,
    SymbolNotRational,
    SymmetryResidualTooLarge,
    SymmetryViolation,
    TailTooHeavy,
    TruncationBudgetExceeded,
)
from .quaternions import (
    DEFAULT_FRAME,
    E1,
    E2,
    E3,
    ONE,
    QMatrix,
    Quaternion,
    SliceFrame,
    ZERO,
    column_embedding,
    complex_adjoint,
    complex_adjoint_inverse,
    operator_norm,
    qmul,
    right_independent,
    slice_frame_through,
    symplectic_defect,
    symplectic_unit,
)

from .series import (
    ComplexLaurentSeries,
    InvertibilityCertificate,
    LaurentQSeries,
    embed_symbol,
    evaluate,
    is_invertible,
    pullback_symbol,
    star_conj,
    star_inverse,
    star_mul,
    winding_index,
)

from .apw import (
    APPart,
    BElement,
    BInvertibilityCertificate,
    ComplexBElement,
    L1Part,
    b_conj,
    b_embed,
    b_evaluate,
    b_is_invertible,
    b_star_inverse,
    b_star_mul,
)

from .factorize import (
    BarrierSolution,
    FactorizationResult,
    SolutionSet,
    factor_continuous,
    factor_discrete,
    solve_barrier_complex,
    standard_solution_set,
    symmetrize_solution_set,
    verify_factorization,
)
from .realize import (
    CanonicalFactorization,
    ProjectionData,
    RationalQMatrix,
    Realization,
    assemble_realization,
    canonical_factorize,
    eval_realization,
    pole_free_on_sphere,
    realize_polynomial,
    realize_proper,
    riesz_projections,
    split_proper_polynomial,
)
from .halfline import (
    ConvolutionOperator,
    DifferenceOperator,
    GridFunction,
    SolveReport,
    apply_convolution,
    apply_difference,
    index_of_symbol,
    moment_test,
    op_V,
    shift_U,
    solve_convolution,
    solve_difference,
)

__version__ = "0.1.0"
