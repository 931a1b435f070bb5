"""Exact support rigidity for affine subspace arrangements over F_p^n.

Classify pairs of affine subspaces of a dual pair as thin, perfect, or
thick; compute the space of distributions with constrained support and
constrained Fourier support by an exact cyclotomic kernel; and decompose its
members constructively into one component per perfect pair.
"""

from .affine import (
    AffineSubspace,
    DualPair,
    E_SIDE,
    F_SIDE,
    LinearSubspace,
    PairClass,
    affine_contains,
    affine_difference,
    affine_from_gens,
    affine_full,
    affine_intersection,
    affine_point,
    affine_subspace,
    affine_translate,
    classify_linear,
    classify_pair,
    identity_pair,
    linear_span,
    perp,
    subspace_intersection,
    subspace_sum,
)
from .arrangement import (
    Arrangement,
    group_by_linear_part,
    has_thick_pair,
    induction_pick,
    meet_family,
    perfect_pairs,
    prune_thin,
)
from .errors import (
    CertificateNotFound,
    ConstancyViolation,
    FamilyNotFound,
    HypothesisViolated,
    InputError,
    ModelTooSmall,
    RigidityError,
    SupportViolation,
    ThickPairPresent,
)
from .exactalg import (
    Field,
    Matrix,
    cyc_mul,
    kernel_basis,
    rref,
    solve_affine,
    zeta_pow,
)
from .finitemodel import (
    Distribution,
    FiniteSpace,
    delta,
    fourier,
    fourier_inverse,
    multiplier,
    restrict,
    space_basis,
    supported_in,
    translate,
    twisted_indicator,
    zero_distribution,
)
from .rigidity import (
    AvoidingFamily,
    DecompositionResult,
    check_elimination,
    decompose,
    find_avoiding_family,
    multiplier_cancel,
    pure_affine_split,
    split_off_block,
)

__version__ = "0.1.0"
