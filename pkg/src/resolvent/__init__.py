"""Exact resolution of matrices and complexes of free modules over affine charts."""

__version__ = "0.1.0"

from .errors import (
    ContextMismatch,
    DegreeCapExceeded,
    DepthExceeded,
    InputError,
    InvalidArgument,
    MatrixTooLarge,
    NoCommonLeaf,
    NotPrincipal,
    NoUnitPivot,
    ParseError,
    PointOffChart,
    RankDimensionMismatch,
    ResolventError,
    UndecidedPrincipality,
    UnknownVariable,
    UnsupportedProblem,
    VerificationFailure,
    ZeroCenter,
)
from .polys import GREVLEX, LEX, MonomialOrder, Poly, block_order, divide_multivariate
from .parsing import parse_poly
from .ideals import (
    Ideal,
    MembershipCertificate,
    eliminate,
    groebner,
    ideal_equal,
    is_principal,
    member,
    saturate,
)
from .charts import Atlas, Chart, RingMap, apply_map, compose, is_dominant_heuristic, is_unit, pull_ideal
from .matrices import (
    ComplexOnChart,
    MatrixHom,
    base_change_check,
    determinantal_ideal,
    direct_sum,
    image_rank,
    is_regular_point,
    kernel_fiber_dimension,
    kernel_module,
    pullback_hom,
)
from .diagonalize import (
    DiagCert,
    KernelBasis,
    diagonalize_on_chart,
    is_locally_diagonalizable,
    kernel_basis,
    pullback_cert,
    verify_cert,
)
from .blowup import BlowupStep, BlowupTower, blowup, determinantal_tower, tower_leaf_maps
from .resolve import (
    Presentation,
    ResolutionResult,
    base_change_verify,
    fitting_ideal,
    fitting_independence_check,
    resolve_complex,
    torsion_check,
)
from .euler import (
    ChernTotal,
    DivisorClass,
    Geometry,
    GradedMatrix,
    chern_of_split,
    euler_number,
    euler_of_matrix,
    independence_harness,
    intersection_pairing,
    splitting_type_P1,
)
