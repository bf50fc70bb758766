"""Exceptional points, Jordan structures and metrics of small non-Hermitian matrices."""

from .errors import (
    BrokenRealityError,
    DegenerateChainError,
    DimensionError,
    DomainError,
    EPObstructionError,
    EpAtlasError,
    FactorizationError,
    IterationError,
    NoiseFloorError,
    NotAnEigenvalueError,
    NotFoundError,
    ParseError,
    SingularMatrixError,
    SpecMismatchError,
)
from .io import load_matrix, save_matrix
from .jordan import JordanStructure, cluster_eigenvalues, ep_classify, jordan_structure_at
from .linalg import (
    DEFAULT_TOL,
    Polynomial,
    ToleranceConfig,
    char_poly,
    det,
    eigenvalues,
    multiset_distance,
    null_space,
    poly_roots,
    rank,
    solve_affine,
)
from .metric import construct_positive_metric, factor_metric, hermitize, metric_condition, sylvester_metric_basis
from .models import (
    MODELS,
    ModelError,
    ModelSpec,
    build,
    corner,
    family,
    h6,
    h42_ep,
    h42_tilde,
    h222_ep,
    h222_pert,
    h222_tilde,
    jordan_block,
    jordan_pert,
    scaled_perturbation,
)
from .secular import cardano_roots, classify_point, energies_from_s, secular_coefficients
from .sweep import (
    discriminant,
    locate_ep_1d,
    reality_experiment,
    spectral_locus_2d,
    sweep_1d,
    unfolding_exponent,
)
from .transition import CanonicalJordanSpec, build_canonical_jordan, solve_transition, verify_transition

__version__ = "0.1.0"
