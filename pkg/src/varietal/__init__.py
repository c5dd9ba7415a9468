"""Algebraic clustering of unions of linear and affine subspaces.

A union of n linear subspaces is the zero set of homogeneous degree-n
polynomials; fitting those polynomials to data and differentiating them at a
point recovers the subspace through that point.  Affine subspaces are handled
by lifting points to homogeneous coordinates, which turns a union of affine
subspaces of R^D into a union of linear subspaces of R^(D+1).  The library
implements the polynomial machinery, the lift and its inverse, the clustering
pipelines, and certificates for the two hypotheses the method rests on
(transversality of the union, general position of the sample).
"""

import os as _os

_threads = _os.environ.get("VARIETAL_THREADS")
if _threads:
    # Must happen before numpy loads its BLAS backend.
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from . import errors
from .errors import VarietalError
from .numerics import (
    DEFAULT_TOL,
    ToleranceConfig,
    largest_principal_angle,
    null_space,
    null_space_with_spectrum,
    orthonormal_complement,
    orthonormalize,
    principal_angles,
    rank_by_largest_gap,
    rank_with_tol,
    solve_normal,
)
from .polynomials import (
    HomogeneousPoly,
    InhomogeneousPoly,
    Monomial,
    dehomogenize_poly,
    evaluate,
    gradient,
    homogenize_poly,
    monomial_basis_size,
    monomial_exponents,
    multiply_linear_forms,
    poly_from_json,
    veronese_embed,
    veronese_jacobian,
    veronese_matrix,
)
from .subspaces import (
    AffineSubspace,
    LabeledSample,
    LinearSubspace,
    TransversalityReport,
    UnionOfAffine,
    UnionOfLinear,
    affine_vanishing_generators,
    check_transversality,
    distance_to_affine,
    distance_to_linear,
    distance_to_model,
    distances_to_model,
    embed_affine_subspace,
    embed_affine_union,
    homogenize_points,
    model_from_json,
    model_to_json,
    random_affine_union,
    random_linear_union,
    recover_affine_from_gradients,
    sample_union,
    samples_to_arrays,
)
from .asc import (
    ORACLE_SEED,
    ClusterConfig,
    ClusteringResult,
    GeneralPositionReport,
    VanishingBasis,
    check_general_position,
    cluster_affine,
    cluster_linear,
    estimate_num_subspaces,
    estimate_subspace_at_point,
    fit_vanishing_basis,
)

__version__ = "0.1.0"
