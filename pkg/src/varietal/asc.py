"""Clustering unions of subspaces by fitting and differentiating vanishing polynomials.

The pipeline, for ``n`` linear subspaces:

1. stack the degree-``n`` Veronese embeddings of the points (rows normalized
   to unit length) and take the null space of that matrix; its columns are
   the coefficient vectors p_1 ... p_s of the degree-``n`` polynomials
   vanishing on the data;
2. at each data point, the gradients of p_1 ... p_s span the orthogonal
   complement of the subspace through that point, so each point yields a
   subspace estimate;
3. group points whose estimates agree, then refit each cluster's subspace
   from its members.

For affine subspaces the same machinery runs on homogeneous coordinates
``(1, x)`` in one more dimension, and each cluster's affine flat is recovered
from the pooled gradient span via
:func:`varietal.subspaces.recover_affine_from_gradients`.

The module also certifies the sample-quality hypothesis behind the method:
points are *in general position* when they pin down the same degree-``n``
vanishing polynomials as the union itself, checked against a seeded sampling
oracle.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateData,
    GroupingFailure,
    NoVanishingDegree,
    PointsOffModel,
    TooFewPoints,
    ZeroGradients,
)
from .numerics import (
    DEFAULT_TOL,
    ToleranceConfig,
    largest_principal_angle,
    null_space_with_spectrum,
    orthonormal_complement,
    orthonormalize,
)
from .polynomials import (
    HomogeneousPoly,
    monomial_basis_size,
    veronese_jacobian,
    veronese_matrix,
)
from .subspaces import (
    LinearSubspace,
    UnionOfAffine,
    UnionOfLinear,
    distances_to_model,
    embed_affine_union,
    homogenize_points,
    model_to_json,
    recover_affine_from_gradients,
    sample_union,
    samples_to_arrays,
)

ORACLE_SEED = 0xA5C
_ORACLE_SAMPLES_FACTOR = 10


@dataclass
class VanishingBasis:
    """Orthonormal basis of the degree-``degree`` polynomials vanishing on a data set.

    ``polys`` is ``M x s`` with orthonormal columns in coefficient space,
    ``M = monomial_basis_size(degree, num_vars)``; ``s`` may be zero.
    """

    degree: int
    num_vars: int
    polys: np.ndarray = field(repr=False)
    singular_values: np.ndarray = field(default=None, repr=False)

    @property
    def s(self):
        return self.polys.shape[1]

    def gradients_at(self, x):
        """Gradients of every basis polynomial at ``x``, stacked as rows (s x V)."""
        return self.polys.T @ veronese_jacobian(x, self.degree)

    def polynomials(self):
        """The basis columns as polynomial values."""
        return [HomogeneousPoly(self.num_vars, self.degree, col)
                for col in self.polys.T]

    def evaluate_at(self, points):
        """Values of every basis polynomial at each point, shape (N, s)."""
        return veronese_matrix(points, self.degree) @ self.polys


@dataclass
class ClusterConfig:
    """Knobs for the clustering pipelines.

    ``degree`` defaults to ``n_subspaces``; when both are absent the degree
    is estimated as the smallest one admitting a well-determined vanishing
    polynomial (bounded by ``max_degree``) and the number of clusters is
    whatever the grouping finds.
    """

    n_subspaces: int = None
    degree: int = None
    tolerances: ToleranceConfig = DEFAULT_TOL
    grouping_angle: float = 1e-3
    affine: bool = False
    max_degree: int = 5

    def __post_init__(self):
        if self.n_subspaces is not None and self.n_subspaces < 1:
            raise ValueError("n_subspaces must be positive")
        if self.degree is None:
            self.degree = self.n_subspaces
        if self.degree is not None and self.degree < 1:
            raise ValueError("degree must be >= 1")
        if not (0.0 < self.grouping_angle < np.pi / 2):
            raise ValueError("grouping_angle must lie in (0, pi/2)")


@dataclass
class ClusteringResult:
    """Labels, recovered models and fitting diagnostics for one clustering run."""

    labels: np.ndarray
    models: object                      # UnionOfLinear or UnionOfAffine
    per_point_dims: np.ndarray
    diagnostics: dict
    basis: VanishingBasis = None        # the fitted vanishing polynomials

    def to_json(self):
        return {
            "labels": [int(v) for v in self.labels],
            "models": model_to_json(self.models),
            "diagnostics": {
                "s": int(self.diagnostics["s"]),
                "singular_values": [float(v) for v in self.diagnostics["singular_values"]],
                "per_point_dims": [int(v) for v in self.per_point_dims],
                "residuals": [float(v) for v in self.diagnostics["residuals"]],
            },
        }


def fit_vanishing_basis(points, degree, tol=DEFAULT_TOL):
    """Fit the degree-``degree`` vanishing polynomials of a point set.

    Builds the ``N x M`` matrix whose rows are the Veronese embeddings of the
    points, normalized to unit length so that point magnitudes do not skew
    the rank threshold, and returns its null space as a
    :class:`VanishingBasis` (``s`` may be 0).

    Raises
    ------
    DegenerateData
        If every point is zero.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(1, -1)
    if points.shape[0] < 1:
        raise DegenerateData("need at least one point")
    V = veronese_matrix(points, degree)
    norms = np.linalg.norm(V, axis=1)
    if np.all(norms == 0.0):
        raise DegenerateData("all points are zero; no polynomial structure to fit")
    rows = norms > 0.0
    V[rows] = V[rows] / norms[rows, None]
    polys, svals = null_space_with_spectrum(V, tol)
    return VanishingBasis(degree, points.shape[1], polys, svals)


def _gradient_svd(basis, x, tol):
    """SVD of the stacked gradients at ``x``: (complement, rank, conditioning)."""
    G = basis.gradients_at(x)
    _, s, vh = np.linalg.svd(G, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        raise ZeroGradients("every basis gradient vanishes at the point")
    cutoff = tol.rank_rtol * s[0] * max(G.shape)
    rank = int(np.sum(s > cutoff))
    if rank == 0:
        raise ZeroGradients("every basis gradient vanishes at the point")
    return vh[:rank].T, rank, float(s[rank - 1]), G


def estimate_subspace_at_point(basis, x, tol=DEFAULT_TOL):
    """Estimate the subspace through ``x`` from the basis gradients.

    The gradients of the vanishing polynomials at ``x`` span the orthogonal
    complement of the subspace containing ``x``; the rank of that span is
    decided by the shared tolerance rule.

    Raises
    ------
    ZeroGradients
        If every gradient is numerically zero: the query point is zero,
        sits at an intersection of subspaces, or the basis is empty.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    if np.linalg.norm(x) == 0.0:
        raise ZeroGradients("query point is zero")
    if basis.s == 0:
        raise ZeroGradients("basis is empty")
    comp, _, _, _ = _gradient_svd(basis, x, tol)
    return LinearSubspace(basis.num_vars, orthonormal_complement(comp), comp)


@dataclass
class _PointEstimate:
    complement: np.ndarray
    rank: int
    score: float
    grads: np.ndarray


def _estimate_all_points(basis, points, tol):
    estimates = []
    for x in points:
        try:
            if np.linalg.norm(x) == 0.0:
                raise ZeroGradients("zero point")
            comp, rank, score, grads = _gradient_svd(basis, x, tol)
            estimates.append(_PointEstimate(comp, rank, score, grads))
        except ZeroGradients:
            estimates.append(None)
    return estimates


def _group_points(points, estimates, grouping_angle, tol, n_target):
    """Greedy grouping of per-point subspace estimates.

    Clusters are seeded by the best-conditioned unassigned estimate (largest
    smallest-retained singular value of the gradient span, ties to the lower
    point index).  A cluster absorbs every unassigned point whose estimated
    codimension matches the seed's and whose estimate is within
    ``grouping_angle`` of the seed's (largest principal angle), or whose
    point lies on the seed's subspace within the residual tolerance.  Points
    without a usable estimate (intersections) are deferred to a final
    nearest-subspace pass, as are any points left when the target number of
    clusters has been reached.
    """
    N = len(points)
    unassigned = [j for j in range(N) if estimates[j] is not None]
    deferred = [j for j in range(N) if estimates[j] is None]
    clusters = []

    while unassigned and (n_target is None or len(clusters) < n_target):
        seed = max(unassigned, key=lambda j: (estimates[j].score, -j))
        comp_c = estimates[seed].complement
        rank_c = estimates[seed].rank
        members = []
        rest = []
        for j in unassigned:
            e = estimates[j]
            absorbed = False
            if e.rank == rank_c:
                if largest_principal_angle(e.complement, comp_c) <= grouping_angle:
                    absorbed = True
                else:
                    x = points[j]
                    resid = np.linalg.norm(comp_c.T @ x)
                    absorbed = resid <= tol.residual_tol * (1.0 + np.linalg.norm(x))
            (members if absorbed else rest).append(j)
        clusters.append({"members": members, "complement": comp_c, "rank": rank_c})
        unassigned = rest

    leftover = unassigned + deferred
    return clusters, leftover


def _refit_cluster_subspaces(points, clusters, tol):
    refits = []
    for cluster in clusters:
        span = points[cluster["members"]]
        basis = orthonormalize(span.T, tol)
        refits.append(LinearSubspace(points.shape[1], basis,
                                     orthonormal_complement(basis)))
    return refits


def _assign_leftovers(points, leftover, refits, labels):
    for j in leftover:
        dists = [np.linalg.norm(sub.complement.T @ points[j]) for sub in refits]
        labels[j] = int(np.argmin(dists))


def _resolve_degree(points, config, tol):
    if config.degree is not None:
        return config.degree
    return estimate_num_subspaces(points, config.max_degree, tol)


def _diagnostics(basis, points):
    residuals = (np.abs(basis.evaluate_at(points)).max(axis=1)
                 if basis.s else np.zeros(len(points)))
    return {
        "s": basis.s,
        "singular_values": basis.singular_values,
        "residuals": residuals,
    }


def _run_grouping(points, config, tol):
    degree = _resolve_degree(points, config, tol)
    basis = fit_vanishing_basis(points, degree, tol)
    if basis.s == 0:
        raise TooFewPoints(
            f"no degree-{degree} vanishing polynomial found; the sample cannot "
            f"determine a null space (need more points on a degree-{degree} "
            "arrangement, or a different degree)"
        )
    estimates = _estimate_all_points(basis, points, tol)
    clusters, leftover = _group_points(
        points, estimates, config.grouping_angle, tol, config.n_subspaces
    )
    if config.n_subspaces is not None and len(clusters) != config.n_subspaces:
        raise GroupingFailure(
            f"grouping found {len(clusters)} clusters, expected {config.n_subspaces}"
        )

    labels = np.full(len(points), -1, dtype=int)
    for idx, cluster in enumerate(clusters):
        labels[cluster["members"]] = idx
    refits = _refit_cluster_subspaces(points, clusters, tol)
    _assign_leftovers(points, leftover, refits, labels)

    dims = np.array(
        [points.shape[1] - e.rank if e is not None else -1 for e in estimates],
        dtype=int,
    )
    return degree, basis, estimates, clusters, labels, refits, dims


def cluster_linear(points, config=None):
    """Cluster points drawn from a union of linear subspaces.

    Parameters
    ----------
    points : array_like, shape (N, D)
    config : ClusterConfig

    Returns
    -------
    ClusteringResult
        ``labels`` in ``[0, n)``, recovered :class:`UnionOfLinear` models
        (each cluster's subspace refit from its members' span), the estimated
        subspace dimension at each point (-1 where no estimate exists), and
        fitting diagnostics.
    """
    config = config or ClusterConfig()
    tol = config.tolerances
    points = np.asarray(points, dtype=float)
    _, basis, _, _, labels, refits, dims = _run_grouping(points, config, tol)
    models = UnionOfLinear(refits)
    diag = _diagnostics(basis, points)
    return ClusteringResult(labels, models, dims, diag, basis)


def cluster_affine(points, config=None):
    """Cluster points drawn from a union of affine subspaces.

    Runs the linear pipeline on homogeneous coordinates ``(1, x)`` in
    R^(D+1), then recovers each affine flat from the pooled gradients of the
    cluster's member points.  Labels index the original points;
    ``per_point_dims`` reports affine dimensions (the lifted estimate minus
    the homogeneous direction).

    Returns
    -------
    ClusteringResult with a :class:`UnionOfAffine` in ``models``.
    """
    config = config or ClusterConfig()
    tol = config.tolerances
    points = np.asarray(points, dtype=float)
    lifted = homogenize_points(points)
    _, basis, estimates, clusters, labels, _, dims = _run_grouping(
        lifted, config, tol
    )
    flats = []
    for cluster in clusters:
        pooled = np.vstack([estimates[j].grads for j in cluster["members"]])
        flats.append(recover_affine_from_gradients(pooled, tol))
    models = UnionOfAffine(flats)
    dims = np.where(dims >= 0, dims - 1, dims)
    diag = _diagnostics(basis, lifted)
    return ClusteringResult(labels, models, dims, diag, basis)


@dataclass
class GeneralPositionReport:
    """Whether a sample pins down the same vanishing polynomials as its model."""

    in_general_position: bool
    s_data: int
    s_model: int

    def to_json(self):
        return {
            "in_general_position": self.in_general_position,
            "s_data": self.s_data,
            "s_model": self.s_model,
        }


def check_general_position(points, model, degree=None, tol=DEFAULT_TOL,
                           oracle_seed=ORACLE_SEED):
    """Certify that a sample is in general position in its union.

    A sample is in general position when the degree-``n`` polynomials
    vanishing on it coincide with those vanishing on the whole union.  The
    union's side of the comparison is realized by a sampling oracle: a dense,
    seeded sample (10 * M per subspace) whose vanishing space is taken as the
    model's.  The check passes when the two null spaces have equal dimension
    and agree as subspaces of coefficient space.

    For an affine model the points are given in the original coordinates;
    both the data and the oracle samples are lifted to homogeneous
    coordinates before fitting.  For a linear model (for example a lifted
    union) the oracle samples the linear subspaces themselves.

    Parameters
    ----------
    points : array_like, shape (N, D)
    model : UnionOfAffine or UnionOfLinear
    degree : int, optional
        Defaults to the number of subspaces in the model.

    Raises
    ------
    PointsOffModel
        If some point is farther than the residual tolerance from the model.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(1, -1)
    if degree is None:
        degree = model.n
    affine = isinstance(model, UnionOfAffine)

    dists = distances_to_model(points, model)
    limits = tol.residual_tol * (1.0 + np.linalg.norm(points, axis=1))
    bad = np.nonzero(dists > limits)[0].tolist()
    if bad:
        raise PointsOffModel(
            f"{len(bad)} point(s) do not lie on the model: rows {bad[:10]}", rows=bad
        )

    data_points = homogenize_points(points) if affine else points
    num_vars = data_points.shape[1]
    per_subspace = _ORACLE_SAMPLES_FACTOR * monomial_basis_size(degree, num_vars)
    oracle, _ = samples_to_arrays(
        sample_union(model, per_subspace, seed=oracle_seed)
    )
    if affine:
        oracle = homogenize_points(oracle)

    fit_data = fit_vanishing_basis(data_points, degree, tol)
    fit_model = fit_vanishing_basis(oracle, degree, tol)
    agree = fit_data.s == fit_model.s
    if agree and fit_data.s > 0:
        angle = largest_principal_angle(fit_data.polys, fit_model.polys)
        agree = angle <= tol.angle_tol
    return GeneralPositionReport(bool(agree), fit_data.s, fit_model.s)


def estimate_num_subspaces(points, max_degree, tol=DEFAULT_TOL):
    """Smallest degree with a well-determined vanishing polynomial.

    Degrees whose monomial basis outnumbers the sample are skipped: with
    fewer points than monomials the null space is nonzero for free and says
    nothing about the data.

    Raises
    ------
    NoVanishingDegree
        If no degree up to ``max_degree`` admits a determined vanishing
        polynomial.
    """
    if max_degree < 1:
        raise ValueError("max_degree must be >= 1")
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(1, -1)
    N, num_vars = points.shape
    skipped = []
    for degree in range(1, max_degree + 1):
        M = monomial_basis_size(degree, num_vars)
        if N < M:
            skipped.append((degree, M))
            continue
        if fit_vanishing_basis(points, degree, tol).s >= 1:
            return degree
    hint = "; ".join(f"degree {d} needs >= {M} points (have {N})"
                     for d, M in skipped)
    raise NoVanishingDegree(
        "no degree up to "
        f"{max_degree} admits a determined vanishing polynomial"
        + (f" ({hint})" if hint else "")
    )
