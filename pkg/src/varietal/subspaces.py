"""Linear and affine subspace models, their unions, and the lift to homogeneous coordinates.

A :class:`LinearSubspace` stores both an orthonormal basis of the subspace and
an orthonormal basis of its orthogonal complement, kept mutually consistent.
An :class:`AffineSubspace` adds a translation vector, always reduced to the
complement of the linear part (the component along the subspace is
unidentifiable, so the reduced representative is the canonical one).

The central construction is the embedding of a union of affine subspaces of
R^D into a union of linear subspaces of R^(D+1): a point ``x`` maps to
``(1, x)``, and the flat ``S + mu`` maps to the span of ``(1; mu)`` and
``(0; u_1) ... (0; u_d)``.  The complement of the lifted subspace is spanned
by the vectors ``(-b_j . mu ; b_j)`` built from the complement vectors
``b_j`` of ``S``.

Also provided: a transversality certificate for unions (every partial
intersection as small as the codimensions allow, certified by rank tests on
concatenated complement bases), the expansion of the degree-n generators that
cut out an affine union, the inverse map from gradient vectors at an embedded
point back to an affine subspace, and a seeded sampler for synthetic data.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateGradients,
    DimensionMismatch,
    NonFiniteInput,
    ProductCountOverflow,
)
from .numerics import (
    DEFAULT_TOL,
    largest_principal_angle,
    orthonormal_complement,
    orthonormalize,
    rank_with_tol,
    solve_normal,
)
from .polynomials import InhomogeneousPoly, inhomogeneous_exponents

_MAX_TRANSVERSALITY_SUBSPACES = 10
_GENERATOR_CAP = 10**6


def _lock(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass
class LinearSubspace:
    """A linear subspace of R^D held as basis plus orthonormal complement.

    Attributes
    ----------
    ambient_dim : int
    basis : ndarray, shape (D, d)
        Orthonormal columns spanning the subspace.
    complement : ndarray, shape (D, D - d)
        Orthonormal columns spanning the orthogonal complement.
    """

    ambient_dim: int
    basis: np.ndarray = field(repr=False)
    complement: np.ndarray = field(repr=False)

    def __post_init__(self):
        basis = _lock(self.basis)
        comp = _lock(self.complement)
        D = self.ambient_dim
        if basis.shape[0] != D or comp.shape[0] != D:
            raise DimensionMismatch("basis and complement must have D rows")
        d, c = basis.shape[1], comp.shape[1]
        if d + c != D:
            raise DimensionMismatch(f"dim {d} + codim {c} != ambient {D}")
        eye_d, eye_c = np.eye(d), np.eye(c)
        if not np.allclose(basis.T @ basis, eye_d, atol=1e-10):
            raise DimensionMismatch("basis columns are not orthonormal")
        if not np.allclose(comp.T @ comp, eye_c, atol=1e-10):
            raise DimensionMismatch("complement columns are not orthonormal")
        if d and c and not np.allclose(basis.T @ comp, 0.0, atol=1e-10):
            raise DimensionMismatch("basis and complement are not orthogonal")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "complement", comp)

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def codim(self):
        return self.complement.shape[1]

    @classmethod
    def from_basis(cls, basis):
        basis = np.asarray(basis, dtype=float)
        return cls(basis.shape[0], basis, orthonormal_complement(basis))

    @classmethod
    def from_complement(cls, complement):
        complement = np.asarray(complement, dtype=float)
        return cls(complement.shape[0], orthonormal_complement(complement), complement)

    @classmethod
    def from_spanning(cls, vectors, tol=DEFAULT_TOL):
        """Subspace spanned by the given (possibly dependent) column vectors."""
        basis = orthonormalize(np.asarray(vectors, dtype=float), tol)
        return cls.from_basis(basis)


@dataclass
class AffineSubspace:
    """An affine subspace ``S + mu`` with ``mu`` reduced to the complement of S.

    ``coords`` holds the coordinates of the translation in the complement
    basis, ``mu = complement @ coords``.
    """

    linear_part: LinearSubspace
    translation: np.ndarray = field(repr=False)
    coords: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        mu = np.asarray(self.translation, dtype=float).reshape(-1)
        if mu.shape[0] != self.linear_part.ambient_dim:
            raise DimensionMismatch("translation length must match ambient dim")
        if not np.all(np.isfinite(mu)):
            raise NonFiniteInput("translation contains non-finite entries")
        B = self.linear_part.complement
        coords = B.T @ mu
        object.__setattr__(self, "coords", _lock(coords))
        object.__setattr__(self, "translation", _lock(B @ coords))

    @property
    def ambient_dim(self):
        return self.linear_part.ambient_dim

    @property
    def dim(self):
        return self.linear_part.dim


def _check_data_subspace(sub, where):
    if not (0 < sub.dim < sub.ambient_dim):
        raise DimensionMismatch(
            f"{where}: data subspaces need 0 < dim < ambient, got dim "
            f"{sub.dim} in R^{sub.ambient_dim}"
        )


def _linear_parts_equal(a, b, tol):
    if a.dim != b.dim:
        return False
    if a.dim == 0:
        return True
    return largest_principal_angle(a.basis, b.basis) <= tol.angle_tol


@dataclass
class UnionOfLinear:
    """A finite union of pairwise-distinct linear subspaces of a common R^D."""

    subspaces: list

    def __post_init__(self, tol=DEFAULT_TOL):
        subs = list(self.subspaces)
        if not subs:
            raise DimensionMismatch("a union needs at least one subspace")
        D = subs[0].ambient_dim
        for s in subs:
            if s.ambient_dim != D:
                raise DimensionMismatch("all subspaces must share the ambient dim")
            _check_data_subspace(s, "UnionOfLinear")
        for i, j in itertools.combinations(range(len(subs)), 2):
            if _linear_parts_equal(subs[i], subs[j], tol):
                raise DimensionMismatch(f"subspaces {i} and {j} coincide")
        self.subspaces = subs

    @property
    def n(self):
        return len(self.subspaces)

    @property
    def ambient_dim(self):
        return self.subspaces[0].ambient_dim

    def to_affine(self):
        """The same union viewed as affine subspaces with zero translations."""
        zero = np.zeros(self.ambient_dim)
        return UnionOfAffine([AffineSubspace(s, zero) for s in self.subspaces])


@dataclass
class UnionOfAffine:
    """A finite union of pairwise-distinct affine subspaces of a common R^D."""

    subspaces: list

    def __post_init__(self, tol=DEFAULT_TOL):
        subs = list(self.subspaces)
        if not subs:
            raise DimensionMismatch("a union needs at least one subspace")
        D = subs[0].ambient_dim
        for a in subs:
            if a.ambient_dim != D:
                raise DimensionMismatch("all subspaces must share the ambient dim")
            _check_data_subspace(a.linear_part, "UnionOfAffine")
        for i, j in itertools.combinations(range(len(subs)), 2):
            same_linear = _linear_parts_equal(
                subs[i].linear_part, subs[j].linear_part, tol
            )
            scale = 1.0 + max(
                np.linalg.norm(subs[i].translation),
                np.linalg.norm(subs[j].translation),
            )
            same_mu = (
                np.linalg.norm(subs[i].translation - subs[j].translation)
                <= tol.residual_tol * scale
            )
            if same_linear and same_mu:
                raise DimensionMismatch(f"subspaces {i} and {j} coincide")
        self.subspaces = subs

    @property
    def n(self):
        return len(self.subspaces)

    @property
    def ambient_dim(self):
        return self.subspaces[0].ambient_dim


@dataclass
class LabeledSample:
    """A data point together with the index of the subspace it was drawn from."""

    point: np.ndarray
    label: int


def homogenize_points(points):
    """Prepend the homogeneous coordinate 1 to every point.

    ``points`` is ``(N, D)`` with points as rows; the result is
    ``(N, D + 1)`` in the same order, so its transpose is the classic
    homogeneous-coordinates matrix with a row of ones on top.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(1, -1)
    if not np.all(np.isfinite(points)):
        raise NonFiniteInput("points contain non-finite entries")
    ones = np.ones((points.shape[0], 1))
    return np.hstack([ones, points])


def embed_affine_subspace(sub):
    """Lift ``S + mu`` in R^D to its linear subspace of R^(D+1).

    The basis is the normalized ``[(1; mu), (0; u_1), ..., (0; u_d)]`` (the
    first column is already orthogonal to the rest because ``mu`` lies in the
    complement of S); the complement is the orthonormalized span of the
    vectors ``(-b_j . mu ; b_j)``, one per complement vector of S, so the
    codimension is preserved.
    """
    D = sub.ambient_dim
    U, B, mu = sub.linear_part.basis, sub.linear_part.complement, sub.translation

    first = np.concatenate([[1.0], mu])
    first /= np.linalg.norm(first)
    lifted_basis = np.zeros((D + 1, sub.dim + 1))
    lifted_basis[:, 0] = first
    lifted_basis[1:, 1:] = U

    raw = np.vstack([-(B.T @ mu), B])        # columns (-b_j.mu ; b_j)
    comp, _ = np.linalg.qr(raw)
    return LinearSubspace(D + 1, lifted_basis, comp)


def embed_affine_union(union):
    """Lift a union of affine subspaces of R^D to linear subspaces of R^(D+1)."""
    return UnionOfLinear([embed_affine_subspace(a) for a in union.subspaces])


def embedded_complement_raw(sub):
    """The un-normalized complement vectors ``(-b_j . mu ; b_j)`` as columns."""
    B, mu = sub.linear_part.complement, sub.translation
    return np.vstack([-(B.T @ mu), B])


@dataclass
class TransversalityReport:
    """Outcome of a transversality check.

    When the union fails, ``witness`` names the offending subset of subspace
    indices (smallest size first, then lexicographic) along with the achieved
    and required rank of the stacked complement bases.
    """

    transversal: bool
    witness: tuple = None
    rank: int = None
    expected_rank: int = None

    def to_json(self):
        out = {"transversal": self.transversal}
        if self.transversal:
            out["witness"] = None
        else:
            out["witness"] = {
                "subspaces": list(self.witness),
                "rank": self.rank,
                "expected_rank": self.expected_rank,
            }
        return out


def check_transversality(union, tol=DEFAULT_TOL):
    """Certify that every partial intersection is as small as possible.

    For every nonempty subset J of subspaces the stacked complement bases
    ``[B_i : i in J]`` must have rank ``min(D, sum of codims)``.  Subsets are
    enumerated by size, then lexicographically, and the first violation is
    returned as the witness.

    Parameters
    ----------
    union : UnionOfLinear
    tol : ToleranceConfig

    Returns
    -------
    TransversalityReport
    """
    n = union.n
    if n > _MAX_TRANSVERSALITY_SUBSPACES:
        raise ValueError(
            f"transversality check enumerates 2^n - 1 subsets; n = {n} exceeds "
            f"the cap of {_MAX_TRANSVERSALITY_SUBSPACES}"
        )
    D = union.ambient_dim
    comps = [s.complement for s in union.subspaces]
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            stacked = np.hstack([comps[i] for i in subset])
            expected = min(D, stacked.shape[1])
            r = rank_with_tol(stacked, tol)
            if r != expected:
                return TransversalityReport(False, subset, r, expected)
    return TransversalityReport(True)


def affine_vanishing_generators(union, cap=_GENERATOR_CAP):
    """All product-of-affine-forms generators that cut out an affine union.

    For a union of n affine subspaces with complement vectors ``b_{ij}`` and
    translations ``mu_i``, the union is exactly the common zero set of the
    degree-n polynomials

        prod_i ( b_{i j_i} . x - b_{i j_i} . mu_i ),

    one per choice of ``j_i`` in each subspace's complement basis.  The
    number of generators is the product of the codimensions.

    Returns
    -------
    list of InhomogeneousPoly
    """
    D = union.ambient_dim
    n = union.n
    codims = [a.linear_part.codim for a in union.subspaces]
    count = math.prod(codims)
    if count > cap:
        raise ProductCountOverflow(
            f"{count} generators exceed the cap of {cap}"
        )
    exps = inhomogeneous_exponents(n, D)
    index = {tuple(e): k for k, e in enumerate(exps)}

    gens = []
    for choice in itertools.product(*(range(c) for c in codims)):
        terms = {(0,) * D: 1.0}
        for i, j in enumerate(choice):
            b = union.subspaces[i].linear_part.complement[:, j]
            beta = -float(b @ union.subspaces[i].translation)
            nxt = {}
            for alpha, c in terms.items():
                if beta != 0.0:
                    key = alpha
                    nxt[key] = nxt.get(key, 0.0) + c * beta
                for v in range(D):
                    if b[v] == 0.0:
                        continue
                    key = alpha[:v] + (alpha[v] + 1,) + alpha[v + 1:]
                    nxt[key] = nxt.get(key, 0.0) + c * b[v]
            terms = nxt
        coeffs = np.zeros(exps.shape[0])
        for alpha, c in terms.items():
            coeffs[index[alpha]] = c
        gens.append(InhomogeneousPoly(D, n, coeffs))
    return gens


def recover_affine_from_gradients(grads, tol=DEFAULT_TOL):
    """Invert the embedding: gradients at a lifted point back to an affine flat.

    The inputs are gradient vectors of vanishing polynomials evaluated at an
    embedded point ``(1, x)``; they span the complement of the lifted
    subspace.  A maximal linearly independent subset ``(gamma_k; b_k)`` is
    selected greedily in input order; with ``B = [b_1 ... b_l]`` and
    ``gamma = (gamma_1 ... gamma_l)`` the affine subspace is

        span(B)^perp  -  B (B^T B)^{-1} gamma.

    Raises
    ------
    DegenerateGradients
        If every gradient is numerically zero.
    RankDeficient
        If the lower blocks ``b_k`` are dependent, which cannot happen for
        gradients that span the complement of a genuinely lifted subspace.
    """
    G = np.asarray(list(grads), dtype=float)
    if G.ndim != 2 or G.shape[0] == 0:
        raise DegenerateGradients("need at least one gradient vector")
    if not np.all(np.isfinite(G)):
        raise NonFiniteInput("gradients contain non-finite entries")
    norms = np.linalg.norm(G, axis=1)
    top = norms.max()
    if top == 0.0:
        raise DegenerateGradients("all gradients are zero")
    keep = norms > tol.rank_rtol * top
    G = G[keep]

    selected = []
    for g in G:
        candidate = np.vstack(selected + [g])
        if rank_with_tol(candidate, tol) == len(selected) + 1:
            selected.append(g)
    S = np.vstack(selected)

    gamma = S[:, 0]
    B = S[:, 1:].T                            # D x l
    mu = -solve_normal(B, gamma, tol)
    comp = orthonormalize(B, tol)
    mu = comp @ (comp.T @ mu)
    linear = LinearSubspace(B.shape[0], orthonormal_complement(comp), comp)
    return AffineSubspace(linear, mu)


def _ball_points(rng, count, dim, radius):
    g = rng.standard_normal((count, dim))
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms == 0.0):
        redo = norms == 0.0
        g[redo] = rng.standard_normal((int(redo.sum()), dim))
        norms = np.linalg.norm(g, axis=1)
    radii = radius * rng.uniform(0.0, 1.0, size=count) ** (1.0 / dim)
    return g * (radii / norms)[:, None]


def sample_union(model, counts, seed=0, radius=1.0):
    """Draw labeled points from each subspace of a union.

    Point ``j`` of subspace ``i`` is ``U_i @ y + mu_i`` with ``y`` uniform in
    the ``d_i``-ball of the given radius (``mu_i = 0`` for linear unions).
    Ball-uniform coordinates keep every coordinate bounded by the radius,
    which in turn bounds the conditioning of downstream Veronese matrices.

    Parameters
    ----------
    model : UnionOfLinear or UnionOfAffine
    counts : int or sequence of int
        Samples per subspace.
    seed : int
        Seed for the dedicated generator owned by this call.
    radius : float

    Returns
    -------
    list of LabeledSample
    """
    if isinstance(counts, (int, np.integer)):
        counts = [int(counts)] * model.n
    counts = [int(c) for c in counts]
    if len(counts) != model.n or any(c < 1 for c in counts):
        raise DimensionMismatch("counts must give a positive count per subspace")
    rng = np.random.default_rng(seed)
    samples = []
    for i, sub in enumerate(model.subspaces):
        if isinstance(model, UnionOfAffine):
            U, mu = sub.linear_part.basis, sub.translation
        else:
            U, mu = sub.basis, np.zeros(model.ambient_dim)
        coords = _ball_points(rng, counts[i], U.shape[1], radius)
        points = coords @ U.T + mu
        samples.extend(
            LabeledSample(_lock(points[j]), i) for j in range(counts[i])
        )
    return samples


def samples_to_arrays(samples):
    """Split a list of labeled samples into a points matrix and a label vector."""
    X = np.array([s.point for s in samples], dtype=float)
    labels = np.array([s.label for s in samples], dtype=int)
    return X, labels


def distance_to_linear(x, sub):
    """Euclidean distance of ``x`` to a linear subspace."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != sub.ambient_dim:
        raise DimensionMismatch("point and subspace dimensions differ")
    return float(np.linalg.norm(sub.complement.T @ x))


def distance_to_affine(x, sub):
    """Euclidean distance of ``x`` to an affine subspace."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != sub.ambient_dim:
        raise DimensionMismatch("point and subspace dimensions differ")
    B = sub.linear_part.complement
    return float(np.linalg.norm(B.T @ (x - sub.translation)))


def distance_to_model(x, model):
    """Distance of ``x`` to the nearest subspace of a union."""
    if isinstance(model, UnionOfAffine):
        return min(distance_to_affine(x, a) for a in model.subspaces)
    return min(distance_to_linear(x, s) for s in model.subspaces)


def distances_to_model(points, model):
    """Distance of each row of ``points`` to the nearest subspace of a union."""
    points = np.asarray(points, dtype=float)
    per_subspace = []
    for sub in model.subspaces:
        if isinstance(model, UnionOfAffine):
            residual = (points - sub.translation) @ sub.linear_part.complement
        else:
            residual = points @ sub.complement
        per_subspace.append(np.linalg.norm(residual, axis=1))
    return np.min(np.stack(per_subspace, axis=1), axis=1)


def random_linear_union(rng, ambient_dim, dims):
    """A union of random linear subspaces with the given dimensions."""
    subs = []
    for d in dims:
        q, _ = np.linalg.qr(rng.standard_normal((ambient_dim, d)))
        subs.append(LinearSubspace.from_basis(q))
    return UnionOfLinear(subs)


def random_affine_union(rng, ambient_dim, dims, affine_flags=None, scale=1.0):
    """A union of random affine subspaces.

    Translation coordinates are uniform in ``[-scale, scale]^c`` per
    subspace, resampled to avoid a 1e-6 ball around zero whenever the
    subspace is flagged affine (generic nonzero translations); flagged-off
    subspaces pass through the origin.
    """
    if affine_flags is None:
        affine_flags = [True] * len(dims)
    subs = []
    for d, want_affine in zip(dims, affine_flags):
        q, _ = np.linalg.qr(rng.standard_normal((ambient_dim, d)))
        linear = LinearSubspace.from_basis(q)
        c = linear.codim
        if want_affine:
            a = rng.uniform(-scale, scale, size=c)
            while np.linalg.norm(a) < 1e-6:
                a = rng.uniform(-scale, scale, size=c)
        else:
            a = np.zeros(c)
        subs.append(AffineSubspace(linear, linear.complement @ a))
    return UnionOfAffine(subs)


def model_to_json(model):
    """Serialize a union to the library's model JSON object.

    The format is ``{"ambient_dim": D, "affine": bool, "subspaces": [...]}``
    with each subspace carrying a column-major ``"basis"`` (a list of basis
    columns) and, for affine models, a ``"translation"`` vector.
    """
    affine = isinstance(model, UnionOfAffine)
    out = {"ambient_dim": model.ambient_dim, "affine": affine, "subspaces": []}
    for sub in model.subspaces:
        basis = sub.linear_part.basis if affine else sub.basis
        entry = {"basis": [[float(v) for v in basis[:, j]]
                           for j in range(basis.shape[1])]}
        if affine:
            entry["translation"] = [float(v) for v in sub.translation]
        out["subspaces"].append(entry)
    return out


def model_from_json(obj):
    """Rebuild a union from its model JSON object."""
    D = int(obj["ambient_dim"])
    affine = bool(obj.get("affine", False))
    subs = []
    for entry in obj["subspaces"]:
        cols = np.array(entry["basis"], dtype=float).T
        if cols.shape[0] != D:
            raise DimensionMismatch(
                f"basis columns have length {cols.shape[0]}, expected {D}"
            )
        linear = LinearSubspace.from_basis(cols)
        if affine:
            mu = np.asarray(entry.get("translation", np.zeros(D)), dtype=float)
            subs.append(AffineSubspace(linear, mu))
        else:
            subs.append(linear)
    return UnionOfAffine(subs) if affine else UnionOfLinear(subs)
