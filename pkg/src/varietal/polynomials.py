"""Dense multivariate polynomials over a fixed graded-lexicographic monomial order.

Two value types are provided:

``HomogeneousPoly``
    coefficients over all monomials of one fixed total degree ``n`` in ``V``
    variables, indexed by graded-lex order with variable 0 most significant.
``InhomogeneousPoly``
    coefficients over all monomials of degree at most ``n``, stored as
    ascending degree blocks (constant term first), each block in the same
    graded-lex order.

On top of the representation the module implements the Veronese embedding of
a point (the vector of all its degree-``n`` monomials), its Jacobian,
polynomial evaluation and gradients, expansion of products of linear forms,
and the (de)homogenization maps between the two types.  By convention,
variable index 0 is the homogenizing coordinate whenever a polynomial in
``D + 1`` variables is paired with one in ``D`` variables.

All functions are pure and all returned arrays are read-only, so values are
safe to share across threads.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DegreeError, DimensionMismatch, EmptyInput, NonFiniteInput

_MAX_INDEX = np.iinfo(np.int64).max


def monomial_basis_size(degree, num_vars):
    """Number of monomials of total degree ``degree`` in ``num_vars`` variables.

    Parameters
    ----------
    degree : int
        Total degree, >= 0.
    num_vars : int
        Number of variables, >= 1.

    Returns
    -------
    int
        The binomial ``C(degree + num_vars - 1, degree)``.

    Raises
    ------
    OverflowError
        If the count does not fit in a signed 64-bit integer.  The count is
        used as an array length, so silently wrapping would corrupt indexing.
    """
    if degree < 0:
        raise DegreeError(f"degree must be >= 0, got {degree}")
    if num_vars < 1:
        raise DimensionMismatch(f"num_vars must be >= 1, got {num_vars}")
    size = math.comb(degree + num_vars - 1, degree)
    if size > _MAX_INDEX:
        raise OverflowError(
            f"monomial basis of degree {degree} in {num_vars} variables has "
            f"{size} elements, exceeding the 64-bit index range"
        )
    return size


@lru_cache(maxsize=None)
def monomial_exponents(degree, num_vars):
    """Exponent table of the degree-``degree`` monomials in graded-lex order.

    Row ``k`` holds the exponent vector of the ``k``-th monomial.  Within the
    fixed degree the rows are sorted lexicographically descending, variable 0
    most significant; for example degree 2 in 2 variables gives
    ``(2,0), (1,1), (0,2)``.

    Returns
    -------
    ndarray of int64, shape (monomial_basis_size(degree, num_vars), num_vars)
        Read-only.
    """
    size = monomial_basis_size(degree, num_vars)
    out = np.zeros((size, num_vars), dtype=np.int64)
    row = 0

    def fill(remaining, var, prefix):
        nonlocal row
        if var == num_vars - 1:
            out[row] = prefix + [remaining]
            row += 1
            return
        for e in range(remaining, -1, -1):
            fill(remaining - e, var + 1, prefix + [e])

    fill(degree, 0, [])
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def monomial_index(degree, num_vars):
    """Mapping from exponent tuple to its index in the graded-lex order."""
    table = monomial_exponents(degree, num_vars)
    return {tuple(row): k for k, row in enumerate(table)}


@lru_cache(maxsize=None)
def inhomogeneous_exponents(max_degree, num_vars):
    """Exponent table for all monomials of degree <= ``max_degree``.

    Degree blocks ascend (the constant monomial comes first) and each block
    uses the graded-lex order of :func:`monomial_exponents`.
    """
    blocks = [monomial_exponents(k, num_vars) for k in range(max_degree + 1)]
    out = np.vstack(blocks)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def _degree_offsets(max_degree, num_vars):
    """Start index of each degree block inside the inhomogeneous layout."""
    offsets = [0]
    for k in range(max_degree):
        offsets.append(offsets[-1] + monomial_basis_size(k, num_vars))
    return tuple(offsets)


@dataclass(frozen=True)
class Monomial:
    """A single monomial, identified by its exponent vector.

    The graded-lex order used throughout the library is a bijection between
    the degree-``n`` monomials in ``V`` variables and ``0..M-1``;
    :meth:`index` and :meth:`from_index` realize the two directions.
    """

    exponents: tuple

    def __post_init__(self):
        if any(e < 0 for e in self.exponents):
            raise DegreeError("monomial exponents must be non-negative")

    @property
    def degree(self):
        return sum(self.exponents)

    def index(self):
        """Position of this monomial within its (degree, num_vars) order."""
        return monomial_index(self.degree, len(self.exponents))[self.exponents]

    @classmethod
    def from_index(cls, k, degree, num_vars):
        return cls(tuple(monomial_exponents(degree, num_vars)[k]))


def _as_point(x, num_vars=None):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch(f"expected a 1-d point, got shape {x.shape}")
    if num_vars is not None and x.shape[0] != num_vars:
        raise DimensionMismatch(
            f"point has {x.shape[0]} coordinates, expected {num_vars}"
        )
    if not np.all(np.isfinite(x)):
        raise NonFiniteInput("point contains non-finite entries")
    return x


@dataclass
class HomogeneousPoly:
    """Homogeneous polynomial of fixed degree as a dense coefficient vector.

    ``coeffs[k]`` multiplies the ``k``-th monomial of
    :func:`monomial_exponents(degree, num_vars)`.  Evaluation at any point
    equals ``coeffs @ veronese_embed(point, degree)``.
    """

    num_vars: int
    degree: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float)
        expected = monomial_basis_size(self.degree, self.num_vars)
        if coeffs.shape != (expected,):
            raise DimensionMismatch(
                f"coefficient vector has shape {coeffs.shape}, expected ({expected},)"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def to_json(self):
        """JSON object per the library's polynomial wire format."""
        return {
            "num_vars": self.num_vars,
            "degree": self.degree,
            "homogeneous": True,
            "coeffs": [float(c) for c in self.coeffs],
        }


@dataclass
class InhomogeneousPoly:
    """Polynomial of degree <= ``max_degree`` in ascending degree blocks."""

    num_vars: int
    max_degree: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float)
        expected = inhomogeneous_exponents(self.max_degree, self.num_vars).shape[0]
        if coeffs.shape != (expected,):
            raise DimensionMismatch(
                f"coefficient vector has shape {coeffs.shape}, expected ({expected},)"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def effective_degree(self):
        """Largest degree with a nonzero coefficient (0 for the zero poly)."""
        offsets = _degree_offsets(self.max_degree, self.num_vars)
        for k in range(self.max_degree, -1, -1):
            lo = offsets[k]
            hi = offsets[k + 1] if k < self.max_degree else self.coeffs.shape[0]
            if np.any(self.coeffs[lo:hi] != 0.0):
                return k
        return 0

    def to_json(self):
        return {
            "num_vars": self.num_vars,
            "degree": self.max_degree,
            "homogeneous": False,
            "coeffs": [float(c) for c in self.coeffs],
        }


def poly_from_json(obj):
    """Rebuild a polynomial from its JSON object form."""
    if obj.get("homogeneous", True):
        return HomogeneousPoly(int(obj["num_vars"]), int(obj["degree"]),
                               np.asarray(obj["coeffs"], dtype=float))
    return InhomogeneousPoly(int(obj["num_vars"]), int(obj["degree"]),
                             np.asarray(obj["coeffs"], dtype=float))


def veronese_embed(x, degree):
    """Vector of all degree-``degree`` monomials of ``x`` in graded-lex order.

    Parameters
    ----------
    x : array_like, shape (V,)
    degree : int
        Degree of the embedding, >= 1.

    Returns
    -------
    ndarray, shape (monomial_basis_size(degree, V),)
    """
    if degree < 1:
        raise DegreeError(f"degree must be >= 1, got {degree}")
    x = _as_point(x)
    exps = monomial_exponents(degree, x.shape[0])
    return np.prod(x[None, :] ** exps, axis=1)


def veronese_matrix(points, degree):
    """Stack :func:`veronese_embed` of many points as rows.

    ``points`` is ``(N, V)``; the result is ``(N, M)`` with
    ``M = monomial_basis_size(degree, V)``.  Monomials are assembled from
    per-variable power tables, which is much faster than elementwise ``pow``
    on the (N, M, V) cube.
    """
    if degree < 1:
        raise DegreeError(f"degree must be >= 1, got {degree}")
    points = np.asarray(points, dtype=float)
    if points.ndim != 2:
        raise DimensionMismatch(f"expected an (N, V) array, got shape {points.shape}")
    if not np.all(np.isfinite(points)):
        raise NonFiniteInput("points contain non-finite entries")
    N, num_vars = points.shape
    exps = monomial_exponents(degree, num_vars)
    powers = np.ones((num_vars, N, degree + 1))
    for k in range(1, degree + 1):
        powers[:, :, k] = powers[:, :, k - 1] * points.T
    out = np.ones((N, exps.shape[0]))
    for v in range(num_vars):
        out *= powers[v][:, exps[:, v]]
    return out


def veronese_jacobian(x, degree):
    """Jacobian of the Veronese embedding at ``x``.

    Entry ``(k, j)`` is the partial derivative of the ``k``-th degree-``degree``
    monomial with respect to ``x_j``, so the gradient of a homogeneous
    polynomial ``p`` at ``x`` is ``p.coeffs @ veronese_jacobian(x, p.degree)``.
    """
    if degree < 1:
        raise DegreeError(f"degree must be >= 1, got {degree}")
    x = _as_point(x)
    num_vars = x.shape[0]
    exps = monomial_exponents(degree, num_vars)
    jac = np.zeros((exps.shape[0], num_vars))
    for j in range(num_vars):
        hit = exps[:, j] > 0
        if not np.any(hit):
            continue
        reduced = exps[hit].copy()
        reduced[:, j] -= 1
        jac[hit, j] = exps[hit, j] * np.prod(x[None, :] ** reduced, axis=1)
    return jac


def evaluate(p, x):
    """Evaluate a polynomial of either type at a point."""
    x = _as_point(x, p.num_vars)
    if isinstance(p, HomogeneousPoly):
        exps = monomial_exponents(p.degree, p.num_vars)
    else:
        exps = inhomogeneous_exponents(p.max_degree, p.num_vars)
    return float(p.coeffs @ np.prod(x[None, :] ** exps, axis=1))


def gradient(p, x):
    """Gradient of a homogeneous polynomial at ``x``."""
    x = _as_point(x, p.num_vars)
    return p.coeffs @ veronese_jacobian(x, p.degree)


def multiply_linear_forms(forms):
    """Expand a product of linear forms into a homogeneous polynomial.

    Given vectors ``b_1, ..., b_n``, returns the coefficient vector of
    ``(b_1 . x)(b_2 . x) ... (b_n . x)``, a homogeneous polynomial whose
    degree is the number of forms.  Each factor vanishes on the hyperplane
    orthogonal to its vector, so the product vanishes on the union.
    """
    forms = [np.asarray(b, dtype=float) for b in forms]
    if not forms:
        raise EmptyInput("need at least one linear form")
    num_vars = forms[0].shape[0]
    for b in forms:
        if b.shape != (num_vars,):
            raise DimensionMismatch("all forms must have the same length")
        if not np.all(np.isfinite(b)):
            raise NonFiniteInput("form contains non-finite entries")

    coeffs = forms[0].copy()
    for k, b in enumerate(forms[1:], start=2):
        prev_exps = monomial_exponents(k - 1, num_vars)
        index = monomial_index(k, num_vars)
        nxt = np.zeros(monomial_basis_size(k, num_vars))
        for i, alpha in enumerate(prev_exps):
            c = coeffs[i]
            if c == 0.0:
                continue
            for j in range(num_vars):
                if b[j] == 0.0:
                    continue
                bumped = list(alpha)
                bumped[j] += 1
                nxt[index[tuple(bumped)]] += c * b[j]
        coeffs = nxt
    return HomogeneousPoly(num_vars, len(forms), coeffs)


def homogenize_poly(p, target_degree):
    """Homogenize an inhomogeneous polynomial to degree ``target_degree``.

    Each degree-``k`` monomial gains a factor ``x_0**(target_degree - k)``;
    the result lives in ``num_vars + 1`` variables with the homogenizing
    coordinate at index 0.

    Raises
    ------
    DegreeError
        If the polynomial's effective degree exceeds ``target_degree``.
    """
    deg = p.effective_degree()
    if deg > target_degree:
        raise DegreeError(
            f"polynomial has degree {deg}, cannot homogenize to {target_degree}"
        )
    num_vars = p.num_vars + 1
    index = monomial_index(target_degree, num_vars)
    out = np.zeros(monomial_basis_size(target_degree, num_vars))
    exps = inhomogeneous_exponents(p.max_degree, p.num_vars)
    for i, alpha in enumerate(exps):
        c = p.coeffs[i]
        if c == 0.0:
            continue
        k = int(alpha.sum())
        out[index[(target_degree - k, *alpha)]] += c
    return HomogeneousPoly(num_vars, target_degree, out)


def dehomogenize_poly(P):
    """Substitute ``x_0 = 1`` in a homogeneous polynomial.

    The result is an inhomogeneous polynomial in one fewer variable with
    ``max_degree`` equal to the degree of ``P``.  Distinct homogeneous
    monomials map to distinct monomials (the ``x_0`` exponent is determined
    by the rest), so this is a coefficient relabeling.
    """
    if P.num_vars < 2:
        raise DimensionMismatch("need at least 2 variables to dehomogenize")
    num_vars = P.num_vars - 1
    n = P.degree
    offsets = _degree_offsets(n, num_vars)
    out = np.zeros(inhomogeneous_exponents(n, num_vars).shape[0])
    exps = monomial_exponents(n, P.num_vars)
    for i, alpha in enumerate(exps):
        c = P.coeffs[i]
        if c == 0.0:
            continue
        rest = tuple(alpha[1:])
        k = n - int(alpha[0])
        out[offsets[k] + monomial_index(k, num_vars)[rest]] += c
    return InhomogeneousPoly(num_vars, n, out)
