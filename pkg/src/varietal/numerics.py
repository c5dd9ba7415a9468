"""Tolerance-aware dense linear algebra kernels.

Exact-arithmetic statements about ranks and null spaces need a numeric
surrogate; this module fixes one rank rule and builds every kernel on it so
that ranks, null spaces and complements are mutually consistent:

    rank(A) = #{ singular values > rank_rtol * sigma_max * max(m, k) }

with ``rank_rtol`` carried by a :class:`ToleranceConfig`.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteInput, NotOrthonormalInput, RankDeficient

_ORTHO_ATOL = 1e-12


@dataclass(frozen=True)
class ToleranceConfig:
    """Thresholds shared by the numeric kernels and the clustering engine.

    Attributes
    ----------
    rank_rtol : float
        Relative singular-value threshold of the rank rule above.
    angle_tol : float
        Radians below which two subspaces count as equal.
    residual_tol : float
        Dimensionless threshold for point-membership tests; distances are
        compared against ``residual_tol * (1 + |x|)``.
    """

    rank_rtol: float = 1e-10
    angle_tol: float = 1e-6
    residual_tol: float = 1e-8

    def __post_init__(self):
        if not (0.0 < self.rank_rtol < 1.0):
            raise ValueError(f"rank_rtol must be in (0, 1), got {self.rank_rtol}")
        if self.angle_tol <= 0.0:
            raise ValueError(f"angle_tol must be positive, got {self.angle_tol}")
        if self.residual_tol <= 0.0:
            raise ValueError(f"residual_tol must be positive, got {self.residual_tol}")


DEFAULT_TOL = ToleranceConfig()


def _as_matrix(A):
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A.reshape(1, -1)
    if A.ndim != 2:
        raise NonFiniteInput(f"expected a 2-d array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise NonFiniteInput("matrix contains non-finite entries")
    return A


def _rank_from_singular_values(s, shape, tol):
    if s.size == 0:
        return 0
    cutoff = tol.rank_rtol * s[0] * max(shape)
    return int(np.sum(s > cutoff))


def rank_by_largest_gap(s, min_ratio=1e3):
    """Rank chosen at the largest multiplicative drop in the singular values.

    A heuristic for near-noisy data where the absolute threshold rule would
    count noise-level singular values as rank.  If no drop reaches
    ``min_ratio`` the matrix is declared full rank (no split exists).
    """
    s = np.asarray(s, dtype=float)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    if s.size == 1:
        return 1
    ratios = s[:-1] / np.maximum(s[1:], np.finfo(float).tiny)
    k = int(np.argmax(ratios))
    if ratios[k] < min_ratio:
        return int(s.size)
    return k + 1


def rank_with_tol(A, tol=DEFAULT_TOL, method="threshold"):
    """Rank of ``A``; ``method`` is the default threshold rule or ``"gap"``."""
    A = _as_matrix(A)
    s = np.linalg.svd(A, compute_uv=False)
    if method == "gap":
        return rank_by_largest_gap(s)
    return _rank_from_singular_values(s, A.shape, tol)


def null_space(A, tol=DEFAULT_TOL, method="threshold"):
    """Orthonormal basis of the right null space of ``A``.

    Parameters
    ----------
    A : array_like, shape (m, k)
    tol : ToleranceConfig
    method : {"threshold", "gap"}
        How the rank is decided: the shared threshold rule (default,
        deterministic on clean inputs) or the largest singular-value gap
        (for near-noisy data).

    Returns
    -------
    ndarray, shape (k, k - rank(A))
        Columns are orthonormal and satisfy ``A @ v ~ 0``; the matrix has
        zero columns when ``A`` has full column rank.
    """
    basis, _ = null_space_with_spectrum(A, tol, method)
    return basis


def null_space_with_spectrum(A, tol=DEFAULT_TOL, method="threshold"):
    """Null-space basis plus the singular values that determined it."""
    A = _as_matrix(A)
    # The economy SVD already carries every right singular vector unless the
    # matrix is wide; never materialize the full left factor.
    _, s, vh = np.linalg.svd(A, full_matrices=A.shape[0] < A.shape[1])
    if method == "gap":
        rank = min(rank_by_largest_gap(s), A.shape[1])
    else:
        rank = _rank_from_singular_values(s, A.shape, tol)
    return vh[rank:].T, s


def singular_values(A):
    """Singular values of ``A`` in descending order (diagnostic helper)."""
    return np.linalg.svd(_as_matrix(A), compute_uv=False)


def _check_orthonormal(U, name="matrix"):
    U = np.asarray(U, dtype=float)
    if U.ndim != 2:
        raise NotOrthonormalInput(f"{name} must be 2-d, got shape {U.shape}")
    if not np.all(np.isfinite(U)):
        raise NonFiniteInput(f"{name} contains non-finite entries")
    d = U.shape[1]
    if d > 0 and not np.allclose(U.T @ U, np.eye(d), atol=_ORTHO_ATOL):
        raise NotOrthonormalInput(f"{name} does not have orthonormal columns")
    return U


def orthonormal_complement(U):
    """Orthonormal basis of the orthogonal complement of span(U).

    ``U`` must be ``D x d`` with orthonormal columns; the result is
    ``D x (D - d)`` and ``[U | result]`` is an orthonormal basis of R^D.
    """
    U = _check_orthonormal(U, "U")
    D, d = U.shape
    if d == 0:
        return np.eye(D)
    if d == D:
        return np.zeros((D, 0))
    full, _, _ = np.linalg.svd(U, full_matrices=True)
    comp = full[:, d:]
    # SVD can flip signs within span(U); re-orthogonalize against U exactly.
    comp = comp - U @ (U.T @ comp)
    q, _ = np.linalg.qr(comp)
    return q


def orthonormalize(A, tol=DEFAULT_TOL):
    """Orthonormal basis of the column span of ``A`` (rank by tolerance)."""
    A = _as_matrix(A)
    u, s, _ = np.linalg.svd(A, full_matrices=False)
    rank = _rank_from_singular_values(s, A.shape, tol)
    return u[:, :rank]


def principal_angles(U, V):
    """Principal angles between span(U) and span(V), ascending, in [0, pi/2].

    Cosines are the singular values of ``U.T @ V`` clamped to [0, 1]; the
    result has ``min(d1, d2)`` entries.  Angles below pi/4 are evaluated
    through their sines (singular values of the residual ``V - U U^T V``),
    where arccos of a near-1 cosine would lose half the working precision.
    """
    U = _check_orthonormal(U, "U")
    V = _check_orthonormal(V, "V")
    if U.shape[0] != V.shape[0]:
        raise NotOrthonormalInput(
            f"ambient dimensions differ: {U.shape[0]} vs {V.shape[0]}"
        )
    m = min(U.shape[1], V.shape[1])
    if m == 0:
        return np.zeros(0)
    if U.shape[1] < V.shape[1]:
        U, V = V, U
    cosines = np.clip(np.linalg.svd(U.T @ V, compute_uv=False), 0.0, 1.0)
    angles = np.arccos(cosines)                     # ascending
    small = cosines**2 >= 0.5
    if np.any(small):
        residual = V - U @ (U.T @ V)
        sines = np.sort(np.linalg.svd(residual, compute_uv=False))[:m]
        angles[small] = np.arcsin(np.clip(sines[small], 0.0, 1.0))
    return angles


def largest_principal_angle(U, V):
    """The largest principal angle, used as the subspace distance throughout."""
    angles = principal_angles(U, V)
    return float(angles[-1]) if angles.size else 0.0


def solve_normal(B, g, tol=DEFAULT_TOL):
    """Compute ``B (B^T B)^{-1} g`` via a QR factorization.

    ``B`` is ``D x l`` with full column rank and ``g`` has length ``l``; the
    result is the unique vector in span(B) whose inner products with the
    columns of ``B`` are ``g``.

    Raises
    ------
    RankDeficient
        If ``rank(B) < l`` under the tolerance rule.
    """
    B = _as_matrix(B)
    g = np.asarray(g, dtype=float).reshape(-1)
    if g.shape[0] != B.shape[1]:
        raise RankDeficient(
            f"g has length {g.shape[0]}, expected {B.shape[1]}"
        )
    if rank_with_tol(B, tol) < B.shape[1]:
        raise RankDeficient(
            f"matrix of shape {B.shape} has rank below its column count"
        )
    q, r = np.linalg.qr(B)
    # B (B^T B)^{-1} g = Q R^{-T} g since B^T B = R^T R.
    return q @ np.linalg.solve(r.T, g)
