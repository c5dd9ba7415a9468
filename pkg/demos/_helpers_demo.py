"""Tiny builders shared by the demo scripts."""

import numpy as np

from varietal import HomogeneousPoly, LinearSubspace, monomial_exponents


def build_homogeneous(num_vars, degree, terms):
    """Homogeneous polynomial from {exponent tuple: coefficient}."""
    exps = monomial_exponents(degree, num_vars)
    index = {tuple(e): k for k, e in enumerate(exps)}
    coeffs = np.zeros(len(exps))
    for alpha, c in terms.items():
        coeffs[index[alpha]] = c
    return HomogeneousPoly(num_vars, degree, coeffs)


def line(direction):
    d = np.asarray(direction, dtype=float).reshape(-1, 1)
    return LinearSubspace.from_basis(d / np.linalg.norm(d))


def plane_with_normal(normal):
    b = np.asarray(normal, dtype=float).reshape(-1, 1)
    return LinearSubspace.from_complement(b / np.linalg.norm(b))
