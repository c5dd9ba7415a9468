#!/usr/bin/env python3
"""Multivariate polynomials, the Veronese embedding, and (de)homogenization.

Every polynomial in this library is a dense coefficient vector over a fixed
graded-lexicographic monomial order, so evaluating a degree-n polynomial is a
dot product with the Veronese embedding of the point (the vector of all its
degree-n monomials).  This script walks through the representation.
"""

import numpy as np

from varietal import (
    dehomogenize_poly,
    evaluate,
    gradient,
    homogenize_poly,
    monomial_basis_size,
    monomial_exponents,
    multiply_linear_forms,
    veronese_embed,
    veronese_jacobian,
)

# --- the monomial order -----------------------------------------------------
# Degree-2 monomials in two variables, most significant variable first:
# x1^2, x1 x2, x2^2.
print("degree-2 monomials in 2 vars:", [tuple(e) for e in monomial_exponents(2, 2)])
print("how many degree-3 monomials in 5 vars?", monomial_basis_size(3, 5))

# --- the Veronese embedding linearizes polynomial evaluation -----------------
x = np.array([2.0, 3.0])
print("\nveronese_embed((2,3), n=2) =", veronese_embed(x, 2))   # (4, 6, 9)

# (x1 + x2)(x1 - x2) = x1^2 - x2^2; its coefficient vector is (1, 0, -1)
p = multiply_linear_forms([[1.0, 1.0], [1.0, -1.0]])
print("coefficients of (x1+x2)(x1-x2):", p.coeffs)
print("p(2,3) via dot product:", float(p.coeffs @ veronese_embed(x, 2)))
print("p(2,3) via evaluate:   ", evaluate(p, x))

# --- gradients come from the Jacobian of the embedding -----------------------
print("\nJacobian of the degree-2 embedding at (2,3):")
print(veronese_jacobian(x, 2))
print("gradient of p at (2,3):", gradient(p, x))        # (2 x1, -2 x2)

# A product of linear forms vanishes on the union of their kernels, and its
# gradient at a point of one hyperplane is normal to that hyperplane:
b1, b2 = np.array([1.0, 0.0]), np.array([1.0, 1.0])
q = multiply_linear_forms([b1, b2])
point_on_first = np.array([0.0, 5.0])                   # b1 . x = 0
print("\ngradient on the first hyperplane:", gradient(q, point_on_first),
      " (parallel to b1 =", b1, ")")

# --- homogenization bridges affine and homogeneous worlds --------------------
# Start from the homogeneous cubic x0^2 x1 + x0 x2^2 + x1 x2 x3.  Setting
# x0 = 1 gives an inhomogeneous cubic; homogenizing that brings the original
# back, coefficient for coefficient.
from _helpers_demo import build_homogeneous

P = build_homogeneous(4, 3, {(2, 1, 0, 0): 1.0, (1, 0, 2, 0): 1.0, (0, 1, 1, 1): 1.0})
print("\nP(1,1,1,1) =", evaluate(P, [1.0, 1.0, 1.0, 1.0]))
down = dehomogenize_poly(P)
up = homogenize_poly(down, 3)
print("round trip exact:", np.array_equal(up.coeffs, P.coeffs))
