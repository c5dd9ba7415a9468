#!/usr/bin/env python3
"""Fitting vanishing polynomials and reading subspaces off their gradients.

A union of two planes in R^3 is the zero set of a single quadratic: the
product of the two plane equations.  Stacking the degree-2 Veronese
embeddings of sample points and taking the null space recovers exactly that
polynomial; differentiating it at a sample point recovers the plane through
the point.
"""

import numpy as np

from varietal import (
    UnionOfLinear,
    estimate_subspace_at_point,
    fit_vanishing_basis,
    largest_principal_angle,
    multiply_linear_forms,
    sample_union,
    samples_to_arrays,
)
from _helpers_demo import plane_with_normal

rng = np.random.default_rng(0)
b1, b2 = rng.standard_normal(3), rng.standard_normal(3)
union = UnionOfLinear([plane_with_normal(b1), plane_with_normal(b2)])
points, truth = samples_to_arrays(sample_union(union, 30, seed=1))

# --- fit: the null space of the embedded data --------------------------------
basis = fit_vanishing_basis(points, 2)
print("vanishing polynomials found:", basis.s)
print("trailing singular values:", np.round(basis.singular_values[-3:], 12))

product = multiply_linear_forms([b1 / np.linalg.norm(b1),
                                 b2 / np.linalg.norm(b2)]).coeffs
product = product / np.linalg.norm(product)
angle = largest_principal_angle(basis.polys, product.reshape(-1, 1))
print(f"angle to the expanded product of the two plane equations: {angle:.2e}")

# --- differentiate: one gradient per sample pins its plane -------------------
for j in (0, 30):
    sub = estimate_subspace_at_point(basis, points[j])
    true_plane = union.subspaces[truth[j]]
    err = largest_principal_angle(sub.basis, true_plane.basis)
    print(f"point {j:2d} (plane {truth[j]}): estimated dim {sub.dim}, "
          f"angle to truth {err:.2e}")

# --- a starved sample fools the fit ------------------------------------------
# Two points per plane leave room for quadratics that vanish on the points
# without vanishing on the planes, which is why certification matters.
starved = points[[0, 1, 30, 31]]
print("\nbasis dimension from only 4 points:", fit_vanishing_basis(starved, 2).s,
      "(one polynomial is genuine, the rest are artifacts of the tiny sample)")
