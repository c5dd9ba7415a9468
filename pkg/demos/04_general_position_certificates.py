#!/usr/bin/env python3
"""When does a finite sample determine its union of subspaces?

A sample is "in general position" when the degree-n polynomials vanishing on
it are exactly those vanishing on the union, so the union can be recovered
from the sample alone.  The certificate compares the sample's fitted
vanishing space against a dense sampling oracle, and it transfers across the
homogeneous-coordinate lift: the affine-side and lifted-side answers agree.
"""

import numpy as np

from varietal import (
    check_general_position,
    embed_affine_union,
    homogenize_points,
    monomial_basis_size,
    random_affine_union,
    sample_union,
    samples_to_arrays,
)

rng = np.random.default_rng(11)
union = random_affine_union(rng, 3, [2, 2])       # two affine planes in R^3
lifted = embed_affine_union(union)

# --- dense samples certify on both sides --------------------------------------
dense, _ = samples_to_arrays(sample_union(union, 120, seed=12))
affine_side = check_general_position(dense, union)
lifted_side = check_general_position(homogenize_points(dense), lifted)
print("dense sample (120 per plane):")
print("  affine side:", affine_side)
print("  lifted side:", lifted_side)

# --- small samples fail on both sides, and the count bound is sharp ------------
# The lifted planes are hyperplanes of R^4; a degree-2 fit there has
# M_2(4) = 10 coefficients, so 8 points can never pin it down (9 can).
print("\nM_2(4) =", monomial_basis_size(2, 4))
for total in (8, 9, 12):
    counts = [total // 2, total - total // 2]
    pts, _ = samples_to_arrays(sample_union(union, counts, seed=13))
    rep = check_general_position(homogenize_points(pts), lifted)
    print(f"  {total} lifted points: in_general_position={rep.in_general_position} "
          f"(s_data={rep.s_data}, s_model={rep.s_model})")

# --- the classic 4-point failure on linear planes ------------------------------
# Two points per plane admit a spurious quadratic: the product of the two
# "cross" planes through the sample pairs.  A fifth generic point kills it.
from _helpers_demo import plane_with_normal
from varietal import UnionOfLinear

rng = np.random.default_rng(14)
planes = UnionOfLinear([plane_with_normal(rng.standard_normal(3)),
                        plane_with_normal(rng.standard_normal(3))])
four = np.array([planes.subspaces[0].basis @ rng.uniform(-1, 1, 2) for _ in range(2)]
                + [planes.subspaces[1].basis @ rng.uniform(-1, 1, 2) for _ in range(2)])
print("\nfour points on two linear planes:", check_general_position(four, planes, 2))
five = np.vstack([four, planes.subspaces[0].basis @ rng.uniform(-1, 1, 2)])
print("with a fifth generic point:      ", check_general_position(five, planes, 2))
