#!/usr/bin/env python3
"""Homogeneous coordinates: affine subspaces become linear, mostly safely.

Prepending a 1 to every point turns a union of affine subspaces of R^D into a
union of linear subspaces of R^(D+1).  The lift preserves codimensions and,
for generic translations, transversality; but degenerate translations can
break it, and this script shows the classic failure.
"""

import numpy as np

from varietal import (
    AffineSubspace,
    UnionOfAffine,
    check_transversality,
    embed_affine_subspace,
    embed_affine_union,
    homogenize_points,
    random_affine_union,
)
from _helpers_demo import line

# --- one flat, lifted ---------------------------------------------------------
flat = AffineSubspace(line([1.0, 0.0]), np.array([0.0, 1.0]))   # y = 1
lifted = embed_affine_subspace(flat)
print("lifted basis columns:")
print(np.round(lifted.basis, 6))
x = np.array([3.0, 1.0])                                        # on the flat
x_lift = homogenize_points(x)[0]
print("residual of the lifted point against the lifted subspace:",
      float(np.linalg.norm(lifted.complement.T @ x_lift)))

# --- transversality usually survives the lift ---------------------------------
rng = np.random.default_rng(4)
union = random_affine_union(rng, 4, [2, 1, 1])
report = check_transversality(embed_affine_union(union))
print("\nrandom affine union of dims (2,1,1) in R^4, lifted:",
      "transversal" if report.transversal else "NOT transversal")

# --- ...but not always ---------------------------------------------------------
# Two lines through the origin in R^3 lift to two planes of R^4 whose stacked
# complement bases have a zero top row: rank 3 < 4.  Nonzero translations
# restore the missing rank.
two_lines = UnionOfAffine([
    AffineSubspace(line([1.0, 0.0, 0.0]), np.zeros(3)),
    AffineSubspace(line([0.0, 1.0, 0.0]), np.zeros(3)),
])
report = check_transversality(embed_affine_union(two_lines))
print("\ntwo lines, both through the origin, lifted:",
      "transversal" if report.transversal else "NOT transversal",
      "| witness:", report.witness,
      f"(rank {report.rank}, needed {report.expected_rank})")

shifted = UnionOfAffine([
    AffineSubspace(line([1.0, 0.0, 0.0]), np.array([0.0, 0.5, 0.3])),
    AffineSubspace(line([0.0, 1.0, 0.0]), np.array([0.7, 0.0, -0.4])),
])
print("same lines with generic offsets, lifted:",
      "transversal" if check_transversality(embed_affine_union(shifted)).transversal
      else "NOT transversal")

# Genericity is doing real work here: offsets confined to the lines' common
# plane (zero third coordinate) are a measure-zero choice that still fails.
coplanar = UnionOfAffine([
    AffineSubspace(line([1.0, 0.0, 0.0]), np.array([0.0, 0.5, 0.0])),
    AffineSubspace(line([0.0, 1.0, 0.0]), np.array([0.7, 0.0, 0.0])),
])
print("same lines with coplanar (non-generic) offsets, lifted:",
      "transversal" if check_transversality(embed_affine_union(coplanar)).transversal
      else "NOT transversal")

# A line plus a PLANE never has this problem: the three stacked complement
# vectors already have full rank in R^3, translations or not.
line_plane = random_affine_union(np.random.default_rng(5), 3, [1, 2],
                                 affine_flags=[False, False])
print("line + plane, zero translations, lifted:",
      "transversal" if check_transversality(
          embed_affine_union(line_plane)).transversal else "NOT transversal")
