"""Plane integrals of |Ef|^2 for a parabolic arc, against the tangent-side formula.

Run:  python3 demos/identity_walkthrough.py
"""

import numpy as np

from kplane import (
    QuadratureRule,
    affine_plane,
    check_transversality_GT,
    check_transversality_T,
    composed_adjoint_transform,
    coordinate_subspace,
    line,
    plane_integral_squared,
    pushforward_measure,
    rhs_tangent_integral,
)
from kplane.density import smooth_bump
from kplane.manifold import parabola

M = parabola(-1.0, 1.0)         # xi -> (xi, xi^2)
f = smooth_bump()               # C-infinity, compact support in (-1, 1)
pi = coordinate_subspace(2, [0])  # the x-axis

# both hypotheses on a 201 point grid; margins tell how far from failure we are
print("T  margin", check_transversality_T(M, pi).margin)   # 1/sqrt(5) at the endpoints
print("GT margin", check_transversality_GT(M, pi).margin)

q = QuadratureRule(order=256)   # 64 nodes alias badly once |x| reaches 30
rhs = rhs_tangent_integral(M, f, pi, q)
adj = composed_adjoint_transform(pushforward_measure(M, f, q), pi)
print(f"tangent side  {rhs:.12f}")
print(f"adjoint side  {adj:.12f}")

# the brute-force side: integrate |Ef|^2 along horizontal lines at several heights
for y in (0.0, 0.5, -1.0, 3.0):
    r = plane_integral_squared(M, f, affine_plane(pi, [0.0, y]), q)
    print(f"y = {y:+.1f}     {r.value:.12f}   tail <= {r.tail_bound:.1e}")

# a tilted line is just as good, with its own constant
tilted = line([np.cos(0.3), np.sin(0.3)])
print("tilted line:", rhs_tangent_integral(M, f, tilted, q),
      plane_integral_squared(M, f, affine_plane(tilted, [0.0, 0.0]), q).value)
