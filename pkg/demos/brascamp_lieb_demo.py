"""Finiteness of rank-one Brascamp-Lieb data, then the L^2 product it feeds into.

Run:  python3 demos/brascamp_lieb_demo.py
"""

import math

from kplane import BLInstance, QuadratureRule, bl_feasibility, multilinear_l2_ratio
from kplane.density import smooth_bump
from kplane.manifold import parabola, segment

s = math.sqrt(0.5)
for p in ([2 / 3] * 3, [0.5] * 3):
    res = bl_feasibility(BLInstance([[1, 0], [0, 1], [s, s]], p))
    if res.feasible:
        print(p, "-> feasible, weights", res.lambdas)
    else:
        # y^T A <= 0 and y^T b > 0 proves p is outside the hull
        print(p, "-> infeasible, Farkas vector", res.farkas)

q = QuadratureRule(order=384)
print("orthogonal segments:", multilinear_l2_ratio(
    [segment(), segment(angle=math.pi / 2)], [smooth_bump()] * 2, q).ratio)
r = multilinear_l2_ratio([parabola(-0.5, 0.5, 0.5), parabola(-0.5, 0.5, 0.5, angle=math.pi / 2)],
                         [smooth_bump()] * 2, q)
print("curved pair:", r.ratio, " change of variables predicts", r.predicted)
