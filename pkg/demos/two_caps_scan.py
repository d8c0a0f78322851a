"""What goes wrong without the global hypothesis: two stacked segments.

Run:  python3 demos/two_caps_scan.py
"""

import numpy as np

from kplane import QuadratureRule, check_transversality_GT, coordinate_subspace, gt_violation_scan
from kplane.applications import two_caps_profile
from kplane.density import indicator
from kplane.manifold import two_caps

M = two_caps(separation=1.0)     # [-1/2, 1/2] x {0} and the same at height 1
pi = coordinate_subspace(2, [0])

gt = check_transversality_GT(M, pi)
print("GT passes?", gt.passed, " witness", gt.witness)  # chord is vertical: in pi^perp

ys = np.linspace(0.0, 0.5, 6)
scan = gt_violation_scan(M, indicator(), pi, ys, QuadratureRule(order=256))
model = two_caps_profile(ys)
for y, v, m in zip(ys, scan.values, model):
    # the two caps interfere: |Ef|^2 picks up |1 + exp(-2 pi i y)|^2
    print(f"y = {y:.1f}   T|Ef|^2 = {v:.6f}   (2 + 2 cos 2 pi y) / 4 * L(0) = {m / 4 * scan.values[0]:.6f}")
print("relative variation", scan.variation)
