"""Duality gap, central-path distance and the scaling that links them.

The loop's progress measure is the duality gap mu = x.s / r; its quality
measure is the distance d(x, s, nu) = |T_x s - nu e|_F from the central
path.  The two are tied together: |x.s - r nu| <= sqrt(r/2) d(x, s, nu),
and rescaling the pair so the primal side becomes the identity turns the
distance into a plain deviation from e.
"""

import numpy as np

from qipm import (
    BlockVector,
    ConeStructure,
    central_path_distance,
    duality_gap,
    identity,
    norms_and_extremes,
    scale_to_frame,
)
from qipm.jordan import t_inv_apply

rng = np.random.default_rng(0)
st = ConeStructure((4, 3, 1, 2))
e = identity(st)

# an exact central-path point: s proportional to x^{-1}
x = BlockVector(st, e.values + 0.1 * rng.standard_normal(st.n))
nu = 0.8
s = t_inv_apply(x, nu * e)
print("gap:", duality_gap(x, s), " distance:", central_path_distance(x, s, nu))

# perturb s: the distance grows, the gap-distance inequality stays valid
s2 = BlockVector(st, s.values + 0.05 * rng.standard_normal(st.n))
mu = duality_gap(x, s2)
d = central_path_distance(x, s2, mu)
print(f"perturbed: gap={mu:.5f} distance={d:.5f}")
lhs = abs(x.dot(s2) - st.r * nu)
rhs = np.sqrt(st.r / 2) * central_path_distance(x, s2, nu)
print(f"|x.s - r nu| = {lhs:.5f} <= sqrt(r/2) d = {rhs:.5f}")

# scaling: the primal side becomes e, the gap becomes 1, and distances
# transform by the factor mu
xhat, shat = scale_to_frame(x, s2, mu)
print("scaled gap:", duality_gap(xhat, shat))
dev = norms_and_extremes(shat - e).fro
print(f"d(x, s, mu) = {d:.6f} == mu |shat - e|_F = {mu * dev:.6f}")
for sigma in (0.5, 2.0):
    print(
        f"  sigma={sigma}: d(x, s, mu*sigma) = {central_path_distance(x, s2, mu * sigma):.6f}"
        f" == mu d(e, shat, sigma) = {mu * central_path_distance(xhat, shat, sigma):.6f}"
    )
