"""Tour of the block-vector algebra that everything else is built on.

A block vector stacks segments (x0; xbar), one per Lorentz-cone block.
Each block has two eigenvalues x0 +- |xbar|; they classify cone membership
and define powers, norms and the quadratic representation.
"""

import numpy as np

from qipm import (
    BlockVector,
    ConeStructure,
    arw,
    cone_membership,
    identity,
    jordan_product,
    norms_and_extremes,
    power,
    quad_rep,
    spectral_decompose,
)
from qipm.jordan import quad_apply

st = ConeStructure((3, 1, 2))
print(f"structure: blocks {st.block_sizes}, dimension n={st.n}, rank r={st.r}")

x = BlockVector(st, [3.0, 4.0, 0.0, 2.0, 1.5, 0.5])
sd = spectral_decompose(x)
print("eigenvalues per block:", list(zip(sd.lam1, sd.lam2)))
print("reconstruction error:", np.abs(sd.reconstruct().values - x.values).max())

e = identity(st)
print("x o e == x:", np.allclose(jordan_product(x, e).values, x.values))

v = norms_and_extremes(x)
print(f"|x|_F={v.fro:.4f}  |x|_2={v.spec:.4f}  lambda_min={v.lam_min:.4f}")
print("membership:", cone_membership(x), "(one block has a negative eigenvalue)")

y = BlockVector(st, [2.0, 0.3, -0.1, 1.0, 2.0, 0.0])
print("membership of y:", cone_membership(y))

# the quadratic representation acts like the two-sided product X Y X;
# its matrix form is assembled on demand, the apply form costs O(n)
Q = quad_rep(y)
z = BlockVector(st, np.linspace(-1, 1, st.n))
print("dense Q_y z == O(n) apply:", np.allclose(Q @ z.values, quad_apply(y, z).values))
print("Q_y e == y o y:", np.allclose(Q @ e.values, jordan_product(y, y).values))

# spectral powers: the square root of an interior vector multiplies to itself
root = power(y, 0.5)
print("sqrt(y) o sqrt(y) == y:", np.allclose(jordan_product(root, root).values, y.values))
print("y o y^-1 == e:", np.allclose(jordan_product(y, power(y, -1.0)).values, e.values))

# the arrow matrix is the linear representation of the product
print("Arw(x) y == x o y:", np.allclose(arw(x) @ y.values, jordan_product(x, y).values))
