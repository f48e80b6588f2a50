"""Shared random generators for the test suite."""

from __future__ import annotations

import numpy as np

from qipm import BlockVector, ConeStructure


def random_structure(rng, max_rank: int = 8, max_block: int = 32, min_block: int = 1) -> ConeStructure:
    r = int(rng.integers(1, max_rank + 1))
    sizes = tuple(int(rng.integers(min_block, max_block + 1)) for _ in range(r))
    return ConeStructure(sizes)


def random_vector(rng, st: ConeStructure, scale: float = 1.0) -> BlockVector:
    return BlockVector(st, scale * rng.standard_normal(st.n))


def random_interior(rng, st: ConeStructure, spread: float = 1.0) -> BlockVector:
    """Interior point with log-normal eigenvalue gaps above the tail norm."""
    v = rng.standard_normal(st.n)
    tail_sq = np.add.reduceat(v * v, st.starts) - v[st.starts] ** 2
    tails = np.sqrt(np.maximum(tail_sq, 0.0))
    v[st.starts] = tails + np.exp(spread * rng.standard_normal(st.r))
    return BlockVector(st, v)


def near_path_pair(rng, st: ConeStructure, eta: float, nu: float = 1.0):
    """Strictly feasible (x, s) with d(x, s, gap) <= eta * gap.

    Built as s = nu * T_x^{-1}(e + u) with |u|_F well below eta, so the
    scaled dual point sits near the identity.
    """
    from qipm.jordan import identity, t_inv_apply

    x = random_interior(rng, st, spread=0.5)
    u = rng.standard_normal(st.n)
    u *= 0.25 * eta / (np.sqrt(2.0) * np.linalg.norm(u))  # |u|_F = eta/4
    e = identity(st)
    target = BlockVector(st, nu * (e.values + u))
    s = t_inv_apply(x, target)
    return x, s
