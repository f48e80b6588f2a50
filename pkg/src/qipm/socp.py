"""Cone-program data and central-path measurements.

The problem is  min c.x  s.t.  A x = b,  x in the cone product, with dual
max b.y  s.t.  A^T y + s = c,  s in the cone.  The duality gap of a pair
(x, s) is x.s / r, and the distance of the pair from the central path at
parameter nu is  d(x, s, nu) = |T_x s - nu e|_F.  The eta-neighborhood of
the path collects the strictly feasible triples with d <= eta * gap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .jordan import (
    BlockVector,
    ConeDomainError,
    ConeStructure,
    _check_same_structure,
    identity,
    lambda_min,
    t_apply,
)

__all__ = [
    "SocpInstance",
    "Iterate",
    "RankDeficientError",
    "duality_gap",
    "central_path_distance",
    "in_neighborhood",
    "linear_residuals",
    "scale_to_frame",
]


class RankDeficientError(ValueError):
    """Constraint matrix does not have full row rank."""


@dataclass(frozen=True, eq=False)
class SocpInstance:
    """Problem data (A, b, c) over a fixed cone structure.

    A must have full row rank with m <= n; this is checked once at
    construction via the singular values (rank-deficient data is rejected,
    not repaired, because step-system uniqueness depends on it).  Row/column
    absolute sums, Frobenius norm and the spectral norm of A are cached for
    the per-iteration cost measurements.
    """

    A: np.ndarray
    b: np.ndarray
    c: BlockVector
    cones: ConeStructure
    meta: dict | None = None

    m: int = field(init=False, repr=False)
    norm_A: float = field(init=False, repr=False)

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if A.ndim != 2:
            raise ValueError("A must be a 2-d matrix")
        m, n = A.shape
        if n != self.cones.n:
            raise ValueError(f"A has {n} columns but the cone structure has dimension {self.cones.n}")
        if self.c.structure != self.cones:
            raise ValueError("objective vector does not match the cone structure")
        if b.shape != (m,):
            raise ValueError(f"b must have length {m}")
        if m > n:
            raise RankDeficientError(f"more constraint rows ({m}) than variables ({n})")
        if not (np.isfinite(A).all() and np.isfinite(b).all() and np.isfinite(self.c.values).all()):
            raise ValueError("problem data must be finite")
        sv = np.linalg.svd(A, compute_uv=False)
        rank_tol = max(A.shape) * np.finfo(float).eps * (sv[0] if sv.size else 0.0)
        if sv.size == 0 or (sv > rank_tol).sum() < m:
            raise RankDeficientError(f"A has row rank below {m}")
        b = b.copy()
        b.setflags(write=False)
        A = A.copy()
        A.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "norm_A", float(sv[0]))
        object.__setattr__(self, "_row_l1", np.abs(A).sum(axis=1))
        object.__setattr__(self, "_col_l1", np.abs(A).sum(axis=0))
        object.__setattr__(self, "_fro_sq_A", float((A * A).sum()))

    @property
    def n(self) -> int:
        return self.cones.n


@dataclass(frozen=True, eq=False)
class Iterate:
    """Primal-dual triple with its recomputed gap and central-path distance.

    ``mu`` is always recomputed as x.s / r; ``d`` is the distance
    d(x, s, mu), or NaN when x is not in the cone interior (the distance is
    undefined there).
    """

    x: BlockVector
    y: np.ndarray
    s: BlockVector
    mu: float = field(init=False)
    d: float = field(init=False)

    def __post_init__(self):
        _check_same_structure(self.x, self.s)
        y = np.asarray(self.y, dtype=float).copy()
        y.setflags(write=False)
        object.__setattr__(self, "y", y)
        mu = self.x.dot(self.s) / self.x.structure.r
        object.__setattr__(self, "mu", float(mu))
        if lambda_min(self.x) > 0 and mu > 0:
            d = central_path_distance(self.x, self.s, mu)
        else:
            d = float("nan")
        object.__setattr__(self, "d", d)


def duality_gap(x: BlockVector, s: BlockVector) -> float:
    """x.s / r."""
    st = _check_same_structure(x, s)
    return float(x.values @ s.values) / st.r


def central_path_distance(x: BlockVector, s: BlockVector, nu: float) -> float:
    """|T_x s - nu e|_F; requires x interior and nu > 0."""
    st = _check_same_structure(x, s)
    if nu <= 0:
        raise ValueError("central-path parameter must be positive")
    z = t_apply(x, s).values.copy()
    z[st.starts] -= nu
    return float(np.sqrt(2.0) * np.linalg.norm(z))


def in_neighborhood(it: Iterate, eta: float) -> bool:
    """Strict cone feasibility on both sides and d(x, s, mu) <= eta * mu."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    if lambda_min(it.x) <= 0 or lambda_min(it.s) <= 0:
        return False
    return bool(it.d <= eta * it.mu)


def linear_residuals(inst: SocpInstance, it: Iterate) -> tuple[float, float]:
    """Euclidean norms of (A x - b, A^T y + s - c)."""
    primal = float(np.linalg.norm(inst.A @ it.x.values - inst.b))
    dual = float(np.linalg.norm(inst.A.T @ it.y + it.s.values - inst.c.values))
    return primal, dual


def scale_to_frame(
    x: BlockVector, s: BlockVector, mu: float
) -> tuple[BlockVector, BlockVector]:
    """Rescale the pair so the primal side becomes e: returns (e, T_x s / mu).

    With mu the duality gap of (x, s) the scaled gap is exactly 1, and
    distances transform as d(x, s, mu*sigma) = mu * d(e, s_hat, sigma).
    """
    st = _check_same_structure(x, s)
    if mu <= 0:
        raise ValueError("mu must be positive")
    if lambda_min(x) <= 0:
        raise ConeDomainError("scaling requires x in the cone interior")
    shat = t_apply(x, s).values / mu
    return identity(st), BlockVector(st, shat)
