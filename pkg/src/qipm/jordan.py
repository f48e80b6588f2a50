"""Algebra of block vectors over products of Lorentz (second-order) cones.

A block vector x = (x_1; ...; x_r) stacks one segment per cone block, each
segment written (x0; xbar) with x0 the leading coordinate.  The bilinear
product ``x o y = (x.y; x0*ybar + y0*xbar)`` plays the role of the symmetric
matrix product: every block has two eigenvalues ``x0 +- |xbar|`` with an
associated idempotent frame, powers are defined spectrally, and the
quadratic representation Q_x (with its square root T_x) is the analogue of
the two-sided map ``Y -> X Y X``.

Eigenvalues decide cone membership: a block lies in the cone iff both
eigenvalues are nonnegative, strictly inside iff both are positive.

All functions here are pure; block vectors are immutable after
construction.  Matrix representations (:func:`arw`, :func:`quad_rep`,
:func:`t_rep`) are materialised as dense arrays only on request - the
``*_apply`` forms compute the corresponding matrix-vector products in
O(n) using per-block closed forms, and the solver paths use those.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, NamedTuple

import numpy as np

__all__ = [
    "ConeStructure",
    "BlockVector",
    "SpectralDecomposition",
    "VectorNorms",
    "StructureMismatchError",
    "ConeDomainError",
    "identity",
    "spectral_decompose",
    "jordan_product",
    "arw",
    "arw_apply",
    "arw_inv_apply",
    "quad_rep",
    "quad_apply",
    "t_rep",
    "t_apply",
    "t_inv_apply",
    "power",
    "norms_and_extremes",
    "cone_membership",
]

Membership = Literal["interior", "boundary", "outside"]

MEMBERSHIP_TOL = 1e-12


class StructureMismatchError(ValueError):
    """Operands do not share the same cone structure."""


class ConeDomainError(ValueError):
    """Argument violates a cone-membership precondition."""


@dataclass(frozen=True, eq=False)
class ConeStructure:
    """Partition of R^n into r Lorentz-cone blocks of sizes (n_1, ..., n_r)."""

    block_sizes: tuple[int, ...]
    n: int = field(init=False, repr=False)
    r: int = field(init=False, repr=False)

    def __post_init__(self):
        sizes = tuple(int(k) for k in self.block_sizes)
        if not sizes or any(k < 1 for k in sizes):
            raise ValueError("block sizes must be a nonempty list of positive integers")
        object.__setattr__(self, "block_sizes", sizes)
        object.__setattr__(self, "n", int(sum(sizes)))
        object.__setattr__(self, "r", len(sizes))
        sizes_arr = np.asarray(sizes, dtype=np.intp)
        starts = np.zeros(self.r, dtype=np.intp)
        np.cumsum(sizes_arr[:-1], out=starts[1:])
        object.__setattr__(self, "_starts", starts)
        object.__setattr__(self, "_sizes", sizes_arr)
        # block index of every coordinate, for broadcasting per-block scalars
        object.__setattr__(self, "_block_of", np.repeat(np.arange(self.r), sizes_arr))

    @property
    def starts(self) -> np.ndarray:
        """Index of the leading coordinate of each block."""
        return self._starts

    def __eq__(self, other) -> bool:
        return isinstance(other, ConeStructure) and self.block_sizes == other.block_sizes

    def __hash__(self) -> int:
        return hash(self.block_sizes)

    def expand(self, per_block: np.ndarray) -> np.ndarray:
        """Broadcast one scalar per block to one scalar per coordinate."""
        return per_block[self._block_of]


@dataclass(frozen=True, eq=False)
class BlockVector:
    """An element of R^n partitioned by a :class:`ConeStructure`."""

    structure: ConeStructure
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.structure.n,):
            raise ValueError(
                f"expected {self.structure.n} values, got shape {v.shape}"
            )
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def dot(self, other: BlockVector) -> float:
        _check_same_structure(self, other)
        return float(self.values @ other.values)

    def __add__(self, other: BlockVector) -> BlockVector:
        _check_same_structure(self, other)
        return BlockVector(self.structure, self.values + other.values)

    def __sub__(self, other: BlockVector) -> BlockVector:
        _check_same_structure(self, other)
        return BlockVector(self.structure, self.values - other.values)

    def __mul__(self, scalar: float) -> BlockVector:
        return BlockVector(self.structure, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> BlockVector:
        return BlockVector(self.structure, -self.values)

    def block(self, i: int) -> np.ndarray:
        st = self.structure
        lo = st.starts[i]
        return self.values[lo : lo + st.block_sizes[i]]


class VectorNorms(NamedTuple):
    fro: float
    spec: float
    lam_min: float


@dataclass(frozen=True)
class SpectralDecomposition:
    """Per-block eigenvalues and frame of a block vector.

    ``c1`` and ``c2`` hold, block by block, the two idempotent eigenvectors;
    the original vector is ``lam1[i]*c1_i + lam2[i]*c2_i`` on block i.
    """

    lam1: np.ndarray
    lam2: np.ndarray
    c1: BlockVector
    c2: BlockVector

    def reconstruct(self) -> BlockVector:
        st = self.c1.structure
        vals = st.expand(self.lam1) * self.c1.values + st.expand(self.lam2) * self.c2.values
        return BlockVector(st, vals)


def _check_same_structure(x: BlockVector, y: BlockVector) -> ConeStructure:
    if x.structure != y.structure:
        raise StructureMismatchError(
            f"cone structures differ: {x.structure.block_sizes} vs {y.structure.block_sizes}"
        )
    return x.structure


def identity(structure: ConeStructure) -> BlockVector:
    """The unit element e = (1; 0) of every block."""
    vals = np.zeros(structure.n)
    vals[structure.starts] = 1.0
    return BlockVector(structure, vals)


def _heads(st: ConeStructure, v: np.ndarray) -> np.ndarray:
    return v[st.starts]


def _tail_norms(st: ConeStructure, v: np.ndarray) -> np.ndarray:
    sq = np.add.reduceat(v * v, st.starts)
    h = v[st.starts]
    return np.sqrt(np.maximum(sq - h * h, 0.0))


def _eigenvalues(st: ConeStructure, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    h = v[st.starts]
    t = _tail_norms(st, v)
    return h + t, h - t


def eigenvalues(x: BlockVector) -> tuple[np.ndarray, np.ndarray]:
    """Arrays (lam1, lam2) of the per-block eigenvalues, lam1 >= lam2."""
    return _eigenvalues(x.structure, x.values)


def lambda_min(x: BlockVector) -> float:
    """Smallest of the 2r eigenvalues."""
    st = x.structure
    return float((_heads(st, x.values) - _tail_norms(st, x.values)).min())


def spectral_decompose(x: BlockVector) -> SpectralDecomposition:
    """Per-block eigenvalues x0 +- |xbar| and their idempotent frame.

    When a block has xbar = 0 the two eigenvalues coincide and any unit
    direction gives a valid frame; the fixed direction (1, 0, ..., 0)
    inside the block is used so results are reproducible.  Blocks of size
    one carry no barred part at all and their frame is the pair of equal
    half-unit vectors.
    """
    st = x.structure
    v = x.values
    h = _heads(st, v)
    t = _tail_norms(st, v)
    lam1, lam2 = h + t, h - t

    coef = np.zeros(st.r)
    np.divide(0.5, t, out=coef, where=t > 0)
    c1 = st.expand(coef) * v
    c2 = -c1
    c1[st.starts] = 0.5
    c2[st.starts] = 0.5

    degenerate = (t == 0) & (np.asarray(st.block_sizes) >= 2)
    if degenerate.any():
        first_tail = st.starts[degenerate] + 1
        c1[first_tail] = 0.5
        c2[first_tail] = -0.5

    return SpectralDecomposition(lam1, lam2, BlockVector(st, c1), BlockVector(st, c2))


def jordan_product(x: BlockVector, y: BlockVector) -> BlockVector:
    """Blockwise product (x.y; x0*ybar + y0*xbar); commutative, identity e."""
    st = _check_same_structure(x, y)
    dots = np.add.reduceat(x.values * y.values, st.starts)
    out = st.expand(_heads(st, x.values)) * y.values + st.expand(_heads(st, y.values)) * x.values
    out[st.starts] = dots
    return BlockVector(st, out)


def arw_apply(x: BlockVector, y: BlockVector) -> BlockVector:
    """Arw(x) @ y, which equals the block product x o y."""
    return jordan_product(x, y)


def arw(x: BlockVector) -> np.ndarray:
    """Dense block-diagonal arrow matrix [[x0, xbar^T], [xbar, x0 I]]."""
    st = x.structure
    out = np.zeros((st.n, st.n))
    for i, k in enumerate(st.block_sizes):
        lo = st.starts[i]
        blk = x.values[lo : lo + k]
        view = out[lo : lo + k, lo : lo + k]
        np.fill_diagonal(view, blk[0])
        view[0, :] = blk
        view[:, 0] = blk
    return out


def _arw_apply_cols(st: ConeStructure, x: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Arw(x) @ V for a stack of columns V of shape (n, k)."""
    dots = np.add.reduceat(x[:, None] * V, st.starts, axis=0)
    out = st.expand(_heads(st, x))[:, None] * V + V[st.starts][st._block_of] * x[:, None]
    out[st.starts] = dots
    return out


def _arw_inv_apply_cols(st: ConeStructure, x: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Arw(x)^{-1} @ V for columns V; requires x0 != 0 and lam1*lam2 != 0."""
    x0 = _heads(st, x)
    t = _tail_norms(st, x)
    det = (x0 + t) * (x0 - t)
    if (det == 0).any() or (x0 == 0).any():
        raise ConeDomainError("arrow matrix is singular (zero eigenvalue or zero head)")
    v0 = V[st.starts]
    dots = np.add.reduceat(x[:, None] * V, st.starts, axis=0)
    xbar_dot_v = dots - x0[:, None] * v0
    coef = -v0 / det[:, None] + xbar_dot_v / (x0 * det)[:, None]
    out = coef[st._block_of] * x[:, None] + V / st.expand(x0)[:, None]
    out[st.starts] = (x0[:, None] * v0 - xbar_dot_v) / det[:, None]
    return out


def arw_inv_apply(x: BlockVector, y: BlockVector) -> BlockVector:
    """Arw(x)^{-1} @ y via the per-block closed form."""
    st = _check_same_structure(x, y)
    out = _arw_inv_apply_cols(st, x.values, y.values[:, None])[:, 0]
    return BlockVector(st, out)


def quad_apply(x: BlockVector, y: BlockVector) -> BlockVector:
    """Q_x @ y in O(n): (|x|^2 y0 + 2 x0 <xbar,ybar>; 2<x,y> xbar + lam1 lam2 ybar)."""
    st = _check_same_structure(x, y)
    xv, yv = x.values, y.values
    d = np.add.reduceat(xv * yv, st.starts)
    xsq = np.add.reduceat(xv * xv, st.starts)
    x0 = _heads(st, xv)
    y0 = _heads(st, yv)
    det = 2.0 * x0 * x0 - xsq  # lam1 * lam2
    out = st.expand(2.0 * d) * xv + st.expand(det) * yv
    out[st.starts] = xsq * y0 + 2.0 * x0 * (d - x0 * y0)
    return BlockVector(st, out)


def quad_rep(x: BlockVector) -> np.ndarray:
    """Dense quadratic representation, blockwise [[|x|^2, 2 x0 xbar^T],
    [2 x0 xbar, lam1 lam2 I + 2 xbar xbar^T]]."""
    st = x.structure
    out = np.zeros((st.n, st.n))
    for i, k in enumerate(st.block_sizes):
        lo = st.starts[i]
        blk = x.values[lo : lo + k]
        x0, xbar = blk[0], blk[1:]
        xsq = float(blk @ blk)
        det = 2.0 * x0 * x0 - xsq
        view = out[lo : lo + k, lo : lo + k]
        np.fill_diagonal(view, det)
        view[1:, 1:] += 2.0 * np.outer(xbar, xbar)
        view[0, 0] = xsq
        view[0, 1:] = 2.0 * x0 * xbar
        view[1:, 0] = 2.0 * x0 * xbar
    return out


def power(x: BlockVector, p: float) -> BlockVector:
    """Spectral power lam1^p c1 + lam2^p c2, blockwise.

    Negative p requires all eigenvalues nonzero; non-integer p requires all
    eigenvalues nonnegative (the vector lies in the cone).
    """
    st = x.structure
    lam1, lam2 = _eigenvalues(st, x.values)
    if p < 0 and (np.any(lam1 == 0) or np.any(lam2 == 0)):
        raise ConeDomainError("negative power of a vector with a zero eigenvalue")
    if p != int(p) and lam2.min() < 0:
        raise ConeDomainError("fractional power of a vector with a negative eigenvalue")
    a = np.power(lam1, p)
    b = np.power(lam2, p)
    t = _tail_norms(st, x.values)
    coef = np.zeros(st.r)
    np.divide(a - b, 2.0 * t, out=coef, where=t > 0)
    out = st.expand(coef) * x.values
    out[st.starts] = 0.5 * (a + b)
    return BlockVector(st, out)


def inverse(x: BlockVector) -> BlockVector:
    return power(x, -1.0)


def _require_interior(x: BlockVector, what: str) -> None:
    if lambda_min(x) <= 0:
        raise ConeDomainError(f"{what} requires a vector in the cone interior")


def t_apply(x: BlockVector, y: BlockVector) -> BlockVector:
    """T_x @ y = Q_{x^{1/2}} @ y; x must lie in the cone interior."""
    _require_interior(x, "T_x")
    return quad_apply(power(x, 0.5), y)


def t_inv_apply(x: BlockVector, y: BlockVector) -> BlockVector:
    """T_x^{-1} @ y = Q_{x^{-1/2}} @ y; x must lie in the cone interior."""
    _require_interior(x, "T_x^{-1}")
    return quad_apply(power(x, -0.5), y)


def t_rep(x: BlockVector) -> np.ndarray:
    """Dense T_x = Q_{x^{1/2}}; satisfies T_x e = x and |T_x|_2 = |x|_2."""
    _require_interior(x, "T_x")
    return quad_rep(power(x, 0.5))


def norms_and_extremes(x: BlockVector) -> VectorNorms:
    """Frobenius norm, spectral norm and smallest eigenvalue.

    The Frobenius norm is sqrt(sum of squared eigenvalues) = sqrt(2)|x|;
    the spectral "norm" max|lam| is subadditive and dominated by the
    Frobenius norm but vanishes on some nonzero vectors outside the cone.
    """
    st = x.structure
    h = _heads(st, x.values)
    t = _tail_norms(st, x.values)
    fro = float(np.sqrt(2.0) * np.linalg.norm(x.values))
    spec = float((np.abs(h) + t).max())
    lam_min = float((h - t).min())
    return VectorNorms(fro=fro, spec=spec, lam_min=lam_min)


def cone_membership(x: BlockVector, tol: float = MEMBERSHIP_TOL) -> Membership:
    """Classify x against the cone: interior, boundary or outside.

    ``interior`` iff the smallest eigenvalue exceeds +tol, ``outside`` iff
    it is below -tol, ``boundary`` otherwise.
    """
    if tol < 0:
        raise ValueError("tolerance must be nonnegative")
    lm = lambda_min(x)
    if lm > tol:
        return "interior"
    if lm < -tol:
        return "outside"
    return "boundary"
