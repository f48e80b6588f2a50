"""Assembly and solution of the interior-point step system.

Each iteration solves the 3x3-block linear system

    [ A       0     0      ] [dx]   [ b - A x          ]
    [ 0       A^T   I      ] [dy] = [ c - s - A^T y    ]
    [ Arw(s)  0     Arw(x) ] [ds]   [ sigma*mu*e - x o s ]

exactly (dense LU with partial pivoting) or inexactly: the inexact path
adds an isotropic noise vector of prescribed Euclidean norm to the exact
solution, which models reading the solution out through a finite-precision
vector-tomography procedure.

Two scalar diagnostics of the step matrix M are measured because they
drive the modeled cost of a quantum linear-system solver consuming M as a
block encoding: the condition number ``kappa = sigma_max / sigma_min`` and
the encoding normalisation ``zeta = min(|M|_F, s1(M)) / |M|_2`` evaluated
on the symmetrised embedding [[0, M], [M^T, 0]] since M is not symmetric.

For large systems an equivalent block elimination through the m-by-m Schur
complement ``A Arw(s)^{-1} Arw(x) A^T`` replaces the full dense
factorisation; it produces the same solution and is validated against the
dense path in the test suite.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .jordan import (
    BlockVector,
    ConeDomainError,
    _arw_apply_cols,
    _arw_inv_apply_cols,
    arw,
    identity,
    jordan_product,
    lambda_min,
)
from .socp import Iterate, SocpInstance

__all__ = [
    "NewtonSystem",
    "SolveReport",
    "SingularSystemError",
    "assemble",
    "solve_exact",
    "solve_inexact",
    "measure_kappa",
    "measure_zeta",
]

# relative pivot threshold declaring numerical singularity
PIVOT_RTOL = 1e-13
# full SVD below this matrix dimension, extremal-value iteration above
DENSE_SPECTRUM_LIMIT = 384


class SingularSystemError(RuntimeError):
    """The step matrix is singular or numerically singular."""


@dataclass(eq=False)
class NewtonSystem:
    """Assembled step system with measured conditioning diagnostics.

    ``M`` is materialised lazily; the solver paths and the norm
    measurements work from the constituent blocks.
    """

    inst: SocpInstance
    x: BlockVector
    s: BlockVector
    rhs: np.ndarray
    kappa: float = float("nan")
    zeta: float = float("nan")
    _M: np.ndarray | None = field(default=None, repr=False)
    _reduced: "_ReducedSolver | None" = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return self.inst.m

    @property
    def n(self) -> int:
        return self.inst.cones.n

    @property
    def dim(self) -> int:
        return self.m + 2 * self.n

    @property
    def M(self) -> np.ndarray:
        if self._M is None:
            m, n = self.m, self.n
            M = np.zeros((self.dim, self.dim))
            M[:m, :n] = self.inst.A
            M[m : m + n, n : n + m] = self.inst.A.T
            M[m : m + n, n + m :] = np.eye(n)
            M[m + n :, :n] = arw(self.s)
            M[m + n :, n + m :] = arw(self.x)
            self._M = M
        return self._M

    def apply(self, z: np.ndarray) -> np.ndarray:
        """M @ z without materialising M."""
        m, n = self.m, self.n
        st = self.inst.cones
        zx, zy, zs = z[:n], z[n : n + m], z[n + m :]
        A = self.inst.A
        top = A @ zx
        mid = A.T @ zy + zs
        bot = (
            _arw_apply_cols(st, self.s.values, zx[:, None])
            + _arw_apply_cols(st, self.x.values, zs[:, None])
        )[:, 0]
        return np.concatenate([top, mid, bot])

    def apply_transpose(self, w: np.ndarray) -> np.ndarray:
        """M^T @ w without materialising M."""
        m, n = self.m, self.n
        st = self.inst.cones
        w1, w2, w3 = w[:m], w[m : m + n], w[m + n :]
        A = self.inst.A
        top = A.T @ w1 + _arw_apply_cols(st, self.s.values, w3[:, None])[:, 0]
        mid = A @ w2
        bot = w2 + _arw_apply_cols(st, self.x.values, w3[:, None])[:, 0]
        return np.concatenate([top, mid, bot])

    def split(self, z: np.ndarray) -> tuple[BlockVector, np.ndarray, BlockVector]:
        m, n = self.m, self.n
        st = self.inst.cones
        return BlockVector(st, z[:n]), z[n : n + m].copy(), BlockVector(st, z[n + m :])


@dataclass(frozen=True)
class SolveReport:
    """Solution of a step system plus solve diagnostics.

    ``injected_error`` is the Euclidean distance from the exact solution;
    it is zero on the exact path.
    """

    solution: tuple[BlockVector, np.ndarray, BlockVector]
    residual_norm: float
    exact: bool
    injected_error: float


def _lu_factor_checked(M: np.ndarray):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # scipy warns on exact singularity; the pivot check decides
        lu, piv = sla.lu_factor(M, check_finite=False)
    scale = float(np.linalg.norm(M))
    if scale == 0.0 or np.abs(np.diag(lu)).min() < PIVOT_RTOL * scale:
        raise SingularSystemError(
            f"pivot below {PIVOT_RTOL:g} * |M|_F; matrix is numerically singular"
        )
    return lu, piv


class _ReducedSolver:
    """Direct block elimination of the step system.

    Eliminates ds = r2 - A^T dy and dx = Arw(s)^{-1}(r3 - Arw(x) r2
    + Arw(x) A^T dy), leaving the m-by-m system
    ``A Arw(s)^{-1} Arw(x) A^T dy = r1 - A Arw(s)^{-1}(r3 - Arw(x) r2)``.
    Arw(s) is invertible because s is interior.  The transpose system uses
    the same factors since the Schur matrix of M^T is the transpose of the
    Schur matrix of M.
    """

    def __init__(self, sys: NewtonSystem):
        self.sys = sys
        st = sys.inst.cones
        self.st = st
        self.A = sys.inst.A
        self.xv = sys.x.values
        self.sv = sys.s.values
        W = _arw_apply_cols(st, self.xv, self.A.T)
        self.V = _arw_inv_apply_cols(st, self.sv, W)
        self._lu = _lu_factor_checked(self.A @ self.V)

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        m, n = self.sys.m, self.sys.n
        r1, r2, r3 = rhs[:m], rhs[m : m + n], rhs[m + n :]
        tmp = r3 - _arw_apply_cols(self.st, self.xv, r2[:, None])[:, 0]
        g = _arw_inv_apply_cols(self.st, self.sv, tmp[:, None])[:, 0]
        dy = sla.lu_solve(self._lu, r1 - self.A @ g, check_finite=False)
        dx = g + self.V @ dy
        ds = r2 - self.A.T @ dy
        return np.concatenate([dx, dy, ds])

    def solve_transpose(self, v: np.ndarray) -> np.ndarray:
        m, n = self.sys.m, self.sys.n
        v1, v2, v3 = v[:n], v[n : n + m], v[n + m :]
        t = _arw_inv_apply_cols(self.st, self.sv, v1[:, None])[:, 0]
        xt = _arw_apply_cols(self.st, self.xv, t[:, None])[:, 0]
        w1 = sla.lu_solve(self._lu, self.A @ (xt - v3) + v2, trans=1, check_finite=False)
        w3 = _arw_inv_apply_cols(
            self.st, self.sv, (v1 - self.A.T @ w1)[:, None]
        )[:, 0]
        w2 = v3 - _arw_apply_cols(self.st, self.xv, w3[:, None])[:, 0]
        return np.concatenate([w1, w2, w3])


class _SpectrumTracker:
    """Power/inverse-power estimates of the extreme singular values.

    Keeps its iteration vectors between calls so that successive systems
    of a slowly drifting family need only one or two refinement steps.
    Initial vectors are drawn from a dimension-keyed generator, so repeated
    runs produce identical estimates.
    """

    def __init__(self, dim: int):
        rng = np.random.default_rng([dim, 0x5EED])
        self.v = _unit(rng.standard_normal(dim))
        self.u = _unit(rng.standard_normal(dim))
        self.sigma_max = float("nan")
        self.sigma_min = float("nan")

    def refine(self, matvec, rmatvec, solve, rsolve):
        cold = not np.isfinite(self.sigma_max)
        rtol = 1e-6 if cold else 1e-3
        max_steps = 300 if cold else 8
        prev = self.sigma_max
        for _ in range(max_steps):
            w = matvec(self.v)
            est = float(np.linalg.norm(w))
            self.v = _unit(rmatvec(w))
            if np.isfinite(prev) and abs(est - prev) <= rtol * est:
                prev = est
                break
            prev = est
        self.sigma_max = prev

        prev = self.sigma_min
        for _ in range(max_steps):
            z = solve(rsolve(self.u))
            growth = float(np.linalg.norm(z))
            est = growth ** -0.5
            self.u = z / growth
            if np.isfinite(prev) and abs(est - prev) <= rtol * est:
                prev = est
                break
            prev = est
        self.sigma_min = prev
        return self.sigma_max, self.sigma_min


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def _arw_row_l1(st, v: np.ndarray) -> np.ndarray:
    """Per-coordinate l1 norm of the rows of Arw(v) (columns are equal)."""
    a = np.abs(v)
    per_block = np.add.reduceat(a, st.starts)
    out = a + st.expand(a[st.starts])
    out[st.starts] = per_block
    return out


def _sym_norm_stats(sys: NewtonSystem) -> tuple[float, float]:
    """(Frobenius norm, max absolute row sum) of sym(M) = [[0, M], [M^T, 0]]."""
    inst, st = sys.inst, sys.inst.cones
    xv, sv = sys.x.values, sys.s.values

    def arw_fro_sq(v):
        sizes = np.asarray(st.block_sizes, dtype=float)
        h = v[st.starts]
        tail_sq = np.add.reduceat(v * v, st.starts) - h * h
        return float((sizes * h * h + 2.0 * tail_sq).sum())

    fro_sq = 2.0 * inst._fro_sq_A + sys.n + arw_fro_sq(sv) + arw_fro_sq(xv)
    fro_sym = float(np.sqrt(2.0 * fro_sq))

    arw_s = _arw_row_l1(st, sv)
    arw_x = _arw_row_l1(st, xv)
    s1_rows = max(
        float(inst._row_l1.max()),
        float(inst._col_l1.max()) + 1.0,
        float((arw_s + arw_x).max()),
    )
    s1_cols = max(
        float((inst._col_l1 + arw_s).max()),
        float(inst._row_l1.max()),
        float((1.0 + arw_x).max()),
    )
    return fro_sym, max(s1_rows, s1_cols)


def assemble(
    inst: SocpInstance,
    it: Iterate,
    sigma: float,
    condition: str = "auto",
    tracker: _SpectrumTracker | None = None,
) -> NewtonSystem:
    """Build the step system at an interior iterate, targeting x o s = sigma*mu*e.

    ``condition`` selects how kappa and the spectral norm entering zeta are
    obtained: "exact" uses a full SVD of the dense matrix, "estimate" uses
    warm-startable extremal iterations (``tracker`` carries them across
    calls), "auto" picks by dimension, "skip" leaves both NaN.
    """
    if not 0.0 < sigma < 1.0:
        raise ValueError("sigma must lie strictly between 0 and 1")
    if lambda_min(it.x) <= 0 or lambda_min(it.s) <= 0:
        raise ConeDomainError("step assembly requires a strictly interior iterate")

    st = inst.cones
    e = identity(st)
    r1 = inst.b - inst.A @ it.x.values
    r2 = inst.c.values - it.s.values - inst.A.T @ it.y
    r3 = sigma * it.mu * e.values - jordan_product(it.x, it.s).values
    sys = NewtonSystem(inst, it.x, it.s, np.concatenate([r1, r2, r3]))

    if condition == "skip":
        return sys
    if condition == "auto":
        condition = "exact" if sys.dim <= DENSE_SPECTRUM_LIMIT else "estimate"

    fro_sym, s1_sym = _sym_norm_stats(sys)
    if condition == "exact":
        sv = np.linalg.svd(sys.M, compute_uv=False)
        sigma_max = float(sv[0])
        if sv[-1] <= sys.dim * np.finfo(float).eps * sv[0]:
            sys.kappa = float("inf")
        else:
            sys.kappa = float(sv[0] / sv[-1])
    elif condition == "estimate":
        try:
            reduced = _ReducedSolver(sys)
        except SingularSystemError:
            sys.kappa = float("inf")
            sv = None
            sigma_max = _power_sigma_max(sys.apply, sys.apply_transpose, sys.dim)
            sys.zeta = min(fro_sym, s1_sym) / sigma_max
            return sys
        sys._reduced = reduced
        if tracker is None:
            tracker = _SpectrumTracker(sys.dim)
        smax, smin = tracker.refine(
            sys.apply, sys.apply_transpose, reduced.solve, reduced.solve_transpose
        )
        sigma_max = smax
        sys.kappa = smax / smin
    else:
        raise ValueError(f"unknown condition mode {condition!r}")

    sys.zeta = min(fro_sym, s1_sym) / sigma_max
    return sys


def _power_sigma_max(matvec, rmatvec, dim: int, rtol: float = 1e-6, max_steps: int = 200) -> float:
    rng = np.random.default_rng([dim, 0x5EED])
    v = _unit(rng.standard_normal(dim))
    prev = float("nan")
    for _ in range(max_steps):
        w = matvec(v)
        est = float(np.linalg.norm(w))
        if est == 0.0:
            return 0.0
        v = _unit(rmatvec(w))
        if np.isfinite(prev) and abs(est - prev) <= rtol * est:
            return est
        prev = est
    return prev


def _solve_system(
    sys: NewtonSystem, target_error: float, rng_seed: int, method: str
) -> SolveReport:
    if method == "auto":
        method = "reduced" if (sys._reduced is not None or sys.dim > DENSE_SPECTRUM_LIMIT) else "dense"
    if method == "dense":
        lu = _lu_factor_checked(sys.M)
        raw = sla.lu_solve(lu, sys.rhs, check_finite=False)
    elif method == "reduced":
        solver = sys._reduced if sys._reduced is not None else _ReducedSolver(sys)
        raw = solver.solve(sys.rhs)
        # one refinement pass guards against loss of accuracy in the elimination
        res = sys.rhs - sys.apply(raw)
        scale = float(np.linalg.norm(sys.rhs)) + 1.0
        if np.linalg.norm(res) > 1e-12 * scale:
            raw = raw + solver.solve(res)
    else:
        raise ValueError(f"unknown solve method {method!r}")

    injected = 0.0
    if target_error < 0:
        raise ValueError("target error must be nonnegative")
    if target_error > 0:
        rng = np.random.default_rng(rng_seed)
        noise = rng.uniform(-1.0, 1.0, size=sys.dim)
        noise *= 0.9 * target_error / np.linalg.norm(noise)
        raw = raw + noise
        injected = 0.9 * target_error

    residual = float(np.linalg.norm(sys.apply(raw) - sys.rhs))
    return SolveReport(
        solution=sys.split(raw),
        residual_norm=residual,
        exact=injected == 0.0,
        injected_error=injected,
    )


def solve_exact(sys: NewtonSystem) -> SolveReport:
    """Solve by dense LU with partial pivoting.

    Raises :class:`SingularSystemError` when a pivot falls below the
    relative threshold; the residual satisfies
    ``|M sol - rhs| <= 1e-8 * (|M|_F |sol| + |rhs|)`` on well-posed systems.
    """
    return _solve_system(sys, 0.0, 0, "dense")


def solve_inexact(sys: NewtonSystem, target_error: float, rng_seed: int) -> SolveReport:
    """Exact solve plus a seeded isotropic error of norm 0.9 * target_error.

    Noise coordinates are drawn i.i.d. uniform on [-1, 1] and the vector is
    rescaled to the exact prescribed norm, the adversarially tight choice
    inside a readout-error budget of ``target_error``.  target_error = 0
    reduces to :func:`solve_exact`.
    """
    return _solve_system(sys, target_error, rng_seed, "dense")


def measure_kappa(M: np.ndarray) -> float:
    """Condition number sigma_max / sigma_min; +inf for singular input.

    The singular values of the symmetrised embedding of M are those of M
    up to sign, so the ratio is computed on M directly: a full SVD up to
    dimension ``DENSE_SPECTRUM_LIMIT``, extremal-value iterations above.
    """
    M = np.asarray(M, dtype=float)
    if M.shape[0] != M.shape[1]:
        raise ValueError("condition measurement expects a square matrix")
    if M.shape[0] <= DENSE_SPECTRUM_LIMIT:
        sv = np.linalg.svd(M, compute_uv=False)
        if sv[-1] <= M.shape[0] * np.finfo(float).eps * sv[0]:
            return float("inf")
        return float(sv[0] / sv[-1])
    try:
        lu = _lu_factor_checked(M)
    except SingularSystemError:
        return float("inf")
    tracker = _SpectrumTracker(M.shape[0])
    smax, smin = tracker.refine(
        lambda z: M @ z,
        lambda z: M.T @ z,
        lambda z: sla.lu_solve(lu, z, check_finite=False),
        lambda z: sla.lu_solve(lu, z, trans=1, check_finite=False),
    )
    return smax / smin


def measure_zeta(M: np.ndarray) -> float:
    """Block-encoding normalisation min(|.|_F, s1(.)) / |.|_2.

    Symmetric matrices are measured directly; any other matrix is measured
    through its symmetrised embedding [[0, M], [M^T, 0]], whose norms
    follow from those of M without materialising it.
    """
    M = np.asarray(M, dtype=float)
    if not M.any():
        raise ValueError("zeta is undefined for the zero matrix")
    symmetric = M.shape[0] == M.shape[1] and np.array_equal(M, M.T)
    if symmetric:
        fro = float(np.linalg.norm(M))
        s1 = float(np.abs(M).sum(axis=1).max())
    else:
        fro = float(np.sqrt(2.0) * np.linalg.norm(M))
        s1 = max(float(np.abs(M).sum(axis=1).max()), float(np.abs(M).sum(axis=0).max()))
    if max(M.shape) <= DENSE_SPECTRUM_LIMIT:
        sigma_max = float(np.linalg.svd(M, compute_uv=False)[0])
    else:
        sigma_max = _power_sigma_max(lambda z: M @ z, lambda z: M.T @ z, M.shape[1])
    return min(fro, s1) / sigma_max
