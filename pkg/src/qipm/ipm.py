"""Short-step primal-dual interior-point loop with simulated readout noise.

Each iteration assembles the step system at the current strictly interior
iterate, targets the relaxed complementarity ``x o s = sigma*mu*e`` with
``sigma = 1 - chi/sqrt(r)``, applies the (optionally noisy) increments, and
recomputes the gap ``mu = x.s / r`` from the updated pair.  In tomography
mode the solver output carries an isotropic error of prescribed norm
``0.9 * delta_i`` with

    delta_i = xi/4 * min(lambda_min(x), lambda_min(s)),

the per-iteration readout precision that keeps the step analysis valid.

The loop logs, per iteration, the quantities that the step theory
constrains (gap and central-path distance before/after, minimum
eigenvalues, the scaled-step bound Theta) and the two conditioning
diagnostics (kappa_i, zeta_i) that enter the modeled solver cost

    n^1.5 * max_i kappa_i * max_i zeta_i / (min_i delta_i)^2.

Invariants asserted by the theory - gap contraction by (1 - 0.005/sqrt(r)),
neighborhood preservation, strict feasibility - hold for undamped steps
that start inside the eta-neighborhood; the loop warns (or raises, in
strict mode) when a step starts outside it and keeps the iterates strictly
interior by halving the step at most 30 times.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .jordan import (
    BlockVector,
    ConeDomainError,
    arw,
    identity,
    lambda_min,
    norms_and_extremes,
    t_rep,
)
from .newton import (
    SingularSystemError,
    _solve_system,
    _SpectrumTracker,
    assemble,
)
from .socp import Iterate, SocpInstance, linear_residuals

__all__ = [
    "IpmConfig",
    "IterationRecord",
    "SolveTrace",
    "InitialPointError",
    "StepFailureError",
    "NonConvergenceError",
    "NeighborhoodWarning",
    "initial_point",
    "tomography_precision",
    "theta_bound",
    "step",
    "run",
    "rxs_matrix",
    "cost_metric",
]

# guaranteed per-iteration gap contraction factor is 1 - GAP_ALPHA/sqrt(r)
GAP_ALPHA = 0.005
MAX_DAMPING_HALVINGS = 30


class InitialPointError(ValueError):
    """No feasible starting point can be constructed for this instance."""


class StepFailureError(RuntimeError):
    """A single interior-point step could not be completed."""


class NonConvergenceError(RuntimeError):
    """The loop stopped making progress before reaching the target gap."""

    def __init__(self, message: str, trace: "SolveTrace | None" = None):
        super().__init__(message)
        self.trace = trace


class NeighborhoodWarning(UserWarning):
    """A step started outside the eta-neighborhood of the central path."""


@dataclass(frozen=True)
class IpmConfig:
    """Loop parameters.

    The defaults eta = chi = 0.01 and xi = 0.001 are the constants under
    which the per-iteration guarantees are proved; epsilon is the target
    duality gap.  ``noise_mode`` selects exact solves or the tomography
    noise model; all randomness flows from ``seed``.  ``strict`` turns
    neighborhood-premise violations into errors instead of warnings.
    ``solver`` picks the linear-algebra path ("dense", "reduced" or
    "auto"), ``condition`` how kappa/zeta are measured ("exact",
    "estimate", "auto" or "skip"); neither affects the iterates beyond
    floating-point noise.
    """

    epsilon: float = 0.1
    eta: float = 0.01
    chi: float = 0.01
    xi: float = 0.001
    max_iterations: int = 500_000
    noise_mode: str = "exact"
    seed: int = 0
    strict: bool = False
    solver: str = "auto"
    condition: str = "auto"

    def __post_init__(self):
        if not 0 < self.eta < 1.0 / 3.0:
            raise ValueError("eta must lie in (0, 1/3)")
        if self.chi <= 0 or self.xi < 0:
            raise ValueError("chi must be positive and xi nonnegative")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")
        if self.noise_mode not in ("exact", "tomography"):
            raise ValueError("noise_mode must be 'exact' or 'tomography'")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.solver not in ("dense", "reduced", "auto"):
            raise ValueError("solver must be 'dense', 'reduced' or 'auto'")
        if self.condition not in ("exact", "estimate", "auto", "skip"):
            raise ValueError("condition must be 'exact', 'estimate', 'auto' or 'skip'")


@dataclass(frozen=True)
class IterationRecord:
    """Per-iteration log of everything the step theory talks about.

    ``step_norm_x`` / ``step_norm_s`` are Frobenius norms of the computed
    (pre-damping) increments; residuals are those of the updated iterate.
    """

    index: int
    mu_before: float
    mu_after: float
    d_before: float
    d_after: float
    lambda_min_x: float
    lambda_min_s: float
    delta_i: float
    kappa_i: float
    zeta_i: float
    step_norm_x: float
    step_norm_s: float
    primal_residual: float
    dual_residual: float
    theta_bound: float
    damped: bool


@dataclass
class SolveTrace:
    """Full run log: per-iteration records, final iterate and cost metric."""

    records: list[IterationRecord]
    final: Iterate
    converged: bool
    cost_metric: float
    mu0: float
    iteration_bound: int


def theta_bound(cfg: IpmConfig, r: int) -> float:
    """Scaled-step envelope Theta = sqrt(2 eta^2 + 4 chi^2) / (1 - 3 eta).

    Exact scaled increments from inside the eta-neighborhood satisfy
    |dx_hat|_F <= Theta/sqrt(2) and |ds_hat|_F <= Theta*sqrt(2).  After the
    substitution sigma = 1 - chi/sqrt(r) the bound does not depend on r;
    the argument is kept for symmetry with the per-instance quantities.
    """
    if cfg.eta >= 1.0 / 3.0:
        raise ValueError("the step envelope requires eta < 1/3")
    del r
    return math.sqrt(2.0 * cfg.eta**2 + 4.0 * cfg.chi**2) / (1.0 - 3.0 * cfg.eta)


def tomography_precision(it: Iterate, xi: float) -> float:
    """Per-iteration readout precision xi/4 * min(lambda_min(x), lambda_min(s))."""
    lam = min(lambda_min(it.x), lambda_min(it.s))
    if lam <= 0:
        raise ConeDomainError("readout precision is defined only for interior iterates")
    return 0.25 * xi * lam


def _looks_like_svm(inst: SocpInstance) -> tuple[bool, bool]:
    """(is_svm, folded) from metadata, or from the cone layout if tagged by hint."""
    meta = inst.meta or {}
    if meta.get("kind") == "svm":
        return True, bool(meta.get("folded", True))
    return False, False


def initial_point(inst: SocpInstance, hint: BlockVector | str | None = None) -> Iterate:
    """Feasible interior starting triple.

    For instances produced by the SVM reduction the primal start is
    constructive: zero weights, unit slack on every point and unit value of
    the norm surrogate, which satisfies the equality constraints exactly
    and sits strictly inside the cone.  The dual start is y = 0 and
    s = 2(1 + |c|) e; its equality residual is absorbed by the step
    system's residual terms over the first iterations.

    General instances require ``hint`` to be a strictly feasible primal
    point; ``hint="svm"`` forces the constructive start on an untagged
    instance whose layout matches the reduction.
    """
    st = inst.cones
    is_svm, folded = _looks_like_svm(inst)
    if isinstance(hint, str):
        if hint != "svm":
            raise InitialPointError(f"unknown structure tag {hint!r}")
        is_svm = True
        folded = st.r == inst.m  # reduction: m_points + 1 rows; folded has m_points + 1 blocks

    if isinstance(hint, BlockVector):
        x = hint
        if lambda_min(x) <= 0:
            raise InitialPointError("supplied primal start is not in the cone interior")
        gap = np.linalg.norm(inst.A @ x.values - inst.b)
        if gap > 1e-8 * (1.0 + np.linalg.norm(inst.b)):
            raise InitialPointError("supplied primal start does not satisfy A x = b")
    elif is_svm:
        vals = np.zeros(st.n)
        vals[0] = 2.0
        vals[1] = 1.0
        if folded:
            vals[st.starts[1:]] = 1.0  # unit slack per data point
        else:
            labels = inst.b[:-1]
            vals[st.starts[1]] = 0.5  # separate bias block must be interior
            vals[st.starts[2:]] = 1.0 - 0.5 * labels
        x = BlockVector(st, vals)
        if np.linalg.norm(inst.A @ x.values - inst.b) > 1e-9 * (1.0 + np.linalg.norm(inst.b)):
            raise InitialPointError("instance does not have the expected reduction layout")
    else:
        raise InitialPointError(
            "no constructive start for a general instance; supply a strictly "
            "feasible primal point as hint"
        )

    theta = 2.0 * (1.0 + np.linalg.norm(inst.c.values))
    s = theta * identity(st)
    y = np.zeros(inst.m)
    return Iterate(x, y, s)


@dataclass
class _RunContext:
    method: str
    condition: str
    tracker: _SpectrumTracker | None
    theta: float

    @classmethod
    def create(cls, inst: SocpInstance, cfg: IpmConfig) -> "_RunContext":
        method = cfg.solver if cfg.solver != "auto" else "reduced"
        tracker = None
        if cfg.condition == "estimate" or (
            cfg.condition == "auto" and inst.m + 2 * inst.cones.n > 384
        ):
            tracker = _SpectrumTracker(inst.m + 2 * inst.cones.n)
        return cls(
            method=method,
            condition=cfg.condition,
            tracker=tracker,
            theta=theta_bound(cfg, inst.cones.r),
        )


def _mix_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence((seed, index)).generate_state(1, np.uint64)[0])


def step(
    inst: SocpInstance,
    it: Iterate,
    cfg: IpmConfig,
    index: int = 0,
    ctx: _RunContext | None = None,
) -> tuple[Iterate, IterationRecord]:
    """One interior-point update; returns the new iterate and its record.

    The proposed increments solve the step system at ``it`` with
    ``sigma = 1 - chi/sqrt(r)`` (noisy in tomography mode); if the full
    update would leave the cone interior the step is halved up to 30 times
    and flagged as damped.
    """
    if ctx is None:
        ctx = _RunContext.create(inst, cfg)
    st = inst.cones
    lam_x = lambda_min(it.x)
    lam_s = lambda_min(it.s)
    if lam_x <= 0 or lam_s <= 0:
        raise StepFailureError("step requires a strictly interior iterate")

    in_nbhd = it.d <= cfg.eta * it.mu
    if not in_nbhd:
        if cfg.strict:
            raise StepFailureError("iterate is outside the eta-neighborhood (strict mode)")
        warnings.warn(
            "step started outside the eta-neighborhood; per-step guarantees "
            "are not asserted for it",
            NeighborhoodWarning,
            stacklevel=2,
        )

    sigma = 1.0 - cfg.chi / math.sqrt(st.r)
    delta_i = tomography_precision(it, cfg.xi)
    sys = assemble(inst, it, sigma, condition=ctx.condition, tracker=ctx.tracker)
    if cfg.noise_mode == "tomography":
        rep = _solve_system(sys, delta_i, _mix_seed(cfg.seed, index), ctx.method)
    else:
        rep = _solve_system(sys, 0.0, 0, ctx.method)
    dx, dy, ds = rep.solution

    scale = 1.0
    for _ in range(MAX_DAMPING_HALVINGS + 1):
        cand_x = BlockVector(st, it.x.values + scale * dx.values)
        cand_s = BlockVector(st, it.s.values + scale * ds.values)
        if lambda_min(cand_x) > 0 and lambda_min(cand_s) > 0:
            break
        scale *= 0.5
    else:
        raise StepFailureError(
            f"iterate left the cone interior and {MAX_DAMPING_HALVINGS} "
            "step halvings did not recover it"
        )

    new_it = Iterate(cand_x, it.y + scale * dy, cand_s)
    primal, dual = linear_residuals(inst, new_it)
    rec = IterationRecord(
        index=index,
        mu_before=it.mu,
        mu_after=new_it.mu,
        d_before=it.d,
        d_after=new_it.d,
        lambda_min_x=lam_x,
        lambda_min_s=lam_s,
        delta_i=delta_i,
        kappa_i=sys.kappa,
        zeta_i=sys.zeta,
        step_norm_x=norms_and_extremes(dx).fro,
        step_norm_s=norms_and_extremes(ds).fro,
        primal_residual=primal,
        dual_residual=dual,
        theta_bound=ctx.theta,
        damped=scale < 1.0,
    )
    return new_it, rec


def run(inst: SocpInstance, cfg: IpmConfig, hint: BlockVector | str | None = None) -> SolveTrace:
    """Iterate until the duality gap reaches epsilon.

    Returns a trace with ``converged = False`` when ``max_iterations`` runs
    out; raises :class:`NonConvergenceError` (with the partial trace
    attached) when the gap makes no progress over 10*sqrt(r) consecutive
    iterations, and propagates hard step failures.
    """
    it = initial_point(inst, hint)
    mu0 = it.mu
    r = inst.cones.r
    if mu0 > cfg.epsilon:
        bound = math.ceil(math.sqrt(r) / GAP_ALPHA * math.log(mu0 / cfg.epsilon))
    else:
        bound = 0
    ctx = _RunContext.create(inst, cfg)
    records: list[IterationRecord] = []

    stall_window = math.ceil(10.0 * math.sqrt(r))
    best_mu = mu0
    since_best = 0
    while it.mu > cfg.epsilon and len(records) < cfg.max_iterations:
        it, rec = step(inst, it, cfg, index=len(records), ctx=ctx)
        records.append(rec)
        if rec.mu_after < best_mu:
            best_mu = rec.mu_after
            since_best = 0
        else:
            since_best += 1
            if since_best >= stall_window:
                trace = _finish(records, it, False, inst, mu0, bound)
                raise NonConvergenceError(
                    f"duality gap made no progress over {stall_window} iterations",
                    trace,
                )
    return _finish(records, it, it.mu <= cfg.epsilon, inst, mu0, bound)


def _finish(records, it, converged, inst, mu0, bound) -> SolveTrace:
    trace = SolveTrace(
        records=records,
        final=it,
        converged=converged,
        cost_metric=float("nan"),
        mu0=mu0,
        iteration_bound=bound,
    )
    if records:
        trace.cost_metric = cost_metric(trace, inst)
    return trace


def rxs_matrix(it: Iterate) -> np.ndarray:
    """Dense scaling-diagnostic matrix T_x Arw(x)^{-1} Arw(s) T_x.

    Inside the eta-neighborhood it stays within 3*eta*mu of mu*I, and the
    exact scaled increments satisfy
    ``ds_hat = sigma e - s_hat - R_xs dx_hat / mu``.
    """
    if lambda_min(it.x) <= 0:
        raise ConeDomainError("the scaling diagnostic requires x in the cone interior")
    ax = arw(it.x)
    try:
        inner = np.linalg.solve(ax, arw(it.s))
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError("Arw(x) is singular") from exc
    tx = t_rep(it.x)
    return tx @ inner @ tx


def cost_metric(trace: SolveTrace, inst: SocpInstance) -> float:
    """Modeled solver cost n^1.5 * kappa * zeta / delta^2 over a run.

    kappa and zeta aggregate as maxima over iterations and delta as the
    minimum readout precision, matching their run-level definitions.
    """
    if not trace.records:
        raise ValueError("cost metric is undefined for an empty trace")
    kappa = max(r.kappa_i for r in trace.records)
    zeta = max(r.zeta_i for r in trace.records)
    delta = min(r.delta_i for r in trace.records)
    return inst.cones.n**1.5 * kappa * zeta / delta**2
