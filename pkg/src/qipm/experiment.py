"""Scaling-experiment harness: instance sweeps, power-law fits, reports.

A sweep samples random SVM training problems over a doubling grid of
feature dimensions with m = 2n points each, solves every instance twice
(exact solves and the tomography noise model), and records the modeled
solver cost together with train/test accuracies of both classifiers.  The
cost is fitted as a power law a * n^b by least squares on log-log data,
with a 95% Student-t confidence interval on the exponent.

Published full-scale reference exponents for this experiment family are
quoted in reports as context: 2.591 [2.564, 2.619] for the modeled
noisy-solver cost, 3.314 for the ECOS cone solver and 3.112 for LIBSVM.
"""

from __future__ import annotations

import csv
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np
import scipy.stats

from .ipm import IpmConfig, NeighborhoodWarning, NonConvergenceError, StepFailureError, run
from .newton import SingularSystemError
from .svm import accuracy, extract_classifier, generate, to_socp

__all__ = [
    "RunRecord",
    "PowerLawFit",
    "DEFAULT_P_GRID",
    "REFERENCE_EXPONENTS",
    "sweep",
    "fit_power_law",
    "fit_line",
    "accuracy_cdf",
    "report",
    "write_records_csv",
    "read_records_csv",
]

DEFAULT_P_GRID: tuple[float, ...] = tuple(round(0.1 * k, 1) for k in range(11))

# full-scale published values, quoted in reports for context only
REFERENCE_EXPONENTS = (
    ("modeled noisy-solver cost", 2.591, (2.564, 2.619)),
    ("ECOS (general cone solver)", 3.314, (3.297, 3.330)),
    ("LIBSVM (linear kernel)", 3.112, (2.799, 3.425)),
)


@dataclass(frozen=True)
class RunRecord:
    """One sweep entry: instance parameters, solver metrics, accuracies."""

    n: int
    m: int
    p: float
    seed: int
    converged: bool
    iterations: int
    kappa_max: float
    zeta_max: float
    delta_min: float
    cost_metric: float
    acc_train_exact: float
    acc_train_noisy: float
    acc_test_exact: float
    acc_test_noisy: float
    wall_time_s: float


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares fit of y = a * x^b with a Student-t interval on b."""

    a: float
    b: float
    ci_low: float
    ci_high: float
    n_points: int

    def __post_init__(self):
        if not self.ci_low <= self.b <= self.ci_high:
            raise ValueError("confidence interval must bracket the exponent")


def _run_seed(master: int, n: int, k: int) -> int:
    return int(np.random.SeedSequence((master, n, k)).generate_state(1, np.uint64)[0])


def _execute_run(args: tuple) -> RunRecord:
    n, p, seed, epsilon, C = args
    t0 = time.perf_counter()
    train, test = generate(n, 2 * n, p, seed)
    inst = to_socp(train, C)

    def attempt(mode):
        cfg = IpmConfig(
            epsilon=epsilon, noise_mode=mode, seed=seed, condition="estimate"
        )
        try:
            with warnings.catch_warnings():
                # constructive starts sit off the path for a few iterations
                warnings.simplefilter("ignore", NeighborhoodWarning)
                trace = run(inst, cfg)
            return trace if trace.converged else None
        except (NonConvergenceError, StepFailureError, SingularSystemError):
            return None

    exact = attempt("exact")
    noisy = attempt("tomography")

    nan = float("nan")
    iters, kmax, zmax, dmin, cost = 0, nan, nan, nan, nan
    if noisy is not None and noisy.records:
        iters = len(noisy.records)
        kmax = max(r.kappa_i for r in noisy.records)
        zmax = max(r.zeta_i for r in noisy.records)
        dmin = min(r.delta_i for r in noisy.records)
        cost = noisy.cost_metric
    accs = [nan] * 4
    if exact is not None and noisy is not None:
        clf_e = extract_classifier(inst, exact.final)
        clf_n = extract_classifier(inst, noisy.final)
        accs = [
            accuracy(clf_e, train),
            accuracy(clf_n, train),
            accuracy(clf_e, test),
            accuracy(clf_n, test),
        ]
    return RunRecord(
        n=n,
        m=2 * n,
        p=p,
        seed=seed,
        converged=exact is not None and noisy is not None,
        iterations=iters,
        kappa_max=kmax,
        zeta_max=zmax,
        delta_min=dmin,
        cost_metric=cost,
        acc_train_exact=accs[0],
        acc_train_noisy=accs[1],
        acc_test_exact=accs[2],
        acc_test_noisy=accs[3],
        wall_time_s=time.perf_counter() - t0,
    )


def sweep(
    n_range: tuple[int, int],
    instances: int,
    p_grid: tuple[float, ...] = DEFAULT_P_GRID,
    epsilon: float = 0.1,
    C: float = 1.0,
    seed: int = 0,
    workers: int | None = None,
) -> list[RunRecord]:
    """Run the experiment over a doubling grid of feature dimensions.

    For every n in {n_min, 2 n_min, ...} <= n_max, ``instances`` problems
    are drawn with m = 2n and the flip probability sampled uniformly from
    ``p_grid``.  Each is solved in exact and tomography mode; failures are
    recorded with ``converged = False`` and never abort the sweep.  Fully
    deterministic in the master seed (up to wall-clock fields); records
    are ordered by (n, p, seed).

    ``workers`` (or the QIPM_WORKERS environment variable) enables
    process-level parallelism over runs.
    """
    n_min, n_max = n_range
    if n_min < 2 or n_max < n_min:
        raise ValueError("need 2 <= n_min <= n_max")
    if instances < 1:
        raise ValueError("need at least one instance per cell")
    if epsilon <= 0 or C <= 0:
        raise ValueError("epsilon and C must be positive")
    if not p_grid:
        raise ValueError("p grid must be nonempty")

    sizes = []
    n = n_min
    while n <= n_max:
        sizes.append(n)
        n *= 2
    master = np.random.default_rng(seed)
    specs = []
    for n in sizes:
        for k in range(instances):
            p = float(p_grid[master.integers(len(p_grid))])
            specs.append((n, p, _run_seed(seed, n, k), epsilon, C))

    if workers is None:
        workers = int(os.environ.get("QIPM_WORKERS", "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_execute_run, specs))
    else:
        records = [_execute_run(s) for s in specs]
    records.sort(key=lambda r: (r.n, r.p, r.seed))
    return records


def fit_power_law(points) -> PowerLawFit:
    """Fit y = a * x^b by least squares on (log x, log y).

    Requires at least three points with positive coordinates and at least
    two distinct x values; the interval on b uses the standard
    simple-regression slope error and the Student-t 0.975 quantile with
    n - 2 degrees of freedom.
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 3:
        raise ValueError("need at least three (x, y) points")
    if (pts <= 0).any() or not np.isfinite(pts).all():
        raise ValueError("power-law fit requires finite positive coordinates")
    lx = np.log(pts[:, 0])
    ly = np.log(pts[:, 1])
    if np.unique(lx).size < 2:
        raise ValueError("need at least two distinct x values")
    res = scipy.stats.linregress(lx, ly)
    tq = float(scipy.stats.t.ppf(0.975, pts.shape[0] - 2))
    half = tq * res.stderr
    return PowerLawFit(
        a=float(np.exp(res.intercept)),
        b=float(res.slope),
        ci_low=float(res.slope - half),
        ci_high=float(res.slope + half),
        n_points=pts.shape[0],
    )


def fit_line(fit: PowerLawFit) -> str:
    return (
        f"exponent b={fit.b:.6g} ci95=[{fit.ci_low:.6g},{fit.ci_high:.6g}] "
        f"n={fit.n_points}"
    )


def accuracy_cdf(records: list[RunRecord]) -> list[tuple[float, float, float]]:
    """Empirical CDF of (noisy - exact) accuracy differences.

    Rows are (threshold, train fraction, test fraction) with thresholds in
    steps of 0.01 over [-1, 1].  Only records with comparable accuracies
    (both solves converged) enter.
    """
    if not records:
        raise ValueError("no records")
    diffs_tr = []
    diffs_te = []
    for r in records:
        if math.isfinite(r.acc_train_exact) and math.isfinite(r.acc_train_noisy):
            diffs_tr.append(r.acc_train_noisy - r.acc_train_exact)
        if math.isfinite(r.acc_test_exact) and math.isfinite(r.acc_test_noisy):
            diffs_te.append(r.acc_test_noisy - r.acc_test_exact)
    if not diffs_tr or not diffs_te:
        raise ValueError("no records with comparable accuracies")
    dtr = np.asarray(diffs_tr)
    dte = np.asarray(diffs_te)
    rows = []
    for k in range(-100, 101):
        t = k / 100.0
        rows.append(
            (
                t,
                float(np.mean(dtr <= t + 1e-12)),
                float(np.mean(dte <= t + 1e-12)),
            )
        )
    return rows


def _median_or_nan(vals) -> float:
    vals = [v for v in vals if math.isfinite(v)]
    return float(np.median(vals)) if vals else float("nan")


def report(records: list[RunRecord], fits: dict[str, PowerLawFit] | None = None) -> str:
    """Human-readable experiment summary; byte-identical for identical inputs."""
    out = []
    out.append("scaling experiment report")
    out.append("=" * 40)
    out.append("")

    out.append("runs")
    out.append("-" * 4)
    if not records:
        out.append("no data")
    else:
        conv = sum(r.converged for r in records)
        out.append(f"total runs: {len(records)}, converged: {conv}")
        out.append("")
        out.append("per-n medians (converged runs)")
        out.append(f"{'n':>6} {'runs':>5} {'iters':>8} {'kappa_max':>12} {'zeta_max':>12} {'delta_min':>12}")
        for n in sorted({r.n for r in records}):
            grp = [r for r in records if r.n == n and r.converged]
            if not grp:
                out.append(f"{n:>6} {0:>5} {'-':>8} {'-':>12} {'-':>12} {'-':>12}")
                continue
            out.append(
                f"{n:>6} {len(grp):>5}"
                f" {_median_or_nan([r.iterations for r in grp]):>8.6g}"
                f" {_median_or_nan([r.kappa_max for r in grp]):>12.6g}"
                f" {_median_or_nan([r.zeta_max for r in grp]):>12.6g}"
                f" {_median_or_nan([r.delta_min for r in grp]):>12.6g}"
            )
    out.append("")

    out.append("power-law fits")
    out.append("-" * 14)
    if not fits:
        out.append("no data")
    else:
        for label in sorted(fits):
            out.append(f"{label}: {fit_line(fits[label])}")
    out.append("")

    out.append("accuracy difference CDF (noisy - exact)")
    out.append("-" * 39)
    try:
        rows = accuracy_cdf(records) if records else []
    except ValueError:
        rows = []
    if not rows:
        out.append("no data")
    else:
        out.append(f"{'threshold':>10} {'train':>8} {'test':>8}")
        for t, ftr, fte in rows:
            if t < 0 and ftr == 0.0 and fte == 0.0:
                continue  # flat negative tail carries no information
            out.append(f"{t:>10.2f} {ftr:>8.4f} {fte:>8.4f}")
            if t >= 0 and ftr == 1.0 and fte == 1.0:
                break

    out.append("")
    out.append("reference exponents (published full-scale study; context only)")
    out.append("-" * 62)
    for label, b, ci in REFERENCE_EXPONENTS:
        out.append(f"{label}: b={b:.3f} ci95=[{ci[0]:.3f},{ci[1]:.3f}]")
    out.append("")
    return "\n".join(out)


CSV_FIELDS = [f.name for f in fields(RunRecord)]


def write_records_csv(records: list[RunRecord], path: str | Path) -> None:
    """One row per run; header mandatory, UTF-8, '.' decimals, LF endings."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for r in records:
            writer.writerow(
                [
                    r.n,
                    r.m,
                    repr(float(r.p)),
                    r.seed,
                    "true" if r.converged else "false",
                    r.iterations,
                    repr(float(r.kappa_max)),
                    repr(float(r.zeta_max)),
                    repr(float(r.delta_min)),
                    repr(float(r.cost_metric)),
                    repr(float(r.acc_train_exact)),
                    repr(float(r.acc_train_noisy)),
                    repr(float(r.acc_test_exact)),
                    repr(float(r.acc_test_noisy)),
                    repr(float(r.wall_time_s)),
                ]
            )


def read_records_csv(path: str | Path) -> list[RunRecord]:
    records = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_FIELDS:
            raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
        for row in reader:
            records.append(
                RunRecord(
                    n=int(row["n"]),
                    m=int(row["m"]),
                    p=float(row["p"]),
                    seed=int(row["seed"]),
                    converged=row["converged"] == "true",
                    iterations=int(row["iterations"]),
                    kappa_max=float(row["kappa_max"]),
                    zeta_max=float(row["zeta_max"]),
                    delta_min=float(row["delta_min"]),
                    cost_metric=float(row["cost_metric"]),
                    acc_train_exact=float(row["acc_train_exact"]),
                    acc_train_noisy=float(row["acc_train_noisy"]),
                    acc_test_exact=float(row["acc_test_exact"]),
                    acc_test_noisy=float(row["acc_test_noisy"]),
                    wall_time_s=float(row["wall_time_s"]),
                )
            )
    return records
