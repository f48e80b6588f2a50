"""Command-line front end.

Subcommands:

* ``gen``    write a random SVM dataset file
* ``solve``  solve one cone-program instance or SVM dataset
* ``sweep``  run the scaling experiment, writing a CSV of run records
* ``fit``    fit a power law through two CSV columns
* ``report`` render the experiment summary document

Exit codes for ``solve``: 0 on convergence, 2 on non-convergence, 1 on any
other error.  All randomness flows from explicit ``--seed`` values; the
QIPM_WORKERS environment variable sets the sweep's worker count.
"""

from __future__ import annotations

import argparse
import sys

from . import experiment, serialize
from .ipm import (
    InitialPointError,
    IpmConfig,
    NonConvergenceError,
    StepFailureError,
    run,
)
from .newton import SingularSystemError
from .socp import linear_residuals
from .svm import generate, to_socp


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qipm",
        description="second-order cone solver with a simulated-readout noise model",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a random SVM dataset")
    p.add_argument("--n", type=int, required=True, help="feature dimension")
    p.add_argument("--m", type=int, required=True, help="number of points")
    p.add_argument("--p", type=float, required=True, help="label flip probability")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output dataset path")

    p = sub.add_parser("solve", help="solve one instance or dataset")
    p.add_argument("--instance", required=True, help="instance or dataset file")
    p.add_argument("--mode", choices=["exact", "tomography"], default="exact")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--C", type=float, default=1.0, help="SVM tradeoff (dataset input)")
    p.add_argument("--max-iterations", type=int, default=500_000)
    p.add_argument("--trace", help="write per-iteration records to this CSV")

    p = sub.add_parser("sweep", help="run the scaling experiment")
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--per-cell", type=int, required=True, help="instances per size")
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("fit", help="fit a power law through CSV columns")
    p.add_argument("--in", dest="inp", required=True, help="records CSV")
    p.add_argument("--x", default="n", help="x column name")
    p.add_argument("--y", default="cost_metric", help="y column name")

    p = sub.add_parser("report", help="render the experiment summary")
    p.add_argument("--in", dest="inp", required=True, help="records CSV")
    p.add_argument("--out", required=True, help="output document path")
    return parser


def _cmd_gen(args) -> int:
    train, _ = generate(args.n, args.m, args.p, args.seed)
    serialize.write_dataset(train, args.out)
    print(f"wrote dataset n={train.n} m={train.m} p={train.meta.p} to {args.out}")
    return 0


def _write_trace_csv(trace, path) -> None:
    import csv
    from dataclasses import fields as dc_fields

    from .ipm import IterationRecord

    names = [f.name for f in dc_fields(IterationRecord)]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for rec in trace.records:
            writer.writerow([getattr(rec, name) for name in names])


def _cmd_solve(args) -> int:
    kind = serialize.sniff_kind(args.instance)
    if kind == "dataset":
        data = serialize.read_dataset(args.instance)
        inst = to_socp(data, args.C)
    else:
        inst = serialize.read_instance(args.instance)
    cfg = IpmConfig(
        epsilon=args.epsilon,
        noise_mode=args.mode,
        seed=args.seed,
        max_iterations=args.max_iterations,
    )
    try:
        trace = run(inst, cfg)
    except NonConvergenceError as exc:
        if exc.trace is not None and args.trace:
            _write_trace_csv(exc.trace, args.trace)
        print(f"did not converge: {exc}")
        return 2
    if args.trace:
        _write_trace_csv(trace, args.trace)
    primal, dual = linear_residuals(inst, trace.final)
    print(
        f"mu={trace.final.mu:.6g} primal_residual={primal:.6g} "
        f"dual_residual={dual:.6g} iterations={len(trace.records)}"
    )
    if not trace.converged:
        print(f"did not converge within {args.max_iterations} iterations")
        return 2
    return 0


def _cmd_sweep(args) -> int:
    records = experiment.sweep(
        (args.n_min, args.n_max),
        args.per_cell,
        epsilon=args.epsilon,
        C=args.C,
        seed=args.seed,
    )
    experiment.write_records_csv(records, args.out)
    conv = sum(r.converged for r in records)
    print(f"wrote {len(records)} records ({conv} converged) to {args.out}")
    return 0


def _cmd_fit(args) -> int:
    records = experiment.read_records_csv(args.inp)
    points = [
        (getattr(r, args.x), getattr(r, args.y))
        for r in records
        if r.converged
    ]
    fit = experiment.fit_power_law(points)
    print(experiment.fit_line(fit))
    return 0


def _cmd_report(args) -> int:
    records = experiment.read_records_csv(args.inp)
    fits = {}
    try:
        pts = [(r.n, r.cost_metric) for r in records if r.converged]
        fits["cost_metric vs n"] = experiment.fit_power_law(pts)
    except ValueError:
        pass
    doc = experiment.report(records, fits)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(doc)
    print(f"wrote report to {args.out}")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "sweep": _cmd_sweep,
    "fit": _cmd_fit,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (
        OSError,
        ValueError,
        InitialPointError,
        StepFailureError,
        SingularSystemError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
