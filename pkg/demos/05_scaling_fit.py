"""A miniature scaling experiment: sweep, power-law fit, report.

The full desk-scale sweep covers n up to 128 with ten instances per size;
this demo keeps it small enough to finish in about a minute.  The fitted
exponent of the modeled cost against the feature dimension is printed with
its 95% confidence interval, next to the published full-scale reference
values quoted in the report.
"""

from qipm import fit_power_law, report, sweep
from qipm.experiment import fit_line

records = sweep((4, 16), instances=4, epsilon=0.1, C=1.0, seed=1)
print(f"{len(records)} runs, {sum(r.converged for r in records)} converged")
for r in records[:6]:
    print(
        f"  n={r.n:3d} p={r.p:.1f} iters={r.iterations:5d}"
        f" cost={r.cost_metric:.3e} acc(train) exact/noisy"
        f" {r.acc_train_exact:.2f}/{r.acc_train_noisy:.2f}"
    )
print("  ...")

fit = fit_power_law([(r.n, r.cost_metric) for r in records if r.converged])
print(fit_line(fit))

doc = report(records, {"cost_metric vs n": fit})
print()
print(doc)
