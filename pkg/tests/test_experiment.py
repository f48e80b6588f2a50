"""Sweep harness, power-law fitting, CDF table and report rendering."""

import dataclasses
import math

import numpy as np
import numpy.testing as npt
import pytest

from qipm import (
    PowerLawFit,
    RunRecord,
    accuracy_cdf,
    fit_power_law,
    read_records_csv,
    report,
    sweep,
    write_records_csv,
)
from qipm.experiment import CSV_FIELDS, DEFAULT_P_GRID, fit_line


def test_default_grid_mirrors_protocol():
    assert DEFAULT_P_GRID == (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)


def test_fit_power_law_noiseless():
    xs = np.array([1.0, 2.0, 4.0, 8.0])
    fit = fit_power_law([(x, 2.0 * x**3) for x in xs])
    assert fit.b == pytest.approx(3.0, abs=1e-9)
    assert fit.a == pytest.approx(2.0, abs=1e-9)
    assert fit.ci_low <= fit.b <= fit.ci_high
    assert fit.n_points == 4


def test_fit_power_law_validation():
    with pytest.raises(ValueError):
        fit_power_law([(1.0, 1.0), (2.0, 2.0)])
    with pytest.raises(ValueError):
        fit_power_law([(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)])
    with pytest.raises(ValueError):
        fit_power_law([(1.0, 1.0), (2.0, -2.0), (3.0, 3.0)])
    with pytest.raises(ValueError):
        PowerLawFit(a=1.0, b=2.0, ci_low=2.5, ci_high=3.0, n_points=5)


def test_fit_power_law_coverage_smoke():
    # quick calibration check; the acceptance suite runs the full version
    rng = np.random.default_rng(0)
    hits = 0
    trials = 100
    for _ in range(trials):
        x = rng.uniform(1.0, 100.0, size=200)
        y = x**2 * np.exp(rng.normal(0.0, 0.1, size=200))
        fit = fit_power_law(np.column_stack([x, y]))
        hits += fit.ci_low <= 2.0 <= fit.ci_high
    assert hits / trials >= 0.85


def test_fit_line_format():
    fit = PowerLawFit(a=1.5, b=2.591, ci_low=2.564, ci_high=2.619, n_points=321)
    assert fit_line(fit) == "exponent b=2.591 ci95=[2.564,2.619] n=321"


def _record(**kw):
    base = dict(
        n=4, m=8, p=0.0, seed=1, converged=True, iterations=100,
        kappa_max=50.0, zeta_max=2.0, delta_min=1e-4, cost_metric=1e9,
        acc_train_exact=0.9, acc_train_noisy=0.9, acc_test_exact=0.8,
        acc_test_noisy=0.8, wall_time_s=0.5,
    )
    base.update(kw)
    return RunRecord(**base)


def test_accuracy_cdf_step_and_monotonicity():
    rows = accuracy_cdf([_record(), _record(seed=2)])
    assert rows[0][0] == -1.0 and rows[-1][0] == 1.0
    # all differences are zero: the CDF is the unit step at 0
    below = [r for r in rows if r[0] < 0.0]
    assert all(r[1] == 0.0 and r[2] == 0.0 for r in below)
    at0 = [r for r in rows if r[0] == 0.0][0]
    assert at0[1] == 1.0 and at0[2] == 1.0
    fr_tr = [r[1] for r in rows]
    assert all(a <= b for a, b in zip(fr_tr, fr_tr[1:]))
    assert rows[-1][1] == 1.0 and rows[-1][2] == 1.0
    with pytest.raises(ValueError):
        accuracy_cdf([])
    # records without comparable accuracies are ignored
    nanrec = _record(acc_train_noisy=float("nan"), acc_test_noisy=float("nan"))
    with pytest.raises(ValueError):
        accuracy_cdf([nanrec])


def test_csv_round_trip(tmp_path):
    records = [
        _record(),
        _record(seed=2, converged=False, cost_metric=float("nan")),
    ]
    path = tmp_path / "runs.csv"
    write_records_csv(records, path)
    text = path.read_text()
    assert text.splitlines()[0] == ",".join(CSV_FIELDS)
    assert "\r" not in text
    back = read_records_csv(path)
    assert len(back) == 2
    for orig, rt in zip(records, back):
        for f in dataclasses.fields(RunRecord):
            a, b = getattr(orig, f.name), getattr(rt, f.name)
            if isinstance(a, float) and math.isnan(a):
                assert math.isnan(b)
            else:
                assert a == b


def test_sweep_tiny_and_deterministic(tmp_path):
    kw = dict(instances=2, p_grid=(0.0, 0.5), epsilon=0.3, C=1.0, seed=5)
    recs1 = sweep((4, 8), **kw)
    recs2 = sweep((4, 8), **kw)
    assert len(recs1) == 4  # sizes {4, 8} x 2 instances
    assert [r.n for r in recs1] == sorted(r.n for r in recs1)
    skip = {"wall_time_s"}
    for a, b in zip(recs1, recs2):
        for f in dataclasses.fields(RunRecord):
            if f.name in skip:
                continue
            va, vb = getattr(a, f.name), getattr(b, f.name)
            assert va == vb or (math.isnan(va) and math.isnan(vb)), f.name
    assert all(r.converged for r in recs1)
    assert all(r.m == 2 * r.n for r in recs1)
    assert all(np.isfinite(r.cost_metric) and r.cost_metric > 0 for r in recs1 if r.converged)


def test_sweep_validation():
    with pytest.raises(ValueError):
        sweep((1, 4), 1)
    with pytest.raises(ValueError):
        sweep((4, 2), 1)
    with pytest.raises(ValueError):
        sweep((4, 8), 0)
    with pytest.raises(ValueError):
        sweep((4, 8), 1, p_grid=())


def test_report_empty_and_regeneration(tmp_path):
    doc = report([])
    assert "no data" in doc
    records = [_record(seed=s) for s in range(5)]
    fits = {"cost_metric vs n": PowerLawFit(1.0, 2.5, 2.4, 2.6, 5)}
    doc1 = report(records, fits)
    doc2 = report(records, fits)
    assert doc1 == doc2
    assert "exponent b=2.5 ci95=[2.4,2.6] n=5" in doc1
    # context lines with the published reference exponents
    assert "2.591" in doc1 and "3.314" in doc1 and "3.112" in doc1
