"""Full acceptance battery at production scale.

Each criterion prints one pass/fail line (visible with ``pytest -s`` or in
the captured-output section of a failing run).  The battery is seeded, so
a configuration that passes once passes on every rerun of this platform.

Tolerances: 4-sigma CLT bands for unbiasedness-style rows (plus
tau * sup_residual bias allowance on fitted-series links), 2% relative for
expected costs, slope window [1.8, 2.2] for the second-moment scaling,
hard thresholds for the coefficient engine and comparison budgets.
"""

import math

import numpy as np
import pytest

from duelopt import verify
from duelopt.cli import write_reports

SEED = 20250807
REPLICATES = 10**6


@pytest.fixture(scope="module")
def battery():
    """All criterion groups at workers=1: [(label, rows, seconds), ...]."""
    return verify.acceptance_criteria(SEED, workers=1, n=REPLICATES)


def _rows(battery, prefix):
    rows = [r for _, group, _ in battery for r in group if r.name.startswith(prefix)]
    assert rows, f"no rows for {prefix}"
    return rows


def _report(battery, label, rows):
    elapsed = next(t for lab, _, t in battery if lab.startswith(label.split()[0]))
    ok = all(r.passed for r in rows)
    worst = max(rows, key=lambda r: abs(r.point_estimate - r.target))
    print(f"{'PASS' if ok else 'FAIL'}  {label}: {len(rows)} rows, "
          f"worst |est-target|={abs(worst.point_estimate - worst.target):.3g} "
          f"({worst.name}), {elapsed:.1f}s")
    return ok


def test_criterion_1_unbiasedness_logistic(battery):
    """Logistic-link gap estimates: |mean - gap| <= 4 SE at every grid point."""
    rows = _rows(battery, "c1/")
    assert len(rows) == 5
    for r in rows:
        assert r.rule == "four-sigma" and r.bias_allowance == 0.0
    assert _report(battery, "c1 unbiasedness (logistic)", rows)


def test_criterion_2_unbiasedness_general(battery):
    """Probit and cauchit estimates: 4 SE bands plus the tau*residual
    allowance of the 1e-8 coefficient fit."""
    rows = _rows(battery, "c2/")
    assert len(rows) == 10
    for r in rows:
        assert r.bias_allowance <= 0.5 * 1e-8 + 1e-20  # tau = 0.5, tol 1e-8
    assert _report(battery, "c2 unbiasedness (general links)", rows)


def test_criterion_3_expected_cost(battery):
    """Mean comparisons within 2% of 1/(1-beta)^2 (logistic path) and
    (1+beta)/(1-beta)^2 (general path) for beta in {0.5, 0.8, 0.9}."""
    rows = _rows(battery, "c3/")
    assert len(rows) == 6
    targets = {r.name: r.target for r in rows}
    assert targets["c3/cost/logistic/beta=0.5"] == pytest.approx(4.0)
    assert targets["c3/cost/logistic/beta=0.8"] == pytest.approx(25.0)
    assert targets["c3/cost/logistic/beta=0.9"] == pytest.approx(100.0)
    assert targets["c3/cost/general/beta=0.5"] == pytest.approx(6.0)
    assert _report(battery, "c3 expected cost", rows)


def test_criterion_4_second_moment_scaling(battery):
    """log-log slope of E[gap_hat^2] vs B inside [1.8, 2.2]; emits the
    certified variance constant."""
    rows = _rows(battery, "c4/")
    assert len(rows) == 1
    row = rows[0]
    assert row.rule == "slope-window" and row.rule_params == (1.8, 2.2)
    assert row.extra["c_delta"] > 0
    assert _report(battery, "c4 second-moment scaling", rows)


def test_criterion_5_gradient_unbiasedness(battery):
    """Componentwise 4-sigma agreement of the comparison-based gradient
    with closed-form smoothed gradients at 20 points."""
    rows = _rows(battery, "c5/")
    assert len(rows) == 10 + 20  # 10 scalar points + 10 planar points x 2
    assert all(r.provenance == "closed-form" for r in rows)
    assert _report(battery, "c5 gradient unbiasedness", rows)


def test_criterion_6_coefficient_engine(battery):
    """Probit and cauchit fits: sup residual <= 1e-8 on the validation
    grid and a geometric coefficient envelope with rho < 1."""
    rows = _rows(battery, "c6/")
    assert len(rows) == 4
    for r in rows:
        if r.name.endswith("sup-residual"):
            assert r.point_estimate <= 1e-8
        else:
            assert r.point_estimate < 1.0
    assert _report(battery, "c6 coefficient engine", rows)


def test_criterion_7_goldstein_run(battery):
    """20 seeded end-to-end runs on |x|: smoothed-gradient norm at the
    random output point averages below epsilon, at predicted cost."""
    rows = _rows(battery, "c7/")
    assert len(rows) == 2
    stat = next(r for r in rows if "stationarity" in r.name)
    budget = next(r for r in rows if "budget" in r.name)
    assert stat.target == pytest.approx(0.3)
    assert stat.point_estimate <= 0.3 + 4 * stat.standard_error
    assert budget.point_estimate <= budget.target
    assert _report(battery, "c7 end-to-end stationarity", rows)


def test_criterion_8_descent_bound(battery):
    """Averaged squared gradient norm over the run obeys
    2*Delta0/(eta*T) + eta*L*V within 4 SE across 20 seeds."""
    rows = _rows(battery, "c8/")
    assert len(rows) == 1
    assert _report(battery, "c8 descent bound audit", rows)


def test_criterion_9_reproducibility(battery, tmp_path):
    """Same seed, worker counts 1 vs 4: byte-identical summary.csv."""
    rows_w1 = [r for _, group, _ in battery for r in group]
    rows_w4 = verify.acceptance_suite(SEED, workers=4, n=REPLICATES)
    echo = {"command": "verify", "suite": "acceptance", "seed": SEED}
    write_reports(tmp_path / "w1", rows_w1, {**echo, "workers": 1}, deterministic=True)
    write_reports(tmp_path / "w4", rows_w4, {**echo, "workers": 4}, deterministic=True)
    b1 = (tmp_path / "w1" / "summary.csv").read_bytes()
    b4 = (tmp_path / "w4" / "summary.csv").read_bytes()
    ok = b1 == b4
    print(f"{'PASS' if ok else 'FAIL'}  c9 reproducibility: "
          f"{len(rows_w1)} rows byte-identical across worker counts")
    assert ok


def test_all_rows_green(battery):
    """The whole battery is green in one sweep."""
    rows = [r for _, group, _ in battery for r in group]
    failed = [r.name for r in rows if not r.passed]
    total = sum(t for _, _, t in battery)
    print(f"acceptance battery: {len(rows) - len(failed)}/{len(rows)} rows, "
          f"{total:.0f}s total")
    assert not failed, f"failing rows: {failed}"