"""Acceptance criteria, one test per numbered item.

Each test prints a single PASS/FAIL line (run pytest with -s or read the
captured output) and asserts at the stated tolerance.  Criterion 7 is
known not to hold on its stated window: the asymptotic scaling law only
emerges for much smaller |eps| than [-0.1, -0.02]; the test states the
measured slope either way.
"""

import math
import time

import numpy as np
import pytest

from juliadim import checks
from juliadim import quadrature as qd
from juliadim.boettcher import build_table
from juliadim.cli import (RAY_GRID_RATIO, _dim_extrapolated, _dprime_extrapolated,
                          _dprime_fd, _fit_d0, _geometric_grid)
from juliadim.transfer import (TransferOperator, _bowen_root,
                               directional_derivative_formula, equilibrium,
                               hausdorff_dim, pressure)

LOG2 = math.log(2.0)


def _report(num, passed, detail):
    print(f"ACCEPTANCE {num}: {'PASS' if passed else 'FAIL'} - {detail}")
    assert passed, f"criterion {num}: {detail}"


@pytest.fixture(scope="module")
def d0_estimate():
    """Criterion-2 pipeline: level 16, grid ratio 1/sqrt(2) down to 0.05."""
    ts = _geometric_grid(0.4, 0.05, RAY_GRID_RATIO)
    dims = [_dim_extrapolated(t, 16)[1] for t in ts]
    full = _fit_d0(ts, dims)
    halved = _fit_d0(ts[:5], dims[:5])   # t_min = 0.1: one halving step up
    return {"ts": ts, "dims": dims, "estimate": full, "coarser": halved}


def test_criterion_1_circle_calibration():
    t0 = time.monotonic()
    table = build_table(1.0, 16)
    res = hausdorff_dim(1.0, 16, table=table)
    ok = abs(res.tau0 - 1.0) < 1e-6
    worst = 0.0
    for tau in (0.5, 1.0, 1.5):
        worst = max(worst, abs(pressure(1.0, tau, table) - (1.0 - tau) * LOG2))
    elapsed = time.monotonic() - t0
    _report(1, ok and worst < 1e-6 and elapsed < 30.0,
            f"dim(1)={res.tau0!r}, max pressure dev {worst:.1e}, {elapsed:.1f}s")


def test_criterion_2_d0_bracket_and_stability(d0_estimate):
    est = d0_estimate["estimate"]
    shift = abs(est - d0_estimate["coarser"])
    _report(2, 1.0 < est < 1.295 and shift < 5e-3,
            f"estimate {est:.6f}, halving shift {shift:.2e}")


def test_criterion_3_omega_negative_on_core(d0_estimate):
    d0 = d0_estimate["estimate"]
    worst_val, worst_err = -np.inf, 0.0
    for th in (0.0, 0.25, 0.5, 0.75, 1.0):
        res = qd.omega(th, d0)
        worst_val = max(worst_val, res.value)
        worst_err = max(worst_err, res.err_estimate)
    _report(3, worst_val < 0 and worst_err < 1e-8,
            f"max omega {worst_val:.4f}, max err {worst_err:.1e} at d0={d0:.4f}")


def test_criterion_4_theta0_location():
    root = qd.find_theta0(1.08)
    _report(4, 1.15 <= root <= 1.45, f"theta0(1.08) = {root:.6f}")


def test_criterion_5_identity_chain():
    t0 = time.monotonic()
    worst_oi = 0.0
    worst_qd_ = 0.0
    for alpha in (0.0, np.pi / 6, np.pi / 4, 3 * np.pi / 8):
        for D0 in (1.05, 1.08, 1.2):
            om = qd.omega(math.tan(alpha), D0).value
            da = qd.delta_alpha(alpha, D0, H_mu=1.0).value
            qi = qd.q_integral(D0, alpha, H_mu=1.0).value
            worst_oi = max(worst_oi, abs(da + 2.0 ** (-D0) * om) / abs(om))
            worst_qd_ = max(worst_qd_, abs(qi - da) / abs(da))
    elapsed = time.monotonic() - t0
    _report(5, worst_oi < 1e-6 and worst_qd_ < 1e-6 and elapsed < 60.0,
            f"max |Delta + 2^-D0 Omega|/|Omega| = {worst_oi:.1e}, "
            f"max |intQ - Delta|/|Delta| = {worst_qd_:.1e}, {elapsed:.0f}s")


def _ray_scan(alpha, d0, level=14):
    v = complex(math.cos(alpha), math.sin(alpha))
    expo = 2.0 * d0 - 2.0
    om = qd.omega(math.tan(alpha), d0).value
    rows = []
    for t in _geometric_grid(0.4, 0.05, RAY_GRID_RATIO):
        _, dp_ext = _dprime_extrapolated(t * v, level)
        rows.append((t, dp_ext, dp_ext / t ** expo))
    fitted_A = float(np.mean([r[2] / om for r in rows[-3:]]))
    return rows, fitted_A, om


def test_criterion_6_ray_ratio_stabilization(d0_estimate):
    t0 = time.monotonic()
    d0 = d0_estimate["estimate"]
    rows0, A0, om0 = _ray_scan(0.0, d0)
    rows6, A6, om6 = _ray_scan(np.pi / 6, d0)
    ts = [r[0] for r in rows0]
    rs = [r[2] for r in rows0]
    all_negative = all(r < 0 for r in rs) and all(r[2] < 0 for r in rows6)
    # t grid has ratio 1/sqrt(2): two steps up from t_min is 2*t_min
    ratio_dev = abs(rs[-1] / rs[-3] - 1.0)
    cross_dev = abs(A0 / A6 - 1.0)
    elapsed = time.monotonic() - t0
    ok = (all_negative and ratio_dev < 0.2 and A0 > 0 and A6 > 0
          and cross_dev < 0.25 and elapsed < 1800.0)
    _report(6, ok,
            f"r<0 {all_negative}, |r({ts[-1]:.2f})/r({ts[-3]:.2f})-1| = "
            f"{ratio_dev:.3f}, A(0)={A0:.4f}, A(pi/6)={A6:.4f} "
            f"(dev {cross_dev:.1%}), {elapsed:.0f}s")


def test_criterion_7_hz_scaling_window(d0_estimate):
    t0 = time.monotonic()
    d0 = d0_estimate["estimate"]
    eps = -np.geomspace(0.1, 0.02, 7)
    dims = np.array([_dim_extrapolated(2.0 * math.sqrt(-e), 14)[1] for e in eps])
    mid = 0.5 * (eps[1:] + eps[:-1])
    dprime_eps = np.diff(dims) / np.diff(eps)
    slope = float(np.polyfit(np.log(-mid), np.log(np.abs(dprime_eps)), 1)[0])
    target = d0 - 1.5
    elapsed = time.monotonic() - t0
    _report(7, abs(slope - target) <= 0.1 and elapsed < 900.0,
            f"measured slope {slope:.4f} vs d0-3/2 = {target:.4f} "
            f"on eps in [-0.1, -0.02], {elapsed:.0f}s")


def test_criterion_8_convexity_window():
    t0 = time.monotonic()
    eps = np.linspace(-0.05, -0.01, 9)
    dims = np.array([_dim_extrapolated(2.0 * math.sqrt(-e), 14)[1] for e in eps])
    h = eps[1] - eps[0]
    d2 = (dims[2:] - 2.0 * dims[1:-1] + dims[:-2]) / h ** 2
    elapsed = time.monotonic() - t0
    _report(8, bool(np.all(d2 > 0)) and elapsed < 900.0,
            f"second differences in [{d2.min():.1f}, {d2.max():.1f}], {elapsed:.0f}s")


def test_criterion_9_formula_vs_finite_difference():
    t0 = time.monotonic()
    worst = 0.0
    for delta in (0.3 * np.exp(1j * np.pi / 6), 0.4 + 0j,
                  0.25 * np.exp(-1j * np.pi / 8)):
        level = 14
        v = delta / abs(delta)
        table = build_table(delta, level)
        op = TransferOperator(delta, table, level)
        tau = _bowen_root(op)[0]
        w = equilibrium(delta, tau, table, level)
        formula = directional_derivative_formula(delta, v, table, w)
        fd = _dprime_fd(delta, level, rel_step=1e-2)
        worst = max(worst, abs(formula - fd) / abs(fd))
    elapsed = time.monotonic() - t0
    _report(9, worst < 0.05 and elapsed < 600.0,
            f"max relative deviation {worst:.2e}, {elapsed:.0f}s")


def test_criterion_10_structure_suites():
    t0 = time.monotonic()
    results = checks.run_suite("all")
    failures = [r for r in results if not r.passed]
    elapsed = time.monotonic() - t0
    _report(10, not failures and elapsed < 1200.0,
            f"{len(results) - len(failures)}/{len(results)} checks passed, "
            f"{elapsed:.0f}s" + (f"; failures: {[f.name for f in failures]}"
                                 if failures else ""))
