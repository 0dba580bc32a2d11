"""End-to-end acceptance runs at their stated tolerances.

Each test records a PASS/FAIL line (collected in the terminal summary) and
then asserts the same condition. Simulated speeds are plain least-squares
slopes with the default burn-in; the log-corrected slope is printed for
information only and never used to decide a criterion.
"""

import math
import time

import numpy as np
import pytest
from scipy import optimize

from impulse_front import analytic as an
from impulse_front import hybrid as hy
from impulse_front.core import (
    BevertonHoltMap,
    GaussianKernel,
    LinearGrowth,
    LinearMap,
    LogisticGrowth,
    ModelParams,
    QuadraticGrowth,
    RickerMap,
)
from impulse_front.oracle import crosscheck_mgf, weinberger_speed
from impulse_front.season import Box, advance_free, free_field


def fisher(q=0.0):
    return ModelParams.isotropic(1.0, LogisticGrowth(1.0), LinearMap(1.0), q=q)


def simulate(params, generations=30, h=0.05):
    traj = hy.run(params, hy.initial_ball(params, h=h, generations=generations), generations)
    assert not traj.aborted, traj.reason
    return traj


def rel(a, b):
    return abs(a - b) / abs(b)


def test_criterion_01_fisher_baseline_speed(acceptance_line):
    t0 = time.perf_counter()
    rep = hy.estimate_speed(simulate(fisher()), 1)
    elapsed = time.perf_counter() - t0
    ok = rel(rep.slope, 2.0) <= 0.03 and elapsed < 30
    acceptance_line(1, "Fisher baseline speed 2.0 +- 3%", ok,
                    f"slope {rep.slope:.4f} ({rel(rep.slope, 2.0):.2%} off), {elapsed:.1f} s; "
                    f"log-corrected {rep.log_corrected:.4f} (info)")
    assert ok


def test_criterion_02_advection_splitting(acceptance_line):
    traj = simulate(fisher(q=0.5))
    right, left = hy.estimate_speed(traj, 1), hy.estimate_speed(traj, -1)
    diff = right.slope - left.slope
    checks = [rel(right.slope, 2.5) <= 0.03, rel(left.slope, 1.5) <= 0.03, rel(diff, 1.0) <= 0.05]
    acceptance_line(2, "advection splitting 2.5/1.5 +- 3%, difference 2q +- 5%", all(checks),
                    f"right {right.slope:.4f} ({rel(right.slope, 2.5):.2%}), left {left.slope:.4f} "
                    f"({rel(left.slope, 1.5):.2%}), difference {diff:.4f} ({rel(diff, 1.0):.2%}); "
                    f"log-corrected {right.log_corrected:.4f}/{left.log_corrected:.4f} (info)")
    assert all(checks)


def test_criterion_03_nonlocal_gaussian_kernel(acceptance_line):
    p = an.stream_params(0.5, 0.5, 0.1, 1.0, 0.5, math.expm1(1.1))
    assert an.speed(p, 1) == pytest.approx(2.5) and an.speed(p, -1) == pytest.approx(1.5)
    traj = simulate(p)
    right, left = hy.estimate_speed(traj, 1), hy.estimate_speed(traj, -1)
    checks = [rel(right.slope, 2.5) <= 0.03, rel(left.slope, 1.5) <= 0.03]
    acceptance_line(3, "nonlocal kernel speeds 2.5/1.5 +- 3%", all(checks),
                    f"right {right.slope:.4f} ({rel(right.slope, 2.5):.2%}), left {left.slope:.4f} "
                    f"({rel(left.slope, 1.5):.2%}); log-corrected {right.log_corrected:.4f}/"
                    f"{left.log_corrected:.4f} (info)")
    assert all(checks)


ORACLE_SETS = [
    ("Fisher m-measure", fisher(), [1.0]),
    ("advected Beverton-Holt, e=-1",
     ModelParams.isotropic(0.3, QuadraticGrowth(0.4, -1.0), BevertonHoltMap(1.5), q=-0.7), [-1.0]),
    ("stream l-measure, e=+1", an.stream_params(0.5, 0.5, 0.1, 1.0, 0.5, math.expm1(1.1)), [1.0]),
    ("2D anisotropic A=diag(4,1), 60 deg",
     ModelParams(np.diag([4.0, 1.0]), [0.3, 0.0], LogisticGrowth(1.0), LinearMap(1.0)), [0.5, math.sqrt(3) / 2]),
    ("2D correlated A with Gaussian kernel",
     ModelParams([[1.0, 0.3], [0.3, 0.6]], [0.2, -0.1], LinearGrowth(0.3), RickerMap(0.5),
                 kernel=GaussianKernel([0.1, 0.2], [[0.3, 0.05], [0.05, 0.2]])), [0.6, -0.8]),
]


def test_criterion_04_oracle_equivalence(acceptance_line):
    parts, ok = [], True
    for name, p, e in ORACLE_SETS:
        meas = an.measure_m(p) if p.kernel is None else an.measure_l(p)
        t0 = time.perf_counter()
        chat = weinberger_speed(meas, e=e).c_hat
        elapsed = time.perf_counter() - t0
        ref = an.speed(p, e)
        good = rel(chat, ref) <= 0.02 and elapsed < 60
        ok &= good
        parts.append(f"{name}: {chat:.4f} vs {ref:.4f} ({rel(chat, ref):.2%}, {elapsed:.1f} s)")
    acceptance_line(4, "oracle matches closed forms within 2% on 5 sets", ok, "; ".join(parts))
    assert ok


def test_criterion_05_mgf_closed_forms(acceptance_line):
    s = [0.0, 0.5, 1.0, 2.0, 3.0]
    p1 = an.stream_params(0.5, 0.5, 0.1, 1.0, 0.5, math.expm1(1.1))
    p2 = ModelParams([[1.0, 0.3], [0.3, 0.6]], [0.2, -0.1], LinearGrowth(0.3), LinearMap(1.5),
                     kernel=GaussianKernel([0.1, 0.2], [[0.3, 0.05], [0.05, 0.2]]))
    e2 = an.direction_from_angle(2.0)
    errs = {
        "m 1D": crosscheck_mgf(an.measure_m(p1), [1.0], s),
        "l 1D": crosscheck_mgf(an.measure_l(p1), [-1.0], s),
        "m 2D": crosscheck_mgf(an.measure_m(p2), e2, s),
        "l 2D": crosscheck_mgf(an.measure_l(p2), e2, s),
    }
    ok = max(errs.values()) < 1e-8
    acceptance_line(5, "MGF quadrature vs closed form < 1e-8", ok,
                    ", ".join(f"{k} {v:.1e}" for k, v in errs.items()))
    assert ok


def test_criterion_06_critical_domain(acceptance_line):
    est = hy.critical_length_search(fisher(), (0.5 * math.pi, 2 * math.pi))
    length_ok = rel(est.estimate, math.pi) <= 0.05
    d, gain, gamma, c = 1.0, 2.0, 0.5, 0.5
    p = an.climate_params(d, gain, gamma, c)
    mismatches, n_persist = [], 0
    for L1 in (2.0, 4.0, 8.0):
        for L2 in (2.0, 4.0, 8.0):
            sim = hy.classify_persistence(p, Box((0.0, 0.0), (L1, L2)), h=0.1).verdict
            expected = an.climate_persists(d, gain, gamma, c, L1, L2)
            n_persist += expected
            if (sim is hy.Persistence.PERSISTENT) != expected:
                mismatches.append((L1, L2, sim.value))
    ok = length_ok and not mismatches
    acceptance_line(6, "critical length within 5% of pi; 3x3 rectangle verdicts", ok,
                    f"estimate {est.estimate:.4f} ({rel(est.estimate, math.pi):.2%}); "
                    f"{9 - len(mismatches)}/9 rectangles agree ({n_persist} persistent)")
    assert ok


def test_criterion_07_root_blowup_coincidence(acceptance_line):
    worst = 0.0
    for d, fp0, alpha in [(1.0, 1.0, 1.0), (0.4, 0.5, 2.0), (2.0, -0.2, 3.0)]:
        p = ModelParams.isotropic(d, LinearGrowth(fp0), LinearMap(alpha))
        root = optimize.brentq(lambda q: an.speed(p.replace(q=np.array([q])), -1), 0.0, 20.0, xtol=1e-15)
        blow = an.critical_size(p).blowup_advection
        worst = max(worst, abs(root - blow))
        qs = np.append(np.linspace(0.0, 2 * blow, 40), blow)
        sizes = [an.critical_size(p.replace(q=np.array([q]))).size for q in qs]
        assert all(math.isinf(s) == (q >= blow) for q, s in zip(qs, sizes))
    ok = worst <= 1e-12
    acceptance_line(7, "zero of c*(-q/|q|) equals blow-up of critical size to 1e-12", ok, f"max gap {worst:.1e}")
    assert ok


def test_criterion_08_ray_speed(acceptance_line):
    p = ModelParams(np.diag([4.0, 1.0]), [0.0, 0.0], LogisticGrowth(1.0), LinearMap(1.0))
    theta = np.linspace(0.0, math.pi / 2, 90)
    worst, order_ok = 0.0, True
    for th in theta:
        e = an.direction_from_angle(th)
        C, c = an.ray_speed(p, e), an.speed(p, e)
        worst = max(worst, rel(C, an.ray_speed_diagonal(2.0, 1.0, 1.0, th)))
        on_axis = th in (0.0, math.pi / 2)
        order_ok &= (abs(C - c) <= 1e-9 * c) if on_axis else (C < c * (1 - 1e-9))
    ok = worst <= 1e-6 and order_ok
    acceptance_line(8, "ray speed vs closed form to 1e-6 at 90 angles; C < c* off the axes", ok,
                    f"max relative gap {worst:.1e}, ordering {'holds' if order_ok else 'violated'}")
    assert ok


TRICHOTOMY = [
    (ModelParams.isotropic(1.0, LogisticGrowth(1.0), LinearMap(0.9)), 0.05),
    (ModelParams.isotropic(1.0, LogisticGrowth(1.0), LinearMap(0.9)), 1.8),
    (ModelParams.isotropic(1.0, LinearGrowth(-0.1), BevertonHoltMap(math.expm1(1.1))), 0.01),
    (ModelParams.isotropic(1.0, QuadraticGrowth(0.5, -1.0), RickerMap(0.4)), 2.0),
    (ModelParams.isotropic(1.0, LinearGrowth(-0.5), BevertonHoltMap(0.5)), 0.3),
    (ModelParams.isotropic(1.0, LogisticGrowth(0.2), LinearMap(0.5)), 0.8),
]


def test_criterion_09_equilibrium(acceptance_line):
    worst = 0.0
    for r in (0.5, 1.0, 2.0):
        for s in (0.0, 0.1, 0.3):
            got = an.equilibrium_nonspatial(an.savannah_params(r, s, 1.0, 1.0)).pi1
            worst = max(worst, abs(got - an.savannah_N_star(r, s)))
    regimes_ok = 0
    for p, U0 in TRICHOTOMY:
        seq = np.concatenate([[U0], an.nonspatial_iterate(p, U0, 300)])
        target = 0.0 if an.net_growth(p).extinct else an.equilibrium_nonspatial(p).pi1
        steps = np.diff(seq)
        monotone = np.all(steps >= -1e-15) if U0 < target else np.all(steps <= 1e-15)
        regimes_ok += bool(monotone and abs(seq[-1] - target) <= 1e-6 * max(target, 1.0))
    ok = worst <= 1e-10 and regimes_ok == 6
    acceptance_line(9, "equilibrium root-find vs closed form to 1e-10; trichotomy in 6 regimes", ok,
                    f"max gap {worst:.1e}; {regimes_ok}/6 regimes monotone and convergent")
    assert ok


def test_criterion_10_linear_solution_oracle(acceptance_line):
    worst = 0.0
    for fp0, q, d in [(0.5, 0.0, 1.0), (1.0, 0.8, 0.7), (-0.3, -1.2, 0.4)]:
        p = ModelParams.isotropic(d, LinearGrowth(fp0), LinearMap(1.0), q=q)
        f = free_field(1, 25.0, 0.05, lambda x: np.exp(-x**2 / 0.6) / math.sqrt(0.6 * math.pi))
        x = f.axes()[0]
        var = 0.3 + 2 * d
        exact = math.exp(fp0) * np.exp(-0.5 * (x - q) ** 2 / var) / math.sqrt(2 * math.pi * var)
        worst = max(worst, float(np.max(np.abs(advance_free(p, f).values - exact))))
    ok = worst <= 1e-6
    acceptance_line(10, "spectral season vs Green-kernel convolution, max-norm 1e-6", ok, f"max error {worst:.1e}")
    assert ok


def test_criterion_11_profile_convergence(acceptance_line):
    traj = simulate(fisher())
    c = hy.estimate_speed(traj, 1).slope
    diffs = [hy.shifted_profile_difference(traj[m], traj[m + 1], c) for m in range(25, 30)]
    ok = max(diffs) < 0.01
    acceptance_line(11, "shifted-profile difference < 1% for m >= 25", ok,
                    f"max {max(diffs):.4f} over m = 25..29")
    assert ok
