"""End-to-end acceptance checks for the reference setup k = 0.01, c = 50,
x(p) = 1/p.

Each test prints one `criterion NN PASS/FAIL` line with the measured
numbers before asserting, so a plain run doubles as a scorecard. Criteria
04 and 06 compare simulations against the second-order closed-form targets
and currently fail honestly: the measured amplitude near onset is about
three times the predicted one (see README, "Known prediction limitations").
"""

import math

import numpy as np
import pytest

from conftest import reference_model
from hopfdual import (
    ConstantHistory,
    CycleStability,
    Direction,
    NumericWrapper,
    PeriodTrend,
    PowerLaw,
    Regime,
    Trajectory,
    classify,
    estimate_cycle,
    rightmost_root,
    simulate,
    sweep,
)
from hopfdual.cli import verify_coefficients

TAU0 = math.pi


def _report(n: int, ok: bool, detail: str) -> None:
    print("criterion %02d %s: %s" % (n, "PASS" if ok else "FAIL", detail), flush=True)
    assert ok, detail


def test_criterion_01_reference_numbers(eq, linear, expansion):
    checks = [
        ("p_star", eq.p_star, 0.02, abs(eq.p_star - 0.02) <= 1e-12),
        ("tau0", linear.tau0, 3.141593, abs(linear.tau0 - 3.141593) <= 1e-5),
        ("omega0", linear.omega0, 0.5, abs(linear.omega0 - 0.5) <= 1e-12),
        ("tau2", expansion.tau2, 7140.5, abs(expansion.tau2 - 7140.5) <= 0.05),
        ("eta2", expansion.eta2, -3125.0, abs(expansion.eta2 + 3125.0) <= 0.5),
        ("omega2", expansion.omega2, -937.5, abs(expansion.omega2 + 937.5) <= 0.05),
    ]
    detail = ", ".join("%s = %.8g (target %g)" % (k, v, t) for k, v, t, _ in checks)
    _report(1, all(ok for *_, ok in checks), detail)


def test_criterion_02_classification(expansion):
    verdicts = classify(expansion)
    ok = (
        verdicts.direction is Direction.SUPERCRITICAL
        and verdicts.cycle_stability is CycleStability.STABLE
        and verdicts.period_trend is PeriodTrend.INCREASING
    )
    _report(2, ok, "%s / %s / %s" % (
        verdicts.direction.value, verdicts.cycle_stability.value,
        verdicts.period_trend.value,
    ))


def test_criterion_03_stability_boundary(run_tau30, run_tau32, run_tau34):
    est30 = estimate_cycle(run_tau30, 0.02)
    est32 = estimate_cycle(run_tau32, 0.02)
    est34 = estimate_cycle(run_tau34, 0.02)
    ok = (
        est30.regime is Regime.EQUILIBRIUM
        and est30.amplitude < 2e-5
        and est32.regime is Regime.LIMIT_CYCLE
        and est34.regime is Regime.LIMIT_CYCLE
    )
    _report(3, ok, "tau=3.0 %s (excursion %.3g), tau=3.2 %s, tau=3.4 %s" % (
        est30.regime.value, est30.amplitude, est32.regime.value, est34.regime.value,
    ))


def test_criterion_04_prediction_vs_simulation(run_tau32):
    est = estimate_cycle(run_tau32, 0.02)
    period_ok = abs(est.period - 12.762) / 12.762 <= 0.05
    amp_ok = abs(est.amplitude - 2.860e-3) / 2.860e-3 <= 0.20
    offset = est.mean - 0.02
    mean_ok = offset > 0 and 0.5 <= offset / 2.045e-4 <= 2.0
    detail = (
        "period %.5g vs 12.762 (%s), amplitude %.4g vs 2.860e-3 (%s), "
        "mean offset %.4g vs 2.045e-4 (%s)"
        % (est.period, "ok" if period_ok else "off",
           est.amplitude, "ok" if amp_ok else "off",
           offset, "ok" if mean_ok else "off")
    )
    _report(4, period_ok and amp_ok and mean_ok, detail)


def test_criterion_05_period_ordering(run_tau32, run_tau34):
    p32 = estimate_cycle(run_tau32, 0.02).period
    p34 = estimate_cycle(run_tau34, 0.02).period
    _report(5, p34 > p32, "period(3.4) = %.5g > period(3.2) = %.5g" % (p34, p32))


def test_criterion_06_square_root_amplitude_law(expansion):
    rows = sweep(
        reference_model(0.0), np.linspace(3.15, 3.5, 20),
        t_end=12000.0, step=0.02,
    )
    x = np.array([r.tau - TAU0 for r in rows])
    y = np.array([r.amp_meas**2 for r in rows])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    r2 = 1.0 - float(np.sum((y - fitted) ** 2) / np.sum((y - np.mean(y)) ** 2))
    target = 1.0 / expansion.tau2
    slope_ok = abs(slope - target) / target <= 0.25
    r2_ok = r2 > 0.98
    _report(6, slope_ok and r2_ok, "slope %.4g vs 1/tau2 = %.4g (%s), R^2 = %.5f (%s)" % (
        slope, target, "ok" if slope_ok else "off", r2, "ok" if r2_ok else "off",
    ))


def test_criterion_07_characteristic_root_bracket(coeffs):
    below = rightmost_root(coeffs, 0.97 * TAU0)
    atc = rightmost_root(coeffs, TAU0)
    above = rightmost_root(coeffs, 1.03 * TAU0)
    dist = abs(complex(atc.re, atc.im) - 0.5j)
    ok = below.re < 0 and above.re > 0 and dist <= 1e-6
    _report(7, ok, "re(0.97 tau0) = %.4g, re(1.03 tau0) = %.4g, |root(tau0) - 0.5i| = %.3g" % (
        below.re, above.re, dist,
    ))


def test_criterion_08_oracle_verify():
    families = {
        "reciprocal": reference_model(0.0),
        "powerlaw": reference_model(0.0).__class__(
            k=0.01, c=50.0, tau=0.0, demand=PowerLaw(w=1.0, alpha=2.0)
        ),
        "numeric": reference_model(0.0).__class__(
            k=0.01, c=50.0, tau=0.0, demand=NumericWrapper(func=lambda p: 1.0 / p)
        ),
    }
    problems = []
    ratios = {}
    for label, model in families.items():
        rows = {row["name"]: row for row in verify_coefficients(model)}
        for name in ("b2", "b5", "b9"):
            row = rows[name]
            if row["status"] != "match" or row["rel_diff"] > 1e-5:
                problems.append("%s %s rel_diff %.3g" % (label, name, row["rel_diff"]))
        for name, target in (("b4", 2.0), ("b8", 3.0)):
            row = rows[name]
            ratios["%s %s" % (label, name)] = row["ratio"]
            if row["status"] != "paper-convention" or abs(row["ratio"] - target) > 1e-3:
                problems.append("%s %s ratio %.5g" % (label, name, row["ratio"]))
    detail = "b4/b8 ratios " + ", ".join(
        "%s = %.4f" % (k, v) for k, v in sorted(ratios.items())
    )
    if problems:
        detail = "; ".join(problems)
    _report(8, not problems, detail)


def test_criterion_09_integrator_quality(run_tau30):
    drift_traj = simulate(reference_model(3.2), ConstantHistory(0.02), 1000.0, 0.01)
    drift = float(np.max(np.abs(drift_traj.values - 0.02)))

    # self-convergence on the tau = 3 problem past the delay-induced
    # breaking points: node-aligned max differences between h, h/2, h/4
    coarse = simulate(reference_model(3.0), ConstantHistory(0.025), 2000.0, 0.02)
    fine = simulate(reference_model(3.0), ConstantHistory(0.025), 2000.0, 0.005)
    i_c = int(round(30.0 / 0.02))
    i_m = int(round(30.0 / 0.01))
    d1 = float(np.max(np.abs(coarse.values[i_c:] - run_tau30.values[::2][i_c:])))
    d2 = float(np.max(np.abs(run_tau30.values[i_m:] - fine.values[::2][i_m:])))
    exponent = math.log2(d1 / d2)
    ok = drift < 1e-10 and exponent >= 3.5
    _report(9, ok, "drift %.3g over 1e5 steps, convergence exponent %.3f" % (
        drift, exponent,
    ))


def test_criterion_10_estimator_calibration():
    p_star = 0.02
    problems = []
    for a in (0.003, 0.02):
        for period in (12.76, 40.0):
            for b in (0.0, 0.004):
                h = period / 400.0
                n = 24 * 400
                t = h * np.arange(n + 1)
                phase = 2.0 * math.pi * t / period
                traj = Trajectory(
                    t0=0.0, step=h,
                    values=p_star + b + a * np.sin(phase),
                    derivs=a * (2.0 * math.pi / period) * np.cos(phase),
                )
                est = estimate_cycle(traj, p_star)
                amp_err = abs(est.amplitude - a) / a
                period_err = abs(est.period - period) / period
                mean_err = abs(est.mean - (p_star + b))
                if (est.regime is not Regime.LIMIT_CYCLE or amp_err > 5e-3
                        or period_err > 5e-3 or mean_err > 1e-12 + 1e-3 * a):
                    problems.append(
                        "(a=%g, T=%g, b=%g): amp %.2e, period %.2e, mean %.2e"
                        % (a, period, b, amp_err, period_err, mean_err)
                    )
    detail = "8-point grid recovered within 0.5%" if not problems else "; ".join(problems)
    _report(10, not problems, detail)
