"""Integrator behavior: accuracy, histories, failure modes, persistence."""

import dataclasses
import math

import numpy as np
import pytest

from conftest import reference_model
from hopfdual import (
    ConstantHistory,
    DelayedLookupGap,
    PositivityLoss,
    SampledHistory,
    Trajectory,
    ValidationError,
    default_step,
    read_trajectory_csv,
    rhs,
    simulate,
    write_trajectory_csv,
)


def test_equilibrium_is_preserved():
    model = reference_model(3.2)
    traj = simulate(model, ConstantHistory(0.02), t_end=1000.0, step=0.01)
    assert float(np.max(np.abs(traj.values - 0.02))) < 1e-10


def test_step_halving_agreement(run_tau32):
    model = reference_model(3.2)
    fine = simulate(model, ConstantHistory(0.025), t_end=5000.0, step=0.005)
    diff = np.max(np.abs(run_tau32.values - fine.values[::2]))
    assert float(diff) < 1e-6


def test_nodes_satisfy_the_equation():
    # past the first few delay intervals the stored node derivative must
    # equal the right-hand side evaluated with the interpolated delayed price
    model = reference_model(3.2)
    traj = simulate(model, ConstantHistory(0.025), t_end=200.0, step=0.01)
    start = int(round(10 * model.tau / traj.step))
    for i in range(start, len(traj.values) - 1, 997):
        t = traj.t0 + i * traj.step
        expect = rhs(model, float(traj.values[i]), traj.at(t - model.tau))
        assert traj.derivs[i] == pytest.approx(expect, abs=1e-9)


def test_prices_stay_positive_above_onset():
    tau = 3.456  # about 1.1 * tau0
    model = reference_model(tau)
    for p0 in (0.01, 0.04):
        traj = simulate(model, ConstantHistory(p0), t_end=800.0, step=0.02)
        assert float(np.min(traj.values)) > 0.0


def test_zero_delay_reduces_to_ode():
    # without delay the equilibrium is a sink: trajectories decay onto it
    model = reference_model(0.0)
    traj = simulate(model, ConstantHistory(0.025), t_end=200.0, step=0.05)
    assert abs(float(traj.values[-1]) - 0.02) < 1e-9
    assert float(np.max(traj.values)) <= 0.025 + 1e-12


def test_default_step_rule():
    assert default_step(3.2, 0.5) == pytest.approx(
        min(3.2 / 100.0, (2 * math.pi / 0.5) / 200.0), rel=1e-15
    )
    assert default_step(50.0, 0.5) == pytest.approx(
        (2 * math.pi / 0.5) / 200.0, rel=1e-15
    )
    assert default_step(0.0, 0.5) == pytest.approx(
        (2 * math.pi / 0.5) / 200.0, rel=1e-15
    )


def test_sampled_history_interpolates():
    sh = SampledHistory(times=(-4.0, -2.0, 0.0), values=(0.025, 0.025, 0.02))
    assert sh(-3.0) == pytest.approx(0.025, rel=1e-15)
    assert sh(-1.0) == pytest.approx(0.0225, rel=1e-15)
    assert sh(-5.0) == 0.025  # clamped before the first sample
    assert sh(1.0) == 0.02  # clamped after the last


def test_sampled_history_validation():
    with pytest.raises(ValidationError):
        SampledHistory(times=(-1.0, -1.0, 0.0), values=(0.02, 0.02, 0.02))
    with pytest.raises(ValidationError):
        SampledHistory(times=(-1.0, 0.0), values=(0.02, -0.01))
    with pytest.raises(ValidationError):
        SampledHistory(times=(-1.0,), values=(0.02,))
    sh = SampledHistory(times=(-1.0, 0.0), values=(0.02, 0.02))
    with pytest.raises(ValidationError):
        sh.check_coverage(2.0)  # does not reach back to -tau


def test_constant_history_validation():
    with pytest.raises(ValidationError):
        ConstantHistory(-1.0)
    with pytest.raises(ValidationError):
        ConstantHistory(0.0)


def test_simulate_validation():
    model = reference_model(3.2)
    hist = ConstantHistory(0.02)
    with pytest.raises(ValidationError):
        simulate(model, hist, t_end=100.0, step=0.0)
    with pytest.raises(ValidationError):
        simulate(model, hist, t_end=100.0, step=0.5)  # > tau/10
    with pytest.raises(ValidationError):
        simulate(model, hist, t_end=0.05, step=0.01)  # < 10 steps


def test_positivity_loss_reports_time():
    # a history whipsawing around equilibrium hard enough drives one RK4
    # update factor negative: stage rates -2, +2, +2, -4 give 1 - 10/6 < 0
    model = dataclasses.replace(reference_model(10.0), k=1.0)
    hist = SampledHistory(
        times=(-10.0, -9.5, -9.0, 0.0),
        values=(1.0 / 48.0, 1.0 / 52.0, 1.0 / 46.0, 1.0 / 46.0),
    )
    with pytest.raises(PositivityLoss) as excinfo:
        simulate(model, hist, t_end=10.0, step=1.0)
    assert excinfo.value.time == pytest.approx(1.0, abs=1e-12)
    assert "positive" in str(excinfo.value).lower()


def test_positivity_loss_carries_time_attribute():
    err = PositivityLoss(12.5)
    assert err.time == 12.5
    assert "12.5" in str(err)


def test_trajectory_roundtrip_exact(tmp_path):
    # 17 significant digits reproduce every double exactly
    model = reference_model(3.2)
    traj = simulate(model, ConstantHistory(0.025), t_end=50.0, step=0.05)
    path = tmp_path / "traj.csv"
    write_trajectory_csv(traj, path)
    t, p = read_trajectory_csv(path)
    np.testing.assert_array_equal(t, traj.t)
    np.testing.assert_array_equal(p, traj.values)


def test_dense_output_outside_range():
    traj = Trajectory(
        t0=0.0, step=1.0,
        values=np.array([1.0, 2.0, 3.0]),
        derivs=np.array([0.0, 0.0, 0.0]),
    )
    with pytest.raises(DelayedLookupGap):
        traj.at(-0.5)
    with pytest.raises(DelayedLookupGap):
        traj.at(2.5)
    assert traj.at(2.0) == pytest.approx(3.0, rel=1e-15)


def test_trajectory_validation():
    ok = np.array([1.0, 2.0])
    with pytest.raises(ValidationError):
        Trajectory(t0=0.0, step=-1.0, values=ok, derivs=ok)
    with pytest.raises(ValidationError):
        Trajectory(t0=0.0, step=1.0, values=np.array([1.0]), derivs=np.array([0.0]))
    with pytest.raises(ValidationError):
        Trajectory(t0=0.0, step=1.0, values=ok, derivs=np.array([0.0]))


def test_dense_output_matches_nodes(run_tau30):
    idx = np.array([100, 5000, 120000])
    t = run_tau30.t0 + idx * run_tau30.step
    vals = run_tau30.at(t)
    np.testing.assert_allclose(vals, run_tau30.values[idx], rtol=0, atol=1e-14)
