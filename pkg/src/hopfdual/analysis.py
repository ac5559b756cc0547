"""Measuring trajectories and sweeping the delay.

estimate_cycle reduces a long trajectory to amplitude/period/mean after
discarding the transient; sweep runs one simulation per delay value and
pairs each measurement with the second-order prediction so measured and
predicted columns sit side by side in the output.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .bifurcation import linear_analysis
from .dde import ConstantHistory, Trajectory, default_step, simulate
from .errors import HopfDualError, RegimeMismatch, TooShort, ValidationError
from .hopf import CyclePrediction, hopf_expansion, predicted_cycle
from .model import ModelConfig, find_equilibrium, taylor_coefficients

# Post-transient excursion below this fraction of p* counts as equilibrium:
# an order below the smallest cycle amplitude of interest, orders above
# integrator noise.
EQUILIBRIUM_THRESHOLD = 1e-3

# Successive-maxima drift below this fraction of the trailing amplitude
# marks the transient as finished.
DRIFT_TOLERANCE = 0.01

# A limit-cycle verdict needs at least this many complete cycles whose
# period spread (std/mean) stays below the dispersion bound.
MIN_CYCLES = 5
PERIOD_DISPERSION = 0.02


class Regime(Enum):
    EQUILIBRIUM = "equilibrium"
    LIMIT_CYCLE = "limit_cycle"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class CycleEstimate:
    """Measured steady-state characteristics of a trajectory.

    Attributes
    ----------
    amplitude : float
        Half the mean peak-to-trough over complete cycles (LimitCycle);
        the residual excursion |p - p*| for Equilibrium; rough half
        peak-to-trough for Undetermined.
    period : float
        Mean upward-crossing spacing; NaN unless regime is LimitCycle.
    mean : float
        Time average over the measurement window (an integer number of
        cycles for LimitCycle).
    regime : Regime
    transient_end : float
        Start of the measurement window.
    """

    amplitude: float
    period: float
    mean: float
    regime: Regime
    transient_end: float


@dataclass(frozen=True)
class PredictionErrors:
    """Relative errors |measured - predicted| / |predicted|."""

    amplitude: float
    period: float
    mean_offset: float


@dataclass(frozen=True)
class DiagramRow:
    """One delay value of a sweep: measurement, prediction, errors, status."""

    tau: float
    regime: str
    amp_meas: float | None
    period_meas: float | None
    mean_meas: float | None
    amp_pred: float | None
    period_pred: float | None
    mean_offset_pred: float | None
    amp_err: float | None
    period_err: float | None
    status: str
    mean_offset_err: float | None = None


def _refine_extremum(w: np.ndarray, idx: int) -> float:
    """Parabolic vertex through the sample and its neighbors."""
    if idx <= 0 or idx >= len(w) - 1:
        return float(w[idx])
    y0, y1, y2 = float(w[idx - 1]), float(w[idx]), float(w[idx + 1])
    curv = y0 - 2.0 * y1 + y2
    if abs(curv) < 1e-300:
        return y1
    return y1 - (y2 - y0) ** 2 / (8.0 * curv)


def _transient_heuristic(v: np.ndarray, t0: float, h: float) -> float:
    """Earliest time after which successive maxima drift below tolerance.

    Drift is measured against the half peak-to-trough of the trailing
    quarter of the run, scanning maxima from the last backwards.
    """
    interior = v[1:-1]
    max_idx = np.nonzero((interior >= v[:-2]) & (interior > v[2:]))[0] + 1
    if len(max_idx) < 2:
        return t0
    tail = v[3 * len(v) // 4:]
    amp_scale = (float(tail.max()) - float(tail.min())) / 2.0
    if amp_scale <= 0.0:
        return t0
    drifts = np.abs(np.diff(v[max_idx]))
    bad = np.nonzero(drifts > DRIFT_TOLERANCE * amp_scale)[0]
    first_settled = bad[-1] + 1 if len(bad) else 0
    return t0 + h * float(max_idx[first_settled])


def estimate_cycle(
    traj: Trajectory, p_star: float, transient_fraction: float = 0.5
) -> CycleEstimate:
    """Measure amplitude, period, and mean past the transient.

    The measurement window starts at the later of the maxima-drift
    heuristic and transient_fraction of the run (capped at 90% so a window
    always remains). Period comes from linearly interpolated upward
    crossings of p - mean; amplitude from per-cycle extrema with parabolic
    refinement; mean from the time average over an integer cycle count.

    Raises
    ------
    TooShort
        If the window is not at equilibrium yet holds fewer than 5
        complete cycles.
    """
    if not 0.0 <= transient_fraction < 1.0:
        raise ValidationError(
            f"transient_fraction must be in [0, 1), got {transient_fraction!r}"
        )
    v = traj.values
    t0, h = traj.t0, traj.step
    span = h * (len(v) - 1)
    t_heur = _transient_heuristic(v, t0, h)
    transient_end = max(t_heur, t0 + transient_fraction * span)
    transient_end = min(transient_end, t0 + 0.9 * span)
    i0 = int(math.ceil((transient_end - t0) / h - 1e-12))
    w = v[i0:]
    wt = t0 + h * np.arange(i0, len(v))
    transient_end = float(wt[0])

    excursion = float(np.max(np.abs(w - p_star)))
    if excursion < EQUILIBRIUM_THRESHOLD * p_star:
        return CycleEstimate(
            amplitude=excursion,
            period=math.nan,
            mean=float(w.mean()),
            regime=Regime.EQUILIBRIUM,
            transient_end=transient_end,
        )

    mean0 = float(w.mean())
    m = w - mean0
    ci = np.nonzero((m[:-1] < 0) & (m[1:] >= 0))[0]
    if len(ci) < MIN_CYCLES + 1:
        raise TooShort(
            f"only {max(len(ci) - 1, 0)} complete cycles past the transient; "
            f"need {MIN_CYCLES}"
        )
    frac = m[ci] / (m[ci] - m[ci + 1])
    tc = wt[ci] + frac * h
    periods = np.diff(tc)
    period = float(periods.mean())
    dispersion = float(periods.std() / period)
    if dispersion >= PERIOD_DISPERSION:
        return CycleEstimate(
            amplitude=(float(w.max()) - float(w.min())) / 2.0,
            period=math.nan,
            mean=mean0,
            regime=Regime.UNDETERMINED,
            transient_end=transient_end,
        )

    amps = []
    for j in range(len(ci) - 1):
        seg = slice(ci[j], ci[j + 1] + 2)
        base = seg.start
        peak = _refine_extremum(w, base + int(np.argmax(w[seg])))
        trough = _refine_extremum(w, base + int(np.argmin(w[seg])))
        amps.append((peak - trough) / 2.0)
    amplitude = float(np.mean(amps))

    # time average over the integer cycle span [tc[0], tc[-1]]; by
    # construction the interpolated price at each crossing equals mean0
    c0, cn = float(tc[0]), float(tc[-1])
    i1 = int(np.searchsorted(wt, c0, side="right"))
    i2 = int(np.searchsorted(wt, cn, side="left")) - 1
    inner = w[i1 : i2 + 1]
    integral = h * (float(inner.sum()) - (float(inner[0]) + float(inner[-1])) / 2.0)
    integral += (wt[i1] - c0) * (mean0 + float(w[i1])) / 2.0
    integral += (cn - wt[i2]) * (float(w[i2]) + mean0) / 2.0
    mean_cycle = float(integral / (cn - c0))

    return CycleEstimate(
        amplitude=amplitude,
        period=period,
        mean=mean_cycle,
        regime=Regime.LIMIT_CYCLE,
        transient_end=transient_end,
    )


def compare_prediction(est: CycleEstimate, pred: CyclePrediction) -> PredictionErrors:
    """Relative errors of a measurement against a prediction.

    Raises
    ------
    RegimeMismatch
        If the estimate is not a limit cycle.
    """
    if est.regime is not Regime.LIMIT_CYCLE:
        raise RegimeMismatch(f"estimate regime is {est.regime.value}, not limit_cycle")
    return PredictionErrors(
        amplitude=abs(est.amplitude - pred.amplitude) / abs(pred.amplitude),
        period=abs(est.period - pred.period) / abs(pred.period),
        mean_offset=abs((est.mean - pred.p_star) - pred.mean_offset)
        / abs(pred.mean_offset),
    )


def sweep(
    config: ModelConfig,
    tau_values,
    t_end: float,
    step: float | None = None,
    history_p0: float | None = None,
    transient_fraction: float = 0.5,
) -> list[DiagramRow]:
    """Simulate each delay and pair measurements with predictions.

    Rows are ordered by tau. A row whose simulation or measurement fails
    carries the failure's class name in its status instead of aborting the
    sweep. Predictions appear only above the bifurcation point.
    """
    taus = [float(t) for t in tau_values]
    if not taus:
        raise ValidationError("tau_values must be nonempty")
    if any(t < 0 for t in taus):
        raise ValidationError("every tau must be nonnegative")
    eq = find_equilibrium(config)
    coeffs = taylor_coefficients(config, eq)
    analysis = linear_analysis(coeffs)
    exp = hopf_expansion(coeffs, analysis)
    p0 = 1.25 * eq.p_star if history_p0 is None else history_p0

    rows: list[DiagramRow] = []
    for tau in sorted(taus):
        row_kwargs: dict = dict(
            tau=tau, regime="", amp_meas=None, period_meas=None, mean_meas=None,
            amp_pred=None, period_pred=None, mean_offset_pred=None,
            amp_err=None, period_err=None, mean_offset_err=None, status="ok",
        )
        try:
            cfg = dataclasses.replace(config, tau=tau)
            h = default_step(tau, analysis.omega0) if step is None else step
            traj = simulate(cfg, ConstantHistory(p0), t_end, h)
            est = estimate_cycle(traj, eq.p_star, transient_fraction)
            row_kwargs["regime"] = est.regime.value
            row_kwargs["amp_meas"] = est.amplitude
            row_kwargs["mean_meas"] = est.mean
            if est.regime is Regime.LIMIT_CYCLE:
                row_kwargs["period_meas"] = est.period
            if tau > analysis.tau0:
                pred = predicted_cycle(exp, tau)
                row_kwargs["amp_pred"] = pred.amplitude
                row_kwargs["period_pred"] = pred.period
                row_kwargs["mean_offset_pred"] = pred.mean_offset
                if est.regime is Regime.LIMIT_CYCLE:
                    errs = compare_prediction(est, pred)
                    row_kwargs["amp_err"] = errs.amplitude
                    row_kwargs["period_err"] = errs.period
                    row_kwargs["mean_offset_err"] = errs.mean_offset
        except HopfDualError as exc:
            row_kwargs["status"] = type(exc).__name__
        rows.append(DiagramRow(**row_kwargs))
    return rows


SWEEP_HEADER = (
    "tau,regime,amp_meas,period_meas,mean_meas,"
    "amp_pred,period_pred,mean_offset_pred,amp_err,period_err,status"
)


def write_sweep_csv(rows: list[DiagramRow], path) -> None:
    """Serialize sweep rows with 17-significant-digit numbers."""

    def fmt(x: float | None) -> str:
        return "" if x is None else "%.17g" % x

    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SWEEP_HEADER + "\n")
        for r in rows:
            fh.write(
                ",".join(
                    [
                        "%.17g" % r.tau,
                        r.regime,
                        fmt(r.amp_meas),
                        fmt(r.period_meas),
                        fmt(r.mean_meas),
                        fmt(r.amp_pred),
                        fmt(r.period_pred),
                        fmt(r.mean_offset_pred),
                        fmt(r.amp_err),
                        fmt(r.period_err),
                        r.status,
                    ]
                )
                + "\n"
            )
