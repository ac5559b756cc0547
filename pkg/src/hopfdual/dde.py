"""Direct integration of the delay differential equation.

Method of steps with classical fixed-step RK4: the delayed price
p(t - tau) at each stage time is read from cubic Hermite interpolation over
the already-computed (value, derivative) nodes, or from the initial history
for t - tau <= 0. With step <= tau/10 every delayed lookup lands at least
several nodes behind the current step, so the scheme stays explicit.

The node derivative stored for Hermite interpolation is the RK4 first-stage
slope, i.e. the exact right-hand side at the node, which makes the dense
output C^1 and keeps the delayed lookups fourth-order accurate away from
the breaking points that propagate from t = 0 at multiples of tau.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DelayedLookupGap, NumericalError, PositivityLoss, ValidationError
from .model import ModelConfig


@dataclass(frozen=True)
class HistoryFunction:
    """Initial price history on [-tau, 0]."""

    def __call__(self, t: float) -> float:
        raise NotImplementedError

    def check_coverage(self, tau: float) -> None:
        """Raise unless the history covers [-tau, 0] entirely."""


@dataclass(frozen=True)
class ConstantHistory(HistoryFunction):
    """p(t) = p0 for every t <= 0."""

    p0: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.p0) and self.p0 > 0):
            raise ValidationError(f"history price must be positive, got {self.p0!r}")

    def __call__(self, t: float) -> float:
        return self.p0


@dataclass(frozen=True)
class SampledHistory(HistoryFunction):
    """Piecewise-linear history through (times, values) samples.

    Intended for restart scenarios: pass the tail of a previous trajectory.
    Times must be increasing and bracket [-tau, 0]; values must be positive.
    """

    times: tuple[float, ...] = ()
    values: tuple[float, ...] = ()

    def __post_init__(self):
        t = tuple(float(v) for v in self.times)
        v = tuple(float(x) for x in self.values)
        if len(t) != len(v) or len(t) < 2:
            raise ValidationError("sampled history needs matching times/values, >= 2 points")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ValidationError("sampled history times must be strictly increasing")
        if any(x <= 0 or not math.isfinite(x) for x in v):
            raise ValidationError("sampled history values must be positive and finite")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def check_coverage(self, tau: float) -> None:
        if self.times[0] > -tau or self.times[-1] < 0.0:
            raise ValidationError(
                f"sampled history [{self.times[0]:g}, {self.times[-1]:g}] "
                f"does not cover [-{tau:g}, 0]"
            )

    def __call__(self, t: float) -> float:
        ts, vs = self.times, self.values
        if t <= ts[0]:
            return vs[0]
        if t >= ts[-1]:
            return vs[-1]
        j = bisect_right(ts, t) - 1
        th = (t - ts[j]) / (ts[j + 1] - ts[j])
        return vs[j] * (1.0 - th) + vs[j + 1] * th


@dataclass(frozen=True)
class Trajectory:
    """Uniform-grid solution samples with node derivatives.

    Attributes
    ----------
    t0 : float
        Time of the first sample (0 for fresh simulations).
    step : float
        Uniform grid spacing.
    values : numpy.ndarray
        Price at each node.
    derivs : numpy.ndarray
        Right-hand side at each node (same length), making cubic Hermite
        dense output available between any two adjacent nodes.
    """

    t0: float
    step: float
    values: np.ndarray
    derivs: np.ndarray

    def __post_init__(self):
        if self.step <= 0:
            raise ValidationError(f"step must be positive, got {self.step!r}")
        if len(self.values) < 2 or len(self.values) != len(self.derivs):
            raise ValidationError("trajectory needs >= 2 nodes with matching derivatives")

    @property
    def t_end(self) -> float:
        return self.t0 + self.step * (len(self.values) - 1)

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.step * np.arange(len(self.values))

    def at(self, time: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Dense output by cubic Hermite interpolation at arbitrary times."""
        t = np.asarray(time, dtype=float)
        slack = 1e-9 * self.step
        if np.any(t < self.t0 - slack) or np.any(t > self.t_end + slack):
            raise DelayedLookupGap(
                f"dense output requested outside [{self.t0:g}, {self.t_end:g}]"
            )
        pos = np.clip((t - self.t0) / self.step, 0.0, len(self.values) - 1.0)
        j = np.minimum(pos.astype(int), len(self.values) - 2)
        th = pos - j
        h00 = 2 * th**3 - 3 * th**2 + 1
        h10 = th**3 - 2 * th**2 + th
        h01 = -2 * th**3 + 3 * th**2
        h11 = th**3 - th**2
        out = (
            h00 * self.values[j]
            + h10 * self.step * self.derivs[j]
            + h01 * self.values[j + 1]
            + h11 * self.step * self.derivs[j + 1]
        )
        return float(out) if np.ndim(time) == 0 else out


def default_step(tau: float, omega0: float) -> float:
    """Default integration step: min(tau/100, one two-hundredth of the
    linear period 2*pi/omega0)."""
    period = 2 * math.pi / omega0
    if tau > 0:
        return min(tau / 100.0, period / 200.0)
    return period / 200.0


def _simulate_ode(config: ModelConfig, p0: float, n: int, h: float) -> Trajectory:
    """Plain RK4 for the no-delay case, where the equation is an ODE."""
    k, c, x = config.k, config.c, config.demand.x

    def f(p: float) -> float:
        return k * p * (x(p) - c)

    values = [p0]
    derivs = []
    p = p0
    for i in range(n):
        k1 = f(p)
        derivs.append(k1)
        k2 = f(p + 0.5 * h * k1)
        k3 = f(p + 0.5 * h * k2)
        k4 = f(p + h * k3)
        p = p + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        _check_node(p, (i + 1) * h)
        values.append(p)
    derivs.append(f(p))
    return Trajectory(t0=0.0, step=h, values=np.array(values), derivs=np.array(derivs))


def _check_node(p: float, t: float) -> None:
    if not math.isfinite(p):
        raise NumericalError(f"price became non-finite at t = {t:.6g}")
    if p <= 0.0:
        raise PositivityLoss(t)


def simulate(
    config: ModelConfig,
    history: HistoryFunction,
    t_end: float,
    step: float,
) -> Trajectory:
    """Integrate the model from its initial history to t_end.

    Parameters
    ----------
    config : ModelConfig
        Model parameters; config.tau is the delay.
    history : HistoryFunction
        Price on [-tau, 0]; history(0) seeds the first node.
    t_end : float
        Final time; must be at least 10 steps long.
    step : float
        Uniform step size; must satisfy step <= tau/10 when tau > 0.

    Raises
    ------
    PositivityLoss
        If any computed node price is <= 0 (time reported).
    DelayedLookupGap
        If a delayed lookup falls outside covered history (logic guard).
    """
    tau = config.tau
    if step <= 0:
        raise ValidationError(f"step must be positive, got {step!r}")
    if tau > 0 and step > tau / 10.0:
        raise ValidationError(f"step {step!r} exceeds tau/10 = {tau / 10.0!r}")
    if t_end < 10 * step:
        raise ValidationError(f"t_end {t_end!r} shorter than 10 steps")
    history.check_coverage(tau)
    n = int(round(t_end / step))
    h = step
    p0 = history(0.0)
    if p0 <= 0:
        raise ValidationError(f"history at t = 0 must be positive, got {p0!r}")
    if tau == 0.0:
        return _simulate_ode(config, p0, n, h)

    k, c, x = config.k, config.c, config.demand.x

    def f(p: float, p_delayed: float) -> float:
        return k * p * (x(p_delayed) - c)

    values = [p0]
    derivs: list[float] = []
    lag = tau / h

    def lookup(pos: float) -> float:
        """Delayed price at grid position pos (in units of h, may be < 0)."""
        if pos <= 0.0:
            return history(pos * h)
        j = int(pos)
        th = pos - j
        if th == 0.0:
            if j >= len(values):
                raise DelayedLookupGap(
                    f"delayed lookup at t = {pos * h:.6g} ahead of computed nodes"
                )
            return values[j]
        if j + 1 >= len(values) or j + 1 >= len(derivs):
            raise DelayedLookupGap(
                f"delayed lookup at t = {pos * h:.6g} ahead of computed nodes"
            )
        h00 = 2 * th**3 - 3 * th**2 + 1
        h10 = th**3 - 2 * th**2 + th
        h01 = -2 * th**3 + 3 * th**2
        h11 = th**3 - th**2
        return (
            h00 * values[j]
            + h10 * h * derivs[j]
            + h01 * values[j + 1]
            + h11 * h * derivs[j + 1]
        )

    # Stage offsets relative to the current node, minus the delay, are the
    # same every step; precompute the Hermite weights for the post-history
    # fast path. Stages at c = 0, 1/2, 1 (the two middle stages share the
    # delayed value at t + h/2).
    stages = []
    for cfrac in (0.0, 0.5, 1.0):
        delta = cfrac - lag
        m = math.floor(delta)
        th = delta - m
        h00 = 2 * th**3 - 3 * th**2 + 1
        h10 = th**3 - 2 * th**2 + th
        h01 = -2 * th**3 + 3 * th**2
        h11 = th**3 - th**2
        stages.append((m, h00, h10 * h, h01, h11 * h))
    (m0, a00, a10, a01, a11), (m1, b00, b10, b01, b11), (m2, c00, c10, c01, c11) = stages

    # While any stage's delayed time can touch the initial history, go
    # through the general lookup; afterwards switch to the fast path.
    n_hist = min(n, int(math.ceil(lag)) + 2)
    for i in range(n_hist):
        p = values[i]
        pd0 = lookup(i - lag)
        k1 = f(p, pd0)
        derivs.append(k1)
        pd1 = lookup(i + 0.5 - lag)
        k2 = f(p + 0.5 * h * k1, pd1)
        k3 = f(p + 0.5 * h * k2, pd1)
        pd2 = lookup(i + 1.0 - lag)
        k4 = f(p + h * k3, pd2)
        p_next = p + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        _check_node(p_next, (i + 1) * h)
        values.append(p_next)

    for i in range(n_hist, n):
        p = values[i]
        j = i + m0
        pd0 = a00 * values[j] + a10 * derivs[j] + a01 * values[j + 1] + a11 * derivs[j + 1]
        k1 = f(p, pd0)
        derivs.append(k1)
        j = i + m1
        pd1 = b00 * values[j] + b10 * derivs[j] + b01 * values[j + 1] + b11 * derivs[j + 1]
        k2 = f(p + 0.5 * h * k1, pd1)
        k3 = f(p + 0.5 * h * k2, pd1)
        j = i + m2
        pd2 = c00 * values[j] + c10 * derivs[j] + c01 * values[j + 1] + c11 * derivs[j + 1]
        k4 = f(p + h * k3, pd2)
        p_next = p + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        _check_node(p_next, (i + 1) * h)
        values.append(p_next)

    derivs.append(f(values[n], lookup(n - lag)))
    return Trajectory(t0=0.0, step=h, values=np.array(values), derivs=np.array(derivs))


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Write the trajectory as `t,p` rows, 17 significant digits."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,p\n")
        t0, h = traj.t0, traj.step
        for i, v in enumerate(traj.values):
            fh.write("%.17g,%.17g\n" % (t0 + h * i, v))


def read_trajectory_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a `t,p` CSV back into time and price arrays."""
    data = np.genfromtxt(path, delimiter=",", skip_header=1)
    if data.ndim == 1:
        data = data.reshape(1, -1)
    return data[:, 0], data[:, 1]
