"""Second-order expansion of the bifurcating cycle and its stability.

Rescaling time as s = omega*t and expanding the deviation u, the frequency
omega, and the delay tau in an amplitude parameter eps (keeping every order
2pi-periodic) gives

    u(s)   = eps*sin(s) + eps^2*u1(s) + ...,
    u1(s)  = C1*sin(2s) + D1*cos(2s) + E1,
    omega  = omega0 + eps^2*omega2 + ...,
    tau    = tau0 + eps^2*tau2 + ...,

so a delay tau on the bifurcating side corresponds to the amplitude
eps = sqrt((tau - tau0)/tau2). The first-order corrections vanish
(omega1 = tau1 = 0). Perturbations Z = exp(eta*s)*q(s) around the cycle
give the growth exponent eta = eps^2*eta2 + ... with

    q(s) = sin(s) + eps*q1(s) + ...,
    q1(s) = A + B*cos(s) + C*sin(s) + D*cos(2s) + E*sin(2s).

Sign rules: tau2 > 0 means the cycle exists above tau0 (supercritical);
eta2 < 0 means it is orbitally stable; omega2 < 0 means the period grows
with the delay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from .bifurcation import LinearAnalysis
from .errors import (
    DegenerateBifurcation,
    ExpansionInvalid,
    NonNegativeB2,
    ValidationError,
    WrongSide,
)
from .model import TaylorCoefficients


@dataclass(frozen=True)
class U1Harmonics:
    """Coefficients of u1(s) = C1*sin(2s) + D1*cos(2s) + E1.

    The free first-harmonic constants (phase and amplitude redundancy) are
    fixed to zero, so the canonical waveform has no eps^2 correction at the
    fundamental frequency.
    """

    c1: float
    d1: float
    e1: float


@dataclass(frozen=True)
class Q1Harmonics:
    """Coefficients of q1(s) = A + B*cos(s) + C*sin(s) + D*cos(2s) + E*sin(2s),
    normalized by q1(0) = 0 and q1'(0) = 1."""

    a: float
    b: float
    c: float
    d: float
    e: float


@dataclass(frozen=True)
class HopfExpansion:
    """All expansion coefficients needed to predict and classify the cycle.

    omega1, tau1, eta1 are identically zero and stored explicitly.
    degenerate lists the names of second-order quantities that vanish
    relative to their natural scale (so sign verdicts would be meaningless).
    """

    omega0: float
    tau0: float
    omega1: float
    tau1: float
    eta1: float
    omega2: float
    tau2: float
    eta2: float
    u1_harmonics: U1Harmonics
    q1_harmonics: Q1Harmonics
    p_star: float
    degenerate: tuple[str, ...] = ()


class Direction(Enum):
    SUPERCRITICAL = "supercritical"
    SUBCRITICAL = "subcritical"


class CycleStability(Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


class PeriodTrend(Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


@dataclass(frozen=True)
class BifurcationClass:
    direction: Direction
    cycle_stability: CycleStability
    period_trend: PeriodTrend


@dataclass(frozen=True)
class CyclePrediction:
    """Cycle characteristics predicted at a given delay.

    Attributes
    ----------
    tau : float
        Delay the prediction is for.
    epsilon : float
        Amplitude parameter sqrt((tau - tau0)/tau2).
    amplitude : float
        Leading-order half peak-to-trough, equal to epsilon; the eps^2
        harmonics perturb the true excursion at second order.
    omega, period : float
        Angular frequency omega0 + omega2*eps^2 and period 2*pi/omega.
    mean_offset : float
        DC shift of the cycle mean above p_star, eps^2*E1.
    floquet_exponent : float
        Composite growth-rate estimate eps^2*eta2 (negative: stable cycle).
    p_star : float
        Equilibrium the cycle surrounds.
    warning : str or None
        Set when eps^2 > 0.01, where the local expansion loses reliability.
    """

    tau: float
    epsilon: float
    amplitude: float
    omega: float
    period: float
    mean_offset: float
    floquet_exponent: float
    p_star: float
    u1_harmonics: U1Harmonics
    warning: str | None = None

    def sample(self, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Predicted waveform p(t) = p* + eps*sin(wt) + eps^2*u1(wt)."""
        s = self.omega * np.asarray(t, dtype=float)
        h = self.u1_harmonics
        u1 = h.c1 * np.sin(2 * s) + h.d1 * np.cos(2 * s) + h.e1
        out = self.p_star + self.epsilon * np.sin(s) + self.epsilon**2 * u1
        return float(out) if np.isscalar(t) or np.ndim(t) == 0 else out


def _degenerate_quantities(b2: float, b4: float, b5: float,
                           omega2: float, tau2: float, eta2: float) -> tuple[str, ...]:
    """Names of second-order quantities vanishing below 1e-12 of their scale."""
    pi = math.pi
    scale_omega2 = (abs(b4) + 2 * abs(b5)) * abs(b5) / (2 * abs(b2))
    scale_tau2 = ((pi - 2) * abs(b4 * b5) + 2 * pi * b5 * b5) / (4 * abs(b2) ** 3)
    scale_eta2 = 5 * abs(b4 * b5) / (2 * b2 * b2)
    out = []
    for name, value, scale in (
        ("omega2", omega2, scale_omega2),
        ("tau2", tau2, scale_tau2),
        ("eta2", eta2, scale_eta2),
    ):
        if abs(value) <= 1e-12 * max(1.0, scale):
            out.append(name)
    return tuple(out)


def hopf_expansion(coeffs: TaylorCoefficients, analysis: LinearAnalysis) -> HopfExpansion:
    """Evaluate every closed-form expansion coefficient.

    Raises
    ------
    NonNegativeB2
        If coeffs.b2 >= 0.
    """
    b2, b4, b5 = coeffs.b2, coeffs.b4, coeffs.b5
    if b2 >= 0:
        raise NonNegativeB2(f"b2 = {b2!r} must be negative")
    pi = math.pi
    e1 = -b5 / (2 * b2)
    c1 = -(b4 + 2 * b5) / (10 * b2)
    d1 = (-2 * b4 + b5) / (10 * b2)
    omega2 = (b4 + 2 * b5) * b5 / (2 * b2)
    tau2 = ((2 - pi) * b4 * b5 - 2 * pi * b5 * b5) / (4 * b2**3)
    eta2 = 5 * b4 * b5 / (2 * b2 * b2)
    qb = (4 * b4 + 4 * b5) / (5 * b2)
    q1 = Q1Harmonics(
        a=-b5 / b2,
        b=qb,
        c=1.0 + qb,
        d=(b5 - 4 * b4) / (5 * b2),
        e=-(2 * b4 + 2 * b5) / (5 * b2),
    )
    return HopfExpansion(
        omega0=analysis.omega0,
        tau0=analysis.tau0,
        omega1=0.0,
        tau1=0.0,
        eta1=0.0,
        omega2=omega2,
        tau2=tau2,
        eta2=eta2,
        u1_harmonics=U1Harmonics(c1=c1, d1=d1, e1=e1),
        q1_harmonics=q1,
        p_star=coeffs.p_star,
        degenerate=_degenerate_quantities(b2, b4, b5, omega2, tau2, eta2),
    )


def classify(exp: HopfExpansion) -> BifurcationClass:
    """Sign verdicts for direction, cycle stability, and period trend.

    Raises
    ------
    DegenerateBifurcation
        If any classifying quantity vanishes (flagged at construction or
        exactly zero), naming that quantity.
    """
    for name, value in (("tau2", exp.tau2), ("eta2", exp.eta2), ("omega2", exp.omega2)):
        if name in exp.degenerate or value == 0.0:
            raise DegenerateBifurcation(name)
    return BifurcationClass(
        direction=Direction.SUPERCRITICAL if exp.tau2 > 0 else Direction.SUBCRITICAL,
        cycle_stability=CycleStability.STABLE if exp.eta2 < 0 else CycleStability.UNSTABLE,
        period_trend=PeriodTrend.INCREASING if exp.omega2 < 0 else PeriodTrend.DECREASING,
    )


def predicted_cycle(exp: HopfExpansion, tau: float) -> CyclePrediction:
    """Predict the cycle at delay tau from the second-order expansion.

    Raises
    ------
    DegenerateBifurcation
        If tau2 vanishes, so no delay-to-amplitude map exists.
    WrongSide
        If (tau - tau0)/tau2 < 0: no cycle on that side of the onset.
    ExpansionInvalid
        If the predicted frequency is nonpositive (tau absurdly far out).
    """
    if tau < 0:
        raise ValidationError(f"delay must be nonnegative, got {tau!r}")
    if "tau2" in exp.degenerate or exp.tau2 == 0.0:
        raise DegenerateBifurcation("tau2")
    eps2 = (tau - exp.tau0) / exp.tau2
    if eps2 < 0:
        raise WrongSide(
            f"tau = {tau:.6g} is on the non-bifurcating side of tau0 = {exp.tau0:.6g}"
        )
    eps = math.sqrt(eps2)
    omega = exp.omega0 + exp.omega2 * eps2
    if omega <= 0:
        raise ExpansionInvalid(
            f"predicted frequency {omega:.3g} <= 0 at tau = {tau:.6g}; "
            "the expansion cannot reach this delay"
        )
    warning = None
    if eps2 > 0.01:
        warning = (
            f"epsilon^2 = {eps2:.3g} exceeds 0.01; the expansion is local and "
            "this far from onset its predictions degrade"
        )
    return CyclePrediction(
        tau=tau,
        epsilon=eps,
        amplitude=eps,
        omega=omega,
        period=2 * math.pi / omega,
        mean_offset=eps2 * exp.u1_harmonics.e1,
        floquet_exponent=eps2 * exp.eta2,
        p_star=exp.p_star,
        u1_harmonics=exp.u1_harmonics,
        warning=warning,
    )
