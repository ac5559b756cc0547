"""Linear stability of the equilibrium.

Linearizing the model about p* gives du/dt = b2 * u(t - tau) with b2 < 0,
whose characteristic equation is the quasi-polynomial

    lambda - b2 * exp(-lambda * tau) = 0.

A conjugate pair crosses the imaginary axis at omega0 = -b2 when the delay
reaches tau0 = -pi/(2*b2); further crossings occur along the critical-delay
family tau_c(n) = -(2n+1)*pi/(2*b2) for even n. The crossing speed
Re(d lambda/d tau) at tau0 is b2^2/(1 + pi^2/4) > 0, so the pair crosses
transversally and a genuine oscillatory instability is born there.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

from .errors import NoConvergence, NonNegativeB2, SingularJacobian, ValidationError
from .model import TaylorCoefficients


class StabilityVerdict(Enum):
    STABLE = "stable"
    CRITICAL = "critical"
    UNSTABLE = "unstable"


@dataclass(frozen=True)
class LinearAnalysis:
    """Closed-form linear-stability summary.

    Attributes
    ----------
    b2 : float
        Linear delayed-feedback coefficient (negative).
    omega0 : float
        Frequency of the critical root pair, -b2.
    tau0 : float
        First critical delay, -pi/(2*b2).
    tau_c : tuple of float
        Critical-delay family -(2n+1)*pi/(2*b2) for n = 0, 2, 4, ...,
        in increasing order; tau_c[0] == tau0.
    transversality : float
        Re(d lambda/d tau) at tau0, always positive.
    """

    b2: float
    omega0: float
    tau0: float
    tau_c: tuple[float, ...]
    transversality: float


@dataclass(frozen=True)
class ComplexRoot:
    """A characteristic root alpha + i*omega with its equation residual."""

    re: float
    im: float
    residual: float


def linear_analysis(coeffs: TaylorCoefficients, n_critical: int = 3) -> LinearAnalysis:
    """Evaluate the closed-form critical delays and crossing speed.

    Raises
    ------
    NonNegativeB2
        If coeffs.b2 >= 0 (demand not strictly decreasing at p*).
    """
    b2 = coeffs.b2
    if b2 >= 0:
        raise NonNegativeB2(f"b2 = {b2!r} must be negative for a decreasing demand")
    if n_critical < 1:
        raise ValidationError(f"n_critical must be >= 1, got {n_critical!r}")
    omega0 = -b2
    tau_c = tuple(-(2 * n + 1) * math.pi / (2 * b2) for n in range(0, 2 * n_critical, 2))
    return LinearAnalysis(
        b2=b2,
        omega0=omega0,
        tau0=tau_c[0],
        tau_c=tau_c,
        transversality=b2 * b2 / (1.0 + math.pi**2 / 4.0),
    )


def is_locally_stable(analysis: LinearAnalysis, tau: float) -> StabilityVerdict:
    """Sign verdict for the equilibrium at delay tau.

    The boundary gets a relative tolerance band of 1e-9*tau0 and its own
    verdict so callers never mistake the borderline case for a side.
    """
    if tau < 0:
        raise ValidationError(f"delay must be nonnegative, got {tau!r}")
    tol = 1e-9 * analysis.tau0
    if abs(tau - analysis.tau0) <= tol:
        return StabilityVerdict.CRITICAL
    if tau < analysis.tau0:
        return StabilityVerdict.STABLE
    return StabilityVerdict.UNSTABLE


def characteristic_root(
    coeffs: TaylorCoefficients, tau: float, guess: complex
) -> ComplexRoot:
    """Newton's method on g(lambda) = lambda - b2*exp(-lambda*tau).

    Raises
    ------
    NoConvergence
        If 100 iterations fail to bring |g| below 1e-12.
    SingularJacobian
        If |g'| falls below 1e-14 at an iterate.
    """
    if tau < 0:
        raise ValidationError(f"delay must be nonnegative, got {tau!r}")
    if not (math.isfinite(guess.real) and math.isfinite(guess.imag)):
        raise ValidationError(f"guess must be finite, got {guess!r}")
    b2 = coeffs.b2
    lam = complex(guess)
    for _ in range(100):
        z = -lam * tau
        if z.real > 700.0:
            # exp would overflow: the iterate has run off to re(lam) << 0
            raise NoConvergence(
                f"characteristic root iteration diverged from {guess!r}"
            )
        e = cmath.exp(z)
        g = lam - b2 * e
        if abs(g) <= 1e-12:
            return ComplexRoot(re=lam.real, im=lam.imag, residual=abs(g))
        gp = 1.0 + b2 * tau * e
        if abs(gp) < 1e-14:
            raise SingularJacobian(f"|g'({lam!r})| < 1e-14")
        lam = lam - g / gp
    raise NoConvergence(f"characteristic root iteration stalled at {lam!r}")


def rightmost_root(coeffs: TaylorCoefficients, tau: float) -> ComplexRoot:
    """Largest-real-part characteristic root found from a fixed guess grid.

    Heuristic by design: the grid of starts (three real parts around the
    no-delay root, four frequencies up to one delay harmonic) reliably
    captures the dominant roots near the imaginary axis at moderate delays,
    which is all the stability bracket checks need. Roots are deduplicated
    within 1e-8 and conjugates are canonicalized to im >= 0.
    """
    if tau <= 0:
        raise ValidationError(f"rightmost_root needs tau > 0, got {tau!r}")
    b2 = coeffs.b2
    alphas = (-2.0 * abs(b2), 0.0, abs(b2))
    omegas = (0.0, math.pi / (2 * tau), math.pi / tau, 2 * math.pi / tau)
    found: list[ComplexRoot] = []
    for a in alphas:
        for w in omegas:
            try:
                root = characteristic_root(coeffs, tau, complex(a, w))
            except (NoConvergence, SingularJacobian):
                continue
            if root.im < 0:
                root = ComplexRoot(re=root.re, im=-root.im, residual=root.residual)
            if all(
                math.hypot(root.re - r.re, root.im - r.im) >= 1e-8 for r in found
            ):
                found.append(root)
    if not found:
        raise NoConvergence("every start of the rightmost-root grid failed")
    return max(found, key=lambda r: r.re)
