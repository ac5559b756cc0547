"""The dual congestion-control model and its local expansion.

The link price p(t) obeys

    dp/dt = k * p(t) * (x(p(t - tau)) - c)

with gain k, capacity c, round-trip delay tau, and demand curve x. The
equilibrium p* solves x(p*) = c. Writing u = p - p* and expanding the right
side in the current and delayed deviations (u, v) gives

    du/dt = b1*u + b2*v + b3*u^2 + b4*u*v + b5*v^2
            + b6*u^3 + b7*u^2*v + b8*u*v^2 + b9*v^3 + ...

The canonical coefficients used by every downstream module are the closed
forms

    b2 = k*p*x'(p*),  b4 = k*x'(p*)/2,  b5 = k*p*x''(p*)/2,
    b8 = k*x''(p*)/6, b9 = k*p*x'''(p*)/6,  b1 = b3 = b6 = b7 = 0.

A direct Taylor expansion of F(u, v) = k*(u+p*)*(x(v+p*) - c) yields a uv
coefficient of k*x' (twice the canonical b4) and a uv^2 coefficient of
k*x''/2 (three times the canonical b8). numeric_taylor_oracle computes those
direct monomial coefficients by finite differences; the verify report
surfaces the two conventions side by side. The canonical forms stay
authoritative for the analysis pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import numdiff
from .demand import DemandFunction
from .errors import DomainViolation, NoBracket, ValidationError


@dataclass(frozen=True)
class ModelConfig:
    """Gain, capacity, delay, and demand curve: everything the model needs.

    Attributes
    ----------
    k : float
        Price adaptation gain, 1/(price * time unit). Must be positive.
    c : float
        Link capacity, packets per time unit. Must be positive.
    tau : float
        Round-trip delay, time units. Must be nonnegative.
    demand : DemandFunction
        Strictly decreasing rate-demand curve.
    """

    k: float
    c: float
    tau: float
    demand: DemandFunction

    def __post_init__(self):
        if not (isinstance(self.k, (int, float)) and math.isfinite(self.k) and self.k > 0):
            raise ValidationError(f"gain k must be positive and finite, got {self.k!r}")
        if not (isinstance(self.c, (int, float)) and math.isfinite(self.c) and self.c > 0):
            raise ValidationError(f"capacity c must be positive and finite, got {self.c!r}")
        if not (isinstance(self.tau, (int, float)) and math.isfinite(self.tau) and self.tau >= 0):
            raise ValidationError(f"delay tau must be nonnegative and finite, got {self.tau!r}")
        if not isinstance(self.demand, DemandFunction):
            raise ValidationError(f"demand must be a DemandFunction, got {type(self.demand)!r}")


@dataclass(frozen=True)
class Equilibrium:
    """Fixed point of the model.

    Attributes
    ----------
    p_star : float
        Price at which demand meets capacity, x(p*) = c.
    residual : float
        |x(p*) - c| actually achieved by the solver.
    """

    p_star: float
    residual: float


@dataclass(frozen=True)
class TaylorCoefficients:
    """Canonical expansion coefficients b1..b9 about p_star.

    b1, b3, b6, b7 are identically zero (the right side is linear in the
    undelayed deviation and vanishes at equilibrium) and stored explicitly.
    """

    b1: float
    b2: float
    b3: float
    b4: float
    b5: float
    b6: float
    b7: float
    b8: float
    b9: float
    p_star: float

    def as_dict(self) -> dict[str, float]:
        return {f"b{i}": getattr(self, f"b{i}") for i in range(1, 10)}


def rhs(config: ModelConfig, p: float, p_delayed: float) -> float:
    """Instantaneous price velocity k*p*(x(p_delayed) - c)."""
    return config.k * p * (config.demand.x(p_delayed) - config.c)


def find_equilibrium(config: ModelConfig, initial_guess: float = 1.0) -> Equilibrium:
    """Solve x(p*) = c by bracket expansion plus safeguarded Newton.

    The bracket grows geometrically from the initial guess (doubling upward
    or halving downward, at most 60 times) until x(p) - c changes sign;
    Newton then refines inside the bracket, falling back to bisection
    whenever a step would leave it. Monotone demand makes the root unique.

    Returns
    -------
    Equilibrium
        With residual |x(p*) - c| <= 1e-12 * c.

    Raises
    ------
    NoBracket
        If 60 doublings find no sign change.
    DomainViolation
        If a probe leaves the demand domain.
    """
    demand = config.demand
    lo_dom, hi_dom = demand.lo, demand.hi

    def g(p: float) -> float:
        return demand.x(p) - config.c

    p0 = initial_guess
    if not (lo_dom < p0 < hi_dom):
        p0 = 0.5 * (lo_dom + hi_dom) if math.isfinite(hi_dom) else max(lo_dom * 2, 1e-8)
    g0 = g(p0)
    if g0 == 0.0:
        return Equilibrium(p_star=p0, residual=0.0)

    # x decreasing: g > 0 means the root lies above p0, g < 0 below it.
    grow = g0 > 0
    a, ga = p0, g0
    b, gb = p0, g0
    for _ in range(60):
        if grow:
            nxt = b * 2.0
            if nxt >= hi_dom:
                nxt = 0.5 * (b + hi_dom)
                if not nxt > b:
                    raise DomainViolation(
                        f"bracket expansion reached demand domain edge {hi_dom!r}"
                    )
            a, ga = b, gb
            b, gb = nxt, g(nxt)
            if gb <= 0:
                break
        else:
            nxt = a * 0.5
            if nxt <= lo_dom:
                nxt = 0.5 * (a + lo_dom)
                if not nxt < a:
                    raise DomainViolation(
                        f"bracket expansion reached demand domain edge {lo_dom!r}"
                    )
            b, gb = a, ga
            a, ga = nxt, g(nxt)
            if ga >= 0:
                break
    else:
        raise NoBracket(
            f"no sign change of x(p) - c within 60 doublings from p = {initial_guess!r}"
        )

    # invariant here: a < b with g(a) >= 0 >= g(b)
    tol = 1e-12 * config.c
    p, gp = (a, ga) if abs(ga) < abs(gb) else (b, gb)
    for _ in range(200):
        if abs(gp) <= tol:
            break
        slope = demand.dx(p)
        step_ok = slope != 0.0 and math.isfinite(slope)
        if step_ok:
            cand = p - gp / slope
            step_ok = a < cand < b
        if not step_ok:
            cand = 0.5 * (a + b)
        p, gp = cand, g(cand)
        if gp > 0:
            a = p
        else:
            b = p
        if b - a <= 4 * math.ulp(max(abs(a), abs(b))):
            break
    return Equilibrium(p_star=p, residual=abs(gp))


def taylor_coefficients(config: ModelConfig, eq: Equilibrium) -> TaylorCoefficients:
    """Canonical closed-form coefficients at the equilibrium."""
    p = eq.p_star
    k = config.k
    d1 = config.demand.dx(p)
    d2 = config.demand.d2x(p)
    d3 = config.demand.d3x(p)
    return TaylorCoefficients(
        b1=0.0,
        b2=k * p * d1,
        b3=0.0,
        b4=0.5 * k * d1,
        b5=0.5 * k * p * d2,
        b6=0.0,
        b7=0.0,
        b8=k * d2 / 6.0,
        b9=k * p * d3 / 6.0,
        p_star=p,
    )


def numeric_taylor_oracle(config: ModelConfig, eq: Equilibrium) -> TaylorCoefficients:
    """Direct Taylor monomial coefficients of F(u, v) by finite differences.

    F(u, v) = k*(u + p*)*(x(v + p*) - c); the returned b_i are the exact
    coefficients of u^i v^j in its expansion at the origin (b4 is the uv
    coefficient, b8 the uv^2 coefficient, etc.). Reporting-only: the verify
    command compares these against the canonical closed forms.
    """
    p_star = eq.p_star
    k = config.k
    c = config.c
    demand = config.demand

    def F(u: float, v: float) -> float:
        return k * (u + p_star) * (demand.x(v + p_star) - c)

    def F_u(u: float) -> float:
        return F(u, 0.0)

    def F_v(v: float) -> float:
        return F(0.0, v)

    # probe scale: stay well inside the demand domain around p*
    room = p_star - demand.lo
    if math.isfinite(demand.hi):
        room = min(room, demand.hi - p_star)
    if room <= 0:
        raise DomainViolation(f"equilibrium {p_star!r} at the demand domain edge")
    s = 0.25 * min(p_star, room)
    # u probes never touch the demand curve, so u uses the same scale for
    # symmetry; v probes are clamped by the domain via the s choice, and the
    # widest univariate stencil reaches 2h
    sv = s
    su = s

    b1 = numdiff.derivative(F_u, 0.0, 1, h0=su)
    b3 = 0.5 * numdiff.derivative(F_u, 0.0, 2, h0=su)
    b6 = numdiff.derivative(F_u, 0.0, 3, h0=su / 2) / 6.0
    b2 = numdiff.derivative(F_v, 0.0, 1, h0=sv)
    b5 = 0.5 * numdiff.derivative(F_v, 0.0, 2, h0=sv)
    b9 = numdiff.derivative(F_v, 0.0, 3, h0=sv / 2) / 6.0
    b4 = numdiff.mixed_partial(F, 1, 1, su, sv)
    b7 = 0.5 * numdiff.mixed_partial(F, 2, 1, su, sv)
    b8 = 0.5 * numdiff.mixed_partial(F, 1, 2, su, sv)
    return TaylorCoefficients(
        b1=b1, b2=b2, b3=b3, b4=b4, b5=b5, b6=b6, b7=b7, b8=b8, b9=b9, p_star=p_star
    )
