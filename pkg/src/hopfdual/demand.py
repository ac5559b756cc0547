"""Rate-demand curves x(p): price in, sending rate out.

Each family exposes the curve and its first three derivatives on an open
domain. Demand must be positive and strictly decreasing wherever it is
evaluated; the analysis modules rely on x'(p*) < 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from . import numdiff
from .errors import DomainViolation, ValidationError


@dataclass(frozen=True)
class DemandFunction:
    """Base demand curve. Subclasses implement x and its derivatives.

    Attributes
    ----------
    name : str
        Human-readable family name used in reports.
    lo, hi : float
        Open domain bounds (lo, hi) for the price argument.
    """

    name: str = field(init=False, default="demand")
    lo: float = field(init=False, default=0.0)
    hi: float = field(init=False, default=math.inf)

    def _check(self, p: float) -> None:
        if not (self.lo < p < self.hi):
            raise DomainViolation(
                f"price {p!r} outside demand domain ({self.lo!r}, {self.hi!r})"
            )

    def x(self, p: float) -> float:
        raise NotImplementedError

    def dx(self, p: float) -> float:
        raise NotImplementedError

    def d2x(self, p: float) -> float:
        raise NotImplementedError

    def d3x(self, p: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class Reciprocal(DemandFunction):
    """x(p) = w / p on (0, inf); w is the source's weight."""

    w: float = 1.0

    def __post_init__(self):
        if self.w <= 0:
            raise ValidationError(f"reciprocal weight must be positive, got {self.w!r}")
        object.__setattr__(self, "name", f"reciprocal(w={self.w:g})")

    def x(self, p: float) -> float:
        self._check(p)
        return self.w / p

    def dx(self, p: float) -> float:
        self._check(p)
        return -self.w / p**2

    def d2x(self, p: float) -> float:
        self._check(p)
        return 2.0 * self.w / p**3

    def d3x(self, p: float) -> float:
        self._check(p)
        return -6.0 * self.w / p**4


@dataclass(frozen=True)
class PowerLaw(DemandFunction):
    """x(p) = (w / p)^(1/alpha) on (0, inf): weighted alpha-fair demand."""

    w: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.w <= 0:
            raise ValidationError(f"power-law weight must be positive, got {self.w!r}")
        if self.alpha <= 0:
            raise ValidationError(f"power-law alpha must be positive, got {self.alpha!r}")
        object.__setattr__(self, "name", f"powerlaw(w={self.w:g}, alpha={self.alpha:g})")

    def x(self, p: float) -> float:
        self._check(p)
        return (self.w / p) ** (1.0 / self.alpha)

    def dx(self, p: float) -> float:
        b = 1.0 / self.alpha
        return -b * self.x(p) / p

    def d2x(self, p: float) -> float:
        b = 1.0 / self.alpha
        return b * (b + 1.0) * self.x(p) / p**2

    def d3x(self, p: float) -> float:
        b = 1.0 / self.alpha
        return -b * (b + 1.0) * (b + 2.0) * self.x(p) / p**3


@dataclass(frozen=True)
class NumericWrapper(DemandFunction):
    """Wraps an arbitrary scalar demand callable on an explicit open domain.

    Derivatives come from Ridders-extrapolated central differences, so the
    wrapped function must be smooth; accuracy is typically far better than
    the 1e-5 tolerance the coefficient oracle asks for.
    """

    func: Callable[[float], float] = None  # type: ignore[assignment]
    domain_lo: float = 0.0
    domain_hi: float = math.inf
    label: str = "numeric"

    def __post_init__(self):
        if self.func is None:
            raise ValidationError("NumericWrapper requires a demand callable")
        if not self.domain_lo < self.domain_hi:
            raise ValidationError(
                f"empty demand domain ({self.domain_lo!r}, {self.domain_hi!r})"
            )
        object.__setattr__(self, "name", self.label)
        object.__setattr__(self, "lo", self.domain_lo)
        object.__setattr__(self, "hi", self.domain_hi)

    def x(self, p: float) -> float:
        self._check(p)
        return self.func(p)

    def _numeric(self, p: float, order: int) -> float:
        self._check(p)
        hi = self.hi if math.isfinite(self.hi) else None
        return numdiff.derivative(self.func, p, order, lo=self.lo, hi=hi)

    def dx(self, p: float) -> float:
        return self._numeric(p, 1)

    def d2x(self, p: float) -> float:
        return self._numeric(p, 2)

    def d3x(self, p: float) -> float:
        return self._numeric(p, 3)


FAMILIES = {"reciprocal", "powerlaw"}


def make_demand(family: str, w: float = 1.0, alpha: float | None = None) -> DemandFunction:
    """Build a demand function from config-file values.

    Only the closed-form families are reachable from text configuration;
    NumericWrapper needs a Python callable and is library-only.
    """
    if family == "reciprocal":
        return Reciprocal(w=w)
    if family == "powerlaw":
        if alpha is None:
            raise ValidationError("powerlaw demand requires alpha")
        return PowerLaw(w=w, alpha=alpha)
    raise ValidationError(
        f"unknown demand family {family!r}; expected one of {sorted(FAMILIES)}"
    )
