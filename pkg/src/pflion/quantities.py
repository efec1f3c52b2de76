"""Scalar quantities carrying a dimension tag and a 1-sigma uncertainty.

Uncertainties are propagated to first order assuming uncorrelated inputs.
Dimensions are exponent vectors over three base tags (metre, second, watt),
which is all the photon-budget arithmetic needs; decibels are a separate
logarithmic tag that only supports addition and scaling.

>>> a = Quantity(3.2, 0.1, DB) + Quantity(43.2, 0.1, DB)
>>> round(a.value, 6), round(a.sigma, 6)
(46.4, 0.141421)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

__all__ = [
    "Dimension",
    "DimensionError",
    "Quantity",
    "DIMENSIONLESS",
    "LENGTH",
    "TIME",
    "POWER",
    "RATE",
    "ENERGY",
    "DB",
    "q_add",
    "q_sub",
    "q_mul",
    "q_div",
    "q_sum",
    "q_prod",
    "exact",
    "db_to_linear",
    "linear_to_db",
]


class DimensionError(ValueError):
    """Raised when an operation mixes incompatible dimensions."""


@dataclass(frozen=True)
class Dimension:
    """Exponents over (m, s, W), or the logarithmic decibel tag."""

    m: int = 0
    s: int = 0
    W: int = 0
    log_db: bool = False

    def __mul__(self, other: "Dimension") -> "Dimension":
        if self.log_db or other.log_db:
            if other == DIMENSIONLESS:
                return self
            if self == DIMENSIONLESS:
                return other
            raise DimensionError("dB quantities can only be scaled by dimensionless values")
        return Dimension(self.m + other.m, self.s + other.s, self.W + other.W)

    def __truediv__(self, other: "Dimension") -> "Dimension":
        if other.log_db:
            raise DimensionError("cannot divide by a dB quantity")
        return self * Dimension(-other.m, -other.s, -other.W)

    @property
    def symbol(self) -> str:
        if self.log_db:
            return "dB"
        if (self.m, self.s, self.W) == (0, 0, 0):
            return "1"
        if (self.m, self.s, self.W) == (0, -1, 0):
            return "1/s"
        parts = []
        for name, exp in (("W", self.W), ("m", self.m), ("s", self.s)):
            if exp == 1:
                parts.append(name)
            elif exp:
                parts.append(f"{name}^{exp}")
        return " ".join(parts)

    def __str__(self) -> str:
        return self.symbol


DIMENSIONLESS = Dimension()
LENGTH = Dimension(m=1)
TIME = Dimension(s=1)
POWER = Dimension(W=1)
RATE = Dimension(s=-1)
ENERGY = Dimension(W=1, s=1)
DB = Dimension(log_db=True)

_BY_NAME = {
    "1": DIMENSIONLESS,
    "dimensionless": DIMENSIONLESS,
    "": DIMENSIONLESS,
    "m": LENGTH,
    "length": LENGTH,
    "s": TIME,
    "time": TIME,
    "W": POWER,
    "power": POWER,
    "1/s": RATE,
    "rate": RATE,
    "J": ENERGY,
    "dB": DB,
}


def dimension_from_name(name: str) -> Dimension:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise DimensionError(f"unknown dimension tag {name!r}") from None


@dataclass(frozen=True)
class Quantity:
    """A value with a 1-sigma uncertainty and a dimension.

    Parameters
    ----------
    value : float
        Central value in SI units.
    sigma : float
        Standard uncertainty, same units as `value`. Must be >= 0.
    dim : Dimension or str
        Dimension tag.
    """

    value: float
    sigma: float = 0.0
    dim: Dimension = DIMENSIONLESS

    def __post_init__(self):
        if isinstance(self.dim, str):
            object.__setattr__(self, "dim", dimension_from_name(self.dim))
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "sigma", float(self.sigma))
        if not self.sigma >= 0.0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")

    @property
    def rel_sigma(self) -> float:
        if self.value == 0.0:
            return math.inf if self.sigma else 0.0
        return self.sigma / abs(self.value)

    def with_sigma(self, sigma: float) -> "Quantity":
        return Quantity(self.value, sigma, self.dim)

    def __add__(self, other):
        return q_add(self, _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return q_sub(self, _coerce(other))

    def __rsub__(self, other):
        return q_sub(_coerce(other), self)

    def __mul__(self, other):
        return q_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return q_div(self, _coerce(other))

    def __rtruediv__(self, other):
        return q_div(_coerce(other), self)

    def __neg__(self):
        return Quantity(-self.value, self.sigma, self.dim)

    def __format__(self, spec):
        spec = spec or "g"
        return f"{self.value:{spec}} ± {self.sigma:{spec}} {self.dim.symbol}"

    def __str__(self):
        return format(self)


def _coerce(x) -> Quantity:
    if isinstance(x, Quantity):
        return x
    return Quantity(float(x), 0.0, DIMENSIONLESS)


def exact(value: float, dim=DIMENSIONLESS) -> Quantity:
    """A zero-uncertainty quantity."""
    return Quantity(value, 0.0, dim)


def q_add(a: Quantity, b: Quantity) -> Quantity:
    if a.dim != b.dim:
        raise DimensionError(f"cannot add {a.dim} and {b.dim}")
    return Quantity(a.value + b.value, math.hypot(a.sigma, b.sigma), a.dim)


def q_sub(a: Quantity, b: Quantity) -> Quantity:
    return q_add(a, -b)


def q_mul(a: Quantity, b: Quantity) -> Quantity:
    # the linearized form equals the relative-quadrature form when both values
    # are nonzero and stays defined when one of them is zero
    sigma = math.hypot(a.value * b.sigma, b.value * a.sigma)
    return Quantity(a.value * b.value, sigma, a.dim * b.dim)


def q_div(a: Quantity, b: Quantity) -> Quantity:
    if b.value == 0.0:
        raise ZeroDivisionError("division by a quantity with zero value")
    value = a.value / b.value
    sigma = math.hypot(a.sigma / b.value, a.value * b.sigma / b.value**2)
    return Quantity(value, sigma, a.dim / b.dim)


def q_sum(items: Iterable[Quantity]) -> Quantity:
    items = list(items)
    if not items:
        raise ValueError("empty sum")
    out = items[0]
    for q in items[1:]:
        out = q_add(out, q)
    return out


def q_prod(items: Iterable[Quantity]) -> Quantity:
    out = exact(1.0)
    for q in items:
        out = q_mul(out, q)
    return out


def db_to_linear(a: Quantity) -> Quantity:
    """Convert an attenuation in dB to a dimensionless power factor 10**(-dB/10)."""
    if a.dim != DB:
        raise DimensionError(f"expected a dB quantity, got {a.dim}")
    value = 10.0 ** (-a.value / 10.0)
    return Quantity(value, value * math.log(10.0) / 10.0 * a.sigma, DIMENSIONLESS)


def linear_to_db(a: Quantity) -> Quantity:
    if a.dim != DIMENSIONLESS:
        raise DimensionError(f"expected a dimensionless factor, got {a.dim}")
    if a.value <= 0.0:
        raise ValueError("attenuation factor must be positive")
    return Quantity(-10.0 * math.log10(a.value), 10.0 / math.log(10.0) * a.rel_sigma, DB)
