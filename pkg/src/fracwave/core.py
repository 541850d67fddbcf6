"""Shared numeric primitives: the gamma function, validated fractional orders,
and tolerance pairs used across the package."""

from __future__ import annotations

import math
from dataclasses import dataclass


class DomainError(ValueError):
    """Raised when an argument lies outside the mathematical domain of an operation."""


# Lanczos approximation, g = 7, 9 coefficients.  Relative error is below 1e-14
# for positive real arguments, comfortably inside the 1e-13 contract on (0, 30].
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_SQRT_TWO_PI = math.sqrt(2.0 * math.pi)


def gamma(z: float) -> float:
    """Gamma function for positive real arguments.

    Uses a Lanczos rational approximation; arguments below 0.5 are lifted
    through the recurrence gamma(z) = gamma(z + 1) / z, so no reflection
    formula is needed.
    """
    if not math.isfinite(z) or z <= 0.0:
        raise DomainError(f"gamma requires a finite argument > 0, got {z!r}")
    if z < 0.5:
        return gamma(z + 1.0) / z
    zz = z - 1.0
    acc = _LANCZOS_COEF[0]
    for i, coef in enumerate(_LANCZOS_COEF[1:], start=1):
        acc += coef / (zz + i)
    t = zz + _LANCZOS_G + 0.5
    result = _SQRT_TWO_PI * t ** (zz + 0.5) * math.exp(-t) * acc
    if not math.isfinite(result):
        raise DomainError(f"gamma({z!r}) overflows a double")
    return result


@dataclass(frozen=True)
class FractionalOrder:
    """Order alpha of a fractional operator, restricted to 0 < alpha <= 1.

    alpha is stored as the exact binary double supplied by the caller, so the
    classical limit can be tested with ``alpha == 1.0`` rather than within an
    epsilon.
    """

    alpha: float

    def __post_init__(self) -> None:
        a = self.alpha
        if not (isinstance(a, (int, float)) and math.isfinite(a)) or not 0.0 < a <= 1.0:
            raise DomainError(f"fractional order must satisfy 0 < alpha <= 1, got {a!r}")
        object.__setattr__(self, "alpha", float(a))

    @property
    def is_classical(self) -> bool:
        return self.alpha == 1.0


def as_order(order: FractionalOrder | float) -> FractionalOrder:
    """Coerce a bare float into a validated FractionalOrder."""
    if isinstance(order, FractionalOrder):
        return order
    return FractionalOrder(order)


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative tolerance pair; at least one component must be positive."""

    abs_tol: float = 1e-10
    rel_tol: float = 0.0

    def __post_init__(self) -> None:
        if self.abs_tol < 0.0 or self.rel_tol < 0.0:
            raise DomainError("tolerances must be non-negative")
        if self.abs_tol == 0.0 and self.rel_tol == 0.0:
            raise DomainError("abs_tol and rel_tol cannot both be zero")

    def bound(self, scale: float) -> float:
        """Allowed deviation for a quantity of the given magnitude."""
        return self.abs_tol + self.rel_tol * abs(scale)


def euler_power_coefficient(beta: float, order: FractionalOrder | float) -> float:
    """Coefficient gamma(beta+1)/gamma(beta+1-alpha) of the power rule for
    fractional differentiation of x**beta.

    Requires beta + 1 - alpha > 0 so both gamma arguments are positive.
    """
    alpha = as_order(order).alpha
    if not math.isfinite(beta) or beta <= -1.0:
        raise DomainError(f"power-rule exponent must be > -1, got {beta!r}")
    if beta + 1.0 - alpha <= 0.0:
        raise DomainError(
            f"power rule undefined for beta={beta!r}, alpha={alpha!r}: "
            "beta + 1 - alpha must be positive"
        )
    return gamma(beta + 1.0) / gamma(beta + 1.0 - alpha)
