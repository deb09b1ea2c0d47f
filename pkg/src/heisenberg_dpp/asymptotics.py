"""Large-radius expansions of the ball variance-to-mean ratio.

The ratio for the level-zero process in dimension D admits

    Var/mean ~ (D / (sqrt(pi) R)) * sum_k (-1)^k c_k R^(-2k),

with c_0 = 1 and c_k built from the product coefficients alpha_k(D)
below.  The same alpha_k drive the large-argument expansion of the
scaled modified Bessel functions entering the closed form, which gives a
second, independent derivation; ``bessel_asymptotic`` exposes that route
so the two can be cross-checked term by term.

Asymptotic series are not convergent: evaluation truncates at the
smallest term and reports the first omitted term as the error bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .specfun import SpecFunResult

MAX_SERIES_ORDER = 8


def alpha_coefficient(k: int, dimension: int) -> int:
    """Product coefficient alpha_k(D) of the ratio expansion.

    alpha_0 = 1 and alpha_k(D) = prod_{l=-k+1}^{k} (2D + 2l - 1), an exact
    integer: alpha_1(1) = 3, alpha_2(1) = -15 (the factor at l = -1 is
    negative for D = 1).
    """
    if k != int(k) or k < 0:
        raise ValueError(f"k must be an integer >= 0, got {k}")
    if dimension != int(dimension) or dimension < 1:
        raise ValueError(f"dimension must be an integer >= 1, got {dimension}")
    k, dimension = int(k), int(dimension)
    out = 1
    for l in range(-k + 1, k + 1):
        out *= 2 * dimension + 2 * l - 1
    return out


def series_coefficient(k: int, dimension: int) -> Fraction:
    """Signed coefficient c_k = (-1)^k alpha_k(D) / ((2k+1) k! 16^k), exact."""
    num = (-1) ** k * alpha_coefficient(k, dimension)
    return Fraction(num, (2 * k + 1) * math.factorial(k) * 16**k)


@dataclass(frozen=True)
class AsymptoticSeries:
    """Truncated ratio expansion for one dimension, coefficients exact."""

    dimension: int
    coefficients: tuple[Fraction, ...]

    @classmethod
    def for_dimension(
        cls, dimension: int, order: int = MAX_SERIES_ORDER
    ) -> "AsymptoticSeries":
        if order != int(order) or order < 0 or order > MAX_SERIES_ORDER:
            raise ValueError(
                f"order must be an integer in [0, {MAX_SERIES_ORDER}], got {order}"
            )
        coeffs = tuple(
            series_coefficient(k, dimension) for k in range(int(order) + 1)
        )
        return cls(dimension=dimension, coefficients=coeffs)

    def evaluate(self, radius: float) -> SpecFunResult:
        """Evaluate at radius with truncation at the smallest term.

        Returns the partial sum times the (D / sqrt(pi) R) prefactor and
        bounds the error by the prefactor times the first term left out
        (the optimal-truncation rule for alternating asymptotic series).
        """
        if not (radius > 0.0 and math.isfinite(radius)):
            raise ValueError(f"radius must be positive, got {radius}")
        prefactor = self.dimension / (math.sqrt(math.pi) * radius)
        rr = radius * radius
        terms = []
        scale = 1.0
        for c in self.coefficients:
            terms.append(float(c) * scale)
            scale /= rr
        acc = terms[0]
        omitted = 0.0
        for k in range(1, len(terms)):
            if abs(terms[k]) >= abs(terms[k - 1]):
                omitted = abs(terms[k])  # series started diverging
                break
            acc += terms[k]
        else:
            # all terms retained: the first omitted term is the next
            # coefficient of the exact product formula, scale = R^-2(K+1)
            nxt = series_coefficient(len(self.coefficients), self.dimension)
            omitted = abs(float(nxt)) * scale
        return SpecFunResult(prefactor * acc, prefactor * omitted)


def ratio_series_eval(
    dimension: int, radius: float, order: int = MAX_SERIES_ORDER
) -> SpecFunResult:
    """Asymptotic Var/mean for the level-zero ball at large radius."""
    return AsymptoticSeries.for_dimension(dimension, order).evaluate(radius)


def bessel_asymptotic(nu: int, x: float, order: int = MAX_SERIES_ORDER) -> SpecFunResult:
    """Large-argument expansion of e^(-x) I_nu(x), with first-omitted bound.

    e^(-x) I_nu(x) ~ (2 pi x)^(-1/2) sum_k (-1)^k u_k(nu) x^(-k), where
    u_k = prod_{j=1..k} (4 nu^2 - (2j-1)^2) / (k! 8^k).  Independent of the
    recurrence-based evaluation in specfun; used to re-derive the ratio
    expansion coefficients from the Bessel side.
    """
    if nu != int(nu) or nu < 0:
        raise ValueError(f"nu must be an integer >= 0, got {nu}")
    if not (x > 0.0 and math.isfinite(x)):
        raise ValueError(f"x must be positive, got {x}")
    if order != int(order) or order < 0 or order > MAX_SERIES_ORDER:
        raise ValueError(
            f"order must be an integer in [0, {MAX_SERIES_ORDER}], got {order}"
        )
    nu, order = int(nu), int(order)
    four_nu_sq = 4 * nu * nu
    prefactor = 1.0 / math.sqrt(2.0 * math.pi * x)
    term = 1.0
    acc = term
    omitted = None
    prev = abs(term)
    for k in range(1, order + 1):
        term *= -(four_nu_sq - (2 * k - 1) ** 2) / (8.0 * k * x)
        if abs(term) >= prev:
            omitted = abs(term)
            break
        acc += term
        prev = abs(term)
    if omitted is None:
        k = order + 1
        omitted = abs(term * (four_nu_sq - (2 * k - 1) ** 2) / (8.0 * k * x))
    return SpecFunResult(prefactor * acc, prefactor * omitted)


def ratio_asymptotic_from_bessel(
    dimension: int, radius: float, order: int = MAX_SERIES_ORDER
) -> SpecFunResult:
    """Second route to the asymptotic ratio: sum the Bessel expansions.

    Var/mean = e^(-2R^2) sum_{n<D} [I_n + I_{n+1}](2R^2) evaluated with the
    asymptotic Bessel expansion instead of the recurrences.  Agreement of
    this with ratio_series_eval to the order of the shared truncation is
    the coefficient-level consistency check between the two expansions.
    """
    if dimension != int(dimension) or dimension < 1:
        raise ValueError(f"dimension must be an integer >= 1, got {dimension}")
    if not (radius > 0.0 and math.isfinite(radius)):
        raise ValueError(f"radius must be positive, got {radius}")
    x = 2.0 * radius * radius
    total = 0.0
    bound = 0.0
    for n in range(int(dimension)):
        lo = bessel_asymptotic(n, x, order)
        hi = bessel_asymptotic(n + 1, x, order)
        total += lo.value + hi.value
        bound += lo.abs_error_bound + hi.abs_error_bound
    return SpecFunResult(total, bound)


def c_asymptote(m: int) -> float:
    """Large-level growth of the disk Class-I constant: (8 / pi^2) sqrt(m)."""
    if m != int(m) or m < 1:
        raise ValueError(f"m must be an integer >= 1, got {m}")
    return 8.0 / (math.pi * math.pi) * math.sqrt(float(m))
