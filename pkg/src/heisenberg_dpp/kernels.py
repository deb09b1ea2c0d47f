"""Correlation kernels for the extended Heisenberg family on C^D.

The base process has kernel exp(x . conj(y)) against the Gaussian
reference measure exp(-|x|^2)/pi^D; the level-m member multiplies in one
Laguerre factor per coordinate.  Determinants of these kernels give the
n-point correlation functions.

Correlations are always computed from the hermitized (gauge-equivalent)
kernel, whose exponent has nonpositive real part; it is bounded by
1/pi^D, so determinant evaluation never overflows no matter where the
points sit.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .exceptions import InternalConsistencyError
from .specfun import laguerre, laguerre_log

MAX_CORRELATION_POINTS = 12

# exp(re) underflows to zero well above this; bailing out early avoids
# 0 * huge-Laguerre-factor = NaN for absurdly distant point pairs.
_EXP_UNDERFLOW_CUTOFF = -800.0


@dataclass(frozen=True)
class ComplexPoint:
    """A point of C^D stored as paired real and imaginary coordinates."""

    re: tuple[float, ...]
    im: tuple[float, ...]

    def __post_init__(self):
        re = tuple(float(v) for v in self.re)
        im = tuple(float(v) for v in self.im)
        if len(re) != len(im) or not re:
            raise ValueError("re and im must be equal-length, nonempty tuples")
        if not all(map(math.isfinite, re + im)):
            raise ValueError("coordinates must be finite")
        object.__setattr__(self, "re", re)
        object.__setattr__(self, "im", im)

    @classmethod
    def from_complex(cls, values: Sequence[complex]) -> "ComplexPoint":
        vals = [complex(v) for v in values]
        return cls(tuple(v.real for v in vals), tuple(v.imag for v in vals))

    def to_complex(self) -> np.ndarray:
        return np.array(self.re, dtype=float) + 1j * np.array(self.im, dtype=float)

    @property
    def dimension(self) -> int:
        return len(self.re)


@dataclass(frozen=True)
class KernelSpec:
    """Which member of the family: complex dimension and Landau levels."""

    dimension: int
    level: tuple[int, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.dimension != int(self.dimension) or self.dimension < 1:
            raise ValueError(f"dimension must be an integer >= 1, got {self.dimension}")
        object.__setattr__(self, "dimension", int(self.dimension))
        level = self.level
        if level is None:
            level = (0,) * self.dimension
        level = tuple(int(m) for m in level)
        if len(level) != self.dimension:
            raise ValueError(
                f"level needs {self.dimension} entries, got {len(level)}"
            )
        if any(m < 0 for m in level):
            raise ValueError(f"levels must be >= 0, got {level}")
        object.__setattr__(self, "level", level)


def _as_point(p, dimension: int) -> ComplexPoint:
    if not isinstance(p, ComplexPoint):
        p = ComplexPoint.from_complex(p)
    if p.dimension != dimension:
        raise ValueError(f"point has dimension {p.dimension}, spec wants {dimension}")
    return p


def hermitian_inner(x: ComplexPoint, y: ComplexPoint) -> complex:
    """Hermitian inner product x . conj(y) (conjugation in the second slot)."""
    if x.dimension != y.dimension:
        raise ValueError("points live in different dimensions")
    re = 0.0
    im = 0.0
    for xr, xi, yr, yi in zip(x.re, x.im, y.re, y.im):
        re += xr * yr + xi * yi
        im += xi * yr - xr * yi
    return complex(re, im)


def kernel_eval(spec: KernelSpec, x, y) -> complex:
    """Raw kernel exp(x . conj(y)) * prod_l L_{m_l}(|x_l - y_l|^2).

    This form grows like exp(|x||y|); arguments whose inner product would
    overflow the double exponent range raise OverflowError.  Use
    :func:`hermitized_kernel` for a bounded, gauge-equivalent variant.
    """
    x = _as_point(x, spec.dimension)
    y = _as_point(y, spec.dimension)
    inner = hermitian_inner(x, y)
    if inner.real > 709.0:
        raise OverflowError(
            f"exp({inner.real:.6g}) overflows; use hermitized_kernel instead"
        )
    value = cmath.exp(inner)
    for l, m in enumerate(spec.level):
        dr = x.re[l] - y.re[l]
        di = x.im[l] - y.im[l]
        value *= laguerre(m, 0.0, dr * dr + di * di)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise OverflowError("kernel_eval overflows double range")
    return value


def hermitized_kernel(spec: KernelSpec, x, y) -> complex:
    """Gauge-equivalent bounded kernel used for all correlation work.

    Multiplying the raw kernel by exp(-(|x|^2+|y|^2)/2)/pi^D leaves every
    determinant (hence every correlation function) unchanged and makes the
    exponent's real part -|x - y|^2/2 <= 0.  The diagonal is exactly
    1/pi^D, the one-point intensity.
    """
    x = _as_point(x, spec.dimension)
    y = _as_point(y, spec.dimension)
    inner = hermitian_inner(x, y)
    norm_x = sum(r * r + i * i for r, i in zip(x.re, x.im))
    norm_y = sum(r * r + i * i for r, i in zip(y.re, y.im))
    exponent = complex(inner.real - 0.5 * (norm_x + norm_y), inner.imag)
    if exponent.real < _EXP_UNDERFLOW_CUTOFF:
        return 0.0 + 0.0j
    value = cmath.exp(exponent) / math.pi ** spec.dimension
    for l, m in enumerate(spec.level):
        dr = x.re[l] - y.re[l]
        di = x.im[l] - y.im[l]
        value *= laguerre(m, 0.0, dr * dr + di * di)
    return value


def gauge_transform(
    kernel: Callable[[ComplexPoint, ComplexPoint], complex],
    f: Callable[[ComplexPoint], complex],
) -> Callable[[ComplexPoint, ComplexPoint], complex]:
    """Conjugate a kernel by a nonvanishing function: (x, y) -> f(x) K(x,y) / f(y).

    All determinants built from point subsets are invariant under this
    transformation, which is the property the tests exercise.
    """

    def transformed(x: ComplexPoint, y: ComplexPoint) -> complex:
        return f(x) * kernel(x, y) / f(y)

    return transformed


def _det_with_check(matrix: np.ndarray, imag_tol: float) -> float:
    det = complex(np.linalg.det(matrix))
    if abs(det.imag) > imag_tol:
        raise InternalConsistencyError(
            f"determinant imaginary part {det.imag:.3e} exceeds {imag_tol:.1e}"
        )
    return det.real


def correlation_det(
    kernel: Callable[[ComplexPoint, ComplexPoint], complex],
    points: Sequence[ComplexPoint],
    imag_tol: float = 1e-8,
) -> float:
    """det[kernel(x_i, x_j)] for an arbitrary kernel callable."""
    n = len(points)
    matrix = np.empty((n, n), dtype=complex)
    for i, p in enumerate(points):
        for j, q in enumerate(points):
            matrix[i, j] = kernel(p, q)
    return _det_with_check(matrix, imag_tol)


@dataclass(frozen=True)
class CorrelationMatrix:
    """Hermitized kernel matrix with its structural invariants enforced."""

    entries: np.ndarray
    dimension: int

    def __post_init__(self):
        m = self.entries
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("correlation matrix must be square")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise InternalConsistencyError("kernel matrix is not Hermitian")
        intensity = 1.0 / math.pi ** self.dimension
        if np.max(np.abs(np.diag(m) - intensity)) > 1e-12 * intensity:
            raise InternalConsistencyError(
                "kernel matrix diagonal deviates from the one-point intensity"
            )


def correlation_matrix(spec: KernelSpec, points: Sequence) -> CorrelationMatrix:
    pts = [_as_point(p, spec.dimension) for p in points]
    n = len(pts)
    entries = np.empty((n, n), dtype=complex)
    for i in range(n):
        entries[i, i] = hermitized_kernel(spec, pts[i], pts[i])
        for j in range(i + 1, n):
            entries[i, j] = hermitized_kernel(spec, pts[i], pts[j])
            entries[j, i] = entries[i, j].conjugate()
    return CorrelationMatrix(entries=entries, dimension=spec.dimension)


def correlation_function(
    spec: KernelSpec,
    points: Sequence,
    max_points: int = MAX_CORRELATION_POINTS,
    imag_tol: float = 1e-8,
) -> float:
    """n-point correlation rho_n(x_1..x_n) = det of the hermitized kernel matrix.

    Capped at a small n because the determinant route loses accuracy and
    meaning well before large point counts become interesting.
    """
    if not points:
        raise ValueError("need at least one point")
    if len(points) > max_points:
        raise ValueError(f"n = {len(points)} exceeds the cap of {max_points}")
    matrix = correlation_matrix(spec, points)
    return _det_with_check(matrix.entries, imag_tol)


def kernel_series_partial(m: int, x: complex, y: complex, n_terms: int) -> complex:
    """Partial sum (n = 0..n_terms) of the one-coordinate eigenfunction series.

    The full series telescopes to exp(x conj(y)) L_m(|x - y|^2) / m!.
    Terms below the diagonal (n < m) are rewritten with the flipped
    Laguerre index so no negative powers appear; all magnitudes accumulate
    in log form so extreme arguments cannot overflow.
    """
    if m != int(m) or m < 0:
        raise ValueError(f"m must be an integer >= 0, got {m}")
    if n_terms != int(n_terms) or n_terms < 0:
        raise ValueError(f"n_terms must be an integer >= 0, got {n_terms}")
    m = int(m)
    x = complex(x)
    y = complex(y)
    w = x * y.conjugate()
    abs_w = abs(w)
    arg_w = cmath.phase(w) if abs_w > 0.0 else 0.0
    sq_x = abs(x) ** 2
    sq_y = abs(y) ** 2
    log_m_fact = math.lgamma(m + 1)

    total = 0.0 + 0.0j
    for n in range(int(n_terms) + 1):
        k = n - m
        if k == 0:
            power_log, power_arg = 0.0, 0.0
        elif abs_w == 0.0:
            continue
        else:
            power_log = abs(k) * math.log(abs_w)
            power_arg = k * arg_w
        if k >= 0:
            la, sa = laguerre_log(m, float(k), sq_x)
            lb, sb = laguerre_log(m, float(k), sq_y)
            log_mag = la + lb + power_log - math.lgamma(n + 1)
        else:
            la, sa = laguerre_log(n, float(-k), sq_x)
            lb, sb = laguerre_log(n, float(-k), sq_y)
            log_mag = la + lb + power_log + math.lgamma(n + 1) - 2.0 * log_m_fact
        sign = sa * sb
        if sign == 0.0 or log_mag == -math.inf:
            continue
        if log_mag > 700.0:
            raise OverflowError("series term overflows double range")
        total += sign * math.exp(log_mag) * cmath.exp(1j * power_arg)
    return total
