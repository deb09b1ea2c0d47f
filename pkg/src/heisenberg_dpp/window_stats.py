"""Counting statistics in balls and polydisks.

Three independent routes compute the count mean and variance:

* ``closed``   - scaled-Bessel closed form for balls (level zero),
* ``integral`` - oscillatory Bessel integral for balls (level zero),
* ``spectrum`` - exact Bernoulli spectrum for polydisks (any level),
  based on the fact that the count in a polydisk equals, in distribution,
  an independent sum of Bernoulli variables indexed by the multi-index
  lattice, with per-coordinate success probabilities p_n(R, m).

The routes overlap on the disk (D = 1), where ball and polydisk coincide,
and the overlap is what the verification suite cross-checks.

The p_n are computed from the exact integer expansion of
u^(n-m) L_m^(n-m)(u)^2 into monomials paired with regularized incomplete
gamma values.  The monomial coefficients alternate in sign and grow like
binom(n, m), so the assembly runs at elevated precision (mpmath's libmp
primitives with an explicit precision argument, which keeps the
computation free of global state); the only rounding to double happens on
the finished probability.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial

import numpy as np
from mpmath import libmp

from .exceptions import (
    InternalConsistencyError,
    NumericalBudgetError,
    UnsupportedConfigurationError,
)
from .kernels import KernelSpec
from .specfun import SpecFunResult, bessel_i_scaled, bessel_j, hyp3f2_terminating

SPECTRUM_SIZE_CAP = 10_000_000
PROB_CONSISTENCY_BAND = 1e-12
ADAPTIVE_NODE_BUDGET = 200_000

# Exact coefficient convolution is kept up to this level; beyond it the
# integer coefficients become unwieldy and compensated float convolution
# takes over (accuracy degrades gracefully, documented rather than hidden).
EXACT_COEFF_MAX_LEVEL = 16


class WindowKind(enum.Enum):
    BALL = "ball"
    POLYDISK = "polydisk"


class Route(enum.Enum):
    CLOSED_FORM = "closed"
    INTEGRAL = "integral"
    SPECTRUM = "spectrum"
    MONTE_CARLO = "mc"
    CONTROL = "control"  # synthetic reference rows, not a computation route


@dataclass(frozen=True)
class Window:
    kind: WindowKind
    radius: float
    dimension: int

    def __post_init__(self):
        if not isinstance(self.kind, WindowKind):
            object.__setattr__(self, "kind", WindowKind(self.kind))
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.dimension != int(self.dimension) or self.dimension < 1:
            raise ValueError(f"dimension must be an integer >= 1, got {self.dimension}")
        object.__setattr__(self, "dimension", int(self.dimension))


@dataclass(frozen=True, eq=False)
class BernoulliSpectrum:
    """Success probabilities of the Bernoulli representation on one coordinate.

    probs[n] is the probability attached to lattice index n at this radius
    and level; tail_bound certifies that the discarded indices contribute
    at most this much to the mean (and, since p <= 1, to the sum of
    squares as well).
    """

    radius: float
    level: int
    probs: np.ndarray
    tail_bound: float

    def __post_init__(self):
        if self.tail_bound < 0.0:
            raise ValueError("tail_bound must be >= 0")
        if len(self.probs) < self.level + 1:
            raise ValueError("spectrum truncated before its own level")

    @property
    def prob_sum(self) -> float:
        return math.fsum(self.probs.tolist())

    @property
    def prob_sq_sum(self) -> float:
        return math.fsum((self.probs * self.probs).tolist())


@dataclass(frozen=True)
class MomentReport:
    mean: float
    variance: float
    ratio: float
    route: Route
    error_estimate: float


def _check_dimension(dimension: int) -> int:
    if dimension != int(dimension) or dimension < 1:
        raise ValueError(f"dimension must be an integer >= 1, got {dimension}")
    return int(dimension)


def _check_radius(radius: float) -> float:
    radius = float(radius)
    if not (radius > 0.0 and math.isfinite(radius)):
        raise ValueError(f"radius must be positive and finite, got {radius}")
    return radius


def mean_ball(dimension: int, radius: float) -> float:
    """Expected count in the ball of radius R: R^(2D) / D!."""
    dimension = _check_dimension(dimension)
    radius = _check_radius(radius)
    return radius ** (2 * dimension) / factorial(dimension)


def variance_ball_closed(dimension: int, radius: float) -> float:
    """Count variance in the ball via the scaled modified-Bessel sum.

    Var = (R^(2D)/D!) e^(-2R^2) sum_{n=0}^{D-1} [I_n(2R^2) + I_{n+1}(2R^2)],
    evaluated with e^(-x) I_nu(x) so nothing overflows through R ~ 200.
    """
    dimension = _check_dimension(dimension)
    radius = _check_radius(radius)
    x = 2.0 * radius * radius
    acc = 0.0
    for n in range(dimension):
        acc += bessel_i_scaled(n, x) + bessel_i_scaled(n + 1, x)
    return mean_ball(dimension, radius) * acc


def variance_ratio_ball(dimension: int, radius: float) -> float:
    """Var/mean for the ball window, from the closed form."""
    dimension = _check_dimension(dimension)
    radius = _check_radius(radius)
    x = 2.0 * radius * radius
    return math.fsum(
        bessel_i_scaled(n, x) + bessel_i_scaled(n + 1, x) for n in range(dimension)
    )


# ---------------------------------------------------------------------------
# Integral route


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _panel_gl(f, a: float, b: float) -> float:
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    return half * math.fsum(
        w * f(mid + half * t) for t, w in zip(_GL_NODES, _GL_WEIGHTS)
    )


def _adaptive_panel(f, a, b, tol, depth=0, nodes=None):
    if nodes is None:
        nodes = [ADAPTIVE_NODE_BUDGET]  # cap on bisection nodes per call
    nodes[0] -= 1
    whole = _panel_gl(f, a, b)
    mid = 0.5 * (a + b)
    left = _panel_gl(f, a, mid)
    right = _panel_gl(f, mid, b)
    err = abs(left + right - whole)
    if err < tol or depth >= 48 or nodes[0] <= 0:
        return left + right, err
    lv, le = _adaptive_panel(f, a, mid, 0.5 * tol, depth + 1, nodes)
    rv, re_ = _adaptive_panel(f, mid, b, 0.5 * tol, depth + 1, nodes)
    return lv + rv, le + re_


def _neville_at_zero(xs, ys):
    """Polynomial extrapolation of (xs, ys) to x = 0 with an error estimate."""
    n = len(xs)
    tableau = list(ys)
    last = tableau[-1]
    for level in range(1, n):
        for i in range(n - level):
            tableau[i] = (
                tableau[i + 1] * xs[i] - tableau[i] * xs[i + level]
            ) / (xs[i] - xs[i + level])
        correction = abs(tableau[0] - last)
        last = tableau[0]
    return tableau[0], correction


def _oscillatory_tail(f, k0: float, radius: float, order: int, tol: float):
    """Integral of f over [k0, inf) for an integrand oscillating like J(kR)^2.

    Integrates panel-by-panel between consecutive (asymptotic) zeros of
    J_order(k R), then removes the remaining tail by averaging partial
    sums over adjacent panels (damping the alternating component) and
    extrapolating the averaged sums to 1/k -> 0 with a Neville tableau.
    """
    h = math.pi / radius
    # Align panel boundaries with the McMahon zeros of J_order(kR).
    offset = 0.5 * order - 0.25
    j0 = max(1, math.ceil(k0 * radius / math.pi - offset + 1e-9))
    first_edge = (j0 + offset) * math.pi / radius
    stub, stub_err = _adaptive_panel(f, k0, first_edge, 0.1 * tol)

    partial_sums: list[float] = []
    edges: list[float] = []
    acc = 0.0
    edge = first_edge
    best = None
    for block in range(600):
        for _ in range(16):
            nxt = edge + h
            acc += _panel_gl(f, edge, nxt)
            edge = nxt
            partial_sums.append(acc)
            edges.append(edge)
        if len(partial_sums) < 48 or edges[-1] < 24.0:
            continue
        sums = partial_sums
        mids = edges
        for _ in range(3):  # adjacent averaging kills the alternating part
            sums = [0.5 * (a + b) for a, b in zip(sums, sums[1:])]
            mids = [0.5 * (a + b) for a, b in zip(mids, mids[1:])]
        anchors = []
        idx = len(sums) - 1
        while idx >= 0 and len(anchors) < 9:
            anchors.append(idx)
            idx = int(idx / 1.45) - 4
        anchors = anchors[::-1]
        xs = [1.0 / mids[i] for i in anchors]
        ys = [sums[i] for i in anchors]
        value, err = _neville_at_zero(xs, ys)
        best = (stub + value, stub_err + err)
        if best[1] <= tol:
            return best
    if best is None:
        best = (stub + partial_sums[-1], abs(partial_sums[-1]))
    raise NumericalBudgetError(
        f"oscillatory tail stalled at error {best[1]:.3e} (target {tol:.3e})",
        best_estimate=best[0],
        achieved_error=best[1],
    )


def variance_ball_integral(
    dimension: int, radius: float, tol: float | None = None
) -> float:
    """Count variance in the ball via the oscillatory Bessel integral.

    Var = (2 R^(2D)/(D-1)!) * int_0^inf J_D(kR)^2 / k * (1 - e^(-k^2/4)) dk.

    ``tol`` is the absolute error target for the returned variance; if the
    panel budget cannot meet it, NumericalBudgetError carries the best
    estimate and the error actually achieved.  Fully independent of the
    closed form: different special functions, different representation.
    """
    dimension = _check_dimension(dimension)
    radius = _check_radius(radius)
    if tol is None:
        scale = mean_ball(dimension, radius) * min(1.0, dimension / radius)
        tol = max(1e-13, 1e-9 * scale)
    if not tol > 0.0:
        raise ValueError(f"tol must be positive, got {tol}")

    prefactor = 2.0 * radius ** (2 * dimension) / factorial(dimension - 1)

    def integrand(kappa: float) -> float:
        if kappa <= 0.0:
            return 0.0
        j = bessel_j(dimension, kappa * radius)
        return j * j / kappa * -math.expm1(-0.25 * kappa * kappa)

    k0 = 40.0 / radius * max(1, dimension)
    budget = tol / prefactor
    core, core_err = _adaptive_panel(integrand, 0.0, k0, 0.4 * budget)
    tail, tail_err = _oscillatory_tail(
        integrand, k0, radius, dimension, 0.5 * budget
    )
    achieved = prefactor * (core_err + tail_err)
    value = prefactor * (core + tail)
    if achieved > tol:
        raise NumericalBudgetError(
            f"variance integral achieved {achieved:.3e} (target {tol:.3e})",
            best_estimate=value,
            achieved_error=achieved,
        )
    return value


# ---------------------------------------------------------------------------
# Spectrum route


def _working_prec(level: int, max_index: int) -> int:
    cancellation_bits = level * max(1, math.ceil(math.log2(max(max_index, 2))))
    return 96 + cancellation_bits


class _GammaLadder:
    """P(j+1, R^2) for j = 0..N and factorials, at fixed binary precision.

    Uses forward recurrence P(j+1) = P(j) - r^j e^(-r)/j!, whose terms are
    all positive, so absolute error stays ~N ulps of the working precision.
    """

    def __init__(self, radius: float, prec: int):
        self.prec = prec
        rf = libmp.from_float(float(radius))
        self.rsq = libmp.mpf_mul(rf, rf, prec)  # exact: 106 bits < prec
        exp_neg = libmp.mpf_exp(libmp.mpf_neg(self.rsq), prec)
        self._term = exp_neg  # r^j e^-r / j!
        self._p = [libmp.mpf_sub(libmp.fone, exp_neg, prec)]
        self._fact = [libmp.fone]

    def extend(self, j_max: int) -> None:
        prec = self.prec
        for j in range(len(self._p), j_max + 1):
            jf = libmp.from_int(j)
            self._term = libmp.mpf_div(
                libmp.mpf_mul(self._term, self.rsq, prec), jf, prec
            )
            self._p.append(libmp.mpf_sub(self._p[-1], self._term, prec))
            self._fact.append(libmp.mpf_mul(self._fact[-1], jf, prec))
        if len(self._fact) <= j_max:
            raise AssertionError("ladder extension out of sync")

    def reg_gamma(self, j: int):
        return self._p[j]

    def fact(self, j: int):
        return self._fact[j]

    def mean_float(self) -> float:
        return libmp.to_float(self.rsq)


def _squared_coeffs(n: int, m: int) -> list[int]:
    """Integer coefficients of (m!)^2 * [L_m^(n-m)(u)]^2 in the monomial basis.

    a_i = (-1)^i binom(n, m-i) m!/i! are the (m!-scaled) coefficients of
    L_m^(n-m); the convolution squares the polynomial.  Exact integers, so
    the cancellation between the alternating signs costs nothing here.
    """
    scaled = [
        (-1) ** i * comb(n, m - i) * (factorial(m) // factorial(i))
        for i in range(m + 1)
    ]
    out = []
    for k in range(2 * m + 1):
        lo = max(0, k - m)
        hi = min(k, m)
        out.append(sum(scaled[i] * scaled[k - i] for i in range(lo, hi + 1)))
    return out


def _assemble_prob(n: int, m: int, ladder: _GammaLadder) -> float:
    """p_n at level m from the ladder; the one rounding step is the return."""
    prec = ladder.prec
    if m == 0:
        raw = libmp.to_float(ladder.reg_gamma(n))
    else:
        coeffs = _squared_coeffs(n, m)
        acc = libmp.fzero
        alpha = n - m
        for k, bk in enumerate(coeffs):
            if bk == 0 or alpha + k < 0:
                continue
            term = libmp.mpf_mul(
                libmp.mpf_mul(
                    libmp.from_int(bk), ladder.fact(alpha + k), prec
                ),
                ladder.reg_gamma(alpha + k),
                prec,
            )
            acc = libmp.mpf_add(acc, term, prec)
        denom = libmp.mpf_mul(ladder.fact(n), ladder.fact(m), prec)
        raw = libmp.to_float(libmp.mpf_div(acc, denom, prec))
    if raw < -PROB_CONSISTENCY_BAND or raw > 1.0 + PROB_CONSISTENCY_BAND:
        raise InternalConsistencyError(
            f"p_{n} at level {m} evaluated to {raw!r}, outside [0, 1]"
        )
    return min(max(raw, 0.0), 1.0)


def bernoulli_prob(n: int, m: int, radius: float) -> float:
    """Success probability p_n(R, m) of lattice index n at level m.

    Equals (m!/n!) int_0^(R^2) u^(n-m) e^(-u) [L_m^(n-m)(u)]^2 du, evaluated
    in closed form: the integrand expands exactly into monomials, each
    integrating to a factorial times a regularized incomplete gamma.
    Clamped to [0, 1]; a value outside the 1e-12 consistency band raises
    InternalConsistencyError instead of being clamped silently.
    """
    if n != int(n) or n < 0:
        raise ValueError(f"n must be an integer >= 0, got {n}")
    if m != int(m) or m < 0:
        raise ValueError(f"m must be an integer >= 0, got {m}")
    n, m = int(n), int(m)
    radius = _check_radius(radius)
    if m > EXACT_COEFF_MAX_LEVEL:
        # Exactness of the integer convolution is only claimed through
        # level 16; fall back on the symmetric index to keep it exact.
        if n <= EXACT_COEFF_MAX_LEVEL:
            n, m = m, n  # p is symmetric in (n, m); see the tests
        else:
            raise UnsupportedConfigurationError(
                f"level {m} beyond the exact-coefficient range"
            )
    ladder = _GammaLadder(radius, _working_prec(m, n + m))
    ladder.extend(n + m)
    return _assemble_prob(n, m, ladder)


def _initial_truncation(radius: float, level: int) -> int:
    base = math.ceil(radius * radius) + 12 * math.ceil(radius) + 50
    return max(level, base)


def build_spectrum(m: int, radius: float, tail_tol: float = 1e-9) -> BernoulliSpectrum:
    """All Bernoulli probabilities at one level, with a certified tail bound.

    The mean constraint sum_n p_n = R^2 (all levels share unit intensity
    over pi) plus monotone partial sums certify the truncation: the tail
    bound is R^2 minus the partial sum, extended until it drops below
    tail_tol.  Raises NumericalBudgetError at the size cap.
    """
    if m != int(m) or m < 0:
        raise ValueError(f"m must be an integer >= 0, got {m}")
    m = int(m)
    radius = _check_radius(radius)
    if not tail_tol > 0.0:
        raise ValueError(f"tail_tol must be positive, got {tail_tol}")
    if m > EXACT_COEFF_MAX_LEVEL:
        raise UnsupportedConfigurationError(
            f"level {m} beyond the exact-coefficient range"
        )

    n_top = _initial_truncation(radius, m)
    ladder = _GammaLadder(radius, _working_prec(m, n_top + 2 * m + 64))
    ladder.extend(n_top + m)
    probs = [_assemble_prob(n, m, ladder) for n in range(n_top + 1)]
    mean = ladder.mean_float()
    while True:
        tail = mean - math.fsum(probs)
        if tail <= tail_tol:
            break
        if len(probs) > SPECTRUM_SIZE_CAP:
            raise NumericalBudgetError(
                f"spectrum size cap hit at tail bound {tail:.3e} "
                f"(target {tail_tol:.3e})",
                best_estimate=None,
                achieved_error=tail,
            )
        grow = max(64, math.ceil(radius))
        ladder.extend(n_top + grow + m)
        probs.extend(
            _assemble_prob(n, m, ladder)
            for n in range(n_top + 1, n_top + grow + 1)
        )
        n_top += grow
    return BernoulliSpectrum(
        radius=radius,
        level=m,
        probs=np.array(probs, dtype=float),
        tail_bound=max(tail, 0.0),
    )


@lru_cache(maxsize=128)
def _cached_spectrum(m: int, radius: float, tail_tol: float) -> BernoulliSpectrum:
    return build_spectrum(m, radius, tail_tol)


def polydisk_moments(
    spec: KernelSpec, radius: float, tail_tol: float = 1e-9
) -> MomentReport:
    """Exact count moments in the polydisk of common radius R.

    With S_l = sum_n p_n and Q_l = sum_n p_n^2 per coordinate,
    mean = prod S_l, variance = prod S_l - prod Q_l, and the ratio uses
    the cancellation-free form 1 - prod(Q_l / S_l).
    """
    radius = _check_radius(radius)
    spectra = [_cached_spectrum(m, radius, tail_tol) for m in spec.level]
    sums = [s.prob_sum for s in spectra]
    sq_sums = [s.prob_sq_sum for s in spectra]
    mean = math.prod(sums)
    variance = mean - math.prod(sq_sums)
    ratio = 1.0 - math.prod(q / s for q, s in zip(sq_sums, sums))
    tail_err = sum(
        spectra[l].tail_bound * math.prod(sums[:l] + sums[l + 1 :])
        for l in range(len(spectra))
    )
    report = MomentReport(
        mean=mean,
        variance=variance,
        ratio=ratio,
        route=Route.SPECTRUM,
        error_estimate=2.0 * tail_err + 1e-14 * mean,
    )
    _check_underdispersion(report)
    return report


def _check_underdispersion(report: MomentReport) -> None:
    slack = 1e-12 * report.mean + report.error_estimate
    if report.variance > report.mean + slack:
        raise InternalConsistencyError(
            f"variance {report.variance!r} exceeds mean {report.mean!r}"
        )


def ball_moments(
    dimension: int,
    radius: float,
    route: Route = Route.CLOSED_FORM,
    tol: float | None = None,
) -> MomentReport:
    """Mean/variance/ratio for the ball window of the level-zero process."""
    dimension = _check_dimension(dimension)
    radius = _check_radius(radius)
    mean = mean_ball(dimension, radius)
    if route == Route.CLOSED_FORM:
        variance = variance_ball_closed(dimension, radius)
        err = 1e-12 * variance
    elif route == Route.INTEGRAL:
        variance = variance_ball_integral(dimension, radius, tol)
        err = tol if tol is not None else 1e-9 * variance
    else:
        raise UnsupportedConfigurationError(
            f"route {route.value!r} does not apply to the ball closed forms"
        )
    report = MomentReport(
        mean=mean,
        variance=variance,
        ratio=variance / mean,
        route=route,
        error_estimate=err,
    )
    _check_underdispersion(report)
    return report


# ---------------------------------------------------------------------------
# Class-I constants


def c_constant(m: int) -> float:
    """Exact Class-I constant of the level-m disk process.

    C(m) = (2 Gamma(m + 3/2) / (pi m!)) 3F2(-1/2, -1/2, -m; 1, -1/2 - m; 1),
    the limit of R * Var/mean as R -> inf.  The gamma ratio runs through
    log-gamma so large m cannot overflow.
    """
    if m != int(m) or m < 0:
        raise ValueError(f"m must be an integer >= 0, got {m}")
    m = int(m)
    prefactor = 2.0 * math.exp(math.lgamma(m + 1.5) - math.lgamma(m + 1.0)) / math.pi
    return prefactor * hyp3f2_terminating(-0.5, -0.5, m, 1.0, -0.5 - m)


def polydisk_limit_constant(spec: KernelSpec) -> float:
    """Limit of R * Var/mean for the polydisk: one C(m_l) per coordinate."""
    return math.fsum(c_constant(m) for m in spec.level)
