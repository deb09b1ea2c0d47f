"""Cross-route verification suite.

Every quantity the package computes is checked against an independent
route: closed form vs quadrature, exact spectrum vs closed form, series
vs exact ratio, exact constants vs hand-derived values vs their large-m
asymptote, exact moments vs Monte Carlo, kernel product form vs its
series expansion, and raw special functions vs recurrence identities and
reference oracles.

Each check reports a worst observed delta normalized by its tolerance,
so ``max_delta <= tolerance`` (tolerance = profile scale) is the pass
condition uniformly; the detail string carries the raw numbers.  A zero
tolerance scale therefore fails every check with nonzero error, which is
the intended way to demonstrate that reported deltas are real.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import asymptotics, montecarlo
from .analysis import (
    ClassLabel,
    classify,
    default_r_grid,
    poisson_control_sweep,
    run_sweep,
)
from .kernels import (
    ComplexPoint,
    KernelSpec,
    correlation_det,
    gauge_transform,
    hermitized_kernel,
    kernel_series_partial,
)
from .specfun import bessel_i_scaled, laguerre, regularized_lower_gamma
from .window_stats import (
    Route,
    WindowKind,
    ball_moments,
    c_constant,
    mean_ball,
    polydisk_limit_constant,
    polydisk_moments,
    variance_ball_closed,
    variance_ball_integral,
    variance_ratio_ball,
)

MC_GATE_SEED = 20260813
MC_GATE_REPLICAS = 100_000


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_delta: float
    tolerance: float
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.name}: max normalized delta {self.max_delta:.3e} "
            f"vs tolerance {self.tolerance:.3e} ({self.detail})"
        )


@dataclass(frozen=True)
class ToleranceProfile:
    scale: float = 1.0

    def __post_init__(self):
        if not (self.scale >= 0.0 and math.isfinite(self.scale)):
            raise ValueError(f"scale must be finite and >= 0, got {self.scale}")


class _Worst:
    """Tracks the largest tolerance-normalized deviation and its context."""

    def __init__(self):
        self.delta = 0.0
        self.note = "all sub-checks at zero deviation"

    def add(self, raw: float, tol: float, note: str) -> None:
        normalized = math.inf if tol == 0.0 and raw != 0.0 else (raw / tol if tol else 0.0)
        if normalized >= self.delta:
            self.delta = normalized
            self.note = f"{note}: raw {raw:.3e} vs {tol:.3e}"

    def fail(self, note: str) -> None:
        self.delta = math.inf
        self.note = note

    def result(self, name: str, scale: float) -> CheckResult:
        return CheckResult(
            name=name,
            passed=self.delta <= scale,
            max_delta=self.delta,
            tolerance=scale,
            detail=self.note,
        )


def check_ball_route_cross(profile: ToleranceProfile) -> CheckResult:
    worst = _Worst()
    for dim in (1, 2, 3):
        for r in (0.5, 1.0, 2.0, 5.0, 10.0):
            closed = variance_ball_closed(dim, r)
            integral = variance_ball_integral(dim, r)
            worst.add(abs(integral - closed) / closed, 1e-6, f"D={dim} R={r}")
    return worst.result("ball-route-cross-check", profile.scale)


def _constant_gap(dim: int) -> float:
    target = dim / math.sqrt(math.pi)
    ratio = variance_ratio_ball(dim, 50.0)
    return abs(50.0 * ratio - target) / target


def check_ginibre_constant(profile: ToleranceProfile) -> CheckResult:
    worst = _Worst()
    worst.add(_constant_gap(1), 0.02, "D=1 R=50 vs 1/sqrt(pi)")
    return worst.result("ginibre-constant", profile.scale)


def check_heisenberg_constant(profile: ToleranceProfile) -> CheckResult:
    worst = _Worst()
    for dim in (2, 3):
        worst.add(_constant_gap(dim), 0.02, f"D={dim} R=50 vs D/sqrt(pi)")
    return worst.result("heisenberg-constant", profile.scale)


def check_asymptotic_expansion(profile: ToleranceProfile) -> CheckResult:
    # The truncation remainder is asymptotically the first omitted term;
    # successive coefficients do not strictly alternate in sign, so the
    # standard constructive envelope is twice that term.
    worst = _Worst()
    for dim in (1, 2, 3):
        for r in (5.0, 10.0, 20.0):
            exact = variance_ratio_ball(dim, r)
            approx = asymptotics.ratio_series_eval(dim, r, order=3)
            bound = 2.0 * approx.abs_error_bound + 64 * 2.3e-16 * abs(exact)
            worst.add(abs(approx.value - exact), bound, f"D={dim} R={r}")
    return worst.result("asymptotic-expansion", profile.scale)


def check_alpha_coefficients(profile: ToleranceProfile) -> CheckResult:
    worst = _Worst()
    for dim in range(1, 7):
        got = asymptotics.alpha_coefficient(1, dim)
        want = (2 * dim - 1) * (2 * dim + 1)
        worst.add(abs(got - want), 0.5, f"alpha_1({dim})")
    worst.add(abs(asymptotics.alpha_coefficient(2, 1) - (-15)), 0.5, "alpha_2(1)")
    return worst.result("alpha-coefficients", profile.scale)


def check_spectrum_route(profile: ToleranceProfile) -> CheckResult:
    worst = _Worst()
    spec = KernelSpec(1, (0,))
    for r in (1.0, 2.0, 5.0, 10.0):
        rep = polydisk_moments(spec, r)
        mean = mean_ball(1, r)
        var = variance_ball_closed(1, r)
        worst.add(abs(rep.mean - mean) / mean, 1e-6, f"mean R={r}")
        worst.add(abs(rep.variance - var) / var, 1e-6, f"variance R={r}")
    return worst.result("spectrum-route-equivalence", profile.scale)


def check_class_one_constants(profile: ToleranceProfile) -> CheckResult:
    worst = _Worst()
    worst.add(abs(c_constant(0) - 1.0 / math.sqrt(math.pi)), 1e-12, "C(0)")
    worst.add(abs(c_constant(1) - 7.0 / (4.0 * math.sqrt(math.pi))), 1e-12, "C(1)")
    ratio = c_constant(1000) / asymptotics.c_asymptote(1000)
    worst.add(abs(ratio - 1.0), 0.02, "C(1000) vs (8/pi^2) sqrt(m)")
    return worst.result("class-one-constants", profile.scale)


def check_polydisk_limit(profile: ToleranceProfile) -> CheckResult:
    worst = _Worst()
    cases = [
        KernelSpec(1, (1,)),
        KernelSpec(1, (2,)),
        KernelSpec(2, (0, 1)),
        KernelSpec(2, (1, 1)),
        KernelSpec(3, (0, 1, 2)),
    ]
    for spec in cases:
        target = polydisk_limit_constant(spec)
        rep = polydisk_moments(spec, 50.0)
        worst.add(
            abs(50.0 * rep.ratio - target) / target,
            0.03,
            f"D={spec.dimension} level={spec.level}",
        )
    return worst.result("polydisk-limit", profile.scale)


def check_kernel_series(profile: ToleranceProfile) -> CheckResult:
    rng = np.random.default_rng(1234)
    worst = _Worst()
    for m in range(6):
        for _ in range(20):
            x = complex(*rng.uniform(-math.sqrt(2.0), math.sqrt(2.0), size=2))
            y = complex(*rng.uniform(-math.sqrt(2.0), math.sqrt(2.0), size=2))
            got = kernel_series_partial(m, x, y, n_terms=100)
            t = abs(x - y) ** 2
            want = cmath.exp(x * y.conjugate()) * laguerre(m, 0.0, t) / math.factorial(m)
            worst.add(abs(got - want), 1e-10, f"m={m} x={x:.3f} y={y:.3f}")
    return worst.result("kernel-series-identity", profile.scale)


def _random_point(rng, dim: int) -> ComplexPoint:
    return ComplexPoint(
        tuple(rng.uniform(-1.5, 1.5, size=dim)), tuple(rng.uniform(-1.5, 1.5, size=dim))
    )


def check_gauge_invariance(profile: ToleranceProfile) -> CheckResult:
    rng = np.random.default_rng(987)
    worst = _Worst()
    for trial in range(100):
        dim = int(rng.integers(1, 4))
        level = tuple(int(v) for v in rng.integers(0, 4, size=dim))
        spec = KernelSpec(dim, level)
        n_pts = int(rng.integers(1, 7))
        points = [_random_point(rng, dim) for _ in range(n_pts)]
        coeffs = rng.uniform(-0.7, 0.7, size=2 * dim + 1)

        def gauge(p: ComplexPoint) -> complex:
            s = coeffs[-1]
            for j in range(dim):
                s += coeffs[2 * j] * p.re[j] + coeffs[2 * j + 1] * p.im[j]
            return cmath.exp(complex(s, 0.3 * s))

        base = lambda a, b: hermitized_kernel(spec, a, b)
        plain = correlation_det(base, points)
        gauged = correlation_det(gauge_transform(base, gauge), points, imag_tol=1e-6)
        scale = max(abs(plain), 1e-300)
        worst.add(abs(gauged - plain) / scale, 1e-9, f"trial {trial} D={dim} n={n_pts}")
    return worst.result("gauge-invariance", profile.scale)


def mc_gate_cells() -> list[tuple[KernelSpec, float]]:
    cells: list[tuple[KernelSpec, float]] = []
    for radius in (1.0, 3.0, 5.0):
        for m in range(3):
            cells.append((KernelSpec(1, (m,)), radius))
        for m0 in range(3):
            for m1 in range(3):
                cells.append((KernelSpec(2, (m0, m1)), radius))
    return cells


def check_monte_carlo_gate(profile: ToleranceProfile) -> CheckResult:
    worst = _Worst()
    cfg_small = montecarlo.McConfig(replicas=2000, seed=MC_GATE_SEED)
    rep_a = montecarlo.estimate_moments(KernelSpec(1, (0,)), 1.0, cfg_small)
    rep_b = montecarlo.estimate_moments(KernelSpec(1, (0,)), 1.0, cfg_small)
    if rep_a != rep_b:
        worst.fail("identical seeds produced different estimates")
        return worst.result("monte-carlo-gate", profile.scale)

    cells = mc_gate_cells()
    hits = 0
    overdispersed = []
    worst_z = (0.0, "")
    for spec, radius in cells:
        cfg = montecarlo.McConfig(
            replicas=MC_GATE_REPLICAS, seed=MC_GATE_SEED, cell_prob_floor=1e-12
        )
        est = montecarlo.estimate_moments(spec, radius, cfg)
        exact = polydisk_moments(spec, radius)
        z_mean = abs(est.mean_hat - exact.mean) / est.se_mean
        z_var = abs(est.var_hat - exact.variance) / est.se_var
        if z_mean <= 3.0 and z_var <= 3.0:
            hits += 1
        z = max(z_mean, z_var)
        if z > worst_z[0]:
            worst_z = (z, f"D={spec.dimension} level={spec.level} R={radius}")
        if est.var_hat >= est.mean_hat:
            overdispersed.append((spec.level, radius))
    coverage = hits / len(cells)
    worst.add(1.0 - coverage, 0.05, f"coverage {coverage:.3f}, worst z {worst_z[0]:.2f} at {worst_z[1]}")
    if overdispersed:
        worst.fail(f"var_hat >= mean_hat in cells {overdispersed}")
    return worst.result("monte-carlo-gate", profile.scale)


def check_classification(profile: ToleranceProfile) -> CheckResult:
    worst = _Worst()
    grid = default_r_grid()
    for dim in (1, 2, 3):
        sweep = run_sweep(KernelSpec(dim), WindowKind.BALL, grid, Route.CLOSED_FORM)
        report = classify(sweep)
        if report.class_label is not ClassLabel.CLASS_I:
            worst.fail(f"D={dim} sweep labeled {report.class_label.value}")
            continue
        worst.add(
            abs(report.fitted_slope - (2 * dim - 1)), 0.05, f"D={dim} slope"
        )
        control = classify(poisson_control_sweep(dim, grid))
        if control.class_label is not ClassLabel.NOT_HYPERUNIFORM:
            worst.fail(f"D={dim} control labeled {control.class_label.value}")
    return worst.result("classification", profile.scale)


def _bessel_i_series_oracle(nu: int, x: float) -> float:
    half = 0.5 * x
    log_t = nu * math.log(half) - math.lgamma(nu + 1) - x
    terms = []
    total = 0.0
    prev = math.inf
    k = 0
    while True:
        t = math.exp(log_t)
        terms.append(t)
        total += t
        # terms rise to a peak then decay to exact zero, so this always fires
        if t == 0.0 or (t < prev and t < 1e-18 * total):
            break
        prev = t
        k += 1
        log_t += 2.0 * math.log(half) - math.log(k) - math.log(k + nu)
    return math.fsum(terms)


def check_specfun_floor(profile: ToleranceProfile) -> CheckResult:
    rng = np.random.default_rng(55)
    worst = _Worst()
    for _ in range(300):
        n = int(rng.integers(2, 80))
        alpha = float(rng.uniform(-1.0, 12.0))
        x = float(rng.uniform(0.0, 60.0))
        lm1 = laguerre(n - 1, alpha, x)
        l0 = laguerre(n, alpha, x)
        lp1 = laguerre(n + 1, alpha, x)
        residual = (n + 1) * lp1 - (2 * n + 1 + alpha - x) * l0 + (n + alpha) * lm1
        scale = max(abs(lm1), abs(l0), abs(lp1), 1e-300)
        worst.add(abs(residual) / ((2 * n + 2 + alpha + x) * scale), 1e-9, f"laguerre n={n}")
    for _ in range(300):
        s = float(rng.uniform(0.2, 40.0))
        x = float(rng.uniform(0.01, 60.0))
        step = regularized_lower_gamma(s + 1.0, x) - regularized_lower_gamma(s, x)
        exact = -math.exp(s * math.log(x) - x - math.lgamma(s + 1.0))
        worst.add(abs(step - exact), 1e-12, f"gamma ladder s={s:.2f} x={x:.2f}")
    for _ in range(200):
        nu = int(rng.integers(0, 12))
        x = float(rng.uniform(0.05, 30.0))
        got = bessel_i_scaled(nu, x)
        want = _bessel_i_series_oracle(nu, x)
        worst.add(abs(got - want) / want, 1e-10, f"ive nu={nu} x={x:.2f}")
    for nu in (0, 1, 3):
        got = bessel_i_scaled(nu, 1.0e4)
        leading = 1.0 / math.sqrt(2.0 * math.pi * 1.0e4)
        worst.add(abs(got - leading) / leading, 1e-3, f"ive asymptote nu={nu}")
    return worst.result("special-function-floor", profile.scale)


ALL_CHECKS = {
    "ball-route-cross-check": check_ball_route_cross,
    "ginibre-constant": check_ginibre_constant,
    "heisenberg-constant": check_heisenberg_constant,
    "asymptotic-expansion": check_asymptotic_expansion,
    "alpha-coefficients": check_alpha_coefficients,
    "spectrum-route-equivalence": check_spectrum_route,
    "class-one-constants": check_class_one_constants,
    "polydisk-limit": check_polydisk_limit,
    "kernel-series-identity": check_kernel_series,
    "gauge-invariance": check_gauge_invariance,
    "monte-carlo-gate": check_monte_carlo_gate,
    "classification": check_classification,
    "special-function-floor": check_specfun_floor,
}


def run_checks(
    names: list[str] | None = None, profile: ToleranceProfile | None = None
) -> list[CheckResult]:
    profile = profile or ToleranceProfile()
    selected = list(ALL_CHECKS) if names is None else names
    unknown = [n for n in selected if n not in ALL_CHECKS]
    if unknown:
        raise ValueError(f"unknown checks: {unknown}; known: {sorted(ALL_CHECKS)}")
    return [ALL_CHECKS[name](profile) for name in selected]


def verify_all(profile: ToleranceProfile | None = None) -> tuple[list[CheckResult], bool]:
    results = run_checks(None, profile)
    return results, all(r.passed for r in results)
