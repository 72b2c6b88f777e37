"""Acceptance-check registry: one callable per shipping criterion.

Each check returns a structured result with the measured value, the
target, and the tolerance it was judged against, so the verification
command and the test suite print identical one-line verdicts. Checks pin
their own tolerances and quadrature settings; caller-supplied tolerance
flags deliberately do not reach them.

The special-function checks compare the series/continued-fraction
implementations against quadrature of the defining integrals, an
independent route through different code and different algorithms.
"""

from __future__ import annotations

import functools
import math
import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .asymptotics import ExpansionBasis, classify_smoothness, fit_expansion, sample_profile
from .contraction import (DiagonalKernelParams, contracted_coulomb_2d_closed,
                          contracted_coulomb_2d_quad, contracted_coulomb_mollified,
                          cusp_expansion_check, diag_kernel_closed,
                          diag_kernel_origin_plateau, diag_kernel_quad2d,
                          exchange_leading_equivalence, log_singular_term)
from .quadrature import QuadConfig, integrate_1d, integrate_semi_infinite
from .report import FIG1_BETAS, FIG1_HEADER, fig1_rows
from .specfun import (bessel_k0, bessel_k1, bessel_k2, dawson, erf,
                      exp_integral_e1, pcf_V_mhalf)

_QUAD = QuadConfig(rel_tol=1e-10, abs_tol=1e-12, max_evals=100000)
_ORACLE_QUAD = QuadConfig(rel_tol=1e-12, abs_tol=1e-14, max_evals=200000)


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    measured: str
    target: str
    tolerance: str
    detail: str = ""
    elapsed_s: float = 0.0
    error: Optional[str] = None

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        extra = f"  [{self.error}]" if self.error else ""
        return (f"{verdict} {self.number:2d} {self.name}: measured {self.measured}, "
                f"target {self.target}, tolerance {self.tolerance}{extra}")


def _result(number: int, name: str, passed: bool, measured: str, target: str,
            tolerance: str, detail: str = "") -> CheckResult:
    return CheckResult(number=number, name=name, passed=bool(passed),
                       measured=measured, target=target, tolerance=tolerance,
                       detail=detail)


def check_1_dual_route_2d() -> CheckResult:
    t0 = time.time()
    worst = 0.0
    for rho in (0.1, 0.5, 1.0, 2.0):
        closed = contracted_coulomb_2d_closed(rho)
        quad = contracted_coulomb_2d_quad(rho, _QUAD).value
        worst = max(worst, abs(closed - quad) / abs(closed))
    elapsed = time.time() - t0
    res = _result(1, "contracted-coulomb-dual-route",
                  worst <= 1e-9 and elapsed < 1.0,
                  f"max rel dev {worst:.3e} in {elapsed:.2f}s",
                  "closed == quadrature at rho in {0.1,0.5,1,2}",
                  "rel 1e-9, runtime < 1 s")
    res.elapsed_s = elapsed
    return res


def check_2_log_coefficient_2d() -> CheckResult:
    basis = ExpansionBasis(terms=((0.0, 1), (0.0, 0), (2.0, 0)))
    samples = sample_profile(contracted_coulomb_2d_closed, 1e-4, 1e-2, 40)
    fit = fit_expansion(samples, basis)
    coef = fit.coefficients[basis.terms.index((0.0, 1))]
    target = 1.0 / (2.0 * math.sqrt(2.0 * math.pi))
    rel = abs(coef - target) / target
    return _result(2, "contracted-coulomb-log-coefficient", rel <= 0.01,
                   f"ln coefficient {coef:.6f} (rel dev {rel:.2e})",
                   f"{target:.6f}", "1%")


def check_3_mollified_sharp_limit() -> CheckResult:
    target = -4.0 * math.pi * contracted_coulomb_2d_closed(1.0)
    errs = []
    for beta in (1e2, 1e3, 1e4, 1e5):
        got = contracted_coulomb_mollified(1.0, beta, _QUAD).value
        errs.append(abs(got - target) / target)
    decreasing = all(a > b for a, b in zip(errs, errs[1:]))
    ok = decreasing and errs[-1] <= 5e-3
    return _result(3, "mollified-contraction-sharp-limit", ok,
                   "rel errs " + ", ".join(f"{e:.3e}" for e in errs),
                   "strictly decreasing, final <= 5e-3",
                   "rel 5e-3 at width 1e5",
                   detail=f"sharp value {target:.12f}")


def check_4_dual_representation() -> CheckResult:
    t0 = time.time()
    worst = 0.0
    where = ""
    for beta in (10.0, 1000.0):
        for r in (0.05, 0.3, 1.0):
            params = DiagonalKernelParams(r=r, beta=beta)
            closed = diag_kernel_closed(params, _QUAD).value
            quad2d = diag_kernel_quad2d(params, _QUAD).value
            rel = abs(closed - quad2d) / abs(closed)
            if rel > worst:
                worst, where = rel, f"beta={beta:g}, r={r}"
    elapsed = time.time() - t0
    res = _result(4, "diag-kernel-dual-representation",
                  worst <= 1e-6 and elapsed < 10.0,
                  f"max rel dev {worst:.3e} at {where} in {elapsed:.2f}s",
                  "1-d closed == 2-d quadrature on the 6-point grid",
                  "rel 1e-6, runtime < 10 s")
    res.elapsed_s = elapsed
    return res


def check_5_origin_plateau() -> CheckResult:
    value = diag_kernel_closed(DiagonalKernelParams(r=1e-4, beta=1e3), _QUAD).value
    plateau = diag_kernel_origin_plateau(1e3, 1.0)
    ratio = value / plateau
    return _result(5, "diag-kernel-origin-plateau", 0.99 <= ratio <= 1.01,
                   f"value {value:.4f}, ratio to plateau {ratio:.6f}",
                   f"plateau {plateau:.4f}", "ratio in [0.99, 1.01]",
                   detail="finite-width deficit ~ (4/pi)/sqrt(width) "
                          "keeps the ratio near 0.961 at width 1e3")


def check_6_sharp_limit_deviation() -> CheckResult:
    r = 0.5
    scale = r * r * math.exp(r * r) / math.pi**2
    devs = []
    for beta in (1e4, 1e5, 1e6):
        value = diag_kernel_closed(DiagonalKernelParams(r=r, beta=beta), _QUAD).value
        devs.append(abs(value * scale - 1.0))
    decreasing = all(a > b for a, b in zip(devs, devs[1:]))
    ok = decreasing and devs[-1] <= 0.05
    return _result(6, "diag-kernel-sharp-limit-deviation", ok,
                   "deviations " + ", ".join(f"{d:.6f}" for d in devs),
                   "strictly decreasing, final <= 5%", "5% at width 1e6",
                   detail="finite-width values converge to the exact sharp "
                          "limit, which differs from the small-r asymptote "
                          "pi^2 r^-2 e^{-r^2} at order r; the deviation "
                          "saturates near 0.611 instead of vanishing")


def check_7_radial_table() -> CheckResult:
    rows = fig1_rows(cfg=_QUAD)
    idx = {name: j for j, name in enumerate(FIG1_HEADER)}

    # (a) near-origin plateau agreement; the emitted radial window starts
    # at 0.05, so the r <= 0.01 clause is vacuous on the file itself and
    # is checked non-vacuously at function level instead.
    a_devs = []
    for beta in FIG1_BETAS:
        value = diag_kernel_closed(DiagonalKernelParams(r=1e-3, beta=beta), _QUAD).value
        a_devs.append(abs(value / diag_kernel_origin_plateau(beta, 1.0) - 1.0))
    a_ok = all(d <= 0.05 for d in a_devs)

    b_bad = 0
    b_total = 0
    for row in rows:
        if row[idx["r"]] < 0.3:
            continue
        b_total += 1
        gap3 = abs(row[idx["psi_beta3000"]] - row[idx["psi_inf"]])
        gap1 = abs(row[idx["psi_beta1000"]] - row[idx["psi_inf"]])
        if not gap3 < gap1:
            b_bad += 1
    b_ok = b_bad == 0

    c_worst = 0.0
    for row in rows:
        r = row[idx["r"]]
        if 0.3 <= r <= 1.0:
            rel = abs(row[idx["taylor3"]] / row[idx["psi_beta1000"]] - 1.0)
            c_worst = max(c_worst, rel)
    c_ok = c_worst <= 0.05

    measured = (f"(a) plateau devs {', '.join(f'{d:.4f}' for d in a_devs)}; "
                f"(b) {b_bad}/{b_total} rows violate limit ordering; "
                f"(c) max taylor3 dev {c_worst:.3f}")
    return _result(7, "radial-table-properties", a_ok and b_ok and c_ok,
                   measured,
                   "(a) <= 5% of origin plateau; (b) closer widths closer "
                   "to limit column; (c) taylor3 within 5% on [0.3, 1]",
                   "5% / pointwise / 5%",
                   detail="(b) and (c) compare against the small-r asymptote "
                          "column and the divergent expansion tail; see ledger")


def check_8_log_singular_fit() -> CheckResult:
    basis = ExpansionBasis(terms=((0.0, 1), (0.0, 0), (1.0, 0), (2.0, 0)))
    samples = sample_profile(lambda a: log_singular_term(a, 1.0), 1e-3, 1e-1, 40)
    fit = fit_expansion(samples, basis)
    coef = fit.coefficients[basis.terms.index((0.0, 1))]
    target = -4.0 * math.pi**3
    rel = abs(coef - target) / abs(target)
    return _result(8, "log-singular-coefficient-fit", rel <= 0.01,
                   f"ln coefficient {coef:.5f} (rel dev {rel:.2e})",
                   f"{target:.5f}", "1%")


def check_9_classification_table() -> CheckResult:
    cases = (
        (lambda r: math.exp(-r * r) / r, -2.0, False),
        (lambda r: math.log(r) * math.exp(-r * r), -3.0, True),
        (lambda r: r * math.exp(-r * r), -4.0, False),
        (lambda r: r**3 * math.exp(-r * r), -6.0, False),
    )
    got = []
    ok = True
    for profile, want_p, want_log in cases:
        cls = classify_smoothness(sample_profile(profile, 1e-6, 1e-3, 60))
        got.append(cls.p)
        ok = ok and cls.p == want_p and cls.has_log == want_log
    return _result(9, "smoothness-classification-table", ok,
                   f"p = {got}", "p = [-2, -3, -4, -6] with log flag on the "
                   "log profile only", "exact after snapping")


def _quad_oracle_dawson(x: float) -> float:
    if x == 0.0:
        return 0.0
    res = integrate_1d(lambda u: np.exp(-u * (2.0 * x - u)), 0.0, x, _ORACLE_QUAD)
    return res.value


def _quad_oracle_bessel(nu: int, x: float) -> float:
    # Scaled transform e^x K_nu(x): the raw integral underflows toward
    # 1e-14 by x = 30 and the absolute-error floor then caps relative
    # accuracy near 1e-5, so both sides of the check carry the e^x factor.
    # Each cosh is folded into a single exponential whose exponent heads
    # to -inf on the mapped half-line; cosh overflow degrades to
    # exp(-inf) = 0 instead of 0 * inf.
    def f(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(over="ignore"):
            c = x * np.cosh(t) - x
            return 0.5 * (np.exp(nu * t - c) + np.exp(-nu * t - c))

    res = integrate_semi_infinite(f, 0.0, _ORACLE_QUAD)
    return res.value


def _quad_oracle_erf(x: float) -> float:
    res = integrate_1d(lambda t: np.exp(-t * t), 0.0, x, _ORACLE_QUAD)
    return 2.0 / math.sqrt(math.pi) * res.value


def _quad_oracle_e1(x: float) -> float:
    res = integrate_semi_infinite(lambda s: np.exp(-s) / (s + x), 0.0, _ORACLE_QUAD)
    return math.exp(-x) * res.value


def check_10_special_functions() -> CheckResult:
    suites: list[tuple[str, Callable[[float], float], Callable[[float], float], np.ndarray]] = [
        ("dawson", dawson, _quad_oracle_dawson, np.linspace(0.05, 12.0, 50)),
        ("bessel_k0", lambda x: bessel_k0(x) * math.exp(x),
         lambda x: _quad_oracle_bessel(0, x), np.linspace(0.1, 30.0, 50)),
        ("bessel_k1", lambda x: bessel_k1(x) * math.exp(x),
         lambda x: _quad_oracle_bessel(1, x), np.linspace(0.1, 30.0, 50)),
        ("bessel_k2", lambda x: bessel_k2(x) * math.exp(x),
         lambda x: _quad_oracle_bessel(2, x), np.linspace(0.1, 30.0, 50)),
        ("erf", erf, _quad_oracle_erf, np.linspace(0.05, 7.0, 50)),
        ("exp_integral_e1", exp_integral_e1, _quad_oracle_e1, np.linspace(0.05, 5.0, 50)),
    ]
    worst_name, worst = "", 0.0
    for name, fn, oracle, grid in suites:
        for x in grid:
            want = oracle(float(x))
            got = fn(float(x))
            rel = abs(got - want) / abs(want)
            if rel > worst:
                worst_name, worst = name, rel
    id_worst = 0.0
    for x in np.linspace(0.0, 10.0, 50):
        lhs = pcf_V_mhalf(float(x))
        rhs = 2.0 / math.sqrt(math.pi) * math.exp(x * x / 4.0) * dawson(x / math.sqrt(2.0))
        scale = max(abs(rhs), 1.0)
        id_worst = max(id_worst, abs(lhs - rhs) / scale)
    ok = worst <= 1e-10 and id_worst <= 1e-12
    return _result(10, "special-function-oracles", ok,
                   f"max rel dev {worst:.3e} ({worst_name}); identity dev {id_worst:.3e}",
                   "series == quadrature of defining integrals; "
                   "dawson/parabolic-cylinder identity",
                   "rel 1e-10 on 50-point grids; identity 1e-12")


def check_11_cusp_and_exchange(n_samples: int = 4_000_000,
                               seed: int = 20260822) -> CheckResult:
    t0 = time.time()
    cusp = cusp_expansion_check(b=(0.0, 0.0, 0.0), beta=25.0, z2=(0.0, 0.0, 0.0),
                                z1_norms=(0.01, 0.02, 0.03, 0.04),
                                n_samples=n_samples, seed=seed)
    slope_rel = abs(cusp.slope_estimate - cusp.slope_predicted) / abs(cusp.slope_predicted)
    slope_ok = slope_rel <= 0.15
    exch = exchange_leading_equivalence(b=(0.0, 0.0, 0.0), beta=25.0,
                                        n_samples=n_samples // 2, seed=seed + 1)
    gap = abs(exch.direct_leading - exch.exchange_leading)
    bound = 2.0 * (exch.stderr_direct + exch.stderr_exchange)
    exch_ok = gap <= bound
    elapsed = time.time() - t0
    res = _result(11, "cusp-slope-and-exchange",
                  slope_ok and exch_ok and elapsed < 600.0,
                  f"slope {cusp.slope_estimate:.3f} +- {cusp.stderr:.3f} vs "
                  f"predicted {cusp.slope_predicted:.3f} (rel {slope_rel:.2f}); "
                  f"exchange gap {gap:.3f} vs bound {bound:.3f}",
                  "slope within 15% of predicted; orderings equal within "
                  "2x combined stderr",
                  "15% / 2x stderr; runtime < 600 s",
                  detail="measured slope magnitude matches the predicted "
                         "coefficient but with opposite sign; see ledger")
    res.elapsed_s = elapsed
    return res


FAST_CHECKS = (
    check_1_dual_route_2d,
    check_2_log_coefficient_2d,
    check_3_mollified_sharp_limit,
    check_4_dual_representation,
    check_5_origin_plateau,
    check_6_sharp_limit_deviation,
    check_7_radial_table,
    check_8_log_singular_fit,
    check_9_classification_table,
    check_10_special_functions,
)
SLOW_CHECKS = (check_11_cusp_and_exchange,)


def run_all(include_slow: bool = False,
            progress: Optional[Callable[[CheckResult], None]] = None,
            seed: Optional[int] = None) -> list[CheckResult]:
    slow: tuple = SLOW_CHECKS
    if seed is not None:
        # reseeds only the sampling checks; deterministic thresholds stay put
        slow = tuple(functools.update_wrapper(functools.partial(fn, seed=int(seed)), fn)
                     for fn in SLOW_CHECKS)
    checks = FAST_CHECKS + (slow if include_slow else ())
    results = []
    for check in checks:
        t0 = time.time()
        try:
            res = check()
        except Exception as exc:
            res = CheckResult(number=len(results) + 1, name=check.__name__,
                              passed=False, measured="exception", target="",
                              tolerance="", error=f"{type(exc).__name__}: {exc}")
        if res.elapsed_s == 0.0:
            res.elapsed_s = time.time() - t0
        results.append(res)
        if progress is not None:
            progress(res)
    return results


def report_payload(results: list[CheckResult]) -> dict:
    return {
        "checks": [
            {"number": r.number, "name": r.name, "passed": r.passed,
             "measured": r.measured, "target": r.target,
             "tolerance": r.tolerance, "detail": r.detail,
             "elapsed_s": round(r.elapsed_s, 3), "error": r.error}
            for r in results
        ],
        "passed": sum(1 for r in results if r.passed),
        "failed": sum(1 for r in results if not r.passed),
    }
