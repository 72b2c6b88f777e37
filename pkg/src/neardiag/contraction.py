"""Contracted-kernel evaluations: closed forms, quadrature routes, and MC checks.

The central object is the partially contracted interaction kernel on the
spatial diagonal: a narrow Gaussian mollifier of width 1/sqrt(beta) and a
unit-width Gaussian test function are integrated against the leading
inverse-fourth-power resolvent kernel with a Coulomb weight. Along the
diagonal at distance r from the origin this reduces to a one-dimensional
angular integral with an explicit Dawson-function bracket; the module
evaluates that closed form, an independent two-dimensional quadrature
representation of the same quantity, its sharp-mollifier and small-r
limits, and truncated expansions of the bracket. It also provides the
two-dimensional contracted Coulomb kernel (exact and quadrature), the
mollified variant that converges to it, the log-singular and smooth terms
of the second-order expansion, and Monte-Carlo checks of the
near-diagonal cusp structure of the full six-dimensional integral.

Every exponential is evaluated with merged exponents that are provably
non-positive, so no intermediate can overflow at any mollifier width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .kernels import C12_DEFAULT, as_vec3
from .quadrature import (DEFAULT_CONFIG, QuadConfig, QuadResult, block_rng,
                         integrate_1d, integrate_2d, integrate_semi_infinite)
from .specfun import bessel_k0_scaled, dawson, erf, exp_integral_e1

_SQRT2 = math.sqrt(2.0)

# Importance-sampler geometry for the 6-d Monte Carlo checks: radial
# proposal cutoffs and mixture masses (kernel-centered 6-d component is
# uniform in rho so the joint kernel/Coulomb singularity keeps finite
# variance).
_MC_R6 = 8.0
_MC_R3 = 6.0
_MC_MASSES = (0.35, 0.35, 0.30)
_MC_BLOCK = 65536
_EXCHANGE_STREAM_OFFSET = 0x9E3779B97F4A7C15


class InsufficientSamplesError(RuntimeError):
    """Raised when a Monte-Carlo check cannot reach its required precision."""


@dataclass(frozen=True)
class DiagonalKernelParams:
    """Distance r along the diagonal, mollifier width beta, kernel constant."""

    r: float
    beta: float
    c12: float = 1.0

    def __post_init__(self) -> None:
        if not self.r > 0:
            raise ValueError("r must be strictly positive")
        if not self.beta > 0:
            raise ValueError("beta must be strictly positive")


@dataclass(frozen=True)
class BracketVariables:
    """Substitution variables of the angular bracket at one angle.

    a = beta sin^2 + cos^2, b = 2 beta sin(rp) r, d = 2 cos(rp) r,
    v = (b - d)/sqrt(2a), w = (b + d)/sqrt(2a); w >= v on [0, pi/2].
    """

    v: float
    w: float
    a: float
    b: float
    d: float


def bracket_variables(rp: float, params: DiagonalKernelParams) -> BracketVariables:
    """Evaluate the bracket substitution variables at angle rp in [0, pi/2]."""
    if not 0.0 <= rp <= math.pi / 2.0:
        raise ValueError("angle must lie in [0, pi/2]")
    s = math.sin(rp)
    c = math.cos(rp)
    a = params.beta * s * s + c * c
    b = 2.0 * params.beta * s * params.r
    d = 2.0 * c * params.r
    root = math.sqrt(2.0 * a)
    return BracketVariables(v=(b - d) / root, w=(b + d) / root, a=a, b=b, d=d)


# ---------------------------------------------------------------------------
# 2-d contracted Coulomb kernel
# ---------------------------------------------------------------------------

def contracted_coulomb_2d_closed(rho: float) -> float:
    """Closed form of the 2-d contracted Coulomb kernel at separation rho.

    Value: -(1/(4 sqrt(2 pi))) e^(rho^2/4) K0(rho^2/4), computed through
    the scaled Bessel product so large rho cannot overflow. Diverges like
    (1/(2 sqrt(2 pi))) ln(rho) as rho -> 0.
    """
    if not rho > 0:
        raise ValueError("rho must be strictly positive")
    return -bessel_k0_scaled(rho * rho / 4.0) / (4.0 * math.sqrt(2.0 * math.pi))


def contracted_coulomb_2d_quad(rho: float,
                               cfg: QuadConfig = DEFAULT_CONFIG) -> QuadResult:
    """Quadrature route to the 2-d contracted Coulomb kernel.

    Integrates -(1/(4 pi)) sqrt(pi/(1+2 t^2)) e^(-rho^2 t^2) over the real
    line, folded by symmetry onto [0, inf).
    """
    if not rho > 0:
        raise ValueError("rho must be strictly positive")
    r2 = rho * rho

    def f(t):
        t = np.asarray(t, dtype=float)
        return np.sqrt(np.pi / (1.0 + 2.0 * t * t)) * np.exp(-r2 * t * t)

    res = integrate_semi_infinite(f, 0.0, cfg)
    scale = -2.0 / (4.0 * math.pi)
    return QuadResult(value=scale * res.value,
                      error_estimate=abs(scale) * res.error_estimate,
                      evaluations=res.evaluations,
                      converged=res.converged)


def contracted_coulomb_mollified(d: float, beta: float,
                                 cfg: QuadConfig = DEFAULT_CONFIG) -> QuadResult:
    """Finite-width counterpart of the 2-d contracted Coulomb kernel.

    2 * integral_0^sqrt(beta/2) sqrt(pi / (1 + 2 (1 - 1/beta) u^2))
        e^(-u^2 d^2) du
    for separation d >= 0 and mollifier width beta > 1; converges to
    sqrt(pi/2) e^(d^2/4) K0(d^2/4)-type closed values as beta grows.
    """
    if d < 0:
        raise ValueError("d must be non-negative")
    if not beta > 1:
        raise ValueError("beta must exceed 1")
    shrink = 1.0 - 1.0 / beta
    d2 = d * d

    def f(u):
        u = np.asarray(u, dtype=float)
        u2 = u * u
        return np.sqrt(np.pi / (1.0 + 2.0 * shrink * u2)) * np.exp(-u2 * d2)

    res = integrate_1d(f, 0.0, math.sqrt(beta / 2.0), cfg)
    return QuadResult(value=2.0 * res.value,
                      error_estimate=2.0 * res.error_estimate,
                      evaluations=res.evaluations,
                      converged=res.converged)


# ---------------------------------------------------------------------------
# Diagonal kernel: closed 1-d form, 2-d representation, limits, expansions
# ---------------------------------------------------------------------------

def _merged_exponents(rp, r: float, beta: float):
    """Vectorized bracket data with provably non-positive exponents.

    Returns (a, b, d, v, w, Ev, Ew) where Ev = v^2/2 - (beta+1) r^2 and
    Ew = w^2/2 - (beta+1) r^2 in the algebraically equivalent forms
    -beta r^2 (sin+cos)^2 / a and -beta r^2 (sin-cos)^2 / a, both <= 0.
    """
    rp = np.asarray(rp, dtype=float)
    s = np.sin(rp)
    c = np.cos(rp)
    a = beta * s * s + c * c
    b = 2.0 * beta * s * r
    d = 2.0 * c * r
    root = np.sqrt(2.0 * a)
    v = (b - d) / root
    w = (b + d) / root
    Ev = -beta * r * r * (s + c) ** 2 / a
    Ew = -beta * r * r * (s - c) ** 2 / a
    return a, b, d, v, w, Ev, Ew


def _prefactor(params: DiagonalKernelParams) -> float:
    return 2.0 * params.c12 * math.sqrt(math.pi * params.beta) / params.r**2


def diag_kernel_closed(params: DiagonalKernelParams,
                       cfg: QuadConfig = DEFAULT_CONFIG) -> QuadResult:
    """Closed angular-integral form of the contracted kernel on the diagonal.

    One-dimensional integral over the hyperangle of a Dawson-function
    bracket; the overall Gaussian damping is merged into each exponent
    before exponentiation, so the value is finite and overflow-free for
    every (r, beta).
    """
    r, beta = params.r, params.beta

    def integrand(rp):
        a, _, _, v, w, Ev, Ew = _merged_exponents(rp, r, beta)
        bracket = (np.sqrt(np.pi * a) * (np.exp(Ev) - np.exp(Ew))
                   + np.sqrt(2.0 * np.pi * a)
                   * (w * np.exp(Ew) * dawson(w / _SQRT2)
                      - v * np.exp(Ev) * dawson(v / _SQRT2)))
        return bracket * np.cos(rp)

    res = integrate_1d(integrand, 0.0, math.pi / 2.0, cfg)
    scale = _prefactor(params)
    return QuadResult(value=scale * res.value,
                      error_estimate=abs(scale) * res.error_estimate,
                      evaluations=res.evaluations,
                      converged=res.converged)


def diag_kernel_quad2d(params: DiagonalKernelParams,
                       cfg: QuadConfig = DEFAULT_CONFIG) -> QuadResult:
    """Independent 2-d quadrature representation of diag_kernel_closed.

    Iterated adaptive quadrature of e^(-a t^2) [cosh((b+d) t) -
    cosh((b-d) t)] / t^2 * cos(rp) over t in (0, inf), rp in [0, pi/2],
    with the Gaussian prefactor merged into each of the four
    exponentials. Below (b+d) t = 1e-6 the integrand is replaced by its
    analytic limit 2 b d e^(-p). The inner integrand is a pair of
    Gaussians of width 1/sqrt(2a) centered at (b -+ d)/(2a), far too
    narrow at large beta r^2 for a cold adaptive start, so the inner
    segments are seeded with edges at both centers before refinement.
    """
    r, beta = params.r, params.beta
    p = (beta + 1.0) * r * r
    half_range = math.pi / 2.0
    stats = {"evals": 0, "max_err": 0.0, "all_conv": True}

    def outer(rp):
        rp_arr = np.atleast_1d(np.asarray(rp, dtype=float))
        out = np.empty_like(rp_arr)
        for i, rpi in enumerate(rp_arr):
            s = math.sin(rpi)
            c = math.cos(rpi)
            a = beta * s * s + c * c
            b = 2.0 * beta * s * r
            d = 2.0 * c * r
            bp = b + d
            bm = b - d

            def f(t, a=a, b=b, d=d, bp=bp, bm=bm):
                t = np.asarray(t, dtype=float)
                at2 = a * t * t
                full = 0.5 * (np.exp(bp * t - at2 - p) + np.exp(-bp * t - at2 - p)
                              - np.exp(bm * t - at2 - p) - np.exp(-bm * t - at2 - p)) \
                    / np.where(t > 0, t * t, 1.0)
                return np.where(bp * t < 1e-6, 2.0 * b * d * math.exp(-p), full)

            sigma = 1.0 / math.sqrt(2.0 * a)
            centers = (bm / (2.0 * a), bp / (2.0 * a))
            knots = {0.0}
            for mu in centers:
                for off in (-6.0 * sigma, 0.0, 6.0 * sigma):
                    if mu + off > 0.0:
                        knots.add(mu + off)
            cut = max(centers) + 16.0 * sigma
            knots.add(cut)
            edges = sorted(knots)
            # Analytic magnitude of the inner integral (Gaussian peak height
            # over squared center, both exponents non-positive); segments
            # contributing below rel_tol of it converge immediately instead
            # of chasing relative precision of a negligible quantity.
            peak_w = math.exp(bp * bp / (4.0 * a) - p) / max(centers[1], sigma) ** 2
            peak_v = math.exp(bm * bm / (4.0 * a) - p) / max(abs(centers[0]), sigma) ** 2
            scale_est = 0.5 * math.sqrt(math.pi / a) * (peak_w + peak_v)
            inner_cfg = QuadConfig(
                rel_tol=cfg.rel_tol / 10.0,
                abs_tol=max(cfg.abs_tol / (10.0 * half_range),
                            cfg.rel_tol * scale_est / 20.0),
                max_evals=cfg.max_evals)
            total = 0.0
            err = 0.0
            segments = [integrate_1d(f, lo, hi, inner_cfg)
                        for lo, hi in zip(edges, edges[1:])]
            segments.append(integrate_semi_infinite(f, cut, inner_cfg))
            for seg in segments:
                total += seg.value
                err += seg.error_estimate
                stats["evals"] += seg.evaluations
                stats["all_conv"] = stats["all_conv"] and seg.converged
            stats["max_err"] = max(stats["max_err"], err)
            out[i] = total * math.cos(rpi)
        return out if np.ndim(rp) else float(out[0])

    res = integrate_1d(outer, 0.0, half_range, cfg)
    scale = _prefactor(params)
    error = res.error_estimate + half_range * stats["max_err"]
    return QuadResult(value=scale * res.value,
                      error_estimate=abs(scale) * error,
                      evaluations=res.evaluations + stats["evals"],
                      converged=res.converged and stats["all_conv"])


def diag_kernel_limit_sharp(r: float, c12: float) -> float:
    """Sharp-mollifier asymptote c12 pi^2 r^-2 e^(-r^2) of the diagonal kernel."""
    if not r > 0:
        raise ValueError("r must be strictly positive")
    return c12 * math.pi**2 / (r * r) * math.exp(-r * r)


def diag_kernel_origin_plateau(beta: float, c12: float) -> float:
    """Leading small-r plateau 2 c12 pi^2 beta of the diagonal kernel."""
    if not beta > 0:
        raise ValueError("beta must be strictly positive")
    return 2.0 * c12 * math.pi**2 * beta


def diag_kernel_taylor(order: int, params: DiagonalKernelParams,
                       cfg: QuadConfig = DEFAULT_CONFIG) -> QuadResult:
    """Truncated bracket expansion of the diagonal kernel.

    Integrates -[w^-1 (v-w) + (1/2)(v-w)^2 + (1/6) w (v-w)^3] e^(w^2/2)
    cut at the given order against sqrt(a pi) cos(rp) and the same merged
    prefactor as the closed form. Requires sqrt(2 beta) r >= 3 so the
    largest bracket scale is deep enough for the expansion to be
    meaningful; order 1 reproduces the explicit leading expression.
    """
    if order not in (1, 2, 3):
        raise ValueError("order must be 1, 2, or 3")
    r, beta = params.r, params.beta
    if math.sqrt(2.0 * beta) * r < 3.0:
        raise ValueError("expansion requires sqrt(2 beta) r >= 3")

    def integrand(rp):
        a, _, _, v, w, _, Ew = _merged_exponents(rp, r, beta)
        u = v - w
        series = u / w
        if order >= 2:
            series = series + 0.5 * u * u
        if order >= 3:
            series = series + w * u**3 / 6.0
        return -np.sqrt(np.pi * a) * series * np.exp(Ew) * np.cos(rp)

    res = integrate_1d(integrand, 0.0, math.pi / 2.0, cfg)
    scale = _prefactor(params)
    return QuadResult(value=scale * res.value,
                      error_estimate=abs(scale) * res.error_estimate,
                      evaluations=res.evaluations,
                      converged=res.converged)


# ---------------------------------------------------------------------------
# Second-order expansion terms
# ---------------------------------------------------------------------------

def log_singular_term(a_norm: float, c12: float) -> float:
    """Coulomb-weighted contraction of the sharp-limit diagonal kernel.

    c12 * 4 pi^3 * [ (sqrt(pi)/(2 a)) erf(a) + (1/2) E1(a^2) ]; carries a
    ln(a) singularity with coefficient -4 pi^3 c12 as a -> 0.
    """
    if not a_norm > 0:
        raise ValueError("a_norm must be strictly positive")
    smooth = math.sqrt(math.pi) / (2.0 * a_norm) * erf(a_norm)
    singular = 0.5 * exp_integral_e1(a_norm * a_norm)
    return c12 * 4.0 * math.pi**3 * (smooth + singular)


def log_singular_coefficient(c12: float) -> float:
    """Coefficient of ln(a) in log_singular_term as a -> 0."""
    return -4.0 * math.pi**3 * c12


def smooth_overlap_term(a, b) -> float:
    """Smooth Gaussian-overlap term 4 e^(-|2b-a|^2) e^(-|b|^2)."""
    av = as_vec3(a)
    bv = as_vec3(b)
    first = 2.0 * bv - av
    return 4.0 * math.exp(-float(np.dot(first, first))) \
        * math.exp(-float(np.dot(bv, bv)))


# ---------------------------------------------------------------------------
# 6-d Monte Carlo cusp checks
# ---------------------------------------------------------------------------

class CuspCheckResult(NamedTuple):
    """Cusp-slope estimate along with its linear-fit companions."""

    slope_estimate: float
    slope_predicted: float
    stderr: float
    intercept: float
    intercept_stderr: float
    radii: tuple[float, ...]
    averages: tuple[float, ...]
    averages_stderr: tuple[float, ...]
    samples: int
    seed: int


class ExchangeCheckResult(NamedTuple):
    """Leading-coefficient estimates for the two source orderings."""

    direct_leading: float
    exchange_leading: float
    stderr_direct: float
    stderr_exchange: float
    direct_value: float
    exchange_value: float
    value_stderr_direct: float
    value_stderr_exchange: float


def _cusp_mc(bvec: np.ndarray, beta: float, z2: np.ndarray,
             radii: np.ndarray, n_samples: int, seed: int,
             mollifier_slot: int, include_coulomb: bool):
    """Per-draw coupled MC over all radii; returns the draw matrix statistics.

    The estimated quantity at each radius is the average over z1
    directions of the 6-d integral
        int c/rho^4 * mollifier(s1) * test(s2) / |s1 - s2| ds1 ds2
    with c at its derived default, evaluated at the pair point determined
    by (z1, z2); mollifier_slot selects which source slot carries the
    narrow Gaussian. One underlying draw supplies every radius (the
    kernel-centered proposal component translates with the evaluation
    point), so radius-to-radius differences share their randomness and
    the fitted slope has far smaller variance than independent runs.
    """
    mA, mB, mC = _MC_MASSES
    K = len(radii)
    n_means = np.zeros(K)
    n_m2 = np.zeros(K)
    design = np.vstack([np.ones(K), radii]).T
    hat = np.linalg.solve(design.T @ design, design.T)
    coef_mean = np.zeros(2)
    coef_m2 = np.zeros(2)
    done = 0
    block_index = 0
    count = 0
    sb = 1.0 / math.sqrt(2.0 * beta)
    while done < n_samples:
        take = min(_MC_BLOCK, n_samples - done)
        rng = block_rng(seed, block_index)
        comp = rng.choice(3, size=_MC_BLOCK, p=[mA, mB, mC])[:take]
        gauss_narrow = bvec + rng.normal(size=(_MC_BLOCK, 3))[:take] * sb
        gauss_wide = rng.normal(size=(_MC_BLOCK, 3))[:take] / _SQRT2
        rho6 = rng.uniform(0.0, _MC_R6, size=_MC_BLOCK)[:take]
        om6 = rng.normal(size=(_MC_BLOCK, 6))[:take]
        om6 /= np.linalg.norm(om6, axis=1)[:, None]
        pair_base = rng.normal(size=(_MC_BLOCK, 3))[:take] / _SQRT2
        pair_u = _MC_R3 * np.sqrt(rng.uniform(size=_MC_BLOCK))[:take]
        om3 = rng.normal(size=(_MC_BLOCK, 3))[:take]
        om3 /= np.linalg.norm(om3, axis=1)[:, None]
        dirz = rng.normal(size=(_MC_BLOCK, 3))[:take]
        dirz /= np.linalg.norm(dirz, axis=1)[:, None]

        if mollifier_slot == 0:
            gA1, gA2 = gauss_narrow, gauss_wide
        else:
            gA1, gA2 = gauss_wide, gauss_narrow

        psi = np.empty((K, take))
        for k, radius in enumerate(radii):
            z1 = radius * dirz
            c1 = (z2 + z1) / _SQRT2
            c2 = (z2 - z1) / _SQRT2
            s1 = gA1.copy()
            s2 = gA2.copy()
            mB_mask = comp == 1
            s1[mB_mask] = c1[mB_mask] + rho6[mB_mask, None] * om6[mB_mask, :3]
            s2[mB_mask] = c2[mB_mask] + rho6[mB_mask, None] * om6[mB_mask, 3:]
            mC_mask = comp == 2
            if mollifier_slot == 0:
                s2[mC_mask] = pair_base[mC_mask]
                s1[mC_mask] = pair_base[mC_mask] + pair_u[mC_mask, None] * om3[mC_mask]
            else:
                s1[mC_mask] = pair_base[mC_mask]
                s2[mC_mask] = pair_base[mC_mask] + pair_u[mC_mask, None] * om3[mC_mask]
            psi[k] = _cusp_weights(s1, s2, c1, c2, bvec, beta,
                                   mollifier_slot, include_coulomb)
        n_means += psi.sum(axis=1)
        n_m2 += (psi * psi).sum(axis=1)
        coef = hat @ psi
        coef_mean += coef.sum(axis=1)
        coef_m2 += (coef * coef).sum(axis=1)
        count += take
        done += take
        block_index += 1
    means = n_means / count
    var = np.maximum(n_m2 / count - means**2, 0.0)
    means_se = np.sqrt(var / count)
    cmean = coef_mean / count
    cvar = np.maximum(coef_m2 / count - cmean**2, 0.0)
    cse = np.sqrt(cvar / count)
    return means, means_se, cmean, cse, count


def _cusp_weights(s1, s2, c1, c2, bvec, beta, mollifier_slot, include_coulomb):
    """Importance weights integrand/pdf for one batch of source points."""
    mA, mB, mC = _MC_MASSES
    d1 = s1 - c1
    d2 = s2 - c2
    rho2 = np.einsum('ij,ij->i', d1, d1) + np.einsum('ij,ij->i', d2, d2)
    pair = np.linalg.norm(s1 - s2, axis=1)
    if mollifier_slot == 0:
        narrow_pt, wide_pt = s1, s2
    else:
        narrow_pt, wide_pt = s2, s1
    dn = narrow_pt - bvec
    narrow = (beta / math.pi) ** 1.5 * np.exp(-beta * np.einsum('ij,ij->i', dn, dn))
    wide = np.exp(-np.einsum('ij,ij->i', wide_pt, wide_pt))
    coulomb = 1.0 / np.where(pair > 0, pair, 1.0) if include_coulomb else 1.0
    f = np.where((rho2 > 0) & (pair > 0),
                 C12_DEFAULT / np.where(rho2 > 0, rho2, 1.0) ** 2
                 * narrow * wide * coulomb, 0.0)

    pA = narrow * (1.0 / math.pi) ** 1.5 * wide
    rho = np.sqrt(rho2)
    pB = np.where(rho < _MC_R6,
                  1.0 / (_MC_R6 * math.pi**3 * np.maximum(rho, 1e-300) ** 5), 0.0)
    pC = (1.0 / math.pi) ** 1.5 * wide \
        * np.where(pair < _MC_R3,
                   1.0 / (2.0 * math.pi * _MC_R3**2 * np.maximum(pair, 1e-300)), 0.0)
    pdf = mA * pA + mB * pB + mC * pC
    return np.where(pdf > 0, f / np.where(pdf > 0, pdf, 1.0), 0.0)


def cusp_expansion_check(b, beta: float, z2, z1_norms: Sequence[float],
                         n_samples: int, seed: int) -> CuspCheckResult:
    """Monte-Carlo probe of the linear near-diagonal term of the 6-d kernel.

    For each radius in z1_norms the direction-averaged kernel value is
    estimated with common random numbers across radii; a least-squares
    line through the averages gives slope_estimate, compared against the
    predicted coefficient (1/sqrt(2)) * test(z2/sqrt(2)) *
    mollifier(z2/sqrt(2)). Raises InsufficientSamplesError when the slope
    standard error exceeds 30% of the predicted coefficient.
    """
    bvec = as_vec3(b)
    z2v = as_vec3(z2)
    radii = np.asarray(list(z1_norms), dtype=float)
    if len(radii) < 2:
        raise ValueError("need at least two radii for a linear fit")
    if np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise ValueError("z1_norms must be positive and strictly increasing")
    if radii[-1] > 0.2:
        raise ValueError("z1_norms must stay within the near-diagonal window (<= 0.2)")
    if not beta > 0:
        raise ValueError("beta must be strictly positive")

    means, means_se, cmean, cse, count = _cusp_mc(
        bvec, beta, z2v, radii, n_samples, seed,
        mollifier_slot=0, include_coulomb=True)
    half = z2v / _SQRT2
    db = half - bvec
    predicted = (1.0 / _SQRT2) * math.exp(-float(np.dot(half, half))) \
        * (beta / math.pi) ** 1.5 * math.exp(-beta * float(np.dot(db, db)))
    result = CuspCheckResult(
        slope_estimate=float(cmean[1]),
        slope_predicted=predicted,
        stderr=float(cse[1]),
        intercept=float(cmean[0]),
        intercept_stderr=float(cse[0]),
        radii=tuple(radii),
        averages=tuple(means),
        averages_stderr=tuple(means_se),
        samples=count,
        seed=seed,
    )
    if result.stderr > 0.30 * abs(predicted):
        raise InsufficientSamplesError(
            f"slope stderr {result.stderr:.3g} exceeds 30% of the predicted "
            f"coefficient {predicted:.3g}; increase n_samples")
    return result


def exchange_leading_equivalence(b, beta: float, n_samples: int, seed: int,
                                 z1_norms: Sequence[float] = (0.01, 0.02, 0.03, 0.04),
                                 include_coulomb: bool = True) -> ExchangeCheckResult:
    """Compare the leading near-diagonal coefficients of both source orderings.

    The direct ordering puts the narrow mollifier in the first source slot,
    the exchange ordering in the second; their direction-averaged leading
    coefficients agree because the coincidence product of the two source
    functions is symmetric. Estimates use independent substreams so the
    comparison is a genuine two-sample test.
    """
    bvec = as_vec3(b)
    radii = np.asarray(list(z1_norms), dtype=float)
    z2v = np.zeros(3)
    md, md_se, cd, cd_se, _ = _cusp_mc(bvec, beta, z2v, radii, n_samples,
                                       seed, 0, include_coulomb)
    seed_x = (seed + _EXCHANGE_STREAM_OFFSET) % (1 << 64)
    mx, mx_se, cx, cx_se, _ = _cusp_mc(bvec, beta, z2v, radii, n_samples,
                                       seed_x, 1, include_coulomb)
    return ExchangeCheckResult(
        direct_leading=float(cd[1]),
        exchange_leading=float(cx[1]),
        stderr_direct=float(cd_se[1]),
        stderr_exchange=float(cx_se[1]),
        direct_value=float(md[0]),
        exchange_value=float(mx[0]),
        value_stderr_direct=float(md_se[0]),
        value_stderr_exchange=float(mx_se[0]),
    )
