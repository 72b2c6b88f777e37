"""Independent reference implementations for the test suite.

Everything here is built from scipy/mpmath primitives or raw quadrature
of defining integrals and never imports the package under test. The
numeric literals frozen into the test modules were produced by running
this file directly; the tests re-derive a few cheap ones at collection
time to guard against oracle drift, and compare the production code
against the frozen values only.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad
from scipy.special import dawsn, erf as sp_erf, exp1, kv, kve

SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)


# --- special functions -----------------------------------------------------

def oracle_dawson(x: float) -> float:
    return float(dawsn(x))


def oracle_bessel_k(nu: int, x: float) -> float:
    return float(kv(nu, x))


def oracle_bessel_k_scaled(nu: int, x: float) -> float:
    return float(kve(nu, x))


def oracle_erf(x: float) -> float:
    return float(sp_erf(x))


def oracle_e1(x: float) -> float:
    return float(exp1(x))


def oracle_pcf_v_mhalf(x: float) -> float:
    # mpmath's parabolic cylinder V; dps bumped so the frozen digits are exact
    import mpmath as mp
    with mp.workdps(30):
        return float(mp.pcfv(-0.5, x))


# --- contracted kernels ----------------------------------------------------

def oracle_coulomb2d(rho: float) -> float:
    """Scaled-Bessel closed form of the 2-d contracted Coulomb kernel."""
    return -float(kve(0, rho * rho / 4.0)) / (4.0 * SQRT2PI)


def oracle_coulomb2d_quad(rho: float) -> float:
    """Same quantity from the defining radial integral (independent route)."""
    x = rho * rho / 4.0

    def f(t: float) -> float:
        return math.exp(x - x * math.cosh(t))

    val, _ = quad(f, 0.0, 40.0, epsabs=1e-14, epsrel=1e-12, limit=400)
    return -val / (4.0 * SQRT2PI)


def oracle_mollified(d: float, beta: float) -> float:
    shrink = 1.0 - 1.0 / beta

    def f(u: float) -> float:
        u2 = u * u
        return math.sqrt(math.pi / (1.0 + 2.0 * shrink * u2)) * math.exp(-u2 * d * d)

    val, _ = quad(f, 0.0, math.sqrt(beta / 2.0), epsabs=1e-13, epsrel=1e-12,
                  limit=400)
    return 2.0 * val


def oracle_diag_kernel(r: float, beta: float, c12: float = 1.0) -> float:
    """Closed hyperangular form via scipy's Dawson function and quad.

    The exponents v^2/2 - p and w^2/2 - p are always <= 0; they are formed
    by float subtraction before exponentiation, which costs a few digits
    at beta r^2 ~ 1e4 but never overflows.
    """
    p = (beta + 1.0) * r * r

    def integrand(t: float) -> float:
        s, c = math.sin(t), math.cos(t)
        a = beta * s * s + c * c
        b = 2.0 * beta * s * r
        d = 2.0 * c * r
        root = math.sqrt(2.0 * a)
        v = (b - d) / root
        w = (b + d) / root
        ev = 0.5 * v * v - p
        ew = 0.5 * w * w - p
        bracket = (math.sqrt(math.pi * a) * (math.exp(ev) - math.exp(ew))
                   + math.sqrt(2.0 * math.pi * a)
                   * (w * math.exp(ew) * dawsn(w / SQRT2)
                      - v * math.exp(ev) * dawsn(v / SQRT2)))
        return bracket * math.cos(t)

    val, _ = quad(integrand, 0.0, math.pi / 2.0, epsabs=1e-13, epsrel=1e-12,
                  limit=800)
    return 2.0 * c12 * math.sqrt(math.pi * beta) / (r * r) * val


def oracle_diag_kernel_mp(r: float, beta: float, c12: float = 1.0) -> float:
    """30-digit transcription; used to spot-check the scipy oracle."""
    import mpmath as mp
    with mp.workdps(30):
        rr, bb = mp.mpf(r), mp.mpf(beta)
        p = (bb + 1) * rr * rr

        def dawson(x):
            return mp.sqrt(mp.pi) / 2 * mp.exp(-x * x) * mp.erfi(x)

        def integrand(t):
            s, c = mp.sin(t), mp.cos(t)
            a = bb * s * s + c * c
            b = 2 * bb * s * rr
            d = 2 * c * rr
            root = mp.sqrt(2 * a)
            v = (b - d) / root
            w = (b + d) / root
            ev = v * v / 2 - p
            ew = w * w / 2 - p
            bracket = (mp.sqrt(mp.pi * a) * (mp.exp(ev) - mp.exp(ew))
                       + mp.sqrt(2 * mp.pi * a)
                       * (w * mp.exp(ew) * dawson(w / mp.sqrt(2))
                          - v * mp.exp(ev) * dawson(v / mp.sqrt(2))))
            return bracket * mp.cos(t)

        val = mp.quad(integrand, [0, mp.pi / 2])
        return float(2 * c12 * mp.sqrt(mp.pi * bb) / (rr * rr) * val)


def oracle_log_singular(a: float, c12: float) -> float:
    return c12 * 4.0 * math.pi**3 * (math.sqrt(math.pi) / (2.0 * a)
                                     * float(sp_erf(a))
                                     + 0.5 * float(exp1(a * a)))


def oracle_cusp_slope(beta: float, b: np.ndarray, z2: np.ndarray) -> float:
    """Predicted linear-in-|z1| coefficient of the averaged kernel value."""
    z = np.asarray(z2, dtype=float) / SQRT2
    phi = math.exp(-float(z @ z))
    moll = (beta / math.pi) ** 1.5 * math.exp(
        -beta * float((z - np.asarray(b, dtype=float)) @ (z - np.asarray(b, dtype=float))))
    return phi * moll / SQRT2


# --- frozen-literal generator ---------------------------------------------

def _emit(name: str, pairs) -> None:
    print(f"{name} = (")
    for args, value in pairs:
        print(f"    ({', '.join(repr(a) for a in args)}, {value!r}),")
    print(")")


def main() -> None:
    _emit("DAWSON_VALUES", [((x,), oracle_dawson(x))
                            for x in (0.25, 0.5, 1.0, 2.0, 5.9, 6.1, 10.0, 50.0)])
    _emit("BESSEL_K_VALUES", [((nu, x), oracle_bessel_k(nu, x))
                              for nu in (0, 1, 2) for x in (0.1, 1.0, 10.0)])
    _emit("ERF_VALUES", [((x,), oracle_erf(x)) for x in (0.1, 0.5, 1.0, 3.0, 5.5)])
    _emit("E1_VALUES", [((x,), oracle_e1(x)) for x in (0.05, 0.5, 1.0, 5.0, 20.0)])
    # x = 0 is skipped: the value is exactly 0 and mpmath's hypercomb
    # cannot bracket it; the tests assert the zero directly
    _emit("PCF_V_VALUES", [((x,), oracle_pcf_v_mhalf(x))
                           for x in (0.25, 0.5, 1.0, 2.0, 5.0)])
    _emit("COULOMB2D_VALUES", [((rho,), oracle_coulomb2d(rho))
                               for rho in (0.1, 0.5, 1.0, 2.0)])
    _emit("MOLLIFIED_VALUES", [((d, beta), oracle_mollified(d, beta))
                               for d, beta in ((0.0, 1000.0), (0.5, 100.0),
                                               (1.0, 100.0), (1.0, 100000.0),
                                               (2.0, 1000.0))])
    _emit("DIAG_KERNEL_VALUES", [((r, beta), oracle_diag_kernel(r, beta))
                                 for r, beta in ((0.05, 25.0), (0.5, 25.0),
                                                 (0.3, 1000.0), (0.5, 1000.0),
                                                 (1.0, 1000.0), (1.5, 3000.0),
                                                 (0.5, 10000.0), (0.5, 100000.0))])
    _emit("DIAG_KERNEL_MP_SPOTS", [((r, beta), oracle_diag_kernel_mp(r, beta))
                                   for r, beta in ((0.5, 25.0), (0.5, 1000.0))])
    _emit("LOG_SINGULAR_VALUES", [((a,), oracle_log_singular(a, 1.0))
                                  for a in (0.001, 0.01, 0.1, 1.0)])
    print("CUSP_SLOPE_B0_BETA25 = %r" % oracle_cusp_slope(
        25.0, np.zeros(3), np.zeros(3)))
    print("MOLLIFIED_SHARP_TARGET = %r" % (-4.0 * math.pi * oracle_coulomb2d(1.0)))


if __name__ == "__main__":
    main()
