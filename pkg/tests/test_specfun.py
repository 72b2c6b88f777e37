"""Checks for the scalar special-function evaluators.

Reference values are frozen literals produced by tests/oracles.py, which
computes them with scipy and mpmath only and never imports this package.
"""
import math

import numpy as np
import pytest

from neardiag.specfun import (AccuracyBudget, bessel_k0, bessel_k0_scaled,
                              bessel_k1, bessel_k2, dawson, erf,
                              exp_integral_e1, pcf_V_mhalf)

EULER_GAMMA = 0.5772156649015329

# frozen from tests/oracles.py (scipy.special.dawsn)
DAWSON_VALUES = (
    (0.25, 0.23983916356289822),
    (0.5, 0.4244363835020223),
    (1.0, 0.5380795069127684),
    (2.0, 0.301340388923792),
    (5.9, 0.08601968199264806),
    (6.1, 0.0831163305083515),
    (10.0, 0.05025384718759854),
    (50.0, 0.010002001201201684),
)

# frozen from tests/oracles.py (scipy.special.kv)
BESSEL_K_VALUES = (
    (0, 0.1, 2.427069024702017),
    (0, 1.0, 0.42102443824070834),
    (0, 10.0, 1.778006231616765e-05),
    (1, 0.1, 9.853844780870606),
    (1, 1.0, 0.6019072301972346),
    (1, 10.0, 1.8648773453825585e-05),
    (2, 0.1, 199.5039646421141),
    (2, 1.0, 1.6248388986351774),
    (2, 10.0, 2.1509817006932767e-05),
)

# frozen from tests/oracles.py (scipy.special.erf)
ERF_VALUES = (
    (0.1, 0.1124629160182849),
    (0.5, 0.5204998778130465),
    (1.0, 0.8427007929497148),
    (3.0, 0.9999779095030014),
    (5.5, 0.9999999999999927),
)

# frozen from tests/oracles.py (scipy.special.exp1)
E1_VALUES = (
    (0.05, 2.467898488509974),
    (0.5, 0.5597735947761608),
    (1.0, 0.2193839343955205),
    (5.0, 0.0011482955912753257),
    (20.0, 9.835525290649882e-11),
)

# frozen from tests/oracles.py (mpmath.pcfv at 30 digits); x = 0 is not in
# the grid because the value there is exactly zero and is asserted directly
PCF_V_VALUES = (
    (0.25, 0.19844355867122954),
    (0.5, 0.3909905134339046),
    (1.0, 0.742538470703127),
    (2.0, 1.3880542010384362),
    (5.0, 86.48429193247705),
)

_K_BY_ORDER = {0: bessel_k0, 1: bessel_k1, 2: bessel_k2}


def _rel(got: float, want: float) -> float:
    return abs(got - want) / abs(want)


class TestFrozenOracles:
    def test_dawson_table(self):
        for x, want in DAWSON_VALUES:
            assert _rel(dawson(x), want) <= 1e-12

    def test_bessel_table(self):
        for order, x, want in BESSEL_K_VALUES:
            assert _rel(_K_BY_ORDER[order](x), want) <= 1e-10

    def test_erf_table(self):
        for x, want in ERF_VALUES:
            assert _rel(erf(x), want) <= 1e-12

    def test_e1_table(self):
        for x, want in E1_VALUES:
            assert _rel(exp_integral_e1(x), want) <= 1e-10

    def test_pcf_table(self):
        for x, want in PCF_V_VALUES:
            assert _rel(pcf_V_mhalf(x), want) <= 1e-12


class TestDawson:
    def test_zero_and_reference_point(self):
        assert dawson(0.0) == 0.0
        assert math.copysign(1.0, dawson(0.0)) == 1.0
        assert abs(dawson(1.0) - 0.5380795069) <= 1e-9

    def test_exactly_odd(self):
        for x in (0.3, 1.0, 4.0, 6.5, 20.0):
            assert dawson(-x) == -dawson(x)

    def test_ode_residual(self):
        """F'(x) = 1 - 2 x F(x), checked with a central difference."""
        xs = np.linspace(-5.0, 5.0, 201)
        h = 1e-5
        fd = (dawson(xs + h) - dawson(xs - h)) / (2.0 * h)
        residual = fd - (1.0 - 2.0 * xs * dawson(xs))
        assert np.max(np.abs(residual)) <= 1e-9

    def test_branch_continuity(self):
        # series and asymptotic lanes hand off at 6
        assert abs(dawson(6.0 - 1e-9) - dawson(6.0 + 1e-9)) <= 1e-9

    def test_large_x_tail(self):
        # leading tail is 1/(2x)
        for x in (30.0, 100.0, 500.0):
            assert _rel(dawson(x), 1.0 / (2.0 * x)) <= 1e-3

    def test_positive_on_positive_axis(self):
        assert np.all(dawson(np.geomspace(1e-3, 50.0, 40)) > 0.0)


class TestParabolicCylinder:
    def test_zero(self):
        assert pcf_V_mhalf(0.0) == 0.0

    def test_small_x_slope(self):
        # V(-1/2, x) ~ sqrt(2/pi) x near the origin
        x = 1e-6
        assert _rel(pcf_V_mhalf(x) / x, math.sqrt(2.0 / math.pi)) <= 1e-10

    def test_large_x_form(self):
        # sqrt(2/pi) exp(x^2/4) / x, accurate to a few percent at x = 5
        x = 5.0
        asym = math.sqrt(2.0 / math.pi) * math.exp(x * x / 4.0) / x
        assert _rel(pcf_V_mhalf(x), asym) <= 0.05

    def test_dawson_identity(self):
        xs = np.linspace(0.0, 5.0, 41)
        want = (2.0 / math.sqrt(math.pi)) * np.exp(xs * xs / 4.0) * dawson(xs / math.sqrt(2.0))
        got = pcf_V_mhalf(xs)
        assert np.max(np.abs(got - want)) <= 1e-12 * np.max(np.abs(want))

    def test_overflow_guard(self):
        assert np.isfinite(pcf_V_mhalf(52.0))
        with pytest.raises(OverflowError):
            pcf_V_mhalf(52.1)
        with pytest.raises(OverflowError):
            pcf_V_mhalf(-60.0)


class TestBessel:
    def test_k0_at_one(self):
        assert abs(bessel_k0(1.0) - 0.42102443824070834) <= 1e-12

    def test_small_x_log_form(self):
        # K0(x) + ln(x/2) + gamma -> 0
        x = 1e-4
        assert abs(bessel_k0(x) + math.log(x / 2.0) + EULER_GAMMA) <= 1e-6

    def test_k2_small_x_pole(self):
        x = 1e-3
        assert _rel(bessel_k2(x), 2.0 / x**2) <= 1e-6

    def test_recurrence(self):
        xs = np.geomspace(0.05, 40.0, 60)
        lhs = bessel_k2(xs)
        rhs = bessel_k0(xs) + (2.0 / xs) * bessel_k1(xs)
        assert np.max(np.abs(lhs - rhs) / np.abs(lhs)) <= 1e-9

    def test_derivative_identity(self):
        """K0'(x) = -K1(x): independent cross-check of the two order lanes."""
        xs = np.linspace(0.5, 20.0, 40)
        h = 1e-5
        fd = (bessel_k0(xs + h) - bessel_k0(xs - h)) / (2.0 * h)
        assert np.max(np.abs(fd + bessel_k1(xs)) / bessel_k1(xs)) <= 1e-6

    def test_scaled_matches_raw(self):
        xs = np.linspace(0.5, 30.0, 40)
        rel = np.abs(bessel_k0_scaled(xs) - np.exp(xs) * bessel_k0(xs))
        assert np.max(rel / (np.exp(xs) * bessel_k0(xs))) <= 1e-12

    def test_scaled_survives_where_raw_underflows(self):
        # raw value at 700 is ~5e-306, one step from denormal territory
        assert bessel_k0(700.0) < 1e-300
        assert 0.04 < bessel_k0_scaled(700.0) < 0.05

    def test_monotone_decreasing(self):
        xs = np.geomspace(0.1, 20.0, 50)
        for fn in (bessel_k0, bessel_k1, bessel_k2):
            vals = fn(xs)
            assert np.all(np.diff(vals) < 0.0)

    def test_domain_errors(self):
        for fn in (bessel_k0, bessel_k1, bessel_k2, bessel_k0_scaled):
            with pytest.raises(ValueError, match="strictly positive"):
                fn(0.0)
            with pytest.raises(ValueError, match="strictly positive"):
                fn(-1.0)


class TestErf:
    def test_reference_points(self):
        assert abs(erf(1.0) - 0.8427007929497148) <= 1e-12
        assert erf(0.0) == 0.0

    def test_exactly_odd(self):
        for x in (0.2, 1.0, 3.0, 7.0):
            assert erf(-x) == -erf(x)

    def test_saturation(self):
        assert erf(6.5) == 1.0
        assert erf(-6.5) == -1.0

    def test_monotone_increasing(self):
        xs = np.linspace(-4.0, 4.0, 81)
        assert np.all(np.diff(erf(xs)) > 0.0)


class TestExpIntegral:
    def test_reference_points(self):
        assert abs(exp_integral_e1(1.0) - 0.2193839343955205) <= 1e-12

    def test_series_cf_handoff(self):
        # lanes switch at 1
        assert abs(exp_integral_e1(1.0 - 1e-9) - exp_integral_e1(1.0 + 1e-9)) <= 1e-8

    def test_derivative_identity(self):
        """E1'(x) = -exp(-x)/x."""
        xs = np.linspace(0.2, 5.0, 30)
        h = 1e-6
        fd = (exp_integral_e1(xs + h) - exp_integral_e1(xs - h)) / (2.0 * h)
        want = -np.exp(-xs) / xs
        assert np.max(np.abs(fd - want) / np.abs(want)) <= 1e-6

    def test_domain_error(self):
        with pytest.raises(ValueError, match="strictly positive"):
            exp_integral_e1(0.0)


class TestApiShape:
    def test_scalar_in_scalar_out(self):
        assert isinstance(dawson(0.5), float)
        assert isinstance(bessel_k0(1.0), float)

    def test_array_in_array_out(self):
        xs = np.array([0.25, 0.5, 1.0])
        got = dawson(xs)
        assert isinstance(got, np.ndarray)
        for x, g in zip(xs, got):
            assert g == dawson(float(x))

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            AccuracyBudget(rel_tol=0.0)
        with pytest.raises(ValueError):
            AccuracyBudget(abs_tol=-1.0)
        with pytest.raises(ValueError):
            AccuracyBudget(max_terms=0)

    def test_coarse_budget_still_reasonable(self):
        coarse = AccuracyBudget(rel_tol=1e-4, max_terms=8)
        got = dawson(1.0, budget=coarse)
        assert abs(got - dawson(1.0)) < 1e-2
        assert got != dawson(1.0)
