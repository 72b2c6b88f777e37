"""Checks for the kernel zoo, Gaussian algebra, and coordinate frames."""
import json
import math

import numpy as np
import pytest

from neardiag.kernels import (C12_DEFAULT, HypersphericalPoint, KernelSpec,
                              as_vec3, center_of_mass, center_of_mass_inverse,
                              eval_kernel, from_hyperspherical, gaussian_bump,
                              gaussian_product, to_hyperspherical,
                              volume_element)
from neardiag.quadrature import integrate_1d, integrate_2d


class TestKernelValues:
    def test_coulomb(self):
        val = eval_kernel(KernelSpec("coulomb"), ((0.0, 0.0, 0.0), (2.0, 0.0, 0.0)))
        assert val == 0.5

    def test_yukawa(self):
        spec = KernelSpec("yukawa", alpha=1.0)
        val = eval_kernel(spec, ((0.0, 0.0, 0.0), (1.0, 0.0, 0.0)))
        assert abs(val - math.exp(-1.0)) <= 1e-15

    def test_pair_symmetry(self):
        x = (0.3, -1.2, 0.7)
        y = (1.1, 0.4, -0.2)
        for spec in (KernelSpec("coulomb"), KernelSpec("yukawa", alpha=0.5)):
            assert eval_kernel(spec, (x, y)) == eval_kernel(spec, (y, x))

    def test_quartic_inverse_distance(self):
        spec = KernelSpec("k12_leading")
        z = (0.0, 0.0, 0.0)
        val = eval_kernel(spec, ((1.0, 0.0, 0.0), z, z, z))
        assert abs(val - C12_DEFAULT) <= 1e-18
        # doubling the 6-d separation divides the value by 16
        val2 = eval_kernel(spec, ((2.0, 0.0, 0.0), z, z, z))
        assert abs(val / val2 - 16.0) <= 1e-12

    def test_quartic_exchange_symmetry(self):
        spec = KernelSpec("k12_leading")
        x1, x2 = (0.2, 0.1, -0.4), (1.0, -0.3, 0.8)
        h1, h2 = (0.0, 0.5, 0.0), (-0.2, 0.0, 0.3)
        assert eval_kernel(spec, (x1, x2, h1, h2)) == eval_kernel(spec, (x2, x1, h2, h1))

    def test_bump_peak_value(self):
        spec = KernelSpec("gaussian_bump", beta=4.0, dim=3)
        val = eval_kernel(spec, (0.0, 0.0, 0.0))
        assert abs(val - (4.0 / math.pi) ** 1.5) <= 1e-14

    def test_test_gaussian(self):
        assert eval_kernel(KernelSpec("test_gaussian"), (0.0, 0.0, 0.0)) == 1.0
        v = eval_kernel(KernelSpec("test_gaussian"), (1.0, 1.0, 1.0))
        assert abs(v - math.exp(-3.0)) <= 1e-15

    def test_singular_at_coincidence(self):
        z = (0.5, 0.5, 0.5)
        with pytest.raises(ZeroDivisionError, match="coincident"):
            eval_kernel(KernelSpec("coulomb"), (z, z))
        with pytest.raises(ZeroDivisionError, match="coincident"):
            eval_kernel(KernelSpec("k12_leading"), (z, z, z, z))

    def test_yukawa_coulomb_gap_bounded_by_screening(self):
        # (1 - exp(-alpha r))/r <= alpha pointwise
        coulomb = KernelSpec("coulomb")
        for alpha in (0.1, 0.01):
            yuk = KernelSpec("yukawa", alpha=alpha)
            for sep in (0.05, 0.5, 1.0, 4.0, 20.0):
                pair = ((0.0, 0.0, 0.0), (sep, 0.0, 0.0))
                gap = eval_kernel(coulomb, pair) - eval_kernel(yuk, pair)
                assert 0.0 <= gap <= alpha


class TestKernelSpec:
    def test_unknown_variant(self):
        with pytest.raises(ValueError, match="unknown kernel variant"):
            KernelSpec("lennard_jones")

    def test_yukawa_requires_screening(self):
        with pytest.raises(ValueError, match="alpha > 0"):
            KernelSpec("yukawa")
        with pytest.raises(ValueError, match="alpha > 0"):
            KernelSpec("yukawa", alpha=-1.0)

    def test_bump_requires_width_and_dim(self):
        with pytest.raises(ValueError, match="beta > 0"):
            KernelSpec("gaussian_bump", dim=1)
        with pytest.raises(ValueError, match="dim"):
            KernelSpec("gaussian_bump", beta=1.0, dim=4)
        with pytest.raises(ValueError, match="center length"):
            KernelSpec("gaussian_bump", beta=1.0, dim=2, center=(0.0,))

    def test_bump_center_defaults_to_origin(self):
        spec = KernelSpec("gaussian_bump", beta=1.0, dim=2)
        assert spec.center == (0.0, 0.0)

    def test_default_prefactor(self):
        assert C12_DEFAULT == 1.0 / (2.0 * math.pi**3)
        assert KernelSpec("k12_leading").c12 == C12_DEFAULT
        assert KernelSpec("k12_leading", c12=2.0).c12 == 2.0

    def test_json_round_trip(self):
        specs = (
            KernelSpec("coulomb"),
            KernelSpec("yukawa", alpha=0.25),
            KernelSpec("k12_leading", c12=3.0),
            KernelSpec("gaussian_bump", beta=100.0, dim=2, center=(0.5, -0.5)),
        )
        for spec in specs:
            assert KernelSpec.from_json(spec.to_json()) == spec

    def test_json_rejects_garbage(self):
        with pytest.raises(ValueError, match="'variant'"):
            KernelSpec.from_json(json.dumps([1, 2]))
        with pytest.raises(ValueError, match="'variant'"):
            KernelSpec.from_json(json.dumps({"alpha": 1.0}))
        with pytest.raises(ValueError, match="unknown kernel parameters"):
            KernelSpec.from_json(json.dumps({"variant": "coulomb", "mass": 1.0}))


class TestGaussianAlgebra:
    def test_product_rule_pointwise(self):
        rng = np.random.default_rng(915)
        for _ in range(100):
            alpha, beta = rng.uniform(0.2, 5.0, size=2)
            a, b, x = rng.normal(size=(3, 3))
            coeff, s, center = gaussian_product(alpha, a, beta, b)
            lhs = (math.exp(-alpha * float(np.sum((x - a) ** 2)))
                   * math.exp(-beta * float(np.sum((x - b) ** 2))))
            rhs = coeff * math.exp(-s * float(np.sum((x - center) ** 2)))
            assert abs(lhs - rhs) <= 1e-12 * max(lhs, 1e-300)

    def test_product_exponent_and_center(self):
        coeff, s, center = gaussian_product(2.0, (1.0, 0.0, 0.0), 3.0, (0.0, 0.0, 0.0))
        assert s == 5.0
        assert np.allclose(center, (0.4, 0.0, 0.0), atol=1e-15)
        assert abs(coeff - math.exp(-6.0 / 5.0)) <= 1e-15

    def test_product_requires_positive_widths(self):
        with pytest.raises(ValueError, match="positive widths"):
            gaussian_product(0.0, (0, 0, 0), 1.0, (0, 0, 0))

    def test_bump_helper_matches_spec(self):
        v1 = gaussian_bump((0.1, 0.2), (0.0, 0.0), 50.0, 2)
        v2 = eval_kernel(KernelSpec("gaussian_bump", beta=50.0, dim=2), (0.1, 0.2))
        assert v1 == v2

    def test_bump_unit_mass_2d(self):
        # practically all mass sits within the [-1, 1]^2 box at beta = 50
        f = lambda x, y: np.vectorize(
            lambda xi, yi: gaussian_bump((xi, yi), (0.0, 0.0), 50.0, 2))(x, y)
        res = integrate_2d(f, ((-1.0, 1.0), (-1.0, 1.0)))
        assert abs(res.value - 1.0) <= 1e-9

    def test_bump_concentrates_to_point_mass(self):
        # moment error against f(center) shrinks as the width grows
        f = lambda x: np.cos(1.3 * x)
        center = 0.25
        errors = []
        for beta in (1e2, 1e3, 1e4):
            g = lambda x: f(x) * np.vectorize(
                lambda xi: gaussian_bump((xi,), (center,), beta, 1))(x)
            res = integrate_1d(g, center - 1.0, center + 1.0)
            errors.append(abs(res.value - f(center)))
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] <= 1e-4


class TestCoordinateFrames:
    def test_hyperspherical_round_trip(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            x1, x2 = rng.normal(size=(2, 3))
            p = to_hyperspherical(x1, x2)
            y1, y2 = from_hyperspherical(p)
            assert np.max(np.abs(y1 - x1)) <= 1e-14 * max(1.0, np.max(np.abs(x1)))
            assert np.max(np.abs(y2 - x2)) <= 1e-14 * max(1.0, np.max(np.abs(x2)))

    def test_hyperradius_is_euclidean_norm(self):
        p = to_hyperspherical((3.0, 0.0, 0.0), (0.0, 4.0, 0.0))
        assert abs(p.t - 5.0) <= 1e-15

    def test_degenerate_conventions(self):
        both = to_hyperspherical((0.0, 0.0, 0.0), (0.0, 0.0, 0.0))
        assert both.t == 0.0 and both.r == 0.0
        only_first = to_hyperspherical((1.0, 0.0, 0.0), (0.0, 0.0, 0.0))
        assert abs(only_first.r - math.pi / 2.0) <= 1e-15
        only_second = to_hyperspherical((0.0, 0.0, 0.0), (1.0, 0.0, 0.0))
        assert only_second.r == 0.0

    def test_point_validation(self):
        with pytest.raises(ValueError, match="hyper-radius"):
            HypersphericalPoint(t=-1.0, r=0.0, angles=(0.0, 0.0, 0.0, 0.0))
        with pytest.raises(ValueError, match="hyperangle"):
            HypersphericalPoint(t=1.0, r=2.0, angles=(0.0, 0.0, 0.0, 0.0))
        with pytest.raises(ValueError, match="polar"):
            HypersphericalPoint(t=1.0, r=0.5, angles=(4.0, 0.0, 0.0, 0.0))
        with pytest.raises(ValueError, match="azimuthal"):
            HypersphericalPoint(t=1.0, r=0.5, angles=(0.0, 7.0, 0.0, 0.0))

    def test_six_ball_volume(self):
        """Product of the separable jacobian factors gives pi^3 R^6 / 6."""
        radial = integrate_1d(lambda t: t**5, 0.0, 1.0)
        angular = integrate_1d(lambda r: np.sin(r) ** 2 * np.cos(r) ** 2,
                               0.0, math.pi / 2.0)
        polar = integrate_1d(np.sin, 0.0, math.pi)
        vol = (2.0 * math.pi) ** 2 * radial.value * angular.value * polar.value**2
        assert abs(vol - math.pi**3 / 6.0) <= 1e-10

    def test_volume_element_formula(self):
        p = HypersphericalPoint(t=2.0, r=0.7, angles=(1.0, 0.3, 2.0, 4.0))
        want = (2.0**5 * math.sin(0.7) ** 2 * math.cos(0.7) ** 2
                * math.sin(1.0) * math.sin(2.0))
        assert abs(volume_element(p) - want) <= 1e-14

    def test_pair_frame_round_trip(self):
        rng = np.random.default_rng(7)
        x1, x2 = rng.normal(size=(2, 3))
        z1, z2 = center_of_mass(x1, x2)
        y1, y2 = center_of_mass_inverse(z1, z2)
        assert np.max(np.abs(y1 - x1)) <= 1e-15
        assert np.max(np.abs(y2 - x2)) <= 1e-15

    def test_pair_frame_is_isometric(self):
        x1 = np.array([0.3, -1.0, 2.0])
        x2 = np.array([1.5, 0.2, -0.4])
        z1, z2 = center_of_mass(x1, x2)
        lhs = float(np.sum(z1**2) + np.sum(z2**2))
        rhs = float(np.sum(x1**2) + np.sum(x2**2))
        assert abs(lhs - rhs) <= 1e-13
        assert np.allclose(z1, (x1 - x2) / math.sqrt(2.0), atol=1e-15)

    def test_vector_validation(self):
        with pytest.raises(ValueError, match="3-vector"):
            as_vec3((1.0, 2.0))
        with pytest.raises(ValueError, match="finite"):
            as_vec3((1.0, math.nan, 0.0))
