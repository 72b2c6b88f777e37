"""Model kernels, mollifiers, and coordinate transforms.

Provides the pointwise kernel zoo (Coulomb, screened Coulomb, the leading
fourth-power reciprocal kernel of the shifted 6-d resolvent, normalized
Gaussian bumps, and the unit-width Gaussian test function), the Gaussian
product rule, two-particle hyperspherical coordinates, and the rotated
pair/center-of-mass frame.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

VALID_VARIANTS = ("coulomb", "yukawa", "k12_leading", "gaussian_bump", "test_gaussian")

# Default constant of the leading resolvent kernel c / rho^4: the 6-d
# fundamental-solution normalization 2 * (2 pi)^-3 * 2 for the half-Laplacian.
C12_DEFAULT = 1.0 / (2.0 * math.pi**3)


def as_vec3(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ValueError("expected a 3-vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector components must be finite")
    return v


@dataclass(frozen=True)
class KernelSpec:
    """Tagged description of a model kernel.

    variant selects the functional form; the remaining fields apply only
    where the variant uses them. gaussian_bump is normalized to unit mass
    in its own dimension: (beta/pi)^(dim/2) exp(-beta |x - center|^2).
    """

    variant: str
    alpha: float | None = None
    c12: float | None = None
    center: tuple[float, ...] | None = None
    beta: float | None = None
    dim: int | None = None

    def __post_init__(self) -> None:
        if self.variant not in VALID_VARIANTS:
            raise ValueError(f"unknown kernel variant {self.variant!r}")
        if self.variant == "yukawa":
            if self.alpha is None or not self.alpha > 0:
                raise ValueError("yukawa requires alpha > 0")
        if self.variant == "gaussian_bump":
            if self.beta is None or not self.beta > 0:
                raise ValueError("gaussian_bump requires beta > 0")
            if self.dim not in (1, 2, 3):
                raise ValueError("gaussian_bump requires dim in {1, 2, 3}")
            center = self.center if self.center is not None else (0.0,) * self.dim
            center = tuple(float(c) for c in center)
            if len(center) != self.dim:
                raise ValueError("center length must match dim")
            object.__setattr__(self, "center", center)
        if self.variant == "k12_leading" and self.c12 is None:
            object.__setattr__(self, "c12", C12_DEFAULT)

    def to_json(self) -> str:
        payload = {"variant": self.variant}
        for name in ("alpha", "c12", "center", "beta", "dim"):
            value = getattr(self, name)
            if value is not None:
                payload[name] = list(value) if isinstance(value, tuple) else value
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "KernelSpec":
        payload = json.loads(text)
        if not isinstance(payload, dict) or "variant" not in payload:
            raise ValueError("kernel JSON must be an object with a 'variant' key")
        kwargs = dict(payload)
        variant = kwargs.pop("variant")
        if "center" in kwargs:
            kwargs["center"] = tuple(kwargs["center"])
        unknown = set(kwargs) - {"alpha", "c12", "center", "beta", "dim"}
        if unknown:
            raise ValueError(f"unknown kernel parameters: {sorted(unknown)}")
        return cls(variant=variant, **kwargs)


@dataclass(frozen=True)
class HypersphericalPoint:
    """Two-particle hyperspherical coordinates.

    x1 = t sin(r) direction(theta1, phi1), x2 = t cos(r) direction(theta2, phi2).
    """

    t: float
    r: float
    angles: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ValueError("hyper-radius must be non-negative")
        if not 0.0 <= self.r <= math.pi / 2.0:
            raise ValueError("hyperangle must lie in [0, pi/2]")
        th1, ph1, th2, ph2 = self.angles
        if not (0.0 <= th1 <= math.pi and 0.0 <= th2 <= math.pi):
            raise ValueError("polar angles must lie in [0, pi]")
        if not (0.0 <= ph1 < 2.0 * math.pi and 0.0 <= ph2 < 2.0 * math.pi):
            raise ValueError("azimuthal angles must lie in [0, 2 pi)")


def eval_kernel(spec: KernelSpec, p) -> float:
    """Pointwise kernel value; arity of p depends on the variant.

    coulomb / yukawa take a pair (x, y) of 3-vectors; k12_leading takes a
    quadruple (x1, x2, xh1, xh2); gaussian_bump takes a dim-vector;
    test_gaussian takes a 3-vector. Singular variants raise at exactly
    coincident points instead of returning infinity.
    """
    if spec.variant in ("coulomb", "yukawa"):
        x, y = (as_vec3(q) for q in p)
        sep = float(np.linalg.norm(x - y))
        if sep == 0.0:
            raise ZeroDivisionError("kernel is singular at coincident points")
        if spec.variant == "coulomb":
            return 1.0 / sep
        return math.exp(-spec.alpha * sep) / sep
    if spec.variant == "k12_leading":
        x1, x2, xh1, xh2 = (as_vec3(q) for q in p)
        rho2 = float(np.sum((x1 - xh1) ** 2) + np.sum((x2 - xh2) ** 2))
        if rho2 == 0.0:
            raise ZeroDivisionError("kernel is singular at coincident points")
        return spec.c12 / rho2**2
    if spec.variant == "gaussian_bump":
        x = np.asarray(p, dtype=float)
        if x.shape != (spec.dim,):
            raise ValueError(f"gaussian_bump point must have {spec.dim} components")
        d2 = float(np.sum((x - np.asarray(spec.center)) ** 2))
        return (spec.beta / math.pi) ** (spec.dim / 2.0) * math.exp(-spec.beta * d2)
    x = as_vec3(p)
    return math.exp(-float(np.dot(x, x)))


def gaussian_bump(x, center, beta: float, dim: int) -> float:
    """Normalized Gaussian mollifier of width 1/sqrt(beta) in dim dimensions."""
    return eval_kernel(KernelSpec("gaussian_bump", center=tuple(np.atleast_1d(center)),
                                  beta=beta, dim=dim), x)


def gaussian_product(alpha: float, a, beta: float, b):
    """Combine two Gaussians into one: coefficient, exponent, center.

    exp(-alpha|x-a|^2) exp(-beta|x-b|^2)
        = coefficient * exp(-(alpha+beta) |x - center|^2)
    with coefficient = exp(-(alpha beta/(alpha+beta)) |a-b|^2) and
    center = (alpha a + beta b) / (alpha + beta).
    """
    if not (alpha > 0 and beta > 0):
        raise ValueError("gaussian_product requires positive widths")
    av = as_vec3(a)
    bv = as_vec3(b)
    s = alpha + beta
    coefficient = math.exp(-(alpha * beta / s) * float(np.sum((av - bv) ** 2)))
    center = (alpha * av + beta * bv) / s
    return coefficient, s, center


def _direction(theta: float, phi: float) -> np.ndarray:
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


def _angles_of(v: np.ndarray) -> tuple[float, float]:
    n = float(np.linalg.norm(v))
    if n == 0.0:
        return 0.0, 0.0
    theta = math.acos(max(-1.0, min(1.0, v[2] / n)))
    phi = math.atan2(v[1], v[0]) % (2.0 * math.pi)
    return theta, phi


def to_hyperspherical(x1, x2) -> HypersphericalPoint:
    """Two-particle hyperspherical coordinates of a 6-d point (x1, x2).

    r is 0 when both vectors vanish (convention), pi/2 when only x2 does.
    """
    v1 = as_vec3(x1)
    v2 = as_vec3(x2)
    n1 = float(np.linalg.norm(v1))
    n2 = float(np.linalg.norm(v2))
    t = math.hypot(n1, n2)
    r = math.atan2(n1, n2) if t > 0 else 0.0
    th1, ph1 = _angles_of(v1)
    th2, ph2 = _angles_of(v2)
    return HypersphericalPoint(t=t, r=r, angles=(th1, ph1, th2, ph2))


def from_hyperspherical(p: HypersphericalPoint) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of to_hyperspherical."""
    th1, ph1, th2, ph2 = p.angles
    x1 = p.t * math.sin(p.r) * _direction(th1, ph1)
    x2 = p.t * math.cos(p.r) * _direction(th2, ph2)
    return x1, x2


def volume_element(p: HypersphericalPoint) -> float:
    """Jacobian density t^5 sin^2(r) cos^2(r) sin(theta1) sin(theta2)."""
    th1, _, th2, _ = p.angles
    return (p.t**5 * math.sin(p.r) ** 2 * math.cos(p.r) ** 2
            * math.sin(th1) * math.sin(th2))


def center_of_mass(x1, x2) -> tuple[np.ndarray, np.ndarray]:
    """Rotated pair frame: z1 = (x1 - x2)/sqrt(2), z2 = (x1 + x2)/sqrt(2)."""
    v1 = as_vec3(x1)
    v2 = as_vec3(x2)
    s = math.sqrt(2.0)
    return (v1 - v2) / s, (v1 + v2) / s


def center_of_mass_inverse(z1, z2) -> tuple[np.ndarray, np.ndarray]:
    """Inverse frame change: x1 = (z2 + z1)/sqrt(2), x2 = (z2 - z1)/sqrt(2)."""
    w1 = as_vec3(z1)
    w2 = as_vec3(z2)
    s = math.sqrt(2.0)
    return (w2 + w1) / s, (w2 - w1) / s
