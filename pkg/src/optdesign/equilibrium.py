"""Closed-form equilibrium measures and the weighted disk Green function.

Each supported space carries an explicit limiting density: the arcsine
law on an interval, its product form on the cube, inverse-square-root
boundary laws on the ball and simplex, and, for the Gaussian-weighted
complex ball, the uniform measure on the ball of radius 1/sqrt(2).
Normalization constants are obtained by quadrature at construction (the
integrands are desingularized with sine substitutions), never from
hard-coded values, and every measure validates its own total mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma

from .basis import as_points

_MAX_MOMENT_DEGREE = 40


def _quad(f, lo: float, hi: float) -> float:
    val, _ = quad(f, lo, hi, epsabs=1e-12, epsrel=1e-12, limit=200)
    return float(val)


def _beta_quad(p: float, q: float) -> float:
    """integral of t^p (1-t)^q over [0, 1] via t = sin(theta)^2."""
    return _quad(
        lambda th: 2.0 * math.sin(th) ** (2 * p + 1) * math.cos(th) ** (2 * q + 1),
        0.0,
        0.5 * math.pi,
    )


def _sin_power(k: int) -> float:
    """integral of sin(theta)^k over [0, pi/2]."""
    return _quad(lambda th: math.sin(th) ** k, 0.0, 0.5 * math.pi)


def _sphere_area(d: int) -> float:
    return 2.0 * math.pi ** (d / 2.0) / gamma(d / 2.0)


@dataclass(frozen=True)
class EquilibriumMeasure:
    """A limiting measure with a closed-form density.

    ``kind`` is one of ``interval``, ``cube``, ``ball``, ``simplex``
    (unweighted, on the space of radius/edge ``a``) or ``weighted-ball``
    (Gaussian-weighted complex ball; always the unit radius problem).
    ``norm_const`` is the constant prefactor of the density, computed by
    quadrature.
    """

    kind: str
    dimension: int
    a: float
    norm_const: float


def arcsine(a: float = 1.0) -> EquilibriumMeasure:
    """The arcsine law on [-a, a]."""
    if a <= 0:
        raise ValueError("interval radius must be positive")
    total = _quad(lambda th: 1.0, -0.5 * math.pi, 0.5 * math.pi)  # after x = a sin(theta)
    m = EquilibriumMeasure("interval", 1, a, 1.0 / total)
    _validate_mass(m)
    return m


def cube_measure(dimension: int, a: float = 1.0) -> EquilibriumMeasure:
    """Product of per-coordinate arcsine laws on [-a, a]^d."""
    if dimension < 1 or a <= 0:
        raise ValueError("cube needs dimension >= 1 and a > 0")
    per_axis = _quad(lambda th: 1.0, -0.5 * math.pi, 0.5 * math.pi)
    m = EquilibriumMeasure("cube", dimension, a, per_axis ** (-dimension))
    _validate_mass(m)
    return m


def ball_measure(dimension: int, a: float = 1.0) -> EquilibriumMeasure:
    """Density C_d * a^-(d-1) * (a^2 - |x|^2)^(-1/2) on the ball of radius a."""
    if dimension < 1 or a <= 0:
        raise ValueError("ball needs dimension >= 1 and a > 0")
    if dimension == 1:
        return EquilibriumMeasure("ball", 1, a, arcsine(a).norm_const)
    total = _sphere_area(dimension) * _sin_power(dimension - 1)
    m = EquilibriumMeasure("ball", dimension, a, 1.0 / total)
    if dimension <= 3:
        _validate_mass(m)
    return m


def simplex_measure(dimension: int, a: float = 1.0) -> EquilibriumMeasure:
    """Density C_d * a^-((d-1)/2) * ((a - sum x) * prod x_i)^(-1/2) on the simplex."""
    if dimension < 1 or a <= 0:
        raise ValueError("simplex needs dimension >= 1 and a > 0")
    total = 1.0
    for j in range(1, dimension + 1):
        total *= _beta_quad(-0.5, 0.5 * (dimension - j - 1))
    m = EquilibriumMeasure("simplex", dimension, a, 1.0 / total)
    if dimension <= 3:
        _validate_mass(m)
    return m


def weighted_ball_measure(dimension: int = 1) -> EquilibriumMeasure:
    """Uniform measure on the complex ball |z| <= 1/sqrt(2).

    This is the equilibrium measure of the unit complex ball under the
    weight w = exp(-|z|^2); the constant is one over the volume of the
    2d-real-dimensional ball of that radius.
    """
    if dimension < 1:
        raise ValueError("dimension must be >= 1")
    r = math.sqrt(0.5)
    vol = _sphere_area(2 * dimension) * _quad(lambda t: t ** (2 * dimension - 1), 0.0, r)
    m = EquilibriumMeasure("weighted-ball", dimension, 1.0, 1.0 / vol)
    return m


def _validate_mass(m: EquilibriumMeasure) -> None:
    total = eq_moment(m, (0,) * m.dimension)
    if abs(total - 1.0) > 1e-6:
        raise ArithmeticError(f"{m.kind} equilibrium density integrates to {total!r}")


def eq_density(m: EquilibriumMeasure, x) -> float:
    """Density at a point (w.r.t. Lebesgue measure on the support).

    Boundary singularities evaluate to +inf; points outside the support
    give 0.
    """
    pt = as_points(x, m.dimension)[0]
    a, d = m.a, m.dimension
    tol = 1e-12 * max(1.0, a)
    if m.kind == "weighted-ball":
        return m.norm_const if np.linalg.norm(pt) <= math.sqrt(0.5) + tol else 0.0
    if np.any(np.abs(pt.imag) > tol):
        return 0.0
    x_re = pt.real
    if m.kind in ("interval", "cube"):
        if np.any(np.abs(x_re) > a + tol):
            return 0.0
        val = m.norm_const
        for xi in x_re:
            g = a * a - xi * xi
            if g <= 0:
                return math.inf
            val /= math.sqrt(g)
        return val
    if m.kind == "ball":
        r2 = float(np.sum(x_re**2))
        if r2 > a * a + tol:
            return 0.0
        g = a * a - r2
        return math.inf if g <= 0 else m.norm_const * a ** (1 - d) / math.sqrt(g)
    if m.kind == "simplex":
        ssum = float(np.sum(x_re))
        if np.any(x_re < -tol) or ssum > a + tol:
            return 0.0
        g = (a - ssum) * float(np.prod(x_re))
        return math.inf if g <= 0 else m.norm_const * a ** (-0.5 * (d - 1)) / math.sqrt(g)
    raise ValueError(f"unknown equilibrium kind {m.kind!r}")


def eq_cdf(m: EquilibriumMeasure, x) -> float:
    """Cumulative distribution of a one-dimensional equilibrium measure."""
    if m.dimension != 1:
        raise ValueError("eq_cdf is defined for one-dimensional measures only")
    if m.kind == "weighted-ball":
        raise ValueError("eq_cdf applies to real one-dimensional kinds")
    t = float(np.real(np.asarray(x, dtype=complex).reshape(-1)[0]))
    if m.kind == "simplex":  # arcsine law on [0, a]
        u = (2.0 * t - m.a) / m.a
    else:
        u = t / m.a
    u = min(1.0, max(-1.0, u))
    return 0.5 + math.asin(u) / math.pi


@lru_cache(maxsize=4096)
def _moment_cached(m: EquilibriumMeasure, alpha: tuple[int, ...]) -> float:
    a, d = m.a, m.dimension
    k_tot = sum(alpha)
    if m.kind in ("interval", "cube"):
        val = 1.0
        for k in alpha:
            val *= (a**k / math.pi) * _quad(lambda th, k=k: math.sin(th) ** k, -0.5 * math.pi, 0.5 * math.pi)
        return val
    if m.kind == "ball":
        if d == 1:
            return _moment_cached(EquilibriumMeasure("interval", 1, a, m.norm_const), alpha)
        if d > 3:
            raise NotImplementedError("ball moments are implemented for dimension <= 3")
        radial = a ** (k_tot + d - 1) * _sin_power(k_tot + d - 1)
        if d == 2:
            ang = _quad(
                lambda th: math.cos(th) ** alpha[0] * math.sin(th) ** alpha[1],
                0.0,
                2.0 * math.pi,
            )
        else:
            ang = _quad(
                lambda th: math.cos(th) ** alpha[0] * math.sin(th) ** alpha[1],
                0.0,
                2.0 * math.pi,
            ) * _quad(
                lambda ph: math.sin(ph) ** (alpha[0] + alpha[1] + 1) * math.cos(ph) ** alpha[2],
                0.0,
                math.pi,
            )
        return m.norm_const * a ** (1 - d) * radial * ang
    if m.kind == "simplex":
        if d > 3:
            raise NotImplementedError("simplex moments are implemented for dimension <= 3")
        num = 1.0
        den = 1.0
        for j in range(1, d + 1):
            tail = sum(alpha[j:])
            num *= _beta_quad(alpha[j - 1] - 0.5, 0.5 * (d - j - 1) + tail)
            den *= _beta_quad(-0.5, 0.5 * (d - j - 1))
        return a**k_tot * num / den
    if m.kind == "weighted-ball":
        # holomorphic moments vanish by rotational symmetry
        return 1.0 if k_tot == 0 else 0.0
    raise ValueError(f"unknown equilibrium kind {m.kind!r}")


def eq_moment(m: EquilibriumMeasure, alpha) -> float:
    """Moment of the monomial x^alpha, by adaptive quadrature.

    Absolute accuracy is 1e-9 or better for |alpha| <= 40.
    """
    alpha = tuple(int(k) for k in np.atleast_1d(alpha))
    if len(alpha) != m.dimension:
        raise ValueError(f"alpha has length {len(alpha)}, expected {m.dimension}")
    if any(k < 0 for k in alpha):
        raise ValueError("moment exponents must be nonnegative")
    if sum(alpha) > _MAX_MOMENT_DEGREE:
        raise ValueError(f"moments are supported up to total degree {_MAX_MOMENT_DEGREE}")
    return _moment_cached(m, alpha)


@lru_cache(maxsize=512)
def _radial_moment_weighted_ball(dimension: int, k: int) -> float:
    r = math.sqrt(0.5)
    num = _quad(lambda t: t ** (2 * k) * t ** (2 * dimension - 1), 0.0, r)
    den = _quad(lambda t: t ** (2 * dimension - 1), 0.0, r)
    return num / den


def eq_moment_mixed(m: EquilibriumMeasure, beta: int, gamma_: int) -> float:
    """Mixed moment E[z^beta conj(z)^gamma] of a weighted-ball measure (d = 1).

    Rotational symmetry kills every term except beta == gamma, which
    reduces to the radial moment E[|z|^(2 beta)].
    """
    if m.kind != "weighted-ball" or m.dimension != 1:
        raise ValueError("mixed moments are defined for the weighted complex ball, d = 1")
    if beta < 0 or gamma_ < 0 or beta + gamma_ > _MAX_MOMENT_DEGREE:
        raise ValueError("invalid mixed-moment exponents")
    if beta != gamma_:
        return 0.0
    return _radial_moment_weighted_ball(1, beta)


def weighted_ball_green(z, dimension: int = 1) -> float:
    """Weighted Green function of the unit complex ball with w = exp(-|z|^2).

    Equals |z|^2 inside |z| <= 1/sqrt(2) and
    log|z| + 1/2 - log(1/sqrt(2)) outside; continuous across the circle
    and dominated by |z|^2 throughout the unit ball.
    """
    pt = as_points(z, dimension)[0]
    r = float(np.linalg.norm(pt))
    r_star = math.sqrt(0.5)
    if r <= r_star:
        return r * r
    return math.log(r) + 0.5 - math.log(r_star)
