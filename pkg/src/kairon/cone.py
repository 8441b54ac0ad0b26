"""The light cone and the celestial sphere.

Functions on the sphere (``SphereFunction``) are plain vectorised callables
taking directions of shape ``(..., m)`` and returning values of shape ``(...)``.
They are composed symbolically, never sampled, so group-law checks only see
rounding error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import geometry as geo
from .geometry import DimensionError, DomainError
from .sphere import SphereQuadrature, integrate_values, sphere_area

SphereFunction = Callable[[np.ndarray], np.ndarray]

UNIT_TOL = 1e-12


def _directions(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim == 0:
        w = w.reshape(1)
    return w


def check_unit(w, tol: float = UNIT_TOL) -> np.ndarray:
    w = _directions(w)
    err = np.abs(np.sum(w**2, axis=-1) - 1.0)
    if np.any(err > tol):
        raise DomainError(f"direction is not unit norm (max | |w|^2 - 1 | = {np.max(err):.3e})")
    return w


def lift(w) -> np.ndarray:
    """Null covector (1, w) on the section p0 = 1 of the positive cone."""
    w = check_unit(w)
    return np.concatenate([np.ones(w.shape[:-1] + (1,)), w], axis=-1)


def project(p) -> tuple[np.ndarray, np.ndarray]:
    """Split a positive null covector into (direction, scale p0)."""
    p = np.asarray(p, dtype=float)
    p0 = p[..., 0]
    if np.any(p0 <= 0):
        raise DomainError("project needs p0 > 0 (positive light cone)")
    if np.any(np.abs(geo.quadratic_form(p)) > 1e-10 * p0**2):
        raise DomainError("covector is not null")
    return p[..., 1:] / p0[..., None], p0


def _cone_image(L, w) -> np.ndarray:
    """(w L^-1) as a covector."""
    return geo.act_covector(lift(w), geo.inverse(L))


def rho(L, w) -> np.ndarray:
    """Aberration map: rho_L(w)_i = (w L^-1)_i / (w L^-1)_0.  A left action."""
    q = _cone_image(L, w)
    return q[..., 1:] / q[..., :1]


def gamma(r: float, L, w) -> np.ndarray:
    """Cocycle gamma_r(L, w) = ((w L^-1)_0)^r, strictly positive."""
    return _cone_image(L, w)[..., 0] ** r


def time_factor(L, w) -> np.ndarray:
    """(w L)_0, the factor appearing in the Lorentz action on solutions."""
    return geo.act_covector(lift(w), L)[..., 0]


def cocycle_defect(r: float, L1, L2, w) -> np.ndarray:
    """Relative violation of gamma(L1 L2, w) = gamma(L1, rho_L2(w)) gamma(L2, w)."""
    lhs = gamma(r, geo.compose(L1, L2), w)
    rhs = gamma(r, L1, rho(L2, w)) * gamma(r, L2, w)
    return np.abs(lhs - rhs) / lhs


def cocycle_inverse_defect(r: float, L, w) -> np.ndarray:
    """Relative violation of gamma(L^-1, rho_L(w)) = gamma(L, w)^-1."""
    lhs = gamma(r, geo.inverse(L), rho(L, w))
    rhs = 1.0 / gamma(r, L, w)
    return np.abs(lhs - rhs) / np.abs(rhs)


# ---------------------------------------------------------------------------
# Measure transformation by finite differences


def tangent_frame(w) -> tuple[np.ndarray, int]:
    """Orthonormal basis of T_w S and the chart id used.

    The chart drops the coordinate axis on which |w| is largest and
    Gram-Schmidts the remaining axes against w, so the construction is never
    singular (the dropped axis carries at least 1/sqrt(m) of w).
    """
    w = check_unit(w)
    if w.ndim != 1:
        raise DimensionError("tangent_frame takes a single direction")
    m = w.size
    chart = int(np.argmax(np.abs(w)))
    basis = []
    for k in range(m):
        if k == chart:
            continue
        v = np.eye(m)[k] - w[k] * w
        for b in basis:
            v = v - (v @ b) * b
        basis.append(v / np.linalg.norm(v))
    return np.array(basis).reshape(m - 1, m), chart


@dataclass(frozen=True)
class JacobianCheck:
    jacobian: float
    expected: float
    defect: float
    source_chart: int
    target_chart: int


def sigma_jacobian(L, w, h: float) -> JacobianCheck:
    """Central-difference Jacobian of rho_L at w against gamma_{1-m}(L, w).

    Uses orthonormal tangent charts at w and at rho_L(w); the chart at w is
    ``u -> normalize(w + u . T)`` whose differential at 0 is the identity on T.
    """
    w = check_unit(w)
    m = w.size
    if m < 2:
        raise DomainError("the measure transform check needs m >= 2")
    T, c_src = tangent_frame(w)
    Tp, c_dst = tangent_frame(rho(L, w))
    J = np.empty((m - 1, m - 1))
    for l in range(m - 1):
        pts = np.stack([w + h * T[l], w - h * T[l]])
        pts = pts / np.linalg.norm(pts, axis=-1, keepdims=True)
        img = rho(L, pts)
        J[:, l] = Tp @ ((img[0] - img[1]) / (2.0 * h))
    jac = abs(float(np.linalg.det(J)))
    expected = float(gamma(1 - m, L, w))
    return JacobianCheck(jac, expected, abs(jac - expected) / expected, c_src, c_dst)


# below this relative defect at h ~ 1e-4 the central difference is dominated
# by rounding (~eps / h) and halving h no longer shows the O(h^2) trend
JACOBIAN_NOISE_FLOOR = 1e-9


def sigma_jacobian_defect(L, w, h: float) -> float:
    return sigma_jacobian(L, w, h).defect


# ---------------------------------------------------------------------------
# Invariant measure on the cone, Monte Carlo


@dataclass(frozen=True)
class ConeMeasureResult:
    integral: float
    integral_transformed: float
    mc_error: float  # combined standard error of the two estimates

    @property
    def difference(self) -> float:
        return abs(self.integral - self.integral_transformed)


def cone_measure_invariance(
    f: Callable[[np.ndarray], np.ndarray],
    L,
    n_samples: int,
    seed: int,
    radial_support: tuple[float, float],
) -> ConeMeasureResult:
    """Compare int f(p) mu0 with int f(p L) mu0, mu0 = d^m p / |p|.

    ``f`` takes covectors ``(N, m + 1)`` on the positive cone and must vanish
    unless ``|p| in radial_support``.  Samples are uniform in an annulus wide
    enough to contain the support of both integrands: under L the scale p0
    changes by a factor in [e^-chi, e^chi] with cosh chi = L^0_0.
    """
    if n_samples <= 0:
        raise DomainError("n_samples must be positive")
    L = np.asarray(L, dtype=float)
    m = L.shape[0] - 1
    r_lo, r_hi = radial_support
    stretch = L[0, 0] + math.sqrt(max(L[0, 0] ** 2 - 1.0, 0.0))
    a, b = r_lo / stretch, r_hi * stretch
    rng = np.random.default_rng(seed)
    dirs = geo.random_direction(rng, m, n_samples)
    u = rng.random(n_samples)
    r = (a**m + u * (b**m - a**m)) ** (1.0 / m)
    p = np.concatenate([r[:, None], r[:, None] * dirs], axis=-1)
    volume = sphere_area(m) * (b**m - a**m) / m
    y1 = np.asarray(f(p), dtype=float) / r
    y2 = np.asarray(f(geo.act_covector(p, L)), dtype=float) / r
    i1, i2 = volume * y1.mean(), volume * y2.mean()
    se1 = volume * y1.std(ddof=1) / math.sqrt(n_samples)
    se2 = volume * y2.std(ddof=1) / math.sqrt(n_samples)
    return ConeMeasureResult(float(i1), float(i2), float(math.hypot(se1, se2)))


# ---------------------------------------------------------------------------
# Equivariant functions and homogeneous lifts


def frame_change(psi: SphereFunction, r: float, L) -> SphereFunction:
    """Transition e -> eL for a function of type R_r:
    ``w -> gamma_r(L, w)^-1 psi(rho_L(w))``.

    Equivalently the representation operator R_r(L^-1).
    """
    L = np.array(L, dtype=float)

    def changed(w):
        w = _directions(w)
        return psi(rho(L, w)) / gamma(r, L, w)

    return changed


def representation(psi: SphereFunction, r: float, L) -> SphereFunction:
    """R_r(L) psi = rho_{L^-1}^*(gamma_r(L, .) psi)."""
    L = np.array(L, dtype=float)
    Li = geo.inverse(L)

    def transformed(w):
        w2 = rho(Li, _directions(w))
        return gamma(r, L, w2) * psi(w2)

    return transformed


def invariant_pairing(phi: SphereFunction, psi: SphereFunction, v, quad: SphereQuadrature) -> float:
    """Sum over nodes of weight * phi * psi * (v^0 + v . w).

    Frame independent when phi and psi have type R_{m/2} and v is a vector.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (quad.m + 1,):
        raise DimensionError(f"vector of length {quad.m + 1} expected, got shape {v.shape}")
    nodes = quad.nodes
    vals = phi(nodes) * psi(nodes) * (v[0] + nodes @ v[1:])
    return integrate_values(quad, vals)


def hom_extend(f: SphereFunction, r: float) -> Callable[[np.ndarray], np.ndarray]:
    """Homogeneous function of degree -r on the positive cone: p -> p0^-r f(p_vec / p0)."""

    def extended(p):
        w, p0 = project(p)
        return p0 ** (-r) * f(w)

    return extended


def hom_restrict(F: Callable[[np.ndarray], np.ndarray]) -> SphereFunction:
    """Restrict a cone function to the section p0 = 1."""

    def restricted(w):
        return F(lift(w))

    return restricted
