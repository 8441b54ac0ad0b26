"""Minkowski arithmetic and the proper orthochronous Lorentz group SO0(1, m).

Conventions
-----------
* Signature ``eta = diag(1, -1, ..., -1)``.
* A Lorentz matrix ``L`` stores ``L[alpha, beta] = Lambda^alpha_beta``
  (row = upper index, column = lower index).
* Covectors are row vectors acted on from the right: ``(p L)_a = p_b L^b_a``,
  i.e. ``act_covector(p, L) == p @ L``.
* Vectors transform as column vectors: ``L @ v``.

All functions accept stacked inputs along leading axes where that is natural
(covectors of shape ``(..., m + 1)``).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LORENTZ_TOL = 1e-10


class DimensionError(ValueError):
    """Inputs disagree on the number of spatial dimensions."""


class DomainError(ValueError):
    """An input lies outside the domain of an operation."""


def check_dim(m: int) -> int:
    if int(m) != m or m < 1:
        raise DomainError(f"spatial dimension must be a positive integer, got {m!r}")
    return int(m)


def metric(m: int) -> np.ndarray:
    return np.diag([1.0] + [-1.0] * check_dim(m))


def quadratic_form(p) -> np.ndarray | float:
    """p0^2 - p1^2 - ... - pm^2 (works for vectors and covectors alike)."""
    p = np.asarray(p, dtype=float)
    return p[..., 0] ** 2 - np.sum(p[..., 1:] ** 2, axis=-1)


def pairing(p, v) -> np.ndarray | float:
    """Covector applied to vector, ``p_a v^a``; no metric factor."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    if p.shape[-1] != v.shape[-1]:
        raise DimensionError(f"covector length {p.shape[-1]} != vector length {v.shape[-1]}")
    return np.sum(p * v, axis=-1)


def identity(m: int) -> np.ndarray:
    return np.eye(check_dim(m) + 1)


def boost(direction, rapidity: float) -> np.ndarray:
    """Pure boost along the unit spatial vector ``direction`` with rapidity ``chi``.

    ``L^0_0 = cosh chi``, ``L^0_i = L^i_0 = sinh chi n_i``,
    ``L^i_j = delta_ij + (cosh chi - 1) n_i n_j``.
    """
    n = np.atleast_1d(np.asarray(direction, dtype=float))
    if n.ndim != 1:
        raise DomainError("boost direction must be a 1-d spatial vector")
    if abs(np.linalg.norm(n) - 1.0) > 1e-12:
        raise DomainError(f"boost direction must have unit norm, |n| = {np.linalg.norm(n)!r}")
    m = n.size
    ch, sh = np.cosh(rapidity), np.sinh(rapidity)
    L = np.eye(m + 1)
    L[0, 0] = ch
    L[0, 1:] = sh * n
    L[1:, 0] = sh * n
    L[1:, 1:] += (ch - 1.0) * np.outer(n, n)
    return L


def rotation(m: int, i: int, j: int, angle: float) -> np.ndarray:
    """Rotation by ``angle`` in the spatial (i, j) plane, 1 <= i < j <= m.

    Sign convention: ``L^i_i = L^j_j = cos``, ``L^i_j = -sin``, ``L^j_i = sin``.
    As a right action on covectors this sends ``e^i`` to ``cos e^i - sin e^j``,
    so at angle pi/2 the covector (1, 1, 0, 0) goes to (1, 0, -1, 0).
    """
    m = check_dim(m)
    if not (1 <= i < j <= m):
        raise DomainError(f"rotation plane indices need 1 <= i < j <= {m}, got ({i}, {j})")
    L = np.eye(m + 1)
    c, s = np.cos(angle), np.sin(angle)
    L[i, i] = c
    L[j, j] = c
    L[i, j] = -s
    L[j, i] = s
    return L


def spatial_rotation(R) -> np.ndarray:
    """Embed an m x m orthogonal matrix as a Lorentz matrix."""
    R = np.asarray(R, dtype=float)
    L = np.eye(R.shape[0] + 1)
    L[1:, 1:] = R
    return L


def compose(L1, L2) -> np.ndarray:
    L1 = np.asarray(L1, dtype=float)
    L2 = np.asarray(L2, dtype=float)
    if L1.shape != L2.shape:
        raise DimensionError(f"cannot compose {L1.shape} with {L2.shape}")
    return L1 @ L2


def inverse(L) -> np.ndarray:
    """Exact pseudo-orthogonal inverse ``eta L^T eta`` (sign flips only, no solve)."""
    Li = np.array(L, dtype=float).T
    Li[0, 1:] *= -1.0
    Li[1:, 0] *= -1.0
    return Li


def act_covector(p, L) -> np.ndarray:
    """Right action ``(p L)_a = p_b L^b_a``."""
    p = np.asarray(p, dtype=float)
    L = np.asarray(L, dtype=float)
    if p.shape[-1] != L.shape[0]:
        raise DimensionError(f"covector length {p.shape[-1]} does not match matrix {L.shape}")
    return p @ L


def act_vector(L, v) -> np.ndarray:
    """``(L v)^a = L^a_b v^b`` for vectors stacked along leading axes."""
    v = np.asarray(v, dtype=float)
    return v @ np.asarray(L, dtype=float).T


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    metric_residual: float
    det_residual: float
    time_component: float

    def __bool__(self) -> bool:
        return self.ok


def validate(L, tol: float = LORENTZ_TOL) -> ValidationReport:
    """Check membership in SO0(1, m); never raises on a bad matrix."""
    L = np.asarray(L, dtype=float)
    if L.ndim != 2 or L.shape[0] != L.shape[1] or L.shape[0] < 2:
        return ValidationReport(False, np.inf, np.inf, np.nan)
    if not np.all(np.isfinite(L)):
        return ValidationReport(False, np.inf, np.inf, float(L[0, 0]))
    eta = metric(L.shape[0] - 1)
    res_metric = float(np.max(np.abs(L.T @ eta @ L - eta)))
    res_det = float(abs(np.linalg.det(L) - 1.0))
    ok = bool(res_metric <= tol and res_det <= tol and L[0, 0] >= 1.0 - tol)
    return ValidationReport(ok, res_metric, res_det, float(L[0, 0]))


def random_direction(rng: np.random.Generator, m: int, size=None) -> np.ndarray:
    """Uniform point(s) on S^(m-1); for m = 1 this is a random sign."""
    shape = (m,) if size is None else (*np.atleast_1d(size), m)
    while True:
        x = rng.standard_normal(shape)
        nrm = np.linalg.norm(x, axis=-1, keepdims=True)
        if np.all(nrm > 1e-12):
            return x / nrm


def random_rotation(rng: np.random.Generator, m: int) -> np.ndarray:
    """Haar-random element of SO(m)."""
    if m == 1:
        return np.eye(1)
    q, r = np.linalg.qr(rng.standard_normal((m, m)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1.0
    return q


def random_lorentz(
    seed: int | np.random.Generator,
    rapidity_bound: float,
    m: int = 3,
    rotations: bool = True,
) -> np.ndarray:
    """Deterministic pseudo-random boost . rotation . boost.

    Rapidities are uniform in ``[-rapidity_bound, rapidity_bound]``; ``seed``
    may be an int or an existing ``numpy.random.Generator`` (which is advanced).
    """
    if rapidity_bound < 0:
        raise DomainError("rapidity_bound must be >= 0")
    m = check_dim(m)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    b1 = boost(random_direction(rng, m), rng.uniform(-rapidity_bound, rapidity_bound))
    R = spatial_rotation(random_rotation(rng, m)) if rotations else identity(m)
    b2 = boost(random_direction(rng, m), rng.uniform(-rapidity_bound, rapidity_bound))
    return b1 @ R @ b2
