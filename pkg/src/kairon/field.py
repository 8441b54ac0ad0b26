"""Worldlines, initial data and kairon fields on flat E^(1,m).

A kairon field is constant along every isotropic hyperplane ``w . x = const``
(with ``w . x = x^0 + w_vec . x_vec``).  Given initial data ``g(s, w)`` on a
time-like worldline ``gamma(s)``, the value at ``x`` is ``g(s*, w)`` where
``s*`` is the unique parameter with ``tau_w(s*) = w . x`` and
``tau_w(s) = w . gamma(s)`` is the phase of the worldline.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np

from . import geometry as geo
from .cone import lift
from .expr import Expression
from .geometry import DimensionError, DomainError

DEFAULT_ROOT_TOL = 1e-12
MAX_BRACKET_EXPANSIONS = 200


class ClassTError(DomainError):
    """The worldline is not certified to meet every isotropic hyperplane."""


class BracketError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# worldlines


class Worldline:
    """Future-directed time-like path s -> gamma(s) in E^(1,m).

    Subclasses provide ``position`` and ``tangent`` (vectorised over ``s``) and
    a declared asymptotic speed bound ``beta_max``.
    """

    m: int
    beta_max: float

    def position(self, s) -> np.ndarray:
        raise NotImplementedError

    def tangent(self, s) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, s):
        return self.position(s)

    def phase(self, w, s):
        return phase(self, w, s)

    def invert_phase(self, w, tau, tol: float = DEFAULT_ROOT_TOL):
        return _invert_monotone(self, w, tau, tol)


@dataclass(frozen=True)
class TimeAxis(Worldline):
    m: int
    beta_max: float = dc_field(default=0.0, init=False)

    def position(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape + (self.m + 1,))
        out[..., 0] = s
        return out

    def tangent(self, s):
        s = np.asarray(s, dtype=float)
        out = np.zeros(s.shape + (self.m + 1,))
        out[..., 0] = 1.0
        return out

    def invert_phase(self, w, tau, tol=DEFAULT_ROOT_TOL):
        tau = np.asarray(tau, dtype=float)
        w = np.asarray(w, dtype=float)
        return np.broadcast_to(tau, np.broadcast_shapes(tau.shape, w.shape[:-1])).copy()


@dataclass(frozen=True, eq=False)
class StraightLine(Worldline):
    """gamma(s) = base + s (1, velocity), |velocity| < 1."""

    velocity: np.ndarray
    base: np.ndarray | None = None

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.velocity, dtype=float))
        speed = float(np.linalg.norm(v))
        if not speed < 1.0:
            raise ClassTError(
                f"straight line with speed |beta| = {speed} is not time-like; "
                "class T needs a uniform speed bound < 1"
            )
        b = np.zeros(v.size + 1) if self.base is None else np.asarray(self.base, dtype=float)
        if b.shape != (v.size + 1,):
            raise DimensionError("base point must have m + 1 components")
        object.__setattr__(self, "velocity", v)
        object.__setattr__(self, "base", b)

    @property
    def m(self) -> int:
        return self.velocity.size

    @property
    def beta_max(self) -> float:
        return float(np.linalg.norm(self.velocity))

    def position(self, s):
        s = np.asarray(s, dtype=float)
        d = np.concatenate([[1.0], self.velocity])
        return self.base + s[..., None] * d

    def tangent(self, s):
        s = np.asarray(s, dtype=float)
        d = np.concatenate([[1.0], self.velocity])
        return np.broadcast_to(d, s.shape + d.shape).copy()

    def invert_phase(self, w, tau, tol=DEFAULT_ROOT_TOL):
        w = np.asarray(w, dtype=float)
        tau = np.asarray(tau, dtype=float)
        offset = self.base[0] + w @ self.base[1:]
        return (tau - offset) / (1.0 + w @ self.velocity)


@dataclass(frozen=True, eq=False)
class AnalyticWorldline(Worldline):
    """Worldline given by vectorised evaluators.

    ``position(s)`` and ``tangent(s)`` must accept arrays and return shape
    ``s.shape + (m + 1,)``.  ``beta_max`` is the declared supremum of
    ``|dx/ds| / (dx^0/ds)`` over all s; it is what certification relies on.
    """

    m: int
    position_fn: Callable[[np.ndarray], np.ndarray]
    tangent_fn: Callable[[np.ndarray], np.ndarray]
    beta_max: float
    name: str = "analytic"

    def position(self, s):
        return np.asarray(self.position_fn(np.asarray(s, dtype=float)), dtype=float)

    def tangent(self, s):
        return np.asarray(self.tangent_fn(np.asarray(s, dtype=float)), dtype=float)


def hyperbolic(m: int, accel: float = 1.0) -> AnalyticWorldline:
    """Uniformly accelerated observer (sinh s, cosh s - 1, 0, ...)/a.

    The speed tanh(a s) tends to 1, so the declared bound is 1 and the path
    fails class-T certification: it never meets the hyperplanes
    ``x^0 - x^1 = c`` with ``c <= -1/a``.
    """

    def pos(s):
        out = np.zeros(np.shape(s) + (m + 1,))
        out[..., 0] = np.sinh(accel * s) / accel
        out[..., 1] = (np.cosh(accel * s) - 1.0) / accel
        return out

    def tan(s):
        out = np.zeros(np.shape(s) + (m + 1,))
        out[..., 0] = np.cosh(accel * s)
        out[..., 1] = np.sinh(accel * s)
        return out

    return AnalyticWorldline(m, pos, tan, 1.0, "hyperbolic")


def wiggly(m: int, amplitude: float = 0.3, frequency: float = 1.0, axis: int = 1) -> AnalyticWorldline:
    """gamma(s) = (s, (A / k) sin(k s) e_axis); speed bound A."""
    if not 0 <= amplitude < 1:
        raise ClassTError("wiggly worldline needs amplitude < 1 for a time-like path")

    def pos(s):
        out = np.zeros(np.shape(s) + (m + 1,))
        out[..., 0] = s
        out[..., axis] = amplitude / frequency * np.sin(frequency * s)
        return out

    def tan(s):
        out = np.zeros(np.shape(s) + (m + 1,))
        out[..., 0] = 1.0
        out[..., axis] = amplitude * np.cos(frequency * s)
        return out

    return AnalyticWorldline(m, pos, tan, float(amplitude), "wiggly")


def phase(gamma: Worldline, w, s):
    """tau_w(s) = gamma^0(s) + w . gamma_vec(s); strictly increasing in s on class T."""
    return geo.pairing(lift(w), gamma.position(s))


def phase_rate(gamma: Worldline, w, s):
    return geo.pairing(lift(w), gamma.tangent(s))


@dataclass(frozen=True)
class ClassTReport:
    passed: bool
    sampled_sup_speed: float
    declared_bound: float
    min_time_rate: float
    note: str = (
        "sufficient condition only: a uniform speed bound < 1 makes every phase "
        "tau_w surjective, so the path meets every maximal isotropic hyperplane; "
        "failing this test does not prove the path is outside class T"
    )

    def __bool__(self):
        return self.passed


def class_t_check(gamma: Worldline, s_range=(-50.0, 50.0), n_samples: int = 2001) -> ClassTReport:
    s = np.linspace(s_range[0], s_range[1], n_samples)
    tan = gamma.tangent(s)
    rate = tan[..., 0]
    speed = np.linalg.norm(tan[..., 1:], axis=-1) / np.where(rate > 0, rate, np.nan)
    min_rate = float(np.min(rate))
    sup = float(np.nanmax(speed)) if min_rate > 0 else float("inf")
    declared = float(gamma.beta_max)
    passed = min_rate > 0 and declared < 1.0 and sup <= declared + 1e-12
    return ClassTReport(bool(passed), sup, declared, min_rate)


def _invert_monotone(gamma: Worldline, w, tau, tol: float) -> np.ndarray:
    """Solve tau_w(s) = tau for s, vectorised over w and tau.

    Brackets by doubling from s = 0, bisects until the phase residual is
    below ``tol`` (or the bracket collapses to rounding width), then takes one
    guarded Newton step.
    """
    if not gamma.beta_max < 1.0:
        raise ClassTError("cannot invert the phase of a worldline without a speed bound < 1")
    w = np.asarray(w, dtype=float)
    tau = np.asarray(tau, dtype=float)
    shape = np.broadcast_shapes(tau.shape, w.shape[:-1])
    w = np.broadcast_to(w, shape + w.shape[-1:])
    tau = np.broadcast_to(tau, shape)

    f = lambda s: phase(gamma, w, s) - tau  # noqa: E731
    lo = np.full(shape, -1.0)
    hi = np.full(shape, 1.0)
    for _ in range(MAX_BRACKET_EXPANSIONS):
        flo, fhi = f(lo), f(hi)
        bad_lo, bad_hi = flo > 0, fhi < 0
        if not (bad_lo.any() or bad_hi.any()):
            break
        lo = np.where(bad_lo, 2.0 * lo, lo)
        hi = np.where(bad_hi, 2.0 * hi, hi)
    else:
        idx = np.argwhere(np.asarray(f(lo) > 0) | np.asarray(f(hi) < 0))[0]
        raise BracketError(
            f"no bracket for phase inversion at w={w[tuple(idx)]}, tau={tau[tuple(idx)]}"
        )

    s = 0.5 * (lo + hi)
    for _ in range(200):
        fs = f(s)
        done = (np.abs(fs) <= tol) | (hi - lo <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(s)))
        if done.all():
            break
        lo = np.where(~done & (fs < 0), s, lo)
        hi = np.where(~done & (fs > 0), s, hi)
        s = np.where(done, s, 0.5 * (lo + hi))

    fs = f(s)
    s_new = s - fs / phase_rate(gamma, w, s)
    ok = (s_new >= lo) & (s_new <= hi)
    s_new = np.where(ok, s_new, s)
    better = np.abs(f(s_new)) <= np.abs(fs)
    return np.where(better, s_new, s)


def invert_phase(gamma: Worldline, w, tau, tol: float = DEFAULT_ROOT_TOL):
    """Parameter s* with |tau_w(s*) - tau| <= tol."""
    return gamma.invert_phase(w, tau, tol)


# ---------------------------------------------------------------------------
# initial data and fields


Support = tuple[float, float] | Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]] | None


@dataclass(frozen=True, eq=False)
class InitialData:
    """Data g(s, w) on a worldline.

    ``support`` is either a fixed interval [s_min, s_max] (g is forced to 0
    outside it) or a callable ``w -> (lo, hi)`` for direction-dependent windows
    (used for data obtained by restriction, which vanish there already).
    """

    g: Callable[[np.ndarray, np.ndarray], np.ndarray]
    support: Support = None

    def __call__(self, s, w):
        s = np.asarray(s, dtype=float)
        val = np.asarray(self.g(s, w), dtype=float)
        if isinstance(self.support, tuple):
            lo, hi = self.support
            val = np.where((s >= lo) & (s <= hi), val, 0.0)
        return val

    @property
    def compact(self) -> bool:
        return self.support is not None

    def window(self, w):
        """Per-direction (lo, hi) outside which the data vanish, or None."""
        if self.support is None:
            return None
        w = np.asarray(w, dtype=float)
        if callable(self.support):
            return self.support(w)
        lo, hi = self.support
        shape = w.shape[:-1]
        return np.full(shape, float(lo)), np.full(shape, float(hi))

    @classmethod
    def from_expression(cls, e: Expression, support: Support = None) -> "InitialData":
        return cls(e.__call__, support)


@dataclass(frozen=True, eq=False)
class KaironField:
    worldline: Worldline
    data: InitialData
    root_tolerance: float = DEFAULT_ROOT_TOL

    def __post_init__(self):
        if not self.worldline.beta_max < 1.0:
            raise ClassTError(
                "initial data need a class-T worldline (uniform speed bound < 1); "
                f"declared bound is {self.worldline.beta_max}"
            )

    @property
    def m(self) -> int:
        return self.worldline.m

    def __call__(self, x, w):
        return evaluate_field(self, x, w)

    def slab(self, w):
        """Phase interval (tau_lo, tau_hi) per direction containing the support, or None."""
        win = self.data.window(w)
        if win is None:
            return None
        lo, hi = win
        return phase(self.worldline, w, lo), phase(self.worldline, w, hi)


def evaluate_field(field: KaironField, x, w) -> np.ndarray:
    """Psi(x, w) = g(s*, w) with tau_w(s*) = x^0 + w . x_vec."""
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    if x.shape[-1] != field.m + 1 or w.shape[-1] != field.m:
        raise DimensionError(f"field has m={field.m}; got x {x.shape}, w {w.shape}")
    tau = geo.pairing(lift(w), x)
    s = invert_phase(field.worldline, w, tau, field.root_tolerance)
    return field.data(s, w)


def field_equation_residual(field: KaironField, x, w, h: float) -> float:
    """max_{mu<nu} |w_mu D_nu Psi - w_nu D_mu Psi| with central differences of step h."""
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    n = field.m + 1
    steps = h * np.eye(n)
    pts = np.concatenate([x + steps, x - steps])
    vals = evaluate_field(field, pts, w)
    D = (vals[:n] - vals[n:]) / (2.0 * h)
    om = lift(w)
    R = np.abs(np.outer(om, D) - np.outer(D, om))
    return float(np.max(R[np.triu_indices(n, 1)]))


def slab_window(field: KaironField, gamma: Worldline, w):
    """Parameter window on ``gamma`` outside which ``field`` vanishes, per direction."""
    sl = field.slab(w)
    if sl is None:
        return None
    t_lo, t_hi = sl
    return (
        invert_phase(gamma, w, t_lo, field.root_tolerance),
        invert_phase(gamma, w, t_hi, field.root_tolerance),
    )


def restrict_to_worldline(field: KaironField, gamma2: Worldline) -> InitialData:
    """Initial data on ``gamma2`` that regenerate ``field``: (s, w) -> Psi(gamma2(s), w)."""
    if not gamma2.beta_max < 1.0:
        raise ClassTError("restriction target must be a class-T worldline")
    if gamma2.m != field.m:
        raise DimensionError("worldline and field dimensions differ")

    def g2(s, w):
        return evaluate_field(field, gamma2.position(s), w)

    support = None
    if field.data.compact:
        support = lambda w: slab_window(field, gamma2, w)  # noqa: E731
    return InitialData(g2, support)
