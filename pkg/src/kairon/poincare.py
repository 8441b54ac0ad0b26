"""Unitary Poincare action on initial data over the time axis.

States are closed-form evaluators ``g(x0, w)``; transforms compose them
symbolically so group-law checks never interpolate.

Lorentz:      (U_L g)(x0; w) = c^(-m/2) g(x0 / c; rho_{L^-1}(w)),   c = (w L)_0
Translation:  (U_a g)(x0; w) = g(x0 - a^0 - a_vec . w; w)
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import geometry as geo
from .cone import check_unit, lift, rho, time_factor
from .expr import Expression
from .field import InitialData, KaironField, TimeAxis
from .geometry import DimensionError, DomainError
from .current import simpson_weights
from .sphere import SphereQuadrature, integrate_values, node_blocks


class DivergentNormError(DomainError):
    pass


@dataclass(frozen=True, eq=False)
class AxisState:
    """Initial data g(x0, w) on the x^0 axis of a fixed Lorentz frame.

    ``support`` is None (non-compact), a fixed (lo, hi) interval, or a callable
    ``w -> (lo, hi)`` giving the direction-dependent x0 window outside which
    g vanishes.
    """

    m: int
    g: Callable[[np.ndarray, np.ndarray], np.ndarray]
    support: object = None

    def __call__(self, x0, w):
        return np.asarray(self.g(np.asarray(x0, dtype=float), np.asarray(w, dtype=float)), dtype=float)

    def window(self, w):
        if self.support is None:
            return None
        if callable(self.support):
            return self.support(w)
        lo, hi = self.support
        shape = np.asarray(w).shape[:-1]
        return np.full(shape, float(lo)), np.full(shape, float(hi))

    @classmethod
    def from_expression(cls, e: Expression, support=None) -> "AxisState":
        data = InitialData.from_expression(e, support)
        return cls(e.m, data.__call__, support)

    def as_field(self, root_tolerance: float = 1e-12) -> KaironField:
        """The solution generated by this state from the time axis."""
        return KaironField(TimeAxis(self.m), InitialData(self.g, self.support), root_tolerance)


def apply_lorentz(state: AxisState, L) -> AxisState:
    L = np.array(L, dtype=float)
    if L.shape != (state.m + 1, state.m + 1):
        raise DimensionError(f"Lorentz matrix {L.shape} does not match m={state.m}")
    Li = geo.inverse(L)
    m = state.m

    def g(x0, w):
        c = time_factor(L, w)
        return c ** (-m / 2.0) * state(np.asarray(x0) / c, rho(Li, w))

    def window(w):
        c = time_factor(L, w)
        lo, hi = state.window(rho(Li, w))
        return c * lo, c * hi

    return AxisState(m, g, None if state.support is None else window)


def apply_translation(state: AxisState, a) -> AxisState:
    a = np.asarray(a, dtype=float)
    if a.shape != (state.m + 1,):
        raise DimensionError(f"translation needs {state.m + 1} components, got {a.shape}")

    def shift(w):
        return geo.pairing(lift(w), a)

    def g(x0, w):
        return state(np.asarray(x0) - shift(w), w)

    def window(w):
        lo, hi = state.window(w)
        d = shift(w)
        return lo + d, hi + d

    return AxisState(state.m, g, None if state.support is None else window)


def apply(state: AxisState, transform) -> AxisState:
    """Apply a Lorentz matrix (2-d) or a translation vector (1-d)."""
    t = np.asarray(transform, dtype=float)
    if t.ndim == 2:
        return apply_lorentz(state, t)
    if t.ndim == 1:
        return apply_translation(state, t)
    raise DomainError("transform must be a Lorentz matrix or a translation vector")


# ---------------------------------------------------------------------------
# norms


@dataclass(frozen=True)
class TimeRule:
    """Composite Simpson with ``n_steps`` intervals per direction window."""

    n_steps: int = 2000
    decay_window: float = 8.0  # initial half-width for non-compact states
    max_growth: int = 6
    growth_tol: float = 1e-13

    def weights(self):
        return np.linspace(0.0, 1.0, self.n_steps + 1), simpson_weights(self.n_steps)


def _window_integral(state_a, state_b, quad, lo, hi, rule: TimeRule) -> float:
    u, wu = rule.weights()
    length = hi - lo
    per_node = np.empty(quad.size)
    for blk in node_blocks(quad, u.size):
        x0 = lo[None, blk] + u[:, None] * length[None, blk]
        W = quad.nodes[None, blk, :]
        vals = state_a(x0, W) * state_b(x0, W)
        per_node[blk] = (wu @ vals) * length[blk]
    return integrate_values(quad, per_node)


def scalar_product(state_a: AxisState, state_b: AxisState, quad: SphereQuadrature, rule: TimeRule = TimeRule()) -> float:
    """int sigma0(w) int dx0 g_a g_b over R x S^(m-1)."""
    if state_a.m != quad.m or state_b.m != quad.m:
        raise DimensionError("state and quadrature dimensions differ")
    nodes = quad.nodes
    wa, wb = state_a.window(nodes), state_b.window(nodes)
    if wa is not None or wb is not None:
        if wa is None:
            lo, hi = wb
        elif wb is None:
            lo, hi = wa
        else:
            lo, hi = np.maximum(wa[0], wb[0]), np.minimum(wa[1], wb[1])
        return _window_integral(state_a, state_b, quad, lo, np.maximum(hi, lo), rule)
    half = rule.decay_window
    prev = None
    for _ in range(rule.max_growth + 1):
        lo = np.full(nodes.shape[0], -half)
        hi = np.full(nodes.shape[0], half)
        val = _window_integral(state_a, state_b, quad, lo, hi, rule)
        if prev is not None and abs(val - prev) <= rule.growth_tol * max(abs(val), 1e-300):
            return val
        prev = val
        half *= 2.0
    raise DivergentNormError(f"norm did not settle while growing the window to +-{half / 2:g}")


def norm_squared(state: AxisState, quad: SphereQuadrature, rule: TimeRule = TimeRule()) -> float:
    return scalar_product(state, state, quad, rule)


def unitarity_defect(state: AxisState, transform, quad: SphereQuadrature, rule: TimeRule = TimeRule()) -> float:
    """| |U g|^2 - |g|^2 | / |g|^2."""
    before = norm_squared(state, quad, rule)
    after = norm_squared(apply(state, transform), quad, rule)
    return abs(after - before) / before


def homomorphism_defect(state: AxisState, L1, L2, x0, w) -> float:
    """max |U_L1 U_L2 g - U_{L1 L2} g| over the sample points (x0, w)."""
    nested = apply_lorentz(apply_lorentz(state, L2), L1)
    direct = apply_lorentz(state, geo.compose(L1, L2))
    return float(np.max(np.abs(nested(x0, w) - direct(x0, w))))


def propagation_consistency_defect(state: AxisState, L, x, w) -> float:
    """Compare two routes to the transformed solution at spacetime points x.

    Route 1 propagates the transformed axis data U_L g.  Route 2 transforms the
    propagated field: c^(-m/2) Psi(L^-1 x; rho_{L^-1}(w)).
    """
    L = np.asarray(L, dtype=float)
    x = np.asarray(x, dtype=float)
    w = check_unit(w)
    route1 = apply_lorentz(state, L).as_field()(x, w)
    psi = state.as_field()
    Li = geo.inverse(L)
    c = time_factor(L, w)
    route2 = c ** (-state.m / 2.0) * psi(geo.act_vector(Li, x), rho(Li, w))
    scale = max(1.0, float(np.max(np.abs(route2))))
    return float(np.max(np.abs(route1 - route2))) / scale
