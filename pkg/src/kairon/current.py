"""The conserved current and the inner product on kairon fields.

For two fields the current is the 1-form

    j(x)(xi) = int_S Psi1(x, w) Psi2(x, w) (xi^0 + w . xi_vec) sigma0(w),

closed whenever both fields solve the flat field equations.  Its integral
along a class-T worldline is the inner product, independent of the path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .cone import lift
from .field import ClassTError, KaironField, Worldline, slab_window
from .geometry import DimensionError, DomainError
from .sphere import SphereQuadrature, integrate_values, node_blocks

DEFAULT_STEPS = 2000


class SupportError(DomainError):
    """Field support is not contained in the integration window."""


class NonCompactDataError(DomainError):
    pass


def simpson_weights(n_steps: int) -> np.ndarray:
    """Composite Simpson weights on n_steps (even) equal intervals of [0, 1]."""
    if n_steps < 2 or n_steps % 2:
        raise DomainError("composite Simpson needs an even number of steps >= 2")
    wts = np.ones(n_steps + 1)
    wts[1:-1:2] = 4.0
    wts[2:-1:2] = 2.0
    return wts / (3.0 * n_steps)


def _check_fields(quad: SphereQuadrature, *fields: KaironField):
    for f in fields:
        if f.m != quad.m:
            raise DimensionError(f"field has m={f.m} but quadrature has m={quad.m}")


@dataclass(frozen=True)
class CurrentEvaluation:
    value: float
    samples: np.ndarray | None = None


def current_component(psi1, psi2, x, xi, quad: SphereQuadrature, keep_samples: bool = False):
    """j_{psi1,psi2}(x)(xi) by sphere quadrature."""
    _check_fields(quad, psi1, psi2)
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    nodes = quad.nodes
    vals = psi1(x, nodes) * psi2(x, nodes) * geo.pairing(lift(nodes), xi)
    ev = CurrentEvaluation(integrate_values(quad, vals), vals if keep_samples else None)
    return ev if keep_samples else ev.value


# ---------------------------------------------------------------------------
# line integrals


@dataclass(frozen=True, eq=False)
class Segment:
    """Straight path start -> end."""

    start: np.ndarray
    end: np.ndarray

    def sample(self, u):
        a = np.asarray(self.start, dtype=float)
        b = np.asarray(self.end, dtype=float)
        return a + u[:, None] * (b - a), np.broadcast_to(b - a, (u.size, a.size))

    @property
    def endpoints(self):
        return np.asarray(self.start, dtype=float), np.asarray(self.end, dtype=float)


@dataclass(frozen=True, eq=False)
class WorldlinePiece:
    """gamma(s) for s from s_start to s_end (either order)."""

    worldline: Worldline
    s_start: float
    s_end: float

    def sample(self, u):
        ds = self.s_end - self.s_start
        s = self.s_start + u * ds
        return self.worldline.position(s), self.worldline.tangent(s) * ds

    @property
    def endpoints(self):
        return (
            self.worldline.position(np.float64(self.s_start)),
            self.worldline.position(np.float64(self.s_end)),
        )


def polygon(*vertices) -> list[Segment]:
    """Closed polygonal loop through ``vertices``."""
    vs = [np.asarray(v, dtype=float) for v in vertices]
    return [Segment(vs[k], vs[(k + 1) % len(vs)]) for k in range(len(vs))]


def line_integral(psi1, psi2, path, quad: SphereQuadrature, n_steps: int = DEFAULT_STEPS) -> float:
    """int_path j by composite Simpson in the path parameter."""
    _check_fields(quad, psi1, psi2)
    u = np.linspace(0.0, 1.0, n_steps + 1)
    wu = simpson_weights(n_steps)
    pts, tangents = path.sample(u)
    P = pts[:, None, :]
    per_node = np.empty(quad.size)
    for blk in node_blocks(quad, n_steps + 1):
        nodes = quad.nodes[blk]
        W = nodes[None, :, :]
        vals = psi1(P, W) * psi2(P, W) * (tangents[:, None, 0] + tangents[:, 1:] @ nodes.T)
        per_node[blk] = wu @ vals
    return integrate_values(quad, per_node)


def closedness_defect(psi1, psi2, loop, quad: SphereQuadrature, n_steps: int = DEFAULT_STEPS) -> float:
    """|closed-loop integral of j|; should vanish for solutions of the field equations."""
    for k, piece in enumerate(loop):
        end = piece.endpoints[1]
        start_next = loop[(k + 1) % len(loop)].endpoints[0]
        if np.max(np.abs(end - start_next)) > 1e-12:
            raise DomainError(f"loop is open between pieces {k} and {(k + 1) % len(loop)}")
    return abs(math.fsum(line_integral(psi1, psi2, piece, quad, n_steps) for piece in loop))


# ---------------------------------------------------------------------------
# inner product


def inner_product(
    psi1: KaironField,
    psi2: KaironField,
    gamma: Worldline,
    quad: SphereQuadrature,
    s_window: tuple[float, float] | None = None,
    n_steps: int = DEFAULT_STEPS,
) -> float:
    """<psi1, psi2> = int sigma0 int ds (dgamma/ds . w) psi1 psi2 along ``gamma``.

    With ``s_window`` the s-integral runs over that interval; when both fields
    are compactly supported their slab images on ``gamma`` must lie inside it.
    Without it the window is derived per direction from the support slabs.
    Non-compact data (e.g. Gaussians) require an explicit window.
    """
    _check_fields(quad, psi1, psi2)
    if not gamma.beta_max < 1.0:
        raise ClassTError("inner product needs a class-T integration path")
    nodes = quad.nodes
    N = nodes.shape[0]
    # product vanishes where either factor does
    compact = [f for f in (psi1, psi2) if f.data.compact]
    derived = None
    if compact:
        wins = [slab_window(f, gamma, nodes) for f in compact]
        derived = (
            np.maximum.reduce([w[0] for w in wins]),
            np.minimum.reduce([w[1] for w in wins]),
        )
    if s_window is not None:
        a, b = map(float, s_window)
        if derived is not None:
            for f in compact:
                lo, hi = slab_window(f, gamma, nodes)
                if np.any(lo < a) or np.any(hi > b):
                    raise SupportError(
                        f"support slab on the path spans [{lo.min():.6g}, {hi.max():.6g}], "
                        f"outside s_window [{a:.6g}, {b:.6g}]"
                    )
        lo = np.full(N, a)
        hi = np.full(N, b)
    elif derived is not None:
        lo, hi = derived
        hi = np.maximum(hi, lo)
    else:
        raise NonCompactDataError("non-compact initial data need an explicit s_window")

    u = np.linspace(0.0, 1.0, n_steps + 1)
    wu = simpson_weights(n_steps)
    length = hi - lo
    per_node = np.empty(N)
    for blk in node_blocks(quad, n_steps + 1):
        nodes_b = nodes[blk]
        s = lo[None, blk] + u[:, None] * length[None, blk]
        pos = gamma.position(s)
        rate = geo.pairing(lift(nodes_b)[None, :, :], gamma.tangent(s))
        W = nodes_b[None, :, :]
        vals = rate * psi1(pos, W) * psi2(pos, W)
        per_node[blk] = (wu @ vals) * length[blk]
    return integrate_values(quad, per_node)


def path_independence_defect(
    psi1,
    psi2,
    gamma_a: Worldline,
    gamma_b: Worldline,
    quad: SphereQuadrature,
    windows=(None, None),
    n_steps: int = DEFAULT_STEPS,
    eps: float = 1e-300,
) -> float:
    """Relative difference of the inner products along two class-T paths."""
    if windows == (None, None) and not (psi1.data.compact or psi2.data.compact):
        raise NonCompactDataError(
            "path independence needs compactly supported data or explicit windows (tail bounds)"
        )
    va = inner_product(psi1, psi2, gamma_a, quad, windows[0], n_steps)
    vb = inner_product(psi1, psi2, gamma_b, quad, windows[1], n_steps)
    return abs(va - vb) / max(abs(va), eps)
