"""Quadrature on the unit sphere S^(m-1) for m = 1, 2, 3.

Rules
-----
* m = 1: the two points {-1, +1} with unit weights (S^0 with counting measure);
  exact for every function.
* m = 2: ``N`` equispaced angles, weight ``2 pi / N`` each.  Exact for
  trigonometric polynomials of degree < N, spectrally accurate for smooth
  periodic integrands.
* m = 3: Gauss-Legendre in ``z = cos theta`` (``n`` points) times ``2 n``
  equispaced azimuths.  Exact for polynomials of degree <= 2 n - 1.

Reductions use :func:`math.fsum`, which is correctly rounded and therefore
independent of summation order: repeated runs agree bit-for-bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import DimensionError, DomainError

SUPPORTED_DIMS = (1, 2, 3)


def sphere_area(m: int) -> float:
    """|S^(m-1)| = 2 pi^(m/2) / Gamma(m/2)."""
    return 2.0 * math.pi ** (m / 2.0) / math.gamma(m / 2.0)


@dataclass(frozen=True, eq=False)
class SphereQuadrature:
    m: int
    nodes: np.ndarray
    weights: np.ndarray
    order: int | None  # polynomial exactness degree; None means exact for all functions

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def size(self) -> int:
        return self.weights.size


def build_quadrature(m: int, resolution: int) -> SphereQuadrature:
    if m not in SUPPORTED_DIMS:
        raise DomainError(f"sphere quadrature supports m in {SUPPORTED_DIMS}, got {m!r}")
    if resolution < 1:
        raise DomainError("resolution must be >= 1")
    if m == 1:
        nodes = np.array([[-1.0], [1.0]])
        weights = np.ones(2)
        order = None
    elif m == 2:
        phi = 2.0 * np.pi * np.arange(resolution) / resolution
        nodes = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        weights = np.full(resolution, 2.0 * np.pi / resolution)
        order = resolution - 1
    else:
        z, wz = np.polynomial.legendre.leggauss(resolution)
        n_phi = 2 * resolution
        phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
        zz, pp = np.meshgrid(z, phi, indexing="ij")
        rr = np.sqrt(1.0 - zz**2)
        nodes = np.stack([rr * np.cos(pp), rr * np.sin(pp), zz], axis=-1).reshape(-1, 3)
        weights = np.outer(wz, np.full(n_phi, 2.0 * np.pi / n_phi)).ravel()
        order = 2 * resolution - 1
    return SphereQuadrature(m, nodes, weights, order)


def node_blocks(quad: SphereQuadrature, per_node: int, budget: int = 2_000_000):
    """Slices over the nodes so that block_size * per_node stays under ``budget``."""
    step = max(1, budget // max(per_node, 1))
    for start in range(0, quad.size, step):
        yield slice(start, min(start + step, quad.size))


def integrate_values(quad: SphereQuadrature, values) -> float:
    values = np.asarray(values, dtype=float)
    if values.shape != quad.weights.shape:
        raise DimensionError(f"expected {quad.weights.shape} node values, got {values.shape}")
    return math.fsum(quad.weights * values)


def integrate(quad: SphereQuadrature, f: Callable[[np.ndarray], np.ndarray]) -> float:
    """Sum of ``weight_k * f(node_k)``; ``f`` is called once on the ``(N, m)`` node array."""
    values = np.broadcast_to(np.asarray(f(quad.nodes), dtype=float), quad.weights.shape)
    return integrate_values(quad, values)


def monomial_integral(exponents) -> float:
    """Exact integral of ``prod w_i^a_i`` over S^(m-1) (Folland's formula).

    Zero unless every exponent is even; otherwise
    ``2 prod Gamma(b_i) / Gamma(sum b_i)`` with ``b_i = (a_i + 1) / 2``.
    """
    a = [int(e) for e in exponents]
    if any(e % 2 for e in a):
        return 0.0
    b = [(e + 1) / 2.0 for e in a]
    return 2.0 * math.prod(math.gamma(x) for x in b) / math.gamma(sum(b))
