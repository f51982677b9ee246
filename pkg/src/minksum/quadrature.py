"""Spherical quadrature and surface integrals over Minkowski-sum boundaries.

A boundary integral of f over the sum is pulled back to the sphere by the
Gauss map: integral of f(x(n)) det C~(n) dsigma(n).  N = 2 and N = 3 are
first class (uniform angles, Gauss-Legendre x uniform azimuth); higher N
uses a product-rule fallback with no accuracy guarantee.

Node evaluation is vectorized; sums are taken over arrays in fixed node
order, so repeated runs produce bitwise-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import curvature, geometry
from .geometry import EllipsoidSum


def sphere_measure(dim: int) -> float:
    """Total measure of the unit sphere S^(dim-1): 2 pi^(d/2) / Gamma(d/2)."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


def unit_ball_volume(dim: int) -> float:
    """Volume of the unit ball: pi^(d/2) / Gamma(d/2 + 1)."""
    return math.pi ** (dim / 2.0) / math.gamma(dim / 2.0 + 1.0)


@dataclass(frozen=True)
class SphereQuadrature:
    """Unit-sphere nodes and positive weights summing to the sphere measure."""

    dim: int
    nodes: np.ndarray
    weights: np.ndarray


def build_quadrature(dim: int, resolution: int) -> SphereQuadrature:
    """Quadrature on S^(dim-1).

    dim = 2: `resolution` uniform angles with equal weights.
    dim = 3: Gauss-Legendre in the polar cosine x uniform azimuth,
    resolution^2 nodes.
    dim > 3: product rule over hyperspherical angles (weights renormalized
    to the exact sphere measure; accuracy not guaranteed).
    """
    if dim < 2:
        raise ValueError("quadrature requires dim >= 2")
    if resolution < 4:
        raise ValueError("resolution must be at least 4")

    if dim == 2:
        theta = 2.0 * np.pi * np.arange(resolution) / resolution
        nodes = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        weights = np.full(resolution, 2.0 * np.pi / resolution)
        return SphereQuadrature(2, nodes, weights)

    if dim == 3:
        u, wu = np.polynomial.legendre.leggauss(resolution)
        psi = 2.0 * np.pi * np.arange(resolution) / resolution
        rho = np.sqrt(1.0 - u**2)
        nodes = np.empty((resolution * resolution, 3))
        weights = np.empty(resolution * resolution)
        cs, sn = np.cos(psi), np.sin(psi)
        for i in range(resolution):
            sl = slice(i * resolution, (i + 1) * resolution)
            nodes[sl, 0] = rho[i] * cs
            nodes[sl, 1] = rho[i] * sn
            nodes[sl, 2] = u[i]
            weights[sl] = wu[i] * 2.0 * np.pi / resolution
        return SphereQuadrature(3, nodes, weights)

    # Product-rule fallback: Gauss-Legendre in cos(phi_i) with the
    # (1 - u^2)^((dim-2-i)/2) chart factor folded into the weights.
    u, wu = np.polynomial.legendre.leggauss(resolution)
    grids = []
    for i in range(dim - 2):
        power = (dim - 2 - (i + 1)) / 2.0
        grids.append((u, wu * (1.0 - u**2) ** power))
    psi = 2.0 * np.pi * np.arange(resolution) / resolution

    idx = np.indices([resolution] * (dim - 1)).reshape(dim - 1, -1).T
    nodes = np.empty((idx.shape[0], dim))
    weights = np.ones(idx.shape[0])
    for row, multi in enumerate(idx):
        sin_prod = 1.0
        w = 1.0
        for axis in range(dim - 2):
            ui, wi = grids[axis][0][multi[axis]], grids[axis][1][multi[axis]]
            nodes[row, axis] = sin_prod * ui
            sin_prod *= math.sqrt(max(1.0 - ui * ui, 0.0))
            w *= wi
        ang = psi[multi[dim - 2]]
        nodes[row, dim - 2] = sin_prod * math.cos(ang)
        nodes[row, dim - 1] = sin_prod * math.sin(ang)
        weights[row] = w * 2.0 * np.pi / resolution
    nodes /= np.linalg.norm(nodes, axis=1)[:, None]
    weights *= sphere_measure(dim) / float(np.sum(weights))
    return SphereQuadrature(dim, nodes, weights)


def _area_factors(scene: EllipsoidSum, quad: SphereQuadrature) -> np.ndarray:
    """det C~ at every quadrature node."""
    red = curvature.reduced_stack(scene, quad.nodes)
    if red.shape[1] == 1:
        return red[:, 0, 0]
    return np.linalg.det(red)


def _check_dim(scene: EllipsoidSum, quad: SphereQuadrature):
    if scene.dim != quad.dim:
        raise ValueError(
            f"scene dimension {scene.dim} != quadrature dimension {quad.dim}"
        )


def surface_integral(scene: EllipsoidSum, f, quad: SphereQuadrature) -> float:
    """Integral of f(x, n) over the boundary of the Minkowski sum.

    f is called once per node in fixed order with the boundary point and
    its unit normal.
    """
    _check_dim(scene, quad)
    dets = _area_factors(scene, quad)
    xs = geometry.boundary_points(scene, quad.nodes)
    vals = np.array(
        [f(xs[k], quad.nodes[k]) for k in range(quad.nodes.shape[0])], dtype=float
    )
    return float(np.sum(quad.weights * vals * dets))


def surface_area(scene: EllipsoidSum, quad: SphereQuadrature) -> float:
    """Boundary measure (perimeter for N = 2, surface area for N = 3)."""
    _check_dim(scene, quad)
    dets = _area_factors(scene, quad)
    return float(np.sum(quad.weights * dets))


def mean_curvature_integral(scene: EllipsoidSum, quad: SphereQuadrature) -> float:
    """Integral of mean curvature over the boundary (N = 3 only).

    Equals (1/2) integral of tr C(n) dsigma; the area factor cancels, so
    the integrand is tr C directly.  Additive over scene terms.
    """
    if scene.dim != 3:
        raise ValueError("mean_curvature_integral requires a 3D scene")
    _check_dim(scene, quad)
    c = curvature.curvature_stack(scene, quad.nodes)
    tr = np.trace(c, axis1=1, axis2=2)
    return float(0.5 * np.sum(quad.weights * tr))


def gaussian_curvature_integral(scene: EllipsoidSum, quad: SphereQuadrature) -> float:
    """Total Gaussian curvature of the boundary; 2 pi (N=2) or 4 pi (N=3).

    Computed as the surface integral of the product of principal
    curvatures; doubles as a quadrature self-test.
    """
    if scene.dim not in (2, 3):
        raise ValueError("gaussian_curvature_integral supports N in {2, 3}")
    _check_dim(scene, quad)
    red = curvature.reduced_stack(scene, quad.nodes)
    lam = np.linalg.eigvalsh(red)
    kappa_prod = np.prod(1.0 / lam, axis=1)
    dets = np.linalg.det(red) if red.shape[1] > 1 else red[:, 0, 0]
    return float(np.sum(quad.weights * kappa_prod * dets))


def volume_divergence(scene: EllipsoidSum, quad: SphereQuadrature) -> float:
    """Volume via the divergence theorem: (1/N) integral of x.n dvol."""
    _check_dim(scene, quad)
    dets = _area_factors(scene, quad)
    h = geometry.support_values(scene, quad.nodes)
    return float(np.sum(quad.weights * h * dets) / scene.dim)


def default_resolution(dim: int) -> int:
    """Default CLI/quadrature resolution: 256 for N = 2, 64 otherwise."""
    return 256 if dim == 2 else 64


def default_quadrature(dim: int) -> SphereQuadrature:
    return build_quadrature(dim, default_resolution(dim))
