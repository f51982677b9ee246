"""Curvature of Minkowski-sum boundaries.

The matrix C(n) = sum_i [A_i^2/|A_i n| - A_i^2 n n^T A_i^2 / |A_i n|^3] is
positive semidefinite of rank N-1 with null direction n; the principal
curvatures of the sum boundary at x(n) are the reciprocals of its positive
eigenvalues.  Reducing C to the tangent hyperplane with an orthonormal
basis M gives the (N-1)x(N-1) SPD matrix C~ = M^T C M whose determinant is
the Gauss-map area factor used for surface integrals.

Production paths work directly with n; spherical-angle charts appear only
in `fundamental_forms`, which exists to connect C~ to the classical
G / L description.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import EllipsoidSum
from .spd import sym_eigen

# Chart points must keep polar angles this far from the poles.
CHART_POLE_EPS = 1e-6


@dataclass(frozen=True)
class CurvatureMatrix:
    """Full N x N curvature matrix C(n) together with its null direction."""

    full: np.ndarray
    normal: np.ndarray


@dataclass(frozen=True)
class TangentBasis:
    """N x (N-1) matrix of orthonormal columns orthogonal to the normal."""

    columns: np.ndarray
    normal: np.ndarray


def curvature_term(a, n) -> np.ndarray:
    """Single-ellipsoid contribution C(A, n) = A^2/|An| - A^2 n n^T A^2/|An|^3.

    With n of arbitrary length this is the degree -1 homogeneous extension,
    which is the convention under which the GL(N) transformation law
    C((S A^2 S^T)^(1/2), n) = S C(A, S^T n) S^T holds.
    """
    a = np.asarray(a, dtype=float)
    n = np.asarray(n, dtype=float)
    r = np.linalg.norm(a @ n)
    a2 = a @ a
    w = a2 @ n
    return a2 / r - np.outer(w, w) / r**3


def curvature_stack(scene: EllipsoidSum, normals: np.ndarray) -> np.ndarray:
    """C(n) for each row of unit normals; shape (K, N, N)."""
    ns = np.atleast_2d(np.asarray(normals, dtype=float))
    k, dim = ns.shape
    c = np.zeros((k, dim, dim))
    for a in scene.matrices:
        a2 = a @ a
        r = np.linalg.norm(ns @ a, axis=1)
        w = ns @ a2
        c += a2[None, :, :] / r[:, None, None]
        c -= w[:, :, None] * w[:, None, :] / (r**3)[:, None, None]
    return c


def curvature_matrix(scene: EllipsoidSum, n) -> CurvatureMatrix:
    """Curvature matrix of the sum boundary at the point with unit normal n."""
    n = np.asarray(n, dtype=float)
    return CurvatureMatrix(full=curvature_stack(scene, n[None, :])[0], normal=n)


def tangent_basis_stack(normals: np.ndarray) -> np.ndarray:
    """Householder tangent bases for rows of unit normals; shape (K, N, N-1).

    Columns 1..N-1 of the reflector mapping e_N to n.  Deterministic; for
    n = e_N the basis degenerates to the first N-1 identity columns.
    """
    ns = np.atleast_2d(np.asarray(normals, dtype=float))
    k, dim = ns.shape
    v = ns.copy()
    v[:, -1] -= 1.0
    s = np.einsum("ki,ki->k", v, v)
    h = np.broadcast_to(np.eye(dim), (k, dim, dim)).copy()
    ok = s > 1e-28
    h[ok] -= 2.0 * v[ok, :, None] * v[ok, None, :] / s[ok, None, None]
    return h[:, :, : dim - 1]


def tangent_basis(n) -> TangentBasis:
    """Deterministic orthonormal tangent basis at a unit normal n."""
    n = np.asarray(n, dtype=float)
    return TangentBasis(columns=tangent_basis_stack(n[None, :])[0], normal=n)


def reduced_curvature(c: CurvatureMatrix, basis: TangentBasis) -> np.ndarray:
    """Tangent-space reduction C~ = M^T C M; SPD of size (N-1) x (N-1)."""
    if not np.allclose(c.normal, basis.normal, atol=1e-12):
        raise ValueError("curvature matrix and tangent basis use different normals")
    m = basis.columns
    red = m.T @ c.full @ m
    return 0.5 * (red + red.T)


def reduced_stack(scene: EllipsoidSum, normals: np.ndarray) -> np.ndarray:
    """C~(n) for each row of unit normals; shape (K, N-1, N-1)."""
    ns = np.atleast_2d(np.asarray(normals, dtype=float))
    c = curvature_stack(scene, ns)
    m = tangent_basis_stack(ns)
    red = np.einsum("kpi,kpq,kqj->kij", m, c, m)
    return 0.5 * (red + np.swapaxes(red, 1, 2))


def principal_curvatures(scene: EllipsoidSum, n) -> np.ndarray:
    """Principal curvatures (ascending) at the boundary point with normal n.

    These are the reciprocals of the positive eigenvalues of C(n), computed
    from the reduced matrix C~ to avoid the null direction.
    """
    n = np.asarray(n, dtype=float)
    red = reduced_stack(scene, n[None, :])[0]
    lam = sym_eigen(red).eigenvalues
    return np.sort(1.0 / lam)


def _chart_normal_and_jacobian(phi: np.ndarray, dim: int):
    """Hyperspherical chart n(phi) and the sphere Jacobian [dn/dphi_j].

    n_1 = cos(phi_1), n_i = cos(phi_i) prod_{k<i} sin(phi_k), and the last
    coordinate carries no cosine.  The chart is orthogonal: dn/dphi_j has
    norm prod_{k<j} sin(phi_k).
    """
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (dim - 1,):
        raise ValueError(f"chart point must have {dim - 1} angles")
    if dim > 2:
        polar = phi[: dim - 2]
        if np.any(polar < CHART_POLE_EPS) or np.any(polar > np.pi - CHART_POLE_EPS):
            raise ValueError("chart point too close to a coordinate pole")

    sins = np.sin(phi)
    coss = np.cos(phi)

    def coord(i: int) -> float:
        # i in 0..dim-1
        val = 1.0
        for k in range(min(i, dim - 1)):
            val *= sins[k]
        if i < dim - 1:
            val *= coss[i]
        return val

    n = np.array([coord(i) for i in range(dim)])

    jac = np.zeros((dim, dim - 1))
    for j in range(dim - 1):
        for i in range(dim):
            val = 1.0
            for k in range(min(i, dim - 1)):
                val *= coss[k] if k == j else sins[k]
            if i < dim - 1:
                if i == j:
                    val *= -sins[i]
                elif j < i:
                    val *= coss[i]
                else:
                    val = 0.0
            elif j >= dim - 1:
                val = 0.0
            jac[i, j] = val
    return n, jac


def fundamental_forms(scene: EllipsoidSum, phi):
    """First and second fundamental forms (G, L) in a spherical chart.

    G = J~^T C~^2 J~ and L = J~^T C~ J~ with J~ the diagonal chart Jacobian,
    so the eigenvalues of G^-1 L are the principal curvatures.
    """
    dim = scene.dim
    n, jac = _chart_normal_and_jacobian(np.asarray(phi, float), dim)
    c = curvature_stack(scene, n[None, :])[0]
    norms = np.linalg.norm(jac, axis=0)
    m = jac / norms
    c_red = m.T @ c @ m
    c_red = 0.5 * (c_red + c_red.T)
    jt = np.diag(norms)
    g = jt @ c_red @ c_red @ jt
    ell = jt @ c_red @ jt
    return 0.5 * (g + g.T), 0.5 * (ell + ell.T)
