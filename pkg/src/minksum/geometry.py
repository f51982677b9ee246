"""Ellipsoid scenes and the closed-form Minkowski-sum boundary.

An ellipsoid here is always centered at the origin and described by its
SPD shape matrix A: the solid body is {x : x^T A^-2 x < 1}, i.e. the image
of the open unit ball under A.  A scene is an ordered list of ellipsoids
of equal dimension whose Minkowski sum is the object of study.

The boundary of the sum admits an exact Gauss-map parameterization: the
point with outward unit normal n is sum_i A_i^2 n / |A_i n|, which is
positively homogeneous of degree zero in n.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .spd import SpdError, SpdMatrix, _sqrt_raw, sym_eigen

# Condition number above which per-term results are flagged unreliable.
COND_WARN = 1e8


class SceneSchemaError(ValueError):
    """Scene JSON does not match the expected schema."""


class SceneValidationError(ValueError):
    """Scene JSON parsed but a matrix failed numeric validation."""


@dataclass(frozen=True)
class Ellipsoid:
    """Solid origin-centered ellipsoid defined by an SPD shape matrix."""

    shape: SpdMatrix

    @property
    def dim(self) -> int:
        return self.shape.dim

    @property
    def matrix(self) -> np.ndarray:
        return self.shape.entries


@dataclass(frozen=True)
class EllipsoidSum:
    """Ordered list of ellipsoids sharing one dimension; the summed scene."""

    terms: tuple[Ellipsoid, ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        if len(terms) < 1:
            raise ValueError("a scene needs at least one ellipsoid")
        dims = {t.dim for t in terms}
        if len(dims) != 1:
            raise ValueError(f"mixed dimensions in scene: {sorted(dims)}")
        for i, t in enumerate(terms):
            lam = sym_eigen(t.matrix).eigenvalues
            if lam[-1] / lam[0] > COND_WARN:
                warnings.warn(
                    f"ellipsoid {i} has condition number > {COND_WARN:.0e}; "
                    "results may be unreliable",
                    stacklevel=2,
                )
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_matrices(cls, mats) -> "EllipsoidSum":
        return cls(tuple(Ellipsoid(SpdMatrix(np.asarray(m, float))) for m in mats))

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def matrices(self) -> tuple[np.ndarray, ...]:
        return tuple(t.matrix for t in self.terms)


def ellipsoid_from_general(s) -> Ellipsoid:
    """Ellipsoid {S u : |u| < 1} for a general nonsingular matrix S.

    The unique SPD representative is A = (S S^T)^(1/2).
    """
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {s.shape}")
    n = s.shape[0]
    norm = np.linalg.norm(s, 2)
    if abs(np.linalg.det(s)) <= 1e-12 * norm**n:
        raise ValueError("matrix is singular (or too close to singular)")
    return Ellipsoid(SpdMatrix(_sqrt_raw(s @ s.T)))


def boundary_points(scene: EllipsoidSum, normals: np.ndarray) -> np.ndarray:
    """Boundary points of the sum for rows of (not necessarily unit) normals."""
    ns = np.atleast_2d(np.asarray(normals, dtype=float))
    out = np.zeros_like(ns)
    for a in scene.matrices:
        r = np.linalg.norm(ns @ a, axis=1)
        out += ns @ (a @ a) / r[:, None]
    return out


def sum_boundary_point(scene: EllipsoidSum, n) -> np.ndarray:
    """Boundary point of the Minkowski sum with outward normal n/|n|."""
    n = np.asarray(n, dtype=float)
    if np.linalg.norm(n) == 0.0:
        raise ValueError("normal direction must be nonzero")
    return boundary_points(scene, n[None, :])[0]


def legacy_pair_boundary(a1: SpdMatrix, a2: SpdMatrix, u) -> np.ndarray:
    """Two-ellipsoid offset-surface formula, parameterized by u on dE_1.

    Equals the symmetric formula at n with u = A_1 n / |A_1 n|.  Kept as an
    independent cross-check of the symmetric parameterization.
    """
    u = np.asarray(u, dtype=float)
    w = a2.entries @ np.linalg.solve(a1.entries, u)
    return a1.entries @ u + a2.entries @ (w / np.linalg.norm(w))


def support_values(scene: EllipsoidSum, normals: np.ndarray) -> np.ndarray:
    """Support function sum_i |A_i n| evaluated at rows of unit normals."""
    ns = np.atleast_2d(np.asarray(normals, dtype=float))
    h = np.zeros(ns.shape[0])
    for a in scene.matrices:
        h += np.linalg.norm(ns @ a, axis=1)
    return h


def support_value(scene: EllipsoidSum, n) -> float:
    """Support function of the sum at a single unit direction."""
    return float(support_values(scene, np.asarray(n, float)[None, :])[0])


def transform_scene(scene: EllipsoidSum, s) -> EllipsoidSum:
    """Apply a nonsingular linear map S to the scene: A_i -> (S A_i^2 S^T)^(1/2)."""
    s = np.asarray(s, dtype=float)
    n = s.shape[0]
    if abs(np.linalg.det(s)) <= 1e-12 * np.linalg.norm(s, 2) ** n:
        raise ValueError("transformation matrix is singular")
    mats = [_sqrt_raw(s @ a @ a @ s.T) for a in scene.matrices]
    return EllipsoidSum.from_matrices(mats)


def _refine_support_gap(scene, x, n0, steps=20):
    """Projected gradient ascent of phi(n) = x.n - h(n) on the sphere."""
    x = np.asarray(x, float)
    n = np.asarray(n0, float) / np.linalg.norm(n0)

    def phi(v):
        return float(x @ v) - support_value(scene, v)

    best = phi(n)
    step = 0.1
    for _ in range(steps):
        grad = x - sum_boundary_point(scene, n)
        grad -= n * (n @ grad)
        gn = np.linalg.norm(grad)
        if gn == 0.0:
            break
        cand = n + step * grad / gn
        cand /= np.linalg.norm(cand)
        val = phi(cand)
        if val > best:
            n, best = cand, val
            step *= 1.5
        else:
            step *= 0.5
    return best


def contains_point(scene: EllipsoidSum, x, grid, tol: float | None = None) -> str:
    """Classify a point as 'inside', 'outside', or 'boundary'.

    Convexity gives x in the sum iff x.n <= h(n) for every direction n.
    The max of x.n - h(n) is located on a direction grid and refined by a
    fixed number of projected-gradient steps from the 5 best nodes, so the
    result is deterministic.
    """
    x = np.asarray(x, dtype=float)
    nodes = np.asarray(getattr(grid, "nodes", grid), dtype=float)
    h = support_values(scene, nodes)
    if tol is None:
        tol = 1e-8 * 2.0 * float(np.max(h))
    phi = nodes @ x - h
    starts = np.argsort(phi, kind="stable")[-5:]
    best = max(_refine_support_gap(scene, x, nodes[k]) for k in starts)
    if best > tol:
        return "outside"
    if best < -tol:
        return "inside"
    return "boundary"


def scene_to_json(scene: EllipsoidSum) -> dict:
    """Serializable scene description (matrices row-major)."""
    return {
        "dimension": scene.dim,
        "ellipsoids": [{"matrix": a.tolist()} for a in scene.matrices],
    }


def scene_from_json(obj) -> EllipsoidSum:
    """Parse a scene dict; raises SceneSchemaError / SceneValidationError."""
    if not isinstance(obj, dict):
        raise SceneSchemaError("scene must be a JSON object")
    if "dimension" not in obj or "ellipsoids" not in obj:
        raise SceneSchemaError("scene needs 'dimension' and 'ellipsoids' keys")
    dim = obj["dimension"]
    if not isinstance(dim, int) or dim < 1:
        raise SceneSchemaError("'dimension' must be a positive integer")
    items = obj["ellipsoids"]
    if not isinstance(items, list) or not items:
        raise SceneSchemaError("'ellipsoids' must be a non-empty list")

    terms = []
    for i, item in enumerate(items):
        if not isinstance(item, dict):
            raise SceneSchemaError(f"ellipsoid {i}: entry must be an object")
        if "center" in item:
            raise SceneSchemaError(
                f"ellipsoid {i}: centered ellipsoids are not supported"
            )
        if ("matrix" in item) == ("shape" in item):
            raise SceneSchemaError(
                f"ellipsoid {i}: exactly one of 'matrix' or 'shape' required"
            )
        key = "matrix" if "matrix" in item else "shape"
        try:
            mat = np.asarray(item[key], dtype=float)
        except (TypeError, ValueError) as exc:
            raise SceneSchemaError(f"ellipsoid {i}: bad {key} entries") from exc
        if mat.shape != (dim, dim):
            raise SceneSchemaError(
                f"ellipsoid {i}: {key} must be {dim}x{dim}, got {mat.shape}"
            )
        try:
            if key == "matrix":
                terms.append(Ellipsoid(SpdMatrix(mat)))
            else:
                terms.append(ellipsoid_from_general(mat))
        except (SpdError, ValueError) as exc:
            raise SceneValidationError(f"ellipsoid {i}: {exc}") from exc
    return EllipsoidSum(tuple(terms))
