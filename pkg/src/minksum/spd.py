"""Dense small-N symmetric positive-definite linear algebra.

Eigendecomposition is done with cyclic Jacobi rotations, which is robust
and fully deterministic for the small matrices (N <= ~16) this package
works with.  All derived SPD results are explicitly symmetrized before
validation to absorb roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative cutoff below which an eigenvalue disqualifies a matrix as SPD.
# Degenerate (zero semi-axis) ellipsoids are intentionally not representable.
EPS_PD = 1e-10

# Relative symmetry tolerance accepted on construction.
SYM_TOL = 1e-12

# Jacobi sweeps stop when the off-diagonal Frobenius norm drops below this
# fraction of the matrix norm.
_JACOBI_TOL = 1e-14
_MAX_SWEEPS = 100


class SpdError(ValueError):
    """Raised when a matrix fails symmetric positive-definite validation."""


def _check_symmetric(mat: np.ndarray, tol: float) -> np.ndarray:
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise SpdError(f"expected a square matrix, got shape {mat.shape}")
    scale = max(np.linalg.norm(mat), 1.0)
    if np.linalg.norm(mat - mat.T) > tol * scale:
        raise SpdError("matrix is not symmetric within tolerance")
    return 0.5 * (mat + mat.T)


@dataclass(frozen=True)
class SymEigen:
    """Spectral factorization V diag(lam) V^T with ascending eigenvalues."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return V @ np.diag(self.eigenvalues) @ V.T


def sym_eigen(mat, sym_tol: float = 1e-10) -> SymEigen:
    """Eigendecomposition of a symmetric matrix via cyclic Jacobi.

    Eigenvalues are returned in ascending order.  The sign of each
    eigenvector is fixed by making its largest-magnitude entry positive,
    so the factorization is deterministic.
    """
    A = _check_symmetric(mat, sym_tol).copy()
    n = A.shape[0]
    V = np.eye(n)
    thresh = _JACOBI_TOL * max(np.linalg.norm(A), 1e-300)

    for _ in range(_MAX_SWEEPS):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off < thresh:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
                V = V @ J

    lam = np.diag(A).copy()
    order = np.argsort(lam, kind="stable")
    lam = lam[order]
    V = V[:, order]
    for j in range(n):
        k = int(np.argmax(np.abs(V[:, j])))
        if V[k, j] < 0:
            V[:, j] = -V[:, j]
    return SymEigen(eigenvalues=lam, eigenvectors=V)


@dataclass(frozen=True)
class SpdMatrix:
    """Symmetric positive-definite N x N matrix with a validated spectrum."""

    entries: np.ndarray

    def __post_init__(self):
        m = _check_symmetric(self.entries, SYM_TOL)
        lam = sym_eigen(m).eigenvalues
        if lam[-1] <= 0 or lam[0] <= EPS_PD * lam[-1]:
            raise SpdError(
                f"matrix is not positive definite (eigenvalues {lam})"
            )
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def det(self) -> float:
        return float(np.linalg.det(self.entries))

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def _sym_part(mat: np.ndarray) -> np.ndarray:
    return 0.5 * (mat + mat.T)


def _sqrt_raw(mat: np.ndarray) -> np.ndarray:
    """Principal square root of a symmetric PSD array (no SPD validation)."""
    eig = sym_eigen(_sym_part(mat))
    lam = np.clip(eig.eigenvalues, 0.0, None)
    V = eig.eigenvectors
    return _sym_part(V @ np.diag(np.sqrt(lam)) @ V.T)


def spd_sqrt(mat: SpdMatrix) -> SpdMatrix:
    """Principal matrix square root: result R is SPD with R @ R = mat."""
    return SpdMatrix(_sqrt_raw(mat.entries))


def _inv_sqrt_raw(mat: np.ndarray) -> np.ndarray:
    eig = sym_eigen(_sym_part(mat))
    V = eig.eigenvectors
    return _sym_part(V @ np.diag(1.0 / np.sqrt(eig.eigenvalues)) @ V.T)


def geometric_mean(p: SpdMatrix, q: SpdMatrix) -> SpdMatrix:
    """Operator geometric mean P^(1/2) (P^(-1/2) Q P^(-1/2))^(1/2) P^(1/2).

    Midpoint of the geodesic from P to Q in the SPD manifold; symmetric
    in its arguments, and equal to P^(1/2) Q^(1/2) when P and Q commute.
    """
    if p.dim != q.dim:
        raise SpdError(f"dimension mismatch: {p.dim} vs {q.dim}")
    ph = _sqrt_raw(p.entries)
    phi = _inv_sqrt_raw(p.entries)
    inner = _sqrt_raw(phi @ q.entries @ phi)
    return SpdMatrix(ph @ inner @ ph)
