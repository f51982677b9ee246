"""Inner and outer ellipsoidal bounds for Minkowski sums of ellipsoids.

Inner bounds: the plain sum A_sum = sum A_i (which touches the true
boundary in 2N points when m = 2), Chernousko's maximal-volume inner
ellipsoid F(A,B) = [A^2 + 2 A^2#B^2 + B^2]^(1/2) for pairs, recursive
F-composites for m >= 3, and the Kurzhanski-Valyi one-parameter family.

Outer bounds: the family A_gamma = (sum gamma_i A_i^2)^(1/2) with
sum 1/gamma_i = 1, with gamma chosen by the exact pair optimality
equation in beta, by a trace heuristic, or by minimizing det A(l) over
directions l on the sphere.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import geometry, quadrature
from .geometry import EllipsoidSum
from .quadrature import unit_ball_volume
from .spd import SpdMatrix, _inv_sqrt_raw, _sqrt_raw, geometric_mean, sym_eigen


class BoundsError(RuntimeError):
    """A computed bound violated a guaranteed inequality."""


@dataclass(frozen=True)
class BoundReport:
    """Volume bounds and the bounding matrices that produced them."""

    inner_sum: SpdMatrix
    inner_john: SpdMatrix
    outer_optimal: SpdMatrix
    outer_heuristic: SpdMatrix
    lower_volume: float
    upper_volume: float
    bm_chain: tuple[float, float, float, float]

    def to_json(self) -> dict:
        return {
            "inner_sum_det": self.inner_sum.det(),
            "inner_john_det": self.inner_john.det(),
            "outer_optimal_det": self.outer_optimal.det(),
            "outer_heuristic_det": self.outer_heuristic.det(),
            "lower_volume": self.lower_volume,
            "upper_volume": self.upper_volume,
            "bm_chain": list(self.bm_chain),
        }


def inner_sum_matrix(scene: EllipsoidSum) -> SpdMatrix:
    """A_sum = sum of the shape matrices; E_{A_sum} lies inside the sum."""
    total = np.zeros((scene.dim, scene.dim))
    for a in scene.matrices:
        total = total + a
    return SpdMatrix(total)


def _support_gap_max(candidate: np.ndarray, scene: EllipsoidSum, nodes, steps=20):
    """Refined max over the sphere of |A_c n| - sum_j |A_j n|."""
    gaps = np.linalg.norm(nodes @ candidate, axis=1) - geometry.support_values(
        scene, nodes
    )
    starts = np.argsort(gaps, kind="stable")[-5:]
    c2 = candidate @ candidate

    def gap(n):
        return float(
            np.linalg.norm(candidate @ n) - geometry.support_value(scene, n)
        )

    best = -np.inf
    for k in starts:
        n = nodes[k].copy()
        val = gaps[k]
        step = 0.05
        for _ in range(steps):
            grad = c2 @ n / np.linalg.norm(candidate @ n) - geometry.sum_boundary_point(
                scene, n
            )
            grad -= n * (n @ grad)
            gn = np.linalg.norm(grad)
            if gn == 0.0:
                break
            cand = n + step * grad / gn
            cand /= np.linalg.norm(cand)
            v = gap(cand)
            if v > val:
                n, val = cand, v
                step *= 1.5
            else:
                step *= 0.5
        best = max(best, val)
    return best


def containment_check(candidate: SpdMatrix, scene: EllipsoidSum, resolution=None) -> bool:
    """True iff E_candidate is contained in the Minkowski sum.

    Containment is equivalent to |A_c v| <= sum_j |A_j v| for all v; the
    max violation is searched on a sphere grid with deterministic local
    refinement and compared against a small relative slack.
    """
    if candidate.dim != scene.dim:
        raise ValueError("dimension mismatch")
    if resolution is None:
        resolution = 720 if scene.dim == 2 else 64
    nodes = quadrature.build_quadrature(scene.dim, resolution).nodes
    scale = float(np.max(geometry.support_values(scene, nodes)))
    return _support_gap_max(candidate.entries, scene, nodes) <= 1e-9 * scale


def contact_points(a1: SpdMatrix, a2: SpdMatrix) -> np.ndarray:
    """The 2N points where E_{A1+A2} touches the boundary of E_1 + E_2.

    They sit at the eigenvector directions of A1^-1 A2, where the support
    of the inner sum ellipsoid equals the support of the Minkowski sum.
    """
    if a1.dim != a2.dim:
        raise ValueError("dimension mismatch")
    s_inv = _inv_sqrt_raw(a1.entries)
    w = sym_eigen(s_inv @ a2.entries @ s_inv).eigenvectors
    vs = s_inv @ w
    vs /= np.linalg.norm(vs, axis=0)
    asum = a1.entries + a2.entries
    pts = []
    for j in range(a1.dim):
        v = vs[:, j]
        x = asum @ asum @ v / np.linalg.norm(asum @ v)
        pts.append(x)
        pts.append(-x)
    return np.array(pts)


def john_inner_pair(a: SpdMatrix, b: SpdMatrix) -> SpdMatrix:
    """Maximal-volume inner ellipsoid of E_A + E_B (Chernousko's formula)."""
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    p = SpdMatrix(a.entries @ a.entries)
    q = SpdMatrix(b.entries @ b.entries)
    g = geometric_mean(p, q)
    return SpdMatrix(_sqrt_raw(p.entries + 2.0 * g.entries + q.entries))


def _bracketings(mats: tuple[SpdMatrix, ...]):
    """All F-composites over distinct binary bracketing orders."""
    if len(mats) == 1:
        yield mats[0]
        return
    indices = range(len(mats))
    for size in range(1, len(mats)):
        for left_idx in itertools.combinations(indices, size):
            if 0 not in left_idx:
                continue  # fix element 0 on the left to avoid mirror duplicates
            right_idx = tuple(i for i in indices if i not in left_idx)
            left = tuple(mats[i] for i in left_idx)
            right = tuple(mats[i] for i in right_idx)
            for lt in _bracketings(left):
                for rt in _bracketings(right):
                    yield john_inner_pair(lt, rt)


def john_inner_recursive(scene: EllipsoidSum) -> SpdMatrix:
    """Best recursive F-composite inner ellipsoid for m >= 3 terms.

    All binary bracketing orders are evaluated for m <= 4; beyond that a
    greedy largest-determinant pairing is used.  Only "best found" is
    claimed, not optimality.
    """
    if scene.m < 3:
        raise ValueError("john_inner_recursive requires at least 3 ellipsoids")
    mats = tuple(SpdMatrix(a) for a in scene.matrices)
    if scene.m <= 4:
        # The plain sum is a valid inner candidate and can beat every
        # F-composite, so it participates in the max.
        best = inner_sum_matrix(scene)
        for cand in _bracketings(mats):
            if cand.det() > best.det():
                best = cand
    else:
        pool = list(mats)
        while len(pool) > 1:
            best_pair, best_det = None, -np.inf
            for i in range(len(pool) - 1):
                for j in range(i + 1, len(pool)):
                    f = john_inner_pair(pool[i], pool[j])
                    if f.det() > best_det:
                        best_pair, best_det = (i, j, f), f.det()
            i, j, f = best_pair
            pool = [p for k, p in enumerate(pool) if k not in (i, j)] + [f]
        best = pool[0]
        plain = inner_sum_matrix(scene)
        if plain.det() > best.det():
            best = plain
    if not containment_check(best, scene):
        raise BoundsError("recursive John composite failed the containment check")
    return best


def kv_inner_family(a: SpdMatrix, b: SpdMatrix, s: SpdMatrix) -> SpdMatrix:
    """Kurzhanski-Valyi inner ellipsoid for the SPD family parameter S.

    S_hat^2 = S^-1 [(S A^2 S)^(1/2) + (S B^2 S)^(1/2)]^2 S^-1; the choices
    S = A^-1 and S = B^-1 both recover F(A, B).
    """
    if not (a.dim == b.dim == s.dim):
        raise ValueError("dimension mismatch")
    sm = s.entries
    inner = _sqrt_raw(sm @ a.entries @ a.entries @ sm) + _sqrt_raw(
        sm @ b.entries @ b.entries @ sm
    )
    s_inv = np.linalg.inv(sm)
    sq = s_inv @ inner @ inner @ s_inv
    return SpdMatrix(_sqrt_raw(0.5 * (sq + sq.T)))


def outer_gamma_matrix(scene: EllipsoidSum, gammas) -> SpdMatrix:
    """Outer ellipsoid A_gamma = (sum gamma_i A_i^2)^(1/2).

    Requires gamma_i > 0 with sum 1/gamma_i = 1, which guarantees
    containment of the Minkowski sum by Cauchy-Schwarz.
    """
    gammas = np.asarray(gammas, dtype=float)
    if gammas.shape != (scene.m,):
        raise ValueError(f"need {scene.m} gamma values")
    if np.any(gammas <= 0.0):
        raise ValueError("gamma values must be positive")
    if abs(np.sum(1.0 / gammas) - 1.0) > 1e-12:
        raise ValueError("gamma values must satisfy sum 1/gamma_i = 1")
    total = np.zeros((scene.dim, scene.dim))
    for g, a in zip(gammas, scene.matrices):
        total += g * (a @ a)
    return SpdMatrix(_sqrt_raw(total))


def _pair_spectrum(a1: SpdMatrix, a2: SpdMatrix) -> np.ndarray:
    """Squared singular values of A1^-1 A2, i.e. eigenvalues of A1^-1 A2^2 A1^-1."""
    inv = np.linalg.inv(a1.entries)
    sym = inv @ a2.entries @ a2.entries @ inv
    return sym_eigen(0.5 * (sym + sym.T)).eigenvalues


def beta_residual(beta: float, mu: np.ndarray) -> float:
    """Residual of the pair optimality equation sum (1 - b^2 mu)/(1 + b mu)."""
    return float(np.sum((1.0 - beta**2 * mu) / (1.0 + beta * mu)))


def optimal_beta(a1: SpdMatrix, a2: SpdMatrix) -> float:
    """Unique positive root of the pair optimality equation.

    mu_j are the squared singular values of A1^-1 A2.  The residual is
    strictly decreasing in beta, each term vanishing at beta = 1/sqrt(mu_j),
    so [1/sqrt(mu_max), 1/sqrt(mu_min)] brackets the root.  Bisection to
    1e-14 on beta.
    """
    mu = _pair_spectrum(a1, a2)
    lo = 1.0 / math.sqrt(mu[-1])
    hi = 1.0 / math.sqrt(mu[0])
    if hi - lo < 1e-16:
        return 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if beta_residual(mid, mu) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14:
            break
    return 0.5 * (lo + hi)


def gammas_from_beta(beta: float) -> tuple[float, float]:
    """Pair gamma values gamma_1 = 1 + 1/beta, gamma_2 = 1 + beta."""
    return 1.0 + 1.0 / beta, 1.0 + beta


def heuristic_gammas(scene: EllipsoidSum) -> np.ndarray:
    """Trace heuristic gamma'_i = sum_j sqrt(tr A_j^2) / sqrt(tr A_i^2).

    Satisfies the constraint sum 1/gamma'_i = 1 identically.
    """
    roots = np.array([math.sqrt(np.trace(a @ a)) for a in scene.matrices])
    return float(np.sum(roots)) / roots


def direction_outer_matrix(scene: EllipsoidSum, l) -> SpdMatrix:
    """Outer matrix A(l) = (sum |A_j l|)^(1/2) (sum A_i^2/|A_i l|)^(1/2)."""
    l = np.asarray(l, dtype=float)
    s = 0.0
    mix = np.zeros((scene.dim, scene.dim))
    for a in scene.matrices:
        r = float(np.linalg.norm(a @ l))
        s += r
        mix += (a @ a) / r
    return SpdMatrix(_sqrt_raw(s * mix))


def direction_gammas(scene: EllipsoidSum, l) -> np.ndarray:
    """Optimal gamma_i for direction l: 1/gamma_i = |A_i l| / sum_j |A_j l|."""
    l = np.asarray(l, dtype=float)
    norms = np.array([np.linalg.norm(a @ l) for a in scene.matrices])
    return float(np.sum(norms)) / norms


def _log_det_outer(scene: EllipsoidSum, nodes: np.ndarray) -> np.ndarray:
    """log det A(u)^2 at each row of unit directions (vectorized)."""
    k, dim = nodes.shape
    s = np.zeros(k)
    mix = np.zeros((k, dim, dim))
    for a in scene.matrices:
        r = np.linalg.norm(nodes @ a, axis=1)
        s += r
        mix += (a @ a)[None, :, :] / r[:, None, None]
    _, logdet = np.linalg.slogdet(mix)
    return dim * np.log(s) + logdet


def _angles_from_unit(n: np.ndarray) -> np.ndarray:
    """Hyperspherical chart angles for a unit vector (inverse of the chart)."""
    dim = n.shape[0]
    phi = np.zeros(dim - 1)
    for i in range(dim - 2):
        tail = np.linalg.norm(n[i + 1 :])
        phi[i] = math.atan2(tail, n[i])
    phi[dim - 2] = math.atan2(n[dim - 1], n[dim - 2])
    return phi


def _unit_from_angles(phi: np.ndarray, dim: int) -> np.ndarray:
    n = np.empty(dim)
    sin_prod = 1.0
    for i in range(dim - 1):
        n[i] = sin_prod * math.cos(phi[i])
        sin_prod *= math.sin(phi[i])
    n[dim - 1] = sin_prod
    return n


def _log_det_gamma(scene: EllipsoidSum, weights: np.ndarray) -> float:
    """log det A_gamma^2 for the simplex point w_i = 1/gamma_i."""
    total = np.zeros((scene.dim, scene.dim))
    for w, a in zip(weights, scene.matrices):
        total += (a @ a) / w
    return float(np.linalg.slogdet(total)[1])


def minvol_outer(scene: EllipsoidSum, budget: int = 200) -> SpdMatrix:
    """Minimal-volume outer ellipsoid of the family (sum gamma_i A_i^2)^(1/2).

    Two deterministic stages.  First, the direction family A(l) is
    minimized over l: coarse sphere grid (360 directions for N = 2,
    >= 10^3 otherwise), then Nelder-Mead in chart coordinates from the 5
    best grid starts; this is exact for m = 2.  Second, for m >= 3 the
    gamma simplex is searched directly (Nelder-Mead on a log
    parameterization of w_i = 1/gamma_i) starting from the better of the
    direction optimum and the trace heuristic, because the direction
    family does not contain the simplex optimum in general.  The result
    never has a larger determinant than the heuristic outer ellipsoid.
    `budget` caps the iterations per start.
    """
    dim = scene.dim
    if dim == 2:
        theta = np.pi * np.arange(360) / 360.0  # objective is even in l
        nodes = np.stack([np.cos(theta), np.sin(theta)], axis=1)
    else:
        res = 32 if dim == 3 else 8
        nodes = quadrature.build_quadrature(dim, max(res, 4)).nodes
    vals = _log_det_outer(scene, nodes)
    starts = np.argsort(vals, kind="stable")[:5]

    def objective(phi):
        u = _unit_from_angles(np.asarray(phi, float), dim)
        return _log_det_outer(scene, u[None, :])[0]

    best_val, best_l = np.inf, None
    for k in starts:
        phi0 = _angles_from_unit(nodes[k])
        res_opt = minimize(
            objective,
            phi0,
            method="Nelder-Mead",
            options={
                "maxiter": budget,
                "xatol": 1e-12,
                "fatol": 1e-14,
                "adaptive": False,
            },
        )
        if res_opt.fun < best_val:
            best_val = float(res_opt.fun)
            best_l = _unit_from_angles(res_opt.x, dim)
    best_w = 1.0 / direction_gammas(scene, best_l)

    if scene.m >= 3:
        cand_ws = [best_w, 1.0 / heuristic_gammas(scene)]
        cand_ws.sort(key=lambda w: _log_det_gamma(scene, w))
        z0 = np.log(cand_ws[0])

        def gamma_objective(z):
            w = np.exp(z - np.max(z))
            return _log_det_gamma(scene, w / np.sum(w))

        res_opt = minimize(
            gamma_objective,
            z0,
            method="Nelder-Mead",
            options={
                "maxiter": 20 * budget,
                "xatol": 1e-12,
                "fatol": 1e-14,
                "adaptive": False,
            },
        )
        w = np.exp(res_opt.x - np.max(res_opt.x))
        w /= np.sum(w)
        if _log_det_gamma(scene, w) < _log_det_gamma(scene, cand_ws[0]):
            best_w = w
        else:
            best_w = cand_ws[0]

    outer = outer_gamma_matrix(scene, 1.0 / best_w)

    # Containment is guaranteed analytically; spot-check on the grid.
    gap = geometry.support_values(scene, nodes) - np.linalg.norm(
        nodes @ outer.entries, axis=1
    )
    if float(np.max(gap)) > 1e-9 * float(np.max(geometry.support_values(scene, nodes))):
        raise BoundsError("direction-family outer ellipsoid failed containment")
    return outer


def best_inner_john(scene: EllipsoidSum) -> SpdMatrix:
    """Best available John-style inner matrix for any m."""
    if scene.m == 1:
        return SpdMatrix(scene.matrices[0])
    if scene.m == 2:
        return john_inner_pair(SpdMatrix(scene.matrices[0]), SpdMatrix(scene.matrices[1]))
    return john_inner_recursive(scene)


def brunn_minkowski_chain(a1: SpdMatrix, a2: SpdMatrix, quad=None):
    """The four-link sharpened Brunn-Minkowski chain for a pair (descending).

    (true volume)^(1/N) >= (V_B det F)^(1/N) >= (V_B det(A1+A2))^(1/N)
    >= Vol(E1)^(1/N) + Vol(E2)^(1/N).
    """
    scene = EllipsoidSum.from_matrices([a1.entries, a2.entries])
    if quad is None:
        quad = quadrature.default_quadrature(scene.dim)
    dim = scene.dim
    vb = unit_ball_volume(dim)
    vol = quadrature.volume_divergence(scene, quad)
    f = john_inner_pair(a1, a2)
    det_sum = float(np.linalg.det(a1.entries + a2.entries))
    chain = (
        vol ** (1.0 / dim),
        (vb * f.det()) ** (1.0 / dim),
        (vb * det_sum) ** (1.0 / dim),
        (vb * a1.det()) ** (1.0 / dim) + (vb * a2.det()) ** (1.0 / dim),
    )
    return chain


def volume_bounds(scene: EllipsoidSum, quad=None) -> BoundReport:
    """Full lower/upper volume bound report for a scene.

    Lower bound: best of det A_sum and the John candidate.  Upper bound:
    best of the direction-optimal and trace-heuristic outer ellipsoids.
    The report also carries the Brunn-Minkowski comparison chain.
    """
    if quad is None:
        quad = quadrature.default_quadrature(scene.dim)
    dim = scene.dim
    vb = unit_ball_volume(dim)

    inner_sum = inner_sum_matrix(scene)
    inner_john = best_inner_john(scene)
    outer_opt = minvol_outer(scene)
    outer_heur = outer_gamma_matrix(scene, heuristic_gammas(scene))

    lower = vb * max(inner_sum.det(), inner_john.det())
    upper = vb * min(outer_opt.det(), outer_heur.det())

    vol = quadrature.volume_divergence(scene, quad)
    chain = (
        vol ** (1.0 / dim),
        (vb * inner_john.det()) ** (1.0 / dim),
        (vb * inner_sum.det()) ** (1.0 / dim),
        float(sum((vb * float(np.linalg.det(a))) ** (1.0 / dim) for a in scene.matrices)),
    )

    slack = 1e-9 * max(vol, 1.0)
    if not (lower <= vol + slack and vol <= upper + slack):
        raise BoundsError(
            f"bound sandwich violated: {lower} <= {vol} <= {upper} failed"
        )
    return BoundReport(
        inner_sum=inner_sum,
        inner_john=inner_john,
        outer_optimal=outer_opt,
        outer_heuristic=outer_heur,
        lower_volume=lower,
        upper_volume=upper,
        bm_chain=chain,
    )
