"""Numerical certificates for non-existence results.

Everything here is a computation whose outcome supports an impossibility
statement (no cyclic MUB in d=3, no 3-point simplex 3-design in d=3, no
cyclic 4-designs). The outputs are numerical evidence, not proofs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.optimize import minimize

from . import basisgen, designlib
from .errors import DomainError, InvalidInputError

PHI_MIN = basisgen.PHI_MIN
PHI_MAX = 2.0 * np.pi - PHI_MIN


def _require_admissible(phi: float) -> None:
    if not np.isfinite(phi) or not basisgen.qutrit_admissible(phi):
        raise DomainError(f"phi={phi!r} is outside the admissible window")


def hadamard_merit(phi: float, w: float, z: float) -> float:
    """F = sum_a (|H_aa|^2 - 1/3)^2 for H = V diag(1, e^{2iw}, e^{i(w-z)}) V^dag.

    F = 0 would mean H is a complex Hadamard matrix with the eigenbasis of
    the qutrit family, i.e. a cyclic MUB generator in d=3.
    """
    phi = float(phi)
    _require_admissible(phi)
    v = basisgen.qutrit_family(phi).matrix
    lam = np.array([1.0, np.exp(2j * w), np.exp(1j * (w - z))])
    h = (v * lam) @ np.conj(v.T)
    return float(np.sum((np.abs(np.diag(h)) ** 2 - 1.0 / 3.0) ** 2))


def _merit_from_amplitudes(phi, w, z):
    """Vectorized F using only |V|^2; broadcasts over its arguments."""
    c, s = np.cos(phi), np.sin(phi)
    q0 = (1 - c) / 3
    q1 = 1 / 3 + c / 6 + s / (2 * np.sqrt(3))
    q2 = 1 / 3 + c / 6 - s / (2 * np.sqrt(3))
    l1, l2 = np.exp(2j * w), np.exp(1j * (w - z))
    # rows of |V|^2 are (q0, q2, q1), (q1, q0, q2), (q2, q1, q0)
    d0 = np.abs(q0 + q2 * l1 + q1 * l2) ** 2
    d1 = np.abs(q1 + q0 * l1 + q2 * l2) ** 2
    d2 = np.abs(q2 + q1 * l1 + q0 * l2) ** 2
    return (d0 - 1 / 3) ** 2 + (d1 - 1 / 3) ** 2 + (d2 - 1 / 3) ** 2


@dataclass(frozen=True)
class MeritMinimum:
    value: float
    phi: float
    w: float
    z: float
    grid: int
    grid_min: float

    def to_json(self) -> dict:
        return {"min": self.value, "argmin": {"phi": self.phi, "w": self.w, "z": self.z},
                "grid": self.grid, "grid_min": self.grid_min}


def hadamard_merit_minimize(grid: int = 80, refine: int = 200, candidates: int = 24,
                            phi_fixed: float | None = None) -> MeritMinimum:
    """Grid search over (w, z) in [0, 2pi)^2 and phi in the central window, then local refinement.

    The other windows (shifted by 2 pi/3) permute the amplitudes and give
    the same values. With ``phi_fixed`` only (w, z) are searched.
    """
    if grid < 50:
        raise InvalidInputError(f"grid resolution must be >= 50, got {grid}")
    ang = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    if phi_fixed is None:
        phis = np.linspace(PHI_MIN, PHI_MAX, grid)
    else:
        _require_admissible(phi_fixed)
        phis = np.array([float(phi_fixed)])
    P, W, Z = np.meshgrid(phis, ang, ang, indexing="ij")
    vals = _merit_from_amplitudes(P, W, Z)
    flat = vals.ravel()
    order = np.lexsort((np.arange(flat.size), flat))[:candidates]
    grid_min = float(flat[order[0]])

    best = (grid_min, float(P.flat[order[0]]), float(W.flat[order[0]]), float(Z.flat[order[0]]))
    for idx in order:
        if phi_fixed is None:
            x0 = [P.flat[idx], W.flat[idx], Z.flat[idx]]
            fun = lambda x: float(_merit_from_amplitudes(x[0], x[1], x[2]))
            bounds = [(PHI_MIN, PHI_MAX), (None, None), (None, None)]
        else:
            x0 = [W.flat[idx], Z.flat[idx]]
            fun = lambda x: float(_merit_from_amplitudes(phi_fixed, x[0], x[1]))
            bounds = [(None, None), (None, None)]
        res = minimize(fun, x0, method="L-BFGS-B", bounds=bounds,
                       options={"maxiter": refine, "ftol": 1e-16, "gtol": 1e-12})
        if res.fun < best[0]:
            x = res.x
            best = (float(res.fun), float(x[0]), float(x[1]), float(x[2])) if phi_fixed is None \
                else (float(res.fun), float(phi_fixed), float(x[0]), float(x[1]))
    val, phi, w, z = best
    return MeritMinimum(val, phi, float(np.mod(w, 2 * np.pi)), float(np.mod(z, 2 * np.pi)), grid, grid_min)


def qutrit_points(phi: float) -> np.ndarray:
    """Decohered columns of the qutrit family member: three points in Delta_3 (rows)."""
    phi = float(phi)
    _require_admissible(phi)
    return (np.abs(basisgen.qutrit_family(phi).matrix) ** 2).T


def simplex3_cost(phi: float) -> float:
    """Squared degree-3 moment mismatches of the three decohered points.

    Terms: <p_a^3> vs 1/10 for each a, <p_a^2 p_b> vs 1/30 for each
    ordered a != b, and <p_a p_b p_c> vs 1/60 for each ordered triple of
    distinct indices.
    """
    pts = qutrit_points(phi)
    avg = lambda ks: float(np.mean(np.prod(pts ** np.array(ks), axis=1)))
    cost = 0.0
    for a in range(3):
        ks = [0, 0, 0]
        ks[a] = 3
        cost += (avg(ks) - 1 / 10) ** 2
    for a, b in itertools.permutations(range(3), 2):
        ks = [0, 0, 0]
        ks[a], ks[b] = 2, 1
        cost += (avg(ks) - 1 / 30) ** 2
    for _ in itertools.permutations(range(3), 3):
        cost += (avg([1, 1, 1]) - 1 / 60) ** 2
    return cost


def simplex3_cost_closed_form(phi: float) -> float:
    """The published trigonometric expression sin^2/46656 + sqrt6 sin/19440 + 59641/1555200.

    It does not agree with simplex3_cost; kept for comparison.
    """
    s = np.sin(phi)
    return float(s * s / 46656 + np.sqrt(6) * s / 19440 + 59641 / 1555200)


def simplex3_cost_minimum(grid: int = 2001) -> tuple[float, float]:
    """(min cost, argmin phi) over the central admissible window."""
    phis = np.linspace(PHI_MIN, PHI_MAX, grid)
    vals = np.array([simplex3_cost(p) for p in phis])
    i = int(np.argmin(vals))
    lo, hi = phis[max(i - 1, 0)], phis[min(i + 1, grid - 1)]
    res = minimize(lambda x: simplex3_cost(float(np.clip(x[0], PHI_MIN, PHI_MAX))), [phis[i]],
                   method="L-BFGS-B", bounds=[(lo, hi)])
    if res.fun < vals[i]:
        return float(res.fun), float(res.x[0])
    return float(vals[i]), float(phis[i])


def moment_matrix(dim: int) -> np.ndarray:
    """M[(a,b),(m,n)] = <p_a p_b p_m p_n> over the flat simplex."""
    if int(dim) != dim or dim < 2:
        raise InvalidInputError(f"dim must be an integer >= 2, got {dim}")
    d = int(dim)
    m = np.empty((d * d, d * d))
    for (a, b), (c, e) in itertools.product(itertools.product(range(d), repeat=2), repeat=2):
        ks = [0] * d
        for i in (a, b, c, e):
            ks[i] += 1
        m[a * d + b, c * d + e] = float(designlib.simplex_monomial_average(d, ks))
    return m


def numerical_rank(m: np.ndarray) -> int:
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > max(m.shape) * np.finfo(float).eps * s[0]))


def moment_matrix_rank(dim: int) -> int:
    return numerical_rank(moment_matrix(dim))


@dataclass(frozen=True)
class QubitMomentReport:
    tmax: int
    feasible: bool
    points: tuple[float, float] | None
    residuals: tuple[float, ...]
    best_lsq_residual: float
    detail: dict

    def to_json(self) -> dict:
        return {"tmax": self.tmax, "feasible": self.feasible, "points": self.points,
                "residuals": list(self.residuals), "best_lsq_residual": self.best_lsq_residual,
                "detail": self.detail}


def _moment_residuals(x1: float, x2: float, tmax: int) -> np.ndarray:
    return np.array([(x1 ** t + x2 ** t) / 2 - 1 / (t + 1) for t in range(1, tmax + 1)])


def qubit_moment_system(tmax: int) -> QubitMomentReport:
    """Two points x_1, x_2 in [0, 1] with (x_1^t + x_2^t)/2 = 1/(t+1) for t <= tmax.

    t=1 forces x_2 = 1 - x_1. Writing x_1 = 1/2 + e, t=2 forces
    e^2 = 1/12, while t=4 alone forces e^4 + (3/2) e^2 - 11/80 = 0; the
    two values of e^2 differ, so the t <= 4 system has no solution.
    """
    if tmax not in (3, 4):
        raise InvalidInputError(f"tmax must be 3 or 4, got {tmax}")
    e2_from_t2 = 1.0 / 12.0
    e2_from_t4 = float(max(np.roots([1.0, 1.5, -11.0 / 80.0]).real))
    xs = np.linspace(0.0, 1.0, 20001)
    lsq = np.array([np.sum(_moment_residuals(x, 1 - x, tmax) ** 2) for x in xs])
    i = int(np.argmin(lsq))
    res = minimize(lambda v: float(np.sum(_moment_residuals(v[0], v[1], tmax) ** 2)),
                   [xs[i], 1 - xs[i]], method="L-BFGS-B", bounds=[(0, 1), (0, 1)],
                   options={"ftol": 1e-20, "gtol": 1e-14})
    best = float(min(res.fun, lsq[i]))
    xp, xm = 0.5 + np.sqrt(e2_from_t2), 0.5 - np.sqrt(e2_from_t2)
    r = _moment_residuals(xp, xm, tmax)
    feasible = bool(np.max(np.abs(r)) < 1e-12)
    detail = {"e2_from_t2": e2_from_t2, "e2_from_t4": e2_from_t4}
    return QubitMomentReport(tmax, feasible, (xp, xm) if feasible else None,
                             tuple(float(v) for v in r), best, detail)


def best_approximation_points(dim: int) -> np.ndarray:
    """Cyclic shifts of [a, b, ..., b], a = (d + sqrt(d+1) - 1)/(d sqrt(d+1)), b = (1-a)/(d-1)."""
    d = int(dim)
    if d < 2:
        raise InvalidInputError("dim must be >= 2")
    a = (d + np.sqrt(d + 1) - 1) / (d * np.sqrt(d + 1))
    b = (1 - a) / (d - 1)
    base = np.full(d, b)
    base[0] = a
    return np.array([np.roll(base, i) for i in range(d)])


def second_moment_residual(points: np.ndarray) -> float:
    """Max |<p_a p_b> - flat average| over a <= b."""
    pts = np.asarray(points)
    d = pts.shape[1]
    second = pts.T @ pts / pts.shape[0]
    target = (np.eye(d) + 1.0) / (d * (d + 1))
    return float(np.max(np.abs(second - target)))


def symmetric_dimension(dim: int, t: int) -> int:
    return comb(dim + t - 1, t)
