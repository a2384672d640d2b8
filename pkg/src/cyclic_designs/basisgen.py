"""Orthonormal bases whose decoherence is a simplex 2-design.

A unitary V with P = |V|^2 (entrywise) decoheres to a simplex 2-design
in Delta_d exactly when P P^T = (I + J) / (d + 1), J the all-ones matrix.
P is bistochastic, so the condition reads the same on rows or columns.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from . import designlib, matcore
from .errors import ConstructionError, DomainError, InvalidInputError

PHI_MIN = float(np.arccos((-1.0 - 3.0 * np.sqrt(5.0)) / 8.0))
GOLDEN_RATIO = (1.0 + np.sqrt(5.0)) / 2.0


@dataclass(frozen=True, eq=False)
class SimplexDesignBasis:
    """Unitary whose columns decohere to a simplex 2-design.

    ``residual`` is the largest monomial mismatch (degree <= 2) of the
    decohered columns; ``certified`` records residual <= the tolerance used.
    """

    dim: int
    matrix: np.ndarray
    residual: float
    certified: bool = True
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = matcore.matrix_to_json(self.matrix)
        out["residual"] = self.residual
        out["certified"] = self.certified
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_json(cls, obj: dict, tol: float | None = None) -> "SimplexDesignBasis":
        return from_matrix(matcore.matrix_from_json(obj), tol=tol, meta=obj.get("meta", {}))


def simplex2_residual(v: np.ndarray) -> float:
    c = designlib.Constellation(np.asarray(v).T)
    return designlib.certify_simplex_design(designlib.decohere(c), 2, tol=np.inf).max_residual


def from_matrix(v, tol: float | None = None, meta: dict | None = None) -> SimplexDesignBasis:
    """Wrap a unitary, measuring its simplex-2-design residual."""
    tol = matcore._tol(tol)
    v = matcore.require_unitary(v, tol, name="basis")
    res = simplex2_residual(v)
    return SimplexDesignBasis(v.shape[0], v, res, res <= tol, dict(meta or {}))


def qubit_basis() -> SimplexDesignBasis:
    ap = np.sqrt((3 + np.sqrt(3)) / 6)
    am = np.sqrt((3 - np.sqrt(3)) / 6)
    return from_matrix(np.array([[ap, am], [am, -ap]]), meta={"kind": "qubit"})


def qutrit_admissible(phi: float, tol: float = 1e-12) -> bool:
    """Phases of the qutrit family are real iff cos(3 phi) <= -11/16."""
    return bool(np.cos(3.0 * phi) <= -11.0 / 16.0 + tol)


def qutrit_amplitudes(phi: float) -> np.ndarray:
    """(a0, a1, a2): moduli of the circulant pattern of the qutrit family."""
    c, s = np.cos(phi), np.sin(phi)
    sq = np.array([(1 - c) / 3, 1 / 3 + c / 6 + s / (2 * np.sqrt(3)), 1 / 3 + c / 6 - s / (2 * np.sqrt(3))])
    return np.sqrt(np.clip(sq, 0.0, None))


def _close_triangle(p: float, q: float, r: float) -> tuple[float, float]:
    """Angles (A, B) with p + q e^{iA} + r e^{iB} = 0 and A in [0, pi]."""
    ca = (r * r - p * p - q * q) / (2 * p * q)
    a = float(np.arccos(np.clip(ca, -1.0, 1.0)))
    # snap near-degenerate triangles so the golden boundary stays exact
    if a < 1e-6:
        a = 0.0
    elif np.pi - a < 1e-6:
        a = np.pi
    b = float(np.angle(-(p + q * np.exp(1j * a)) / r))
    return a, b


def qutrit_family(phi: float, tol: float | None = None) -> SimplexDesignBasis:
    """Member of the one-parameter d=3 family.

    The matrix is [[a0, a2, a1], [a1 e^{ig0}, a0, a2 e^{ig1}], [a2 e^{ig2}, a1 e^{ig3}, a0]].
    Orthogonality of the columns reduces to closing triangles with sides
    a0 a2, a0 a1, a1 a2; the two orientation choices are resolved by
    picking the first combination that is unitary.
    """
    tol = matcore._tol(tol)
    phi = float(phi)
    if not np.isfinite(phi) or not qutrit_admissible(phi):
        raise DomainError(f"phi={phi!r} is outside the admissible window (need cos 3phi <= -11/16)")
    a0, a1, a2 = qutrit_amplitudes(phi)
    x, y, z = a0 * a2, a0 * a1, a1 * a2
    if min(x, y, z) <= 0:
        raise DomainError(f"phi={phi!r} gives a vanishing amplitude")
    a_1, b_1 = _close_triangle(x, y, z)
    a_3, b_3 = _close_triangle(z, x, y)
    best = None
    for s1, s3 in itertools.product((1, -1), (1, -1)):
        g0, g1 = -s1 * a_1, s3 * a_3
        g3 = -s3 * b_3
        g2 = g3 - s1 * b_1
        m = np.array([
            [a0, a2, a1],
            [a1 * np.exp(1j * g0), a0, a2 * np.exp(1j * g1)],
            [a2 * np.exp(1j * g2), a1 * np.exp(1j * g3), a0],
        ])
        err = matcore.unitarity_residual(m)
        if best is None or err < best[0]:
            best = (err, m, (g0, g1, g2, g3))
        if err <= tol:
            break
    err, m, gammas = best
    if err > tol:
        raise ConstructionError(f"no phase branch is unitary at phi={phi!r} (residual {err:.3e})")
    return from_matrix(m, tol, meta={"kind": "qutrit", "phi": phi, "gammas": list(map(float, gammas))})


def golden_basis() -> SimplexDesignBasis:
    """Real orthogonal d=3 basis with golden-ratio entries."""
    g = GOLDEN_RATIO
    m = 0.5 * np.array([[g, 1 / g, 1.0], [-1.0, g, 1 / g], [-1 / g, -1.0, g]])
    return from_matrix(m, meta={"kind": "golden", "phi": PHI_MIN})


def two_amplitude_roots(dim: int) -> tuple[float, float]:
    """Roots of d(d+1)s^2 - 2(d+1)s + (3-d) = 0, larger root first."""
    d = dim
    root = (d - 1) * np.sqrt(d + 1.0)
    return ((d + 1) + root) / (d * (d + 1)), ((d + 1) - root) / (d * (d + 1))


def robustness_violation(h: np.ndarray) -> float:
    """Largest |h_aa conj(h_ba) + h_ab conj(h_bb)| over a != b."""
    d = h.shape[0]
    diag = np.diag(h)
    m = diag[:, None] * np.conj(h.T) + h * np.conj(diag)[None, :]
    m[np.arange(d), np.arange(d)] = 0
    return float(np.max(np.abs(m))) if d > 1 else 0.0


def two_amplitude_basis(h, tol: float | None = None) -> SimplexDesignBasis:
    """U' = sqrt(s) D + sqrt(t) (H - D), D = diag(H), for a robust Hadamard H.

    s is the larger root of the second-moment quadratic and
    t = (1 - s)/(d - 1), so s + (d-1) t = 1 makes U' unitary.
    """
    tol = matcore._tol(tol)
    h = matcore.as_matrix(h, "Hadamard matrix")
    d = h.shape[0]
    if d < 2:
        raise InvalidInputError("Hadamard order must be at least 2")
    if np.max(np.abs(np.abs(h) - 1.0)) > tol:
        raise InvalidInputError("entries of a Hadamard matrix must have unit modulus")
    if np.max(np.abs(h @ matcore.dagger(h) - d * np.eye(d))) > tol:
        raise InvalidInputError("H H^dag != d I")
    viol = robustness_violation(h)
    if viol > tol:
        raise InvalidInputError(f"Hadamard matrix is not robust (violation {viol:.3e})")
    roots = two_amplitude_roots(d)
    admissible = [r for r in roots if -1e-15 <= r <= 1 + 1e-15]
    if not admissible:
        raise ConstructionError(f"no admissible amplitude root for d={d}: {roots}")
    s = min(max(admissible[0], 0.0), 1.0)
    t = (1.0 - s) / (d - 1)
    dmat = np.diag(np.diag(h))
    u = np.sqrt(s) * dmat + np.sqrt(t) * (h - dmat)
    return from_matrix(u, tol, meta={"kind": "two-amplitude", "s": s, "t": t, "roots": list(roots)})


def skew_hadamard(order: int) -> np.ndarray:
    """A real skew Hadamard matrix I + S (S antisymmetric), hence robust.

    Order 2 and 4 are tabulated; order q + 1 for a prime q = 3 mod 4 uses
    the Paley construction.
    """
    if order == 2:
        return np.array([[1.0, 1.0], [-1.0, 1.0]])
    if order == 4:
        s = np.array([[0, 1, 1, 1], [-1, 0, 1, -1], [-1, -1, 0, 1], [-1, 1, -1, 0]], dtype=float)
        return np.eye(4) + s
    q = order - 1
    if q < 3 or q % 4 != 3 or any(q % p == 0 for p in range(2, int(q ** 0.5) + 1)):
        raise InvalidInputError(f"no tabulated skew Hadamard of order {order}")
    squares = {(x * x) % q for x in range(1, q)}
    chi = lambda a: 0 if a % q == 0 else (1 if a % q in squares else -1)
    jac = np.array([[chi(j - i) for j in range(q)] for i in range(q)], dtype=float)
    s = np.zeros((order, order))
    s[0, 1:] = 1.0
    s[1:, 0] = -1.0
    s[1:, 1:] = jac
    return np.eye(order) + s


def _pair_residuals(coeffs: np.ndarray, iu: tuple[np.ndarray, np.ndarray], target: np.ndarray) -> np.ndarray:
    v = matcore.expm_hermitian(coeffs)
    p = np.abs(v) ** 2
    return (p @ p.T)[iu] - target


def numeric_basis(dim: int, seed: int = 0, restarts: int = 20, tol: float | None = None,
                  max_nfev: int | None = None) -> SimplexDesignBasis:
    """Search for a unitary exp(iH) with P P^T = (I + J)/(d+1), P = |V|^2.

    Nonlinear least squares over the Gell-Mann coefficients of H from
    seeded random starts. Stops at the first restart whose monomial
    residual is within ``tol``; otherwise returns the best restart by
    (residual, index), flagged as not certified.
    """
    tol = matcore._tol(tol)
    if int(dim) != dim or dim < 2:
        raise InvalidInputError(f"dim must be an integer >= 2, got {dim}")
    if restarts < 1:
        raise InvalidInputError("restarts must be >= 1")
    d = int(dim)
    iu = np.triu_indices(d)
    target = ((np.eye(d) + 1.0) / (d + 1))[iu]
    best = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        x0 = rng.normal(scale=np.pi / np.sqrt(d), size=d * d - 1)
        sol = least_squares(_pair_residuals, x0, args=(iu, target), method="trf",
                            xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=max_nfev)
        v = matcore.expm_hermitian(sol.x)
        res = simplex2_residual(v)
        if best is None or res < best[0]:
            best = (res, r, v, sol.x)
        if res <= tol:
            break
    res, r, v, coeffs = best
    return SimplexDesignBasis(d, v, float(res), bool(res <= tol),
                              {"kind": "numeric", "seed": seed, "restart": r, "coeffs": coeffs.tolist()})


def basis_for_dim(dim: int, seed: int = 0, restarts: int = 20, tol: float | None = None) -> SimplexDesignBasis:
    """Pick an analytic basis when one is known, else search numerically."""
    if dim == 2:
        return qubit_basis()
    if dim == 3:
        return golden_basis()
    if dim in (4, 8, 12):
        return two_amplitude_basis(skew_hadamard(dim), tol)
    return numeric_basis(dim, seed=seed, restarts=restarts, tol=tol)
