"""Frame potentials, Welch bounds and design certification.

Covers projective t-designs (via Welch-bound saturation), simplex
t-designs (via exact monomial averages over the flat simplex), mutual
unbiasedness and the collision-entropy uncertainty functional.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Sequence

import numpy as np

from . import matcore
from .errors import InvalidInputError


@dataclass(frozen=True, eq=False)
class Constellation:
    """Weighted unit vectors in C^dim, stored as the rows of ``vectors``.

    ``groups`` optionally records how many consecutive rows make up each
    orthonormal basis (e.g. ``(2, 2, 2)`` for three qubit bases).
    """

    vectors: np.ndarray
    weights: np.ndarray | None = None
    groups: tuple[int, ...] | None = None

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        if v.size == 0 or v.shape[0] == 0:
            raise InvalidInputError("empty constellation")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("constellation has non-finite entries")
        norms = np.linalg.norm(v, axis=1)
        bad = np.max(np.abs(norms - 1.0))
        if bad > matcore.DEFAULT_TOL:
            raise InvalidInputError(f"constellation vectors not unit norm (max deviation {bad:.3e})")
        if self.weights is None:
            w = np.full(v.shape[0], 1.0 / v.shape[0])
        else:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != (v.shape[0],) or np.any(w <= 0):
                raise InvalidInputError("weights must be positive, one per vector")
            if abs(w.sum() - 1.0) > 1e-12:
                raise InvalidInputError(f"weights sum to {w.sum()!r}, not 1")
        if self.groups is not None and sum(self.groups) != v.shape[0]:
            raise InvalidInputError("groups do not partition the vectors")
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @classmethod
    def from_bases(cls, bases: Sequence[np.ndarray]) -> "Constellation":
        """Pool the columns of a list of matrices, basis by basis."""
        mats = [matcore.as_matrix(b) for b in bases]
        vecs = np.concatenate([m.T for m in mats], axis=0)
        return cls(vecs, groups=tuple(m.shape[1] for m in mats))

    def bases(self) -> list[np.ndarray]:
        if self.groups is None:
            raise InvalidInputError("constellation carries no basis grouping")
        out, start = [], 0
        for g in self.groups:
            out.append(self.vectors[start:start + g].T.copy())
            start += g
        return out

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "vectors": [[[float(z.real), float(z.imag)] for z in row] for row in self.vectors],
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Constellation":
        try:
            dim = obj["dim"]
            raw = obj["vectors"]
        except (KeyError, TypeError) as exc:
            raise InvalidInputError(f"constellation JSON needs dim/vectors: {exc}") from None
        if not isinstance(raw, list) or not raw:
            raise InvalidInputError("constellation JSON has no vectors")
        rows = []
        for row in raw:
            if not isinstance(row, list) or len(row) != dim:
                raise InvalidInputError("ragged constellation JSON")
            try:
                rows.append([complex(float(p[0]), float(p[1])) for p in row])
            except (TypeError, ValueError, IndexError) as exc:
                raise InvalidInputError(f"bad [re, im] pair: {exc}") from None
        return cls(np.array(rows), obj.get("weights"))


@dataclass(frozen=True)
class SimplexPointSet:
    """Probability vectors, one per row of ``points``."""

    points: np.ndarray

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.points, dtype=float))
        if p.size == 0:
            raise InvalidInputError("empty point set")
        if np.any(p < -1e-12):
            raise InvalidInputError("negative probabilities")
        p = np.clip(p, 0.0, None)
        bad = np.max(np.abs(p.sum(axis=1) - 1.0))
        if bad > 1e-10:
            raise InvalidInputError(f"points do not sum to 1 (max deviation {bad:.3e})")
        object.__setattr__(self, "points", p)

    @property
    def dim(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class DesignCertificate:
    t: int
    frame_potential: float
    welch_bound: float
    epsilon: float
    is_design: bool

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "frame_potential": self.frame_potential,
            "welch_bound": self.welch_bound,
            "epsilon": self.epsilon,
            "is_design": self.is_design,
        }


@dataclass(frozen=True)
class SimplexCheck:
    passed: bool
    max_residual: float
    worst_exponents: tuple[int, ...] | None = None


@dataclass(frozen=True)
class MubReport:
    passed: bool
    max_violation: float
    worst_pair: tuple[int, int] | None = None
    pair_violations: dict = field(default_factory=dict)


def welch_bound(dim: int, t: int) -> float:
    return 1.0 / comb(dim + t - 1, t)


def symmetric_dimension(dim: int, t: int) -> int:
    return comb(dim + t - 1, t)


def overlap_moduli(c: Constellation) -> np.ndarray:
    """|<psi_i|psi_j>|^2 for all pairs."""
    g = np.conj(c.vectors) @ c.vectors.T
    return np.abs(g) ** 2


def frame_potential(c: Constellation, t: int) -> float:
    """sum_ij w_i w_j |<psi_i|psi_j>|^(2t)."""
    if t < 1:
        raise InvalidInputError(f"t must be >= 1, got {t}")
    a = overlap_moduli(c) ** t
    return float(c.weights @ a @ c.weights)


def certify_projective_design(c: Constellation, t: int, tol: float | None = None) -> DesignCertificate:
    tol = matcore.DEFAULT_TOL if tol is None else tol
    fp = frame_potential(c, t)
    eps = fp * symmetric_dimension(c.dim, t) - 1.0
    return DesignCertificate(t, fp, welch_bound(c.dim, t), eps, bool(eps <= tol))


def decohere(c: Constellation, basis="computational") -> SimplexPointSet:
    """Probability distributions p_a = |<psi_i|phi_a>|^2 in an orthonormal basis.

    ``basis`` is "computational" or a unitary whose columns are the |phi_a>.
    """
    if isinstance(basis, str):
        if basis != "computational":
            raise InvalidInputError(f"unknown basis {basis!r}")
        amps = c.vectors
    else:
        b = matcore.require_unitary(basis, name="decoherence basis")
        if b.shape[0] != c.dim:
            raise InvalidInputError(f"basis has dim {b.shape[0]}, constellation {c.dim}")
        amps = c.vectors @ np.conj(b)
    return SimplexPointSet(np.abs(amps) ** 2)


def simplex_monomial_average(dim: int, exponents: Sequence[int]) -> Fraction:
    """Flat-measure average of prod p_a^k_a over the simplex, as an exact fraction.

    Equals (d-1)! prod k_a! / (d - 1 + sum k_a)!. Missing exponents are zero.
    """
    ks = [int(k) for k in exponents]
    if len(ks) > dim or any(k < 0 for k in ks):
        raise InvalidInputError(f"bad exponents {exponents} for dim {dim}")
    return _simplex_average(dim, tuple(sorted(ks, reverse=True)))


@lru_cache(maxsize=None)
def _simplex_average(dim: int, ks: tuple[int, ...]) -> Fraction:
    num = factorial(dim - 1)
    for k in ks:
        num *= factorial(k)
    return Fraction(num, factorial(dim - 1 + sum(ks)))


def monomial_exponents(dim: int, t: int):
    """All exponent vectors with 1 <= total degree <= t."""
    for degree in range(1, t + 1):
        for combo in itertools.combinations_with_replacement(range(dim), degree):
            ks = [0] * dim
            for a in combo:
                ks[a] += 1
            yield tuple(ks)


def certify_simplex_design(s: SimplexPointSet, t: int, tol: float | None = None) -> SimplexCheck:
    """Compare point averages of every monomial of degree <= t with the flat simplex."""
    tol = matcore.DEFAULT_TOL if tol is None else tol
    pts = s.points
    worst, worst_ks = 0.0, None
    for ks in monomial_exponents(s.dim, t):
        vals = np.prod(pts ** np.array(ks), axis=1)
        res = abs(float(vals.mean()) - float(simplex_monomial_average(s.dim, ks)))
        if res > worst:
            worst, worst_ks = res, ks
    return SimplexCheck(worst <= tol, worst, worst_ks)


def certify_mub(bases: Sequence[np.ndarray], tol: float | None = None) -> MubReport:
    """Check | |<phi_a|psi_b>|^2 - 1/d | <= tol across every pair of bases."""
    tol = matcore.DEFAULT_TOL if tol is None else tol
    mats = [matcore.require_unitary(b, tol, name=f"basis {i}") for i, b in enumerate(bases)]
    if len({m.shape for m in mats}) > 1:
        raise InvalidInputError("bases have different dimensions")
    d = mats[0].shape[0]
    worst, worst_pair, viols = 0.0, None, {}
    for i, j in itertools.combinations(range(len(mats)), 2):
        v = float(np.max(np.abs(np.abs(matcore.dagger(mats[i]) @ mats[j]) ** 2 - 1.0 / d)))
        viols[(i, j)] = v
        if worst_pair is None or v > worst:
            worst, worst_pair = v, (i, j)
    return MubReport(worst <= tol, worst, worst_pair, viols)


def collision_entropy(p: np.ndarray) -> float:
    """Renyi-2 entropy in bits."""
    return float(-np.log2(np.sum(np.asarray(p) ** 2)))


def uncertainty_average(state, bases: Sequence[np.ndarray]) -> float:
    """Mean collision entropy of the outcome distributions of ``state`` in each basis."""
    phi = np.asarray(state, dtype=complex).ravel()
    if abs(np.linalg.norm(phi) - 1.0) > matcore.DEFAULT_TOL:
        raise InvalidInputError("state is not normalized")
    total = 0.0
    for b in bases:
        b = matcore.require_unitary(b)
        if b.shape[0] != phi.size:
            raise InvalidInputError(f"basis dim {b.shape[0]} != state dim {phi.size}")
        total += collision_entropy(np.abs(np.conj(phi) @ b) ** 2)
    return total / len(bases)
