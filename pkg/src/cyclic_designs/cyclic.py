"""Cyclic designs: the bases formed by the columns of U^0, U^1, ..., U^k."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np
import scipy.linalg

from . import designlib, matcore
from .basisgen import SimplexDesignBasis, qubit_basis
from .diffsets import DifferenceSet, make_difference_set
from .errors import ContractViolation, InvalidInputError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class CyclicDesign:
    """U = E diag(e^{i mu}) E^dag together with the order k.

    ``eigenvectors`` holds the eigenvectors of U as columns. When the
    phases are exact roots of unity, ``numerators`` holds N with
    mu = 2 pi N / (k + 1).
    """

    generator: np.ndarray
    k: int
    eigenvectors: np.ndarray
    phases: np.ndarray
    numerators: tuple[int, ...] | None = None
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.generator.shape[0]

    @property
    def num_bases(self) -> int:
        return self.k + 1

    def power(self, j: int) -> np.ndarray:
        """U^j computed from the eigen-data (no error accumulation)."""
        e = self.eigenvectors
        return (e * np.exp(1j * j * self.phases)) @ matcore.dagger(e)

    def bases(self) -> list[np.ndarray]:
        return [self.power(j) for j in range(self.k + 1)]

    @property
    def constellation(self) -> designlib.Constellation:
        return designlib.Constellation.from_bases(self.bases())

    def to_json(self) -> dict:
        out = {
            "dim": self.dim,
            "k": self.k,
            "generator": matcore.matrix_to_json(self.generator),
            "eigenbasis": matcore.matrix_to_json(self.eigenvectors),
            "phases": [float(x) for x in self.phases],
        }
        if self.numerators is not None:
            out["phase_fractions"] = [str(Fraction(n, self.k + 1)) for n in self.numerators]
            out["numerators"] = list(self.numerators)
        if self.meta:
            out["meta"] = self.meta
        return out

    @classmethod
    def from_json(cls, obj: dict, tol: float | None = None) -> "CyclicDesign":
        try:
            k = int(obj["k"])
            u = matcore.matrix_from_json(obj["generator"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidInputError(f"bad design JSON: {exc}") from None
        if "eigenbasis" in obj and "phases" in obj:
            e = matcore.matrix_from_json(obj["eigenbasis"])
            mu = np.asarray(obj["phases"], dtype=float)
            nums = obj.get("numerators")
            design = _checked(u, k, e, mu, tuple(nums) if nums is not None else None, obj.get("meta", {}), tol)
            return design
        return from_generator(u, k, tol)


def _checked(u, k, e, mu, nums, meta, tol) -> CyclicDesign:
    tol = matcore._tol(tol)
    u = matcore.require_unitary(u, tol, "generator")
    e = matcore.require_unitary(e, tol, "eigenbasis")
    if mu.shape != (u.shape[0],) or e.shape != u.shape:
        raise InvalidInputError("eigen-data shape does not match generator")
    if k < 0:
        raise InvalidInputError("k must be nonnegative")
    recon = (e * np.exp(1j * mu)) @ matcore.dagger(e)
    err = float(np.max(np.abs(recon - u)))
    if err > max(1e-9, tol):
        raise ContractViolation(f"eigen-data does not reproduce the generator (error {err:.3e})")
    return CyclicDesign(u, int(k), e, np.mod(mu, TWO_PI), nums, dict(meta))


def qubit_u1() -> np.ndarray:
    """(1/sqrt 2) [[1, -i], [1, i]]; its powers 0, 1, 2 give three MUB in d=2."""
    return np.array([[1.0, -1j], [1.0, 1j]]) / np.sqrt(2.0)


def from_generator(u, k: int, tol: float | None = None, meta: dict | None = None) -> CyclicDesign:
    """Diagonalize a unitary (complex Schur form is diagonal for normal matrices)."""
    tol = matcore._tol(tol)
    u = matcore.require_unitary(u, tol, "generator")
    if int(k) != k or k < 0:
        raise InvalidInputError(f"k must be a nonnegative integer, got {k}")
    t, z = scipy.linalg.schur(u, output="complex")
    lam = np.diag(t)
    mu = np.mod(np.angle(lam), TWO_PI)
    e = matcore.dephase_columns(z)
    nums = None
    scaled = mu * (k + 1) / TWO_PI
    if np.all(np.abs(scaled - np.round(scaled)) < 1e-9):
        nums = tuple(int(n) % (k + 1) for n in np.round(scaled))
        mu = TWO_PI * np.array(nums) / (k + 1)
    return _checked(u, int(k), e, mu, nums, meta or {}, tol)


def from_eigendata(eigenvectors, phases, k: int, numerators=None, meta: dict | None = None,
                   tol: float | None = None) -> CyclicDesign:
    e = matcore.require_unitary(eigenvectors, tol, "eigenbasis")
    mu = np.mod(np.asarray(phases, dtype=float), TWO_PI)
    u = (e * np.exp(1j * mu)) @ matcore.dagger(e)
    return _checked(u, int(k), e, mu, numerators, meta or {}, tol)


def diag_rows(u: np.ndarray) -> np.ndarray:
    """Diagonal matrix whose diagonal is the row-by-row concatenation of u."""
    return np.diag(np.asarray(u).reshape(-1))


def construction_one(n: int, max_dim: int = 256) -> np.ndarray:
    """Recursive generator U_{n} = c diag[U_{n-1}] (U_{n-1} x U_{n-1}), starting at qubit_u1.

    c = sqrt(dim of U_{n-1}) rescales the entries of diag[U_{n-1}] to unit
    modulus, which is what keeps the product unitary. Level n acts on
    dimension 2^(2^n). Only n = 1 (d = 4) is known to give MUB; callers
    should certify the result.
    """
    if int(n) != n or n < 1:
        raise InvalidInputError(f"n must be a positive integer, got {n}")
    if 2 ** (2 ** n) > max_dim:
        raise OverflowError(f"construction level {n} has dimension {2 ** (2 ** n)} > max_dim={max_dim}")
    u = qubit_u1()
    for _ in range(int(n)):
        u = np.sqrt(u.shape[0]) * diag_rows(u) @ np.kron(u, u)
    return u


def assemble(basis: SimplexDesignBasis, dset: DifferenceSet, tol: float | None = None) -> CyclicDesign:
    """U = V diag(e^{2 pi i N / v}) V^dag with V the basis and N the difference set.

    k + 1 equals the modulus v, so U^{k+1} = I.
    """
    if dset.size != basis.dim:
        raise InvalidInputError(f"difference set has {dset.size} elements, basis dimension is {basis.dim}")
    check = make_difference_set(dset.modulus, dset.elements)
    if not check.verified or check.lam != 1:
        raise ContractViolation(f"{list(dset.elements)} mod {dset.modulus} is not a lambda=1 difference set")
    k = dset.modulus - 1
    nums = tuple(int(n) for n in dset.elements)
    mu = TWO_PI * np.array(nums, dtype=float) / dset.modulus
    meta = {"basis": basis.meta.get("kind"), "modulus": dset.modulus}
    return from_eigendata(basis.matrix, mu, k, nums, meta, tol)


def qubit_family(k: int) -> CyclicDesign:
    """d=2 design: the optimal qubit basis rotated by diag(1, e^{2 pi i/(k+1)})."""
    if int(k) != k or k < 2:
        raise InvalidInputError(f"a d=2 cyclic 2-design needs k >= 2, got {k}")
    return assemble(qubit_basis(), DifferenceSet(k + 1, (0, 1), 1, True))


def u1_design() -> CyclicDesign:
    return from_generator(qubit_u1(), 2, meta={"method": "u1"})


def construction_one_design(n: int = 1, max_dim: int = 256) -> CyclicDesign:
    u = construction_one(n, max_dim)
    return from_generator(u, u.shape[0], meta={"method": "construction1", "n": n})


def power_overlap_sums(design: CyclicDesign, t: int) -> np.ndarray:
    """S_n = sum_{b, b'} |(U^n)_{b b'}|^{2t} for n = 0..k."""
    return np.array([np.sum(np.abs(design.power(n)) ** (2 * t)) for n in range(design.k + 1)])


def cyclic_frame_potential(design: CyclicDesign, t: int) -> float:
    """Frame potential of the (k+1) d columns using only the k+1 powers.

    The Gram block between bases j and l is U^(l-j); |U^-n| = |U^n|^T.
    """
    if t < 1:
        raise InvalidInputError(f"t must be >= 1, got {t}")
    k, d = design.k, design.dim
    s = power_overlap_sums(design, t)
    total = (k + 1) * s[0] + 2.0 * sum((k + 1 - n) * s[n] for n in range(1, k + 1))
    return float(total / ((k + 1) * d) ** 2)


def certify(design: CyclicDesign, t: int, tol: float | None = None) -> designlib.DesignCertificate:
    tol = matcore._tol(tol)
    fp = cyclic_frame_potential(design, t)
    dsym = comb(design.dim + t - 1, t)
    eps = fp * dsym - 1.0
    return designlib.DesignCertificate(t, fp, 1.0 / dsym, eps, bool(eps <= tol))


def certify_bases_mub(design: CyclicDesign, tol: float | None = None) -> designlib.MubReport:
    return designlib.certify_mub(design.bases(), tol)


def closure_residual(design: CyclicDesign) -> float:
    """max |U^(k+1) - I|, computed by repeated multiplication of the generator."""
    p = np.linalg.matrix_power(design.generator, design.k + 1)
    return float(np.max(np.abs(p - np.eye(design.dim))))


def eigenvector_uncertainties(design: CyclicDesign) -> np.ndarray:
    """Average collision entropy of each eigenvector over the k+1 bases."""
    bases = design.bases()
    return np.array([designlib.uncertainty_average(design.eigenvectors[:, a], bases)
                     for a in range(design.dim)])
