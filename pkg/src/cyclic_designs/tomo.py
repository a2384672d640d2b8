"""Tomography with cyclic designs: measurement, linear reconstruction, error."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from . import approx, matcore
from .cyclic import CyclicDesign
from .errors import ContractViolation, InvalidInputError


def check_density_matrix(rho, tol: float | None = None) -> np.ndarray:
    tol = matcore._tol(tol)
    rho = matcore.as_matrix(rho, "density matrix")
    if matcore.hermiticity_residual(rho) > tol:
        raise ContractViolation("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ContractViolation(f"density matrix trace is {np.trace(rho).real:.12g}")
    if np.min(np.linalg.eigvalsh(rho)) < -tol:
        raise ContractViolation("density matrix has negative eigenvalues")
    return rho


def random_mixed_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    """W diag(w) W^dag with w ~ Dirichlet(1,...,1) and W = exp(iH), H random."""
    w = rng.dirichlet(np.ones(dim))
    v = matcore.expm_hermitian(rng.normal(scale=np.pi, size=dim * dim - 1))
    rho = (v * w) @ matcore.dagger(v)
    return 0.5 * (rho + matcore.dagger(rho))


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    z /= np.linalg.norm(z)
    return np.outer(z, np.conj(z))


def exact_probabilities(design: CyclicDesign, rho) -> np.ndarray:
    """p[j, mu] = <psi_{j,mu}| rho |psi_{j,mu}> with psi_{j,mu} column mu of U^j."""
    rho = matcore.as_matrix(rho, "density matrix")
    if rho.shape[0] != design.dim:
        raise InvalidInputError(f"state dim {rho.shape[0]} != design dim {design.dim}")
    rows = []
    for b in design.bases():
        rows.append(np.real(np.einsum("am,ab,bm->m", np.conj(b), rho, b)))
    return np.array(rows)


def measure(design: CyclicDesign, rho, shots: int | str = "exact", seed: int = 0) -> np.ndarray:
    """Exact probabilities, or multinomial frequencies with ``shots`` per basis.

    Basis j draws from default_rng([seed, j]) so rows are independent of
    evaluation order.
    """
    p = exact_probabilities(design, rho)
    if shots == "exact" or shots is None:
        return p
    if int(shots) != shots or shots < 1:
        raise InvalidInputError(f"shots must be a positive integer or 'exact', got {shots!r}")
    out = np.empty_like(p)
    for j, row in enumerate(p):
        q = np.clip(row, 0.0, None)
        q /= q.sum()
        out[j] = np.random.default_rng([seed, j]).multinomial(int(shots), q) / shots
    return out


def reconstruct(design: CyclicDesign, probabilities) -> np.ndarray:
    """rho~ = (1/(k+1)) sum_{j,mu} [p_{j,mu} (d+1) - 1] |psi_{j,mu}><psi_{j,mu}|."""
    p = np.asarray(probabilities, dtype=float)
    d, nb = design.dim, design.k + 1
    if p.shape != (nb, d):
        raise InvalidInputError(f"probability table has shape {p.shape}, expected {(nb, d)}")
    coef = p * (d + 1) - 1.0
    out = np.zeros((d, d), dtype=complex)
    for j, b in enumerate(design.bases()):
        out += (b * coef[j]) @ matcore.dagger(b)
    out /= nb
    return 0.5 * (out + matcore.dagger(out))


def project_to_density(m) -> np.ndarray:
    """Clip negative eigenvalues and renormalize the trace."""
    evals, vecs = np.linalg.eigh(0.5 * (m + matcore.dagger(m)))
    evals = np.clip(evals, 0.0, None)
    if evals.sum() <= 0:
        raise ContractViolation("no positive part to project onto")
    evals /= evals.sum()
    return (vecs * evals) @ matcore.dagger(vecs)


def error_infinity(a, b, tol: float = 1e-8) -> float:
    """Largest absolute eigenvalue of a - b (operator norm of a Hermitian difference)."""
    a, b = matcore.as_matrix(a), matcore.as_matrix(b)
    if a.shape != b.shape:
        raise InvalidInputError(f"shape mismatch {a.shape} vs {b.shape}")
    diff = a - b
    if matcore.hermiticity_residual(diff) > tol:
        raise ContractViolation("difference is not Hermitian")
    return float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (diff + matcore.dagger(diff))))))


def time_model(k: int, shots_per_basis: int, tau_int: float, tau_prep: float) -> float:
    """N [k(k+1)/2 tau_int + (k+1) tau_prep]: basis j costs j applications of U."""
    if min(k, shots_per_basis, tau_int, tau_prep) < 0:
        raise InvalidInputError("time model arguments must be nonnegative")
    return shots_per_basis * (k * (k + 1) / 2 * tau_int + (k + 1) * tau_prep)


@dataclass
class TomographyReport:
    probabilities: np.ndarray
    shots: int | str
    reconstruction: np.ndarray
    error_infinity: float
    epsilon: float
    bound: float
    time_model: float | None = None

    def to_json(self) -> dict:
        return {
            "shots": self.shots,
            "probabilities": self.probabilities.tolist(),
            "reconstruction": matcore.matrix_to_json(self.reconstruction),
            "error_infinity": self.error_infinity,
            "epsilon": self.epsilon,
            "bound": self.bound,
            "time_model": self.time_model,
        }


def run_tomography(design: CyclicDesign, rho, shots: int | str = "exact", seed: int = 0,
                   tau_int: float = 0.0, tau_prep: float = 0.0) -> TomographyReport:
    rho = check_density_matrix(rho, 1e-8)
    p = measure(design, rho, shots, seed)
    rec = reconstruct(design, p)
    eps = approx.epsilon_of(design, 2)
    bound = design.dim * (design.dim + 1) * approx.delta_bound(max(eps, 0.0), design.dim, 2)
    n = 0 if shots == "exact" else int(shots)
    return TomographyReport(p, shots, rec, error_infinity(rec, rho), eps, bound,
                            time_model(design.k, n, tau_int, tau_prep) if n else None)


def probabilities_to_csv(p: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["j", "mu", "p"])
    for j, row in enumerate(p):
        for mu, val in enumerate(row):
            w.writerow([j, mu, repr(float(val))])
    return buf.getvalue()


def probabilities_from_csv(text: str) -> np.ndarray:
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows or set(rows[0]) != {"j", "mu", "p"}:
        raise InvalidInputError("probability CSV needs header j,mu,p")
    try:
        entries = [(int(r["j"]), int(r["mu"]), float(r["p"])) for r in rows]
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"bad probability CSV row: {exc}") from None
    nj = max(e[0] for e in entries) + 1
    nm = max(e[1] for e in entries) + 1
    if len(entries) != nj * nm:
        raise InvalidInputError("probability CSV is not a full table")
    out = np.full((nj, nm), np.nan)
    for j, mu, val in entries:
        out[j, mu] = val
    if np.isnan(out).any():
        raise InvalidInputError("probability CSV has duplicate or missing cells")
    return out
