"""Dense complex linear algebra for small dimensions.

Matrices are plain ``numpy`` complex128 arrays. The helpers here validate
the numerical contracts (unitarity, hermiticity) that the rest of the
package relies on, and provide the Gell-Mann parameterization of
Hamiltonians used by the optimizers.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import ContractViolation, InvalidInputError

#: Global tolerance for unitarity / orthonormality checks. The CLI ``--tol``
#: flag overwrites it; functions read it at call time.
DEFAULT_TOL = 1e-10


def _tol(tol: float | None) -> float:
    return DEFAULT_TOL if tol is None else tol


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite square complex128 array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise InvalidInputError(f"{name} must be a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def unitarity_residual(u: np.ndarray) -> float:
    """max |U^dag U - I| over entries."""
    u = np.asarray(u)
    return float(np.max(np.abs(dagger(u) @ u - np.eye(u.shape[-1]))))


def hermiticity_residual(m: np.ndarray) -> float:
    m = np.asarray(m)
    return float(np.max(np.abs(m - dagger(m))))


def is_unitary(u, tol: float | None = None) -> bool:
    return unitarity_residual(as_matrix(u)) <= _tol(tol)


def is_hermitian(m, tol: float | None = None) -> bool:
    return hermiticity_residual(as_matrix(m)) <= _tol(tol)


def require_unitary(u, tol: float | None = None, name: str = "matrix") -> np.ndarray:
    u = as_matrix(u, name)
    res = unitarity_residual(u)
    if res > _tol(tol):
        raise ContractViolation(f"{name} is not unitary (residual {res:.3e})")
    return u


@lru_cache(maxsize=None)
def _gellmann_stack(dim: int) -> np.ndarray:
    mats = []
    for j in range(dim):
        for k in range(j + 1, dim):
            m = np.zeros((dim, dim), dtype=complex)
            m[j, k] = m[k, j] = 1.0
            mats.append(m)
    for j in range(dim):
        for k in range(j + 1, dim):
            m = np.zeros((dim, dim), dtype=complex)
            m[j, k] = -1j
            m[k, j] = 1j
            mats.append(m)
    for l in range(1, dim):
        m = np.zeros((dim, dim), dtype=complex)
        m[np.arange(l), np.arange(l)] = 1.0
        m[l, l] = -l
        mats.append(m * np.sqrt(2.0 / (l * (l + 1))))
    stack = np.array(mats)
    stack.setflags(write=False)
    return stack


def gellmann_basis(dim: int) -> list[np.ndarray]:
    """Generalized Gell-Mann matrices, normalized to Tr(l_j l_k) = 2 delta_jk.

    Ordering: all symmetric off-diagonal generators, then the antisymmetric
    ones, then the diagonal ones. For ``dim == 2`` this is (X, Y, Z).
    """
    if int(dim) != dim or dim < 2:
        raise InvalidInputError(f"Gell-Mann basis needs dim >= 2, got {dim}")
    return [m.copy() for m in _gellmann_stack(int(dim))]


def coeffs_dim(coeffs: Sequence[float]) -> int:
    n = len(coeffs)
    dim = int(round(np.sqrt(n + 1)))
    if dim < 2 or dim * dim - 1 != n:
        raise InvalidInputError(f"{n} coefficients do not match any dim^2 - 1")
    return dim


def hermitian_from_coeffs(coeffs: Sequence[float]) -> np.ndarray:
    """H = sum_j C_j l_j for a real coefficient vector of length dim^2 - 1."""
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1 or not np.all(np.isfinite(c)):
        raise InvalidInputError("coefficients must be a finite real vector")
    stack = _gellmann_stack(coeffs_dim(c))
    return np.tensordot(c, stack, axes=1)


def coeffs_from_hermitian(h) -> np.ndarray:
    """Project a Hermitian matrix onto the Gell-Mann basis (trace part dropped)."""
    h = as_matrix(h)
    stack = _gellmann_stack(h.shape[0])
    return 0.5 * np.real(np.einsum("jab,ba->j", stack, h))


def eig_hermitian(m, tol: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and dephased orthonormal eigenvectors (as columns).

    Each eigenvector is rotated so that its first component with modulus
    above ``tol`` is real and positive.
    """
    m = as_matrix(m)
    res = hermiticity_residual(m)
    if res > _tol(tol):
        raise ContractViolation(f"matrix is not Hermitian (residual {res:.3e})")
    evals, vecs = np.linalg.eigh(0.5 * (m + dagger(m)))
    return evals, dephase_columns(vecs, tol)


def dephase_columns(vecs: np.ndarray, tol: float | None = None) -> np.ndarray:
    vecs = np.array(vecs, dtype=complex)
    cutoff = max(_tol(tol), 1e-12)
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        idx = np.flatnonzero(np.abs(col) > cutoff)
        if idx.size:
            lead = col[idx[0]]
            vecs[:, j] = col * (np.abs(lead) / lead)
    return vecs


def expm_hermitian(h) -> np.ndarray:
    """U = exp(iH). ``h`` is either Gell-Mann coefficients or a Hermitian matrix."""
    arr = np.asarray(h)
    if arr.ndim == 1:
        arr = hermitian_from_coeffs(arr)
    evals, vecs = eig_hermitian(arr)
    return (vecs * np.exp(1j * evals)) @ dagger(vecs)


def matrix_power_sequence(u, k: int, tol: float | None = None) -> list[np.ndarray]:
    """[U^0, U^1, ..., U^k]."""
    if int(k) != k or k < 0:
        raise InvalidInputError(f"k must be a nonnegative integer, got {k}")
    u = require_unitary(u, tol)
    out = [np.eye(u.shape[0], dtype=complex)]
    for _ in range(int(k)):
        out.append(out[-1] @ u)
    return out


def exp_divided_differences(x: np.ndarray) -> np.ndarray:
    """Phi_ab = (e^{i x_a} - e^{i x_b}) / (i x_a - i x_b), with Phi_aa = e^{i x_a}.

    Written via sinc so nearly degenerate spectra stay accurate.
    """
    mid = np.exp(0.5j * (x[:, None] + x[None, :]))
    return mid * np.sinc((x[:, None] - x[None, :]) / (2 * np.pi))


def expm_pullback(vecs: np.ndarray, evals: np.ndarray, upstream: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Pull a gradient on U = exp(i*scale*H) back to H.

    With H = vecs diag(evals) vecs^dag and a scalar f whose differential is
    Re Tr(upstream^dag dU), returns Q with df = Re Tr(Q^dag dH).
    """
    phi = exp_divided_differences(scale * evals)
    a = dagger(vecs) @ upstream @ vecs
    k = -1j * scale * np.conj(phi) * a
    return vecs @ k @ dagger(vecs)


def gellmann_gradient(q: np.ndarray) -> np.ndarray:
    """Map a matrix gradient Q (df = Re Tr(Q^dag dH)) to d f / d C_j."""
    stack = _gellmann_stack(q.shape[0])
    return np.real(np.einsum("ab,jab->j", np.conj(q), stack))


def matrix_to_json(m) -> dict:
    m = as_matrix(m)
    return {"dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        dim = obj["dim"]
        re, im = obj["re"], obj["im"]
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"matrix JSON needs dim/re/im fields: {exc}") from None
    if not isinstance(dim, int) or dim < 1:
        raise InvalidInputError(f"bad dim {dim!r}")
    for part in (re, im):
        if not isinstance(part, list) or len(part) != dim:
            raise InvalidInputError("matrix JSON rows do not match dim")
        for row in part:
            if not isinstance(row, list) or len(row) != dim:
                raise InvalidInputError("ragged matrix JSON")
    try:
        m = np.array(re, dtype=float) + 1j * np.array(im, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"non-numeric matrix entries: {exc}") from None
    return as_matrix(m)
