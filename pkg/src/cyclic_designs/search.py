"""Frame-potential minimization over generators U = exp(iH).

H is parameterized by its d^2 - 1 Gell-Mann coefficients. The objective
is eps = FP * C(d+t-1, t) - 1 of the (k+1) d columns of U^0..U^k, which
only needs the k powers U^n:

    FP = [ (k+1) d + 2 sum_{n=1..k} (k+1-n) sum_{bb'} |U^n_{bb'}|^{2t} ] / ((k+1) d)^2

Gradients go through the spectral pullback of the matrix exponential.
With a fixed spectrum Lambda, U = V Lambda V^dag and the coefficients
parameterize V = exp(iG) instead.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import comb

import numpy as np
from scipy.optimize import minimize

from . import matcore
from .cyclic import CyclicDesign, certify, from_eigendata
from .errors import InvalidInputError

TWO_PI = 2.0 * np.pi


@dataclass
class SearchConfig:
    dim: int
    k: int
    t: int = 2
    restarts: int = 50
    seed: int = 0
    max_iters: int = 2000
    tol_accept: float = 1e-8
    fixed_spectrum: tuple[int, ...] | None = None
    stop_on_accept: bool = True
    init_scale: float = np.pi

    def __post_init__(self):
        if self.dim < 2 or self.k < 1 or self.t < 1:
            raise InvalidInputError(f"need dim >= 2, k >= 1, t >= 1 (got {self.dim}, {self.k}, {self.t})")
        if self.restarts < 1 or self.max_iters < 1:
            raise InvalidInputError("restarts and max_iters must be positive")
        if self.fixed_spectrum is not None:
            spec = tuple(int(n) for n in self.fixed_spectrum)
            if len(spec) != self.dim:
                raise InvalidInputError(f"fixed spectrum needs {self.dim} entries, got {len(spec)}")
            if len({n % (self.k + 1) for n in spec}) != self.dim:
                raise InvalidInputError("fixed spectrum entries must be distinct mod k+1")
            self.fixed_spectrum = spec


@dataclass
class SearchResult:
    config: SearchConfig
    best_coeffs: np.ndarray
    best_epsilon: float
    best_restart: int
    restarts_run: int
    phases: np.ndarray
    dephased_spectrum: list | None
    status: str  # "found" | "not-found-within-budget"
    restart_epsilons: list = field(default_factory=list)

    def design(self) -> CyclicDesign:
        return design_from_coeffs(self.best_coeffs, self.config.k, self.config.fixed_spectrum)

    def to_json(self) -> dict:
        cfg = asdict(self.config)
        cfg["fixed_spectrum"] = list(cfg["fixed_spectrum"]) if cfg["fixed_spectrum"] else None
        return {
            "config": cfg,
            "status": self.status,
            "best_epsilon": self.best_epsilon,
            "best_restart": self.best_restart,
            "restarts_run": self.restarts_run,
            "best_coeffs": self.best_coeffs.tolist(),
            "phases": self.phases.tolist(),
            "dephased_spectrum": [str(x) for x in self.dephased_spectrum] if self.dephased_spectrum else None,
            "restart_epsilons": self.restart_epsilons,
        }


def _weights(k: int) -> np.ndarray:
    return np.array([2.0 * (k + 1 - n) for n in range(1, k + 1)])


def _scale(dim: int, k: int, t: int) -> float:
    return comb(dim + t - 1, t) / ((k + 1) * dim) ** 2


def _eps_and_upstreams(powers, k, dim, t, want_grad):
    """eps and, per power n, the gradient of eps with respect to U^n."""
    c = _scale(dim, k, t)
    w = _weights(k)
    total = (k + 1) * dim
    ups = []
    for n, a in enumerate(powers, start=1):
        mod2 = np.abs(a) ** 2
        total += w[n - 1] * np.sum(mod2 ** t)
        if want_grad:
            ups.append(c * w[n - 1] * 2 * t * mod2 ** (t - 1) * a)
    return c * total - 1.0, ups


def free_objective(coeffs, k: int, t: int, want_grad: bool = True):
    """eps(C) and d eps / d C for U = exp(i H(C))."""
    h = matcore.hermitian_from_coeffs(coeffs)
    dim = h.shape[0]
    x, vecs = np.linalg.eigh(h)
    vd = matcore.dagger(vecs)
    powers = [(vecs * np.exp(1j * n * x)) @ vd for n in range(1, k + 1)]
    eps, ups = _eps_and_upstreams(powers, k, dim, t, want_grad)
    if not want_grad:
        return eps
    q = np.zeros((dim, dim), dtype=complex)
    for n, g in enumerate(ups, start=1):
        q += matcore.expm_pullback(vecs, x, g, scale=n)
    return eps, matcore.gellmann_gradient(q)


def fixed_objective(coeffs, k: int, t: int, numerators, want_grad: bool = True):
    """eps(C) and gradient for U = V Lambda V^dag with V = exp(i G(C))."""
    g = matcore.hermitian_from_coeffs(coeffs)
    dim = g.shape[0]
    x, vecs = np.linalg.eigh(g)
    v = (vecs * np.exp(1j * x)) @ matcore.dagger(vecs)
    vd = matcore.dagger(v)
    mu = TWO_PI * np.asarray(numerators, dtype=float) / (k + 1)
    lam = [np.exp(1j * n * mu) for n in range(1, k + 1)]
    powers = [(v * ln) @ vd for ln in lam]
    eps, ups = _eps_and_upstreams(powers, k, dim, t, want_grad)
    if not want_grad:
        return eps
    up_v = np.zeros((dim, dim), dtype=complex)
    for ln, gn in zip(lam, ups):
        up_v += gn @ v * np.conj(ln) + matcore.dagger(gn) @ v * ln
    q = matcore.expm_pullback(vecs, x, up_v, scale=1.0)
    return eps, matcore.gellmann_gradient(q)


def design_from_coeffs(coeffs, k: int, fixed_spectrum=None) -> CyclicDesign:
    """Rebuild the design a coefficient vector describes (free or fixed-spectrum)."""
    h = matcore.hermitian_from_coeffs(coeffs)
    x, vecs = np.linalg.eigh(h)
    if fixed_spectrum is None:
        mu = np.mod(x, TWO_PI)
        nums = None
        e = vecs
    else:
        e = (vecs * np.exp(1j * x)) @ matcore.dagger(vecs)
        nums = tuple(int(n) % (k + 1) for n in fixed_spectrum)
        mu = TWO_PI * np.array(nums, dtype=float) / (k + 1)
    return from_eigendata(e, mu, k, nums, meta={"method": "search"}, tol=1e-9)


def spectrum_snap(phases, k: int, tol: float = 1e-6) -> list[int] | None:
    """Integers N with phase_i - phase_0 = 2 pi N_i/(k+1) (mod 2 pi), if they exist.

    Each phase must lie within tol * 2 pi of its grid point. The first
    entry becomes 0, removing the irrelevant global phase of U.
    """
    mu = np.asarray(phases, dtype=float)
    if mu.size == 0:
        return None
    rel = np.mod(mu - mu[0], TWO_PI) * (k + 1) / TWO_PI
    nearest = np.round(rel)
    if np.max(np.abs(rel - nearest)) / (k + 1) > tol:
        return None
    return [int(n) % (k + 1) for n in nearest]


def _run_restart(cfg: SearchConfig, r: int):
    rng = np.random.default_rng([cfg.seed, r])
    n = cfg.dim * cfg.dim - 1
    x0 = rng.normal(scale=cfg.init_scale / np.sqrt(cfg.dim), size=n)
    if cfg.fixed_spectrum is None:
        fun = lambda c: free_objective(c, cfg.k, cfg.t)
    else:
        fun = lambda c: fixed_objective(c, cfg.k, cfg.t, cfg.fixed_spectrum)
    res = minimize(fun, x0, jac=True, method="BFGS",
                   options={"maxiter": cfg.max_iters, "gtol": 1e-13})
    return res.x, float(res.fun)


def search_cyclic(cfg: SearchConfig) -> SearchResult:
    """Multi-start BFGS; restart r is seeded by (seed, r).

    The winner is the lowest (eps, restart index). With stop_on_accept
    the loop ends at the first restart reaching tol_accept.
    """
    best = None
    history = []
    for r in range(cfg.restarts):
        coeffs, _ = _run_restart(cfg, r)
        eps = certify(design_from_coeffs(coeffs, cfg.k, cfg.fixed_spectrum), cfg.t).epsilon
        history.append(eps)
        if best is None or eps < best[0]:
            best = (eps, r, coeffs)
        if cfg.stop_on_accept and eps <= cfg.tol_accept:
            break
    eps, r, coeffs = best
    design = design_from_coeffs(coeffs, cfg.k, cfg.fixed_spectrum)
    snapped = spectrum_snap(design.phases, cfg.k)
    spectrum = [Fraction(n, cfg.k + 1) for n in snapped] if snapped is not None else None
    status = "found" if eps <= cfg.tol_accept else "not-found-within-budget"
    return SearchResult(cfg, coeffs, eps, r, len(history), design.phases, spectrum, status, history)


@dataclass(frozen=True)
class ScanCell:
    dim: int
    k: int
    status: str
    epsilon: float
    restarts_run: int


def grid_scan(dims, ks, t: int = 2, restarts: int = 20, seed: int = 0, max_iters: int = 2000,
                tol_accept: float = 1e-8) -> list[ScanCell]:
    """Run search_cyclic on every (dim, k) cell. Failures are reported as failures, not nonexistence."""
    cells = []
    for d in dims:
        for k in ks:
            res = search_cyclic(SearchConfig(d, k, t, restarts, seed, max_iters, tol_accept))
            cells.append(ScanCell(d, k, res.status, res.best_epsilon, res.restarts_run))
    return cells


def scan_to_csv(cells) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dim", "k", "status", "epsilon", "restarts_run"])
    for c in cells:
        w.writerow([c.dim, c.k, c.status, repr(c.epsilon), c.restarts_run])
    return buf.getvalue()
