"""Approximate cyclic designs with random eigenphases."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from . import cyclic
from .basisgen import SimplexDesignBasis
from .errors import InvalidInputError


def predicted_mean_epsilon(dim: int, k: int) -> float:
    """The claimed closed form 2(d-1)/(k+1)."""
    return 2.0 * (dim - 1) / (k + 1)


def exact_mean_epsilon(dim: int, k: int) -> float:
    """Expectation of eps (t=2) over i.i.d. uniform phases: (d-1)/(2(k+1)).

    Averaging |(U^n)_{bb'}|^4 over independent phases leaves only the
    terms with matched phase indices, giving E[FP] = [1 + 2k/(d+1)] / ((k+1) d)
    whenever the basis decoheres to a simplex 2-design.
    """
    return (dim - 1) / (2.0 * (k + 1))


@dataclass
class ApproxDesignReport:
    dim: int
    k: int
    samples: int
    seed: int
    epsilons: np.ndarray
    deltas: np.ndarray
    mean_epsilon: float
    stderr: float | None
    predicted_mean: float
    derived_mean: float

    def z_score(self, reference: float) -> float:
        if not self.stderr:
            return float("inf")
        return (self.mean_epsilon - reference) / self.stderr

    def to_json(self, include_samples: bool = False) -> dict:
        out = {
            "dim": self.dim,
            "k": self.k,
            "samples": self.samples,
            "seed": self.seed,
            "mean_epsilon": self.mean_epsilon,
            "stderr": self.stderr,
            "predicted_mean": self.predicted_mean,
            "derived_mean": self.derived_mean,
        }
        if include_samples:
            out["epsilons"] = self.epsilons.tolist()
            out["deltas"] = self.deltas.tolist()
        return out


def sample_random_cyclic(basis: SimplexDesignBasis, k: int, seed: int) -> cyclic.CyclicDesign:
    """U = V diag(e^{i mu}) V^dag with mu i.i.d. uniform on [0, 2 pi)."""
    if int(k) != k or k < 1:
        raise InvalidInputError(f"k must be a positive integer, got {k}")
    rng = np.random.default_rng(seed)
    mu = rng.random(basis.dim) * 2.0 * np.pi
    return cyclic.from_eigendata(basis.matrix, mu, int(k), meta={"random_phases_seed": seed})


def epsilon_of(design: cyclic.CyclicDesign, t: int = 2) -> float:
    return cyclic.certify(design, t).epsilon


def delta_bound(epsilon: float, dim: int, t: int = 2) -> float:
    """sqrt(eps) sqrt(d_sym - 1) / d_sym with d_sym = C(d+t-1, t)."""
    if epsilon < 0:
        raise InvalidInputError(f"epsilon must be nonnegative, got {epsilon}")
    dsym = comb(dim + t - 1, t)
    return float(np.sqrt(epsilon) * np.sqrt(dsym - 1) / dsym)


def monte_carlo_epsilon(basis: SimplexDesignBasis, k: int, samples: int, seed: int = 0,
                        t: int = 2) -> ApproxDesignReport:
    """Sample ``samples`` random-phase designs; draw i uses seed + i."""
    if int(samples) != samples or samples < 1:
        raise InvalidInputError(f"samples must be a positive integer, got {samples}")
    eps = np.array([epsilon_of(sample_random_cyclic(basis, k, seed + i), t) for i in range(samples)])
    # tiny negative values are rounding noise around exact designs
    deltas = np.array([delta_bound(max(e, 0.0), basis.dim, t) for e in eps])
    stderr = float(np.std(eps, ddof=1) / np.sqrt(samples)) if samples > 1 else None
    return ApproxDesignReport(basis.dim, int(k), int(samples), int(seed), eps, deltas, float(eps.mean()),
                              stderr, predicted_mean_epsilon(basis.dim, k), exact_mean_epsilon(basis.dim, k))
