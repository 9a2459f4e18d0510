"""Similarity functions on the unit hypersphere.

Two scorers share one protocol: given squared pairwise distances between
unit vectors they produce similarity scores, conjugate-transformed scores
for negative pairs, and the derivatives of both with respect to squared
distance (which is all the objective's chain rule needs, since both
similarities depend on a pair only through ``||x - y||^2``).

* :class:`GaussianSimilarity` -- the divergence-matched similarity
  ``s_f = f'(G(t))`` with the Gaussian kernel ``G(t) = mu exp(-t/(2 sigma^2))``.
  It is the optimal critic when the joint feature density is proportional
  to a Gaussian kernel of the embedding distance.
* :class:`CosineSimilarity` -- the conventional heuristic ``(x . y)/tau``,
  kept as a baseline; on the sphere ``x . y = 1 - t/2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NormalizationError, ParameterError
from .fdiv import Divergence, WeightedDivergence

__all__ = [
    "GaussianSimilarity",
    "CosineSimilarity",
    "gaussian_kernel",
    "f_gaussian",
    "cosine",
    "check_unit_rows",
    "pairwise_sqdist",
    "cross_sqdist_matrix",
    "similarity_from_token",
]

UNIT_NORM_TOL = 1e-6


def check_unit_rows(x: np.ndarray, name: str = "input") -> np.ndarray:
    """Validate unit Euclidean norm (tolerance 1e-6); hard error otherwise.

    Encoder normalization bugs should surface loudly rather than be
    repaired silently, so no renormalization happens here.
    """
    arr = np.atleast_2d(np.asarray(x, dtype=float))
    norms = np.linalg.norm(arr, axis=1)
    bad = np.abs(norms - 1.0) > UNIT_NORM_TOL
    if np.any(bad):
        worst = float(np.max(np.abs(norms - 1.0)))
        raise NormalizationError(
            f"{name}: {int(bad.sum())} row(s) deviate from unit norm "
            f"(worst deviation {worst:.3e}, tolerance {UNIT_NORM_TOL:g})")
    return arr


def pairwise_sqdist(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row-wise squared distances ||x_i - y_i||^2 for unit rows, in [0, 4]."""
    dots = np.einsum("ij,ij->i", x, y)
    return np.clip(2.0 - 2.0 * dots, 0.0, 4.0)


def cross_sqdist_matrix(x: np.ndarray) -> np.ndarray:
    """Full squared-distance matrix ||x_i - x_j||^2 for unit rows."""
    gram = x @ x.T
    return np.clip(2.0 - 2.0 * gram, 0.0, 4.0)


def gaussian_kernel(mu: float, sigma2: float, sqdist) -> float:
    """Gaussian kernel of squared distance: mu * exp(-sqdist / (2 sigma2))."""
    if not mu > 0.0:
        raise ParameterError("gaussian_kernel requires mu > 0")
    if not sigma2 > 0.0:
        raise ParameterError("gaussian_kernel requires sigma2 > 0")
    t = np.asarray(sqdist, dtype=float)
    if np.any(t < 0.0):
        raise ParameterError("squared distance must be nonnegative")
    out = mu * np.exp(-t / (2.0 * sigma2))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class GaussianSimilarity:
    """Divergence-matched similarity s_f(x, y) = f'(G(||x - y||^2)).

    For unit vectors the kernel argument lies in [0, 4], so kernel values
    stay inside [mu e^{-2/sigma2}, mu] and every composition below is
    evaluated strictly inside the domains of f' and f*.  s_f is
    nonincreasing in squared distance (increasing f' after a decreasing
    kernel) and symmetric in its arguments.
    """

    mu: float
    sigma2: float
    divergence: Divergence | WeightedDivergence

    def __post_init__(self):
        if not self.mu > 0.0:
            raise ParameterError("GaussianSimilarity requires mu > 0")
        if not self.sigma2 > 0.0:
            raise ParameterError("GaussianSimilarity requires sigma2 > 0")

    def kernel(self, sqdist):
        return gaussian_kernel(self.mu, self.sigma2, sqdist)

    # -- score calculus as functions of squared distance t ----------------

    def score_of_sqdist(self, t):
        return self.divergence.f_prime(self.kernel(t))

    def score_grad_sqdist(self, t):
        """d s_f / d t = f''(G) * dG/dt."""
        g = np.asarray(self.kernel(t))
        return np.asarray(self.divergence.f_double_prime(g)) * (-g / (2.0 * self.sigma2))

    def conj_score_of_sqdist(self, t):
        """f*(s_f) as a function of squared distance (the h profile)."""
        return self.divergence.f_star_of_f_prime(self.kernel(t))

    def conj_score_grad_sqdist(self, t):
        """d f*(s_f) / d t = G f''(G) dG/dt, using (f*)' o f' = id."""
        g = np.asarray(self.kernel(t))
        return g * np.asarray(self.divergence.f_double_prime(g)) * (-g / (2.0 * self.sigma2))

    # -- vector-level API --------------------------------------------------

    def score_pairs(self, x, y):
        """s_f for row-aligned unit-vector pairs."""
        x = check_unit_rows(x, "x")
        y = check_unit_rows(y, "y")
        return self.score_of_sqdist(pairwise_sqdist(x, y))


@dataclass(frozen=True)
class CosineSimilarity:
    """Temperature-scaled cosine similarity (x . y) / tau on unit vectors."""

    temperature: float

    def __post_init__(self):
        if not self.temperature > 0.0:
            raise ParameterError("CosineSimilarity requires temperature > 0")

    def score_of_sqdist(self, t):
        # On the sphere x . y = 1 - t/2.
        return (1.0 - np.asarray(t, dtype=float) / 2.0) / self.temperature

    def score_grad_sqdist(self, t):
        return np.full_like(np.asarray(t, dtype=float), -0.5 / self.temperature)

    def score_pairs(self, x, y):
        x = check_unit_rows(x, "x")
        y = check_unit_rows(y, "y")
        return self.score_of_sqdist(pairwise_sqdist(x, y))


def f_gaussian(sim: GaussianSimilarity, x, y) -> float:
    """Similarity of a single unit-vector pair under ``sim``."""
    return float(sim.score_pairs(np.atleast_2d(x), np.atleast_2d(y))[0])


def cosine(sim: CosineSimilarity, x, y) -> float:
    """Cosine similarity of a single unit-vector pair."""
    return float(sim.score_pairs(np.atleast_2d(x), np.atleast_2d(y))[0])


def similarity_from_token(token: str, mu: float, sigma2: float,
                          divergence: Divergence | WeightedDivergence):
    """Build a similarity from its config token.

    ``"fgaussian"`` selects the divergence-matched Gaussian similarity;
    ``"cosine:<temperature>"`` the scaled cosine baseline.
    """
    token = token.strip().lower()
    if token == "fgaussian":
        return GaussianSimilarity(mu=mu, sigma2=sigma2, divergence=divergence)
    if token.startswith("cosine"):
        _, sep, tau = token.partition(":")
        if not sep:
            raise ParameterError("cosine token must carry a temperature, e.g. 'cosine:0.5'")
        try:
            temperature = float(tau)
        except ValueError as exc:
            raise ParameterError(f"bad cosine temperature {tau!r}") from exc
        return CosineSimilarity(temperature=temperature)
    raise ParameterError(f"unknown similarity token {token!r}")
