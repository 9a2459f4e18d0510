"""The contrastive objective, its embedding gradients, and related baselines.

The training loss for a batch of ``N`` paired views is

    loss = -( mean_i s(x_i, y_i) - alpha * mean_{i != j} f*(s(x_i, x_j)) )

with positive pairs taken row-aligned across the two views and negative
pairs drawn from ordered cross pairs within the first view (the second
view can be folded in symmetrically via ``negatives="both-views"``).
Both reductions are means, so the weighting ``alpha`` is batch-size
independent.

Also provided: the InfoNCE objective in empirical form, the
alignment/uniformity loss, the squared-kernel (spectral / chi^2) loss,
the scalar shift that optimizes the KL-case shifted bound, and the
closed-form range constants of the estimation-error bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BatchTooSmall, ParameterError
from .fdiv import Divergence, WeightedDivergence
from .similarity import (
    CosineSimilarity,
    GaussianSimilarity,
    check_unit_rows,
    cross_sqdist_matrix,
    gaussian_kernel,
    pairwise_sqdist,
)

__all__ = [
    "EmbeddingBatch",
    "LossReport",
    "fmicl_loss",
    "fmicl_embedding_grad",
    "infonce_loss",
    "au_loss",
    "spectral_loss",
    "dv_shift_optimum",
    "estimation_bound_constants",
]

NEGATIVE_MODES = ("view-x", "both-views")


@dataclass(frozen=True)
class EmbeddingBatch:
    """N unit-norm feature rows per view; row i of both views is a positive pair.

    The arrays are frozen (non-writeable) after validation, so a batch can
    be shared freely across threads.
    """

    view_x: np.ndarray
    view_y: np.ndarray

    def __post_init__(self):
        x = np.array(self.view_x, dtype=float, copy=True)
        y = np.array(self.view_y, dtype=float, copy=True)
        if x.ndim != 2 or y.ndim != 2:
            raise ParameterError("embedding views must be 2-D (N x d) arrays")
        if x.shape != y.shape:
            raise ParameterError(f"view shapes differ: {x.shape} vs {y.shape}")
        if x.shape[0] < 2:
            raise BatchTooSmall("need at least 2 samples to form negative pairs")
        check_unit_rows(x, "view_x")
        check_unit_rows(y, "view_y")
        x.flags.writeable = False
        y.flags.writeable = False
        object.__setattr__(self, "view_x", x)
        object.__setattr__(self, "view_y", y)

    @property
    def n(self) -> int:
        return self.view_x.shape[0]

    @property
    def dim(self) -> int:
        return self.view_x.shape[1]


@dataclass(frozen=True)
class LossReport:
    """Positive term, negative term, and their weighted total.

    ``loss = -positive_term + alpha * negative_term`` holds exactly by
    construction.
    """

    positive_term: float
    negative_term: float
    alpha: float
    loss: float

    @classmethod
    def from_terms(cls, positive_term: float, negative_term: float, alpha: float) -> "LossReport":
        return cls(positive_term=float(positive_term),
                   negative_term=float(negative_term),
                   alpha=float(alpha),
                   loss=-float(positive_term) + float(alpha) * float(negative_term))

    def as_dict(self) -> dict:
        return {"positive": self.positive_term, "negative": self.negative_term,
                "alpha": self.alpha, "loss": self.loss}


def _resolve_divergence(sim, divergence):
    if isinstance(sim, GaussianSimilarity):
        if divergence is not None and divergence is not sim.divergence:
            raise ParameterError("divergence argument conflicts with the one bound to the similarity")
        return sim.divergence
    if divergence is None:
        raise ParameterError("a divergence must be supplied for the conjugate term "
                             "when using cosine similarity")
    return divergence


def _conj_of_sqdist(sim, d, t):
    if isinstance(sim, GaussianSimilarity):
        return np.asarray(sim.conj_score_of_sqdist(t))
    return np.asarray(d.f_star(sim.score_of_sqdist(t)))


def _conj_grad_sqdist(sim, d, t):
    if isinstance(sim, GaussianSimilarity):
        return np.asarray(sim.conj_score_grad_sqdist(t))
    s = sim.score_of_sqdist(t)
    return np.asarray(d.conjugate_prime(s)) * np.asarray(sim.score_grad_sqdist(t))


def _offdiag(matrix: np.ndarray) -> np.ndarray:
    n = matrix.shape[0]
    iu = np.triu_indices(n, k=1)
    return matrix[iu]


def fmicl_loss(batch: EmbeddingBatch, sim, alpha: float, *,
               negatives: str = "view-x", divergence=None) -> LossReport:
    """Empirical contrastive loss for one batch.

    Parameters
    ----------
    batch : EmbeddingBatch
    sim : GaussianSimilarity or CosineSimilarity
        With cosine similarity the conjugate needs an explicit
        ``divergence``; the Gaussian similarity carries its own.
    alpha : float
        Weight on the negative term (> 0; 0 is allowed to isolate the
        positive branch in diagnostics).
    negatives : str
        ``"view-x"`` draws negative pairs from the first view only;
        ``"both-views"`` averages in the symmetric second-view branch.
    """
    if negatives not in NEGATIVE_MODES:
        raise ParameterError(f"negatives mode must be one of {NEGATIVE_MODES}")
    if alpha < 0.0:
        raise ParameterError("alpha must be nonnegative")
    d = _resolve_divergence(sim, divergence)

    t_pos = pairwise_sqdist(batch.view_x, batch.view_y)
    positive = float(np.mean(sim.score_of_sqdist(t_pos)))

    # The distance matrix is symmetric, so the mean over ordered pairs
    # equals the mean over the strict upper triangle; the diagonal is
    # never evaluated (it can sit outside f*'s domain for cosine scores).
    t_neg = _offdiag(cross_sqdist_matrix(batch.view_x))
    negative = float(np.mean(_conj_of_sqdist(sim, d, t_neg)))
    if negatives == "both-views":
        t_neg_y = _offdiag(cross_sqdist_matrix(batch.view_y))
        negative = 0.5 * (negative + float(np.mean(_conj_of_sqdist(sim, d, t_neg_y))))

    return LossReport.from_terms(positive, negative, alpha)


def fmicl_embedding_grad(batch: EmbeddingBatch, sim, alpha: float, *,
                         negatives: str = "view-x", divergence=None):
    """Analytic d(loss)/d(view_x), d(loss)/d(view_y).

    Everything depends on embeddings only through squared pair distances,
    so the chain rule reduces to the scalar derivatives of the score and of
    its conjugate transform with respect to squared distance.
    """
    if negatives not in NEGATIVE_MODES:
        raise ParameterError(f"negatives mode must be one of {NEGATIVE_MODES}")
    d = _resolve_divergence(sim, divergence)
    x, y = batch.view_x, batch.view_y
    n = batch.n

    grad_x = np.zeros_like(x)
    grad_y = np.zeros_like(y)

    # Positive branch: loss contains -(1/N) sum_i s(t_i), t_i = ||x_i - y_i||^2.
    t_pos = pairwise_sqdist(x, y)
    coeff = -np.asarray(sim.score_grad_sqdist(t_pos)) / n  # d(-pos)/dt_i
    diff = x - y
    grad_x += (2.0 * coeff)[:, None] * diff
    grad_y += (-2.0 * coeff)[:, None] * diff

    def negative_branch(view):
        t_mat = cross_sqdist_matrix(view)
        n_off = ~np.eye(n, dtype=bool)
        w = np.zeros_like(t_mat)
        w[n_off] = np.asarray(_conj_grad_sqdist(sim, d, t_mat[n_off]))
        # d/dx_i of sum_{j != i} c(t_ij) over ordered pairs: both (i, j)
        # and (j, i) contribute, giving a factor 4 on w_ij (x_i - x_j).
        row = w.sum(axis=1)
        return 4.0 * (row[:, None] * view - w @ view) / (n * (n - 1))

    if negatives == "view-x":
        grad_x += alpha * negative_branch(x)
    else:
        grad_x += 0.5 * alpha * negative_branch(x)
        grad_y += 0.5 * alpha * negative_branch(y)
    return grad_x, grad_y


def _logmeanexp(values: np.ndarray) -> float:
    """log(mean(exp(v))) with max-subtraction overflow guarding."""
    values = np.asarray(values, dtype=float)
    m = float(np.max(values))
    return m + float(np.log(np.mean(np.exp(values - m))))


def infonce_loss(batch: EmbeddingBatch, sim) -> float:
    """Empirical InfoNCE loss (negated bound).

    The inner expectation over negatives excludes the positive index, and
    each row's log-mean-exp is guarded by max-subtraction.  Adding a
    constant to every similarity leaves the value unchanged.
    """
    x, y = batch.view_x, batch.view_y
    n = batch.n
    s_pos = np.asarray(sim.score_of_sqdist(pairwise_sqdist(x, y)))
    s_mat = np.asarray(sim.score_of_sqdist(cross_sqdist_matrix(x)))
    np.fill_diagonal(s_mat, -np.inf)
    row_max = np.max(s_mat, axis=1)
    lse = row_max + np.log(np.sum(np.exp(s_mat - row_max[:, None]), axis=1) / (n - 1))
    objective = float(np.mean(s_pos)) - float(np.mean(lse))
    return -objective


def au_loss(batch: EmbeddingBatch) -> float:
    """Alignment/uniformity loss: mean positive squared distance plus the
    log-mean Gaussian potential of the cross pairs (negated bound)."""
    t_pos = pairwise_sqdist(batch.view_x, batch.view_y)
    t_neg = _offdiag(cross_sqdist_matrix(batch.view_x))
    objective = -float(np.mean(t_pos)) - _logmeanexp(-t_neg)
    return -objective


def spectral_loss(batch: EmbeddingBatch, mu: float, sigma2: float) -> float:
    """Squared-kernel contrastive loss (the chi^2 instance, constants dropped).

    Equals the Pearson chi^2 loss at alpha = 1 up to a batch-independent
    additive constant, since both expand into the same two kernel moments.
    """
    t_pos = pairwise_sqdist(batch.view_x, batch.view_y)
    t_neg = _offdiag(cross_sqdist_matrix(batch.view_x))
    g_pos = gaussian_kernel(mu, sigma2, t_pos)
    g_neg = gaussian_kernel(mu, sigma2, t_neg)
    objective = 2.0 * float(np.mean(g_pos)) - float(np.mean(g_neg**2))
    return -objective


def dv_shift_optimum(cross_similarities) -> float:
    """Maximizing scalar shift of the KL-case shifted objective.

    The first-order condition of the shifted bound with the exponential
    conjugate gives v* = log(mean(exp(s))) - 1 over cross-pair scores.
    (Printed statements of this maximizer sometimes drop the exp; the
    stationarity condition pins down this form.)
    """
    values = np.asarray(cross_similarities, dtype=float).ravel()
    if values.size == 0:
        raise ParameterError("dv_shift_optimum needs at least one similarity value")
    return _logmeanexp(values) - 1.0


def estimation_bound_constants(d: Divergence | WeightedDivergence, mu: float, sigma2: float,
                               n: int, delta: float) -> tuple[float, float, float]:
    """Closed-form constants of the finite-sample estimation bound.

    Returns ``(r_T, r_f, tail)`` where the ranges are the spreads of the
    similarity and its conjugate transform over the kernel's value range
    on the sphere (squared distance in [0, 4]), and
    ``tail = (r_T + 2 r_f) sqrt(log(6/delta) / (2 (n - 1)))``.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ParameterError("estimation bound requires integer batch size n >= 2")
    if not 0.0 < delta < 1.0:
        raise ParameterError("delta must lie in (0, 1)")
    if not (mu > 0.0 and sigma2 > 0.0):
        raise ParameterError("mu and sigma2 must be positive")
    g_hi = mu
    g_lo = mu * np.exp(-2.0 / sigma2)
    r_t = float(d.f_prime(g_hi) - d.f_prime(g_lo))
    r_f = float(d.f_star_of_f_prime(g_hi) - d.f_star_of_f_prime(g_lo))
    tail = (r_t + 2.0 * r_f) * np.sqrt(np.log(6.0 / delta) / (2.0 * (n - 1)))
    return r_t, r_f, float(tail)
