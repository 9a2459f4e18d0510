"""f-divergence calculus: generators, derivatives, convex conjugates, compositions.

Every supported divergence is described by a convex generator ``f`` on the
positive reals with ``f(1) = 0``, together with the closed forms that the
contrastive objective actually consumes:

* ``f'(u)``    -- the derivative, used as the similarity transform,
* ``f*(t)``    -- the (monotone) convex conjugate, applied to negative pairs,
* ``f* . f'``  -- their composition, equal to ``u f'(u) - f(u)`` by the
  Fenchel equality; this is the ``h`` profile that decides uniformity.

All evaluators accept scalars or numpy arrays and run in double precision.
The one exception is :func:`fenchel_residual`, which re-evaluates the
identity in extended precision (mpmath) so that its reported residual
reflects formula consistency rather than float64 rounding at large
magnitudes (``u**3`` at ``u = 1e3`` has ulp ~1e-7, far above the 1e-9
contract).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np

from .errors import DomainError, ParameterError

__all__ = [
    "Family",
    "FunctionKind",
    "BoundaryBehavior",
    "ConjugateDomain",
    "Convexity",
    "Divergence",
    "WeightedDivergence",
    "evaluate",
    "fenchel_residual",
    "h_value",
    "classify_h_convexity",
    "apply_weighting",
    "lambert_w",
    "lambert_w_exp",
]

_LOG2 = math.log(2.0)
# f*_JS diverges as t -> log 2; refuse evaluation inside this guard band.
_JS_UPPER_GUARD = 1e-12


class Family(enum.Enum):
    """The divergence families with closed-form conjugate calculus."""

    KL = "kl"
    REVERSE_KL = "rkl"
    JS = "js"
    PEARSON_CHI2 = "pearson"
    SQUARED_HELLINGER = "sh"
    NEYMAN_CHI2 = "neyman"
    JEFFREY = "jeffrey"
    TSALLIS = "tsallis"
    VINCZE_LE_CAM = "vlc"


class FunctionKind(enum.Enum):
    """Which of the four closed-form columns to evaluate."""

    F = "f"
    F_PRIME = "f_prime"
    F_STAR = "f_star"
    F_STAR_OF_F_PRIME = "f_star_of_f_prime"


class BoundaryBehavior(enum.Enum):
    CLAMP = "clamp"
    ERROR = "error"


class Convexity(enum.Enum):
    STRICTLY_CONVEX = "strictly_convex"
    AFFINE_OR_LINEAR = "affine_or_linear"
    CONCAVE = "concave"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class ConjugateDomain:
    """Descriptive metadata for the domain of ``f*``.

    ``boundary_behavior`` refers to the finite boundary at which the
    conjugate stays finite (the clampable side); crossing a boundary where
    ``f*`` diverges always raises :class:`DomainError` regardless.
    """

    lower: float
    upper: float
    boundary_behavior: BoundaryBehavior
    clamp_value: float | None = None


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _ret(arr, scalar):
    return float(arr) if scalar else arr


# --------------------------------------------------------------------------
# Lambert W (principal branch)
# --------------------------------------------------------------------------

_INV_E = math.exp(-1.0)


def _lambert_initial_guess(x):
    """Piecewise starting point for Halley iteration on w e^w = x."""
    x = np.asarray(x, dtype=float)

    with np.errstate(over="ignore", invalid="ignore"):
        near = x < -0.25  # close to the branch point -1/e
        p = np.sqrt(np.clip(2.0 * (math.e * x + 1.0), 0.0, None))
        guess_near = -1.0 + p - p * p / 3.0 + 11.0 * p**3 / 72.0

        small = np.abs(x) < 1.0  # series around 0: W ~ x (1 - x + ...)
        guess_small = x * (1.0 - x)

        lx = np.log(np.clip(x, 1e-300, None))
        llx = np.log(np.clip(lx, 1.0, None))
        guess_large = lx - llx + llx / np.clip(lx, 1.0, None)

        guess = np.where(small, guess_small, guess_large)
        return np.where(near, guess_near, guess)


def lambert_w(x, max_iter: int = 50):
    """Principal-branch Lambert W via Halley iteration.

    Solves ``w * exp(w) = x`` for ``x >= -1/e`` to near machine precision
    (the defining residual is far below the 1e-12 contract).

    Raises
    ------
    DomainError
        If any input lies below ``-1/e``.
    """
    arr, scalar = _as_array(x)
    if np.any(arr < -_INV_E):
        raise DomainError(f"lambert_w defined for x >= -1/e ~ {-_INV_E:.6f}; got {x!r}")

    w = _lambert_initial_guess(arr)
    # Exact special cases keep the iteration away from w = -1 where the
    # Halley denominator degenerates.
    at_branch = arr == -_INV_E
    w = np.where(at_branch, -1.0, w)
    w = np.where(arr == 0.0, 0.0, w)

    active = ~(at_branch | (arr == 0.0))
    for _ in range(max_iter):
        if not np.any(active):
            break
        ew = np.exp(w)
        fw = w * ew - arr
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * fw / (2.0 * wp1)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(active, fw / denom, 0.0)
        w = w - step
        active = active & (np.abs(step) > 1e-16 * np.maximum(1.0, np.abs(w)))
    return _ret(w, scalar)


def lambert_w_exp(y):
    """Compute ``W(exp(y))`` without overflowing for large ``y``.

    For ``y <= 700`` this is the plain composition.  Beyond that,
    ``exp(y)`` is not representable, so we solve ``w + log w = y`` by
    Newton iteration instead (the equation obtained by taking logs).
    """
    arr, scalar = _as_array(y)
    out = np.empty_like(arr)

    safe = arr <= 700.0
    if np.any(safe):
        out[safe] = np.asarray(lambert_w(np.exp(arr[safe])))

    big = ~safe
    if np.any(big):
        yb = arr[big]
        w = yb - np.log(yb)
        for _ in range(8):
            # Newton step for g(w) = w + log(w) - y.
            w = w - (w + np.log(w) - yb) * w / (w + 1.0)
        out[big] = w
    return _ret(out, scalar)


# --------------------------------------------------------------------------
# Per-family closed forms (u always > 0; alpha only read for Tsallis)
# --------------------------------------------------------------------------


def _f_kl(u, a):
    return u * np.log(u)


def _f_rkl(u, a):
    return -np.log(u)


def _f_js(u, a):
    return -(u + 1.0) * (np.log1p(u) - _LOG2) + u * np.log(u)


def _f_pearson(u, a):
    return (u - 1.0) ** 2


def _f_sh(u, a):
    return (np.sqrt(u) - 1.0) ** 2


def _f_neyman(u, a):
    return (1.0 - u) ** 2 / u


def _f_jeffrey(u, a):
    return (u - 1.0) * np.log(u)


def _f_tsallis(u, a):
    # Constant -1/(a-1) included so that f(1) = 0 holds for every family.
    return (u**a - 1.0) / (a - 1.0)


def _f_vlc(u, a):
    return (u - 1.0) ** 2 / (u + 1.0)


_F = {
    Family.KL: _f_kl,
    Family.REVERSE_KL: _f_rkl,
    Family.JS: _f_js,
    Family.PEARSON_CHI2: _f_pearson,
    Family.SQUARED_HELLINGER: _f_sh,
    Family.NEYMAN_CHI2: _f_neyman,
    Family.JEFFREY: _f_jeffrey,
    Family.TSALLIS: _f_tsallis,
    Family.VINCZE_LE_CAM: _f_vlc,
}

_F_PRIME = {
    Family.KL: lambda u, a: np.log(u) + 1.0,
    Family.REVERSE_KL: lambda u, a: -1.0 / u,
    Family.JS: lambda u, a: _LOG2 + np.log(u) - np.log1p(u),
    Family.PEARSON_CHI2: lambda u, a: 2.0 * (u - 1.0),
    Family.SQUARED_HELLINGER: lambda u, a: 1.0 - 1.0 / np.sqrt(u),
    Family.NEYMAN_CHI2: lambda u, a: 1.0 - 1.0 / (u * u),
    Family.JEFFREY: lambda u, a: np.log(u) + 1.0 - 1.0 / u,
    Family.TSALLIS: lambda u, a: a / (a - 1.0) * u ** (a - 1.0),
    Family.VINCZE_LE_CAM: lambda u, a: 1.0 - 4.0 / (u + 1.0) ** 2,
}

_F_DOUBLE_PRIME = {
    Family.KL: lambda u, a: 1.0 / u,
    Family.REVERSE_KL: lambda u, a: 1.0 / (u * u),
    Family.JS: lambda u, a: 1.0 / (u * (1.0 + u)),
    Family.PEARSON_CHI2: lambda u, a: np.full_like(u, 2.0),
    Family.SQUARED_HELLINGER: lambda u, a: 0.5 * u**-1.5,
    Family.NEYMAN_CHI2: lambda u, a: 2.0 / u**3,
    Family.JEFFREY: lambda u, a: 1.0 / u + 1.0 / (u * u),
    Family.TSALLIS: lambda u, a: a * u ** (a - 2.0),
    Family.VINCZE_LE_CAM: lambda u, a: 8.0 / (u + 1.0) ** 3,
}


def _fstar_kl(t, a):
    return np.exp(t - 1.0)


def _fstar_rkl(t, a):
    if np.any(t >= 0.0):
        raise DomainError("f* for reverse KL requires t < 0")
    return -1.0 - np.log(-t)


def _fstar_js(t, a):
    if np.any(t >= _LOG2 - _JS_UPPER_GUARD):
        raise DomainError("f* for JS diverges at t = log 2; refusing t within 1e-12 of it")
    # -log(2 - e^t) written against log1p for accuracy near the boundary.
    return -_LOG2 - np.log1p(-np.exp(t - _LOG2))


def _fstar_pearson(t, a):
    return np.where(t <= -2.0, -1.0, t * t / 4.0 + t)


def _fstar_sh(t, a):
    if np.any(t >= 1.0):
        raise DomainError("f* for squared Hellinger requires t < 1")
    return t / (1.0 - t)


def _fstar_neyman(t, a):
    if np.any(t > 1.0):
        raise DomainError("f* for Neyman chi^2 requires t <= 1")
    return 2.0 - 2.0 * np.sqrt(1.0 - t)


def _fstar_jeffrey(t, a):
    w = lambert_w_exp(1.0 - np.asarray(t, dtype=float))
    return w + 1.0 / w + t - 2.0


def _fstar_tsallis(t, a):
    const = 1.0 / (a - 1.0)
    base = np.clip(np.asarray(t, dtype=float), 0.0, None) * (a - 1.0) / a
    return np.where(t <= 0.0, const, base ** (a / (a - 1.0)) + const)


def _fstar_vlc(t, a):
    if np.any(t > 1.0):
        raise DomainError("f* for Vincze-Le Cam requires t <= 1")
    inner = 4.0 - t - 4.0 * np.sqrt(np.clip(1.0 - t, 0.0, None))
    return np.where(t <= -3.0, -1.0, inner)


_F_STAR = {
    Family.KL: _fstar_kl,
    Family.REVERSE_KL: _fstar_rkl,
    Family.JS: _fstar_js,
    Family.PEARSON_CHI2: _fstar_pearson,
    Family.SQUARED_HELLINGER: _fstar_sh,
    Family.NEYMAN_CHI2: _fstar_neyman,
    Family.JEFFREY: _fstar_jeffrey,
    Family.TSALLIS: _fstar_tsallis,
    Family.VINCZE_LE_CAM: _fstar_vlc,
}

# (f*)'(t): the maximizing u in the conjugate sup, i.e. the inverse of f'.
# Inputs in the clamped region map to 0 (the boundary maximizer).
_CONJ_PRIME = {
    Family.KL: lambda t, a: np.exp(t - 1.0),
    Family.REVERSE_KL: lambda t, a: -1.0 / t,
    Family.JS: lambda t, a: np.exp(t) / (2.0 - np.exp(t)),
    Family.PEARSON_CHI2: lambda t, a: np.clip(t / 2.0 + 1.0, 0.0, None),
    Family.SQUARED_HELLINGER: lambda t, a: (1.0 - t) ** -2.0,
    Family.NEYMAN_CHI2: lambda t, a: (1.0 - t) ** -0.5,
    Family.JEFFREY: lambda t, a: 1.0 / lambert_w_exp(1.0 - np.asarray(t, dtype=float)),
    Family.TSALLIS: lambda t, a: (np.clip(t, 0.0, None) * (a - 1.0) / a) ** (1.0 / (a - 1.0)),
    Family.VINCZE_LE_CAM: lambda t, a: np.clip(2.0 / np.sqrt(1.0 - t) - 1.0, 0.0, None),
}

_CONJUGATE_DOMAINS = {
    Family.KL: ConjugateDomain(-math.inf, math.inf, BoundaryBehavior.ERROR),
    Family.REVERSE_KL: ConjugateDomain(-math.inf, 0.0, BoundaryBehavior.ERROR),
    Family.JS: ConjugateDomain(-math.inf, _LOG2, BoundaryBehavior.ERROR),
    Family.PEARSON_CHI2: ConjugateDomain(-2.0, math.inf, BoundaryBehavior.CLAMP, -1.0),
    Family.SQUARED_HELLINGER: ConjugateDomain(-math.inf, 1.0, BoundaryBehavior.ERROR),
    Family.NEYMAN_CHI2: ConjugateDomain(-math.inf, 1.0, BoundaryBehavior.ERROR),
    Family.JEFFREY: ConjugateDomain(-math.inf, math.inf, BoundaryBehavior.ERROR),
    # Clamp value depends on the Tsallis order; filled in per instance.
    Family.TSALLIS: ConjugateDomain(0.0, math.inf, BoundaryBehavior.CLAMP, None),
    Family.VINCZE_LE_CAM: ConjugateDomain(-3.0, 1.0, BoundaryBehavior.CLAMP, -1.0),
}

_TOKENS = {fam.value: fam for fam in Family}


@dataclass(frozen=True)
class Divergence:
    """One member of the f-divergence family with its closed-form calculus.

    Immutable after construction; all evaluators are pure functions and
    safe for concurrent use.  ``tsallis_alpha`` is the divergence-order
    parameter (> 1) and is only meaningful for the Tsallis family.
    """

    family: Family
    tsallis_alpha: float | None = None

    def __post_init__(self):
        if self.family is Family.TSALLIS:
            if self.tsallis_alpha is None or not self.tsallis_alpha > 1.0:
                raise ParameterError("Tsallis divergence requires order tsallis_alpha > 1")
        elif self.tsallis_alpha is not None:
            raise ParameterError(f"tsallis_alpha is only valid for Tsallis, not {self.family}")

    # -- construction / serialization ------------------------------------

    @classmethod
    def from_token(cls, token: str) -> "Divergence":
        """Parse a lowercase selection token, e.g. ``"kl"`` or ``"tsallis:3"``."""
        token = token.strip().lower()
        if token.startswith("tsallis"):
            _, sep, order = token.partition(":")
            if not sep:
                raise ParameterError("Tsallis token must carry an order, e.g. 'tsallis:3'")
            try:
                alpha = float(order)
            except ValueError as exc:
                raise ParameterError(f"bad Tsallis order {order!r}") from exc
            return cls(Family.TSALLIS, alpha)
        if token not in _TOKENS:
            raise ParameterError(f"unknown divergence token {token!r}; expected one of "
                                 f"{sorted(_TOKENS)} or 'tsallis:<order>'")
        return cls(_TOKENS[token])

    @property
    def token(self) -> str:
        if self.family is Family.TSALLIS:
            return f"tsallis:{self.tsallis_alpha:g}"
        return self.family.value

    @property
    def conjugate_domain(self) -> ConjugateDomain:
        dom = _CONJUGATE_DOMAINS[self.family]
        if self.family is Family.TSALLIS:
            return ConjugateDomain(dom.lower, dom.upper, dom.boundary_behavior,
                                   1.0 / (self.tsallis_alpha - 1.0))
        return dom

    # -- evaluators -------------------------------------------------------

    def _check_positive(self, u):
        if np.any(u <= 0.0) or not np.all(np.isfinite(u)):
            raise DomainError(f"{self.token}: argument must be a finite positive real")

    def f(self, u):
        """Generator value f(u) for u > 0; f(1) = 0 for every family."""
        arr, scalar = _as_array(u)
        self._check_positive(arr)
        return _ret(_F[self.family](arr, self.tsallis_alpha), scalar)

    def f_prime(self, u):
        """Derivative f'(u); monotonically nondecreasing by convexity."""
        arr, scalar = _as_array(u)
        self._check_positive(arr)
        return _ret(_F_PRIME[self.family](arr, self.tsallis_alpha), scalar)

    def f_double_prime(self, u):
        """Second derivative f''(u) >= 0; drives the similarity gradients."""
        arr, scalar = _as_array(u)
        self._check_positive(arr)
        return _ret(_F_DOUBLE_PRIME[self.family](arr, self.tsallis_alpha), scalar)

    def f_star(self, t):
        """Monotone convex conjugate f*(t), with the table's boundary rules.

        Families whose conjugate stays finite at a boundary clamp beyond it
        (Pearson: -1 for t <= -2, Vincze-Le Cam: -1 for t <= -3, Tsallis:
        the t = 0 value for t < 0); sides where f* diverges raise
        :class:`DomainError`.
        """
        arr, scalar = _as_array(t)
        if not np.all(np.isfinite(arr)):
            raise DomainError(f"{self.token}: conjugate argument must be finite")
        return _ret(_F_STAR[self.family](arr, self.tsallis_alpha), scalar)

    def f_star_of_f_prime(self, u):
        """Literal composition f*(f'(u)).

        Equals ``u f'(u) - f(u)`` by the Fenchel equality; agreement with
        the printed closed forms is checked in the test suite instead of
        trusting either formula alone.
        """
        return self.f_star(self.f_prime(u))

    def conjugate_prime(self, t):
        """(f*)'(t), the maximizer of the conjugate sup (inverse of f')."""
        arr, scalar = _as_array(t)
        return _ret(_CONJ_PRIME[self.family](arr, self.tsallis_alpha), scalar)

    # -- extended-precision mirror (for fenchel_residual) -----------------

    def _mp_forms(self):
        a = None if self.tsallis_alpha is None else mp.mpf(self.tsallis_alpha)
        log2 = mp.log(2)

        def js_f(u):
            return -(u + 1) * (mp.log(1 + u) - log2) + u * mp.log(u)

        def jeffrey_fstar(t):
            w = mp.lambertw(mp.e ** (1 - t))
            return w + 1 / w + t - 2

        forms = {
            Family.KL: (lambda u: u * mp.log(u),
                        lambda u: mp.log(u) + 1,
                        lambda t: mp.e ** (t - 1)),
            Family.REVERSE_KL: (lambda u: -mp.log(u),
                                lambda u: -1 / u,
                                lambda t: -1 - mp.log(-t)),
            Family.JS: (js_f,
                        lambda u: log2 + mp.log(u) - mp.log(1 + u),
                        lambda t: -mp.log(2 - mp.e**t)),
            Family.PEARSON_CHI2: (lambda u: (u - 1) ** 2,
                                  lambda u: 2 * (u - 1),
                                  lambda t: t * t / 4 + t),
            Family.SQUARED_HELLINGER: (lambda u: (mp.sqrt(u) - 1) ** 2,
                                       lambda u: 1 - 1 / mp.sqrt(u),
                                       lambda t: t / (1 - t)),
            Family.NEYMAN_CHI2: (lambda u: (1 - u) ** 2 / u,
                                 lambda u: 1 - 1 / u**2,
                                 lambda t: 2 - 2 * mp.sqrt(1 - t)),
            Family.JEFFREY: (lambda u: (u - 1) * mp.log(u),
                             lambda u: mp.log(u) + 1 - 1 / u,
                             jeffrey_fstar),
            Family.TSALLIS: (lambda u: (u**a - 1) / (a - 1),
                             lambda u: a / (a - 1) * u ** (a - 1),
                             lambda t: ((a - 1) * t / a) ** (a / (a - 1)) + 1 / (a - 1)),
            Family.VINCZE_LE_CAM: (lambda u: (u - 1) ** 2 / (u + 1),
                                   lambda u: 1 - 4 / (u + 1) ** 2,
                                   lambda t: 4 - t - 4 * mp.sqrt(1 - t)),
        }
        return forms[self.family]


def evaluate(d: Divergence, fn: FunctionKind, point) -> float:
    """Evaluate one closed-form column of divergence ``d`` at ``point``."""
    if fn is FunctionKind.F:
        return d.f(point)
    if fn is FunctionKind.F_PRIME:
        return d.f_prime(point)
    if fn is FunctionKind.F_STAR:
        return d.f_star(point)
    if fn is FunctionKind.F_STAR_OF_F_PRIME:
        return d.f_star_of_f_prime(point)
    raise ParameterError(f"unknown function kind {fn!r}")


def fenchel_residual(d: Divergence, u: float) -> float:
    """|f*(f'(u)) - (u f'(u) - f(u))|, evaluated in extended precision.

    The Fenchel equality holds exactly at every differentiable point, so a
    correct formula table must drive this residual to (extended-precision)
    zero; a mistyped column shows up as an O(1) residual.  Using mpmath
    internally keeps float64 double-rounding (which reaches ~1e-7 for
    magnitudes like ``u**3`` near ``u = 1e3``) out of the measurement.
    """
    if not np.isscalar(u) and np.ndim(u) != 0:
        raise ParameterError("fenchel_residual expects a scalar point")
    uf = float(u)
    if not math.isfinite(uf) or uf <= 0.0:
        raise DomainError("fenchel_residual requires a finite u > 0")
    with mp.workdps(30):
        # Built inside the precision context so embedded constants
        # (e.g. log 2) are evaluated at working precision.
        f_mp, fp_mp, fstar_mp = d._mp_forms()
        um = mp.mpf(uf)
        t = fp_mp(um)
        residual = abs(fstar_mp(t) - (um * t - f_mp(um)))
        return float(residual)


def h_value(d: Divergence, mu: float, sigma2: float, t) -> float:
    """The uniformity profile h(t) = f*(f'(G(t))) with G the Gaussian kernel."""
    if mu <= 0.0 or sigma2 <= 0.0:
        raise ParameterError("h_value requires mu > 0 and sigma2 > 0")
    arr, scalar = _as_array(t)
    g = mu * np.exp(-arr / (2.0 * sigma2))
    return _ret(np.asarray(d.f_star_of_f_prime(g)), scalar)


def classify_h_convexity(d: Divergence, mu: float, sigma2: float,
                         grid_points: int = 401, tol: float = 1e-10) -> Convexity:
    """Classify the curvature of h on [0, 4] by numeric second differences.

    Strictly convex h makes the negative term's minimizers a regular
    simplex; a linear h (reverse KL) or concave h (Neyman chi^2) loses that
    guarantee.  The +/-1e-10 band is wide enough that reverse KL's exactly
    linear profile lands in AFFINE_OR_LINEAR under double-precision noise.
    """
    grid = np.linspace(0.0, 4.0, grid_points)
    values = h_value(d, mu, sigma2, grid)
    second = values[:-2] - 2.0 * values[1:-1] + values[2:]
    if np.all(second > tol):
        return Convexity.STRICTLY_CONVEX
    if np.all(np.abs(second) <= tol):
        return Convexity.AFFINE_OR_LINEAR
    if np.all(second < -tol):
        return Convexity.CONCAVE
    return Convexity.INDETERMINATE


class WeightedDivergence:
    """Right scalar multiplication f_a(x) = a f(x/a) - a f(1/a) of a base divergence.

    Rescaling the negative term of the objective by a weight ``a`` is the
    same as swapping the generator for ``f_a``, which is again convex with
    ``f_a(1) = 0``; the conjugate picks up the matching transform
    ``f_a*(t) = a f*(t) + a f(1/a)``.  Instances expose the same evaluator
    surface as :class:`Divergence` and can be dropped into any similarity
    or objective. Immutable and thread-safe.
    """

    def __init__(self, base: Divergence, weight: float):
        if not weight > 0.0:
            raise ParameterError("weighting parameter must be positive")
        self.base = base
        self.weight = float(weight)
        self._const = self.weight * base.f(1.0 / self.weight)

    @property
    def token(self) -> str:
        return f"{self.base.token}*{self.weight:g}"

    def f(self, x):
        return self.weight * np.asarray(self.base.f(np.asarray(x, dtype=float) / self.weight)) - self._const

    def f_prime(self, x):
        return self.base.f_prime(np.asarray(x, dtype=float) / self.weight)

    def f_double_prime(self, x):
        return np.asarray(self.base.f_double_prime(np.asarray(x, dtype=float) / self.weight)) / self.weight

    def f_star(self, t):
        return self.weight * np.asarray(self.base.f_star(t)) + self._const

    def f_star_of_f_prime(self, x):
        return self.f_star(self.f_prime(x))

    def conjugate_prime(self, t):
        return self.weight * np.asarray(self.base.conjugate_prime(t))


def apply_weighting(d: Divergence, weight: float) -> WeightedDivergence:
    """Fold the negative-term weight into the generator itself."""
    return WeightedDivergence(d, weight)
