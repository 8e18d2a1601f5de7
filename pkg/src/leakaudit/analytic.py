"""Closed-form quantities and bound expressions.

Everything here is a pure function of its arguments.  Logarithms are
natural throughout, so entropies are in nats.

The synthetic scenario is a truncated Gaussian mixture: ``S`` is uniform on
{-1, +1} and ``T | S`` is ``N(S * mu, 1)`` truncated to ``[-r, r]``.  For that
family the optimal squared-loss predictor is ``tanh(mu * t)`` and its Barron
constant is ``|mu|``.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

__all__ = [
    "MixtureParams",
    "BoundIngredients",
    "QuadratureSpec",
    "QuadratureError",
    "SampleTooSmallError",
    "std_normal_cdf",
    "truncated_density",
    "eta",
    "barron_constant_tanh",
    "barron_constant_numeric",
    "minimal_true_loss",
    "representation_bound",
    "representation_bound_terms",
    "mixture_bound",
    "classification_sq_bound",
    "binary_entropy",
    "classification_log_bound",
    "min_samples_log_bound",
    "weissman_radius",
    "alhejji_smith_gap",
]

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate, error_estimate):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


class SampleTooSmallError(ValueError):
    """The sample is below the size a bound requires."""

    def __init__(self, message, min_n):
        super().__init__(message)
        self.min_n = min_n


@dataclass(frozen=True)
class MixtureParams:
    mu: float
    r: float = 3.0

    def __post_init__(self):
        if not math.isfinite(self.mu):
            raise ValueError("mu must be finite")
        if not (self.r > 0 and math.isfinite(self.r)):
            raise ValueError("r must be positive and finite")

    @property
    def diam(self):
        return 2.0 * self.r


@dataclass(frozen=True)
class BoundIngredients:
    delta: float
    n: int
    k: int = 1
    c_eta: float = 0.0
    diam: float = 0.0
    d: int = 1

    def __post_init__(self):
        _check_delta(self.delta)
        if self.n < 1 or self.k < 1 or self.d < 1:
            raise ValueError("n, k and d must be positive")
        if self.c_eta < 0 or self.diam < 0:
            raise ValueError("c_eta and diam must be non-negative")


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")


def _check_delta(delta):
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")


def _quad(func, lo, hi, spec, points=None):
    # QUADPACK (adaptive Gauss-Kronrod); a trailing message means ier != 0
    value, err, _info, *message = integrate.quad(
        func,
        lo,
        hi,
        epsabs=spec.abs_tol,
        epsrel=0.0,
        limit=spec.max_subdivisions,
        points=points,
        full_output=1,
    )
    if message and err > spec.abs_tol:
        raise QuadratureError(
            f"quadrature did not converge on [{lo}, {hi}] (abs err ~ {err:.3g}): {message[0]}",
            value,
            err,
        )
    return value


def std_normal_cdf(x):
    """Standard Gaussian CDF via ``erfc``, so the lower tail keeps relative precision.

    Relative error is a few ulps for moderate ``x``; it grows like ``x**2``
    ulps far in the tail because ``-x / sqrt(2)`` is rounded before ``erfc``.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"std_normal_cdf requires a finite argument, got {x}")
    return 0.5 * math.erfc(-x / _SQRT2)


def _mass(params):
    # P(N(mu, 1) in [-r, r]); identical for both signs by symmetry
    return std_normal_cdf(params.r + params.mu) - std_normal_cdf(-params.r + params.mu)


def truncated_density(t, sign, params):
    """Density of ``T | S = sign`` for the truncated mixture.

    Accepts a scalar or an array for ``t``; points outside ``[-r, r]`` get 0.
    """
    if sign not in (-1, 1):
        raise ValueError("sign must be -1 or +1")
    t_arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t_arr)):
        raise ValueError("t must be finite")
    dens = np.exp(-0.5 * (t_arr - sign * params.mu) ** 2) / (_SQRT_2PI * _mass(params))
    dens = np.where(np.abs(t_arr) <= params.r, dens, 0.0)
    return float(dens) if dens.ndim == 0 else dens


def eta(t, mu):
    """Conditional mean E[S | T = t] of the mixture, i.e. ``tanh(mu * t)``."""
    return np.tanh(mu * np.asarray(t, dtype=float)) if np.ndim(t) else math.tanh(mu * t)


def barron_constant_tanh(mu):
    """Barron constant of ``t -> tanh(mu * t)`` in closed form: ``|mu|``."""
    return abs(float(mu))


def _sech2_transform(omega):
    # Fourier transform of sech(.)^2 (unitary convention); value 2/sqrt(2 pi) at 0
    omega = np.asarray(omega, dtype=float)
    x = 0.5 * math.pi * np.abs(omega)
    out = np.empty_like(x)
    small = x < 1e-8
    out[small] = math.sqrt(math.pi / 2.0) * 2.0 / math.pi
    xs = x[~small]
    # omega * csch(pi omega / 2), written to avoid overflow for large |omega|
    out[~small] = (
        math.sqrt(math.pi / 2.0) * np.abs(omega[~small]) * 2.0 * np.exp(-xs) / -np.expm1(-2.0 * xs)
    )
    return out


def barron_constant_numeric(mu, spec=QuadratureSpec()):
    """Barron constant of ``tanh(mu * .)`` by integrating its Fourier magnitude.

    Integrates ``|mu| / sqrt(2 pi) * |F[sech(mu .)^2](w)|`` over the real line,
    with ``F[sech(mu .)^2](w) = F[sech^2](w / mu) / mu``.  Independent of the
    closed form and used to cross-check it.
    """
    mu = float(mu)
    if mu == 0.0 or not math.isfinite(mu):
        raise ValueError("barron_constant_numeric needs a finite nonzero mu")
    m = abs(mu)

    def integrand(w):
        return float(_sech2_transform(np.array([w / m]))[0]) / m

    # integrand is even in w; decays like exp(-pi w / (2 m))
    upper = m * 60.0
    half = _quad(integrand, 0.0, upper, spec)
    return m / _SQRT_2PI * 2.0 * half


def minimal_true_loss(params, spec=QuadratureSpec()):
    """Minimal squared loss over all predictors for the truncated mixture.

    Quadrature of ``2 / (sqrt(2 pi) p_mu) * int_{-r}^{r} exp(-(t + mu)^2 / 2) /
    (1 + exp(-2 mu t)) dt`` where ``p_mu`` is the untruncated mass of [-r, r].
    """
    mu, r = params.mu, params.r
    p_mu = _mass(params)

    def integrand(t):
        # 1 / (1 + exp(-2 mu t)) == expit(2 mu t); the form below never overflows
        x = 2.0 * mu * t
        if x >= 0:
            w = 1.0 / (1.0 + math.exp(-x))
        else:
            e = math.exp(x)
            w = e / (1.0 + e)
        return math.exp(-0.5 * (t + mu) ** 2) * w

    value = _quad(integrand, -r, r, spec, points=[0.0])
    return min(1.0, max(0.0, 2.0 / (_SQRT_2PI * p_mu) * value))


def representation_bound_terms(b):
    """The three pieces of the representation-setting epsilon.

    Returns ``(generalization, inverse_k, inverse_sqrt_k)``.
    """
    dc = b.diam * b.c_eta
    gen = (2.0 + dc) ** 2 * math.sqrt(math.log(1.0 / b.delta) / (2.0 * b.n))
    return gen, dc * dc / b.k, 4.0 * dc / math.sqrt(b.k)


def representation_bound(b):
    """Epsilon such that minimal empirical minus minimal true loss <= epsilon w.p. 1 - delta."""
    gen, inv_k, inv_sqrt_k = representation_bound_terms(b)
    return gen + inv_k + inv_sqrt_k


def mixture_bound(mu, delta, n, k):
    """Epsilon written directly for the mixture with support [-3, 3]."""
    mu = abs(mu)
    return (
        2.0 * (1.0 + 3.0 * mu) ** 2 * math.sqrt(2.0 * math.log(1.0 / delta) / n)
        + 36.0 * mu * mu / k
        + 24.0 * mu / math.sqrt(k)
    )


def classification_sq_bound(delta, n):
    """Squared-loss epsilon for a finite alphabet: ``2 sqrt(2 log(1/delta) / n)``."""
    _check_delta(delta)
    if n < 1:
        raise ValueError("n must be positive")
    return 2.0 * math.sqrt(2.0 * math.log(1.0 / delta) / n)


def binary_entropy(x):
    """Binary entropy in nats with ``0 log 0 = 0``."""
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary_entropy needs x in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log(x) - (1.0 - x) * math.log1p(-x)


def weissman_radius(delta, n, d):
    """High-probability TV radius of the empirical joint pmf: ``sqrt((2d + log(1/delta)) / n)``."""
    _check_delta(delta)
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    return math.sqrt((2.0 * d + math.log(1.0 / delta)) / n)


def min_samples_log_bound(delta, d):
    """Smallest n admitted by the log-loss bound, ``ceil(4 (2d + log(1/delta)))``."""
    _check_delta(delta)
    return math.ceil(4.0 * (2.0 * d + math.log(1.0 / delta)))


def classification_log_bound(delta, n, d):
    """Log-loss epsilon for a finite alphabet of size ``d``."""
    min_n = min_samples_log_bound(delta, d)
    if n < min_n:
        raise SampleTooSmallError(
            f"sample too small: log-loss bound needs n >= {min_n} for d={d}, delta={delta}; got n={n}",
            min_n,
        )
    return binary_entropy(weissman_radius(delta, n, d))


def alhejji_smith_gap(theta, alphabet_size):
    """Continuity modulus of conditional entropy in total variation.

    ``theta * log(|U| - 1) + h_b(theta)`` for ``theta`` in ``[0, 1 - 1/|U|]``.
    """
    if alphabet_size < 2:
        raise ValueError("alphabet_size must be at least 2")
    upper = 1.0 - 1.0 / alphabet_size
    if not 0.0 <= theta <= upper:
        raise ValueError(f"theta must lie in [0, {upper}], got {theta}")
    return theta * math.log(alphabet_size - 1) + binary_entropy(theta)
