"""Shannon and generalized information metrics expressed as probabilities.

Entropy, divergence and cross-entropy are translated to the probability
scale with ``exp(-H)``. The generalized (Renyi/Tsallis-type) entropies
translate to weighted power means of the distribution.

Products of the form ``prod(p_i ** w_i)`` are evaluated in the log domain
so long vectors do not underflow. Exact zeros are never floored: a power
mean with ``r <= 0`` and a zero entry carrying weight is exactly 0.
"""

from __future__ import annotations

import math
import warnings
from typing import NamedTuple

import numpy as np

from .coupled_core import LIMIT_THRESHOLD, CouplingParams, risk_bias
from .errors import IdentityError, InputError, SupportMismatchWarning

__all__ = [
    "InfoTriple",
    "check_distribution",
    "check_weights",
    "info_triple",
    "divergence_prob",
    "cross_entropy_prob",
    "sigma_ln_p",
    "weighted_gen_mean",
    "coupled_probability",
    "dist_gen_mean",
    "generalized_aggregate",
    "distribution_aggregate_identity",
]

SUM_TOL = 1e-9


class InfoTriple(NamedTuple):
    """Entropy (nats), perplexity and average probability of a distribution."""

    entropy: float
    perplexity: float
    avg_probability: float


def check_distribution(p, name: str = "p") -> np.ndarray:
    """Validate a finite probability vector and return it as a float array."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise InputError(f"{name} must be a non-empty 1-D vector")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise InputError(f"{name} must contain finite non-negative values")
    if abs(p.sum() - 1.0) > SUM_TOL:
        raise InputError(f"{name} must sum to 1 (sum={p.sum()!r})")
    return p


check_weights = check_distribution


def _xlogx_sum(w, x):
    # sum w*log(x) over w > 0; 0*log(0) counts as 0
    m = w > 0
    return float(np.sum(w[m] * np.log(x[m])))


def info_triple(p) -> InfoTriple:
    """Entropy, perplexity and average probability ``prod(p_i ** p_i)``.

    >>> info_triple([0.25] * 4).perplexity
    4.0
    """
    p = check_distribution(p)
    h = -_xlogx_sum(p, p)
    h = 0.0 if h == 0 else h
    return InfoTriple(h, math.exp(h), math.exp(-h))


def divergence_prob(p, q) -> float:
    """Probability-scale divergence ``prod((q_i / p_i) ** p_i) = exp(-KL(p||q))``.

    At most 1, with equality iff ``p == q`` on the support of ``p``. If
    ``q_i == 0`` where ``p_i > 0`` the divergence is infinite and 0 is
    returned with a :class:`SupportMismatchWarning`.
    """
    p = check_distribution(p)
    q = check_distribution(q, "q")
    if p.shape != q.shape:
        raise InputError("p and q must have equal length")
    m = p > 0
    if np.any(q[m] == 0):
        warnings.warn("q assigns zero probability inside the support of p",
                      SupportMismatchWarning, stacklevel=2)
        return 0.0
    return math.exp(float(np.sum(p[m] * (np.log(q[m]) - np.log(p[m])))))


def cross_entropy_prob(p, q) -> float:
    """Probability-scale cross-entropy ``prod(q_i ** p_i)``."""
    p = check_distribution(p)
    q = check_distribution(q, "q")
    if p.shape != q.shape:
        raise InputError("p and q must have equal length")
    m = p > 0
    if np.any(q[m] == 0):
        return 0.0
    return math.exp(_xlogx_sum(p, q))


def sigma_ln_p(p) -> float:
    """Standard deviation of the surprisal ``-ln p_i`` under ``p``."""
    p = check_distribution(p)
    m = p > 0
    s = -np.log(p[m])
    h = float(np.sum(p[m] * s))
    # centred form; avoids cancellation of E[s^2] - E[s]^2
    return math.sqrt(float(np.sum(p[m] * (s - h) ** 2)))


def _logsumexp(a, b=None):
    """``log(sum(b * exp(a)))`` for 1-D arrays; scipy's version is slow on small inputs."""
    top = float(np.max(a))
    e = np.exp(a - top)
    return top + math.log(float(np.sum(e if b is None else b * e)))


def _power_mean(w, x, r):
    """Weighted power mean over entries with positive weight; no validation."""
    m = w > 0
    w, x = w[m], x[m]
    wsum = float(np.sum(w))
    if x.min() == x.max():
        return float(x[0])
    if np.any(x == 0):
        if r <= 0:
            return 0.0
        keep = x > 0
        if not np.any(keep):
            return 0.0
        w, x = w[keep], x[keep]  # zeros add nothing to sum(w * x**r) for r > 0
    if r == 1.0:
        return float(np.dot(w, x)) / wsum
    lx = np.log(x)
    if abs(r) < LIMIT_THRESHOLD:
        return math.exp(float(np.dot(w, lx)) / wsum)
    t = r * lx
    if np.max(np.abs(t)) < 0.5:
        # near r = 0 the 1/r amplifies rounding; expm1/log1p keep it relative
        dev = (float(np.sum(w)) - wsum) + float(np.dot(w, np.expm1(t)))
        return math.exp(math.log1p(dev / wsum) / r)
    return math.exp((_logsumexp(t, w) - math.log(wsum)) / r)


def weighted_gen_mean(w, p, r: float) -> float:
    """Weighted generalized mean ``(sum(w_i * p_i ** r)) ** (1 / r)``.

    ``r = 0`` gives the weighted geometric mean. Non-decreasing in ``r`` and
    bounded by the extreme values of ``p``.

    Parameters
    ----------
    w : array_like
        Weights, non-negative and summing to one.
    p : array_like
        Non-negative values, same length as ``w``.
    r : float
        Power of the mean (risk bias). Any real value is accepted.
    """
    w = check_weights(w, "w")
    p = np.asarray(p, dtype=float)
    if p.shape != w.shape:
        raise InputError("w and p must have equal length")
    if not np.all(np.isfinite(p)) or np.any(p < 0):
        raise InputError("p must contain finite non-negative values")
    return _power_mean(w, p, float(r))


def coupled_probability(p, r: float) -> np.ndarray:
    """Coupled probability ``p_i ** (1 - r) / sum_j p_j ** (1 - r)``.

    Zero-probability states always receive weight 0. When ``1 - r <= 0``
    their power would be undefined or infinite, so they are excluded from
    the support and a :class:`SupportMismatchWarning` is issued.
    """
    p = check_distribution(p)
    m = p > 0
    if not np.all(m) and 1.0 - r <= 0:
        warnings.warn("zero-probability states excluded from the coupled support",
                      SupportMismatchWarning, stacklevel=2)
    out = np.zeros_like(p)
    lw = (1.0 - r) * np.log(p[m])
    out[m] = np.exp(lw - _logsumexp(lw))
    return out


def dist_gen_mean(p, r: float) -> float:
    """Generalized mean of a distribution weighted by its coupled probability.

    Evaluates the closed form ``(sum p_i ** (1 - r)) ** (-1 / r)``, which
    equals ``weighted_gen_mean(p, p, -r)``; ``r = 0`` gives
    ``prod(p_i ** p_i)``, the average probability.
    """
    p = check_distribution(p)
    lp = np.log(p[p > 0])
    if abs(r) < LIMIT_THRESHOLD:
        return math.exp(float(np.dot(p[p > 0], lp)))
    return math.exp(-_logsumexp((1.0 - r) * lp) / r)


def generalized_aggregate(w, p, params: CouplingParams) -> float:
    """Aggregate probabilities through the coupled log/exp sandwich.

    Computes ``exp_{kappa,d}^{-1/alpha}(sum w_i ln_{kappa,d} p_i^{-alpha})``
    term by term, with ``ln_{kappa,d} x^{-alpha} = (x**s - 1) / kappa`` and
    ``exp_{kappa,d}^{-1/alpha}(y) = (1 + kappa*y) ** (1/s)``, where
    ``s = -alpha*kappa / (1 + d*kappa)``. Algebraically this collapses to
    ``weighted_gen_mean(w, p, s)``; computing the sandwich explicitly lets
    callers check the collapse.
    """
    w = check_weights(w, "w")
    p = np.asarray(p, dtype=float)
    if p.shape != w.shape or np.any(p < 0):
        raise InputError("p must be non-negative with the same length as w")
    kappa = params.kappa
    s = risk_bias(params)
    m = w > 0
    w, p = w[m], p[m]
    if abs(kappa) < LIMIT_THRESHOLD or abs(s) < LIMIT_THRESHOLD:
        if np.any(p == 0):
            return 0.0
        return math.exp(float(np.dot(w, np.log(p))))
    with np.errstate(divide="ignore", over="ignore"):
        info = np.sum(w * (p ** s - 1.0)) / kappa
        base = 1.0 + kappa * info
    if not np.isfinite(base):
        return 0.0  # s < 0 with a zero entry
    if base <= 0:
        return 0.0
    return float(base ** (1.0 / s))


def distribution_aggregate_identity(p, params: CouplingParams, rtol: float = 1e-9) -> float:
    """Aggregate a distribution with its own coupled probabilities as weights.

    Evaluates ``(sum p_i ** (1 + t)) ** (1 / t)`` with
    ``t = alpha*kappa / (1 + d*kappa) = -r`` and checks it against
    :func:`dist_gen_mean` at ``r = risk_bias(params)``.

    Raises
    ------
    IdentityError
        If the two routes differ by more than ``rtol`` (relative).
    """
    p = check_distribution(p)
    t = -risk_bias(params)
    pos = p[p > 0]
    if abs(t) < LIMIT_THRESHOLD:
        value = float(np.prod(pos ** pos))
    else:
        value = float(np.sum(pos ** (1.0 + t)) ** (1.0 / t))
    other = dist_gen_mean(p, -t)
    if not math.isclose(value, other, rel_tol=rtol, abs_tol=0.0):
        raise IdentityError(f"aggregate {value!r} != dist_gen_mean {other!r}")
    return value
