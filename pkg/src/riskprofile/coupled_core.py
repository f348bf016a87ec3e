"""Deformed logarithm/exponential pairs and the coupling to risk-bias algebra.

Two families live here and are deliberately kept apart:

* ``gen_log`` / ``gen_exp`` use the risk bias ``r`` directly, with the
  ``(1 + r) / r`` prefactor that makes the generalized surprisal translate
  into the power mean of the forecasts.
* ``coupled_log`` / ``coupled_exp`` use the nonlinear coupling ``kappa``.

The mapping ``r = -alpha * kappa / (1 + d * kappa)`` connects them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError

__all__ = [
    "LIMIT_THRESHOLD",
    "CouplingParams",
    "gen_log",
    "gen_exp",
    "gen_exp_truncated",
    "coupled_log",
    "coupled_exp",
    "coupled_exp_truncated",
    "risk_bias",
    "kappa_from_risk",
    "dual_coupling",
    "conjugate_risk",
    "measured_risk_sensitivity",
]

# |r| or |kappa| below this switches to the log/exp limit.
LIMIT_THRESHOLD = 1e-8


@dataclass(frozen=True)
class CouplingParams:
    """Nonlinear coupling with the power and dimension of its argument.

    Parameters
    ----------
    kappa : float
        Nonlinear statistical coupling. Positive values give heavy tails,
        ``-1/d < kappa < 0`` gives compact support.
    alpha : float
        Power of the argument, 1 for exponential-type and 2 for
        Gaussian-type distributions.
    d : int
        Dimension of the random variable.
    """

    kappa: float
    alpha: float = 2.0
    d: int = 1

    def __post_init__(self):
        if self.d < 1 or int(self.d) != self.d:
            raise ParameterError(f"d must be a positive integer, got {self.d!r}")
        if not self.alpha > 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha!r}")
        if not 1.0 + self.d * self.kappa > 0:
            raise ParameterError(
                f"1 + d*kappa must be positive (kappa={self.kappa!r}, d={self.d})"
            )

    @property
    def r(self) -> float:
        return risk_bias(self)


def _check_r(r):
    if not r > -1.0:
        raise ParameterError(f"risk bias must exceed -1, got {r!r}")


def _scalar_or_array(out):
    if isinstance(out, np.ndarray) and out.ndim == 0:
        return float(out)
    return out


def gen_log(x, r: float):
    """Generalized logarithm ``((1 + r) / r) * (x**r - 1)``.

    Reduces to ``ln x`` as ``r -> 0``. Accepts scalars or arrays.

    Raises
    ------
    DomainError
        If any ``x <= 0``.
    ParameterError
        If ``r <= -1``.
    """
    _check_r(r)
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("gen_log requires x > 0")
    lx = np.log(x)
    if abs(r) < LIMIT_THRESHOLD:
        return _scalar_or_array(lx)
    return _scalar_or_array((1.0 + r) / r * np.expm1(r * lx))


def _gen_exp_base(x, r):
    return 1.0 + (r / (1.0 + r)) * np.asarray(x, dtype=float)


def gen_exp(x, r: float):
    """Generalized exponential ``(1 + (r / (1 + r)) * x) ** (1 / r)``.

    The inverse of :func:`gen_log`. A non-positive base yields exactly 0;
    use :func:`gen_exp_truncated` to detect that case.
    """
    _check_r(r)
    x = np.asarray(x, dtype=float)
    if abs(r) < LIMIT_THRESHOLD:
        return _scalar_or_array(np.exp(x))
    base = _gen_exp_base(x, r)
    pos = base > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(pos, np.exp(np.log1p(np.where(pos, base - 1.0, 0.0)) / r), 0.0)
    return _scalar_or_array(out)


def gen_exp_truncated(x, r: float):
    """True where :func:`gen_exp` hits the ``(.)_+`` truncation."""
    _check_r(r)
    if abs(r) < LIMIT_THRESHOLD:
        return _scalar_or_array(np.zeros(np.shape(x), dtype=bool))
    return _scalar_or_array(_gen_exp_base(x, r) <= 0)


def _check_kappa(kappa):
    if not 1.0 + kappa > 0:
        raise ParameterError(f"1 + kappa must be positive, got kappa={kappa!r}")


def coupled_log(x, kappa: float):
    """Coupled logarithm ``(x**(kappa / (1 + kappa)) - 1) / kappa``."""
    _check_kappa(kappa)
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("coupled_log requires x > 0")
    lx = np.log(x)
    if abs(kappa) < LIMIT_THRESHOLD:
        return _scalar_or_array(lx)
    return _scalar_or_array(np.expm1(kappa / (1.0 + kappa) * lx) / kappa)


def coupled_exp(x, kappa: float):
    """Coupled exponential ``(1 + kappa * x) ** ((1 + kappa) / kappa)``.

    Inverse of :func:`coupled_log`; a non-positive base yields exactly 0.
    """
    _check_kappa(kappa)
    x = np.asarray(x, dtype=float)
    if abs(kappa) < LIMIT_THRESHOLD:
        return _scalar_or_array(np.exp(x))
    kx = kappa * x
    pos = kx > -1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(pos, np.exp((1.0 + kappa) / kappa * np.log1p(np.where(pos, kx, 0.0))), 0.0)
    return _scalar_or_array(out)


def coupled_exp_truncated(x, kappa: float):
    """True where :func:`coupled_exp` hits the ``(.)_+`` truncation."""
    _check_kappa(kappa)
    if abs(kappa) < LIMIT_THRESHOLD:
        return _scalar_or_array(np.zeros(np.shape(x), dtype=bool))
    return _scalar_or_array(kappa * np.asarray(x, dtype=float) <= -1.0)


def risk_bias(params: CouplingParams) -> float:
    """Risk bias ``-alpha * kappa / (1 + d * kappa)`` of a coupling."""
    k, a, d = params.kappa, params.alpha, params.d
    if not 1.0 + d * k > 0:
        raise ParameterError("1 + d*kappa must be positive")
    r = -a * k / (1.0 + d * k)
    return 0.0 if r == 0 else r


def kappa_from_risk(r: float, alpha: float = 2.0, d: int = 1) -> float:
    """Invert :func:`risk_bias`: ``kappa = -r / (alpha + d * r)``."""
    denom = alpha + d * r
    if denom == 0:
        raise ParameterError(f"no coupling maps to r={r!r} for alpha={alpha!r}, d={d}")
    kappa = -r / denom
    if not 1.0 + d * kappa > 0:
        raise ParameterError(
            f"r={r!r} maps to kappa={kappa!r}, outside 1 + d*kappa > 0"
        )
    return 0.0 if kappa == 0 else kappa


def dual_coupling(kappa: float, d: int = 1) -> float:
    """Dual coupling ``-kappa / (1 + d * kappa)``; an involution."""
    if not 1.0 + d * kappa > 0:
        raise ParameterError("1 + d*kappa must be positive")
    k = -kappa / (1.0 + d * kappa)
    return 0.0 if k == 0 else k


def conjugate_risk(r: float, alpha: float = 2.0, d: int = 1) -> float:
    """Risk bias of the dual coupling, pairing decisiveness with robustness.

    ``conjugate_risk(1, 2, 1) == -2/3``.
    """
    kappa = kappa_from_risk(r, alpha, d)
    return risk_bias(CouplingParams(dual_coupling(kappa, d), alpha, d))


def measured_risk_sensitivity(p: float, r: float) -> float:
    """Relative risk sensitivity ``1 + p * f''(p) / f'(p)`` of ``f = gen_log(., r)``.

    Derivatives come from five-point central differences, so the result
    reproduces ``r`` to finite-difference accuracy. Exists as a
    self-consistency probe of :func:`gen_log`.
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p!r}")
    _check_r(r)
    h = 1e-3 * p
    f2m, f1m, f0, f1p, f2p = (gen_log(p + k * h, r) for k in (-2, -1, 0, 1, 2))
    d1 = (-f2p + 8.0 * f1p - 8.0 * f1m + f2m) / (12.0 * h)
    d2 = (-f2p + 16.0 * f1p - 30.0 * f0 + 16.0 * f1m - f2m) / (12.0 * h * h)
    return float(1.0 + p * d2 / d1)
