"""Coupled Gaussian and coupled exponential distributions.

The coupled Gaussian with tail parameter ``r_D`` is

    f(x) = (1/Z) * (1 - (r_D / (2 + r_D)) * ((x - mu) / sigma)**2)_+ ** (1 / r_D)

For ``-2 < r_D < 0`` it is a reparameterized Student-t with
``nu = -2/r_D - d`` degrees of freedom (``kappa = 1/nu`` in one dimension),
``r_D = 0`` is the Gaussian and ``r_D > 0`` has compact support. The
normalization ``Z`` is closed form (Beta functions); the quadrature
routines here serve as oracles for it and for the average-uncertainty
identities.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, stats
from scipy.special import betaln, gammaln

from .coupled_core import (
    LIMIT_THRESHOLD,
    coupled_exp,
    gen_exp,
    gen_log,
    kappa_from_risk,
)
from .errors import DivergentIntegralError, InputError, ParameterError

__all__ = [
    "CoupledGaussian1D",
    "CoupledExponential1D",
    "MultivariateCoupledGaussian",
    "IdentityRow",
    "IdentityReport",
    "cg_normalization",
    "log_normalization",
    "cg_pdf",
    "cg_cdf",
    "ce_pdf",
    "mcg_pdf",
    "mcg_logpdf",
    "cg_sample",
    "density_avg",
    "density_gen_mean",
    "coupled_avg_identities",
]

logger = logging.getLogger(__name__)

QUAD_EPSREL = 1e-10
QUAD_EPSABS = 1e-13
DIVERGENCE_LIMIT = 1e12


@dataclass(frozen=True)
class CoupledGaussian1D:
    """Univariate coupled Gaussian; ``r_D > -2``."""

    mu: float = 0.0
    sigma: float = 1.0
    r_D: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ParameterError(f"sigma must be positive, got {self.sigma!r}")
        if not self.r_D > -2:
            raise ParameterError(f"r_D must exceed -2, got {self.r_D!r}")

    @property
    def support(self) -> tuple[float, float]:
        if self.r_D > LIMIT_THRESHOLD:
            a = self.sigma * math.sqrt((2.0 + self.r_D) / self.r_D)
            return (self.mu - a, self.mu + a)
        return (-math.inf, math.inf)


@dataclass(frozen=True)
class CoupledExponential1D:
    """Coupled exponential ``(1/sigma) * gen_exp(-(x - mu)/sigma, r_D)`` on ``x >= mu``.

    Normalized for every ``r_D > -1``; compact support when ``r_D > 0``.
    """

    mu: float = 0.0
    sigma: float = 1.0
    r_D: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ParameterError(f"sigma must be positive, got {self.sigma!r}")
        if not self.r_D > -1:
            raise ParameterError(f"r_D must exceed -1, got {self.r_D!r}")

    @property
    def support(self) -> tuple[float, float]:
        if self.r_D > LIMIT_THRESHOLD:
            return (self.mu, self.mu + self.sigma * (1.0 + self.r_D) / self.r_D)
        return (self.mu, math.inf)


@dataclass(frozen=True)
class MultivariateCoupledGaussian:
    """Multivariate coupled Gaussian with generalized correlation matrix ``Sigma``.

    The density exponent uses ``r_d = -2*kappa / (1 + d*kappa)``. Use
    :meth:`from_r` to build one from ``r_d`` directly.
    """

    mu: np.ndarray
    Sigma: np.ndarray
    kappa: float = 0.0
    _chol: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        S = np.atleast_2d(np.asarray(self.Sigma, dtype=float))
        d = mu.size
        if mu.ndim != 1 or S.shape != (d, d):
            raise ParameterError("mu must be length d and Sigma d x d")
        if not np.allclose(S, S.T, rtol=1e-12, atol=0.0):
            raise ParameterError("Sigma must be symmetric")
        try:
            L = np.linalg.cholesky(S)
        except np.linalg.LinAlgError:
            raise ParameterError("Sigma must be positive definite") from None
        if not 1.0 + d * self.kappa > 0:
            raise ParameterError("1 + d*kappa must be positive")
        if self.r_d < 0 and not -2.0 / self.r_d > d:
            # (1 + c Q)^(1/r) is integrable in d dims only when -2/r > d
            raise ParameterError(f"r_d={self.r_d!r} is not normalizable in {d} dimensions")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "Sigma", S)
        object.__setattr__(self, "_chol", L)

    @classmethod
    def from_r(cls, mu, Sigma, r_d: float) -> "MultivariateCoupledGaussian":
        d = np.atleast_1d(np.asarray(mu)).size
        return cls(mu, Sigma, kappa_from_risk(r_d, 2.0, d))

    @property
    def d(self) -> int:
        return self.mu.size

    @property
    def r_d(self) -> float:
        r = -2.0 * self.kappa / (1.0 + self.d * self.kappa)
        return 0.0 if r == 0 else r

    @property
    def log_det(self) -> float:
        return 2.0 * float(np.sum(np.log(np.diag(self._chol))))


def _log_unit_normalization(r: float, d: int) -> float:
    """log of the integral of the unit kernel over R^d (Sigma = I)."""
    if abs(r) < LIMIT_THRESHOLD:
        return 0.5 * d * math.log(2.0 * math.pi)
    half_d = 0.5 * d
    if r > 0:
        c = r / (2.0 + r)
        p = 1.0 / r
        # pi^(d/2) Gamma(p+1) / Gamma(p+1+d/2) = pi^(d/2) B(d/2, p+1) / Gamma(d/2)
        return (-half_d * math.log(c) + half_d * math.log(math.pi)
                + betaln(half_d, p + 1.0) - gammaln(half_d))
    c = -r / (2.0 + r)
    p = -1.0 / r
    if not p > half_d:
        raise ParameterError(f"r={r!r} is not normalizable in {d} dimensions")
    # pi^(d/2) Gamma(p-d/2) / Gamma(p) = pi^(d/2) B(d/2, p-d/2) / Gamma(d/2)
    return (-half_d * math.log(c) + half_d * math.log(math.pi)
            + betaln(half_d, p - half_d) - gammaln(half_d))


def log_normalization(r: float, d: int, log_det: float) -> float:
    """log Z for the d-dimensional coupled Gaussian with ``log|Sigma| = log_det``."""
    if not r > -2:
        raise ParameterError(f"r must exceed -2, got {r!r}")
    return _log_unit_normalization(r, d) + 0.5 * log_det


def cg_normalization(r_D: float, sigma: float = 1.0) -> float:
    """Normalization ``Z(r_D, sigma)`` of the univariate coupled Gaussian."""
    if not r_D > -2:
        raise ParameterError(f"r_D must exceed -2, got {r_D!r}")
    if not sigma > 0:
        raise ParameterError(f"sigma must be positive, got {sigma!r}")
    return math.exp(_log_unit_normalization(r_D, 1)) * sigma


def _log_kernel(q, r):
    """log of (1 - (r/(2+r)) q)_+^(1/r) for squared standardized distance q."""
    if abs(r) < LIMIT_THRESHOLD:
        return -0.5 * q
    c = r / (2.0 + r)
    base = -c * q
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(base > -1.0, np.log1p(np.maximum(base, -1.0)) / r, -np.inf)


def cg_pdf(dist: CoupledGaussian1D, x):
    """Density of a univariate coupled Gaussian, truncated outside the support."""
    x = np.asarray(x, dtype=float)
    q = ((x - dist.mu) / dist.sigma) ** 2
    out = np.exp(_log_kernel(q, dist.r_D) - _log_unit_normalization(dist.r_D, 1)) / dist.sigma
    return float(out) if out.ndim == 0 else out


def _t_params(r, d=1):
    # (1 + c' q)^(-p) == t kernel with nu dof and scale^2 = 1/(c' nu)
    nu = -2.0 / r - d
    c = -r / (2.0 + r)
    return nu, 1.0 / math.sqrt(c * nu)


def cg_cdf(dist: CoupledGaussian1D, x):
    """Analytic CDF via the Student-t (heavy tail) or Beta (compact) equivalence."""
    z = (np.asarray(x, dtype=float) - dist.mu) / dist.sigma
    r = dist.r_D
    if abs(r) < LIMIT_THRESHOLD:
        out = stats.norm.cdf(z)
    elif r < 0:
        nu, s = _t_params(r)
        out = stats.t.cdf(z / s, nu)
    else:
        a = math.sqrt((2.0 + r) / r)
        p = 1.0 / r
        out = stats.beta.cdf((np.clip(z / a, -1.0, 1.0) + 1.0) / 2.0, p + 1.0, p + 1.0)
    return float(out) if np.ndim(out) == 0 else out


def ce_pdf(dist: CoupledExponential1D, x):
    """Density of the coupled exponential."""
    x = np.asarray(x, dtype=float)
    t = (x - dist.mu) / dist.sigma
    inside = t >= 0
    out = np.where(inside, gen_exp(np.where(inside, -t, 0.0), dist.r_D), 0.0) / dist.sigma
    return float(out) if out.ndim == 0 else out


def mcg_logpdf(dist: MultivariateCoupledGaussian, X):
    """Log density of a multivariate coupled Gaussian at rows of ``X``.

    Returns ``-inf`` outside a compact support.
    """
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    if X.shape[1] != dist.d:
        raise InputError(f"points must have {dist.d} coordinates, got {X.shape[1]}")
    diff = X - dist.mu
    L = dist._chol
    if np.count_nonzero(L - np.diag(np.diag(L))) == 0:
        z = diff / np.diag(L)
    else:
        from scipy.linalg import solve_triangular
        z = solve_triangular(L, diff.T, lower=True).T
    q = np.einsum("ij,ij->i", z, z)
    out = _log_kernel(q, dist.r_d) - log_normalization(dist.r_d, dist.d, dist.log_det)
    return float(out[0]) if single else out


def mcg_pdf(dist: MultivariateCoupledGaussian, X):
    """Density of a multivariate coupled Gaussian at a point or rows of ``X``."""
    return np.exp(mcg_logpdf(dist, X))


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _sample_standard(r, d, n, rng):
    """Samples of the coupled Gaussian with mu = 0, Sigma = I; returns (x, acceptance)."""
    if abs(r) < LIMIT_THRESHOLD:
        return rng.standard_normal((n, d)), 1.0
    if r < 0:
        nu, s = _t_params(r, d)
        z = rng.standard_normal((n, d))
        w = rng.chisquare(nu, size=n)
        return s * z * np.sqrt(nu / w)[:, None], 1.0
    # compact support: uniform proposals on the ellipsoid, accept with f / f_max
    a = math.sqrt((2.0 + r) / r)
    out = np.empty((n, d))
    filled = proposed = 0
    while filled < n:
        m = max(64, 2 * (n - filled))
        g = rng.standard_normal((m, d))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        u = g * rng.random(m)[:, None] ** (1.0 / d)
        q = np.einsum("ij,ij->i", u, u)
        keep = rng.random(m) < (1.0 - q) ** (1.0 / r)
        acc = u[keep][: n - filled]
        out[filled:filled + len(acc)] = acc
        filled += len(acc)
        proposed += m
    return a * out, n / proposed


def cg_sample(dist, n: int, seed=None, return_acceptance: bool = False):
    """Draw ``n`` samples from a univariate or multivariate coupled Gaussian.

    Heavy tails use the Student-t construction (Gaussian over an independent
    chi-square scale); compact support uses rejection against a uniform
    envelope on the support. Deterministic given ``seed`` (an integer or a
    ``numpy.random.Generator``).

    Returns an array of shape ``(n,)`` for :class:`CoupledGaussian1D` and
    ``(n, d)`` for :class:`MultivariateCoupledGaussian`; with
    ``return_acceptance`` also the rejection acceptance rate (1.0 when no
    rejection is used).
    """
    if n < 1:
        raise InputError("n must be at least 1")
    rng = _rng(seed)
    if isinstance(dist, CoupledGaussian1D):
        z, acc = _sample_standard(dist.r_D, 1, n, rng)
        x = dist.mu + dist.sigma * z[:, 0]
    elif isinstance(dist, MultivariateCoupledGaussian):
        z, acc = _sample_standard(dist.r_d, dist.d, n, rng)
        x = dist.mu + z @ dist._chol.T
    else:
        raise TypeError(f"cannot sample from {type(dist).__name__}")
    logger.debug("cg_sample: n=%d acceptance=%.4f", n, acc)
    return (x, acc) if return_acceptance else x


def _quad(f, a, b, points=()):
    """Adaptive quadrature over [a, b], splitting at finite interior points."""
    edges = [a, *sorted(p for p in points if a < p < b), b]
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = integrate.quad(f, lo, hi, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=500)
        total += val
    return total


def density_avg(f, support=(-math.inf, math.inf), center: float | None = None) -> float:
    """Average density ``exp(-integral f ln f)`` of a normalized density.

    Parameters
    ----------
    f : callable
        Density evaluated at scalar points.
    support : tuple of float
        Integration interval; infinite ends are allowed.
    center : float, optional
        Interior point to split the integral at (e.g. the mode).

    Raises
    ------
    InputError
        If ``f`` does not integrate to 1 within 1e-6.
    """
    a, b = support
    if center is None:
        center = 0.0 if a < 0 < b else (a + b) / 2 if math.isfinite(a + b) else None
    pts = () if center is None else (center,)
    mass = _quad(f, a, b, pts)
    if abs(mass - 1.0) > 1e-6:
        raise InputError(f"density integrates to {mass!r}, not 1")

    def neg_flogf(x):
        v = f(x)
        return -v * math.log(v) if v > 0 else 0.0

    return math.exp(-_quad(neg_flogf, a, b, pts))


def _power_integral(dist, power):
    """Integral of f**power over the support of f, with a divergence check."""
    lo, hi = dist.support
    if isinstance(dist, CoupledGaussian1D):
        pdf = cg_pdf
    else:
        pdf = ce_pdf

    def g(x):
        v = pdf(dist, x)
        return v ** power if v > 0 else 0.0

    if math.isfinite(lo) and math.isfinite(hi):
        val, _ = integrate.quad(g, lo, hi, points=[dist.mu] if lo < dist.mu < hi else None,
                                epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=500)
        if not math.isfinite(val) or val > DIVERGENCE_LIMIT:
            raise DivergentIntegralError("integral diverges at the support edge")
        return val
    # infinite tails: integrate decade shells so partial sums can be checked
    radii = dist.sigma * 10.0 ** np.arange(0, 9)
    edges = np.concatenate([-radii[::-1], [0.0], radii]) + dist.mu
    edges = edges[(edges >= lo) & (edges <= hi)]
    if lo < edges[0] and lo > -math.inf:
        edges = np.concatenate([[lo], edges])
    shells = [_quad(g, a, b) for a, b in zip(edges[:-1], edges[1:])]
    reach = np.maximum(np.abs(edges[:-1] - dist.mu), np.abs(edges[1:] - dist.mu))
    partial = [sum(v for v, w in zip(shells, reach) if w <= dist.sigma * 10.0 ** k * (1 + 1e-12))
               for k in (2, 4, 6, 8)]
    if partial[-1] > DIVERGENCE_LIMIT or partial[-1] - partial[-2] > 1e-6 * partial[-2]:
        raise DivergentIntegralError("partial integrals keep growing")
    tail = _quad(g, edges[-1], hi)
    if lo == -math.inf:
        tail += _quad(g, lo, edges[0])
    return partial[-1] + tail


def density_gen_mean(dist, r: float) -> float:
    """Generalized mean ``(integral f**(1 - r) dx) ** (-1 / r)`` of a density.

    Continuous analogue of :func:`~riskprofile.prob_metrics.dist_gen_mean`.
    ``r = 0`` gives the average density. At ``r = r_D`` the result equals
    the density one scale unit from the centre.

    Raises
    ------
    DivergentIntegralError
        If the integral does not converge (heavy tails with small ``1 - r``).
    """
    if abs(r) < LIMIT_THRESHOLD:
        pdf = cg_pdf if isinstance(dist, CoupledGaussian1D) else ce_pdf
        return density_avg(lambda x: pdf(dist, x), dist.support, dist.mu)
    return _power_integral(dist, 1.0 - r) ** (-1.0 / r)


@dataclass(frozen=True)
class IdentityRow:
    family: str
    r_D: float
    sigma: float
    lhs: float
    rhs: float
    rel_dev: float
    flagged: bool = False


@dataclass(frozen=True)
class IdentityReport:
    rows: tuple[IdentityRow, ...]

    @property
    def max_rel_dev(self) -> float:
        devs = [row.rel_dev for row in self.rows if not row.flagged]
        return max(devs) if devs else math.nan

    @property
    def any_flagged(self) -> bool:
        return any(row.flagged for row in self.rows)


EXP_GRID = (-0.5, -0.25, 0.0, 0.25, 0.5, 1.0)
GAUSS_GRID = (-0.9, -2.0 / 3.0, -0.5, -0.15, 0.0, 0.6, 1.0)
SIGMA_GRID = (0.5, 1.0, 2.0)


def _sandwich_average(dist, pdf, r):
    """gen_exp of the coupled-probability-weighted mean of gen_log(f), by quadrature."""
    lo, hi = dist.support
    pts = (dist.mu,) if lo < dist.mu < hi else ()
    if abs(r) < LIMIT_THRESHOLD:
        return density_avg(lambda x: pdf(dist, x), (lo, hi), dist.mu if pts else None)

    def weight(x):
        v = pdf(dist, x)
        return v ** (1.0 - r) if v > 0 else 0.0

    def weighted_log(x):
        v = pdf(dist, x)
        return v ** (1.0 - r) * gen_log(v, r) if v > 0 else 0.0

    norm = _quad(weight, lo, hi, pts)
    info = _quad(weighted_log, lo, hi, pts) / norm
    return gen_exp(info, r)


def coupled_avg_identities(exp_grid=EXP_GRID, gauss_grid=GAUSS_GRID,
                           sigma_grid=SIGMA_GRID) -> IdentityReport:
    """Check that the generalized average uncertainty is the density at mu + sigma.

    For each grid point the left side is computed by quadrature as
    ``gen_exp(E_w[gen_log(f)], r)`` with coupled-probability weights
    ``w ~ f**(1 - r)``. The right side is closed form through the coupled
    exponential: ``exp_kappa(1)**-1 / sigma`` for the coupled exponential
    (``kappa = -r/(1 + r)``) and ``exp_kappa(1)**-0.5 / Z`` for the coupled
    Gaussian (``kappa = -r/(2 + r)``).
    """
    rows = []
    for family, grid in (("exponential", exp_grid), ("gaussian", gauss_grid)):
        for r in grid:
            for sigma in sigma_grid:
                if family == "exponential":
                    dist = CoupledExponential1D(0.0, sigma, r)
                    pdf = ce_pdf
                    rhs = 1.0 / (coupled_exp(1.0, kappa_from_risk(r, 1.0, 1)) * sigma)
                else:
                    dist = CoupledGaussian1D(0.0, sigma, r)
                    pdf = cg_pdf
                    rhs = coupled_exp(1.0, kappa_from_risk(r, 2.0, 1)) ** -0.5 / cg_normalization(r, sigma)
                try:
                    lhs = _sandwich_average(dist, pdf, r)
                    flagged = not math.isfinite(lhs)
                except (DivergentIntegralError, InputError):
                    lhs, flagged = math.nan, True
                dev = abs(lhs - rhs) / abs(rhs) if not flagged else math.nan
                rows.append(IdentityRow(family, float(r), float(sigma), lhs, rhs, dev, flagged))
    return IdentityReport(tuple(rows))
