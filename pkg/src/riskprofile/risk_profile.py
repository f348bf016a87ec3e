"""Scoring forecasted probabilities of realized events with a Risk Profile.

A forecast set holds, for each test sample, the probability the forecaster
assigned to the outcome that actually occurred. These are samples, not a
distribution, so they need not sum to one and each sample carries weight
``1/N``.

The Risk Profile is the curve of unweighted power means of the forecast
set over a range of risk biases ``r``: ``r = 0`` (geometric mean) measures
accuracy, ``r = 1`` (arithmetic mean) decisiveness and ``r = -2/3`` (the
conjugate of 1) robustness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coupled_core import LIMIT_THRESHOLD, gen_log
from .errors import IdentityError, InputError
from .prob_metrics import _power_mean, coupled_probability

__all__ = [
    "DECISIVE_R",
    "NEUTRAL_R",
    "ROBUST_R",
    "NAMED_POINTS",
    "RiskProfileCurve",
    "MetricSummary",
    "check_forecasts",
    "surprisal",
    "generalized_surprisal",
    "profile_point",
    "metric_summary",
    "make_r_grid",
    "default_r_grid",
    "profile_curve",
    "equal_weight_reduction_check",
]

DECISIVE_R = 1.0
NEUTRAL_R = 0.0
ROBUST_R = -2.0 / 3.0
NAMED_POINTS = (ROBUST_R, NEUTRAL_R, DECISIVE_R)


def check_forecasts(fs, floor: float = 0.0) -> np.ndarray:
    """Validate a forecast set; optionally raise every entry to ``floor``.

    The floor is for exploratory use only and is off (0) by default.
    """
    fs = np.asarray(fs, dtype=float)
    if fs.ndim != 1 or fs.size == 0:
        raise InputError("forecast set must be a non-empty 1-D vector")
    if not np.all((fs >= 0) & (fs <= 1)):
        raise InputError("forecast probabilities must lie in [0, 1]")
    if floor:
        if not 0 < floor <= 1:
            raise InputError(f"floor must lie in (0, 1], got {floor!r}")
        fs = np.maximum(fs, floor)
    return fs


def surprisal(fs) -> float:
    """Mean negative log probability (nats); ``inf`` when any entry is 0."""
    fs = check_forecasts(fs)
    if np.any(fs == 0):
        return math.inf
    s = -float(np.mean(np.log(fs)))
    return 0.0 if s == 0 else s


def generalized_surprisal(fs, r: float) -> float:
    """Mean of ``-gen_log(p_i, r)``.

    A zero entry saturates the score to ``inf`` for ``r <= 0``; for
    ``r > 0`` it contributes the finite cost ``(1 + r) / r``.
    """
    fs = check_forecasts(fs)
    zero = fs == 0
    if np.any(zero):
        if r <= LIMIT_THRESHOLD:
            return math.inf
        cost = np.full(fs.shape, (1.0 + r) / r)
        cost[~zero] = -gen_log(fs[~zero], r)
    else:
        cost = -np.atleast_1d(gen_log(fs, r))
    s = float(np.mean(cost))
    return 0.0 if s == 0 else s


def profile_point(fs, r: float) -> float:
    """Unweighted power mean ``(mean(p_i ** r)) ** (1 / r)`` of a forecast set.

    Any ``r`` is accepted, including ``r <= -1``. A zero entry gives exactly
    0 for ``r <= 0``.
    """
    fs = check_forecasts(fs)
    return _power_mean(np.full(fs.size, 1.0 / fs.size), fs, float(r))


@dataclass(frozen=True)
class MetricSummary:
    """The three named Risk Profile points plus the zero count."""

    decisiveness: float
    accuracy: float
    robustness: float
    n_zero: int


def metric_summary(fs, floor: float = 0.0) -> MetricSummary:
    """Decisiveness (r=1), accuracy (r=0) and robustness (r=-2/3) of ``fs``."""
    fs = check_forecasts(fs, floor)
    w = np.full(fs.size, 1.0 / fs.size)
    return MetricSummary(
        decisiveness=_power_mean(w, fs, DECISIVE_R),
        accuracy=_power_mean(w, fs, NEUTRAL_R),
        robustness=_power_mean(w, fs, ROBUST_R),
        n_zero=int(np.count_nonzero(fs == 0)),
    )


@dataclass(frozen=True)
class RiskProfileCurve:
    """Risk Profile values at an increasing grid of risk biases."""

    r: np.ndarray
    values: np.ndarray

    def __iter__(self):
        return iter(zip(self.r.tolist(), self.values.tolist()))

    def __len__(self):
        return self.r.size

    def at(self, r: float) -> float:
        idx = np.flatnonzero(np.isclose(self.r, r, rtol=0.0, atol=1e-12))
        if idx.size == 0:
            raise KeyError(r)
        return float(self.values[idx[0]])


def make_r_grid(r_min: float = -1.0, r_max: float = 1.0, step: float = 0.1,
                named=NAMED_POINTS) -> np.ndarray:
    """Evenly spaced grid from ``r_min`` to ``r_max`` merged with ``named`` points.

    Grid values within 1e-9 of a named point are replaced by it, so the
    named points appear exactly.
    """
    if not r_min < r_max:
        raise InputError(f"r_min must be below r_max ({r_min!r} >= {r_max!r})")
    if not step > 0:
        raise InputError(f"step must be positive, got {step!r}")
    n = int(math.floor((r_max - r_min) / step + 1e-9))
    grid = r_min + step * np.arange(n + 1)
    grid = np.round(grid, 12)
    grid[grid == 0] = 0.0
    named = np.asarray(named, dtype=float)
    keep = np.all(np.abs(grid[:, None] - named[None, :]) > 1e-9, axis=1)
    return np.sort(np.concatenate([grid[keep], named]))


def default_r_grid() -> np.ndarray:
    """-1 to 1 in steps of 0.1, plus -2/3, 0 and 1 exactly."""
    return make_r_grid(-1.0, 1.0, 0.1)


def profile_curve(fs, r_grid=None, floor: float = 0.0) -> RiskProfileCurve:
    """Evaluate :func:`profile_point` over a strictly increasing ``r_grid``."""
    fs = check_forecasts(fs, floor)
    grid = default_r_grid() if r_grid is None else np.asarray(r_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise InputError("r_grid must be a strictly increasing 1-D sequence")
    w = np.full(fs.size, 1.0 / fs.size)
    values = np.array([_power_mean(w, fs, float(r)) for r in grid])
    return RiskProfileCurve(grid.copy(), values)


def equal_weight_reduction_check(n: int, r: float) -> np.ndarray:
    """Coupled probability of ``n`` equiprobable samples; verified to be uniform.

    This is why the Risk Profile can use unweighted means: coupling equal
    weights leaves them equal for every ``r``.
    """
    if n < 1:
        raise InputError("n must be at least 1")
    w = coupled_probability(np.full(n, 1.0 / n), r)
    if np.any(w != w[0]) or not math.isclose(w[0], 1.0 / n, rel_tol=4e-16):
        raise IdentityError(f"coupled equal weights are not uniform: {w!r}")
    return w
