"""Least-squares recovery of model constants from census data.

All fits are ordinary least squares on transformed coordinates (ln x,
ln v, arcosh v), which keeps them deterministic and solver-free.  Sums
use math.fsum so half-million-point regressions stay stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import acosh, exp, fsum, log
from typing import Iterable, Tuple

from .errors import DomainError, SingularDesignError


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    n_points: int
    domain: Tuple[float, float]  # (x_min, x_max) of the input x values


def _ols(ts, vs, xs) -> FitResult:
    n = len(ts)
    if n < 2:
        raise SingularDesignError(f"need at least 2 points, got {n}")
    t_mean = fsum(ts) / n
    v_mean = fsum(vs) / n
    sxx = fsum((t - t_mean) ** 2 for t in ts)
    if sxx == 0.0:
        raise SingularDesignError("all regressors equal; design is singular")
    sxy = fsum((t - t_mean) * (v - v_mean) for t, v in zip(ts, vs))
    slope = sxy / sxx
    intercept = v_mean - slope * t_mean
    ss_res = fsum((v - (slope * t + intercept)) ** 2 for t, v in zip(ts, vs))
    ss_tot = fsum((v - v_mean) ** 2 for v in vs)
    r_squared = 1.0 if ss_tot == 0.0 else max(0.0, min(1.0, 1.0 - ss_res / ss_tot))
    return FitResult(
        slope=slope,
        intercept=intercept,
        r_squared=r_squared,
        n_points=n,
        domain=(min(xs), max(xs)),
    )


def _split(points: Iterable) -> Tuple[list, list]:
    xs, vs = [], []
    for x, v in points:
        xs.append(float(x))
        vs.append(float(v))
    return xs, vs


def fit_log_linear(points: Iterable) -> FitResult:
    """OLS of v on ln(x).  Recovers the ratio-curve pair (k_slope, k_intercept)."""
    xs, vs = _split(points)
    if any(x < 2 for x in xs):
        raise DomainError("log-linear fit needs x >= 2")
    return _ols([log(x) for x in xs], vs, xs)


def fit_line(points: Iterable) -> FitResult:
    """OLS of v on x.  Recovers the difference-line pair (slope, intercept)."""
    xs, vs = _split(points)
    return _ols(xs, vs, xs)


def fit_power(points: Iterable) -> FitResult:
    """OLS of ln(v) on ln(x): slope is the exponent b, intercept is ln(a)."""
    xs, vs = _split(points)
    if any(x < 2 for x in xs):
        raise DomainError("power fit needs x >= 2")
    if any(v <= 0 for v in vs):
        raise DomainError("power fit needs positive values")
    return _ols([log(x) for x in xs], [log(v) for v in vs], xs)


def fit_hyperbolic_z(points: Iterable) -> FitResult:
    """OLS of arcosh(count) on ln(x): recovers (z_slope, z_intercept)."""
    xs, vs = _split(points)
    if any(x < 2 for x in xs):
        raise DomainError("hyperbolic fit needs x >= 2")
    if any(v < 1 for v in vs):
        raise DomainError("arcosh undefined for counts below 1")
    return _ols([log(x) for x in xs], [acosh(v) for v in vs], xs)


def power_coefficient(fit: FitResult) -> float:
    """The multiplier a recovered by fit_power (slope holds the exponent b)."""
    return exp(fit.intercept)
