"""Slope-heuristic estimation of the noise variance.

For k past the signal, ``-RSS(k)`` along the soft path grows roughly linearly
in k with slope ``alpha(n) * sigma^2``. Fitting that slope over a window of
large k and dividing by ``alpha`` gives ``sigma2_hat``, which can then stand
in for the unknown variance in Mallows' Cp.

At rank fraction ``u = k/n`` the expected local slope in pure noise is
``u / f(Q^{-1}(u))`` (``f`` the chi-square(1) density, ``Q`` its tail),
between about 1.33 and 1.68 on the default window ``u in [0.05, 0.3]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .core import Sample, SeedSpec, abs_order_statistics, derive_stream, replica_map
from .criteria import PenaltySpec, soft_rss_curve
from .selection import SelectionResult, select_k

DEFAULT_ALPHA = 1.5
DEFAULT_WINDOW = (0.05, 0.3)

SLOPE_CSV_HEADER = ("n", "k_lo", "k_hi", "slope", "intercept", "alpha", "sigma2_hat")


class DegenerateVarianceError(ArithmeticError):
    """The slope heuristic produced ``sigma2_hat == 0``."""


@dataclass(frozen=True)
class SlopeFit:
    n: int
    slope: float
    intercept: float
    window: Tuple[int, int]
    alpha: Optional[float] = None
    sigma2_hat: Optional[float] = None

    def to_row(self) -> tuple:
        return (
            self.n,
            self.window[0],
            self.window[1],
            self.slope,
            self.intercept,
            self.alpha,
            self.sigma2_hat,
        )


def rss_curve(sample: Sample) -> np.ndarray:
    """Soft-path ``RSS(k)`` for ``k = 0..n``."""
    return soft_rss_curve(abs_order_statistics(sample))


def rss_curve_direct(sample: Sample) -> np.ndarray:
    """O(n^2) reference for :func:`rss_curve`."""
    a = np.abs(sample.values)
    levels = np.append(np.sort(a)[::-1], 0.0)
    return np.array([np.sum(np.minimum(a, t) ** 2) for t in levels])


def window_from_fractions(n: int, window_frac: Tuple[float, float]) -> Tuple[int, int]:
    f_lo, f_hi = window_frac
    if not 0 < f_lo < f_hi <= 1:
        raise ValueError(f"window fractions must satisfy 0 < lo < hi <= 1, got {window_frac!r}")
    return math.ceil(f_lo * n), math.floor(f_hi * n)


def fit_slope(curve, window: Tuple[int, int]) -> SlopeFit:
    """Least-squares line through ``(k, -curve[k])`` for ``k_lo <= k <= k_hi``."""
    curve = np.asarray(curve, dtype=float)
    n = curve.size - 1
    k_lo, k_hi = int(window[0]), int(window[1])
    if not (0 <= k_lo and k_hi <= n and k_hi - k_lo >= 2):
        raise ValueError(f"window {window!r} needs at least 3 points inside 0..{n}")
    k = np.arange(k_lo, k_hi + 1, dtype=float)
    v = -curve[k_lo : k_hi + 1]
    kc = k - k.mean()
    vbar = v.mean()
    slope = float(np.dot(kc, v - vbar) / np.dot(kc, kc))
    intercept = float(vbar - slope * k.mean())
    return SlopeFit(n=n, slope=slope, intercept=intercept, window=(k_lo, k_hi))


def calibrate_alpha(
    n: int,
    replicas: int,
    window_frac: Tuple[float, float] = DEFAULT_WINDOW,
    seed: SeedSpec = SeedSpec(0),
    threads: int = 1,
) -> float:
    """Monte Carlo mean slope on standard normal noise, i.e. ``alpha_hat(n)``."""
    if n < 32:
        raise ValueError("calibration needs n >= 32")
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    window = window_from_fractions(n, window_frac)

    def one(r):
        z = derive_stream(seed, r).generator().standard_normal(n)
        return fit_slope(rss_curve(Sample(z)), window).slope

    return float(np.mean(replica_map(one, replicas, threads)))


def estimate_sigma2(
    sample: Sample,
    alpha: float = DEFAULT_ALPHA,
    window_frac: Tuple[float, float] = DEFAULT_WINDOW,
) -> SlopeFit:
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    fit = fit_slope(rss_curve(sample), window_from_fractions(sample.n, window_frac))
    return SlopeFit(
        n=fit.n,
        slope=fit.slope,
        intercept=fit.intercept,
        window=fit.window,
        alpha=float(alpha),
        sigma2_hat=max(fit.slope / alpha, 0.0),
    )


def data_driven_cp_select(
    sample: Sample,
    alpha: float = DEFAULT_ALPHA,
    window_frac: Tuple[float, float] = DEFAULT_WINDOW,
) -> SelectionResult:
    """Mallows' Cp with ``sigma2_hat`` from the slope heuristic in place of sigma^2.

    The estimate is available afterwards as ``result.curve.sigma2_used``.
    """
    fit = estimate_sigma2(sample, alpha, window_frac)
    if not fit.sigma2_hat > 0:
        raise DegenerateVarianceError(
            f"slope heuristic gave sigma2_hat = 0 (slope {fit.slope!r} on window {fit.window})"
        )
    return select_k(sample, fit.sigma2_hat, PenaltySpec.mallows_cp())
