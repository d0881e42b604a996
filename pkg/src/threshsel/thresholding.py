"""Soft/hard thresholding, the k-indexed estimator paths and coordinate-wise penalized fits.

With an orthogonal design every penalized least-squares problem here splits
into independent scalar problems, one per coordinate of ``y``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import Sample, abs_order_statistics, threshold_level

GOLDEN_TOL = 1e-10
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class ThresholdKind(enum.Enum):
    SOFT = "soft"
    HARD = "hard"


class Loss(enum.Enum):
    QUADRATIC = "quadratic"
    ABSOLUTE_DEVIATION = "absolute_deviation"


@dataclass(frozen=True)
class ThresholdEstimate:
    values: np.ndarray
    k: int
    level: float
    kind: ThresholdKind

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.values)


@dataclass(frozen=True)
class PenalizedFitSpec:
    """Penalty weight ``lambda2`` (the objective carries ``2 * lambda2``), exponent and loss."""

    lambda2: float
    gamma: float = 1.0
    loss: Loss = Loss.QUADRATIC

    def __post_init__(self):
        if not self.lambda2 >= 0:
            raise ValueError(f"lambda2 must be >= 0, got {self.lambda2!r}")
        if not 0 < self.gamma <= 1:
            raise ValueError(f"gamma must lie in (0, 1], got {self.gamma!r}")


def soft_threshold(x, t):
    """``sign(x) * (|x| - t)`` where ``|x| > t``, else 0."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("threshold must be nonnegative")
    out = np.sign(x) * np.maximum(np.abs(x) - t, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def hard_threshold(x, t):
    """``x`` where ``|x| > t``, else 0 (so ``|x| == t`` maps to 0)."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("threshold must be nonnegative")
    out = np.where(np.abs(x) > t, x, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def _path(sample: Sample, k: int, kind: ThresholdKind) -> ThresholdEstimate:
    level = threshold_level(abs_order_statistics(sample), k)
    fn = soft_threshold if kind is ThresholdKind.SOFT else hard_threshold
    return ThresholdEstimate(values=fn(sample.values, level), k=k, level=level, kind=kind)


def soft_path_estimate(sample: Sample, k: int) -> ThresholdEstimate:
    return _path(sample, k, ThresholdKind.SOFT)


def hard_path_estimate(sample: Sample, k: int) -> ThresholdEstimate:
    return _path(sample, k, ThresholdKind.HARD)


def path_estimate(sample: Sample, k: int, kind: ThresholdKind) -> ThresholdEstimate:
    return _path(sample, k, kind)


def path_residual(sample: Sample, k: int, kind: ThresholdKind) -> np.ndarray:
    """``y - estimate`` along a path, formed without cancellation.

    The soft residual is ``clip(y, -t, t)`` and the hard residual keeps the
    killed coordinates, so both are exact in floating point.
    """
    t = threshold_level(abs_order_statistics(sample), k)
    y = sample.values
    if kind is ThresholdKind.SOFT:
        return np.clip(y, -t, t)
    return np.where(np.abs(y) > t, 0.0, y)


def penalized_l1_fit(sample: Sample, lambda2: float) -> np.ndarray:
    """Minimizer of ``||y - mu||^2 + 2 * lambda2 * ||mu||_1``."""
    if not lambda2 >= 0:
        raise ValueError(f"lambda2 must be >= 0, got {lambda2!r}")
    return soft_threshold(sample.values, lambda2)


def _golden_section(f, lo: float, hi: float, tol: float = GOLDEN_TOL) -> float:
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = f(d)
    return 0.5 * (lo + hi)


def _lgamma_scalar(a: float, lambda2: float, gamma: float) -> float:
    """Minimize ``(a - m)^2 + 2 lambda2 m^gamma`` over ``m`` in ``[0, a]``, ``a >= 0``."""
    if a == 0.0 or lambda2 == 0.0:
        return a

    def h(m):
        return (a - m) ** 2 + 2.0 * lambda2 * m**gamma

    # h is concave below the inflection point and convex above it, so the
    # concave part can only contribute its endpoints.
    inflection = (lambda2 * gamma * (1.0 - gamma)) ** (1.0 / (2.0 - gamma))
    candidates = [0.0, a]
    if inflection < a:
        candidates.append(_golden_section(h, inflection, a))
    return min(candidates, key=lambda m: (h(m), m))


def penalized_lgamma_fit(sample: Sample, spec: PenalizedFitSpec) -> np.ndarray:
    """Coordinate-wise minimizer of ``(y_i - m)^2 + 2 lambda2 |m|^gamma``."""
    if spec.loss is not Loss.QUADRATIC:
        raise ValueError("penalized_lgamma_fit needs the quadratic loss")
    if spec.gamma == 1.0:
        return penalized_l1_fit(sample, spec.lambda2)
    y = sample.values
    mags = np.array([_lgamma_scalar(abs(v), spec.lambda2, spec.gamma) for v in y])
    return np.sign(y) * mags


def penalized_lad_fit(sample: Sample, lambda2: float) -> np.ndarray:
    """Minimizer of ``||y - mu||_1 + 2 * lambda2 * ||mu||_1``.

    Each coordinate is kept when ``2 * lambda2 < 1`` and killed otherwise;
    at equality the objective is flat on ``[0, y_i]`` and 0 is returned.
    """
    if not lambda2 >= 0:
        raise ValueError(f"lambda2 must be >= 0, got {lambda2!r}")
    if 2.0 * lambda2 < 1.0:
        return sample.values.copy()
    return np.zeros_like(sample.values)


def penalized_fit(sample: Sample, spec: PenalizedFitSpec) -> np.ndarray:
    if spec.loss is Loss.ABSOLUTE_DEVIATION:
        if spec.gamma != 1.0:
            raise ValueError("the absolute-deviation fit supports gamma = 1 only")
        return penalized_lad_fit(sample, spec.lambda2)
    return penalized_lgamma_fit(sample, spec)
