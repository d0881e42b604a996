"""Choosing k: criterion minimization, the combined complexity criterion and the oracle k."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Sample, abs_order_statistics
from .criteria import (
    CriterionCurve,
    CurveKind,
    PenaltySpec,
    WrongFamilyError,
    criterion_curve,
    estimate_kind,
    penalty_curve,
    soft_rss_curve,
    _check_sigma2,
)
from .thresholding import ThresholdEstimate, ThresholdKind, path_estimate


@dataclass(frozen=True)
class SelectionResult:
    k_hat: int
    curve: CriterionCurve
    estimate: ThresholdEstimate


def argmin_k(values: np.ndarray, k_max: Optional[int] = None) -> int:
    """Smallest minimizer, optionally over ``0..k_max`` only."""
    values = np.asarray(values)
    if k_max is not None:
        if not 0 <= k_max < values.size:
            raise ValueError(f"k_max={k_max} outside 0..{values.size - 1}")
        values = values[: k_max + 1]
    # np.argmin returns the first occurrence
    return int(np.argmin(values))


def select_k(
    sample: Sample,
    sigma2: float,
    spec: PenaltySpec,
    k_max: Optional[int] = None,
) -> SelectionResult:
    """Minimize the criterion named by ``spec`` over k.

    Mallows' Cp returns a soft-path estimate, every other family a hard-path
    one. ``k_max`` restricts the model collection to ``k <= k_max``.
    """
    curve = criterion_curve(sample, sigma2, spec)
    k_hat = argmin_k(curve.values, k_max)
    return SelectionResult(k_hat, curve, path_estimate(sample, k_hat, estimate_kind(spec)))


def complexity_curve(sample: Sample, spec: PenaltySpec, sigma2: float) -> CriterionCurve:
    """``||y - mu_k||^2 + 2 t_k ||mu_k||_1 + pen(k)`` at the soft-path minimizer ``mu_k``."""
    if not spec.is_deterministic:
        raise WrongFamilyError("complexity selection needs a deterministic penalty")
    sigma2 = _check_sigma2(sigma2)
    stats = abs_order_statistics(sample)
    t = stats.levels()
    m = stats.count_above()
    head = np.concatenate(([0.0], np.cumsum(stats.abs_desc)))
    l1 = head[m] - m * t
    values = soft_rss_curve(stats) + 2.0 * t * l1 + penalty_curve(spec, sample.n, sigma2)
    return CriterionCurve(values, CurveKind.COMPLEXITY, sigma2)


def complexity_objective(sample: Sample, k: int, spec: PenaltySpec, sigma2: float) -> float:
    """The same objective at a single k, evaluated directly on the estimate vector."""
    from .criteria import deterministic_penalty

    est = path_estimate(sample, k, ThresholdKind.SOFT)
    r = sample.values - est.values
    return float(
        np.dot(r, r)
        + 2.0 * est.level * np.sum(np.abs(est.values))
        + deterministic_penalty(spec, k, sample.n, sigma2)
    )


def complexity_select(sample: Sample, spec: PenaltySpec, sigma2: float) -> SelectionResult:
    curve = complexity_curve(sample, spec, sigma2)
    k_hat = argmin_k(curve.values)
    return SelectionResult(k_hat, curve, path_estimate(sample, k_hat, ThresholdKind.SOFT))


def risk_curve(sample: Sample, mu_true, kind: ThresholdKind) -> np.ndarray:
    """``||path_estimate(k) - mu_true||^2`` for every k in ``0..n``.

    Only the coordinates above the level are estimated; the rest contribute
    ``mu_i^2``. Prefix sums over the rank order give every k in one pass.
    """
    mu = np.asarray(mu_true, dtype=float)
    if mu.shape != sample.values.shape:
        raise ValueError(f"length mismatch: {mu.shape} vs {sample.values.shape}")
    stats = abs_order_statistics(sample)
    y = sample.values[stats.perm]
    mu = mu[stats.perm]
    t = stats.levels()
    m = stats.count_above()

    def head(x):
        return np.concatenate(([0.0], np.cumsum(x)))

    err = y - mu
    missed = head(mu * mu)
    total_missed = missed[-1]
    if kind is ThresholdKind.HARD:
        kept = head(err * err)[m]
    else:
        # (y - s t - mu)^2 = err^2 - 2 t s err + t^2 with s = sign(y)
        kept = head(err * err)[m] - 2.0 * t * head(np.sign(y) * err)[m] + m * t * t
    return np.maximum(kept + (total_missed - missed[m]), 0.0)


def risk_curve_direct(sample: Sample, mu_true, kind: ThresholdKind) -> np.ndarray:
    mu = np.asarray(mu_true, dtype=float)
    return np.array(
        [np.sum((path_estimate(sample, k, kind).values - mu) ** 2) for k in range(sample.n + 1)]
    )


def oracle_k(sample: Sample, mu_true, kind: ThresholdKind = ThresholdKind.SOFT) -> int:
    """Smallest k whose path estimate is closest to ``mu_true``."""
    return argmin_k(risk_curve(sample, mu_true, kind))
