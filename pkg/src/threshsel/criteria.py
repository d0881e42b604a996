"""Selection criteria along the soft and hard threshold paths.

``mallows_cp`` scores the soft path, ``hard_criterion`` scores the hard path
under a deterministic penalty, and ``random_soft_penalty`` is the
data-dependent penalty that turns the first into the second:

    Cp(soft, k) = RSS_hard(k) - n sigma^2 + k t_k^2 + 2 k sigma^2

where ``t_k = |y|_(k+1)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import OrderStats, Sample, abs_order_statistics, check_k, threshold_level
from .thresholding import (
    ThresholdKind,
    hard_path_estimate,
    path_residual,
    soft_path_estimate,
)


class PenaltyFamily(enum.Enum):
    MALLOWS_CP = "mallows_cp"
    BIRGE_MASSART = "birge_massart"
    FDR = "fdr"
    RANDOM_SOFT = "random_soft"
    CUSTOM_TABLE = "custom_table"


class WrongFamilyError(ValueError):
    pass


@dataclass(frozen=True)
class PenaltySpec:
    """Which criterion to minimize.

    Build instances through the classmethods; ``C``/``Cprime`` only matter for
    the Birge-Massart and FDR families and ``values`` only for custom tables.
    """

    family: PenaltyFamily
    C: float = 1.0
    Cprime: float = 0.0
    values: Optional[tuple] = field(default=None)

    def __post_init__(self):
        if self.family in (PenaltyFamily.BIRGE_MASSART, PenaltyFamily.FDR):
            if not (math.isfinite(self.C) and self.C > 0):
                raise ValueError(f"C must be positive, got {self.C!r}")
            if not math.isfinite(self.Cprime):
                raise ValueError(f"Cprime must be finite, got {self.Cprime!r}")
            if self.family is PenaltyFamily.FDR and self.C != 1.0:
                raise ValueError("the FDR penalty has C = 1")
        if self.family is PenaltyFamily.CUSTOM_TABLE:
            if self.values is None or len(self.values) == 0:
                raise ValueError("a custom table needs one value per k in 0..n")
            vals = tuple(float(v) for v in self.values)
            if not all(math.isfinite(v) for v in vals):
                raise ValueError("custom table values must be finite")
            object.__setattr__(self, "values", vals)

    @classmethod
    def mallows_cp(cls) -> "PenaltySpec":
        return cls(PenaltyFamily.MALLOWS_CP)

    @classmethod
    def birge_massart(cls, C: float, Cprime: float = 0.0) -> "PenaltySpec":
        return cls(PenaltyFamily.BIRGE_MASSART, C=float(C), Cprime=float(Cprime))

    @classmethod
    def fdr(cls, Cprime: float = 0.0) -> "PenaltySpec":
        return cls(PenaltyFamily.FDR, C=1.0, Cprime=float(Cprime))

    @classmethod
    def random_soft(cls) -> "PenaltySpec":
        return cls(PenaltyFamily.RANDOM_SOFT)

    @classmethod
    def custom_table(cls, values) -> "PenaltySpec":
        return cls(PenaltyFamily.CUSTOM_TABLE, values=tuple(values))

    @classmethod
    def zero(cls, n: int) -> "PenaltySpec":
        return cls.custom_table([0.0] * (n + 1))

    @property
    def is_deterministic(self) -> bool:
        return self.family in (
            PenaltyFamily.BIRGE_MASSART,
            PenaltyFamily.FDR,
            PenaltyFamily.CUSTOM_TABLE,
        )

    def to_dict(self) -> dict:
        d = {"family": self.family.value}
        if self.family is PenaltyFamily.BIRGE_MASSART:
            d.update(C=self.C, Cprime=self.Cprime)
        elif self.family is PenaltyFamily.FDR:
            d.update(Cprime=self.Cprime)
        elif self.family is PenaltyFamily.CUSTOM_TABLE:
            d.update(values=list(self.values))
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PenaltySpec":
        allowed = {
            "mallows_cp": set(),
            "random_soft": set(),
            "birge_massart": {"C", "Cprime"},
            "fdr": {"Cprime"},
            "custom_table": {"values"},
        }
        if not isinstance(d, dict) or "family" not in d:
            raise ValueError(f"penalty spec needs a 'family' key: {d!r}")
        fam = d["family"]
        if fam not in allowed:
            raise ValueError(f"unknown penalty family {fam!r}")
        extra = set(d) - {"family"} - allowed[fam]
        if extra:
            raise ValueError(f"unknown keys for {fam}: {sorted(extra)}")
        if fam == "birge_massart":
            if "C" not in d:
                raise ValueError("birge_massart needs C")
            return cls.birge_massart(d["C"], d.get("Cprime", 0.0))
        if fam == "fdr":
            return cls.fdr(d.get("Cprime", 0.0))
        if fam == "custom_table":
            return cls.custom_table(d.get("values") or ())
        return cls(PenaltyFamily(fam))

    def label(self) -> str:
        if self.family is PenaltyFamily.BIRGE_MASSART:
            return f"birge_massart(C={self.C!r},Cprime={self.Cprime!r})"
        if self.family is PenaltyFamily.FDR:
            return f"fdr(Cprime={self.Cprime!r})"
        return self.family.value


class CurveKind(enum.Enum):
    SOFT_CP = "soft_cp"
    HARD_PENALIZED = "hard_penalized"
    COMPLEXITY = "complexity"


@dataclass(frozen=True)
class CriterionCurve:
    """Criterion value for every k in ``0..n``."""

    values: np.ndarray
    kind: CurveKind
    sigma2_used: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("criterion curve has non-finite entries")


def _check_sigma2(sigma2: float) -> float:
    sigma2 = float(sigma2)
    if not (math.isfinite(sigma2) and sigma2 > 0):
        raise ValueError(f"sigma2 must be positive, got {sigma2!r}")
    return sigma2


def rss(sample: Sample, estimate) -> float:
    values = getattr(estimate, "values", estimate)
    mu = np.asarray(values, dtype=float)
    if mu.shape != sample.values.shape:
        raise ValueError(f"length mismatch: {mu.shape} vs {sample.values.shape}")
    r = sample.values - mu
    return float(np.dot(r, r))


def _path_rss(sample: Sample, k: int, kind: ThresholdKind) -> float:
    r = path_residual(sample, k, kind)
    return float(np.dot(r, r))


def mallows_cp(sample: Sample, k: int, sigma2: float) -> float:
    """``||y - soft_k||^2 - n sigma^2 + 2 k sigma^2``."""
    k = check_k(k, sample.n)
    sigma2 = _check_sigma2(sigma2)
    return _path_rss(sample, k, ThresholdKind.SOFT) - sample.n * sigma2 + 2 * k * sigma2


def deterministic_penalty(spec: PenaltySpec, k: int, n: int, sigma2: float) -> float:
    """``pen(k)`` for the data-free families; ``pen(0) = 0``.

    Birge-Massart: ``2 k sigma^2 C (log(n/k) + C')``.
    """
    if not spec.is_deterministic:
        raise WrongFamilyError(f"{spec.family.value} is not a deterministic penalty")
    k = check_k(k, n)
    if spec.family is PenaltyFamily.CUSTOM_TABLE:
        if len(spec.values) != n + 1:
            raise ValueError(f"custom table has {len(spec.values)} entries, need {n + 1}")
        return spec.values[k]
    sigma2 = _check_sigma2(sigma2)
    if k == 0:
        return 0.0
    return 2.0 * k * sigma2 * spec.C * (math.log(n / k) + spec.Cprime)


def hard_criterion(sample: Sample, k: int, sigma2: float, spec: PenaltySpec) -> float:
    """``||y - hard_k||^2 - n sigma^2 + pen(k)`` with a deterministic ``pen``."""
    pen = deterministic_penalty(spec, k, sample.n, sigma2)
    sigma2 = _check_sigma2(sigma2)
    return _path_rss(sample, k, ThresholdKind.HARD) - sample.n * sigma2 + pen


def random_soft_part(sample: Sample, k: int) -> float:
    """Data-only part ``k |y|_(k+1)^2`` of the random penalty; needs no sigma."""
    t = threshold_level(abs_order_statistics(sample), k)
    return k * t * t


def random_soft_penalty(sample: Sample, k: int, sigma2: float) -> float:
    """``k |y|_(k+1)^2 + 2 k sigma^2``."""
    sigma2 = _check_sigma2(sigma2)
    return random_soft_part(sample, k) + 2 * k * sigma2


def rss_gap(sample: Sample, k: int) -> float:
    """``||y - soft_k||^2 - ||y - hard_k||^2`` computed from both residual vectors."""
    k = check_k(k, sample.n)
    soft = path_residual(sample, k, ThresholdKind.SOFT)
    hard = path_residual(sample, k, ThresholdKind.HARD)
    return float(np.sum(soft * soft - hard * hard))


# Whole curves over k = 0..n in O(n log n).


def _suffix_sums(x: np.ndarray) -> np.ndarray:
    """``out[j] = sum(x[j:])`` for ``j`` in ``0..len(x)``."""
    out = np.zeros(x.size + 1)
    out[:-1] = np.cumsum(x[::-1])[::-1]
    return out


def soft_rss_curve(stats: OrderStats) -> np.ndarray:
    # coordinates above the level leave a residual of exactly t, the rest
    # keep their whole value
    t = stats.levels()
    m = stats.count_above()
    tail = _suffix_sums(stats.abs_desc**2)
    return m * t * t + tail[m]


def hard_rss_curve(stats: OrderStats) -> np.ndarray:
    tail = _suffix_sums(stats.abs_desc**2)
    return tail[stats.count_above()]


def penalty_curve(spec: PenaltySpec, n: int, sigma2: float) -> np.ndarray:
    if not spec.is_deterministic:
        raise WrongFamilyError(f"{spec.family.value} is not a deterministic penalty")
    if spec.family is PenaltyFamily.CUSTOM_TABLE:
        if len(spec.values) != n + 1:
            raise ValueError(f"custom table has {len(spec.values)} entries, need {n + 1}")
        return np.array(spec.values)
    sigma2 = _check_sigma2(sigma2)
    k = np.arange(1, n + 1)
    pen = np.zeros(n + 1)
    pen[1:] = 2.0 * k * sigma2 * spec.C * (np.log(n / k) + spec.Cprime)
    return pen


def criterion_curve(sample: Sample, sigma2: float, spec: PenaltySpec) -> CriterionCurve:
    """Materialize the criterion selected by ``spec`` for every k."""
    sigma2 = _check_sigma2(sigma2)
    stats = abs_order_statistics(sample)
    n = sample.n
    k = np.arange(n + 1)
    if spec.family is PenaltyFamily.MALLOWS_CP:
        values = soft_rss_curve(stats) - n * sigma2 + 2 * k * sigma2
        return CriterionCurve(values, CurveKind.SOFT_CP, sigma2)
    if spec.family is PenaltyFamily.RANDOM_SOFT:
        t = stats.levels()
        pen = k * t * t + 2 * k * sigma2
    else:
        pen = penalty_curve(spec, n, sigma2)
    values = hard_rss_curve(stats) - n * sigma2 + pen
    return CriterionCurve(values, CurveKind.HARD_PENALIZED, sigma2)


def estimate_kind(spec: PenaltySpec) -> ThresholdKind:
    return ThresholdKind.SOFT if spec.family is PenaltyFamily.MALLOWS_CP else ThresholdKind.HARD


def path_for(spec: PenaltySpec):
    return soft_path_estimate if spec.family is PenaltyFamily.MALLOWS_CP else hard_path_estimate
