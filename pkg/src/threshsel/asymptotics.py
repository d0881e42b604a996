"""Chi-square(1) tail function, its inverse, and Monte Carlo checks of the threshold-level law.

In pure noise, ``|y|_(k+1)^2 / sigma^2`` is distributed as ``Q^{-1}(U_(k+1))``
with ``Q`` the chi-square(1) tail and ``U_(k+1)`` a uniform order statistic.
Since ``n U_(k+1) -> k + 1`` and ``Q^{-1}(u) ~ 2 log(1/u)`` as ``u -> 0``,
the squared level behaves like ``2 sigma^2 log(n / (k+1))`` for large n.
The last step converges slowly; see ``threshold_law_check``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import special, stats

from .core import SeedSpec, derive_stream, replica_map

TAIL_CSV_HEADER = ("n", "k", "replicas", "mc_mean", "plug_in", "log_approx")

_NEWTON_MAXITER = 100


def chi2_tail(t):
    """``P(Z^2 > t)`` for standard normal ``Z``, i.e. ``erfc(sqrt(t / 2))``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise ValueError("chi2_tail needs t >= 0")
    out = special.erfc(np.sqrt(t / 2.0))
    return float(out) if out.ndim == 0 else out


def _log_tail_sqrt(x):
    # log Q(x^2) = log(2 Phi(-x)), stable far into the tail
    return math.log(2.0) + special.log_ndtr(-x)


def chi2_tail_inverse(u):
    """``t >= 0`` with ``chi2_tail(t) == u``, for ``u`` in ``(0, 1]``.

    Solves ``log Q(x^2) = log u`` for ``x = sqrt(t)`` inside the bracket
    ``[0, sqrt(2 log(1/u))]`` (``Q(t) <= exp(-t/2)`` guarantees it holds the
    root). Newton steps that leave the bracket fall back to bisection; since
    ``log Q(x^2)`` is concave in ``x``, Newton from the right end converges
    monotonically.
    """
    u_arr = np.asarray(u, dtype=float)
    if np.any(~(u_arr > 0)) or np.any(u_arr > 1):
        raise ValueError("chi2_tail_inverse needs u in (0, 1]")
    u_flat = u_arr.reshape(-1)
    log_u = np.log(u_flat)
    lo = np.zeros_like(u_flat)
    hi = np.sqrt(2.0 * np.maximum(-log_u, 0.0))
    x = hi.copy()
    active = u_flat < 1.0
    for _ in range(_NEWTON_MAXITER):
        if not np.any(active):
            break
        xa = x[active]
        g = _log_tail_sqrt(xa) - log_u[active]
        # d/dx log(2 Phi(-x)) = -phi(x) / Phi(-x)
        dg = -np.exp(-0.5 * xa * xa - special.log_ndtr(-xa)) / math.sqrt(2.0 * math.pi)
        lo_a, hi_a = lo[active], hi[active]
        lo_a = np.where(g > 0, xa, lo_a)
        hi_a = np.where(g <= 0, xa, hi_a)
        step = g / dg
        cand = xa - step
        outside = ~((cand >= lo_a) & (cand <= hi_a))
        cand = np.where(outside, 0.5 * (lo_a + hi_a), cand)
        done = (np.abs(cand - xa) <= 4e-16 * np.maximum(1.0, xa)) | (g == 0)
        x[active] = cand
        lo[active], hi[active] = lo_a, hi_a
        idx = np.flatnonzero(active)
        active[idx[done]] = False
    x = np.where(u_flat >= 1.0, 0.0, x)
    out = (x * x).reshape(u_arr.shape)
    return float(out) if out.ndim == 0 else out


def log_tail_approx(u):
    """``2 log(1/u)``, the small-``u`` equivalent of ``chi2_tail_inverse(u)``."""
    u_arr = np.asarray(u, dtype=float)
    if np.any(~(u_arr > 0)) or np.any(u_arr >= 1):
        raise ValueError("log_tail_approx needs u in (0, 1)")
    out = -2.0 * np.log(u_arr)
    return float(out) if out.ndim == 0 else out


def _check_nk(n: int, k: int, replicas: int) -> None:
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= k < n:
        raise ValueError(f"k={k} outside 0..{n - 1}")
    if replicas < 1:
        raise ValueError("replicas must be >= 1")


def uniform_order_samples(n: int, k: int, replicas: int, seed: SeedSpec, threads: int = 1) -> np.ndarray:
    """``U_(k+1)`` (ascending order) for each replica of ``n`` uniforms."""
    _check_nk(n, k, replicas)

    def one(r):
        u = derive_stream(seed, r).generator().random(n)
        return np.partition(u, k)[k]

    return np.array(replica_map(one, replicas, threads))


def threshold_level_samples(
    n: int, k: int, replicas: int, sigma2: float, seed: SeedSpec, threads: int = 1
) -> np.ndarray:
    """``|y|_(k+1)^2 / sigma^2`` for pure-noise replicas ``y = sigma * z``."""
    _check_nk(n, k, replicas)
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    sigma = math.sqrt(sigma2)

    def one(r):
        y = sigma * derive_stream(seed, r).generator().standard_normal(n)
        a = np.abs(y)
        # (k+1)-th largest is the (n-k-1)-th smallest
        level = np.partition(a, n - k - 1)[n - k - 1]
        return level * level / sigma2

    return np.array(replica_map(one, replicas, threads))


def uniform_order_check(n: int, k: int, replicas: int, seed: SeedSpec, threads: int = 1) -> float:
    """Monte Carlo mean of ``n U_(k+1)``; the exact mean is ``n (k+1) / (n+1)``."""
    return float(np.mean(n * uniform_order_samples(n, k, replicas, seed, threads)))


@dataclass(frozen=True)
class TailCheckReport:
    n: int
    k: int
    replicas: int
    mc_mean: float
    plug_in: float
    log_approx: float

    @property
    def plug_in_rel_error(self) -> float:
        return abs(self.mc_mean - self.plug_in) / self.plug_in

    @property
    def log_ratio(self) -> float:
        return self.mc_mean / self.log_approx

    def to_row(self) -> tuple:
        return tuple(asdict(self)[c] for c in TAIL_CSV_HEADER)


def threshold_law_check(
    n: int, k: int, replicas: int, sigma2: float, seed: SeedSpec, threads: int = 1
) -> TailCheckReport:
    """Compare the simulated mean squared level with ``Q^{-1}((k+1)/n)`` and ``2 log(n/(k+1))``."""
    draws = threshold_level_samples(n, k, replicas, sigma2, seed, threads)
    u = (k + 1) / n
    return TailCheckReport(
        n=n,
        k=k,
        replicas=replicas,
        mc_mean=float(np.mean(draws)),
        plug_in=chi2_tail_inverse(u),
        log_approx=2.0 * math.log(n / (k + 1)),
    )


def distribution_identity_test(n: int, k: int, replicas: int, seed: SeedSpec, threads: int = 1):
    """Two-sample KS test of ``|y|_(k+1)^2`` against ``Q^{-1}(U_(k+1))``.

    The two samples use independent child streams of ``seed``.
    Returns the ``scipy.stats`` KS result.
    """
    levels = threshold_level_samples(n, k, replicas, 1.0, derive_stream(seed, 0), threads)
    uniforms = uniform_order_samples(n, k, replicas, derive_stream(seed, 1), threads)
    return stats.ks_2samp(levels, chi2_tail_inverse(uniforms))
