"""Acceptance criteria, each run at its stated tolerance and time budget.

Every test records a one-line verdict (shown in the pytest terminal summary,
or printed directly when this file is run as a script) and then asserts it.
Run just these with ``pytest -m acceptance -v``.
"""

import sys
import time
from dataclasses import replace

import numpy as np
import pytest

from threshsel.asymptotics import (
    chi2_tail,
    chi2_tail_inverse,
    distribution_identity_test,
    threshold_law_check,
)
from threshsel.core import Sample, SeedSpec, abs_order_statistics, derive_stream, threshold_level
from threshsel.criteria import (
    PenaltySpec,
    criterion_curve,
    hard_criterion,
    mallows_cp,
    random_soft_penalty,
    rss_gap,
)
from threshsel.harness import (
    EXPERIMENTS,
    SignalSpec,
    default_config,
    generate,
    run_experiment,
    write_report,
)
from threshsel.selection import argmin_k, risk_curve
from threshsel.thresholding import (
    PenalizedFitSpec,
    ThresholdKind,
    penalized_l1_fit,
    penalized_lad_fit,
    penalized_lgamma_fit,
)
from threshsel.variance import calibrate_alpha

try:
    from conftest import VERDICTS
except ImportError:  # pragma: no cover - run outside pytest
    VERDICTS = {}

pytestmark = pytest.mark.acceptance

ROOT = SeedSpec(20040401, 100)


def verdict(num, ok, detail):
    VERDICTS[num] = (bool(ok), detail)
    print(f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def gaussian_corpus():
    seed = derive_stream(ROOT, 1)
    return [Sample(derive_stream(seed, r).generator().standard_normal(64)) for r in range(1000)]


def test_criterion_01_random_penalty_identity():
    t0 = time.perf_counter()
    zero = PenaltySpec.zero(64)
    worst = 0.0
    ok = True
    for s in gaussian_corpus():
        for k in range(65):
            cp = mallows_cp(s, k, 1.0)
            resid = abs(cp - hard_criterion(s, k, 1.0, zero) - random_soft_penalty(s, k, 1.0))
            worst = max(worst, resid / (1 + abs(cp)))
            ok &= resid <= 1e-9 * (1 + abs(cp))
    elapsed = time.perf_counter() - t0
    verdict(1, ok and elapsed < 5, f"max |residual|/(1+|Cp|) = {worst:.2e}, {elapsed:.2f} s (< 5 s)")


def test_criterion_02_rss_gap_exact():
    worst = 0.0
    ok = True
    for s in gaussian_corpus():
        stats = abs_order_statistics(s)
        for k in range(65):
            expected = k * threshold_level(stats, k) ** 2
            err = abs(rss_gap(s, k) - expected)
            ok &= err <= 1e-12 * expected
            if expected > 0:
                worst = max(worst, err / expected)
    verdict(2, ok, f"max relative error = {worst:.2e} (<= 1e-12)")


def _grid_argmin(y, penalty, loss, step=1e-4):
    """Brute-force per-coordinate minimizer on a symmetric grid that contains 0."""
    half = np.arange(0.0, np.max(np.abs(y)) + 1.0, step)
    grid = np.concatenate((-half[:0:-1], half))
    pen = penalty(grid)
    out = np.empty_like(y)
    for i, v in enumerate(y):
        out[i] = grid[np.argmin(loss(v - grid) + pen)]
    return out


def test_criterion_03_penalized_fit_oracles():
    t0 = time.perf_counter()
    seed = derive_stream(ROOT, 3)
    worst = {}
    for r in range(200):
        rng = derive_stream(seed, r).generator()
        y = rng.standard_normal(16) * 2
        lam2 = float(rng.uniform(0, 3))
        s = Sample(y)
        cases = {
            "l1": (penalized_l1_fit(s, lam2), lambda m: 2 * lam2 * np.abs(m), np.square),
            "lad": (penalized_lad_fit(s, lam2), lambda m: 2 * lam2 * np.abs(m), np.abs),
        }
        for g in (0.5, 0.8, 1.0):
            cases[f"lgamma{g}"] = (
                penalized_lgamma_fit(s, PenalizedFitSpec(lam2, g)),
                lambda m, g=g: 2 * lam2 * np.abs(m) ** g,
                np.square,
            )
        for name, (got, pen, loss) in cases.items():
            err = float(np.max(np.abs(got - _grid_argmin(y, pen, loss))))
            worst[name] = max(worst.get(name, 0.0), err)
    elapsed = time.perf_counter() - t0
    ok = all(v <= 1e-3 for v in worst.values()) and elapsed < 60
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    verdict(3, ok, f"max coordinate error: {detail}; {elapsed:.1f} s (< 60 s)")


def test_criterion_04_chi_square_kernels():
    q = chi2_tail(3.841459)
    u = np.logspace(-12, 0, 2001)
    round_trip = float(np.max(np.abs(chi2_tail(chi2_tail_inverse(u)) - u)))
    ks = distribution_identity_test(512, 7, 5000, derive_stream(ROOT, 4))
    ok = abs(q - 0.05) <= 1e-6 and round_trip <= 1e-9 and ks.pvalue > 0.001
    verdict(4, ok, f"Q(3.841459) = {q:.9f}, round trip {round_trip:.1e}, KS p = {ks.pvalue:.3f}")


def test_criterion_05_threshold_law():
    t0 = time.perf_counter()
    seed = derive_stream(ROOT, 5)
    errs = {k: threshold_law_check(4096, k, 400, 1.0, seed).plug_in_rel_error for k in (7, 15, 31, 63)}
    ratios = [threshold_law_check(n, 15, 400, 1.0, seed).log_ratio for n in (256, 4096, 65536)]
    elapsed = time.perf_counter() - t0
    increasing = all(a < b for a, b in zip(ratios, ratios[1:]))
    ok = all(e <= 0.10 for e in errs.values()) and increasing and elapsed < 180
    verdict(
        5,
        ok,
        f"max plug-in rel. error {max(errs.values()):.3f} (<= 0.10), "
        f"log ratios {', '.join(f'{r:.3f}' for r in ratios)} (increasing), {elapsed:.1f} s",
    )


def test_criterion_06_slope_constant():
    t0 = time.perf_counter()
    seed = derive_stream(ROOT, 6)
    alphas = {n: calibrate_alpha(n, 200, (0.05, 0.3), derive_stream(seed, n)) for n in (128, 512, 2048)}
    elapsed = time.perf_counter() - t0
    spread = max(alphas.values()) / min(alphas.values())
    ok = all(1.3 <= a <= 1.7 for a in alphas.values()) and spread <= 1.25 and elapsed < 120
    detail = ", ".join(f"alpha({n}) = {a:.3f}" for n, a in alphas.items())
    verdict(6, ok, f"{detail}; max/min {spread:.3f} (<= 1.25), {elapsed:.1f} s")


def test_criterion_07_variance_recovery():
    t0 = time.perf_counter()
    cfg = default_config("variance_validation")
    assert cfg.noise.sigma2 == 4.0 and cfg.signal.s == 10 and cfg.signal.amplitude == 10 * cfg.noise.sigma
    assert cfg.signal.n == 1024 and cfg.replicas == 200
    g = run_experiment(cfg).summary["groups"][0]
    elapsed = time.perf_counter() - t0
    ratio = g["sigma2_ratio_mean"]
    verdict(7, 0.85 <= ratio <= 1.15 and elapsed < 60, f"mean sigma2_hat/sigma2 = {ratio:.4f}, {elapsed:.1f} s")


def _phase_config():
    return replace(
        default_config("phase_transition"),
        criterion_grid=(PenaltySpec.birge_massart(0.5, 0.0), PenaltySpec.birge_massart(1.5, 0.0)),
        sweep={},
        replicas=300,
    )


def _phase_diagnostic(cfg):
    """Same draws, argmin restricted to k <= n/2."""
    out = {}
    for spec in cfg.criterion_grid:
        ks = []
        for r in range(cfg.replicas):
            _, s = generate(cfg.signal, cfg.noise, derive_stream(cfg.seed, r))
            ks.append(argmin_k(criterion_curve(s, 1.0, spec).values, k_max=s.n // 2))
        out[spec.C] = (float(np.median(ks)), float(np.mean(ks)))
    return out


def test_criterion_08_phase_transition():
    t0 = time.perf_counter()
    cfg = _phase_config()
    groups = {g["C"]: g["k_hat"] for g in run_experiment(cfg).summary["groups"]}
    elapsed = time.perf_counter() - t0
    lo, hi = groups[0.5], groups[1.5]
    hi_stat = hi["median"] if hi["median"] > 0 else hi["mean"]
    ratio_ok = lo["median"] > 50 * hi_stat if hi_stat > 0 else lo["median"] > 0
    ok = lo["median"] >= 256 and hi["median"] <= 3 and ratio_ok and elapsed < 120
    detail = f"median k_hat C=0.5: {lo['median']:g}, C=1.5: {hi['median']:g}; {elapsed:.1f} s"
    if not ok:
        diag = _phase_diagnostic(cfg)
        detail += (
            "; with k <= n/2 (median, mean): "
            + ", ".join(f"C={c}: ({m:g}, {a:.2f})" for c, (m, a) in diag.items())
        )
    verdict(8, ok, detail)


def _oracle_k_ge_1_ratio(cfg, s):
    signal = SignalSpec.sparse(cfg.signal.n, s, cfg.signal.amplitude) if s else SignalSpec.zero(cfg.signal.n)
    risks, oracles = [], []
    for r in range(cfg.replicas):
        mu, sample = generate(signal, cfg.noise, derive_stream(cfg.seed, r))
        k = argmin_k(criterion_curve(sample, cfg.noise.sigma2, PenaltySpec.mallows_cp()).values)
        curve = risk_curve(sample, mu, ThresholdKind.SOFT)
        risks.append(curve[k])
        oracles.append(curve[1:].min())
    return float(np.mean(risks) / np.mean(oracles))


def test_criterion_09_oracle_ratio():
    t0 = time.perf_counter()
    cfg = replace(default_config("oracle_ratio"), criterion_grid=(PenaltySpec.mallows_cp(),))
    assert cfg.signal.amplitude == 5 * cfg.noise.sigma and cfg.replicas == 200 and cfg.signal.n == 1024
    groups = run_experiment(cfg).summary["groups"]
    elapsed = time.perf_counter() - t0
    parts, ok = [], elapsed < 180
    for g in groups:
        if g["risk_ratio"] is None:
            ok = False
            parts.append(f"s={g['s']}: inf (oracle risk 0, mean risk {g['mean_risk']:.3f})")
        else:
            ok &= g["risk_ratio"] <= 4
            parts.append(f"s={g['s']}: {g['risk_ratio']:.3f}")
    detail = "risk ratios " + ", ".join(parts) + f" (<= 4); {elapsed:.1f} s"
    if not ok and any(g["risk_ratio"] is None for g in groups):
        detail += f"; zero signal against the best k >= 1: {_oracle_k_ge_1_ratio(cfg, 0):.1f}"
    verdict(9, ok, detail)


def test_criterion_10_determinism(tmp_path):
    mismatched = []
    for name in EXPERIMENTS:
        cfg = default_config(name)
        outs = []
        for i, threads in enumerate((1, 1, 4)):
            csv_path, _ = write_report(run_experiment(cfg, threads=threads), cfg, tmp_path / f"{name}{i}")
            outs.append(csv_path.read_bytes())
        if not outs[0] == outs[1] == outs[2]:
            mismatched.append(name)
    verdict(10, not mismatched, f"byte-identical CSV across reruns and 1/4 threads; mismatches: {mismatched or 'none'}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
