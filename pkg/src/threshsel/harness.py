"""Monte Carlo experiments: generators, the four named experiments and report files.

Every replica draws from its own stream ``derive_stream(config.seed, r)`` and
rows are emitted in a fixed order, so reports do not depend on how replicas
were scheduled across threads.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .asymptotics import TAIL_CSV_HEADER, TailCheckReport, threshold_law_check
from .core import RNG_ALGORITHM, RNG_NUMPY_VERSION, Sample, SeedSpec, derive_stream, replica_map
from .criteria import PenaltyFamily, PenaltySpec, criterion_curve, estimate_kind
from .selection import argmin_k, risk_curve
from .thresholding import ThresholdKind
from .variance import DEFAULT_ALPHA, DEFAULT_WINDOW, calibrate_alpha, estimate_sigma2

EXPERIMENTS = ("phase_transition", "oracle_ratio", "variance_validation", "threshold_law")

REPORT_FIELDS = ("k_hat", "risk", "oracle_risk", "sigma2_hat", "degenerate")


class ConfigError(ValueError):
    pass


class SignalKind(enum.Enum):
    ZERO = "zero"
    SPARSE = "sparse"
    RHO_BALL = "rho_ball"


class NoiseKind(enum.Enum):
    GAUSSIAN = "gaussian"
    STUDENT_T = "student_t"


def _strict_keys(d: Any, allowed: Sequence[str], where: str, required: Sequence[str] = ()) -> dict:
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object, got {type(d).__name__}")
    extra = set(d) - set(allowed)
    if extra:
        raise ConfigError(f"{where}: unknown keys {sorted(extra)}")
    missing = [k for k in required if k not in d]
    if missing:
        raise ConfigError(f"{where}: missing keys {missing}")
    return d


@dataclass(frozen=True)
class SignalSpec:
    kind: SignalKind
    n: int
    s: int = 0
    amplitude: float = 0.0
    rho: float = 1.0
    M: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ConfigError(f"signal n must be a positive integer, got {self.n!r}")
        if self.kind is SignalKind.SPARSE:
            if int(self.s) != self.s or not 0 <= self.s <= self.n:
                raise ConfigError(f"sparse signal needs 0 <= s <= n, got s={self.s!r}")
            if not math.isfinite(self.amplitude):
                raise ConfigError("amplitude must be finite")
        if self.kind is SignalKind.RHO_BALL:
            if not 0 < self.rho <= 2:
                raise ConfigError(f"rho must lie in (0, 2], got {self.rho!r}")
            if not (math.isfinite(self.M) and self.M > 0):
                raise ConfigError(f"M must be positive, got {self.M!r}")

    @classmethod
    def zero(cls, n: int) -> "SignalSpec":
        return cls(SignalKind.ZERO, n)

    @classmethod
    def sparse(cls, n: int, s: int, amplitude: float) -> "SignalSpec":
        return cls(SignalKind.SPARSE, n, s=int(s), amplitude=float(amplitude))

    @classmethod
    def rho_ball(cls, n: int, rho: float, M: float) -> "SignalSpec":
        return cls(SignalKind.RHO_BALL, n, rho=float(rho), M=float(M))

    @classmethod
    def from_dict(cls, d) -> "SignalSpec":
        d = _strict_keys(d, ("kind", "n", "s", "amplitude", "rho", "M"), "signal", ("kind", "n"))
        try:
            kind = SignalKind(d["kind"])
        except ValueError:
            raise ConfigError(f"signal: unknown kind {d['kind']!r}") from None
        allowed = {
            SignalKind.ZERO: set(),
            SignalKind.SPARSE: {"s", "amplitude"},
            SignalKind.RHO_BALL: {"rho", "M"},
        }[kind]
        extra = set(d) - {"kind", "n"} - allowed
        if extra:
            raise ConfigError(f"signal: keys {sorted(extra)} do not apply to {kind.value}")
        if kind is SignalKind.SPARSE:
            return cls.sparse(d["n"], d.get("s", 0), d.get("amplitude", 0.0))
        if kind is SignalKind.RHO_BALL:
            return cls.rho_ball(d["n"], d.get("rho", 1.0), d.get("M", 1.0))
        return cls.zero(d["n"])

    def to_dict(self) -> dict:
        d: Dict[str, Any] = {"kind": self.kind.value, "n": self.n}
        if self.kind is SignalKind.SPARSE:
            d.update(s=self.s, amplitude=self.amplitude)
        elif self.kind is SignalKind.RHO_BALL:
            d.update(rho=self.rho, M=self.M)
        return d


@dataclass(frozen=True)
class NoiseSpec:
    kind: NoiseKind = NoiseKind.GAUSSIAN
    sigma: float = 1.0
    dof: Optional[float] = None

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ConfigError(f"noise sigma must be positive, got {self.sigma!r}")
        if self.kind is NoiseKind.STUDENT_T and not (self.dof is not None and self.dof > 2):
            raise ConfigError("student_t noise needs dof > 2 for a finite variance")

    @classmethod
    def from_dict(cls, d) -> "NoiseSpec":
        d = _strict_keys(d, ("kind", "sigma", "dof"), "noise", ("kind",))
        try:
            kind = NoiseKind(d["kind"])
        except ValueError:
            raise ConfigError(f"noise: unknown kind {d['kind']!r}") from None
        if kind is NoiseKind.GAUSSIAN and "dof" in d:
            raise ConfigError("noise: dof does not apply to gaussian noise")
        return cls(kind, float(d.get("sigma", 1.0)), d.get("dof"))

    def to_dict(self) -> dict:
        d: Dict[str, Any] = {"kind": self.kind.value, "sigma": self.sigma}
        if self.kind is NoiseKind.STUDENT_T:
            d["dof"] = self.dof
        return d

    @property
    def sigma2(self) -> float:
        return self.sigma * self.sigma


def _rho_ball(rng: np.random.Generator, n: int, rho: float, M: float) -> np.ndarray:
    mags = np.abs(rng.standard_normal(n))
    signs = rng.choice([-1.0, 1.0], size=n)
    beta = signs * mags * (M / np.sum(mags**rho)) ** (1.0 / rho)
    # rounding can leave the sum an ulp above M; step toward 0 until inside
    while np.sum(np.abs(beta) ** rho) > M:
        beta = np.nextafter(beta, 0.0)
    return beta


def generate(signal: SignalSpec, noise: NoiseSpec, seed: SeedSpec) -> Tuple[np.ndarray, Sample]:
    """Draw ``(mu_true, Sample(mu_true + noise))`` from the stream ``seed``."""
    rng = seed.generator()
    n = signal.n
    mu = np.zeros(n)
    if signal.kind is SignalKind.SPARSE and signal.s > 0:
        idx = rng.choice(n, size=signal.s, replace=False)
        mu[idx] = signal.amplitude * rng.choice([-1.0, 1.0], size=signal.s)
    elif signal.kind is SignalKind.RHO_BALL:
        mu = _rho_ball(rng, n, signal.rho, signal.M)
    if noise.kind is NoiseKind.GAUSSIAN:
        eps = noise.sigma * rng.standard_normal(n)
    else:
        eps = noise.sigma * math.sqrt((noise.dof - 2.0) / noise.dof) * rng.standard_t(noise.dof, size=n)
    return mu, Sample(mu + eps, sigma2=noise.sigma2)


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    signal: SignalSpec
    noise: NoiseSpec = NoiseSpec()
    replicas: int = 100
    seed: SeedSpec = SeedSpec(0)
    criterion_grid: Tuple[PenaltySpec, ...] = (PenaltySpec.mallows_cp(),)
    sweep: Dict[str, Any] = field(default_factory=dict)
    output_path: str = "."
    alpha: Any = DEFAULT_ALPHA
    window_frac: Tuple[float, float] = DEFAULT_WINDOW

    _KEYS = (
        "name",
        "signal",
        "noise",
        "replicas",
        "seed",
        "criterion_grid",
        "sweep",
        "output_path",
        "alpha",
        "window_frac",
    )
    _SWEEP_KEYS = {
        "phase_transition": {"n", "C", "Cprime"},
        "oracle_ratio": {"n", "s"},
        "variance_validation": {"n", "s"},
        "threshold_law": {"n", "k"},
    }

    def __post_init__(self):
        if self.name not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.name!r}; choose from {EXPERIMENTS}")
        if int(self.replicas) != self.replicas or self.replicas < 1:
            raise ConfigError("replicas must be a positive integer")
        if not self.criterion_grid:
            raise ConfigError("criterion_grid must not be empty")
        extra = set(self.sweep) - self._SWEEP_KEYS[self.name]
        if extra:
            raise ConfigError(f"sweep keys {sorted(extra)} do not apply to {self.name}")
        for key, vals in self.sweep.items():
            if key == "Cprime":
                if not isinstance(vals, (int, float)):
                    raise ConfigError("sweep.Cprime must be a number")
                continue
            if not isinstance(vals, (list, tuple)) or not vals:
                raise ConfigError(f"sweep.{key} must be a non-empty list")
        if "s" in self.sweep and self.signal.kind is SignalKind.RHO_BALL:
            raise ConfigError("sweep.s needs a zero or sparse signal")
        if not (self.alpha == "calibrate" or (isinstance(self.alpha, (int, float)) and self.alpha > 0)):
            raise ConfigError("alpha must be a positive number or 'calibrate'")
        lo, hi = self.window_frac
        if not 0 < lo < hi <= 1:
            raise ConfigError("window_frac must satisfy 0 < lo < hi <= 1")
        getattr(self, f"_validate_{self.name}")()

    def _validate_phase_transition(self):
        if self.signal.kind is not SignalKind.ZERO:
            raise ConfigError("phase_transition runs on the zero signal")
        for spec in self.criterion_grid:
            if spec.family not in (PenaltyFamily.BIRGE_MASSART, PenaltyFamily.FDR):
                raise ConfigError("phase_transition criteria must be birge_massart or fdr")

    def _validate_oracle_ratio(self):
        if not any(s.family is PenaltyFamily.MALLOWS_CP for s in self.criterion_grid):
            raise ConfigError("oracle_ratio needs mallows_cp in criterion_grid")
        for spec in self.criterion_grid:
            if spec.family is PenaltyFamily.CUSTOM_TABLE:
                raise ConfigError("custom tables depend on n and cannot be swept")

    def _validate_variance_validation(self):
        if [s.family for s in self.criterion_grid] != [PenaltyFamily.MALLOWS_CP]:
            raise ConfigError("variance_validation uses mallows_cp with the estimated variance only")

    def _validate_threshold_law(self):
        if self.signal.kind is not SignalKind.ZERO:
            raise ConfigError("threshold_law runs on the zero signal")
        if self.noise.kind is not NoiseKind.GAUSSIAN:
            raise ConfigError("threshold_law uses gaussian noise")
        if "k" not in self.sweep:
            raise ConfigError("threshold_law needs a non-empty sweep.k")

    @classmethod
    def from_dict(cls, d) -> "ExperimentConfig":
        d = _strict_keys(d, cls._KEYS, "config", ("name", "signal"))
        kw: Dict[str, Any] = {"name": d["name"], "signal": SignalSpec.from_dict(d["signal"])}
        if "noise" in d:
            kw["noise"] = NoiseSpec.from_dict(d["noise"])
        if "replicas" in d:
            kw["replicas"] = d["replicas"]
        if "seed" in d:
            kw["seed"] = _seed_from(d["seed"])
        if "criterion_grid" in d:
            if not isinstance(d["criterion_grid"], list):
                raise ConfigError("criterion_grid must be a list")
            try:
                kw["criterion_grid"] = tuple(PenaltySpec.from_dict(c) for c in d["criterion_grid"])
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"criterion_grid: {exc}") from None
        if "sweep" in d:
            kw["sweep"] = dict(_strict_keys(d["sweep"], ("n", "s", "C", "Cprime", "k"), "sweep"))
        if "output_path" in d:
            kw["output_path"] = str(d["output_path"])
        if "alpha" in d:
            kw["alpha"] = d["alpha"]
        if "window_frac" in d:
            wf = d["window_frac"]
            if not isinstance(wf, list) or len(wf) != 2:
                raise ConfigError("window_frac must be a two-element list")
            kw["window_frac"] = (float(wf[0]), float(wf[1]))
        return cls(**kw)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "signal": self.signal.to_dict(),
            "noise": self.noise.to_dict(),
            "replicas": self.replicas,
            "seed": {"master_seed": self.seed.master_seed, "stream_id": self.seed.stream_id},
            "criterion_grid": [c.to_dict() for c in self.criterion_grid],
            "sweep": self.sweep,
            "output_path": self.output_path,
            "alpha": self.alpha,
            "window_frac": list(self.window_frac),
        }


def _seed_from(value) -> SeedSpec:
    try:
        if isinstance(value, int) and not isinstance(value, bool):
            return SeedSpec(value)
        d = _strict_keys(value, ("master_seed", "stream_id"), "seed", ("master_seed",))
        return SeedSpec(d["master_seed"], d.get("stream_id", 0))
    except ValueError as exc:
        raise ConfigError(f"seed: {exc}") from None


def load_config(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    return ExperimentConfig.from_dict(raw)


@dataclass(frozen=True)
class ReportRow:
    experiment: str
    replica: int
    parameters: Dict[str, Any]
    k_hat: Optional[int]
    risk: Optional[float]
    oracle_risk: float
    sigma2_hat: Optional[float] = None
    degenerate: bool = False


@dataclass
class ExperimentResult:
    name: str
    header: Tuple[str, ...]
    rows: List[tuple]
    summary: Dict[str, Any]
    report_rows: List[ReportRow] = field(default_factory=list)
    tail_reports: List[TailCheckReport] = field(default_factory=list)


# Experiments.


def _n_values(config: ExperimentConfig) -> List[int]:
    return [int(n) for n in config.sweep.get("n", [config.signal.n])]


def _signal_for(config: ExperimentConfig, n: int, s: Optional[int] = None) -> SignalSpec:
    sig = replace(config.signal, n=n)
    if s is not None:
        amp = config.signal.amplitude
        sig = SignalSpec.zero(n) if s == 0 else SignalSpec.sparse(n, s, amp)
    return sig


def _rows_to_table(name: str, rows: List[ReportRow]) -> Tuple[Tuple[str, ...], List[tuple]]:
    keys = sorted(rows[0].parameters) if rows else []
    header = ("experiment", "replica", *keys, *REPORT_FIELDS)
    table = []
    for row in rows:
        if sorted(row.parameters) != keys:
            raise ValueError("report rows of one experiment must share parameter keys")
        table.append(
            (
                row.experiment,
                row.replica,
                *(row.parameters[k] for k in keys),
                row.k_hat,
                row.risk,
                row.oracle_risk,
                row.sigma2_hat,
                row.degenerate,
            )
        )
    return header, table


def _quantiles(x) -> Dict[str, Optional[float]]:
    x = np.asarray(x, dtype=float)
    x = x[np.isfinite(x)]
    if x.size == 0:
        return {"mean": None, "median": None, "q10": None, "q90": None}
    return {
        "mean": float(np.mean(x)),
        "median": float(np.median(x)),
        "q10": float(np.quantile(x, 0.1)),
        "q90": float(np.quantile(x, 0.9)),
    }


def _selected_and_oracle(sample: Sample, mu, sigma2: float, spec: PenaltySpec) -> Tuple[int, float, float]:
    curve = criterion_curve(sample, sigma2, spec)
    k_hat = argmin_k(curve.values)
    risks = risk_curve(sample, mu, estimate_kind(spec))
    return k_hat, float(risks[k_hat]), float(risks.min())


def run_phase_transition(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Hard-criterion selection on pure noise across a grid of penalty constants."""
    specs = list(config.criterion_grid)
    cprime = float(config.sweep.get("Cprime", 0.0))
    specs += [PenaltySpec.birge_massart(C, cprime) for C in config.sweep.get("C", [])]
    rows: List[ReportRow] = []
    summary_rows = []
    for n in _n_values(config):
        signal = _signal_for(config, n)

        def one(r):
            mu, sample = generate(signal, config.noise, derive_stream(config.seed, r))
            return [_selected_and_oracle(sample, mu, config.noise.sigma2, spec) for spec in specs]

        per_replica = replica_map(one, config.replicas, threads)
        for j, spec in enumerate(specs):
            ks = []
            for r, results in enumerate(per_replica):
                k_hat, risk, oracle = results[j]
                ks.append(k_hat)
                params = {"n": n, "criterion": spec.label(), "C": spec.C, "Cprime": spec.Cprime}
                rows.append(ReportRow(config.name, r, params, k_hat, risk, oracle))
            summary_rows.append({"n": n, "criterion": spec.label(), "C": spec.C, "Cprime": spec.Cprime, "k_hat": _quantiles(ks)})
    header, table = _rows_to_table(config.name, rows)
    return ExperimentResult(config.name, header, table, {"groups": summary_rows}, rows)


def run_oracle_ratio(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Risk of the selected estimate against the best k in hindsight."""
    s_values = config.sweep.get("s", [None])
    rows: List[ReportRow] = []
    summary_rows = []
    for n in _n_values(config):
        for s in s_values:
            signal = _signal_for(config, n, s)

            def one(r):
                mu, sample = generate(signal, config.noise, derive_stream(config.seed, r))
                return [
                    _selected_and_oracle(sample, mu, config.noise.sigma2, spec)
                    for spec in config.criterion_grid
                ]

            per_replica = replica_map(one, config.replicas, threads)
            for j, spec in enumerate(config.criterion_grid):
                risks, oracles, ks = [], [], []
                for r, results in enumerate(per_replica):
                    k_hat, risk, oracle = results[j]
                    risks.append(risk)
                    oracles.append(oracle)
                    ks.append(k_hat)
                    params = {"n": n, "s": signal.s, "criterion": spec.label()}
                    rows.append(ReportRow(config.name, r, params, k_hat, risk, oracle))
                mean_risk, mean_oracle = float(np.mean(risks)), float(np.mean(oracles))
                summary_rows.append(
                    {
                        "n": n,
                        "s": signal.s,
                        "criterion": spec.label(),
                        "mean_risk": mean_risk,
                        "mean_oracle_risk": mean_oracle,
                        "risk_ratio": mean_risk / mean_oracle if mean_oracle > 0 else None,
                        "risk_ratio_infinite": bool(mean_oracle == 0 and mean_risk > 0),
                        "k_hat": _quantiles(ks),
                    }
                )
    header, table = _rows_to_table(config.name, rows)
    return ExperimentResult(config.name, header, table, {"groups": summary_rows}, rows)


def _calibration_seed(seed: SeedSpec) -> SeedSpec:
    return derive_stream(derive_stream(seed, 0), 1)


def run_variance_validation(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """Slope-heuristic variance estimates and the Cp selections they drive.

    Each replica yields a ``data_driven`` row and a ``known_sigma`` row on the
    same draw, so both k_hat distributions line up replica by replica.
    """
    s_values = config.sweep.get("s", [None])
    rows: List[ReportRow] = []
    summary_rows = []
    cp = PenaltySpec.mallows_cp()
    for n in _n_values(config):
        if config.alpha == "calibrate":
            alpha = calibrate_alpha(n, 200, config.window_frac, _calibration_seed(config.seed), threads)
        else:
            alpha = float(config.alpha)
        for s in s_values:
            signal = _signal_for(config, n, s)
            sigma2 = config.noise.sigma2

            def one(r):
                mu, sample = generate(signal, config.noise, derive_stream(config.seed, r))
                fit = estimate_sigma2(sample, alpha, config.window_frac)
                risks = risk_curve(sample, mu, ThresholdKind.SOFT)
                known_k = argmin_k(criterion_curve(sample, sigma2, cp).values)
                known = (known_k, float(risks[known_k]), None, False)
                if fit.sigma2_hat > 0:
                    k_dd = argmin_k(criterion_curve(sample, fit.sigma2_hat, cp).values)
                    dd = (k_dd, float(risks[k_dd]), fit.sigma2_hat, False)
                else:
                    dd = (None, None, fit.sigma2_hat, True)
                return dd, known, float(risks.min())

            per_replica = replica_map(one, config.replicas, threads)
            for label, j in (("data_driven", 0), ("known_sigma", 1)):
                for r, res in enumerate(per_replica):
                    k_hat, risk, s2, degenerate = res[j]
                    params = {"n": n, "s": signal.s, "criterion": label, "alpha": alpha}
                    rows.append(ReportRow(config.name, r, params, k_hat, risk, res[2], s2, degenerate))
            ratios = np.array([res[0][2] / sigma2 for res in per_replica])
            dd_k = [res[0][0] for res in per_replica if not res[0][3]]
            summary_rows.append(
                {
                    "n": n,
                    "s": signal.s,
                    "alpha": alpha,
                    "noise": config.noise.to_dict(),
                    "sigma2_ratio_mean": float(np.mean(ratios)),
                    "sigma2_ratio_bias": float(np.mean(ratios) - 1.0),
                    "sigma2_ratio_sd": float(np.std(ratios, ddof=1)) if ratios.size > 1 else 0.0,
                    "positive_fraction": float(np.mean(ratios > 0)),
                    "degenerate_count": int(np.sum(ratios <= 0)),
                    "k_hat_data_driven": _quantiles(dd_k),
                    "k_hat_known_sigma": _quantiles([res[1][0] for res in per_replica]),
                }
            )
    header, table = _rows_to_table(config.name, rows)
    return ExperimentResult(config.name, header, table, {"groups": summary_rows}, rows)


def run_threshold_law(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    """One :class:`TailCheckReport` per ``(n, k)`` on the sweep grid."""
    reports = []
    for n in _n_values(config):
        for k in config.sweep["k"]:
            if not 0 <= int(k) < n:
                raise ConfigError(f"sweep k={k} outside 0..{n - 1} for n={n}")
            reports.append(
                threshold_law_check(n, int(k), config.replicas, config.noise.sigma2, config.seed, threads)
            )
    summary = {
        "groups": [
            {
                "n": rep.n,
                "k": rep.k,
                "plug_in_rel_error": rep.plug_in_rel_error,
                "log_ratio": rep.log_ratio,
            }
            for rep in reports
        ]
    }
    rows = [rep.to_row() for rep in reports]
    return ExperimentResult(config.name, TAIL_CSV_HEADER, rows, summary, tail_reports=reports)


_RUNNERS = {
    "phase_transition": run_phase_transition,
    "oracle_ratio": run_oracle_ratio,
    "variance_validation": run_variance_validation,
    "threshold_law": run_threshold_law,
}


def run_experiment(config: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    return _RUNNERS[config.name](config, threads)


# Report files.


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def format_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def write_report(result: ExperimentResult, config: ExperimentConfig, out_dir=None) -> Tuple[Path, Path]:
    """Write ``<name>.csv`` and ``<name>_summary.json``; return both paths."""
    out = Path(out_dir if out_dir is not None else config.output_path)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{result.name}.csv"
    json_path = out / f"{result.name}_summary.json"
    with open(csv_path, "w", newline="") as fh:
        fh.write(format_csv(result.header, result.rows))
    summary = {
        "experiment": result.name,
        "config": config.to_dict(),
        "rng": {"algorithm": RNG_ALGORITHM, "numpy": RNG_NUMPY_VERSION},
        "summary": result.summary,
    }
    with open(json_path, "w", newline="") as fh:
        fh.write(json.dumps(_json_safe(summary), indent=2, sort_keys=True, allow_nan=False) + "\n")
    return csv_path, json_path


def default_config(name: str, output_path: str = ".") -> ExperimentConfig:
    """Desk-scale configuration for each named experiment."""
    base = Path(__file__).with_name("configs") / f"{name}.json"
    if not base.exists():
        raise ConfigError(f"no default config for {name!r}")
    with open(base) as fh:
        raw = json.load(fh)
    raw["output_path"] = output_path
    return ExperimentConfig.from_dict(raw)
