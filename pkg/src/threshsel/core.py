"""Samples, order statistics of |y|, and seeded random streams."""

from __future__ import annotations

import csv
import hashlib
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

#: Bit generator behind every random stream. Philox is counter based, so a
#: (master_seed, stream_id) pair maps to a 128-bit key with no state sharing.
RNG_ALGORITHM = "numpy.random.Philox(4x64-10)"
RNG_NUMPY_VERSION = np.__version__

_U64 = 1 << 64


class SampleFormatError(ValueError):
    """Raised when a CSV file does not hold a valid single-column sample."""


@dataclass(frozen=True)
class Sample:
    """Observed vector ``y`` with an optional known noise variance."""

    values: np.ndarray
    sigma2: Optional[float] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True).reshape(-1)
        if values.size < 1:
            raise ValueError("a sample needs at least one observation")
        if not np.all(np.isfinite(values)):
            raise ValueError("sample values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.sigma2 is not None:
            s2 = float(self.sigma2)
            if not math.isfinite(s2) or s2 < 0:
                raise ValueError(f"sigma2 must be a finite nonnegative number, got {self.sigma2!r}")
            object.__setattr__(self, "sigma2", s2)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def scaled(self, c: float) -> "Sample":
        sigma2 = None if self.sigma2 is None else self.sigma2 * c * c
        return Sample(c * self.values, sigma2)


@dataclass(frozen=True)
class OrderStats:
    """``|y|`` sorted in decreasing order, with ``perm[r]`` the original index of rank ``r``."""

    abs_desc: np.ndarray
    perm: np.ndarray

    @property
    def n(self) -> int:
        return int(self.abs_desc.size)

    def levels(self) -> np.ndarray:
        """Threshold levels for every k in ``0..n`` (the last one is 0)."""
        return np.append(self.abs_desc, 0.0)

    def count_above(self) -> np.ndarray:
        """Number of coordinates with ``|y_i|`` strictly above the level, for each k.

        Equals k whenever the absolute values are distinct.
        """
        levels = self.levels()
        return np.searchsorted(-self.abs_desc, -levels, side="left")


def abs_order_statistics(sample: Sample) -> OrderStats:
    a = np.abs(sample.values)
    # stable sort on -|y| keeps the smaller index first among ties
    perm = np.argsort(-a, kind="stable")
    abs_desc = a[perm]
    abs_desc.setflags(write=False)
    perm.setflags(write=False)
    return OrderStats(abs_desc=abs_desc, perm=perm)


def check_k(k: int, n: int) -> int:
    if isinstance(k, (bool, np.bool_)) or int(k) != k:
        raise ValueError(f"k must be an integer, got {k!r}")
    k = int(k)
    if not 0 <= k <= n:
        raise ValueError(f"k={k} is outside 0..{n}")
    return k


def threshold_level(stats: OrderStats, k: int) -> float:
    """Level ``|y|_(k+1)`` used at step k; 0 for the full fit ``k = n``."""
    k = check_k(k, stats.n)
    if k == stats.n:
        return 0.0
    return float(stats.abs_desc[k])


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v or not 0 <= int(v) < _U64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    def generator(self) -> np.random.Generator:
        key = (self.master_seed << 64) | self.stream_id
        return np.random.Generator(np.random.Philox(key=key))


def derive_stream(seed: SeedSpec, replica: int) -> SeedSpec:
    """Child stream for one replica.

    The child id is a keyed BLAKE2b digest of ``(stream_id, replica)``, so it
    does not depend on which other replicas were drawn before.
    """
    if int(replica) != replica or replica < 0:
        raise ValueError(f"replica must be a nonnegative integer, got {replica!r}")
    payload = seed.stream_id.to_bytes(8, "little") + int(replica).to_bytes(8, "little")
    digest = hashlib.blake2b(payload, digest_size=8, person=b"threshsel-strm").digest()
    return SeedSpec(seed.master_seed, int.from_bytes(digest, "little"))


def resolve_threads(threads: int) -> int:
    if threads < 0:
        raise ValueError("threads must be >= 0")
    return threads or (os.cpu_count() or 1)


def replica_map(fn: Callable[[int], T], replicas: int, threads: int = 1) -> List[T]:
    """Apply ``fn`` to ``0..replicas-1`` and return results in replica order."""
    workers = resolve_threads(threads)
    if workers == 1 or replicas < 2:
        return [fn(r) for r in range(replicas)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(replicas)))


def read_sample_csv(path: str | os.PathLike, sigma2: Optional[float] = None) -> Sample:
    """Read a one-column CSV of observations (column ``y``, header optional)."""
    values: List[float] = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if len(row) != 1:
                raise SampleFormatError(f"{path}:{lineno}: expected exactly one field, got {len(row)}")
            field = row[0].strip()
            if lineno == 1 and field == "y":
                continue
            try:
                v = float(field)
            except ValueError:
                raise SampleFormatError(f"{path}:{lineno}: not a number: {field!r}") from None
            if not math.isfinite(v):
                raise SampleFormatError(f"{path}:{lineno}: non-finite value {field!r}")
            values.append(v)
    if not values:
        raise SampleFormatError(f"{path}: no observations")
    return Sample(np.array(values), sigma2)


def write_sample_csv(path: str | os.PathLike, values: Sequence[float]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["y"])
        for v in values:
            w.writerow([repr(float(v))])
