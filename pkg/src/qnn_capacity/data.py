"""
Capacity-fade series: CSV ingestion, train/test splits, normalization bounds
and state-of-health helpers.

CSV layout::

    # battery_id=B0005
    # rated_ah=2.0
    cycle,capacity_ah
    1,1.8565
    2,1.8463

Lines starting with ``#`` are comments; ``key=value`` comments before the
header carry metadata. LF and CRLF line endings are both accepted.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .encoding import FeatureBounds
from .exceptions import (
    DegenerateBounds,
    DegenerateSplit,
    DuplicateCycle,
    MalformedCsv,
    NonPositiveCapacity,
    NonPositiveRated,
    TooFewRecords,
)

HEADER = ("cycle", "capacity_ah")
MIN_SPLIT_RECORDS = 5


@dataclass(frozen=True)
class CapacityRecord:
    cycle: int
    capacity: float

    def __post_init__(self):
        if self.cycle < 1:
            raise ValueError(f"cycle must be >= 1, got {self.cycle}")
        if not self.capacity > 0:
            raise ValueError(f"capacity must be positive, got {self.capacity}")


@dataclass(frozen=True)
class CapacitySeries:
    battery_id: str
    rated_capacity: float
    records: tuple = field(default_factory=tuple)

    def __post_init__(self):
        records = tuple(self.records)
        for prev, cur in zip(records, records[1:]):
            if cur.cycle <= prev.cycle:
                raise ValueError("records must be strictly increasing in cycle")
        object.__setattr__(self, "records", records)

    def __len__(self):
        return len(self.records)

    @property
    def cycles(self) -> np.ndarray:
        return np.array([r.cycle for r in self.records], dtype=np.int64)

    @property
    def capacities(self) -> np.ndarray:
        return np.array([r.capacity for r in self.records], dtype=np.float64)

    def subset(self, records) -> "CapacitySeries":
        return CapacitySeries(self.battery_id, self.rated_capacity, tuple(records))

    @classmethod
    def from_arrays(cls, cycles, capacities, battery_id="series", rated_capacity=None):
        pairs = sorted(zip((int(c) for c in cycles), (float(q) for q in capacities)))
        records = tuple(CapacityRecord(c, q) for c, q in pairs)
        if rated_capacity is None:
            rated_capacity = max((r.capacity for r in records), default=1.0)
        return cls(battery_id, float(rated_capacity), records)


def _parse_cycle(text, line_no):
    try:
        value = int(text)
    except ValueError:
        try:
            f = float(text)
        except ValueError:
            raise MalformedCsv(line_no, f"cycle {text!r} is not an integer") from None
        if not f.is_integer():
            raise MalformedCsv(line_no, f"cycle {text!r} is not an integer") from None
        value = int(f)
    if value < 1:
        raise MalformedCsv(line_no, f"cycle must be >= 1, got {value}")
    return value


def load_csv(path) -> CapacitySeries:
    meta = {}
    header_seen = False
    rows = []
    with open(os.fspath(path), "r", encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if not header_seen and "=" in body:
                key, _, value = body.partition("=")
                meta[key.strip()] = value.strip()
            continue
        cells = [c.strip() for c in line.split(",")]
        if not header_seen:
            if tuple(cells) != HEADER:
                raise MalformedCsv(line_no, f"expected header {','.join(HEADER)!r}")
            header_seen = True
            continue
        if len(cells) != 2:
            raise MalformedCsv(line_no, f"expected 2 fields, got {len(cells)}")
        cycle = _parse_cycle(cells[0], line_no)
        try:
            capacity = float(cells[1])
        except ValueError:
            raise MalformedCsv(line_no, f"capacity {cells[1]!r} is not a number") from None
        if not math.isfinite(capacity):
            raise MalformedCsv(line_no, "capacity must be finite")
        if capacity <= 0:
            raise NonPositiveCapacity(line_no)
        rows.append((cycle, capacity))
    if not header_seen:
        raise MalformedCsv(len(lines) + 1, "missing header")
    if not rows:
        raise MalformedCsv(len(lines) + 1, "no data rows")
    if "rated_ah" not in meta:
        raise MalformedCsv(1, "missing '# rated_ah=' metadata line")
    try:
        rated = float(meta["rated_ah"])
    except ValueError:
        raise MalformedCsv(1, f"rated_ah {meta['rated_ah']!r} is not a number") from None
    if not rated > 0:
        raise NonPositiveRated(f"rated capacity must be positive, got {rated}")
    seen = set()
    for cycle, _ in rows:
        if cycle in seen:
            raise DuplicateCycle(cycle)
        seen.add(cycle)
    rows.sort()
    battery_id = meta.get("battery_id") or os.path.splitext(os.path.basename(os.fspath(path)))[0]
    return CapacitySeries(battery_id, rated, tuple(CapacityRecord(c, q) for c, q in rows))


def write_csv(series: CapacitySeries, path) -> None:
    lines = [f"# battery_id={series.battery_id}",
             f"# rated_ah={series.rated_capacity!r}",
             ",".join(HEADER)]
    lines += [f"{r.cycle},{r.capacity!r}" for r in series.records]
    with open(os.fspath(path), "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _check_fraction(series, train_fraction):
    if len(series) < MIN_SPLIT_RECORDS:
        raise TooFewRecords(f"need at least {MIN_SPLIT_RECORDS} records, got {len(series)}")
    if not 0 < train_fraction < 1:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    n_train = math.ceil(train_fraction * len(series))
    if n_train >= len(series) or n_train < 1:
        raise DegenerateSplit(
            f"fraction {train_fraction} of {len(series)} records leaves an empty side")
    return n_train


def chronological_split(series: CapacitySeries, train_fraction: float):
    """First ``ceil(fraction * N)`` records train, the rest test."""
    n_train = _check_fraction(series, train_fraction)
    return series.subset(series.records[:n_train]), series.subset(series.records[n_train:])


def random_split(series: CapacitySeries, train_fraction: float, seed: int):
    """Seeded random split of the same sizes; both sides stay cycle-ordered."""
    n_train = _check_fraction(series, train_fraction)
    rng = np.random.default_rng(seed)
    mask = np.zeros(len(series), dtype=bool)
    mask[rng.permutation(len(series))[:n_train]] = True
    train = [r for r, m in zip(series.records, mask) if m]
    test = [r for r, m in zip(series.records, mask) if not m]
    return series.subset(train), series.subset(test)


def split(series, train_fraction, mode="chrono", seed=0):
    if mode == "chrono":
        return chronological_split(series, train_fraction)
    if mode == "random":
        return random_split(series, train_fraction, seed)
    raise ValueError(f"split mode must be 'chrono' or 'random', got {mode!r}")


def fit_bounds(train: CapacitySeries) -> FeatureBounds:
    cycles = train.cycles
    if cycles.size == 0 or cycles.min() == cycles.max():
        raise DegenerateBounds("need at least two distinct cycles to fit bounds")
    return FeatureBounds(int(cycles.min()), int(cycles.max()))


def soh(record: CapacityRecord, rated: float) -> float:
    if not rated > 0:
        raise NonPositiveRated(f"rated capacity must be positive, got {rated}")
    return record.capacity / rated


def eol_cycle(series: CapacitySeries, threshold: float = 0.7,
              rated: Optional[float] = None) -> Optional[int]:
    """First cycle whose state of health drops below ``threshold``; None if never."""
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold}")
    rated = series.rated_capacity if rated is None else rated
    for record in series.records:
        if soh(record, rated) < threshold:
            return record.cycle
    return None


def synthetic_fade(n_cycles=168, rated=2.0, floor=0.70, tau=80.0, noise=0.01, seed=1,
                   battery_id="SYN05") -> CapacitySeries:
    """Exponential fade toward ``floor * rated`` with seeded Gaussian noise.

    capacity(c) = rated * (floor + (1 - floor) * exp(-c / tau)) + N(0, noise^2)
    """
    cycles = np.arange(1, n_cycles + 1)
    clean = rated * (floor + (1.0 - floor) * np.exp(-cycles / tau))
    rng = np.random.default_rng(seed)
    noisy = clean + rng.normal(0.0, noise, size=cycles.size) if noise > 0 else clean
    return CapacitySeries.from_arrays(cycles, noisy, battery_id=battery_id, rated_capacity=rated)
