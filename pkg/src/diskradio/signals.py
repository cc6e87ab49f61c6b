"""Shared value types: disk-activity traces and band-power envelopes.

A transmission is modeled in two layers. An ActivityTrace is the schedule
of disk operations a process performs; a PowerSeries is the band-power
envelope (dBm, uniformly sampled) that activity induces at a receiver.
Every stage of the pipeline consumes and produces these two types, and
both round-trip through small CSV files.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError

READ = "read"
WRITE = "write"
SLEEP = "sleep"
OP_KINDS = (READ, WRITE, SLEEP)

# Power values this far down are treated as "no signal" when converting
# from linear; keeps log10 away from zero without affecting real levels.
MIN_DBM = -300.0

_FLOAT_FMT = "%.10g"


def dbm_to_mw(x):
    """Convert dBm values (scalar or array) to linear milliwatts."""
    return 10.0 ** (np.asarray(x, dtype=float) / 10.0)


def mw_to_dbm(p):
    """Convert linear milliwatts to dBm, clamping at MIN_DBM."""
    p = np.asarray(p, dtype=float)
    floor_mw = 10.0 ** (MIN_DBM / 10.0)
    return 10.0 * np.log10(np.maximum(p, floor_mw))


@dataclass(frozen=True)
class OpEvent:
    """One scheduled disk operation (or idle gap) in a trace."""

    kind: str
    start: float
    duration: float

    def __post_init__(self):
        if self.kind not in OP_KINDS:
            raise ConfigError(f"kind: unknown op kind {self.kind!r}")
        if self.duration <= 0:
            raise ConfigError(f"duration: must be > 0, got {self.duration}")
        if self.start < 0:
            raise ConfigError(f"start: must be >= 0, got {self.start}")

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass(frozen=True)
class ActivityTrace:
    """Time-ordered, non-overlapping sequence of OpEvents."""

    events: tuple[OpEvent, ...]
    total_duration: float

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        t = 0.0
        for ev in self.events:
            if ev.start < t - 1e-9:
                raise ConfigError(
                    f"events: overlap at t={ev.start:.6f} (previous end {t:.6f})"
                )
            t = ev.end
        if self.events and self.total_duration < t - 1e-9:
            raise ConfigError(
                f"total_duration: {self.total_duration} ends before last event ({t})"
            )

    @property
    def busy_events(self) -> tuple[OpEvent, ...]:
        return tuple(ev for ev in self.events if ev.kind != SLEEP)

    def shifted(self, offset: float) -> "ActivityTrace":
        return ActivityTrace(
            tuple(OpEvent(ev.kind, ev.start + offset, ev.duration) for ev in self.events),
            self.total_duration + offset,
        )


@dataclass(frozen=True)
class PowerSeries:
    """Uniformly sampled band-power envelope in dBm."""

    samples: np.ndarray
    sample_rate: float
    t0: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        if self.sample_rate <= 0:
            raise ConfigError(f"sample_rate: must be > 0, got {self.sample_rate}")
        if arr.ndim != 1:
            raise ConfigError("samples: expected a 1-D array")
        if arr.size and not np.all(np.isfinite(arr)):
            raise ConfigError("samples: non-finite power value")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.samples.size) / self.sample_rate

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def with_samples(self, samples) -> "PowerSeries":
        return PowerSeries(np.asarray(samples, dtype=float), self.sample_rate, self.t0)

    def padded(self, seconds: float, level: float | None = None) -> "PowerSeries":
        """Extend the capture past the transmission with floor samples."""
        if seconds <= 0 or len(self) == 0:
            return self
        if level is None:
            level = float(self.samples.min())
        n = int(round(seconds * self.sample_rate))
        return self.with_samples(
            np.concatenate([self.samples, np.full(n, level)]))

    def index_at(self, t: float) -> int:
        return int(round((t - self.t0) * self.sample_rate))


def busy_mask(trace: ActivityTrace, sample_rate: float, n: int | None = None,
              guard_frac: float = 0.0) -> np.ndarray:
    """Boolean mask of samples falling inside read/write events.

    guard_frac shrinks each event symmetrically by that fraction of its
    duration, excluding edge samples from level measurements.
    """
    if n is None:
        n = int(np.ceil(trace.total_duration * sample_rate))
    mask = np.zeros(n, dtype=bool)
    for ev in trace.busy_events:
        pad = guard_frac * ev.duration
        i0 = int(np.ceil((ev.start + pad) * sample_rate))
        i1 = int(np.floor((ev.end - pad) * sample_rate))
        mask[max(i0, 0):min(i1, n)] = True
    return mask


def idle_mask(trace: ActivityTrace, sample_rate: float, n: int | None = None,
              guard_frac: float = 0.0) -> np.ndarray:
    """Complement of busy_mask with the same guard band around busy edges."""
    if n is None:
        n = int(np.ceil(trace.total_duration * sample_rate))
    mask = np.ones(n, dtype=bool)
    for ev in trace.busy_events:
        pad = guard_frac * ev.duration
        i0 = int(np.floor((ev.start - pad) * sample_rate))
        i1 = int(np.ceil((ev.end + pad) * sample_rate))
        mask[max(i0, 0):min(i1, n)] = False
    return mask


def measure_snr(series: PowerSeries, trace: ActivityTrace,
                guard_frac: float = 0.1) -> float:
    """On/off separation in dB, averaging linear power within each class.

    The trace provides ground-truth op positions; edge samples are excluded
    by a guard band so timing jitter does not contaminate the estimate.
    """
    n = len(series)
    on = busy_mask(trace, series.sample_rate, n, guard_frac)
    off = idle_mask(trace, series.sample_rate, n, guard_frac)
    if not on.any() or not off.any():
        raise ConfigError("trace: needs both busy and idle spans to measure SNR")
    p = dbm_to_mw(series.samples)
    return float(mw_to_dbm(p[on].mean()) - mw_to_dbm(p[off].mean()))


def power_sum(a: PowerSeries, b: PowerSeries) -> PowerSeries:
    """Superimpose two envelopes by adding their linear powers."""
    if len(a) != len(b) or a.sample_rate != b.sample_rate:
        raise ConfigError("samples: series shapes/rates differ; cannot superimpose")
    return a.with_samples(mw_to_dbm(dbm_to_mw(a.samples) + dbm_to_mw(b.samples)))


# ---------------------------------------------------------------------------
# CSV round-trips. Every file starts with a single '#' metadata line
# (key=value pairs) so outputs are self-describing yet diff-able.
# ---------------------------------------------------------------------------


def format_meta(meta: dict) -> str:
    parts = [f"{k}={v}" for k, v in meta.items()]
    return "# " + " ".join(parts)


def parse_meta(line: str) -> dict:
    meta = {}
    for tok in line.lstrip("#").split():
        if "=" in tok:
            k, _, v = tok.partition("=")
            meta[k] = v
    return meta


def write_trace_csv(trace: ActivityTrace, path, meta: dict | None = None) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        if meta:
            fh.write(format_meta(meta) + "\n")
        w = csv.writer(fh)
        w.writerow(["kind", "start_s", "duration_s"])
        for ev in trace.events:
            w.writerow([ev.kind, _FLOAT_FMT % ev.start, _FLOAT_FMT % ev.duration])


def read_trace_csv(path) -> ActivityTrace:
    path = Path(path)
    events = []
    with path.open() as fh:
        rows = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
    for row in csv.reader(rows[1:]):
        events.append(OpEvent(row[0], float(row[1]), float(row[2])))
    total = events[-1].end if events else 0.0
    return ActivityTrace(tuple(events), total)


def write_series_csv(series: PowerSeries, path, meta: dict | None = None) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        if meta:
            fh.write(format_meta(meta) + "\n")
        w = csv.writer(fh)
        w.writerow(["t_s", "power_dbm"])
        for t, v in zip(series.times, series.samples):
            w.writerow([_FLOAT_FMT % t, _FLOAT_FMT % v])


def read_series_csv(path) -> PowerSeries:
    path = Path(path)
    with path.open() as fh:
        rows = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
    ts, vals = [], []
    for row in csv.reader(rows[1:]):
        ts.append(float(row[0]))
        vals.append(float(row[1]))
    if len(ts) < 2:
        raise ConfigError("series: need at least two samples to infer sample rate")
    dt = np.diff(ts)
    if not np.allclose(dt, dt[0], rtol=1e-6, atol=1e-9):
        raise ConfigError("series: non-uniform sample spacing")
    return PowerSeries(np.array(vals), 1.0 / dt[0], ts[0])
