"""Host-side countermeasure: flag covert-transmission-like I/O telemetry.

Per-process telemetry is two aligned series: I/O operations per second
and disk utilization. A clocked on-off transmitter leaves a distinctive
fingerprint: bursts start and stop only on multiples of the bit time, so
the series of activity transitions (op starts, busy-state changes) shows
a comb in its autocorrelation at the bit period. Benign activity (copy
loops, browser-style bursts) has no such clock. A duty-cycle gate keeps
always-busy and mostly-idle processes from being flagged.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, InsufficientDataError
from .signals import ActivityTrace, format_meta

DEFAULT_TELEMETRY_RATE = 50.0
DEFAULT_THRESHOLD = 0.6
MIN_LAG_S = 0.1
MAX_LAG_S = 5.0
DUTY_CYCLE_RANGE = (0.2, 0.8)
MIN_SPAN_S = 30.0

# Short smoothing kernel applied to the transition series before
# autocorrelation; tolerates bit clocks that sit off the window grid.
_TICK_KERNEL = np.array([0.5, 1.0, 0.5])


@dataclass(frozen=True)
class IoTelemetry:
    """Sampled per-process I/O rate and disk utilization."""

    iops: np.ndarray
    utilization: np.ndarray
    sample_rate: float
    process_label: str = ""

    def __post_init__(self):
        iops = np.asarray(self.iops, dtype=float)
        util = np.asarray(self.utilization, dtype=float)
        iops.setflags(write=False)
        util.setflags(write=False)
        object.__setattr__(self, "iops", iops)
        object.__setattr__(self, "utilization", util)
        if self.sample_rate <= 0:
            raise ConfigError(f"sample_rate: must be > 0, got {self.sample_rate}")
        if iops.shape != util.shape:
            raise ConfigError("utilization: iops and utilization lengths differ")
        if util.size and (util.min() < -1e-9 or util.max() > 1.0 + 1e-9):
            raise ConfigError("utilization: values must lie in [0, 1]")

    @property
    def duration(self) -> float:
        return self.iops.size / self.sample_rate


@dataclass(frozen=True)
class DetectionReport:
    """Outcome of periodicity analysis for one telemetry stream."""

    flagged: bool
    periodicity_score: float
    dominant_period: float | None
    duty_cycle_est: float


def telemetry_from_trace(trace: ActivityTrace, sample_rate: float = DEFAULT_TELEMETRY_RATE,
                         process_label: str = "") -> IoTelemetry:
    """Sample a schedule into (iops, utilization) windows.

    iops counts op starts per window, scaled to ops/second; utilization is
    the busy-time fraction per window. Sleeps are idle time, not ops.
    """
    if sample_rate <= 0:
        raise ConfigError(f"sample_rate: must be > 0, got {sample_rate}")
    n = int(np.ceil(trace.total_duration * sample_rate))
    window = 1.0 / sample_rate
    iops = np.zeros(n)
    busy = np.zeros(n)
    for ev in trace.busy_events:
        k = int(ev.start * sample_rate)
        if 0 <= k < n:
            iops[k] += sample_rate
        first = int(np.floor(ev.start * sample_rate))
        last = int(np.ceil(ev.end * sample_rate))
        for w in range(max(first, 0), min(last, n)):
            lo = w * window
            hi = lo + window
            busy[w] += max(0.0, min(ev.end, hi) - max(ev.start, lo))
    util = np.clip(np.round(busy * sample_rate, 12), 0.0, 1.0)
    return IoTelemetry(iops, util, sample_rate, process_label)


def _transition_series(tel: IoTelemetry) -> np.ndarray:
    """1 where disk activity started or the busy state changed."""
    du = np.abs(np.diff(tel.utilization, prepend=tel.utilization[:1]))
    ticks = (tel.iops > 0) | (du > 1e-9)
    return np.convolve(ticks.astype(float), _TICK_KERNEL, "same")


def _comb_fundamental(corr: np.ndarray, best: int, score: float,
                      min_lag: int) -> float:
    """Walk the strongest peak down to the comb fundamental.

    A clock whose period is a non-integer number of windows smears its
    fundamental peak over two lags while a harmonic stays sharp; if every
    subdivision point of the winning lag still shows comb support, the
    subdivided (possibly fractional) lag is the true period.
    """
    for div in (4, 3, 2):
        f = best / div
        if f < min_lag - 0.5:
            continue
        supported = True
        for m in range(1, div):
            lag = m * f
            lo, hi = int(np.floor(lag)), int(np.ceil(lag))
            v = corr[lo] if hi >= corr.size else max(corr[lo], corr[hi])
            if v < 0.4 * score:
                supported = False
                break
        if supported:
            return f
    return float(best)


def detect(tel: IoTelemetry, threshold: float = DEFAULT_THRESHOLD) -> DetectionReport:
    """Classify one telemetry stream.

    The periodicity score is the height of the largest non-zero-lag local
    peak of the normalized autocorrelation of the activity-transition
    series over lags 0.1-5 s. A stream is flagged when the score reaches
    the threshold and its duty cycle sits in the on-off keying band.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ConfigError(f"threshold: must be in [0, 1], got {threshold}")
    if tel.duration < MIN_SPAN_S:
        raise InsufficientDataError(
            f"telemetry spans {tel.duration:.1f}s; need >= {MIN_SPAN_S:.0f}s"
        )
    fs = tel.sample_rate
    duty = float(tel.utilization.mean())

    z = _transition_series(tel)
    z = z - z.mean()
    denom = float((z ** 2).sum())
    score = 0.0
    period: float | None = None
    if denom > 0:
        max_lag = min(int(round(MAX_LAG_S * fs)), z.size - 1)
        min_lag = max(int(round(MIN_LAG_S * fs)), 1)
        if max_lag > min_lag:
            corr = np.correlate(z, z, "full")[z.size - 1: z.size + max_lag] / denom
            lags = np.arange(corr.size)
            interior = (lags >= min_lag) & (lags < max_lag)
            peaks = interior.copy()
            peaks[1:-1] &= (corr[1:-1] >= corr[:-2]) & (corr[1:-1] >= corr[2:])
            peaks[0] = peaks[-1] = False
            peaks &= corr > 0
            if peaks.any():
                idx = np.flatnonzero(peaks)
                score = float(corr[idx].max())
                # A clock leaves near-equal peaks at every multiple of the
                # bit period; report the fundamental (earliest of the top).
                best = int(idx[corr[idx] >= 0.95 * score][0])
                period = _comb_fundamental(corr, best, score, min_lag) / fs

    flagged = (score >= threshold
               and DUTY_CYCLE_RANGE[0] <= duty <= DUTY_CYCLE_RANGE[1])
    return DetectionReport(
        flagged=flagged,
        periodicity_score=score,
        dominant_period=period,
        duty_cycle_est=duty,
    )


def write_telemetry_csv(tel: IoTelemetry, path, meta: dict | None = None) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        if meta:
            fh.write(format_meta(meta) + "\n")
        w = csv.writer(fh)
        w.writerow(["t_s", "iops", "utilization"])
        for k in range(tel.iops.size):
            w.writerow(["%.10g" % (k / tel.sample_rate),
                        "%.10g" % tel.iops[k],
                        "%.10g" % tel.utilization[k]])


def read_telemetry_csv(path, process_label: str = "") -> IoTelemetry:
    path = Path(path)
    with path.open() as fh:
        rows = [ln for ln in fh if ln.strip() and not ln.startswith("#")]
    ts, iops, util = [], [], []
    for row in csv.reader(rows[1:]):
        ts.append(float(row[0]))
        iops.append(float(row[1]))
        util.append(float(row[2]))
    if len(ts) < 2:
        raise ConfigError("telemetry: need at least two samples")
    rate = 1.0 / (ts[1] - ts[0])
    return IoTelemetry(np.array(iops), np.array(util), rate, process_label)
