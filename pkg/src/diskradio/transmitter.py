"""Bit-stream scheduling and band-power emission synthesis.

A `1` bit becomes one disk burst (read with probability s_read, else
write); a `0` bit becomes a sleep of t_zero. With t_read = t_write =
t_zero the schedule has a constant bit clock, which the receiver's
preamble-based timing estimate relies on. Emission synthesis maps the
schedule onto a three-level envelope: read bursts at the read level,
write bursts a fixed penalty below (reads measure ~3 dB stronger), and
the noise floor elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError
from .framing import Frame, serialize_message
from .signals import (
    READ,
    SLEEP,
    WRITE,
    ActivityTrace,
    OpEvent,
    PowerSeries,
)

DEFAULT_READ_DBM = -68.0
DEFAULT_WRITE_PENALTY_DB = 3.0
DEFAULT_FLOOR_DBM = -100.0

# Measured on-level versus burst duration: longer bursts register slightly
# stronger. Used when level_lookup is enabled; queries in between rows are
# linearly interpolated, out-of-range queries clamp to the nearest row.
BIT_TIME_LEVELS_DBM = (
    (0.2, -72.0),
    (0.4, -72.0),
    (0.6, -70.0),
    (0.8, -70.0),
    (1.0, -68.0),
    (1.2, -68.0),
)


def level_for_bit_time(duration: float) -> float:
    """On-level in dBm for a burst of the given duration (table lookup)."""
    times = [t for t, _ in BIT_TIME_LEVELS_DBM]
    levels = [v for _, v in BIT_TIME_LEVELS_DBM]
    return float(np.interp(duration, times, levels))


@dataclass(frozen=True)
class TransmitterConfig:
    """Timing and op-mix parameters of the transmitting process."""

    t_read: float = 1.0
    t_write: float = 1.0
    s_read: float = 1.0
    t_zero: float = 1.0
    rng_seed: int = 0
    # Residual buffering before a burst actually hits the bus; shaves the
    # leading edge of the emitted pulse. 0 models fully disabled caching.
    onset_latency: float = 0.0

    def __post_init__(self):
        if self.t_read <= 0:
            raise ConfigError(f"t_read: must be > 0, got {self.t_read}")
        if self.t_write <= 0:
            raise ConfigError(f"t_write: must be > 0, got {self.t_write}")
        if self.t_zero <= 0:
            raise ConfigError(f"t_zero: must be > 0, got {self.t_zero}")
        if not 0.0 <= self.s_read <= 1.0:
            raise ConfigError(f"s_read: must be in [0, 1], got {self.s_read}")
        if self.onset_latency < 0:
            raise ConfigError(
                f"onset_latency: must be >= 0, got {self.onset_latency}"
            )

    def with_bit_time(self, t: float) -> "TransmitterConfig":
        return replace(self, t_read=t, t_write=t, t_zero=t)


def schedule_bits(bits, cfg: TransmitterConfig) -> ActivityTrace:
    """Turn a bit vector into a disk-operation schedule, one event per bit."""
    rng = np.random.default_rng(cfg.rng_seed)
    events = []
    t = 0.0
    for b in bits:
        if b not in (0, 1):
            raise ConfigError(f"bits: elements must be 0 or 1, got {b!r}")
        if b:
            use_read = rng.random() < cfg.s_read
            kind = READ if use_read else WRITE
            dur = cfg.t_read if use_read else cfg.t_write
        else:
            kind, dur = SLEEP, cfg.t_zero
        events.append(OpEvent(kind, t, dur))
        t += dur
    return ActivityTrace(tuple(events), t)


def message_bits(data: bytes) -> list[int]:
    """All frame bits of a message with a one-bit-time gap (a 0) between frames."""
    bits: list[int] = []
    for i, frame in enumerate(serialize_message(data)):
        if i:
            bits.append(0)
        bits.extend(frame.bits())
    return bits


def schedule_message(data: bytes, cfg: TransmitterConfig) -> tuple[ActivityTrace, list[Frame]]:
    """Schedule a byte message as consecutive frames, one t_zero gap between."""
    return schedule_bits(message_bits(data), cfg), serialize_message(data)


def synthesize_emission(trace: ActivityTrace, sample_rate: float,
                        p_read: float = DEFAULT_READ_DBM,
                        write_penalty: float = DEFAULT_WRITE_PENALTY_DB,
                        floor: float = DEFAULT_FLOOR_DBM,
                        level_lookup: bool = False,
                        onset_latency: float = 0.0) -> PowerSeries:
    """Render a schedule into its band-power envelope.

    Samples take exactly three levels before channel effects: p_read during
    reads, p_read - write_penalty during writes, floor during sleeps and
    gaps. With level_lookup the read level is taken from the duration table
    instead of p_read.
    """
    if sample_rate <= 0:
        raise ConfigError(f"sample_rate: must be > 0, got {sample_rate}")
    if p_read <= floor:
        raise ConfigError(f"p_read: must exceed floor ({p_read} <= {floor})")
    n = int(np.ceil(trace.total_duration * sample_rate - 1e-9))
    samples = np.full(n, floor, dtype=float)
    floor_mw = 10.0 ** (floor / 10.0)
    # Power from events that only partially cover a sample (sub-sample
    # bursts, unaligned edges); blended into those samples at the end.
    extra_mw = np.zeros(n)
    for ev in trace.busy_events:
        level = level_for_bit_time(ev.duration) if level_lookup else p_read
        if ev.kind == WRITE:
            level -= write_penalty
        lo = max((ev.start + onset_latency) * sample_rate, 0.0)
        hi = min(ev.end * sample_rate, float(n))
        if hi <= lo:
            continue
        delta_mw = 10.0 ** (level / 10.0) - floor_mw
        a = int(np.ceil(lo - 1e-9))
        b = int(np.floor(hi + 1e-9))
        if a > b:  # event entirely inside one sample
            extra_mw[int(np.floor(lo))] += delta_mw * (hi - lo)
            continue
        samples[a:b] = level
        if lo < a - 1e-9:
            extra_mw[a - 1] += delta_mw * (a - lo)
        if hi > b + 1e-9:
            extra_mw[b] += delta_mw * (hi - b)
    partial = extra_mw > 0.0
    if partial.any():
        samples[partial] = 10.0 * np.log10(
            10.0 ** (samples[partial] / 10.0) + extra_mw[partial])
    return PowerSeries(samples, sample_rate)


def transmit_message(data: bytes, cfg: TransmitterConfig, sample_rate: float,
                     p_read: float = DEFAULT_READ_DBM,
                     write_penalty: float = DEFAULT_WRITE_PENALTY_DB,
                     floor: float = DEFAULT_FLOOR_DBM,
                     level_lookup: bool = False) -> PowerSeries:
    """Schedule a message and synthesize its emission in one step."""
    trace, _ = schedule_message(data, cfg)
    return synthesize_emission(
        trace, sample_rate, p_read=p_read, write_penalty=write_penalty,
        floor=floor, level_lookup=level_lookup, onset_latency=cfg.onset_latency,
    )
