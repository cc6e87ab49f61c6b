"""Radio channel between the emitting machine and a nearby receiver.

The channel is calibrated in terms of received SNR: the noise floor is
placed so that the linear-power ratio (on-level + noise) / noise equals
the requested separation exactly, then a per-sample fluctuation is added.
The default fluctuation is Gaussian in the dB domain and piecewise
constant over short blocks (band-power measurements wobble together, not
per-sample); a linear-power AWGN mode is available for analytic checks.

Preset SNRs reproduce bench measurements of three desktop machines at
30-120 cm; workload profiles reproduce how concurrent host activity
affects signal quality; jamming superimposes a defensive stream of random
disk bursts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .signals import (
    READ,
    WRITE,
    ActivityTrace,
    OpEvent,
    PowerSeries,
    dbm_to_mw,
    mw_to_dbm,
    power_sum,
)
from .transmitter import DEFAULT_WRITE_PENALTY_DB, synthesize_emission

INFINITE_SNR = math.inf

# Noise-fluctuation profiles: (sigma_db, block_s). `default` keeps presets
# clean enough for level calibration; `calibrated` is fitted so that a
# 1 bit/s link measures ~1% BER at 20 dB and ~15% at 9 dB, reproducing the
# measured BER-vs-distance ordering.
NOISE_PROFILES = {
    "default": (1.0, 0.2),
    "calibrated": (2.5, 1.0),
    "none": (0.0, 0.2),
}


@dataclass(frozen=True)
class ChannelConfig:
    """Receiver-side channel parameters."""

    target_snr: float = INFINITE_SNR
    noise_sigma: float = 1.0
    noise_block: float = 0.2
    noise_domain: str = "log"
    workload: str | None = None
    vm_mode: bool = False
    rng_seed: int = 0
    # On-level the SNR is calibrated against; None uses the observed peak.
    reference_on_dbm: float | None = None

    def __post_init__(self):
        if self.noise_sigma < 0:
            raise ConfigError(f"noise_sigma: must be >= 0, got {self.noise_sigma}")
        if self.noise_block <= 0:
            raise ConfigError(f"noise_block: must be > 0, got {self.noise_block}")
        if self.noise_domain not in ("log", "linear"):
            raise ConfigError(
                f"noise_domain: expected 'log' or 'linear', got {self.noise_domain!r}"
            )
        if not (math.isinf(self.target_snr) or math.isfinite(self.target_snr)):
            raise ConfigError(f"target_snr: must be finite or inf, got {self.target_snr}")

    @classmethod
    def from_preset(cls, name: str, noise_profile: str = "default",
                    rng_seed: int = 0, **overrides) -> "ChannelConfig":
        preset = get_preset(name)
        sigma, block = noise_profile_params(noise_profile)
        return cls(target_snr=preset.snr_db, noise_sigma=sigma,
                   noise_block=block, rng_seed=rng_seed, **overrides)


@dataclass(frozen=True)
class ChannelPreset:
    """A named (machine, distance, op-kind) -> SNR measurement."""

    name: str
    snr_db: float
    source: str


def _preset_table() -> dict[str, ChannelPreset]:
    # (machine, distance cm) -> (write SNR, read SNR), values kept verbatim
    # from the bench measurements. pc2 @ 30 cm is irregular (read below
    # write, out of line with its 60 cm row); stored as measured, not fixed.
    rows = {
        ("pc1", 30): (10.0, 20.0),
        ("pc1", 60): (7.0, 15.0),
        ("pc1", 90): (6.0, 13.0),
        ("pc1", 120): (4.0, 9.0),
        ("pc2", 30): (7.0, 1.0),
        ("pc2", 60): (3.0, 9.0),
        ("pc3", 30): (3.0, 7.0),
    }
    table = {}
    for (machine, dist), (w, r) in rows.items():
        for kind, snr in ((WRITE, w), (READ, r)):
            name = f"{machine}-{dist}cm-{kind}"
            note = f"{machine} desktop at {dist} cm, {kind} ops"
            if (machine, dist) == ("pc2", 30) and kind == READ:
                note += " (irregular measurement)"
            table[name] = ChannelPreset(name, snr, note)
    return table


PRESETS = _preset_table()

WORKLOAD_PROFILES = (
    "idle",
    "cpu-intensive",
    "ram-intensive",
    "word-processing",
    "video-playing",
    "file-copy",
)

# Non-disk workloads leave signal quality in this measured band.
WORKLOAD_CLEAN_SNR_RANGE = (16.0, 19.0)
# Interferer level for file copying, relative to the received on-level;
# calibrated so the measured separation lands mid [4.5, 5.5] dB.
FILE_COPY_LEVEL_OFFSET_DB = -1.6


def get_preset(name: str) -> ChannelPreset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigError(f"preset: unknown preset {name!r}") from None


def noise_profile_params(name: str) -> tuple[float, float]:
    try:
        return NOISE_PROFILES[name]
    except KeyError:
        raise ConfigError(f"noise_profile: unknown profile {name!r}") from None


def load_presets(path) -> dict[str, ChannelPreset]:
    """Read extra presets from a plain-text file of `name = snr_db, source`."""
    presets = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"preset: line {lineno}: expected `name = snr_db, source`")
        name, _, rest = line.partition("=")
        snr_text, _, source = rest.partition(",")
        try:
            snr = float(snr_text)
        except ValueError:
            raise ConfigError(
                f"preset: line {lineno}: bad SNR value {snr_text.strip()!r}"
            ) from None
        presets[name.strip()] = ChannelPreset(name.strip(), snr, source.strip())
    return presets


def register_presets(presets: dict[str, ChannelPreset]) -> None:
    PRESETS.update(presets)


# ---------------------------------------------------------------------------
# Core channel
# ---------------------------------------------------------------------------


def _block_noise(n: int, sample_rate: float, sigma: float, block_s: float,
                 rng: np.random.Generator) -> np.ndarray:
    """dB-domain Gaussian fluctuation, piecewise constant over blocks."""
    if sigma == 0.0 or n == 0:
        return np.zeros(n)
    block = max(1, int(round(block_s * sample_rate)))
    draws = rng.normal(0.0, sigma, size=(n + block - 1) // block)
    return np.repeat(draws, block)[:n]


def apply_channel(tx: PowerSeries, cfg: ChannelConfig) -> PowerSeries:
    """Set the received noise floor for the target SNR and add fluctuation.

    The floor is compensated for power addition: with noise power
    P_on / (10^(snr/10) - 1), the measured on/off separation of the output
    equals target_snr exactly in expectation.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    p_sig = dbm_to_mw(tx.samples)
    if len(tx) == 0:
        return tx

    if math.isinf(cfg.target_snr):
        p_noise = 0.0
    else:
        on_dbm = cfg.reference_on_dbm
        if on_dbm is None:
            on_dbm = float(tx.samples.max())
        ratio = 10.0 ** (cfg.target_snr / 10.0) - 1.0
        if ratio <= 0:
            raise ConfigError(f"target_snr: must be > 0 dB, got {cfg.target_snr}")
        p_off_target = dbm_to_mw(on_dbm) / ratio
        p_floor = float(dbm_to_mw(tx.samples.min()))
        p_noise = max(p_off_target - p_floor, 0.0)

    if cfg.noise_domain == "linear":
        # Complex AWGN on the field amplitude; per-sample, analytically
        # tractable (received power is noncentral chi-squared).
        amp = np.sqrt(p_sig)
        scale = math.sqrt(p_noise / 2.0) if p_noise > 0 else 0.0
        re = amp + rng.normal(0.0, scale, len(tx)) if scale else amp
        im = rng.normal(0.0, scale, len(tx)) if scale else np.zeros(len(tx))
        out = mw_to_dbm(re ** 2 + im ** 2)
        if cfg.noise_sigma > 0:
            out = out + _block_noise(len(tx), tx.sample_rate, cfg.noise_sigma,
                                     cfg.noise_block, rng)
        return tx.with_samples(out)

    out = mw_to_dbm(p_sig + p_noise)
    out = out + _block_noise(len(tx), tx.sample_rate, cfg.noise_sigma,
                             cfg.noise_block, rng)
    return tx.with_samples(out)


# ---------------------------------------------------------------------------
# Workload interference
# ---------------------------------------------------------------------------


def _estimate_on_level(samples: np.ndarray) -> float:
    """Robust on-level: median of samples above the 10/90-percentile midpoint."""
    lo, hi = np.percentile(samples, [10, 90])
    mid = 0.5 * (lo + hi)
    above = samples[samples > mid]
    if above.size == 0:
        return float(samples.max())
    return float(np.median(above))


def interferer_trace(duration: float, rng: np.random.Generator,
                     dur_range: tuple[float, float] = (0.05, 0.5),
                     gap_range: tuple[float, float] = (0.01, 0.06)) -> ActivityTrace:
    """Dense random read/write bursts, the activity pattern of a bulk copy."""
    events = []
    t = 0.0
    while t < duration:
        dur = float(rng.uniform(*dur_range))
        kind = READ if rng.random() < 0.5 else WRITE
        dur = min(dur, max(duration - t, 1e-3))
        events.append(OpEvent(kind, t, dur))
        t += dur + float(rng.uniform(*gap_range))
    return ActivityTrace(tuple(events), max(duration, t))


def superimpose_trace(base: PowerSeries, trace: ActivityTrace, read_level: float,
                      write_penalty: float = DEFAULT_WRITE_PENALTY_DB) -> PowerSeries:
    """Add the emission of an independent activity trace onto a series."""
    if not trace.busy_events:
        return base
    emission = synthesize_emission(
        trace, base.sample_rate, p_read=read_level,
        write_penalty=write_penalty, floor=-300.0,
    )
    samples = emission.samples
    if len(samples) < len(base):
        samples = np.pad(samples, (0, len(base) - len(samples)),
                         constant_values=-300.0)
    interference = base.with_samples(samples[: len(base)])
    return power_sum(base, interference)


def apply_workload(tx: PowerSeries, profile: str, seed: int = 0,
                   noise_sigma: float = 1.0, noise_block: float = 0.2) -> PowerSeries:
    """Receive `tx` while the host runs a background workload.

    Non-disk profiles leave the measured SNR in the clean 15-20 dB band;
    `file-copy` superimposes dense interferer bursts that drag it down to
    4.5-5.5 dB.
    """
    if profile not in WORKLOAD_PROFILES:
        raise ConfigError(f"workload: unknown profile {profile!r}")
    salt = sum(profile.encode())
    rng = np.random.default_rng(np.random.SeedSequence([seed, salt, 0xB0]))
    target = float(rng.uniform(*WORKLOAD_CLEAN_SNR_RANGE))
    ref = float(tx.samples.max())
    base = apply_channel(tx, ChannelConfig(
        target_snr=target, noise_sigma=noise_sigma, noise_block=noise_block,
        rng_seed=int(rng.integers(1 << 31)), reference_on_dbm=ref,
    ))
    if profile != "file-copy":
        return base
    trace = interferer_trace(base.duration, rng)
    return superimpose_trace(base, trace, ref + FILE_COPY_LEVEL_OFFSET_DB)


# ---------------------------------------------------------------------------
# Virtual-machine degradation
# ---------------------------------------------------------------------------

VM_REDUCTION_DB = 5.0
VM_REDUCTION_JITTER_DB = 0.2
VM_EDGE_JITTER_S = 0.05


def apply_vm(tx: PowerSeries, seed: int = 0,
             reduction_db: float | None = None,
             jitter_s: float = VM_EDGE_JITTER_S) -> PowerSeries:
    """Degrade a series the way virtualized storage does.

    The on-level drops by ~5 dB (buffered, indirect bus activity) and every
    pulse edge is jittered by up to +/-jitter_s. With reduction_db=0 and
    jitter_s=0 the series passes through untouched.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xA3]))
    if reduction_db is None:
        reduction_db = float(np.clip(
            rng.normal(VM_REDUCTION_DB, VM_REDUCTION_JITTER_DB), 4.3, 5.7))
    if reduction_db == 0.0 and jitter_s == 0.0:
        return tx
    x = tx.samples
    lo, hi = np.percentile(x, [10, 90])
    mid = 0.5 * (lo + hi)
    on = x > mid

    if jitter_s > 0:
        edges = np.flatnonzero(np.diff(on.astype(np.int8)))
        new_on = on.copy()
        if edges.size:
            max_shift = jitter_s * tx.sample_rate
            shifted = edges + rng.uniform(-max_shift, max_shift, edges.size)
            shifted = np.clip(np.sort(shifted), 0, len(x) - 1).astype(int)
            new_on = np.zeros(len(x), dtype=bool)
            state = on[0]
            prev = 0
            for e in shifted:
                new_on[prev:e + 1] = state
                state = not state
                prev = e + 1
            new_on[prev:] = state
        mask_changed = new_on != on
    else:
        new_on = on
        mask_changed = np.zeros(len(x), dtype=bool)

    out = x.copy()
    on_pool = x[on]
    off_pool = x[~on]
    # Samples whose class flipped take a resampled value from the target
    # class so the noise texture is preserved.
    flips_to_on = mask_changed & new_on
    flips_to_off = mask_changed & ~new_on
    if flips_to_on.any() and on_pool.size:
        out[flips_to_on] = rng.choice(on_pool, flips_to_on.sum())
    if flips_to_off.any() and off_pool.size:
        out[flips_to_off] = rng.choice(off_pool, flips_to_off.sum())
    out[new_on] -= reduction_db
    return tx.with_samples(out)


# ---------------------------------------------------------------------------
# Jamming
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JammerConfig:
    """Defensive jammer: random read/write bursts of duration (0, t_max]."""

    t_max: float = 1.0
    rng_seed: int = 0
    # Pause between ops comes from the scheduler, not the burst length, so
    # tiny t_max values yield genuinely sparse disk activity.
    gap_range: tuple[float, float] = (0.05, 0.3)
    # Delay before the jammer starts, for triggered (on-detection) operation.
    start: float = 0.0

    def __post_init__(self):
        if self.t_max <= 0:
            raise ConfigError(f"t_max: must be > 0, got {self.t_max}")
        if not 0 <= self.gap_range[0] <= self.gap_range[1]:
            raise ConfigError(f"gap_range: bad range {self.gap_range}")
        if self.start < 0:
            raise ConfigError(f"start: must be >= 0, got {self.start}")


def jam_trace(duration: float, cfg: JammerConfig) -> ActivityTrace:
    """Schedule of the jammer process over the given span."""
    rng = np.random.default_rng(np.random.SeedSequence([cfg.rng_seed, 0x1A]))
    events = []
    t = cfg.start
    while t < duration:
        dur = float(rng.uniform(0.0, cfg.t_max))
        if dur <= 0:
            continue
        dur = min(dur, duration - t)
        if dur <= 0:
            break
        kind = READ if rng.random() < 0.5 else WRITE
        events.append(OpEvent(kind, t, dur))
        t += dur + float(rng.uniform(*cfg.gap_range))
    return ActivityTrace(tuple(events), duration)


def jam(tx: PowerSeries, cfg: JammerConfig) -> PowerSeries:
    """Superimpose the jammer's emission onto a received series.

    The jammer runs on the victim host, so its bursts arrive at the same
    level as the covert signal's on-level.
    """
    trace = jam_trace(tx.duration, cfg)
    level = _estimate_on_level(tx.samples)
    return superimpose_trace(tx, trace, level)
