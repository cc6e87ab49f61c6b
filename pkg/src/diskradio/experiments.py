"""End-to-end pipelines, sweeps, and jam/detect experiments.

Everything here is reproducible: a spec plus a seed determines every CSV
byte. Per-trial randomness is derived from the spec seed, and each output
file carries a `#` metadata line with the seed, a hash of the resolved
spec, and the source note of any measurement table it reproduces.
"""

from __future__ import annotations

import csv
import hashlib
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import channel as chn
from .detector import (
    DEFAULT_TELEMETRY_RATE,
    DEFAULT_THRESHOLD,
    detect,
    telemetry_from_trace,
)
from .errors import ConfigError
from .framing import FRAME_BITS, PAYLOAD_BITS
from .receiver import (
    ReceiverConfig,
    stream_decode,
    spectrogram,
    synthesize_baseband,
    write_reports_csv,
    write_spectrogram_csv,
)
from .signals import (
    ActivityTrace,
    OpEvent,
    PowerSeries,
    READ,
    WRITE,
    format_meta,
    measure_snr,
    write_series_csv,
    write_trace_csv,
)
from .transmitter import (
    TransmitterConfig,
    schedule_message,
    synthesize_emission,
)

FRAME_SLOT_BITS = FRAME_BITS + 1  # frame plus its trailing gap bit


# ---------------------------------------------------------------------------
# Experiment specification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentSpec:
    """Resolved parameters of one harness run."""

    name: str = "pipeline"
    message: bytes = b""
    bit_time: float = 1.0
    s_read: float = 1.0
    preset: str | None = None
    target_snr: float | None = None
    noise_profile: str = "default"
    workload: str | None = None
    vm: bool = False
    jam_t_max: float | None = None
    trials: int = 1
    seed: int = 0
    out_dir: Path = Path("out")
    sample_rate: float = 50.0
    level_lookup: bool = False

    def __post_init__(self):
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        if not self.name:
            raise ConfigError("name: must not be empty")
        if self.bit_time <= 0:
            raise ConfigError(f"bit_time: must be > 0, got {self.bit_time}")
        if not 0.0 <= self.s_read <= 1.0:
            raise ConfigError(f"s_read: must be in [0, 1], got {self.s_read}")
        if self.trials < 1:
            raise ConfigError(f"trials: must be >= 1, got {self.trials}")
        if self.sample_rate <= 0:
            raise ConfigError(f"sample_rate: must be > 0, got {self.sample_rate}")
        if self.preset is not None:
            chn.get_preset(self.preset)
        chn.noise_profile_params(self.noise_profile)
        if self.workload is not None:
            if self.workload not in chn.WORKLOAD_PROFILES:
                raise ConfigError(f"workload: unknown profile {self.workload!r}")
            if self.preset is not None or self.target_snr is not None:
                raise ConfigError(
                    "workload: a workload profile sets its own SNR; drop preset/target_snr"
                )
        if self.jam_t_max is not None and self.jam_t_max <= 0:
            raise ConfigError(f"jam_t_max: must be > 0, got {self.jam_t_max}")

    @property
    def snr(self) -> float:
        if self.target_snr is not None:
            return self.target_snr
        if self.preset is not None:
            return chn.get_preset(self.preset).snr_db
        return math.inf

    @property
    def source_note(self) -> str:
        if self.preset is not None:
            return chn.get_preset(self.preset).source
        if self.workload is not None:
            return f"workload profile {self.workload}"
        return "explicit configuration"

    def tx_config(self, seed: int | None = None) -> TransmitterConfig:
        return TransmitterConfig(
            t_read=self.bit_time, t_write=self.bit_time, t_zero=self.bit_time,
            s_read=self.s_read, rng_seed=self.seed if seed is None else seed,
        )

    def spec_hash(self) -> str:
        # out_dir is where results land, not part of what was measured.
        blob = "|".join(
            f"{k}={getattr(self, k)!r}"
            for k in sorted(self.__dataclass_fields__) if k != "out_dir"
        )
        return hashlib.sha256(blob.encode()).hexdigest()[:12]

    def meta(self, **extra) -> dict:
        meta = {"seed": self.seed, "spec": self.spec_hash(),
                "source": self.source_note.replace(" ", "_")}
        meta.update(extra)
        return meta


def derived_seed(seed: int, *salt: int) -> int:
    return int(np.random.SeedSequence([seed, *salt]).generate_state(1)[0])


def wilson_interval(errors: float, n: float, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        return 0.0, 1.0
    p = errors / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _clustered_wilson(frame_errors: list[int], bits_per_frame: int) -> tuple[float, float]:
    """Wilson interval with the effective sample size of clustered errors.

    Errors arrive per frame (an unrecovered frame erases all its bits), so
    the naive per-bit interval is too narrow; scale n down by the design
    effect estimated from the per-frame error variance.
    """
    counts = np.asarray(frame_errors, dtype=float)
    n_bits = counts.size * bits_per_frame
    p = counts.sum() / n_bits
    if p in (0.0, 1.0) or counts.size < 2:
        return wilson_interval(counts.sum(), n_bits)
    var_frac = counts.var(ddof=1) / bits_per_frame ** 2
    deff = max(1.0, bits_per_frame * var_frac / (p * (1.0 - p)))
    n_eff = n_bits / deff
    return wilson_interval(p * n_eff, n_eff)


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PipelineResult:
    reports: tuple
    frames_expected: int
    decoded_bytes: bytes
    status: str  # "ok" | "sync" | "parity"
    rx: PowerSeries
    trace: ActivityTrace
    artifacts: tuple[Path, ...]


def apply_channel_chain(tx_series: PowerSeries, spec: ExperimentSpec) -> PowerSeries:
    """Channel, workload, VM, and jamming in composition order."""
    seed = spec.seed
    if spec.workload is not None:
        rx = chn.apply_workload(tx_series, spec.workload, seed=derived_seed(seed, 1))
    else:
        sigma, block = chn.noise_profile_params(spec.noise_profile)
        rx = chn.apply_channel(tx_series, chn.ChannelConfig(
            target_snr=spec.snr, noise_sigma=sigma, noise_block=block,
            rng_seed=derived_seed(seed, 2),
            reference_on_dbm=float(tx_series.samples.max()),
        ))
    if spec.vm:
        rx = chn.apply_vm(rx, seed=derived_seed(seed, 3))
    if spec.jam_t_max is not None:
        rx = chn.jam(rx, chn.JammerConfig(t_max=spec.jam_t_max,
                                          rng_seed=derived_seed(seed, 4)))
    return rx


def _pipeline_spectrogram(rx: PowerSeries, spec: ExperimentSpec):
    """Synthetic spectral view of the received envelope for export."""
    band_width = 32.0 / spec.bit_time
    rate = 4.0 * band_width
    window = spec.bit_time / 2.0
    baseband = synthesize_baseband(rx, rate, f_offset=band_width / 8.0)
    cfg = ReceiverConfig(band_width=band_width)
    return spectrogram(baseband, rate, cfg, window, t0=rx.t0)


def run_pipeline(spec: ExperimentSpec, write: bool = True) -> PipelineResult:
    """Transmit spec.message through the configured channel and decode it."""
    trace, frames = schedule_message(spec.message, spec.tx_config())
    artifacts: list[Path] = []
    if not frames:
        if write:
            spec.out_dir.mkdir(parents=True, exist_ok=True)
            path = spec.out_dir / f"{spec.name}_reports.csv"
            write_reports_csv([], path, spec.meta())
            artifacts.append(path)
        return PipelineResult((), 0, b"", "ok",
                              PowerSeries(np.array([]), spec.sample_rate),
                              trace, tuple(artifacts))

    tx_series = synthesize_emission(
        trace, spec.sample_rate, level_lookup=spec.level_lookup)
    # The capture runs a couple of bit times past the transmission so the
    # final frame has full decision windows even under timing jitter.
    tx_series = tx_series.padded(2.0 * spec.bit_time)
    rx = apply_channel_chain(tx_series, spec)
    reports = stream_decode(rx, ReceiverConfig())

    decoded = b"".join(r.payload.to_bytes(2, "big") for r in reports)
    if len(reports) < len(frames):
        status = "sync"
    elif not all(r.parity_ok for r in reports[: len(frames)]):
        status = "parity"
    else:
        status = "ok"

    if write:
        spec.out_dir.mkdir(parents=True, exist_ok=True)
        meta = spec.meta()
        trace_path = spec.out_dir / f"{spec.name}_tx_trace.csv"
        write_trace_csv(trace, trace_path, meta)
        rx_path = spec.out_dir / f"{spec.name}_rx_series.csv"
        write_series_csv(rx, rx_path, meta)
        times, freqs, matrix = _pipeline_spectrogram(rx, spec)
        spect_path = spec.out_dir / f"{spec.name}_spectrogram.csv"
        write_spectrogram_csv(times, freqs, matrix, spect_path, meta)
        rep_path = spec.out_dir / f"{spec.name}_reports.csv"
        write_reports_csv(reports, rep_path, meta)
        artifacts += [trace_path, rx_path, spect_path, rep_path]

    return PipelineResult(tuple(reports), len(frames), decoded, status, rx,
                          trace, tuple(artifacts))


# ---------------------------------------------------------------------------
# BER sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepPoint:
    snr_db: float
    bits: int
    errors: int
    ber: float
    ci_low: float
    ci_high: float
    frame_sync_rate: float
    measured_snr_db: float


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]
    monotone: bool
    noise_profile: str
    seed: int


def _ber_trial(snr: float, sigma: float, block: float, bit_time: float,
               sample_rate: float, frames_per_trial: int, seed: int,
               rcfg: ReceiverConfig) -> tuple[list[int], int, float]:
    """One transmission: returns (per-frame error counts, synced, measured_snr)."""
    rng = np.random.default_rng(seed)
    msg = rng.bytes(2 * frames_per_trial)
    tcfg = TransmitterConfig(
        t_read=bit_time, t_write=bit_time, t_zero=bit_time,
        rng_seed=int(rng.integers(1 << 31)))
    trace, frames = schedule_message(msg, tcfg)
    env = synthesize_emission(trace, sample_rate).padded(2.0 * bit_time)
    out = chn.apply_channel(env, chn.ChannelConfig(
        target_snr=snr, noise_sigma=sigma, noise_block=block,
        rng_seed=int(rng.integers(1 << 31))))
    reports = stream_decode(out, rcfg)

    slot = FRAME_SLOT_BITS * bit_time
    matched: dict[int, int] = {}
    for rep in reports:
        k = int(round(rep.sync_time / slot))
        if 0 <= k < len(frames) and k not in matched \
                and abs(rep.sync_time - k * slot) <= bit_time / 2:
            matched[k] = rep.payload
    frame_errors = []
    for i, fr in enumerate(frames):
        if i in matched:
            frame_errors.append(bin(matched[i] ^ fr.payload).count("1"))
        else:
            # Unrecovered frame: its payload bits are erased, which costs
            # half of them on average.
            frame_errors.append(PAYLOAD_BITS // 2)
    snr_meas = measure_snr(out, trace) if math.isfinite(snr) else math.inf
    return frame_errors, len(matched), snr_meas


def ber_sweep(snr_grid, bits_per_point: int = 2000, seed: int = 0,
              noise_profile: str = "calibrated", bit_time: float = 1.0,
              sample_rate: float = 50.0, frames_per_trial: int = 2) -> SweepResult:
    """Monte Carlo BER at each SNR, decoded through the full receiver path."""
    if bits_per_point < 1000:
        raise ConfigError(f"bits_per_point: must be >= 1000, got {bits_per_point}")
    sigma, block = chn.noise_profile_params(noise_profile)
    rcfg = ReceiverConfig()
    points = []
    for j, snr in enumerate(snr_grid):
        frame_errors: list[int] = []
        synced = 0
        snr_meas: list[float] = []
        trial = 0
        while len(frame_errors) * PAYLOAD_BITS < bits_per_point:
            fe, s, m = _ber_trial(
                snr, sigma, block, bit_time, sample_rate, frames_per_trial,
                derived_seed(seed, 10, j, trial), rcfg)
            frame_errors += fe
            synced += s
            snr_meas.append(m)
            trial += 1
        bits = len(frame_errors) * PAYLOAD_BITS
        errors = sum(frame_errors)
        lo, hi = _clustered_wilson(frame_errors, PAYLOAD_BITS)
        points.append(SweepPoint(
            snr_db=float(snr), bits=bits, errors=errors, ber=errors / bits,
            ci_low=lo, ci_high=hi, frame_sync_rate=synced / len(frame_errors),
            measured_snr_db=float(np.mean(snr_meas)),
        ))
    ordered = sorted(points, key=lambda p: p.snr_db)
    monotone = all(a.ber >= b.ber for a, b in zip(ordered, ordered[1:]))
    return SweepResult(tuple(points), monotone, noise_profile, seed)


def write_sweep_csv(result: SweepResult, path, meta: dict | None = None) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        if meta:
            fh.write(format_meta(meta) + "\n")
        w = csv.writer(fh)
        w.writerow(["snr_db", "bits", "errors", "ber", "ci_low", "ci_high",
                    "frame_sync_rate", "measured_snr_db"])
        for p in result.points:
            w.writerow(["%.10g" % p.snr_db, p.bits, p.errors,
                        "%.10g" % p.ber, "%.10g" % p.ci_low, "%.10g" % p.ci_high,
                        "%.10g" % p.frame_sync_rate, "%.10g" % p.measured_snr_db])


# ---------------------------------------------------------------------------
# Bit-time sweep
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BitTimePoint:
    bit_time: float
    on_level_dbm: float
    decode_ok: bool


def bit_time_sweep(times, seed: int = 0, sample_rate: float = 50.0,
                   snr_db: float = 25.0) -> list[BitTimePoint]:
    """Transmit one frame per bit time with the duration-level lookup on.

    Reports the synthesized on-level (exactly the table value at table
    rows) and whether the frame decodes at a comfortable SNR without any
    receiver reconfiguration.
    """
    points = []
    rcfg = ReceiverConfig()
    for i, t in enumerate(times):
        if t <= 0:
            raise ConfigError(f"times: bit times must be > 0, got {t}")
        rng = np.random.default_rng(derived_seed(seed, 20, i))
        msg = rng.bytes(2)
        tcfg = TransmitterConfig(t_read=t, t_write=t, t_zero=t,
                                 rng_seed=int(rng.integers(1 << 31)))
        trace, frames = schedule_message(msg, tcfg)
        env = synthesize_emission(trace, sample_rate, level_lookup=True)
        on_level = float(env.samples.max())
        out = chn.apply_channel(env, chn.ChannelConfig(
            target_snr=snr_db, noise_sigma=1.0,
            rng_seed=int(rng.integers(1 << 31))))
        reports = stream_decode(out, rcfg)
        ok = (len(reports) == 1 and reports[0].parity_ok
              and reports[0].payload == frames[0].payload)
        points.append(BitTimePoint(float(t), on_level, ok))
    return points


def write_bit_time_csv(points, path, meta: dict | None = None) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        if meta:
            fh.write(format_meta(meta) + "\n")
        w = csv.writer(fh)
        w.writerow(["bit_time_s", "on_level_dbm", "decode_ok"])
        for p in points:
            w.writerow(["%.10g" % p.bit_time, "%.10g" % p.on_level_dbm,
                        int(p.decode_ok)])


# ---------------------------------------------------------------------------
# Jam experiment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class JamTrial:
    snr_clean: float
    snr_jammed: float
    ber_clean: float
    ber_jammed: float


@dataclass(frozen=True)
class JamReport:
    trials: tuple[JamTrial, ...]

    @property
    def mean_snr_clean(self) -> float:
        return float(np.mean([t.snr_clean for t in self.trials]))

    @property
    def mean_snr_jammed(self) -> float:
        return float(np.mean([t.snr_jammed for t in self.trials]))

    @property
    def mean_ber_clean(self) -> float:
        return float(np.mean([t.ber_clean for t in self.trials]))

    @property
    def mean_ber_jammed(self) -> float:
        return float(np.mean([t.ber_jammed for t in self.trials]))


def _frame_ber(rx: PowerSeries, frames, bit_time: float) -> float:
    reports = stream_decode(rx, ReceiverConfig())
    slot = FRAME_SLOT_BITS * bit_time
    matched: dict[int, int] = {}
    for rep in reports:
        k = int(round(rep.sync_time / slot))
        if 0 <= k < len(frames) and k not in matched \
                and abs(rep.sync_time - k * slot) <= bit_time / 2:
            matched[k] = rep.payload
    errors = 0
    for i, fr in enumerate(frames):
        if i in matched:
            errors += bin(matched[i] ^ fr.payload).count("1")
        else:
            errors += PAYLOAD_BITS // 2
    return errors / (PAYLOAD_BITS * len(frames))


def jam_experiment(spec: ExperimentSpec, jammer: chn.JammerConfig,
                   trials: int | None = None) -> JamReport:
    """Measure SNR and BER with and without the jammer, trial by trial."""
    trials = spec.trials if trials is None else trials
    out_trials = []
    for k in range(trials):
        rng = np.random.default_rng(derived_seed(spec.seed, 30, k))
        msg = spec.message or bytes(rng.bytes(2))
        tcfg = spec.tx_config(seed=int(rng.integers(1 << 31)))
        trace, frames = schedule_message(msg, tcfg)
        env = synthesize_emission(trace, spec.sample_rate,
                                  level_lookup=spec.level_lookup)
        env = env.padded(2.0 * spec.bit_time)
        sigma, block = chn.noise_profile_params(spec.noise_profile)
        clean = chn.apply_channel(env, chn.ChannelConfig(
            target_snr=spec.snr, noise_sigma=sigma, noise_block=block,
            rng_seed=int(rng.integers(1 << 31))))
        jammed = chn.jam(clean, replace(jammer,
                                        rng_seed=derived_seed(jammer.rng_seed, k)))
        out_trials.append(JamTrial(
            snr_clean=measure_snr(clean, trace),
            snr_jammed=measure_snr(jammed, trace),
            ber_clean=_frame_ber(clean, frames, spec.bit_time),
            ber_jammed=_frame_ber(jammed, frames, spec.bit_time),
        ))
    return JamReport(tuple(out_trials))


def write_jam_csv(report: JamReport, path, meta: dict | None = None) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        if meta:
            fh.write(format_meta(meta) + "\n")
        w = csv.writer(fh)
        w.writerow(["trial", "snr_clean_db", "snr_jammed_db",
                    "ber_clean", "ber_jammed"])
        for k, t in enumerate(report.trials):
            w.writerow([k, "%.10g" % t.snr_clean, "%.10g" % t.snr_jammed,
                        "%.10g" % t.ber_clean, "%.10g" % t.ber_jammed])


# ---------------------------------------------------------------------------
# Detection experiment
# ---------------------------------------------------------------------------


def covert_trace(duration: float, bit_time: float, seed: int) -> ActivityTrace:
    """Random-payload transmission schedule spanning at least `duration`."""
    rng = np.random.default_rng(seed)
    n_frames = max(1, math.ceil(duration / (FRAME_SLOT_BITS * bit_time)))
    msg = rng.bytes(2 * n_frames)
    cfg = TransmitterConfig(t_read=bit_time, t_write=bit_time,
                            t_zero=bit_time, s_read=float(rng.uniform(0.5, 1.0)),
                            rng_seed=int(rng.integers(1 << 31)))
    trace, _ = schedule_message(msg, cfg)
    return trace


def benign_trace(profile: str, duration: float, seed: int) -> ActivityTrace:
    """Disk-activity model of a benign process."""
    rng = np.random.default_rng(seed)
    if profile == "file-copy":
        return chn.interferer_trace(duration, rng)
    events: list[OpEvent] = []
    t = 0.0
    if profile == "browser":
        gap_mean, dur_lo, dur_hi, read_frac = 0.5, 0.02, 1.5, 0.7
        while True:
            t += float(rng.exponential(gap_mean))
            dur = float(np.clip(rng.exponential(0.18), dur_lo, dur_hi))
            if t + dur >= duration:
                break
            events.append(OpEvent(READ if rng.random() < read_frac else WRITE,
                                  t, dur))
            t += dur
    elif profile in ("idle", "cpu-intensive", "ram-intensive"):
        # Nearly no disk activity; occasional housekeeping touch.
        while True:
            t += float(rng.exponential(15.0))
            if t + 0.1 >= duration:
                break
            events.append(OpEvent(WRITE, t, float(rng.uniform(0.02, 0.1))))
            t += 0.1
    elif profile == "word-processing":
        while True:
            t += float(rng.exponential(4.0))
            dur = float(rng.uniform(0.05, 0.3))
            if t + dur >= duration:
                break
            events.append(OpEvent(WRITE if rng.random() < 0.6 else READ, t, dur))
            t += dur
    elif profile == "video-playing":
        # Buffering reads at heavily jittered intervals.
        while True:
            t += float(rng.uniform(0.8, 6.0))
            dur = float(rng.uniform(0.2, 0.8))
            if t + dur >= duration:
                break
            events.append(OpEvent(READ, t, dur))
            t += dur
    else:
        raise ConfigError(f"profile: unknown benign profile {profile!r}")
    return ActivityTrace(tuple(events), duration)


BENIGN_PROFILES = ("browser", "file-copy", "idle", "cpu-intensive",
                   "ram-intensive", "word-processing", "video-playing")
COVERT_BIT_TIMES = (0.2, 0.4, 0.6, 0.8, 1.0, 1.2)


@dataclass(frozen=True)
class LabeledTrace:
    label: int  # 1 covert, 0 benign
    kind: str
    trace: ActivityTrace


def build_corpus(n_covert: int = 60, n_benign: int = 60, seed: int = 0,
                 duration_range: tuple[float, float] = (60.0, 120.0)) -> list[LabeledTrace]:
    """Labeled synthetic corpus of covert and benign activity traces."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xC0]))
    corpus = []
    for i in range(n_covert):
        bt = COVERT_BIT_TIMES[i % len(COVERT_BIT_TIMES)]
        dur = float(rng.uniform(*duration_range))
        corpus.append(LabeledTrace(
            1, f"covert-{bt}s",
            covert_trace(dur, bt, derived_seed(seed, 40, i))))
    for i in range(n_benign):
        prof = BENIGN_PROFILES[i % len(BENIGN_PROFILES)]
        dur = float(rng.uniform(*duration_range))
        corpus.append(LabeledTrace(
            0, prof, benign_trace(prof, dur, derived_seed(seed, 41, i))))
    return corpus


@dataclass(frozen=True)
class DetectOutcome:
    thresholds: tuple[float, ...]
    tp: tuple[int, ...]
    fp: tuple[int, ...]
    tn: tuple[int, ...]
    fn: tuple[int, ...]
    scores: tuple[float, ...]
    labels: tuple[int, ...]
    kinds: tuple[str, ...]
    default_threshold: float

    def at(self, threshold: float) -> tuple[float, float]:
        """(recall, false-positive rate) at one threshold."""
        i = self.thresholds.index(threshold)
        pos = self.tp[i] + self.fn[i]
        neg = self.fp[i] + self.tn[i]
        recall = self.tp[i] / pos if pos else 0.0
        fpr = self.fp[i] / neg if neg else 0.0
        return recall, fpr


def detect_experiment(n_covert: int = 60, n_benign: int = 60, seed: int = 0,
                      thresholds=None,
                      telemetry_rate: float = DEFAULT_TELEMETRY_RATE,
                      default_threshold: float = DEFAULT_THRESHOLD) -> DetectOutcome:
    """Score a labeled corpus across a threshold grid."""
    if thresholds is None:
        thresholds = [round(0.05 * k, 2) for k in range(21)]
    thresholds = list(thresholds)
    if default_threshold not in thresholds:
        thresholds.append(default_threshold)
    thresholds.sort()
    corpus = build_corpus(n_covert, n_benign, seed)
    entries = []
    for item in corpus:
        tel = telemetry_from_trace(item.trace, telemetry_rate,
                                   process_label=item.kind)
        rep = detect(tel, threshold=default_threshold)
        entries.append((item.label, item.kind, rep.periodicity_score))
    # The ROC sweeps the periodicity score alone; the duty-cycle gate is
    # part of the operating detector, not of the score statistic.
    tp, fp, tn, fn = [], [], [], []
    for thr in thresholds:
        a = b = c = d = 0
        for label, _, score in entries:
            pred = score >= thr
            if label and pred:
                a += 1
            elif not label and pred:
                b += 1
            elif not label:
                c += 1
            else:
                d += 1
        tp.append(a)
        fp.append(b)
        tn.append(c)
        fn.append(d)
    return DetectOutcome(tuple(thresholds), tuple(tp), tuple(fp), tuple(tn),
                         tuple(fn), tuple(e[2] for e in entries),
                         tuple(e[0] for e in entries),
                         tuple(e[1] for e in entries), default_threshold)


def write_confusion_csv(outcome: DetectOutcome, path, meta: dict | None = None) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        if meta:
            fh.write(format_meta(meta) + "\n")
        w = csv.writer(fh)
        w.writerow(["threshold", "tp", "fp", "tn", "fn", "recall", "fpr"])
        for i, thr in enumerate(outcome.thresholds):
            recall, fpr = outcome.at(thr)
            w.writerow(["%.10g" % thr, outcome.tp[i], outcome.fp[i],
                        outcome.tn[i], outcome.fn[i],
                        "%.10g" % recall, "%.10g" % fpr])


def write_roc_csv(outcome: DetectOutcome, path, meta: dict | None = None) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        if meta:
            fh.write(format_meta(meta) + "\n")
        w = csv.writer(fh)
        w.writerow(["fpr", "tpr", "threshold"])
        for i, thr in enumerate(outcome.thresholds):
            recall, fpr = outcome.at(thr)
            w.writerow(["%.10g" % fpr, "%.10g" % recall, "%.10g" % thr])
