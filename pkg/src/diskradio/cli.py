"""Command-line front door.

Subcommands: transmit, receive, pipeline, ber-sweep, bit-time-sweep, jam,
detect, presets. Global flags --seed/--preset/--out-dir/--config apply to
every subcommand; a config file is plain key=value text providing defaults
that explicit flags override. Exit codes: 0 ok, 2 config error, 3 sync
failure, 4 parity failure, 5 insufficient data.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import channel as chn
from . import plots
from .detector import DEFAULT_THRESHOLD
from .errors import DiskRadioError, ConfigError, EXIT_OK
from .experiments import (
    ExperimentSpec,
    ber_sweep,
    bit_time_sweep,
    detect_experiment,
    jam_experiment,
    run_pipeline,
    write_bit_time_csv,
    write_confusion_csv,
    write_jam_csv,
    write_roc_csv,
    write_sweep_csv,
)
from .receiver import ReceiverConfig, stream_decode, write_reports_csv
from .signals import read_series_csv, write_series_csv, write_trace_csv
from .transmitter import synthesize_emission, schedule_message


def _read_config_file(path: str) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"config: line {lineno}: expected key=value")
        key, _, val = line.partition("=")
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def _apply_config_defaults(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    """Values from --config fill in options the user left at their default."""
    if not getattr(args, "config", None):
        return
    file_values = _read_config_file(args.config)
    sub = parser._diskradio_subparsers[args.command]
    actions = {a.dest: a for a in sub._actions}
    for key, raw in file_values.items():
        action = actions.get(key)
        if action is None:
            continue
        if getattr(args, key) != action.default:
            continue  # explicit flag wins
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            setattr(args, key, raw.lower() in ("1", "true", "yes", "on"))
        elif action.type is not None:
            setattr(args, key, action.type(raw))
        else:
            setattr(args, key, raw)


def _parse_message(args) -> bytes:
    if getattr(args, "message", None) is not None:
        return args.message.encode()
    return b""


def _spec_from_args(args, name: str) -> ExperimentSpec:
    return ExperimentSpec(
        name=name,
        message=_parse_message(args),
        bit_time=args.bit_time,
        s_read=args.s_read,
        preset=args.preset,
        target_snr=args.snr,
        noise_profile=args.noise_profile,
        workload=args.workload,
        vm=args.vm,
        jam_t_max=args.jam_t_max,
        seed=args.seed,
        out_dir=Path(args.out_dir),
        sample_rate=args.sample_rate,
        level_lookup=args.level_lookup,
    )


def _float_list(text: str) -> list[float]:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        out.append(math.inf if tok in ("inf", "infinite") else float(tok))
    if not out:
        raise ConfigError("grid: empty value list")
    return out


def _add_common(sub, *, message=False, tx=False, channel=False):
    sub.add_argument("--seed", type=int, default=0, help="master RNG seed")
    sub.add_argument("--out-dir", default="out", help="output directory")
    sub.add_argument("--config", default=None,
                     help="key=value file supplying defaults")
    sub.add_argument("--no-figures", action="store_true",
                     help="skip PNG figure rendering")
    if message:
        sub.add_argument("-m", "--message", default=None,
                         help="ASCII message to transmit")
    if tx:
        sub.add_argument("--bit-time", type=float, default=1.0,
                         help="seconds per bit (read=write=zero)")
        sub.add_argument("--s-read", type=float, default=1.0,
                         help="probability a 1-bit uses a read op")
        sub.add_argument("--sample-rate", type=float, default=50.0,
                         help="envelope sample rate (Hz)")
        sub.add_argument("--level-lookup", action="store_true",
                         help="per-burst on-level from the duration table")
    if channel:
        sub.add_argument("--preset", default=None,
                         help="channel preset name (see `presets`)")
        sub.add_argument("--snr", type=float, default=None,
                         help="explicit target SNR in dB (overrides preset)")
        sub.add_argument("--noise-profile", default="default",
                         choices=sorted(chn.NOISE_PROFILES),
                         help="noise fluctuation profile")
        sub.add_argument("--workload", default=None,
                         choices=chn.WORKLOAD_PROFILES,
                         help="background workload profile")
        sub.add_argument("--vm", action="store_true",
                         help="transmit from inside a virtual machine")
        sub.add_argument("--jam-t-max", type=float, default=None,
                         help="enable jammer with this max burst time (s)")
        sub.add_argument("--presets-file", default=None,
                         help="extra presets from a `name = snr, source` file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diskradio",
        description="Disk-activity electromagnetic covert channel simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    registry: dict[str, argparse.ArgumentParser] = {}

    def add(name, **kw):
        p = sub.add_parser(name, **kw)
        registry[name] = p
        return p

    p = add("transmit", help="schedule a message and write its emission")
    _add_common(p, message=True, tx=True)

    p = add("receive", help="decode frames from a power-series CSV")
    _add_common(p)
    p.add_argument("input", help="received PowerSeries CSV")
    p.add_argument("--min-preamble-score", type=float, default=0.75)

    p = add("pipeline", help="end-to-end transmit/channel/decode")
    _add_common(p, message=True, tx=True, channel=True)

    p = add("ber-sweep", help="Monte Carlo BER across an SNR grid")
    _add_common(p, tx=True)
    p.add_argument("--snr-grid", default="20,15,13,9",
                   help="comma-separated SNR values in dB")
    p.add_argument("--bits", type=int, default=2000,
                   help="payload bits per grid point")
    p.add_argument("--noise-profile", default="calibrated",
                   choices=sorted(chn.NOISE_PROFILES))

    p = add("bit-time-sweep", help="on-level and decode check per bit time")
    _add_common(p)
    p.add_argument("--times", default="0.2,0.4,0.6,0.8,1.0,1.2",
                   help="comma-separated bit times in seconds")

    p = add("jam", help="SNR/BER with and without the jammer")
    _add_common(p, message=True, tx=True, channel=True)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--t-max", type=float, default=1.0,
                   help="jammer max burst time (s)")

    p = add("detect", help="labeled corpus, confusion matrices, ROC")
    _add_common(p)
    p.add_argument("--covert", type=int, default=60, help="covert trace count")
    p.add_argument("--benign", type=int, default=60, help="benign trace count")
    p.add_argument("--threshold", type=float, default=DEFAULT_THRESHOLD)

    p = add("presets", help="list channel presets")
    _add_common(p)
    p.add_argument("--presets-file", default=None,
                   help="extra presets from a `name = snr, source` file")

    parser._diskradio_subparsers = registry
    return parser


def _cmd_transmit(args) -> int:
    spec = _spec_from_args_tx_only(args, "transmit")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trace, frames = schedule_message(spec.message, spec.tx_config())
    meta = spec.meta(frames=len(frames))
    trace_path = out / "transmit_tx_trace.csv"
    write_trace_csv(trace, trace_path, meta)
    paths = [trace_path]
    if frames:
        env = synthesize_emission(trace, spec.sample_rate,
                                  level_lookup=spec.level_lookup)
        series_path = out / "transmit_tx_series.csv"
        write_series_csv(env, series_path, meta)
        paths.append(series_path)
        if not args.no_figures:
            paths.append(plots.plot_series(env, out / "transmit_tx_series.png",
                                           title="transmitted emission"))
    print(f"scheduled {len(frames)} frame(s), {len(trace.events)} events")
    for p in paths:
        print(f"wrote {p}")
    return EXIT_OK


def _spec_from_args_tx_only(args, name: str) -> ExperimentSpec:
    return ExperimentSpec(
        name=name, message=_parse_message(args), bit_time=args.bit_time,
        s_read=args.s_read, seed=args.seed, out_dir=Path(args.out_dir),
        sample_rate=args.sample_rate, level_lookup=args.level_lookup,
    )


def _cmd_receive(args) -> int:
    series = read_series_csv(args.input)
    cfg = ReceiverConfig(min_preamble_score=args.min_preamble_score)
    reports = stream_decode(series, cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "receive_reports.csv"
    write_reports_csv(reports, path, {"seed": args.seed, "input": args.input})
    print(f"decoded {len(reports)} frame(s)")
    for r in reports:
        print(f"  t={r.sync_time:8.2f}s bit={r.bit_time_est:.3f}s "
              f"payload={r.payload:04x} parity_ok={r.parity_ok}")
    print(f"wrote {path}")
    if not args.no_figures:
        print(f"wrote {plots.plot_series(series, out / 'receive_series.png', title='received series')}")
    if not reports:
        # Distinguish a capture that ends mid-frame from one with no
        # preamble at all.
        from .errors import PartialFrameError, SyncError
        from .receiver import demodulate_frame
        try:
            demodulate_frame(series, cfg)
        except PartialFrameError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return exc.exit_code
        except SyncError:
            pass
        print("no frames recovered", file=sys.stderr)
        return 3
    if not all(r.parity_ok for r in reports):
        return 4
    return EXIT_OK


def _cmd_pipeline(args) -> int:
    if args.presets_file:
        chn.register_presets(chn.load_presets(args.presets_file))
    spec = _spec_from_args(args, "pipeline")
    result = run_pipeline(spec)
    text = result.decoded_bytes.rstrip(b"\x00")
    print(f"expected {result.frames_expected} frame(s), "
          f"decoded {len(result.reports)}; status: {result.status}")
    print(f"message: {text!r}")
    for p in result.artifacts:
        print(f"wrote {p}")
    if not args.no_figures and len(result.rx):
        out = Path(args.out_dir)
        tx_env = synthesize_emission(result.trace, spec.sample_rate,
                                     level_lookup=spec.level_lookup)
        print(f"wrote {plots.plot_series(result.rx, out / 'pipeline_signal.png', title='pipeline: received vs transmitted', extra=tx_env)}")
        from .experiments import _pipeline_spectrogram
        times, freqs, matrix = _pipeline_spectrogram(result.rx, spec)
        print(f"wrote {plots.plot_spectrogram(times, freqs, matrix, out / 'pipeline_spectrogram.png')}")
    if result.status == "sync":
        return 3
    if result.status == "parity":
        return 4
    return EXIT_OK


def _cmd_ber_sweep(args) -> int:
    grid = _float_list(args.snr_grid)
    result = ber_sweep(grid, bits_per_point=args.bits, seed=args.seed,
                       noise_profile=args.noise_profile,
                       bit_time=args.bit_time, sample_rate=args.sample_rate)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "ber_sweep.csv"
    write_sweep_csv(result, path, {
        "seed": args.seed, "noise_profile": args.noise_profile,
        "source": "bench_BER_vs_distance"})
    print(f"{'snr_db':>8} {'ber':>9} {'ci':>19} {'sync':>6}")
    for p in result.points:
        print(f"{p.snr_db:8.1f} {p.ber:9.4f} "
              f"[{p.ci_low:8.4f},{p.ci_high:8.4f}] {p.frame_sync_rate:6.2f}")
    print(f"monotone non-increasing with SNR: {result.monotone}")
    print(f"wrote {path}")
    if not args.no_figures:
        print(f"wrote {plots.plot_ber_sweep(result, out / 'ber_sweep.png')}")
    return EXIT_OK


def _cmd_bit_time_sweep(args) -> int:
    times = _float_list(args.times)
    points = bit_time_sweep(times, seed=args.seed)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "bit_time_sweep.csv"
    write_bit_time_csv(points, path, {
        "seed": args.seed, "source": "bench_bit_time_levels"})
    for p in points:
        print(f"bit {p.bit_time:4.2f}s -> {p.on_level_dbm:7.1f} dBm "
              f"decode_ok={p.decode_ok}")
    print(f"wrote {path}")
    if not args.no_figures:
        print(f"wrote {plots.plot_bit_time_sweep(points, out / 'bit_time_sweep.png')}")
    return EXIT_OK


def _cmd_jam(args) -> int:
    if args.presets_file:
        chn.register_presets(chn.load_presets(args.presets_file))
    spec = ExperimentSpec(
        name="jam", message=_parse_message(args), bit_time=args.bit_time,
        s_read=args.s_read, preset=args.preset, target_snr=args.snr,
        noise_profile=args.noise_profile, workload=args.workload,
        vm=args.vm, seed=args.seed, out_dir=Path(args.out_dir),
        sample_rate=args.sample_rate, level_lookup=args.level_lookup,
        trials=args.trials,
    )
    jcfg = chn.JammerConfig(t_max=args.t_max, rng_seed=args.seed)
    report = jam_experiment(spec, jcfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "jam_report.csv"
    write_jam_csv(report, path, spec.meta(t_max=args.t_max))
    print(f"SNR   clean {report.mean_snr_clean:6.2f} dB  "
          f"jammed {report.mean_snr_jammed:6.2f} dB")
    print(f"BER   clean {report.mean_ber_clean:6.3f}     "
          f"jammed {report.mean_ber_jammed:6.3f}")
    print(f"wrote {path}")
    if not args.no_figures:
        from .experiments import derived_seed
        rng = np.random.default_rng(derived_seed(spec.seed, 30, 0))
        msg = spec.message or bytes(rng.bytes(2))
        tcfg = spec.tx_config(seed=int(rng.integers(1 << 31)))
        trace, _ = schedule_message(msg, tcfg)
        env = synthesize_emission(trace, spec.sample_rate)
        sigma, block = chn.noise_profile_params(spec.noise_profile)
        clean = chn.apply_channel(env, chn.ChannelConfig(
            target_snr=spec.snr, noise_sigma=sigma, noise_block=block,
            rng_seed=int(rng.integers(1 << 31))))
        jammed = chn.jam(clean, chn.JammerConfig(
            t_max=args.t_max, rng_seed=derived_seed(args.seed, 0)))
        print(f"wrote {plots.plot_jam(clean, jammed, out / 'jam_compare.png')}")
    return EXIT_OK


def _cmd_detect(args) -> int:
    outcome = detect_experiment(n_covert=args.covert, n_benign=args.benign,
                                seed=args.seed,
                                default_threshold=args.threshold)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    conf_path = out / "detect_confusion.csv"
    roc_path = out / "detect_roc.csv"
    meta = {"seed": args.seed, "covert": args.covert, "benign": args.benign,
            "source": "io_telemetry_anomaly_detection"}
    write_confusion_csv(outcome, conf_path, meta)
    write_roc_csv(outcome, roc_path, meta)
    recall, fpr = outcome.at(args.threshold)
    print(f"threshold {args.threshold:g}: recall {recall:.3f}, FPR {fpr:.3f}")
    print(f"wrote {conf_path}")
    print(f"wrote {roc_path}")
    if not args.no_figures:
        print(f"wrote {plots.plot_roc(outcome, out / 'detect_roc.png')}")
    return EXIT_OK


def _cmd_presets(args) -> int:
    presets = dict(chn.PRESETS)
    if args.presets_file:
        presets.update(chn.load_presets(args.presets_file))
    width = max(len(n) for n in presets)
    for name in sorted(presets):
        p = presets[name]
        print(f"{name:<{width}}  {p.snr_db:5.1f} dB  {p.source}")
    print()
    print("noise profiles: " + ", ".join(
        f"{k} (sigma={v[0]:g} dB, block={v[1]:g} s)"
        for k, v in sorted(chn.NOISE_PROFILES.items())))
    print("workload profiles: " + ", ".join(chn.WORKLOAD_PROFILES))
    return EXIT_OK


_COMMANDS = {
    "transmit": _cmd_transmit,
    "receive": _cmd_receive,
    "pipeline": _cmd_pipeline,
    "ber-sweep": _cmd_ber_sweep,
    "bit-time-sweep": _cmd_bit_time_sweep,
    "jam": _cmd_jam,
    "detect": _cmd_detect,
    "presets": _cmd_presets,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config_defaults(args, parser)
        return _COMMANDS[args.command](args)
    except DiskRadioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
