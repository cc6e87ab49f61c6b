"""Command-line behavior: subcommands, exit codes, reproducibility."""

from diskradio.cli import main


def run(argv):
    return main([str(a) for a in argv])


def test_pipeline_roundtrip(tmp_path, capsys):
    code = run(["pipeline", "-m", "SECRET", "--preset", "pc1-30cm-read",
                "--seed", 7, "--out-dir", tmp_path, "--no-figures"])
    out = capsys.readouterr().out
    assert code == 0
    assert "b'SECRET'" in out
    assert (tmp_path / "pipeline_reports.csv").exists()
    assert (tmp_path / "pipeline_spectrogram.csv").exists()


def test_pipeline_renders_figures(tmp_path):
    code = run(["pipeline", "-m", "OK", "--snr", "20", "--seed", 1,
                "--out-dir", tmp_path])
    assert code == 0
    assert (tmp_path / "pipeline_signal.png").exists()
    assert (tmp_path / "pipeline_spectrogram.png").exists()


def test_empty_message_success(tmp_path):
    assert run(["pipeline", "--out-dir", tmp_path, "--no-figures"]) == 0


def test_unknown_preset_is_config_error(tmp_path, capsys):
    code = run(["pipeline", "-m", "X", "--preset", "nope",
                "--out-dir", tmp_path])
    assert code == 2
    assert "preset" in capsys.readouterr().err


def test_degraded_decode_exit_code(tmp_path):
    code = run(["pipeline", "-m", "SECRET", "--snr", "3",
                "--noise-profile", "calibrated", "--seed", 3,
                "--out-dir", tmp_path, "--no-figures"])
    assert code in (3, 4)


def test_transmit_then_receive(tmp_path):
    assert run(["transmit", "-m", "HI", "--seed", 2,
                "--out-dir", tmp_path, "--no-figures"]) == 0
    series = tmp_path / "transmit_tx_series.csv"
    assert series.exists()
    assert run(["receive", series, "--out-dir", tmp_path,
                "--no-figures"]) == 0
    assert (tmp_path / "receive_reports.csv").exists()


def test_receive_sync_failure_exit_code(tmp_path):
    path = tmp_path / "floor.csv"
    lines = ["t_s,power_dbm"] + [f"{k * 0.02},-100" for k in range(500)]
    path.write_text("\n".join(lines) + "\n")
    assert run(["receive", path, "--out-dir", tmp_path, "--no-figures"]) == 3


def test_receive_truncated_frame_exit_code(tmp_path):
    from diskradio.signals import PowerSeries, write_series_csv
    from diskradio.transmitter import TransmitterConfig, transmit_message

    env = transmit_message(b"OK", TransmitterConfig(rng_seed=1), 50.0)
    cut = PowerSeries(env.samples[: 10 * 50], 50.0)
    path = tmp_path / "cut.csv"
    write_series_csv(cut, path)
    assert run(["receive", path, "--out-dir", tmp_path, "--no-figures"]) == 5


def test_bit_time_sweep_outputs(tmp_path, capsys):
    assert run(["bit-time-sweep", "--out-dir", tmp_path,
                "--no-figures"]) == 0
    text = (tmp_path / "bit_time_sweep.csv").read_text()
    assert text.startswith("#")
    assert "source=" in text.splitlines()[0]
    assert "-72" in text and "-68" in text


def test_presets_listing(capsys, tmp_path):
    assert run(["presets"]) == 0
    out = capsys.readouterr().out
    assert "pc1-30cm-read" in out and "20.0 dB" in out
    extra = tmp_path / "extra.txt"
    extra.write_text("lab-2m-read = 6.5, lab bench at 2 m\n")
    assert run(["presets", "--presets-file", extra]) == 0
    assert "lab-2m-read" in capsys.readouterr().out


def test_detect_outputs(tmp_path):
    assert run(["detect", "--covert", 8, "--benign", 8, "--seed", 0,
                "--out-dir", tmp_path, "--no-figures"]) == 0
    roc = (tmp_path / "detect_roc.csv").read_text().splitlines()
    assert roc[1] == "fpr,tpr,threshold"
    assert (tmp_path / "detect_confusion.csv").exists()


def test_config_file_supplies_defaults(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("message = OK\npreset = pc1-30cm-read\nseed = 4\n")
    code = run(["pipeline", "--config", cfg, "--out-dir", tmp_path,
                "--no-figures"])
    assert code == 0
    assert "b'OK'" in capsys.readouterr().out


def test_cli_flag_overrides_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("message = OK\nsnr = 20\n")
    code = run(["pipeline", "--config", cfg, "-m", "NO", "--out-dir", tmp_path,
                "--no-figures"])
    assert code == 0
    assert "b'NO'" in capsys.readouterr().out


def test_repeat_runs_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run(["pipeline", "-m", "SECRET", "--preset", "pc1-60cm-read",
                    "--seed", 42, "--out-dir", out, "--no-figures"]) == 0
    for name in ("pipeline_tx_trace.csv", "pipeline_rx_series.csv",
                 "pipeline_spectrogram.csv", "pipeline_reports.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
