"""Channel calibration, presets, workloads, VM degradation, jamming."""

import math

import numpy as np
import pytest

from diskradio import channel as ch
from diskradio import transmitter as tx
from diskradio.errors import ConfigError
from diskradio.signals import ActivityTrace, measure_snr, power_sum


def _test_signal(bits=120, bit_time=0.5, seed=3, fs=50.0):
    cfg = tx.TransmitterConfig(t_read=bit_time, t_write=bit_time,
                               t_zero=bit_time, rng_seed=seed)
    trace = tx.schedule_bits([1, 0] * (bits // 2), cfg)
    return tx.synthesize_emission(trace, fs), trace


def test_infinite_snr_zero_sigma_is_identity():
    env, _ = _test_signal()
    out = ch.apply_channel(env, ch.ChannelConfig(target_snr=math.inf,
                                                 noise_sigma=0.0))
    assert np.array_equal(out.samples, env.samples)


def test_snr_calibration_within_1db():
    # Full supported range, band edges included.
    env, trace = _test_signal()
    for target in (3.0, 5.0, 9.0, 13.0, 15.0, 20.0, 30.0):
        for trial in range(30):
            cfg = ch.ChannelConfig(target_snr=target, rng_seed=1000 + trial)
            measured = measure_snr(ch.apply_channel(env, cfg), trace)
            assert abs(measured - target) <= 1.0


def test_preset_pc1_30cm_read():
    env, trace = _test_signal()
    cfg = ch.ChannelConfig.from_preset("pc1-30cm-read", rng_seed=5)
    assert cfg.target_snr == 20.0
    measured = measure_snr(ch.apply_channel(env, cfg), trace)
    assert measured == pytest.approx(20.0, abs=1.0)


def test_preset_pc1_120cm_read():
    env, trace = _test_signal()
    cfg = ch.ChannelConfig.from_preset("pc1-120cm-read", rng_seed=6)
    measured = measure_snr(ch.apply_channel(env, cfg), trace)
    assert measured == pytest.approx(9.0, abs=1.0)


def test_preset_values_verbatim():
    assert ch.get_preset("pc1-30cm-write").snr_db == 10.0
    assert ch.get_preset("pc2-30cm-read").snr_db == 1.0  # stored as measured
    assert ch.get_preset("pc3-30cm-read").snr_db == 7.0


def test_unknown_preset_and_profile_rejected():
    with pytest.raises(ConfigError):
        ch.get_preset("pc9-10cm-read")
    with pytest.raises(ConfigError):
        ch.noise_profile_params("uncalibrated")
    env, _ = _test_signal(bits=20)
    with pytest.raises(ConfigError):
        ch.apply_workload(env, "compiling", seed=1)


def test_load_presets_file(tmp_path):
    path = tmp_path / "presets.txt"
    path.write_text("# extras\nlab-1m-read = 11.5, lab bench at 1 m\n")
    presets = ch.load_presets(path)
    assert presets["lab-1m-read"].snr_db == 11.5
    assert presets["lab-1m-read"].source == "lab bench at 1 m"
    bad = tmp_path / "bad.txt"
    bad.write_text("lab = notanumber, x\n")
    with pytest.raises(ConfigError):
        ch.load_presets(bad)


def test_idle_workload_band():
    env, trace = _test_signal(bits=200)
    for seed in range(20):
        out = ch.apply_workload(env, "idle", seed=seed)
        assert 15.0 <= measure_snr(out, trace) <= 20.0


def test_file_copy_workload_band():
    env, trace = _test_signal(bits=200)
    for seed in range(20):
        out = ch.apply_workload(env, "file-copy", seed=seed)
        assert 4.5 <= measure_snr(out, trace) <= 5.5


def test_cpu_and_idle_same_band():
    env, trace = _test_signal(bits=200)
    idle = [measure_snr(ch.apply_workload(env, "idle", seed=s), trace)
            for s in range(15)]
    cpu = [measure_snr(ch.apply_workload(env, "cpu-intensive", seed=s), trace)
           for s in range(15)]
    assert 15.0 <= min(idle + cpu) and max(idle + cpu) <= 20.0
    assert abs(np.mean(idle) - np.mean(cpu)) <= 1.5


def test_vm_degenerate_parameters_identity():
    env, _ = _test_signal(bits=40)
    out = ch.apply_vm(env, seed=1, reduction_db=0.0, jitter_s=0.0)
    assert np.array_equal(out.samples, env.samples)


def test_vm_reduces_snr_by_5db():
    env, trace = _test_signal(bits=100, bit_time=1.0)
    for seed in range(15):
        cfg = ch.ChannelConfig(target_snr=20.0, rng_seed=seed)
        clean = ch.apply_channel(env, cfg)
        vm = ch.apply_vm(clean, seed=seed)
        drop = measure_snr(clean, trace) - measure_snr(vm, trace)
        assert drop == pytest.approx(5.0, abs=1.0)


def test_vm_degraded_frame_still_decodes():
    from diskradio.receiver import demodulate_frame

    env = tx.transmit_message(b"OK", tx.TransmitterConfig(rng_seed=2), 50.0)
    rx = ch.apply_channel(env, ch.ChannelConfig(target_snr=20.0, rng_seed=3))
    vm = ch.apply_vm(rx, seed=4)
    rep = demodulate_frame(vm)
    assert rep.parity_ok and rep.payload == 0x4F4B


def test_jam_with_no_bursts_is_identity():
    env, _ = _test_signal(bits=40)
    out = ch.superimpose_trace(env, ActivityTrace((), env.duration), -68.0)
    assert np.array_equal(out.samples, env.samples)


def test_jam_drives_snr_into_band():
    env, trace = _test_signal(bits=120, bit_time=0.5)
    vals = []
    for seed in range(20):
        clean = ch.apply_channel(env, ch.ChannelConfig(target_snr=20.0,
                                                       rng_seed=seed))
        jammed = ch.jam(clean, ch.JammerConfig(t_max=1.0, rng_seed=seed + 99))
        vals.append(measure_snr(jammed, trace))
    assert all(3.5 <= v <= 5.5 for v in vals)


def test_channel_ops_preserve_shape():
    env, _ = _test_signal(bits=60)
    outs = [
        ch.apply_channel(env, ch.ChannelConfig(target_snr=12.0, rng_seed=1)),
        ch.apply_workload(env, "file-copy", seed=2),
        ch.apply_vm(env, seed=3),
        ch.jam(env, ch.JammerConfig(rng_seed=4)),
    ]
    for out in outs:
        assert len(out) == len(env)
        assert out.sample_rate == env.sample_rate


def test_channel_determinism():
    env, _ = _test_signal(bits=60)
    cfg = ch.ChannelConfig(target_snr=10.0, rng_seed=77)
    a = ch.apply_channel(env, cfg)
    b = ch.apply_channel(env, cfg)
    assert np.array_equal(a.samples, b.samples)
    ja = ch.jam(env, ch.JammerConfig(rng_seed=7))
    jb = ch.jam(env, ch.JammerConfig(rng_seed=7))
    assert np.array_equal(ja.samples, jb.samples)


def test_superposition_commutes():
    # Power-domain sums commute exactly for matched seeds.
    env, trace = _test_signal(bits=80)
    jam_tr = ch.jam_trace(env.duration, ch.JammerConfig(rng_seed=5))
    int_tr = ch.interferer_trace(env.duration, np.random.default_rng(6))
    a = ch.superimpose_trace(ch.superimpose_trace(env, jam_tr, -70.0),
                             int_tr, -71.0)
    b = ch.superimpose_trace(ch.superimpose_trace(env, int_tr, -71.0),
                             jam_tr, -70.0)
    assert np.allclose(a.samples, b.samples, atol=1e-9)


def test_power_sum_matches_linear_math():
    env, _ = _test_signal(bits=10)
    doubled = power_sum(env, env)
    assert np.allclose(doubled.samples, env.samples + 10 * np.log10(2.0))


def test_linear_noise_mode_hits_target():
    env, trace = _test_signal(bits=400)
    cfg = ch.ChannelConfig(target_snr=10.0, noise_sigma=0.0,
                           noise_domain="linear", rng_seed=11)
    out = ch.apply_channel(env, cfg)
    assert measure_snr(out, trace) == pytest.approx(10.0, abs=1.0)


def test_invalid_channel_configs():
    with pytest.raises(ConfigError):
        ch.ChannelConfig(noise_sigma=-1.0)
    with pytest.raises(ConfigError):
        ch.ChannelConfig(noise_domain="cubic")
    with pytest.raises(ConfigError):
        ch.JammerConfig(t_max=0.0)
    env, _ = _test_signal(bits=10)
    with pytest.raises(ConfigError):
        ch.apply_channel(env, ch.ChannelConfig(target_snr=0.0))
