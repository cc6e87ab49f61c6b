"""Scheduling and emission synthesis."""

import numpy as np
import pytest

from diskradio import transmitter as tx
from diskradio.errors import ConfigError
from diskradio.signals import READ, SLEEP, WRITE


def test_zero_bit_is_single_sleep():
    cfg = tx.TransmitterConfig(t_zero=0.7)
    trace = tx.schedule_bits([0], cfg)
    assert len(trace.events) == 1
    ev = trace.events[0]
    assert ev.kind == SLEEP and ev.duration == 0.7 and ev.start == 0.0


def test_one_bit_with_sread_one_is_read():
    cfg = tx.TransmitterConfig(t_read=0.4, s_read=1.0)
    trace = tx.schedule_bits([1], cfg)
    assert trace.events[0].kind == READ
    assert trace.events[0].duration == 0.4


def test_one_bit_with_sread_zero_is_write():
    cfg = tx.TransmitterConfig(t_write=0.3, s_read=0.0)
    trace = tx.schedule_bits([1], cfg)
    assert trace.events[0].kind == WRITE
    assert trace.events[0].duration == 0.3


def test_read_fraction_matches_sread():
    # Oracle: binomial confidence interval at n = 10,000.
    cfg = tx.TransmitterConfig(s_read=0.7, rng_seed=42)
    trace = tx.schedule_bits([1] * 10_000, cfg)
    reads = sum(1 for ev in trace.events if ev.kind == READ)
    assert abs(reads / 10_000 - 0.7) <= 0.02


def test_empty_bits_empty_trace():
    trace = tx.schedule_bits([], tx.TransmitterConfig())
    assert trace.events == () and trace.total_duration == 0.0


def test_one_event_per_bit_and_total_duration():
    bits = [1, 0, 1, 1, 0, 0, 1]
    cfg = tx.TransmitterConfig(t_read=0.5, t_write=0.5, t_zero=0.5, rng_seed=9)
    trace = tx.schedule_bits(bits, cfg)
    assert len(trace.events) == len(bits)
    assert trace.total_duration == pytest.approx(len(bits) * 0.5)


def test_determinism():
    bits = [1, 0, 1] * 20
    cfg = tx.TransmitterConfig(s_read=0.5, rng_seed=123)
    a = tx.schedule_bits(bits, cfg)
    b = tx.schedule_bits(bits, cfg)
    assert a == b
    ea = tx.synthesize_emission(a, 50.0)
    eb = tx.synthesize_emission(b, 50.0)
    assert np.array_equal(ea.samples, eb.samples)


def test_invalid_config_rejected():
    with pytest.raises(ConfigError):
        tx.TransmitterConfig(t_read=0.0)
    with pytest.raises(ConfigError):
        tx.TransmitterConfig(s_read=1.5)
    with pytest.raises(ConfigError):
        tx.TransmitterConfig(t_zero=-1.0)


def test_empty_trace_all_floor():
    from diskradio.signals import ActivityTrace

    env = tx.synthesize_emission(ActivityTrace((), 2.0), 50.0, floor=-100.0)
    assert len(env) == 100
    assert np.all(env.samples == -100.0)


def test_rectangular_pulse_then_floor():
    cfg = tx.TransmitterConfig(t_read=1.0, t_zero=1.0)
    trace = tx.schedule_bits([1, 0], cfg)
    env = tx.synthesize_emission(trace, 50.0, p_read=-68.0, write_penalty=3.0,
                                 floor=-100.0)
    assert np.all(env.samples[:50] == -68.0)
    assert np.all(env.samples[50:] == -100.0)


def test_read_write_plateaus_differ_by_exactly_3db():
    cfg = tx.TransmitterConfig(s_read=0.0)  # all writes
    writes = tx.synthesize_emission(tx.schedule_bits([1] * 4, cfg), 50.0)
    reads = tx.synthesize_emission(
        tx.schedule_bits([1] * 4, tx.TransmitterConfig(s_read=1.0)), 50.0)
    assert float(reads.samples.max() - writes.samples.max()) == 3.0


def test_envelope_takes_three_levels_only():
    cfg = tx.TransmitterConfig(s_read=0.5, rng_seed=5)
    trace = tx.schedule_bits([1, 0] * 30, cfg)
    env = tx.synthesize_emission(trace, 50.0, p_read=-68.0, write_penalty=3.0,
                                 floor=-100.0)
    assert set(np.unique(env.samples)) <= {-68.0, -71.0, -100.0}


def test_message_envelope_duration():
    # One 2-byte message at 1 bit/s is a single 21-bit frame: ~21 s active.
    cfg = tx.TransmitterConfig()
    env = tx.transmit_message(b"OK", cfg, 50.0)
    assert env.duration == pytest.approx(21.0)
    # Three frames pick up two inter-frame gaps.
    env3 = tx.transmit_message(b"SECRET", cfg, 50.0)
    assert env3.duration == pytest.approx(21 * 3 + 2)


def test_bit_time_sweep_pulse_widths():
    for t in (0.2, 0.4, 0.6, 0.8, 1.0, 1.2):
        cfg = tx.TransmitterConfig(t_read=t, t_write=t, t_zero=t)
        env = tx.synthesize_emission(tx.schedule_bits([0, 1, 0], cfg), 100.0)
        on = env.samples > -90
        assert on.sum() == pytest.approx(t * 100.0, abs=1)
        # pulse is contiguous
        idx = np.flatnonzero(on)
        assert idx[-1] - idx[0] + 1 == on.sum()


def test_level_lookup_table():
    assert tx.level_for_bit_time(0.2) == -72.0
    assert tx.level_for_bit_time(1.2) == -68.0
    assert tx.level_for_bit_time(0.7) == -70.0  # flat between 0.6 and 0.8
    assert tx.level_for_bit_time(0.5) == -71.0  # midway between -72 and -70
    assert tx.level_for_bit_time(0.05) == -72.0  # clamps low
    assert tx.level_for_bit_time(5.0) == -68.0  # clamps high


def test_level_lookup_in_emission():
    cfg = tx.TransmitterConfig(t_read=0.2, t_write=0.2, t_zero=0.2)
    env = tx.synthesize_emission(tx.schedule_bits([1], cfg), 50.0,
                                 level_lookup=True)
    assert env.samples.max() == -72.0


def test_onset_latency_shaves_leading_edge():
    cfg = tx.TransmitterConfig()
    trace = tx.schedule_bits([1], cfg)
    env = tx.synthesize_emission(trace, 50.0, onset_latency=0.2)
    assert np.all(env.samples[:10] == -100.0)
    assert np.all(env.samples[10:50] == -68.0)


def test_bad_sample_rate_rejected():
    trace = tx.schedule_bits([1], tx.TransmitterConfig())
    with pytest.raises(ConfigError):
        tx.synthesize_emission(trace, 0.0)
    with pytest.raises(ConfigError):
        tx.synthesize_emission(trace, 50.0, p_read=-100.0, floor=-90.0)
