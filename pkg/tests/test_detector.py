"""I/O telemetry and periodicity detection."""

import numpy as np
import pytest

from diskradio import detector as det
from diskradio.errors import ConfigError, InsufficientDataError
from diskradio.experiments import benign_trace, covert_trace
from diskradio.signals import ActivityTrace, OpEvent


def test_empty_trace_zero_telemetry():
    tel = det.telemetry_from_trace(ActivityTrace((), 40.0), 20.0)
    assert np.all(tel.iops == 0.0)
    assert np.all(tel.utilization == 0.0)
    assert tel.duration == pytest.approx(40.0)


def test_back_to_back_reads_full_utilization():
    events = tuple(OpEvent("read", float(k), 1.0) for k in range(40))
    tel = det.telemetry_from_trace(ActivityTrace(events, 40.0), 20.0)
    assert np.all(tel.utilization == 1.0)


def test_alternating_on_off_utilization():
    # Oracle: direct construction, 1 s on / 1 s off at 0.5 Hz.
    events = tuple(OpEvent("read", 2.0 * k, 1.0) for k in range(20))
    tel = det.telemetry_from_trace(ActivityTrace(events, 40.0), 20.0)
    expected = np.tile(np.repeat([1.0, 0.0], 20), 20)
    assert np.array_equal(tel.utilization, expected)


def test_transmission_flagged_with_bit_period():
    trace = covert_trace(90.0, 1.0, seed=12)
    rep = det.detect(det.telemetry_from_trace(trace))
    assert rep.flagged
    assert rep.dominant_period == pytest.approx(1.0, abs=0.1)
    assert 0.2 <= rep.duty_cycle_est <= 0.8


def test_file_copy_interferer_not_flagged():
    trace = benign_trace("file-copy", 90.0, seed=4)
    rep = det.detect(det.telemetry_from_trace(trace))
    assert not rep.flagged


def test_browser_bursts_not_flagged():
    trace = benign_trace("browser", 90.0, seed=4)
    rep = det.detect(det.telemetry_from_trace(trace))
    assert not rep.flagged
    assert rep.periodicity_score < 0.3


def test_zero_telemetry_score_zero():
    tel = det.IoTelemetry(np.zeros(2000), np.zeros(2000), 20.0)
    rep = det.detect(tel)
    assert not rep.flagged
    assert rep.periodicity_score == 0.0
    assert rep.dominant_period is None


def test_short_telemetry_rejected():
    tel = det.IoTelemetry(np.zeros(100), np.zeros(100), 20.0)
    with pytest.raises(InsufficientDataError):
        det.detect(tel)


def test_detect_is_deterministic():
    trace = covert_trace(70.0, 0.6, seed=9)
    tel = det.telemetry_from_trace(trace)
    a = det.detect(tel)
    b = det.detect(tel)
    assert a == b


def test_time_scale_covariance():
    # Stretch factors keep the bit period on the telemetry window grid;
    # off-grid periods smear over adjacent lags in any sampled detector.
    trace = covert_trace(80.0, 0.4, seed=21)
    base = det.detect(det.telemetry_from_trace(trace))
    for k in (0.5, 1.5, 2.0):
        scaled = ActivityTrace(
            tuple(OpEvent(ev.kind, ev.start * k, ev.duration * k)
                  for ev in trace.events),
            trace.total_duration * k,
        )
        rep = det.detect(det.telemetry_from_trace(scaled))
        assert rep.dominant_period == pytest.approx(base.dominant_period * k,
                                                    rel=0.15)
        assert abs(rep.periodicity_score - base.periodicity_score) <= 0.05


def test_off_grid_period_still_recovered():
    # 0.25 s bits sit between 50 Hz windows; the comb fundamental must
    # still be identified even though its direct peak is smeared.
    trace = covert_trace(80.0, 0.25, seed=3)
    rep = det.detect(det.telemetry_from_trace(trace))
    assert rep.flagged
    assert rep.dominant_period == pytest.approx(0.25, abs=0.05)


def test_flagged_implies_score_at_threshold():
    for seed in range(6):
        trace = covert_trace(70.0, 0.8, seed=seed)
        rep = det.detect(det.telemetry_from_trace(trace), threshold=0.6)
        if rep.flagged:
            assert rep.periodicity_score >= 0.6


def test_telemetry_validation():
    with pytest.raises(ConfigError):
        det.IoTelemetry(np.zeros(10), np.zeros(9), 20.0)
    with pytest.raises(ConfigError):
        det.IoTelemetry(np.zeros(10), np.full(10, 1.5), 20.0)
    with pytest.raises(ConfigError):
        det.telemetry_from_trace(ActivityTrace((), 10.0), 0.0)


def test_telemetry_csv_round_trip(tmp_path):
    trace = covert_trace(40.0, 1.0, seed=1)
    tel = det.telemetry_from_trace(trace, 20.0, process_label="job")
    path = tmp_path / "tel.csv"
    det.write_telemetry_csv(tel, path, {"seed": 1})
    back = det.read_telemetry_csv(path, process_label="job")
    assert back.sample_rate == pytest.approx(20.0)
    assert np.allclose(back.iops, tel.iops)
    assert np.allclose(back.utilization, tel.utilization)
