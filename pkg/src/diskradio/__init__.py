"""Disk-activity electromagnetic covert channel simulator.

Models the whole chain without RF hardware: frame codec, disk-op
scheduling, band-power emission synthesis, the radio channel with
measured presets, receiver synchronization and demodulation, defensive
jamming, and I/O-telemetry anomaly detection.
"""

from .channel import (
    ChannelConfig,
    ChannelPreset,
    JammerConfig,
    NOISE_PROFILES,
    PRESETS,
    WORKLOAD_PROFILES,
    apply_channel,
    apply_vm,
    apply_workload,
    jam,
    load_presets,
)
from .detector import (
    DetectionReport,
    IoTelemetry,
    detect,
    telemetry_from_trace,
)
from .errors import (
    ConfigError,
    DiskRadioError,
    FramingError,
    InsufficientDataError,
    ParityError,
    PartialFrameError,
    SyncError,
    WidthError,
)
from .experiments import (
    ExperimentSpec,
    SweepResult,
    ber_sweep,
    bit_time_sweep,
    build_corpus,
    detect_experiment,
    jam_experiment,
    run_pipeline,
)
from .framing import (
    FRAME_BITS,
    Frame,
    decode_frame,
    encode_frame,
    serialize_message,
)
from .receiver import (
    DemodReport,
    ReceiverConfig,
    SpectralFrame,
    band_power,
    demodulate_frame,
    detect_preamble,
    spectrogram,
    stream_decode,
    synthesize_baseband,
)
from .signals import (
    ActivityTrace,
    OpEvent,
    PowerSeries,
    measure_snr,
)
from .transmitter import (
    TransmitterConfig,
    schedule_bits,
    schedule_message,
    synthesize_emission,
    transmit_message,
)

__version__ = "0.1.0"
