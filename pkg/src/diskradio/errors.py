"""Exception taxonomy and process exit codes.

Each failure class maps to a distinct exit code so scripted callers can
tell configuration mistakes apart from decode failures.
"""


class DiskRadioError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ConfigError(DiskRadioError):
    """Invalid configuration value; the message names the offending field."""

    exit_code = 2


class WidthError(ConfigError):
    """Payload value does not fit the fixed frame payload width."""


class FramingError(DiskRadioError):
    """Bit vector has the wrong length for a frame."""

    exit_code = 4


class SyncError(DiskRadioError):
    """No valid preamble found (distinct from parity/decode failures)."""

    exit_code = 3


class ParityError(DiskRadioError):
    """One or more decoded frames failed the parity check."""

    exit_code = 4


class PartialFrameError(DiskRadioError):
    """Series ends before a synchronized frame completes."""

    exit_code = 5


class InsufficientDataError(DiskRadioError):
    """Input telemetry or series too short for the requested analysis."""

    exit_code = 5


EXIT_OK = 0
