"""Fixed-length frame codec for the on-off keyed covert channel.

Frame layout (21 bits on the air):

    +----------+------------------+--------+
    | PREAMBLE | PAYLOAD          | PARITY |
    | 4 bits   | 16 bits          | 1 bit  |
    +----------+------------------+--------+

- PREAMBLE: the fixed alternating pattern 1,0,1,0; receivers use it to
  synchronize and to estimate the bit clock and on/off levels.
- PAYLOAD: 16 bits, most significant bit first. Messages pack two bytes
  per frame in network (big-endian) order; a trailing odd byte is padded
  with a zero byte.
- PARITY: even parity (XOR) over the 16 payload bits only. Detects any
  odd number of bit errors in payload+parity; even-weight errors pass.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FramingError, SyncError, WidthError

PREAMBLE = (1, 0, 1, 0)
PAYLOAD_BITS = 16
FRAME_BITS = len(PREAMBLE) + PAYLOAD_BITS + 1
BYTES_PER_FRAME = PAYLOAD_BITS // 8


def even_parity(value: int) -> int:
    """XOR of the bits of value."""
    return bin(value).count("1") & 1


@dataclass(frozen=True)
class Frame:
    """A single 21-bit frame; parity is derived from the payload."""

    payload: int

    def __post_init__(self):
        if not 0 <= self.payload < (1 << PAYLOAD_BITS):
            raise WidthError(
                f"payload: must be a {PAYLOAD_BITS}-bit value, got {self.payload!r}"
            )

    @property
    def parity(self) -> int:
        return even_parity(self.payload)

    def bits(self) -> list[int]:
        payload = [(self.payload >> (PAYLOAD_BITS - 1 - i)) & 1
                   for i in range(PAYLOAD_BITS)]
        return list(PREAMBLE) + payload + [self.parity]

    def payload_bytes(self) -> bytes:
        return self.payload.to_bytes(BYTES_PER_FRAME, "big")


def encode_frame(payload: int) -> Frame:
    """Build a frame around a 16-bit payload value."""
    if not isinstance(payload, int):
        raise WidthError(f"payload: expected an int, got {type(payload).__name__}")
    return Frame(payload)


def decode_frame(bits) -> tuple[int, bool]:
    """Recover (payload, parity_ok) from a 21-bit vector.

    Raises FramingError on wrong length and SyncError on a preamble
    mismatch; a failed parity check is reported in-band, not raised.
    """
    bits = list(bits)
    if len(bits) != FRAME_BITS:
        raise FramingError(f"bits: expected {FRAME_BITS} bits, got {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise FramingError("bits: elements must be 0 or 1")
    if tuple(bits[: len(PREAMBLE)]) != PREAMBLE:
        raise SyncError(f"preamble mismatch: {bits[:len(PREAMBLE)]}")
    payload = 0
    for b in bits[len(PREAMBLE): len(PREAMBLE) + PAYLOAD_BITS]:
        payload = (payload << 1) | b
    parity_ok = bits[-1] == even_parity(payload)
    return payload, parity_ok


def serialize_message(data: bytes) -> list[Frame]:
    """Pack bytes two per frame, big-endian; odd input gets a zero pad byte."""
    data = bytes(data)
    if len(data) % BYTES_PER_FRAME:
        data += b"\x00"
    return [
        encode_frame(int.from_bytes(data[i: i + BYTES_PER_FRAME], "big"))
        for i in range(0, len(data), BYTES_PER_FRAME)
    ]


def deserialize_payloads(payloads) -> bytes:
    """Inverse of serialize_message, keeping any trailing pad byte."""
    return b"".join(
        int(p).to_bytes(BYTES_PER_FRAME, "big") for p in payloads
    )


def bits_to_string(bits) -> str:
    return "".join(str(b) for b in bits)


def string_to_bits(text: str) -> list[int]:
    text = text.strip()
    if any(c not in "01" for c in text):
        raise FramingError(f"bits: invalid character in bit string {text!r}")
    return [int(c) for c in text]
