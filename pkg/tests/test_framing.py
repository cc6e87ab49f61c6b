"""Frame codec: encode/decode, parity behavior, message packing."""

import pytest

from diskradio import framing
from diskradio.errors import FramingError, SyncError, WidthError


def test_all_zero_payload():
    frame = framing.encode_frame(0)
    assert frame.bits() == [1, 0, 1, 0] + [0] * 16 + [0]


def test_single_set_bit_gives_parity_one():
    for payload in (1, 1 << 15):
        assert framing.encode_frame(payload).parity == 1
        assert framing.encode_frame(payload).bits()[-1] == 1


def test_se_payload_round_trip():
    frame = framing.encode_frame(0x5345)
    payload, ok = framing.decode_frame(frame.bits())
    assert ok and payload == 0x5345
    assert frame.payload_bytes() == b"SE"


def test_frame_length_constant():
    for payload in (0, 0xFFFF, 0x1234, 0xAAAA):
        assert len(framing.encode_frame(payload).bits()) == framing.FRAME_BITS == 21


def test_round_trip_sampled():
    for payload in range(0, 1 << 16, 257):
        got, ok = framing.decode_frame(framing.encode_frame(payload).bits())
        assert ok and got == payload


def test_every_single_flip_detected():
    # Oracle: exhaustive sweep of the 17 payload+parity positions.
    bits = framing.encode_frame(0xBEEF).bits()
    for pos in range(4, 21):
        flipped = list(bits)
        flipped[pos] ^= 1
        payload, ok = framing.decode_frame(flipped)
        assert not ok, f"flip at {pos} undetected"


def test_double_payload_flip_undetected():
    bits = framing.encode_frame(0xBEEF).bits()
    flipped = list(bits)
    flipped[5] ^= 1
    flipped[11] ^= 1
    _, ok = framing.decode_frame(flipped)
    assert ok  # even parity only sees odd-weight errors


def test_payload_and_parity_flip_undetected():
    bits = framing.encode_frame(0x1234).bits()
    flipped = list(bits)
    flipped[7] ^= 1
    flipped[20] ^= 1
    _, ok = framing.decode_frame(flipped)
    assert ok


def test_wrong_length_is_framing_error():
    with pytest.raises(FramingError):
        framing.decode_frame([0, 1] * 10)
    with pytest.raises(FramingError):
        framing.decode_frame([0] * 22)


def test_bad_preamble_is_sync_error():
    bits = framing.encode_frame(7).bits()
    bits[0] = 0
    with pytest.raises(SyncError):
        framing.decode_frame(bits)


def test_payload_width_errors():
    with pytest.raises(WidthError):
        framing.encode_frame(1 << 16)
    with pytest.raises(WidthError):
        framing.encode_frame(-1)
    with pytest.raises(WidthError):
        framing.encode_frame("0xff")


def test_serialize_empty_message():
    assert framing.serialize_message(b"") == []


def test_serialize_secret_three_frames():
    frames = framing.serialize_message(b"SECRET")
    assert [f.payload_bytes() for f in frames] == [b"SE", b"CR", b"ET"]


def test_serialize_odd_length_pads():
    frames = framing.serialize_message(b"ABC")
    assert [f.payload_bytes() for f in frames] == [b"AB", b"C\x00"]


def _oracle_pack(data: bytes) -> list[int]:
    # Independent packer: digits via format strings, not shifts.
    if len(data) % 2:
        data += b"\x00"
    text = "".join(format(b, "08b") for b in data)
    return [int(text[i:i + 16], 2) for i in range(0, len(text), 16)]


def test_pack_unpack_against_independent_oracle():
    for msg in (b"SECRET", b"ABC", b"x", b"\x00\xff\x80", bytes(range(16))):
        frames = framing.serialize_message(msg)
        assert [f.payload for f in frames] == _oracle_pack(msg)
        decoded = [framing.decode_frame(f.bits()) for f in frames]
        assert all(ok for _, ok in decoded)
        data = framing.deserialize_payloads(p for p, _ in decoded)
        assert data[: len(msg)] == msg
        assert len(data) - len(msg) <= 1  # at most one trailing pad byte


def test_bit_string_round_trip():
    frame = framing.encode_frame(0xC0DE)
    text = framing.bits_to_string(frame.bits())
    assert set(text) <= {"0", "1"} and len(text) == 21
    assert framing.string_to_bits(text) == frame.bits()
    with pytest.raises(FramingError):
        framing.string_to_bits("10a1")
