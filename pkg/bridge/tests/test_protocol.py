import io
import struct

import numpy as np
import pytest

from tdnbridge.protocol import (
    HEADER_SIZE,
    MAGIC,
    MalformedRequest,
    pack_frame,
    parse_header,
    read_request,
    write_response,
)


def test_frame_round_trip(rng):
    t = rng.standard_normal((3, 5, 2))
    frame = pack_frame(t, 0.25)
    got, sigma = read_request(io.BytesIO(frame))
    assert sigma == 0.25
    assert np.array_equal(got, t)


def test_payload_is_channel_fastest():
    t = np.arange(8.0).reshape(2, 2, 2)
    frame = pack_frame(t, 0.0)
    vals = np.frombuffer(frame[HEADER_SIZE:], dtype="<f8")
    assert vals.tolist() == list(range(8))


def test_header_fields():
    frame = pack_frame(np.zeros((1, 2, 3)), 1.5)
    magic, h, w, c, sigma = struct.unpack("<4sIIId", frame[:HEADER_SIZE])
    assert (magic, h, w, c, sigma) == (MAGIC, 1, 2, 3, 1.5)


def test_parse_rejects_bad_magic():
    frame = bytearray(pack_frame(np.zeros((1, 1, 1)), 0.0))
    frame[:4] = b"NOPE"
    with pytest.raises(MalformedRequest, match="magic"):
        parse_header(bytes(frame[:HEADER_SIZE]))


def test_parse_rejects_zero_dim():
    buf = struct.pack("<4sIIId", MAGIC, 0, 4, 4, 0.1)
    with pytest.raises(MalformedRequest, match="shape"):
        parse_header(buf)


@pytest.mark.parametrize("sigma", [float("nan"), float("inf"), -0.1])
def test_parse_rejects_bad_sigma(sigma):
    buf = struct.pack("<4sIIId", MAGIC, 2, 2, 1, sigma)
    with pytest.raises(MalformedRequest, match="sigma"):
        parse_header(buf)


def test_read_rejects_short_payload():
    frame = pack_frame(np.zeros((2, 2, 2)), 0.0)
    with pytest.raises(MalformedRequest, match="payload"):
        read_request(io.BytesIO(frame[:-8]))


def test_read_rejects_short_header():
    with pytest.raises(MalformedRequest, match="header"):
        read_request(io.BytesIO(b"TDN1\x01"))


def test_read_returns_none_on_clean_eof():
    assert read_request(io.BytesIO(b"")) is None


def test_write_response_echoes_sigma(rng):
    t = rng.random((2, 3, 1))
    sink = io.BytesIO()
    write_response(sink, t, 0.7)
    got, sigma = read_request(io.BytesIO(sink.getvalue()))
    assert sigma == 0.7
    assert np.array_equal(got, t)
