import os
import sys

import numpy as np
import pytest

from tenrec.bridge import (
    BRIDGE_MAGIC,
    HEADER_SIZE,
    BridgeClient,
    bridge_denoise,
    decode_frame,
    encode_frame,
)
from tenrec.denoise import DenoiserSpec, denoise
from tenrec.errors import BridgeFailure

STUB = os.path.join(os.path.dirname(__file__), "stub_bridge.py")


def stub_cmd(mode):
    return f"{sys.executable} {STUB} {mode}"


def test_frame_round_trip(rng):
    t = rng.standard_normal((3, 4, 2))
    buf = encode_frame(t, 0.25)
    assert buf[:4] == BRIDGE_MAGIC
    assert len(buf) == HEADER_SIZE + t.size * 8
    back, sigma = decode_frame(buf)
    assert np.array_equal(back, t)
    assert sigma == 0.25


def test_frame_order_is_channel_fastest():
    t = np.arange(8.0).reshape(2, 2, 2)
    buf = encode_frame(t, 0.0)
    values = np.frombuffer(buf, dtype="<f8", offset=HEADER_SIZE)
    assert list(values) == list(range(8))  # C order: (h, w, c) with c fastest


def test_decode_rejects_bad_magic():
    frame = bytearray(encode_frame(np.zeros((1, 1, 1)), 0.0))
    frame[:4] = b"NOPE"
    with pytest.raises(BridgeFailure):
        decode_frame(bytes(frame))


def test_decode_rejects_truncation():
    frame = encode_frame(np.zeros((2, 2, 1)), 0.0)
    with pytest.raises(BridgeFailure):
        decode_frame(frame[:-3])
    with pytest.raises(BridgeFailure):
        decode_frame(frame[:10])


def test_oneshot_identity(rng):
    t = rng.standard_normal((4, 5, 3))
    out = bridge_denoise(t, 0.1, stub_cmd("identity"))
    assert np.array_equal(out, t)


def test_oneshot_transforms_payload(rng):
    t = rng.standard_normal((3, 3, 2))
    out = bridge_denoise(t, 0.1, stub_cmd("double"))
    assert np.allclose(out, 2.0 * t)


def test_denoise_dispatch_via_external_bridge(rng):
    t = rng.standard_normal((4, 4, 1))
    spec = DenoiserSpec(kind="external-bridge", sigma=0.1, endpoint=stub_cmd("double"))
    out = denoise(t, spec)
    assert np.allclose(out, 2.0 * t)


def test_nonzero_exit_raises_with_diagnostic(rng):
    with pytest.raises(BridgeFailure, match="refusing"):
        bridge_denoise(np.zeros((2, 2, 1)), 0.1, stub_cmd("fail"))


def test_bad_magic_response_raises():
    with pytest.raises(BridgeFailure, match="magic"):
        bridge_denoise(np.zeros((2, 2, 1)), 0.1, stub_cmd("badmagic"))


def test_short_response_raises():
    with pytest.raises(BridgeFailure):
        bridge_denoise(np.zeros((3, 3, 1)), 0.1, stub_cmd("short"))


def test_wrong_sigma_echo_raises():
    with pytest.raises(BridgeFailure, match="sigma"):
        bridge_denoise(np.zeros((2, 2, 1)), 0.1, stub_cmd("wrongsigma"))


def test_timeout_raises():
    client = BridgeClient(stub_cmd("sleep"), timeout=1.0)
    with pytest.raises(BridgeFailure, match="timed out"):
        client.denoise(np.zeros((1, 1, 1)), 0.1)


def test_missing_command_raises():
    with pytest.raises(BridgeFailure, match="not found"):
        bridge_denoise(np.zeros((1, 1, 1)), 0.1, "/no/such/bridge-binary")


def test_persistent_mode_reuses_process(rng):
    with BridgeClient(stub_cmd("persist"), persistent=True) as client:
        first = client.denoise(rng.standard_normal((2, 3, 2)), 0.1)
        proc = client._proc
        second = client.denoise(rng.standard_normal((4, 1, 1)), 0.2)
        assert client._proc is proc  # same child served both frames
        assert first.shape == (2, 3, 2) and second.shape == (4, 1, 1)


def test_empty_endpoint_rejected():
    with pytest.raises(ValueError):
        BridgeClient("")
