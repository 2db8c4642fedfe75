import struct
import subprocess
import sys

import numpy as np
import pytest


def run_bridge(args, payload: bytes, timeout=60.0):
    return subprocess.run(
        [sys.executable, "-m", "tdnbridge.server", *args],
        input=payload, capture_output=True, timeout=timeout,
    )


# Raw tensor container used by the solver-side CLI, reimplemented from its
# documented layout so these tests stay off that package's internals:
# magic TNS1, H, W, C, flags as u32 LE, then H*W*C float64 LE in C order.
_RAW = struct.Struct("<4sIIII")


def save_raw(tensor: np.ndarray, path) -> None:
    t = np.ascontiguousarray(tensor, dtype=np.float64)
    h, w, c = t.shape
    with open(path, "wb") as fh:
        fh.write(_RAW.pack(b"TNS1", h, w, c, 0))
        fh.write(t.tobytes(order="C"))


def load_raw(path) -> np.ndarray:
    blob = open(path, "rb").read()
    magic, h, w, c, _flags = _RAW.unpack(blob[: _RAW.size])
    assert magic == b"TNS1"
    return np.frombuffer(blob[_RAW.size :], dtype="<f8").reshape(h, w, c)


@pytest.fixture
def rng():
    return np.random.default_rng(777)
