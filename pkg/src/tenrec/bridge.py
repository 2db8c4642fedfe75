"""Client for external denoisers speaking the TDN1 stdin/stdout protocol.

One frame = a 24-byte header (magic b"TDN1", then H, W, C as u32
little-endian, then sigma as f64 little-endian) followed by H*W*C f64
little-endian values in C order, index varying fastest along mode 3.
The server reads one request frame and writes one response frame of the
same layout with sigma echoed back.

Default lifecycle is one process per request. A persistent client keeps
the child alive and streams frames back and forth, for servers that
loop. Any protocol violation raises BridgeFailure; there is no silent
fallback to a built-in denoiser.
"""

import shlex
import struct
import subprocess

import numpy as np

from .errors import BridgeFailure

BRIDGE_MAGIC = b"TDN1"
_HEADER = struct.Struct("<4sIIId")
HEADER_SIZE = _HEADER.size  # 24


def encode_frame(tensor: np.ndarray, sigma: float) -> bytes:
    t = np.ascontiguousarray(tensor, dtype="<f8")
    if t.ndim != 3:
        raise ValueError(f"expected an (H, W, C) tensor, got ndim={t.ndim}")
    h, w, c = t.shape
    return _HEADER.pack(BRIDGE_MAGIC, h, w, c, float(sigma)) + t.tobytes(order="C")


def decode_frame(buf: bytes) -> tuple[np.ndarray, float]:
    if len(buf) < HEADER_SIZE:
        raise BridgeFailure(f"frame truncated at {len(buf)} bytes, header needs {HEADER_SIZE}")
    magic, h, w, c, sigma = _HEADER.unpack_from(buf)
    if magic != BRIDGE_MAGIC:
        raise BridgeFailure(f"bad magic {magic!r}, expected {BRIDGE_MAGIC!r}")
    need = HEADER_SIZE + h * w * c * 8
    if len(buf) != need:
        raise BridgeFailure(f"frame is {len(buf)} bytes, header promises {need}")
    values = np.frombuffer(buf, dtype="<f8", offset=HEADER_SIZE)
    return values.reshape(h, w, c).copy(), sigma


class BridgeClient:
    """Talks to a denoiser subprocess given as a shell-style command string."""

    def __init__(self, endpoint: str, timeout: float = 120.0, persistent: bool = False):
        if not endpoint:
            raise ValueError("endpoint command must be non-empty")
        self.argv = shlex.split(endpoint)
        self.timeout = timeout
        self.persistent = persistent
        self._proc = None

    def denoise(self, tensor: np.ndarray, sigma: float) -> np.ndarray:
        frame = encode_frame(tensor, sigma)
        if self.persistent:
            raw = self._exchange_persistent(frame)
        else:
            raw = self._exchange_oneshot(frame)
        out, echoed = decode_frame(raw)
        if out.shape != tensor.shape:
            raise BridgeFailure(f"response shape {out.shape} != request shape {tensor.shape}")
        if echoed != float(sigma):
            raise BridgeFailure(f"response sigma {echoed!r} does not echo request {sigma!r}")
        return out

    def _exchange_oneshot(self, frame: bytes) -> bytes:
        try:
            done = subprocess.run(
                self.argv, input=frame, capture_output=True, timeout=self.timeout
            )
        except FileNotFoundError as exc:
            raise BridgeFailure(f"bridge command not found: {self.argv[0]}") from exc
        except subprocess.TimeoutExpired as exc:
            raise BridgeFailure(f"bridge timed out after {self.timeout}s") from exc
        if done.returncode != 0:
            tail = done.stderr.decode(errors="replace")[-500:]
            raise BridgeFailure(f"bridge exited with {done.returncode}: {tail}")
        return done.stdout

    def _exchange_persistent(self, frame: bytes) -> bytes:
        if self._proc is None or self._proc.poll() is not None:
            try:
                self._proc = subprocess.Popen(
                    self.argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE
                )
            except FileNotFoundError as exc:
                raise BridgeFailure(f"bridge command not found: {self.argv[0]}") from exc
        proc = self._proc
        try:
            proc.stdin.write(frame)
            proc.stdin.flush()
            header = self._read_exact(proc.stdout, HEADER_SIZE)
            magic, h, w, c, _ = _HEADER.unpack(header)
            if magic != BRIDGE_MAGIC:
                raise BridgeFailure(f"bad magic {magic!r} on persistent stream")
            body = self._read_exact(proc.stdout, h * w * c * 8)
        except (BrokenPipeError, OSError) as exc:
            self.close()
            raise BridgeFailure(f"persistent bridge dropped the connection: {exc}") from exc
        return header + body

    @staticmethod
    def _read_exact(stream, n: int) -> bytes:
        chunks = []
        got = 0
        while got < n:
            chunk = stream.read(n - got)
            if not chunk:
                raise BridgeFailure(f"stream closed after {got} of {n} bytes")
            chunks.append(chunk)
            got += len(chunk)
        return b"".join(chunks)

    def close(self):
        if self._proc is not None:
            try:
                self._proc.stdin.close()
                self._proc.wait(timeout=5)
            except Exception:
                self._proc.kill()
            self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def bridge_denoise(tensor: np.ndarray, sigma: float, endpoint: str) -> np.ndarray:
    """One-shot convenience wrapper: spawn, exchange one frame, reap."""
    return BridgeClient(endpoint).denoise(tensor, sigma)
