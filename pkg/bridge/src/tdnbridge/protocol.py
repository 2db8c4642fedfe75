"""Frame layout for the denoiser exchange.

A request and a response share one layout: a 24-byte header packed as
little-endian ``<4sIIId`` (magic ``TDN1``, H, W, C as u32, sigma as f64)
followed by H*W*C float64 payload values in C order, channel fastest. The
response echoes the request header, sigma included.

This module is self-contained on purpose: the protocol is the only
interface shared with the solver side, so the framing is implemented
independently here rather than imported from it.
"""

import struct
from typing import BinaryIO, Optional, Tuple

import numpy as np

MAGIC = b"TDN1"
HEADER = struct.Struct("<4sIIId")
HEADER_SIZE = HEADER.size


class MalformedRequest(Exception):
    """Header or payload violates the frame layout."""


def pack_frame(tensor: np.ndarray, sigma: float) -> bytes:
    t = np.ascontiguousarray(tensor, dtype=np.float64)
    if t.ndim != 3:
        raise MalformedRequest(f"tensor must be 3-D, got {t.ndim}-D")
    h, w, c = t.shape
    return HEADER.pack(MAGIC, h, w, c, float(sigma)) + t.tobytes(order="C")


def parse_header(buf: bytes) -> Tuple[int, int, int, float]:
    if len(buf) != HEADER_SIZE:
        raise MalformedRequest(f"short header: {len(buf)} of {HEADER_SIZE} bytes")
    magic, h, w, c, sigma = HEADER.unpack(buf)
    if magic != MAGIC:
        raise MalformedRequest(f"bad magic {magic!r}")
    if min(h, w, c) < 1:
        raise MalformedRequest(f"degenerate shape {(h, w, c)}")
    if not np.isfinite(sigma) or sigma < 0:
        raise MalformedRequest(f"bad sigma {sigma!r}")
    return h, w, c, sigma


def read_request(stream: BinaryIO) -> Optional[Tuple[np.ndarray, float]]:
    """Read one frame. Returns None on clean EOF before any header byte."""
    head = stream.read(HEADER_SIZE)
    if len(head) == 0:
        return None
    h, w, c, sigma = parse_header(head)
    need = h * w * c * 8
    raw = stream.read(need)
    if len(raw) != need:
        raise MalformedRequest(f"short payload: {len(raw)} of {need} bytes")
    tensor = np.frombuffer(raw, dtype="<f8").reshape(h, w, c)
    return tensor, sigma


def write_response(stream: BinaryIO, tensor: np.ndarray, sigma: float) -> None:
    # Built fully before writing: a failed handler must leave no partial frame.
    stream.write(pack_frame(tensor, sigma))
    stream.flush()
