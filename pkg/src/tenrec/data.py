"""Dataset ingestion, seeded mask generation, and the raw tensor file format."""

import csv
import hashlib
import os
import struct
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import (
    BadMagic,
    BadRate,
    InconsistentStack,
    ShapeMismatch,
    TruncatedFile,
    UnsupportedBitDepth,
)

RAW_MAGIC = b"TNS1"

# Table of dataset kinds and their declared peak values.
KIND_PEAK = {"color-image": 255.0, "hyperspectral": 65535.0, "video": 256.0}

_EIGHT_BIT_MODES = {"L", "RGB"}
_SIXTEEN_BIT_MODES = {"I;16", "I;16B", "I;16L", "I"}


@dataclass
class Mask:
    """Binary sampling set with its rate and seed.

    Exactly round(sr * H * W * C) entries are set, chosen uniformly
    without replacement by a partial Fisher-Yates shuffle driven by raw
    Philox4x64-10 output (key = (seed, 0), draw i maps to
    j = i + raw[i] mod (N - i)), so masks reproduce across platforms.
    """

    mask: np.ndarray
    sr: float
    seed: int

    @property
    def count(self) -> int:
        return int(self.mask.sum())

    def checksum(self) -> str:
        return hashlib.sha256(np.packbits(self.mask.ravel()).tobytes()).hexdigest()[:16]


def gen_mask(h: int, w: int, c: int, sr: float, seed: int) -> Mask:
    if not 0.0 < sr <= 1.0:
        raise BadRate(f"sampling rate {sr} outside (0, 1]")
    n = h * w * c
    keep = int(np.floor(sr * n + 0.5))  # round half up
    flat = np.zeros(n, dtype=bool)
    if keep == n:
        flat[:] = True
    else:
        flat[_fisher_yates_select(n, keep, seed)] = True
    return Mask(mask=flat.reshape(h, w, c), sr=sr, seed=seed)


def _fisher_yates_select(n: int, k: int, seed: int) -> np.ndarray:
    """First k entries of a Fisher-Yates shuffle of range(n), Philox-driven."""
    bitgen = np.random.Philox(key=np.array([seed, 0], dtype=np.uint64))
    raw = bitgen.random_raw(k).astype(np.uint64)
    perm = np.arange(n, dtype=np.int64)
    for i in range(k):
        j = i + int(raw[i] % np.uint64(n - i))
        perm[i], perm[j] = perm[j], perm[i]
    return perm[:k]


@dataclass
class DatasetSample:
    name: str
    tensor: np.ndarray
    peak: float
    kind: str


def load_image_stack(paths, kind: str, name: str | None = None) -> DatasetSample:
    """Stack band/frame images along mode 3 in path order.

    A single RGB file yields its three channels; otherwise every file must
    be single-band with matching dimensions. Values stay in their native
    integer range as float64.
    """
    if kind not in KIND_PEAK:
        raise ValueError(f"unknown dataset kind {kind!r}")
    paths = [paths] if isinstance(paths, (str, os.PathLike)) else list(paths)
    if not paths:
        raise ValueError("empty path list")
    bands = []
    shape = None
    for p in paths:
        img = Image.open(p)
        _check_bit_depth(img.mode, kind, p)
        arr = np.asarray(img).astype(np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, None]
        if shape is None:
            shape = arr.shape[:2]
        elif arr.shape[:2] != shape:
            raise InconsistentStack(f"{p}: {arr.shape[:2]} differs from {shape}")
        if len(paths) > 1 and arr.shape[2] != 1:
            raise InconsistentStack(f"{p}: multi-band image inside a multi-file stack")
        bands.append(arr)
    tensor = np.ascontiguousarray(np.concatenate(bands, axis=2))
    if name is None:
        name = os.path.splitext(os.path.basename(str(paths[0])))[0]
    return DatasetSample(name=name, tensor=tensor, peak=KIND_PEAK[kind], kind=kind)


def _check_bit_depth(mode: str, kind: str, path):
    want16 = kind == "hyperspectral"
    if want16 and mode not in _SIXTEEN_BIT_MODES:
        raise UnsupportedBitDepth(f"{path}: mode {mode} is not 16-bit grayscale")
    if not want16 and mode not in _EIGHT_BIT_MODES:
        raise UnsupportedBitDepth(f"{path}: mode {mode} is not 8-bit")


def save_raw(tensor: np.ndarray, path, flags: int = 0) -> None:
    """Write header (magic, H, W, C, flags as u32 LE) + float64 LE payload."""
    t = np.ascontiguousarray(tensor, dtype=np.float64)
    if t.ndim != 3:
        raise ShapeMismatch(f"raw format stores 3-way tensors, got ndim={t.ndim}")
    h, w, c = t.shape
    with open(path, "wb") as fh:
        fh.write(RAW_MAGIC)
        fh.write(struct.pack("<IIII", h, w, c, flags))
        fh.write(t.astype("<f8").tobytes(order="C"))


def load_raw(path) -> tuple[np.ndarray, int]:
    """Read a raw tensor file; returns (tensor, flags). Bit-exact round trip."""
    with open(path, "rb") as fh:
        header = fh.read(20)
        if len(header) < 4 or header[:4] != RAW_MAGIC:
            raise BadMagic(f"{path}: bad magic {header[:4]!r}")
        if len(header) < 20:
            raise TruncatedFile(f"{path}: header truncated at {len(header)} bytes")
        h, w, c, flags = struct.unpack("<IIII", header[4:])
        payload = fh.read()
    expect = h * w * c * 8
    if len(payload) != expect:
        raise TruncatedFile(f"{path}: payload {len(payload)} bytes, expected {expect}")
    tensor = np.frombuffer(payload, dtype="<f8").reshape(h, w, c).copy()
    return tensor, flags


SUMMARY_FIELDS = ["name", "sr", "seed", "psnr", "ssim", "iterations", "seconds"]


def append_csv_row(path, fieldnames, row: dict) -> None:
    """Append one row, writing the header when the file is new."""
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, "a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        if new:
            writer.writeheader()
        writer.writerow(row)


def read_csv_rows(path) -> list[dict]:
    if not os.path.exists(path):
        return []
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
