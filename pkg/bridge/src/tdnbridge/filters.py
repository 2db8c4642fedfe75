"""Denoisers served by the bridge.

The Gaussian smoother follows the definition shared with the solver side,
restated here so both implementations can be checked against each other:
per band, separable sampled Gaussian with pixel std sigma * min(H, W),
kernel radius ceil(3 * std), kernel normalized to unit sum, symmetric
(half-sample reflect) boundary handling.

The CNN path runs a small residual convolutional denoiser from an .npz
weights file. Convention (published CNN denoisers disagree on input
normalization and band grouping, so the bridge fixes its own): arrays
w0, b0, .., w{n-1},
b{n-1}; wi has shape (kh, kw, cin, cout) with odd kh, kw; the first cin and
last cout are 1 and the model is applied independently per band. Input is
divided by the optional scalar ``scale`` (default 1.0), layers are
correlations with symmetric padding and ReLU between (none after the last),
and the network output is a residual: band - scale * prediction. Sigma is
accepted but not fed to the model.
"""

import dataclasses
import pathlib
from typing import List, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


class ModelError(Exception):
    """Weights file missing or inconsistent with the documented schema."""


def gaussian_kernel(sigma_px: float) -> np.ndarray:
    radius = int(np.ceil(3.0 * sigma_px))
    if radius == 0:
        return np.ones(1)
    k = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-0.5 * (k / sigma_px) ** 2)
    return w / w.sum()


def _correlate_axis(t: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    r = (len(kernel) - 1) // 2
    if r == 0:
        return t * kernel[0]
    pad = [(0, 0)] * t.ndim
    pad[axis] = (r, r)
    padded = np.pad(t, pad, mode="symmetric")
    windows = sliding_window_view(padded, len(kernel), axis=axis)
    return np.tensordot(windows, kernel, axes=([-1], [0]))


def gaussian_smooth(t: np.ndarray, sigma: float) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if sigma == 0:
        return t.copy()
    kernel = gaussian_kernel(sigma * min(t.shape[0], t.shape[1]))
    return _correlate_axis(_correlate_axis(t, kernel, 0), kernel, 1)


@dataclasses.dataclass
class ResidualCnn:
    layers: List[Tuple[np.ndarray, np.ndarray]]
    scale: float = 1.0


def load_model(path) -> ResidualCnn:
    path = pathlib.Path(path)
    if not path.is_file():
        raise ModelError(f"weights file not found: {path}")
    try:
        data = np.load(path)
    except Exception as exc:
        raise ModelError(f"unreadable weights file {path}: {exc}") from exc
    layers = []
    i = 0
    while f"w{i}" in data:
        if f"b{i}" not in data:
            raise ModelError(f"w{i} present but b{i} missing")
        w = np.asarray(data[f"w{i}"], dtype=np.float64)
        b = np.asarray(data[f"b{i}"], dtype=np.float64)
        if w.ndim != 4 or w.shape[0] % 2 == 0 or w.shape[1] % 2 == 0:
            raise ModelError(f"w{i} must be (odd_kh, odd_kw, cin, cout), got {w.shape}")
        if b.shape != (w.shape[3],):
            raise ModelError(f"b{i} shape {b.shape} does not match cout {w.shape[3]}")
        layers.append((w, b))
        i += 1
    if not layers:
        raise ModelError(f"no conv layers (w0 missing) in {path}")
    if layers[0][0].shape[2] != 1 or layers[-1][0].shape[3] != 1:
        raise ModelError("model must map one band to one band")
    for (wa, _), (wb, _) in zip(layers, layers[1:]):
        if wa.shape[3] != wb.shape[2]:
            raise ModelError(f"channel mismatch {wa.shape[3]} -> {wb.shape[2]}")
    scale = float(data["scale"]) if "scale" in data else 1.0
    if not np.isfinite(scale) or scale <= 0:
        raise ModelError(f"bad scale {scale}")
    return ResidualCnn(layers=layers, scale=scale)


def _conv_layer(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    kh, kw = w.shape[:2]
    padded = np.pad(x, ((kh // 2, kh // 2), (kw // 2, kw // 2), (0, 0)), mode="symmetric")
    win = sliding_window_view(padded, (kh, kw), axis=(0, 1))
    return np.einsum("hwcij,ijco->hwo", win, w) + b


def cnn_denoise(t: np.ndarray, sigma: float, model: ResidualCnn) -> np.ndarray:
    del sigma  # blind model, see module docstring
    t = np.asarray(t, dtype=np.float64)
    out = np.empty_like(t)
    for band in range(t.shape[2]):
        x = t[:, :, band : band + 1] / model.scale
        for w, b in model.layers[:-1]:
            x = np.maximum(_conv_layer(x, w, b), 0.0)
        w, b = model.layers[-1]
        residual = _conv_layer(x, w, b)
        out[:, :, band] = t[:, :, band] - model.scale * residual[:, :, 0]
    return out
