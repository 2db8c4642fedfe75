"""Plug-and-play denoiser steps used inside the splitting loop.

Every denoiser maps an (H, W, C) tensor in roughly [0, 1] to the same
shape. sigma is a strength in normalized intensity units; sigma = 0 is
the identity for every built-in kind. Band-wise operators are applied
independently along mode 3.

Gaussian smoother kernel, shared with the external bridge: per band, a
separable convolution with a normalized sampled Gaussian of standard
deviation sigma * min(H, W) pixels, truncated at radius
ceil(3 * sigma * min(H, W)), with reflect ("symmetric") boundary
handling so constants are preserved.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import convolve1d

from .bm3d import Bm3dParams, bm3d_band
from .bridge import bridge_denoise

KINDS = ("identity", "gaussian-smoother", "tv-smoother", "bm3d", "external-bridge")


@dataclass
class DenoiserSpec:
    """Which denoiser to run and how strongly.

    endpoint is the bridge command line (external-bridge only); bm3d
    carries the block-matching profile when kind is "bm3d".
    """

    kind: str = "identity"
    sigma: float = 0.1
    endpoint: str | None = None
    bm3d: Bm3dParams = field(default_factory=Bm3dParams)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown denoiser kind {self.kind!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if self.kind == "external-bridge" and not self.endpoint:
            raise ValueError("external-bridge needs an endpoint command")


def gaussian_kernel(sigma_px: float) -> np.ndarray:
    """Normalized sampled Gaussian, radius ceil(3 * sigma_px)."""
    radius = int(np.ceil(3.0 * sigma_px))
    if radius == 0:
        return np.ones(1)
    k = np.arange(-radius, radius + 1, dtype=np.float64)
    w = np.exp(-0.5 * (k / sigma_px) ** 2)
    return w / w.sum()


def gaussian_smooth(t: np.ndarray, sigma: float) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    if sigma == 0:
        return t.copy()
    kernel = gaussian_kernel(sigma * min(t.shape[0], t.shape[1]))
    out = convolve1d(t, kernel, axis=0, mode="reflect")
    return convolve1d(out, kernel, axis=1, mode="reflect")


def tv_smooth(t: np.ndarray, sigma: float, iters: int = 40, tau: float = 0.25) -> np.ndarray:
    """Total-variation proximal smoothing via dual projection, weight sigma**2."""
    t = np.asarray(t, dtype=np.float64)
    if sigma == 0:
        return t.copy()
    lam = sigma * sigma
    out = np.empty_like(t)
    for c in range(t.shape[2]):
        out[:, :, c] = _chambolle(t[:, :, c], lam, iters, tau)
    return out


def _chambolle(band, lam, iters, tau):
    ph = np.zeros_like(band)
    pw = np.zeros_like(band)
    for _ in range(iters):
        div = np.zeros_like(band)
        div[:-1, :] += ph[:-1, :]
        div[1:, :] -= ph[:-1, :]
        div[:, :-1] += pw[:, :-1]
        div[:, 1:] -= pw[:, :-1]
        u = band - lam * div
        gh = np.zeros_like(band)
        gw = np.zeros_like(band)
        gh[:-1, :] = u[1:, :] - u[:-1, :]
        gw[:, :-1] = u[:, 1:] - u[:, :-1]
        denom = 1.0 + (tau / lam) * np.sqrt(gh * gh + gw * gw)
        ph = (ph - (tau / lam) * gh) / denom
        pw = (pw - (tau / lam) * gw) / denom
    div = np.zeros_like(band)
    div[:-1, :] += ph[:-1, :]
    div[1:, :] -= ph[:-1, :]
    div[:, :-1] += pw[:, :-1]
    div[:, 1:] -= pw[:, :-1]
    return band - lam * div


def denoise(t: np.ndarray, spec: DenoiserSpec) -> np.ndarray:
    """Run the denoiser named by spec on an (H, W, C) tensor."""
    t = np.asarray(t, dtype=np.float64)
    if t.ndim != 3:
        raise ValueError(f"expected an (H, W, C) tensor, got ndim={t.ndim}")
    if spec.kind == "identity" or (spec.sigma == 0 and spec.kind != "external-bridge"):
        return t.copy()
    if spec.kind == "gaussian-smoother":
        return gaussian_smooth(t, spec.sigma)
    if spec.kind == "tv-smoother":
        return tv_smooth(t, spec.sigma)
    if spec.kind == "bm3d":
        out = np.empty_like(t)
        for c in range(t.shape[2]):
            out[:, :, c] = bm3d_band(t[:, :, c], spec.sigma, spec.bm3d)
        return out
    return bridge_denoise(t, spec.sigma, spec.endpoint)
