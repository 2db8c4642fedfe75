"""Reconstruction quality metrics: PSNR and uniform-window SSIM."""

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter

from .errors import ImageTooSmall, ShapeMismatch


@dataclass
class MetricContext:
    """Peak value and SSIM constants for a dataset (peak 255 / 65535 / 256)."""

    peak: float = 255.0
    k1: float = 0.01
    k2: float = 0.03
    window: int = 8

    def __post_init__(self):
        if self.peak <= 0:
            raise ValueError("peak must be positive")


def psnr(x: np.ndarray, ref: np.ndarray, ctx: MetricContext) -> float:
    """10*log10(peak^2 / MSE) over all entries; +inf when x equals ref."""
    if x.shape != ref.shape:
        raise ShapeMismatch(f"{x.shape} vs {ref.shape}")
    mse = float(np.mean((x - ref) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(ctx.peak**2 / mse)


def ssim(x: np.ndarray, ref: np.ndarray, ctx: MetricContext) -> float:
    """Mean structural similarity over sliding uniform windows and bands.

    Uses the luminance/contrast/structure product with C1 = (k1*peak)^2,
    C2 = (k2*peak)^2, population (ddof=0) moments inside each window, and
    an 8x8 uniform window by default. Symmetric in its arguments;
    ssim(x, x) == 1.
    """
    if x.shape != ref.shape:
        raise ShapeMismatch(f"{x.shape} vs {ref.shape}")
    if x.ndim == 2:
        x = x[:, :, None]
        ref = ref[:, :, None]
    h, w, _ = x.shape
    win = ctx.window
    if h < win or w < win:
        raise ImageTooSmall(f"image {h}x{w} smaller than {win}x{win} window")
    c1 = (ctx.k1 * ctx.peak) ** 2
    c2 = (ctx.k2 * ctx.peak) ** 2
    vals = []
    for band in range(x.shape[2]):
        vals.append(_ssim_band(x[:, :, band], ref[:, :, band], win, c1, c2))
    return float(np.mean(vals))


def _ssim_band(a, b, win, c1, c2):
    # uniform_filter's footprint spans [i - win//2, i + (win-1)//2]; crop to
    # the fully valid region so every retained value is a true win*win average.
    lo = win // 2
    hi_h = lo + a.shape[0] - win + 1
    hi_w = lo + a.shape[1] - win + 1
    box = lambda img: uniform_filter(img, size=win, mode="constant")[lo:hi_h, lo:hi_w]
    mu_a = box(a)
    mu_b = box(b)
    var_a = box(a * a) - mu_a * mu_a
    var_b = box(b * b) - mu_b * mu_b
    cov = box(a * b) - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))
