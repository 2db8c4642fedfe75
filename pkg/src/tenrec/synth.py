"""Deterministic synthetic inputs for tests and demos.

Real benchmark assets cannot ship with the package, so experiments run
on generated stand-ins: a high-frequency texture with calibrated
energy, an exactly low-tubal-rank tensor, and a piecewise-smooth scene.
All generators are seeded and pure.
"""

import numpy as np

from .core import tprod

# Fraction of peak**2 carried by the mean square of the texture. Chosen
# so a sparsely observed, zero-filled copy sits in the mid-6 dB range
# against the original, comparable to classic 8-bit test photos.
TEXTURE_MS_FRAC = 1.0 / (0.8 * 10.0 ** 0.636)


def _ms(t):
    return float(np.mean(t * t))


def textured_image(
    h: int = 128,
    w: int = 128,
    c: int = 3,
    peak: float = 255.0,
    seed: int = 7,
    ms_frac: float = TEXTURE_MS_FRAC,
) -> np.ndarray:
    """Busy texture in [0, peak] whose mean square is ms_frac * peak**2.

    A sinusoid grid plus seeded noise is scaled by bisection (clipping
    to the valid range as it grows) until the energy target is met to
    near machine precision.
    """
    rng = np.random.default_rng(seed)
    i = np.arange(h)[:, None, None]
    j = np.arange(w)[None, :, None]
    k = np.arange(c)[None, None, :]
    base = (
        0.5
        + 0.22 * np.sin(2 * np.pi * (7 * i / h + 0.6 * k)) * np.cos(2 * np.pi * 11 * j / w)
        + 0.18 * np.sin(2 * np.pi * (3 * i / h + 5 * j / w))
        + 0.12 * rng.standard_normal((h, w, c))
    )
    base = np.clip(base, 0.0, None)
    target = ms_frac * peak * peak
    lo, hi = 0.0, 10.0 * peak / max(base.max(), 1e-12)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _ms(np.clip(mid * base, 0.0, peak)) < target:
            lo = mid
        else:
            hi = mid
    return np.clip(0.5 * (lo + hi) * base, 0.0, peak)


def lowrank_tensor(
    h: int = 32, w: int = 32, c: int = 8, rank: int = 2, seed: int = 11
) -> np.ndarray:
    """Exactly low-tubal-rank tensor, rescaled to unit peak magnitude."""
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((h, rank, c))
    b = rng.standard_normal((rank, w, c))
    t = tprod(a, b)
    return t / np.abs(t).max()


def smooth_image(
    h: int = 64, w: int = 64, c: int = 3, peak: float = 1.0, seed: int = 5
) -> np.ndarray:
    """Piecewise-smooth scene: ramp plus a few soft blobs, bands correlated."""
    rng = np.random.default_rng(seed)
    yy = np.linspace(0.0, 1.0, h)[:, None]
    xx = np.linspace(0.0, 1.0, w)[None, :]
    band0 = 0.25 + 0.35 * yy + 0.15 * xx
    for _ in range(4):
        cy, cx = rng.uniform(0.15, 0.85, size=2)
        amp = rng.uniform(-0.3, 0.35)
        width = rng.uniform(0.05, 0.18)
        band0 = band0 + amp * np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * width**2))
    out = np.empty((h, w, c))
    for band in range(c):
        out[:, :, band] = np.clip(band0 * (1.0 - 0.08 * band) + 0.05 * band, 0.0, 1.0)
    return out * peak


def striped_image(
    h: int = 64, w: int = 64, c: int = 3, peak: float = 1.0, seed: int = 5
) -> np.ndarray:
    """Smooth scene overlaid with a periodic grid, clipped to [0, peak].

    The repetition gives block-matching denoisers real structure to
    exploit, while heavy smoothing visibly destroys it; completion
    experiments use it to separate the priors.
    """
    base = smooth_image(h, w, c, peak=1.0, seed=seed)
    i = np.arange(h)[:, None, None]
    j = np.arange(w)[None, :, None]
    stripes = 0.12 * np.sin(2 * np.pi * (i / 8.0)) * np.cos(2 * np.pi * (j / 8.0))
    return np.clip(base + stripes, 0.0, 1.0) * peak
