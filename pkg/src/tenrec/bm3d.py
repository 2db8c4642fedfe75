"""Block-matching collaborative filtering for single bands.

Hard-thresholding stage: for every reference block on a step grid
(boundary rows/columns included so each pixel is covered), the most
similar blocks inside a search window are stacked, transformed by a 2-D
orthonormal DCT per block and a 1-D orthonormal Haar transform across
the stack, shrunk, inverted, and aggregated with weights inversely
proportional to the number of retained coefficients. An optional second
stage applies empirical Wiener shrinkage using the first-stage output
as pilot. Inputs are expected in [0, 1]; sigma is in the same units.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.fft import dctn, idctn

from .errors import ImageTooSmall


@dataclass
class Bm3dParams:
    """Standard hard-thresholding profile; group size must be a power of two."""

    block: int = 8
    search_radius: int = 19
    max_group: int = 16
    step: int = 3
    lam: float = 2.7
    wiener: bool = False

    def __post_init__(self):
        if self.block < 1 or self.search_radius < self.block // 2:
            raise ValueError("block must be >= 1 and fit the search window")
        if self.max_group < 1 or self.max_group & (self.max_group - 1):
            raise ValueError("max_group must be a power of two")
        if not 1 <= self.step <= self.block:
            raise ValueError("step must lie in [1, block] to cover every pixel")


@lru_cache(maxsize=None)
def _haar(n: int) -> np.ndarray:
    """Orthonormal Haar matrix of size n (power of two); row 0 is the average."""
    if n == 1:
        return np.ones((1, 1))
    h = _haar(n // 2)
    s = 1.0 / np.sqrt(2.0)
    top = np.kron(h, [s, s])
    bot = np.kron(np.eye(n // 2), [s, -s])
    return np.vstack([top, bot])


def _grid(limit: int, step: int) -> np.ndarray:
    pos = list(range(0, limit, step))
    if pos[-1] != limit - 1:
        pos.append(limit - 1)
    return np.asarray(pos)


def bm3d_band(img: np.ndarray, sigma: float, params: Bm3dParams | None = None) -> np.ndarray:
    """Denoise one 2-D band; see module docstring for the pipeline."""
    p = params or Bm3dParams()
    img = np.asarray(img, dtype=np.float64)
    if img.ndim != 2:
        raise ValueError(f"expected a 2-D band, got ndim={img.ndim}")
    if img.shape[0] < p.block or img.shape[1] < p.block:
        raise ImageTooSmall(f"band {img.shape} smaller than {p.block}x{p.block} block")
    out = _hard_stage(img, img, sigma, p)
    if p.wiener:
        out = _wiener_stage(img, out, sigma, p)
    return out


def _prepare(img, p):
    blocks = sliding_window_view(img, (p.block, p.block))
    norms = np.einsum("ijkl,ijkl->ij", blocks, blocks)
    dcts = dctn(blocks, axes=(2, 3), norm="ortho")
    return blocks, norms, dcts


def _match(blocks, norms, i, j, p):
    """Indices of the most similar blocks around (i, j), nearest first.

    The group is truncated to a power of two so the Haar transform
    applies; ties break on position for determinism.
    """
    nh, nw = blocks.shape[:2]
    i0, i1 = max(0, i - p.search_radius), min(nh, i + p.search_radius + 1)
    j0, j1 = max(0, j - p.search_radius), min(nw, j + p.search_radius + 1)
    ref = blocks[i, j]
    dots = np.tensordot(blocks[i0:i1, j0:j1], ref, axes=([2, 3], [0, 1]))
    d = (norms[i0:i1, j0:j1] - 2.0 * dots).ravel()
    rows = np.repeat(np.arange(i0, i1), j1 - j0)
    cols = np.tile(np.arange(j0, j1), i1 - i0)
    # the reference always joins its own group, or exact ties could push
    # it out and leave its pixels without any aggregated estimate
    d[(i - i0) * (j1 - j0) + (j - j0)] = -np.inf
    m = min(p.max_group, 1 << (len(d).bit_length() - 1))
    if m < len(d):
        part = np.argpartition(d, m - 1)[:m]
    else:
        part = np.arange(len(d))
    order = np.lexsort((rows[part] * nw + cols[part], d[part]))
    sel = part[order]
    return rows[sel], cols[sel]


def _hard_stage(img, match_img, sigma, p):
    blocks, norms, dcts = _prepare(match_img, p)
    num = np.zeros_like(img)
    den = np.zeros_like(img)
    b = p.block
    thr = p.lam * sigma
    for i in _grid(blocks.shape[0], p.step):
        for j in _grid(blocks.shape[1], p.step):
            gi, gj = _match(blocks, norms, i, j, p)
            haar = _haar(len(gi))
            coefs = haar @ dcts[gi, gj].reshape(len(gi), b * b)
            keep = np.abs(coefs) >= thr
            keep[0, 0] = True  # group DC survives
            coefs = coefs * keep
            weight = 1.0 / max(int(keep.sum()), 1)
            est = idctn((haar.T @ coefs).reshape(len(gi), b, b), axes=(1, 2), norm="ortho")
            for t in range(len(gi)):
                num[gi[t] : gi[t] + b, gj[t] : gj[t] + b] += weight * est[t]
                den[gi[t] : gi[t] + b, gj[t] : gj[t] + b] += weight
    return num / den


def _wiener_stage(noisy, pilot, sigma, p):
    """Empirical Wiener shrinkage with stage-1 output as pilot; matching on the pilot."""
    blocks, norms, _ = _prepare(pilot, p)
    pilot_dcts = dctn(blocks, axes=(2, 3), norm="ortho")
    noisy_dcts = dctn(sliding_window_view(noisy, (p.block, p.block)), axes=(2, 3), norm="ortho")
    num = np.zeros_like(noisy)
    den = np.zeros_like(noisy)
    b = p.block
    s2 = sigma * sigma
    for i in _grid(blocks.shape[0], p.step):
        for j in _grid(blocks.shape[1], p.step):
            gi, gj = _match(blocks, norms, i, j, p)
            haar = _haar(len(gi))
            pc = haar @ pilot_dcts[gi, gj].reshape(len(gi), b * b)
            nc = haar @ noisy_dcts[gi, gj].reshape(len(gi), b * b)
            shrink = pc * pc / (pc * pc + s2) if s2 > 0 else np.ones_like(pc)
            coefs = shrink * nc
            weight = 1.0 / max(float((shrink * shrink).sum()), 1e-12)
            est = idctn((haar.T @ coefs).reshape(len(gi), b, b), axes=(1, 2), norm="ortho")
            for t in range(len(gi)):
                num[gi[t] : gi[t] + b, gj[t] : gj[t] + b] += weight * est[t]
                den[gi[t] : gi[t] + b, gj[t] : gj[t] + b] += weight
    return num / den
