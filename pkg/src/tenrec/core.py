"""Dense 3-way tensor arithmetic: mode-3 spectral transform and the tube-wise tensor product.

Tensors are numpy float64 arrays of shape (H, W, C) in C order, so the
(h, w, c) index order is contiguous in c and every tube t[h, w, :] is
stride-1. The tensor-tensor product is realized facewise in the mode-3
DFT domain; the forward transform is unnormalized and the 1/C
normalization lives entirely in the inverse.
"""

import numpy as np

from .errors import ResidualImaginary, ShapeMismatch, ZeroReference

# Imaginary residue above this relative magnitude signals a corrupted
# spectral operand rather than round-off.
IMAG_TOL = 1e-9


def as_tensor3(data) -> np.ndarray:
    """Coerce input to a float64 (H, W, C) array, validating finiteness.

    2-D input is treated as a single-band (H, W, 1) tensor.
    """
    t = np.ascontiguousarray(data, dtype=np.float64)
    if t.ndim == 2:
        t = t[:, :, None]
    if t.ndim != 3:
        raise ShapeMismatch(f"expected a 3-way tensor, got ndim={t.ndim}")
    if not np.all(np.isfinite(t)):
        raise ValueError("tensor contains non-finite entries")
    return t


def dft_mode3(t: np.ndarray) -> np.ndarray:
    """Unnormalized forward DFT of every mode-3 tube. Returns complex array."""
    return np.fft.fft(t, axis=2)


def idft_mode3(s: np.ndarray, imag_tol: float = IMAG_TOL) -> np.ndarray:
    """Inverse mode-3 DFT (carries the 1/C normalization), returning a real tensor.

    Raises ResidualImaginary when the imaginary content of the inverse
    exceeds `imag_tol` relative to the result's magnitude; smaller
    residue is discarded.
    """
    y = np.fft.ifft(s, axis=2)
    scale = np.linalg.norm(y.ravel())
    residue = np.linalg.norm(y.imag.ravel())
    if residue > imag_tol * max(scale, np.finfo(np.float64).tiny):
        raise ResidualImaginary(
            f"imaginary residue {residue:.3e} exceeds {imag_tol:.1e} of magnitude {scale:.3e}"
        )
    return np.ascontiguousarray(y.real)


def tprod(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor-tensor product of a (H, r, C) with b (r, W, C) -> (H, W, C).

    Computed as facewise matrix products in the mode-3 DFT domain,
    equivalent to mode-3 circular convolution of tube outer products
    (see tprod_direct for the reference realization).
    """
    _check_tprod_shapes(a, b)
    ah = np.fft.fft(a, axis=2)
    bh = np.fft.fft(b, axis=2)
    # (C, H, r) @ (C, r, W) -> (C, H, W), one matmul per frequency
    zh = np.matmul(np.moveaxis(ah, 2, 0), np.moveaxis(bh, 2, 0))
    z = np.fft.ifft(np.moveaxis(zh, 0, 2), axis=2)
    return np.ascontiguousarray(z.real)


def tprod_direct(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Reference tensor product via explicit circular convolution along mode 3.

    Entry (h, w, :) is the sum over k of circconv(a[h, k, :], b[k, w, :]).
    O(H*W*r*C^2) cost; used as the independent oracle for tprod.
    """
    _check_tprod_shapes(a, b)
    h_dim, r_dim, c_dim = a.shape
    w_dim = b.shape[1]
    out = np.zeros((h_dim, w_dim, c_dim))
    for h in range(h_dim):
        for w in range(w_dim):
            for k in range(r_dim):
                for n in range(c_dim):
                    acc = 0.0
                    for m in range(c_dim):
                        acc += a[h, k, m] * b[k, w, (n - m) % c_dim]
                    out[h, w, n] += acc
    return out


def _check_tprod_shapes(a, b):
    if a.ndim != 3 or b.ndim != 3:
        raise ShapeMismatch("tensor product needs two 3-way tensors")
    if a.shape[2] != b.shape[2]:
        raise ShapeMismatch(f"channel mismatch: {a.shape[2]} vs {b.shape[2]}")
    if a.shape[1] != b.shape[0]:
        raise ShapeMismatch(f"inner dimension mismatch: {a.shape[1]} vs {b.shape[0]}")


def identity_tube(r: int, c: int) -> np.ndarray:
    """The (r, r, C) identity of the tensor product: frontal slice 0 is I, rest zero."""
    e = np.zeros((r, r, c))
    e[:, :, 0] = np.eye(r)
    return e


def t_transpose(t: np.ndarray) -> np.ndarray:
    """Tensor transpose: transpose each frontal slice, reverse slices 1..C-1.

    In the spectral domain this conjugate-transposes every face, making it
    the adjoint of the tensor product under the real inner product.
    """
    out = np.transpose(t, (1, 0, 2)).copy()
    out[:, :, 1:] = out[:, :, :0:-1]
    return np.ascontiguousarray(out)


def apply_mask(t: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Keep entries where mask is set, zero elsewhere. Idempotent and linear."""
    if t.shape != mask.shape:
        raise ShapeMismatch(f"tensor {t.shape} vs mask {mask.shape}")
    return np.where(mask, t, 0.0)


def fro_norm(t: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(t).ravel()))


def rel_change(current: np.ndarray, previous: np.ndarray) -> float:
    """Frobenius-norm relative change ||current - previous|| / ||previous||."""
    if current.shape != previous.shape:
        raise ShapeMismatch(f"{current.shape} vs {previous.shape}")
    ref = fro_norm(previous)
    if ref == 0.0:
        raise ZeroReference("relative change against an all-zero tensor")
    return fro_norm(current - previous) / ref
