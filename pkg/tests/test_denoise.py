import numpy as np
import pytest

from tenrec.denoise import (
    DenoiserSpec,
    denoise,
    gaussian_kernel,
    gaussian_smooth,
    tv_smooth,
)


def test_spec_validation():
    with pytest.raises(ValueError):
        DenoiserSpec(kind="sharpen")
    with pytest.raises(ValueError):
        DenoiserSpec(kind="gaussian-smoother", sigma=-0.1)
    with pytest.raises(ValueError):
        DenoiserSpec(kind="external-bridge")  # endpoint required
    DenoiserSpec(kind="external-bridge", endpoint="cat")


@pytest.mark.parametrize("kind", ["identity", "gaussian-smoother", "tv-smoother", "bm3d"])
def test_sigma_zero_is_identity(kind, rng):
    t = rng.random((16, 16, 2))
    out = denoise(t, DenoiserSpec(kind=kind, sigma=0.0))
    assert np.array_equal(out, t)
    assert out is not t  # fresh array, input left alone


def test_identity_kind_any_sigma(rng):
    t = rng.random((8, 8, 1))
    assert np.array_equal(denoise(t, DenoiserSpec(kind="identity", sigma=0.5)), t)


def test_gaussian_kernel_shape_and_normalization():
    k = gaussian_kernel(2.0)
    assert len(k) == 2 * 6 + 1  # radius ceil(3 * 2.0) = 6
    assert k.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.array_equal(k, k[::-1])
    assert k.argmax() == 6


def test_gaussian_kernel_radius_rule():
    # radius = ceil(3 * sigma_px)
    assert len(gaussian_kernel(0.5)) == 2 * 2 + 1
    assert len(gaussian_kernel(1.0)) == 2 * 3 + 1
    assert len(gaussian_kernel(1.1)) == 2 * 4 + 1


def test_gaussian_preserves_constants():
    t = np.full((20, 24, 3), 0.37)
    out = gaussian_smooth(t, 0.1)
    assert np.max(np.abs(out - 0.37)) < 1e-12


def test_gaussian_std_scales_with_min_side(rng):
    # sigma is relative to min(H, W): same sigma, larger image, wider blur
    t = np.zeros((32, 32, 1))
    t[16, 16, 0] = 1.0
    out = gaussian_smooth(t, 0.05)
    # impulse response peak equals kernel center squared (separable)
    k = gaussian_kernel(0.05 * 32)
    assert out[16, 16, 0] == pytest.approx(k[len(k) // 2] ** 2, rel=1e-12)


def test_gaussian_reduces_noise_around_smooth_signal(rng):
    yy = np.linspace(0, 1, 32)[:, None, None]
    smooth = np.tile(0.3 + 0.4 * yy, (1, 32, 1))
    noisy = smooth + 0.08 * rng.standard_normal(smooth.shape)
    out = gaussian_smooth(noisy, 0.05)
    assert np.abs(out - smooth).mean() < 0.5 * np.abs(noisy - smooth).mean()


def test_tv_preserves_constants():
    t = np.full((12, 12, 2), 0.8)
    out = tv_smooth(t, 0.2)
    assert np.max(np.abs(out - 0.8)) < 1e-12


def test_tv_reduces_noise(rng):
    yy = np.linspace(0, 1, 24)[:, None, None]
    smooth = np.tile(0.2 + 0.5 * yy, (1, 24, 1))
    noisy = smooth + 0.08 * rng.standard_normal(smooth.shape)
    out = tv_smooth(noisy, 0.3)
    assert np.abs(out - smooth).mean() < np.abs(noisy - smooth).mean()


def test_denoise_rejects_non_tensor(rng):
    with pytest.raises(ValueError):
        denoise(rng.random((4, 4)), DenoiserSpec(kind="identity"))


def test_bm3d_kind_runs_bandwise(rng):
    t = rng.random((16, 16, 2))
    out = denoise(t, DenoiserSpec(kind="bm3d", sigma=0.05))
    assert out.shape == t.shape
    assert np.all(np.isfinite(out))
