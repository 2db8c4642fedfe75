import numpy as np
import pytest

from tenrec.errors import ImageTooSmall, ShapeMismatch
from tenrec.metrics import MetricContext, psnr, ssim


def ssim_direct(x, ref, peak, win=8):
    """Independent direct-loop reference: population moments per window."""
    c1 = (0.01 * peak) ** 2
    c2 = (0.03 * peak) ** 2
    vals = []
    for band in range(x.shape[2]):
        xb, rb = x[:, :, band], ref[:, :, band]
        for i in range(x.shape[0] - win + 1):
            for j in range(x.shape[1] - win + 1):
                wx = xb[i : i + win, j : j + win].ravel()
                wr = rb[i : i + win, j : j + win].ravel()
                mx, mr = wx.mean(), wr.mean()
                vx = ((wx - mx) ** 2).mean()
                vr = ((wr - mr) ** 2).mean()
                cov = ((wx - mx) * (wr - mr)).mean()
                num = (2 * mx * mr + c1) * (2 * cov + c2)
                den = (mx**2 + mr**2 + c1) * (vx + vr + c2)
                vals.append(num / den)
    return float(np.mean(vals))


def test_psnr_hand_case():
    ref = np.zeros((2, 2, 1))
    x = np.zeros((2, 2, 1))
    x[0, 0, 0] = 255.0
    ctx = MetricContext(peak=255.0)
    assert psnr(x, ref, ctx) == pytest.approx(10 * np.log10(4.0), abs=1e-12)


def test_psnr_identical_is_infinite(rng):
    t = rng.random((4, 4, 2)) * 255
    assert psnr(t, t.copy(), MetricContext(peak=255.0)) == np.inf


def test_psnr_uniform_full_scale_error_is_zero_db():
    ref = np.zeros((3, 3, 1))
    x = np.full((3, 3, 1), 255.0)
    assert psnr(x, ref, MetricContext(peak=255.0)) == pytest.approx(0.0, abs=1e-12)


def test_psnr_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        psnr(np.zeros((2, 2, 1)), np.zeros((2, 3, 1)), MetricContext())


def test_psnr_decreases_with_noise(rng):
    ref = rng.random((16, 16, 3)) * 255
    ctx = MetricContext(peak=255.0)
    noise = rng.standard_normal(ref.shape)
    values = [psnr(ref + amp * noise, ref, ctx) for amp in (5.0, 15.0, 45.0)]
    assert values[0] > values[1] > values[2]


def test_ssim_self_is_exactly_one(rng):
    x = rng.random((12, 12, 2)) * 255
    assert ssim(x, x.copy(), MetricContext(peak=255.0)) == 1.0


def test_ssim_symmetry(rng):
    x = rng.random((10, 10, 1)) * 255
    y = rng.random((10, 10, 1)) * 255
    ctx = MetricContext(peak=255.0)
    assert ssim(x, y, ctx) == ssim(y, x, ctx)


def test_ssim_matches_direct_loop(rng):
    x = rng.random((16, 16, 1)) * 255
    y = np.clip(x + 20 * rng.standard_normal(x.shape), 0, 255)
    got = ssim(x, y, MetricContext(peak=255.0))
    want = ssim_direct(x, y, 255.0)
    assert abs(got - want) < 1e-9


def test_ssim_bounded(rng):
    for seed in range(5):
        g = np.random.default_rng(seed)
        x = g.random((9, 9, 2))
        y = g.random((9, 9, 2))
        v = ssim(x, y, MetricContext(peak=1.0))
        assert -1.0 <= v <= 1.0


def test_ssim_too_small():
    with pytest.raises(ImageTooSmall):
        ssim(np.zeros((4, 4, 1)), np.zeros((4, 4, 1)), MetricContext())


def test_metrics_invariant_to_normalization_round_trip(rng):
    ref = rng.random((16, 16, 3)) * 255
    x = np.clip(ref + 10 * rng.standard_normal(ref.shape), 0, 255)
    ctx = MetricContext(peak=255.0)
    x_rt = (x / 255.0) * 255.0
    ref_rt = (ref / 255.0) * 255.0
    assert abs(psnr(x, ref, ctx) - psnr(x_rt, ref_rt, ctx)) < 1e-9
    assert abs(ssim(x, ref, ctx) - ssim(x_rt, ref_rt, ctx)) < 1e-9


def test_video_peak_uses_declared_bound():
    # declared bound (e.g. 256 for 8-bit video) is used even when the
    # content maximum is lower
    ref = np.zeros((8, 8, 1))
    x = np.full((8, 8, 1), 16.0)
    p255 = psnr(x, ref, MetricContext(peak=255.0))
    p256 = psnr(x, ref, MetricContext(peak=256.0))
    assert p256 > p255
    assert p256 == pytest.approx(20 * np.log10(256.0 / 16.0), abs=1e-12)
