"""Tensor completion with a learnable tube-wise factorization and
plug-and-play local and non-local denoiser priors, solved by an
alternating-direction splitting loop.

Typical use:

    from tenrec import SolverConfig, run, gen_mask

    mask = gen_mask(*tensor.shape, sr=0.2, seed=0)
    observed = np.where(mask.mask, tensor, 0.0)
    state, report = run(observed, mask, SolverConfig(rank=8),
                        reference=tensor, peak=255.0)
"""

from .bm3d import Bm3dParams, bm3d_band
from .core import (
    apply_mask,
    as_tensor3,
    fro_norm,
    rel_change,
    t_transpose,
    tprod,
    tprod_direct,
)
from .data import (
    DatasetSample,
    Mask,
    gen_mask,
    load_image_stack,
    load_raw,
    save_raw,
)
from .denoise import DenoiserSpec, denoise, gaussian_smooth, tv_smooth
from .factors import (
    FactorOptConfig,
    FactorPair,
    Transform,
    compose,
    factor_objective,
    factor_tv,
    fit_factors,
    init_factors,
)
from .metrics import MetricContext, psnr, ssim
from .solver import ReconstructionReport, SolverConfig, SolverState, run

__version__ = "0.1.0"

__all__ = [
    "Bm3dParams",
    "bm3d_band",
    "apply_mask",
    "as_tensor3",
    "fro_norm",
    "rel_change",
    "t_transpose",
    "tprod",
    "tprod_direct",
    "DatasetSample",
    "Mask",
    "gen_mask",
    "load_image_stack",
    "load_raw",
    "save_raw",
    "DenoiserSpec",
    "denoise",
    "gaussian_smooth",
    "tv_smooth",
    "FactorOptConfig",
    "FactorPair",
    "Transform",
    "compose",
    "factor_objective",
    "factor_tv",
    "fit_factors",
    "init_factors",
    "MetricContext",
    "psnr",
    "ssim",
    "ReconstructionReport",
    "SolverConfig",
    "SolverState",
    "run",
    "__version__",
]
