"""Alternating-direction completion loop combining three priors.

Each outer iteration runs a few gradient steps on the factor pair,
then refreshes the two auxiliary tensors with their scaled-multiplier
closed forms, passing them through the local and non-local denoisers,
and finally updates both multipliers. Iterations stop when the relative
change of the main variable drops to the tolerance or the budget runs
out, whichever is first.

Data is normalized to [0, 1] by the caller-supplied peak on the way in
and denormalized on the way out; denoiser strengths are in normalized
units.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .core import apply_mask, as_tensor3, fro_norm, rel_change
from .data import Mask
from .denoise import DenoiserSpec, denoise
from .errors import Diverged
from .factors import (
    FactorOptConfig,
    FactorPair,
    Transform,
    compose,
    fit_factors,
    init_factors,
)
from .metrics import MetricContext, psnr, ssim


@dataclass
class SolverConfig:
    rank: int = 8
    outer_iters: int = 100
    inner_iters: int = 15
    tol: float = 0.01
    rho: float = 1.0
    psi: float = 1.0
    tv_weight: float = 0.01
    lr: float = 0.01
    optimizer: str = "gd"
    smooth_eps: float = 1e-6
    transform: str = "identity"
    enable_local: bool = True
    enable_nonlocal: bool = True
    local_spec: DenoiserSpec = field(default_factory=lambda: DenoiserSpec(kind="gaussian-smoother", sigma=0.1))
    nonlocal_spec: DenoiserSpec = field(default_factory=lambda: DenoiserSpec(kind="bm3d", sigma=0.1))
    clamp_observed: bool = False
    track_metrics: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.outer_iters < 1:
            raise ValueError("outer_iters must be >= 1")
        if self.inner_iters < 0:
            # 0 freezes the factors; useful for isolating the splitting updates
            raise ValueError("inner_iters must be >= 0")
        if self.rho <= 0 or self.psi <= 0:
            raise ValueError("penalty weights must be positive")
        if self.tol < 0:
            raise ValueError("tol must be non-negative")

    def factor_opt(self) -> FactorOptConfig:
        return FactorOptConfig(
            lr=self.lr,
            steps=self.inner_iters,
            tv_weight=self.tv_weight,
            smooth_eps=self.smooth_eps,
            optimizer=self.optimizer,
        )


@dataclass
class SolverState:
    x: np.ndarray
    y: np.ndarray
    dual_lowrank: np.ndarray  # multiplier tying X to the factor composition
    dual_aux: np.ndarray  # multiplier tying X to Y
    factors: FactorPair
    transform: Transform
    iteration: int = 0
    history: list = field(default_factory=list)
    opt_state: object = None  # optimizer moments, threaded between outer iterations


@dataclass
class ReconstructionReport:
    x: np.ndarray
    y: np.ndarray
    composed: np.ndarray
    iterations: int
    converged: bool
    final_rel_change: float
    history: list
    seconds: float
    local_calls: int
    nonlocal_calls: int
    psnr: float | None = None
    ssim: float | None = None


def init_state(observed: np.ndarray, cfg: SolverConfig) -> SolverState:
    observed = as_tensor3(observed)
    factors = init_factors(observed, cfg.rank, cfg.seed)
    if cfg.transform == "linear":
        transform = Transform.linear(observed.shape[2])
    else:
        transform = Transform()
    return SolverState(
        x=observed.copy(),
        y=observed.copy(),
        dual_lowrank=np.zeros_like(observed),
        dual_aux=np.zeros_like(observed),
        factors=factors,
        transform=transform,
    )


def update_x(state: SolverState, composed: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    arg = (
        cfg.rho * composed
        - state.dual_lowrank
        + cfg.psi * state.y
        - state.dual_aux
    ) / (cfg.rho + cfg.psi)
    if not cfg.enable_local:
        return arg
    return denoise(arg, cfg.local_spec)


def update_y(state: SolverState, x: np.ndarray, cfg: SolverConfig) -> np.ndarray:
    arg = x + state.dual_aux / cfg.psi
    if not cfg.enable_nonlocal:
        return arg
    return denoise(arg, cfg.nonlocal_spec)


def update_multipliers(state, x, y, composed, cfg):
    m1 = state.dual_lowrank + cfg.rho * (x - composed)
    m2 = state.dual_aux + cfg.psi * (x - y)
    return m1, m2


def run(
    observed: np.ndarray,
    mask,
    cfg: SolverConfig,
    reference: np.ndarray | None = None,
    peak: float = 1.0,
) -> tuple[SolverState, ReconstructionReport]:
    """Complete a masked tensor; returns final state plus a run report.

    observed holds values in [0, peak]; unobserved entries are zeroed
    here regardless, so passing the full tensor with a mask is safe.
    reference, when given, is compared against in original units.
    """
    t0 = time.perf_counter()
    mask_arr = mask.mask if isinstance(mask, Mask) else np.asarray(mask, dtype=bool)
    observed = apply_mask(as_tensor3(observed) / peak, mask_arr)
    ctx = MetricContext(peak=peak)

    state = init_state(observed, cfg)
    opt = cfg.factor_opt()
    local_calls = 0
    nonlocal_calls = 0
    converged = False
    rel = np.inf

    while state.iteration < cfg.outer_iters:
        x_prev = state.x
        state.factors, state.transform, state.opt_state = fit_factors(
            state.factors,
            state.transform,
            state.x,
            observed,
            mask_arr,
            state.dual_lowrank,
            cfg.rho,
            opt,
            state.opt_state,
        )
        composed = compose(state.factors, state.transform)
        x = update_x(state, composed, cfg)
        if cfg.enable_local:
            local_calls += 1
        y = update_y(state, x, cfg)
        if cfg.enable_nonlocal:
            nonlocal_calls += 1
        if cfg.clamp_observed:
            x = np.where(mask_arr, observed, x)
        m1, m2 = update_multipliers(state, x, y, composed, cfg)
        if not (np.isfinite(x).all() and np.isfinite(m1).all()):
            raise Diverged(f"non-finite iterate at outer iteration {state.iteration + 1}")

        state.x, state.y = x, y
        state.dual_lowrank, state.dual_aux = m1, m2
        state.iteration += 1

        prev_norm = fro_norm(x_prev)
        rel = rel_change(x, x_prev) if prev_norm > 0 else np.inf
        record = {"iteration": state.iteration, "rel_change": rel}
        if reference is not None and cfg.track_metrics:
            record["psnr_x"] = psnr(x * peak, reference, ctx)
            record["ssim_x"] = ssim(x * peak, reference, ctx)
            record["psnr_y"] = psnr(y * peak, reference, ctx)
            record["ssim_y"] = ssim(y * peak, reference, ctx)
        state.history.append(record)
        if rel <= cfg.tol:
            converged = True
            break

    report = ReconstructionReport(
        x=state.x * peak,
        y=state.y * peak,
        composed=compose(state.factors, state.transform) * peak,
        iterations=state.iteration,
        converged=converged,
        final_rel_change=rel,
        history=state.history,
        seconds=time.perf_counter() - t0,
        local_calls=local_calls,
        nonlocal_calls=nonlocal_calls,
    )
    if reference is not None:
        report.psnr = psnr(report.x, reference, ctx)
        report.ssim = ssim(report.x, reference, ctx)
    return state, report
