"""Learnable low-rank representation and its gradient-descent inner solver.

A tensor X (H, W, C) is modeled as g(A * B) where * is the tube-wise
tensor product of factors A (H, r, C) and B (r, W, C) and g is either
the identity or a learnable C x C linear map applied along mode 3.
The factor objective couples masked data fidelity, an l1 total-variation
penalty on the factors, and the consensus terms of the outer splitting
scheme; all gradients are analytic and finite-difference checked.
"""

from dataclasses import dataclass, replace

import numpy as np

from .core import fro_norm, t_transpose, tprod
from .errors import BadRank, NonFiniteGradient, ShapeMismatch


@dataclass
class FactorPair:
    """Low-rank factors a (H, r, C) and b (r, W, C)."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        if self.a.ndim != 3 or self.b.ndim != 3:
            raise ShapeMismatch("factors must be 3-way tensors")
        if self.a.shape[1] != self.b.shape[0] or self.a.shape[2] != self.b.shape[2]:
            raise ShapeMismatch(f"factors do not compose: {self.a.shape} x {self.b.shape}")

    @property
    def rank(self) -> int:
        return self.a.shape[1]


@dataclass
class Transform:
    """Mode-3 map applied to the composed factors: identity or learnable linear.

    In linear mode `matrix` (C x C) multiplies every tube and is
    initialized to the identity.
    """

    mode: str = "identity"
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.mode not in ("identity", "linear"):
            raise ValueError(f"unknown transform mode {self.mode!r}")
        if self.mode == "linear" and self.matrix is None:
            raise ValueError("linear mode requires a matrix")

    @classmethod
    def linear(cls, channels: int) -> "Transform":
        return cls(mode="linear", matrix=np.eye(channels))

    def apply(self, z: np.ndarray) -> np.ndarray:
        if self.mode == "identity":
            return z
        return np.einsum("ij,hwj->hwi", self.matrix, z)


@dataclass
class FactorOptConfig:
    """Inner-solver settings for the factor update.

    lr: gradient step size.
    steps: number of inner iterations per outer pass.
    tv_weight: weight of the l1 factor-gradient penalty.
    smooth_eps: l1 smoothing width, in units of the data range.
    optimizer: "gd" (plain descent, the default) or "adam".
    """

    lr: float = 0.01
    steps: int = 15
    tv_weight: float = 0.01
    smooth_eps: float = 1e-6
    optimizer: str = "gd"
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8

    def __post_init__(self):
        if self.lr < 0 or self.steps < 0 or self.tv_weight < 0 or self.smooth_eps <= 0:
            raise ValueError("lr/steps/tv_weight must be >= 0 and smooth_eps > 0")
        if self.optimizer not in ("gd", "adam"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


def init_factors(observed: np.ndarray, rank: int, seed: int) -> FactorPair:
    """Seeded Gaussian factor initialization scaled to the observed data.

    Entries are drawn i.i.d. N(0, s^2) with s = sqrt(rms(observed)) / sqrt(rank),
    which keeps the composed magnitude within an order of the data norm.
    """
    h, w, c = observed.shape
    if rank < 1 or rank > min(h, w):
        raise BadRank(f"rank {rank} outside [1, {min(h, w)}]")
    rms = fro_norm(observed) / np.sqrt(h * w * c)
    std = np.sqrt(rms) / np.sqrt(rank)
    rng = np.random.default_rng(seed)
    a = std * rng.standard_normal((h, rank, c))
    b = std * rng.standard_normal((rank, w, c))
    return FactorPair(a=a, b=b)


def compose(factors: FactorPair, transform: Transform) -> np.ndarray:
    """The modeled tensor g(a * b)."""
    return transform.apply(tprod(factors.a, factors.b))


def factor_tv(factors: FactorPair) -> float:
    """Exact l1 total variation of the factors.

    Forward differences of `a` along its height mode plus forward
    differences of `b` along its width mode; the last difference is
    omitted at the boundary.
    """
    da = np.diff(factors.a, axis=0)
    db = np.diff(factors.b, axis=1)
    return float(np.abs(da).sum() + np.abs(db).sum())


def _smooth_abs_sum(d: np.ndarray, eps: float) -> float:
    return float(np.sqrt(d * d + eps * eps).sum())


def factor_objective(factors, transform, x, observed, mask, dual, rho, cfg) -> float:
    """Smoothed objective of the factor update.

    J = ||P_mask(g(a*b) - observed)||_F^2 + tv_weight * TV_eps(a, b)
        + <x - g(a*b), dual> + rho/2 * ||x - g(a*b)||_F^2

    with |d| smoothed to sqrt(d^2 + eps^2) inside the TV term.
    """
    g = compose(factors, transform)
    if g.shape != observed.shape:
        raise ShapeMismatch(f"composed {g.shape} vs observed {observed.shape}")
    resid = np.where(mask, g - observed, 0.0)
    fit = float((resid * resid).sum())
    tv = _smooth_abs_sum(np.diff(factors.a, axis=0), cfg.smooth_eps)
    tv += _smooth_abs_sum(np.diff(factors.b, axis=1), cfg.smooth_eps)
    gap = x - g
    lagr = float((gap * dual).sum())
    penalty = 0.5 * rho * float((gap * gap).sum())
    return fit + cfg.tv_weight * tv + lagr + penalty


def factor_gradients(factors, transform, x, observed, mask, dual, rho, cfg):
    """Analytic gradients of the smoothed objective.

    Returns (grad_a, grad_b, grad_matrix); grad_matrix is None for the
    identity transform. Raises NonFiniteGradient on NaN/Inf entries.
    """
    z = tprod(factors.a, factors.b)
    g = transform.apply(z)
    resid = np.where(mask, g - observed, 0.0)
    gap = x - g
    # d/dg of fidelity + consensus terms
    wg = 2.0 * resid - dual - rho * gap

    if transform.mode == "identity":
        wz = wg
        grad_matrix = None
    else:
        wz = np.einsum("hwi,ij->hwj", wg, transform.matrix)
        grad_matrix = np.einsum("hwi,hwj->ij", wg, z)

    grad_a = tprod(wz, t_transpose(factors.b))
    grad_b = tprod(t_transpose(factors.a), wz)

    eps = cfg.smooth_eps
    da = np.diff(factors.a, axis=0)
    sa = cfg.tv_weight * da / np.sqrt(da * da + eps * eps)
    grad_a[1:] += sa
    grad_a[:-1] -= sa
    db = np.diff(factors.b, axis=1)
    sb = cfg.tv_weight * db / np.sqrt(db * db + eps * eps)
    grad_b[:, 1:] += sb
    grad_b[:, :-1] -= sb

    for name, grad in (("a", grad_a), ("b", grad_b), ("matrix", grad_matrix)):
        if grad is not None and not np.all(np.isfinite(grad)):
            raise NonFiniteGradient(f"non-finite gradient for factor {name}")
    return grad_a, grad_b, grad_matrix


def factor_step(factors, transform, x, observed, mask, dual, rho, cfg):
    """One plain gradient-descent update of the factors (and matrix). Pure."""
    grad_a, grad_b, grad_matrix = factor_gradients(
        factors, transform, x, observed, mask, dual, rho, cfg
    )
    new_factors = FactorPair(a=factors.a - cfg.lr * grad_a, b=factors.b - cfg.lr * grad_b)
    if grad_matrix is None:
        return new_factors, transform
    return new_factors, replace(transform, matrix=transform.matrix - cfg.lr * grad_matrix)


@dataclass
class AdamState:
    """First/second moment accumulators, carried across outer iterations.

    Resetting these every outer pass makes the first few inner steps
    oversized and the loop oscillates; warm moments keep it stable.
    """

    m: list
    v: list
    t: int = 0


def fit_factors(factors, transform, x, observed, mask, dual, rho, cfg, opt_state=None):
    """Run cfg.steps inner updates with the configured optimizer.

    Returns (factors, transform, opt_state); opt_state is None for
    plain descent and an AdamState to thread into the next call
    otherwise.
    """
    if cfg.optimizer == "gd":
        for _ in range(cfg.steps):
            factors, transform = factor_step(
                factors, transform, x, observed, mask, dual, rho, cfg
            )
        return factors, transform, None
    return _fit_adam(factors, transform, x, observed, mask, dual, rho, cfg, opt_state)


def _fit_adam(factors, transform, x, observed, mask, dual, rho, cfg, state):
    params = [factors.a, factors.b]
    if transform.mode == "linear":
        params.append(transform.matrix)
    if state is None:
        state = AdamState(
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
        )
    b1, b2 = cfg.adam_beta1, cfg.adam_beta2
    m, v, t = state.m, state.v, state.t
    for _ in range(cfg.steps):
        t += 1
        grads = factor_gradients(factors, transform, x, observed, mask, dual, rho, cfg)
        grads = [g for g in grads if g is not None]
        new_params = []
        for i, (p, grad) in enumerate(zip(params, grads)):
            m[i] = b1 * m[i] + (1 - b1) * grad
            v[i] = b2 * v[i] + (1 - b2) * grad * grad
            mhat = m[i] / (1 - b1**t)
            vhat = v[i] / (1 - b2**t)
            new_params.append(p - cfg.lr * mhat / (np.sqrt(vhat) + cfg.adam_eps))
        params = new_params
        factors = FactorPair(a=params[0], b=params[1])
        if transform.mode == "linear":
            transform = replace(transform, matrix=params[2])
    return factors, transform, AdamState(m=m, v=v, t=t)
