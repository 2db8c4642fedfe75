"""Command-line benchmark surface.

Subcommands: complete (one reconstruction), sweep (SR x seed x sigma
grid with resume), ablate (four denoiser configurations on a shared
mask), mask (materialize a sampling mask), metrics (compare two
tensors), denoise (run one denoiser step on a tensor file).

Inputs are raw tensor files or image stacks; outputs are raw tensors
plus CSV reports. Every run writes a config echo (config.json) next to
its outputs so a report is interpretable on its own. Commands exit
nonzero with a one-line diagnostic on any error; complete/metrics write
outputs only after the whole computation succeeds. The bridge endpoint
for external denoisers can be overridden with TENREC_BRIDGE_CMD.
"""

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from .bm3d import Bm3dParams
from .data import (
    KIND_PEAK,
    Mask,
    SUMMARY_FIELDS,
    append_csv_row,
    gen_mask,
    load_image_stack,
    load_raw,
    read_csv_rows,
    save_raw,
)
from .denoise import KINDS, DenoiserSpec, denoise
from .metrics import MetricContext, psnr, ssim
from .solver import SolverConfig, run


def _add_config_flags(p: argparse.ArgumentParser):
    p.add_argument("--rank", type=int, default=8)
    p.add_argument("--outer-iters", type=int, default=100)
    p.add_argument("--inner-iters", type=int, default=15)
    p.add_argument("--tol", type=float, default=0.01)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--psi", type=float, default=1.0)
    p.add_argument("--tv-weight", type=float, default=0.01)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--optimizer", choices=("gd", "adam"), default="gd")
    p.add_argument("--smooth-eps", type=float, default=1e-6)
    p.add_argument("--transform", choices=("identity", "linear"), default="identity")
    p.add_argument("--sigma-local", type=float, default=0.1)
    p.add_argument("--sigma-nonlocal", type=float, default=0.1)
    p.add_argument("--local-kind", choices=KINDS, default="gaussian-smoother")
    p.add_argument("--nonlocal-kind", choices=KINDS, default="bm3d")
    p.add_argument("--bridge-endpoint", default=None, help="command line of an external denoiser")
    p.add_argument("--no-local", action="store_true", help="disable the local denoiser step")
    p.add_argument("--no-nonlocal", action="store_true", help="disable the non-local denoiser step")
    p.add_argument("--clamp-observed", action="store_true")
    p.add_argument("--solver-seed", type=int, default=0)
    p.add_argument("--trace", action="store_true", help="record per-iteration PSNR/SSIM (needs a reference)")


def _add_input_flags(p: argparse.ArgumentParser):
    p.add_argument("--input", required=True, nargs="+", help="raw tensor file or image files")
    p.add_argument("--kind", choices=tuple(KIND_PEAK), default=None, help="dataset kind for image input")
    p.add_argument("--peak", type=float, default=None, help="peak value override (raw input defaults to 1.0)")
    p.add_argument("--name", default=None, help="sample name used in report rows")


def _load_input(args):
    paths = args.input
    if len(paths) == 1 and not _is_image(paths[0]):
        tensor, _ = load_raw(paths[0])
        name = args.name or os.path.splitext(os.path.basename(paths[0]))[0]
        peak = args.peak if args.peak is not None else 1.0
        return tensor, peak, name
    kind = args.kind or "color-image"
    sample = load_image_stack(paths, kind, name=args.name)
    peak = args.peak if args.peak is not None else sample.peak
    return sample.tensor, peak, sample.name


def _is_image(path: str) -> bool:
    return os.path.splitext(path)[1].lower() in (".png", ".jpg", ".jpeg", ".bmp", ".tif", ".tiff")


def _config_from_args(args, sigma_local=None, sigma_nonlocal=None,
                      enable_local=None, enable_nonlocal=None) -> SolverConfig:
    endpoint = os.environ.get("TENREC_BRIDGE_CMD", args.bridge_endpoint)
    s1 = args.sigma_local if sigma_local is None else sigma_local
    s2 = args.sigma_nonlocal if sigma_nonlocal is None else sigma_nonlocal
    local = DenoiserSpec(kind=args.local_kind, sigma=s1, endpoint=endpoint)
    nonlocal_ = DenoiserSpec(kind=args.nonlocal_kind, sigma=s2, endpoint=endpoint)
    return SolverConfig(
        rank=args.rank,
        outer_iters=args.outer_iters,
        inner_iters=args.inner_iters,
        tol=args.tol,
        rho=args.rho,
        psi=args.psi,
        tv_weight=args.tv_weight,
        lr=args.lr,
        optimizer=args.optimizer,
        smooth_eps=args.smooth_eps,
        transform=args.transform,
        enable_local=not args.no_local if enable_local is None else enable_local,
        enable_nonlocal=not args.no_nonlocal if enable_nonlocal is None else enable_nonlocal,
        local_spec=local,
        nonlocal_spec=nonlocal_,
        clamp_observed=args.clamp_observed,
        track_metrics=args.trace,
        seed=args.solver_seed,
    )


def _echo_config(out_dir, args, cfg, extra=None):
    payload = {
        "argv": [a for a in sys.argv[1:]],
        "config": dataclasses.asdict(cfg),
        **(extra or {}),
    }
    with open(os.path.join(out_dir, "config.json"), "w") as fh:
        json.dump(payload, fh, indent=2, default=str)


def cmd_complete(args) -> int:
    tensor, peak, name = _load_input(args)
    h, w, c = tensor.shape
    mask = gen_mask(h, w, c, args.sr, args.mask_seed)
    observed = np.where(mask.mask, tensor, 0.0)
    ctx = MetricContext(peak=peak)
    observed_psnr = psnr(np.where(mask.mask, tensor, 0.0), tensor, ctx)
    cfg = _config_from_args(args)
    state, report = run(observed, mask, cfg, reference=tensor, peak=peak)

    os.makedirs(args.out, exist_ok=True)
    save_raw(report.x, os.path.join(args.out, "recon.tns"))
    hist_fields = sorted({k for row in report.history for k in row}, key=lambda k: (k != "iteration", k))
    hist_path = os.path.join(args.out, "history.csv")
    if os.path.exists(hist_path):
        os.remove(hist_path)
    for row in report.history:
        append_csv_row(hist_path, hist_fields, row)
    summary = {
        "name": name,
        "sr": args.sr,
        "seed": args.mask_seed,
        "psnr": report.psnr,
        "ssim": report.ssim,
        "iterations": report.iterations,
        "seconds": round(report.seconds, 3),
    }
    append_csv_row(os.path.join(args.out, "summary.csv"), SUMMARY_FIELDS, summary)
    _echo_config(args.out, args, cfg, {"mask_checksum": mask.checksum(), "peak": peak,
                                       "observed_psnr": observed_psnr})
    print(f"observed psnr {observed_psnr:.2f} dB")
    print(
        f"{name} sr={args.sr} seed={args.mask_seed}: psnr {report.psnr:.2f} dB "
        f"ssim {report.ssim:.4f} iterations {report.iterations} seconds {report.seconds:.1f}"
    )
    return 0


def cmd_sweep(args) -> int:
    tensor, peak, name = _load_input(args)
    h, w, c = tensor.shape
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "sweep.csv")
    fields = ["name", "sr", "seed", "sigma_local", "sigma_nonlocal",
              "psnr", "ssim", "iterations", "seconds"]
    done = {
        (r["name"], r["sr"], r["seed"], r["sigma_local"], r["sigma_nonlocal"])
        for r in read_csv_rows(csv_path)
    }
    sigmas = args.sigmas if args.sigmas is not None else [args.sigma_local]
    wrote = 0
    cfg_echo = None
    for sr in args.sr_list:
        for seed in args.seed_list:
            for sigma in sigmas:
                key = (name, repr(sr), repr(seed), repr(sigma), repr(sigma))
                if key in done:
                    continue
                mask = gen_mask(h, w, c, sr, seed)
                observed = np.where(mask.mask, tensor, 0.0)
                cfg = _config_from_args(args, sigma_local=sigma, sigma_nonlocal=sigma)
                cfg_echo = cfg
                state, report = run(observed, mask, cfg, reference=tensor, peak=peak)
                append_csv_row(csv_path, fields, {
                    "name": name, "sr": repr(sr), "seed": repr(seed),
                    "sigma_local": repr(sigma), "sigma_nonlocal": repr(sigma),
                    "psnr": report.psnr, "ssim": report.ssim,
                    "iterations": report.iterations, "seconds": round(report.seconds, 3),
                })
                wrote += 1
    if cfg_echo is not None:
        _echo_config(args.out, args, cfg_echo, {"peak": peak})
    print(f"sweep wrote {wrote} new rows to {csv_path}")
    return 0


ABLATION_VARIANTS = (
    ("full", True, True),
    ("remove-local", False, True),
    ("remove-nonlocal", True, False),
    ("remove-both", False, False),
)


def cmd_ablate(args) -> int:
    tensor, peak, name = _load_input(args)
    h, w, c = tensor.shape
    mask = gen_mask(h, w, c, args.sr, args.mask_seed)
    observed = np.where(mask.mask, tensor, 0.0)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "ablation.csv")
    fields = ["name", "variant", "sr", "seed", "mask_checksum", "psnr", "ssim",
              "iterations", "seconds", "local_calls", "nonlocal_calls"]
    cfg_echo = None
    for variant, el, en in ABLATION_VARIANTS:
        cfg = _config_from_args(args, enable_local=el, enable_nonlocal=en)
        cfg_echo = cfg
        state, report = run(observed, mask, cfg, reference=tensor, peak=peak)
        append_csv_row(csv_path, fields, {
            "name": name, "variant": variant, "sr": args.sr, "seed": args.mask_seed,
            "mask_checksum": mask.checksum(), "psnr": report.psnr, "ssim": report.ssim,
            "iterations": report.iterations, "seconds": round(report.seconds, 3),
            "local_calls": report.local_calls, "nonlocal_calls": report.nonlocal_calls,
        })
        print(f"{variant}: psnr {report.psnr:.2f} ssim {report.ssim:.4f} "
              f"({report.local_calls}/{report.nonlocal_calls} denoiser calls)")
    _echo_config(args.out, args, cfg_echo, {"mask_checksum": mask.checksum(), "peak": peak})
    return 0


def cmd_mask(args) -> int:
    mask = gen_mask(args.height, args.width, args.channels, args.sr, args.mask_seed)
    save_raw(mask.mask.astype(np.float64), args.out, flags=1)
    print(f"mask {args.height}x{args.width}x{args.channels} sr={args.sr} "
          f"seed={args.mask_seed} set_bits={int(mask.mask.sum())} checksum={mask.checksum()}")
    return 0


def cmd_metrics(args) -> int:
    x, _ = load_raw(args.x)
    ref, _ = load_raw(args.ref)
    ctx = MetricContext(peak=args.peak)
    print(f"psnr {psnr(x, ref, ctx)} ssim {ssim(x, ref, ctx)}")
    return 0


def cmd_denoise(args) -> int:
    tensor, flags = load_raw(args.input[0]) if not _is_image(args.input[0]) else (None, 0)
    if tensor is None:
        sample = load_image_stack(args.input, args.kind or "color-image")
        tensor = sample.tensor / sample.peak
    endpoint = os.environ.get("TENREC_BRIDGE_CMD", args.bridge_endpoint)
    spec = DenoiserSpec(kind=args.denoiser, sigma=args.sigma, endpoint=endpoint)
    out = denoise(tensor, spec)
    save_raw(out, args.out)
    print(f"denoised {tensor.shape} with {args.denoiser} sigma={args.sigma} -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="tenrec", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("complete", help="reconstruct one masked tensor")
    _add_input_flags(p)
    p.add_argument("--sr", type=float, required=True)
    p.add_argument("--mask-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("sweep", help="grid of SR x seed x sigma runs, resumable")
    _add_input_flags(p)
    p.add_argument("--sr-list", type=float, nargs="+", required=True)
    p.add_argument("--seed-list", type=int, nargs="+", default=[0])
    p.add_argument("--sigmas", type=float, nargs="+", default=None,
                   help="sigma values applied to both denoisers, one row each")
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ablate", help="full/remove-local/remove-nonlocal/remove-both on one mask")
    _add_input_flags(p)
    p.add_argument("--sr", type=float, required=True)
    p.add_argument("--mask-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("mask", help="write a sampling mask as a raw tensor (flags=1)")
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--channels", type=int, required=True)
    p.add_argument("--sr", type=float, required=True)
    p.add_argument("--mask-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("metrics", help="PSNR/SSIM between two raw tensors")
    p.add_argument("--x", required=True)
    p.add_argument("--ref", required=True)
    p.add_argument("--peak", type=float, default=1.0)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("denoise", help="apply one denoiser to a tensor file")
    p.add_argument("--input", required=True, nargs="+")
    p.add_argument("--kind", choices=tuple(KIND_PEAK), default=None)
    p.add_argument("--denoiser", choices=KINDS, default="gaussian-smoother")
    p.add_argument("--sigma", type=float, default=0.1)
    p.add_argument("--bridge-endpoint", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_denoise)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # single diagnostic line, nonzero exit
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
