"""Denoiser worker: one framed request on stdin, one response on stdout.

Usage:
    tdn-bridge identity
    tdn-bridge gaussian
    tdn-bridge cnn --weights model.npz
    tdn-bridge gaussian --persistent    # keep serving frames until EOF

Exit is nonzero with a one-line diagnostic on stderr for malformed input
or an unusable model; nothing is ever written to stdout in that case.
"""

import argparse
import sys

from .filters import ModelError, cnn_denoise, gaussian_smooth, load_model
from .protocol import MalformedRequest, read_request, write_response

MODES = ("identity", "gaussian", "cnn")


def build_handler(mode: str, weights):
    if mode == "identity":
        return lambda t, sigma: t
    if mode == "gaussian":
        return gaussian_smooth
    # Fail at startup, before any stdin is consumed: cnn mode without a
    # working model must never degrade into a different denoiser.
    model = load_model(weights)
    return lambda t, sigma: cnn_denoise(t, sigma, model)


def serve(handler, stdin, stdout, persistent: bool) -> int:
    while True:
        request = read_request(stdin)
        if request is None:
            if persistent:
                return 0
            print("error: empty request", file=sys.stderr)
            return 2
        tensor, sigma = request
        write_response(stdout, handler(tensor, sigma), sigma)
        if not persistent:
            return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="tdn-bridge", description=__doc__.splitlines()[0])
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("--weights", default=None, help="npz model file, cnn mode only")
    ap.add_argument("--persistent", action="store_true",
                    help="serve frames until EOF instead of one request")
    args = ap.parse_args(argv)

    if args.mode == "cnn" and args.weights is None:
        print("error: cnn mode requires --weights", file=sys.stderr)
        return 2
    try:
        handler = build_handler(args.mode, args.weights)
    except ModelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return serve(handler, sys.stdin.buffer, sys.stdout.buffer, args.persistent)
    except MalformedRequest as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
