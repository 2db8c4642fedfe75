"""External denoiser worker speaking the TDN1 framed protocol."""

from .filters import ModelError, ResidualCnn, cnn_denoise, gaussian_smooth, load_model
from .protocol import (
    HEADER_SIZE,
    MAGIC,
    MalformedRequest,
    pack_frame,
    parse_header,
    read_request,
    write_response,
)
from .server import build_handler, main, serve

__version__ = "0.1.0"
__all__ = [
    "HEADER_SIZE",
    "MAGIC",
    "MalformedRequest",
    "ModelError",
    "ResidualCnn",
    "build_handler",
    "cnn_denoise",
    "gaussian_smooth",
    "load_model",
    "main",
    "pack_frame",
    "parse_header",
    "read_request",
    "serve",
    "write_response",
]
