"""Exception types raised across the toolkit."""


class ShapeMismatch(ValueError):
    """Operands do not have compatible shapes."""


class ResidualImaginary(ValueError):
    """Inverse spectral transform left significant imaginary content."""


class ZeroReference(ValueError):
    """Relative change requested against an all-zero reference tensor."""


class NonFiniteGradient(FloatingPointError):
    """A gradient entry became NaN/Inf (typically a divergent step size)."""


class BadRank(ValueError):
    """Requested factorization rank exceeds min(H, W) or is not positive."""


class BadRate(ValueError):
    """Sampling rate outside (0, 1]."""


class ImageTooSmall(ValueError):
    """Image dimensions below the minimum the operation supports."""


class BridgeFailure(RuntimeError):
    """External denoiser process failed (spawn, protocol, or shape error)."""


class InconsistentStack(ValueError):
    """Images in a stack do not share dimensions."""


class UnsupportedBitDepth(ValueError):
    """Image bit depth does not match the declared dataset kind."""


class BadMagic(ValueError):
    """File does not start with the expected magic bytes."""


class TruncatedFile(ValueError):
    """File payload shorter (or longer) than its header declares."""


class Diverged(RuntimeError):
    """A solver iterate became non-finite."""
