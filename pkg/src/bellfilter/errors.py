"""Exception types shared across the package."""


class BellFilterError(Exception):
    """Base class for every error raised by this package."""


class NotHermitian(BellFilterError, ValueError):
    """Matrix deviates from its conjugate transpose beyond tolerance."""


class TraceNotOne(BellFilterError, ValueError):
    """Matrix trace differs from one beyond tolerance."""


class NotPositive(BellFilterError, ValueError):
    """Matrix has an eigenvalue below the positivity tolerance."""


class OutOfRange(BellFilterError, ValueError):
    """Scalar argument lies outside its admissible interval."""


class DegenerateCorrelation(BellFilterError):
    """Correlation matrix carries no preferred direction."""


class VanishingNorm(BellFilterError):
    """Filtered state has numerically vanishing normalization."""


class BadWindow(BellFilterError, ValueError):
    """Sphere-cap window bounds are invalid."""
