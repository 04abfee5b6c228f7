"""Growth of Fourier and Jacobi transforms under spherical-mean smoothness.

Numerical evaluation and grid certification of two-sided estimates that
tie the decay of a radial transform to ``||M^t f - f||_p``, on Euclidean
space and on rank-one symmetric spaces.
"""

__version__ = "0.1.0"
SCHEMA_VERSION = "growthfx-report/1"

from .errors import ConvergenceError, PrecisionWarning  # noqa: E402
from .specfun import OrderPair, SpectralPoint, MultiplicityPair  # noqa: E402

__all__ = [
    "__version__",
    "SCHEMA_VERSION",
    "ConvergenceError",
    "PrecisionWarning",
    "OrderPair",
    "SpectralPoint",
    "MultiplicityPair",
]
