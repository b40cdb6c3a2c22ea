"""Shear flows near Couette: Rayleigh eigenproblems, Sobolev norms, steady
cat's-eye states, linear inviscid damping and an inflection stability test."""

__version__ = "0.1.0"

from .errors import CouetteError, NumericalError, ValidationError  # noqa: E402
from .profiles import ShearProfile  # noqa: E402

__all__ = ["CouetteError", "NumericalError", "ShearProfile", "ValidationError", "__version__"]
