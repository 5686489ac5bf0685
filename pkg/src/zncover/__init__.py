"""Theta-function solutions of Riemann-Hilbert problems on singular Z_N curves."""

from .curve import ZnCurve, SheetedPoint, make_curve
from .errors import ZnCoverError

__all__ = ["ZnCurve", "SheetedPoint", "make_curve", "ZnCoverError"]
__version__ = "0.1.0"
