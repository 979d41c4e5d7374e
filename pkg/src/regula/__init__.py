"""Exact stabilization and robust-regulation certificates for SISO plants.

The package works over concrete "stability rings" embedded in the field of
rational functions Q(x): plain polynomials, the no-linear-term subring
Q[x^2, x^3], and proper rational functions with Hurwitz denominators.  Every
verdict carries witnesses that re-verify by exact arithmetic.
"""

from .algebra import NEG_INF, Poly, RatFunc, VariableMismatch, poly_ext_gcd, poly_gcd, rf_normalize

__version__ = "0.1.0"

__all__ = [
    "NEG_INF",
    "Poly",
    "RatFunc",
    "VariableMismatch",
    "poly_ext_gcd",
    "poly_gcd",
    "rf_normalize",
    "__version__",
]
