"""Exact cohomological checks for Fourier-Mukai transforms on products of
elliptic curves and the theta-bundle bookkeeping built on them."""

__version__ = "0.1.0"

from .exterior import AlgebraElement, GeneratorSet  # noqa: E402,F401
from .mukai import MukaiVector, parse_vector, product_chi, d_v, verlinde_count  # noqa: E402,F401
