"""Straggler-tolerant coded computation built on algebraic function fields.

Submodules: ``galois`` (finite fields), ``function_field`` (curves, places,
divisors), ``rook_diagonal`` (batch products), ``mm_tensors`` (bilinear
algorithms), ``rook_entangled`` (one-point exponent codes), ``tensor_power``
(function evaluation via sums of powers), ``runtime_sim`` and ``cli``.
"""

from .errors import AgRookError
from .function_field import Curve, Place
from .galois import GF, field_from_order, field_make
from .mm_tensors import MatmulScheme, naive_algorithm, strassen_2x2x2
from .rook_diagonal import build_diagonal, empirical_threshold
from .rook_entangled import build_entangled
from .tensor_power import build_power_scheme, interpolate, waring_bruteforce

__all__ = [
    "AgRookError", "Curve", "Place", "GF", "field_from_order", "field_make",
    "MatmulScheme", "naive_algorithm", "strassen_2x2x2", "build_diagonal",
    "empirical_threshold", "build_entangled", "build_power_scheme", "interpolate",
    "waring_bruteforce",
]

__version__ = "0.1.0"
