"""Exact computations for smooth complete intersections of two quadrics.

Real side: discriminant, signature walk, Krasnov invariant and the verdict
tables derived from it.  Finite-field side: brute-force point and plane
censuses used to cross-check counting statements at small scale.
"""

from .exact import Signature, SymMat, rat, signature_of
from .krasnov import KrasnovInvariant, compute_walk, krasnov_of_pencil
from .pencil import LinearSubspace, QuadricPencil, ReducedPencil, hyperbolic_reduce
from .verdict import decide, enumerate_isotopy, table_for_N

__version__ = "0.1.0"

__all__ = [
    "Signature",
    "SymMat",
    "rat",
    "signature_of",
    "KrasnovInvariant",
    "compute_walk",
    "krasnov_of_pencil",
    "LinearSubspace",
    "QuadricPencil",
    "ReducedPencil",
    "hyperbolic_reduce",
    "decide",
    "enumerate_isotopy",
    "table_for_N",
]
