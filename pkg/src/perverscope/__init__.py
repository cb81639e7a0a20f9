"""perverscope: exact-rational cellular sheaf cohomology and decomposition-theorem bookkeeping."""

from .ratlin import RationalMatrix, rat
from .complexes import (
    ChainMap,
    CochainComplex,
    ComplexError,
    FilteredComplex,
    GradedDims,
    is_e2_degenerate,
    mapping_cone,
    spectral_pages,
)

__all__ = [
    "RationalMatrix",
    "rat",
    "ChainMap",
    "CochainComplex",
    "ComplexError",
    "FilteredComplex",
    "GradedDims",
    "is_e2_degenerate",
    "mapping_cone",
    "spectral_pages",
]
