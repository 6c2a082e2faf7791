"""Exact verification toolkit for conformally invariant Dirac-type operators."""

from .multivector import (
    Metric,
    Multivector,
    clifford_mul_vec,
    clifford_word,
    contract,
    matrix_of_left_mul,
    wedge,
)
from .scalars import IMAG, QI2, SQRT2

__all__ = [
    "IMAG",
    "Metric",
    "Multivector",
    "QI2",
    "SQRT2",
    "clifford_mul_vec",
    "clifford_word",
    "contract",
    "matrix_of_left_mul",
    "wedge",
]

__version__ = "0.1.0"
