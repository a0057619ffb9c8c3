"""Exact tools for the range of the permanent on +-1 matrices."""

from permrange.errors import BudgetExceeded, MatrixFormatError
from permrange.sign_matrix import (
    CountsVector,
    SignMatrix,
    concat_rows,
    make_b_matrix,
    parse_matrix,
    render_matrix,
)
from permrange.permanent import (
    laplace_expand,
    permanent,
    permanent_bitmask_dp,
    permanent_injection_sum,
    permanent_minor,
    permanent_ryser,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "MatrixFormatError",
    "CountsVector",
    "SignMatrix",
    "concat_rows",
    "make_b_matrix",
    "parse_matrix",
    "render_matrix",
    "laplace_expand",
    "permanent",
    "permanent_bitmask_dp",
    "permanent_injection_sum",
    "permanent_minor",
    "permanent_ryser",
]
