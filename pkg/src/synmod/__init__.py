"""synmod: exact-arithmetic workbench for logarithmic de Rham complexes
with modulus and the graded pieces of syntomic complexes over Z/p^n.

Everything is brute-force linear algebra over F_{p^s} on per-multidegree
cells of degree-truncated polynomial charts; no floating point anywhere.
"""

__version__ = "0.1.0"

from .chart import Chart, Divisor, EisensteinData, filtration_chain
from .fields import GF, Zmod, gf, zmod
from .forms import LogForm, cartier_inverse, differential_twisted, \
    dlog_of_monomial, dlog_of_unit, frobenius_pullback, relative_projection, \
    residue, wedge
from .linalg import FpMatrix, Subspace, rank_kernel_image
from .poly import TruncatedPoly, exact_divide_by_p, pd_log, \
    principal_unit_inverse

__all__ = [
    "Chart", "Divisor", "EisensteinData", "filtration_chain",
    "GF", "Zmod", "gf", "zmod",
    "LogForm", "cartier_inverse", "differential_twisted", "dlog_of_monomial",
    "dlog_of_unit", "frobenius_pullback", "relative_projection", "residue",
    "wedge",
    "FpMatrix", "Subspace", "rank_kernel_image",
    "TruncatedPoly", "exact_divide_by_p", "pd_log", "principal_unit_inverse",
    "__version__",
]
