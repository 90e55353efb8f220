"""Special functions: complex log-gamma, Gauss 2F1, Meijer G and Fox H."""

from .foxh import FoxHResult, FoxHSpec, MeijerGSpec, contour_integral, fox_h, meijer_g
from .gamma import gamma_ratio, log_gamma_complex, log_gamma_real
from .hyp2f1 import gauss_2f1, hyp2f1_with_error

__all__ = [
    "FoxHResult", "FoxHSpec", "MeijerGSpec", "contour_integral", "fox_h", "meijer_g",
    "gamma_ratio", "log_gamma_complex", "log_gamma_real", "gauss_2f1", "hyp2f1_with_error",
]
