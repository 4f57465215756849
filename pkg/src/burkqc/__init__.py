"""Numerical checks for Burkholder-type energies of quasiconformal maps."""
__version__ = "0.1.0"

from .algebra import IDENTITY, PLUS_INFINITY, ExtReal, Mat2, diag, from_real, invariants
from .functionals import (F_SPEC, W_SPEC, WTILDE_SPEC, FunctionalSpec, burkholder, evaluate,
                          format_functional, gamma_p, p_of_K, parse_functional)
