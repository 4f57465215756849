"""Backend selection for the triangle assembly kernel.

The compiled extension is used when it imports; set BURKQC_PURE_PYTHON=1 to
force the numpy fallback.
"""
import os

from . import _kernels_py
from ._kernels_py import (BURKHOLDER, CODE_NAMES, CONST, DET, DIRICHLET, ECEXTRA, F, NORMPOW, W,
                          WTILDE)

_compiled = None
if os.environ.get("BURKQC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def get_backend(name: str = None):
    """Return the energy_grad implementation by name ('cython', 'python') or the default."""
    name = name or BACKEND
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernel not available")
        return _compiled.energy_grad
    if name == "python":
        return _kernels_py.energy_grad
    raise ValueError(f"unknown backend {name!r}")


def compiled_available() -> bool:
    return _compiled is not None
