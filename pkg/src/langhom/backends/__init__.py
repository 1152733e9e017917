"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the
NumPy/pure-Python reference implementation is used. Set the environment
variable LANGHOM_BACKEND to "python" or "cython" before import to force
a choice (forcing "cython" fails loudly if the extension is missing).
"""

import os

from ..errors import ParameterError
from . import _fallback

_requested = os.environ.get("LANGHOM_BACKEND", "auto").strip().lower() or "auto"

if _requested == "auto":
    try:
        from . import _speedups as _impl
    except ImportError:
        _impl = _fallback
elif _requested in ("python", "fallback"):
    _impl = _fallback
elif _requested == "cython":
    from . import _speedups as _impl
else:
    raise ParameterError(
        f"LANGHOM_BACKEND={_requested!r} not recognized; "
        "use 'auto', 'python', or 'cython'")

factor_spd_tridiagonal = _impl.factor_spd_tridiagonal
solve_factored = _impl.solve_factored
tridiagonal_matvec = _impl.tridiagonal_matvec


def backend_name() -> str:
    """Name of the active kernel backend ('cython' or 'python')."""
    return "python" if _impl is _fallback else "cython"
