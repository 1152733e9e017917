"""Composite Gauss-Legendre quadrature on an interval.

Panels are uniform; node count per panel is fixed and panel count is
doubled until two successive composite values agree to a relative
tolerance. Integrands must accept NumPy arrays.
"""

import numpy as np

from .errors import QuadratureError

DEFAULT_ORDER = 6


def panel_rule(a: float, b: float, n_panels: int, order: int = DEFAULT_ORDER):
    """Nodes and weights of a composite Gauss-Legendre rule on [a, b].

    Returns flat arrays of length n_panels * order. Weights sum to b - a.
    """
    if not b > a:
        raise QuadratureError(f"empty interval [{a}, {b}]")
    if n_panels < 1 or order < 1:
        raise QuadratureError("panel count and order must be positive")
    xi, wi = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    x = (mid[:, None] + half[:, None] * xi[None, :]).ravel()
    w = (half[:, None] * wi[None, :]).ravel()
    return x, w


def integrate(f, a: float, b: float, order: int = DEFAULT_ORDER,
              rtol: float = 1e-12, atol: float = 0.0, initial_panels: int = 4,
              max_doublings: int = 16) -> float:
    """Integrate f over [a, b], doubling panels until stable.

    Convergence means |I_new - I_old| <= rtol * scale + atol. Pass a
    small atol when the integral may vanish by cancellation; a pure
    relative test can never be met by roundoff noise. Raises
    QuadratureError if the doubling budget is exhausted.
    """
    n = initial_panels
    x, w = panel_rule(a, b, n, order)
    prev = float(w @ np.asarray(f(x), dtype=float))
    delta = np.inf
    for _ in range(max_doublings):
        n *= 2
        x, w = panel_rule(a, b, n, order)
        cur = float(w @ np.asarray(f(x), dtype=float))
        scale = max(abs(cur), abs(prev))
        delta = abs(cur - prev)
        if delta <= rtol * scale + atol + 1e-300:
            return cur
        prev = cur
    raise QuadratureError(
        f"no convergence after {max_doublings} doublings (last delta "
        f"{delta:.3e} on {n} panels)")
