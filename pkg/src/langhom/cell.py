"""Periodic cell problem and effective coefficients.

In one dimension the corrector equation
    -sigma Phi'' + Phi' p' = -p'   on [0, L], periodic,
with zero mean against the cell density mu = exp(-p/sigma)/C_mu, has a
closed-form solution built from cumulative integrals of exp(+p/sigma).
The effective diffusion correction K is computed three independent ways
and cross-checked; disagreement is an internal error, never silently
averaged away.
"""

from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from .errors import ConsistencyError
from .model import ModelSpec
from .quadrature import integrate, panel_rule

_TABLE_PANELS = 4096
_K_AGREEMENT = 1e-8


def _cumulative_exp_table(model: ModelSpec, n_panels: int = _TABLE_PANELS):
    """Cumulative antiderivative E(y) = int_0^y exp(p(z)/sigma) dz on [0, L].

    Panel increments use Gauss-Legendre; off-node queries use cubic
    Hermite interpolation with the analytic derivative exp(p/sigma).
    """
    L, sig = model.L, model.sigma
    x, w = panel_rule(0.0, L, n_panels)
    inc = (w * np.exp(np.asarray(model.p(x), dtype=float) / sig))
    inc = inc.reshape(n_panels, -1).sum(axis=1)
    values = np.concatenate([[0.0], np.cumsum(inc)])
    edges = np.linspace(0.0, L, n_panels + 1)
    deriv = np.exp(np.asarray(model.p(edges), dtype=float) / sig)
    hp = L / n_panels

    def table(y):
        y = np.asarray(y, dtype=float)
        k = np.clip((y / hp).astype(int), 0, n_panels - 1)
        t = y / hp - k
        h00 = (1.0 + 2.0 * t) * (1.0 - t) ** 2
        h10 = t * (1.0 - t) ** 2
        h01 = t * t * (3.0 - 2.0 * t)
        h11 = t * t * (t - 1.0)
        return (h00 * values[k] + h01 * values[k + 1]
                + hp * (h10 * deriv[k] + h11 * deriv[k + 1]))

    return table, float(values[-1])


@dataclass(frozen=True)
class EffectiveCoefficients:
    """Cell-problem output: corrector and homogenized coefficients.

    K is the effective drift/diffusion correction, Sigma = K * sigma the
    homogenized diffusion. Phi and dPhi are vectorized callables for the
    corrector and its derivative (L-periodic in their argument).
    k_routes holds the three independent evaluations of K.
    """

    K: float
    Sigma: float
    C_mu: float
    C_mu_hat: float
    C_Phi: float
    Phi: Callable
    dPhi: Callable
    k_routes: Tuple[float, float, float]

    @property
    def k_spread(self) -> float:
        return max(self.k_routes) - min(self.k_routes)


def mu(model: ModelSpec, y):
    """Normalized cell density exp(-p(y)/sigma) / C_mu. Accepts arrays."""
    sig = model.sigma
    c = integrate(lambda z: np.exp(-np.asarray(model.p(z), dtype=float) / sig),
                  0.0, model.L)
    return np.exp(-np.asarray(model.p(y), dtype=float) / sig) / c


def solve_cell(model: ModelSpec) -> EffectiveCoefficients:
    """Solve the cell problem and assemble the effective coefficients."""
    L, sig = model.L, model.sigma

    def w_minus(y):
        return np.exp(-np.asarray(model.p(y), dtype=float) / sig)

    def w_plus(y):
        return np.exp(np.asarray(model.p(y), dtype=float) / sig)

    C_mu = integrate(w_minus, 0.0, L)
    C_mu_hat = integrate(w_plus, 0.0, L)
    table, table_total = _cumulative_exp_table(model)
    if abs(table_total - C_mu_hat) > 1e-10 * C_mu_hat:
        raise ConsistencyError(
            f"cumulative table endpoint {table_total!r} disagrees with "
            f"adaptive integral {C_mu_hat!r}")

    slope = L / C_mu_hat

    # Zero-mean constant: C_Phi = int y mu dy - slope * int E(y) mu(y) dy.
    first = integrate(lambda y: y * w_minus(y), 0.0, L) / C_mu
    second = slope * integrate(lambda y: table(y) * w_minus(y), 0.0, L) / C_mu
    C_Phi = first - second

    def dPhi(y):
        return -1.0 + slope * w_plus(y)

    def Phi(y):
        y = np.asarray(y, dtype=float)
        yw = np.mod(y, L)
        return C_Phi - yw + slope * table(yw)

    k_closed = L * L / (C_mu_hat * C_mu)
    k_flux = integrate(lambda y: (1.0 + dPhi(y)) * w_minus(y), 0.0, L) / C_mu
    k_energy = integrate(lambda y: (1.0 + dPhi(y)) ** 2 * w_minus(y),
                         0.0, L) / C_mu
    routes = (k_closed, k_flux, k_energy)
    spread = max(routes) - min(routes)
    if spread > _K_AGREEMENT * max(1.0, k_closed):
        raise ConsistencyError(
            f"effective coefficient routes disagree: {routes} "
            f"(spread {spread:.3e})")

    # The mean vanishes by construction; allow an absolute floor so the
    # adaptive rule can accept roundoff-level cancellation.
    mean_phi = integrate(lambda y: Phi(y) * w_minus(y), 0.0, L,
                         atol=1e-13 * C_mu) / C_mu
    if abs(mean_phi) > 1e-8:
        raise ConsistencyError(
            f"corrector mean against cell density is {mean_phi:.3e}, "
            "should vanish by construction")

    return EffectiveCoefficients(
        K=k_closed,
        Sigma=k_closed * sig,
        C_mu=C_mu,
        C_mu_hat=C_mu_hat,
        C_Phi=C_Phi,
        Phi=Phi,
        dPhi=dPhi,
        k_routes=routes,
    )
