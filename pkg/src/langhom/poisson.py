"""Reaction-Poisson solves against the multiscale and limiting measures.

The weak problem is
    diffusion * int(u' v' w) + eta * int(u v w) = int(f v w)
with w the relevant invariant density. Natural boundary conditions, so
no rows are modified. The corrector expansion reconstructs the
oscillatory solution from the limiting one and the cell corrector.
"""

import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .cell import EffectiveCoefficients
from .errors import ParameterError
from .fem import (Grid, GridFunction, assemble, assemble_load,
                  solve_tridiagonal_spd, weighted_l2_of_callable,
                  weighted_norms)
from .model import DensityPair, ModelSpec, eval_rho


@dataclass(frozen=True)
class PoissonProblem:
    """Reaction coefficient eta > 0, source f, grid, and oscillation scale.

    epsilon is None for a purely homogenized solve.
    """

    eta: float
    f: Callable
    grid: Grid
    epsilon: Optional[float] = None

    def __post_init__(self):
        if not self.eta > 0:
            raise ParameterError(f"eta must be positive, got {self.eta}")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ParameterError(
                f"epsilon must be positive or None, got {self.epsilon}")


@dataclass(frozen=True)
class PoissonSolution:
    """Discrete solution with solver diagnostics.

    residual is the relative infinity-norm algebraic residual;
    stability_ratio is ||u||_{H1,w} / ||f||_{L2,w}, which theory bounds
    by 1/min(diffusion, eta).
    """

    u: GridFunction
    residual: float
    stability_ratio: float


def _solve_weighted(grid: Grid, weight: Callable, diffusion: float,
                    eta: float, f: Callable) -> PoissonSolution:
    stiff = assemble(grid, weight, "stiffness", 1.0)
    mass = assemble(grid, weight, "mass", 1.0)
    diag = diffusion * stiff.diag + eta * mass.diag
    off = diffusion * stiff.off + eta * mass.off
    rhs = assemble_load(grid, weight, f)
    u_vals = solve_tridiagonal_spd(diag, off, rhs)

    from . import backends
    res_vec = backends.tridiagonal_matvec(diag, off, u_vals) - rhs
    denom = float(np.max(np.abs(rhs)))
    residual = float(np.max(np.abs(res_vec))) / denom if denom > 0 else \
        float(np.max(np.abs(res_vec)))

    u = GridFunction(grid, u_vals)
    _, h1 = weighted_norms(u, mass, stiff)
    f_norm = weighted_l2_of_callable(grid, weight, f)
    ratio = h1 / f_norm if f_norm > 0 else 0.0
    return PoissonSolution(u=u, residual=residual, stability_ratio=ratio)


def solve_multiscale(problem: PoissonProblem, model: ModelSpec,
                     densities: Optional[DensityPair] = None) -> PoissonSolution:
    """Solve against the multiscale density at problem.epsilon."""
    if problem.epsilon is None:
        raise ParameterError("multiscale solve needs a positive epsilon")
    eps = problem.epsilon
    if problem.grid.h > eps * eps * (1.0 + 1e-12):
        warnings.warn(
            f"mesh size {problem.grid.h:.3e} exceeds epsilon^2 = "
            f"{eps * eps:.3e}; the oscillatory density may be under-resolved",
            stacklevel=2)
    if densities is None:
        densities = eval_rho(model, eps, problem.grid.radius)
    return _solve_weighted(problem.grid, densities.rho_ms, model.sigma,
                           problem.eta, problem.f)


def solve_homogenized(problem: PoissonProblem, model: ModelSpec,
                      coeffs: EffectiveCoefficients,
                      densities: Optional[DensityPair] = None) -> PoissonSolution:
    """Solve against the limiting density with the homogenized diffusion."""
    if densities is None:
        weight = _hom_density(model, problem.grid)
    else:
        weight = densities.rho_hom
    return _solve_weighted(problem.grid, weight, coeffs.Sigma,
                           problem.eta, problem.f)


def _hom_density(model: ModelSpec, grid: Grid) -> Callable:
    """Normalized limiting density over the grid's domain (no epsilon needed)."""
    from .quadrature import integrate
    R = grid.radius
    sig = model.sigma

    def unnorm(x):
        return np.exp(-np.asarray(model.V(np.asarray(x, dtype=float)),
                                  dtype=float) / sig)

    c = integrate(unnorm, -R, R)
    return lambda x: unnorm(x) / c


def corrector_expansion(u0: GridFunction, coeffs: EffectiveCoefficients,
                        epsilon: float) -> GridFunction:
    """First-order two-scale reconstruction u0 + eps * u0' * Phi(x/eps).

    The nodal derivative of u0 is the average of adjacent element
    slopes (one-sided at the ends). epsilon = 0 returns a copy of u0.
    """
    if epsilon < 0:
        raise ParameterError(f"epsilon must be nonnegative, got {epsilon}")
    grid = u0.grid
    if epsilon == 0:
        return GridFunction(grid, u0.values.copy())
    slopes = np.diff(u0.values) / grid.h
    deriv = np.empty(grid.n_nodes)
    deriv[0] = slopes[0]
    deriv[-1] = slopes[-1]
    deriv[1:-1] = 0.5 * (slopes[:-1] + slopes[1:])
    values = u0.values + epsilon * deriv * np.asarray(
        coeffs.Phi(grid.nodes / epsilon), dtype=float)
    return GridFunction(grid, values)
