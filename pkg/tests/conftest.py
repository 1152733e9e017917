"""Shared fixtures: the cosine model, its cell coefficients, and one
full epsilon sweep (session-scoped; several tests read the same run)."""

import time
from types import SimpleNamespace

import numpy as np
import pytest

import langhom as lh

SWEEP_EPSILONS = (0.4, 0.2, 0.1, 0.05, 0.025)
SWEEP_RADIUS = 5.0
N_PAIRS = 5


@pytest.fixture(scope="session")
def ou_model():
    return lh.make_ou_cosine_model(1.0)


@pytest.fixture(scope="session")
def coeffs(ou_model):
    return lh.solve_cell(ou_model)


def _rhs_identity(x):
    return np.asarray(x, dtype=float)


@pytest.fixture(scope="session")
def sweep_data(ou_model, coeffs):
    """Full convergence sweep with everything kept: solutions, spectra,
    operators in both weights, comparisons, sandwich reports."""
    t0 = time.perf_counter()
    steps = []
    for eps in SWEEP_EPSILONS:
        grid = lh.build_grid(SWEEP_RADIUS, eps * eps)
        dens = lh.eval_rho(ou_model, eps, SWEEP_RADIUS)
        problem = lh.PoissonProblem(eta=1.0, f=_rhs_identity, grid=grid,
                                    epsilon=eps)
        sol_ms = lh.solve_multiscale(problem, ou_model, dens)
        sol_hom = lh.solve_homogenized(problem, ou_model, coeffs, dens)
        corr = lh.corrector_expansion(sol_hom.u, coeffs, eps)

        mass0 = lh.assemble(grid, dens.rho_hom, "mass", 1.0)
        stiff0 = lh.assemble(grid, dens.rho_hom, "stiffness", 1.0)
        mass_ms = lh.assemble(grid, dens.rho_ms, "mass", 1.0)
        stiff_ms = lh.assemble(grid, dens.rho_ms, "stiffness", 1.0)

        du = lh.GridFunction(grid, sol_ms.u.values - sol_hom.u.values)
        p_l2, p_h1 = lh.weighted_norms(du, mass0, stiff0)
        dc = lh.GridFunction(grid, sol_ms.u.values - corr.values)
        _, c_h1 = lh.weighted_norms(dc, mass0, stiff0)

        ms_pairs = lh.solve_spectrum(dens.rho_ms, ou_model.sigma, grid,
                                     N_PAIRS)
        hom_pairs = lh.solve_spectrum(dens.rho_hom, coeffs.Sigma, grid,
                                      N_PAIRS)
        comparison = lh.compare_spectra(ms_pairs, hom_pairs, mass0, stiff0)
        sandwich = lh.minimax_sandwich_check(ms_pairs, hom_pairs, ou_model,
                                             coeffs)
        steps.append(SimpleNamespace(
            epsilon=eps, grid=grid, densities=dens, sol_ms=sol_ms,
            sol_hom=sol_hom, corrector=corr, mass0=mass0, stiff0=stiff0,
            mass_ms=mass_ms, stiff_ms=stiff_ms, poisson_err_l2=p_l2,
            poisson_err_h1=p_h1, corrector_err_h1=c_h1, ms_pairs=ms_pairs,
            hom_pairs=hom_pairs, comparison=comparison, sandwich=sandwich))
    elapsed = time.perf_counter() - t0
    return SimpleNamespace(steps=steps, elapsed=elapsed,
                           epsilons=SWEEP_EPSILONS, radius=SWEEP_RADIUS)
