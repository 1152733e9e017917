"""Weighted-Sobolev finite elements for multiscale Langevin generators.

Solves the reaction-Poisson problem and the low-lying spectrum of the
generator of overdamped Langevin dynamics with a rapidly oscillating
potential, and compares them against the homogenized limit built from
the periodic cell problem.
"""

__version__ = "0.1.0"

from .backends import backend_name
from .cell import EffectiveCoefficients, mu, solve_cell
from .eigen import (EigenPair, SandwichReport, SpectrumComparison,
                    compare_spectra, hermite_reference, minimax_sandwich_check,
                    rayleigh_quotient, solve_spectrum)
from .errors import (ConsistencyError, ConvergenceError, DomainError,
                     LanghomError, NotSPDError, ParameterError,
                     QuadratureError, ShapeError, TruncationError, WeightError)
from .fem import (Grid, GridFunction, WeightedOperator, assemble,
                  assemble_load, build_grid, interpolate, operator_sum,
                  solve_tridiagonal_spd, weighted_l2_of_callable,
                  weighted_norms)
from .model import (AssumptionReport, DensityPair, ModelSpec,
                    check_assumptions, eval_rho, make_ou_cosine_model,
                    max_abs_p)
from .poisson import (PoissonProblem, PoissonSolution, corrector_expansion,
                      solve_homogenized, solve_multiscale)
from .sweep import (ConvergenceRecord, SweepConfig, SweepSummary, emit_csv,
                    emit_plot_script, emit_summary_csv, evaluate_sweep,
                    parse_csv, run_sweep)

__all__ = [
    "AssumptionReport", "ConsistencyError", "ConvergenceError",
    "ConvergenceRecord", "DensityPair", "DomainError",
    "EffectiveCoefficients", "EigenPair", "Grid", "GridFunction",
    "LanghomError", "ModelSpec", "NotSPDError", "ParameterError",
    "PoissonProblem", "PoissonSolution", "QuadratureError", "SandwichReport",
    "ShapeError", "SpectrumComparison", "SweepConfig", "SweepSummary",
    "TruncationError", "WeightError", "WeightedOperator", "assemble",
    "assemble_load", "backend_name", "build_grid", "check_assumptions",
    "compare_spectra", "corrector_expansion", "emit_csv", "emit_plot_script",
    "emit_summary_csv", "eval_rho", "evaluate_sweep", "hermite_reference",
    "interpolate", "make_ou_cosine_model", "max_abs_p",
    "minimax_sandwich_check", "mu", "operator_sum", "parse_csv",
    "rayleigh_quotient", "run_sweep", "solve_cell", "solve_homogenized",
    "solve_multiscale", "solve_spectrum", "solve_tridiagonal_spd",
    "weighted_l2_of_callable", "weighted_norms",
]
