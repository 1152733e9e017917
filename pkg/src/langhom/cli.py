"""Command-line front end.

Subcommands:
  cell     effective coefficients of the periodic cell problem
  poisson  one epsilon: multiscale vs limiting solution CSV
  eigen    one epsilon: spectrum comparison CSV
  sweep    full epsilon sweep: records CSV, summary CSV, plot script

Options may come from a flat key=value config file (--config, with #
comments); command-line flags override the file. The output directory
resolves flag > LANGHOM_OUT_DIR > config > default. Exit codes: 0 on
success, 1 when a theory-violation flag is raised (failed sandwich
bound, failed sweep assertion, solver non-convergence, inconsistent
cross-checks), 2 on parameter or I/O errors.
"""

import argparse
import os
import sys
from typing import Dict, Optional, Sequence

from .cell import solve_cell
from .eigen import compare_spectra, minimax_sandwich_check, solve_spectrum
from .errors import (ConsistencyError, ConvergenceError, LanghomError,
                     NotSPDError, ParameterError, QuadratureError)
from .fem import GridFunction, assemble, build_grid, weighted_norms
from .model import eval_rho, make_ou_cosine_model
from .poisson import (PoissonProblem, corrector_expansion, solve_homogenized,
                      solve_multiscale)
from .sweep import (RHS_REGISTRY, SweepConfig, _write_solution_csv,
                    emit_plot_script, emit_summary_csv, evaluate_sweep,
                    run_sweep)

ENV_OUT_DIR = "LANGHOM_OUT_DIR"

# Raised flags that contradict the underlying theory or its discrete
# counterparts map to exit code 1; bad input maps to 2.
_THEORY_ERRORS = (ConvergenceError, ConsistencyError, NotSPDError,
                  QuadratureError)


def read_config(path: str) -> Dict[str, str]:
    """Parse a flat key=value file; # starts a comment, blanks ignored."""
    values: Dict[str, str] = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ParameterError(
                        f"{path}:{lineno}: expected key=value, got {raw!r}")
                key, _, value = line.partition("=")
                values[key.strip()] = value.strip()
    except OSError as exc:
        raise ParameterError(f"cannot read config {path}: {exc}") from exc
    return values


_FLOAT_KEYS = ("epsilon", "radius", "h", "sigma", "eta")
_INT_KEYS = ("n_pairs", "workers")
_STR_KEYS = ("rhs", "out_dir", "epsilons")
_KNOWN_KEYS = set(_FLOAT_KEYS) | set(_INT_KEYS) | set(_STR_KEYS)


def _merge_options(args: argparse.Namespace) -> Dict[str, object]:
    """Config-file values overridden by explicit flags, types coerced."""
    merged: Dict[str, object] = {}
    if args.config is not None:
        raw = read_config(args.config)
        unknown = set(raw) - _KNOWN_KEYS
        if unknown:
            raise ParameterError(
                f"unknown config keys: {sorted(unknown)}; "
                f"known: {sorted(_KNOWN_KEYS)}")
        for key, text in raw.items():
            try:
                if key in _FLOAT_KEYS:
                    merged[key] = float(text)
                elif key in _INT_KEYS:
                    merged[key] = int(text)
                else:
                    merged[key] = text
            except ValueError as exc:
                raise ParameterError(
                    f"config key {key}={text!r}: {exc}") from exc
    for key in _KNOWN_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    return merged


def _resolve_out_dir(args: argparse.Namespace,
                     merged: Dict[str, object]) -> str:
    if args.out_dir is not None:
        return args.out_dir
    env = os.environ.get(ENV_OUT_DIR)
    if env:
        return env
    cfg = merged.get("out_dir")
    if cfg:
        return str(cfg)
    return "."


def _parse_epsilons(text: str) -> tuple:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ParameterError(f"bad epsilons list {text!r}: {exc}") from exc


def _cmd_cell(args: argparse.Namespace) -> int:
    merged = _merge_options(args)
    sigma = float(merged.get("sigma", 1.0))
    model = make_ou_cosine_model(sigma)
    coeffs = solve_cell(model)
    print(f"K        = {coeffs.K:.12g}")
    print(f"Sigma    = {coeffs.Sigma:.12g}")
    print(f"C_mu     = {coeffs.C_mu:.12g}")
    print(f"C_mu_hat = {coeffs.C_mu_hat:.12g}")
    print(f"C_Phi    = {coeffs.C_Phi:.12g}")
    print(f"k_route_spread = {coeffs.k_spread:.3e}")
    return 0


def _cmd_poisson(args: argparse.Namespace) -> int:
    merged = _merge_options(args)
    epsilon = float(merged.get("epsilon", 0.1))
    radius = float(merged.get("radius", 5.0))
    sigma = float(merged.get("sigma", 1.0))
    eta = float(merged.get("eta", 1.0))
    h = float(merged.get("h", epsilon * epsilon))
    rhs_name = str(merged.get("rhs", "x"))
    if rhs_name not in RHS_REGISTRY:
        raise ParameterError(
            f"unknown rhs {rhs_name!r}; choices: {sorted(RHS_REGISTRY)}")
    out_dir = _resolve_out_dir(args, merged)
    os.makedirs(out_dir, exist_ok=True)

    model = make_ou_cosine_model(sigma)
    coeffs = solve_cell(model)
    grid = build_grid(radius, h)
    densities = eval_rho(model, epsilon, radius)
    problem = PoissonProblem(eta=eta, f=RHS_REGISTRY[rhs_name], grid=grid,
                             epsilon=epsilon)
    sol_ms = solve_multiscale(problem, model, densities)
    sol_hom = solve_homogenized(problem, model, coeffs, densities)
    corr = corrector_expansion(sol_hom.u, coeffs, epsilon)

    path = os.path.join(out_dir, "poisson.csv")
    _write_solution_csv(path, grid, sol_ms.u, sol_hom.u, corr)

    mass0 = assemble(grid, densities.rho_hom, "mass", 1.0)
    stiff0 = assemble(grid, densities.rho_hom, "stiffness", 1.0)
    diff = GridFunction(grid, sol_ms.u.values - sol_hom.u.values)
    err_l2, err_h1 = weighted_norms(diff, mass0, stiff0)
    print(f"wrote {path}")
    print(f"epsilon={epsilon:g} h={grid.h:.6g} nodes={grid.n_nodes}")
    print(f"err_l2={err_l2:.6e} err_h1={err_h1:.6e}")
    print(f"residual_ms={sol_ms.residual:.3e} "
          f"residual_hom={sol_hom.residual:.3e}")
    return 0


def _cmd_eigen(args: argparse.Namespace) -> int:
    merged = _merge_options(args)
    epsilon = float(merged.get("epsilon", 0.1))
    radius = float(merged.get("radius", 5.0))
    sigma = float(merged.get("sigma", 1.0))
    n_pairs = int(merged.get("n_pairs", 5))
    h = float(merged.get("h", epsilon * epsilon))
    out_dir = _resolve_out_dir(args, merged)
    os.makedirs(out_dir, exist_ok=True)

    model = make_ou_cosine_model(sigma)
    coeffs = solve_cell(model)
    grid = build_grid(radius, h)
    densities = eval_rho(model, epsilon, radius)
    ms = solve_spectrum(densities.rho_ms, model.sigma, grid, n_pairs)
    hom = solve_spectrum(densities.rho_hom, coeffs.Sigma, grid, n_pairs)
    mass0 = assemble(grid, densities.rho_hom, "mass", 1.0)
    stiff0 = assemble(grid, densities.rho_hom, "stiffness", 1.0)
    comparison = compare_spectra(ms, hom, mass0, stiff0)

    path = os.path.join(out_dir, "eigen.csv")
    with open(path, "w") as fh:
        fh.write("n,lambda_eps,lambda_hom,gap,err_l2,err_h1,aligned_sign\n")
        for row in comparison.rows:
            fh.write(f"{row.n},{row.lambda_ms:.12g},{row.lambda_hom:.12g},"
                     f"{row.gap:.12g},{row.err_l2:.12g},{row.err_h1:.12g},"
                     f"{row.aligned_sign}\n")
    print(f"wrote {path}")

    sandwich = minimax_sandwich_check(ms, hom, model, coeffs)
    print(f"sandwich bounds: {'ok' if sandwich.ok else 'VIOLATED'} "
          f"(C_low={sandwich.C_low:.6g}, C_up={sandwich.C_up:.6g})")
    if not sandwich.ok:
        for row in sandwich.rows:
            if not row.ok:
                print(f"  n={row.n}: lambda={row.lambda_ms:.6g} outside "
                      f"[{row.lower:.6g}, {row.upper:.6g}]")
        return 1
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    merged = _merge_options(args)
    epsilons = merged.get("epsilons")
    if isinstance(epsilons, str):
        epsilons = _parse_epsilons(epsilons)
    out_dir = _resolve_out_dir(args, merged)

    kwargs = dict(
        radius=float(merged.get("radius", 5.0)),
        sigma=float(merged.get("sigma", 1.0)),
        eta=float(merged.get("eta", 1.0)),
        n_pairs=int(merged.get("n_pairs", 5)),
        rhs=str(merged.get("rhs", "x")),
        out_dir=out_dir,
    )
    if epsilons is not None:
        kwargs["epsilons"] = epsilons
    if "h" in merged:
        kwargs["h_override"] = float(merged["h"])
    config = SweepConfig(**kwargs)

    workers = int(merged.get("workers", 1))
    records = run_sweep(config, workers=workers)
    summary = evaluate_sweep(records)
    emit_summary_csv(summary, os.path.join(out_dir, "summary.csv"))
    emit_plot_script(records, os.path.join(out_dir, "plot_sweep.py"))

    for rec in records:
        if rec.status == "ok":
            print(f"epsilon={rec.epsilon:<8g} poisson_l2="
                  f"{rec.poisson_err_l2:.6e} corrector_h1="
                  f"{rec.corrector_err_h1:.6e}")
        else:
            print(f"epsilon={rec.epsilon:<8g} FAILED ({rec.status})")
    print(f"wrote {os.path.join(out_dir, 'sweep.csv')}, summary.csv, "
          f"plot_sweep.py")
    print(f"summary: {'all ok' if summary.all_ok else 'ASSERTION FAILED'}")
    return 0 if summary.all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="langhom",
        description="Multiscale Langevin generators: cell problem, "
                    "weighted Poisson solves, spectra, convergence sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="key=value options file")
        p.add_argument("--sigma", type=float, help="temperature (default 1)")
        p.add_argument("--out-dir", dest="out_dir",
                       help=f"output directory (overrides ${ENV_OUT_DIR})")

    p_cell = sub.add_parser("cell", help="print effective coefficients")
    common(p_cell)
    p_cell.set_defaults(func=_cmd_cell)

    p_poisson = sub.add_parser("poisson",
                               help="solve one epsilon and export the "
                                    "solution overlay CSV")
    common(p_poisson)
    p_poisson.add_argument("--epsilon", type=float, help="scale (default 0.1)")
    p_poisson.add_argument("--radius", type=float, help="half-width "
                                                        "(default 5)")
    p_poisson.add_argument("--h", type=float, help="mesh size (default eps^2)")
    p_poisson.add_argument("--eta", type=float, help="reaction (default 1)")
    p_poisson.add_argument("--rhs", choices=sorted(RHS_REGISTRY),
                           help="source term (default x)")
    p_poisson.set_defaults(func=_cmd_poisson)

    p_eigen = sub.add_parser("eigen",
                             help="compare spectra at one epsilon")
    common(p_eigen)
    p_eigen.add_argument("--epsilon", type=float, help="scale (default 0.1)")
    p_eigen.add_argument("--radius", type=float, help="half-width (default 5)")
    p_eigen.add_argument("--h", type=float, help="mesh size (default eps^2)")
    p_eigen.add_argument("--n-pairs", dest="n_pairs", type=int,
                         help="number of eigenpairs (default 5)")
    p_eigen.set_defaults(func=_cmd_eigen)

    p_sweep = sub.add_parser("sweep", help="run the full epsilon sweep")
    common(p_sweep)
    p_sweep.add_argument("--epsilons",
                         help="comma-separated, strictly decreasing "
                              "(default 0.4,0.2,0.1,0.05,0.025)")
    p_sweep.add_argument("--radius", type=float, help="half-width (default 5)")
    p_sweep.add_argument("--h", type=float,
                         help="fixed mesh size for every epsilon "
                              "(default eps^2 per step)")
    p_sweep.add_argument("--eta", type=float, help="reaction (default 1)")
    p_sweep.add_argument("--rhs", choices=sorted(RHS_REGISTRY),
                         help="source term (default x)")
    p_sweep.add_argument("--n-pairs", dest="n_pairs", type=int,
                         help="number of eigenpairs (default 5)")
    p_sweep.add_argument("--workers", type=int,
                         help="concurrent epsilon steps (default 1)")
    p_sweep.set_defaults(func=_cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _THEORY_ERRORS as exc:
        print(f"theory violation: {exc}", file=sys.stderr)
        return 1
    except LanghomError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
