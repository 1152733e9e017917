"""Problem data: confining potential, periodic perturbation, densities.

A model bundles the slow potential V, the fast periodic perturbation p
(period L), and the noise strength sigma. All callables must be
vectorized over NumPy arrays. Gibbs densities are truncated to a finite
interval [-R, R] and renormalized there; the truncation radius must be
large enough that the discarded tail is negligible.
"""

from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np

from .errors import ParameterError, TruncationError
from .quadrature import integrate


@dataclass(frozen=True)
class ModelSpec:
    """Coefficients of the dynamics dX = -grad(V(X) + p(X/eps)) dt + sqrt(2 sigma) dW.

    V, dV, ddV: potential and derivatives; p, dp: periodic perturbation
    and derivative (period L). sigma is the temperature, L the period.
    """

    V: Callable
    dV: Callable
    ddV: Callable
    p: Callable
    dp: Callable
    sigma: float
    L: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ParameterError(f"sigma must be positive, got {self.sigma}")
        if not self.L > 0:
            raise ParameterError(f"period L must be positive, got {self.L}")


def make_ou_cosine_model(sigma: float = 1.0) -> ModelSpec:
    """Quadratic potential with cosine perturbation: V = x^2/2, p = cos, L = 2 pi."""
    return ModelSpec(
        V=lambda x: 0.5 * np.asarray(x) ** 2,
        dV=lambda x: np.asarray(x, dtype=float),
        ddV=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        p=np.cos,
        dp=lambda y: -np.sin(y),
        sigma=sigma,
        L=2.0 * np.pi,
    )


def max_abs_p(model: ModelSpec, n_coarse: int = 10000) -> float:
    """Maximum of |p| over one period, by dense sampling plus local refinement."""
    ys = np.linspace(0.0, model.L, n_coarse, endpoint=False)
    vals = np.abs(np.asarray(model.p(ys), dtype=float))
    k = int(np.argmax(vals))
    best = float(vals[k])
    lo, hi = ys[k] - model.L / n_coarse, ys[k] + model.L / n_coarse
    for _ in range(4):
        zs = np.linspace(lo, hi, 201)
        vz = np.abs(np.asarray(model.p(zs), dtype=float))
        j = int(np.argmax(vz))
        best = max(best, float(vz[j]))
        step = (hi - lo) / 200.0
        lo, hi = zs[j] - step, zs[j] + step
    return best


@dataclass(frozen=True)
class DensityPair:
    """Truncated Gibbs densities of the multiscale and limiting dynamics.

    rho_ms(x) = exp(-(V(x) + p(x/eps))/sigma) / C_rho_ms and
    rho_hom(x) = exp(-V(x)/sigma) / C_rho_hom, both normalized over
    [-domain_radius, domain_radius]. Callables accept arrays.
    """

    rho_ms: Callable
    rho_hom: Callable
    C_rho_ms: float
    C_rho_hom: float
    epsilon: float
    domain_radius: float


def eval_rho(model: ModelSpec, epsilon: float, domain_radius: float,
             tail_tol: float = 1e-5) -> DensityPair:
    """Normalize both Gibbs densities over [-R, R] and package them.

    Raises TruncationError when either unnormalized density at the
    endpoints exceeds tail_tol relative to its in-domain maximum, i.e.
    when the domain visibly clips the measure.
    """
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon}")
    R = float(domain_radius)
    if not R > 0:
        raise ParameterError(f"domain radius must be positive, got {R}")
    sig = model.sigma

    def ms_unnorm(x):
        x = np.asarray(x, dtype=float)
        return np.exp(-(model.V(x) + model.p(x / epsilon)) / sig)

    def hom_unnorm(x):
        x = np.asarray(x, dtype=float)
        return np.exp(-model.V(x) / sig)

    xs = np.linspace(-R, R, 8193)
    for name, fn in (("multiscale", ms_unnorm), ("homogenized", hom_unnorm)):
        vals = fn(xs)
        peak = float(np.max(vals))
        edge = max(float(vals[0]), float(vals[-1]))
        if edge > tail_tol * peak:
            raise TruncationError(
                f"{name} density at |x| = {R} is {edge / peak:.3e} of its "
                f"maximum (limit {tail_tol:.1e}); widen the domain")

    # Enough initial panels to resolve the oscillation period L*eps.
    n0 = int(min(4096, max(8, np.ceil(2.0 * R / (model.L * epsilon)))))
    C_ms = integrate(ms_unnorm, -R, R, initial_panels=n0)
    C_hom = integrate(hom_unnorm, -R, R)

    return DensityPair(
        rho_ms=lambda x: ms_unnorm(x) / C_ms,
        rho_hom=lambda x: hom_unnorm(x) / C_hom,
        C_rho_ms=C_ms,
        C_rho_hom=C_hom,
        epsilon=float(epsilon),
        domain_radius=R,
    )


@dataclass
class AssumptionReport:
    """Outcome of the qualitative hypothesis checks on a model.

    Records the fitted dissipativity pair (a, b) for
    -dV(x) * x <= a - b x^2 and whether the confinement proxies grow on
    the outer 20 percent of the sampled range. Violations are
    diagnostic strings; nothing here raises.
    """

    dissipativity_ok: bool
    a: float
    b: float
    gradient_growth_ok: bool
    confinement_growth_ok: bool
    violations: List[str] = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        return (self.dissipativity_ok and self.gradient_growth_ok
                and self.confinement_growth_ok)


def check_assumptions(model: ModelSpec, sample_radius: float = 10.0,
                      n_samples: int = 801) -> AssumptionReport:
    """Fit and test the dissipativity/confinement hypotheses on a sample grid.

    Least squares fits -dV(x) x ~ a - b x^2, then lifts a so the bound
    holds at every sample; b <= 0 means no dissipativity. Growth checks
    ask |dV| and dV^2/4 - ddV/2 to be nondecreasing outward on the outer
    20 percent of the grid.
    """
    if not sample_radius > 0:
        raise ParameterError("sample radius must be positive")
    xs = np.linspace(-sample_radius, sample_radius, n_samples)
    dv = np.asarray(model.dV(xs), dtype=float)
    g = -dv * xs
    design = np.column_stack([np.ones_like(xs), -xs ** 2])
    (a_fit, b_fit), *_ = np.linalg.lstsq(design, g, rcond=None)
    a = float(max(a_fit, np.max(g + b_fit * xs ** 2)))
    b = float(b_fit)

    violations = []
    dissipativity_ok = b > 0
    if not dissipativity_ok:
        violations.append(
            f"dissipativity fit gives b = {b:.3e} <= 0; -dV(x) x does not "
            f"decay quadratically on [-{sample_radius}, {sample_radius}]")

    def grows_outward(values):
        m = n_samples // 5
        right = values[-m:]
        left = values[:m][::-1]
        slack = 1e-12 * max(1.0, float(np.max(np.abs(values))))
        ok_r = bool(np.all(np.diff(right) >= -slack))
        ok_l = bool(np.all(np.diff(left) >= -slack))
        return ok_r and ok_l

    gradient_growth_ok = grows_outward(np.abs(dv))
    if not gradient_growth_ok:
        violations.append("|dV| is not growing on the outer 20% of the range")

    ddv = np.asarray(model.ddV(xs), dtype=float)
    confinement = 0.25 * dv ** 2 - 0.5 * ddv
    confinement_growth_ok = grows_outward(confinement)
    if not confinement_growth_ok:
        violations.append(
            "dV^2/4 - ddV/2 is not growing on the outer 20% of the range")

    return AssumptionReport(dissipativity_ok, a, b, gradient_growth_ok,
                            confinement_growth_ok, violations)
