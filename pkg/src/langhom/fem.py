"""Piecewise-linear finite elements on a uniform interval grid.

Operators are weighted mass and stiffness matrices over [-R, R] with a
strictly positive weight (a probability density in practice). Element
integrals use Gauss-Legendre quadrature; no boundary rows are modified,
so the discrete problems inherit natural (zero weighted flux) boundary
behaviour. Matrices are stored as (diag, off) pairs since everything
here is symmetric tridiagonal.
"""

import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from . import backends
from .errors import ParameterError, ShapeError, WeightError
from .quadrature import DEFAULT_ORDER

_REF_NODES, _REF_WEIGHTS = np.polynomial.legendre.leggauss(DEFAULT_ORDER)
_REF_NODES = 0.5 * (_REF_NODES + 1.0)     # map to [0, 1]
_REF_WEIGHTS = 0.5 * _REF_WEIGHTS          # weights now sum to 1


@dataclass(frozen=True)
class Grid:
    """Uniform grid on [-radius, radius] with n_elems elements."""

    radius: float
    n_elems: int
    h: float
    nodes: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.n_elems + 1


def build_grid(radius: float, h_target: float) -> Grid:
    """Uniform grid with mesh size <= h_target (snapped to divide 2 R)."""
    if not radius > 0:
        raise ParameterError(f"radius must be positive, got {radius}")
    if not 0 < h_target < 2 * radius:
        raise ParameterError(
            f"target mesh size {h_target} must lie in (0, {2 * radius})")
    n = int(math.ceil(2.0 * radius / h_target - 1e-12))
    h = 2.0 * radius / n
    nodes = np.linspace(-radius, radius, n + 1)
    return Grid(radius=float(radius), n_elems=n, h=h, nodes=nodes)


@dataclass(frozen=True)
class GridFunction:
    """Nodal values of a piecewise-linear function on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.n_nodes,):
            raise ShapeError(
                f"value array has shape {v.shape}, grid needs "
                f"({self.grid.n_nodes},)")
        object.__setattr__(self, "values", v)


def interpolate(grid: Grid, f: Callable) -> GridFunction:
    """Nodal interpolant of a callable."""
    return GridFunction(grid, np.asarray(f(grid.nodes), dtype=float))


@dataclass(frozen=True)
class WeightedOperator:
    """Weighted P1 mass or stiffness matrix, symmetric tridiagonal.

    Entries include the scalar coefficient. kind is "mass" or
    "stiffness"; diag has n_nodes entries, off one fewer.
    """

    grid: Grid
    kind: str
    coefficient: float
    diag: np.ndarray
    off: np.ndarray

    def matvec(self, x):
        return backends.tridiagonal_matvec(self.diag, self.off, x)


def _element_weight_values(grid: Grid, weight: Callable) -> np.ndarray:
    x = (grid.nodes[:-1, None] + grid.h * _REF_NODES[None, :]).ravel()
    w = np.asarray(weight(x), dtype=float)
    if w.shape != x.shape:
        raise ShapeError("weight callable must return one value per input")
    if not np.all(w > 0.0):
        raise WeightError("weight must be strictly positive on the domain")
    return w.reshape(grid.n_elems, -1)


def assemble(grid: Grid, weight: Callable, kind: str,
             coefficient: float = 1.0) -> WeightedOperator:
    """Assemble the weighted mass or stiffness matrix, scaled by coefficient."""
    if kind not in ("mass", "stiffness"):
        raise ParameterError(f"kind must be 'mass' or 'stiffness', got {kind!r}")
    wq = _element_weight_values(grid, weight)
    h = grid.h
    n = grid.n_elems
    diag = np.zeros(n + 1)
    if kind == "mass":
        t, w = _REF_NODES, _REF_WEIGHTS
        m11 = h * wq @ (w * (1.0 - t) ** 2)
        m22 = h * wq @ (w * t ** 2)
        off = h * wq @ (w * t * (1.0 - t))
        diag[:-1] += m11
        diag[1:] += m22
    else:
        s = (wq @ _REF_WEIGHTS) / h
        diag[:-1] += s
        diag[1:] += s
        off = -s
    return WeightedOperator(grid=grid, kind=kind, coefficient=float(coefficient),
                            diag=coefficient * diag, off=coefficient * off)


def assemble_load(grid: Grid, weight: Callable, f: Callable) -> np.ndarray:
    """Weighted load vector F_i = int f(x) phi_i(x) weight(x) dx."""
    x = (grid.nodes[:-1, None] + grid.h * _REF_NODES[None, :]).ravel()
    w = np.asarray(weight(x), dtype=float)
    if not np.all(w > 0.0):
        raise WeightError("weight must be strictly positive on the domain")
    fw = (np.asarray(f(x), dtype=float) * w).reshape(grid.n_elems, -1)
    t, qw = _REF_NODES, _REF_WEIGHTS
    f1 = grid.h * fw @ (qw * (1.0 - t))
    f2 = grid.h * fw @ (qw * t)
    F = np.zeros(grid.n_nodes)
    F[:-1] += f1
    F[1:] += f2
    return F


def weighted_l2_of_callable(grid: Grid, weight: Callable, f: Callable) -> float:
    """Weighted L2 norm of a callable, by the same element quadrature."""
    x = (grid.nodes[:-1, None] + grid.h * _REF_NODES[None, :]).ravel()
    w = np.asarray(weight(x), dtype=float)
    vals = np.asarray(f(x), dtype=float) ** 2 * w
    total = grid.h * float((vals.reshape(grid.n_elems, -1) @ _REF_WEIGHTS).sum())
    return math.sqrt(total)


def operator_sum(*ops: WeightedOperator) -> Tuple[np.ndarray, np.ndarray]:
    """Entry-wise sum of operators on a common grid, as (diag, off) arrays."""
    if not ops:
        raise ParameterError("need at least one operator")
    grid = ops[0].grid
    for op in ops[1:]:
        if op.grid is not grid and not np.array_equal(op.grid.nodes, grid.nodes):
            raise ShapeError("operators live on different grids")
    diag = sum(op.diag for op in ops)
    off = sum(op.off for op in ops)
    return diag, off


def solve_tridiagonal_spd(diag: np.ndarray, off: np.ndarray,
                          rhs: np.ndarray) -> np.ndarray:
    """Direct solve of a symmetric positive definite tridiagonal system."""
    piv, sub = backends.factor_spd_tridiagonal(diag, off)
    return backends.solve_factored(piv, sub, rhs)


def weighted_norms(u: GridFunction, mass: WeightedOperator,
                   stiffness: WeightedOperator) -> Tuple[float, float]:
    """Discrete weighted (L2, H1) norms of a grid function.

    Both operators must be assembled on u's grid with coefficient 1 so
    the H1 norm is ||u||_L2^2 + ||u'||_L2^2 without hidden scalings.
    """
    for op, kind in ((mass, "mass"), (stiffness, "stiffness")):
        if op.kind != kind:
            raise ParameterError(f"expected a {kind} operator, got {op.kind}")
        if op.coefficient != 1.0:
            raise ParameterError(
                f"{kind} operator has coefficient {op.coefficient}, need 1")
        if not np.array_equal(op.grid.nodes, u.grid.nodes):
            raise ShapeError(f"{kind} operator grid differs from function grid")
    v = u.values
    l2sq = float(v @ mass.matvec(v))
    h1sq = l2sq + float(v @ stiffness.matvec(v))
    return math.sqrt(max(l2sq, 0.0)), math.sqrt(max(h1sq, 0.0))
