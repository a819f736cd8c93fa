"""Charts, states, and pseudo-Riemannian metrics on a single chart.

A metric is a symmetric matrix of position-only scalar expressions.  The
module evaluates it (with inverse and first derivatives), assembles
Christoffel symbols of the first kind, and builds the metric differential
operators (gradient, divergence, Laplace-Beltrami) both numerically and as
symbolic expressions so they can be differentiated again.

Indefinite signatures are first class: determinants may be negative, and the
volume weight used by divergence is |det g|^(1/2), written as
sqrt(sqrt(det^2)) so it stays inside the expression grammar and
differentiates exactly away from the degenerate locus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

from geomech.exprdsl import (
    ExprError,
    Num,
    ScalarExpr,
    Sym,
    nadd,
    ncall,
    ndiv,
    nmul,
    npow,
    nsub,
    parse,
)

__all__ = [
    "ChartSpec",
    "DegenerateMetricError",
    "GeometryError",
    "LiouvilleData",
    "MetricEval",
    "MetricSpec",
    "State",
    "christoffel_first",
    "divergence",
    "divergence_expr",
    "grad",
    "grad_exprs",
    "laplacian",
    "laplacian_expr",
    "liouville",
    "metric_eval",
    "oneform_norm2",
]

DEGENERACY_TOL = 1e-12


class GeometryError(ValueError):
    """Base class for chart/metric failures."""


class DegenerateMetricError(GeometryError):
    """The metric determinant vanished (|det g| <= 1e-12) at an evaluation
    point; the chart is unusable there."""


@dataclass(frozen=True)
class ChartSpec:
    """A single chart: a dimension and coordinate names (default x1..xn)."""

    dim: int
    names: tuple = ()

    def __post_init__(self):
        if self.dim < 1:
            raise GeometryError(f"chart dimension must be >= 1, got {self.dim}")
        if not self.names:
            object.__setattr__(
                self, "names", tuple(f"x{i + 1}" for i in range(self.dim))
            )
        elif len(self.names) != self.dim:
            raise GeometryError(
                f"expected {self.dim} coordinate names, got {len(self.names)}"
            )


class State:
    """A tangent-bundle point: positions ``x`` and velocities ``v``."""

    __slots__ = ("x", "v")

    def __init__(self, x: Sequence[float], v: Sequence[float]):
        self.x = np.asarray(x, dtype=float).copy()
        self.v = np.asarray(v, dtype=float).copy()
        if self.x.ndim != 1 or self.v.shape != self.x.shape:
            raise GeometryError(
                f"state needs matching 1-d x and v, got shapes "
                f"{self.x.shape} and {self.v.shape}"
            )

    @property
    def dim(self) -> int:
        return self.x.shape[0]

    def __repr__(self) -> str:
        return f"State(x={self.x.tolist()}, v={self.v.tolist()})"


EntryLike = Union[str, float, int, ScalarExpr]


def _as_entry(value: EntryLike, dim: int, what: str) -> ScalarExpr:
    if isinstance(value, ScalarExpr):
        expr = value
        if expr.dim != dim:
            raise GeometryError(f"{what}: expression has dimension {expr.dim}, chart has {dim}")
    elif isinstance(value, (int, float)):
        expr = ScalarExpr(Num(float(value)), dim)
    else:
        expr = parse(str(value), dim)
    return expr


@dataclass(frozen=True)
class MetricEval:
    """The metric at one point: value, inverse, first derivatives, and
    determinant.  ``dg[k, i, j]`` is the partial of ``g_ij`` along ``x^k``."""

    x: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    dg: np.ndarray
    det: float


class LiouvilleData(NamedTuple):
    """Liouville one-form values at a state, with the derived scalars."""

    theta: np.ndarray  # theta_i = g_ij v^j
    theta_dot: float  # <theta, v> = g_ij v^i v^j = 2 T
    kinetic_energy: float  # T = theta_dot / 2


class MetricSpec:
    """A symmetric matrix of position-only expressions in x1..xn.

    Entries below the diagonal must repeat the entries above it exactly
    (structural equality after parsing); velocities are rejected.  All
    symbolic artifacts (derivatives, determinant, inverse, volume weight)
    are built lazily and cached.
    """

    def __init__(self, entries: Sequence[Sequence[EntryLike]]):
        n = len(entries)
        if n < 1:
            raise GeometryError("metric needs at least one row")
        rows = []
        for i, row in enumerate(entries):
            if len(row) != n:
                raise GeometryError(
                    f"metric row {i + 1} has {len(row)} entries, expected {n}"
                )
            rows.append([_as_entry(e, n, f"metric entry ({i + 1},{j + 1})")
                         for j, e in enumerate(row)])
        for i in range(n):
            for j in range(n):
                e = rows[i][j]
                if e.depends_on_velocity:
                    raise GeometryError(
                        f"metric entry ({i + 1},{j + 1}) depends on velocities"
                    )
                if j < i and rows[j][i] != e:
                    raise GeometryError(
                        f"metric is not symmetric: entry ({i + 1},{j + 1}) is "
                        f"{e} but ({j + 1},{i + 1}) is {rows[j][i]}"
                    )
        self.dim = n
        self._rows = rows
        self._deriv: dict = {}
        self._det_expr: ScalarExpr | None = None
        self._inv: list | None = None
        self._weight: ScalarExpr | None = None
        self._nonzero_derivs: list | None = None
        self._const_eval: MetricEval | None = None

    # -- construction helpers ------------------------------------------------

    @classmethod
    def diagonal(cls, diag: Sequence[EntryLike]) -> "MetricSpec":
        n = len(diag)
        entries = [[diag[i] if i == j else 0.0 for j in range(n)] for i in range(n)]
        return cls(entries)

    @classmethod
    def euclidean(cls, dim: int) -> "MetricSpec":
        return cls.diagonal([1.0] * dim)

    # -- symbolic accessors ---------------------------------------------------

    def entry(self, i: int, j: int) -> ScalarExpr:
        return self._rows[i][j]

    def matrix(self) -> list:
        return [list(row) for row in self._rows]

    def derivative(self, k: int, i: int, j: int) -> ScalarExpr:
        """The partial of g_ij along x^k (cached, symmetric in i, j)."""
        if j < i:
            i, j = j, i
        key = (k, i, j)
        hit = self._deriv.get(key)
        if hit is None:
            hit = self._rows[i][j].diff(Sym("x", k))
            self._deriv[key] = hit
        return hit

    @property
    def nonzero_derivatives(self) -> list:
        """All (k, i, j) with i <= j whose derivative is not literally zero."""
        if self._nonzero_derivs is None:
            found = []
            n = self.dim
            for k in range(n):
                for i in range(n):
                    for j in range(i, n):
                        d = self.derivative(k, i, j)
                        if d.node != Num(0.0):
                            found.append((k, i, j))
            self._nonzero_derivs = found
        return self._nonzero_derivs

    @property
    def is_constant(self) -> bool:
        return not self.nonzero_derivatives

    def det_expr(self) -> ScalarExpr:
        if self._det_expr is None:
            nodes = [[e.node for e in row] for row in self._rows]
            self._det_expr = ScalarExpr(_det_nodes(nodes), self.dim)
        return self._det_expr

    def inverse_expr(self, i: int, j: int) -> ScalarExpr:
        """Entry (i, j) of the symbolic inverse (adjugate over determinant)."""
        if self._inv is None:
            nodes = [[e.node for e in row] for row in self._rows]
            inv_nodes = _inverse_nodes(nodes)
            self._inv = [
                [ScalarExpr(inv_nodes[a][b], self.dim) for b in range(self.dim)]
                for a in range(self.dim)
            ]
        return self._inv[i][j]

    def volume_weight_expr(self) -> ScalarExpr:
        """|det g|^(1/2) as sqrt(sqrt(det^2)): sign-safe for indefinite
        metrics and exactly differentiable off the degenerate locus."""
        if self._weight is None:
            det = self.det_expr().node
            self._weight = ScalarExpr(
                ncall("sqrt", ncall("sqrt", npow(det, Num(2.0)))), self.dim
            )
        return self._weight

    def kinetic_energy_expr(self) -> ScalarExpr:
        """T = (1/2) g_ij v^i v^j as an expression in x and v."""
        n = self.dim
        acc = Num(0.0)
        for i in range(n):
            for j in range(n):
                term = nmul(self._rows[i][j].node, nmul(Sym("v", i), Sym("v", j)))
                acc = nadd(acc, term)
        return ScalarExpr(nmul(Num(0.5), acc), n)

    def theta_exprs(self) -> list:
        """Liouville one-form components theta_i = g_ij v^j as expressions."""
        n = self.dim
        out = []
        for i in range(n):
            acc = Num(0.0)
            for j in range(n):
                acc = nadd(acc, nmul(self._rows[i][j].node, Sym("v", j)))
            out.append(ScalarExpr(acc, n))
        return out

    # -- evaluation -----------------------------------------------------------

    def eval(self, x: Sequence[float]) -> MetricEval:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise GeometryError(f"expected {self.dim} coordinates, got shape {x.shape}")
        if self.is_constant and self._const_eval is not None:
            c = self._const_eval
            return MetricEval(x=x.copy(), g=c.g, g_inv=c.g_inv, dg=c.dg, det=c.det)
        n = self.dim
        g = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                g[i, j] = g[j, i] = self._rows[i][j].eval(x)
        det = float(np.linalg.det(g))
        if abs(det) <= DEGENERACY_TOL:
            raise DegenerateMetricError(
                f"metric is degenerate at x={x.tolist()}: det={det!r}"
            )
        g_inv = np.linalg.inv(g)
        dg = np.zeros((n, n, n))
        for (k, i, j) in self.nonzero_derivatives:
            val = self.derivative(k, i, j).eval(x)
            dg[k, i, j] = val
            if i != j:
                dg[k, j, i] = val
        me = MetricEval(x=x.copy(), g=g, g_inv=g_inv, dg=dg, det=det)
        if self.is_constant:
            self._const_eval = me
        return me

    def __repr__(self) -> str:
        rows = "; ".join(
            ", ".join(str(e) for e in row) for row in self._rows
        )
        return f"MetricSpec[{self.dim}]({rows})"


# ---------------------------------------------------------------------------
# Symbolic determinant / inverse on raw nodes (Laplace expansion; charts are
# low-dimensional so the closed form is fine and keeps derivatives exact).
# ---------------------------------------------------------------------------


def _det_nodes(mat: list) -> object:
    n = len(mat)
    if n == 1:
        return mat[0][0]
    if n == 2:
        return nsub(nmul(mat[0][0], mat[1][1]), nmul(mat[0][1], mat[1][0]))
    acc = Num(0.0)
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = nmul(mat[0][j], _det_nodes(minor))
        acc = nadd(acc, term) if j % 2 == 0 else nsub(acc, term)
    return acc


def _inverse_nodes(mat: list) -> list:
    n = len(mat)
    det = _det_nodes(mat)
    if n == 1:
        return [[ndiv(Num(1.0), det)]]
    inv = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [mat[r][c] for c in range(n) if c != i]
                for r in range(n)
                if r != j
            ]
            cof = _det_nodes(minor)
            if (i + j) % 2 == 1:
                cof = nsub(Num(0.0), cof)
            inv[i][j] = ndiv(cof, det)
    return inv


def inverse_exprs(mat: Sequence[Sequence[ScalarExpr]], dim: int) -> list:
    """Symbolic inverse of a small square matrix of expressions (used for
    spatial blocks of a metric); entries keep the ambient dimension."""
    nodes = [[e.node for e in row] for row in mat]
    inv = _inverse_nodes(nodes)
    k = len(mat)
    return [[ScalarExpr(inv[a][b], dim) for b in range(k)] for a in range(k)]


def det_expr_of(mat: Sequence[Sequence[ScalarExpr]], dim: int) -> ScalarExpr:
    nodes = [[e.node for e in row] for row in mat]
    return ScalarExpr(_det_nodes(nodes), dim)


# ---------------------------------------------------------------------------
# Metric operators.
# ---------------------------------------------------------------------------


def metric_eval(metric: MetricSpec, x: Sequence[float]) -> MetricEval:
    """Evaluate the metric at ``x``: value, inverse, derivatives, and
    determinant.  Raises `DegenerateMetricError` if |det g| <= 1e-12."""
    return metric.eval(x)


def christoffel_first(metric: MetricSpec, x: Sequence[float]) -> np.ndarray:
    """Christoffel symbols of the first kind at ``x``.

    Returns an array G with G[i, j, k] = (1/2)(d_i g_jk + d_j g_ik - d_k g_ij),
    symmetric in (i, j).
    """
    dg = metric.eval(x).dg
    return 0.5 * (dg + dg.transpose(1, 0, 2) - np.moveaxis(dg, 0, 2))


def grad(metric: MetricSpec, f: ScalarExpr, x: Sequence[float]) -> np.ndarray:
    """The metric gradient (grad f)^i = g^{ij} d_j f at ``x``."""
    me = metric.eval(x)
    df = np.array([f.diff(Sym("x", j)).eval(x) for j in range(metric.dim)])
    return me.g_inv @ df


def grad_exprs(metric: MetricSpec, f: ScalarExpr) -> list:
    """The metric gradient as symbolic component expressions."""
    if f.dim != metric.dim:
        raise GeometryError("expression and metric disagree on dimension")
    n = metric.dim
    df = [f.diff(Sym("x", j)).node for j in range(n)]
    out = []
    for i in range(n):
        acc = Num(0.0)
        for j in range(n):
            acc = nadd(acc, nmul(metric.inverse_expr(i, j).node, df[j]))
        out.append(ScalarExpr(acc, n))
    return out


def divergence_expr(metric: MetricSpec, u: Sequence[ScalarExpr]) -> ScalarExpr:
    """div u = |det g|^(-1/2) d_i(|det g|^(1/2) u^i) as an expression."""
    n = metric.dim
    if len(u) != n:
        raise GeometryError(f"vector field has {len(u)} components, chart has {n}")
    w = metric.volume_weight_expr().node
    acc = Num(0.0)
    for i in range(n):
        if u[i].dim != n:
            raise GeometryError("vector component dimension mismatch")
        term = ScalarExpr(nmul(w, u[i].node), n).diff(Sym("x", i)).node
        acc = nadd(acc, term)
    return ScalarExpr(ndiv(acc, w), n)


def divergence(metric: MetricSpec, u: Sequence[ScalarExpr], x: Sequence[float]) -> float:
    """The metric divergence of the vector field ``u`` at ``x``."""
    metric.eval(x)  # degeneracy barrier
    return divergence_expr(metric, u).eval(x)


def laplacian_expr(metric: MetricSpec, f: ScalarExpr) -> ScalarExpr:
    """The Laplace-Beltrami operator div(grad f) as an expression."""
    return divergence_expr(metric, grad_exprs(metric, f))


def laplacian(metric: MetricSpec, f: ScalarExpr, x: Sequence[float]) -> float:
    metric.eval(x)  # degeneracy barrier
    return laplacian_expr(metric, f).eval(x)


def liouville(metric: MetricSpec, state: State) -> LiouvilleData:
    """Liouville one-form theta_i = g_ij v^j at a state, with
    <theta, v> = 2T and the kinetic energy T."""
    me = metric.eval(state.x)
    theta = me.g @ state.v
    theta_dot = float(theta @ state.v)
    return LiouvilleData(theta=theta, theta_dot=theta_dot, kinetic_energy=0.5 * theta_dot)


def oneform_norm2(
    metric: MetricSpec, comps: Sequence[ScalarExpr], state: State
) -> float:
    """The squared metric norm g^{ij} tau_i tau_j of a one-form whose
    components may depend on position and velocity."""
    me = metric.eval(state.x)
    tau = np.array([c.eval(state.x, state.v) for c in comps])
    return float(tau @ me.g_inv @ tau)
