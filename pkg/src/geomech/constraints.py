"""Time constraints on Newton fields and the reductions they induce.

A time constraint is a one-form tau (components may depend on position and
velocity) whose pairing with the velocity, taudot = tau_i xd^i, the
constrained field must keep constant.  The constrained field is

    Dbar = D - lambda * Grad tau,      lambda = D(taudot) / <Grad tau, taudot>,

where Grad tau raises the one-form with the inverse metric and the
denominator is kappa = (Grad tau)^i d_{v^i}(taudot).  For position-only tau
this is lambda = D(taudot) / ||tau||^2; for the Liouville form tau = theta
it is lambda = D(thetadot) / (2 thetadot).  By construction Dbar(taudot) = 0
up to roundoff, which is the property the checks certify.  A (numerically)
null constraint is a hard error.

The module also performs the two classical reductions on block metrics
T2 = g00 (dx^0)^2 + g_mn dx^m dx^n with x^0-independent entries:

  * geodesic projection at fixed momentum E0 = c g00 xd^0: the spatial
    motion is conservative with potential (E0^2 / 2c^2) (1/g00);
  * the time constraint xd^0 = 1 on a (possibly conservative) field:
    the spatial motion is conservative with potential U - g00/2.

Finally it evaluates the canonical-equation residual, the modified
Liouville structure residual, and the time-dependent Hamilton-Jacobi
residual, all tied to the same block splitting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from geomech.exprdsl import Num, ScalarExpr, Sym, nadd, ndiv, nmul, parse
from geomech.geometry import (
    MetricSpec,
    State,
    christoffel_first,
    inverse_exprs,
)
from geomech.dynamics import (
    ForceForm,
    NewtonField,
    Trajectory,
    covariant_value,
)
from geomech.sampling import sample_box

__all__ = [
    "ConstrainedField",
    "ConstraintError",
    "ModifiedLiouvilleData",
    "NullConstraintError",
    "ReducedSystem",
    "TimeConstraint",
    "canonical_residual",
    "check_block_structure",
    "constrained_accel_crosscheck",
    "hj_time_residual",
    "infer_E0",
    "modified_charge",
    "modified_liouville",
    "project_geodesic",
    "reduce_by_time_constraint",
]

NULL_CONSTRAINT_TOL = 1e-10


class ConstraintError(ValueError):
    """Base class for constraint and reduction failures."""


class NullConstraintError(ConstraintError):
    """The constraint one-form is numerically null at a state (its squared
    norm, or the pairing kappa that the modified field divides by, is within
    1e-10 of zero); the constrained field is undefined there."""


@dataclass(frozen=True)
class TimeConstraint:
    """A constraint one-form.  Kinds:

    * ``exact_differential``: tau = dx^{i0} (components are constants);
    * ``liouville_theta``: tau = theta, the Liouville form of the metric;
    * ``general``: explicit components, which may involve velocities.
    """

    kind: str
    i0: int = 0
    comps: tuple = ()

    @classmethod
    def exact_differential(cls, i0: int) -> "TimeConstraint":
        return cls(kind="exact_differential", i0=i0)

    @classmethod
    def liouville_theta(cls) -> "TimeConstraint":
        return cls(kind="liouville_theta")

    @classmethod
    def general(cls, comps: Sequence, dim: int) -> "TimeConstraint":
        parsed = tuple(
            c if isinstance(c, ScalarExpr) else parse(str(c), dim) for c in comps
        )
        if len(parsed) != dim:
            raise ConstraintError(
                f"constraint needs {dim} components, got {len(parsed)}"
            )
        return cls(kind="general", comps=parsed)

    def components(self, metric: MetricSpec) -> list:
        n = metric.dim
        if self.kind == "exact_differential":
            if not 0 <= self.i0 < n:
                raise ConstraintError(
                    f"time coordinate index {self.i0} out of range for dimension {n}"
                )
            return [
                ScalarExpr(Num(1.0 if k == self.i0 else 0.0), n) for k in range(n)
            ]
        if self.kind == "liouville_theta":
            return metric.theta_exprs()
        if self.kind == "general":
            if len(self.comps) != n:
                raise ConstraintError("constraint components do not match dimension")
            return list(self.comps)
        raise ConstraintError(f"unknown constraint kind {self.kind!r}")


class ConstrainedField:
    """A Newton field modified by a time constraint so that the constraint
    pairing taudot is a first integral."""

    def __init__(self, base: NewtonField, constraint: TimeConstraint):
        self.base = base
        self.metric = base.metric
        self.constraint = constraint
        n = self.metric.dim
        self._tau = constraint.components(self.metric)
        taudot = Num(0.0)
        for i in range(n):
            taudot = nadd(taudot, nmul(self._tau[i].node, Sym("v", i)))
        self._taudot = ScalarExpr(taudot, n)
        self._dx_taudot = [self._taudot.diff(Sym("x", i)) for i in range(n)]
        self._dv_taudot = [self._taudot.diff(Sym("v", i)) for i in range(n)]

    @property
    def dim(self) -> int:
        return self.metric.dim

    def taudot(self, x: np.ndarray, v: np.ndarray) -> float:
        return self._taudot.eval(x, v)

    def _pieces(self, x: np.ndarray, v: np.ndarray):
        me = self.metric.eval(x)
        a0 = self.base.accel(x, v)
        tau_vals = np.array([c.eval(x, v) for c in self._tau])
        grad_tau = me.g_inv @ tau_vals
        norm2 = float(tau_vals @ grad_tau)
        dv_vals = np.array([c.eval(x, v) for c in self._dv_taudot])
        kappa = float(grad_tau @ dv_vals)
        if abs(norm2) <= NULL_CONSTRAINT_TOL or abs(kappa) <= NULL_CONSTRAINT_TOL:
            raise NullConstraintError(
                f"constraint is null at x={x.tolist()}, v={v.tolist()}: "
                f"|tau|^2={norm2!r}, kappa={kappa!r}"
            )
        dx_vals = np.array([c.eval(x, v) for c in self._dx_taudot])
        d_taudot = float(v @ dx_vals + a0 @ dv_vals)
        lam = d_taudot / kappa
        return a0, grad_tau, lam

    def accel(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        a0, grad_tau, lam = self._pieces(np.asarray(x, float), np.asarray(v, float))
        return a0 - lam * grad_tau

    def accel_state(self, s: State) -> np.ndarray:
        return self.accel(s.x, s.v)

    def multiplier(self, x: np.ndarray, v: np.ndarray) -> float:
        """The Lagrange multiplier lambda at a state."""
        return self._pieces(np.asarray(x, float), np.asarray(v, float))[2]

    def constraint_rate_derivative(self, x: np.ndarray, v: np.ndarray) -> float:
        """Dbar(taudot) at a state: the quantity the construction nulls.
        This is the residual certified to vanish."""
        x = np.asarray(x, float)
        v = np.asarray(v, float)
        abar = self.accel(x, v)
        dx_vals = np.array([c.eval(x, v) for c in self._dx_taudot])
        dv_vals = np.array([c.eval(x, v) for c in self._dv_taudot])
        return float(v @ dx_vals + abar @ dv_vals)


def constrained_accel_crosscheck(
    base: NewtonField, constraint: TimeConstraint, states: Sequence[State]
) -> float:
    """Compare the general constrained acceleration against the split
    formula for position-only constraints,

        lambda = (<tau, covariant force> + xd^i xd^j nabla_i tau_j) / ||tau||^2,

    which expands the same multiplier through the covariant derivative of
    tau.  Returns the worst absolute acceleration difference; the two routes
    are algebraically identical, so this certifies the assembly only.
    """
    metric = base.metric
    n = metric.dim
    tau = constraint.components(metric)
    for c in tau:
        if c.depends_on_velocity:
            raise ConstraintError(
                "the split multiplier formula applies to position-only constraints"
            )
    field = ConstrainedField(base, constraint)
    dtau = [[tau[j].diff(Sym("x", i)) for j in range(n)] for i in range(n)]
    worst = 0.0
    for s in states:
        me = metric.eval(s.x)
        tau_vals = np.array([c.eval(s.x) for c in tau])
        grad_tau = me.g_inv @ tau_vals
        norm2 = float(tau_vals @ grad_tau)
        if abs(norm2) <= NULL_CONSTRAINT_TOL:
            raise NullConstraintError(f"constraint is null at x={s.x.tolist()}")
        gamma1 = christoffel_first(metric, s.x)
        gamma2 = np.einsum("kl,ijl->ijk", me.g_inv, gamma1)
        dtau_vals = np.array(
            [[dtau[i][j].eval(s.x) for j in range(n)] for i in range(n)]
        )
        nabla_tau = dtau_vals - np.einsum("ijk,k->ij", gamma2, tau_vals)
        second_fundamental = float(s.v @ nabla_tau @ s.v)
        pairing = float(tau_vals @ covariant_value(base, s))
        lam_split = (pairing + second_fundamental) / norm2
        accel_split = base.accel(s.x, s.v) - lam_split * grad_tau
        accel_general = field.accel(s.x, s.v)
        worst = max(worst, float(np.max(np.abs(accel_general - accel_split))))
    return worst


# ---------------------------------------------------------------------------
# Block splitting of a metric along a time coordinate.
# ---------------------------------------------------------------------------


def _default_box(dim: int) -> list:
    return [(0.5, 1.5)] * dim


def check_block_structure(
    metric: MetricSpec,
    i0: int,
    box: Sequence | None = None,
    samples: int = 50,
    tol: float = 1e-12,
    seed: int = 0,
) -> np.ndarray:
    """Verify the block form needed by the reductions: the row g_{i0, mu}
    is structurally zero off the diagonal and every entry is independent of
    x^{i0} (checked symbolically where possible, else at sampled points).
    Returns the sample points for reuse."""
    n = metric.dim
    if not 0 <= i0 < n:
        raise ConstraintError(f"time index {i0} out of range for dimension {n}")
    if n < 2:
        raise ConstraintError("block reduction needs at least two coordinates")
    for mu in range(n):
        if mu != i0 and metric.entry(i0, mu).node != Num(0.0):
            raise ConstraintError(
                f"metric is not block along x{i0 + 1}: entry "
                f"({i0 + 1},{mu + 1}) = {metric.entry(i0, mu)} is not zero"
            )
    pts = sample_box(_default_box(n) if box is None else box, samples, seed)
    for i in range(n):
        for j in range(i, n):
            d = metric.derivative(i0, i, j)
            if d.node == Num(0.0):
                continue
            worst = max(abs(d.eval(x)) for x in pts)
            if worst > tol:
                raise ConstraintError(
                    f"metric entry ({i + 1},{j + 1}) depends on the time "
                    f"coordinate x{i0 + 1} (sampled derivative {worst!r})"
                )
    return pts


def _strip_time_symbol(
    expr: ScalarExpr, i0: int, pts: np.ndarray, tol: float = 1e-12
) -> ScalarExpr:
    """Remove a vacuous occurrence of x^{i0}: substitute the box midpoint
    and verify the expression is unchanged on the sample points."""
    time_sym = Sym("x", i0)
    if time_sym not in expr.symbols:
        return expr
    mid = float(np.mean(pts[:, i0]))
    fixed = expr.subst({time_sym: mid})
    worst = max(abs(expr.eval(x) - fixed.eval(x)) for x in pts)
    if worst > tol:
        raise ConstraintError(
            f"expression {expr} genuinely depends on the time coordinate "
            f"x{i0 + 1} (residual {worst!r})"
        )
    return fixed


def _reindex_dropping(expr: ScalarExpr, i0: int, new_dim: int) -> ScalarExpr:
    mapping = {}
    for s in expr.symbols:
        if s.index == i0:
            raise ConstraintError(f"symbol {s.name} survived time elimination")
        if s.index > i0:
            mapping[s] = Sym(s.kind, s.index - 1)
    return expr.subst(mapping, dim=new_dim)


def _spatial_indices(n: int, i0: int) -> list:
    return [mu for mu in range(n) if mu != i0]


@dataclass(frozen=True)
class ReducedSystem:
    """A conservative system on the spatial chart produced by a reduction:
    metric (dimension n-1), potential, and the reduction bookkeeping."""

    metric: MetricSpec
    potential: ScalarExpr
    i0: int
    kind: str  # "projection" | "time_constraint"
    c: float = 1.0
    E0: float | None = None

    def field(self) -> NewtonField:
        return NewtonField(self.metric, ForceForm.from_potential(self.potential))

    def project_state(self, s: State) -> State:
        keep = _spatial_indices(s.dim, self.i0)
        return State(s.x[keep], s.v[keep])


def _reduce_block(
    metric: MetricSpec, i0: int, box: Sequence | None, seed: int = 0
):
    """Common part of both reductions: block checks, then the reduced
    spatial metric and the reduced g00, reindexed to dimension n-1."""
    n = metric.dim
    pts = check_block_structure(metric, i0, box=box, seed=seed)
    spatial = _spatial_indices(n, i0)
    reduced_rows = []
    for mu in spatial:
        row = []
        for nu in spatial:
            e = _strip_time_symbol(metric.entry(mu, nu), i0, pts)
            row.append(_reindex_dropping(e, i0, n - 1))
        reduced_rows.append(row)
    reduced_metric = MetricSpec(reduced_rows)
    g00 = _strip_time_symbol(metric.entry(i0, i0), i0, pts)
    g00_reduced = _reindex_dropping(g00, i0, n - 1)
    return reduced_metric, g00_reduced, pts


def infer_E0(metric: MetricSpec, i0: int, s: State, c: float = 1.0) -> float:
    """The conserved time momentum scaled by c: E0 = c g00(x) xd^{i0}."""
    return float(c * metric.entry(i0, i0).eval(s.x) * s.v[i0])


def project_geodesic(
    metric: MetricSpec,
    i0: int,
    E0: float,
    c: float = 1.0,
    box: Sequence | None = None,
) -> ReducedSystem:
    """Reduce the geodesic flow of a block metric at fixed time momentum.

    Along geodesics g00 xd^0 = E0/c is conserved; eliminating xd^0 turns the
    spatial equations into the conservative system with potential

        U = (E0^2 / (2 c^2)) * (1 / g00),

    on the spatial block (additive constant fixed to zero).  The projection
    of full geodesics with matching E0 coincides with integral curves of the
    reduced system, in the same time parameter.
    """
    reduced_metric, g00_reduced, _ = _reduce_block(metric, i0, box)
    prefactor = (E0 * E0) / (2.0 * c * c)
    potential = ScalarExpr(
        nmul(Num(prefactor), ndiv(Num(1.0), g00_reduced.node)),
        metric.dim - 1,
    )
    return ReducedSystem(
        metric=reduced_metric,
        potential=potential,
        i0=i0,
        kind="projection",
        c=c,
        E0=E0,
    )


def reduce_by_time_constraint(
    metric: MetricSpec,
    i0: int,
    potential: ScalarExpr | None = None,
    box: Sequence | None = None,
) -> ReducedSystem:
    """Reduce a block system under the time constraint xd^{i0} = 1.

    The constrained field (geodesic, or conservative with an
    x^0-independent potential U) projects onto the conservative spatial
    system with potential U' = U - g00/2.
    """
    reduced_metric, g00_reduced, pts = _reduce_block(metric, i0, box)
    n = metric.dim
    u_red = ScalarExpr(nmul(Num(-0.5), g00_reduced.node), n - 1)
    if potential is not None:
        if potential.depends_on_velocity:
            raise ConstraintError("potential must be position-only")
        stripped = _strip_time_symbol(potential, i0, pts)
        u_red = u_red + _reindex_dropping(stripped, i0, n - 1)
    return ReducedSystem(
        metric=reduced_metric,
        potential=u_red,
        i0=i0,
        kind="time_constraint",
    )


# ---------------------------------------------------------------------------
# Modified Liouville structure under the time constraint.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModifiedLiouvilleData:
    """The modified Liouville form under the constraint xd^{i0} = const:
    theta_bar_i = g_ij xd^j - (H / xd^{i0}) delta_i^{i0} with H = T + U,
    and the worst component of its structure-equation residual

        i_{Dbar} d theta_bar = -(H / xd^{i0}) d xd^{i0}.
    """

    theta_bar: np.ndarray
    hamiltonian: float
    residual: float


def modified_liouville(
    metric: MetricSpec,
    potential: ScalarExpr | None,
    i0: int,
    s: State,
) -> ModifiedLiouvilleData:
    n = metric.dim
    if not 0 <= i0 < n:
        raise ConstraintError(f"time index {i0} out of range")
    if abs(s.v[i0]) <= 1e-12:
        raise ConstraintError(
            "modified Liouville form is undefined where the time velocity "
            f"xd{i0 + 1} vanishes"
        )
    h_expr = metric.kinetic_energy_expr()
    if potential is not None:
        h_expr = h_expr + potential
    force = None if potential is None else ForceForm.from_potential(potential)
    base = NewtonField(metric, force)
    constrained = ConstrainedField(base, TimeConstraint.exact_differential(i0))

    theta = metric.theta_exprs()
    v0 = ScalarExpr(Sym("v", i0), n)
    theta_bar = list(theta)
    theta_bar[i0] = theta[i0] - h_expr / v0

    abar = constrained.accel(s.x, s.v)
    h_val = h_expr.eval(s.x, s.v)
    tb_vals = np.array([e.eval(s.x, s.v) for e in theta_bar])

    worst = 0.0
    # dx^k slots: Dbar(theta_bar_k) - xd^i d_{x^k} theta_bar_i
    for k in range(n):
        dbar_tk = sum(
            s.v[i] * theta_bar[k].diff(Sym("x", i)).eval(s.x, s.v) for i in range(n)
        ) + sum(
            abar[i] * theta_bar[k].diff(Sym("v", i)).eval(s.x, s.v) for i in range(n)
        )
        transport = sum(
            s.v[i] * theta_bar[i].diff(Sym("x", k)).eval(s.x, s.v) for i in range(n)
        )
        worst = max(worst, abs(dbar_tk - transport))
    # dv^k slots: -xd^i d_{v^k} theta_bar_i + (H / xd^{i0}) delta_k^{i0}
    for k in range(n):
        value = -sum(
            s.v[i] * theta_bar[i].diff(Sym("v", k)).eval(s.x, s.v) for i in range(n)
        )
        if k == i0:
            value += h_val / s.v[i0]
        worst = max(worst, abs(value))
    return ModifiedLiouvilleData(
        theta_bar=tb_vals, hamiltonian=h_val, residual=worst
    )


def modified_charge(
    metric: MetricSpec,
    potential: ScalarExpr | None,
    i0: int,
    vfield,
    s: State,
) -> float:
    """The Noether pairing <theta_bar, v> of the modified Liouville form
    with a configuration vector field."""
    data = modified_liouville(metric, potential, i0, s)
    vals = np.array([c.eval(s.x) for c in vfield.comps])
    return float(data.theta_bar @ vals)


# ---------------------------------------------------------------------------
# Canonical equations and the time-dependent Hamilton-Jacobi residual.
# ---------------------------------------------------------------------------


def _spatial_inverse_exprs(metric: MetricSpec, i0: int) -> tuple:
    """The inverse of the spatial block, as expressions in the full chart,
    together with the spatial index list."""
    spatial = _spatial_indices(metric.dim, i0)
    block = [[metric.entry(mu, nu) for nu in spatial] for mu in spatial]
    return inverse_exprs(block, metric.dim), spatial


def canonical_residual(
    metric: MetricSpec,
    potential: ScalarExpr | None,
    i0: int,
    traj: Trajectory,
    index: int,
) -> float:
    """The canonical equations of the reduced Hamiltonian

        H' = (1/2) g'^{mn} p_m p_n + U - g00/2

    along a trajectory of the constrained field with xd^{i0} = 1: returns
    max_m | d p_m / dt + dH'/dx^m | at an interior sample, with the time
    derivative a central difference."""
    n = metric.dim
    if not 1 <= index <= len(traj) - 2:
        raise ValueError("index must be interior to the trajectory")
    inv_exprs, spatial = _spatial_inverse_exprs(metric, i0)
    k = len(spatial)

    def momenta(i: int) -> np.ndarray:
        x, v = traj.xs[i], traj.vs[i]
        me = metric.eval(x)
        return np.array(
            [sum(me.g[mu, nu] * v[nu] for nu in spatial) for mu in spatial]
        )

    dt = traj.dt
    dp = (momenta(index + 1) - momenta(index - 1)) / (2.0 * dt)
    x = traj.xs[index]
    p = momenta(index)
    worst = 0.0
    for a, mu in enumerate(spatial):
        # dH'/dx^mu at fixed p
        val = 0.0
        for b in range(k):
            for c_ in range(k):
                val += (
                    0.5
                    * inv_exprs[b][c_].diff(Sym("x", mu)).eval(x)
                    * p[b]
                    * p[c_]
                )
        if potential is not None:
            val += potential.diff(Sym("x", mu)).eval(x)
        val -= 0.5 * metric.entry(i0, i0).diff(Sym("x", mu)).eval(x)
        worst = max(worst, abs(dp[a] + val))
    return worst


def hj_time_residual(
    metric: MetricSpec,
    potential: ScalarExpr | None,
    i0: int,
    w: ScalarExpr,
    x: Sequence[float],
) -> float:
    """The time-dependent Hamilton-Jacobi residual of a candidate W(x) on
    the full chart (time coordinate x^{i0}):

        dW/dx^0 + (1/2) g'^{mn} d_m W d_n W + U - g00/2.
    """
    n = metric.dim
    if w.dim != n or w.depends_on_velocity:
        raise ConstraintError("W must be a position-only function of the full chart")
    x = np.asarray(x, dtype=float)
    inv_exprs, spatial = _spatial_inverse_exprs(metric, i0)
    k = len(spatial)
    dw = [w.diff(Sym("x", mu)).eval(x) for mu in spatial]
    val = w.diff(Sym("x", i0)).eval(x)
    for a in range(k):
        for b in range(k):
            val += 0.5 * inv_exprs[a][b].eval(x) * dw[a] * dw[b]
    if potential is not None:
        val += potential.eval(x)
    val -= 0.5 * metric.entry(i0, i0).eval(x)
    return float(val)
