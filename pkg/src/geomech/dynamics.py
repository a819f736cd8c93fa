"""Newton fields on a chart, their integration, and the structural checks
tied to them: force-law recovery from a first-integral field, the
intermediate-integral residual, Noether charges, the central equation of
mechanics, reversibility, and the Maupertuis action.

The equation of motion assembled here is

    g_lk xdd^l + G_ij,k xd^i xd^j + A_k = 0,

with G the Christoffel symbols of the first kind and A the applied force
one-form (components may depend on position and velocity).  Acceleration is
obtained by solving with the inverse metric; a degenerate metric is a hard
error from the geometry layer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from geomech.exprdsl import Num, ScalarExpr, Sym, nadd, nmul, nsub, parse
from geomech.geometry import (
    GeometryError,
    MetricSpec,
    State,
    liouville,
    metric_eval,
)

__all__ = [
    "ForceForm",
    "IntegrationAbortError",
    "NewtonField",
    "Trajectory",
    "VectorFieldOnM",
    "action_integral",
    "covariant_value",
    "delta_L",
    "force_from_field",
    "integrate",
    "intermediate_residual",
    "lie_prolonged_apply",
    "newton_accel_exprs",
    "noether_charge",
    "observable_series",
    "relative_drift",
    "reversibility_residual",
    "zentralgleichung_residual",
]


class IntegrationAbortError(RuntimeError):
    """Integration stopped: non-finite state or an evaluation error, with
    the simulation time at which it happened."""

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} (at t={time!r})")
        self.time = time


def _as_components(
    comps: Sequence, dim: int, what: str, position_only: bool
) -> list:
    if len(comps) != dim:
        raise GeometryError(f"{what}: expected {dim} components, got {len(comps)}")
    out = []
    for i, c in enumerate(comps):
        if isinstance(c, ScalarExpr):
            e = c
            if e.dim != dim:
                raise GeometryError(f"{what}: component {i + 1} has wrong dimension")
        elif isinstance(c, (int, float)):
            e = ScalarExpr(Num(float(c)), dim)
        else:
            e = parse(str(c), dim)
        if position_only and e.depends_on_velocity:
            raise GeometryError(f"{what}: component {i + 1} depends on velocities")
        out.append(e)
    return out


@dataclass(frozen=True)
class ForceForm:
    """An applied force one-form: covariant components A_1..A_n, each an
    expression in position and (optionally) velocity."""

    comps: tuple

    @property
    def dim(self) -> int:
        return len(self.comps)

    @property
    def velocity_independent(self) -> bool:
        return all(c.position_only for c in self.comps)

    @classmethod
    def zero(cls, dim: int) -> "ForceForm":
        return cls(tuple(ScalarExpr(Num(0.0), dim) for _ in range(dim)))

    @classmethod
    def of(cls, comps: Sequence, dim: int) -> "ForceForm":
        return cls(tuple(_as_components(comps, dim, "force form", False)))

    @classmethod
    def from_potential(cls, potential: ScalarExpr) -> "ForceForm":
        """The exact one-form dU.  With this force the Newton field conserves
        the energy T + U."""
        if potential.depends_on_velocity:
            raise GeometryError("potential must be position-only")
        n = potential.dim
        return cls(tuple(potential.diff(Sym("x", k)) for k in range(n)))

    def values(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        return np.array([c.eval(x, v) for c in self.comps])

    @property
    def is_zero(self) -> bool:
        return all(c.node == Num(0.0) for c in self.comps)


@dataclass(frozen=True)
class VectorFieldOnM:
    """A vector field on the configuration space: contravariant components,
    position-only."""

    comps: tuple

    @property
    def dim(self) -> int:
        return len(self.comps)

    @classmethod
    def of(cls, comps: Sequence, dim: int) -> "VectorFieldOnM":
        return cls(tuple(_as_components(comps, dim, "vector field", True)))

    def values(self, x: np.ndarray) -> np.ndarray:
        return np.array([c.eval(x) for c in self.comps])


class NewtonField:
    """The second-order field of (metric, force): accel solves the Newton
    equation for the chart accelerations."""

    def __init__(self, metric: MetricSpec, force: ForceForm | None = None):
        self.metric = metric
        self.force = ForceForm.zero(metric.dim) if force is None else force
        if self.force.dim != metric.dim:
            raise GeometryError("force form and metric disagree on dimension")
        self._force_zero = self.force.is_zero

    @property
    def dim(self) -> int:
        return self.metric.dim

    def accel(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        me = self.metric.eval(x)
        if self.metric.is_constant:
            rhs = np.zeros(self.dim)
        else:
            dg = me.dg
            gamma = 0.5 * (dg + dg.transpose(1, 0, 2) - np.moveaxis(dg, 0, 2))
            rhs = np.einsum("ijk,i,j->k", gamma, v, v)
        if not self._force_zero:
            rhs = rhs + self.force.values(x, v)
        return -(me.g_inv @ rhs)

    def accel_state(self, s: State) -> np.ndarray:
        return self.accel(s.x, s.v)


def covariant_value(field: NewtonField, s: State) -> np.ndarray:
    """The covariant (force) part of the field at a state: the vector
    -g^{kl} A_l, i.e. the acceleration with the geodesic quadratic terms
    removed."""
    me = field.metric.eval(s.x)
    return -(me.g_inv @ field.force.values(s.x, s.v))


def newton_accel_exprs(
    metric: MetricSpec, force: ForceForm | None = None
) -> list:
    """The chart accelerations of the Newton field as closed-form
    expressions in (x, v):

        xdd^k = -g^{kl} ( G_ij,l xd^i xd^j + A_l ).

    Useful wherever a derivative along the flow must itself be an
    expression (e.g. force-law corrections built from flow rates)."""
    n = metric.dim
    if force is not None and force.dim != n:
        raise GeometryError("force form and metric disagree on dimension")
    totals = []
    for l in range(n):
        acc = Num(0.0)
        for i in range(n):
            for j in range(n):
                # G_ij,l = (d_i g_jl + d_j g_il - d_l g_ij) / 2
                gamma = nmul(
                    Num(0.5),
                    nsub(
                        nadd(
                            metric.derivative(i, j, l).node,
                            metric.derivative(j, i, l).node,
                        ),
                        metric.derivative(l, i, j).node,
                    ),
                )
                acc = nadd(acc, nmul(gamma, nmul(Sym("v", i), Sym("v", j))))
        if force is not None:
            acc = nadd(acc, force.comps[l].node)
        totals.append(acc)
    out = []
    for k in range(n):
        comp = Num(0.0)
        for l in range(n):
            comp = nadd(comp, nmul(metric.inverse_expr(k, l).node, totals[l]))
        out.append(ScalarExpr(nsub(Num(0.0), comp), n))
    return out


# ---------------------------------------------------------------------------
# Integration.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    """A fixed-step integration result: times[i] = i*dt, positions xs[i],
    velocities vs[i]."""

    times: np.ndarray
    xs: np.ndarray
    vs: np.ndarray

    def __len__(self) -> int:
        return self.times.shape[0]

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self) > 1 else 0.0

    def state(self, i: int) -> State:
        return State(self.xs[i], self.vs[i])

    @property
    def final_state(self) -> State:
        return self.state(len(self) - 1)


def integrate(
    field: NewtonField, s0: State, t_end: float, dt: float
) -> Trajectory:
    """Integrate the second-order field with classical fixed-step RK4.

    The step count is round(t_end / dt); times are i*dt exactly.  A
    non-finite state or an evaluation failure aborts with
    `IntegrationAbortError` carrying the simulation time.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_end < 0.0:
        raise ValueError(f"t_end must be non-negative, got {t_end}")
    n_steps = int(round(t_end / dt))
    n = field.dim
    if s0.dim != n:
        raise GeometryError("initial state and field disagree on dimension")
    xs = np.empty((n_steps + 1, n))
    vs = np.empty((n_steps + 1, n))
    xs[0] = s0.x
    vs[0] = s0.v
    accel = field.accel
    x = s0.x.copy()
    v = s0.v.copy()
    half = 0.5 * dt
    sixth = dt / 6.0
    for i in range(n_steps):
        t = i * dt
        try:
            a1 = accel(x, v)
            v2 = v + half * a1
            a2 = accel(x + half * v, v2)
            v3 = v + half * a2
            a3 = accel(x + half * v2, v3)
            v4 = v + dt * a3
            a4 = accel(x + dt * v3, v4)
        except (ValueError, ArithmeticError) as exc:
            raise IntegrationAbortError(f"evaluation failed: {exc}", t) from exc
        x = x + sixth * (v + 2.0 * v2 + 2.0 * v3 + v4)
        v = v + sixth * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        if not (np.isfinite(x).all() and np.isfinite(v).all()):
            raise IntegrationAbortError("state became non-finite", (i + 1) * dt)
        xs[i + 1] = x
        vs[i + 1] = v
    times = np.arange(n_steps + 1) * dt
    return Trajectory(times=times, xs=xs, vs=vs)


def observable_series(
    metric: MetricSpec,
    traj: Trajectory,
    kind: str = "theta_dot",
    potential: ScalarExpr | None = None,
) -> np.ndarray:
    """A scalar observable along a trajectory: 'theta_dot' (= 2T),
    'kinetic_energy', or 'energy' (T + U, requires `potential`)."""
    if kind == "energy" and potential is None:
        raise ValueError("energy observable requires a potential")
    count = len(traj)
    out = np.empty(count)
    for i in range(count):
        me = metric.eval(traj.xs[i])
        v = traj.vs[i]
        theta_dot = float(v @ me.g @ v)
        if kind == "theta_dot":
            out[i] = theta_dot
        elif kind == "kinetic_energy":
            out[i] = 0.5 * theta_dot
        elif kind == "energy":
            out[i] = 0.5 * theta_dot + potential.eval(traj.xs[i])
        else:
            raise ValueError(f"unknown observable {kind!r}")
    return out


def relative_drift(series: np.ndarray) -> float:
    """max |s_i - s_0| / max(1, |s_0|): the conservation drift of a series."""
    s0 = float(series[0])
    return float(np.max(np.abs(series - s0)) / max(1.0, abs(s0)))


# ---------------------------------------------------------------------------
# Force-law recovery and the intermediate-integral residual.
# ---------------------------------------------------------------------------


def _lower_field_nodes(metric: MetricSpec, u: VectorFieldOnM) -> list:
    """Covariant components u_k = g_kj u^j as raw nodes."""
    n = metric.dim
    out = []
    for k in range(n):
        acc = Num(0.0)
        for j in range(n):
            acc = nadd(acc, nmul(metric.entry(k, j).node, u.comps[j].node))
        out.append(acc)
    return out


def force_from_field(metric: MetricSpec, u: VectorFieldOnM) -> ForceForm:
    """The unique position-only force one-form under which the given vector
    field is a field of integral curves:

        alpha_k = -u^i (d_i u_k - d_k u_i) - d_k T(u),

    with u_k the lowered components and T(u) = (1/2) g_ij u^i u^j.
    """
    n = metric.dim
    if u.dim != n:
        raise GeometryError("vector field and metric disagree on dimension")
    lowered = _lower_field_nodes(metric, u)
    lowered_exprs = [ScalarExpr(node, n) for node in lowered]
    # T(u) = (1/2) g_ij u^i u^j
    acc = Num(0.0)
    for i in range(n):
        for j in range(n):
            acc = nadd(
                acc,
                nmul(metric.entry(i, j).node, nmul(u.comps[i].node, u.comps[j].node)),
            )
    t_of_u = ScalarExpr(nmul(Num(0.5), acc), n)
    comps = []
    for k in range(n):
        curl_term = Num(0.0)
        for i in range(n):
            anti = nsub(
                lowered_exprs[k].diff(Sym("x", i)).node,
                lowered_exprs[i].diff(Sym("x", k)).node,
            )
            curl_term = nadd(curl_term, nmul(u.comps[i].node, anti))
        total = nadd(curl_term, t_of_u.diff(Sym("x", k)).node)
        comps.append(ScalarExpr(nsub(Num(0.0), total), n))
    return ForceForm(tuple(comps))


def intermediate_residual(
    metric: MetricSpec, force: ForceForm, u: VectorFieldOnM, x: Sequence[float]
) -> np.ndarray:
    """How far the field u is from being a first integral of the Newton
    field of (metric, force) at the point x, componentwise:

        r_k = u^i (d_i u_k - d_k u_i) + d_k T(u) + A_k(x, u(x)).

    Zero at every chart point is exactly the condition that every integral
    curve of u solves the Newton equation.
    """
    n = metric.dim
    x = np.asarray(x, dtype=float)
    lowered = [ScalarExpr(node, n) for node in _lower_field_nodes(metric, u)]
    acc = Num(0.0)
    for i in range(n):
        for j in range(n):
            acc = nadd(
                acc,
                nmul(metric.entry(i, j).node, nmul(u.comps[i].node, u.comps[j].node)),
            )
    t_of_u = ScalarExpr(nmul(Num(0.5), acc), n)
    u_vals = u.values(x)
    out = np.empty(n)
    for k in range(n):
        curl = 0.0
        for i in range(n):
            curl += u_vals[i] * (
                lowered[k].diff(Sym("x", i)).eval(x)
                - lowered[i].diff(Sym("x", k)).eval(x)
            )
        out[k] = (
            curl
            + t_of_u.diff(Sym("x", k)).eval(x)
            + force.comps[k].eval(x, u_vals)
        )
    return out


# ---------------------------------------------------------------------------
# Noether charge, variation of the Lagrangian, and the central equation.
# ---------------------------------------------------------------------------


def noether_charge(metric: MetricSpec, vfield: VectorFieldOnM, s: State) -> float:
    """<theta, v> = g_ij xd^j v^i: the momentum pairing of the Liouville
    one-form with a configuration-space vector field."""
    lv = liouville(metric, s)
    return float(lv.theta @ vfield.values(s.x))


def lie_prolonged_apply(vfield: VectorFieldOnM, f: ScalarExpr) -> ScalarExpr:
    """Apply the tangent prolongation of a configuration vector field to a
    function of (x, v):

        delta f = a^i d_{x^i} f + (xd^j d_{x^j} a^i) d_{v^i} f.
    """
    n = vfield.dim
    if f.dim != n:
        raise GeometryError("expression and vector field disagree on dimension")
    acc = Num(0.0)
    for i in range(n):
        acc = nadd(acc, nmul(vfield.comps[i].node, f.diff(Sym("x", i)).node))
    for i in range(n):
        adot = Num(0.0)
        for j in range(n):
            adot = nadd(
                adot, nmul(Sym("v", j), vfield.comps[i].diff(Sym("x", j)).node)
            )
        acc = nadd(acc, nmul(adot, f.diff(Sym("v", i)).node))
    return ScalarExpr(acc, n)


def delta_L(
    metric: MetricSpec,
    potential: ScalarExpr | None,
    vfield: VectorFieldOnM,
    s: State,
) -> float:
    """The variation delta_v L of the Lagrangian L = T - U under the
    prolonged vector field, at a state.  Zero everywhere means v generates a
    variational symmetry, so its Noether charge is conserved."""
    lagrangian = metric.kinetic_energy_expr()
    if potential is not None:
        lagrangian = lagrangian - potential
    return lie_prolonged_apply(vfield, lagrangian).eval(s.x, s.v)


def zentralgleichung_residual(
    metric: MetricSpec,
    force: ForceForm,
    vfield: VectorFieldOnM,
    traj: Trajectory,
    index: int,
) -> float:
    """The central equation of mechanics along a trajectory, at an interior
    sample: d/dt <theta, delta_v> = delta_v T - <alpha, v>.  The time
    derivative is a central difference over one step each way; the identity
    holds for arbitrary vector fields, not only symmetries."""
    if not 1 <= index <= len(traj) - 2:
        raise ValueError("index must be interior to the trajectory")
    dt = traj.dt
    c_plus = noether_charge(metric, vfield, traj.state(index + 1))
    c_minus = noether_charge(metric, vfield, traj.state(index - 1))
    lhs = (c_plus - c_minus) / (2.0 * dt)
    s = traj.state(index)
    delta_t = lie_prolonged_apply(
        vfield, metric.kinetic_energy_expr()
    ).eval(s.x, s.v)
    a_vals = vfield.values(s.x)
    force_pairing = float(force.values(s.x, s.v) @ a_vals)
    return abs(lhs - (delta_t - force_pairing))


# ---------------------------------------------------------------------------
# Reversibility and the Maupertuis action.
# ---------------------------------------------------------------------------


def reversibility_residual(field: NewtonField, states: Sequence[State]) -> float:
    """max over states of ||accel(x, -v) - accel(x, v)||_inf: zero for
    velocity-independent forces, positive for magnetic ones."""
    worst = 0.0
    for s in states:
        diff = field.accel(s.x, -s.v) - field.accel(s.x, s.v)
        worst = max(worst, float(np.max(np.abs(diff))))
    return worst


def action_integral(metric: MetricSpec, traj: Trajectory) -> float:
    """The Maupertuis (abbreviated) action along a trajectory:
    integral of <theta, xd> dt = integral of 2T dt, by the trapezoid rule
    on the trajectory samples."""
    series = observable_series(metric, traj, "theta_dot")
    return float(np.trapezoid(series, traj.times))
