"""Relativistic classification of Newton fields and the electromagnetic
structure carried by a two-form.

A Newton field is called relativistic when the squared-speed pairing
thetadot = g_ij xd^i xd^j is a first integral.  Along any trajectory

    D(thetadot) = -2 A_i xd^i,

so the field is relativistic exactly when its force one-form annihilates
the velocity (a "contact" force).  The Lorentz force of a two-form F,
A_j = xd^i F_ij, is contact by antisymmetry.  A non-contact force alpha
has the contact correction alphabar = alpha + lambda theta with lambda =
-alpha(xd)/thetadot, which modifies the field the same way as the
constraint tau = theta.

On the source side, the module computes the current of a two-form through
the metric codifferential,

    J^j = g^{jk} (delta F)_k,   (delta F)_k = sign * ( -(1/w) d_i (w F^i_k) ),

with w the metric volume weight and F^i_k the once-raised components; the
divergence of J vanishes identically.  ``maxwell_theorem_check`` bundles
the classification of (F, J): whether F is closed, whether -J is a
potential field for F, whether the squared length of J is constant, and
whether J is a first-integral candidate under the Lorentz force of F.
When the first two hold, the last two are equivalent; the report flags a
violation of that equivalence, which would indicate an assembly bug.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from geomech.exprdsl import Num, ScalarExpr, Sym, nadd, ndiv, nmul, nneg, nsub, parse
from geomech.geometry import GeometryError, MetricSpec, State, divergence
from geomech.dynamics import (
    ForceForm,
    NewtonField,
    VectorFieldOnM,
    intermediate_residual,
)
from geomech.constraints import ConstrainedField, TimeConstraint

__all__ = [
    "MaxwellTheoremReport",
    "TwoForm",
    "closedness_residual",
    "contact_membership_residual",
    "corrected_force_form",
    "current_divergence_residual",
    "exterior_derivative_lowered",
    "lorentz_force_form",
    "maxwell_current",
    "maxwell_theorem_check",
    "potential_residual",
    "relativistic_correction",
    "relativistic_residual",
]

CLOSEDNESS_GATE = 1e-10
POTENTIAL_GATE = 1e-10
NORM_CONSTANT_GATE = 1e-6
LORENTZ_CANDIDATE_GATE = 1e-8


@dataclass(frozen=True)
class TwoForm:
    """An antisymmetric two-form with position-only coefficients, stored as
    the strictly upper-triangular entries F_ij (i < j, zero-based)."""

    dim: int
    entries: tuple  # of ((i, j), ScalarExpr) with i < j

    @classmethod
    def of(cls, dim: int, items: Sequence) -> "TwoForm":
        seen = {}
        for i, j, src in items:
            if not (0 <= i < dim and 0 <= j < dim):
                raise GeometryError(
                    f"two-form index pair ({i}, {j}) out of range for dimension {dim}"
                )
            if i == j:
                raise GeometryError("two-form diagonal entries are identically zero")
            expr = src if isinstance(src, ScalarExpr) else parse(str(src), dim)
            if expr.depends_on_velocity:
                raise GeometryError("two-form coefficients must be position-only")
            if i > j:
                i, j = j, i
                expr = -expr
            if (i, j) in seen:
                raise GeometryError(f"duplicate two-form entry ({i}, {j})")
            seen[(i, j)] = expr
        return cls(dim=dim, entries=tuple(sorted(seen.items())))

    def component(self, i: int, j: int) -> ScalarExpr:
        """The signed coefficient F_ij (possibly the constant zero)."""
        table = dict(self.entries)
        if (i, j) in table:
            return table[(i, j)]
        if (j, i) in table:
            return -table[(j, i)]
        return ScalarExpr(Num(0.0), self.dim)

    def values(self, x: np.ndarray) -> np.ndarray:
        """The full antisymmetric coefficient matrix at a point."""
        out = np.zeros((self.dim, self.dim))
        for (i, j), expr in self.entries:
            val = expr.eval(x)
            out[i, j] = val
            out[j, i] = -val
        return out


def lorentz_force_form(f: TwoForm) -> ForceForm:
    """The Lorentz force of the two-form: A_j = xd^i F_ij (velocity
    contracted into the first slot)."""
    n = f.dim
    comps = []
    for j in range(n):
        acc = Num(0.0)
        for i in range(n):
            acc = nadd(acc, nmul(Sym("v", i), f.component(i, j).node))
        comps.append(ScalarExpr(acc, n))
    return ForceForm(tuple(comps))


def contact_membership_residual(
    force: ForceForm, states: Sequence[State]
) -> float:
    """How far the force is from annihilating the velocity: the worst
    |A_i xd^i| over the sampled states."""
    worst = 0.0
    for s in states:
        worst = max(worst, abs(float(force.values(s.x, s.v) @ s.v)))
    return worst


def relativistic_residual(field: NewtonField, states: Sequence[State]) -> float:
    """The worst |D(thetadot)| over sampled states; zero exactly when the
    squared speed is a first integral of the field."""
    metric = field.metric
    worst = 0.0
    for s in states:
        me = metric.eval(s.x)
        a = field.accel(s.x, s.v)
        rate = float(
            np.einsum("kij,k,i,j->", me.dg, s.v, s.v, s.v)
            + 2.0 * (s.v @ me.g @ a)
        )
        worst = max(worst, abs(rate))
    return worst


def relativistic_correction(field: NewtonField) -> ConstrainedField:
    """The field with its force corrected to conserve the squared speed:
    the constraint tau = theta applied to the given field."""
    return ConstrainedField(field, TimeConstraint.liouville_theta())


def corrected_force_form(field: NewtonField) -> ForceForm:
    """The corrected force alphabar = alpha + lambda theta with lambda the
    ratio of the pairings with the velocity, lambda = -alpha(xd)/thetadot.
    The corrected force is contact by construction, and its Newton field is
    exactly the theta-constrained modification of the input field; it is
    undefined where thetadot vanishes."""
    metric = field.metric
    n = metric.dim
    pairing = Num(0.0)
    for i in range(n):
        pairing = nadd(pairing, nmul(field.force.comps[i].node, Sym("v", i)))
    theta = metric.theta_exprs()
    thetadot = Num(0.0)
    for i in range(n):
        thetadot = nadd(thetadot, nmul(theta[i].node, Sym("v", i)))
    lam = ndiv(nneg(pairing), thetadot)
    comps = []
    for k in range(n):
        comps.append(
            ScalarExpr(nadd(field.force.comps[k].node, nmul(lam, theta[k].node)), n)
        )
    return ForceForm(tuple(comps))


# ---------------------------------------------------------------------------
# Exterior calculus of the two-form and its current.
# ---------------------------------------------------------------------------


def closedness_residual(f: TwoForm, points: np.ndarray) -> float:
    """The worst component of dF over the sample points:
    (dF)_ijk = d_i F_jk + d_j F_ki + d_k F_ij for i < j < k."""
    n = f.dim
    terms = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                expr = (
                    f.component(j, k).diff(Sym("x", i))
                    + f.component(k, i).diff(Sym("x", j))
                    + f.component(i, j).diff(Sym("x", k))
                )
                terms.append(expr)
    worst = 0.0
    for x in np.atleast_2d(points):
        for t in terms:
            worst = max(worst, abs(t.eval(x)))
    return worst


def _lowered_exprs(metric: MetricSpec, u: VectorFieldOnM) -> list:
    n = metric.dim
    out = []
    for k in range(n):
        acc = Num(0.0)
        for j in range(n):
            acc = nadd(acc, nmul(metric.entry(k, j).node, u.comps[j].node))
        out.append(ScalarExpr(acc, n))
    return out


def exterior_derivative_lowered(metric: MetricSpec, u: VectorFieldOnM) -> TwoForm:
    """d(i_u T2): the exterior derivative of the one-form obtained by
    lowering the vector field with the metric."""
    n = metric.dim
    lowered = _lowered_exprs(metric, u)
    items = []
    for i in range(n):
        for j in range(i + 1, n):
            expr = lowered[j].diff(Sym("x", i)) - lowered[i].diff(Sym("x", j))
            items.append((i, j, expr))
    return TwoForm.of(n, items)


def potential_residual(
    metric: MetricSpec, u: VectorFieldOnM, f: TwoForm, points: np.ndarray
) -> float:
    """The worst gap between d(i_u T2) and F over the sample points; zero
    exactly when the lowered field is a potential one-form for F."""
    d_lowered = exterior_derivative_lowered(metric, u)
    n = metric.dim
    worst = 0.0
    for x in np.atleast_2d(points):
        for i in range(n):
            for j in range(i + 1, n):
                gap = d_lowered.component(i, j).eval(x) - f.component(i, j).eval(x)
                worst = max(worst, abs(gap))
    return worst


def maxwell_current(
    metric: MetricSpec, f: TwoForm, codiff_sign: float = 1.0
) -> VectorFieldOnM:
    """The source current of the two-form: the metric codifferential raised
    to a vector field.  With both indices raised, F^{ij} = g^{il} g^{jm}
    F_lm stays antisymmetric and the weighted coordinate divergence is the
    covariant one, so

        J^j = sign * ( -(1/w) d_i ( w F^{ij} ) ),

    with w the metric volume weight.  Antisymmetry of F^{ij} makes
    div J = 0 an identity, which ``current_divergence_residual`` certifies.
    """
    n = metric.dim
    if f.dim != n:
        raise GeometryError("two-form and metric disagree on dimension")
    w = metric.volume_weight_expr()
    comps = []
    for j in range(n):
        acc = Num(0.0)
        for i in range(n):
            # F^{ij} = g^{il} g^{jm} F_lm
            raised = Num(0.0)
            for l in range(n):
                for m in range(n):
                    if f.component(l, m).node == Num(0.0):
                        continue
                    raised = nadd(
                        raised,
                        nmul(
                            nmul(
                                metric.inverse_expr(i, l).node,
                                metric.inverse_expr(j, m).node,
                            ),
                            f.component(l, m).node,
                        ),
                    )
            flux = ScalarExpr(nmul(w.node, raised), n)
            acc = nadd(acc, flux.diff(Sym("x", i)).node)
        comps.append(ScalarExpr(nmul(Num(-codiff_sign), ndiv(acc, w.node)), n))
    return VectorFieldOnM(tuple(comps))


def current_divergence_residual(
    metric: MetricSpec, current: VectorFieldOnM, points: np.ndarray
) -> float:
    """The worst |div J| over the sample points; identically zero for any
    current produced by ``maxwell_current``."""
    worst = 0.0
    for x in np.atleast_2d(points):
        worst = max(worst, abs(divergence(metric, list(current.comps), x)))
    return worst


@dataclass(frozen=True)
class MaxwellTheoremReport:
    """The bundle of residuals classifying a two-form and its current.

    ``implication_violated`` is only ever set when both hypotheses pass
    (F closed and -J a potential field for F) yet constancy of |J|^2 and
    the first-integral property of J under the Lorentz force disagree;
    that combination cannot occur mathematically, so it flags an engine
    defect rather than a property of the input.
    """

    codiff_sign: float
    closedness_residual: float
    closed_pass: bool
    current: tuple
    potential_residual: float
    potential_pass: bool
    current_norm_mean: float
    current_norm_stddev: float
    norm_constant_pass: bool
    lorentz_candidate_residual: float
    lorentz_candidate_pass: bool
    divergence_residual: float
    hypotheses_pass: bool
    implication_violated: bool

    def as_dict(self) -> dict:
        return {
            "codiff_sign": self.codiff_sign,
            "closedness_residual": self.closedness_residual,
            "closed_pass": self.closed_pass,
            "current": list(self.current),
            "potential_residual": self.potential_residual,
            "potential_pass": self.potential_pass,
            "current_norm_mean": self.current_norm_mean,
            "current_norm_stddev": self.current_norm_stddev,
            "norm_constant_pass": self.norm_constant_pass,
            "lorentz_candidate_residual": self.lorentz_candidate_residual,
            "lorentz_candidate_pass": self.lorentz_candidate_pass,
            "divergence_residual": self.divergence_residual,
            "hypotheses_pass": self.hypotheses_pass,
            "implication_violated": self.implication_violated,
        }


def maxwell_theorem_check(
    metric: MetricSpec,
    f: TwoForm,
    points: np.ndarray,
    codiff_sign: float = 1.0,
) -> MaxwellTheoremReport:
    """Evaluate the field-source classification of a two-form at sample
    points.  See ``MaxwellTheoremReport`` for the meaning of the items."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    closed_res = closedness_residual(f, points)
    closed_pass = closed_res <= CLOSEDNESS_GATE

    current = maxwell_current(metric, f, codiff_sign)
    minus_current = VectorFieldOnM(tuple(-c for c in current.comps))
    pot_res = potential_residual(metric, minus_current, f, points)
    pot_pass = pot_res <= POTENTIAL_GATE

    norms = []
    for x in points:
        vals = current.values(x)
        me = metric.eval(x)
        norms.append(float(vals @ me.g @ vals))
    norm_mean = float(np.mean(norms))
    norm_std = float(np.std(norms))
    norm_pass = norm_std <= NORM_CONSTANT_GATE * (1.0 + abs(norm_mean))

    force = lorentz_force_form(f)
    lorentz_res = 0.0
    for x in points:
        r = intermediate_residual(metric, force, current, x)
        lorentz_res = max(lorentz_res, float(np.max(np.abs(r))))
    lorentz_pass = lorentz_res <= LORENTZ_CANDIDATE_GATE

    div_res = current_divergence_residual(metric, current, points)

    hypotheses = closed_pass and pot_pass
    violated = hypotheses and (norm_pass != lorentz_pass)
    return MaxwellTheoremReport(
        codiff_sign=float(codiff_sign),
        closedness_residual=float(closed_res),
        closed_pass=bool(closed_pass),
        current=tuple(str(c) for c in current.comps),
        potential_residual=float(pot_res),
        potential_pass=bool(pot_pass),
        current_norm_mean=norm_mean,
        current_norm_stddev=norm_std,
        norm_constant_pass=bool(norm_pass),
        lorentz_candidate_residual=float(lorentz_res),
        lorentz_candidate_pass=bool(lorentz_pass),
        divergence_residual=float(div_res),
        hypotheses_pass=bool(hypotheses),
        implication_violated=bool(violated),
    )
