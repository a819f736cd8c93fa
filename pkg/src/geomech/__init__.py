"""geomech: a single-chart geometric mechanics engine.

The package assembles the Newton equation of a pseudo-Riemannian metric with
an applied force one-form, integrates it, constrains it (time constraints,
relativistic correction), reduces it (geodesic projection, time-constraint
reduction), and numerically certifies the structural identities tying those
pieces together: force-law recovery from first integrals, Lorentz force and
Maxwell source structure, Hamilton-Jacobi / Schroedinger / Klein-Gordon
operator identities, and Noether charges.

Everything is built from one small symbolic layer (`geomech.exprdsl`):
metrics, forces, currents and wave data are expressions in chart coordinates
``x1..xn`` and velocities ``v1..vn``, differentiated exactly and evaluated
deterministically.
"""

from geomech.exprdsl import (
    DomainError,
    EvalOverflowError,
    ExprError,
    ParseError,
    ScalarExpr,
    parse,
)
from geomech.geometry import (
    ChartSpec,
    DegenerateMetricError,
    GeometryError,
    MetricSpec,
    State,
)

__all__ = [
    "ChartSpec",
    "DegenerateMetricError",
    "DomainError",
    "EvalOverflowError",
    "ExprError",
    "GeometryError",
    "MetricSpec",
    "ParseError",
    "ScalarExpr",
    "State",
    "parse",
]

__version__ = "0.1.0"
