"""Command line interface.

Three commands operate on scenario files (see ``geomech.scenario``):

``geomech simulate scenario.toml [--out PREFIX]``
    Integrate the declared system and write PREFIX.csv (the trajectory)
    plus PREFIX.json (conservation drifts and the final state).

``geomech check scenario.toml --suite NAME [--out FILE] [--seed N]``
    Run one suite of residual checks and write a JSON report.  Suites:
    newton, recover-force, time-constraint, reduce, relativistic,
    maxwell, waves, noether.

``geomech reduce scenario.toml --mode {project,constrain} [--out FILE]``
    Eliminate the declared time coordinate and emit the reduced system
    as a new scenario file, ready to feed back into simulate or check.

Exit codes: 0 the command completed (individual residual checks may
still report ``pass: false`` in the JSON); 1 configuration error;
2 numerical abort (degenerate metric, integration blow-up, null
constraint, domain error); 3 a certified equivalence was violated,
which flags an internal inconsistency rather than a failing scenario.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

import numpy as np

from geomech.exprdsl import DomainError, EvalOverflowError, ExprError
from geomech.geometry import DegenerateMetricError, GeometryError
from geomech.dynamics import (
    ForceForm,
    IntegrationAbortError,
    NewtonField,
    delta_L,
    force_from_field,
    integrate,
    intermediate_residual,
    noether_charge,
    observable_series,
    relative_drift,
    zentralgleichung_residual,
)
from geomech.constraints import (
    ConstrainedField,
    ConstraintError,
    NullConstraintError,
    constrained_accel_crosscheck,
    infer_E0,
    modified_liouville,
    project_geodesic,
    reduce_by_time_constraint,
)
from geomech.relativity_em import (
    contact_membership_residual,
    exterior_derivative_lowered,
    maxwell_current,
    maxwell_theorem_check,
    potential_residual,
    relativistic_correction,
    relativistic_residual,
)
from geomech.waves import (
    amplitude_three_way,
    complex_amplitude_three_way,
    conservation_residual,
    kg_identity_residual,
    kg_three_way,
    phase_three_way,
    sqrt_rho_identity_residual,
    time_schrodinger_check,
)
from geomech.scenario import ConfigError, Scenario, load_scenario

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERIC = 2
EXIT_VIOLATION = 3

SUITES = (
    "newton",
    "recover-force",
    "time-constraint",
    "reduce",
    "relativistic",
    "maxwell",
    "waves",
    "noether",
)


def _check(name: str, residual: float, gate: float) -> dict:
    return {
        "name": name,
        "residual": float(residual),
        "gate": float(gate),
        "pass": bool(float(residual) <= float(gate)),
    }


def _status_check(name: str, residual: float, gate: float, status: str) -> dict:
    out = _check(name, residual, gate)
    out["status"] = status
    return out


def _conventions(scn: Scenario) -> dict:
    return {
        "index_base": "coordinates are x1..xn; scenario indices are 1-based",
        "lorentz_force": "alpha_j = v^i F_ij (velocity in the first slot)",
        "codiff_sign": float(scn.codiff_sign),
        "kinetic_energy": "T = (1/2) g_ij v^i v^j",
    }


def _spatial_indices(dim: int, i0: int) -> list:
    return [mu for mu in range(dim) if mu != i0]


def _fmt(value: float) -> str:
    return f"{value:.17g}"


# ---------------------------------------------------------------------------
# Check suites.  Each returns (checks, data, violated).
# ---------------------------------------------------------------------------


def _integrated(scn: Scenario):
    field = scn.newton_field()
    if scn.constraint is not None:
        field = ConstrainedField(field, scn.constraint)
    traj = integrate(field, scn.initial_state(), scn.run.t_end, scn.run.dt)
    return field, traj


def _suite_newton(scn: Scenario, seed: int | None):
    if scn.run is None:
        raise ConfigError("the newton suite needs a [run] section")
    field, traj = _integrated(scn)
    checks = []
    data = {"steps": len(traj) - 1, "t_end": float(traj.times[-1])}
    if scn.constraint is not None:
        series = np.array(
            [field.taudot(traj.xs[i], traj.vs[i]) for i in range(len(traj))]
        )
        checks.append(_check("constraint_rate_drift", relative_drift(series), 1e-8))
    else:
        if scn.potential is None and scn.force is None:
            drift = relative_drift(observable_series(scn.metric, traj, "theta_dot"))
            checks.append(_check("speed_rate_drift", drift, 1e-8))
        if scn.potential is not None and scn.force is None:
            drift = relative_drift(
                observable_series(scn.metric, traj, "energy", scn.potential)
            )
            checks.append(_check("energy_drift", drift, 1e-8))
    if not checks:
        raise ConfigError(
            "the newton suite has no invariant to certify here: a declared "
            "[force] conserves neither the energy nor the speed rate"
        )
    return checks, data, False


def _suite_recover_force(scn: Scenario, seed: int | None):
    if scn.vector_field is None:
        raise ConfigError("the recover-force suite needs a [vector_field] section")
    u = scn.vector_field
    recovered = force_from_field(scn.metric, u)
    points = scn.sample_points(seed)
    worst = 0.0
    for x in points:
        r = intermediate_residual(scn.metric, recovered, u, x)
        worst = max(worst, float(np.max(np.abs(r))))
    checks = [_check("roundtrip_residual", worst, 1e-10)]
    declared = scn.effective_force()
    if declared is not None:
        gap = 0.0
        for x in points:
            vals_u = u.values(x)
            diff = recovered.values(x, vals_u) - declared.values(x, vals_u)
            gap = max(gap, float(np.max(np.abs(diff))))
        checks.append(_check("declared_force_match", gap, 1e-8))
    data = {"recovered_force": [str(c) for c in recovered.comps]}
    return checks, data, False


def _suite_time_constraint(scn: Scenario, seed: int | None):
    if scn.constraint is None:
        raise ConfigError("the time-constraint suite needs a [constraint] section")
    base = scn.newton_field()
    constrained = ConstrainedField(base, scn.constraint)
    states = scn.sample_state_list(seed)
    worst = max(
        abs(constrained.constraint_rate_derivative(s.x, s.v)) for s in states
    )
    checks = [_check("constraint_rate", worst, 1e-10)]
    data = {"constraint_kind": scn.constraint.kind}
    if scn.constraint.kind != "liouville_theta":
        cross = constrained_accel_crosscheck(base, scn.constraint, states)
        checks.append(_check("multiplier_crosscheck", cross, 1e-8))
    if scn.constraint.kind == "exact_differential":
        i0 = scn.constraint.i0
        worst_ml = 0.0
        for s in states[: min(len(states), 50)]:
            s.v[i0] = 1.0
            ml = modified_liouville(scn.metric, scn.potential, i0, s)
            worst_ml = max(worst_ml, ml.residual)
        checks.append(_check("modified_liouville_structure", worst_ml, 1e-8))
    return checks, data, False


def _suite_reduce(scn: Scenario, seed: int | None):
    if scn.constraint is None or scn.constraint.kind != "exact_differential":
        raise ConfigError(
            "the reduce suite needs [constraint] kind = 'exact_differential' "
            "naming the time coordinate i0"
        )
    i0 = scn.constraint.i0
    box = list(scn.sample_config(seed).box)
    pure_geodesic = (
        scn.potential is None and scn.force is None and scn.two_form is None
    )
    no_extra_force = scn.force is None and scn.two_form is None
    checks = []
    data = {"i0": i0 + 1}
    spatial = _spatial_indices(scn.dim, i0)

    red_c = None
    if no_extra_force:
        red_c = reduce_by_time_constraint(scn.metric, i0, scn.potential, box=box)
        data["constraint_potential"] = str(red_c.potential)

    e0 = None
    if pure_geodesic:
        if scn.run is not None:
            e0 = infer_E0(scn.metric, i0, scn.initial_state(), scn.c)
        elif scn.E0 is not None:
            e0 = scn.E0
    red_p = None
    if e0 is not None:
        red_p = project_geodesic(scn.metric, i0, e0, scn.c, box=box)
        data["projection_potential"] = str(red_p.potential)
        data["E0"] = float(e0)

    states = scn.sample_state_list(seed)

    if red_c is not None:
        base = scn.newton_field()
        constrained = ConstrainedField(base, scn.constraint)
        red_field = red_c.field()
        gap = 0.0
        for s in states:
            s.v[i0] = 1.0
            full = constrained.accel(s.x, s.v)[spatial]
            rs = red_c.project_state(s)
            gap = max(gap, float(np.max(np.abs(full - red_field.accel(rs.x, rs.v)))))
        checks.append(_check("constraint_accel_match", gap, 1e-12))

    if red_p is not None:
        geo = NewtonField(scn.metric)
        red_field = red_p.field()
        gap = 0.0
        for s in states:
            g00 = scn.metric.entry(i0, i0).eval(s.x)
            s.v[i0] = e0 / (scn.c * g00)
            full = geo.accel(s.x, s.v)[spatial]
            rs = red_p.project_state(s)
            gap = max(gap, float(np.max(np.abs(full - red_field.accel(rs.x, rs.v)))))
        checks.append(_check("projection_accel_match", gap, 1e-12))

    if scn.run is not None:
        t_end, dt = scn.run.t_end, scn.run.dt
        if red_p is not None:
            traj_full = integrate(NewtonField(scn.metric), scn.initial_state(), t_end, dt)
            start = red_p.project_state(scn.initial_state())
            traj_red = integrate(red_p.field(), start, t_end, dt)
            gap = float(np.max(np.abs(traj_full.xs[:, spatial] - traj_red.xs)))
            checks.append(_check("projection_equivalence", gap, 1e-5))
        if red_c is not None:
            s0 = scn.initial_state()
            s0.v[i0] = 1.0
            constrained = ConstrainedField(scn.newton_field(), scn.constraint)
            traj_full = integrate(constrained, s0, t_end, dt)
            traj_red = integrate(red_c.field(), red_c.project_state(s0), t_end, dt)
            gap = float(np.max(np.abs(traj_full.xs[:, spatial] - traj_red.xs)))
            checks.append(_check("constraint_equivalence", gap, 1e-6))

    if not checks:
        raise ConfigError(
            "the reduce suite found nothing to certify: declared forces rule "
            "out both reductions (projection needs a pure geodesic scenario)"
        )
    return checks, data, False


def _suite_relativistic(scn: Scenario, seed: int | None):
    force = scn.effective_force()
    if force is None:
        force = ForceForm.zero(scn.dim)
    field = NewtonField(scn.metric, force)
    states = scn.sample_state_list(seed)
    contact = contact_membership_residual(force, states)
    speed_rate = relativistic_residual(field, states)
    identity = 0.0
    for s in states:
        me = scn.metric.eval(s.x)
        rate = float(
            np.einsum("kij,k,i,j->", me.dg, s.v, s.v, s.v)
            + 2.0 * (s.v @ me.g @ field.accel(s.x, s.v))
        )
        pairing = float(force.values(s.x, s.v) @ s.v)
        identity = max(identity, abs(rate + 2.0 * pairing))
    checks = [
        _check("contact_residual", contact, 1e-12),
        _check("speed_rate_residual", speed_rate, 1e-12),
        _check("rate_identity", identity, 1e-9),
    ]
    data = {
        "relativistic": bool(speed_rate <= 1e-12),
        "contact": bool(contact <= 1e-12),
    }
    if scn.run is not None:
        corrected = relativistic_correction(field)
        traj = integrate(corrected, scn.initial_state(), scn.run.t_end, scn.run.dt)
        drift = relative_drift(observable_series(scn.metric, traj, "theta_dot"))
        checks.append(_check("corrected_conserves_speed", drift, 1e-8))
    return checks, data, False


def _suite_maxwell(scn: Scenario, seed: int | None):
    if scn.two_form is None:
        raise ConfigError("the maxwell suite needs a [two_form] section")
    points = scn.sample_points(seed)
    report = maxwell_theorem_check(
        scn.metric, scn.two_form, points, codiff_sign=scn.codiff_sign
    )
    norm_gate = 1e-6 * (1.0 + abs(report.current_norm_mean))
    checks = [
        _check("closedness", report.closedness_residual, 1e-10),
        _check("potential_of_current", report.potential_residual, 1e-10),
        _check("current_norm_constant", report.current_norm_stddev, norm_gate),
        _check("lorentz_candidate", report.lorentz_candidate_residual, 1e-8),
        _check("current_divergence", report.divergence_residual, 1e-10),
    ]
    data = report.as_dict()
    if scn.vector_potential is not None:
        match = potential_residual(scn.metric, scn.vector_potential, scn.two_form, points)
        checks.append(_check("vector_potential_matches", match, 1e-10))
        gauged = exterior_derivative_lowered(scn.metric, scn.vector_potential)
        j_direct = maxwell_current(scn.metric, scn.two_form, scn.codiff_sign)
        j_gauged = maxwell_current(scn.metric, gauged, scn.codiff_sign)
        gap = 0.0
        for x in points:
            gap = max(
                gap, float(np.max(np.abs(j_direct.values(x) - j_gauged.values(x))))
            )
        checks.append(_check("gauge_current_agreement", gap, 1e-12))
    return checks, data, report.implication_violated


def _append_three_way(checks: list, data: dict, name: str, report) -> bool:
    checks.append(
        _status_check(
            f"{name}_full",
            report.full_residual,
            report.pass_gate,
            report.full_status,
        )
    )
    statuses = dict(report.part_statuses)
    for part, value in report.part_residuals:
        label = part if part.startswith(name + "_") else f"{name}_{part}"
        checks.append(
            _status_check(label, value, report.pass_gate, statuses[part])
        )
    data[name] = report.as_dict()
    return report.implication_violated


def _suite_waves(scn: Scenario, seed: int | None):
    wave = scn.wave
    if wave.s is None and wave.w is None:
        raise ConfigError("the waves suite needs a [wave] section with S or W")
    points = scn.sample_points(seed)
    checks = []
    data = {}
    violated = False

    if wave.s is not None:
        if wave.e is not None:
            violated |= _append_three_way(
                checks,
                data,
                "phase",
                phase_three_way(scn.metric, scn.potential, wave.s, wave.e, points),
            )
        if wave.rho is not None:
            res = conservation_residual(scn.metric, wave.s, wave.rho, points)
            checks.append(_check("density_conservation", res, 1e-8))
            res = sqrt_rho_identity_residual(
                scn.metric, scn.potential, wave.s, wave.rho, points
            )
            checks.append(_check("sqrt_rho_identity", res, 1e-9))
            if wave.e is not None:
                violated |= _append_three_way(
                    checks,
                    data,
                    "amplitude",
                    amplitude_three_way(
                        scn.metric, scn.potential, wave.s, wave.rho, wave.e, points
                    ),
                )
        if wave.a_re is not None and wave.a_im is not None and wave.e is not None:
            violated |= _append_three_way(
                checks,
                data,
                "complex_amplitude",
                complex_amplitude_three_way(
                    scn.metric,
                    scn.potential,
                    wave.s,
                    wave.a_re,
                    wave.a_im,
                    wave.e,
                    points,
                ),
            )
        if wave.m is not None:
            res = kg_identity_residual(
                scn.metric, wave.s, scn.vector_potential, points
            )
            checks.append(_check("kg_identity", res, 1e-9))
            violated |= _append_three_way(
                checks,
                data,
                "klein_gordon",
                kg_three_way(
                    scn.metric, wave.s, scn.vector_potential, wave.m, points
                ),
            )

    if wave.w is not None:
        i0 = wave.i0
        if i0 is None and scn.constraint is not None and scn.constraint.kind == "exact_differential":
            i0 = scn.constraint.i0
        if i0 is None:
            raise ConfigError(
                "a [wave].W candidate needs a time coordinate: set [wave].i0 "
                "or declare an exact_differential constraint"
            )
        report = time_schrodinger_check(
            scn.metric, scn.potential, i0, wave.w, points
        )
        checks.append(_check("time_schrodinger_op", report.op_residual, 1e-8))
        checks.append(_check("time_hamilton_jacobi", report.hj_residual, 1e-8))
        checks.append(
            _check("spatial_harmonic", report.spatial_harmonic_residual, 1e-8)
        )
        data["time_schrodinger"] = report.as_dict()
        violated |= report.implication_violated

    if not checks:
        raise ConfigError(
            "the [wave] section declares no checkable combination: pair S "
            "with E, rho, a_re/a_im, or m, or give a time candidate W"
        )
    return checks, data, violated


def _suite_noether(scn: Scenario, seed: int | None):
    if scn.vector_field is None:
        raise ConfigError("the noether suite needs a [vector_field] section")
    states = scn.sample_state_list(seed)
    variation = max(
        abs(delta_L(scn.metric, scn.potential, scn.vector_field, s)) for s in states
    )
    checks = [_check("symmetry_variation", variation, 1e-12)]
    data = {"symmetry": bool(variation <= 1e-12)}
    if scn.run is not None:
        field, traj = _integrated(scn)
        charges = np.array(
            [
                noether_charge(scn.metric, scn.vector_field, traj.state(i))
                for i in range(len(traj))
            ]
        )
        checks.append(_check("charge_drift", relative_drift(charges), 1e-8))
        if len(traj) >= 3:
            force = scn.effective_force() or ForceForm.zero(scn.dim)
            interior = np.linspace(1, len(traj) - 2, num=7, dtype=int)
            worst = max(
                zentralgleichung_residual(
                    scn.metric, force, scn.vector_field, traj, int(i)
                )
                for i in interior
            )
            checks.append(_check("zentralgleichung", worst, 1e-6))
        data["charge_initial"] = float(charges[0])
        data["charge_final"] = float(charges[-1])
    return checks, data, False


_SUITE_FUNCS = {
    "newton": _suite_newton,
    "recover-force": _suite_recover_force,
    "time-constraint": _suite_time_constraint,
    "reduce": _suite_reduce,
    "relativistic": _suite_relativistic,
    "maxwell": _suite_maxwell,
    "waves": _suite_waves,
    "noether": _suite_noether,
}


# ---------------------------------------------------------------------------
# Commands.
# ---------------------------------------------------------------------------


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_check(args) -> int:
    scn = load_scenario(args.scenario)
    if args.codiff_sign is not None:
        scn = dataclasses.replace(scn, codiff_sign=float(args.codiff_sign))
    checks, data, violated = _SUITE_FUNCS[args.suite](scn, args.seed)
    code = EXIT_VIOLATION if violated else EXIT_OK
    report = {
        "suite": args.suite,
        "scenario": os.path.basename(args.scenario),
        "checks": checks,
        "data": data,
        "conventions": _conventions(scn),
        "exit": code,
    }
    _write_text(args.out, json.dumps(report, sort_keys=True, indent=2) + "\n")
    return code


def cmd_simulate(args) -> int:
    scn = load_scenario(args.scenario)
    if scn.run is None:
        raise ConfigError("simulate needs a [run] section")
    field, traj = _integrated(scn)
    prefix = args.out
    if prefix is None:
        stem = os.path.splitext(os.path.basename(args.scenario))[0]
        prefix = stem + "_run"

    n = scn.dim
    names = ["t"]
    names += [f"x{i + 1}" for i in range(n)]
    names += [f"v{i + 1}" for i in range(n)]
    names += ["T", "theta_dot"]
    if scn.potential is not None:
        names.append("H")
    lines = [",".join(names)]
    theta = observable_series(scn.metric, traj, "theta_dot")
    energy = (
        observable_series(scn.metric, traj, "energy", scn.potential)
        if scn.potential is not None
        else None
    )
    for i in range(len(traj)):
        row = [traj.times[i]]
        row += list(traj.xs[i])
        row += list(traj.vs[i])
        row += [0.5 * theta[i], theta[i]]
        if energy is not None:
            row.append(energy[i])
        lines.append(",".join(_fmt(float(v)) for v in row))
    _write_text(prefix + ".csv", "\n".join(lines) + "\n")

    drifts = {"theta_dot": relative_drift(theta)}
    if energy is not None:
        drifts["energy"] = relative_drift(energy)
    if scn.constraint is not None:
        series = np.array(
            [field.taudot(traj.xs[i], traj.vs[i]) for i in range(len(traj))]
        )
        drifts["constraint_rate"] = relative_drift(series)
    sidecar = {
        "scenario": os.path.basename(args.scenario),
        "t_end": float(traj.times[-1]),
        "dt": float(traj.dt),
        "steps": len(traj) - 1,
        "drifts": drifts,
        "final": {
            "x": [float(v) for v in traj.xs[-1]],
            "v": [float(v) for v in traj.vs[-1]],
        },
    }
    _write_text(prefix + ".json", json.dumps(sidecar, sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def _toml_matrix(rows) -> str:
    formatted = []
    for row in rows:
        cells = ", ".join(_toml_string(str(e)) for e in row)
        formatted.append(f"  [{cells}]")
    return "[\n" + ",\n".join(formatted) + ",\n]"


def _toml_string(text: str) -> str:
    if '"' in text or "\\" in text or "\n" in text:
        raise ConfigError(f"cannot serialize expression {text!r} to TOML")
    return f'"{text}"'


def cmd_reduce(args) -> int:
    scn = load_scenario(args.scenario)
    if scn.constraint is None or scn.constraint.kind != "exact_differential":
        raise ConfigError(
            "reduce needs [constraint] kind = 'exact_differential' naming "
            "the time coordinate i0"
        )
    i0 = scn.constraint.i0
    box = list(scn.sample_config(args.seed).box)
    if args.mode == "project":
        if scn.potential is not None or scn.force is not None or scn.two_form is not None:
            raise ConfigError(
                "projection reduces pure geodesic flow: remove [potential], "
                "[force], and [two_form], or use --mode constrain"
            )
        if scn.run is not None:
            e0 = infer_E0(scn.metric, i0, scn.initial_state(), scn.c)
        elif scn.E0 is not None:
            e0 = scn.E0
        else:
            raise ConfigError(
                "projection needs [constants].E0 or a [run] to infer it from"
            )
        red = project_geodesic(scn.metric, i0, e0, scn.c, box=box)
        header = (
            f"# geodesic projection of {os.path.basename(args.scenario)} "
            f"at E0 = {_fmt(e0)}, dropping x{i0 + 1}\n"
        )
    else:
        if scn.force is not None or scn.two_form is not None:
            raise ConfigError(
                "the time-constraint reduction applies to conservative "
                "scenarios: remove [force] and [two_form]"
            )
        red = reduce_by_time_constraint(scn.metric, i0, scn.potential, box=box)
        header = (
            f"# time-constraint reduction of {os.path.basename(args.scenario)}, "
            f"dropping x{i0 + 1}\n"
        )

    m = red.metric
    rows = [[m.entry(i, j) for j in range(m.dim)] for i in range(m.dim)]
    parts = [header]
    parts.append(f"[chart]\ndim = {m.dim}\n")
    parts.append(f"[metric]\ng = {_toml_matrix(rows)}\n")
    parts.append(f"[potential]\nU = {_toml_string(str(red.potential))}\n")
    if scn.run is not None:
        keep = _spatial_indices(scn.dim, i0)
        x0 = ", ".join(_fmt(float(scn.run.x0[k])) for k in keep)
        v0 = ", ".join(_fmt(float(scn.run.v0[k])) for k in keep)
        parts.append(
            "[run]\n"
            f"x0 = [{x0}]\n"
            f"v0 = [{v0}]\n"
            f"t_end = {_fmt(scn.run.t_end)}\n"
            f"dt = {_fmt(scn.run.dt)}\n"
        )
    _write_text(args.out, "\n".join(parts))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing and the entry point.
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geomech",
        description="Assemble, integrate, and certify mechanics on a chart.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="integrate a scenario and write CSV")
    p_sim.add_argument("scenario")
    p_sim.add_argument("--out", help="output prefix (writes PREFIX.csv, PREFIX.json)")
    p_sim.set_defaults(func=cmd_simulate)

    p_check = sub.add_parser("check", help="run one suite of residual checks")
    p_check.add_argument("scenario")
    p_check.add_argument("--suite", required=True, choices=SUITES)
    p_check.add_argument("--out", help="report file (default: stdout)")
    p_check.add_argument("--seed", type=int, default=None)
    p_check.add_argument(
        "--codiff-sign",
        type=float,
        default=None,
        choices=(1.0, -1.0),
        help="override the codifferential orientation",
    )
    p_check.set_defaults(func=cmd_check)

    p_red = sub.add_parser("reduce", help="eliminate the time coordinate")
    p_red.add_argument("scenario")
    p_red.add_argument("--mode", required=True, choices=("project", "constrain"))
    p_red.add_argument("--out", help="reduced scenario file (default: stdout)")
    p_red.add_argument("--seed", type=int, default=None)
    p_red.set_defaults(func=cmd_reduce)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DegenerateMetricError, IntegrationAbortError, NullConstraintError) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, EvalOverflowError) as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ConstraintError, GeometryError, ExprError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
