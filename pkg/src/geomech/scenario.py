"""Scenario files: a TOML description of one mechanical setup.

A scenario declares a chart and metric, and optionally a potential, an
applied force, a two-form (whose Lorentz force is added to the applied
force), a vector potential, a candidate first-integral vector field, a
time constraint, wave data, a run configuration, constants, and a sample
region.  Indices that name coordinates in scenario files (two-form entry
pairs, the time index ``i0``) are 1-based, matching the DSL symbols
x1..xn; the Python API is 0-based throughout.

Example::

    [chart]
    dim = 2

    [metric]
    g = [["1", "0"], ["0", "x1^2"]]

    [potential]
    U = "-1/x1"

    [run]
    x0 = [1.0, 0.0]
    v0 = [0.0, 1.0]
    t_end = 10.0
    dt = 1e-3

All sections other than [chart] and [metric] are optional; each suite of
checks states what it needs and fails with a configuration error when the
scenario lacks it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import numpy as np

from geomech.exprdsl import ExprError, ScalarExpr, parse
from geomech.geometry import GeometryError, MetricSpec, State
from geomech.dynamics import ForceForm, NewtonField, VectorFieldOnM
from geomech.constraints import ConstraintError, TimeConstraint
from geomech.relativity_em import TwoForm, lorentz_force_form
from geomech.sampling import sample_box, sample_states

__all__ = ["ConfigError", "RunConfig", "SampleConfig", "Scenario", "load_scenario"]

_SECTIONS = {
    "chart",
    "metric",
    "potential",
    "force",
    "two_form",
    "vector_potential",
    "vector_field",
    "constraint",
    "wave",
    "run",
    "constants",
    "sample",
}

_WAVE_KEYS = {"S", "rho", "a_re", "a_im", "W", "E", "m", "i0"}


class ConfigError(ValueError):
    """A scenario file is malformed or inconsistent."""


@dataclass(frozen=True)
class RunConfig:
    x0: np.ndarray
    v0: np.ndarray
    t_end: float
    dt: float


@dataclass(frozen=True)
class SampleConfig:
    box: tuple
    vbox: tuple
    count: int
    seed: int


@dataclass(frozen=True)
class WaveConfig:
    s: ScalarExpr | None = None
    rho: ScalarExpr | None = None
    a_re: ScalarExpr | None = None
    a_im: ScalarExpr | None = None
    w: ScalarExpr | None = None
    e: float | None = None
    m: float | None = None
    i0: int | None = None  # 0-based


@dataclass(frozen=True)
class Scenario:
    """A loaded scenario: parsed objects ready for the engine."""

    path: str
    dim: int
    metric: MetricSpec
    potential: ScalarExpr | None = None
    force: ForceForm | None = None
    two_form: TwoForm | None = None
    vector_potential: VectorFieldOnM | None = None
    vector_field: VectorFieldOnM | None = None
    constraint: TimeConstraint | None = None
    wave: WaveConfig = field(default_factory=WaveConfig)
    run: RunConfig | None = None
    c: float = 1.0
    E0: float | None = None
    codiff_sign: float = 1.0
    sample: SampleConfig | None = None

    def effective_force(self) -> ForceForm | None:
        """The total applied force one-form: the potential differential,
        the declared components, and the Lorentz force of the two-form,
        whichever are present."""
        parts = []
        if self.potential is not None:
            parts.append(ForceForm.from_potential(self.potential))
        if self.force is not None:
            parts.append(self.force)
        if self.two_form is not None:
            parts.append(lorentz_force_form(self.two_form))
        if not parts:
            return None
        total = parts[0]
        for extra in parts[1:]:
            total = ForceForm(
                tuple(a + b for a, b in zip(total.comps, extra.comps))
            )
        return total

    def newton_field(self) -> NewtonField:
        return NewtonField(self.metric, self.effective_force())

    def initial_state(self) -> State:
        if self.run is None:
            raise ConfigError("this operation needs a [run] section")
        return State(self.run.x0, self.run.v0)

    def sample_config(self, seed: int | None = None) -> SampleConfig:
        base = self.sample
        if base is None:
            span = tuple((-1.0, 1.0) for _ in range(self.dim))
            base = SampleConfig(box=span, vbox=span, count=50, seed=0)
        if seed is not None:
            base = SampleConfig(
                box=base.box, vbox=base.vbox, count=base.count, seed=seed
            )
        return base

    def sample_points(self, seed: int | None = None) -> np.ndarray:
        cfg = self.sample_config(seed)
        return sample_box(list(cfg.box), cfg.count, cfg.seed)

    def sample_state_list(self, seed: int | None = None) -> list:
        cfg = self.sample_config(seed)
        return sample_states(
            list(cfg.box), cfg.count, seed=cfg.seed, vbox=list(cfg.vbox)
        )


def _require(table: dict, key: str, kind, where: str):
    if key not in table:
        raise ConfigError(f"missing key {key!r} in [{where}]")
    value = table[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"[{where}].{key} must be a number")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"[{where}].{key} must be an integer")
        return value
    if not isinstance(value, kind):
        raise ConfigError(f"[{where}].{key} has the wrong type")
    return value


def _parse_expr(source, dim: int, where: str) -> ScalarExpr:
    if not isinstance(source, str):
        source = str(source)
    try:
        return parse(source, dim)
    except ExprError as exc:
        raise ConfigError(f"cannot parse {where}: {exc}") from exc


def _float_list(raw, length: int, where: str) -> np.ndarray:
    if not isinstance(raw, list) or len(raw) != length:
        raise ConfigError(f"{where} must be a list of {length} numbers")
    out = []
    for v in raw:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"{where} must contain numbers only")
        out.append(float(v))
    return np.array(out)


def _index_1based(value, dim: int, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where} must be an integer")
    if not 1 <= value <= dim:
        raise ConfigError(
            f"{where} is {value}, outside the coordinate range 1..{dim}"
        )
    return value - 1


def load_scenario(path: str) -> Scenario:
    """Read and validate a scenario file."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"scenario file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc

    unknown = set(raw) - _SECTIONS
    if unknown:
        raise ConfigError(
            f"unknown scenario sections: {', '.join(sorted(unknown))}"
        )
    if "chart" not in raw or "metric" not in raw:
        raise ConfigError("a scenario needs [chart] and [metric] sections")

    dim = _require(raw["chart"], "dim", int, "chart")
    if dim < 1:
        raise ConfigError("[chart].dim must be at least 1")

    g_rows = _require(raw["metric"], "g", list, "metric")
    if len(g_rows) != dim or any(
        not isinstance(row, list) or len(row) != dim for row in g_rows
    ):
        raise ConfigError(f"[metric].g must be a {dim}x{dim} matrix of expressions")
    try:
        metric = MetricSpec(
            [
                [_parse_expr(entry, dim, f"[metric].g[{i+1}][{j+1}]") for j, entry in enumerate(row)]
                for i, row in enumerate(g_rows)
            ]
        )
    except GeometryError as exc:
        raise ConfigError(f"invalid metric: {exc}") from exc

    potential = None
    if "potential" in raw:
        potential = _parse_expr(
            _require(raw["potential"], "U", str, "potential"), dim, "[potential].U"
        )
        if potential.depends_on_velocity:
            raise ConfigError("[potential].U must be position-only")

    force = None
    if "force" in raw:
        comps = _require(raw["force"], "components", list, "force")
        if len(comps) != dim:
            raise ConfigError(f"[force].components must list {dim} expressions")
        force = ForceForm.of(
            [_parse_expr(c, dim, "[force].components") for c in comps], dim
        )

    two_form = None
    if "two_form" in raw:
        entries = _require(raw["two_form"], "entries", list, "two_form")
        items = []
        for entry in entries:
            if not isinstance(entry, list) or len(entry) != 3:
                raise ConfigError(
                    "[two_form].entries must contain [i, j, expression] triples"
                )
            i = _index_1based(entry[0], dim, "[two_form] entry index")
            j = _index_1based(entry[1], dim, "[two_form] entry index")
            items.append((i, j, _parse_expr(entry[2], dim, "[two_form] entry")))
        try:
            two_form = TwoForm.of(dim, items)
        except GeometryError as exc:
            raise ConfigError(f"invalid two-form: {exc}") from exc

    vector_potential = None
    if "vector_potential" in raw:
        comps = _require(raw["vector_potential"], "components", list, "vector_potential")
        if len(comps) != dim:
            raise ConfigError(
                f"[vector_potential].components must list {dim} expressions"
            )
        try:
            vector_potential = VectorFieldOnM.of(
                [_parse_expr(c, dim, "[vector_potential]") for c in comps], dim
            )
        except GeometryError as exc:
            raise ConfigError(str(exc)) from exc

    vector_field = None
    if "vector_field" in raw:
        comps = _require(raw["vector_field"], "components", list, "vector_field")
        if len(comps) != dim:
            raise ConfigError(f"[vector_field].components must list {dim} expressions")
        try:
            vector_field = VectorFieldOnM.of(
                [_parse_expr(c, dim, "[vector_field]") for c in comps], dim
            )
        except GeometryError as exc:
            raise ConfigError(str(exc)) from exc

    constraint = None
    if "constraint" in raw:
        kind = _require(raw["constraint"], "kind", str, "constraint")
        if kind == "exact_differential":
            i0 = _index_1based(
                raw["constraint"].get("i0", 1), dim, "[constraint].i0"
            )
            constraint = TimeConstraint.exact_differential(i0)
        elif kind == "liouville_theta":
            constraint = TimeConstraint.liouville_theta()
        elif kind == "general":
            comps = _require(raw["constraint"], "components", list, "constraint")
            if len(comps) != dim:
                raise ConfigError(
                    f"[constraint].components must list {dim} expressions"
                )
            try:
                constraint = TimeConstraint.general(
                    [_parse_expr(c, dim, "[constraint]") for c in comps], dim
                )
            except ConstraintError as exc:
                raise ConfigError(str(exc)) from exc
        else:
            raise ConfigError(
                "constraint kind must be exact_differential, liouville_theta, "
                f"or general; got {kind!r}"
            )

    wave = WaveConfig()
    if "wave" in raw:
        table = raw["wave"]
        unknown_wave = set(table) - _WAVE_KEYS
        if unknown_wave:
            raise ConfigError(
                f"unknown [wave] keys: {', '.join(sorted(unknown_wave))}"
            )

        def opt_expr(key: str) -> ScalarExpr | None:
            if key not in table:
                return None
            e = _parse_expr(table[key], dim, f"[wave].{key}")
            if e.depends_on_velocity:
                raise ConfigError(f"[wave].{key} must be position-only")
            return e

        wave = WaveConfig(
            s=opt_expr("S"),
            rho=opt_expr("rho"),
            a_re=opt_expr("a_re"),
            a_im=opt_expr("a_im"),
            w=opt_expr("W"),
            e=_require(table, "E", float, "wave") if "E" in table else None,
            m=_require(table, "m", float, "wave") if "m" in table else None,
            i0=(
                _index_1based(table["i0"], dim, "[wave].i0")
                if "i0" in table
                else None
            ),
        )

    run = None
    if "run" in raw:
        table = raw["run"]
        run = RunConfig(
            x0=_float_list(table.get("x0"), dim, "[run].x0"),
            v0=_float_list(table.get("v0"), dim, "[run].v0"),
            t_end=_require(table, "t_end", float, "run"),
            dt=_require(table, "dt", float, "run"),
        )
        if run.t_end <= 0 or run.dt <= 0 or run.dt > run.t_end:
            raise ConfigError("[run] needs 0 < dt <= t_end")

    c = 1.0
    e0 = None
    codiff_sign = 1.0
    if "constants" in raw:
        table = raw["constants"]
        unknown_const = set(table) - {"c", "E0", "codiff_sign"}
        if unknown_const:
            raise ConfigError(
                f"unknown [constants] keys: {', '.join(sorted(unknown_const))}"
            )
        if "c" in table:
            c = _require(table, "c", float, "constants")
            if c <= 0:
                raise ConfigError("[constants].c must be positive")
        if "E0" in table:
            e0 = _require(table, "E0", float, "constants")
        if "codiff_sign" in table:
            codiff_sign = _require(table, "codiff_sign", float, "constants")
            if codiff_sign not in (1.0, -1.0):
                raise ConfigError("[constants].codiff_sign must be 1 or -1")

    sample = None
    if "sample" in raw:
        table = raw["sample"]
        unknown_sample = set(table) - {"box", "vbox", "count", "seed"}
        if unknown_sample:
            raise ConfigError(
                f"unknown [sample] keys: {', '.join(sorted(unknown_sample))}"
            )
        box_raw = _require(table, "box", list, "sample")
        if len(box_raw) != dim:
            raise ConfigError(f"[sample].box must list {dim} intervals")
        box = tuple(
            tuple(_float_list(pair, 2, "[sample].box interval")) for pair in box_raw
        )
        if "vbox" in table:
            vbox_raw = table["vbox"]
            if not isinstance(vbox_raw, list) or len(vbox_raw) != dim:
                raise ConfigError(f"[sample].vbox must list {dim} intervals")
            vbox = tuple(
                tuple(_float_list(pair, 2, "[sample].vbox interval"))
                for pair in vbox_raw
            )
        else:
            vbox = tuple((-1.0, 1.0) for _ in range(dim))
        count = table.get("count", 50)
        if isinstance(count, bool) or not isinstance(count, int) or count < 1:
            raise ConfigError("[sample].count must be a positive integer")
        seed = table.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ConfigError("[sample].seed must be a non-negative integer")
        for lo, hi in box + vbox:
            if not lo < hi:
                raise ConfigError("[sample] intervals need low < high")
        sample = SampleConfig(box=box, vbox=vbox, count=count, seed=seed)

    return Scenario(
        path=path,
        dim=dim,
        metric=metric,
        potential=potential,
        force=force,
        two_form=two_form,
        vector_potential=vector_potential,
        vector_field=vector_field,
        constraint=constraint,
        wave=wave,
        run=run,
        c=c,
        E0=e0,
        codiff_sign=codiff_sign,
        sample=sample,
    )
