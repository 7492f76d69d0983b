"""Scenario configuration: JSON documents, validation and defaults.

A config is one JSON object with a ``scenario`` key and one section per
parameter group. Every problem found is reported at once, each message naming
``section.field``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

from .contact import ContactParams
from .control import Gains
from .dynamics import InertiaParams
from .errors import ConfigError
from .kinematics import GeometryParams

SCENARIOS = ("bouncing_ball", "spacecraft_debris")


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"
    dt: float = 1e-3
    t_end: float = 20.0
    decimation: int = 1

    def __post_init__(self):
        if self.method != "rk4":
            raise ValueError("only the fixed-step 'rk4' method is available")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end >= 0:
            raise ValueError("t_end must be non-negative")
        if self.decimation < 1:
            raise ValueError("decimation must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(math.floor(self.t_end / self.dt + 1e-9))


@dataclass(frozen=True)
class BallParams:
    mass: float = 1.0       # [kg]
    force: float = 1.0      # constant downward force [N]
    x0: float = 0.0
    y0: float = 1.0         # release height [m]
    vx0: float = 0.0
    vy0: float = 0.0
    radius: float = 0.0     # 0 models a point ball
    ground_y: float = 0.0


@dataclass(frozen=True)
class TrajectoryConfig:
    t_f: float = 20.0
    d_f_scale: float = 1.0
    d_f_sign: float = -1.0
    target: tuple[float, float] = (0.0, 0.0)


@dataclass(frozen=True)
class DebrisConfig:
    x0: float = 7.0
    y0: float = 5.0
    vx0: float = 0.0
    vy0: float = 0.0
    attraction: float = 1.0  # [N], toward the link II centre of mass


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    geometry: GeometryParams = field(default_factory=GeometryParams)
    inertia: InertiaParams = field(default_factory=InertiaParams)
    contact: ContactParams = field(default_factory=ContactParams)
    gains: Gains = field(default_factory=Gains)
    trajectory: TrajectoryConfig = field(default_factory=TrajectoryConfig)
    debris: DebrisConfig = field(default_factory=DebrisConfig)
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    ball: BallParams = field(default_factory=BallParams)
    initial_joint_rates: tuple[float, float] | None = None  # None: match the reference
    saturation: float | None = None
    source: str | None = None


# JSON field name -> (attribute, required)
_GEOMETRY = {
    "R": ("R", True), "d": ("d", True), "l_1": ("l1", True), "l_2": ("l2", True),
    "theta_10": ("theta10", True), "theta_20": ("theta20", True), "omega_0": ("omega0", True),
    "x_0": (None, False), "y_0": (None, False),
}
_INERTIA = {
    "m_1": ("m1", True), "m_2": ("m2", True), "J_1": ("J1", True), "J_2": ("J2", True),
    "m_d": ("md", True), "r_d": ("rd", True),
}
_CONTACT = {"kc": ("kc", True), "cc": ("cc", True), "mu": ("mu", True), "vs": ("vs", True)}
_TRAJECTORY = {
    "t_f": ("t_f", True), "d_f_scale": ("d_f_scale", False), "d_f_sign": ("d_f_sign", False),
    "target": ("target", False),
}
_DEBRIS = {
    "x_d0": ("x0", True), "y_d0": ("y0", True), "vx_d0": ("vx0", False),
    "vy_d0": ("vy0", False), "attraction": ("attraction", False),
}
_INTEGRATOR = {
    "method": ("method", False), "dt": ("dt", True), "t_end": ("t_end", True),
    "decimation": ("decimation", False),
}
_BALL = {
    "mass": ("mass", True), "force": ("force", True), "x0": ("x0", False), "y0": ("y0", True),
    "vx0": ("vx0", False), "vy0": ("vy0", False), "radius": ("radius", False),
    "ground_y": ("ground_y", False),
}

_SECTIONS = {
    "spacecraft_debris": {
        "geometry": _GEOMETRY, "inertia": _INERTIA, "contact": _CONTACT, "gains": None,
        "trajectory": _TRAJECTORY, "debris": _DEBRIS, "integrator": _INTEGRATOR,
        "initial": None, "control": None,
    },
    "bouncing_ball": {"ball": _BALL, "contact": _CONTACT, "integrator": _INTEGRATOR},
}
_OPTIONAL_SECTIONS = {"initial", "control"}


class _Collector:
    def __init__(self):
        self.violations: list[str] = []

    def add(self, where: str, msg: str):
        self.violations.append(f"{where}: {msg}")


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _read_section(doc: dict, name: str, schema: dict, out: _Collector) -> dict | None:
    sec = doc.get(name)
    if sec is None:
        out.add(name, "missing required section")
        return None
    if not isinstance(sec, dict):
        out.add(name, "must be an object")
        return None
    values = {}
    for key in sec:
        if key not in schema:
            out.add(f"{name}.{key}", "unknown field")
    for key, (attr, required) in schema.items():
        if key not in sec:
            if required:
                out.add(f"{name}.{key}", "missing required field")
            continue
        v = sec[key]
        if key in ("method",):
            if not isinstance(v, str):
                out.add(f"{name}.{key}", "must be a string")
                continue
        elif key == "target":
            if not (isinstance(v, list) and len(v) == 2 and all(_is_number(x) for x in v)):
                out.add(f"{name}.{key}", "must be a list of two numbers")
                continue
            v = (float(v[0]), float(v[1]))
        elif not _is_number(v):
            out.add(f"{name}.{key}", "must be a finite number")
            continue
        values[key] = v
    return values


def _positive(sec: str, vals: dict, keys, out: _Collector, strict: bool = True):
    ok = True
    for k in keys:
        if k in vals and not (vals[k] > 0 if strict else vals[k] >= 0):
            out.add(f"{sec}.{k}", "must be positive" if strict else "must be non-negative")
            ok = False
    return ok


def _build(cls, vals: dict, schema: dict, sec: str, out: _Collector):
    if any(v.startswith(f"{sec}.") for v in out.violations):
        return None  # already reported field by field
    kwargs = {schema[k][0]: v for k, v in vals.items() if schema[k][0] is not None}
    try:
        return cls(**kwargs)
    except (ValueError, TypeError) as exc:
        out.add(sec, str(exc))
        return None


def _gains(doc: dict, out: _Collector) -> Gains | None:
    sec = doc.get("gains")
    if sec is None:
        out.add("gains", "missing required section")
        return None
    mats = {}
    for key in sec:
        if key not in ("K_p", "K_d"):
            out.add(f"gains.{key}", "unknown field")
    for key in ("K_p", "K_d"):
        if key not in sec:
            out.add(f"gains.{key}", "missing required field")
            continue
        v = sec[key]
        flat = v if not isinstance(v, list) else [x for row in v for x in (row if isinstance(row, list) else [row])]
        flat = flat if isinstance(flat, list) else [flat]
        if not all(_is_number(x) for x in flat):
            out.add(f"gains.{key}", "must be a number, a diagonal [a, b], or a 2x2 matrix")
            continue
        mats[key] = v
    if len(mats) < 2:
        return None
    try:
        return Gains(mats["K_p"], mats["K_d"])
    except (ValueError, TypeError) as exc:
        out.add("gains", str(exc))
        return None


def parse_config(doc, source: str | None = None) -> ScenarioConfig:
    """Validate a config document and build a :class:`ScenarioConfig`.

    Raises :class:`ConfigError` listing every violation.
    """
    out = _Collector()
    if not isinstance(doc, dict):
        raise ConfigError(["<root>: config must be a JSON object"])
    scenario = doc.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError([f"scenario: must be one of {', '.join(SCENARIOS)} (got {scenario!r})"])
    sections = _SECTIONS[scenario]
    for key in doc:
        if key != "scenario" and key not in sections:
            out.add(key, "unknown section")

    kwargs: dict = {"scenario": scenario, "source": source}
    contact = _read_section(doc, "contact", _CONTACT, out)
    integ = _read_section(doc, "integrator", _INTEGRATOR, out)
    if contact is not None:
        _positive("contact", contact, ("kc", "vs"), out)
        _positive("contact", contact, ("cc", "mu"), out, strict=False)
        kwargs["contact"] = _build(ContactParams, contact, _CONTACT, "contact", out)
    if integ is not None:
        _positive("integrator", integ, ("dt", "decimation"), out)
        _positive("integrator", integ, ("t_end",), out, strict=False)
        if "decimation" in integ and integ["decimation"] != int(integ["decimation"]):
            out.add("integrator.decimation", "must be an integer")
        else:
            if "decimation" in integ:
                integ["decimation"] = int(integ["decimation"])
            kwargs["integrator"] = _build(IntegratorConfig, integ, _INTEGRATOR, "integrator", out)

    if scenario == "bouncing_ball":
        ball = _read_section(doc, "ball", _BALL, out)
        if ball is not None:
            _positive("ball", ball, ("mass",), out)
            _positive("ball", ball, ("radius",), out, strict=False)
            kwargs["ball"] = _build(BallParams, ball, _BALL, "ball", out)
    else:
        geo = _read_section(doc, "geometry", _GEOMETRY, out)
        if geo is not None:
            ok = _positive("geometry", geo, ("d", "l_1", "l_2"), out)
            if ok and "R" in geo and "d" in geo and not geo["R"] > geo["d"]:
                out.add("geometry.R", "must exceed d")
                ok = False
            if "R" in geo:
                # the base starts at theta0 = 0, so its initial COM position is (R, 0)
                if "x_0" in geo and geo["x_0"] != geo["R"]:
                    out.add("geometry.x_0", f"must equal R ({geo['R']}) since the base starts at theta0 = 0")
                if "y_0" in geo and geo["y_0"] != 0:
                    out.add("geometry.y_0", "must be 0 since the base starts at theta0 = 0")
            if ok:
                kwargs["geometry"] = _build(GeometryParams, geo, _GEOMETRY, "geometry", out)
        inertia = _read_section(doc, "inertia", _INERTIA, out)
        if inertia is not None and _positive("inertia", inertia, list(_INERTIA), out):
            kwargs["inertia"] = _build(InertiaParams, inertia, _INERTIA, "inertia", out)
        traj = _read_section(doc, "trajectory", _TRAJECTORY, out)
        if traj is not None:
            _positive("trajectory", traj, ("t_f", "d_f_scale"), out)
            if "d_f_sign" in traj and traj["d_f_sign"] not in (1, -1):
                out.add("trajectory.d_f_sign", "must be +1 or -1")
            kwargs["trajectory"] = _build(TrajectoryConfig, traj, _TRAJECTORY, "trajectory", out)
        deb = _read_section(doc, "debris", _DEBRIS, out)
        if deb is not None:
            _positive("debris", deb, ("attraction",), out, strict=False)
            kwargs["debris"] = _build(DebrisConfig, deb, _DEBRIS, "debris", out)
        kwargs["gains"] = _gains(doc, out)

        init = doc.get("initial", {})
        rates = init.get("joint_rates", "reference") if isinstance(init, dict) else None
        if not isinstance(init, dict):
            out.add("initial", "must be an object")
        else:
            for key in init:
                if key != "joint_rates":
                    out.add(f"initial.{key}", "unknown field")
            if rates != "reference":
                if isinstance(rates, list) and len(rates) == 2 and all(_is_number(x) for x in rates):
                    kwargs["initial_joint_rates"] = (float(rates[0]), float(rates[1]))
                else:
                    out.add("initial.joint_rates", "must be \"reference\" or a list of two numbers")
        ctrl = doc.get("control", {})
        if not isinstance(ctrl, dict):
            out.add("control", "must be an object")
        else:
            for key in ctrl:
                if key != "saturation":
                    out.add(f"control.{key}", "unknown field")
            sat = ctrl.get("saturation")
            if sat is not None:
                if not (_is_number(sat) and sat > 0):
                    out.add("control.saturation", "must be a positive number or null")
                else:
                    kwargs["saturation"] = float(sat)

    if out.violations:
        raise ConfigError(out.violations)
    return ScenarioConfig(**kwargs)


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError([f"{path}: cannot read config ({exc.strerror})"]) from None
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}:{exc.lineno}:{exc.colno}: invalid JSON ({exc.msg})"]) from None
    return parse_config(doc, source=str(path))


def default_document(scenario: str) -> dict:
    if scenario not in SCENARIOS:
        raise ConfigError([f"scenario: must be one of {', '.join(SCENARIOS)} (got {scenario!r})"])
    text = resources.files("debrissim.data").joinpath(f"{scenario}.json").read_text()
    return json.loads(text)


def default_config(scenario: str) -> ScenarioConfig:
    return parse_config(default_document(scenario), source=f"<default:{scenario}>")


def with_overrides(config: ScenarioConfig, dt: float | None = None) -> ScenarioConfig:
    if dt is None:
        return config
    if not (math.isfinite(dt) and dt > 0):
        raise ConfigError([f"integrator.dt: must be positive (got {dt!r})"])

    return replace(config, integrator=replace(config.integrator, dt=dt))
