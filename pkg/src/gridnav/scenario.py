"""Scenario files: one text file bundling map, key points, bearings,
obstacle schedule and every tunable model parameter.

Layout (``#`` starts a comment line, blank lines are ignored)::

    [map]
    00000
    01100
    00000

    [keypoints]
    origin = 0,0
    2,4
    0,4

    [bearings]
    forward = 0
    right = 90
    backward = 180
    left = 270

    [obstacles]
    at 1,4 from 5 until 30
    moving 2,1@3 2,2@6 until 20

    [control]
    turn_step_deg = 5

Optional key = value sections: [sa], [control], [ultrasonic], [encoder],
[drift], [compass], [bearings], [mission].  Omitted keys take defaults.

Cells are ``row,col`` with 0-based indices.  ``auto`` selects the computed
default for fields that have one.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional

from .control import ControlConfig, RobotModels
from .errors import GridNavError, ParseError, ValidationError
from .gridmap import DEFAULT_CELL_SIZE_CM, Cell, GridMap, KeyPointSet, format_map, parse_map
from .robot_model import BearingConfig, DriftModel, EncoderSpec, UltrasonicModel
from .sim import MovingObstacle, ObstacleSchedule, TimedObstacle
from .tour import SaConfig


@dataclass(frozen=True)
class Scenario:
    grid: GridMap
    keypoints: KeyPointSet
    bearings: BearingConfig = BearingConfig()
    obstacles: ObstacleSchedule = ObstacleSchedule()
    sa: SaConfig = SaConfig()
    control: ControlConfig = ControlConfig()
    models: RobotModels = RobotModels()
    wait_timeout_ticks: int = 10
    detection_threshold_cm: float = 100.0
    tick_budget: Optional[int] = None
    initial_heading_deg: Optional[float] = None
    defaults_applied: tuple = field(default=(), compare=False)

    def __post_init__(self):
        cell = self.grid.cell_size_cm
        self.keypoints.validate_on(self.grid)
        self.obstacles.validate_on(self.grid)
        if self.wait_timeout_ticks < 0:
            raise ValidationError("mission.wait_timeout_ticks must be non-negative")
        if self.detection_threshold_cm < cell:
            raise ValidationError(
                f"mission.detection_threshold_cm={self.detection_threshold_cm:g} cannot see an "
                f"obstacle one cell ({cell:g} cm) ahead"
            )
        if self.models.ultrasonic.reliable_range_cm < cell:
            raise ValidationError("ultrasonic.reliable_range_cm must cover at least one cell")
        if self.tick_budget is not None and self.tick_budget < 1:
            raise ValidationError("mission.tick_budget must be at least 1")
        if self.initial_heading_deg is not None and not 0 <= self.initial_heading_deg < 360:
            raise ValidationError("mission.initial_heading_deg must lie in [0, 360)")


# ---------------------------------------------------------------------------
# value codecs
# ---------------------------------------------------------------------------

_AUTO = "auto"


def _float(text):
    return float(text)


def _int(text):
    return int(text)


def _bool(text):
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt(conv):
    def parse(text):
        return None if text.lower() == _AUTO else conv(text)

    return parse


def _fmt(value):
    if value is None:
        return _AUTO
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_cell(text, line):
    parts = text.replace(" ", "").split(",")
    if len(parts) != 2:
        raise ParseError(f"expected a cell as 'row,col', got {text!r}", line=line)
    try:
        return Cell(int(parts[0]), int(parts[1]))
    except ValueError:
        raise ParseError(f"cell coordinates must be integers, got {text!r}", line=line) from None


# section -> {key: converter}
_SECTIONS = {
    "sa": {
        "initial_temperature": _opt(_float),
        "cooling_rate": _float,
        "iterations_per_temperature": _opt(_int),
        "minimum_temperature": _float,
        "rng_seed": _int,
    },
    "control": {
        "bearing_tolerance_deg": _float,
        "turn_step_deg": _float,
        "max_turn_ticks": _int,
        "forward_profile": str,
        "turn_profile": str,
    },
    "ultrasonic": {
        "speed_of_sound_cm_s": _float,
        "reliable_range_cm": _float,
        "max_range_cm": _float,
        "beyond_range_noise_cm": _float,
        "within_range_noise_cm": _float,
    },
    "encoder": {
        "wheel_circumference_cm": _float,
        "counts_per_revolution": _int,
    },
    "drift": {
        "min_cm": _float,
        "max_cm": _float,
        "per_cm": _float,
        "recenter": _bool,
        "profile": str,
    },
    "compass": {
        "noise_sd_deg": _float,
    },
    "bearings": {
        "forward": _float,
        "left": _float,
        "backward": _float,
        "right": _float,
        "tolerance_deg": _float,
    },
    "mission": {
        "cell_size_cm": _float,
        "wait_timeout_ticks": _int,
        "detection_threshold_cm": _float,
        "tick_budget": _opt(_int),
        "initial_heading_deg": _opt(_float),
    },
}

_DEFAULTS = {
    "sa": dataclasses.asdict(SaConfig()),
    "control": dataclasses.asdict(ControlConfig()),
    "ultrasonic": dataclasses.asdict(UltrasonicModel()),
    "encoder": dataclasses.asdict(EncoderSpec()),
    "drift": dataclasses.asdict(DriftModel()),
    "compass": {"noise_sd_deg": RobotModels().compass_noise_sd_deg},
    "bearings": dataclasses.asdict(BearingConfig()),
    "mission": {
        "cell_size_cm": DEFAULT_CELL_SIZE_CM,
        "wait_timeout_ticks": 10,
        "detection_threshold_cm": 100.0,
        "tick_budget": None,
        "initial_heading_deg": None,
    },
}

_BLOCK_SECTIONS = ("map", "keypoints", "obstacles")


def _split_sections(text):
    sections = {}
    current = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name not in _SECTIONS and name not in _BLOCK_SECTIONS:
                raise ParseError(f"unknown section [{name}]", line=n)
            if name in sections:
                raise ParseError(f"section [{name}] appears twice", line=n)
            sections[name] = []
            current = name
            continue
        if current is None:
            raise ParseError("content before the first [section]", line=n)
        sections[current].append((n, line))
    return sections


def _parse_keyvalues(name, lines):
    spec = _SECTIONS[name]
    values = {}
    for n, line in lines:
        key, sep, value = line.partition("=")
        key = key.strip().lower()
        value = value.strip()
        if not sep or not value:
            raise ParseError(f"[{name}] expected 'key = value'", line=n)
        if key not in spec:
            raise ParseError(f"[{name}] unknown key {key!r}", line=n)
        try:
            values[key] = spec[key](value)
        except ValueError:
            raise ParseError(f"[{name}] {key}: cannot parse {value!r}", line=n) from None
    return values


def _parse_keypoints(lines):
    origin = None
    others = []
    for n, line in lines:
        key, sep, value = line.partition("=")
        if sep:
            if key.strip().lower() != "origin":
                raise ParseError(f"[keypoints] unknown key {key.strip()!r}", line=n)
            if origin is not None:
                raise ParseError("[keypoints] origin given twice", line=n)
            origin = _parse_cell(value.strip(), n)
        else:
            others.append(_parse_cell(line, n))
    return origin, others


def _parse_tick(text, line):
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"expected an integer tick, got {text!r}", line=line) from None


def _parse_obstacles(lines):
    entries = []
    for n, line in lines:
        words = line.split()
        kind = words[0].lower()
        until = None
        if len(words) >= 2 and words[-2].lower() == "until":
            until = _parse_tick(words[-1], n)
            words = words[:-2]
        try:
            if kind == "at":
                if len(words) != 4 or words[2].lower() != "from":
                    raise ParseError("expected 'at ROW,COL from TICK [until TICK]'", line=n)
                entries.append(TimedObstacle(_parse_cell(words[1], n), _parse_tick(words[3], n), until))
            elif kind == "moving":
                if len(words) < 2:
                    raise ParseError("expected 'moving ROW,COL@TICK ... [until TICK]'", line=n)
                wps = []
                for w in words[1:]:
                    cell, at, tick = w.partition("@")
                    if not at:
                        raise ParseError(f"waypoint {w!r} must be ROW,COL@TICK", line=n)
                    wps.append((_parse_cell(cell, n), _parse_tick(tick, n)))
                entries.append(MovingObstacle(tuple(wps), until))
            else:
                raise ParseError(f"unknown obstacle kind {kind!r}", line=n)
        except ValidationError as exc:
            raise ValidationError(f"line {n}: {exc}") from None
    return ObstacleSchedule(tuple(entries))


def _section(values, name, applied):
    merged = dict(_DEFAULTS[name])
    for key, default in _DEFAULTS[name].items():
        if key in values.get(name, {}):
            merged[key] = values[name][key]
        else:
            applied.append(f"{name}.{key}={_fmt(default)}")
    return merged


def parse_scenario(text):
    sections = _split_sections(text)
    if "map" not in sections:
        raise ParseError("missing [map] section")
    values = {name: _parse_keyvalues(name, sections[name]) for name in _SECTIONS if name in sections}
    applied = []
    mission = _section(values, "mission", applied)

    map_lines = sections["map"]
    try:
        grid = parse_map("\n".join(line for _, line in map_lines), mission["cell_size_cm"])
    except ParseError as exc:
        line = map_lines[exc.line - 1][0] if exc.line is not None else None
        raise type(exc)(str(exc).split(": ", 1)[-1], line=line) from None
    except ValidationError as exc:
        raise ValidationError(f"[mission] {exc}") from None

    origin, others = _parse_keypoints(sections.get("keypoints", []))
    if origin is None:
        raise ValidationError("[keypoints] needs an 'origin = row,col' entry")
    obstacles = _parse_obstacles(sections.get("obstacles", []))

    sa = _section(values, "sa", applied)
    control = _section(values, "control", applied)
    ultrasonic = _section(values, "ultrasonic", applied)
    encoder = _section(values, "encoder", applied)
    drift = _section(values, "drift", applied)
    compass = _section(values, "compass", applied)
    bearings = _section(values, "bearings", applied)
    try:
        keypoints = KeyPointSet(origin, tuple(others))
        scenario = Scenario(
            grid=grid,
            keypoints=keypoints,
            bearings=BearingConfig(**bearings),
            obstacles=obstacles,
            sa=SaConfig(**sa),
            control=ControlConfig(**control),
            models=RobotModels(
                ultrasonic=UltrasonicModel(**ultrasonic),
                encoder=EncoderSpec(**encoder),
                drift=DriftModel(**drift),
                compass_noise_sd_deg=compass["noise_sd_deg"],
            ),
            wait_timeout_ticks=mission["wait_timeout_ticks"],
            detection_threshold_cm=mission["detection_threshold_cm"],
            tick_budget=mission["tick_budget"],
            initial_heading_deg=mission["initial_heading_deg"],
            defaults_applied=tuple(applied),
        )
    except GridNavError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(str(exc)) from exc
    return scenario


def load_scenario(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read scenario {path}: {exc.strerror}") from None
    except UnicodeDecodeError:
        raise ParseError(f"scenario {path} is not UTF-8 text") from None
    return parse_scenario(text)


def _cell_text(cell):
    return f"{cell[0]},{cell[1]}"


def format_scenario(sc):
    """Render a scenario with every value explicit; parse_scenario inverts it."""
    out = ["[map]", format_map(sc.grid).rstrip("\n"), "", "[keypoints]"]
    out.append(f"origin = {_cell_text(sc.keypoints.origin)}")
    out.extend(_cell_text(c) for c in sc.keypoints.others)
    out.append("")
    if sc.obstacles.entries:
        out.append("[obstacles]")
        for e in sc.obstacles.entries:
            tail = "" if e.disappear_tick is None else f" until {e.disappear_tick}"
            if isinstance(e, TimedObstacle):
                out.append(f"at {_cell_text(e.cell)} from {e.appear_tick}{tail}")
            else:
                wps = " ".join(f"{_cell_text(c)}@{t}" for c, t in e.waypoints)
                out.append(f"moving {wps}{tail}")
        out.append("")
    blocks = {
        "bearings": dataclasses.asdict(sc.bearings),
        "sa": dataclasses.asdict(sc.sa),
        "control": dataclasses.asdict(sc.control),
        "ultrasonic": dataclasses.asdict(sc.models.ultrasonic),
        "encoder": dataclasses.asdict(sc.models.encoder),
        "drift": dataclasses.asdict(sc.models.drift),
        "compass": {"noise_sd_deg": sc.models.compass_noise_sd_deg},
        "mission": {
            "cell_size_cm": sc.grid.cell_size_cm,
            "wait_timeout_ticks": sc.wait_timeout_ticks,
            "detection_threshold_cm": sc.detection_threshold_cm,
            "tick_budget": sc.tick_budget,
            "initial_heading_deg": sc.initial_heading_deg,
        },
    }
    for name, vals in blocks.items():
        out.append(f"[{name}]")
        out.extend(f"{k} = {_fmt(v)}" for k, v in vals.items())
        out.append("")
    return "\n".join(out)


def describe_scenario(sc):
    """Short human summary, echoing each default that was filled in."""
    lines = [
        f"map {sc.grid.rows}x{sc.grid.cols}, cell {sc.grid.cell_size_cm:g} cm",
        f"key points: origin {_cell_text(sc.keypoints.origin)} + {len(sc.keypoints.others)}",
        f"dynamic obstacles: {len(sc.obstacles.entries)}",
    ]
    if sc.defaults_applied:
        lines.append("defaults: " + ", ".join(sc.defaults_applied))
    return "\n".join(lines)
