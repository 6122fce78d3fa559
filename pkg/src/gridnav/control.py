"""Compass-guided execution of grid moves."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

from .errors import MissingBearing, TurnTimeout, ValidationError
from .robot_model import (
    DriftModel,
    EncoderSpec,
    UltrasonicModel,
    angle_diff,
    compass_read,
    forward_step,
)


class HeadingCommand(Enum):
    TURN_LEFT = "turn_left"
    TURN_RIGHT = "turn_right"
    FORWARD = "forward"


@dataclass(frozen=True)
class ControlConfig:
    """Heading controller settings.

    The turn step may not exceed ``2 * bearing_tolerance_deg + 1``: the
    acceptance window holds ``2 * tol + 1`` whole degrees, so integer-degree
    headings always land in it.  Fractional bearings need the tighter
    ``turn_step <= 2 * tol`` to be guaranteed to converge; otherwise a turn can
    end in :class:`TurnTimeout`.
    """

    bearing_tolerance_deg: float = 2.0
    turn_step_deg: float = 5.0
    max_turn_ticks: int = 200
    forward_profile: str = "pwm60"
    turn_profile: str = "pwm30"

    def __post_init__(self):
        if not self.bearing_tolerance_deg > 0:
            raise ValidationError("control.bearing_tolerance_deg must be positive")
        if not self.turn_step_deg > 0:
            raise ValidationError("control.turn_step_deg must be positive")
        # A step up to the window width always lands inside it.  One extra
        # degree is allowed because whole-degree headings still settle there;
        # fractional headings may straddle the window and hit max_turn_ticks.
        if self.turn_step_deg > 2 * self.bearing_tolerance_deg + 1:
            raise ValidationError(
                f"control.turn_step_deg={self.turn_step_deg:g} can overshoot the "
                f"+/-{self.bearing_tolerance_deg:g} deg window forever"
            )
        if self.max_turn_ticks < 1:
            raise ValidationError("control.max_turn_ticks must be at least 1")


@dataclass(frozen=True)
class RobotModels:
    ultrasonic: UltrasonicModel = UltrasonicModel()
    encoder: EncoderSpec = EncoderSpec()
    drift: DriftModel = DriftModel()
    compass_noise_sd_deg: float = 0.5

    def __post_init__(self):
        if self.compass_noise_sd_deg < 0:
            raise ValidationError("compass noise must be non-negative")


def moves_to_bearings(moves, bearings):
    out = []
    for m in moves:
        if bearings is None:
            raise MissingBearing("no bearing configuration")
        if isinstance(bearings, dict):
            if m not in bearings:
                raise MissingBearing(f"no bearing for move {m}")
            out.append(float(bearings[m]))
        else:
            out.append(float(bearings.bearing(m)))
    return out


# Slack for float rounding in the wrapped difference; without it a heading on
# the window edge can fall just outside on both sides of a full-width step.
_WINDOW_EPS = 1e-9


def heading_decision(measured_deg, target_deg, cfg):
    e = angle_diff(target_deg, measured_deg)
    if abs(e) <= cfg.bearing_tolerance_deg + _WINDOW_EPS:
        return HeadingCommand.FORWARD
    return HeadingCommand.TURN_RIGHT if e > 0 else HeadingCommand.TURN_LEFT


def turn(state, command, cfg):
    """Rotate by one turn step; right is clockwise (increasing bearing)."""
    step = cfg.turn_step_deg if command is HeadingCommand.TURN_RIGHT else -cfg.turn_step_deg
    return replace(state, heading_deg=(state.heading_deg + step) % 360.0)


def turn_bound(cfg):
    """Worst-case turn ticks for a noiseless compass when the step fits the window."""
    return math.ceil(180.0 / cfg.turn_step_deg) + 1


def execute_move(grid, state, move, bearings, cfg, models, rng):
    """Turn toward ``move``'s bearing, then drive one cell.

    Returns the new state and a log of ``(command, compass_reading, heading)``
    per tick, the last entry being the forward command.
    """
    target = bearings.bearing(move)
    log = []
    turns = 0
    while True:
        measured = compass_read(state.heading_deg, models.compass_noise_sd_deg, rng)
        command = heading_decision(measured, target, cfg)
        log.append((command, measured, state.heading_deg))
        if command is HeadingCommand.FORWARD:
            break
        if turns >= cfg.max_turn_ticks:
            raise TurnTimeout(f"heading did not settle within {cfg.max_turn_ticks} turn ticks")
        state = turn(state, command, cfg)
        turns += 1
    state = forward_step(grid, state, move, models.drift, models.encoder, rng)
    return state, log
