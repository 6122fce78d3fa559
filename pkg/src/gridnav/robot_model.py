"""Simulated sensors and actuation: sonar, compass, wheel encoders, drift."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

from .errors import BlockedAhead, MissingBearing, NegativeDistance, NegativeTime, ValidationError
from .gridmap import Cell, Move, apply_move, is_free

SPEED_OF_SOUND_CM_S = 34300.0


def angle_diff(target, measured):
    """Signed smallest rotation from ``measured`` to ``target`` in (-180, 180]."""
    e = (target - measured + 180.0) % 360.0 - 180.0
    return 180.0 if e == -180.0 else e


@dataclass(frozen=True)
class BearingConfig:
    """Compass bearing for each move id.  The four must be mutually 90 degrees
    apart; deviations strictly below ``tolerance_deg`` are accepted."""

    forward: float = 0.0
    left: float = 270.0
    backward: float = 180.0
    right: float = 90.0
    tolerance_deg: float = 1.0

    def __post_init__(self):
        for name in ("forward", "left", "backward", "right"):
            value = getattr(self, name)
            if value is None:
                raise MissingBearing(f"no bearing configured for {name}")
            if not 0 <= value < 360:
                raise ValidationError(f"bearing {name}={value} is outside [0, 360)")
        b = self.as_tuple()
        for i in range(4):
            for j in range(i + 1, 4):
                expected = 180.0 if (j - i) == 2 else 90.0
                gap = abs(angle_diff(b[j], b[i]))
                if abs(gap - expected) >= self.tolerance_deg:
                    names = ("forward", "left", "backward", "right")
                    raise ValidationError(
                        f"bearings {names[i]}={b[i]} and {names[j]}={b[j]} are {gap:g} deg apart, "
                        f"expected {expected:g} (tolerance {self.tolerance_deg:g})"
                    )

    def as_tuple(self):
        return (self.forward, self.left, self.backward, self.right)

    def bearing(self, move):
        return self.as_tuple()[int(move)]

    def nearest_move(self, heading):
        b = self.as_tuple()
        return Move(min(range(4), key=lambda m: (abs(angle_diff(b[m], heading)), m)))


@dataclass(frozen=True)
class UltrasonicModel:
    speed_of_sound_cm_s: float = SPEED_OF_SOUND_CM_S
    reliable_range_cm: float = 100.0
    max_range_cm: float = 400.0
    beyond_range_noise_cm: float = 10.0
    within_range_noise_cm: float = 0.0

    def __post_init__(self):
        if not 0 < self.reliable_range_cm <= self.max_range_cm:
            raise ValidationError("ultrasonic ranges must satisfy 0 < reliable_range_cm <= max_range_cm")
        if self.speed_of_sound_cm_s <= 0:
            raise ValidationError("speed_of_sound_cm_s must be positive")
        if self.beyond_range_noise_cm < 0 or self.within_range_noise_cm < 0:
            raise ValidationError("ultrasonic noise must be non-negative")


@dataclass(frozen=True)
class EncoderSpec:
    wheel_circumference_cm: float = 20.32
    counts_per_revolution: int = 20

    def __post_init__(self):
        if not self.wheel_circumference_cm > 0 or not self.counts_per_revolution > 0:
            raise ValidationError("encoder circumference and counts per revolution must be positive")


@dataclass(frozen=True)
class DriftModel:
    """Lateral drift per forward motion, as a band of |cm| per 50 cm travelled."""

    min_cm: float = 3.0
    max_cm: float = 8.0
    per_cm: float = 50.0
    recenter: bool = True
    profile: str = "pwm60"

    def __post_init__(self):
        if not 0 <= self.min_cm <= self.max_cm:
            raise ValidationError("drift band must satisfy 0 <= min_cm <= max_cm")
        if self.per_cm <= 0:
            raise ValidationError("drift per_cm must be positive")


@dataclass(frozen=True)
class RobotState:
    cell: Cell
    heading_deg: float
    lateral_offset_cm: float = 0.0
    last_drift_cm: float = 0.0
    encoder_counts: tuple = (0, 0)
    mode: str = "cruising"


class Reading(NamedTuple):
    distance_cm: float
    reliable: bool


def echo_to_distance(echo_time_s, model=None):
    if echo_time_s < 0:
        raise NegativeTime(f"echo time must be non-negative, got {echo_time_s}")
    speed = model.speed_of_sound_cm_s if model is not None else SPEED_OF_SOUND_CM_S
    return speed * echo_time_s / 2.0


def range_reading(true_distance_cm, model, rng):
    """Sensor response to an obstacle at ``true_distance_cm`` (None: nothing in range)."""
    if true_distance_cm is None or true_distance_cm > model.max_range_cm:
        return Reading(model.max_range_cm, False)
    if true_distance_cm <= model.reliable_range_cm:
        value = true_distance_cm
        if model.within_range_noise_cm > 0:
            value = max(0.0, value + rng.normal(0.0, model.within_range_noise_cm))
        return Reading(value, True)
    value = true_distance_cm
    if model.beyond_range_noise_cm > 0:
        value += rng.normal(0.0, model.beyond_range_noise_cm)
    return Reading(min(max(value, 0.0), model.max_range_cm), False)


def obstacle_distance(grid, obstacles, cell, facing, max_range_cm):
    """Distance to the first blocked cell along ``facing``; map edges count as blocked."""
    k = 0
    here = Cell(*cell)
    limit = int(max_range_cm // grid.cell_size_cm) + 1
    while k < limit:
        k += 1
        here = apply_move(here, facing)
        if not is_free(grid, here) or here in obstacles:
            return k * grid.cell_size_cm
    return None


def ultrasonic_read(grid, obstacles, state, facing, model, rng):
    """Reading from the forward sonar with the robot facing move ``facing``.

    ``obstacles`` is the set of cells currently holding dynamic obstacles.
    The robot sits at its cell centre, so the range is cell count times
    cell size.
    """
    true = obstacle_distance(grid, obstacles, state.cell, facing, model.max_range_cm)
    return range_reading(true, model, rng)


def ticks_for_distance(distance_cm, spec):
    if distance_cm < 0:
        raise NegativeDistance(f"distance must be non-negative, got {distance_cm}")
    revolutions = distance_cm / spec.wheel_circumference_cm
    # Round half up.
    return int(math.floor(revolutions * spec.counts_per_revolution + 0.5))


def compass_read(true_heading_deg, noise_sd_deg, rng):
    value = true_heading_deg
    if noise_sd_deg > 0:
        value += rng.normal(0.0, noise_sd_deg)
    value %= 360.0
    return 0.0 if value >= 360.0 else value


def draw_drift(drift, cell_size_cm, rng):
    """Signed lateral drift (cm) for one cell of travel."""
    if drift.max_cm == 0:
        return 0.0
    magnitude = rng.uniform(drift.min_cm, drift.max_cm) * (cell_size_cm / drift.per_cm)
    return magnitude if rng.random() < 0.5 else -magnitude


def forward_step(grid, state, move, drift, encoder, rng):
    """Advance one cell along ``move``; heading is unchanged."""
    target = apply_move(state.cell, move)
    if not is_free(grid, target):
        raise BlockedAhead(f"cell {tuple(target)} ahead is blocked")
    cell_size = grid.cell_size_cm
    dx = draw_drift(drift, cell_size, rng)
    if drift.recenter:
        offset = 0.0
    else:
        bound = 0.999 * cell_size
        offset = min(max(state.lateral_offset_cm + dx, -bound), bound)
    ticks = ticks_for_distance(cell_size, encoder)
    left, right = state.encoder_counts
    return replace(
        state,
        cell=target,
        lateral_offset_cm=offset,
        last_drift_cm=dx,
        encoder_counts=(left + ticks, right + ticks),
    )
