import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gridnav.control import (
    ControlConfig, HeadingCommand, RobotModels, execute_move, heading_decision, moves_to_bearings,
    turn_bound,
)
from gridnav.errors import MissingBearing, TurnTimeout, ValidationError
from gridnav.gridmap import Cell, Move, parse_map
from gridnav.robot_model import BearingConfig, DriftModel, RobotState, angle_diff

CFG = ControlConfig()
QUIET = RobotModels(drift=DriftModel(0.0, 0.0), compass_noise_sd_deg=0.0)


def test_moves_to_bearings():
    assert moves_to_bearings([Move.RIGHT, Move.BACKWARD, Move.LEFT, Move.FORWARD], BearingConfig()) == [
        90.0, 180.0, 270.0, 0.0]
    with pytest.raises(MissingBearing):
        moves_to_bearings([Move.LEFT], {Move.RIGHT: 90.0})
    with pytest.raises(MissingBearing):
        moves_to_bearings([Move.LEFT], None)


@pytest.mark.parametrize("measured, target, expected", [
    (91.0, 90.0, HeadingCommand.FORWARD),
    (90.0, 90.0, HeadingCommand.FORWARD),
    (350.0, 0.0, HeadingCommand.TURN_RIGHT),
    (180.0, 90.0, HeadingCommand.TURN_LEFT),
    (1.0, 359.0, HeadingCommand.FORWARD),
    (270.0, 90.0, HeadingCommand.TURN_RIGHT),
])
def test_heading_decision(measured, target, expected):
    assert heading_decision(measured, target, CFG) is expected


def test_config_validation():
    ControlConfig(bearing_tolerance_deg=2.0, turn_step_deg=5.0)
    with pytest.raises(ValidationError):
        ControlConfig(bearing_tolerance_deg=2.0, turn_step_deg=7.0)
    with pytest.raises(ValidationError):
        ControlConfig(turn_step_deg=0.0)
    with pytest.raises(ValidationError):
        ControlConfig(max_turn_ticks=0)
    with pytest.raises(ValidationError):
        RobotModels(compass_noise_sd_deg=-1.0)


@pytest.fixture
def open3():
    return parse_map("000\n000\n000")


def test_execute_aligned(open3, rng):
    state, log = execute_move(open3, RobotState(Cell(1, 1), 90.0), Move.RIGHT, BearingConfig(), CFG, QUIET, rng)
    assert [c for c, _, _ in log] == [HeadingCommand.FORWARD]
    assert state.cell == (1, 2)


def test_execute_quarter_turn(open3, rng):
    state, log = execute_move(open3, RobotState(Cell(1, 1), 0.0), Move.RIGHT, BearingConfig(), CFG, QUIET, rng)
    turns = [c for c, _, _ in log[:-1]]
    assert turns == [HeadingCommand.TURN_RIGHT] * 18
    assert state.cell == (1, 2) and state.heading_deg == pytest.approx(90.0)


def test_execute_timeout(open3, rng):
    cfg = ControlConfig(max_turn_ticks=3)
    with pytest.raises(TurnTimeout):
        execute_move(open3, RobotState(Cell(1, 1), 0.0), Move.BACKWARD, BearingConfig(), cfg, QUIET, rng)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 359.999), st.sampled_from(list(Move)), st.floats(1.0, 5.0), st.floats(0.5, 1.0))
def test_turning_terminates_within_bound(heading, move, tol, frac):
    step = max(0.1, frac * 2 * tol)
    cfg = ControlConfig(bearing_tolerance_deg=tol, turn_step_deg=step, max_turn_ticks=10_000)
    grid = parse_map("000\n000\n000")
    _, log = execute_move(grid, RobotState(Cell(1, 1), heading), move, BearingConfig(), cfg, QUIET,
                          np.random.default_rng(0))
    assert len(log) - 1 <= turn_bound(cfg)
    assert abs(angle_diff(BearingConfig().bearing(move), log[-1][2])) <= tol + 1e-9


def test_default_step_settles_on_integer_headings(open3):
    for heading in range(360):
        for move in Move:
            _, log = execute_move(open3, RobotState(Cell(1, 1), float(heading)), move, BearingConfig(), CFG,
                                  QUIET, np.random.default_rng(0))
            assert len(log) - 1 <= turn_bound(CFG)


def test_wide_step_can_oscillate_off_lattice(open3, rng):
    # A step wider than the window may straddle it forever; the tick guard reports it.
    cfg = ControlConfig(bearing_tolerance_deg=1.0, turn_step_deg=3.0, max_turn_ticks=50)
    with pytest.raises(TurnTimeout):
        execute_move(open3, RobotState(Cell(1, 1), 1.5), Move.FORWARD, BearingConfig(), cfg, QUIET, rng)


def test_window_edge_with_full_width_step(open3, rng):
    tol = 1.041522483705978
    cfg = ControlConfig(bearing_tolerance_deg=tol, turn_step_deg=2 * tol, max_turn_ticks=20)
    _, log = execute_move(open3, RobotState(Cell(1, 1), tol), Move.FORWARD, BearingConfig(), cfg, QUIET, rng)
    assert len(log) == 1
