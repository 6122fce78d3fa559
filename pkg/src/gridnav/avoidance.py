"""Dynamic-obstacle handling: stop, wait, probe right/left/back, replan."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

from .errors import BlockedEndpoint, DisconnectedKeyPoint
from .gridmap import Cell, Move, apply_move
from .tour import SaConfig, anneal, pairwise_distances

# Float slack when comparing a one-cell range against the cell size.
_RANGE_EPS = 1e-9


class Phase(Enum):
    CRUISING = "Cruising"
    WAITING = "Waiting"
    PROBING_RIGHT = "ProbingRight"
    PROBING_LEFT = "ProbingLeft"
    PROBING_BACK = "ProbingBack"
    REPLANNING = "Replanning"


class Decision(Enum):
    PROCEED = "proceed"
    HALT = "halt"
    RESUME = "resume"
    TURN_TO = "turn_to"
    REPLAN = "replan"


@dataclass(frozen=True)
class ReplanRequest:
    from_cell: Cell
    facing_move: Move
    remaining_keypoints: tuple
    blocked_cell: Cell


@dataclass(frozen=True)
class Action:
    decision: Decision
    move: Optional[Move] = None
    request: Optional[ReplanRequest] = None


@dataclass(frozen=True)
class AvoidanceState:
    phase: Phase = Phase.CRUISING
    since_tick: int = 0
    wait_timeout_ticks: int = 10
    detection_threshold_cm: float = 100.0
    cell_size_cm: float = 60.96
    facing: Optional[Move] = None
    blocked_cell: Optional[Cell] = None

    def watched_move(self, planned_move=None):
        """Direction the robot must face for the current phase's sensing."""
        if self.phase is Phase.CRUISING:
            return planned_move
        if self.phase is Phase.PROBING_RIGHT:
            return self.facing.right()
        if self.phase is Phase.PROBING_LEFT:
            return self.facing.left()
        if self.phase is Phase.PROBING_BACK:
            return self.facing.back()
        return self.facing


_NEXT_PROBE = {
    Phase.PROBING_RIGHT: Phase.PROBING_LEFT,
    Phase.PROBING_LEFT: Phase.PROBING_BACK,
}


def obstacle_near(state, reading):
    """True when a reliable reading shows something within one cell and the threshold."""
    if reading is None or not reading.reliable:
        return False
    limit = min(state.detection_threshold_cm, state.cell_size_cm)
    return reading.distance_cm <= limit + _RANGE_EPS


def avoidance_step(state, reading, now_tick, cell=None, facing=None, remaining=()):
    """One transition of the avoidance machine.

    ``reading`` is the sonar reading along ``state.watched_move(facing)``, or
    None when the robot is still turning toward that direction.  ``cell`` and
    ``facing`` locate the robot (facing is the planned move while cruising);
    ``remaining`` lists the uncovered key points for a replan request.
    """
    phase = state.phase
    near = obstacle_near(state, reading)

    if phase is Phase.CRUISING:
        if not near:
            return state, Action(Decision.PROCEED)
        waiting = replace(
            state,
            phase=Phase.WAITING,
            since_tick=now_tick,
            facing=Move(facing),
            blocked_cell=apply_move(cell, facing),
        )
        return waiting, Action(Decision.HALT)

    if phase is Phase.WAITING:
        if reading is None:
            return state, Action(Decision.HALT)
        if not near:
            return replace(state, phase=Phase.CRUISING), Action(Decision.RESUME)
        if now_tick - state.since_tick >= state.wait_timeout_ticks:
            probing = replace(state, phase=Phase.PROBING_RIGHT)
            return probing, Action(Decision.TURN_TO, move=probing.watched_move())
        return state, Action(Decision.HALT)

    if phase in (Phase.PROBING_RIGHT, Phase.PROBING_LEFT, Phase.PROBING_BACK):
        if reading is None:
            return state, Action(Decision.TURN_TO, move=state.watched_move())
        if not near:
            request = ReplanRequest(
                from_cell=Cell(*cell),
                facing_move=state.facing,
                remaining_keypoints=tuple(Cell(*c) for c in remaining),
                blocked_cell=state.blocked_cell,
            )
            return replace(state, phase=Phase.REPLANNING), Action(Decision.REPLAN, request=request)
        if phase is Phase.PROBING_BACK:
            return replace(state, phase=Phase.WAITING, since_tick=now_tick), Action(Decision.HALT)
        probing = replace(state, phase=_NEXT_PROBE[phase])
        return probing, Action(Decision.TURN_TO, move=probing.watched_move())

    return state, Action(Decision.HALT)


def replan_done(state):
    return replace(state, phase=Phase.CRUISING, facing=None, blocked_cell=None)


def build_replan(request, grid, origin, sa=None, cache=None):
    """Tour from the robot's cell through the uncovered key points to ``origin``.

    The request's blocked cell is treated as an obstacle for these searches
    only.  Returns the annealed tour and its distance matrix.  When the robot
    already stands on the origin the route is a closed tour.
    """
    origin = Cell(*origin)
    start = Cell(*request.from_cell)
    remaining = [Cell(*c) for c in request.remaining_keypoints if Cell(*c) not in (start, origin)]
    if start == origin:
        nodes, closed = [origin] + remaining, True
    else:
        nodes, closed = [start] + remaining + [origin], False
    blocked = Cell(*request.blocked_cell)
    if blocked in nodes:
        raise DisconnectedKeyPoint(f"key point {tuple(blocked)} is occupied by an obstacle", cell=blocked)
    planning_map = grid.with_blocked([blocked])
    try:
        dm = pairwise_distances(planning_map, nodes, cache=cache)
    except BlockedEndpoint as exc:  # pragma: no cover - guarded above
        raise DisconnectedKeyPoint(str(exc)) from exc
    return anneal(dm, sa or SaConfig(), closed=closed).tour, dm
