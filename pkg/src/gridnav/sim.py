"""Discrete-time mission engine and trace format.

One tick carries exactly one robot command.  Within a tick the order is:
obstacle schedule update, compass/sonar reads, avoidance transition, control
command, kinematics, trace append.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from . import kernels
from .avoidance import AvoidanceState, Decision, Phase, avoidance_step, build_replan, replan_done
from .control import HeadingCommand, heading_decision, turn
from .errors import DisconnectedKeyPoint, GridNavError, InconsistentTrace, TickBudgetExceeded, ValidationError
from .gridmap import Cell
from .pathfind import path_to_moves
from .robot_model import RobotState, compass_read, forward_step, ultrasonic_read
from .tour import anneal, pairwise_distances

RNG_NAME = "numpy.PCG64"
TRACE_MAGIC = "#gridnav-trace v1"
TRACE_FIELDS = (
    "tick", "row", "col", "heading_deg", "compass_deg", "offset_cm", "drift_cm",
    "sonar_cm", "sonar_ok", "phase", "command", "obstacles", "events",
)
BUDGET_PER_CELL = 500


# ---------------------------------------------------------------------------
# Obstacle schedule
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TimedObstacle:
    cell: Cell
    appear_tick: int
    disappear_tick: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "cell", Cell(*self.cell))
        if self.appear_tick < 0:
            raise ValidationError(f"obstacle at {self.cell}: appear tick must be >= 0")
        if self.disappear_tick is not None and self.disappear_tick <= self.appear_tick:
            raise ValidationError(f"obstacle at {self.cell}: appear tick must precede disappear tick")

    def cells(self):
        return [self.cell]

    def cell_at(self, tick):
        if tick < self.appear_tick:
            return None
        if self.disappear_tick is not None and tick >= self.disappear_tick:
            return None
        return self.cell


@dataclass(frozen=True)
class MovingObstacle:
    """Occupies ``waypoints[k][0]`` from ``waypoints[k][1]`` until the next waypoint's tick."""

    waypoints: tuple
    disappear_tick: Optional[int] = None

    def __post_init__(self):
        wps = tuple((Cell(*c), int(t)) for c, t in self.waypoints)
        object.__setattr__(self, "waypoints", wps)
        if not wps:
            raise ValidationError("moving obstacle needs at least one waypoint")
        ticks = [t for _, t in wps]
        if ticks[0] < 0 or any(b <= a for a, b in zip(ticks, ticks[1:])):
            raise ValidationError("moving obstacle waypoint ticks must be non-negative and increasing")
        if self.disappear_tick is not None and self.disappear_tick <= ticks[0]:
            raise ValidationError("moving obstacle must appear before it disappears")

    def cells(self):
        return [c for c, _ in self.waypoints]

    def cell_at(self, tick):
        if tick < self.waypoints[0][1]:
            return None
        if self.disappear_tick is not None and tick >= self.disappear_tick:
            return None
        here = None
        for cell, t in self.waypoints:
            if t > tick:
                break
            here = cell
        return here


@dataclass(frozen=True)
class ObstacleSchedule:
    entries: tuple = ()

    def validate_on(self, grid):
        for entry in self.entries:
            for c in entry.cells():
                if not grid.in_bounds(c):
                    raise ValidationError(f"obstacle cell {tuple(c)} is outside the map")
                if grid.blocked[c]:
                    raise ValidationError(f"obstacle cell {tuple(c)} lies on a static obstacle")


# ---------------------------------------------------------------------------
# Trace
# ---------------------------------------------------------------------------


class TickRecord(NamedTuple):
    tick: int
    cell: Cell
    heading_deg: float
    compass_deg: Optional[float]
    offset_cm: float
    drift_cm: float
    sonar_cm: Optional[float]
    sonar_ok: Optional[bool]
    phase: str
    command: str
    obstacles: tuple
    events: tuple


@dataclass
class MissionTrace:
    header: dict = field(default_factory=dict)
    records: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def cells(self):
        return [r.cell for r in self.records]

    def phases(self):
        """Phase sequence with consecutive repeats collapsed."""
        out = []
        for r in self.records:
            if not out or out[-1] != r.phase:
                out.append(r.phase)
        return out


@dataclass(frozen=True)
class MissionResult:
    success: bool
    covered: tuple
    ended_at: Cell
    planned_cost: int
    executed_cost: int
    ticks: int = 0
    replans: int = 0


def _cell_str(cell):
    return f"{cell[0]}:{cell[1]}"


def _parse_cell(text):
    r, c = text.split(":")
    return Cell(int(r), int(c))


def _num(x):
    return f"{x + 0.0:.4f}"


def format_trace(trace):
    lines = [TRACE_MAGIC]
    for key, value in trace.header.items():
        lines.append(f"#{key}={value}")
    lines.append("#fields=" + ",".join(TRACE_FIELDS))
    for r in trace.records:
        lines.append(",".join((
            str(r.tick), str(r.cell.row), str(r.cell.col), _num(r.heading_deg),
            "-" if r.compass_deg is None else _num(r.compass_deg),
            _num(r.offset_cm), _num(r.drift_cm),
            "-" if r.sonar_cm is None else _num(r.sonar_cm),
            "-" if r.sonar_ok is None else str(int(r.sonar_ok)),
            r.phase, r.command,
            ";".join(_cell_str(c) for c in r.obstacles),
            ";".join(r.events),
        )))
    lines.append("#summary")
    for key, value in trace.summary.items():
        lines.append(f"{key}={value}")
    return "\n".join(lines) + "\n"


def parse_trace(text):
    lines = text.splitlines()
    if not lines or lines[0] != TRACE_MAGIC:
        raise InconsistentTrace("not a gridnav trace file")
    trace = MissionTrace()
    in_summary = False
    for n, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        if in_summary:
            key, _, value = line.partition("=")
            trace.summary[key] = value
        elif line == "#summary":
            in_summary = True
        elif line.startswith("#"):
            key, _, value = line[1:].partition("=")
            if key != "fields":
                trace.header[key] = value
        else:
            parts = line.split(",")
            if len(parts) != len(TRACE_FIELDS):
                raise InconsistentTrace(f"line {n}: expected {len(TRACE_FIELDS)} fields, got {len(parts)}")
            try:
                trace.records.append(TickRecord(
                    tick=int(parts[0]),
                    cell=Cell(int(parts[1]), int(parts[2])),
                    heading_deg=float(parts[3]),
                    compass_deg=None if parts[4] == "-" else float(parts[4]),
                    offset_cm=float(parts[5]),
                    drift_cm=float(parts[6]),
                    sonar_cm=None if parts[7] == "-" else float(parts[7]),
                    sonar_ok=None if parts[8] == "-" else parts[8] == "1",
                    phase=parts[9],
                    command=parts[10],
                    obstacles=tuple(_parse_cell(c) for c in parts[11].split(";") if c),
                    events=tuple(e for e in parts[12].split(";") if e),
                ))
            except ValueError as exc:
                raise InconsistentTrace(f"line {n}: {exc}") from None
    ticks = [r.tick for r in trace.records]
    if any(b != a + 1 for a, b in zip(ticks, ticks[1:])):
        raise InconsistentTrace("ticks must increase by one per record")
    return trace


# ---------------------------------------------------------------------------
# Mission
# ---------------------------------------------------------------------------


def _route_cells(tour, dm):
    cells = [dm.cells[tour.order[0]]]
    for i, j in tour.legs():
        cells.extend(dm.path(i, j).cells[1:])
    return cells


def _derive_seed(seed, k):
    return kernels.splitmix64(seed, k)[-1]


class Mission:
    """Mutable world for one run; :meth:`step` advances one tick."""

    def __init__(self, scenario, seed):
        self.scenario = scenario
        self.seed = int(seed) & ((1 << 64) - 1)
        self.rng = np.random.Generator(np.random.PCG64(self.seed))
        self.grid = scenario.grid
        self.keypoints = scenario.keypoints
        self.origin = scenario.keypoints.origin
        self.cache = {}
        self.replans = 0
        self.executed_cost = 0
        self.tick = 0
        self.done = False
        self.trace = MissionTrace(header={
            "seed": self.seed,
            "rng": RNG_NAME,
            "sa_rng": kernels.SA_RNG_NAME,
            "rows": self.grid.rows,
            "cols": self.grid.cols,
            "cell_size_cm": f"{self.grid.cell_size_cm:g}",
        })

        sa = replace(scenario.sa, rng_seed=self.seed)
        dm = pairwise_distances(self.grid, self.keypoints, cache=self.cache)
        self.plan = anneal(dm, sa)
        self.planned_cost = self.plan.tour.total_cost
        self.queue = deque(path_to_moves(_route_cells(self.plan.tour, dm)))

        heading = scenario.initial_heading_deg
        if heading is None:
            heading = scenario.bearings.forward
        self.state = RobotState(cell=self.origin, heading_deg=float(heading) % 360.0)
        self.avoid = AvoidanceState(
            wait_timeout_ticks=scenario.wait_timeout_ticks,
            detection_threshold_cm=scenario.detection_threshold_cm,
            cell_size_cm=self.grid.cell_size_cm,
        )
        self.covered = [self.origin]
        self.positions = [None] * len(scenario.obstacles.entries)
        self._update_obstacles()
        self.budget = scenario.tick_budget or BUDGET_PER_CELL * self.grid.rows * self.grid.cols
        self._record(None, None, "start", ["plan=" + str(self.planned_cost)])
        if not self.queue:
            self._finish()

    # -- helpers -----------------------------------------------------------

    @property
    def obstacles(self):
        return {p for p in self.positions if p is not None}

    def remaining(self):
        seen = set(self.covered)
        return [c for c in self.keypoints.others if c not in seen]

    def _update_obstacles(self):
        robot = self.state.cell
        for k, entry in enumerate(self.scenario.obstacles.entries):
            want = entry.cell_at(self.tick)
            if want is not None and want == robot:
                # Never materialise on the robot; hold the previous position.
                want = self.positions[k] if self.positions[k] != robot else None
            self.positions[k] = want

    def _record(self, compass, reading, command, events, phase=None, drift=0.0):
        s = self.state
        self.trace.records.append(TickRecord(
            tick=self.tick,
            cell=s.cell,
            heading_deg=s.heading_deg,
            compass_deg=compass,
            offset_cm=s.lateral_offset_cm,
            drift_cm=drift,
            sonar_cm=None if reading is None else reading.distance_cm,
            sonar_ok=None if reading is None else reading.reliable,
            phase=phase or self.avoid.phase.value,
            command=command,
            obstacles=tuple(sorted(self.obstacles)),
            events=tuple(events),
        ))

    def _finish(self):
        self.done = True
        if self.state.cell != self.origin or set(self.covered) != set(self.keypoints.cells):
            raise GridNavError("route ended without covering every key point at the origin")

    def result(self, success=None):
        if success is None:
            success = self.done
        return MissionResult(
            success=success,
            covered=tuple(self.covered),
            ended_at=self.state.cell,
            planned_cost=self.planned_cost,
            executed_cost=self.executed_cost,
            ticks=self.tick,
            replans=self.replans,
        )

    def summarize(self, success):
        res = self.result(success)
        self.trace.summary = {
            "success": int(res.success),
            "covered": " ".join(_cell_str(c) for c in res.covered),
            "ended_at": _cell_str(res.ended_at),
            "planned_cost": res.planned_cost,
            "executed_cost": res.executed_cost,
            "cells_traversed": res.executed_cost,
            "wall_ticks": res.ticks,
            "replans": res.replans,
            "sa_identity_cost": self.plan.identity_cost,
            "tour": " ".join(_cell_str(self.keypoints.cells[k]) for k in self.plan.tour.order),
        }
        return res

    def _bearing(self, move):
        return self.scenario.bearings.bearing(move)

    def _replan(self, request, events):
        self.replans += 1
        sa = replace(self.scenario.sa, rng_seed=_derive_seed(self.seed, self.replans))
        tour, dm = build_replan(request, self.grid, self.origin, sa=sa, cache=self.cache)
        self.queue = deque(path_to_moves(_route_cells(tour, dm)))
        events.append(f"replan={_cell_str(request.blocked_cell)}/{tour.total_cost}")

    # -- tick --------------------------------------------------------------

    def step(self):
        if self.done:
            return
        if self.tick >= self.budget:
            raise TickBudgetExceeded(f"mission exceeded its budget of {self.budget} ticks")
        self.tick += 1
        self._update_obstacles()

        sc = self.scenario
        models = sc.models
        planned = self.queue[0]
        watch = self.avoid.watched_move(planned)
        compass = compass_read(self.state.heading_deg, models.compass_noise_sd_deg, self.rng)
        aligned = heading_decision(compass, self._bearing(watch), sc.control) is HeadingCommand.FORWARD
        reading = None
        if aligned:
            reading = ultrasonic_read(self.grid, self.obstacles, self.state, watch, models.ultrasonic, self.rng)

        before = self.avoid.phase
        self.avoid, action = avoidance_step(
            self.avoid, reading, self.tick, cell=self.state.cell, facing=planned, remaining=self.remaining()
        )
        events = []
        if self.avoid.phase is not before:
            events.append(f"{before.value}>{self.avoid.phase.value}")
        phase = None
        drift = 0.0

        if action.decision is Decision.REPLAN:
            phase = Phase.REPLANNING.value
            try:
                self._replan(action.request, events)
            except DisconnectedKeyPoint:
                self.avoid = replan_done(self.avoid)
                self._record(compass, reading, "halt", events + ["disconnected"], phase=phase)
                raise
            self.avoid = replan_done(self.avoid)
            command = "halt"
        elif action.decision in (Decision.PROCEED, Decision.RESUME) and aligned:
            self.state = forward_step(self.grid, self.state, planned, models.drift, models.encoder, self.rng)
            self.queue.popleft()
            self.executed_cost += 1
            drift = self.state.last_drift_cm
            command = "forward"
            cell = self.state.cell
            if cell in self.keypoints.cells and cell not in self.covered:
                self.covered.append(cell)
                events.append("cover=" + _cell_str(cell))
        else:
            target = self.avoid.watched_move(planned)
            decision = heading_decision(compass, self._bearing(target), sc.control)
            if decision is HeadingCommand.FORWARD:
                command = "halt"
            else:
                self.state = turn(self.state, decision, sc.control)
                command = decision.value
        self._record(compass, reading, command, events, phase=phase, drift=drift)
        if not self.queue:
            self._finish()


def run_mission(scenario, seed):
    """Plan and execute a mission; returns ``(MissionResult, MissionTrace)``.

    Raises DisconnectedKeyPoint or TickBudgetExceeded on failure; the partial
    trace and result are attached to the exception as ``.trace`` and
    ``.result``.
    """
    mission = Mission(scenario, seed)
    try:
        while not mission.done:
            mission.step()
    except (DisconnectedKeyPoint, TickBudgetExceeded) as exc:
        exc.result = mission.summarize(False)
        exc.trace = mission.trace
        raise
    return mission.summarize(True), mission.trace
