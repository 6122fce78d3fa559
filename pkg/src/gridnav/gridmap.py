"""Occupancy grid, key points and the four-direction move table."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import NamedTuple

import numpy as np

from .errors import EmptyMap, InvalidChar, OutOfBounds, RaggedRows, ValidationError

DEFAULT_CELL_SIZE_CM = 60.96  # 2 ft


class Cell(NamedTuple):
    row: int
    col: int

    def __str__(self):
        return f"{self.row},{self.col}"


class Move(IntEnum):
    FORWARD = 0
    LEFT = 1
    BACKWARD = 2
    RIGHT = 3

    @property
    def delta(self):
        return MOVES[self]

    def right(self):
        """Move id pointing 90 degrees clockwise of this one."""
        return Move((self + 3) % 4)

    def left(self):
        return Move((self + 1) % 4)

    def back(self):
        return Move((self + 2) % 4)


# Index i is the canonical move id; order and values are fixed.
MOVES = ((-1, 0), (0, -1), (1, 0), (0, 1))


def apply_move(cell, move):
    dr, dc = MOVES[move]
    return Cell(cell[0] + dr, cell[1] + dc)


@dataclass(frozen=True, eq=False)
class GridMap:
    """Immutable occupancy grid; ``blocked[r, c]`` is True for static obstacles."""

    blocked: np.ndarray
    cell_size_cm: float = DEFAULT_CELL_SIZE_CM

    def __post_init__(self):
        arr = np.array(self.blocked, dtype=bool, copy=True)
        if arr.ndim != 2 or arr.size == 0:
            raise ValidationError("occupancy must be a non-empty 2D array")
        if not self.cell_size_cm > 0:
            raise ValidationError(f"cell_size_cm must be positive, got {self.cell_size_cm}")
        arr.flags.writeable = False
        object.__setattr__(self, "blocked", arr)

    @property
    def rows(self):
        return self.blocked.shape[0]

    @property
    def cols(self):
        return self.blocked.shape[1]

    @property
    def shape(self):
        return self.blocked.shape

    def in_bounds(self, cell):
        return 0 <= cell[0] < self.rows and 0 <= cell[1] < self.cols

    def with_blocked(self, cells):
        """Copy of this map with extra cells marked blocked."""
        arr = self.blocked.copy()
        for r, c in cells:
            if 0 <= r < self.rows and 0 <= c < self.cols:
                arr[r, c] = True
        return GridMap(arr, self.cell_size_cm)

    def free_cells(self):
        return [Cell(int(r), int(c)) for r, c in zip(*np.nonzero(~self.blocked))]

    def __eq__(self, other):
        if not isinstance(other, GridMap):
            return NotImplemented
        return (
            self.cell_size_cm == other.cell_size_cm
            and self.blocked.shape == other.blocked.shape
            and bool(np.array_equal(self.blocked, other.blocked))
        )

    def __hash__(self):
        return hash((self.blocked.shape, self.blocked.tobytes(), self.cell_size_cm))


@dataclass(frozen=True)
class KeyPointSet:
    origin: Cell
    others: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "origin", Cell(*self.origin))
        others = tuple(Cell(*c) for c in self.others)
        object.__setattr__(self, "others", others)
        seen = {self.origin}
        for c in others:
            if c in seen:
                raise ValidationError(f"duplicate key point {c}")
            seen.add(c)

    @property
    def cells(self):
        """All key points, origin first."""
        return (self.origin,) + self.others

    def __len__(self):
        return 1 + len(self.others)

    def validate_on(self, grid):
        for c in self.cells:
            if not grid.in_bounds(c):
                raise ValidationError(f"key point {c} is outside the {grid.rows}x{grid.cols} map")
            if grid.blocked[c]:
                raise ValidationError(f"key point {c} lies on a blocked cell")


def parse_map(text, cell_size_cm=DEFAULT_CELL_SIZE_CM):
    """Parse newline-separated rows of '0'/'1' into a GridMap.

    A single trailing newline is allowed; ``\\r\\n`` line endings are accepted.
    """
    if text.endswith("\n"):
        text = text[:-1]
    if not text:
        raise EmptyMap("map has no rows")
    lines = [ln[:-1] if ln.endswith("\r") else ln for ln in text.split("\n")]
    width = len(lines[0])
    rows = []
    for i, line in enumerate(lines, start=1):
        bad = set(line) - {"0", "1"}
        if bad:
            raise InvalidChar(f"invalid map character {sorted(bad)[0]!r}", line=i)
        if len(line) != width:
            raise RaggedRows(f"row has {len(line)} cells, expected {width}", line=i)
        rows.append([ch == "1" for ch in line])
    if width == 0:
        raise EmptyMap("map rows are empty")
    return GridMap(np.array(rows, dtype=bool), cell_size_cm)


def format_map(grid):
    return "\n".join("".join("1" if b else "0" for b in row) for row in grid.blocked) + "\n"


def is_free(grid, cell):
    r, c = cell
    return 0 <= r < grid.rows and 0 <= c < grid.cols and not grid.blocked[r, c]


def neighbors(grid, cell):
    """Free in-bounds neighbours of ``cell`` as ``(move_id, Cell)`` in move-table order."""
    if not grid.in_bounds(cell):
        raise OutOfBounds(f"{tuple(cell)} is outside the {grid.rows}x{grid.cols} map")
    out = []
    for move, (dr, dc) in enumerate(MOVES):
        nxt = Cell(cell[0] + dr, cell[1] + dc)
        if is_free(grid, nxt):
            out.append((move, nxt))
    return out
