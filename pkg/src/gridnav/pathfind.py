"""Shortest paths between grid cells under 4-connectivity."""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels
from .errors import BlockedEndpoint, NonAdjacentStep
from .gridmap import MOVES, Cell, apply_move, is_free


@dataclass(frozen=True)
class Path:
    cells: tuple

    @property
    def cost(self):
        return len(self.cells) - 1

    @property
    def start(self):
        return self.cells[0]

    @property
    def goal(self):
        return self.cells[-1]

    def reversed(self):
        return Path(self.cells[::-1])


def heuristic(cell, goal):
    """Obstacle-blind step count to ``goal`` using only the four moves."""
    return abs(cell[0] - goal[0]) + abs(cell[1] - goal[1])


def astar(grid, start, goal):
    """Minimum-step path from ``start`` to ``goal``, or None if unreachable.

    Ties on f = g + h go to the node with the larger g, then to the node
    inserted first, so the returned path is fully determined by the inputs.
    """
    start = Cell(*start)
    goal = Cell(*goal)
    for end in (start, goal):
        if not is_free(grid, end):
            raise BlockedEndpoint(f"endpoint {tuple(end)} is blocked or out of bounds")
    cost, flat = kernels.astar_grid(grid.blocked, start.row, start.col, goal.row, goal.col)
    if cost < 0:
        return None
    cols = grid.cols
    return Path(tuple(Cell(int(i) // cols, int(i) % cols) for i in flat))


def path_to_moves(path):
    cells = path.cells if isinstance(path, Path) else tuple(path)
    moves = []
    for a, b in zip(cells, cells[1:]):
        delta = (b[0] - a[0], b[1] - a[1])
        try:
            moves.append(MOVES.index(delta))
        except ValueError:
            raise NonAdjacentStep(f"{tuple(a)} -> {tuple(b)} is not a single move") from None
    return moves


def apply_moves(start, moves):
    cells = [Cell(*start)]
    for m in moves:
        cells.append(apply_move(cells[-1], m))
    return Path(tuple(cells))
