"""Visiting order over key points: distance matrix, annealing, oracles.

A tour is *closed* when it returns to index 0 after the last stop and *open*
when it starts at index 0 and must finish at index n-1 (used when replanning
from the robot's current cell back to the origin).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from . import kernels
from .errors import DisconnectedKeyPoint, InfeasibleLeg, TooManyKeyPoints, ValidationError
from .gridmap import Cell, KeyPointSet, is_free
from .pathfind import Path, astar

INFEASIBLE = -1
BRUTE_FORCE_LIMIT = 10


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    cells: tuple
    d: np.ndarray
    paths: dict

    @property
    def n(self):
        return len(self.cells)

    def path(self, i, j):
        if i == j:
            return Path((self.cells[i],))
        if (i, j) in self.paths:
            return self.paths[i, j]
        return self.paths[j, i].reversed()


@dataclass(frozen=True)
class Tour:
    order: tuple
    total_cost: int
    closed: bool = True

    def legs(self):
        """Consecutive (from, to) index pairs, including the return leg if closed."""
        pairs = list(zip(self.order, self.order[1:]))
        if self.closed and len(self.order) > 1:
            pairs.append((self.order[-1], self.order[0]))
        return pairs


@dataclass(frozen=True)
class SaConfig:
    """Annealing schedule.  ``None`` fields resolve per instance:
    the start temperature to the largest matrix entry and the sweep length
    to ``100 * n``."""

    initial_temperature: Optional[float] = None
    cooling_rate: float = 0.995
    iterations_per_temperature: Optional[int] = None
    minimum_temperature: float = 1e-3
    rng_seed: int = 0

    def __post_init__(self):
        if self.initial_temperature is not None and not self.initial_temperature > 0:
            raise ValidationError("sa.initial_temperature must be positive")
        if not 0 < self.cooling_rate < 1:
            raise ValidationError("sa.cooling_rate must lie in (0, 1)")
        if self.iterations_per_temperature is not None and self.iterations_per_temperature < 1:
            raise ValidationError("sa.iterations_per_temperature must be at least 1")
        if not self.minimum_temperature > 0:
            raise ValidationError("sa.minimum_temperature must be positive")
        if not 0 <= self.rng_seed < 2**64:
            raise ValidationError("sa.rng_seed must be a 64-bit unsigned integer")


class SaRecord(NamedTuple):
    iteration: int
    temperature: float
    current_cost: int
    best_cost: int


@dataclass(frozen=True)
class SaRun:
    tour: Tour
    initial: Tour
    identity_cost: int
    history: tuple
    temperature: float
    iterations_per_temperature: int


def pairwise_distances(grid, keypoints, cache=None):
    """A* costs and paths between every pair of key points.

    ``keypoints`` is a KeyPointSet or a sequence of cells with the start
    first.  ``cache`` maps ``(cell_a, cell_b)`` to a previously found Path; a
    cached path is reused only while every cell on it is still free, which
    keeps it optimal because blocking cells can only lengthen routes.
    """
    cells = keypoints.cells if isinstance(keypoints, KeyPointSet) else tuple(Cell(*c) for c in keypoints)
    n = len(cells)
    d = np.full((n, n), INFEASIBLE, dtype=np.int64)
    np.fill_diagonal(d, 0)
    paths = {}
    for i in range(n):
        for j in range(i + 1, n):
            path = _cached(grid, cache, cells[i], cells[j])
            if path is None:
                path = astar(grid, cells[i], cells[j])
                if path is not None and cache is not None:
                    cache[cells[i], cells[j]] = path
            if path is None:
                if i == 0:
                    raise DisconnectedKeyPoint(
                        f"key point {tuple(cells[j])} is unreachable from {tuple(cells[0])}", cell=cells[j]
                    )
                continue
            d[i, j] = d[j, i] = path.cost
            paths[i, j] = path
    return DistanceMatrix(cells, d, paths)


def _cached(grid, cache, a, b):
    if cache is None:
        return None
    path = cache.get((a, b))
    if path is None:
        hit = cache.get((b, a))
        path = hit.reversed() if hit is not None else None
    if path is not None and all(is_free(grid, c) for c in path.cells):
        return path
    return None


def _matrix(d):
    return d.d if isinstance(d, DistanceMatrix) else np.asarray(d, dtype=np.int64)


def tour_length(d, order, closed=True):
    m = _matrix(d)
    legs = list(zip(order, order[1:]))
    if closed and len(order) > 1:
        legs.append((order[-1], order[0]))
    total = 0
    for a, b in legs:
        step = int(m[a, b])
        if step == INFEASIBLE:
            raise InfeasibleLeg(f"no path between key points {a} and {b}")
        total += step
    return total


def identity_tour(d, closed=True):
    order = tuple(range(_matrix(d).shape[0]))
    return Tour(order, tour_length(d, order, closed), closed)


def nearest_neighbor_tour(d, closed=True):
    m = _matrix(d)
    n = m.shape[0]
    if n == 1:
        return Tour((0,), 0, closed)
    pool = set(range(1, n if closed else n - 1))
    order = [0]
    while pool:
        here = order[-1]
        nxt = min(pool, key=lambda k: (m[here, k] if m[here, k] != INFEASIBLE else np.iinfo(np.int64).max, k))
        order.append(nxt)
        pool.remove(nxt)
    if not closed:
        order.append(n - 1)
    order = tuple(order)
    return Tour(order, tour_length(d, order, closed), closed)


def brute_force_tour(d, closed=True):
    """Exhaustive optimum; ties resolve to the lexicographically smallest order."""
    m = _matrix(d)
    n = m.shape[0]
    if n > BRUTE_FORCE_LIMIT:
        raise TooManyKeyPoints(f"brute force is limited to {BRUTE_FORCE_LIMIT} key points, got {n}")
    if n == 1:
        return Tour((0,), 0, closed)
    inner = range(1, n) if closed else range(1, n - 1)
    tail = () if closed else (n - 1,)
    best = None
    best_cost = None
    for perm in itertools.permutations(inner):
        order = (0,) + perm + tail
        cost = tour_length(m, order, closed)
        if best_cost is None or cost < best_cost:
            best, best_cost = order, cost
    return Tour(best, best_cost, closed)


def anneal(d, cfg=None, closed=True):
    """Run 2-opt simulated annealing from the nearest-neighbour tour (or the
    identity order, when that is shorter)."""
    cfg = cfg or SaConfig()
    m = _matrix(d)
    n = m.shape[0]
    if n > 1 and (m == INFEASIBLE).any():
        raise InfeasibleLeg("distance matrix contains unreachable pairs")
    ident = identity_tour(m, closed)
    identity_cost = ident.total_cost
    initial = nearest_neighbor_tour(m, closed)
    # Never start worse than the unoptimised order, so the result can't be either.
    if identity_cost < initial.total_cost:
        initial = ident
    t0 = float(cfg.initial_temperature if cfg.initial_temperature is not None else m.max())
    iters = cfg.iterations_per_temperature or 100 * n
    lo, hi = 1, (n - 1 if closed else n - 2)
    if hi - lo + 1 < 2 or t0 <= cfg.minimum_temperature:
        return SaRun(initial, initial, identity_cost, (), t0, iters)
    levels = kernels.count_levels(t0, cfg.cooling_rate, cfg.minimum_temperature)
    h_iter = np.zeros(levels, dtype=np.int64)
    h_temp = np.zeros(levels, dtype=np.float64)
    h_cur = np.zeros(levels, dtype=np.int64)
    h_best = np.zeros(levels, dtype=np.int64)
    order = np.array(initial.order, dtype=np.int64)
    best = kernels.anneal_route(
        np.ascontiguousarray(m), order, lo, hi, closed, t0, cfg.cooling_rate, iters,
        cfg.minimum_temperature, np.uint64(cfg.rng_seed), h_iter, h_temp, h_cur, h_best,
    )
    tour = Tour(tuple(int(k) for k in order), int(best), closed)
    history = tuple(
        SaRecord(int(a), float(b), int(c), int(e)) for a, b, c, e in zip(h_iter, h_temp, h_cur, h_best)
    )
    return SaRun(tour, initial, identity_cost, history, t0, iters)


def sa_optimize(d, cfg=None, closed=True):
    return anneal(d, cfg, closed).tour
