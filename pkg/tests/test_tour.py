import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gridnav.errors import DisconnectedKeyPoint, InfeasibleLeg, TooManyKeyPoints, ValidationError
from gridnav.gridmap import Cell, KeyPointSet, parse_map
from gridnav.tour import (
    INFEASIBLE, SaConfig, anneal, brute_force_tour, identity_tour, nearest_neighbor_tour,
    pairwise_distances, sa_optimize, tour_length,
)

from oracles import bfs_cost, enumerate_tour_cost, largest_component, random_blocked


def empty(n):
    return parse_map("\n".join(["0" * n] * n))


@pytest.fixture
def three_corners():
    return pairwise_distances(empty(5), KeyPointSet((0, 0), ((0, 4), (4, 0))))


def test_pairwise_three_corners(three_corners):
    d = three_corners.d
    assert (d[0, 1], d[0, 2], d[1, 2]) == (4, 4, 8)
    assert (d == d.T).all() and (np.diag(d) == 0).all()
    assert three_corners.path(1, 0).cells == three_corners.path(0, 1).cells[::-1]


def test_pairwise_origin_only():
    dm = pairwise_distances(empty(3), KeyPointSet((1, 1)))
    assert dm.d.tolist() == [[0]]


def test_pairwise_disconnected():
    g = parse_map("00000\n00000\n11111\n00000\n00000")
    assert bfs_cost(g.blocked, (0, 0), (4, 4)) is None
    with pytest.raises(DisconnectedKeyPoint):
        pairwise_distances(g, KeyPointSet((0, 0), ((4, 4),)))


def test_pairwise_uses_cache_only_when_path_still_free():
    g = empty(5)
    cache = {}
    pairwise_distances(g, [(0, 0), (0, 4)], cache=cache)
    cached = cache[Cell(0, 0), Cell(0, 4)]
    blocked = g.with_blocked([cached.cells[2]])
    dm = pairwise_distances(blocked, [(0, 0), (0, 4)], cache=cache)
    assert cached.cells[2] not in dm.path(0, 1).cells
    assert dm.d[0, 1] == bfs_cost(blocked.blocked, (0, 0), (0, 4))


def test_tour_length_examples(three_corners):
    assert tour_length(three_corners, [0, 1, 2]) == 16
    assert tour_length(three_corners, [0, 2, 1]) == 16
    assert tour_length(np.zeros((1, 1), dtype=np.int64), [0]) == 0


def test_tour_length_infeasible():
    d = np.array([[0, 3, 1], [3, 0, INFEASIBLE], [1, INFEASIBLE, 0]])
    with pytest.raises(InfeasibleLeg):
        tour_length(d, [0, 1, 2])


def test_brute_force_examples(three_corners):
    t = brute_force_tour(three_corners)
    assert t.order == (0, 1, 2) and t.total_cost == 16
    d2 = np.array([[0, 7], [7, 0]])
    assert brute_force_tour(d2).order == (0, 1) and brute_force_tour(d2).total_cost == 14
    with pytest.raises(TooManyKeyPoints):
        brute_force_tour(np.zeros((11, 11), dtype=np.int64))


def test_nearest_neighbor_examples(three_corners):
    t = nearest_neighbor_tour(three_corners)
    assert t.order == (0, 1, 2) and t.total_cost == 16
    assert nearest_neighbor_tour(np.zeros((1, 1))).order == (0,)


def test_nearest_neighbor_with_obstacles_not_better_than_optimum():
    g = parse_map("0000000\n0111110\n0000000\n0111100\n0000000")
    dm = pairwise_distances(g, [(0, 0), (2, 5), (4, 6), (4, 0)])
    assert nearest_neighbor_tour(dm).total_cost >= brute_force_tour(dm).total_cost == enumerate_tour_cost(dm.d)


def test_sa_single_point():
    t = sa_optimize(np.zeros((1, 1), dtype=np.int64))
    assert t.order == (0,) and t.total_cost == 0


def test_sa_four_corners():
    g = empty(7)
    dm = pairwise_distances(g, [(0, 0), (0, 6), (6, 6), (6, 0)])
    # Enumerating all 3! orders gives 24.
    assert sa_optimize(dm, SaConfig(rng_seed=5)).total_cost == enumerate_tour_cost(dm.d) == 24


def test_sa_open_route_pins_both_ends():
    g = empty(6)
    dm = pairwise_distances(g, [(5, 5), (0, 0), (5, 0), (0, 5), (2, 2)])
    t = sa_optimize(dm, SaConfig(rng_seed=1), closed=False)
    assert t.order[0] == 0 and t.order[-1] == 4 and not t.closed
    assert t.total_cost == enumerate_tour_cost(dm.d, closed=False) == brute_force_tour(dm, closed=False).total_cost


def test_sa_history_is_monotone_in_best():
    g = empty(9)
    dm = pairwise_distances(g, [(0, 0), (8, 8), (0, 8), (8, 0), (4, 4), (2, 6)])
    run = anneal(dm, SaConfig(rng_seed=3))
    best = [r.best_cost for r in run.history]
    assert best == sorted(best, reverse=True)
    assert best[-1] == run.tour.total_cost
    temps = [r.temperature for r in run.history]
    assert temps[0] == dm.d.max() and all(b < a for a, b in zip(temps, temps[1:]))
    assert run.iterations_per_temperature == 600


def test_sa_rejects_infeasible():
    d = np.array([[0, 3, 1], [3, 0, INFEASIBLE], [1, INFEASIBLE, 0]])
    with pytest.raises(InfeasibleLeg):
        sa_optimize(d)


@pytest.mark.parametrize("kwargs", [
    {"initial_temperature": 0.0},
    {"cooling_rate": 1.0},
    {"cooling_rate": 0.0},
    {"iterations_per_temperature": 0},
    {"minimum_temperature": -1.0},
    {"rng_seed": -1},
])
def test_sa_config_validation(kwargs):
    with pytest.raises(ValidationError):
        SaConfig(**kwargs)


def _random_instance(seed, n, size=15, density=0.2):
    rng = np.random.default_rng(seed)
    blocked = random_blocked(rng, size, size, density)
    comp = largest_component(blocked)
    picks = rng.choice(len(comp), size=min(n, len(comp)), replace=False)
    g = parse_map("\n".join("".join("1" if b else "0" for b in row) for row in blocked))
    return pairwise_distances(g, [comp[i] for i in picks])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 7))
def test_tour_ordering_properties(seed, n):
    dm = _random_instance(seed, n)
    brute = brute_force_tour(dm)
    sa = sa_optimize(dm, SaConfig(rng_seed=seed, cooling_rate=0.95))
    greedy = nearest_neighbor_tour(dm)
    assert brute.total_cost <= sa.total_cost
    assert brute.total_cost <= greedy.total_cost
    assert sa.total_cost <= identity_tour(dm).total_cost
    assert brute.total_cost == enumerate_tour_cost(dm.d)
    for t in (brute, sa, greedy):
        assert t.order[0] == 0 and sorted(t.order) == list(range(dm.n))
        assert tour_length(dm, t.order) == t.total_cost
        rev = (0,) + tuple(reversed(t.order[1:]))
        assert tour_length(dm, rev) == t.total_cost


@pytest.mark.slow
def test_sa_hits_optimum_on_empty_grid():
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        flat = rng.choice(225, size=8, replace=False)
        dm = pairwise_distances(empty(15), [(int(i) // 15, int(i) % 15) for i in flat])
        hits += sa_optimize(dm, SaConfig(rng_seed=seed)).total_cost == brute_force_tour(dm).total_cost
    assert hits >= 95
