"""Key-point tour planning and simulated execution on occupancy grids."""

__version__ = "0.1.0"

from ._accel import JIT_ENABLED, backend_name
from .gridmap import Cell, GridMap, KeyPointSet, Move, neighbors, parse_map, is_free
from .pathfind import Path, astar, heuristic, path_to_moves
from .tour import SaConfig, Tour, anneal, brute_force_tour, nearest_neighbor_tour, pairwise_distances, sa_optimize
from .scenario import Scenario, load_scenario, parse_scenario
from .sim import MissionResult, MissionTrace, run_mission

__all__ = [
    "JIT_ENABLED", "backend_name", "Cell", "GridMap", "KeyPointSet", "Move", "neighbors", "parse_map",
    "is_free", "Path", "astar", "heuristic", "path_to_moves", "SaConfig", "Tour", "anneal",
    "brute_force_tour", "nearest_neighbor_tour", "pairwise_distances", "sa_optimize", "Scenario",
    "load_scenario", "parse_scenario", "MissionResult", "MissionTrace", "run_mission",
]
