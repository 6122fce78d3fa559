import numpy as np
import pytest
from hypothesis import given, strategies as st

from gridnav.errors import EmptyMap, InvalidChar, OutOfBounds, RaggedRows, ValidationError
from gridnav.gridmap import (
    MOVES, Cell, GridMap, KeyPointSet, Move, apply_move, format_map, is_free, neighbors, parse_map,
)


def test_parse_small_map(grid3):
    assert grid3.shape == (3, 3)
    assert list(zip(*np.nonzero(grid3.blocked))) == [(1, 1)]


def test_parse_single_cell():
    g = parse_map("0")
    assert g.shape == (1, 1) and not g.blocked.any()


@pytest.mark.parametrize("text, exc", [
    ("00\n0", RaggedRows),
    ("0a0", InvalidChar),
    ("0 0", InvalidChar),
    ("", EmptyMap),
    ("\n", EmptyMap),
])
def test_parse_errors(text, exc):
    with pytest.raises(exc):
        parse_map(text)


def test_error_reports_line():
    with pytest.raises(RaggedRows) as info:
        parse_map("000\n000\n00")
    assert info.value.line == 3


def test_trailing_newline_and_crlf():
    assert parse_map("01\n10\n") == parse_map("01\r\n10")


def test_cell_size_must_be_positive():
    with pytest.raises(ValidationError):
        parse_map("0", cell_size_cm=0)


def test_map_is_immutable(grid3):
    with pytest.raises(ValueError):
        grid3.blocked[0, 0] = True


def test_is_free(grid3):
    assert not is_free(grid3, (1, 1))
    assert is_free(grid3, (0, 0))
    assert not is_free(grid3, (3, 0))
    assert not is_free(grid3, (-1, 0))


def test_neighbors_interior(empty3):
    assert neighbors(empty3, (1, 1)) == [(0, (0, 1)), (1, (1, 0)), (2, (2, 1)), (3, (1, 2))]


def test_neighbors_corner(empty3):
    assert neighbors(empty3, (0, 0)) == [(2, (1, 0)), (3, (0, 1))]


def test_neighbors_skip_blocked(grid3):
    assert neighbors(grid3, (0, 1)) == [(1, (0, 0)), (3, (0, 2))]


def test_neighbors_out_of_bounds(grid3):
    with pytest.raises(OutOfBounds):
        neighbors(grid3, (5, 5))


def test_move_table_is_fixed():
    assert MOVES == ((-1, 0), (0, -1), (1, 0), (0, 1))
    assert [m.name for m in Move] == ["FORWARD", "LEFT", "BACKWARD", "RIGHT"]


def test_relative_directions():
    assert Move.FORWARD.right() is Move.RIGHT
    assert Move.FORWARD.left() is Move.LEFT
    assert Move.RIGHT.right() is Move.BACKWARD
    assert Move.LEFT.back() is Move.RIGHT


def test_keypoint_rules(grid3):
    with pytest.raises(ValidationError):
        KeyPointSet((0, 0), ((0, 0),))
    with pytest.raises(ValidationError):
        KeyPointSet((0, 0), ((0, 1), (0, 1)))
    with pytest.raises(ValidationError):
        KeyPointSet((1, 1)).validate_on(grid3)
    with pytest.raises(ValidationError):
        KeyPointSet((0, 0), ((4, 0),)).validate_on(grid3)
    kps = KeyPointSet((0, 0), ((2, 2),))
    assert kps.cells == (Cell(0, 0), Cell(2, 2)) and len(kps) == 2


def test_with_blocked_leaves_original(grid3):
    other = grid3.with_blocked([(0, 0)])
    assert other.blocked[0, 0] and not grid3.blocked[0, 0]


grids = st.integers(1, 8).flatmap(
    lambda width: st.lists(st.text("01", min_size=width, max_size=width), min_size=1, max_size=8)
)


@given(grids)
def test_format_parse_roundtrip(rows):
    g = parse_map("\n".join(rows))
    again = parse_map(format_map(g))
    assert again == g
    assert format_map(again) == "\n".join(rows) + "\n"


@given(grids, st.data())
def test_neighbors_never_blocked(rows, data):
    g = parse_map("\n".join(rows))
    r = data.draw(st.integers(0, g.rows - 1))
    c = data.draw(st.integers(0, g.cols - 1))
    out = neighbors(g, (r, c))
    assert len(out) <= 4
    for move, cell in out:
        assert is_free(g, cell)
        assert apply_move((r, c), move) == cell


@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(0, 3))
def test_moves_round_trip(r, c, m):
    there = apply_move((r, c), m)
    assert apply_move(there, (m + 2) % 4) == (r, c)


def test_gridmap_equality_and_hash():
    a = GridMap(np.zeros((2, 2), bool))
    b = GridMap(np.zeros((2, 2), bool))
    assert a == b and hash(a) == hash(b)
    assert a != GridMap(np.zeros((2, 2), bool), cell_size_cm=30.0)
