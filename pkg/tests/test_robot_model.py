import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gridnav.errors import BlockedAhead, NegativeDistance, NegativeTime, ValidationError
from gridnav.gridmap import Cell, Move, parse_map
from gridnav.robot_model import (
    BearingConfig, DriftModel, EncoderSpec, RobotState, UltrasonicModel, angle_diff, compass_read,
    echo_to_distance, forward_step, range_reading, ticks_for_distance, ultrasonic_read,
)

MODEL = UltrasonicModel()


def test_echo_examples():
    assert echo_to_distance(0.0, MODEL) == 0.0
    assert echo_to_distance(0.005831, MODEL) == pytest.approx(100.0, abs=0.1)
    assert echo_to_distance(0.01, MODEL) == pytest.approx(171.5, abs=1e-9)


def test_echo_is_linear():
    for t in (0.001, 0.004, 0.02):
        assert echo_to_distance(2 * t, MODEL) == pytest.approx(2 * echo_to_distance(t, MODEL))
    fast = UltrasonicModel(speed_of_sound_cm_s=2 * 34300.0)
    assert echo_to_distance(0.003, fast) == pytest.approx(2 * echo_to_distance(0.003, MODEL))


def test_echo_negative():
    with pytest.raises(NegativeTime):
        echo_to_distance(-1e-6, MODEL)


def test_ultrasonic_model_validation():
    with pytest.raises(ValidationError):
        UltrasonicModel(reliable_range_cm=500.0, max_range_cm=400.0)
    with pytest.raises(ValidationError):
        UltrasonicModel(reliable_range_cm=0.0)


@pytest.fixture
def corridor():
    return parse_map("00000\n00000")


def test_sonar_one_cell_ahead(corridor, rng):
    state = RobotState(Cell(0, 0), 90.0)
    reading = ultrasonic_read(corridor, {Cell(0, 1)}, state, Move.RIGHT, MODEL, rng)
    assert reading.reliable and reading.distance_cm == pytest.approx(60.96)


def test_sonar_nothing_in_range(rng):
    g = parse_map("0" * 12)
    reading = ultrasonic_read(g, set(), RobotState(Cell(0, 0), 90.0), Move.RIGHT, MODEL, rng)
    assert reading == (MODEL.max_range_cm, False)


def test_sonar_edge_counts_as_wall(corridor, rng):
    reading = ultrasonic_read(corridor, set(), RobotState(Cell(0, 0), 0.0), Move.FORWARD, MODEL, rng)
    assert reading.reliable and reading.distance_cm == pytest.approx(60.96)


def test_sonar_beyond_reliable_range_is_noisy():
    rng = np.random.default_rng(2024)
    draws = [range_reading(150.0, MODEL, rng) for _ in range(1000)]
    assert not any(r.reliable for r in draws)
    values = np.array([r.distance_cm for r in draws])
    sd = MODEL.beyond_range_noise_cm
    assert ((values >= 150 - 3 * sd - 1e-9) | (values <= 150 + 3 * sd + 1e-9)).all()
    assert np.abs(values - 150).max() <= 4 * sd
    assert abs(values.mean() - 150) < 1.0


def test_sonar_within_range_noise_optional():
    noisy = UltrasonicModel(within_range_noise_cm=2.0)
    rng = np.random.default_rng(1)
    vals = [range_reading(50.0, noisy, rng).distance_cm for _ in range(200)]
    assert np.std(vals) > 0.5


@pytest.mark.parametrize("distance, circ, counts, expected", [
    (0.0, 20.32, 20, 0),
    (60.96, 20.32, 20, 60),
    (10.0, 20.0, 20, 10),
])
def test_ticks_examples(distance, circ, counts, expected):
    assert ticks_for_distance(distance, EncoderSpec(circ, counts)) == expected


def test_ticks_negative():
    with pytest.raises(NegativeDistance):
        ticks_for_distance(-1.0, EncoderSpec())


def test_encoder_validation():
    with pytest.raises(ValidationError):
        EncoderSpec(0.0, 20)
    with pytest.raises(ValidationError):
        EncoderSpec(20.0, 0)


@given(st.floats(0, 1e4), st.floats(0, 1e4))
def test_ticks_monotone(a, b):
    spec = EncoderSpec(20.32, 20)
    lo, hi = sorted((a, b))
    assert ticks_for_distance(lo, spec) <= ticks_for_distance(hi, spec)


@given(st.integers(0, 5000))
def test_ticks_exact_on_count_multiples(k):
    spec = EncoderSpec(20.0, 40)
    assert ticks_for_distance(k * 0.5, spec) == k


def test_compass_examples():
    rng = np.random.default_rng(0)
    assert compass_read(90.0, 0.0, rng) == 90.0
    assert compass_read(359.5 + 1.0, 0.0, rng) == pytest.approx(0.5)


def test_compass_noise_circular_mean():
    rng = np.random.default_rng(77)
    vals = np.radians([compass_read(90.0, 1.0, rng) for _ in range(10_000)])
    mean = math.degrees(math.atan2(np.sin(vals).mean(), np.cos(vals).mean()))
    assert mean == pytest.approx(90.0, abs=0.05)


@given(st.floats(-1e4, 1e4), st.floats(0, 30), st.integers(0, 2**32))
def test_compass_range(heading, sd, seed):
    value = compass_read(heading, sd, np.random.default_rng(seed))
    assert 0.0 <= value < 360.0


def test_forward_noiseless(corridor, rng):
    state = RobotState(Cell(0, 0), 90.0)
    after = forward_step(corridor, state, Move.RIGHT, DriftModel(0.0, 0.0), EncoderSpec(), rng)
    assert after.cell == (0, 1) and after.lateral_offset_cm == 0.0 and after.heading_deg == 90.0
    assert after.encoder_counts == (60, 60)


def test_forward_drift_band(corridor):
    rng = np.random.default_rng(3)
    state = RobotState(Cell(0, 0), 90.0)
    for _ in range(500):
        dx = forward_step(corridor, state, Move.RIGHT, DriftModel(), EncoderSpec(), rng).last_drift_cm
        # [3, 8] cm per 50 cm scaled to a 60.96 cm cell.
        assert 3.6576 - 1e-9 <= abs(dx) <= 9.7536 + 1e-9


def test_forward_recentering(corridor, rng):
    state = RobotState(Cell(0, 0), 90.0)
    for _ in range(2):
        state = forward_step(corridor, state, Move.RIGHT, DriftModel(), EncoderSpec(), rng)
        assert state.lateral_offset_cm == 0.0 and state.last_drift_cm != 0.0
    free = DriftModel(recenter=False)
    state = RobotState(Cell(0, 0), 90.0)
    for _ in range(4):
        state = forward_step(corridor, state, Move.RIGHT, free, EncoderSpec(), rng)
        assert abs(state.lateral_offset_cm) < corridor.cell_size_cm


def test_forward_blocked(grid3, rng):
    with pytest.raises(BlockedAhead):
        forward_step(grid3, RobotState(Cell(0, 1), 180.0), Move.BACKWARD, DriftModel(), EncoderSpec(), rng)


def test_drift_validation():
    with pytest.raises(ValidationError):
        DriftModel(min_cm=5.0, max_cm=2.0)


def test_angle_diff():
    assert angle_diff(0.0, 350.0) == pytest.approx(10.0)
    assert angle_diff(90.0, 180.0) == pytest.approx(-90.0)
    assert angle_diff(0.0, 180.0) == 180.0


def test_bearings_validation():
    BearingConfig(forward=10.0, right=100.0, backward=190.0, left=280.0)
    BearingConfig(forward=0.0, right=90.5, backward=180.0, left=270.0)
    with pytest.raises(ValidationError):
        BearingConfig(forward=0.0, right=90.0, backward=180.0, left=271.0)
    with pytest.raises(ValidationError):
        BearingConfig(forward=0.0, right=90.0, backward=90.0, left=270.0)
    with pytest.raises(ValidationError):
        BearingConfig(forward=360.0)


def test_bearing_lookup():
    b = BearingConfig()
    assert b.bearing(Move.RIGHT) == 90.0
    assert b.nearest_move(93.0) is Move.RIGHT
