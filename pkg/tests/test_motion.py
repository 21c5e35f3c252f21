import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thztrack.errors import ConfigError
from thztrack.motion import KMH, linear_trajectory, sinusoidal_trajectory


def polyline_length(traj, t0, t1, samples=200_001):
    pts = traj.samples(np.linspace(t0, t1, samples))
    return float(np.sum(np.hypot(*np.diff(pts, axis=0).T)))


def test_linear_example():
    traj = linear_trajectory((0, 0), 0.0, 10 * KMH)
    np.testing.assert_allclose(traj.sample(3), (25 / 3, 0.0))
    np.testing.assert_allclose(traj.sample(0), (0, 0))


def test_stationary_ue():
    traj = linear_trajectory((4, -2), 1.0, 0.0)
    for t in range(5):
        np.testing.assert_array_equal(traj.sample(t), (4, -2))


@given(st.floats(0, 20), st.floats(-math.pi, math.pi), st.floats(0.1, 5))
def test_linear_step_length(speed, heading, dt):
    traj = linear_trajectory((1, 1), heading, speed, dt)
    assert math.dist(traj.sample(7), traj.sample(8)) == pytest.approx(speed * dt, abs=1e-9)


def test_zero_amplitude_is_linear():
    a = sinusoidal_trajectory((0, 5), 0.3, 2.0, amplitude=0.0)
    b = linear_trajectory((0, 5), 0.3, 2.0)
    np.testing.assert_array_equal(a.samples(range(10)), b.samples(range(10)))


@settings(max_examples=15, deadline=None)
@given(st.floats(0.0, 0.8), st.floats(3.0, 12.0))
def test_average_speed_over_one_period(amp_fraction, period):
    speed = 10 * KMH
    amplitude = amp_fraction * speed * period / 4
    traj = sinusoidal_trajectory((0, 0), 0.0, speed, amplitude, period)
    length = polyline_length(traj, 0.0, period)
    assert length / period == pytest.approx(speed, rel=0.01)


def test_reference_weave():
    traj = sinusoidal_trajectory((0, 0), 0.0, 10 * KMH, 2.0, 6.0)
    assert polyline_length(traj, 0, 6) == pytest.approx(6 * 10 * KMH, rel=1e-3)
    # the cross-track offset returns to zero every half period
    assert traj.sample(3)[1] == pytest.approx(0.0, abs=1e-12)
    assert traj.sample(1.5)[1] == pytest.approx(2.0)
    assert traj.along_step < 10 * KMH


def test_rotated_weave_keeps_offset_perpendicular():
    traj = sinusoidal_trajectory((0, 0), math.pi / 2, 3.0, 1.0, 8.0)
    p = traj.sample(2.0)  # quarter period: full offset
    assert p[0] == pytest.approx(-1.0)
    assert p[1] == pytest.approx(2 * traj.along_step)


@pytest.mark.parametrize("kwargs", [
    dict(amplitude=10.0, period=6.0),
    dict(amplitude=1.0, period=1.0),
    dict(amplitude=-1.0, period=6.0),
])
def test_infeasible_weaves(kwargs):
    with pytest.raises(ConfigError):
        sinusoidal_trajectory((0, 0), 0.0, 10 * KMH, **kwargs)
