import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import smooth_path
from lateral_bitstar.reference_path import (
    CurvilinearPoint,
    DegenerateSegmentError,
    OutOfCorridorError,
    PathConstructionError,
    PathDomainError,
    Pose,
    build_reference_path,
    wrap_angle,
)


def test_cum_p_planar():
    path = build_reference_path([(0, 0, 0), (3, 4, 0)], a=1.0)
    np.testing.assert_allclose(path.cum_p, [0.0, 5.0])


def test_cum_p_pure_rotation():
    path = build_reference_path([(0, 0, 0), (0, 0, math.pi / 2)], a=0.04)
    np.testing.assert_allclose(path.cum_p, [0.0, 0.2 * math.pi / 2], rtol=1e-12)


def test_cum_p_collinear_zero_weight():
    path = build_reference_path([(0, 0, 0), (1, 0, 0), (2, 0, 0)], a=0.0)
    np.testing.assert_allclose(path.cum_p, [0.0, 1.0, 2.0])


def test_yaw_step_uses_wrapped_difference():
    # 350 deg -> 10 deg is a 20 deg turn, not 340
    path = build_reference_path([(0, 0, math.radians(350)), (0, 0, math.radians(10))], a=1.0)
    assert path.p_len == pytest.approx(math.radians(20))


def test_pq_to_xy_on_straight(straight_path):
    assert straight_path.pq_to_xy(CurvilinearPoint(2.0, 0.0)) == pytest.approx((2.0, 0.0))
    assert straight_path.pq_to_xy((2.0, 1.0)) == pytest.approx((2.0, 1.0))


def test_pq_to_xy_rotation_midpoint():
    path = build_reference_path([(0, 0, 0), (0, 0, math.pi / 2)], a=0.04)
    x, y = path.pq_to_xy((path.p_len / 2, 1.0))
    assert (x, y) == pytest.approx((-math.sin(math.pi / 4), math.cos(math.pi / 4)), abs=1e-12)


def test_xy_to_pq_straight(straight_path):
    pt = straight_path.xy_to_pq(3.0, -2.0)
    assert (pt.p, pt.q) == pytest.approx((3.0, -2.0))
    pt = straight_path.xy_to_pq(5.0, 0.0)
    assert (pt.p, pt.q) == pytest.approx((5.0, 0.0))


def test_xy_to_pq_rejects_out_of_corridor(straight_path):
    with pytest.raises(OutOfCorridorError):
        straight_path.xy_to_pq(5.0, 2.5)
    assert straight_path.xy_to_pq(5.0, 2.5, check_bounds=False).q == pytest.approx(2.5)


def test_domain_errors(straight_path):
    with pytest.raises(PathDomainError):
        straight_path.pq_to_xy((10.5, 0.0))
    with pytest.raises(PathDomainError):
        straight_path.pq_to_xy((-0.1, 0.0))


def test_construction_errors():
    with pytest.raises(PathConstructionError):
        build_reference_path([(0, 0, 0)])
    with pytest.raises(DegenerateSegmentError):
        build_reference_path([(0, 0, 0), (0, 0, 0), (1, 0, 0)])
    with pytest.raises(PathConstructionError):
        build_reference_path([(0, 0, 0), (1, 0, 0)], q_bounds=(0.5, 2.0))
    with pytest.raises(PathConstructionError):
        build_reference_path([(0, 0, 0), (1, 0, 0)], a=-1.0)
    with pytest.raises(PathConstructionError):
        build_reference_path([(0, 0, 0), (float("nan"), 0, 0)])


def test_per_segment_bounds():
    path = build_reference_path([(0, 0, 0), (1, 0, 0), (2, 0, 0)], q_bounds=[(-1, 1), (-0.5, 2)])
    lo, hi = path.q_limits(1.5)
    assert (lo, hi) == (-0.5, 2.0)
    with pytest.raises(OutOfCorridorError):
        path.xy_to_pq(1.5, -0.8)


def _u_path():
    # out along y=0, half-turn about (10, 1), back along y=2
    poses = [(x, 0.0, 0.0) for x in np.arange(0.0, 10.0, 0.5)]
    for th in np.linspace(-math.pi / 2, math.pi / 2, 13):
        poses.append((10.0 + math.cos(th), 1.0 + math.sin(th), th + math.pi / 2))
    poses += [(x, 2.0, math.pi) for x in np.arange(9.5, -0.01, -0.5)]
    return build_reference_path(poses, a=0.1, q_bounds=(-1.5, 1.5))


def test_u_shape_tie_break_matches_exhaustive_projection():
    path = _u_path()
    x, y = 4.0, 1.0  # equidistant from both straight branches
    pt = path.xy_to_pq(x, y)
    # independent oracle: dense projection onto every segment, keeping perpendicular feet
    ps = np.linspace(0.0, path.p_len, 200001)
    px, py, psi = path.interpolate(ps)
    along = (x - px) * np.cos(psi) + (y - py) * np.sin(psi)
    lat = -(x - px) * np.sin(psi) + (y - py) * np.cos(psi)
    feet = np.nonzero(np.abs(along) < 1e-3)[0]
    best = np.min(np.abs(lat[feet]))
    ties = feet[np.abs(np.abs(lat[feet]) - best) < 1e-3]
    assert ps[ties].max() - ps[ties].min() > 10.0  # two genuine branches
    assert pt.p == pytest.approx(ps[ties].min(), abs=1e-3)
    assert pt.q == pytest.approx(1.0, abs=1e-9)


def test_endpoint_projection_stays_on_near_branch():
    path = _u_path()
    pt = path.xy_to_pq(0.0, 0.3)
    assert pt.p == pytest.approx(0.0, abs=1e-9)
    assert pt.q == pytest.approx(0.3)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_round_trip_random_smooth_paths(seed):
    rng = np.random.default_rng(seed)
    path = build_reference_path(smooth_path(rng), a=0.1, q_bounds=(-1.0, 1.0))
    ps = rng.uniform(0.05 * path.p_len, 0.95 * path.p_len, 20)
    qs = rng.uniform(-1.0, 1.0, 20)
    for p, q in zip(ps, qs):
        x, y = path.pq_to_xy((p, q))
        back = path.xy_to_pq(x, y)
        assert math.hypot(back.p - p, back.q - q) <= 1e-6


@given(st.floats(min_value=0.01, max_value=10.0), st.floats(min_value=1e-3, max_value=3.0))
def test_pure_rotation_has_positive_step(a, dpsi):
    path = build_reference_path([(1.0, 2.0, 0.0), (1.0, 2.0, dpsi)], a=a)
    assert path.cum_p[1] > 0.0


@given(st.floats(min_value=-100, max_value=100, allow_nan=False))
def test_wrap_angle_range(angle):
    w = wrap_angle(angle)
    assert -math.pi < w <= math.pi
    assert math.isclose(math.cos(w), math.cos(angle), abs_tol=1e-9)


def test_pose_wraps_yaw():
    assert Pose(0, 0, 3 * math.pi).psi == pytest.approx(math.pi)
