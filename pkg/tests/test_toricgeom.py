import json
from math import comb

import pytest

from pt_toric.engine import global_coefficient, m_to_n
from pt_toric.toricgeom import (
    DegreeTuple,
    NonSmoothFan,
    NotComplete,
    Partition,
    RayBound,
    degree_tuples,
    fixed_points,
    load_surface,
    partitions_in_rays,
    ray_bounds,
    surface_from_fan,
    surface_p2,
)


def test_p2_data():
    s = surface_p2()
    assert all(abs(v.w1[0] * v.w2[1] - v.w1[1] * v.w2[0]) == 1 for v in s.vertices)
    assert [e.self_intersection for e in s.edges] == [1, 1, 1]
    assert m_to_n(s, 2, 0) == 1  # m = n - 1 in degree two


def test_fan_p2_self_intersections():
    s = surface_from_fan([(1, 0), (0, 1), (-1, -1)])
    assert [e.self_intersection for e in s.edges] == [1, 1, 1]
    assert s.class_rank == 1


def test_fan_p1xp1_and_hirzebruch():
    s = load_surface("p1xp1")
    assert [e.self_intersection for e in s.edges] == [0, 0, 0, 0]
    for a in (1, 2, 3):
        f = surface_from_fan([(1, 0), (0, 1), (-1, a), (0, -1)])
        assert [e.self_intersection for e in f.edges] == [0, -a, 0, a]


def test_fan_errors():
    with pytest.raises(NonSmoothFan):
        surface_from_fan([(1, 0), (1, 2), (-1, -1)])
    with pytest.raises(NotComplete):
        surface_from_fan([(1, 0), (0, 1)])
    with pytest.raises(NotComplete):
        surface_from_fan([(1, 0), (-1, -1), (0, 1)])


def test_load_surface_from_file(tmp_path):
    p = tmp_path / "fan.json"
    p.write_text(json.dumps({"rays": [[1, 0], [0, 1], [-1, 0], [0, -1]], "name": "box"}))
    s = load_surface(str(p))
    assert s.name == "box" and len(s.vertices) == 4


def test_degree_tuples_p2():
    s = surface_p2()
    assert {d.degrees for d in degree_tuples(s, 1)} == {(1, 0, 0), (0, 1, 0), (0, 0, 1)}
    two = {d.degrees for d in degree_tuples(s, 2)}
    assert len(two) == 6 and (2, 0, 0) in two and (1, 1, 0) in two
    assert [d.degrees for d in degree_tuples(s, 0)] == [(0, 0, 0)]
    for d in range(6):
        assert len(degree_tuples(s, d)) == comb(d + 2, 2)


def test_ray_bounds_p2():
    s = surface_p2()
    # vertex alpha: coordinate 1 runs along edge 0 (alpha-beta)
    assert ray_bounds(s, DegreeTuple((1, 0, 0)), 0) == RayBound(1, 0)
    assert all(ray_bounds(s, DegreeTuple((0, 0, 0)), v) == RayBound(0, 0) for v in range(3))
    # beta sits between edges 0 and 1
    assert ray_bounds(s, DegreeTuple((1, 1, 0)), 1) == RayBound(1, 1)


def test_partitions_examples():
    assert partitions_in_rays(RayBound(1, 0), 4) == [Partition((1, 1, 1, 1))]
    hooks = partitions_in_rays(RayBound(1, 1), 3)
    assert sorted(p.heights for p in hooks) == sorted([(3,), (2, 1), (1, 1, 1)])
    assert partitions_in_rays(RayBound(0, 0), 1) == []
    assert partitions_in_rays(RayBound(0, 0), 0) == [Partition(())]


def test_partition_counts():
    for m in range(0, 9):
        assert len(partitions_in_rays(RayBound(1, 1), m)) == max(m, 1)
        assert len(partitions_in_rays(RayBound(1, 0), m)) == 1


@pytest.mark.parametrize("bound", [RayBound(1, 1), RayBound(2, 1), RayBound(2, 3), RayBound(0, 2)])
def test_partitions_are_down_closed_and_in_rays(bound):
    for m in range(7):
        seen = set()
        for p in partitions_in_rays(bound, m):
            boxes = set(p.boxes())
            assert len(boxes) == m
            for k1, k2 in boxes:
                assert bound.contains(k1, k2)
                if k1:
                    assert (k1 - 1, k2) in boxes
                if k2:
                    assert (k1, k2 - 1) in boxes
            assert p not in seen
            seen.add(p)


def test_partition_helpers():
    p = Partition((3, 1))
    assert p.transpose() == Partition((2, 1, 1))
    assert Partition.from_boxes(p.boxes()) == p
    with pytest.raises(ValueError):
        Partition((1, 2))


def test_fixed_point_count_matches_enumeration():
    s = surface_p2()
    pts = list(fixed_points(s, 1, 2))
    assert all(fp.size == 2 for fp in pts)
    # one edge of degree one: its two endpoints carry rows, the third vertex nothing
    assert len(pts) == 3 * 3


def test_relabeling_invariance():
    a = surface_p2()
    b = surface_from_fan([(1, 0), (0, 1), (-1, -1)])
    for d in range(3):
        for m in range(3):
            for slope in (29, 31):
                assert global_coefficient(a, d, m, slope) == global_coefficient(b, (d,), m, slope)
