from fractions import Fraction

import pytest

from pt_toric.analysis import goettsche_coeffs
from pt_toric.engine import (
    CONVENTION_VERSION,
    SlopeExhausted,
    clear_caches,
    direct_coefficient,
    edge_class,
    evir,
    evir_series,
    fixedpoint_class,
    global_coefficient,
    local_vertex_sum,
    m_to_n,
    n_to_m,
    slope_candidates,
)
from pt_toric.exact import FactorProduct, PoleAtZero, UPoly, URatFunc, limit_at_zero
from pt_toric.toricgeom import DegreeTuple, Partition, RayBound, load_surface, surface_p2

P2 = surface_p2()
EMPTY3 = [Partition(())] * 3


def test_fixedpoint_class_trivial():
    assert fixedpoint_class(P2, DegreeTuple((0, 0, 0)), EMPTY3) == FactorProduct()


def test_fixedpoint_class_single_edge():
    fp = fixedpoint_class(P2, DegreeTuple((1, 0, 0)), EMPTY3)
    assert fp == edge_class(P2, 0, 1)
    assert fp.rank == 2


def test_fixedpoint_class_two_edges():
    fp = fixedpoint_class(P2, DegreeTuple((1, 1, 0)), EMPTY3)
    edges = edge_class(P2, 0, 1) * edge_class(P2, 1, 1)
    # the vertex shared by both edges adds one factor: t1 t2 of its chart, inverted
    w1, w2 = P2.vertices[1].weights
    extra = (-(w1[0] + w2[0]), -(w1[1] + w2[1]))
    assert fp == edges * FactorProduct({extra: 1})


def test_local_vertex_sum_examples():
    v = P2.vertices[0]
    assert local_vertex_sum(P2, v, RayBound(0, 0), 0, 7) == URatFunc.constant(1)
    assert local_vertex_sum(P2, v, RayBound(0, 0), 2, 7).is_zero()
    x = UPoly.x()
    for b in range(4):
        want = URatFunc.constant(1)
        for i in range(1, b + 1):  # (1 - i s1) / (-i s1), s1 = 7x
            want = want * URatFunc(UPoly((1, -7 * i)), x * (-7 * i))
        assert local_vertex_sum(P2, v, RayBound(1, 0), b, 7) == want


def test_global_coefficient_degree_one_examples():
    assert global_coefficient(P2, 1, 0, 13) == URatFunc.constant(3)
    assert global_coefficient(P2, 1, 2, 13) == URatFunc.constant(9)


@pytest.mark.parametrize("m", range(6))
def test_degree_one_constancy(m):
    for slope in (17, 19, 23):
        f = global_coefficient(P2, 1, m, slope)
        assert f.is_constant() and f.constant_value() == 3 * (m + 1)


@pytest.mark.parametrize("d,m", [(d, m) for d in range(3) for m in range(4)])
def test_convolution_equals_direct(d, m):
    slope = next(iter(slope_candidates(P2, d, m)))
    assert global_coefficient(P2, d, m, slope) == direct_coefficient(P2, d, m, slope)


def test_series_route_matches_ratfunc_route():
    for d, m in ((2, 2), (2, 3), (3, 1)):
        c = evir(P2, d, m)
        assert limit_at_zero(global_coefficient(P2, d, m, c.slope_used)) == c.value


def test_evir_examples():
    assert evir(P2, 2, 4).value == -336
    assert evir(P2, 3, 5).value == -19737


def test_evir_series_examples():
    assert [c.value for c in evir_series(P2, 1, 4)] == [3, 6, 9, 12, 15]
    assert [c.value for c in evir_series(P2, 2, 3)] == [6, 15, 36, 66]
    assert [c.value for c in evir_series(P2, 4, 5)] == [15, 42, 117, 264, 561, 1080]


def test_degree_zero_has_only_the_empty_pair():
    # with no curve there is no room for points: only m = 0 survives
    vals = [c.value for c in evir_series(P2, 0, 6)]
    assert vals == [1] + [0] * 6
    assert goettsche_coeffs(3, 6)[1:] != vals[1:]


def test_coefficient_record():
    c = evir(P2, 2, 1)
    assert c.value == 15 and c.value.denominator == 1
    assert c.convention_version == CONVENTION_VERSION
    assert len(set(c.slopes_checked)) >= 2
    assert c.n == 2
    rec = c.to_dict()
    assert rec["value"] == "15" and rec["degree"] == 2


def test_third_slope_sampled():
    # (7*2 + 6) % 10 == 0 puts (d=2, m=6) in the sample
    assert len(evir(P2, 2, 6).slopes_checked) == 3
    assert len(evir(P2, 2, 5).slopes_checked) == 2


def test_slope_override_on_pole_is_skipped():
    # slope 1 makes s1 - s2 vanish on the plane
    c = evir(P2, 1, 1, slope=1)
    assert c.value == 6 and Fraction(1) not in c.slopes_checked


def test_slope_exhausted(monkeypatch):
    import pt_toric.engine as eng
    monkeypatch.setattr(eng, "MAX_SLOPE_TRIES", 1)
    with pytest.raises(SlopeExhausted):
        evir(P2, 1, 0)


@pytest.mark.parametrize("convention", ["regrouped", "display"])
def test_other_infinite_vertex_orientations_fail_calibration(convention):
    try:
        value = evir(P2, 2, 0, convention=convention).value
    except PoleAtZero:
        return
    assert value != 6


def test_index_shift():
    assert n_to_m(P2, 1, 1) == 0
    for n in range(5):
        assert n_to_m(P2, 3, n) == n
    assert n_to_m(P2, 4, 0) == 2
    for d in range(5):
        for m in range(4):
            assert n_to_m(P2, d, m_to_n(P2, d, m)) == m
            assert m_to_n(P2, d, m) == m - d * (d - 3) // 2


def test_worker_count_does_not_change_output():
    clear_caches()
    one = [c.to_dict() for c in evir_series(P2, 2, 4, workers=1)]
    clear_caches()
    two = [c.to_dict() for c in evir_series(P2, 2, 4, workers=2)]
    for r in one + two:
        r.pop("wall_time_ms")
    assert one == two


def test_fibre_classes_count_points_on_a_line():
    # a ruling fibre moves in a pencil and carries P^m of point sets
    for name, beta in (("p1xp1", (1, 0)), ("p1xp1", (0, 1)), ("f1", (1, 0)), ("f2", (1, 0))):
        vals = [c.value for c in evir_series(load_surface(name), beta, 4)]
        assert vals == [2 * (m + 1) for m in range(5)]


def test_low_m_on_other_surfaces():
    # m = 0: chi of the linear system; m = 1: chi(S) * chi(curves through a point)
    s = load_surface("p1xp1")
    assert [c.value for c in evir_series(s, (1, 1), 1)] == [4, 4 * 3]
    f1 = load_surface("f1")
    assert [c.value for c in evir_series(f1, (0, 1), 1)] == [3, 4 * 2]
