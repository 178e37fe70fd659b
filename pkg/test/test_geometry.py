import logging

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
import pytest

import geometry
from geometry import Curve, StagedGeometry, resample_uniform, \
    find_intersections, segment_at_intersections, polygon_area
from utils import GeometryError
from test.shapes import unit_square, quarter_circle, circle, figure4


def test_curve_rejects_coinciding_points():
    with pytest.raises(GeometryError):
        Curve('c', [(0, 0), (0, 0), (1, 0)])
    with pytest.raises(GeometryError):
        Curve('c', [(0, 0)])
    with pytest.raises(GeometryError):
        Curve('c', [(0, 0), (np.nan, 1)])


def test_resample_line():
    c = resample_uniform(Curve('l', [(0, 0), (1, 0)]), 5)
    assert_allclose(c.points, [(0, 0), (0.25, 0), (0.5, 0), (0.75, 0),
                               (1, 0)], atol=1e-15)


def test_resample_l_polyline_hits_corner():
    c = resample_uniform(Curve('l', [(0, 0), (1, 0), (1, 1)]), 3)
    assert_allclose(c.points, [(0, 0), (1, 0), (1, 1)], atol=1e-15)


def test_resample_quarter_circle():
    c = resample_uniform(quarter_circle(), 5)
    angles = np.arctan2(c.points[:, 1], c.points[:, 0])
    assert_allclose(angles, np.radians([0., 22.5, 45., 67.5, 90.]),
                    atol=1e-3)


def test_resample_keeps_end_points():
    arc = quarter_circle(37)
    c = resample_uniform(arc, 11)
    assert_array_equal(c.points[0], arc.points[0])
    assert_array_equal(c.points[-1], arc.points[-1])


def test_resample_idempotent_on_equal_chords():
    for curve in [Curve('a', [(0, 0), (3, 1)]),
                  Curve('b', [(0, 0), (1, 0), (1, 1)])]:
        once = resample_uniform(curve, 9)
        twice = resample_uniform(once, 9)
        assert_allclose(twice.points, once.points, atol=1e-12)


def test_resample_length_converges_on_circle():
    dense = circle()
    lengths = [resample_uniform(dense, n).length for n in (8, 32, 128)]
    assert lengths[0] < lengths[1] < lengths[2] <= dense.length
    assert dense.length - lengths[2] < 1e-3


def test_resample_errors():
    with pytest.raises(GeometryError):
        resample_uniform(Curve('l', [(0, 0), (1, 0)]), 1)
    with pytest.raises(GeometryError, match="closed curve 'circle' to 2"):
        resample_uniform(circle(), 2)
    assert len(resample_uniform(circle(), 3).points) == 3


def test_find_intersections_crossing():
    hits = find_intersections(Curve('a', [(0, -1), (0, 1)]),
                              Curve('b', [(-1, 0), (1, 0)]))
    assert len(hits) == 1
    point, sa, sb = hits[0]
    assert_allclose(point, (0, 0), atol=1e-15)
    assert_allclose((sa, sb), (0.5, 0.5), atol=1e-15)


def test_find_intersections_parallel():
    assert find_intersections(Curve('a', [(0, 0), (1, 0)]),
                              Curve('b', [(0, 1), (1, 1)]), 1e-9) == []


def test_find_intersections_shared_end_point():
    hits = find_intersections(Curve('a', [(0, 0), (1, 0)]),
                              Curve('b', [(0, 0), (0, 1)]))
    assert len(hits) == 1
    assert hits[0][0] == (0., 0.)
    assert hits[0][1] == 0. and hits[0][2] == 0.


def test_find_intersections_needs_positive_tol():
    with pytest.raises(GeometryError):
        find_intersections(Curve('a', [(0, 0), (1, 0)]),
                           Curve('b', [(0, 1), (1, 1)]), 0.)


def test_segment_figure4():
    seg = segment_at_intersections(figure4())
    counts = dict((cid, len(seg.segments[cid])) for cid in seg.curve_ids)
    assert counts == {'curve1': 2, 'curve2': 1, 'curve3': 3}
    assert len(seg.junctions()) == 2
    # every intersection is a flagged segment end with identical coordinates
    ends = set()
    for s in seg.all_segments():
        if s.endpoint_flags[0]:
            ends.add(tuple(s.points[0]))
        if s.endpoint_flags[1]:
            ends.add(tuple(s.points[-1]))
    for inter in seg.intersections:
        assert inter.point in ends


def test_segments_concatenate_to_parent():
    seg = segment_at_intersections(figure4())
    for cid in seg.curve_ids:
        pieces = seg.segments[cid]
        joined = np.vstack([pieces[0].points]
                           + [p.points[1:] for p in pieces[1:]])
        assert_array_equal(joined, seg.curve(cid).points)
        for a, b in zip(pieces[:-1], pieces[1:]):
            assert_array_equal(a.points[-1], b.points[0])


def test_segment_without_intersections():
    geo = StagedGeometry(0, [Curve('a', [(0, 0), (1, 0)]),
                             Curve('b', [(0, 1), (1, 1)])], {})
    seg = segment_at_intersections(geo)
    assert [len(seg.segments[c]) for c in seg.curve_ids] == [1, 1]
    assert seg.intersections == []


def test_segment_at_existing_vertex():
    geo = StagedGeometry(0, [Curve('a', [(0, 0), (1, 0), (2, 0)]),
                             Curve('b', [(1, -1), (1, 1)])], {})
    seg = segment_at_intersections(geo)
    assert len(seg.curve('a')) == 3
    assert len(seg.curve('b')) == 3
    assert_array_equal(seg.segments['a'][0].points[-1], (1., 0.))


def test_segment_rejects_grazing_contact():
    geo = StagedGeometry(0, [Curve('a', [(0, 0), (2, 0)]),
                             Curve('b', [(1, 0), (3, 0)])], {})
    with pytest.raises(GeometryError):
        segment_at_intersections(geo)


def test_junction_keys():
    seg = segment_at_intersections(figure4())
    keys = seg.junction_keys()
    assert list(keys) == [('curve1', 1), ('curve3', 2)]
    assert keys[('curve1', 1)] == (1., 0.)
    assert keys[('curve3', 2)] == (2., 0.)


def test_polygon_area():
    square = [(0, 0), (1, 0), (1, 1), (0, 1)]
    assert polygon_area(square) == 1.
    assert polygon_area([(0, 0), (1, 0), (0, 1)]) == 0.5
    assert polygon_area(square[::-1]) == 1.


def test_polygon_area_self_intersecting_warns(caplog):
    caplog.set_level(logging.WARNING)
    bowtie = [(0, 0), (1, 1), (1, 0), (0, 1)]
    assert polygon_area(bowtie) == 0.
    assert "self-intersecting" in caplog.text


def test_subdomain_areas_of_split_square():
    seg = segment_at_intersections(unit_square(split=True))
    areas = geometry.subdomain_areas(seg)
    assert_allclose([areas['west'], areas['east'], areas['total']],
                    [0.5, 0.5, 1.], atol=1e-15)
    polygons = geometry.check_partition(seg)
    assert list(polygons) == ['west', 'east']


def test_open_subdomain_loop():
    geo = StagedGeometry(0, [Curve('a', [(0, 0), (1, 0)]),
                             Curve('b', [(1, 0), (1, 1)])],
                         {'d': [('a', 1), ('b', 1)]})
    with pytest.raises(GeometryError):
        geometry.subdomain_loop(geo, 'd')


def test_overlapping_subdomains():
    geo = unit_square()
    geo = StagedGeometry(0, geo.curves,
                         {'one': geo.subdomains['domain'],
                          'two': geo.subdomains['domain']})
    with pytest.raises(GeometryError):
        geometry.check_partition(segment_at_intersections(geo))


def test_check_topology_mismatch():
    seg_t = segment_at_intersections(figure4())
    moved = StagedGeometry(1, [Curve('curve1', [(1, 0.5), (1, 1)]),
                               Curve('curve2', [(2, 0), (2, 1)]),
                               Curve('curve3', [(0, 0), (3, 0)])], {})
    seg_t1 = segment_at_intersections(moved)
    with pytest.raises(GeometryError):
        geometry.check_topology(seg_t, seg_t1)
    geometry.check_topology(seg_t, seg_t)
