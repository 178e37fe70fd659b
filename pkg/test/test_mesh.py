import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
import pytest

import mesh
from displacement import uniform_displacement_field
from geometry import segment_at_intersections
from mesh import Mesh, triangulate, move_mesh, element_quality, \
    quality_report, p1_matrices, graph_distance
from utils import MeshError
from test.shapes import unit_square


def _segment_fields(seg_t, seg_t1, n=11):
    return [uniform_displacement_field(s, seg_t1.segment(s.parent_id,
                                                         s.segment_index), n)
            for s in seg_t.all_segments()]


def _curve_fields(seg_t, seg_t1, n=11):
    return [uniform_displacement_field(seg_t.curve(cid), seg_t1.curve(cid), n)
            for cid in seg_t.curve_ids]


def _two_triangles():
    return Mesh([(0, 0), (1, 0), (1, 1), (0, 1)], [(0, 1, 2), (0, 2, 3)])


def test_default_edge_length():
    assert_allclose(mesh.default_edge_length(unit_square()),
                    np.sqrt(2.) / 30.)


def test_triangulate_needs_segmented_geometry():
    with pytest.raises(MeshError):
        triangulate(unit_square())


def test_triangulate_square():
    m = triangulate(segment_at_intersections(unit_square()), 0.1)
    assert_allclose(m.labeled_areas()['domain'], 1., atol=1e-12)
    assert np.all(m.signed_areas() > 0.)
    report = quality_report(m)
    assert report.inverted_count == 0
    assert report.min_quality > 0.4
    # the corner (1, 0) ends 'bottom' and starts 'right'
    corner = [i for i, p in enumerate(m.nodes) if tuple(p) == (1., 0.)]
    assert len(corner) == 1
    refs = sorted((c.parent_id, c.s) for c in m.node_constraints[corner[0]])
    assert refs == [('bottom', 1.), ('right', 0.)]


def test_triangulate_split_square():
    m = triangulate(segment_at_intersections(unit_square(split=True)), 0.1)
    areas = m.labeled_areas()
    assert_allclose([areas['west'], areas['east'], areas['total']],
                    [0.5, 0.5, 1.], atol=1e-12)
    assert list(m.junction_nodes) == [('bottom', 1), ('top', 1)]
    assert_array_equal(m.nodes[m.junction_nodes[('bottom', 1)]], (0.5, 0.))
    assert_array_equal(m.nodes[m.junction_nodes[('top', 1)]], (0.5, 1.))
    # west elements lie left of the midline
    centroids = m.nodes[m.triangles].mean(axis=1)
    assert np.all(centroids[m.element_mask('west'), 0] < 0.5)
    assert np.all(centroids[m.element_mask('east'), 0] > 0.5)


def test_segments_are_mesh_edges():
    m = triangulate(segment_at_intersections(unit_square(split=True)), 0.1)
    t = m.triangles
    edges = set()
    for a, b in [(0, 1), (1, 2), (2, 0)]:
        edges.update(frozenset(e) for e in zip(t[:, a], t[:, b]))
    for a, b in m.boundary_edges:
        assert frozenset((a, b)) in edges
    mid = [tag for tag in m.boundary_tags if tag.parent_id == 'mid']
    assert mid[0].s0 == 0. and mid[-1].s1 == 1.


def test_element_mask_unknown_label():
    with pytest.raises(MeshError):
        _two_triangles().element_mask('nowhere')


def test_element_quality():
    equilateral = Mesh([(0, 0), (1, 0), (0.5, np.sqrt(3.) / 2.)], [(0, 1, 2)])
    assert_allclose(element_quality(equilateral, 0), 1.)
    right = Mesh([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])
    assert_allclose(element_quality(right, 0), np.sqrt(3.) / 2.)
    inverted = Mesh([(0, 0), (1, 0), (0, 1)], [(0, 2, 1)])
    assert_allclose(element_quality(inverted, 0), -np.sqrt(3.) / 2.)
    flat = Mesh([(0, 0), (1, 0), (2, 0)], [(0, 1, 2)])
    assert element_quality(flat, 0) == 0.
    point = Mesh([(1, 1), (1, 1), (1, 1)], [(0, 1, 2)])
    assert element_quality(point, 0) == 0.


def test_quality_report_matches_elements():
    m = _two_triangles().moved([(0, 0), (1, 0), (1, 1), (1.5, 0.2)])
    report = quality_report(m)
    assert_allclose(report.per_element_quality,
                    [element_quality(m, e) for e in range(2)])
    assert report.inverted_count == 1
    assert_array_equal(report.inverted_elements, [1])
    assert report.min_quality < 0.


def test_p1_matrices():
    m = _two_triangles()
    M, K = p1_matrices(m.nodes, m.triangles)
    assert_allclose(M.sum(), 1.)
    assert_allclose(np.asarray(K.sum(axis=1)).ravel(), 0., atol=1e-14)
    assert_allclose((M - M.T).toarray(), 0.)


def test_p1_matrices_inverted_elements():
    nodes = np.array([(0, 0), (1, 0), (0, 1)], dtype=float)
    M, K = p1_matrices(nodes, np.array([(0, 2, 1)]))
    M_ccw, K_ccw = p1_matrices(nodes, np.array([(0, 1, 2)]))
    assert_allclose(M.sum(), -0.5)
    assert_allclose(M.toarray(), -M_ccw.toarray())
    assert_allclose(K.toarray(), K_ccw.toarray())
    with pytest.raises(MeshError):
        p1_matrices(nodes, np.array([(0, 2, 1)]), strict=True)
    with pytest.raises(MeshError):
        p1_matrices(np.array([(0, 0), (1, 0), (2, 0)], dtype=float),
                    np.array([(0, 1, 2)]))


def test_folded_mesh_mass_is_enclosed_area():
    fan = Mesh([(0, 0), (1, 0), (1, 1), (0, 1), (0.5, 0.5)],
               [(0, 1, 4), (1, 2, 4), (2, 3, 4), (3, 0, 4)])
    folded = fan.moved(np.array([(0, 0), (1, 0), (1, 1), (0, 1),
                                 (0.5, 1.2)]))
    assert quality_report(folded).inverted_count == 1
    assert folded.labeled_areas()['total'] > 1.1
    M, K = p1_matrices(folded.nodes, folded.triangles)
    assert_allclose(M.sum(), 1., atol=1e-14)
    assert_allclose(np.asarray(K.sum(axis=1)).ravel(), 0., atol=1e-14)
    assert np.all(np.linalg.eigvalsh(K.toarray()) > -1e-12)


def test_graph_distance():
    m = _two_triangles()
    assert_array_equal(graph_distance(m, [1]), [1, 0, 1, 2])
    assert_array_equal(graph_distance(m, [1, 3]), [1, 0, 1, 0])


def test_move_mesh_fraction_zero():
    seg = segment_at_intersections(unit_square(split=True))
    ref = triangulate(seg, 0.1)
    moved_geo = segment_at_intersections(
        unit_square(1, transform=lambda p: p * (1.3, 0.8), split=True))
    moved = move_mesh(ref, _segment_fields(seg, moved_geo), 0.)
    assert_array_equal(moved.nodes, ref.nodes)
    assert moved.version == 1
    assert moved.shared is ref.shared


def test_move_mesh_constant_translation():
    seg = segment_at_intersections(unit_square(split=True))
    ref = triangulate(seg, 0.1)
    seg1 = segment_at_intersections(
        unit_square(1, transform=lambda p: p + (2., -1.), split=True))
    moved = move_mesh(ref, _segment_fields(seg, seg1), 1.)
    assert_allclose(moved.nodes, ref.nodes + (2., -1.), atol=1e-12)
    half = move_mesh(ref, _segment_fields(seg, seg1), 0.5)
    assert_allclose(half.nodes, ref.nodes + (1., -0.5), atol=1e-12)


def test_move_mesh_affine_is_exact():
    seg = segment_at_intersections(unit_square(split=True))
    ref = triangulate(seg, 0.1)
    seg1 = segment_at_intersections(
        unit_square(1, transform=lambda p: p * (1.1, 1.2), split=True))
    for fields in (_segment_fields(seg, seg1), _curve_fields(seg, seg1)):
        moved = move_mesh(ref, fields, 1., strict=True)
        assert_allclose(moved.nodes, ref.nodes * (1.1, 1.2), atol=1e-10)
        assert_allclose(moved.labeled_areas()['total'], 1.32, atol=1e-10)
        assert quality_report(moved).inverted_count == 0


def test_move_mesh_errors():
    seg = segment_at_intersections(unit_square(split=True))
    ref = triangulate(seg, 0.1)
    fields = _segment_fields(seg, seg)
    with pytest.raises(MeshError):
        move_mesh(ref, fields, 1.5)
    with pytest.raises(MeshError):
        move_mesh(ref, fields[1:], 1.)
    with pytest.raises(MeshError):
        move_mesh(ref, fields + fields[:1], 1.)
