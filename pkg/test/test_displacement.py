import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
import pytest

from displacement import DisplacementField, uniform_displacement_field, \
    boundary_parameter, evaluate_displacement, KEYING_COORDINATE, \
    KEYING_PARAMETER
from geometry import Curve, resample_uniform, segment_at_intersections
from utils import DisplacementError
from test.shapes import unit_square, quarter_circle, circle


def test_translation_field():
    square = unit_square()
    moved = unit_square(1, transform=lambda p: p + (2., 3.))
    for cid in square.curve_ids:
        field = uniform_displacement_field(square.curve(cid),
                                           moved.curve(cid), 7)
        assert_allclose(field.displacement, np.tile((2., 3.), (7, 1)),
                        atol=1e-14)
        assert_allclose(evaluate_displacement(field, 0.37), (2., 3.),
                        atol=1e-14)


def test_identity_field():
    arc = quarter_circle(50)
    field = uniform_displacement_field(arc, arc, 20)
    assert np.all(field.displacement == 0.)


def test_uniform_stretch():
    field = uniform_displacement_field(Curve('a', [(0, 0), (1, 0)]),
                                       Curve('a', [(0, 0), (2, 0)]), 3)
    assert_allclose(field.source[:, 0], [0., 0.5, 1.])
    assert_allclose(field.displacement, [(0, 0), (0.5, 0), (1, 0)])


def test_endpoints_map_exactly():
    a = quarter_circle(33)
    b = Curve('arc', quarter_circle(71).points * (1.7, 0.9) + (0.1, 0.2))
    field = uniform_displacement_field(a, b, 13)
    assert_array_equal(a.points[0] + evaluate_displacement(field, 0.),
                       b.points[0])
    assert_array_equal(a.points[-1] + evaluate_displacement(field, 1.),
                       b.points[-1])


def test_apply_reproduces_resampled_target():
    a = quarter_circle(33)
    b = Curve('arc', quarter_circle(71).points * (1.7, 0.9))
    field = uniform_displacement_field(a, b, 25)
    target = resample_uniform(b, 25).points
    assert_allclose(field.apply(field.source), target, atol=1e-12)


def test_segment_reference():
    seg = segment_at_intersections(unit_square(split=True))
    field = uniform_displacement_field(seg.segment('bottom', 1),
                                       seg.segment('bottom', 1), 4)
    assert field.segment_ref == ('bottom', 1)
    assert field.segment_id == 'bottom:1'
    whole = uniform_displacement_field(seg.curve('left'), seg.curve('left'))
    assert whole.segment_ref == ('left', None)
    assert whole.covers(('left', 0))
    assert not field.covers(('bottom', 0))


def test_open_closed_mismatch():
    with pytest.raises(DisplacementError):
        uniform_displacement_field(circle(64), quarter_circle(), 10)


def test_closed_curve_needs_start_pair():
    with pytest.raises(DisplacementError):
        uniform_displacement_field(circle(64), circle(64), 10)


def test_closed_curve_with_start_pair():
    c0 = circle(64)
    c1 = Curve('circle', c0.points * 2., closed=True)
    field = uniform_displacement_field(c0, c1, 16,
                                       start_pair=((0., 1.), (0., 2.)))
    assert_allclose(field.source[0], (0., 1.), atol=1e-12)
    assert_allclose(field.displacement[0], (0., 1.), atol=1e-12)
    assert_allclose(field.origin, 0.25, atol=1e-12)


def test_boundary_parameter():
    line = Curve('l', [(0, 0), (2, 0)])
    assert boundary_parameter(line, (0, 0)) == 0.
    assert boundary_parameter(line, (2, 0)) == 1.
    assert boundary_parameter(line, (1, 0)) == 0.5
    ell = Curve('l', [(0, 0), (1, 0), (1, 1)])
    assert boundary_parameter(ell, (1, 0)) == 0.5
    with pytest.raises(DisplacementError):
        boundary_parameter(line, (1, 0.1))


def test_evaluate_linear_midpoint():
    field = DisplacementField(('a', 0), [0., 1.], [(0, 0), (1, 0)],
                              [(0, 0), (2, 4)])
    assert evaluate_displacement(field, 0.5) == (1., 2.)
    assert evaluate_displacement(field, 1.) == (2., 4.)


def test_evaluate_row_keys_exactly():
    field = uniform_displacement_field(quarter_circle(40),
                                       Curve('arc', quarter_circle(90).points
                                             * 1.3), 9)
    for s, d in zip(field.params, field.displacement):
        assert evaluate_displacement(field, s) == tuple(d)


def test_evaluate_outside_domain():
    field = uniform_displacement_field(Curve('a', [(0, 0), (1, 0)]),
                                       Curve('a', [(0, 0), (2, 0)]), 3)
    with pytest.raises(DisplacementError):
        evaluate_displacement(field, 1.5)
    with pytest.raises(DisplacementError):
        evaluate_displacement(field, -0.1)
    coord = uniform_displacement_field(Curve('a', [(0, 0), (1, 0)]),
                                       Curve('a', [(0, 0), (2, 0)]), 3,
                                       KEYING_COORDINATE)
    with pytest.raises(DisplacementError):
        evaluate_displacement(coord, (0.5, 0.5))
    with pytest.raises(DisplacementError):
        evaluate_displacement(coord, 0.5)


def test_coordinate_keying_on_straight_segment():
    a = Curve('a', [(0, 0), (1, 1)])
    b = Curve('a', [(1, 0), (3, 1)])
    by_param = uniform_displacement_field(a, b, 5, KEYING_PARAMETER)
    by_coord = uniform_displacement_field(a, b, 5, KEYING_COORDINATE)
    for s in np.linspace(0., 1., 17):
        assert_allclose(evaluate_displacement(by_coord, (s, s)),
                        evaluate_displacement(by_param, s), atol=1e-12)


def _keying_error(n):
    """Largest difference between the coordinate keyed and the parameter
    keyed field of a quarter circle mapped onto a larger quarter circle,
    evaluated at points of the dense stage-t arc.
    """
    a = quarter_circle(2001)
    b = Curve('arc', quarter_circle(2001).points * 1.5)
    by_param = uniform_displacement_field(a, b, n, KEYING_PARAMETER)
    by_coord = uniform_displacement_field(a, b, n, KEYING_COORDINATE)
    s = a.params()[::50]
    err = 0.
    for p, si in zip(a.points[::50], s):
        d_coord = np.array(evaluate_displacement(by_coord, tuple(p),
                                                 tol=1e-2))
        d_param = np.array(evaluate_displacement(by_param, si))
        err = max(err, np.abs(d_coord - d_param).max())
    return err


def test_keying_equivalence_converges():
    coarse, fine = _keying_error(16), _keying_error(64)
    # at least second order in the row spacing
    assert coarse / fine >= 8.
    assert fine < 1e-5
