"""Synthetic stage pairs with known geometry.

The ``figure1`` fixture is an idealized limb bud: the right half of an
ellipse with semi-axes a x 0.6 standing on a flat base at x = 0, cut by
two straight internal arcs into three subdomains stacked along y::

    domain3   upper part, between arc2 and the top of the outer curve
    domain2   middle part, between the arcs
    domain1   lower part, between arc1 and the bottom of the outer curve

arc1 runs from (0, -0.2) on the base to the junction J1 on the outer
curve at angle -theta, arc2 from (0, 0.2) to J2 at angle +theta. At
stage t+1 the outer curve is elongated along x and the junction angles
shrink, so the junctions move distally. Junction points are shared
vertices of the curves, bitwise identical in both.
"""

import collections
import logging
import os

import numpy as np

import io_utils
import utils
from geometry import Curve, StagedGeometry
from utils import GeometryError


FIXTURE_KINDS = ['figure1']

SEMI_MINOR = 0.6
"""Half height of the outer curve. """

BASE_CUTS = 0.2
"""The internal arcs start at (0, -BASE_CUTS) and (0, BASE_CUTS). """

ELONGATION = 0.3
"""Stage t+1 semi-major axis is 1 + ELONGATION * scale. """

JUNCTION_ANGLE = np.pi / 4.
"""Junction angle at stage t. """

JUNCTION_SHIFT = 0.25
"""Junction angles shrink by JUNCTION_SHIFT * scale at stage t+1. """

SPACING = 0.025
"""Approximate vertex spacing of the fixture curves. """


SUBDOMAINS = collections.OrderedDict([
    ('domain1', [('base', 2, 1), ('outer', 0, 1), ('arc1', 0, -1)]),
    ('domain2', [('base', 1, 1), ('arc1', 0, 1), ('outer', 1, 1),
                 ('arc2', 0, -1)]),
    ('domain3', [('base', 0, 1), ('arc2', 0, 1), ('outer', 2, 1)]),
])


def _ellipse_arc(a, b, theta0, theta1):
    """Points of the ellipse (a cos t, b sin t) for t from theta0 to
    theta1, excluding the last point.
    """
    dense = np.linspace(theta0, theta1, 257)
    length = np.sum(np.hypot(np.diff(a * np.cos(dense)),
                             np.diff(b * np.sin(dense))))
    n = max(int(np.ceil(length / SPACING)), 2)
    t = np.linspace(theta0, theta1, n + 1)[:-1]
    return np.stack([a * np.cos(t), b * np.sin(t)], axis=1)


def _line(p, q):
    n = max(int(np.ceil(np.hypot(*(np.subtract(q, p))) / SPACING)), 1)
    s = np.linspace(0., 1., n + 1)[:, None]
    pts = np.asarray(p) + s * (np.asarray(q) - np.asarray(p))
    pts[0], pts[-1] = p, q
    return pts


def _figure1_stage(stage_time, a, theta):
    b = SEMI_MINOR
    j1 = (a * np.cos(theta), -b * np.sin(theta))
    j2 = (a * np.cos(theta), b * np.sin(theta))
    bottom, top = (0., -b), (0., b)
    outer = np.vstack([
        _ellipse_arc(a, b, -np.pi / 2., -theta),
        _ellipse_arc(a, b, -theta, theta),
        _ellipse_arc(a, b, theta, np.pi / 2.),
        [top]])
    outer[0] = bottom
    # vertices at the junction angles are placed exactly
    outer[np.argmin(np.hypot(*(outer - j1).T))] = j1
    outer[np.argmin(np.hypot(*(outer - j2).T))] = j2
    base = np.vstack([_line(top, (0., BASE_CUTS))[:-1],
                      _line((0., BASE_CUTS), (0., -BASE_CUTS))[:-1],
                      _line((0., -BASE_CUTS), bottom)])
    curves = [Curve('outer', outer),
              Curve('base', base),
              Curve('arc1', _line((0., -BASE_CUTS), j1)),
              Curve('arc2', _line((0., BASE_CUTS), j2))]
    return StagedGeometry(stage_time, curves, SUBDOMAINS)


def generate_fixture(kind='figure1', deformation_scale=1.0):
    """Builds a deterministic synthetic stage pair.

    Args:
        kind (string): Fixture kind, only ``figure1``
        deformation_scale (float): Strength of the growth in (0, 2]

    Returns:
        tuple. (stage t, stage t+1) as ``StagedGeometry``

    Raises:
        GeometryError. If the kind is unknown or the scale out of range
    """
    if kind not in FIXTURE_KINDS:
        raise GeometryError("Unknown fixture kind '%s'" % kind)
    if not 0. < deformation_scale <= 2.:
        raise GeometryError("Deformation scale must lie in (0, 2], got %g"
                            % deformation_scale)
    geo_t = _figure1_stage(0, 1., JUNCTION_ANGLE)
    geo_t1 = _figure1_stage(1, 1. + ELONGATION * deformation_scale,
                            JUNCTION_ANGLE - JUNCTION_SHIFT * deformation_scale)
    return geo_t, geo_t1


def write_fixture(out_dir, kind='figure1', deformation_scale=1.0):
    """Writes a fixture pair and a ready-to-run configuration.

    Returns:
        OrderedDict. File role -> path (``geometry_t``, ``geometry_t1``,
        ``config``)
    """
    geo_t, geo_t1 = generate_fixture(kind, deformation_scale)
    if not os.path.isdir(out_dir):
        os.makedirs(out_dir)
    paths = collections.OrderedDict()
    paths['geometry_t'], _ = io_utils.write_geometry(
        geo_t, os.path.join(out_dir, 'geometry_t.csv'))
    paths['geometry_t1'], _ = io_utils.write_geometry(
        geo_t1, os.path.join(out_dir, 'geometry_t1.csv'))
    config = collections.OrderedDict([
        ('mode', 'model2'),
        ('network', 'limb_bud'),
        ('geometry', {'stage_t': 'geometry_t.csv',
                      'stage_t1': 'geometry_t1.csv',
                      'tol': utils.EPS_INT,
                      'n_points_per_segment': utils.DEFAULT_N_POINTS}),
        ('solver', {'dt': 0.01, 't_end': 1.0}),
        ('output', {'dir': 'out', 'snapshot_every': 10}),
    ])
    paths['config'] = os.path.join(out_dir, 'config.yaml')
    io_utils.dump_yaml(dict(config), paths['config'])
    logging.info("Wrote %s fixture (scale %g) to %s"
                 % (kind, deformation_scale, out_dir))
    return paths
