"""Small geometries shared by the test modules. """

import numpy as np

from geometry import Curve, StagedGeometry


def unit_square(stage_time=0, transform=None, split=False):
    """The unit square as four open side curves. With ``split`` a
    vertical curve at x = 0.5 divides it into ``left`` and ``right``.

    Args:
        stage_time (int): Stage index
        transform (callable): Maps an (n, 2) array of points, applied to
                              every curve
        split (bool): Add the midline and two subdomains
    """
    def pts(*points):
        points = np.array(points, dtype=float)
        return transform(points) if transform else points

    if not split:
        curves = [Curve('bottom', pts((0, 0), (1, 0))),
                  Curve('right', pts((1, 0), (1, 1))),
                  Curve('top', pts((1, 1), (0, 1))),
                  Curve('left', pts((0, 1), (0, 0)))]
        subdomains = {'domain': [('bottom', 1), ('right', 1), ('top', 1),
                                 ('left', 1)]}
        return StagedGeometry(stage_time, curves, subdomains)
    curves = [Curve('bottom', pts((0, 0), (0.5, 0), (1, 0))),
              Curve('right', pts((1, 0), (1, 1))),
              Curve('top', pts((1, 1), (0.5, 1), (0, 1))),
              Curve('left', pts((0, 1), (0, 0))),
              Curve('mid', pts((0.5, 0), (0.5, 1)))]
    subdomains = {'west': [('bottom', 0, 1), ('mid', None, 1), ('top', 1, 1),
                           ('left', None, 1)],
                  'east': [('bottom', 1, 1), ('right', None, 1),
                           ('top', 0, 1), ('mid', None, -1)]}
    return StagedGeometry(stage_time, curves, subdomains)


def quarter_circle(n=1000, radius=1.):
    t = np.linspace(0., np.pi / 2., n)
    return Curve('arc', radius * np.stack([np.cos(t), np.sin(t)], axis=1))


def circle(n=4096, radius=1.):
    t = np.arange(n) * (2. * np.pi / n)
    return Curve('circle', radius * np.stack([np.cos(t), np.sin(t)], axis=1),
                 closed=True)


def figure4():
    """Three curves with two junctions: curve1 crosses curve3 at (1, 0),
    curve2 ends on curve3 at (2, 0).
    """
    curves = [Curve('curve1', [(1, -1), (1, 1)]),
              Curve('curve2', [(2, 0), (2, 1)]),
              Curve('curve3', [(0, 0), (3, 0)])]
    return StagedGeometry(0, curves, {})
