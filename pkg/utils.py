"""Shared constants, the exception hierarchy, small polyline helpers
and the observer classes used by the stage pipelines and the output
handlers.
"""

from abc import abstractmethod

import numpy as np


EPS_INT = 1e-9
"""Default intersection tolerance in nondimensional length units. Two
points closer than this are treated as the same point by the curve
intersection and segmentation code.
"""


MIN_POINT_DISTANCE = 1e-12
"""Consecutive curve vertices must be farther apart than this. """


NEGATIVE_TOLERANCE = 1e-10
"""Concentrations may dip this far below zero before a warning is
logged.
"""


MAX_PRINCIPLE_TOL = 1e-12
"""Relative slack allowed when checking the discrete maximum principle
of the harmonic mesh extension.
"""


DEFAULT_N_POINTS = 100
"""Default number of resampled points per displacement field. """


EDGE_LENGTH_DIVISOR = 30.
"""The default target edge length is the bounding box diagonal of the
domain divided by this number.
"""


MIN_ANGLE = 28.
"""Minimum angle in degrees requested from the triangulator. """


FLOAT_FORMAT = "%.17g"
"""Float format for all text outputs. 17 significant digits make the
decimal serialization round-trip exactly.
"""


class SimulationError(Exception):
    """Base class of all errors raised by the simulator. """
    pass


class GeometryError(SimulationError, ValueError):
    """Invalid curves, subdomain loops or segmentation failures. """
    pass


class DisplacementError(SimulationError, ValueError):
    """Invalid displacement field construction or evaluation. """
    pass


class MeshError(SimulationError):
    """Triangulation, mesh motion or mesh validity failures. """
    pass


class KineticsError(SimulationError, ValueError):
    """Invalid reaction network parameters or subdomain labels. """
    pass


class SolverError(SimulationError, RuntimeError):
    """Non-convergence, singular systems or non-finite solutions. """
    pass


class ConfigError(SimulationError, ValueError):
    """Invalid run configuration.

    Attributes:
        path (string): Dotted path of the offending field, e.g.
                       ``solver.dt``. Empty for document level errors
        unknown (list): Dotted paths of unknown keys, if any
    """

    def __init__(self, msg, path="", unknown=None):
        if path:
            msg = "%s: %s" % (path, msg)
        super(ConfigError, self).__init__(msg)
        self.path = path
        self.unknown = unknown or []


# Polyline helpers


def as_points(points, name="points"):
    """Converts ``points`` to a float array of shape (n, 2) and checks
    that all coordinates are finite.

    Args:
        points (array-like): Sequence of (x, y) pairs
        name (string): Used in error messages

    Returns:
        ndarray. Float array of shape (n, 2)

    Raises:
        GeometryError. If the shape is wrong or a coordinate is not
        finite
    """
    arr = np.array(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise GeometryError("%s must have shape (n, 2), got %s"
                            % (name, arr.shape))
    if not np.all(np.isfinite(arr)):
        raise GeometryError("%s contain non-finite coordinates" % name)
    return arr


def edge_lengths(points, closed=False):
    """Lengths of the polyline edges. For closed polylines the closing
    edge from the last to the first point is appended.
    """
    if closed:
        points = np.vstack([points, points[:1]])
    return np.hypot(*np.diff(points, axis=0).T)


def cumulative_length(points, closed=False):
    """Cumulative arc length at each vertex, starting with 0. For closed
    polylines the last entry is the total perimeter (closing vertex).
    """
    return np.concatenate([[0.], np.cumsum(edge_lengths(points, closed))])


def signed_area(points):
    """Shoelace formula. Positive for counterclockwise loops. """
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def orient(a, b, c):
    """Orientation predicate (twice the signed area of abc). Works on
    broadcastable arrays of points with the coordinates in the last axis.
    """
    return ((b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1])
            - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0]))


def project_onto_polyline(points, p, closed=False):
    """Finds the point on a polyline closest to ``p``.

    Args:
        points (ndarray): Polyline vertices, shape (n, 2)
        p (array-like): Query point
        closed (bool): Whether the closing edge is part of the polyline

    Returns:
        tuple. (distance, arc_length) where ``arc_length`` is measured
        from the first vertex along the polyline
    """
    p = np.asarray(p, dtype=float)
    if closed:
        points = np.vstack([points, points[:1]])
    a = points[:-1]
    d = points[1:] - a
    sq = np.einsum('ij,ij->i', d, d)
    t = np.einsum('ij,ij->i', p - a, d) / np.where(sq > 0., sq, 1.)
    t = np.clip(t, 0., 1.)
    foot = a + t[:, None] * d
    dist = np.hypot(*(foot - p).T)
    best = int(np.argmin(dist))
    lengths = edge_lengths(points)
    cum = np.concatenate([[0.], np.cumsum(lengths)])
    return float(dist[best]), float(cum[best] + t[best] * lengths[best])


# Miscellaneous


def split_comma(s, func=None):
    """Splits a string at commas and removes blanks."""
    if not s:
        return []
    parts = s.split(",")
    if func is None:
        return [el.strip() for el in parts]
    return [func(el.strip()) for el in parts]


def format_float(value):
    """Formats ``value`` with ``FLOAT_FORMAT``. """
    return FLOAT_FORMAT % value


MESSAGE_TYPE_DEFAULT = 1
"""Default message type for observer messages """


MESSAGE_TYPE_STAGE_START = 2
"""Sent by a stage pipeline after the reference mesh of a stage has
been built. The message is a ``StageStart`` record holding the mesh,
the subdomain target areas and the initial state.
"""


MESSAGE_TYPE_STEP = 3
"""Sent by a stage pipeline after every time step (and once for the
initial state of the first stage). The message is a ``StepRecord``.
"""


MESSAGE_TYPE_STAGE_END = 4
"""Sent by a stage pipeline when the stage is complete. The message is
the ``StageResult``.
"""


class Observer(object):
    """Super class for classes which observe (GoF design patten) other
    classes.
    """

    @abstractmethod
    def notify(self, message, message_type=MESSAGE_TYPE_DEFAULT):
        """Get a notification from an observed object.

        Args:
            message (object): the message sent by observed object
            message_type (int): The type of the message. One of the
                                ``MESSAGE_TYPE_*`` variables
        """
        raise NotImplementedError


class Observable(object):
    """For the GoF design pattern observer """

    def __init__(self):
        """Initializes the list of observers with an empty list """
        self.observers = []

    def add_observer(self, observer):
        """Add a new observer which is notified when this class fires
        a notification

        Args:
            observer (Observer): the observer class to add
        """
        self.observers.append(observer)

    def notify_observers(self, message, message_type=MESSAGE_TYPE_DEFAULT):
        """Sends the given message to all registered observers.

        Args:
            message (object): The message to send
            message_type (int): The type of the message. One of the
                                ``MESSAGE_TYPE_*`` variables
        """
        for observer in self.observers:
            observer.notify(message, message_type)
