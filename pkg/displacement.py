"""Uniform displacement fields between corresponding curves (or curve
segments) of two consecutive stages.

Both curves are resampled to N points with equal arc-length spacing and
row i maps the i-th point of the stage-t curve onto the i-th point of
the stage-(t+1) curve. Rows are keyed either by the normalized boundary
parameter s in [0, 1] or by the stage-t coordinates; evaluation
interpolates linearly between the two bracketing rows and never
extrapolates.
"""

import collections
import logging

import numpy as np

import utils
from geometry import Curve, CurveSegment, resample_uniform
from utils import DisplacementError, EPS_INT


KEYING_PARAMETER = 'parameter'
"""Rows keyed by normalized arc length s of the stage-t curve. """


KEYING_COORDINATE = 'coordinate'
"""Rows keyed by the (x, y) coordinates of the stage-t points. """


KEYINGS = (KEYING_PARAMETER, KEYING_COORDINATE)


DisplacementRow = collections.namedtuple('DisplacementRow',
                                         ['key', 'dx', 'dy'])
"""One row of a displacement table. ``key`` is a float s for parameter
keying and an (x, y) tuple for coordinate keying.
"""


class DisplacementField(object):
    """Displacement table of one curve segment (or whole curve). The
    field is immutable after construction.

    Attributes:
        segment_ref (tuple): (parent_id, segment_index). The index is
                             None for a field over the whole curve
        keying (string): ``parameter`` or ``coordinate``
        params (ndarray): Row parameters, increasing. [0, 1] for open
                          curves, [0, 1) for closed ones
        source (ndarray): Resampled stage-t points, shape (N, 2)
        displacement (ndarray): Row displacements, shape (N, 2)
        source_curve (ndarray): Vertices of the stage-t curve the field
                                was built from, used to validate
                                coordinate queries
        closed (bool): Closed fields wrap around at s = 1
        origin (float): Arc fraction of the parent curve at which s = 0
                        lies (nonzero only for rotated closed curves)
    """

    def __init__(self, segment_ref, params, source, displacement,
                 keying=KEYING_PARAMETER, source_curve=None, closed=False,
                 origin=0.):
        if keying not in KEYINGS:
            raise DisplacementError("Unknown keying '%s', use one of %s"
                                    % (keying, ", ".join(KEYINGS)))
        self.segment_ref = tuple(segment_ref)
        self.keying = keying
        self.params = np.array(params, dtype=float)
        self.source = np.array(source, dtype=float)
        self.displacement = np.array(displacement, dtype=float)
        n = len(self.params)
        if n < 2:
            raise DisplacementError("A displacement field needs at least 2 "
                                    "rows, got %d" % n)
        if self.source.shape != (n, 2) or self.displacement.shape != (n, 2):
            raise DisplacementError("Row arrays of field %s have mismatching"
                                    " shapes" % (self.segment_ref,))
        if np.any(np.diff(self.params) <= 0.) or self.params[0] < 0. \
                or self.params[-1] > 1.:
            raise DisplacementError("Row parameters of field %s must increase"
                                    " within [0, 1]" % (self.segment_ref,))
        if not np.all(np.isfinite(self.displacement)):
            raise DisplacementError("Field %s has non-finite displacements"
                                    % (self.segment_ref,))
        self.source_curve = self.source if source_curve is None \
            else np.array(source_curve, dtype=float)
        self.closed = bool(closed)
        self.origin = float(origin)
        self._keys_cum = utils.cumulative_length(self.source, self.closed)
        for arr in (self.params, self.source, self.displacement,
                    self.source_curve):
            arr.flags.writeable = False

    @classmethod
    def from_rows(cls, segment_ref, rows, keying=KEYING_PARAMETER,
                  closed=False):
        """Builds a field from a list of ``DisplacementRow``. For
        coordinate keying, the row keys are taken as the stage-t curve.
        """
        if keying == KEYING_PARAMETER:
            params = [r.key for r in rows]
            # source points are unknown for imported parameter tables
            source = np.zeros((len(rows), 2))
        else:
            source = np.array([r.key for r in rows], dtype=float)
            cum = utils.cumulative_length(source, closed)
            params = cum[:len(source)] / cum[-1]
            if not closed:
                params[-1] = 1.
        disp = [(r.dx, r.dy) for r in rows]
        return cls(segment_ref, params, source, disp, keying, closed=closed)

    @property
    def n(self):
        return len(self.params)

    @property
    def segment_id(self):
        """Identifier used in displacement CSV files: ``parent:index``
        or ``parent`` for whole-curve fields.
        """
        pid, idx = self.segment_ref
        return pid if idx is None else "%s:%d" % (pid, idx)

    @property
    def rows(self):
        """The table as a list of ``DisplacementRow``. """
        if self.keying == KEYING_PARAMETER:
            keys = [float(s) for s in self.params]
        else:
            keys = [(float(x), float(y)) for x, y in self.source]
        return [DisplacementRow(k, float(d[0]), float(d[1]))
                for k, d in zip(keys, self.displacement)]

    def covers(self, segment_ref):
        """True if this field provides displacements for the segment. A
        whole-curve field covers every segment of its curve.
        """
        pid, idx = self.segment_ref
        return pid == segment_ref[0] and (idx is None or idx == segment_ref[1])

    def interpolate(self, s):
        """Vectorized linear interpolation at row parameters ``s``.
        Callers are responsible for the domain check.
        """
        s = np.asarray(s, dtype=float)
        params, disp = self.params, self.displacement
        if self.closed:
            s = np.mod(s, 1.)
            params = np.concatenate([params, [1.]])
            disp = np.vstack([disp, disp[:1]])
        return np.stack([np.interp(s, params, disp[:, 0]),
                         np.interp(s, params, disp[:, 1])], axis=-1)

    def key_parameter(self, p):
        """Parameter of the point on the row polyline closest to ``p``,
        measured by arc length along the row keys.
        """
        _, arc = utils.project_onto_polyline(self.source, p, self.closed)
        if arc >= self._keys_cum[-1]:
            return 1. if not self.closed else 0.
        # map arc length along the keys onto the row parameters
        params = self.params
        if self.closed:
            params = np.concatenate([params, [1.]])
        return float(np.interp(arc, self._keys_cum, params))

    def apply(self, points):
        """Moves points lying on the row polyline by the interpolated
        displacement. Applied to the resampled stage-t points this gives
        back the resampled stage-(t+1) points.

        Args:
            points (array-like): Points on the row polyline, shape (k, 2)

        Returns:
            ndarray. Displaced points, shape (k, 2)
        """
        points = utils.as_points(points)
        s = np.array([self.key_parameter(p) for p in points])
        return points + self.interpolate(s)

    def __repr__(self):
        return "DisplacementField(%s, %d rows, %s)" % (
            self.segment_id, self.n, self.keying)


def _rotate_closed(curve, start):
    """Rotates a closed curve so that it starts at the point closest to
    ``start``. The start point is inserted as a vertex if needed.

    Returns:
        tuple. (rotated Curve, arc fraction of the new start)
    """
    pts = curve.points
    dist, arc = utils.project_onto_polyline(pts, start, closed=True)
    if dist > 1e-6:
        logging.warning("Start point (%g, %g) is %.3g away from closed curve "
                        "'%s'; using the closest curve point"
                        % (start[0], start[1], dist, curve.id))
    cum = utils.cumulative_length(pts, closed=True)
    total = cum[-1]
    arc = arc % total
    e = int(np.searchsorted(cum, arc, side='right') - 1)
    e = min(e, len(pts) - 1)
    nxt = pts[(e + 1) % len(pts)]
    t = (arc - cum[e]) / (cum[e + 1] - cum[e])
    p = pts[e] + t * (nxt - pts[e])
    if np.hypot(*(p - pts[e])) <= utils.MIN_POINT_DISTANCE:
        rotated = np.vstack([pts[e:], pts[:e]])
    elif np.hypot(*(p - nxt)) <= utils.MIN_POINT_DISTANCE:
        k = (e + 1) % len(pts)
        rotated = np.vstack([pts[k:], pts[:k]])
    else:
        rotated = np.vstack([[p], pts[e + 1:], pts[:e + 1]])
    return Curve(curve.id, rotated, closed=True), arc / total


def _as_curve(gamma):
    if isinstance(gamma, CurveSegment):
        return Curve(gamma.id, gamma.points, gamma.closed), gamma.ref
    return gamma, (gamma.id, None)


def uniform_displacement_field(gamma_t, gamma_t1, n=utils.DEFAULT_N_POINTS,
                               keying=KEYING_PARAMETER, start_pair=None,
                               segment_ref=None):
    """Builds the uniform displacement field between two corresponding
    curves or segments.

    Args:
        gamma_t (Curve, CurveSegment): Stage-t curve
        gamma_t1 (Curve, CurveSegment): Stage-(t+1) curve
        n (int): Number of rows
        keying (string): ``parameter`` or ``coordinate``
        start_pair (tuple): ((x_t, y_t), (x_t1, y_t1)) corresponding
                            start points, required for closed curves
        segment_ref (tuple): Overrides the (parent_id, segment_index)
                             reference derived from ``gamma_t``

    Returns:
        DisplacementField. Field with ``n`` rows

    Raises:
        DisplacementError. If the curves differ in their closed flag or
        a closed pair comes without start points
    """
    curve_t, ref = _as_curve(gamma_t)
    curve_t1, _ = _as_curve(gamma_t1)
    if segment_ref is not None:
        ref = tuple(segment_ref)
    if curve_t.closed != curve_t1.closed:
        raise DisplacementError("Cannot map %s curve '%s' onto %s curve '%s'"
                                % ("closed" if curve_t.closed else "open",
                                   curve_t.id,
                                   "closed" if curve_t1.closed else "open",
                                   curve_t1.id))
    origin = 0.
    if curve_t.closed:
        if start_pair is None:
            raise DisplacementError("Closed curve '%s' needs an explicit "
                                    "start point pair" % curve_t.id)
        curve_t, origin = _rotate_closed(curve_t, start_pair[0])
        curve_t1, _ = _rotate_closed(curve_t1, start_pair[1])
    src = resample_uniform(curve_t, n).points
    dst = resample_uniform(curve_t1, n).points
    if curve_t.closed:
        params = np.arange(n) / float(n)
    else:
        params = np.linspace(0., 1., n)
    return DisplacementField(ref, params, src, dst - src, keying,
                             source_curve=curve_t.points,
                             closed=curve_t.closed, origin=origin)


def boundary_parameter(segment, p, tol=EPS_INT):
    """Normalized arc length from the start of ``segment`` to the point
    ``p`` on it.

    Args:
        segment (CurveSegment, Curve): Segment to measure on
        p (tuple): Point on the segment
        tol (float): Maximum distance of ``p`` from the segment

    Returns:
        float. Parameter s in [0, 1]

    Raises:
        DisplacementError. If ``p`` is farther than ``tol`` from the
        segment
    """
    closed = getattr(segment, 'closed', False)
    dist, arc = utils.project_onto_polyline(segment.points, p, closed)
    if dist > tol:
        raise DisplacementError("Point (%g, %g) is not on segment %s "
                                "(distance %.3g)" % (p[0], p[1], segment.id,
                                                     dist))
    total = utils.cumulative_length(segment.points, closed)[-1]
    return min(max(arc / total, 0.), 1.)


def evaluate_displacement(field, query, tol=EPS_INT):
    """Evaluates a displacement field by linear interpolation between
    the two bracketing rows. Queries equal to a row key return that
    row's displacement exactly.

    Args:
        field (DisplacementField): Field to evaluate
        query (float, tuple): Parameter s for parameter keying, a point
                              (x, y) for coordinate keying
        tol (float): For coordinate keying, the maximum distance of the
                     query from the stage-t curve

    Returns:
        tuple. (dx, dy)

    Raises:
        DisplacementError. If the query is outside the field's domain
    """
    if field.keying == KEYING_PARAMETER:
        if np.ndim(query) != 0:
            raise DisplacementError("Field %s is parameter keyed, got query "
                                    "%s" % (field.segment_id, query))
        s = float(query)
        if not 0. <= s <= 1.:
            raise DisplacementError("Parameter %g outside [0, 1] of field %s"
                                    % (s, field.segment_id))
    else:
        if np.shape(query) != (2,):
            raise DisplacementError("Field %s is coordinate keyed, got query"
                                    " %s" % (field.segment_id, query))
        dist, _ = utils.project_onto_polyline(field.source_curve, query,
                                              field.closed)
        if dist > tol:
            raise DisplacementError("Point (%g, %g) is %.3g away from the "
                                    "source curve of field %s"
                                    % (query[0], query[1], dist,
                                       field.segment_id))
        s = field.key_parameter(query)
    d = field.interpolate(s)
    return float(d[0]), float(d[1])
