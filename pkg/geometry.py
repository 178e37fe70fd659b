"""Staged boundary curves of a growing domain. This module holds the
polyline types, uniform arc-length resampling, curve intersection
detection and the segmentation that turns every intersection point into
a segment endpoint, so that displacement fields can map intersection
points of stage t exactly onto those of stage t+1.

All functions are pure: they never modify their inputs.
"""

import collections
import itertools
import logging

import numpy as np
import shapely
from shapely.geometry import LinearRing, Polygon
from shapely.ops import unary_union

import utils
from utils import GeometryError, EPS_INT


Intersection = collections.namedtuple(
    'Intersection', ['point', 'incidences', 'is_junction'])
"""Canonical intersection point of a segmented geometry. ``incidences``
is a tuple of (curve_id, param) pairs, one per curve through the point,
with ``param`` the normalized arc length on that curve. ``is_junction``
is true if the point is interior (0 < param < 1) to at least one curve,
i.e. it splits a curve. Curves which merely share an end point meet at
a corner, which is an intersection but not a junction.
"""


SubdomainPiece = collections.namedtuple(
    'SubdomainPiece', ['curve_id', 'segment_index', 'orientation'])
"""One piece of a subdomain loop. ``segment_index`` is None if the
piece is the whole curve. ``orientation`` is +1 (traverse along the
curve) or -1 (traverse backwards).
"""


Contact = collections.namedtuple(
    'Contact', ['point', 'param_a', 'param_b', 'grazing'])


class Curve(object):
    """Ordered polyline with identity. Closed curves store their first
    point only once; the closing edge is implicit.
    """

    def __init__(self, curve_id, points, closed=False):
        """Creates a new curve and validates its vertices.

        Args:
            curve_id (string): Curve identifier
            points (array-like): Vertices, shape (n, 2)
            closed (bool): Whether the last vertex connects to the first

        Raises:
            GeometryError. If there are too few vertices, non-finite
            coordinates or coinciding consecutive vertices
        """
        self.id = str(curve_id)
        self.closed = bool(closed)
        self.points = utils.as_points(points, "points of curve '%s'" % self.id)
        min_points = 3 if self.closed else 2
        if len(self.points) < min_points:
            raise GeometryError("Curve '%s' needs at least %d points, got %d"
                                % (self.id, min_points, len(self.points)))
        lengths = utils.edge_lengths(self.points, self.closed)
        bad = np.nonzero(lengths <= utils.MIN_POINT_DISTANCE)[0]
        if len(bad):
            raise GeometryError("Curve '%s' has coinciding consecutive "
                                "points at index %d" % (self.id, bad[0]))
        self.points.flags.writeable = False

    @property
    def length(self):
        """Total arc length (perimeter for closed curves). """
        return float(np.sum(utils.edge_lengths(self.points, self.closed)))

    def params(self):
        """Normalized arc length of each vertex. The first vertex is
        0.0 and, for open curves, the last one is exactly 1.0.
        """
        cum = utils.cumulative_length(self.points, self.closed)
        params = cum[:len(self.points)] / cum[-1]
        if not self.closed:
            params[-1] = 1.
        return params

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        return "Curve(%s, %d points%s)" % (
            self.id, len(self.points), ", closed" if self.closed else "")


class CurveSegment(object):
    """A piece of a parent curve between two split points. Segments of
    one parent share their end points, and concatenating them
    reproduces the vertex sequence of the (split) parent.

    Attributes:
        parent_id (string): Id of the parent curve
        segment_index (int): Position within the parent
        points (ndarray): Vertices, shape (n, 2)
        endpoint_flags (tuple): (start, end) booleans, true if that end
                                is an intersection point
        span (tuple): (a, b) normalized arc length of the segment ends
                      on the parent. For a segment of a closed parent
                      that wraps around the start, b is larger than 1
        closed (bool): True only for an unsplit closed parent
    """

    def __init__(self, parent_id, segment_index, points,
                 endpoint_flags=(False, False), span=(0., 1.), closed=False):
        self.parent_id = parent_id
        self.segment_index = segment_index
        self.points = utils.as_points(points)
        self.points.flags.writeable = False
        self.endpoint_flags = tuple(bool(f) for f in endpoint_flags)
        self.span = (float(span[0]), float(span[1]))
        self.closed = closed

    @property
    def ref(self):
        """(parent_id, segment_index) pair identifying the segment. """
        return (self.parent_id, self.segment_index)

    @property
    def id(self):
        return "%s:%d" % (self.parent_id, self.segment_index)

    @property
    def length(self):
        return float(np.sum(utils.edge_lengths(self.points, self.closed)))

    def as_curve(self):
        """Returns the segment as a stand-alone ``Curve``. """
        return Curve(self.id, self.points, self.closed)

    def __len__(self):
        return len(self.points)

    def __repr__(self):
        return "CurveSegment(%s, %d points)" % (self.id, len(self.points))


class StagedGeometry(object):
    """Boundary curves of the domain at one developmental stage,
    together with the subdomain loops. Geometries returned by
    ``segment_at_intersections`` additionally carry the curve segments
    and the canonical intersection points.
    """

    def __init__(self, stage_time, curves, subdomains, segments=None,
                 intersections=None, tol=EPS_INT):
        """Creates a staged geometry.

        Args:
            stage_time (int): Stage index t
            curves (list): List of ``Curve`` in declaration order
            subdomains (dict): Subdomain id -> list of pieces. A piece is
                               a ``SubdomainPiece``, a (curve_id,
                               orientation) pair or a (curve_id,
                               segment_index, orientation) triple
            segments (dict): Curve id -> list of ``CurveSegment``
            intersections (list): List of ``Intersection``
            tol (float): Tolerance the geometry was segmented with

        Raises:
            GeometryError. If curve ids are not unique or a subdomain
            references an unknown curve
        """
        self.stage_time = int(stage_time)
        self.curves = list(curves)
        self._curves_by_id = collections.OrderedDict()
        for curve in self.curves:
            if curve.id in self._curves_by_id:
                raise GeometryError("Duplicate curve id '%s'" % curve.id)
            self._curves_by_id[curve.id] = curve
        self.subdomains = collections.OrderedDict()
        for sid, pieces in subdomains.items():
            self.subdomains[str(sid)] = [self._make_piece(sid, p)
                                         for p in pieces]
        self.segments = segments
        self.intersections = list(intersections or [])
        self.tol = tol

    def _make_piece(self, sid, piece):
        if len(piece) == 2:
            piece = SubdomainPiece(piece[0], None, piece[1])
        else:
            piece = SubdomainPiece(*piece)
        curve_id = str(piece.curve_id)
        if curve_id not in self._curves_by_id:
            raise GeometryError("Subdomain '%s' references unknown curve "
                                "'%s'" % (sid, curve_id))
        if piece.orientation not in (1, -1):
            raise GeometryError("Subdomain '%s': orientation of curve '%s' "
                                "must be 1 or -1" % (sid, curve_id))
        idx = None if piece.segment_index is None else int(piece.segment_index)
        return SubdomainPiece(curve_id, idx, int(piece.orientation))

    @property
    def curve_ids(self):
        return list(self._curves_by_id.keys())

    @property
    def subdomain_ids(self):
        return list(self.subdomains.keys())

    @property
    def is_segmented(self):
        return self.segments is not None

    def curve(self, curve_id):
        try:
            return self._curves_by_id[curve_id]
        except KeyError:
            raise GeometryError("Unknown curve '%s'" % curve_id)

    def segment(self, curve_id, segment_index=None):
        """Returns one segment of a curve. With ``segment_index`` None,
        the whole curve is returned as a single segment.

        Raises:
            GeometryError. If the geometry is not segmented or the
            segment does not exist
        """
        curve = self.curve(curve_id)
        if segment_index is None:
            return CurveSegment(curve.id, 0, curve.points,
                                closed=curve.closed)
        if self.segments is None:
            raise GeometryError("Segment %d of curve '%s' requested, but the "
                                "geometry is not segmented"
                                % (segment_index, curve_id))
        segs = self.segments[curve_id]
        if not 0 <= segment_index < len(segs):
            raise GeometryError("Curve '%s' has %d segments, no segment %d"
                                % (curve_id, len(segs), segment_index))
        return segs[segment_index]

    def all_segments(self):
        """All segments in curve declaration order. """
        if self.segments is None:
            raise GeometryError("Geometry is not segmented")
        return [s for cid in self.curve_ids for s in self.segments[cid]]

    def junctions(self):
        """Intersections which split at least one curve. """
        return [i for i in self.intersections if i.is_junction]

    def junction_keys(self):
        """Keys every junction by (curve_id, segment_index), where
        curve_id is the first curve (declaration order) on which the
        junction is interior and segment_index is the segment of that
        curve starting at the junction. These keys are stable between
        stages with equal topology.

        Returns:
            OrderedDict. (curve_id, segment_index) -> point tuple
        """
        keys = collections.OrderedDict()
        order = dict((cid, i) for i, cid in enumerate(self.curve_ids))
        for inter in self.junctions():
            inner = [(order[cid], cid) for cid, s in inter.incidences
                     if self.curve(cid).closed or 0. < s < 1.]
            _, cid = min(inner)
            for seg in self.segments[cid]:
                if tuple(seg.points[0]) == inter.point:
                    keys[(cid, seg.segment_index)] = inter.point
                    break
        return collections.OrderedDict(sorted(
            keys.items(), key=lambda kv: (order[kv[0][0]], kv[0][1])))

    def __repr__(self):
        return "StagedGeometry(t=%d, curves=%s, subdomains=%s%s)" % (
            self.stage_time, self.curve_ids, self.subdomain_ids,
            ", segmented" if self.is_segmented else "")


def resample_uniform(curve, n):
    """Places ``n`` points with equal arc-length spacing on ``curve``.
    For open curves the first and last points are the input's end
    points. For closed curves the points start at the first vertex and
    are spaced by perimeter / n.

    Args:
        curve (Curve): Input polyline (``CurveSegment`` also accepted)
        n (int): Number of points

    Returns:
        Curve. Resampled curve with the same id and closed flag

    Raises:
        GeometryError. If n < 2, n < 3 for a closed curve or the curve
        has zero length
    """
    closed = getattr(curve, 'closed', False)
    if n < 2:
        raise GeometryError("Cannot resample to %d points (need n >= 2)" % n)
    if closed and n < 3:
        raise GeometryError("Cannot resample closed curve '%s' to %d "
                            "points (need n >= 3)" % (curve.id, n))
    points = curve.points
    cum = utils.cumulative_length(points, closed)
    total = cum[-1]
    if not total > 0.:
        raise GeometryError("Cannot resample degenerate curve '%s' of zero "
                            "length" % curve.id)
    if closed:
        pts = np.vstack([points, points[:1]])
        targets = np.arange(n) * (total / n)
    else:
        pts = points
        targets = np.linspace(0., total, n)
    out = np.column_stack([np.interp(targets, cum, pts[:, 0]),
                           np.interp(targets, cum, pts[:, 1])])
    out[0] = points[0]
    if not closed:
        out[-1] = points[-1]
    return Curve(curve.id, out, closed)


def _edge_arrays(curve):
    """Start points, end points, lengths and start params of the edges
    of a curve or segment.
    """
    pts = curve.points
    closed = getattr(curve, 'closed', False)
    ends = np.vstack([pts[1:], pts[:1]]) if closed else pts[1:]
    starts = pts[:len(ends)]
    lengths = np.hypot(*(ends - starts).T)
    cum = np.concatenate([[0.], np.cumsum(lengths)])
    return starts, ends, lengths, cum


def _point_edge_contacts(points, starts, ends, tol):
    """Pairs (vertex, edge) with distance at most ``tol``. Returns the
    index arrays and the projection parameter t in [0, 1] on the edge.
    """
    d = ends - starts
    sq = np.einsum('ij,ij->i', d, d)
    rel = points[:, None, :] - starts[None, :, :]
    t = np.einsum('ijk,jk->ij', rel, d) / sq[None, :]
    t = np.clip(t, 0., 1.)
    foot = starts[None, :, :] + t[:, :, None] * d[None, :, :]
    dist = np.hypot(foot[..., 0] - points[:, None, 0],
                    foot[..., 1] - points[:, None, 1])
    vi, ei = np.nonzero(dist <= tol)
    return vi, ei, t[vi, ei]


def _contacts(a, b, tol):
    """Finds all contact points of two polylines, merged into clusters.
    Collinear overlaps longer than ``tol`` are reported with
    ``grazing=True``.
    """
    a0, a1, la, cum_a = _edge_arrays(a)
    b0, b1, lb, cum_b = _edge_arrays(b)
    total_a, total_b = cum_a[-1], cum_b[-1]
    da = a1 - a0
    db = b1 - b0
    # hit tuples: (point, param_a, param_b, rank) with rank 0 for a
    # vertex of a, 1 for a vertex of b and 2 for a computed crossing
    hits = []

    P0, P1 = a0[:, None, :], a1[:, None, :]
    Q0, Q1 = b0[None, :, :], b1[None, :, :]
    o1 = utils.orient(P0, P1, Q0)
    o2 = utils.orient(P0, P1, Q1)
    o3 = utils.orient(Q0, Q1, P0)
    o4 = utils.orient(Q0, Q1, P1)
    proper = (o1 * o2 < 0.) & (o3 * o4 < 0.)
    for i, j in zip(*np.nonzero(proper)):
        denom = da[i, 0] * db[j, 1] - da[i, 1] * db[j, 0]
        w = b0[j] - a0[i]
        t = (w[0] * db[j, 1] - w[1] * db[j, 0]) / denom
        u = (w[0] * da[i, 1] - w[1] * da[i, 0]) / denom
        point = a0[i] + t * da[i]
        hits.append((point, (cum_a[i] + t * la[i]) / total_a,
                     (cum_b[j] + u * lb[j]) / total_b, 2))

    a_params = a.params() if isinstance(a, Curve) else cum_a[:len(a.points)] / total_a
    b_params = b.params() if isinstance(b, Curve) else cum_b[:len(b.points)] / total_b
    vi, ej, t = _point_edge_contacts(a.points, b0, b1, tol)
    for v, j, tt in zip(vi, ej, t):
        hits.append((a.points[v], a_params[v],
                     (cum_b[j] + tt * lb[j]) / total_b, 0))
    vi, ei, t = _point_edge_contacts(b.points, a0, a1, tol)
    for v, i, tt in zip(vi, ei, t):
        hits.append((b.points[v], (cum_a[i] + tt * la[i]) / total_a,
                     b_params[v], 1))

    # collinear overlaps of positive length
    runs = []
    na = np.maximum(la, 1e-300)[:, None]
    near = (np.abs(o1) / na <= tol) & (np.abs(o2) / na <= tol)
    for i, j in zip(*np.nonzero(near)):
        ta = np.dot(b0[j] - a0[i], da[i]) / la[i] ** 2
        tb = np.dot(b1[j] - a0[i], da[i]) / la[i] ** 2
        lo, hi = max(0., min(ta, tb)), min(1., max(ta, tb))
        if (hi - lo) * la[i] > tol:
            runs.append((a0[i] + lo * da[i], a0[i] + hi * da[i]))

    if not hits and not runs:
        return []
    # union-find over hits and runs
    n_hits = len(hits)
    parent = list(range(n_hits + len(runs)))

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    def union(k, l):
        parent[find(k)] = find(l)

    pts = np.array([h[0] for h in hits]).reshape(-1, 2)
    for k in range(n_hits):
        close = np.nonzero(np.hypot(*(pts[k + 1:] - pts[k]).T) <= tol)[0]
        for l in close:
            union(k, k + 1 + l)
    for r, (s, e) in enumerate(runs):
        seg = np.array([s, e])
        for k in range(n_hits):
            dist, _ = utils.project_onto_polyline(seg, pts[k])
            if dist <= tol:
                union(k, n_hits + r)
        for r2 in range(r):
            s2, e2 = runs[r2]
            if min(utils.project_onto_polyline(seg, s2)[0],
                   utils.project_onto_polyline(seg, e2)[0]) <= tol:
                union(n_hits + r, n_hits + r2)

    clusters = collections.OrderedDict()
    for k in range(n_hits + len(runs)):
        clusters.setdefault(find(k), []).append(k)
    contacts = []
    for members in clusters.values():
        cluster_hits = [hits[k] for k in members if k < n_hits]
        grazing = any(k >= n_hits for k in members)
        if not cluster_hits:
            s, e = runs[members[0] - n_hits]
            mid = 0.5 * (s + e)
            contacts.append(Contact(tuple(mid), np.nan, np.nan, True))
            continue
        if grazing:
            cluster_hits.sort(key=lambda h: h[1])
            best = cluster_hits[len(cluster_hits) // 2]
        else:
            best = min(cluster_hits, key=lambda h: (h[3], h[1]))
        contacts.append(Contact((float(best[0][0]), float(best[0][1])),
                                float(best[1]), float(best[2]), grazing))
    contacts.sort(key=lambda c: (c.param_a, c.param_b))
    return contacts


def find_intersections(a, b, tol=EPS_INT):
    """Finds all points where two polylines pass within ``tol`` of each
    other. Proper crossings are located with orientation predicates,
    touching contacts by vertex-to-edge distances. Hits closer than
    ``tol`` are merged, and a contiguous run of near contact yields a
    single representative point. Existing vertices are preferred over
    computed crossing points, vertices of ``a`` over those of ``b``.

    Args:
        a (Curve): First curve
        b (Curve): Second curve
        tol (float): Contact tolerance, must be positive

    Returns:
        list. (point, param_a, param_b) tuples sorted by ``param_a``.
        Params are normalized arc lengths in [0, 1]
    """
    if not tol > 0.:
        raise GeometryError("Intersection tolerance must be positive")
    return [(c.point, c.param_a, c.param_b) for c in _contacts(a, b, tol)]


def _split_curve(curve, marks):
    """Splits ``curve`` at the vertices with a canonical intersection
    mark. Returns the list of segments.
    """
    n = len(curve.points)
    cum = utils.cumulative_length(curve.points, curve.closed)
    total = cum[-1]
    marked = [i for i in range(n) if marks[i] >= 0]
    segments = []
    if not curve.closed:
        cuts = [0] + [i for i in marked if 0 < i < n - 1] + [n - 1]
        for k, (s, e) in enumerate(zip(cuts[:-1], cuts[1:])):
            span = (cum[s] / total, 1. if e == n - 1 else cum[e] / total)
            segments.append(CurveSegment(
                curve.id, k, curve.points[s:e + 1],
                (marks[s] >= 0, marks[e] >= 0), span))
    elif not marked:
        segments.append(CurveSegment(curve.id, 0, curve.points,
                                     (False, False), (0., 1.), closed=True))
    else:
        cuts = marked + [marked[0] + n]
        pts = np.vstack([curve.points, curve.points])
        cum2 = np.concatenate([cum[:n], total + cum[:n + 1]])
        for k, (s, e) in enumerate(zip(cuts[:-1], cuts[1:])):
            segments.append(CurveSegment(
                curve.id, k, pts[s:e + 1], (True, True),
                (cum2[s] / total, cum2[e] / total)))
    return segments


def segment_at_intersections(geometry, tol=EPS_INT):
    """Splits every curve of ``geometry`` at its intersection points.
    Intersection points within ``tol`` of each other are merged into
    one canonical point, which is inserted as an explicit vertex into
    every curve passing through it (or replaces the vertex within
    ``tol``), so all segments meeting there share bitwise identical
    coordinates.

    Args:
        geometry (StagedGeometry): Unsegmented geometry
        tol (float): Intersection tolerance

    Returns:
        StagedGeometry. New geometry with the split curves, segments and
        canonical intersections

    Raises:
        GeometryError. If two curves touch along a run (tangential
        grazing contact) that cannot be resolved into a single point
    """
    curves = geometry.curves
    canon = []
    incident = []
    for ia, ib in itertools.combinations(range(len(curves)), 2):
        for c in _contacts(curves[ia], curves[ib], tol):
            if c.grazing:
                raise GeometryError(
                    "Curves '%s' and '%s' touch along a run near (%.9g, %.9g)."
                    " Tangential contact cannot be split at a single "
                    "intersection point" % (curves[ia].id, curves[ib].id,
                                            c.point[0], c.point[1]))
            point = np.array(c.point)
            k = None
            for idx, other in enumerate(canon):
                if np.hypot(*(other - point)) <= tol:
                    k = idx
                    break
            if k is None:
                k = len(canon)
                canon.append(point)
                incident.append(set())
            incident[k].update([ia, ib])
    logging.debug("Stage %d: %d intersection points"
                  % (geometry.stage_time, len(canon)))

    new_curves = []
    segments = collections.OrderedDict()
    vertex_of = {}
    for ic, curve in enumerate(curves):
        pts = [np.array(p) for p in curve.points]
        marks = [-1] * len(pts)
        inserts = collections.defaultdict(list)
        for k in [k for k in range(len(canon)) if ic in incident[k]]:
            P = canon[k]
            dist = np.hypot(*(curve.points - P).T)
            j = int(np.argmin(dist))
            if dist[j] <= tol:
                pts[j] = P.copy()
                marks[j] = k
                continue
            starts, ends, lengths, _ = _edge_arrays(curve)
            d = ends - starts
            t = np.clip(np.einsum('ij,ij->i', P - starts, d) / lengths ** 2,
                        0., 1.)
            foot = starts + t[:, None] * d
            e = int(np.argmin(np.hypot(*(foot - P).T)))
            inserts[e].append((t[e], k))
        new_pts, new_marks = [], []
        for e in range(len(pts)):
            new_pts.append(pts[e])
            new_marks.append(marks[e])
            for t, k in sorted(inserts.get(e, [])):
                new_pts.append(canon[k].copy())
                new_marks.append(k)
        new_curve = Curve(curve.id, new_pts, curve.closed)
        new_curves.append(new_curve)
        segments[curve.id] = _split_curve(new_curve, new_marks)
        params = new_curve.params()
        for i, k in enumerate(new_marks):
            if k >= 0:
                vertex_of[(k, ic)] = (i, params[i])
        logging.debug("Curve '%s' split into %d segments"
                      % (curve.id, len(segments[curve.id])))

    intersections = []
    for k, point in enumerate(canon):
        incidences = []
        junction = False
        for ic in sorted(incident[k]):
            if (k, ic) not in vertex_of:
                continue
            i, s = vertex_of[(k, ic)]
            incidences.append((curves[ic].id, float(s)))
            if curves[ic].closed or 0 < i < len(new_curves[ic]) - 1:
                junction = True
        intersections.append(Intersection(
            (float(point[0]), float(point[1])), tuple(incidences), junction))
    order = dict((c.id, i) for i, c in enumerate(curves))
    intersections.sort(key=lambda x: (order[x.incidences[0][0]],
                                      x.incidences[0][1]))
    return StagedGeometry(geometry.stage_time, new_curves,
                          geometry.subdomains, segments, intersections, tol)


def piece_points(geometry, piece):
    """Vertices of one subdomain loop piece in traversal order. Closed
    whole curves are returned with the first point repeated at the end.
    """
    seg = geometry.segment(piece.curve_id, piece.segment_index)
    pts = seg.points
    if seg.closed:
        pts = np.vstack([pts, pts[:1]])
    return pts[::-1] if piece.orientation < 0 else pts


def subdomain_loop(geometry, subdomain_id, tol=None):
    """Assembles the closed vertex loop of a subdomain from its pieces.

    Args:
        geometry (StagedGeometry): Geometry (segmented if the pieces
                                   reference segments)
        subdomain_id (string): Subdomain to assemble
        tol (float): Closure tolerance. Defaults to ``geometry.tol``

    Returns:
        ndarray. Loop vertices, shape (m, 2), closure implicit

    Raises:
        GeometryError. If the subdomain is unknown or the pieces do not
        form a closed loop
    """
    tol = geometry.tol if tol is None else tol
    try:
        pieces = geometry.subdomains[subdomain_id]
    except KeyError:
        raise GeometryError("Unknown subdomain '%s'" % subdomain_id)
    if not pieces:
        raise GeometryError("Subdomain '%s' has no boundary pieces"
                            % subdomain_id)
    chunks = [piece_points(geometry, p) for p in pieces]
    for k, chunk in enumerate(chunks):
        nxt = chunks[(k + 1) % len(chunks)]
        gap = np.hypot(*(chunk[-1] - nxt[0]))
        if gap > tol:
            raise GeometryError(
                "Subdomain '%s' is not closed: piece %d (curve '%s') ends "
                "%.3g away from the start of the next piece"
                % (subdomain_id, k, pieces[k].curve_id, gap))
    loop = np.vstack([chunk[:-1] for chunk in chunks])
    if len(loop) < 3:
        raise GeometryError("Subdomain '%s' has fewer than 3 vertices"
                            % subdomain_id)
    return loop


def polygon_area(loop):
    """Absolute shoelace area of a closed loop. A self-intersecting
    loop still gets the shoelace value, with a warning.

    Args:
        loop (array-like): Loop vertices, closure implicit

    Returns:
        float. Absolute area
    """
    loop = utils.as_points(loop, "loop")
    if len(loop) < 3:
        raise GeometryError("A loop needs at least 3 points")
    if not LinearRing(loop).is_simple:
        logging.warning("Polygon loop with %d vertices is self-intersecting;"
                        " shoelace area may be meaningless" % len(loop))
    return abs(utils.signed_area(loop))


def subdomain_areas(geometry):
    """Shoelace area of every subdomain loop plus their sum under the
    key ``total``.

    Returns:
        OrderedDict. Subdomain id -> area
    """
    areas = collections.OrderedDict()
    for sid in geometry.subdomain_ids:
        areas[sid] = polygon_area(subdomain_loop(geometry, sid))
    areas['total'] = sum(areas.values())
    return areas


def check_partition(geometry, rel_tol=1e-6):
    """Checks that the subdomain loops are simple and pairwise disjoint.

    Returns:
        OrderedDict. Subdomain id -> shapely ``Polygon``

    Raises:
        GeometryError. If a loop self-intersects or two subdomains
        overlap
    """
    polygons = collections.OrderedDict()
    for sid in geometry.subdomain_ids:
        loop = subdomain_loop(geometry, sid)
        if not LinearRing(loop).is_simple:
            raise GeometryError("Subdomain '%s' has a self-intersecting "
                                "boundary loop" % sid)
        polygons[sid] = Polygon(loop)
    total = sum(p.area for p in polygons.values())
    union = unary_union(list(polygons.values())).area
    if abs(total - union) > rel_tol * total:
        overlaps = [(s1, s2) for (s1, p1), (s2, p2)
                    in itertools.combinations(polygons.items(), 2)
                    if p1.intersection(p2).area > rel_tol * total]
        raise GeometryError("Subdomains overlap: %s" % ", ".join(
            "%s/%s" % pair for pair in overlaps))
    return polygons


def check_topology(seg_t, seg_t1):
    """Checks that two segmented stages have the same topology: the
    same curves, segment counts, junctions and subdomain definitions.

    Raises:
        GeometryError. Listing all differences
    """
    problems = []
    if seg_t.curve_ids != seg_t1.curve_ids:
        problems.append("curve ids %s vs %s" % (seg_t.curve_ids,
                                               seg_t1.curve_ids))
    else:
        for cid in seg_t.curve_ids:
            if seg_t.curve(cid).closed != seg_t1.curve(cid).closed:
                problems.append("curve '%s' open/closed flag differs" % cid)
            n0, n1 = len(seg_t.segments[cid]), len(seg_t1.segments[cid])
            if n0 != n1:
                problems.append("curve '%s' has %d vs %d segments"
                                % (cid, n0, n1))
    k0, k1 = list(seg_t.junction_keys()), list(seg_t1.junction_keys())
    if k0 != k1:
        problems.append("junctions %s vs %s" % (k0, k1))
    if seg_t.subdomains != seg_t1.subdomains:
        problems.append("subdomain definitions differ")
    if problems:
        raise GeometryError("Stages %d and %d differ in topology: %s"
                            % (seg_t.stage_time, seg_t1.stage_time,
                               "; ".join(problems)))


def label_points(polygons, x, y):
    """Index of the first polygon containing each query point, -1 if
    none.
    """
    labels = np.full(len(x), -1, dtype=int)
    for k, poly in enumerate(polygons):
        inside = shapely.contains_xy(poly, x, y) & (labels < 0)
        labels[inside] = k
    return labels
