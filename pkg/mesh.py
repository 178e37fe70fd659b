"""Triangle meshes of the multi-subdomain domain.

``triangulate`` builds a constrained Delaunay triangulation in which
every curve segment is a chain of mesh edges and every triangle carries
the label of the subdomain containing it. ``move_mesh`` deforms the
mesh of stage t towards stage t+1: nodes on curve segments follow the
displacement fields, all other nodes follow the discrete harmonic
extension of the boundary motion. ``quality_report`` computes the
normalized element quality whose sign flips for inverted elements.
"""

import collections
import logging

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph
from scipy.sparse.linalg import splu
import triangle as tr

import geometry
import utils
from displacement import KEYING_COORDINATE, evaluate_displacement
from utils import MeshError, EPS_INT


BoundaryTag = collections.namedtuple(
    'BoundaryTag', ['parent_id', 'segment_index', 's0', 's1'])
"""Tag of a mesh edge lying on a curve segment, with the segment
parameters of its two end nodes.
"""


Constraint = collections.namedtuple(
    'Constraint', ['parent_id', 'segment_index', 's'])
"""A node lying on a curve segment at segment parameter s. """


_MASS_PATTERN = np.array([[2., 1., 1.], [1., 2., 1.], [1., 1., 2.]]) / 12.


class QualityReport(object):
    """Element qualities of a mesh.

    Attributes:
        per_element_quality (ndarray): Quality of every element
        min_quality (float): Smallest quality
        inverted_count (int): Number of elements with quality < 0
    """

    def __init__(self, per_element_quality):
        self.per_element_quality = np.asarray(per_element_quality,
                                              dtype=float)
        q = self.per_element_quality
        self.min_quality = float(q.min()) if len(q) else 1.
        self.inverted_count = int(np.count_nonzero(q < 0.))

    @property
    def inverted_elements(self):
        return np.nonzero(self.per_element_quality < 0.)[0]

    def __repr__(self):
        return "QualityReport(min=%.4g, inverted=%d)" % (self.min_quality,
                                                         self.inverted_count)


class Mesh(object):
    """Triangle mesh with subdomain labels and curve constraints. A mesh
    is never modified; ``move_mesh`` returns a new instance which
    shares the reference data of the mesh it was derived from.

    Attributes:
        nodes (ndarray): Node coordinates, shape (n, 2)
        triangles (ndarray): Node indices, shape (m, 3), counterclockwise
                             at creation
        label_codes (ndarray): Index into ``subdomain_ids`` per element
        subdomain_ids (list): Subdomain ids
        boundary_edges (ndarray): Node pairs of the segment edges
        boundary_tags (list): ``BoundaryTag`` per boundary edge
        node_constraints (dict): Node -> list of ``Constraint`` in curve
                                 declaration order
        segment_spans (OrderedDict): (parent_id, segment_index) -> span
                                     (a, b) on the parent curve
        junction_nodes (OrderedDict): Junction key -> node index
        intersection_nodes (list): Nodes at intersection points
        reference_nodes (ndarray): Node coordinates at creation
        version (int): Number of ``move_mesh`` calls since creation
    """

    def __init__(self, nodes, triangles, label_codes=None, subdomain_ids=None,
                 boundary_edges=None, boundary_tags=None,
                 node_constraints=None, segment_spans=None,
                 junction_nodes=None, intersection_nodes=None,
                 reference_nodes=None, version=0, shared=None):
        self.nodes = np.array(nodes, dtype=float)
        self.triangles = np.array(triangles, dtype=int).reshape(-1, 3)
        if label_codes is None:
            label_codes = np.zeros(len(self.triangles), dtype=int)
        self.label_codes = np.asarray(label_codes, dtype=int)
        self.subdomain_ids = list(subdomain_ids or ['domain'])
        self.boundary_edges = np.zeros((0, 2), dtype=int) \
            if boundary_edges is None else np.asarray(boundary_edges)
        self.boundary_tags = list(boundary_tags or [])
        self.node_constraints = node_constraints or {}
        self.segment_spans = segment_spans or collections.OrderedDict()
        self.junction_nodes = junction_nodes or collections.OrderedDict()
        self.intersection_nodes = list(intersection_nodes or [])
        self.reference_nodes = self.nodes.copy() if reference_nodes is None \
            else reference_nodes
        self.version = version
        self.shared = {} if shared is None else shared
        self.cache = {}
        self.nodes.flags.writeable = False
        self.reference_nodes.flags.writeable = False

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_elements(self):
        return len(self.triangles)

    @property
    def element_labels(self):
        """Subdomain id of every element. """
        ids = np.array(self.subdomain_ids, dtype=object)
        return ids[self.label_codes]

    @property
    def node_displacement(self):
        """Accumulated motion of every node since creation. """
        return self.nodes - self.reference_nodes

    def signed_areas(self):
        p = self.nodes[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def labeled_areas(self):
        """Sum of absolute element areas per subdomain, plus ``total``. """
        areas = np.abs(self.signed_areas())
        sums = np.bincount(self.label_codes, weights=areas,
                           minlength=len(self.subdomain_ids))
        result = collections.OrderedDict(
            (sid, float(a)) for sid, a in zip(self.subdomain_ids, sums))
        result['total'] = float(sums.sum())
        return result

    def element_mask(self, subdomain_id):
        """Boolean mask of the elements labeled ``subdomain_id``. """
        try:
            code = self.subdomain_ids.index(subdomain_id)
        except ValueError:
            raise MeshError("Mesh has no subdomain '%s'" % subdomain_id)
        return self.label_codes == code

    def adjacency(self):
        """Sparse node adjacency matrix of the edge graph. """
        if 'adjacency' not in self.cache:
            t = self.triangles
            i = np.concatenate([t[:, 0], t[:, 1], t[:, 2]])
            j = np.concatenate([t[:, 1], t[:, 2], t[:, 0]])
            adj = sp.coo_matrix((np.ones(len(i)), (i, j)),
                                shape=(self.n_nodes, self.n_nodes)).tocsr()
            self.cache['adjacency'] = ((adj + adj.T) > 0).astype(float)
        return self.cache['adjacency']

    def moved(self, nodes):
        """Returns a new mesh with the same connectivity and reference
        data but new node coordinates.
        """
        return Mesh(nodes, self.triangles, self.label_codes,
                    self.subdomain_ids, self.boundary_edges,
                    self.boundary_tags, self.node_constraints,
                    self.segment_spans, self.junction_nodes,
                    self.intersection_nodes, self.reference_nodes,
                    self.version + 1, self.shared)

    def __repr__(self):
        return "Mesh(%d nodes, %d elements, version %d)" % (
            self.n_nodes, self.n_elements, self.version)


def default_edge_length(geo):
    """Bounding box diagonal of all curves divided by
    ``utils.EDGE_LENGTH_DIVISOR``.
    """
    pts = np.vstack([c.points for c in geo.curves])
    diag = np.hypot(*(pts.max(axis=0) - pts.min(axis=0)))
    return diag / utils.EDGE_LENGTH_DIVISOR


def _discretize(segment, h):
    """Keeps all vertices of ``segment`` and subdivides edges longer
    than ``h``. Returns the points and their segment parameters.
    """
    pts = segment.points
    if segment.closed:
        pts = np.vstack([pts, pts[:1]])
    out = [pts[0]]
    for a, b in zip(pts[:-1], pts[1:]):
        m = int(np.ceil(np.hypot(*(b - a)) / h))
        for k in range(1, m):
            out.append(a + (float(k) / m) * (b - a))
        out.append(b)
    out = np.array(out)
    cum = utils.cumulative_length(out)
    params = cum / cum[-1]
    params[0], params[-1] = 0., 1.
    if segment.closed:
        return out[:-1], params[:-1]
    return out, params


def triangulate(geo, target_edge_length=None, min_angle=utils.MIN_ANGLE):
    """Builds a labeled constrained Delaunay triangulation of a
    segmented geometry. No Steiner points are inserted on the curve
    segments, so segment vertices (and the points added to split long
    segment edges) are the only boundary nodes.

    Args:
        geo (StagedGeometry): Segmented geometry
        target_edge_length (float): Target edge length h. Defaults to
                                    ``default_edge_length(geo)``
        min_angle (float): Minimum angle in degrees

    Returns:
        Mesh. The new mesh

    Raises:
        MeshError. If the geometry is not segmented or the result has
        elements outside all subdomains or degenerate elements
        GeometryError. If a subdomain loop is not closed or not simple
    """
    if not geo.is_segmented:
        raise MeshError("triangulate needs a segmented geometry; call "
                        "segment_at_intersections first")
    polygons = geometry.check_partition(geo)
    h = target_edge_length or default_edge_length(geo)
    if not h > 0.:
        raise MeshError("Target edge length must be positive, got %g" % h)

    pool = collections.OrderedDict()
    constraints = collections.defaultdict(list)
    edges, tags = [], []
    spans = collections.OrderedDict()

    def node_index(p):
        key = (float(p[0]), float(p[1]))
        if key not in pool:
            pool[key] = len(pool)
        return pool[key]

    for seg in geo.all_segments():
        pts, params = _discretize(seg, h)
        idx = [node_index(p) for p in pts]
        for i, s in zip(idx, params):
            constraints[i].append(Constraint(seg.parent_id, seg.segment_index,
                                             float(s)))
        pairs = list(zip(range(len(idx) - 1), range(1, len(idx))))
        for k, l in pairs:
            edges.append((idx[k], idx[l]))
            tags.append(BoundaryTag(seg.parent_id, seg.segment_index,
                                    params[k], params[l]))
        if seg.closed:
            edges.append((idx[-1], idx[0]))
            tags.append(BoundaryTag(seg.parent_id, seg.segment_index,
                                    params[-1], 1.))
        spans[seg.ref] = seg.span

    vertices = np.array(list(pool.keys()))
    max_area = np.sqrt(3.) / 4. * h ** 2
    opts = 'pq%gYYa%.12g' % (min_angle, max_area)
    logging.debug("Triangle options: %s" % opts)
    out = tr.triangulate({'vertices': vertices,
                          'segments': np.array(edges, dtype=np.int32)}, opts)
    nodes = np.asarray(out['vertices'], dtype=float)
    triangles = np.array(out['triangles'], dtype=int)
    if len(nodes) < len(vertices) or \
            not np.array_equal(nodes[:len(vertices)], vertices):
        raise MeshError("Triangulation did not preserve the segment vertices")

    p = nodes[triangles]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    area = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    flip = area < 0.
    triangles[flip] = triangles[flip][:, [0, 2, 1]]
    if np.any(area == 0.):
        raise MeshError("Triangulation produced %d degenerate elements"
                        % np.count_nonzero(area == 0.))

    centroids = p.mean(axis=1)
    sids = list(polygons.keys())
    codes = geometry.label_points(list(polygons.values()),
                                  centroids[:, 0], centroids[:, 1])
    if np.any(codes < 0):
        raise MeshError("%d elements lie outside all subdomains, e.g. near "
                        "(%g, %g)" % (np.count_nonzero(codes < 0),
                                      centroids[codes < 0][0, 0],
                                      centroids[codes < 0][0, 1]))

    junction_nodes = collections.OrderedDict(
        (key, pool[point]) for key, point in geo.junction_keys().items())
    intersection_nodes = [pool[i.point] for i in geo.intersections]
    logging.info("Triangulated stage %d: %d nodes, %d elements, h=%.4g"
                 % (geo.stage_time, len(nodes), len(triangles), h))
    return Mesh(nodes, triangles, codes, sids, np.array(edges), tags,
                dict(constraints), spans, junction_nodes, intersection_nodes)


def p1_matrices(nodes, triangles, strict=False):
    """Assembles the consistent P1 mass matrix and the P1 stiffness
    matrix. The mass matrix uses the signed element area, so a folded
    region of an inverted mesh is integrated once and ``M.sum()`` is the
    area enclosed by the boundary. The stiffness matrix uses the
    absolute area and stays positive semidefinite.

    Args:
        nodes (ndarray): Node coordinates
        triangles (ndarray): Element connectivity
        strict (bool): Raise on inverted elements

    Returns:
        tuple. (M, K) as CSR matrices

    Raises:
        MeshError. If an element is degenerate, or inverted in strict
        mode
    """
    p = nodes[triangles]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    area = 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
    if strict and np.any(area < 0.):
        e = int(np.nonzero(area < 0.)[0][0])
        raise MeshError("Element %d is inverted (signed area %.3g, %d "
                        "inverted in total)"
                        % (e, area[e], np.count_nonzero(area < 0.)))
    if np.any(area == 0.):
        e = int(np.nonzero(area == 0.)[0][0])
        raise MeshError("Element %d is degenerate (zero area)" % e)
    abs_area = np.abs(area)
    edges = np.stack([p[:, 2] - p[:, 1], p[:, 0] - p[:, 2],
                      p[:, 1] - p[:, 0]], axis=1)
    k_loc = np.einsum('mik,mjk->mij', edges, edges) \
        / (4. * abs_area)[:, None, None]
    m_loc = area[:, None, None] * _MASS_PATTERN[None, :, :]
    rows = np.repeat(triangles[:, :, None], 3, axis=2).ravel()
    cols = np.repeat(triangles[:, None, :], 3, axis=1).ravel()
    n = len(nodes)
    M = sp.coo_matrix((m_loc.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    K = sp.coo_matrix((k_loc.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    return M, K


class HarmonicExtension(object):
    """Discrete harmonic extension on the reference mesh. Nodes with a
    curve constraint are Dirichlet nodes, the others are solved for
    with the P1 Laplacian. The factorization is computed once per
    reference mesh.
    """

    def __init__(self, mesh):
        n = mesh.n_nodes
        self.boundary = np.array(sorted(mesh.node_constraints), dtype=int)
        mask = np.ones(n, dtype=bool)
        mask[self.boundary] = False
        self.interior = np.nonzero(mask)[0]
        _, K = p1_matrices(mesh.reference_nodes, mesh.triangles)
        K = K.tocsr()
        self._k_ib = K[self.interior][:, self.boundary]
        self._lu = None
        if len(self.interior):
            self._lu = splu(K[self.interior][:, self.interior].tocsc())
        logging.debug("Harmonic extension: %d Dirichlet, %d free nodes"
                      % (len(self.boundary), len(self.interior)))

    def extend(self, boundary_values):
        """Interior values for the given Dirichlet values, shape (nB, k).
        """
        if self._lu is None:
            return np.zeros((0, boundary_values.shape[1]))
        return self._lu.solve(-(self._k_ib @ boundary_values))


def _extension(mesh):
    if 'harmonic_extension' not in mesh.shared:
        mesh.shared['harmonic_extension'] = HarmonicExtension(mesh)
    return mesh.shared['harmonic_extension']


def _covering_fields(mesh, fields):
    cover = {}
    for ref in mesh.segment_spans:
        covering = [f for f in fields if f.covers(ref)]
        if not covering:
            raise MeshError("Segment %s:%d is not covered by any displacement"
                            " field" % ref)
        if len(covering) > 1:
            raise MeshError("Segment %s:%d is covered by %d displacement "
                            "fields" % (ref[0], ref[1], len(covering)))
        cover[ref] = covering[0]
    return cover


def boundary_displacement(mesh, fields, tol=EPS_INT):
    """Displacement of every constrained node, taken from the field of
    its first constraint (curve declaration order).

    Returns:
        tuple. (node indices, displacements of shape (nB, 2))

    Raises:
        MeshError. If a segment is not covered by exactly one field
    """
    cover = _covering_fields(mesh, fields)
    nodes = np.array(sorted(mesh.node_constraints), dtype=int)
    values = np.zeros((len(nodes), 2))
    batches = collections.defaultdict(lambda: ([], []))
    for k, node in enumerate(nodes):
        c = mesh.node_constraints[node][0]
        ref = (c.parent_id, c.segment_index)
        field = cover[ref]
        if field.keying == KEYING_COORDINATE:
            values[k] = evaluate_displacement(
                field, tuple(mesh.reference_nodes[node]), tol)
            continue
        s = c.s
        if field.segment_ref[1] is None:
            a, b = mesh.segment_spans[ref]
            s = a + s * (b - a)
        s = (s - field.origin) % 1. if field.closed else min(s, 1.)
        rows, params = batches[id(field)]
        rows.append(k)
        params.append(s)
    by_id = dict((id(f), f) for f in cover.values())
    for fid, (rows, params) in batches.items():
        values[rows] = by_id[fid].interpolate(np.array(params))
    return nodes, values


def move_mesh(mesh, fields, fraction, strict=False, tol=EPS_INT):
    """Moves the reference mesh by ``fraction`` of the displacement
    fields. Constrained nodes (all nodes on curve segments, internal
    ones included) follow their field, the remaining nodes the discrete
    harmonic extension of the constrained displacements. Element labels
    do not change.

    Args:
        mesh (Mesh): Mesh to move (only its reference data is used)
        fields (list): ``DisplacementField`` list covering every segment
        fraction (float): Fraction of the stage displacement in [0, 1]
        strict (bool): Raise on maximum principle violations
        tol (float): Tolerance for coordinate keyed queries

    Returns:
        Mesh. The moved mesh

    Raises:
        MeshError. If a segment is uncovered or covered twice, or in
        strict mode if the extension violates the maximum principle
    """
    if not 0. <= fraction <= 1.:
        raise MeshError("Mesh motion fraction %g outside [0, 1]" % fraction)
    bnodes, bvalues = boundary_displacement(mesh, fields, tol)
    ext = _extension(mesh)
    disp = np.zeros((mesh.n_nodes, 2))
    disp[bnodes] = bvalues
    if len(ext.interior):
        inner = ext.extend(bvalues)
        disp[ext.interior] = inner
        lo, hi = bvalues.min(axis=0), bvalues.max(axis=0)
        slack = utils.MAX_PRINCIPLE_TOL * max(
            1e-300, float(np.abs(bvalues).max()))
        bad = np.nonzero((inner < lo - slack) | (inner > hi + slack))[0]
        if len(bad):
            msg = ("Harmonic extension violates the maximum principle at %d "
                   "interior nodes (e.g. node %d)"
                   % (len(bad), ext.interior[bad[0]]))
            if strict:
                raise MeshError(msg)
            logging.warning(msg)
    return mesh.moved(mesh.reference_nodes + fraction * disp)


def element_quality(mesh, element):
    """Normalized quality q = 4 sqrt(3) A / (l1^2 + l2^2 + l3^2) with
    the signed area A in creation orientation. q is 1 for equilateral
    triangles, 0 for degenerate ones and negative for inverted ones.
    """
    p = mesh.nodes[mesh.triangles[element]]
    d1, d2 = p[1] - p[0], p[2] - p[0]
    area = 0.5 * (d1[0] * d2[1] - d1[1] * d2[0])
    sq = np.sum((p - np.roll(p, -1, axis=0)) ** 2)
    if sq == 0.:
        return 0.
    return float(4. * np.sqrt(3.) * area / sq)


def quality_report(mesh):
    """Evaluates ``element_quality`` for every element.

    Returns:
        QualityReport. Qualities, minimum and inverted count
    """
    p = mesh.nodes[mesh.triangles]
    area = mesh.signed_areas()
    sq = np.sum((p - np.roll(p, -1, axis=1)) ** 2, axis=(1, 2))
    q = np.where(sq > 0., 4. * np.sqrt(3.) * area / np.where(sq > 0., sq, 1.),
                 0.)
    return QualityReport(q)


def graph_distance(mesh, sources):
    """Number of mesh edges on the shortest path from any node in
    ``sources`` to every node.
    """
    dist = csgraph.shortest_path(mesh.adjacency(), unweighted=True,
                                 indices=np.asarray(sources, dtype=int))
    return np.atleast_2d(dist).min(axis=0)
