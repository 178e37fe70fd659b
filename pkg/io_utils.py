"""Readers and writers for the plain text geometry and displacement
files. All floats are written with 17 significant digits so that a
written file reads back bit for bit.

Geometry files are a CSV with one row per curve vertex

    curve_id,point_index,x,y

and a YAML sidecar with the same stem which declares the stage index,
the closed flag of every curve and the subdomain loops:

    stage_time: 0
    curves:
      outer: {closed: false}
    subdomains:
      domain1: [[base, 2, 1], [outer, 0, 1], [arc1, 0, -1]]

A loop piece is [curve_id, segment_index, orientation]; a segment
index of null stands for the whole curve.
"""

import codecs
import collections
import csv
import logging
import os

import numpy as np
import yaml

import utils
from displacement import DisplacementField, DisplacementRow, \
    KEYING_COORDINATE, KEYING_PARAMETER
from geometry import Curve, StagedGeometry
from utils import GeometryError, DisplacementError


GEOMETRY_HEADER = ['curve_id', 'point_index', 'x', 'y']
SEGMENT_HEADER = ['curve_id', 'segment_index', 'point_index', 'x', 'y',
                  'is_intersection']
DISPLACEMENT_HEADER = ['segment_id', 'key_type', 'key1', 'key2', 'dx', 'dy']


def sidecar_path(csv_path):
    """Path of the YAML sidecar belonging to a geometry CSV. """
    return os.path.splitext(csv_path)[0] + '.yaml'


def _read_rows(path, header):
    with codecs.open(path, 'r', encoding='utf-8') as f:
        reader = csv.reader(f)
        try:
            first = next(reader)
        except StopIteration:
            raise GeometryError("%s is empty" % path)
        if [c.strip() for c in first] != header:
            raise GeometryError("%s: expected header '%s', got '%s'"
                                % (path, ",".join(header), ",".join(first)))
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != len(header):
                raise GeometryError("%s:%d: expected %d columns, got %d"
                                    % (path, lineno, len(header), len(row)))
            yield lineno, row


def _writer(f):
    return csv.writer(f, lineterminator='\n')


def load_yaml(path):
    """Loads a YAML document. """
    with codecs.open(path, 'r', encoding='utf-8') as f:
        return yaml.load(f, Loader=yaml.FullLoader)


def dump_yaml(data, path):
    with codecs.open(path, 'w', encoding='utf-8') as f:
        yaml.dump(data, f, default_flow_style=None, sort_keys=False)


def write_geometry(geometry, csv_path):
    """Writes a staged geometry as CSV plus YAML sidecar.

    Args:
        geometry (StagedGeometry): Geometry to write (only the curves
                                   and subdomains are written)
        csv_path (string): Path of the CSV file

    Returns:
        tuple. (csv_path, sidecar path)
    """
    with codecs.open(csv_path, 'w', encoding='utf-8') as f:
        w = _writer(f)
        w.writerow(GEOMETRY_HEADER)
        for curve in geometry.curves:
            for i, (x, y) in enumerate(curve.points):
                w.writerow([curve.id, i, utils.format_float(x),
                            utils.format_float(y)])
    side = collections.OrderedDict()
    side['stage_time'] = geometry.stage_time
    side['curves'] = collections.OrderedDict(
        (c.id, {'closed': bool(c.closed)}) for c in geometry.curves)
    side['subdomains'] = collections.OrderedDict(
        (sid, [[p.curve_id, p.segment_index, p.orientation] for p in pieces])
        for sid, pieces in geometry.subdomains.items())
    path = sidecar_path(csv_path)
    dump_yaml(_plain(side), path)
    logging.debug("Wrote geometry of stage %d to %s"
                  % (geometry.stage_time, csv_path))
    return csv_path, path


def _plain(obj):
    """Converts OrderedDicts to dicts for a tag-free YAML dump. """
    if isinstance(obj, dict):
        return dict((k, _plain(v)) for k, v in obj.items())
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def read_geometry(csv_path, sidecar=None):
    """Reads a staged geometry. Curves keep the order of their first
    appearance in the CSV, vertices are ordered by point index.

    Args:
        csv_path (string): Path of the CSV file
        sidecar (string): Path of the YAML sidecar. Defaults to the CSV
                          path with suffix ``.yaml``

    Returns:
        StagedGeometry. The geometry

    Raises:
        GeometryError. If the files are malformed or inconsistent
        IOError. If a file cannot be read
    """
    points = collections.OrderedDict()
    for lineno, row in _read_rows(csv_path, GEOMETRY_HEADER):
        try:
            idx, x, y = int(row[1]), float(row[2]), float(row[3])
        except ValueError:
            raise GeometryError("%s:%d: malformed row %s"
                                % (csv_path, lineno, row))
        points.setdefault(row[0].strip(), []).append((idx, x, y))
    side = load_yaml(sidecar or sidecar_path(csv_path)) or {}
    if not isinstance(side, dict):
        raise GeometryError("Sidecar of %s is not a mapping" % csv_path)
    unknown = sorted(set(side) - set(['stage_time', 'curves', 'subdomains']))
    if unknown:
        raise GeometryError("Unknown sidecar keys: %s" % ", ".join(unknown))
    flags = dict((str(k), v) for k, v in (side.get('curves') or {}).items())
    missing = sorted(set(map(str, flags)) - set(points))
    if missing:
        raise GeometryError("Sidecar declares curves without points: %s"
                            % ", ".join(missing))
    curves = []
    for cid, rows in points.items():
        rows.sort()
        if [r[0] for r in rows] != list(range(len(rows))):
            raise GeometryError("Curve '%s' in %s: point indices must run "
                                "0..%d" % (cid, csv_path, len(rows) - 1))
        closed = bool((flags.get(cid) or {}).get('closed', False))
        curves.append(Curve(cid, [(r[1], r[2]) for r in rows], closed))
    subdomains = collections.OrderedDict()
    for sid, pieces in (side.get('subdomains') or {}).items():
        subdomains[str(sid)] = [tuple(p) for p in pieces]
    return StagedGeometry(int(side.get('stage_time', 0)), curves, subdomains)


def write_segments(geometry, path):
    """Writes the segments of a segmented geometry. A point is flagged
    as intersection if it coincides with one of the geometry's
    intersection points.
    """
    points = set(i.point for i in geometry.intersections)
    with codecs.open(path, 'w', encoding='utf-8') as f:
        w = _writer(f)
        w.writerow(SEGMENT_HEADER)
        for seg in geometry.all_segments():
            for i, (x, y) in enumerate(seg.points):
                w.writerow([seg.parent_id, seg.segment_index, i,
                            utils.format_float(x), utils.format_float(y),
                            int((float(x), float(y)) in points)])
    logging.debug("Wrote %d segments to %s"
                  % (len(geometry.all_segments()), path))


def write_displacement(fields, path):
    """Writes displacement fields as one table. Parameter keyed rows
    leave ``key2`` empty.
    """
    with codecs.open(path, 'w', encoding='utf-8') as f:
        w = _writer(f)
        w.writerow(DISPLACEMENT_HEADER)
        for field in fields:
            for row in field.rows:
                if field.keying == KEYING_PARAMETER:
                    keys = [utils.format_float(row.key), '']
                else:
                    keys = [utils.format_float(k) for k in row.key]
                w.writerow([field.segment_id, field.keying] + keys
                           + [utils.format_float(row.dx),
                              utils.format_float(row.dy)])


def parse_segment_id(segment_id):
    """Splits ``parent:index`` into (parent, index). A plain parent id
    refers to the whole curve and gives (parent, None).
    """
    parent, sep, idx = segment_id.rpartition(':')
    if sep and idx.isdigit():
        return parent, int(idx)
    return segment_id, None


def read_displacement(path):
    """Reads a displacement table written by ``write_displacement``.

    Returns:
        list. ``DisplacementField`` per segment id, in file order

    Raises:
        DisplacementError. If the table is malformed
    """
    tables = collections.OrderedDict()
    try:
        rows = list(_read_rows(path, DISPLACEMENT_HEADER))
    except GeometryError as e:
        raise DisplacementError(str(e))
    for lineno, row in rows:
        sid, key_type = row[0], row[1]
        if key_type not in (KEYING_PARAMETER, KEYING_COORDINATE):
            raise DisplacementError("%s:%d: unknown key type '%s'"
                                    % (path, lineno, key_type))
        try:
            if key_type == KEYING_PARAMETER:
                key = float(row[2])
            else:
                key = (float(row[2]), float(row[3]))
            entry = DisplacementRow(key, float(row[4]), float(row[5]))
        except ValueError:
            raise DisplacementError("%s:%d: malformed row %s"
                                    % (path, lineno, row))
        keying, table = tables.setdefault(sid, (key_type, []))
        if keying != key_type:
            raise DisplacementError("%s: segment %s mixes key types"
                                    % (path, sid))
        table.append(entry)
    return [DisplacementField.from_rows(parse_segment_id(sid), table, keying)
            for sid, (keying, table) in tables.items()]


def write_csv(path, header, rows):
    """Writes a CSV file. Floats are formatted with ``FLOAT_FORMAT``. """
    with codecs.open(path, 'w', encoding='utf-8') as f:
        w = _writer(f)
        w.writerow(header)
        for row in rows:
            w.writerow([format_cell(v) for v in row])


def format_cell(value):
    if isinstance(value, (float, np.floating)):
        return utils.format_float(value)
    return value
