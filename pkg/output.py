"""Output handlers observe a stage pipeline and write its diagnostics to
plain text files in the output directory. Each handler is registered in
``OUTPUT_REGISTRY`` under its ``name``.
"""

from abc import abstractmethod
import codecs
import csv
import errno
import inspect
import logging
import os
import sys

import io_utils
import solver
import utils
from utils import Observer, MESSAGE_TYPE_STAGE_START, MESSAGE_TYPE_STEP, \
    MESSAGE_TYPE_STAGE_END


def _mkdir(path, name):
    try:
        os.makedirs(path)
    except OSError as exception:
        if exception.errno != errno.EEXIST:
            raise
        else:
            logging.warning("Output %s directory '%s' already exists."
                            % (name, path))


class OutputHandler(Observer):
    """Interface for output handlers. Handlers are observers of a
    ``StagePipeline`` and dispatch on the message type.
    """

    def __init__(self, path, args):
        """Creates a handler writing below the directory ``path``.

        Args:
            path (string): Output directory
            args (OutputConfig): Output settings
        """
        super(OutputHandler, self).__init__()
        self.path = path
        self.args = args

    def notify(self, message, message_type=utils.MESSAGE_TYPE_DEFAULT):
        if message_type == MESSAGE_TYPE_STAGE_START:
            self.stage_start(message)
        elif message_type == MESSAGE_TYPE_STEP:
            self.step(message)
        elif message_type == MESSAGE_TYPE_STAGE_END:
            self.stage_end(message)

    def stage_start(self, start):
        pass

    @abstractmethod
    def step(self, record):
        """Called after every time step with a ``StepRecord``.

        Raises:
            IOError. If something goes wrong while writing to the disk
        """
        raise NotImplementedError

    def stage_end(self, result):
        pass

    def close_file(self):
        pass

    @property
    def files(self):
        """Paths of the files this handler writes. """
        return []


class CsvOutputHandler(OutputHandler):
    """Writes one CSV row per time step to ``file_name``. The file is
    opened with the header on the first step.
    """

    file_name = None

    def __init__(self, path, args):
        super(CsvOutputHandler, self).__init__(path, args)
        self.f = None
        self.writer = None

    @property
    def files(self):
        return [os.path.join(self.path, self.file_name)]

    def open_file(self, header):
        if not os.path.isdir(self.path):
            _mkdir(self.path, self.name)
        self.f = codecs.open(self.files[0], "w", encoding='utf-8')
        self.writer = csv.writer(self.f, lineterminator='\n')
        self.writer.writerow(header)

    def write_row(self, row):
        self.writer.writerow([io_utils.format_cell(v) for v in row])
        self.f.flush()

    def close_file(self):
        if self.f is not None:
            self.f.close()
            self.f = None


class AreasOutputHandler(CsvOutputHandler):
    """Labeled subdomain areas per step in ``areas.csv`` and the
    shoelace target areas at the start and end of every stage in
    ``area_targets.csv``.
    """

    name = 'areas'
    file_name = 'areas.csv'
    targets_name = 'area_targets.csv'

    def __init__(self, path, args):
        super(AreasOutputHandler, self).__init__(path, args)
        self.targets = []

    @property
    def files(self):
        return [os.path.join(self.path, self.file_name),
                os.path.join(self.path, self.targets_name)]

    def stage_start(self, start):
        self.targets.append((start.stage, start.time_start,
                             start.target_areas_t))
        self.targets.append((start.stage, start.time_end,
                             start.target_areas_t1))

    def step(self, record):
        if self.f is None:
            self.open_file(['step', 'time'] + ['area_%s' % sid
                                               for sid in record.areas])
        self.write_row([record.step, record.time]
                       + list(record.areas.values()))

    def close_file(self):
        super(AreasOutputHandler, self).close_file()
        if not self.targets:
            return
        keys = list(self.targets[0][2])
        io_utils.write_csv(self.files[1],
                           ['stage', 'time'] + ['area_%s' % k for k in keys],
                           [[stage, time] + [areas[k] for k in keys]
                            for stage, time, areas in self.targets])


class QualityOutputHandler(CsvOutputHandler):
    """Minimum element quality and inverted element count per step. """

    name = 'quality'
    file_name = 'quality.csv'

    def step(self, record):
        if self.f is None:
            self.open_file(['step', 'min_quality', 'inverted_count'])
        self.write_row([record.step, record.quality.min_quality,
                        record.quality.inverted_count])


class ProductionOutputHandler(CsvOutputHandler):
    """Domain integrated effective production per step. """

    name = 'production'
    file_name = 'production.csv'

    def step(self, record):
        species = record.network.species
        if self.f is None:
            self.open_file(['step', 'time'] + ['P_%s' % s for s in species])
        self.write_row([record.step, record.time]
                       + [record.production[s] for s in species])


class SnapshotOutputHandler(OutputHandler):
    """Base class of handlers which write one file every ``every``
    steps, plus the first and last step of every stage.
    """

    every_attr = 'snapshot_every'

    def __init__(self, path, args):
        super(SnapshotOutputHandler, self).__init__(path, args)
        self.written = []
        self.last = None

    @property
    def every(self):
        return getattr(self.args, self.every_attr)

    @property
    def files(self):
        return list(self.written)

    def step(self, record):
        self.last = record
        if record.step == 0 or (self.every > 0
                                and record.step % self.every == 0):
            self._snapshot(record)

    def stage_end(self, result):
        if self.last is not None and not self._done(self.last.step):
            self._snapshot(self.last)

    def _done(self, step):
        return any(p == self.file_path(step) for p in self.written)

    def _snapshot(self, record):
        if not os.path.isdir(self.path):
            _mkdir(self.path, self.name)
        path = self.file_path(record.step)
        self.write_snapshot(path, record)
        self.written.append(path)
        logging.info("Step %d (t=%.4g): wrote %s"
                     % (record.step, record.time, path))

    @abstractmethod
    def file_path(self, step):
        raise NotImplementedError

    @abstractmethod
    def write_snapshot(self, path, record):
        raise NotImplementedError


class FieldsOutputHandler(SnapshotOutputHandler):
    """Nodal concentrations and effective production in
    ``fields_NNNN.csv``.
    """

    name = 'fields'

    def file_path(self, step):
        return os.path.join(self.path, "fields_%04d.csv" % step)

    def write_snapshot(self, path, record):
        state, network = record.state, record.network
        prod = solver.nodal_production(network, state.mesh,
                                       state.concentrations)
        species = network.species
        columns = [state.mesh.nodes[:, 0], state.mesh.nodes[:, 1]] \
            + [state.concentrations[s] for s in species] \
            + [prod[s] for s in species]
        rows = [[i] + [float(c[i]) for c in columns]
                for i in range(state.mesh.n_nodes)]
        io_utils.write_csv(path, ['node', 'x', 'y'] + species
                           + ['P_%s' % s for s in species], rows)


class VtkOutputHandler(SnapshotOutputHandler):
    """Legacy VTK unstructured grid snapshots with the subdomain label
    and element quality as cell data and the species and production
    fields as point data.
    """

    name = 'vtk'
    every_attr = 'vtk_every'

    def file_path(self, step):
        return os.path.join(self.path, "mesh_%04d.vtk" % step)

    def write_snapshot(self, path, record):
        state, network = record.state, record.network
        prod = solver.nodal_production(network, state.mesh,
                                       state.concentrations)
        fields = [(s, state.concentrations[s]) for s in network.species] \
            + [("P_%s" % s, prod[s]) for s in network.species]
        write_mesh_vtk(path, state.mesh, record.quality, fields,
                       "stage %d step %d time %s"
                       % (record.stage, record.step,
                          utils.FLOAT_FORMAT % record.time))


def write_mesh_vtk(path, mesh, quality, fields=None, title="mesh"):
    """Writes a mesh as legacy ASCII VTK unstructured grid.

    Args:
        path (string): Output file
        mesh (Mesh): Mesh to write
        quality (QualityReport): Element qualities, written as cell data
        fields (list): (name, nodal vector) pairs written as point data
        title (string): Single line header
    """
    fmt = utils.FLOAT_FORMAT
    with codecs.open(path, "w", encoding='utf-8') as f:
        f.write("# vtk DataFile Version 2.0\n%s\n" % title)
        f.write("ASCII\nDATASET UNSTRUCTURED_GRID\n")
        f.write("POINTS %d double\n" % mesh.n_nodes)
        for x, y in mesh.nodes:
            f.write("%s %s 0\n" % (fmt % x, fmt % y))
        f.write("CELLS %d %d\n" % (mesh.n_elements, 4 * mesh.n_elements))
        for a, b, c in mesh.triangles:
            f.write("3 %d %d %d\n" % (a, b, c))
        f.write("CELL_TYPES %d\n" % mesh.n_elements)
        f.write("5\n" * mesh.n_elements)
        f.write("CELL_DATA %d\n" % mesh.n_elements)
        f.write("SCALARS subdomain int 1\nLOOKUP_TABLE default\n")
        f.write("".join("%d\n" % c for c in mesh.label_codes))
        f.write("SCALARS quality double 1\nLOOKUP_TABLE default\n")
        f.write("".join("%s\n" % (fmt % q)
                        for q in quality.per_element_quality))
        if fields:
            f.write("POINT_DATA %d\n" % mesh.n_nodes)
            for name, values in fields:
                f.write("SCALARS %s double 1\nLOOKUP_TABLE default\n" % name)
                f.write("".join("%s\n" % (fmt % v) for v in values))


class JunctionsOutputHandler(OutputHandler):
    """Final position of every junction node against its stage-(t+1)
    target in ``junctions.csv``.
    """

    name = 'junctions'
    file_name = 'junctions.csv'

    def __init__(self, path, args):
        super(JunctionsOutputHandler, self).__init__(path, args)
        self.rows = []

    @property
    def files(self):
        return [os.path.join(self.path, self.file_name)]

    def step(self, record):
        pass

    def stage_end(self, result):
        nodes = result.final_mesh.nodes
        for key, node in result.reference_mesh.junction_nodes.items():
            target = result.junction_targets[key]
            self.rows.append([result.stage, "%s:%d" % key,
                              float(nodes[node, 0]), float(nodes[node, 1]),
                              float(target[0]), float(target[1]),
                              result.junction_errors[key]])

    def close_file(self):
        if not os.path.isdir(self.path):
            _mkdir(self.path, self.name)
        io_utils.write_csv(self.files[0],
                           ['stage', 'junction', 'x', 'y', 'target_x',
                            'target_y', 'error'], self.rows)


OUTPUT_REGISTRY = {}

clsmembers = inspect.getmembers(sys.modules[__name__], inspect.isclass)
for name, _cls in clsmembers:
    if issubclass(_cls, OutputHandler) and hasattr(_cls, 'name'):
        OUTPUT_REGISTRY[_cls.name] = _cls
