"""Command line parser and run configuration.

A simulation is driven by one YAML document (see ``load_config``); the
command line selects the subcommand and overrides a few fields of the
document.
"""

import argparse
import logging
import os
import sys
import platform

import kinetics
import output
import pipelines
import utils
from displacement import KEYINGS
from solver import SolverConfig
from utils import ConfigError, KineticsError

YAML_AVAILABLE = True
try:
    import yaml
except ImportError:
    YAML_AVAILABLE = False


def str2bool(v):
    """For making the ``ArgumentParser`` understand boolean values"""
    return v.lower() in ("yes", "true", "t", "1")


def run_diagnostics():
    """Check availability of external libraries."""
    OKGREEN = '\033[92m'
    FAIL = '\033[91m'
    ENDC = '\033[0m'
    if sys.version_info > (3, 0):
        print("Checking Python3.... %sOK (%s)%s"
              % (OKGREEN, platform.python_version(), ENDC))
    else:
        print("Checking Python3.... %sNOT FOUND %s%s"
              % (FAIL, sys.version_info, ENDC))
        print("Please upgrade to Python 3!")
    if YAML_AVAILABLE:
        print("Checking PyYAML.... %sOK%s" % (OKGREEN, ENDC))
    else:
        print("Checking PyYAML.... %sNOT FOUND%s" % (FAIL, ENDC))
        print("PyYAML is not available. Configuration documents and "
              "geometry sidecars cannot be read.")
    for module, purpose in [('numpy', "all numerics"),
                            ('scipy', "FEM assembly and linear solves"),
                            ('triangle', "triangulation"),
                            ('shapely', "subdomain checks and labels")]:
        try:
            lib = __import__(module)
            print("Checking %s.... %sOK (%s)%s"
                  % (module, OKGREEN, getattr(lib, '__version__', '?'), ENDC))
        except ImportError:
            print("Checking %s.... %sNOT FOUND%s" % (module, FAIL, ENDC))
            print("%s is not available. It is needed for %s."
                  % (module, purpose))


def get_parser():
    """Get the parser object for the simulator command line.

    Returns:
        ArgumentParser. The pre-filled parser object
    """
    parser = argparse.ArgumentParser(
        prog='simulate.py',
        description="Reaction-diffusion on growing domains with subdomains")
    parser.register('type', 'bool', str2bool)

    ## General options
    group = parser.add_argument_group('General options')
    group.add_argument("--run_diagnostics", default=False,
                       action="store_true",
                       help="Run diagnostics and check availability of "
                       "external libraries.")
    group.add_argument("--verbosity", default="info",
                       choices=['debug', 'info', 'warn', 'error'],
                       help="Log level: debug,info,warn,error")
    subparsers = parser.add_subparsers(dest='command', metavar='command')

    ## simulate
    sub = subparsers.add_parser('simulate',
                                help="Run the stage pipeline of a config")
    group = sub.add_argument_group('Simulation options')
    group.add_argument("--config", required=True,
                       help="YAML run configuration")
    group.add_argument("--mode", default=None, choices=['model1', 'model2'],
                       help="Overrides the mode of the configuration:\n\n"
                       "* 'model1': one displacement field per curve\n"
                       "* 'model2': one displacement field per segment")
    group.add_argument("--out", default=None,
                       help="Overrides the output directory")
    group.add_argument("--seed", default=None, type=int,
                       help="Reserved. The pipeline is deterministic")
    group.add_argument("--strict-mesh", dest='strict_mesh', default=None,
                       action='store_true',
                       help="Fail on inverted elements instead of "
                       "recording them")

    ## segment
    sub = subparsers.add_parser('segment',
                                help="Write the segmented curves of a "
                                "geometry")
    group = sub.add_argument_group('Segmentation options')
    group.add_argument("--geometry", required=True,
                       help="Geometry CSV (with YAML sidecar)")
    group.add_argument("--out", required=True,
                       help="Path of the segmented curve CSV")
    group.add_argument("--tol", default=utils.EPS_INT, type=float,
                       help="Intersection tolerance")

    ## displace
    sub = subparsers.add_parser('displace',
                                help="Write the displacement table of a "
                                "stage pair")
    group = sub.add_argument_group('Displacement options')
    group.add_argument("--geometry_t", required=True,
                       help="Geometry CSV of stage t")
    group.add_argument("--geometry_t1", required=True,
                       help="Geometry CSV of stage t+1")
    group.add_argument("--out", required=True,
                       help="Path of the displacement CSV")
    group.add_argument("--mode", default='model2',
                       choices=['model1', 'model2'],
                       help="Whole curve (model1) or per segment (model2) "
                       "fields")
    group.add_argument("--n_points", default=utils.DEFAULT_N_POINTS,
                       type=int, help="Rows per field")
    group.add_argument("--keying", default='parameter',
                       choices=['parameter', 'coordinate'],
                       help="Key rows by boundary parameter or by stage-t "
                       "coordinates")
    group.add_argument("--tol", default=utils.EPS_INT, type=float,
                       help="Intersection tolerance")
    group.add_argument("--start_pairs", default="",
                       help="Start points of closed curves as "
                       "'id:x_t:y_t:x_t1:y_t1,...'")

    ## mesh-report
    sub = subparsers.add_parser('mesh-report',
                                help="Triangulate a geometry and write its "
                                "quality")
    group = sub.add_argument_group('Mesh options')
    group.add_argument("--geometry", required=True,
                       help="Geometry CSV (with YAML sidecar)")
    group.add_argument("--out", required=True,
                       help="Output directory for quality.csv")
    group.add_argument("--target_edge_length", default=None, type=float,
                       help="Target edge length. Defaults to the bounding "
                       "box diagonal / %g" % utils.EDGE_LENGTH_DIVISOR)
    group.add_argument("--tol", default=utils.EPS_INT, type=float,
                       help="Intersection tolerance")
    group.add_argument("--vtk", default=False, type=str2bool,
                       help="Also write the mesh as legacy VTK")

    ## fixture
    sub = subparsers.add_parser('fixture',
                                help="Write the synthetic stage pair")
    group = sub.add_argument_group('Fixture options')
    group.add_argument("--out", required=True, help="Output directory")
    group.add_argument("--kind", default='figure1', choices=['figure1'],
                       help="Fixture kind")
    group.add_argument("--scale", default=1.0, type=float,
                       help="Deformation scale in (0, 2]")
    return parser


def validate_args(args):
    """Some rudimentary sanity checks for command line options. Prints
    warnings and raises ``AttributeError`` if a check fails.

    Args:
        args (object): Parsed command line
    """
    sanity_check_failed = False
    if getattr(args, 'seed', None) is not None:
        logging.warning("--seed is ignored; the pipeline is deterministic.")
    tol = getattr(args, 'tol', None)
    if tol is not None and not tol > 0.:
        logging.warning("--tol must be positive, got %g" % tol)
        sanity_check_failed = True
    n_points = getattr(args, 'n_points', None)
    if n_points is not None and n_points < 2:
        logging.warning("--n_points must be at least 2, got %d" % n_points)
        sanity_check_failed = True
    scale = getattr(args, 'scale', None)
    if scale is not None and not 0. < scale <= 2.:
        logging.warning("--scale must lie in (0, 2], got %g" % scale)
        sanity_check_failed = True
    h = getattr(args, 'target_edge_length', None)
    if h is not None and not h > 0.:
        logging.warning("--target_edge_length must be positive, got %g" % h)
        sanity_check_failed = True
    if sanity_check_failed:
        raise AttributeError("Sanity check failed (see warnings).")


def parse_start_pairs(param):
    """Parses 'id:x_t:y_t:x_t1:y_t1,...' into a start pair mapping. """
    pairs = {}
    for entry in utils.split_comma(param):
        parts = entry.split(':')
        if len(parts) != 5:
            raise AttributeError("Malformed start pair '%s'" % entry)
        x0, y0, x1, y1 = [float(p) for p in parts[1:]]
        pairs[parts[0]] = ((x0, y0), (x1, y1))
    return pairs


# Run configuration


class OutputConfig(object):
    """Output section of the run configuration. """

    def __init__(self, dir='out', snapshot_every=10, formats=None,
                 vtk_every=0):
        self.dir = dir
        self.snapshot_every = snapshot_every
        self.formats = list(DEFAULT_FORMATS if formats is None else formats)
        self.vtk_every = vtk_every


DEFAULT_FORMATS = ['areas', 'quality', 'fields', 'production', 'junctions']
"""Output handlers used when the configuration names none. """


SCHEMA = {
    'mode': None,
    'network': None,
    'geometry': ['stage_t', 'stage_t1', 'stages', 'tol',
                 'n_points_per_segment', 'keying', 'target_edge_length',
                 'start_pairs'],
    'solver': ['dt', 't_end', 'picard_tol', 'picard_max_iters',
               'linear_solver_tol', 'strict_mesh'],
    'params': None,
    'output': ['dir', 'snapshot_every', 'formats', 'vtk_every'],
}
"""Sections and keys of the configuration document. ``params`` keys
depend on the network.
"""


class RunConfig(object):
    """Validated run configuration.

    Attributes:
        path (string): Path of the configuration document
        mode (string): Pipeline name, ``model1`` or ``model2``
        network (string): Reaction network name
        stages (list): Geometry CSV paths, one per stage
        tol (float): Intersection tolerance
        n_points_per_segment (int): Rows per displacement field
        keying (string): Displacement keying
        target_edge_length (float): Mesh size or None
        start_pairs (dict): Closed curve id -> ((x, y), (x, y))
        solver (SolverConfig): Time stepping settings
        params (dict): Network parameter overrides
        output (OutputConfig): Output settings
    """

    def __init__(self, path, mode, network, stages, tol, n_points_per_segment,
                 keying, target_edge_length, start_pairs, solver, params,
                 output):
        self.path = path
        self.mode = mode
        self.network = network
        self.stages = stages
        self.tol = tol
        self.n_points_per_segment = n_points_per_segment
        self.keying = keying
        self.target_edge_length = target_edge_length
        self.start_pairs = start_pairs
        self.solver = solver
        self.params = params
        self.output = output

    @property
    def geometry_t(self):
        return self.stages[0]

    @property
    def geometry_t1(self):
        return self.stages[1]

    @property
    def output_dir(self):
        return self.output.dir

    @property
    def snapshot_every(self):
        return self.output.snapshot_every


def _section(doc, name):
    value = doc.get(name)
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError("must be a mapping", path=name)
    return value


def _number(section, key, path, default, kind=float):
    value = section.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool):
        raise ConfigError("must be a number, got %r" % value, path=path)
    try:
        result = kind(value)
    except (TypeError, ValueError):
        raise ConfigError("must be a number, got %r" % value, path=path)
    if kind is int and result != value:
        raise ConfigError("must be an integer, got %r" % value, path=path)
    return result


def _resolve(base, path, field):
    if not isinstance(path, str) or not path:
        raise ConfigError("must be a file path", path=field)
    full = path if os.path.isabs(path) else os.path.join(base, path)
    if not os.path.isfile(full):
        raise ConfigError("file '%s' not found" % full, path=field)
    return full


def load_config(path, mode=None, out=None, strict_mesh=None):
    """Loads and validates a YAML run configuration. Relative paths are
    resolved against the directory of the document. Absent parameters
    take the network defaults.

    Args:
        path (string): Path of the YAML document
        mode (string): Overrides ``mode`` if not None
        out (string): Overrides ``output.dir`` if not None
        strict_mesh (bool): Overrides ``solver.strict_mesh`` if not None

    Returns:
        RunConfig. The validated configuration

    Raises:
        ConfigError. On unknown keys (all of them are listed) or invalid
        values (the message names the field path)
        IOError. If the document cannot be read
    """
    if not YAML_AVAILABLE:
        raise ConfigError("PyYAML is required to read configuration files")
    with open(path) as f:
        try:
            doc = yaml.load(f, Loader=yaml.FullLoader)
        except yaml.YAMLError as e:
            raise ConfigError("malformed YAML: %s" % e)
    doc = doc or {}
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a mapping")
    base = os.path.dirname(os.path.abspath(path))

    network_name = doc.get('network', 'limb_bud')
    if network_name not in kinetics.NETWORK_REGISTRY:
        raise ConfigError("unknown network '%s', use one of %s"
                          % (network_name,
                             ", ".join(sorted(kinetics.NETWORK_REGISTRY))),
                          path="network")
    network_cls = kinetics.NETWORK_REGISTRY[network_name]
    unknown = []
    for key, value in doc.items():
        if key not in SCHEMA:
            unknown.append(str(key))
            continue
        allowed = network_cls.PARAMETERS if key == 'params' else SCHEMA[key]
        if allowed is not None and isinstance(value, dict):
            unknown.extend("%s.%s" % (key, k) for k in value
                           if k not in allowed)
    if unknown:
        raise ConfigError("unknown keys: %s" % ", ".join(unknown),
                          unknown=unknown)

    mode = mode or doc.get('mode', 'model2')
    if mode not in pipelines.PIPELINE_REGISTRY:
        raise ConfigError("unknown mode '%s', use one of %s"
                          % (mode, ", ".join(sorted(
                              pipelines.PIPELINE_REGISTRY))), path="mode")

    geo = _section(doc, 'geometry')
    if 'stages' in geo:
        if 'stage_t' in geo or 'stage_t1' in geo:
            raise ConfigError("give either stages or stage_t/stage_t1",
                              path="geometry.stages")
        if not isinstance(geo['stages'], list) or len(geo['stages']) < 2:
            raise ConfigError("must list at least two geometry files",
                              path="geometry.stages")
        stages = [_resolve(base, p, "geometry.stages[%d]" % i)
                  for i, p in enumerate(geo['stages'])]
    else:
        stages = [_resolve(base, geo.get(k), "geometry." + k)
                  for k in ('stage_t', 'stage_t1')]
    tol = _number(geo, 'tol', "geometry.tol", utils.EPS_INT)
    if not tol > 0.:
        raise ConfigError("must be positive", path="geometry.tol")
    n_points = _number(geo, 'n_points_per_segment',
                       "geometry.n_points_per_segment",
                       utils.DEFAULT_N_POINTS, int)
    if n_points < 2:
        raise ConfigError("must be at least 2",
                          path="geometry.n_points_per_segment")
    keying = geo.get('keying', 'parameter')
    if keying not in KEYINGS:
        raise ConfigError("must be one of %s" % ", ".join(KEYINGS),
                          path="geometry.keying")
    h = _number(geo, 'target_edge_length', "geometry.target_edge_length",
                None)
    if h is not None and not h > 0.:
        raise ConfigError("must be positive",
                          path="geometry.target_edge_length")
    start_pairs = {}
    for cid, pair in (geo.get('start_pairs') or {}).items():
        field = "geometry.start_pairs.%s" % cid
        try:
            (x0, y0), (x1, y1) = pair
            start_pairs[str(cid)] = ((float(x0), float(y0)),
                                     (float(x1), float(y1)))
        except (TypeError, ValueError):
            raise ConfigError("must be [[x_t, y_t], [x_t1, y_t1]]",
                              path=field)

    sol = _section(doc, 'solver')
    solver_args = {}
    for key in SCHEMA['solver']:
        if key not in sol:
            continue
        if key == 'strict_mesh':
            if not isinstance(sol[key], bool):
                raise ConfigError("must be true or false",
                                  path="solver.strict_mesh")
            solver_args[key] = sol[key]
        else:
            kind = int if key == 'picard_max_iters' else float
            solver_args[key] = _number(sol, key, "solver." + key, None, kind)
    if strict_mesh is not None:
        solver_args['strict_mesh'] = strict_mesh
    solver_config = SolverConfig(**solver_args)

    params = dict(_section(doc, 'params'))
    for key in params:
        _number(params, key, "params." + key, None)
    try:
        network_cls(params)
    except KineticsError as e:
        raise ConfigError(str(e), path="params")

    out_sec = _section(doc, 'output')
    out_dir = out if out is not None else out_sec.get('dir', 'out')
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("must be a directory path", path="output.dir")
    if out is None and not os.path.isabs(out_dir):
        out_dir = os.path.join(base, out_dir)
    snapshot_every = _number(out_sec, 'snapshot_every',
                             "output.snapshot_every", 10, int)
    if snapshot_every < 1:
        raise ConfigError("must be at least 1", path="output.snapshot_every")
    vtk_every = _number(out_sec, 'vtk_every', "output.vtk_every", 0, int)
    if vtk_every < 0:
        raise ConfigError("must not be negative", path="output.vtk_every")
    formats = out_sec.get('formats', DEFAULT_FORMATS)
    if not isinstance(formats, list):
        raise ConfigError("must be a list", path="output.formats")
    bad = [f for f in formats if f not in output.OUTPUT_REGISTRY]
    if bad:
        raise ConfigError("unknown formats %s, use %s"
                          % (", ".join(map(str, bad)),
                             ", ".join(sorted(output.OUTPUT_REGISTRY))),
                          path="output.formats")
    if vtk_every > 0 and 'vtk' not in formats:
        formats = formats + ['vtk']

    return RunConfig(path, mode, network_name, stages, tol, n_points, keying,
                     h, start_pairs, solver_config, params,
                     OutputConfig(out_dir, snapshot_every, formats,
                                  vtk_every))
