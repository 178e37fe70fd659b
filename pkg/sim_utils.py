"""This module is the bridge between the command line configuration and
the simulator modules. It contains the factory functions which create
networks, pipelines and output handlers from a ``RunConfig``, the
runners of the subcommands and ``cli_main``.
"""

import logging
import os
import sys
import traceback

import fixtures
import geometry
import io_utils
import kinetics
import mesh
import output
import pipelines
import ui
from displacement import uniform_displacement_field
from utils import SimulationError


args = None
"""This variable is set to the global command line arguments by
``base_init``.
"""


def base_init(new_args):
    """Sets up logging and runs the sanity checks of the command line.
    This function should be called before any other function in this
    module.

    Args:
        new_args: Parsed command line

    Raises:
        AttributeError. If a sanity check fails
    """
    global args
    args = new_args
    logging.basicConfig(format='%(asctime)s %(levelname)s: %(message)s')
    logging.getLogger().setLevel(logging.INFO)
    if args.verbosity == 'debug':
        logging.getLogger().setLevel(logging.DEBUG)
    elif args.verbosity == 'info':
        logging.getLogger().setLevel(logging.INFO)
    elif args.verbosity == 'warn':
        logging.getLogger().setLevel(logging.WARN)
    elif args.verbosity == 'error':
        logging.getLogger().setLevel(logging.ERROR)
    ui.validate_args(args)


def create_network(config):
    """Creates the reaction network named in the run configuration. """
    network = kinetics.NETWORK_REGISTRY[config.network](config.params)
    logging.info("Network %s" % network.describe())
    return network


def create_output_handlers(config):
    """Creates the output handlers listed in ``output.formats``.

    Returns:
        list. Output handlers writing to ``config.output_dir``
    """
    handlers = []
    for name in config.output.formats:
        try:
            handlers.append(output.OUTPUT_REGISTRY[name](config.output_dir,
                                                         config.output))
        except KeyError:
            logging.fatal("Output format %s not available. Please double-"
                          "check output.formats." % name)
    return handlers


def pipeline_kwargs(config):
    """Pipeline constructor arguments of a run configuration. """
    return {'n_points': config.n_points_per_segment,
            'keying': config.keying,
            'target_edge_length': config.target_edge_length,
            'start_pairs': config.start_pairs,
            'tol': config.tol}


def load_stages(config):
    """Reads the stage geometries of a run configuration. """
    return [io_utils.read_geometry(path) for path in config.stages]


def run_simulate(args):
    """Runs the stage pipeline described by ``args.config``. """
    config = ui.load_config(args.config, mode=args.mode, out=args.out,
                            strict_mesh=args.strict_mesh)
    stages = load_stages(config)
    network = create_network(config)
    if not os.path.isdir(config.output_dir):
        os.makedirs(config.output_dir)
    handlers = create_output_handlers(config)
    logging.info("Running %s on %d stages, output in %s"
                 % (config.mode, len(stages), config.output_dir))
    try:
        results = pipelines.run_sequence(
            stages, network, config.solver, config.mode, handlers,
            **pipeline_kwargs(config))
    finally:
        for handler in handlers:
            handler.close_file()
    for result in results:
        logging.info("Stage %d: max area error %.3g, max junction error "
                     "%.3g, inverted steps %d"
                     % (result.stage, result.max_area_error,
                        result.max_junction_error,
                        len(result.inverted_steps)))
    return results


def run_segment(args):
    """Writes the segmented curves of one geometry. """
    geo = io_utils.read_geometry(args.geometry)
    seg = geometry.segment_at_intersections(geo, args.tol)
    io_utils.write_segments(seg, args.out)
    logging.info("Wrote %d segments, %d junctions to %s"
                 % (len(seg.all_segments()), len(seg.junctions()), args.out))
    return seg


def run_displace(args):
    """Writes the displacement table between two stages. """
    geo_t = io_utils.read_geometry(args.geometry_t)
    geo_t1 = io_utils.read_geometry(args.geometry_t1)
    pairs = ui.parse_start_pairs(args.start_pairs)
    seg_t = geometry.segment_at_intersections(geo_t, args.tol)
    seg_t1 = geometry.segment_at_intersections(geo_t1, args.tol)
    geometry.check_topology(seg_t, seg_t1)
    fields = []
    if args.mode == 'model1':
        pieces = [(seg_t.curve(cid), seg_t1.curve(cid))
                  for cid in seg_t.curve_ids]
    else:
        pieces = [(seg, seg_t1.segment(seg.parent_id, seg.segment_index))
                  for seg in seg_t.all_segments()]
    for gamma_t, gamma_t1 in pieces:
        pid = getattr(gamma_t, 'parent_id', gamma_t.id)
        fields.append(uniform_displacement_field(
            gamma_t, gamma_t1, args.n_points, args.keying, pairs.get(pid)))
    io_utils.write_displacement(fields, args.out)
    logging.info("Wrote %d displacement fields to %s"
                 % (len(fields), args.out))
    return fields


def run_mesh_report(args):
    """Triangulates a geometry and writes its quality. """
    geo = io_utils.read_geometry(args.geometry)
    seg = geometry.segment_at_intersections(geo, args.tol)
    m = mesh.triangulate(seg, args.target_edge_length)
    report = mesh.quality_report(m)
    if not os.path.isdir(args.out):
        os.makedirs(args.out)
    io_utils.write_csv(os.path.join(args.out, 'quality.csv'),
                       ['step', 'min_quality', 'inverted_count'],
                       [[0, report.min_quality, report.inverted_count]])
    areas = m.labeled_areas()
    io_utils.write_csv(os.path.join(args.out, 'areas.csv'),
                       ['step', 'time'] + ['area_%s' % k for k in areas],
                       [[0, 0.] + list(areas.values())])
    logging.info("Mesh: %d nodes, %d elements, min quality %.4g"
                 % (m.n_nodes, m.n_elements, report.min_quality))
    if args.vtk:
        output.write_mesh_vtk(os.path.join(args.out, 'mesh.vtk'), m,
                              report)
    return report


def run_fixture(args):
    """Writes the synthetic stage pair and its configuration. """
    return fixtures.write_fixture(args.out, args.kind, args.scale)


RUNNERS = {
    'simulate': run_simulate,
    'segment': run_segment,
    'displace': run_displace,
    'mesh-report': run_mesh_report,
    'fixture': run_fixture,
}


def cli_main(argv=None):
    """Entry point of the command line.

    Args:
        argv (list): Arguments without the program name. Defaults to
                     ``sys.argv[1:]``

    Returns:
        int. 0 on success, 1 on runtime failures, 2 on usage errors
    """
    parser = ui.get_parser()
    try:
        parsed = parser.parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        base_init(parsed)
    except AttributeError as e:
        sys.stderr.write("%s\n" % e)
        return 2
    if parsed.run_diagnostics:
        ui.run_diagnostics()
        return 0
    if not parsed.command:
        parser.print_usage(sys.stderr)
        return 2
    try:
        RUNNERS[parsed.command](parsed)
    except (SimulationError, IOError, OSError) as e:
        logging.debug(traceback.format_exc())
        logging.error("%s failed: %s" % (parsed.command, e))
        return 1
    except Exception as e:
        logging.debug(traceback.format_exc())
        logging.error("%s failed with unexpected %s: %s"
                      % (parsed.command, e.__class__.__name__, e))
        return 1
    return 0
