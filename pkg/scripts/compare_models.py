"""This script runs the whole-curve (model1) and the per-segment
(model2) displacement pipelines on the same stage pair and writes a
side-by-side comparison of mesh quality, subdomain areas and junction
tracking. Without --geometry_t/--geometry_t1 the synthetic figure1
fixture is used.

Usage: python scripts/compare_models.py --out cmp [--scale 1.5]
"""

import argparse
import logging
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import fixtures
import io_utils
import kinetics
import output
import pipelines
from solver import SolverConfig
from ui import OutputConfig

MODES = ['model1', 'model2']

parser = argparse.ArgumentParser(description='Compare the whole-curve and '
                                 'the per-segment displacement pipelines.')
parser.add_argument('-o', '--out', required=True,
                    help='Output directory, one subdirectory per mode')
parser.add_argument('--geometry_t', default=None,
                    help='Geometry CSV of stage t (default: fixture)')
parser.add_argument('--geometry_t1', default=None,
                    help='Geometry CSV of stage t+1 (default: fixture)')
parser.add_argument('-s', '--scale', default=1.0, type=float,
                    help='Deformation scale of the fixture')
parser.add_argument('--network', default='limb_bud',
                    choices=sorted(kinetics.NETWORK_REGISTRY),
                    help='Reaction network')
parser.add_argument('--dt', default=0.01, type=float, help='Time step')
parser.add_argument('--t_end', default=1.0, type=float, help='Stage length')
parser.add_argument('--n_points', default=100, type=int,
                    help='Rows per displacement field')
parser.add_argument('--h', default=None, type=float,
                    help='Target mesh edge length')

args = parser.parse_args()
logging.basicConfig(format='%(asctime)s %(levelname)s: %(message)s',
                    level=logging.INFO)

if args.geometry_t and args.geometry_t1:
    geo_t = io_utils.read_geometry(args.geometry_t)
    geo_t1 = io_utils.read_geometry(args.geometry_t1)
else:
    geo_t, geo_t1 = fixtures.generate_fixture('figure1', args.scale)

config = SolverConfig(dt=args.dt, t_end=args.t_end)
rows = []
for mode in MODES:
    out_dir = os.path.join(args.out, mode)
    out_config = OutputConfig(out_dir, snapshot_every=max(config.n_steps, 1),
                              formats=['areas', 'quality', 'production',
                                       'junctions'])
    handlers = [output.OUTPUT_REGISTRY[name](out_dir, out_config)
                for name in out_config.formats]
    network = kinetics.NETWORK_REGISTRY[args.network]()
    try:
        result = pipelines.run_stage(geo_t, geo_t1, network, config, mode,
                                     handlers, n_points=args.n_points,
                                     target_edge_length=args.h)
    finally:
        for handler in handlers:
            handler.close_file()
    errors = result.area_errors()
    production = result.records[-1].production
    rows.append([mode, result.min_quality, len(result.inverted_steps),
                 result.inverted_steps[0] if result.inverted_steps else -1,
                 result.max_junction_error, result.max_area_error,
                 errors['total']]
                + [production[s] for s in network.species])

io_utils.write_csv(os.path.join(args.out, 'comparison.csv'),
                   ['mode', 'min_quality', 'inverted_steps',
                    'first_inverted_step', 'max_junction_error',
                    'max_area_error', 'total_area_error']
                   + ['P_%s' % s for s in network.species], rows)
for row in rows:
    print("%s: min quality %.4g, %d inverted steps, junction error %.3g, "
          "area error %.3g" % (row[0], row[1], row[2], row[4], row[5]))
