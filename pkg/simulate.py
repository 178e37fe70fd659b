"""Command line entry point. See ``ui.get_parser`` for the subcommands
or run ``python simulate.py --help``.
"""

import sys

import sim_utils


if __name__ == '__main__':
    sys.exit(sim_utils.cli_main(sys.argv[1:]))
