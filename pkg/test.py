"""Runs the test suite. Extra arguments are passed on to pytest, e.g.
``python test.py -k solver``.
"""
import sys

import pytest

if __name__ == '__main__':
    sys.exit(pytest.main(['test'] + sys.argv[1:]))
