"""Tests for the growing domain simulator. Shared shapes used by several
test modules live in ``test.shapes``.
"""
