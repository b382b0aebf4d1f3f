"""Top-level package for lconsistency."""

__author__ = """lconsistency developers"""
__email__ = 'lconsistency@users.noreply.github.com'
__version__ = '0.1.0'
