"""Unit test package for lconsistency."""
