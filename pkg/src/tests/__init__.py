"""Tests package for tropnet

This package contains the test suite for the tropnet toolkit.
"""

__all__ = []
