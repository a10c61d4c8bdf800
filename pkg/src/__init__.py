"""Explanation sanity benchmark for binary-feature classifiers."""

__version__ = "1.0.0"
__author__ = "xbench contributors"
