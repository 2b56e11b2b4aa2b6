"""Numerical laboratory for minimal surfaces and Einstein four-manifold model geometries."""

__version__ = "0.1.0"
