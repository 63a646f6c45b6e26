"""Numerical verification of slow-down/blow-up surgery on product flows."""

__version__ = "0.1.0"

from . import blowup, cones, config, forms, homogeneous, saddle  # noqa: F401
