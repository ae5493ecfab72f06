"""Scalar-flat toric Kahler metrics on unbounded moment polygons.

The pipeline: validate a :class:`MomentPolygon`, pick a nut vector, build a
:class:`Chart` (action coordinates from axisymmetric harmonic functions),
then evaluate the symplectic potential and metric and run the checks in
:mod:`sfk.analysis`.
"""

from .chart import Chart, action_coords, boundary_image, invert, invert_many, make_chart, solve_a
from .errors import SFKError
from .harmonic import HalfPlanePoint, NutParameter, XiJet, build_xi
from .polygon import MomentPolygon, PolygonClass, classify, normalize_sl2z, validate
from .potential import MetricSample, hessian, metric_sample, potential_value

__all__ = [
    "Chart", "HalfPlanePoint", "MetricSample", "MomentPolygon", "NutParameter",
    "PolygonClass", "SFKError", "XiJet", "action_coords", "boundary_image", "build_xi",
    "classify", "hessian", "invert", "invert_many", "make_chart", "metric_sample",
    "normalize_sl2z", "potential_value", "solve_a", "validate",
]

__version__ = "0.1.0"
