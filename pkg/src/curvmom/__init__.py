"""Canonical and geometric momentum operators on curvilinear charts.

Charts are written in a small definition language (:mod:`curvmom.chart_dsl`),
differentiated exactly with second-order forward-mode AD
(:mod:`curvmom.autodiff`), analysed slice by slice (:mod:`curvmom.geometry`),
discretized (:mod:`curvmom.operators`) and checked (:mod:`curvmom.verify`).
"""

from curvmom.autodiff import EmbeddingJet, Jet2, chart_point
from curvmom.catalog import get_chart, list_charts
from curvmom.chart_dsl import ChartDef, parse, parse_chart, pretty, tokenize
from curvmom.errors import (
    ChartError,
    ChartSemanticError,
    CurvmomError,
    DomainError,
    GridError,
    LexError,
    NotOrthogonalSlice,
    ParseError,
    SingularChartPoint,
)
from curvmom.geometry import metric, slice_geometry, validate_gaussian_normal
from curvmom.operators import (
    WaveField,
    canonical_momentum,
    geometric_momentum,
    inner_product,
    make_grid,
    partial_derivative,
)

__version__ = "0.1.0"

__all__ = [
    "ChartDef", "ChartError", "ChartSemanticError", "CurvmomError", "DomainError",
    "EmbeddingJet", "GridError", "Jet2", "LexError", "NotOrthogonalSlice", "ParseError",
    "SingularChartPoint", "WaveField", "canonical_momentum", "chart_point",
    "geometric_momentum", "get_chart", "inner_product", "list_charts", "make_grid",
    "metric", "parse", "parse_chart", "partial_derivative", "pretty", "slice_geometry",
    "tokenize", "validate_gaussian_normal",
]
