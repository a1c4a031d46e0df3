"""Built-in charts, written in the chart language and parsed on first use."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from curvmom.chart_dsl import ChartDef, parse_chart

SOURCES: dict[str, str] = {
    "polar2d": """
chart polar2d
coords r range 0 inf ; phi periodic 0 2*pi
normal r
embed r*cos(phi)
embed r*sin(phi)
end
""",
    "spherical": """
chart spherical
coords r range 0 inf ; theta range 0 pi ; phi periodic 0 2*pi
normal r
embed r*sin(theta)*cos(phi)
embed r*sin(theta)*sin(phi)
embed r*cos(theta)
end
""",
    "cylindrical": """
chart cylindrical
coords rho range 0 inf ; phi periodic 0 2*pi ; z
normal rho
embed rho*cos(phi)
embed rho*sin(phi)
embed z
end
""",
    "cone_chart": """
# spherical coordinates sliced by the cones theta = const
chart cone_chart
coords r range 0 inf ; theta range 0 pi ; phi periodic 0 2*pi
normal theta
embed r*sin(theta)*cos(phi)
embed r*sin(theta)*sin(phi)
embed r*cos(theta)
end
""",
    "torus_gn": """
# Gaussian normal coordinates about a torus: w is the signed distance
chart torus_gn
params R=2 r=1
coords w range -r r ; theta periodic 0 2*pi ; phi periodic 0 2*pi
normal w
embed (R + (r + w)*cos(theta))*cos(phi)
embed (R + (r + w)*cos(theta))*sin(phi)
embed (r + w)*sin(theta)
end
""",
}


@lru_cache(maxsize=None)
def _load(name: str) -> ChartDef:
    return parse_chart(SOURCES[name])


def get_chart(name: str, **params: float) -> ChartDef:
    """Return catalog chart ``name``, optionally with parameter overrides."""
    if name not in SOURCES:
        raise KeyError(f"unknown catalog chart {name!r}; known: {', '.join(SOURCES)}")
    chart = _load(name)
    return chart.with_params(**params) if params else chart


def chart_names() -> list[str]:
    return list(SOURCES)


def list_charts() -> list[dict]:
    out = []
    for name in SOURCES:
        c = _load(name)
        out.append(
            {
                "name": c.name,
                "dimension": c.dim,
                "coords": list(c.coord_names),
                "params": c.param_values,
                "normal": c.normal,
            }
        )
    return out


def interior_box(chart: ChartDef, margin: float = 0.1) -> list[tuple[float, float]]:
    """A coordinate box of regular points, away from bounds and singular loci.

    Finite ranges are shrunk by ``margin`` of their width on both sides;
    half-infinite ranges become ``[lo + 0.5, lo + 3]`` (resp. mirrored);
    unbounded ones ``[-2, 2]``.  Periodic coordinates keep their full period.
    """
    box = []
    for c in chart.coords:
        lo, hi = c.lower, c.upper
        if c.periodic:
            box.append((lo, hi))
        elif math.isfinite(lo) and math.isfinite(hi):
            w = hi - lo
            box.append((lo + margin * w, hi - margin * w))
        elif math.isfinite(lo):
            box.append((lo + 0.5, lo + 3.0))
        elif math.isfinite(hi):
            box.append((hi - 3.0, hi - 0.5))
        else:
            box.append((-2.0, 2.0))
    return box


def sample_points(chart: ChartDef, n: int, rng: np.random.Generator, box=None) -> np.ndarray:
    """``n`` uniformly random points of ``box`` (default :func:`interior_box`)."""
    box = interior_box(chart) if box is None else box
    lo = np.array([b[0] for b in box])
    hi = np.array([b[1] for b in box])
    return lo + (hi - lo) * rng.random((n, chart.dim))
