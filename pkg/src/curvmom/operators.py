"""Momentum operators acting on sampled wavefunctions.

Wavefunctions live on tensor-product grids over a subset of the chart
coordinates ("active" axes); the remaining coordinates are pinned.  Only the
derivatives are discretized (central finite differences of order 2 or 4);
every multiplicative coefficient (``1/2 d ln sqrt(g)``, ``grad xi^a``, the
normal, the dual tangents, the mean curvature) is evaluated exactly through
:func:`curvmom.autodiff.chart_point`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from curvmom.autodiff import EmbeddingJet, chart_point
from curvmom.catalog import interior_box
from curvmom.chart_dsl import ChartDef
from curvmom.errors import GridError
from curvmom.geometry import log_volume_gradient, slice_from_jet

__all__ = [
    "Axis",
    "GridSpec",
    "WaveField",
    "CartesianVectorField",
    "TestFunction",
    "make_grid",
    "partial_derivative",
    "canonical_coefficient",
    "canonical_momentum",
    "full_momentum",
    "geometric_momentum",
    "geometric_momentum_extended",
    "normal_momentum",
    "normal_momentum_scalar",
    "inner_product",
    "norm",
    "vector_norm",
    "measure_weights",
    "inverse_jacobian_field",
    "slice_symbols",
    "SliceSymbols",
    "make_test_function",
    "make_test_field",
]

CHUNK = 1 << 15
MIN_NODES = 8


# ---------------------------------------------------------------------------
# grids and fields


@dataclass(frozen=True)
class Axis:
    name: str
    n: int
    lower: float
    upper: float
    periodic: bool = False

    @property
    def h(self) -> float:
        if self.periodic:
            return (self.upper - self.lower) / self.n
        return (self.upper - self.lower) / (self.n - 1)

    @property
    def nodes(self) -> np.ndarray:
        if self.periodic:
            return self.lower + self.h * np.arange(self.n)
        return np.linspace(self.lower, self.upper, self.n)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights (uniform on periodic axes)."""
        w = np.full(self.n, self.h)
        if not self.periodic:
            w[0] = w[-1] = 0.5 * self.h
        return w


@dataclass(frozen=True)
class GridSpec:
    axes: tuple[Axis, ...]
    fixed: tuple[tuple[str, float], ...] = ()
    fd_order: int = 4

    def __post_init__(self):
        if self.fd_order not in (2, 4):
            raise GridError(f"fd_order must be 2 or 4, got {self.fd_order}")
        names = [a.name for a in self.axes] + [k for k, _ in self.fixed]
        if len(set(names)) != len(names):
            raise GridError("a coordinate appears twice in the grid")
        for a in self.axes:
            if a.n < MIN_NODES:
                raise GridError(f"axis {a.name!r} needs at least {MIN_NODES} nodes, got {a.n}")
            if not a.lower < a.upper:
                raise GridError(f"axis {a.name!r} has an empty interval")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.n for a in self.axes)

    @property
    def active(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def axis(self, name: str) -> Axis:
        for a in self.axes:
            if a.name == name:
                return a
        raise GridError(f"coordinate {name!r} is not active in this grid")

    def axis_index(self, name: str) -> int:
        return self.active.index(self.axis(name).name)

    def label(self) -> str:
        return "x".join(str(n) for n in self.shape)

    def with_order(self, fd_order: int) -> "GridSpec":
        return GridSpec(self.axes, self.fixed, fd_order)

    def points(self, chart: ChartDef) -> np.ndarray:
        """Chart points of all nodes, shape ``grid.shape + (D,)``."""
        fixed = dict(self.fixed)
        known = set(self.active) | set(fixed)
        missing = [c for c in chart.coord_names if c not in known]
        if missing:
            raise GridError(f"grid neither samples nor pins coordinates {missing}")
        extra = known - set(chart.coord_names)
        if extra:
            raise GridError(f"grid refers to unknown coordinates {sorted(extra)}")
        mesh = np.meshgrid(*(a.nodes for a in self.axes), indexing="ij")
        cols = []
        for name in chart.coord_names:
            if name in fixed:
                cols.append(np.full(self.shape, float(fixed[name])))
            else:
                cols.append(mesh[self.active.index(name)])
        return np.stack(cols, axis=-1)

    def validate(self, chart: ChartDef) -> None:
        """Check that the grid lies in the chart domain and avoids singular points."""
        fixed = dict(self.fixed)
        for a in self.axes:
            c = chart.coord(a.name)
            if a.periodic != c.periodic:
                raise GridError(f"axis {a.name!r}: periodicity disagrees with the chart")
            if c.periodic:
                if not math.isclose(a.upper - a.lower, c.period, rel_tol=1e-12):
                    raise GridError(f"periodic axis {a.name!r} must span one full period")
            elif a.lower < c.lower or a.upper > c.upper:
                raise GridError(f"axis {a.name!r} leaves the chart domain")
        for k, v in fixed.items():
            if not chart.coord(k).contains(v):
                raise GridError(f"pinned value {k}={v} is outside the chart domain")
        for _ in iter_jets(chart, self):
            pass


def make_grid(
    chart: ChartDef,
    sizes: Mapping[str, int] | Sequence[int],
    fixed: Mapping[str, float] | None = None,
    bounds: Mapping[str, tuple[float, float]] | None = None,
    fd_order: int = 4,
    validate: bool = True,
) -> GridSpec:
    """Build a grid over the chart's non-pinned coordinates.

    ``sizes`` is a mapping name -> node count, or a sequence matched to the
    non-pinned coordinates in declaration order.  Bounds default to
    :func:`curvmom.catalog.interior_box`.
    """
    fixed = dict(fixed or {})
    bounds = dict(bounds or {})
    active = [c for c in chart.coord_names if c not in fixed]
    if not isinstance(sizes, Mapping):
        sizes = list(sizes)
        if len(sizes) != len(active):
            raise GridError(
                f"{len(sizes)} grid sizes given for {len(active)} active coordinates {active}"
            )
        sizes = dict(zip(active, sizes))
    if set(sizes) != set(active):
        raise GridError(f"grid sizes must cover exactly the active coordinates {active}")
    box = dict(zip(chart.coord_names, interior_box(chart)))
    axes = []
    for name in active:
        c = chart.coord(name)
        lo, hi = bounds.get(name, box[name])
        axes.append(Axis(name, int(sizes[name]), float(lo), float(hi), c.periodic))
    grid = GridSpec(tuple(axes), tuple((k, float(v)) for k, v in fixed.items()), fd_order)
    if validate:
        grid.validate(chart)
    return grid


def iter_jets(chart: ChartDef, grid: GridSpec, chunk: int = CHUNK) -> Iterator[tuple[slice, EmbeddingJet]]:
    """Evaluate the embedding jet over the flattened grid in chunks."""
    pts = grid.points(chart).reshape(-1, chart.dim)
    for start in range(0, pts.shape[0], chunk):
        sl = slice(start, min(start + chunk, pts.shape[0]))
        yield sl, chart_point(chart, pts[sl])


def pointwise(chart: ChartDef, grid: GridSpec, fn: Callable[[EmbeddingJet], np.ndarray]) -> np.ndarray:
    """Assemble ``fn(jet)`` over the whole grid; result shape ``grid.shape + tail``."""
    out = None
    for sl, ej in iter_jets(chart, grid):
        val = np.asarray(fn(ej))
        if out is None:
            out = np.empty((grid.size,) + val.shape[1:], dtype=val.dtype)
        out[sl] = val
    return out.reshape(grid.shape + out.shape[1:])


@dataclass(frozen=True, eq=False)
class WaveField:
    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != self.grid.shape:
            raise GridError(f"field shape {vals.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise GridError("wave field has non-finite entries")
        object.__setattr__(self, "values", vals)

    def _other(self, other):
        if isinstance(other, WaveField):
            if other.grid != self.grid:
                raise GridError("fields live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return WaveField(self.grid, self.values + self._other(other))

    def __sub__(self, other):
        return WaveField(self.grid, self.values - self._other(other))

    def __mul__(self, other):
        return WaveField(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return WaveField(self.grid, -self.values)


@dataclass(frozen=True, eq=False)
class CartesianVectorField:
    grid: GridSpec
    components: np.ndarray  # shape (D,) + grid.shape

    def __post_init__(self):
        comps = np.asarray(self.components, dtype=complex)
        if comps.shape[1:] != self.grid.shape:
            raise GridError("vector components do not conform to the grid")
        object.__setattr__(self, "components", comps)

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    def component(self, i: int) -> WaveField:
        return WaveField(self.grid, self.components[i])

    def __add__(self, other: "CartesianVectorField"):
        if other.grid != self.grid:
            raise GridError("fields live on different grids")
        return CartesianVectorField(self.grid, self.components + other.components)

    def __sub__(self, other: "CartesianVectorField"):
        if other.grid != self.grid:
            raise GridError("fields live on different grids")
        return CartesianVectorField(self.grid, self.components - other.components)


# ---------------------------------------------------------------------------
# finite differences


def _diff_periodic(f: np.ndarray, axis: int, h: float, order: int) -> np.ndarray:
    def sh(k):
        return np.roll(f, -k, axis=axis)

    if order == 2:
        return (sh(1) - sh(-1)) / (2 * h)
    return (8.0 * (sh(1) - sh(-1)) - (sh(2) - sh(-2))) / (12 * h)


# one-sided boundary stencils as (offset of reference node, {offset: coeff}),
# written on differences f[k] - f[ref] so that constants differentiate to 0
_EDGE = {
    2: {"den": 2.0, "rows": [(0, {1: 4.0, 2: -1.0})]},
    4: {
        "den": 12.0,
        "rows": [
            (0, {1: 48.0, 2: -36.0, 3: 16.0, 4: -3.0}),
            (1, {0: -3.0, 2: 18.0, 3: -6.0, 4: 1.0}),
        ],
    },
}


def _diff_bounded(f: np.ndarray, axis: int, h: float, order: int) -> np.ndarray:
    f = np.moveaxis(f, axis, 0)
    n = f.shape[0]
    out = np.empty_like(f)
    if order == 2:
        out[1:-1] = (f[2:] - f[:-2]) / (2 * h)
    else:
        out[2:-2] = (8.0 * (f[3:-1] - f[1:-3]) - (f[4:] - f[:-4])) / (12 * h)
    edge = _EDGE[order]
    den = edge["den"] * h
    for ref, coeffs in edge["rows"]:
        lo = sum(c * (f[k] - f[ref]) for k, c in coeffs.items())
        out[ref] = lo / den
        hi = sum(c * (f[n - 1 - k] - f[n - 1 - ref]) for k, c in coeffs.items())
        out[n - 1 - ref] = -hi / den
    return np.moveaxis(out, 0, axis)


def _diff(values: np.ndarray, grid: GridSpec, coord: str, order: int) -> np.ndarray:
    ax = grid.axis(coord)
    i = grid.axis_index(coord)
    if ax.periodic:
        return _diff_periodic(values, i, ax.h, order)
    return _diff_bounded(values, i, ax.h, order)


def partial_derivative(field: WaveField, coord: str, fd_order: int | None = None) -> WaveField:
    """Finite-difference partial derivative along an active coordinate."""
    order = field.grid.fd_order if fd_order is None else fd_order
    if order not in (2, 4):
        raise GridError(f"fd_order must be 2 or 4, got {order}")
    return WaveField(field.grid, _diff(field.values, field.grid, coord, order))


# ---------------------------------------------------------------------------
# operators


def _check_hbar(hbar: float) -> float:
    hbar = float(hbar)
    if not hbar > 0:
        raise ValueError(f"hbar must be positive, got {hbar}")
    return hbar


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@lru_cache(maxsize=8)
def canonical_coefficient(chart: ChartDef, coord: str, grid: GridSpec) -> np.ndarray:
    """The multiplicative term ``1/2 d_coord ln sqrt(g)`` at every node."""
    k = chart.index(coord)
    return _frozen(pointwise(chart, grid, lambda ej: 0.5 * log_volume_gradient(chart, jet=ej)[:, k]))


@lru_cache(maxsize=2)
def inverse_jacobian_field(chart: ChartDef, grid: GridSpec) -> np.ndarray:
    """``grad xi^a`` at every node, shape ``grid.shape + (D, D)`` (row ``a``)."""
    return _frozen(pointwise(chart, grid, lambda ej: np.linalg.inv(ej.J)))


@dataclass(frozen=True)
class SliceSymbols:
    """Slice geometry sampled on a grid (all arrays carry ``grid.shape`` in front)."""

    normal_coord: str
    surface_coords: tuple[str, ...]
    n: np.ndarray
    inv_sqrt_g00: np.ndarray
    M_sum: np.ndarray
    r_dual: np.ndarray

    @property
    def M_vec(self) -> np.ndarray:
        return self.M_sum[..., None] * self.n


def _normal_name(chart: ChartDef, normal_coord: str | None) -> str:
    name = normal_coord if normal_coord is not None else chart.normal
    if name is None:
        raise ValueError(f"chart {chart.name!r} has no designated normal; pass one")
    chart.coord(name)
    return name


@lru_cache(maxsize=2)
def slice_symbols(chart: ChartDef, normal_coord: str | None, grid: GridSpec) -> SliceSymbols:
    name = _normal_name(chart, normal_coord)
    surf = tuple(c for c in chart.coord_names if c != name)
    D, N = chart.dim, len(surf)

    def fn(ej):
        sg = slice_from_jet(chart, ej, name)
        return np.concatenate(
            [sg.n, (1.0 / sg.sqrt_g00)[:, None], sg.M_sum[:, None], sg.r_dual.reshape(-1, N * D)],
            axis=-1,
        )

    packed = pointwise(chart, grid, fn)
    return SliceSymbols(
        normal_coord=name,
        surface_coords=surf,
        n=_frozen(packed[..., :D].copy()),
        inv_sqrt_g00=_frozen(packed[..., D].copy()),
        M_sum=_frozen(packed[..., D + 1].copy()),
        r_dual=_frozen(packed[..., D + 2 :].reshape(grid.shape + (N, D)).copy()),
    )


def canonical_momentum(
    chart: ChartDef, coord: str, field: WaveField, hbar: float = 1.0, *, hermitize: bool = True
) -> WaveField:
    """``P_xi psi = -i hbar (d_xi psi + 1/2 (d_xi ln sqrt g) psi)``.

    ``hermitize=False`` drops the log-derivative term (the bare ``-i hbar d_xi``),
    which is only useful as a negative control.
    """
    hbar = _check_hbar(hbar)
    d = _diff(field.values, field.grid, coord, field.grid.fd_order)
    if hermitize:
        d = d + canonical_coefficient(chart, coord, field.grid) * field.values
    return WaveField(field.grid, -1j * hbar * d)


def _require_full(chart: ChartDef, grid: GridSpec) -> None:
    if set(grid.active) != set(chart.coord_names):
        raise GridError("operator needs all chart coordinates active on the grid")


def _vector(grid: GridSpec, cart: np.ndarray, hbar: float) -> CartesianVectorField:
    return CartesianVectorField(grid, -1j * hbar * np.moveaxis(cart, -1, 0))


def full_momentum(chart: ChartDef, field: WaveField, hbar: float = 1.0) -> CartesianVectorField:
    """Cartesian momentum ``-i hbar grad psi`` via ``grad = sum_a (grad xi^a) d_a``."""
    hbar = _check_hbar(hbar)
    grid = field.grid
    _require_full(chart, grid)
    Jinv = inverse_jacobian_field(chart, grid)
    cart = np.zeros(grid.shape + (chart.dim,), dtype=complex)
    for a, c in enumerate(chart.coord_names):
        cart += Jinv[..., a, :] * _diff(field.values, grid, c, grid.fd_order)[..., None]
    return _vector(grid, cart, hbar)


def _geometric(chart, name, field, hbar, *, curvature: bool) -> CartesianVectorField:
    hbar = _check_hbar(hbar)
    grid = field.grid
    sym = slice_symbols(chart, name, grid)
    cart = np.zeros(grid.shape + (chart.dim,), dtype=complex)
    for m, c in enumerate(sym.surface_coords):
        cart += sym.r_dual[..., m, :] * _diff(field.values, grid, c, grid.fd_order)[..., None]
    if curvature:
        cart += 0.5 * sym.M_vec * field.values[..., None]
    return _vector(grid, cart, hbar)


def geometric_momentum(
    chart: ChartDef, normal_coord: str | None, field: WaveField, hbar: float = 1.0,
    *, curvature: bool = True,
) -> CartesianVectorField:
    """Geometric momentum ``-i hbar (r^mu d_mu psi + (M_vec/2) psi)`` on a slice.

    The grid must sample exactly the surface coordinates with the normal
    coordinate pinned.  ``curvature=False`` drops the ``M_vec/2`` term.
    """
    grid = field.grid
    name = _normal_name(chart, normal_coord)
    if name not in dict(grid.fixed):
        raise GridError(f"normal coordinate {name!r} must be pinned on a surface grid")
    surface = set(chart.coord_names) - {name}
    if set(grid.active) != surface:
        raise GridError(f"surface grid must sample exactly {sorted(surface)}")
    return _geometric(chart, name, field, hbar, curvature=curvature)


def geometric_momentum_extended(
    chart: ChartDef, normal_coord: str | None, field: WaveField, hbar: float = 1.0
) -> CartesianVectorField:
    """The geometric-momentum formula applied slice by slice on a full grid."""
    _require_full(chart, field.grid)
    return _geometric(chart, _normal_name(chart, normal_coord), field, hbar, curvature=True)


def normal_momentum_scalar(
    chart: ChartDef, normal_coord: str | None, field: WaveField, hbar: float = 1.0
) -> WaveField:
    """``P_0 psi = -i hbar ((1/sqrt g_00) d_0 psi - (M_sum/2) psi)``."""
    hbar = _check_hbar(hbar)
    grid = field.grid
    _require_full(chart, grid)
    name = _normal_name(chart, normal_coord)
    sym = slice_symbols(chart, name, grid)
    d0 = _diff(field.values, grid, name, grid.fd_order)
    return WaveField(grid, -1j * hbar * (sym.inv_sqrt_g00 * d0 - 0.5 * sym.M_sum * field.values))


def normal_momentum(
    chart: ChartDef, normal_coord: str | None, field: WaveField, hbar: float = 1.0
) -> CartesianVectorField:
    """Normal part ``n P_0 psi`` of the momentum, as a Cartesian vector field."""
    p0 = normal_momentum_scalar(chart, normal_coord, field, hbar)
    n = slice_symbols(chart, _normal_name(chart, normal_coord), field.grid).n
    return CartesianVectorField(field.grid, np.moveaxis(n, -1, 0) * p0.values)


# ---------------------------------------------------------------------------
# inner products


@lru_cache(maxsize=8)
def measure_weights(chart: ChartDef, grid: GridSpec, measure: str = "full") -> np.ndarray:
    """Quadrature weights times the volume factor at every node.

    ``full`` uses ``|det J|``; ``surface`` uses the area element of the
    active coordinates, ``sqrt(det h)`` with ``h`` their induced metric.
    """
    w = np.ones(grid.shape)
    for i, a in enumerate(grid.axes):
        shape = [1] * len(grid.axes)
        shape[i] = a.n
        w = w * a.weights.reshape(shape)
    if measure == "full":
        vol = pointwise(chart, grid, lambda ej: np.abs(np.linalg.det(ej.J)))
    elif measure == "surface":
        idx = [chart.index(c) for c in grid.active]

        def area(ej):
            T = ej.J[:, :, idx]
            return np.sqrt(np.linalg.det(np.swapaxes(T, -1, -2) @ T))

        vol = pointwise(chart, grid, area)
    else:
        raise ValueError(f"measure must be 'full' or 'surface', got {measure!r}")
    return _frozen(w * vol)


def _weights(chart, grid, measure, weights):
    return measure_weights(chart, grid, measure) if weights is None else weights


def inner_product(
    a: WaveField, b: WaveField, chart: ChartDef, measure: str = "full", *, weights=None
) -> complex:
    """``<a|b> = sum conj(a) b w`` with trapezoid/periodic quadrature weights."""
    if a.grid != b.grid:
        raise GridError("inner product of fields on different grids")
    w = _weights(chart, a.grid, measure, weights)
    return complex(np.sum(np.conj(a.values) * b.values * w))


def norm(a: WaveField, chart: ChartDef, measure: str = "full", *, weights=None) -> float:
    w = _weights(chart, a.grid, measure, weights)
    return float(np.sqrt(np.sum(np.abs(a.values) ** 2 * w)))


def vector_norm(v: CartesianVectorField, chart: ChartDef, measure: str = "full", *, weights=None) -> float:
    w = _weights(chart, v.grid, measure, weights)
    return float(np.sqrt(np.sum(np.abs(v.components) ** 2 * w)))


# ---------------------------------------------------------------------------
# test functions

FOURIER_MAX_MODE = 2
BUMP_SHARPNESS = 4.0
POLY_DEGREE = 2


@dataclass(frozen=True)
class _Factor:
    """One-dimensional factor ``f(xi)`` with an analytic derivative."""

    kind: str
    lower: float
    upper: float
    coeffs: np.ndarray
    modes: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def _t(self, x):
        return (2.0 * x - self.lower - self.upper) / (self.upper - self.lower)

    def __call__(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "fourier":
            L = self.upper - self.lower
            k = 2.0 * np.pi * self.modes / L
            ph = np.exp(1j * np.outer(x - self.lower, k))
            return ph @ self.coeffs, ph @ (1j * k * self.coeffs)
        t = self._t(x)
        dt = 2.0 / (self.upper - self.lower)
        p = np.polynomial.polynomial.polyval(t, self.coeffs)
        dp = np.polynomial.polynomial.polyval(t, np.polynomial.polynomial.polyder(self.coeffs))
        if self.kind == "poly":
            return p, dp * dt
        inside = np.abs(t) < 1.0
        ts = np.where(inside, t, 0.0)
        one_m = 1.0 - ts * ts
        a = BUMP_SHARPNESS
        bump = np.where(inside, np.exp(a - a / one_m), 0.0)
        dbump = np.where(inside, bump * (-2.0 * a * ts / (one_m * one_m)), 0.0)
        return bump * p, (dbump * p + bump * dp) * dt


def _complex_normal(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


@dataclass(frozen=True)
class TestFunction:
    """Separable smooth function ``psi = prod_a f_a(xi^a)`` on a grid.

    Sampled values and exact partial derivatives are both available, so
    discrete operators can be compared against the analytic result.
    """

    __test__ = False  # not a pytest class

    grid: GridSpec
    factors: tuple[_Factor, ...]

    def _samples(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return [f(a.nodes) for f, a in zip(self.factors, self.grid.axes)]

    @staticmethod
    def _outer(vectors: list[np.ndarray]) -> np.ndarray:
        out = vectors[0]
        for v in vectors[1:]:
            out = np.multiply.outer(out, v)
        return out

    def values(self) -> np.ndarray:
        return self._outer([v for v, _ in self._samples()])

    def field(self) -> WaveField:
        return WaveField(self.grid, self.values())

    def partial(self, coord: str) -> np.ndarray:
        i = self.grid.axis_index(coord)
        samples = self._samples()
        return self._outer([d if j == i else v for j, (v, d) in enumerate(samples)])


def make_test_function(grid: GridSpec, seed: int, kind: str = "product") -> TestFunction:
    """Deterministic smooth test function.

    ``periodic-fourier``: truncated Fourier series on periodic axes, seeded
    polynomial on bounded axes.  ``bump``: compact C-infinity bump times a
    seeded polynomial on bounded axes, a single seeded Fourier mode pair on
    periodic ones.  ``product``: Fourier series on periodic axes and bumps on
    bounded axes.
    """
    if kind not in ("periodic-fourier", "bump", "product"):
        raise ValueError(f"unknown test-field kind {kind!r}")
    rng = np.random.default_rng(seed)
    factors = []
    for a in grid.axes:
        if a.periodic:
            m = FOURIER_MAX_MODE if kind != "bump" else 1
            modes = np.arange(-m, m + 1, dtype=float)
            coeffs = _complex_normal(rng, modes.size) / (1.0 + modes**2)
            factors.append(_Factor("fourier", a.lower, a.upper, coeffs, modes))
        else:
            coeffs = _complex_normal(rng, POLY_DEGREE + 1)
            coeffs[0] += 2.0  # keep the polynomial away from zero on [-1, 1]
            fkind = "poly" if kind == "periodic-fourier" else "bump"
            factors.append(_Factor(fkind, a.lower, a.upper, coeffs))
    return TestFunction(grid, tuple(factors))


def make_test_field(grid: GridSpec, seed: int, kind: str = "product") -> WaveField:
    return make_test_function(grid, seed, kind).field()
