"""Metric and level-surface geometry of a chart.

Sign conventions (fixed for the whole package):

* the unit normal of the slice ``xi^0 = const`` points along ``+dx/dxi^0``;
* the second fundamental form is ``b[mu, nu] = n . d_mu d_nu x``;
* ``M_sum`` is the trace of the shape operator ``h^-1 b`` and ``M_avg`` is
  ``M_sum / N``.

With these choices the outward sphere of radius ``r`` has ``M_sum = -2/r``.

Every function accepts a single point (a D-vector or a name->value mapping)
or a batch of points with the coordinate axis last; outputs carry the same
batch shape in front.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from curvmom.autodiff import EmbeddingJet, chart_point
from curvmom.chart_dsl import ChartDef
from curvmom.errors import NotOrthogonalSlice

__all__ = [
    "MetricData",
    "SliceGeometry",
    "GaussianNormalReport",
    "ORTHO_TOL",
    "metric",
    "metric_from_jet",
    "slice_geometry",
    "slice_from_jet",
    "log_volume_gradient",
    "normal_log_derivative",
    "weingarten_contraction",
    "validate_gaussian_normal",
    "decomposition_rows",
    "inverse_jacobian",
]

ORTHO_TOL = 1e-10
GN_TOL = 1e-10


@dataclass(frozen=True)
class MetricData:
    g: np.ndarray
    g_inv: np.ndarray
    sqrt_g: np.ndarray
    lame: np.ndarray | None


def _offdiag_ratio(g: np.ndarray) -> np.ndarray:
    d = np.sqrt(np.einsum("...aa->...a", g))
    ratio = np.abs(g) / (d[..., :, None] * d[..., None, :])
    eye = np.eye(g.shape[-1], dtype=bool)
    return np.where(eye, 0.0, ratio)


def metric_from_jet(ej: EmbeddingJet) -> MetricData:
    J = ej.J
    g = np.einsum("...ia,...ib->...ab", J, J)
    g_inv = np.linalg.inv(g)
    sqrt_g = np.sqrt(np.linalg.det(g))
    lame = None
    if np.max(_offdiag_ratio(g)) < ORTHO_TOL:
        lame = np.sqrt(np.einsum("...aa->...a", g))
    return MetricData(g=g, g_inv=g_inv, sqrt_g=sqrt_g, lame=lame)


def metric(chart: ChartDef, point) -> MetricData:
    """Metric tensor, its inverse, volume factor and (if diagonal) Lamé coefficients."""
    return metric_from_jet(chart_point(chart, point))


def inverse_jacobian(ej: EmbeddingJet) -> np.ndarray:
    """Rows are the coordinate gradients ``grad xi^a`` in Cartesian components."""
    return np.linalg.inv(ej.J)


def log_volume_gradient(chart: ChartDef, point=None, *, jet: EmbeddingJet | None = None):
    """``d_a ln sqrt(g)`` for every coordinate ``a``, exact from the jet.

    Uses ``d_a ln|det J| = tr(J^-1 d_a J)`` with ``d_a J`` taken from the
    embedding Hessian.
    """
    ej = chart_point(chart, point) if jet is None else jet
    Jinv = np.linalg.inv(ej.J)
    return np.einsum("...ai,...iab->...b", Jinv, ej.H)


@dataclass(frozen=True)
class SliceGeometry:
    """Geometry of the level surface of ``normal_coord`` through a point.

    ``r_mu`` and ``r_dual`` have shape ``S + (N, D)``: one Cartesian vector
    per surface coordinate, in chart declaration order (``surface_coords``).
    """

    normal_coord: str
    normal_index: int
    surface_coords: tuple[str, ...]
    surface_indices: tuple[int, ...]
    n: np.ndarray
    sqrt_g00: np.ndarray
    r_mu: np.ndarray
    r_dual: np.ndarray
    h: np.ndarray
    b: np.ndarray
    shape: np.ndarray
    M_sum: np.ndarray
    M_avg: np.ndarray
    M_vec: np.ndarray

    @property
    def N(self) -> int:
        return len(self.surface_coords)

    @property
    def sqrt_h(self) -> np.ndarray:
        return np.sqrt(np.linalg.det(self.h))

    def principal_curvatures(self) -> np.ndarray:
        """Eigenvalues of the shape operator, ascending, shape ``S + (N,)``."""
        L = np.linalg.cholesky(self.h)
        Linv = np.linalg.inv(L)
        sym = Linv @ self.b @ np.swapaxes(Linv, -1, -2)
        sym = 0.5 * (sym + np.swapaxes(sym, -1, -2))
        return np.linalg.eigvalsh(sym)

    def M_avg_vec(self) -> np.ndarray:
        """Mean-curvature vector in the averaged convention, ``M_avg * n``."""
        return self.M_avg[..., None] * self.n


def _resolve_normal(chart: ChartDef, normal_coord: str | None) -> str:
    name = normal_coord if normal_coord is not None else chart.normal
    if name is None:
        raise ValueError(f"chart {chart.name!r} has no designated normal; pass one")
    chart.coord(name)
    if chart.dim < 2:
        raise ValueError("level surfaces need chart dimension >= 2")
    return name


def _check_orthogonal(chart: ChartDef, J: np.ndarray, k: int, name: str) -> None:
    g = np.einsum("...ia,...ib->...ab", J, J)
    row = _offdiag_ratio(g)[..., k, :]
    worst = float(np.max(row))
    if worst > ORTHO_TOL:
        raise NotOrthogonalSlice(
            f"coordinate {name!r} of chart {chart.name!r} is not orthogonal to the "
            f"others (max |g_0mu|/sqrt(g_00 g_mumu) = {worst:.3g})"
        )


def slice_from_jet(chart: ChartDef, ej: EmbeddingJet, normal_coord: str | None = None) -> SliceGeometry:
    name = _resolve_normal(chart, normal_coord)
    k = chart.index(name)
    J, H = ej.J, ej.H
    _check_orthogonal(chart, J, k, name)

    surf = tuple(a for a in range(chart.dim) if a != k)
    t = J[..., :, k]
    sqrt_g00 = np.linalg.norm(t, axis=-1)
    n = t / sqrt_g00[..., None]

    r_mu = np.swapaxes(J[..., :, list(surf)], -1, -2)
    h = r_mu @ np.swapaxes(r_mu, -1, -2)
    h_inv = np.linalg.inv(h)
    r_dual = h_inv @ r_mu
    Hs = H[..., :, list(surf), :][..., list(surf)]
    b = np.einsum("...i,...imn->...mn", n, Hs)
    shape = h_inv @ b
    M_sum = np.trace(shape, axis1=-2, axis2=-1)
    N = len(surf)
    return SliceGeometry(
        normal_coord=name,
        normal_index=k,
        surface_coords=tuple(chart.coord_names[a] for a in surf),
        surface_indices=surf,
        n=n,
        sqrt_g00=sqrt_g00,
        r_mu=r_mu,
        r_dual=r_dual,
        h=h,
        b=b,
        shape=shape,
        M_sum=M_sum,
        M_avg=M_sum / N,
        M_vec=M_sum[..., None] * n,
    )


def slice_geometry(chart: ChartDef, point, normal_coord: str | None = None) -> SliceGeometry:
    """Normal, bases, fundamental forms and mean curvature of a coordinate slice."""
    return slice_from_jet(chart, chart_point(chart, point), normal_coord)


def normal_log_derivative(chart: ChartDef, point, normal_coord: str | None = None):
    """``(1/sqrt(g_00)) d_0 ln sqrt(g)`` along the normal coordinate.

    Equals ``-M_sum`` wherever ``g_00`` does not vary along ``xi^0``.
    """
    name = _resolve_normal(chart, normal_coord)
    k = chart.index(name)
    ej = chart_point(chart, point)
    _check_orthogonal(chart, ej.J, k, name)
    dlog = log_volume_gradient(chart, jet=ej)[..., k]
    return dlog / np.linalg.norm(ej.J[..., :, k], axis=-1)


def weingarten_contraction(chart: ChartDef, point, normal_coord: str | None = None):
    """``sum_mu r^mu . d_mu n``, with ``d_mu n`` differentiated through the normalization."""
    ej = chart_point(chart, point)
    sg = slice_from_jet(chart, ej, normal_coord)
    k = sg.normal_index
    t_norm = sg.sqrt_g00[..., None, None]
    # d_mu t for each surface coordinate, shape S + (N, D)
    dt = np.swapaxes(ej.H[..., :, k, :][..., list(sg.surface_indices)], -1, -2)
    n = sg.n[..., None, :]
    dn = (dt - np.sum(dt * n, axis=-1, keepdims=True) * n) / t_norm
    return np.sum(sg.r_dual * dn, axis=(-2, -1))


@dataclass(frozen=True)
class GaussianNormalReport:
    normal_coord: str
    max_offdiag: float
    max_d0_g00: float
    verdict: str  # gaussian_normal | orthogonal_only | general

    def as_dict(self) -> dict:
        return {
            "normal_coord": self.normal_coord,
            "max_offdiag": self.max_offdiag,
            "max_d0_g00": self.max_d0_g00,
            "verdict": self.verdict,
        }


def validate_gaussian_normal(
    chart: ChartDef, normal_coord: str | None, sample_points: Sequence | np.ndarray
) -> GaussianNormalReport:
    """Check ``g_0mu = 0`` and ``d_0 g_00 = 0`` over a set of points."""
    name = _resolve_normal(chart, normal_coord)
    k = chart.index(name)
    ej = chart_point(chart, np.asarray(sample_points, dtype=float))
    J, H = ej.J, ej.H
    g = np.einsum("...ia,...ib->...ab", J, J)
    mask = np.arange(chart.dim) != k
    max_off = float(np.max(np.abs(g[..., k, mask])))
    d0_g00 = 2.0 * np.einsum("...i,...i->...", J[..., :, k], H[..., :, k, k])
    max_d0 = float(np.max(np.abs(d0_g00)))
    if max_off < GN_TOL and max_d0 < GN_TOL:
        verdict = "gaussian_normal"
    elif max_off < GN_TOL:
        verdict = "orthogonal_only"
    else:
        verdict = "general"
    return GaussianNormalReport(name, max_off, max_d0, verdict)


def decomposition_rows(sg: SliceGeometry) -> np.ndarray:
    """Assemble ``n/sqrt(g_00)`` and the dual tangents into a D x D matrix.

    Row ``a`` is the vector paired with coordinate ``a``; for an admissible
    slice the result reproduces ``J^-1``.
    """
    D = sg.n.shape[-1]
    rows = np.empty(sg.n.shape[:-1] + (D, D))
    rows[..., sg.normal_index, :] = sg.n / sg.sqrt_g00[..., None]
    for m, a in enumerate(sg.surface_indices):
        rows[..., a, :] = sg.r_dual[..., m, :]
    return rows
