"""Residual checks for the momentum identities.

Two kinds of residual are reported and never mixed:

* symbol-level residuals compare exact (AD) coefficient fields and must sit
  at rounding level (tolerance ``1e-10``);
* field-level residuals involve finite differences; they are reported on a
  grid ladder together with the fitted convergence order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from curvmom.autodiff import chart_point
from curvmom.catalog import interior_box, sample_points
from curvmom.chart_dsl import ChartDef
from curvmom.geometry import (
    decomposition_rows,
    normal_log_derivative,
    slice_from_jet,
    validate_gaussian_normal,
    weingarten_contraction,
)
from curvmom.operators import (
    CartesianVectorField,
    GridSpec,
    WaveField,
    canonical_momentum,
    full_momentum,
    geometric_momentum,
    geometric_momentum_extended,
    inner_product,
    inverse_jacobian_field,
    make_grid,
    make_test_function,
    measure_weights,
    normal_momentum,
    slice_symbols,
)

__all__ = [
    "VerificationReport",
    "ConvergenceFit",
    "estimate_convergence_order",
    "check_hermiticity",
    "check_decomposition",
    "check_orthogonality",
    "check_curvature_closed_forms",
    "check_curvature_identities",
    "check_gaussian_normal",
    "CLOSED_FORMS",
]

SYMBOL_TOL = 1e-10
FLOOR = 1e-12
ORDER_BAND = 0.5
DEFAULT_TRANSVERSE = 16


@dataclass
class VerificationReport:
    check: str
    chart: str
    params: dict
    residuals: list[tuple[str, float]]
    tolerance: float
    verdict: str
    convergence_order: float | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def residual(self, label: str) -> float:
        for name, value in self.residuals:
            if name == label:
                return value
        raise KeyError(label)

    def as_dict(self) -> dict:
        return {
            "check": self.check,
            "chart": self.chart,
            "config": self.params,
            "residuals": [{"grid": g, "value": v} for g, v in self.residuals],
            "convergence_order": self.convergence_order,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
        }


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


# ---------------------------------------------------------------------------
# convergence


@dataclass(frozen=True)
class ConvergenceFit:
    order: float
    segments: tuple[float, ...]
    at_floor: bool


def estimate_convergence_order(residuals: Sequence[tuple[float, float]], floor: float = FLOOR) -> ConvergenceFit:
    """Least-squares slope of ``log(residual)`` against ``log(h)``.

    Also returns the slopes of consecutive ladder segments, and flags
    ladders whose residuals all sit below ``floor`` (rounding level).
    """
    if len(residuals) < 3:
        raise ValueError("convergence estimate needs at least 3 ladder points")
    h = np.array([r[0] for r in residuals], dtype=float)
    e = np.array([r[1] for r in residuals], dtype=float)
    if np.any(h <= 0) or np.any(e <= 0) or not np.all(np.isfinite(e)):
        raise ValueError("ladder spacings and residuals must be positive and finite")
    if len(set(h.tolist())) != len(h):
        raise ValueError("degenerate ladder: repeated spacing")
    x, y = np.log(h), np.log(e)
    slope = float(np.polyfit(x, y, 1)[0])
    order = np.argsort(x)
    xs, ys = x[order], y[order]
    segments = tuple(float((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])) for i in range(len(xs) - 1))
    return ConvergenceFit(order=slope, segments=segments, at_floor=bool(np.max(e) < floor))


def _ladder_verdict(ladder, fd_order, tolerance, details, require_order=True):
    """Shared verdict for FD-limited checks.  Returns (verdict, order)."""
    final = ladder[-1][1]
    if len(ladder) < 3:
        return _verdict(final <= tolerance), None
    fit = estimate_convergence_order([(max(h, 1e-300), max(r, 1e-300)) for h, r in ladder])
    details["segments"] = list(fit.segments)
    details["at_floor"] = fit.at_floor
    if fit.at_floor:
        return _verdict(final <= tolerance), fit.order
    ok = final <= tolerance
    if require_order:
        ok = ok and abs(fit.order - fd_order) <= ORDER_BAND
    return _verdict(ok), fit.order


def _pair_seeds(seed: int, k: int) -> tuple[int, int]:
    a, b = np.random.SeedSequence([seed, k]).generate_state(2)
    return int(a), int(b)


def _spacing(grid: GridSpec, axes: Sequence[str] | None = None) -> float:
    names = grid.active if axes is None else axes
    return max(grid.axis(n).h for n in names)


# ---------------------------------------------------------------------------
# hermiticity


def _hermiticity_defect(apply, psi, phi, chart, measure, weights) -> float:
    a_phi, a_psi = apply(phi), apply(psi)
    lhs = inner_product(psi, a_phi, chart, measure, weights=weights)
    rhs = inner_product(a_psi, phi, chart, measure, weights=weights)
    np_psi = math.sqrt(inner_product(psi, psi, chart, measure, weights=weights).real)
    np_phi = math.sqrt(inner_product(phi, phi, chart, measure, weights=weights).real)
    na_psi = math.sqrt(inner_product(a_psi, a_psi, chart, measure, weights=weights).real)
    na_phi = math.sqrt(inner_product(a_phi, a_phi, chart, measure, weights=weights).real)
    op_norm = max(na_psi / np_psi, na_phi / np_phi)
    if op_norm == 0.0:
        return 0.0
    return abs(lhs - rhs) / (np_psi * np_phi * op_norm)


def check_hermiticity(
    chart: ChartDef,
    op: str,
    ladder: Sequence[int],
    seed: int = 0,
    *,
    coord: str | None = None,
    normal: str | None = None,
    at: float | None = None,
    fd_order: int = 4,
    hbar: float = 1.0,
    pairs: int = 3,
    hermitize: bool = True,
    transverse: int | None = DEFAULT_TRANSVERSE,
    bounds: dict | None = None,
    kind: str = "product",
    tolerance: float = 1e-6,
) -> VerificationReport:
    """Inner-product defect ``|<psi|A phi> - <A psi|phi>|`` on a grid ladder.

    ``op`` selects ``canonical`` (needs ``coord``; weighted by ``sqrt g`` on
    a full grid), ``geometric`` (surface grid with ``normal`` pinned at
    ``at``; weighted by ``sqrt h``; each Cartesian component separately) or
    ``full`` (every Cartesian component of ``-i hbar grad``).

    For ``canonical`` only the differentiated axis is refined along the
    ladder; the others stay at ``transverse`` nodes (``None`` refines all).
    The defect is a weighted sum of independent line defects, so coarse
    transverse axes do not bias it.  The worst of ``pairs`` seeded field
    pairs is reported.
    """
    bounds = dict(bounds or {})
    fixed: dict[str, float] = {}
    if op == "canonical":
        if coord is None:
            raise ValueError("canonical hermiticity check needs `coord`")
        chart.coord(coord)
        refined = (coord,)
        measure = "full"
    elif op == "geometric":
        normal = normal if normal is not None else chart.normal
        if at is None:
            lo, hi = dict(zip(chart.coord_names, interior_box(chart)))[normal]
            at = 0.5 * (lo + hi)
        fixed[normal] = float(at)
        refined = tuple(c for c in chart.coord_names if c != normal)
        measure = "surface"
    elif op == "full":
        refined = chart.coord_names
        measure = "full"
    else:
        raise ValueError(f"unknown operator selector {op!r}")

    residuals = []
    ladder_pts = []
    for n in ladder:
        sizes = {}
        for c in chart.coord_names:
            if c in fixed:
                continue
            sizes[c] = n if (c in refined or transverse is None) else transverse
        grid = make_grid(chart, sizes, fixed=fixed, bounds=bounds, fd_order=fd_order)
        weights = measure_weights(chart, grid, measure)

        if op == "canonical":
            appliers = [lambda f: canonical_momentum(chart, coord, f, hbar, hermitize=hermitize)]
        elif op == "geometric":
            appliers = [
                (lambda i: lambda f: geometric_momentum(chart, normal, f, hbar, curvature=hermitize).component(i))(i)
                for i in range(chart.dim)
            ]
        else:
            appliers = [
                (lambda i: lambda f: full_momentum(chart, f, hbar).component(i))(i)
                for i in range(chart.dim)
            ]

        worst = 0.0
        for k in range(pairs):
            s1, s2 = _pair_seeds(seed, k)
            psi = make_test_function(grid, s1, kind).field()
            phi = make_test_function(grid, s2, kind).field()
            for apply in appliers:
                worst = max(worst, _hermiticity_defect(apply, psi, phi, chart, measure, weights))
        residuals.append((grid.label(), worst))
        ladder_pts.append((_spacing(grid, refined), worst))

    details: dict = {}
    verdict, order = _ladder_verdict(ladder_pts, fd_order, tolerance, details)
    label = {"canonical": f"canonical({coord})", "geometric": f"geometric({normal})", "full": "full"}[op]
    params = {
        "op": label,
        "ladder": list(ladder),
        "seed": seed,
        "fd_order": fd_order,
        "hbar": hbar,
        "pairs": pairs,
        "hermitize": hermitize,
        "kind": kind,
    }
    if op == "geometric":
        params["at"] = {normal: float(at)}
    if transverse is not None and op == "canonical":
        params["transverse"] = transverse
    return VerificationReport(
        check="hermiticity",
        chart=chart.name,
        params=params,
        residuals=residuals,
        tolerance=tolerance,
        verdict=verdict,
        convergence_order=order,
        details=details,
    )


# ---------------------------------------------------------------------------
# decomposition


def decomposition_symbol_residual(chart: ChartDef, normal: str | None, points: np.ndarray) -> float:
    """max over points of ``|rows - J^-1|_F / |J^-1|_F`` (rows from the slice)."""
    ej = chart_point(chart, points)
    sg = slice_from_jet(chart, ej, normal)
    rows = decomposition_rows(sg)
    Jinv = np.linalg.inv(ej.J)
    err = np.linalg.norm(rows - Jinv, axis=(-2, -1)) / np.linalg.norm(Jinv, axis=(-2, -1))
    return float(np.max(err))


def exact_momentum(chart: ChartDef, tf, hbar: float = 1.0) -> CartesianVectorField:
    """``-i hbar grad psi`` from the analytic partials of a test function."""
    grid = tf.grid
    Jinv = inverse_jacobian_field(chart, grid)
    cart = np.zeros(grid.shape + (chart.dim,), dtype=complex)
    for a, c in enumerate(chart.coord_names):
        cart += Jinv[..., a, :] * tf.partial(c)[..., None]
    return CartesianVectorField(grid, -1j * hbar * np.moveaxis(cart, -1, 0))


def _vnorm(v: CartesianVectorField, weights) -> float:
    return float(np.sqrt(np.sum(np.abs(v.components) ** 2 * weights)))


def check_decomposition(
    chart: ChartDef,
    normal: str | None = None,
    seed: int = 0,
    *,
    ladder: Sequence[int | Sequence[int]] = (),
    n_points: int = 100,
    fd_order: int = 4,
    hbar: float = 1.0,
    bounds: dict | None = None,
    kind: str = "product",
    field_tolerance: float | None = None,
) -> VerificationReport:
    """Normal/surface split of the momentum, ``P = n P_0 + Pi``.

    Symbol level: the rows ``n/sqrt(g_00)`` and ``r^mu`` reproduce ``J^-1``
    at ``n_points`` seeded points and at every node of the ladder grids.

    Field level, for each ladder grid:

    * ``consistency:<grid>`` compares ``n P_0 psi + Pi psi`` with the discrete
      ``full_momentum``; the curvature terms cancel identically, so this must
      sit at rounding level;
    * ``field:<grid>`` compares the same split with the exact Cartesian
      momentum of the analytic test function, which converges at the FD
      order.

    The exact-reference ladder gates the verdict only when
    ``field_tolerance`` is given (final residual bound plus the order band);
    otherwise its fitted order is reported for information.
    """
    normal = normal if normal is not None else chart.normal
    rng = np.random.default_rng(seed)
    pts = sample_points(chart, n_points, rng)
    sym = decomposition_symbol_residual(chart, normal, pts)
    residuals: list[tuple[str, float]] = []
    details: dict = {}
    order = None
    bounds = dict(bounds or {})
    ok = True

    field_res, consist_res, field_pts = [], [], []
    for n in ladder:
        sizes = [n] * chart.dim if isinstance(n, (int, np.integer)) else list(n)
        grid = make_grid(chart, sizes, bounds=bounds, fd_order=fd_order)
        nodes = grid.points(chart).reshape(-1, chart.dim)
        sym = max(sym, decomposition_symbol_residual(chart, normal, nodes))
        tf = make_test_function(grid, _pair_seeds(seed, 0)[0], kind)
        psi = tf.field()
        w = measure_weights(chart, grid, "full")
        split = normal_momentum(chart, normal, psi, hbar) + geometric_momentum_extended(chart, normal, psi, hbar)
        exact = exact_momentum(chart, tf, hbar)
        discrete = full_momentum(chart, psi, hbar)
        rel = _vnorm(exact - split, w) / _vnorm(exact, w)
        cons = _vnorm(discrete - split, w) / _vnorm(discrete, w)
        field_res.append((f"field:{grid.label()}", rel))
        consist_res.append((f"consistency:{grid.label()}", cons))
        field_pts.append((_spacing(grid), rel))
        ok = ok and cons <= SYMBOL_TOL

    residuals = [("symbol", sym)] + consist_res + field_res
    ok = ok and sym <= SYMBOL_TOL
    if len(field_pts) >= 3:
        tol = math.inf if field_tolerance is None else field_tolerance
        fverdict, order = _ladder_verdict(field_pts, fd_order, tol, details)
        if field_tolerance is not None:
            ok = ok and fverdict == "pass"
    elif field_tolerance is not None and field_pts:
        ok = ok and field_pts[-1][1] <= field_tolerance

    params = {
        "normal": normal,
        "seed": seed,
        "points": n_points,
        "ladder": [n if isinstance(n, (int, np.integer)) else list(n) for n in ladder],
        "fd_order": fd_order,
        "hbar": hbar,
        "kind": kind,
        "field_tolerance": field_tolerance,
    }
    return VerificationReport(
        check="decomposition",
        chart=chart.name,
        params=params,
        residuals=residuals,
        tolerance=SYMBOL_TOL if field_tolerance is None else field_tolerance,
        verdict=_verdict(ok),
        convergence_order=order,
        details=details,
    )


# ---------------------------------------------------------------------------
# orthogonality


def orthogonality_symbol_residuals(chart: ChartDef, normal: str | None, points: np.ndarray) -> tuple[float, float]:
    """``max |n . r^mu| / |r^mu|`` and ``max |r^mu . d_mu n + M_sum| / max(1, |M_sum|)``."""
    sg = slice_from_jet(chart, chart_point(chart, points), normal)
    dots = np.abs(np.einsum("...i,...mi->...m", sg.n, sg.r_dual))
    dots = dots / np.linalg.norm(sg.r_dual, axis=-1)
    wc = weingarten_contraction(chart, points, normal)
    wres = np.abs(wc + sg.M_sum) / np.maximum(1.0, np.abs(sg.M_sum))
    return float(np.max(dots)), float(np.max(wres))


def anticommutator(chart: ChartDef, normal: str | None, psi: WaveField, hbar: float = 1.0) -> WaveField:
    """``sum_i (n_i Pi_i + Pi_i n_i) psi`` on a surface grid."""
    grid = psi.grid
    n = slice_symbols(chart, normal, grid).n
    pi_psi = geometric_momentum(chart, normal, psi, hbar).components
    total = np.zeros(grid.shape, dtype=complex)
    for i in range(chart.dim):
        total += n[..., i] * pi_psi[i]
        total += geometric_momentum(chart, normal, WaveField(grid, n[..., i] * psi.values), hbar).components[i]
    return WaveField(grid, total)


def check_orthogonality(
    chart: ChartDef,
    normal: str | None = None,
    seed: int = 0,
    *,
    at: float | None = None,
    ladder: Sequence[int] = (),
    n_points: int = 100,
    fd_order: int = 4,
    hbar: float = 1.0,
    bounds: dict | None = None,
    kind: str = "product",
    tolerance: float = 1e-6,
) -> VerificationReport:
    """``n . Pi + Pi . n = 0`` on the slice ``normal = at``.

    Symbol level over seeded points of the whole chart: ``n . r^mu = 0`` and
    ``r^mu . d_mu n + M_sum = 0``.  Field level on a surface grid ladder:
    ``|(n.Pi + Pi.n) psi| / (|psi| max(1, |M_sum|))`` must converge at the
    FD order (or sit at rounding level, as it does on flat slices).
    """
    normal = normal if normal is not None else chart.normal
    rng = np.random.default_rng(seed)
    pts = sample_points(chart, n_points, rng)
    dot_res, wein_res = orthogonality_symbol_residuals(chart, normal, pts)
    residuals = [("symbol:n.r", dot_res), ("symbol:weingarten", wein_res)]
    ok = dot_res <= SYMBOL_TOL and wein_res <= SYMBOL_TOL
    details: dict = {}
    order = None
    if at is None:
        lo, hi = dict(zip(chart.coord_names, interior_box(chart)))[normal]
        at = 0.5 * (lo + hi)

    if ladder:
        surf = [c for c in chart.coord_names if c != normal]
        field_pts = []
        for n in ladder:
            grid = make_grid(chart, {c: n for c in surf}, fixed={normal: at}, bounds=bounds, fd_order=fd_order)
            psi = make_test_function(grid, _pair_seeds(seed, 0)[0], kind).field()
            w = measure_weights(chart, grid, "surface")
            anti = anticommutator(chart, normal, psi, hbar)
            m_scale = max(1.0, float(np.max(np.abs(slice_symbols(chart, normal, grid).M_sum))))
            psi_norm = float(np.sqrt(np.sum(np.abs(psi.values) ** 2 * w)))
            res = float(np.sqrt(np.sum(np.abs(anti.values) ** 2 * w))) / (hbar * psi_norm * m_scale)
            residuals.append((f"field:{grid.label()}", res))
            field_pts.append((_spacing(grid), res))
        fverdict, order = _ladder_verdict(field_pts, fd_order, tolerance, details)
        ok = ok and fverdict == "pass"

    params = {
        "normal": normal,
        "at": {normal: float(at)},
        "seed": seed,
        "points": n_points,
        "ladder": list(ladder),
        "fd_order": fd_order,
        "hbar": hbar,
        "kind": kind,
    }
    return VerificationReport(
        check="orthogonality",
        chart=chart.name,
        params=params,
        residuals=residuals,
        tolerance=tolerance if ladder else SYMBOL_TOL,
        verdict=_verdict(ok),
        convergence_order=order,
        details=details,
    )


# ---------------------------------------------------------------------------
# curvature


def _sph_basis(p: np.ndarray):
    th, ph = p[..., 1], p[..., 2]
    e_r = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)
    e_th = np.stack([np.cos(th) * np.cos(ph), np.cos(th) * np.sin(ph), -np.sin(th)], axis=-1)
    return e_r, e_th


def _sph_r(chart, p):
    e_r, _ = _sph_basis(p)
    return -e_r / p[..., :1]


def _sph_theta(chart, p):
    _, e_th = _sph_basis(p)
    r, th = p[..., :1], p[..., 1:2]
    return -e_th / (2.0 * r * np.tan(th))


def _zero(chart, p):
    return np.zeros(p.shape[:-1] + (chart.dim,))


def _polar_r(chart, p):
    r, ph = p[..., 0], p[..., 1]
    return -np.stack([np.cos(ph), np.sin(ph)], axis=-1) / r[..., None]


def _cyl_rho(chart, p):
    rho, ph = p[..., 0], p[..., 1]
    e_rho = np.stack([np.cos(ph), np.sin(ph), np.zeros_like(ph)], axis=-1)
    # one principal curvature -1/rho, one 0: M_avg = -1/(2 rho)
    return -e_rho / (2.0 * rho[..., None])


def _torus_w(chart, p):
    R, r = chart.param_values["R"], chart.param_values["r"]
    w, th, ph = p[..., 0], p[..., 1], p[..., 2]
    rho = r + w
    m_sum = -1.0 / rho - np.cos(th) / (R + rho * np.cos(th))
    n = np.stack([np.cos(th) * np.cos(ph), np.cos(th) * np.sin(ph), np.sin(th)], axis=-1)
    return (0.5 * m_sum)[..., None] * n


def _torus_theta(chart, p):
    # theta = const is a cone of revolution: one principal curvature vanishes
    R, r = chart.param_values["R"], chart.param_values["r"]
    w, th, ph = p[..., 0], p[..., 1], p[..., 2]
    m_sum = np.sin(th) / (R + (r + w) * np.cos(th))
    n = np.stack([-np.sin(th) * np.cos(ph), -np.sin(th) * np.sin(ph), np.cos(th)], axis=-1)
    return (0.5 * m_sum)[..., None] * n


# (chart, normal) -> closed-form M_avg * n as a function of the point
CLOSED_FORMS: dict[tuple[str, str], Callable] = {
    ("spherical", "r"): _sph_r,
    ("spherical", "theta"): _sph_theta,
    ("spherical", "phi"): _zero,
    ("cone_chart", "theta"): _sph_theta,
    ("cone_chart", "r"): _sph_r,
    ("cone_chart", "phi"): _zero,
    ("cylindrical", "rho"): _cyl_rho,
    ("cylindrical", "phi"): _zero,
    ("cylindrical", "z"): _zero,
    ("polar2d", "r"): _polar_r,
    ("polar2d", "phi"): _zero,
    ("torus_gn", "w"): _torus_w,
    ("torus_gn", "theta"): _torus_theta,
    ("torus_gn", "phi"): _zero,
}


def check_curvature_closed_forms(chart: ChartDef, seed: int = 0, *, n_points: int = 50,
                                 tolerance: float = SYMBOL_TOL) -> VerificationReport:
    """Compare ``M_avg n`` against stored closed forms for every known slice."""
    slices = [name for (cname, name) in CLOSED_FORMS if cname == chart.name]
    if not slices:
        raise KeyError(f"no closed forms stored for chart {chart.name!r}")
    rng = np.random.default_rng(seed)
    pts = sample_points(chart, n_points, rng)
    ej = chart_point(chart, pts)
    residuals = []
    for name in slices:
        sg = slice_from_jet(chart, ej, name)
        expected = CLOSED_FORMS[(chart.name, name)](chart, pts)
        residuals.append((f"normal={name}", float(np.max(np.abs(sg.M_avg_vec() - expected)))))
    worst = max(v for _, v in residuals)
    return VerificationReport(
        check="curvature",
        chart=chart.name,
        params={"seed": seed, "points": n_points, "slices": slices},
        residuals=residuals,
        tolerance=tolerance,
        verdict=_verdict(worst <= tolerance),
    )


def admissible_normals(chart: ChartDef, points: np.ndarray) -> list[str]:
    """Coordinates whose slices are Gaussian normal over ``points``."""
    out = []
    for name in chart.coord_names:
        if validate_gaussian_normal(chart, name, points).verdict == "gaussian_normal":
            out.append(name)
    return out


def check_curvature_identities(chart: ChartDef, seed: int = 0, *, n_points: int = 100,
                               normals: Sequence[str] | None = None) -> VerificationReport:
    """``(1/sqrt g_00) d_0 ln sqrt g + M_sum = 0`` and ``r^mu . d_mu n + M_sum = 0``.

    Both are checked on every Gaussian-normal slice (or ``normals``),
    relative to ``max(1, |M_sum|)``.
    """
    rng = np.random.default_rng(seed)
    pts = sample_points(chart, n_points, rng)
    ej = chart_point(chart, pts)
    normals = admissible_normals(chart, pts) if normals is None else list(normals)
    residuals = []
    for name in normals:
        sg = slice_from_jet(chart, ej, name)
        scale = np.maximum(1.0, np.abs(sg.M_sum))
        nld = normal_log_derivative(chart, pts, name)
        wc = weingarten_contraction(chart, pts, name)
        residuals.append((f"logdet:{name}", float(np.max(np.abs(nld + sg.M_sum) / scale))))
        residuals.append((f"weingarten:{name}", float(np.max(np.abs(wc + sg.M_sum) / scale))))
    worst = max((v for _, v in residuals), default=0.0)
    return VerificationReport(
        check="curvature-identities",
        chart=chart.name,
        params={"seed": seed, "points": n_points, "normals": normals},
        residuals=residuals,
        tolerance=SYMBOL_TOL,
        verdict=_verdict(bool(normals) and worst <= SYMBOL_TOL),
    )


def check_gaussian_normal(chart: ChartDef, normal: str | None = None, seed: int = 0, *,
                          n_points: int = 100) -> VerificationReport:
    """Pass iff the slicing by ``normal`` is Gaussian normal at seeded points."""
    normal = normal if normal is not None else chart.normal
    rng = np.random.default_rng(seed)
    pts = sample_points(chart, n_points, rng)
    rep = validate_gaussian_normal(chart, normal, pts)
    return VerificationReport(
        check="gn-metric",
        chart=chart.name,
        params={"normal": normal, "seed": seed, "points": n_points},
        residuals=[("max|g_0mu|", rep.max_offdiag), ("max|d0 g_00|", rep.max_d0_g00)],
        tolerance=SYMBOL_TOL,
        verdict=_verdict(rep.verdict == "gaussian_normal"),
        details={"classification": rep.verdict},
    )
