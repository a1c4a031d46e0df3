import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from curvmom.autodiff import Jet2, chart_point
from curvmom.catalog import SOURCES, get_chart, sample_points
from curvmom.chart_dsl import parse_chart
from curvmom.errors import DomainError, SingularChartPoint
from oracles import fd_hessian, fd_jacobian


def triple(j: Jet2):
    return float(j.value), j.grad.tolist(), j.hess.tolist()


def test_square():
    u = Jet2.variable(3.0, 0, 1)
    assert triple(u * u) == (9.0, [6.0], [[2.0]])


def test_quotient_rule():
    u, v = Jet2.variable(1.0, 0, 2), Jet2.variable(2.0, 1, 2)
    q = u / v
    assert q.grad.tolist() == [0.5, -0.25]
    # d2(u/v)/dv2 = 2u/v^3, d2/dudv = -1/v^2
    np.testing.assert_allclose(q.hess, [[0.0, -0.25], [-0.25, 0.25]])


def test_integer_power():
    u = Jet2.variable(2.0, 0, 1)
    assert triple(u**3) == (8.0, [12.0], [[12.0]])


@pytest.mark.parametrize(
    "fn, x, expected",
    [
        ("sin", 0.0, (0.0, 1.0, 0.0)),
        ("log", 1.0, (0.0, 1.0, -1.0)),
        ("sqrt", 4.0, (2.0, 0.25, -1.0 / 32.0)),
        ("exp", 0.0, (1.0, 1.0, 1.0)),
        ("cos", 0.0, (1.0, 0.0, -1.0)),
        ("sinh", 0.0, (0.0, 1.0, 0.0)),
        ("cosh", 0.0, (1.0, 0.0, 1.0)),
        ("tan", 0.0, (0.0, 1.0, 0.0)),
        ("cot", math.pi / 2, (0.0, -1.0, 0.0)),
    ],
)
def test_elementary(fn, x, expected):
    j = getattr(Jet2.variable(x, 0, 1), fn)()
    v, g, h = expected
    assert float(j.value) == pytest.approx(v, abs=1e-15)
    assert float(j.grad[0]) == pytest.approx(g, abs=1e-15)
    assert float(j.hess[0, 0]) == pytest.approx(h, abs=1e-15)


def test_atan2_derivatives():
    y, x = Jet2.variable(1.0, 0, 2), Jet2.variable(1.0, 1, 2)
    t = Jet2.atan2(y, x)
    assert float(t.value) == pytest.approx(math.pi / 4)
    np.testing.assert_allclose(t.grad, [0.5, -0.5])
    np.testing.assert_allclose(t.hess, [[-0.5, 0.0], [0.0, 0.5]], atol=1e-15)


@pytest.mark.parametrize(
    "make",
    [
        lambda u: u / (u - u),
        lambda u: (u - u).log(),
        lambda u: (u - u).sqrt(),
        lambda u: (-u) ** 0.5,
        lambda u: (u - u).cot(),
    ],
)
def test_domain_errors(make):
    with pytest.raises(DomainError):
        make(Jet2.variable(1.0, 0, 1))


def test_mixed_operands_with_arrays():
    u = Jet2.variable(np.array([1.0, 2.0]), 0, 1)
    j = np.array([1.0, 2.0]) * u + 1.0
    np.testing.assert_array_equal(j.value, [2.0, 5.0])
    np.testing.assert_array_equal(j.grad[..., 0], [1.0, 2.0])
    k = 2.0 / u - np.array([1.0, 1.0])
    np.testing.assert_array_equal(k.value, [1.0, 0.0])


_finite = st.floats(0.2, 3.0)


@given(_finite, _finite, _finite)
def test_hessian_symmetric_exactly(a, b, c):
    x, y, z = (Jet2.variable(v, i, 3) for i, v in enumerate((a, b, c)))
    f = (x * y.sin() + z / x) * (y * z).exp() - Jet2.atan2(z, x) * (x**y)
    assert np.array_equal(f.hess, f.hess.T)


@given(st.floats(0.1, 3.0), st.floats(-2.0, 2.0))
def test_chain_rule_against_finite_differences(a, b):
    def f(x, y):
        return (x * x + y * y + 0.5).sqrt() * y.cos() + x.log() * Jet2.atan2(y, x)

    def g(p):
        return float(f(Jet2.constant(p[0], 2), Jet2.constant(p[1], 2)).value)

    j = f(Jet2.variable(a, 0, 2), Jet2.variable(b, 1, 2))
    h = 1e-6
    fd = [(g([a + h, b]) - g([a - h, b])) / (2 * h), (g([a, b + h]) - g([a, b - h])) / (2 * h)]
    np.testing.assert_allclose(j.grad, fd, rtol=1e-6, atol=1e-8)


# --- chart_point ------------------------------------------------------------


def test_spherical_columns_are_lame():
    ej = chart_point(get_chart("spherical"), [2.0, math.pi / 3, 0.0])
    np.testing.assert_allclose(np.linalg.norm(ej.J, axis=0), [1.0, 2.0, 2.0 * math.sin(math.pi / 3)], rtol=1e-15)


def test_polar_det_is_r():
    for phi in (0.0, 1.0, 4.0):
        ej = chart_point(get_chart("polar2d"), {"r": 1.0, "phi": phi})
        assert abs(np.linalg.det(ej.J)) == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("point", [[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, math.pi, 0.2]])
def test_singular_points(point):
    with pytest.raises(SingularChartPoint) as info:
        chart_point(get_chart("spherical"), point)
    assert info.value.point is not None


def test_outside_domain():
    with pytest.raises(DomainError):
        chart_point(get_chart("spherical"), [-1.0, 1.0, 1.0])


def test_batch_shapes():
    chart = get_chart("torus_gn")
    pts = sample_points(chart, 6, np.random.default_rng(0)).reshape(2, 3, 3)
    ej = chart_point(chart, pts)
    assert ej.x.shape == (2, 3, 3) and ej.J.shape == (2, 3, 3, 3) and ej.H.shape == (2, 3, 3, 3, 3)


@pytest.mark.parametrize("name", list(SOURCES))
def test_ad_matches_finite_differences(name):
    chart = get_chart(name)
    pts = sample_points(chart, 100, np.random.default_rng(11))
    ej = chart_point(chart, pts)
    for p, J, H in zip(pts, ej.J, ej.H):
        Jfd = fd_jacobian(chart, p)
        Hfd = fd_hessian(chart, p)
        assert np.linalg.norm(J - Jfd) <= 1e-7 * np.linalg.norm(J)
        assert np.linalg.norm(H - Hfd) <= 1e-4 * max(np.linalg.norm(H), 1.0)


@pytest.mark.parametrize("name", list(SOURCES))
def test_embedding_hessian_symmetric(name):
    chart = get_chart(name)
    ej = chart_point(chart, sample_points(chart, 50, np.random.default_rng(2)))
    assert np.array_equal(ej.H, np.swapaxes(ej.H, -1, -2))


def test_affine_chart_has_zero_hessian():
    chart = parse_chart(
        "chart shear\ncoords u ; v ; w\nembed 2*u + v - 3\nembed v - w/2\nembed u + w + 1\nend\n"
    )
    ej = chart_point(chart, sample_points(chart, 20, np.random.default_rng(0)))
    assert not np.any(ej.H)
    np.testing.assert_array_equal(ej.J[0], [[2, 1, 0], [0, 1, -0.5], [1, 0, 1]])
