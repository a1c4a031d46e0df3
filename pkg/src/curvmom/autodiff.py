"""Second-order forward-mode automatic differentiation.

:class:`Jet2` carries a value together with its gradient and Hessian with
respect to ``D`` seed variables.  All three slots may be numpy arrays of a
common batch shape ``S``, so a whole grid of points is differentiated in one
pass::

    value: S        grad: S + (D,)        hess: S + (D, D)

The Hessian is symmetric by construction: every rule adds ``a ⊗ b + b ⊗ a``
or ``f''(a) a ⊗ a`` terms, which are bitwise symmetric in IEEE arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from curvmom.chart_dsl import ChartDef, evaluate
from curvmom.errors import DomainError, SingularChartPoint

__all__ = ["Jet2", "EmbeddingJet", "chart_point", "SINGULAR_RTOL"]

SINGULAR_RTOL = 1e-12


def _outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., :, None] * b[..., None, :]


def _sym_outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return _outer(a, b) + _outer(b, a)


def _raise_if(cond, message: str) -> None:
    if np.any(cond):
        raise DomainError(message)


class Jet2:
    """Value with first and second derivatives (a truncated Taylor jet)."""

    __slots__ = ("value", "grad", "hess")
    __array_ufunc__ = None  # make ndarray <op> Jet2 defer to the reflected method

    def __init__(self, value, grad, hess):
        self.value = np.asarray(value, dtype=float)
        self.grad = np.asarray(grad, dtype=float)
        self.hess = np.asarray(hess, dtype=float)

    @classmethod
    def constant(cls, value, dim: int) -> "Jet2":
        v = np.asarray(value, dtype=float)
        return cls(v, np.zeros(v.shape + (dim,)), np.zeros(v.shape + (dim, dim)))

    @classmethod
    def variable(cls, value, index: int, dim: int) -> "Jet2":
        v = np.asarray(value, dtype=float)
        grad = np.zeros(v.shape + (dim,))
        grad[..., index] = 1.0
        return cls(v, grad, np.zeros(v.shape + (dim, dim)))

    @property
    def dim(self) -> int:
        return self.grad.shape[-1]

    def __repr__(self) -> str:
        return f"Jet2(value={self.value!r}, grad={self.grad!r}, hess={self.hess!r})"

    def _lift(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            return other
        return Jet2.constant(other, self.dim)

    def _chain(self, f0, f1, f2) -> "Jet2":
        """Compose with a scalar function given f, f', f'' at ``self.value``."""
        f1 = np.asarray(f1, dtype=float)
        f2 = np.asarray(f2, dtype=float)
        grad = f1[..., None] * self.grad
        hess = f1[..., None, None] * self.hess + f2[..., None, None] * _outer(
            self.grad, self.grad
        )
        return Jet2(f0, grad, hess)

    # arithmetic ----------------------------------------------------------

    def __neg__(self) -> "Jet2":
        return Jet2(-self.value, -self.grad, -self.hess)

    def __pos__(self) -> "Jet2":
        return self

    def __add__(self, other) -> "Jet2":
        if not isinstance(other, Jet2):
            v = self.value + other
            return Jet2(v, np.broadcast_to(self.grad, v.shape + self.grad.shape[-1:]),
                        np.broadcast_to(self.hess, v.shape + self.hess.shape[-2:]))
        return Jet2(self.value + other.value, self.grad + other.grad, self.hess + other.hess)

    __radd__ = __add__

    def __sub__(self, other) -> "Jet2":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Jet2":
        return (-self) + other

    def __mul__(self, other) -> "Jet2":
        if not isinstance(other, Jet2):
            c = np.asarray(other, dtype=float)
            return Jet2(self.value * c, c[..., None] * self.grad, c[..., None, None] * self.hess)
        a, b = self, other
        value = a.value * b.value
        grad = a.value[..., None] * b.grad + b.value[..., None] * a.grad
        hess = (
            a.value[..., None, None] * b.hess
            + b.value[..., None, None] * a.hess
            + _sym_outer(a.grad, b.grad)
        )
        return Jet2(value, grad, hess)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet2":
        _raise_if(self.value == 0, "division by zero")
        inv = 1.0 / self.value
        return self._chain(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other) -> "Jet2":
        if not isinstance(other, Jet2):
            c = np.asarray(other, dtype=float)
            _raise_if(c == 0, "division by zero")
            return self * (1.0 / c)
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> "Jet2":
        return self.reciprocal() * other

    def __pow__(self, other) -> "Jet2":
        if isinstance(other, Jet2):
            _raise_if(self.value <= 0, "power with variable exponent needs a positive base")
            return (other * self.log()).exp()
        p = np.asarray(other, dtype=float)
        if p.ndim == 0 and float(p).is_integer():
            return self._int_pow(int(p))
        _raise_if(self.value <= 0, "non-integer power of non-positive value")
        a = self.value
        return self._chain(a**p, p * a ** (p - 1), p * (p - 1) * a ** (p - 2))

    def _int_pow(self, n: int) -> "Jet2":
        a = self.value
        if n == 0:
            return Jet2.constant(np.ones_like(a), self.dim)
        if n < 0:
            _raise_if(a == 0, "negative power of zero")
        f1 = n * a ** (n - 1) if n != 1 else np.ones_like(a)
        if n == 1:
            f2 = np.zeros_like(a)
        elif n == 2:
            f2 = np.full_like(a, 2.0)
        else:
            f2 = n * (n - 1) * a ** (n - 2)
        return self._chain(a**n, f1, f2)

    def __rpow__(self, other) -> "Jet2":
        c = np.asarray(other, dtype=float)
        _raise_if(c <= 0, "power with variable exponent needs a positive base")
        return (self * np.log(c)).exp()

    # elementary functions --------------------------------------------------

    def sin(self) -> "Jet2":
        s, c = np.sin(self.value), np.cos(self.value)
        return self._chain(s, c, -s)

    def cos(self) -> "Jet2":
        s, c = np.sin(self.value), np.cos(self.value)
        return self._chain(c, -s, -c)

    def tan(self) -> "Jet2":
        c = np.cos(self.value)
        _raise_if(c == 0, "tan where cos = 0")
        t = np.sin(self.value) / c
        sec2 = 1.0 + t * t
        return self._chain(t, sec2, 2.0 * t * sec2)

    def cot(self) -> "Jet2":
        s = np.sin(self.value)
        _raise_if(s == 0, "cot where sin = 0")
        k = np.cos(self.value) / s
        csc2 = 1.0 + k * k
        return self._chain(k, -csc2, 2.0 * k * csc2)

    def exp(self) -> "Jet2":
        e = np.exp(self.value)
        return self._chain(e, e, e)

    def log(self) -> "Jet2":
        _raise_if(self.value <= 0, "log of non-positive value")
        inv = 1.0 / self.value
        return self._chain(np.log(self.value), inv, -inv * inv)

    def sqrt(self) -> "Jet2":
        _raise_if(self.value <= 0, "sqrt needs a positive value to be differentiable")
        s = np.sqrt(self.value)
        return self._chain(s, 0.5 / s, -0.25 / (s * self.value))

    def sinh(self) -> "Jet2":
        sh, ch = np.sinh(self.value), np.cosh(self.value)
        return self._chain(sh, ch, sh)

    def cosh(self) -> "Jet2":
        sh, ch = np.sinh(self.value), np.cosh(self.value)
        return self._chain(ch, sh, ch)

    @staticmethod
    def atan2(y, x) -> "Jet2":
        dim = (y if isinstance(y, Jet2) else x).dim
        y = y if isinstance(y, Jet2) else Jet2.constant(y, dim)
        x = x if isinstance(x, Jet2) else Jet2.constant(x, dim)
        r2 = x.value * x.value + y.value * y.value
        _raise_if(r2 == 0, "atan2(0, 0)")
        ty, tx = x.value / r2, -y.value / r2
        tyy = -2.0 * x.value * y.value / (r2 * r2)
        txx = -tyy
        txy = (y.value * y.value - x.value * x.value) / (r2 * r2)
        e = (..., None)
        ee = (..., None, None)
        grad = ty[e] * y.grad + tx[e] * x.grad
        hess = (
            ty[ee] * y.hess
            + tx[ee] * x.hess
            + tyy[ee] * _outer(y.grad, y.grad)
            + txx[ee] * _outer(x.grad, x.grad)
            + txy[ee] * _sym_outer(y.grad, x.grad)
        )
        return Jet2(np.arctan2(y.value, x.value), grad, hess)


@dataclass(frozen=True)
class EmbeddingJet:
    """Position, Jacobian and Hessian of the embedding at a batch of points.

    Shapes: ``x`` is ``S + (D,)``, ``J[..., i, a] = dx_i/dxi^a`` is
    ``S + (D, D)`` and ``H[..., i, a, b]`` is ``S + (D, D, D)``.
    """

    x: np.ndarray
    J: np.ndarray
    H: np.ndarray

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.x.shape[:-1]


def _as_point_array(chart: ChartDef, point) -> np.ndarray:
    if isinstance(point, Mapping):
        missing = [n for n in chart.coord_names if n not in point]
        if missing:
            raise KeyError(f"point is missing coordinates {missing}")
        return np.stack([np.asarray(point[n], dtype=float) for n in chart.coord_names], axis=-1)
    arr = np.asarray(point, dtype=float)
    if arr.shape[-1:] != (chart.dim,):
        raise ValueError(f"point must have trailing dimension {chart.dim}, got {arr.shape}")
    return arr


def chart_point(chart: ChartDef, point: Sequence[float] | np.ndarray | Mapping) -> EmbeddingJet:
    """Evaluate the embedding and its first two derivatives at ``point``.

    ``point`` is a D-vector, a mapping from coordinate name to value, or an
    array whose last axis has length D (a batch of points).
    """
    pts = _as_point_array(chart, point)
    dim = chart.dim
    for a, c in enumerate(chart.coords):
        if not c.periodic:
            vals = pts[..., a]
            if np.any(vals < c.lower) or np.any(vals > c.upper):
                raise DomainError(
                    f"coordinate {c.name!r} outside [{c.lower}, {c.upper}]"
                )

    env: dict[str, object] = dict(chart.param_values)
    for a, name in enumerate(chart.coord_names):
        env[name] = Jet2.variable(pts[..., a], a, dim)

    batch = pts.shape[:-1]
    comps = []
    for expr in chart.embed:
        val = evaluate(expr, env)
        if not isinstance(val, Jet2):
            val = Jet2.constant(np.broadcast_to(np.asarray(val, float), batch), dim)
        elif val.value.shape != batch:
            val = val + np.zeros(batch)
        comps.append(val)

    x = np.stack([c.value for c in comps], axis=-1)
    J = np.stack([c.grad for c in comps], axis=-2)
    H = np.stack([c.hess for c in comps], axis=-3)

    det = np.abs(np.linalg.det(J))
    cols = np.linalg.norm(J, axis=-2)
    scale = np.prod(cols, axis=-1)
    # a column collapsing to rounding noise (sin(pi) = 1.2e-16) leaves the
    # determinant ratio near 1, so the columns are also compared to each other
    collapsed = np.min(cols, axis=-1) <= SINGULAR_RTOL * np.max(cols, axis=-1)
    bad = (det <= SINGULAR_RTOL * scale) | collapsed
    if np.any(bad):
        where = pts[bad][0] if bad.ndim else pts
        coords = ", ".join(f"{n}={v:.17g}" for n, v in zip(chart.coord_names, where))
        raise SingularChartPoint(
            f"chart {chart.name!r} is singular at ({coords}): |det J| = "
            f"{float(np.atleast_1d(det[bad] if bad.ndim else det)[0]):.3g}",
            point=tuple(float(v) for v in where),
        )
    return EmbeddingJet(x=x, J=J, H=H)
