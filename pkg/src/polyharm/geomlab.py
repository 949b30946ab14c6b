"""Finite-difference geometry of explicit hypersurfaces in the unit sphere.

Charts map a box of angles into Euclidean ``(m+2)``-space with image on the
unit sphere ``S^{m+1}``.  All derivatives are second-order central
differences on the lattice ``u + h*k`` (``k`` an integer offset), evaluated in
``mpmath`` so that nested stencils (the rough Laplacian of the mean curvature
vector, and its square) are limited by truncation error rather than
round-off.

Conventions: ``eta`` is the unit normal of ``M`` inside the sphere, oriented
by a chart-supplied hint (toward the centre axis for small spheres, so the
mean curvature ``f`` is positive); the shape operator is ``g^{-1} b`` with
``b_ij = <d_ij phi, eta>``; the rough Laplacian is the positive operator
``-g^{ij}(nabla_i nabla_j - Gamma^k_ij nabla_k)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import mpmath
import numpy as np
import scipy.linalg

from .criterion import HarmonicityQuery, residual
from .errors import DiscretizationError, PreconditionError, UnsupportedError

DPS = 40
COND_MAX = 1e8
POLE_MARGIN = math.pi / 8
# Constancy of f and |A|^2 across samples, relative.
CONSTANCY_RTOL = 1e-6
CRITERION_RTOL = 1e-6


def _sphere_point(angles: Sequence) -> list:
    """Hyperspherical coordinates on ``S^n`` in ``R^{n+1}``, ``n = len(angles)``."""
    out = []
    prod = mpmath.mpf(1)
    for a in angles:
        out.append(prod * mpmath.cos(a))
        prod *= mpmath.sin(a)
    out.append(prod)
    return out


@dataclass(frozen=True)
class Chart:
    """A parametrized hypersurface ``M^m`` of ``S^{m+1}``."""

    kind: str
    dim: int
    params: dict
    map: Callable[[Sequence], list] = field(compare=False, repr=False)
    hint: Callable[[list], list] = field(compare=False, repr=False)

    @property
    def ambient_dim(self) -> int:
        return self.dim + 2

    @property
    def box(self) -> tuple[tuple[float, float], ...]:
        return tuple((POLE_MARGIN, math.pi - POLE_MARGIN) for _ in range(self.dim))

    def default_point(self) -> tuple[float, ...]:
        return tuple(math.pi / 2 - 0.2 + 0.13 * i for i in range(self.dim))

    def sample_points(self, n: int = 3, seed: int = 0) -> list[tuple[float, ...]]:
        rng = np.random.default_rng(seed)
        lo, hi = POLE_MARGIN + 0.1, math.pi - POLE_MARGIN - 0.1
        return [tuple(rng.uniform(lo, hi, self.dim)) for _ in range(n)]


def small_sphere(R: float, m: int) -> Chart:
    """``S^m(R)`` as the latitude ``x_{m+2} = sqrt(1 - R^2)`` of the unit sphere."""
    if not 0 < R <= 1:
        raise PreconditionError("small sphere radius must lie in (0, 1]")
    Rm = mpmath.mpf(R) if not isinstance(R, mpmath.mpf) else R

    def phi(u):
        with mpmath.workdps(DPS):
            height = mpmath.sqrt(1 - Rm * Rm)
            return [Rm * c for c in _sphere_point(u)] + [height]

    def hint(x):
        return [mpmath.mpf(0)] * (m + 1) + [mpmath.mpf(1)]

    return Chart("small_sphere", m, {"R": float(R)}, phi, hint)


def clifford_torus(m1: int, m2: int, R1: float, R2: float | None = None) -> Chart:
    """``S^{m1}(R1) x S^{m2}(R2)`` with ``R1^2 + R2^2 = 1``."""
    R1m = mpmath.mpf(R1)
    R2m = mpmath.sqrt(1 - R1m * R1m) if R2 is None else mpmath.mpf(R2)
    if abs(float(R1m * R1m + R2m * R2m) - 1) > 1e-12:
        raise PreconditionError("Clifford torus radii must satisfy R1^2 + R2^2 = 1")

    def phi(u):
        with mpmath.workdps(DPS):
            return [R1m * c for c in _sphere_point(u[:m1])] + [
                R2m * c for c in _sphere_point(u[m1:])
            ]

    def hint(x):
        return [-c for c in x[: m1 + 1]] + list(x[m1 + 1 :])

    return Chart(
        "clifford_torus", m1 + m2,
        {"m1": m1, "m2": m2, "R1": float(R1m), "R2": float(R2m)}, phi, hint,
    )


# ---------------------------------------------------------------------------
# Vector helpers on lists of mpf


def _dot(a, b):
    return mpmath.fsum(x * y for x, y in zip(a, b))


def _axpy(alpha, x, y):
    return [alpha * xi + yi for xi, yi in zip(x, y)]


def _scale(alpha, x):
    return [alpha * xi for xi in x]


def _sub(a, b):
    return [x - y for x, y in zip(a, b)]


def _add(a, b):
    return [x + y for x, y in zip(a, b)]


class _Lattice:
    """Chart data on the offset lattice ``u + h*k`` with per-offset caches."""

    def __init__(self, chart: Chart, u: Sequence[float], h: float):
        self.chart = chart
        self.m = chart.dim
        self.u = [mpmath.mpf(x) for x in u]
        self.h = mpmath.mpf(h)
        self._phi: dict = {}
        self._geo: dict = {}

    def _shift(self, k, i, d):
        k = list(k)
        k[i] += d
        return tuple(k)

    def phi(self, k):
        if k not in self._phi:
            self._phi[k] = self.chart.map([ui + ki * self.h for ui, ki in zip(self.u, k)])
        return self._phi[k]

    def d1(self, f, k, i):
        return _scale(1 / (2 * self.h), _sub(f(self._shift(k, i, 1)), f(self._shift(k, i, -1))))

    def d2(self, f, k, i, j):
        h = self.h
        if i == j:
            acc = _add(f(self._shift(k, i, 1)), f(self._shift(k, i, -1)))
            return _scale(1 / (h * h), _axpy(-2, f(k), acc))
        pp = f(self._shift(self._shift(k, i, 1), j, 1))
        pm = f(self._shift(self._shift(k, i, 1), j, -1))
        mp_ = f(self._shift(self._shift(k, i, -1), j, 1))
        mm = f(self._shift(self._shift(k, i, -1), j, -1))
        return _scale(1 / (4 * h * h), _add(_sub(pp, pm), _sub(mm, mp_)))

    def geometry(self, k) -> "_PointGeometry":
        if k not in self._geo:
            self._geo[k] = _PointGeometry(self, k)
        return self._geo[k]

    def rough_laplacian(self, section: Callable, k) -> list:
        """Positive rough Laplacian of a section of ``phi^{-1} T S^{m+1}`` at offset ``k``."""
        g = self.geometry(k)
        m = self.m
        x = g.x
        v = section(k)
        dv = [self.d1(section, k, i) for i in range(m)]
        pdv = [g.project(d) for d in dv]
        out = [mpmath.mpf(0)] * len(x)
        for i in range(m):
            for j in range(m):
                w = g.ginv[i, j]
                if w == 0:
                    continue
                term = g.project(self.d2(section, k, i, j))
                term = _axpy(_dot(g.X[j], v), g.X[i], term)
                for kk in range(m):
                    term = _axpy(-g.christoffel[kk][i][j], pdv[kk], term)
                out = _axpy(-w, term, out)
        return out


class _PointGeometry:
    def __init__(self, lat: _Lattice, k):
        m = lat.m
        self.x = lat.phi(k)
        self.X = [lat.d1(lat.phi, k, i) for i in range(m)]
        self.Xij = [[lat.d2(lat.phi, k, i, j) for j in range(m)] for i in range(m)]
        g = mpmath.matrix(m, m)
        for i in range(m):
            for j in range(m):
                g[i, j] = _dot(self.X[i], self.X[j])
        cond = np.linalg.cond(np.array(g.tolist(), dtype=float))
        if not np.isfinite(cond) or cond > COND_MAX:
            raise DiscretizationError(f"metric condition number {cond:.3g} exceeds {COND_MAX:g}")
        self.g = g
        self.ginv = g**-1
        self.eta = self._normal(lat.chart.hint(self.x))
        b = mpmath.matrix(m, m)
        for i in range(m):
            for j in range(m):
                b[i, j] = _dot(self.Xij[i][j], self.eta)
        b = (b + b.T) / 2
        self.b = b
        self.shape = self.ginv * b
        self.f = sum(self.shape[i, i] for i in range(m)) / m
        s2 = self.shape * self.shape
        self.a2 = sum(s2[i, i] for i in range(m))
        self.christoffel = [
            [
                [
                    mpmath.fsum(self.ginv[kk, l] * _dot(self.X[l], self.Xij[i][j]) for l in range(m))
                    for j in range(m)
                ]
                for i in range(m)
            ]
            for kk in range(m)
        ]

    def _normal(self, hint):
        basis = []
        for v in [self.x] + self.X:
            w = list(v)
            for e in basis:
                w = _axpy(-_dot(w, e), e, w)
            basis.append(_scale(1 / mpmath.sqrt(_dot(w, w)), w))
        n = list(hint)
        for e in basis:
            n = _axpy(-_dot(n, e), e, n)
        norm = mpmath.sqrt(_dot(n, n))
        if norm < mpmath.mpf(10) ** -20:
            raise DiscretizationError("normal hint is tangent to the hypersurface")
        return _scale(1 / norm, n)

    def project(self, v):
        """Tangential projection onto ``T S^{m+1}`` at this point."""
        x = self.x
        return _axpy(-_dot(v, x) / _dot(x, x), x, v)

    def mean_curvature_vector(self):
        return _scale(self.f, self.eta)

    def eigenvalues(self) -> np.ndarray:
        g = np.array(self.g.tolist(), dtype=float)
        b = np.array(self.b.tolist(), dtype=float)
        return np.sort(scipy.linalg.eigh(b, g, eigvals_only=True))


def _to_array(v) -> np.ndarray:
    return np.array([float(c) for c in v])


@dataclass(frozen=True)
class FundamentalForms:
    metric: np.ndarray
    shape_eigenvalues: np.ndarray
    f: float
    a2: float
    eta: np.ndarray

    @property
    def alpha2(self) -> float:
        return self.f * self.f


def _raw_forms(chart: Chart, u, h) -> FundamentalForms:
    with mpmath.workdps(DPS):
        geo = _Lattice(chart, u, h).geometry((0,) * chart.dim)
        return FundamentalForms(
            metric=np.array(geo.g.tolist(), dtype=float),
            shape_eigenvalues=geo.eigenvalues(),
            f=float(geo.f),
            a2=float(geo.a2),
            eta=_to_array(geo.eta),
        )


def _check_interior(chart: Chart, u, h) -> None:
    if h <= 0:
        raise PreconditionError("step h must be positive")
    if len(u) != chart.dim:
        raise PreconditionError(f"point has {len(u)} coordinates, chart needs {chart.dim}")
    for ui, (lo, hi) in zip(u, chart.box):
        if not (lo + 2 * h <= ui <= hi - 2 * h):
            raise PreconditionError(f"u={tuple(u)} is not interior to the chart box by 2h")


def fundamental_forms(chart: Chart, u=None, h: float = 1e-3, extrapolate: bool = True) -> FundamentalForms:
    """Metric, shape-operator eigenvalues, mean curvature and ``|A|^2`` at ``u``.

    The stencil is second order.  With ``extrapolate`` the results at ``h`` and
    ``h/2`` are combined by one Richardson step, cancelling the ``h^2`` term.
    """
    u = chart.default_point() if u is None else tuple(u)
    _check_interior(chart, u, h)
    coarse = _raw_forms(chart, u, h)
    if not extrapolate:
        return coarse
    fine = _raw_forms(chart, u, h / 2)

    def rich(a, b):
        return (4 * b - a) / 3

    return FundamentalForms(
        metric=rich(coarse.metric, fine.metric),
        shape_eigenvalues=rich(coarse.shape_eigenvalues, fine.shape_eigenvalues),
        f=rich(coarse.f, fine.f),
        a2=rich(coarse.a2, fine.a2),
        eta=fine.eta,
    )


def _laplacian_power(chart: Chart, u, h, p: int) -> tuple[np.ndarray, float, float, np.ndarray]:
    """``Delta^p H`` at ``u`` together with ``f``, ``|A|^2`` and ``eta`` there."""
    with mpmath.workdps(DPS):
        lat = _Lattice(chart, u, h)
        section = lambda k: lat.geometry(k).mean_curvature_vector()  # noqa: E731
        for _ in range(p):
            prev = section
            cache: dict = {}

            def section(k, prev=prev, cache=cache):
                if k not in cache:
                    cache[k] = lat.rough_laplacian(prev, k)
                return cache[k]

        base = (0,) * chart.dim
        geo = lat.geometry(base)
        return _to_array(section(base)), float(geo.f), float(geo.a2), _to_array(geo.eta)


def verify_mean_curvature_laplacian(chart: Chart, u=None, h: float = 1e-3) -> np.ndarray:
    """``Delta H - f |A|^2 eta`` for a CMC chart; vanishes as ``O(h^2)``."""
    return verify_power_law(chart, 1, u, h)


def verify_power_law(chart: Chart, p: int, u=None, h: float = 1e-3) -> np.ndarray:
    """``Delta^p H - alpha |A|^{2p} eta`` for a CMC chart with constant ``|A|^2``."""
    if p not in (1, 2):
        raise UnsupportedError("power law is verified numerically only for p in {1, 2}")
    u = chart.default_point() if u is None else tuple(u)
    _check_interior(chart, u, (p + 1) * h)
    lap, f, a2, eta = _laplacian_power(chart, u, h, p)
    return lap - f * a2**p * eta


@dataclass(frozen=True)
class GeomReport:
    chart: Chart
    points: tuple[tuple[float, ...], ...]
    forms: tuple[FundamentalForms, ...]

    @property
    def f_values(self) -> np.ndarray:
        return np.array([ff.f for ff in self.forms])

    @property
    def a2_values(self) -> np.ndarray:
        return np.array([ff.a2 for ff in self.forms])

    @property
    def f_spread(self) -> float:
        return float(np.ptp(self.f_values))

    @property
    def a2_spread(self) -> float:
        return float(np.ptp(self.a2_values))

    @cached_property
    def is_constant(self) -> bool:
        f_ok = self.f_spread <= CONSTANCY_RTOL * max(1.0, float(np.max(np.abs(self.f_values))))
        a_ok = self.a2_spread <= CONSTANCY_RTOL * max(1.0, float(np.max(self.a2_values)))
        return f_ok and a_ok


def survey(chart: Chart, points=None, h: float = 1e-3) -> GeomReport:
    points = chart.sample_points() if points is None else [tuple(p) for p in points]
    forms = tuple(fundamental_forms(chart, p, h) for p in points)
    return GeomReport(chart, tuple(points), forms)


def check_criterion_on_chart(chart: Chart, r: int, points=None, h: float = 1e-3) -> bool:
    """Evaluate ``|A|^4 - m|A|^2 - (r-2) m^2 alpha^2`` from numerical invariants."""
    report = survey(chart, points, h)
    if not report.is_constant:
        raise PreconditionError(
            f"chart invariants are not constant (f spread {report.f_spread:.3g}, "
            f"|A|^2 spread {report.a2_spread:.3g})"
        )
    f = float(np.mean(report.f_values))
    a2 = float(np.mean(report.a2_values))
    t = residual(HarmonicityQuery(c=1, m=chart.dim, r=r, a2=a2, alpha2=f * f))
    return abs(t) < CRITERION_RTOL * max(1.0, a2 * a2)
