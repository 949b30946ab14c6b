"""The r-harmonicity criterion for CMC hypersurfaces with constant |A|^2.

In a space form of curvature ``c`` a non-minimal CMC hypersurface with
constant ``|A|^2`` is proper r-harmonic (``r >= 3``) iff

    T = |A|^4 - m c |A|^2 - (r - 2) m^2 c alpha^2 = 0.

For isoparametric families in the unit sphere ``T`` becomes a function
``T_r(s)`` of the family parameter; the equal-multiplicity cases reduce to
quadratics in ``x = cos(2 l s)`` and the degree-4 unequal case to the
quartic in :mod:`polyharm.quartic`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import quartic
from .errors import PreconditionError, UnsupportedError, VerificationError
from .exactpoly import Poly
from .family import (
    CurvatureInvariants,
    IsoparametricFamily,
    invariants,
    invariants_grid,
)

# Relative tolerance (w.r.t. |A|^4) for re-verifying a classified member.
CLASSIFY_RTOL = 1e-9
# A sampled local minimum of T below this fraction of |A|^4 counts as a tangency.
TANGENCY_RTOL = 1e-6
DEFAULT_EPS = 1e-4
DEFAULT_GRID = 100_000

# (B, C0) in r x^2 + B x + C0 - r for l = 3, 4, 6 with equal multiplicities.
_QUADRATICS = {3: (14, 22), 4: (20, 44), 6: (32, 112)}


@dataclass(frozen=True)
class HarmonicityQuery:
    c: object
    m: int
    r: int
    a2: object = 0
    alpha2: object = 0


def residual(q: HarmonicityQuery):
    """``|A|^4 - m c |A|^2 - (r-2) m^2 c alpha^2``; exact for rational inputs."""
    return q.a2 * q.a2 - q.m * q.c * q.a2 - (q.r - 2) * q.m * q.m * q.c * q.alpha2


def nonexistence_flat_or_negative(q: HarmonicityQuery) -> bool:
    """Whether ``T = 0`` forces ``|A|^2 = alpha^2 = 0`` when ``c <= 0``.

    ``T`` is a quadratic form in ``(|A|^2, alpha^2)`` on the cone
    ``|A|^2 >= m alpha^2 >= 0``: ``|A|^4`` plus the terms with coefficients
    ``-m c`` and ``-(r-2) m^2 c``.  When all three coefficients are
    non-negative and the leading one positive, the only zero on the cone is
    the origin, i.e. the hypersurface is minimal.
    """
    if q.c > 0:
        raise PreconditionError("nonexistence check requires c <= 0")
    if q.r < 2:
        raise PreconditionError("nonexistence check requires r >= 2")
    c = Fraction(q.c)
    lead = Fraction(1)
    lin = -q.m * c
    cross = -(q.r - 2) * q.m * q.m * c
    return lead > 0 and lin >= 0 and cross >= 0


def family_residual(fam: IsoparametricFamily, r: int, s: float) -> float:
    inv = invariants(fam, s)
    return residual(HarmonicityQuery(c=1, m=fam.dim, r=r, a2=inv.a2, alpha2=inv.alpha2))


def residual_grid(fam: IsoparametricFamily, r: int, s: np.ndarray) -> np.ndarray:
    alpha, a2 = invariants_grid(fam, s)
    m = fam.dim
    return a2 * a2 - m * a2 - (r - 2) * m * m * alpha * alpha


# ---------------------------------------------------------------------------
# Equal multiplicities: quadratic reductions


def degree_quadratic(degree: int, r: int, m1: int | None = None, m2: int | None = None):
    """Coefficients ``(A, B, C)`` of ``A x^2 + B x + C`` with ``x = cos(2 l s)``."""
    if degree not in _QUADRATICS:
        raise UnsupportedError(f"no quadratic reduction for degree {degree}")
    if m1 is not None and m2 is not None and m1 != m2:
        raise UnsupportedError("quadratic reduction needs equal multiplicities")
    b, c0 = _QUADRATICS[degree]
    return (r, b, c0 - r)


@dataclass(frozen=True)
class QuadraticRoot:
    value: float
    exact: Fraction | None
    multiplicity: int


def _quadratic_roots(degree: int, r: int) -> list[QuadraticRoot]:
    a, b, c = degree_quadratic(degree, r)
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    sq = math.isqrt(disc)
    if sq * sq == disc:
        exact = sorted({Fraction(-b - sq, 2 * a), Fraction(-b + sq, 2 * a)})
        mult = 2 if disc == 0 else 1
        roots = [QuadraticRoot(float(x), x, mult) for x in exact]
    else:
        d = math.sqrt(disc)
        # Stable pairing: the larger-magnitude root first, the other via Vieta.
        big = (-b - d) / (2 * a) if b > 0 else (-b + d) / (2 * a)
        small = c / (a * big)
        roots = [QuadraticRoot(x, None, 1) for x in sorted((big, small))]
    return [rt for rt in roots if -1 < (rt.exact if rt.exact is not None else rt.value) < 1]


def degree_roots(degree: int, r: int) -> list[float]:
    """Admissible roots ``x1 <= x2`` in ``(-1, 1)``; a double root is listed twice."""
    out: list[float] = []
    for rt in _quadratic_roots(degree, r):
        out.extend([rt.value] * rt.multiplicity)
    return out


def roots_to_parameters(degree: int, roots) -> tuple[list[float], list[str]]:
    """Members ``s`` in ``(0, pi/l)`` with ``cos(2 l s) = x`` for each root ``x``."""
    params: list[float] = []
    notes: list[str] = []
    for x in roots:
        xf = float(x)
        if not -1.0 < xf < 1.0:
            notes.append(
                f"root x={xf!r} excluded: cos(2*{degree}*s)=+-1 is a focal or minimal boundary case"
            )
            continue
        t = math.acos(xf)
        params.extend([t / (2 * degree), (2 * math.pi - t) / (2 * degree)])
    return sorted(params), notes


# ---------------------------------------------------------------------------
# Degrees 1 and 2 (small spheres, generalised Clifford tori)


def clifford_polynomial(m1: int, m2: int, r: int) -> Poly:
    """``t^2 (1-t)^2 T_r`` as a polynomial in ``t = sin^2 s`` for degree 2."""
    t = Poly([0, 1])
    u = Poly([1, -1])
    m = m1 + m2
    a = u * u * m1 + t * t * m2
    mean = u * m1 - t * m2
    return a * a - a * t * u * m - mean * mean * t * u * (r - 2)


def _proper_clifford_roots(m1: int, m2: int, r: int) -> list[quartic.IsolatedRoot]:
    p = clifford_polynomial(m1, m2, r)
    # The minimal torus (alpha = 0, |A|^2 = m) always solves T = 0; divide it out.
    t0 = Fraction(m1, m1 + m2)
    lin = Poly([-t0, 1])
    while p(t0) == 0:
        p = p // lin
    return quartic.real_roots(p, 0, 1)


# ---------------------------------------------------------------------------
# Classification


@dataclass(frozen=True)
class Solution:
    s: float
    invariants: CurvatureInvariants
    residual: float
    multiplicity: int = 1
    # The algebraic root the member came from (x, y or t depending on degree).
    root: float | None = None


@dataclass(frozen=True)
class ClassificationResult:
    family: IsoparametricFamily
    r: int
    solutions: tuple[Solution, ...] = field(default_factory=tuple)
    notes: tuple[str, ...] = ()

    @property
    def count(self) -> int:
        return sum(sol.multiplicity for sol in self.solutions)

    @property
    def regime(self) -> str:
        return "some" if self.solutions else "none"


def _verified(fam: IsoparametricFamily, r: int, s: float, mult: int, root) -> Solution:
    inv = invariants(fam, s)
    t = residual(HarmonicityQuery(c=1, m=fam.dim, r=r, a2=inv.a2, alpha2=inv.alpha2))
    if abs(t) >= CLASSIFY_RTOL * inv.a2 * inv.a2:
        raise VerificationError(
            f"member s={s!r} of {fam} fails re-verification: T={t!r}, |A|^2={inv.a2!r}"
        )
    return Solution(s=s, invariants=inv, residual=t, multiplicity=mult, root=root)


def classify(fam: IsoparametricFamily, r: int) -> ClassificationResult:
    """All proper r-harmonic members of the family, each re-verified through ``T``."""
    if r < 2:
        raise PreconditionError("r must be >= 2")
    sols: list[Solution] = []
    notes: list[str] = []
    if fam.degree in _QUADRATICS and fam.equal_multiplicities:
        for rt in _quadratic_roots(fam.degree, r):
            params, nts = roots_to_parameters(fam.degree, [rt.value])
            notes.extend(nts)
            sols.extend(_verified(fam, r, s, rt.multiplicity, rt.value) for s in params)
    elif fam.degree == 4:
        q = quartic.build(fam.ratio, r)
        for rt in quartic.roots_in_unit_interval(q):
            sols.append(_verified(fam, r, rt.s, rt.multiplicity, rt.value))
    elif fam.degree == 2:
        for rt in _proper_clifford_roots(fam.m1, fam.m2, r):
            s = math.asin(math.sqrt(rt.value))
            sols.append(_verified(fam, r, s, rt.multiplicity, rt.value))
    elif fam.degree == 1:
        # cot^2 s = r - 1, i.e. the sphere of radius 1/sqrt(r), with both orientations.
        s = math.atan2(1.0, math.sqrt(r - 1))
        for si in (s, math.pi - s):
            sols.append(_verified(fam, r, si, 1, None))
    else:
        raise UnsupportedError(f"cannot classify degree {fam.degree}")
    sols.sort(key=lambda sol: sol.s)
    return ClassificationResult(family=fam, r=r, solutions=tuple(sols), notes=tuple(notes))


# ---------------------------------------------------------------------------
# Brute-force oracle


@dataclass(frozen=True)
class ScanBracket:
    lo: float
    hi: float
    kind: str  # "sign" or "tangent"


@dataclass
class ScanResult:
    s: np.ndarray
    values: np.ndarray
    brackets: list[ScanBracket]

    @property
    def count(self) -> int:
        """Solutions implied by the brackets (a tangency counts twice)."""
        return sum(2 if br.kind == "tangent" else 1 for br in self.brackets)

    @property
    def any_negative(self) -> bool:
        return bool(np.any(self.values < 0))


def sign_change_brackets(s: np.ndarray, values: np.ndarray, scale: np.ndarray) -> list[ScanBracket]:
    """Sign changes between consecutive samples, plus near-zero local minima."""
    out: list[ScanBracket] = []
    sign = np.sign(values)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    for i in idx:
        out.append(ScanBracket(float(s[i]), float(s[i + 1]), "sign"))
    exact = np.nonzero(sign == 0)[0]
    for i in exact:
        j0, j1 = max(i - 1, 0), min(i + 1, len(s) - 1)
        out.append(ScanBracket(float(s[j0]), float(s[j1]), "sign"))
    interior = np.arange(1, len(s) - 1)
    v = values[interior]
    is_min = (v > 0) & (v <= values[interior - 1]) & (v <= values[interior + 1])
    tiny = v < TANGENCY_RTOL * scale[interior]
    for i in interior[is_min & tiny]:
        out.append(ScanBracket(float(s[i - 1]), float(s[i + 1]), "tangent"))
    out.sort(key=lambda br: br.lo)
    return out


def scan_grid(fam: IsoparametricFamily, grid_size: int, eps: float = DEFAULT_EPS) -> np.ndarray:
    return np.linspace(eps, fam.period - eps, grid_size)


def scan_residual(
    fam: IsoparametricFamily,
    r: int,
    grid_size: int = DEFAULT_GRID,
    eps: float = DEFAULT_EPS,
    s: np.ndarray | None = None,
) -> ScanResult:
    """Sample ``T_r`` on a uniform grid of ``[eps, pi/l - eps]`` and bracket its zeros."""
    if s is None:
        if grid_size < 16:
            raise PreconditionError("grid_size must be >= 16")
        s = scan_grid(fam, grid_size, eps)
    alpha, a2 = invariants_grid(fam, s)
    m = fam.dim
    values = a2 * a2 - m * a2 - (r - 2) * m * m * alpha * alpha
    return ScanResult(s=s, values=values, brackets=sign_change_brackets(s, values, a2 * a2))


def refine_scan(fam: IsoparametricFamily, r: int, scan: ScanResult, xtol: float = 1e-14) -> list[float]:
    """Zeros of ``T_r`` inside each scan bracket; a tangency is listed twice."""
    out: list[float] = []
    f = lambda s: family_residual(fam, r, s)  # noqa: E731
    for br in scan.brackets:
        if br.kind == "sign" and f(br.lo) * f(br.hi) <= 0:
            out.append(brentq(f, br.lo, br.hi, xtol=xtol))
        else:
            res = minimize_scalar(f, bounds=(br.lo, br.hi), method="bounded",
                                  options={"xatol": xtol})
            out.extend([float(res.x)] * 2)
    return sorted(out)


# ---------------------------------------------------------------------------
# Trigonometric forms of T_r(s) for the equal-multiplicity degrees and l = 4


def expanded_residual(fam: IsoparametricFamily, r: int, s):
    """``T_r(s)`` written out in tangents and cotangents of shifted angles."""
    s = np.asarray(s, dtype=float)
    tan, pi = np.tan, np.pi

    def cot(x):
        return 1.0 / np.tan(x)

    m1, m2 = fam.m1, fam.m2
    if fam.degree == 3:
        first = tan(pi / 6 - s) - tan(s + pi / 6) + cot(s)
        squares = tan(pi / 6 - s) ** 2 + tan(s + pi / 6) ** 2 + cot(s) ** 2
        return m1**2 * ((2 - r) * first**2 + squares**2 - 3 * squares)
    if fam.degree == 6:
        first = (
            -tan(pi / 6 - s) + tan(s) + tan(s + pi / 6)
            + cot(pi / 6 - s) - cot(s) - cot(s + pi / 6)
        )
        squares = (
            tan(pi / 6 - s) ** 2 + tan(s) ** 2 + tan(s + pi / 6) ** 2
            + cot(pi / 6 - s) ** 2 + cot(s) ** 2 + cot(s + pi / 6) ** 2
        )
        return m1**2 * ((2 - r) * first**2 - 6 * squares + squares**2)
    if fam.degree == 4:
        mean = m1 / tan(2 * s) - m2 * tan(2 * s)
        squares = (
            m1 * tan(s) ** 2 + m1 * cot(s) ** 2
            + m2 * tan(s + pi / 4) ** 2 + m2 * cot(s + pi / 4) ** 2
        )
        return -4 * (r - 2) * mean**2 + squares**2 - 2 * (m1 + m2) * squares
    raise UnsupportedError(f"no trigonometric form for degree {fam.degree}")


def reduced_residual(fam: IsoparametricFamily, r: int, s):
    """``T_r(s)`` after collapsing to multiple angles; same function as the expanded form."""
    s = np.asarray(s, dtype=float)
    sin, cos = np.sin, np.cos
    m1, m2 = fam.m1, fam.m2
    if fam.degree == 3:
        return (
            9 * m1**2 * (r * cos(12 * s) - r + 28 * cos(6 * s) + 44)
            / (8 * sin(s) ** 4 * (2 * cos(2 * s) + 1) ** 4)
        )
    if fam.degree == 6:
        return (
            9 * m1**2 * (r * cos(24 * s) - r + 64 * cos(12 * s) + 224)
            / (32 * sin(s) ** 4 * cos(s) ** 4 * (2 * cos(4 * s) + 1) ** 4)
        )
    if fam.degree == 4 and fam.equal_multiplicities:
        return 2 * m1**2 * (r * cos(16 * s) - r + 40 * cos(8 * s) + 88) / sin(4 * s) ** 4
    if fam.degree == 4:
        sec2 = 1.0 / cos(2 * s) ** 2
        return (
            4 * r * (m1 + m2) ** 2
            + 4 * m2 * sec2 * (2 * m1 - m2 * (r + 4) + 4 * m2 * sec2)
            + m1 * (cos(4 * s) * (m1 * (r + 4) - 2 * m2) - m1 * (r - 4) + 2 * m2)
            / (8 * sin(s) ** 4 * cos(s) ** 4)
        )
    raise UnsupportedError(f"no reduced form for degree {fam.degree}")


def quartic_residual(fam: IsoparametricFamily, r: int, s):
    """``T_r(s) = 4 m1^2 P_{b,r}(y) / (y^2 (1-y)^2)`` with ``y = cos^2(2s)``."""
    if fam.degree != 4:
        raise UnsupportedError("the quartic form applies to degree 4 only")
    s = np.asarray(s, dtype=float)
    y = np.cos(2 * s) ** 2
    p = quartic.build(fam.ratio, r).poly
    vals = np.zeros_like(y)
    for c in reversed(p.coeffs):
        vals = vals * y + float(c)
    return 4 * fam.m1**2 * vals / (y * y * (1 - y) ** 2)
