"""The degree-4 harmonicity quartic ``P_{b,r}(y)`` for unequal multiplicities.

With ``b = m2/m1`` and ``y = cos^2(2s)``, a member ``M_s`` of a degree-4
family is proper r-harmonic exactly when ``P_{b,r}(y) = 0``.  The sign of
``P`` agrees with the sign of the residual ``T_r(s)`` because
``T_r(s) = 4 m1^2 P_{b,r}(y) / (y^2 (1-y)^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError
from .exactpoly import (
    Bracket,
    Poly,
    bisect_exact,
    isolate_roots,
    refine_root,
    squarefree_decomposition,
)

Rational = int | Fraction


def as_rational(b) -> Fraction:
    """Coerce an exact input (int, Fraction, or ``"p/q"`` string) to a Fraction."""
    if isinstance(b, float):
        raise TypeError("multiplicity ratio must be exact (int, Fraction or 'p/q'), not float")
    return Fraction(b)


@lru_cache(maxsize=None)
def q_poly(b: Fraction) -> Poly:
    """``Q_b(y) = 2 [2 b^2 (1-y)^3 + b y (1-y) + 2 y^3]``."""
    one_minus = Poly([1, -1])
    y = Poly([0, 1])
    return (one_minus**3 * (2 * b * b) + y * one_minus * b + y**3 * 2) * 2


@lru_cache(maxsize=None)
def r_poly(b: Fraction) -> Poly:
    """``R_b(y) = (1-y) y (b(y-1) + y)^2``; vanishes doubly at ``y0 = b/(1+b)``."""
    lin = Poly([-b, b + 1])
    return Poly([1, -1]) * Poly([0, 1]) * lin * lin


@dataclass(frozen=True)
class HarmonicQuartic:
    b: Fraction
    r: int
    poly: Poly

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        """Coefficients from degree 4 down to degree 0."""
        cs = list(self.poly.coeffs) + [Fraction(0)] * (5 - len(self.poly.coeffs))
        return tuple(reversed(cs))

    @property
    def y0(self) -> Fraction:
        return self.b / (1 + self.b)

    def __call__(self, y):
        return self.poly(y)


def build(b, r: int) -> HarmonicQuartic:
    b = as_rational(b)
    if b <= 0:
        raise DomainError(f"b must be positive, got {b}")
    rr = Fraction(r)
    b2 = b * b
    c4 = b2 * rr + 2 * b * rr + rr
    c3 = -3 * b2 * rr - 4 * b2 - 4 * b * rr - rr + 4
    c2 = 3 * b2 * rr + 12 * b2 + 2 * b * rr - 2 * b
    c1 = -b2 * rr - 12 * b2 + 2 * b
    c0 = 4 * b2
    return HarmonicQuartic(b=b, r=r, poly=Poly([c0, c1, c2, c3, c4]))


@dataclass(frozen=True)
class IsolatedRoot:
    bracket: tuple[Fraction, Fraction]
    value: float
    multiplicity: int

    @property
    def parity(self) -> str:
        return "odd" if self.multiplicity % 2 else "even"

    @property
    def s(self) -> float:
        """Family parameter ``s = arccos(sqrt(y))/2`` of the corresponding member."""
        return parameter_from_y(self.value)


def parameter_from_y(y: float) -> float:
    if y > 0.5:
        # arcsin branch keeps precision when y is close to 1.
        return 0.5 * math.asin(math.sqrt(1.0 - y))
    return 0.5 * math.acos(math.sqrt(y))


def real_roots(p: Poly, lo: Rational, hi: Rational, tol: float = 1e-14) -> list[IsolatedRoot]:
    """Certified real roots of ``p`` in ``(lo, hi)`` with multiplicities.

    Roots of each square-free factor are isolated by Sturm sequences and the
    brackets are shrunk until pairwise disjoint, so each bracket holds one
    distinct root of ``p``.
    """
    found: list[tuple[Poly, int, Bracket]] = []
    for factor, mult in squarefree_decomposition(p):
        for br in isolate_roots(factor, lo, hi):
            found.append((factor, mult, br))
    found.sort(key=lambda t: t[2].lo)
    while True:
        overlap = False
        for i in range(len(found) - 1):
            (fa, ma, ba), (fb, mb, bb) = found[i], found[i + 1]
            if ba.hi >= bb.lo:
                overlap = True
                found[i] = (fa, ma, bisect_exact(fa, ba, (ba.hi - ba.lo) / 4))
                found[i + 1] = (fb, mb, bisect_exact(fb, bb, (bb.hi - bb.lo) / 4))
        if not overlap:
            break
        found.sort(key=lambda t: t[2].lo)
    return [
        IsolatedRoot(bracket=(br.lo, br.hi), value=refine_root(f, br, tol), multiplicity=k)
        for f, k, br in found
    ]


def roots_in_unit_interval(q: HarmonicQuartic) -> list[IsolatedRoot]:
    return real_roots(q.poly, 0, 1)


def root_count(q: HarmonicQuartic) -> int:
    """Number of roots in ``(0, 1)`` counted with multiplicity."""
    return sum(rt.multiplicity for rt in roots_in_unit_interval(q))


def symmetry_check(b, r: int, y) -> tuple:
    """Both sides of ``b^2 P_{1/b,r}(1-y) = P_{b,r}(y)``, evaluated exactly."""
    b = as_rational(b)
    y = Fraction(y)
    lhs = b * b * build(1 / b, r)(1 - y)
    rhs = build(b, r)(y)
    return lhs, rhs


def equal_mult_quadratic(r: int, x):
    """``r x^2 + 20 x + 44 - r``, the equal-multiplicity degree-4 reduction in ``x = cos 8s``."""
    return r * x * x + 20 * x + 44 - r


def equal_mult_consistency(r: int, x) -> tuple[tuple[float, float], object]:
    """Evaluate ``P_{1,r}`` at both preimages ``y(x)`` and the quadratic at ``x``.

    The preimages are ``y = (2 +- sqrt(2) sqrt(x+1))/4``; both lie in ``(0,1)``
    for ``x`` in ``(-1, 1)`` and correspond to the two members with
    ``cos 8s = x``.
    """
    xf = float(x)
    if not -1.0 < xf < 1.0:
        raise DomainError("x must lie in the open interval (-1, 1)")
    p = build(1, r)
    root = math.sqrt(2.0) * math.sqrt(xf + 1.0)
    ys = ((2.0 + root) / 4.0, (2.0 - root) / 4.0)
    quad = equal_mult_quadratic(r, Fraction(x) if not isinstance(x, float) else x)
    return (p.poly.eval_float(ys[0]), p.poly.eval_float(ys[1])), quad
