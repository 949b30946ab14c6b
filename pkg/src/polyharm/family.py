"""Isoparametric families of hypersurfaces in the unit sphere.

A family of degree ``l`` is parametrized by ``s`` in the open interval
``(0, pi/l)``; its ``i``-th principal curvature is ``cot(s + (i-1)*pi/l)``,
with multiplicities alternating ``m1, m2, m1, m2, ...``.  For ``l = 2`` the
member ``M_s`` is the generalised Clifford torus with radii
``R1 = sin s`` and ``R2 = cos s``; for ``l = 1`` it is the small hypersphere
of radius ``sin s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError

DEGREES = (1, 2, 3, 4, 6)

# Bisection stopping rule for the minimal member.
ALPHA_TOL = 1e-14
WIDTH_TOL = 1e-15


@dataclass(frozen=True)
class IsoparametricFamily:
    degree: int
    m1: int
    m2: int | None = None

    def __post_init__(self):
        if self.degree not in DEGREES:
            raise DomainError(f"degree must be one of {DEGREES}, got {self.degree}")
        if self.m2 is None:
            object.__setattr__(self, "m2", self.m1)
        if self.m1 < 1 or self.m2 < 1:
            raise DomainError("multiplicities must be positive integers")
        if self.degree == 1 and self.m2 != self.m1:
            raise DomainError("degree 1 has a single multiplicity")
        if self.degree in (3, 6) and self.m1 != self.m2:
            raise DomainError(f"degree {self.degree} requires m1 == m2")

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(self.m1 if i % 2 == 0 else self.m2 for i in range(self.degree))

    @property
    def dim(self) -> int:
        """Dimension m of the hypersurface (sum of multiplicities)."""
        return sum(self.multiplicities)

    @property
    def period(self) -> float:
        return math.pi / self.degree

    @property
    def equal_multiplicities(self) -> bool:
        return self.m1 == self.m2

    @property
    def ratio(self) -> Fraction:
        """Multiplicity ratio ``b = m2/m1`` as an exact fraction."""
        return Fraction(self.m2, self.m1)


@dataclass(frozen=True)
class CurvatureInvariants:
    s: float
    principal: tuple[tuple[float, int], ...]
    alpha: float
    a2: float

    @property
    def dim(self) -> int:
        return sum(k for _, k in self.principal)

    @property
    def alpha2(self) -> float:
        return self.alpha * self.alpha

    @property
    def cauchy_gap(self) -> float:
        """``|A|^2 - m*alpha^2``, non-negative with equality iff umbilical."""
        return self.a2 - self.dim * self.alpha2


def _check_s(fam: IsoparametricFamily, s: float) -> None:
    if not (0.0 < s < fam.period):
        raise DomainError(
            f"s={s!r} outside the open interval (0, pi/{fam.degree}) = (0, {fam.period!r})"
        )


def _cot(x):
    return np.cos(x) / np.sin(x)


def principal_curvatures(fam: IsoparametricFamily, s: float) -> list[tuple[float, int]]:
    _check_s(fam, s)
    step = math.pi / fam.degree
    return [
        (float(_cot(s + i * step)), mult) for i, mult in enumerate(fam.multiplicities)
    ]


def invariants(fam: IsoparametricFamily, s: float) -> CurvatureInvariants:
    pcs = principal_curvatures(fam, s)
    m = fam.dim
    alpha = math.fsum(k * mult for k, mult in pcs) / m
    a2 = math.fsum(k * k * mult for k, mult in pcs)
    return CurvatureInvariants(s=s, principal=tuple(pcs), alpha=alpha, a2=a2)


def invariants_grid(fam: IsoparametricFamily, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``(alpha, a2)`` on an array of parameters (no domain check)."""
    s = np.asarray(s, dtype=float)
    step = math.pi / fam.degree
    alpha = np.zeros_like(s)
    a2 = np.zeros_like(s)
    for i, mult in enumerate(fam.multiplicities):
        k = _cot(s + i * step)
        alpha += mult * k
        a2 += mult * k * k
    return alpha / fam.dim, a2


def minimal_parameter(fam: IsoparametricFamily) -> float:
    """The unique ``s*`` in ``(0, pi/l)`` where the mean curvature vanishes."""
    if fam.equal_multiplicities:
        return math.pi / (2 * fam.degree)
    if fam.degree == 4:
        return 0.5 * math.acos(math.sqrt(fam.m2 / (fam.m1 + fam.m2)))
    # alpha is strictly decreasing from +inf to -inf on the open interval.
    lo, hi = 0.0, fam.period
    while hi - lo > WIDTH_TOL:
        mid = 0.5 * (lo + hi)
        a = invariants(fam, mid).alpha
        if abs(a) < ALPHA_TOL:
            return mid
        if a > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def clifford_radii(s: float) -> tuple[float, float]:
    """Radii ``(R1, R2)`` of the degree-2 member ``M_s``."""
    return math.sin(s), math.cos(s)
