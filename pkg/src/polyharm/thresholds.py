"""Critical orders r*(b), r**(b) for degree-4 families with ``b = m2/m1``.

``P_{b,r} = Q_b - r R_b`` and ``R_b > 0`` away from ``y0 = b/(1+b)``, so
``P_{b,r}`` has a root in ``(0, y0)`` (resp. ``(y0, 1)``) exactly when
``r >= R1`` (resp. ``r >= R2``), where ``R1, R2`` are the minima of
``Q_b/R_b`` on the two sides of the pole.  The minima are located by
isolating the real roots of the derivative numerator
``Q_b' R_b - Q_b R_b'`` with exact Sturm sequences; the ratio is then
evaluated exactly at a rational point within 1e-30 of each critical point.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import quartic
from .criterion import ScanResult, residual_grid, sign_change_brackets
from .errors import PoleError, PreconditionError
from .exactpoly import Bracket, Poly, bisect_exact, isolate_roots, refine_root
from .family import IsoparametricFamily, invariants_grid, minimal_parameter

log = logging.getLogger(__name__)

INTEGER_RTOL = 1e-9
NEAR_INTEGER_WARN = 1e-6
_CRIT_WIDTH = Fraction(1, 10**30)


class NearIntegerWarning(UserWarning):
    """A critical ratio is close enough to an integer that r* or r** is fragile."""


def ratio(b, y):
    """``Q_b(y)/R_b(y)``; exact for rational ``y``."""
    b = quartic.as_rational(b)
    y0 = b / (1 + b)
    exact = isinstance(y, (int, Fraction))
    if (Fraction(y) if exact else y) == y0:
        raise PoleError(f"ratio has a pole at y0 = b/(1+b) = {y0}")
    if exact:
        return quartic.q_poly(b)(Fraction(y)) / quartic.r_poly(b)(Fraction(y))
    return quartic.q_poly(b).eval_float(y) / quartic.r_poly(b).eval_float(y)


def derivative_numerator(b: Fraction) -> Poly:
    """``Q' R - Q R'`` divided by the factor ``(1+b) y - b`` it always carries."""
    q, r = quartic.q_poly(b), quartic.r_poly(b)
    n = q.deriv() * r - q * r.deriv()
    quot, rem = n.divmod(Poly([-b, 1 + b]))
    assert rem.is_zero()
    return quot


def order_from_ratio(value: float) -> int:
    """Smallest integer ``r >= value``; near-integers within 1e-9 count as integers."""
    nearest = round(value)
    gap = abs(value - nearest)
    if gap < INTEGER_RTOL * max(1.0, abs(value)):
        return int(nearest)
    if gap < NEAR_INTEGER_WARN:
        warnings.warn(
            f"critical ratio {value!r} is within {gap:.3g} of an integer", NearIntegerWarning,
            stacklevel=2,
        )
    return math.floor(value) + 1


@dataclass(frozen=True)
class CriticalPoint:
    y: float
    value: float
    exact_y: Fraction
    numerator_residual: float


@dataclass(frozen=True)
class ThresholdReport:
    b: Fraction
    y0: Fraction
    y1: float
    y2: float
    R1: float
    R2: float
    rstar: int
    rstarstar: int
    bound_rstar: int
    bound_rstarstar: int
    bound_value_rstar: Fraction
    bound_value_rstarstar: Fraction
    critical_points: tuple[CriticalPoint, ...] = ()

    @property
    def Rstar(self) -> float:
        return min(self.R1, self.R2)

    @property
    def Rstarstar(self) -> float:
        return max(self.R1, self.R2)


def _critical_points(b: Fraction, lo: Fraction, hi: Fraction) -> list[CriticalPoint]:
    num = derivative_numerator(b)
    out = []
    for br in isolate_roots(num, lo, hi):
        tight = bisect_exact(num, br, _CRIT_WIDTH)
        yq = tight.lo if tight.exact else (tight.lo + tight.hi) / 2
        y = refine_root(num, Bracket(tight.lo, tight.hi, tight.exact))
        value = float(ratio(b, yq))
        scale = max(abs(float(c)) for c in num.coeffs)
        out.append(CriticalPoint(y=y, value=value, exact_y=yq,
                                 numerator_residual=abs(num.eval_float(y)) / scale))
    return out


def upper_bounds(b) -> tuple[int, int]:
    """Integer upper bounds for ``(r*, r**)`` from the ratio at interval midpoints."""
    v1, v2 = upper_bound_values(b)
    return _order_exact(v1 - 1), _order_exact(v2 - 1)


def upper_bound_values(b) -> tuple[Fraction, Fraction]:
    """``1 + 8(b^2+6b+10)/(b(b+2))`` and ``1 + (8+48b+80b^2)/(1+2b)``, exactly."""
    b = quartic.as_rational(b)
    if b <= 0:
        raise PreconditionError("b must be positive")
    if b == 1:
        log.info("b = 1: bounds hold, but equal multiplicities are classified exactly (r* = r** = 42)")
    v1 = 1 + 8 * (b * b + 6 * b + 10) / (b * (b + 2))
    v2 = 1 + (8 + 48 * b + 80 * b * b) / (1 + 2 * b)
    return v1, v2


def _order_exact(value: Fraction) -> int:
    return int(value) if value.denominator == 1 else math.floor(value) + 1


def minimize(b) -> ThresholdReport:
    b = quartic.as_rational(b)
    if b < 1:
        raise PreconditionError("minimize expects b = m2/m1 >= 1 (orient so m1 <= m2)")
    y0 = b / (1 + b)
    left = _critical_points(b, Fraction(0), y0)
    right = _critical_points(b, y0, Fraction(1))
    if not left or not right:
        raise ArithmeticError(f"no interior critical point found for b={b}")
    c1 = min(left, key=lambda c: c.value)
    c2 = min(right, key=lambda c: c.value)
    rstar = order_from_ratio(min(c1.value, c2.value))
    rstarstar = order_from_ratio(max(c1.value, c2.value))
    v1, v2 = upper_bound_values(b)
    return ThresholdReport(
        b=b,
        y0=y0,
        y1=c1.y,
        y2=c2.y,
        R1=c1.value,
        R2=c2.value,
        rstar=rstar,
        rstarstar=rstarstar,
        bound_rstar=_order_exact(v1 - 1),
        bound_rstarstar=_order_exact(v2 - 1),
        bound_value_rstar=v1,
        bound_value_rstarstar=v2,
        critical_points=tuple(left + right),
    )


# ---------------------------------------------------------------------------
# Brute-force oracle: sample T_r(s) directly and search over r


def adaptive_grid(fam: IsoparametricFamily, n: int = 200_000) -> np.ndarray:
    """Uniform grid on ``(0, pi/4)`` plus geometric clusters at both ends and at ``s*``.

    For large ``b`` one side of the minimal member is only ~1e-3 rad wide, so a
    uniform grid alone under-resolves it.
    """
    period = fam.period
    s_star = minimal_parameter(fam)
    parts = [np.linspace(0, period, n + 2)[1:-1]]
    offsets = np.geomspace(1e-9, period / 2, n // 4)
    parts += [offsets, period - offsets]
    parts += [s_star - offsets[offsets < s_star], s_star + offsets[offsets < period - s_star]]
    s = np.unique(np.concatenate(parts))
    return s[(s > 0) & (s < period)]


@dataclass(frozen=True)
class BruteForceResult:
    rstar: int
    # None when four solutions do not appear for any r <= r_max.
    rstarstar: int | None
    grid_size: int


def _side_negative(scan_values: np.ndarray, left_mask: np.ndarray) -> tuple[bool, bool]:
    neg = scan_values < 0
    return bool(np.any(neg & left_mask)), bool(np.any(neg & ~left_mask))


def brute_force_thresholds(
    fam: IsoparametricFamily,
    r_max: int,
    grid_size: int = 200_000,
    linear_limit: int = 5_000,
) -> BruteForceResult:
    """Find ``(r*, r**)`` by sampling ``T_r`` for integer ``r`` in ``[2, r_max]``.

    ``r*`` is the least ``r`` with a negative sample and ``r**`` the least ``r``
    with negative samples on both sides of the minimal member (so four
    sign-change brackets).  Every ``r`` is scanned when ``r_max`` is at most
    ``linear_limit``; beyond that the search bisects on ``r``, which is sound
    because ``T_r(s)`` decreases in ``r`` pointwise.
    """
    if fam.degree != 4:
        raise PreconditionError("brute-force thresholds are defined for degree 4")
    lo_b, hi_b = sorted((fam.m1, fam.m2))
    b = Fraction(hi_b, lo_b)
    if r_max < upper_bounds(b)[0]:
        raise PreconditionError(f"r_max={r_max} is below the r* upper bound {upper_bounds(b)[0]}")
    s = adaptive_grid(fam, grid_size)
    left = s < minimal_parameter(fam)
    alpha_free = residual_grid(fam, 2, s)  # |A|^4 - m|A|^2
    slope = alpha_free - residual_grid(fam, 3, s)  # m^2 alpha^2

    def sides(r: int) -> tuple[bool, bool]:
        return _side_negative(alpha_free - (r - 2) * slope, left)

    def first(pred) -> int | None:
        if r_max <= linear_limit:
            return next((r for r in range(2, r_max + 1) if pred(r)), None)
        lo, hi = 2, r_max
        if not pred(hi):
            return None
        while lo < hi:
            mid = (lo + hi) // 2
            if pred(mid):
                hi = mid
            else:
                lo = mid + 1
        return lo

    rstar = first(lambda r: any(sides(r)))
    if rstar is None:
        raise ArithmeticError(f"no negative sample of T_r for r <= {r_max}")
    rstarstar = first(lambda r: all(sides(r)))
    return BruteForceResult(rstar=rstar, rstarstar=rstarstar, grid_size=len(s))


def scan_adaptive(fam: IsoparametricFamily, r: int, grid_size: int = 200_000) -> ScanResult:
    s = adaptive_grid(fam, grid_size)
    values = residual_grid(fam, r, s)
    _, a2 = invariants_grid(fam, s)
    return ScanResult(s=s, values=values, brackets=sign_change_brackets(s, values, a2 * a2))
