"""Exact univariate polynomials over the rationals.

Coefficients are :class:`fractions.Fraction` stored in ascending order, so
``Poly([c0, c1, c2])`` is ``c0 + c1*y + c2*y**2``.  Everything here is exact;
floating point only appears in :func:`refine_root`, which polishes a root
inside a bracket that has already been certified with exact sign tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Number = int | Fraction


def _as_fraction(x) -> Fraction:
    # Floats convert exactly; callers are expected to pass exact values.
    return Fraction(x)


class Poly:
    """Immutable polynomial with exact rational coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number]):
        cs = [_as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def from_roots(cls, roots: Iterable[Number]) -> "Poly":
        p = cls([1])
        for r in roots:
            p = p * cls([-_as_fraction(r), 1])
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, y):
        if not isinstance(y, (Fraction, int)):
            return self.eval_float(y)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc

    def eval_float(self, y: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * y + float(c)
        return acc

    def deriv(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Poly(x + y for x, y in zip(a, b))

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly(c * other for c in self.coeffs)
        if self.is_zero() or other.is_zero():
            return Poly([])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        out = Poly([1])
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"Poly({[str(c) for c in self.coeffs]})"

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        q = [Fraction(0)] * max(len(rem) - dq, 1)
        lead = other.lead
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k] / lead
            if c == 0:
                continue
            q[k - dq] = c
            for j, oc in enumerate(other.coeffs):
                rem[k - dq + j] -= c * oc
        return Poly(q), Poly(rem[:dq] if dq > 0 else [])

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        return self * (1 / self.lead) if self.coeffs else self

    def compose_affine(self, a: Number, b: Number) -> "Poly":
        """Return ``p(a + b*y)``."""
        lin = Poly([a, b])
        out = Poly([])
        for c in reversed(self.coeffs):
            out = out * lin + Poly([c])
        return out


def gcd(p: Poly, q: Poly) -> Poly:
    while not q.is_zero():
        p, q = q, p % q
    return p.monic()


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: ``p = c * prod(f_k ** k)`` with each ``f_k`` square-free.

    Returns the non-constant factors with their multiplicities.
    """
    if p.degree < 1:
        return []
    dp = p.deriv()
    a = gcd(p, dp)
    b = p // a
    c = dp // a
    d = c - b.deriv()
    out = []
    k = 1
    while b.degree >= 1:
        a = gcd(b, d)
        if a.degree >= 1:
            out.append((a, k))
        b = b // a
        c = d // a
        d = c - b.deriv()
        k += 1
    return out


def sturm_sequence(p: Poly) -> list[Poly]:
    seq = [p, p.deriv()]
    while not seq[-1].is_zero():
        seq.append(-(seq[-2] % seq[-1]))
    return seq[:-1]


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def sign_variations(seq: Sequence[Poly], y: Fraction) -> int:
    signs = [s for s in (_sign(q(y)) for q in seq) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(seq: Sequence[Poly], lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots in the half-open interval ``(lo, hi]``."""
    return sign_variations(seq, lo) - sign_variations(seq, hi)


@dataclass(frozen=True)
class Bracket:
    lo: Fraction
    hi: Fraction
    # Set when the root is an exact rational (then lo == hi).
    exact: bool = False


def isolate_roots(p: Poly, lo: Number, hi: Number) -> list[Bracket]:
    """Isolate the distinct roots of ``p`` in the open interval ``(lo, hi)``.

    Each returned bracket contains exactly one distinct root of ``p``; the
    brackets are disjoint and sorted.  Works for non-square-free ``p`` because
    the Sturm sequence counts distinct roots; the square-free part is used for
    the bisection signs.
    """
    lo, hi = Fraction(lo), Fraction(hi)
    if p.degree < 1:
        return []
    sqf = p // gcd(p, p.deriv())
    seq = sturm_sequence(sqf)
    out: list[Bracket] = []
    # Roots strictly inside: count on (lo, hi] minus a root sitting at hi.
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        n = count_roots(seq, a, b) - (1 if sqf(b) == 0 and b == hi else 0)
        if n == 0:
            continue
        if n == 1 and sqf(b) != 0:
            out.append(Bracket(a, b))
            continue
        mid = (a + b) / 2
        if sqf(mid) == 0:
            out.append(Bracket(mid, mid, exact=True))
            # Shrink the halves so the exact root is excluded from both.
            eps = (b - a) / 1024
            while count_roots(seq, mid - eps, mid + eps) > 1 or (
                sqf(mid - eps) == 0 or sqf(mid + eps) == 0
            ):
                eps /= 2
            stack.append((mid + eps, b))
            stack.append((a, mid - eps))
            continue
        stack.append((mid, b))
        stack.append((a, mid))
    out.sort(key=lambda br: br.lo)
    return out


def bisect_exact(p: Poly, br: Bracket, width: Fraction) -> Bracket:
    """Shrink a bracket around a simple root of the square-free ``p`` exactly."""
    if br.exact:
        return br
    a, b = br.lo, br.hi
    sa = _sign(p(a))
    while b - a > width:
        mid = (a + b) / 2
        sm = _sign(p(mid))
        if sm == 0:
            return Bracket(mid, mid, exact=True)
        if sm == sa:
            a = mid
        else:
            b = mid
    return Bracket(a, b)


def refine_root(p: Poly, br: Bracket, tol: float = 1e-14, max_iter: int = 200) -> float:
    """Safeguarded Newton iteration for a simple root of ``p`` inside ``br``.

    Every iterate is sign-tested exactly and the bracket shrinks around the
    root; a Newton step that would leave the bracket is replaced by a
    bisection step.  On convergence the root is certified by exact signs at
    ``x - delta`` and ``x + delta``.
    """
    if br.exact:
        return float(br.lo)
    a, b = br.lo, br.hi
    sa = _sign(p(a))
    if sa == 0:
        return float(a)
    sb = _sign(p(b))
    if sb == 0:
        return float(b)
    if sb == sa:
        raise ValueError(f"no sign change of p on [{a}, {b}]")
    dp = p.deriv()
    x = (a + b) / 2
    for _ in range(max_iter):
        fx = p(x)
        sx = _sign(fx)
        if sx == 0:
            return float(x)
        if sx == sa:
            a = x
        else:
            b = x
        scale = max(1.0, abs(float(x)))
        if float(b - a) <= tol * scale * 1e-2:
            break
        d = dp(x)
        nxt = None
        if d != 0:
            cand = float(x - fx / d)
            if math.isfinite(cand):
                cand_q = Fraction(cand)
                if a < cand_q < b:
                    nxt = cand_q
                    if abs(float(fx / d)) <= tol * scale * 1e-2:
                        delta = Fraction(tol * scale / 2)
                        lo, hi = max(a, cand_q - delta), min(b, cand_q + delta)
                        if _sign(p(lo)) == sa and _sign(p(hi)) == -sa:
                            return float(cand_q)
        x = nxt if nxt is not None else (a + b) / 2
    return float((a + b) / 2)
