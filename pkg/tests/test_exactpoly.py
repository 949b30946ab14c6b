from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from polyharm.exactpoly import (
    Bracket,
    Poly,
    count_roots,
    gcd,
    isolate_roots,
    refine_root,
    squarefree_decomposition,
    sturm_sequence,
)

Y = sp.Symbol("y")
coeff_lists = st.lists(st.integers(-20, 20), min_size=2, max_size=7).filter(lambda c: c[-1] != 0)


def to_sympy(p: Poly):
    return sp.Poly(list(reversed([sp.Rational(c.numerator, c.denominator) for c in p.coeffs])), Y)


def test_arithmetic_matches_sympy():
    p, q = Poly([1, -3, 0, 2]), Poly([Fraction(1, 2), 1])
    assert to_sympy(p * q) == to_sympy(p) * to_sympy(q)
    quot, rem = p.divmod(q)
    sq, sr = sp.div(to_sympy(p), to_sympy(q))
    assert to_sympy(quot) == sq and to_sympy(rem) == sr
    assert to_sympy(p.deriv()) == to_sympy(p).diff(Y)


def test_gcd_is_monic_common_factor():
    a = Poly.from_roots([1, 2, 2])
    b = Poly.from_roots([2, 5])
    assert gcd(a, b) == Poly([-2, 1])


def test_squarefree_decomposition_recovers_multiplicities():
    p = Poly.from_roots([Fraction(1, 3), Fraction(1, 3), 2, 2, 2, -1])
    parts = {k: f for f, k in squarefree_decomposition(p)}
    assert parts[2] == Poly([Fraction(-1, 3), 1])
    assert parts[3] == Poly([-2, 1])
    assert parts[1] == Poly([1, 1])


def test_exact_rational_roots_found_at_midpoints():
    p = Poly.from_roots([Fraction(1, 2), Fraction(1, 4)])
    roots = [refine_root(p, br) for br in isolate_roots(p, 0, 1)]
    assert roots == [0.25, 0.5]


def test_refined_irrational_root_is_correctly_rounded():
    p = Poly([-2, 0, 1])
    (br,) = isolate_roots(p, 0, 2)
    assert refine_root(p, br) == pytest.approx(2**0.5, rel=2e-16)


def test_refine_rejects_bracket_without_sign_change():
    with pytest.raises(ValueError):
        refine_root(Poly([1, 0, 1]), Bracket(Fraction(0), Fraction(1)))


@settings(max_examples=80, deadline=None)
@given(coeff_lists)
def test_root_count_matches_sympy(coeffs):
    p = Poly(coeffs)
    # Integer coefficients below 21 keep every root inside (-30, 30).
    expected = len(sp.Poly(list(reversed(coeffs)), Y).real_roots())
    found = sum(k for f, k in squarefree_decomposition(p) for _ in isolate_roots(f, -30, 30))
    assert found == expected


@settings(max_examples=60, deadline=None)
@given(coeff_lists)
def test_sturm_count_is_distinct_roots_on_half_open_interval(coeffs):
    p = Poly(coeffs)
    sq = p // gcd(p, p.deriv())
    seq = sturm_sequence(sq)
    distinct = {complex(z).real for z in sp.Poly(list(reversed(coeffs)), Y).real_roots()}
    assert count_roots(seq, Fraction(-30), Fraction(30)) == len(distinct)
