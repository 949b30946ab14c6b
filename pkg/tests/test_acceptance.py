"""Acceptance suite: one PASS/FAIL line per criterion.

Run alone with ``pytest tests/test_acceptance.py -v`` or
``python tests/test_acceptance.py``; the summary lines are printed even
when pytest captures output.
"""

import math
import random
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from polyharm import criterion, geomlab, quartic, thresholds
from polyharm.criterion import HarmonicityQuery, classify
from polyharm.family import IsoparametricFamily


@pytest.fixture
def report(request, capsys):
    """Collect checks; print one line with the verdict when the test ends."""
    notes: list[str] = []
    failures: list[str] = []

    def check(ok: bool, note: str) -> None:
        notes.append(note)
        if not ok:
            failures.append(note)

    yield check
    label = request.node.name.replace("test_", "").replace("_", " ")
    verdict = "PASS" if not failures else "FAIL"
    with capsys.disabled():
        print(f"\n[{verdict}] {label}: " + "; ".join(failures or notes))
    assert not failures, failures


def _equal_threshold(report, degree, threshold, x1, x2):
    t0 = time.perf_counter()
    for m1 in (1, 2, 5):
        fam = IsoparametricFamily(degree, m1)
        below = [r for r in range(2, threshold) if classify(fam, r).count]
        report(not below, f"m1={m1}: no members for r<{threshold}" + (f" (got {below})" if below else ""))
        res = classify(fam, threshold)
        report(res.count == 4, f"m1={m1}: {res.count} members at r={threshold}")
    roots = criterion.degree_roots(degree, threshold)
    report(len(roots) == 2 and abs(roots[0] - x1) < 1e-12 and abs(roots[1] - x2) < 1e-12,
           f"roots {roots} vs ({x1}, {x2})")
    elapsed = time.perf_counter() - t0
    report(elapsed < 1.0, f"runtime {elapsed:.3f}s")


def test_criterion_01_degree3_threshold(report):
    _equal_threshold(report, 3, 20, -1 / 2, -1 / 5)


def test_criterion_02_degree4_equal_threshold(report):
    _equal_threshold(report, 4, 42, -1 / 3, -1 / 7)


def test_criterion_03_degree6_threshold(report):
    _equal_threshold(report, 6, 110, -1 / 5, -1 / 11)


def test_criterion_04_critical_orders(report):
    for b, (m1, m2), expected in ((Fraction(8, 7), (7, 8), (38, 47)),
                                  (Fraction(10000), (1, 10000), (5, 312919))):
        t0 = time.perf_counter()
        rep = thresholds.minimize(b)
        elapsed = time.perf_counter() - t0
        got = (rep.rstar, rep.rstarstar)
        report(got == expected, f"b={b}: {got} in {elapsed:.3f}s")
        report(elapsed < 10.0, f"b={b}: certified runtime {elapsed:.3f}s")
        t0 = time.perf_counter()
        brute = thresholds.brute_force_thresholds(IsoparametricFamily(4, m1, m2), expected[1] + 10)
        elapsed = time.perf_counter() - t0
        report((brute.rstar, brute.rstarstar) == expected and elapsed < 300,
               f"b={b}: brute force ({brute.rstar}, {brute.rstarstar}) in {elapsed:.2f}s")


def test_criterion_05_upper_bounds(report):
    for b, expected in ((Fraction(8, 7), (41, 51)), (Fraction(10000), (9, 400005)), (Fraction(1), (46, 46))):
        got = thresholds.upper_bounds(b)
        report(got == expected, f"b={b}: {got}")
    near = thresholds.upper_bounds(Fraction(10**9 + 1, 10**9))
    report(near == (46, 46), f"b->1: {near}")


def test_criterion_06_quartic_identities(report):
    rng = random.Random(6)
    bad = 0
    for b in (Fraction(1), Fraction(8, 7), Fraction(2), Fraction(10000), Fraction(3, 13)):
        for r in (2, 3, 38, 47, 312919):
            p = quartic.build(b, r)
            y0 = b / (1 + b)
            bad += p(0) != 4 * b * b
            bad += p(1) != 4
            bad += p(y0) != 6 * b * b / (1 + b) ** 2
            bad += p.poly != quartic.q_poly(b) - quartic.r_poly(b) * r
    report(bad == 0, f"endpoint, pole and decomposition identities ({bad} mismatches)")
    sym_bad = 0
    for _ in range(100):
        b = Fraction(rng.randint(1, 200), rng.randint(1, 200))
        y = Fraction(rng.randint(0, 10**6), 10**6)
        lhs, rhs = quartic.symmetry_check(b, rng.randint(2, 500), y)
        sym_bad += lhs != rhs
    report(sym_bad == 0, f"reciprocal symmetry at 100 random rationals ({sym_bad} mismatches)")


def test_criterion_07_positivity_small_orders(report):
    y = np.linspace(0, 1, 100_001)[1:-1]
    for b in (Fraction(1), Fraction(8, 7), Fraction(2), Fraction(5), Fraction(100)):
        for r in (2, 3, 4):
            p = quartic.build(b, r)
            roots = quartic.roots_in_unit_interval(p)
            low = float(np.min(np.polyval([float(c) for c in p.coeffs], y)))
            report(not roots and low > 0, f"b={b} r={r}: roots={len(roots)} min={low:.3g}")
        rs = thresholds.minimize(b).Rstar
        report(rs > 4, f"b={b}: R*={rs:.6g}")


def test_criterion_08_reductions_and_scan_oracle(report):
    rng = np.random.default_rng(8)
    worst = 0.0
    for degree in (3, 4, 6):
        fam = IsoparametricFamily(degree, 2)
        for r in (3, 20, 42, 110):
            s = rng.uniform(0, fam.period, 1000)
            s = s[(s > 1e-3) & (s < fam.period - 1e-3)]
            e, d = criterion.expanded_residual(fam, r, s), criterion.reduced_residual(fam, r, s)
            worst = max(worst, float(np.max(np.abs(e - d) / np.maximum(np.abs(e), np.abs(d)))))
    report(worst < 1e-9, f"display vs reduced max rel err {worst:.3g}")
    pick = random.Random(8)
    mismatches, loc = 0, 0.0
    for _ in range(50):
        degree = pick.choice([3, 4, 4, 6])
        m1 = pick.randint(1, 10)
        m2 = pick.randint(1, 10) if degree == 4 and pick.random() < 0.6 else m1
        fam, r = IsoparametricFamily(degree, m1, m2), pick.randint(2, 150)
        scan = criterion.scan_residual(fam, r)
        located = criterion.refine_scan(fam, r, scan)
        alg = [sol.s for sol in classify(fam, r).solutions for _ in range(sol.multiplicity)]
        if len(alg) != len(located) or scan.count != len(alg):
            mismatches += 1
        elif alg:
            loc = max(loc, max(abs(a - b) for a, b in zip(alg, located)))
    report(mismatches == 0 and loc < 1e-6, f"50 scan cases: {mismatches} count mismatches, max |ds|={loc:.3g}")


def test_criterion_09_space_form_criterion(report):
    nonzero = [(m, r) for m in range(1, 11) for r in range(2, 51)
               if criterion.residual(HarmonicityQuery(c=1, m=m, r=r, a2=Fraction(m * (r - 1)),
                                                      alpha2=Fraction(r - 1))) != 0]
    report(not nonzero, f"umbilical residual exactly zero ({len(nonzero)} failures)")
    failing = [(c, m, r) for c in (0, -1) for m in range(1, 11) for r in range(2, 51)
               if not criterion.nonexistence_flat_or_negative(HarmonicityQuery(c=Fraction(c), m=m, r=r))]
    report(not failing, f"nonexistence for c in (0, -1) ({len(failing)} failures)")


def test_criterion_10_geometry_oracle(report):
    t0 = time.perf_counter()
    for m in (2, 3):
        for r in (2, 3, 4):
            chart = geomlab.small_sphere(1 / math.sqrt(r), m)
            ff = geomlab.fundamental_forms(chart, h=1e-3)
            da2, dal = abs(ff.a2 - m * (r - 1)), abs(ff.alpha2 - (r - 1))
            report(da2 < 1e-8 and dal < 1e-8, f"m={m} r={r}: |A|^2 err {da2:.2g}, alpha^2 err {dal:.2g}")
            verdicts = {k: geomlab.check_criterion_on_chart(chart, k) for k in (r - 1, r, r + 1)}
            report(verdicts == {r - 1: False, r: True, r + 1: False}, f"m={m} r={r}: criterion {verdicts}")
    hs = [1e-2, 5e-3, 2.5e-3]
    chart = geomlab.small_sphere(1 / math.sqrt(3), 2)
    errs = [abs(geomlab.fundamental_forms(chart, h=h, extrapolate=False).a2 - 4) for h in hs]
    slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    report(abs(slope - 2) < 0.2, f"stencil convergence slope {slope:.3f}")
    r1 = float(np.linalg.norm(geomlab.verify_mean_curvature_laplacian(chart, h=1e-3)))
    r2 = float(np.linalg.norm(geomlab.verify_mean_curvature_laplacian(chart, h=5e-4)))
    report(r1 < 1e-4 and 3.5 < r1 / r2 < 4.5, f"Laplacian residual {r1:.3g}, halving ratio {r1 / r2:.3f}")
    elapsed = time.perf_counter() - t0
    report(elapsed < 30, f"runtime {elapsed:.2f}s")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
