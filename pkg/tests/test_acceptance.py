"""Acceptance criteria 1-9, each reported as one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (the lines are printed even when
output capture is on).
"""

import random
import time

import numpy as np
import pytest

from nctheta.algebra import ball, even_sphere, hom_check, identity_images, odd_sphere, relations, torus
from nctheta.clutching import build_idempotent, classical_chern, idempotent_report, make_x_datum, recover_invariants
from nctheta.field import spectrum_c, winding, x_loop
from nctheta.matrices import instanton_report
from nctheta.suites import pullback_report, semigroup_report
from nctheta.torus_rep import RieffelParams, clock_shift, represent, rieffel_projection

from conftest import PRESENTATIONS, random_element, random_normal_element


@pytest.fixture
def emit(capsys):
    def _emit(number: int, ok: bool, what: str, elapsed: float) -> None:
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} - {what} ({elapsed:.2f} s)")
    return _emit


def test_criterion_1_instanton(emit):
    start = time.perf_counter()
    report = instanton_report()
    elapsed = time.perf_counter() - start
    exact = all(c.residual == 0 for c in report.checks if not c.name.startswith("negative control"))
    ok = report.passed and exact and elapsed < 5.0
    emit(1, ok, f"exact instanton identities, {len(report.checks)} checks", elapsed)
    assert ok, report.summary()


def test_criterion_2_pullback(emit):
    start = time.perf_counter()
    report = pullback_report()
    elapsed = time.perf_counter() - start
    ok = report.passed and elapsed < 1.0
    emit(2, ok, f"even-sphere relations vanish in both ball summands, {len(report.checks)} checks", elapsed)
    assert ok, report.summary()


def test_criterion_3_rieffel(emit):
    start = time.perf_counter()
    worst = {"idem": 0.0, "sa": 0.0, "trace": 0.0}
    for p, q in [(1, 2), (3, 8), (34, 89)]:
        res = rieffel_projection(clock_shift(p, q), RieffelParams.default(p / q, 0.2))
        worst["idem"] = max(worst["idem"], res.idempotency_residual)
        worst["sa"] = max(worst["sa"], res.selfadjoint_residual)
        worst["trace"] = max(worst["trace"], abs(res.trace - p / q))
    elapsed = time.perf_counter() - start
    ok = worst["idem"] <= 1e-8 and worst["sa"] <= 1e-8 and worst["trace"] <= 1e-6 and elapsed < 5.0
    emit(3, ok, f"Rieffel projections, max ||P^2-P|| = {worst['idem']:.2e}, "
                f"max ||P*-P|| = {worst['sa']:.2e}, max trace error = {worst['trace']:.2e}", elapsed)
    assert ok


def test_criterion_4_winding(emit):
    start = time.perf_counter()
    rep = clock_shift(34, 89)
    params = RieffelParams.default(34 / 89, 0.2)
    P = rieffel_projection(rep, params).matrix
    worst_err = worst_drift = 0.0
    ok = True
    for s in range(-3, 4):
        fine = winding(x_loop(rep, 4096, s, projection=P)).value
        coarse = winding(x_loop(rep, 2048, s, projection=P)).value
        err = abs(fine - s * 34 / 89)
        drift = abs(fine - coarse)
        ok &= err <= 2e-3 * max(1, abs(s)) and drift <= 1e-4
        worst_err, worst_drift = max(worst_err, err), max(worst_drift, drift)
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 30.0
    emit(4, ok, f"winding of X^s, s = -3..3, max error = {worst_err:.2e}, max drift = {worst_drift:.2e}", elapsed)
    assert ok


def test_criterion_5_clutching(emit):
    start = time.perf_counter()
    rep = clock_shift(34, 89)
    params = RieffelParams.default(34 / 89, 0.2)
    failures = []
    for n, s in [(1, 0), (1, 1), (1, -1), (2, -1), (3, 2)]:
        d = make_x_datum(rep, n, s, params)
        P = build_idempotent(d, rep, cone_grid=128)
        report = idempotent_report(P, tol=1e-6, seam_tol=1e-8, pole_tol=1e-10)
        got = recover_invariants(P, d)
        if not report.passed or got != (n, s):
            failures.append(((n, s), got, report.summary()))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 60.0
    emit(5, ok, "clutched idempotents for (1,0), (1,+-1), (2,-1), (3,2) recover (n, s)", elapsed)
    assert ok, failures


def test_criterion_6_spectrum(emit):
    start = time.perf_counter()
    res = spectrum_c(clock_shift(21, 55), grid=64, params=RieffelParams.default(21 / 55, 0.2),
                     coverage_tol=0.1, boundary_tol=1e-8)
    elapsed = time.perf_counter() - start
    ok = res.report.passed and elapsed < 30.0
    emit(6, ok, f"spectrum of c covers the disk, gap = {res.coverage_gap:.3f}, "
                f"u=0 boundary residual = {res.boundary_residual:.1e}", elapsed)
    assert ok, res.report.summary()


def test_criterion_7_semigroup(emit):
    start = time.perf_counter()
    report = semigroup_report(max_n=6, max_s=6)
    elapsed = time.perf_counter() - start
    ok = report.passed and elapsed < 1.0
    emit(7, ok, f"semigroup laws and known module classes, {len(report.checks)} checks", elapsed)
    assert ok, report.summary()


# one presentation from each of the four families
FAMILIES = [odd_sphere(2), even_sphere(2), ball(2, with_u=True), torus(2)]


def test_criterion_8_rewriting(emit):
    start = time.perf_counter()
    bad = []
    for pres in FAMILIES:
        rng = random.Random(f"triples {pres}")
        for _ in range(1000):
            a, b, c = (random_normal_element(pres, rng) for _ in range(3))
            ab = a * b
            if ab * c != a * (b * c):
                bad.append((str(pres), "associativity"))
            if a * (b + c) != ab + a * c:
                bad.append((str(pres), "distributivity"))
            if ab.adjoint() != b.adjoint() * a.adjoint() or a.adjoint().adjoint() != a:
                bad.append((str(pres), "adjoint"))
    for name, pres in PRESENTATIONS.items():
        for p in (pres, pres.swapped()):
            report = hom_check(identity_images(p), p, p)
            if not report.passed or len(report.checks) != len(relations(p)):
                bad.append((name, "relations"))
    rep = clock_shift(34, 89)
    rng = random.Random("represent")
    worst = 0.0
    for pres in (torus(2), torus(2, -1)):
        for _ in range(50):
            a, b = random_element(pres, rng), random_element(pres, rng)
            Ra, Rb = represent(a, rep), represent(b, rep)
            worst = max(worst,
                        np.linalg.norm(represent(a * b, rep) - Ra @ Rb, 2),
                        np.linalg.norm(represent(a + b, rep) - (Ra + Rb), 2),
                        np.linalg.norm(represent(a.adjoint(), rep) - Ra.conj().T, 2))
    if worst > 1e-10:
        bad.append(("torus(2)", f"represent residual {worst:.2e}"))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 10.0
    emit(8, ok, f"4000 random triples exact, relations vanish, represent residual = {worst:.1e}", elapsed)
    assert ok, bad[:10]


def test_criterion_9_classical_chern(emit):
    start = time.perf_counter()
    got = {s: classical_chern(s, 1024) for s in range(-5, 6)}
    elapsed = time.perf_counter() - start
    ok = all(v == s for s, v in got.items()) and elapsed < 1.0
    emit(9, ok, "classical winding of z^s equals s for |s| <= 5", elapsed)
    assert ok, got
