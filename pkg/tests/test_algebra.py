import random

import pytest
from hypothesis import given, strategies as st

from nctheta.algebra import (
    PresentationMismatch,
    ball,
    even_sphere,
    format_element,
    hom_check,
    identity_images,
    odd_sphere,
    relations,
    substitute,
    torus,
    trace_coeff,
)
from nctheta.phase import PhaseScalar

from conftest import PRESENTATIONS, random_element

S3 = odd_sphere(2)


def nf(text, pres=S3):
    return format_element(pres.parse(text))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("z2*z1", "rho * z1*z2"),
        ("z2'*z1", "rho^(-1) * z1*z2'"),
        ("z2*z1'", "rho^(-1) * z1'*z2"),
        ("z2*z2'", "1 - z1*z1'"),
        ("z1'*z1", "z1*z1'"),
        ("(z1*z2)'", "rho * z1'*z2'"),
        ("(z1+z2)^2", "z1^2 + (1 + rho) * z1*z2 + z2^2"),
    ],
)
def test_sphere_normal_forms(text, expected):
    assert nf(text) == expected


def test_torus_commutation_and_swapped_convention():
    assert nf("U2*U1", torus(2)) == "rho * U1*U2"
    assert nf("U2*U1", torus(2, -1)) == "rho^(-1) * U1*U2"
    assert nf("U1*U1'", torus(2)) == "1"


def test_central_generator_and_u():
    assert nf("x*x + z1*z1' + z2*z2'", even_sphere(2)) == "1"
    B = ball(2, with_u=True)
    assert nf("u*y", B) == "1 - u"
    assert nf("u + u*y", B) == "1"


def test_three_generators():
    S = odd_sphere(3)
    assert nf("z3*z1", S) == "rho * z1*z3"
    assert nf("z3*z3'", S) == "1 - z1*z1' - z2*z2'"


def test_trace_and_degree():
    a = S3.parse("3 + z1 - rho*z1*z1'")
    assert trace_coeff(a) == PhaseScalar.const(3)
    assert a.degree() == 2


def test_mixing_presentations_is_refused():
    with pytest.raises(PresentationMismatch):
        S3.gen("z1") + odd_sphere(2, -1).gen("z1")


def test_scalar_lifting():
    assert S3.gen("z1") * 0 == S3.zero()
    assert 2 * S3.one() - 2 == S3.zero()


@pytest.mark.parametrize("name", sorted(PRESENTATIONS))
def test_preset_relations_normalize_to_zero(name):
    pres = PRESENTATIONS[name]
    report = hom_check(identity_images(pres), pres, pres)
    assert report.passed, report.summary()
    assert len(report.checks) == len(relations(pres))


def test_hom_check_detects_bad_images():
    bad = {"z1": S3.gen("z2"), "z2": S3.gen("z1")}
    report = hom_check(bad, S3, S3)
    assert not report.passed
    with pytest.raises(KeyError):
        hom_check({"z1": S3.gen("z1")}, S3, S3)


def test_substitute_into_torus_slice():
    T = torus(2)
    # z1 -> U1, z2 -> 0 sends the radius relation to U1 U1* = 1
    images = {"z1": T.gen("U1"), "z2": T.zero()}
    assert substitute(S3.parse("z1*z1' + z2*z2'"), images, T) == T.one()


seeds = st.integers(min_value=0, max_value=10 ** 6)


@given(seeds)
def test_associativity_and_distributivity(seed):
    rng = random.Random(seed)
    for pres in PRESENTATIONS.values():
        a, b, c = (random_element(pres, rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert (a + b) * c == a * c + b * c


@given(seeds)
def test_adjoint_is_involutive_antihomomorphism(seed):
    rng = random.Random(seed)
    for pres in PRESENTATIONS.values():
        a, b = random_element(pres, rng), random_element(pres, rng)
        assert a.adjoint().adjoint() == a
        assert (a * b).adjoint() == b.adjoint() * a.adjoint()
        assert (a + b).adjoint() == a.adjoint() + b.adjoint()


@given(seeds)
def test_normal_form_is_idempotent(seed):
    rng = random.Random(seed)
    for pres in PRESENTATIONS.values():
        a = random_element(pres, rng)
        assert pres.parse(format_element(a)) == a


@given(seeds)
def test_torus_trace_is_tracial(seed):
    rng = random.Random(seed)
    for pres in (torus(2), torus(3), torus(2, -1)):
        a, b = random_element(pres, rng), random_element(pres, rng)
        assert trace_coeff(a * b) == trace_coeff(b * a)
