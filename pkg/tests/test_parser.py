import pytest

from nctheta.algebra import ball, odd_sphere, torus
from nctheta.parser import ParseError, UnknownGenerator, parse_element

S3 = odd_sphere(2)


def test_single_monomial():
    a = parse_element("z1*z2", S3)
    assert len(a.terms) == 1
    assert str(a) == "z1*z2"


def test_radius_relation_vanishes():
    assert parse_element("z1*z1' + z2*z2' - 1", S3).is_zero()


def test_u_relation():
    assert parse_element("u*(1+y)", ball(2, with_u=True)) == ball(2, with_u=True).one()


def test_scalars_and_phases():
    a = parse_element("2i*z1 - rho^(-1/2)*z2 + 1/3", S3)
    assert "2i*z1" in str(a) or "2i * z1" in str(a)
    assert parse_element("i*i", S3) == S3.scalar(-1)


def test_negative_powers_only_for_unitaries():
    T = torus(2)
    assert parse_element("U1^-1*U1", T) == T.one()
    with pytest.raises(ParseError):
        parse_element("z1^-1", S3)


def test_caret_position():
    with pytest.raises(ParseError) as info:
        parse_element("z1 + * z2", S3)
    assert info.value.position == 5
    assert "^" in str(info.value)


def test_unknown_generator():
    with pytest.raises(UnknownGenerator):
        parse_element("z3", S3)


@pytest.mark.parametrize("text", ["", "z1 +", "(z1", "z1)", "rho^(1/3)", "z1 $ z2"])
def test_malformed(text):
    with pytest.raises(ParseError):
        parse_element(text, S3)
