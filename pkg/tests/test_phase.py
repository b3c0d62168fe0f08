import cmath
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from nctheta.phase import PhaseScalar, Theta, convergents, scalar_eval, scalar_mul

from conftest import random_scalar

rho = PhaseScalar.rho


def test_rho_times_inverse_is_one():
    assert scalar_mul(rho(1), rho(-1)) == PhaseScalar.const(1)


def test_half_powers_add():
    assert scalar_mul(rho(Fraction(1, 2)), rho(Fraction(1, 2))) == rho(1)


def test_gaussian_product():
    a = rho(1, (Fraction(1, 2), Fraction(1, 2)))
    b = rho(1, (Fraction(1, 2), Fraction(-1, 2)))
    assert scalar_mul(a, b) == rho(2, Fraction(1, 2))
    assert str(scalar_mul(a, b)) == "1/2*rho^2"


def test_eval_rho_quarter():
    assert abs(scalar_eval(rho(1), Theta.rational(1, 4)) - 1j) < 1e-12


def test_eval_sqrt_rho_branch():
    assert abs(scalar_eval(rho(Fraction(1, 2)), Theta.rational(1, 2)) - 1j) < 1e-12


def test_eval_one_plus_rho():
    val = scalar_eval(PhaseScalar.const(1) + rho(1), Theta.rational(1, 3))
    assert abs(val - (0.5 + 0.8660254037844386j)) < 1e-12


def test_no_zero_coefficients_stored():
    s = rho(1) - rho(1) + PhaseScalar.const(0)
    assert s.is_zero() and s.terms == {}


def test_formatting():
    assert str(rho(1)) == "rho"
    assert str(rho(-1)) == "rho^(-1)"
    assert str(rho(Fraction(-1, 2))) == "rho^(-1/2)"
    assert str(rho(2, (Fraction(1, 2), Fraction(1, 2)))) == "(1/2 + 1/2i)*rho^2"
    assert str(PhaseScalar.const(0)) == "0"


def test_half_integer_exponents_only():
    with pytest.raises(ValueError):
        rho(Fraction(1, 3))


def test_inverse_of_single_term():
    c = rho(3, (2, 3))
    assert c * c ** -1 == PhaseScalar.const(1)
    with pytest.raises(ValueError):
        (PhaseScalar.const(1) + rho(1)) ** -1


def test_theta_normalization():
    t = Theta.rational(6, 4)
    assert (t.p, t.q) == (1, 2)
    with pytest.raises(ValueError):
        Theta.irrational(1.5)
    with pytest.raises(ValueError):
        Theta.rational(1, 0)


def test_convergents_of_golden_ratio():
    golden = (5 ** 0.5 - 1) / 2
    assert Theta.irrational(golden).convergent(89) == (55, 89)
    assert list(convergents(golden, 13))[-1] == (8, 13)


seeds = st.integers(min_value=0, max_value=10 ** 6)


@given(seeds)
def test_ring_axioms(seed):
    rng = random.Random(seed)
    a, b, c = (random_scalar(rng) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a + b == b + a


@given(seeds)
def test_conjugation(seed):
    rng = random.Random(seed)
    a, b = random_scalar(rng), random_scalar(rng)
    assert a.conj().conj() == a
    assert (a * b).conj() == a.conj() * b.conj()


@given(seeds, st.floats(min_value=0.01, max_value=0.99))
def test_evaluation_is_a_homomorphism(seed, theta):
    rng = random.Random(seed)
    a, b = random_scalar(rng), random_scalar(rng)
    assert abs((a * b).evaluate(theta) - a.evaluate(theta) * b.evaluate(theta)) < 1e-12
    assert abs((a + b).evaluate(theta) - a.evaluate(theta) - b.evaluate(theta)) < 1e-12
    assert abs(a.conj().evaluate(theta) - a.evaluate(theta).conjugate()) < 1e-12


def test_evaluate_uses_pi_i_theta_per_half_step():
    assert abs(rho(Fraction(1, 2)).evaluate(0.3) - cmath.exp(1j * cmath.pi * 0.3)) < 1e-15
