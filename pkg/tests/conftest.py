import random

import pytest
from hypothesis import HealthCheck, settings

from nctheta.algebra import AlgebraElement, ball, even_sphere, odd_sphere, torus
from nctheta.phase import PhaseScalar

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

PRESENTATIONS = {
    "odd_sphere(2)": odd_sphere(2),
    "odd_sphere(3)": odd_sphere(3),
    "even_sphere(2)": even_sphere(2),
    "ball(2)": ball(2),
    "ball(2, u)": ball(2, with_u=True),
    "torus(2)": torus(2),
    "torus(3)": torus(3),
}


def random_scalar(rng: random.Random) -> PhaseScalar:
    """One or two terms ``(a/b + i c/e) rho^(k/2)`` with small integers."""
    out = PhaseScalar.const(0)
    for _ in range(rng.randint(1, 2)):
        a, b, c, e = rng.randint(-3, 3), rng.randint(1, 3), rng.randint(-2, 2), rng.randint(1, 2)
        # keys of the constructor are doubled exponents, values (re, im, den) integer triples
        out = out + PhaseScalar({rng.randint(-4, 4): (a * e, c * b, b * e)})
    return out


def random_element(pres, rng: random.Random, terms: int = 3, max_deg: int = 2):
    """Sum of ``terms`` random words of length <= ``max_deg`` with random phase coefficients."""
    out = pres.zero()
    for _ in range(terms):
        word = pres.scalar(random_scalar(rng))
        for _ in range(rng.randint(0, max_deg)):
            g = pres.gen(rng.choice(pres.generators))
            if rng.random() < 0.5:
                g = g.adjoint()
            word = word * g
        out = out + word
    return out


def random_normal_element(pres, rng: random.Random, terms: int = 3, max_deg: int = 2):
    """Sum of ``terms`` random normal-ordered monomials of degree <= ``max_deg``.

    Cheaper than :func:`random_element` because no products are formed; the
    monomials are reduced by ``from_terms``.
    """
    slots = list(range(pres.m)) if pres.is_torus else list(range(2 * pres.m + (1 if pres.central else 0)))
    if pres.with_u:
        slots.append(2 * pres.m + 1)
    raw = []
    for _ in range(terms):
        mono = [0] * pres.mono_len
        for _ in range(rng.randint(0, max_deg)):
            i = rng.choice(slots)
            mono[i] += rng.choice((-1, 1)) if pres.is_torus else 1
        raw.append((tuple(mono), random_scalar(rng)))
    return AlgebraElement.from_terms(pres, raw)


@pytest.fixture(params=sorted(PRESENTATIONS))
def pres(request):
    return PRESENTATIONS[request.param]
