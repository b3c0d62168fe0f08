"""Exact coefficients: Gaussian-rational combinations of half-integer powers of rho.

``rho`` stands for the phase ``exp(2*pi*i*theta)``. Exponents are stored doubled
(as integers) so that ``rho**(1/2)`` is representable without floats.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterator, Mapping

__all__ = [
    "Theta",
    "PhaseScalar",
    "scalar_mul",
    "scalar_eval",
    "convergents",
]


@dataclass(frozen=True)
class Theta:
    """The deformation parameter, either a reduced fraction p/q or a float."""

    kind: str
    p: int = 0
    q: int = 1
    irrational_value: float | None = None

    def __post_init__(self):
        if self.kind == "rational":
            if self.q <= 0:
                raise ValueError("denominator must be positive")
            g = math.gcd(self.p, self.q)
            p, q = self.p // g, self.q // g
            object.__setattr__(self, "p", p % q)
            object.__setattr__(self, "q", q)
        elif self.kind == "irrational":
            v = self.irrational_value
            if v is None or not math.isfinite(v) or not 0.0 < v < 1.0:
                raise ValueError(f"irrational theta must lie in (0, 1), got {v!r}")
        else:
            raise ValueError(f"unknown theta kind {self.kind!r}")

    @classmethod
    def rational(cls, p: int, q: int) -> "Theta":
        return cls("rational", p=p, q=q)

    @classmethod
    def irrational(cls, value: float) -> "Theta":
        return cls("irrational", irrational_value=float(value))

    @property
    def value(self) -> float:
        if self.kind == "rational":
            return self.p / self.q
        return self.irrational_value

    def convergent(self, q_max: int) -> tuple[int, int]:
        """Last continued-fraction convergent p/q of theta with q <= q_max."""
        if self.kind == "rational" and self.q <= q_max:
            return self.p, self.q
        best = (0, 1)
        for p, q in convergents(self.value, q_max):
            best = (p, q)
        return best

    def __str__(self):
        if self.kind == "rational":
            return f"{self.p}/{self.q}"
        return repr(self.irrational_value)


def convergents(x: float, q_max: int, max_terms: int = 64) -> Iterator[tuple[int, int]]:
    """Yield continued-fraction convergents of ``x`` with denominators <= q_max."""
    h0, h1 = 0, 1
    k0, k1 = 1, 0
    r = x
    for _ in range(max_terms):
        a = math.floor(r)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > q_max:
            return
        yield h1, k1
        frac = r - a
        if frac < 1e-15:
            return
        r = 1.0 / frac


# A Gaussian rational (re + i*im)/den is stored as the integer triple
# (re, im, den) with den > 0 and gcd(re, im, den) = 1; plain integer arithmetic
# is several times faster than pairs of Fractions.


def _gnorm(re: int, im: int, den: int) -> tuple[int, int, int]:
    g = math.gcd(math.gcd(re, im), den)
    if g != 1:
        re, im, den = re // g, im // g, den // g
    return re, im, den


def _gauss(c) -> tuple[int, int, int]:
    if isinstance(c, tuple):
        if len(c) == 3:
            return _gnorm(*c)
        re, im = Fraction(c[0]), Fraction(c[1])
    elif isinstance(c, complex):
        re, im = Fraction(c.real), Fraction(c.imag)
    elif isinstance(c, (int, Rational, str)):
        re, im = Fraction(c), Fraction(0)
    else:
        raise TypeError(f"cannot use {type(c).__name__} as a Gaussian rational")
    den = re.denominator * im.denominator // math.gcd(re.denominator, im.denominator)
    return _gnorm(re.numerator * (den // re.denominator), im.numerator * (den // im.denominator), den)


def _gmul(a, b):
    return _gnorm(a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0], a[2] * b[2])


def _gadd(a, b):
    if a[2] == b[2]:
        return _gnorm(a[0] + b[0], a[1] + b[1], a[2])
    return _gnorm(a[0] * b[2] + b[0] * a[2], a[1] * b[2] + b[1] * a[2], a[2] * b[2])


def _gparts(c) -> tuple[Fraction, Fraction]:
    return Fraction(c[0], c[2]), Fraction(c[1], c[2])


_ONE = (1, 0, 1)


def _mac(acc: dict, a: dict, b: dict, two_k: int = 0, n: int = 1) -> None:
    """``acc += n * rho**(two_k/2) * a * b`` on raw term dicts, left unnormalized."""
    for k1, (r1, i1, d1) in a.items():
        for k2, (r2, i2, d2) in b.items():
            k = k1 + k2 + two_k
            re, im, den = (r1 * r2 - i1 * i2) * n, (r1 * i2 + i1 * r2) * n, d1 * d2
            prev = acc.get(k)
            if prev is None:
                acc[k] = (re, im, den)
            elif prev[2] == den:
                acc[k] = (prev[0] + re, prev[1] + im, den)
            else:
                g = math.gcd(prev[2], den)
                fp, fn = den // g, prev[2] // g
                acc[k] = (prev[0] * fp + re * fn, prev[1] * fp + im * fn, prev[2] * fp)


def _finish(acc: dict) -> dict:
    """Normalize an accumulator from :func:`_mac` into raw terms, dropping zeros."""
    return {k: _gnorm(*c) for k, c in acc.items() if c[0] or c[1]}


class PhaseScalar:
    """Finite sum ``sum_k c_k * rho**(k/2)`` with Gaussian-rational ``c_k``.

    Instances are immutable and hashable. Internally keys are doubled exponents
    and values are normalized ``(re, im, den)`` integer triples.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, tuple] | None = None):
        clean = {}
        if terms:
            for k, c in terms.items():
                c = _gauss(c)
                if c[0] or c[1]:
                    clean[int(k)] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "PhaseScalar":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c) -> "PhaseScalar":
        return cls({0: _gauss(c)})

    @classmethod
    def rho(cls, exponent=1, coeff=1) -> "PhaseScalar":
        """``coeff * rho**exponent``; exponent must be a half-integer."""
        two_k = Fraction(exponent) * 2
        if two_k.denominator != 1:
            raise ValueError(f"exponent {exponent} is not a half-integer")
        return cls({int(two_k): _gauss(coeff)})

    @property
    def terms(self) -> dict:
        """Mapping from exponent (Fraction, half-integer) to ``(re, im)`` Fractions."""
        return {Fraction(k, 2): _gparts(c) for k, c in self._terms.items()}

    def is_zero(self) -> bool:
        return not self._terms

    def is_one(self) -> bool:
        return self._terms == {0: _ONE}

    def __bool__(self):
        return bool(self._terms)

    def __eq__(self, other):
        if not isinstance(other, PhaseScalar):
            try:
                other = PhaseScalar.const(other)
            except TypeError:
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            d = out.get(k)
            if d is None:
                out[k] = c
            else:
                s = _gadd(d, c)
                if s[0] or s[1]:
                    out[k] = s
                else:
                    del out[k]
        return PhaseScalar._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return PhaseScalar._raw({k: (-c[0], -c[1], c[2]) for k, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PhaseScalar):
            other = _coerce(other)
            if other is None:
                return NotImplemented
        a, b = self._terms, other._terms
        if len(b) == 1 and b.get(0) == _ONE:
            return self
        if len(a) == 1 and a.get(0) == _ONE:
            return other
        if len(a) == 1 and len(b) == 1:
            (k1, c1), = a.items()
            (k2, c2), = b.items()
            return PhaseScalar._raw({k1 + k2: _gmul(c1, c2)})
        # accumulate unnormalized numerators over a common denominator per exponent
        out = {}
        for k1, (r1, i1, d1) in a.items():
            for k2, (r2, i2, d2) in b.items():
                k = k1 + k2
                re, im, den = r1 * r2 - i1 * i2, r1 * i2 + i1 * r2, d1 * d2
                prev = out.get(k)
                if prev is None:
                    out[k] = (re, im, den)
                elif prev[2] == den:
                    out[k] = (prev[0] + re, prev[1] + im, den)
                else:
                    out[k] = (prev[0] * den + re * prev[2], prev[1] * den + im * prev[2], prev[2] * den)
        return PhaseScalar._raw({k: _gnorm(*c) for k, c in out.items() if c[0] or c[1]})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self._terms) != 1:
                raise ValueError("only single-term scalars are invertible here")
            (k, c), = self._terms.items()
            # 1/((re + i im)/den) = den (re - i im) / (re^2 + im^2)
            norm = c[0] * c[0] + c[1] * c[1]
            inv = PhaseScalar._raw({-k: _gnorm(c[2] * c[0], -c[2] * c[1], norm)})
            return inv ** (-n)
        out = PhaseScalar.const(1)
        for _ in range(n):
            out = out * self
        return out

    def conj(self) -> "PhaseScalar":
        """Complex conjugate: rho -> 1/rho, coefficients conjugated."""
        return PhaseScalar._raw({-k: (c[0], -c[1], c[2]) for k, c in self._terms.items()})

    def shift(self, two_k: int) -> "PhaseScalar":
        """Multiply by ``rho**(two_k/2)``."""
        if not two_k:
            return self
        return PhaseScalar._raw({k + two_k: c for k, c in self._terms.items()})

    def shift_scale(self, two_k: int, n: int) -> "PhaseScalar":
        """Multiply by the integer ``n`` and by ``rho**(two_k/2)``."""
        if n == 1:
            return self.shift(two_k)
        if n == -1:
            return PhaseScalar._raw({k + two_k: (-c[0], -c[1], c[2]) for k, c in self._terms.items()})
        if n == 0:
            return PhaseScalar._raw({})
        return PhaseScalar._raw({k + two_k: _gnorm(c[0] * n, c[1] * n, c[2]) for k, c in self._terms.items()})

    def evaluate(self, theta) -> complex:
        t = theta.value if isinstance(theta, Theta) else float(theta)
        total = 0j
        for k, (re, im, den) in self._terms.items():
            total += complex(re / den, im / den) * cmath.exp(1j * math.pi * t * k)
        return total

    def __repr__(self):
        return f"PhaseScalar({self})"

    def __str__(self):
        return format_scalar(self)


def _coerce(x):
    if isinstance(x, PhaseScalar):
        return x
    try:
        return PhaseScalar.const(x)
    except TypeError:
        return None


def _fmt_rational(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _fmt_gauss(c) -> str:
    re, im = c
    if not im:
        return _fmt_rational(re)
    if not re:
        return ("-" if im < 0 else "") + ("" if abs(im) == 1 else _fmt_rational(abs(im))) + "i"
    sign = "-" if im < 0 else "+"
    imag = ("" if abs(im) == 1 else _fmt_rational(abs(im))) + "i"
    return f"({_fmt_rational(re)} {sign} {imag})"


def _fmt_power(two_k: int) -> str:
    if two_k == 0:
        return ""
    if two_k == 2:
        return "rho"
    e = Fraction(two_k, 2)
    if e.denominator == 1:
        return f"rho^{e.numerator}" if e > 0 else f"rho^({e.numerator})"
    return f"rho^({e.numerator}/{e.denominator})"


def _fmt_term(two_k: int, c) -> tuple[str, str]:
    """Return (sign, body) for one term; body never starts with '-'."""
    power = _fmt_power(two_k)
    c = _gparts(c) if len(c) == 3 else c
    re, im = c
    neg = False
    if not im and re < 0:
        neg, c = True, (-re, im)
    elif not re and im < 0:
        neg, c = True, (re, -im)
    if not power:
        body = _fmt_gauss(c)
    elif c == (1, 0):
        body = power
    else:
        body = f"{_fmt_gauss(c)}*{power}"
    return ("-" if neg else "+"), body


def scalar_sort_key(two_k: int):
    return (two_k != 0, abs(two_k), two_k < 0)


def format_scalar(s: PhaseScalar) -> str:
    if not s._terms:
        return "0"
    pieces = []
    for k in sorted(s._terms, key=scalar_sort_key):
        sign, body = _fmt_term(k, s._terms[k])
        pieces.append((sign, body))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def scalar_mul(a: PhaseScalar, b: PhaseScalar) -> PhaseScalar:
    return a * b


def scalar_eval(a: PhaseScalar, th: Theta) -> complex:
    """Substitute ``rho = exp(2*pi*i*theta)``; ``rho**(1/2)`` uses ``exp(pi*i*theta)``."""
    return a.evaluate(th)
