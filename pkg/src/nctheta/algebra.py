"""Twisted sphere, ball and torus algebras with an exact normal-form engine.

Normal-ordered monomials for the sphere and ball families are written

    z1^a1 z1'^b1 z2^a2 z2'^b2 ... zm^am zm'^bm x^c u^d

with the top pair reduced (never both ``am >= 1`` and ``bm >= 1``) and, when the
inverse ``u = (1+y)^-1`` is adjoined, never both ``c >= 1`` and ``d >= 1``.
Torus monomials are ``U1^e1 ... Um^em`` with Laurent exponents.

Phase convention: for ``i < j`` the generators obey ``z_j z_i = rho^t z_i z_j``
and ``z_j z_i' = rho^-t z_i' z_j`` where ``t`` is the presentation's ``twist``
(``+1`` is the standard convention, ``-1`` the swapped one).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

from .phase import PhaseScalar, _finish, _mac
from .report import Report

__all__ = [
    "Presentation",
    "AlgebraElement",
    "PresentationMismatch",
    "torus",
    "odd_sphere",
    "even_sphere",
    "ball",
    "normal_form",
    "alg_mul",
    "adjoint",
    "substitute",
    "relations",
    "hom_check",
    "trace_coeff",
]

ONE = PhaseScalar.const(1)


class PresentationMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Presentation:
    family: str
    m: int
    with_u: bool = False
    twist: int = 1

    def __post_init__(self):
        if self.family not in ("torus", "odd_sphere", "even_sphere", "ball"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.with_u and self.family != "ball":
            raise ValueError("u can only be adjoined to the ball")
        if self.twist not in (1, -1):
            raise ValueError("twist must be +1 or -1")

    @property
    def is_torus(self) -> bool:
        return self.family == "torus"

    @property
    def prefix(self) -> str:
        return {"torus": "U", "odd_sphere": "z", "even_sphere": "z", "ball": "w"}[self.family]

    @property
    def central(self) -> str | None:
        return {"even_sphere": "x", "ball": "y"}.get(self.family)

    @property
    def generators(self) -> tuple[str, ...]:
        names = [f"{self.prefix}{i + 1}" for i in range(self.m)]
        if self.central:
            names.append(self.central)
        if self.with_u:
            names.append("u")
        return tuple(names)

    @property
    def mono_len(self) -> int:
        return self.m if self.is_torus else 2 * self.m + 2

    @property
    def unit(self) -> tuple:
        return (0,) * self.mono_len

    def swapped(self) -> "Presentation":
        return Presentation(self.family, self.m, self.with_u, -self.twist)

    def generator_monomial(self, name: str, star: bool = False) -> tuple:
        mono = [0] * self.mono_len
        if name.startswith(self.prefix) and name[len(self.prefix):].isdigit():
            i = int(name[len(self.prefix):]) - 1
            if not 0 <= i < self.m:
                raise KeyError(name)
            if self.is_torus:
                mono[i] = -1 if star else 1
            else:
                mono[2 * i + (1 if star else 0)] = 1
        elif self.central and name == self.central:
            mono[2 * self.m] = 1
        elif self.with_u and name == "u":
            mono[2 * self.m + 1] = 1
        else:
            raise KeyError(name)
        return tuple(mono)

    def gen(self, name: str) -> "AlgebraElement":
        return AlgebraElement(self, {self.generator_monomial(name): ONE})

    def scalar(self, c) -> "AlgebraElement":
        c = c if isinstance(c, PhaseScalar) else PhaseScalar.const(c)
        return AlgebraElement(self, {self.unit: c} if c else {})

    def one(self) -> "AlgebraElement":
        return self.scalar(1)

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, {})

    def parse(self, text: str) -> "AlgebraElement":
        from .parser import parse_element

        return parse_element(text, self)

    def __str__(self):
        name = {"torus": "torus", "odd_sphere": "odd_sphere",
                "even_sphere": "even_sphere", "ball": "ball"}[self.family]
        extra = ", with_u" if self.with_u else ""
        tw = "" if self.twist == 1 else ", swapped"
        return f"{name}({self.m}{extra}{tw})"


def torus(m: int = 2, twist: int = 1) -> Presentation:
    return Presentation("torus", m, twist=twist)


def odd_sphere(m: int = 2, twist: int = 1) -> Presentation:
    return Presentation("odd_sphere", m, twist=twist)


def even_sphere(m: int = 2, twist: int = 1) -> Presentation:
    return Presentation("even_sphere", m, twist=twist)


def ball(m: int = 2, with_u: bool = False, twist: int = 1) -> Presentation:
    return Presentation("ball", m, with_u=with_u, twist=twist)


# -- monomial kernel ---------------------------------------------------------


def _net(pres: Presentation, mono: tuple, i: int) -> int:
    if pres.is_torus:
        return mono[i]
    return mono[2 * i] - mono[2 * i + 1]


def _phase_exponent(pres: Presentation, left: tuple, right: tuple) -> int:
    """Power of rho picked up when moving ``right``'s generators past ``left``'s."""
    m = pres.m
    total = 0
    for j in range(1, m):
        ej = _net(pres, left, j)
        if not ej:
            continue
        for i in range(j):
            total += ej * _net(pres, right, i)
    return pres.twist * total


def _add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


@lru_cache(maxsize=None)
def _radius_power(pres: Presentation, k: int) -> tuple:
    """Expansion of ``(zm zm')^k`` as commuting monomial increments with int coefficients."""
    m = pres.m
    base = {pres.unit: 1}
    step = {pres.unit: 1}
    for i in range(m - 1):
        d = [0] * pres.mono_len
        d[2 * i] = d[2 * i + 1] = 1
        step[tuple(d)] = -1
    if pres.central:
        d = [0] * pres.mono_len
        d[2 * m] = 2
        step[tuple(d)] = -1
    for _ in range(k):
        nxt = defaultdict(int)
        for a, ca in base.items():
            for b, cb in step.items():
                nxt[_add(a, b)] += ca * cb
        base = {mono: c for mono, c in nxt.items() if c}
    return tuple(base.items())


@lru_cache(maxsize=None)
def _u_reduce(pres: Presentation, mono: tuple) -> tuple:
    m = pres.m
    c, d = mono[2 * m], mono[2 * m + 1]
    if not pres.with_u or not c or not d:
        return ((mono, 1),)
    # y^c u^d = y^(c-1) u^(d-1) (1 - u)
    lead = list(mono)
    lead[2 * m], lead[2 * m + 1] = c - 1, d - 1
    lead = tuple(lead)
    tail = list(lead)
    tail[2 * m + 1] += 1
    acc = defaultdict(int)
    for mo, co in _u_reduce(pres, lead):
        acc[mo] += co
    for mo, co in _u_reduce(pres, tuple(tail)):
        acc[mo] -= co
    return tuple((mo, co) for mo, co in acc.items() if co)


@lru_cache(maxsize=None)
def _reduce(pres: Presentation, mono: tuple) -> tuple:
    """Normal form of a normal-ordered monomial as ``((mono, int_coeff), ...)``."""
    if pres.is_torus:
        return ((mono, 1),)
    m = pres.m
    a, b = mono[2 * m - 2], mono[2 * m - 1]
    k = min(a, b)
    if not k:
        return _u_reduce(pres, mono)
    base = list(mono)
    base[2 * m - 2] -= k
    base[2 * m - 1] -= k
    base = tuple(base)
    acc = defaultdict(int)
    for delta, c in _radius_power(pres, k):
        for mo, co in _u_reduce(pres, _add(base, delta)):
            acc[mo] += c * co
    return tuple((mo, co) for mo, co in acc.items() if co)


@lru_cache(maxsize=None)
def _mono_product(pres: Presentation, left: tuple, right: tuple) -> tuple:
    """Normal form of ``left * right`` as ``((mono, doubled rho exponent, integer coeff), ...)``."""
    two_k = 2 * _phase_exponent(pres, left, right)
    return tuple((mo, two_k, int(co)) for mo, co in _reduce(pres, _add(left, right)))


@lru_cache(maxsize=None)
def _mono_adjoint(pres: Presentation, mono: tuple) -> tuple:
    """Adjoint of a normal monomial: ``((mono, PhaseScalar), ...)``."""
    m = pres.m
    blocks = []
    if pres.is_torus:
        for i in range(m):
            b = [0] * m
            b[i] = -mono[i]
            blocks.append(tuple(b))
    else:
        for i in range(m):
            b = [0] * pres.mono_len
            b[2 * i], b[2 * i + 1] = mono[2 * i + 1], mono[2 * i]
            blocks.append(tuple(b))
        tail = [0] * pres.mono_len
        tail[2 * m], tail[2 * m + 1] = mono[2 * m], mono[2 * m + 1]
        blocks.append(tuple(tail))
    acc = {pres.unit: ONE}
    for blk in reversed(blocks):
        nxt = {}
        for mo, co in acc.items():
            for mo2, two_k, n in _mono_product(pres, mo, blk):
                _accumulate(nxt, mo2, co.shift_scale(two_k, n))
        acc = nxt
    return tuple(acc.items())


def _accumulate(out: dict, mono: tuple, coeff: PhaseScalar) -> None:
    prev = out.get(mono)
    if prev is None:
        if coeff:
            out[mono] = coeff
        return
    s = prev + coeff
    if s:
        out[mono] = s
    else:
        del out[mono]


# -- elements ----------------------------------------------------------------


class AlgebraElement:
    """Finite sum of normal monomials with :class:`PhaseScalar` coefficients."""

    __slots__ = ("pres", "terms", "_hash")

    def __init__(self, pres: Presentation, terms: Mapping[tuple, PhaseScalar] | None = None):
        self.pres = pres
        self.terms = dict(terms) if terms else {}
        self._hash = None

    @classmethod
    def from_terms(cls, pres: Presentation, raw: Iterable[tuple[tuple, PhaseScalar]]) -> "AlgebraElement":
        """Build from normal-ordered (possibly unreduced) monomials."""
        out = {}
        for mono, coeff in raw:
            if not isinstance(coeff, PhaseScalar):
                coeff = PhaseScalar.const(coeff)
            for mo, co in _reduce(pres, tuple(mono)):
                _accumulate(out, mo, coeff * co)
        return cls(pres, out)

    def _check(self, other: "AlgebraElement") -> None:
        if other.pres != self.pres:
            raise PresentationMismatch(f"{self.pres} vs {other.pres}")

    def _lift(self, other):
        if isinstance(other, AlgebraElement):
            self._check(other)
            return other
        if isinstance(other, PhaseScalar) or isinstance(other, (int,)) or hasattr(other, "denominator"):
            return self.pres.scalar(other)
        return None

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        o = self._lift(other) if not isinstance(other, AlgebraElement) else other
        if o is None:
            return NotImplemented
        return self.pres == o.pres and self.terms == o.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.pres, frozenset(self.terms.items())))
        return self._hash

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for mo, co in other.terms.items():
            _accumulate(out, mo, co)
        return AlgebraElement(self.pres, out)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self.pres, {mo: -co for mo, co in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "AlgebraElement":
        c = c if isinstance(c, PhaseScalar) else PhaseScalar.const(c)
        if not c:
            return self.pres.zero()
        return AlgebraElement(self.pres, {mo: co * c for mo, co in self.terms.items() if co * c})

    def __mul__(self, other):
        if not isinstance(other, AlgebraElement):
            if isinstance(other, PhaseScalar) or isinstance(other, int) or hasattr(other, "denominator"):
                return self.scale(other)
            return NotImplemented
        self._check(other)
        pres = self.pres
        acc: dict = {}
        for m1, c1 in self.terms.items():
            t1 = c1._terms
            for m2, c2 in other.terms.items():
                t2 = c2._terms
                for mo, two_k, n in _mono_product(pres, m1, m2):
                    slot = acc.get(mo)
                    if slot is None:
                        slot = acc[mo] = {}
                    _mac(slot, t1, t2, two_k, n)
        out = {}
        for mo, slot in acc.items():
            terms = _finish(slot)
            if terms:
                out[mo] = PhaseScalar._raw(terms)
        return AlgebraElement(pres, out)

    def __rmul__(self, other):
        if isinstance(other, PhaseScalar) or isinstance(other, int) or hasattr(other, "denominator"):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            if not self.pres.is_torus or len(self.terms) != 1:
                raise ValueError("negative powers only for unitary monomials")
            return self.adjoint() ** (-n)
        out = self.pres.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def adjoint(self) -> "AlgebraElement":
        out = {}
        for mo, co in self.terms.items():
            cc = co.conj()
            for mo2, ph in _mono_adjoint(self.pres, mo):
                _accumulate(out, mo2, cc * ph)
        return AlgebraElement(self.pres, out)

    @property
    def star(self) -> "AlgebraElement":
        return self.adjoint()

    def coefficient(self, mono: tuple) -> PhaseScalar:
        return self.terms.get(tuple(mono), PhaseScalar())

    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(abs(e) for e in mo) for mo in self.terms)

    def __repr__(self):
        return f"AlgebraElement({self.pres}, {self})"

    def __str__(self):
        return format_element(self)


# -- formatting --------------------------------------------------------------


def format_monomial(pres: Presentation, mono: tuple) -> str:
    parts = []

    def put(name, e):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")

    if pres.is_torus:
        for i, e in enumerate(mono):
            put(f"U{i + 1}", e)
    else:
        m = pres.m
        for i in range(m):
            put(f"{pres.prefix}{i + 1}", mono[2 * i])
            put(f"{pres.prefix}{i + 1}'", mono[2 * i + 1])
        if pres.central:
            put(pres.central, mono[2 * m])
        if pres.with_u:
            put("u", mono[2 * m + 1])
    return "*".join(parts)


def _mono_sort_key(mono: tuple):
    return (sum(abs(e) for e in mono), tuple(-abs(e) for e in mono), mono)


def format_element(a: AlgebraElement) -> str:
    from .phase import _fmt_term, format_scalar, scalar_sort_key

    if not a.terms:
        return "0"
    pieces = []
    for mono in sorted(a.terms, key=_mono_sort_key):
        coeff = a.terms[mono]
        ms = format_monomial(a.pres, mono)
        ks = sorted(coeff._terms, key=scalar_sort_key)
        if not ms:
            for k in ks:
                pieces.append(_fmt_term(k, coeff._terms[k]))
        elif len(ks) == 1:
            sign, body = _fmt_term(ks[0], coeff._terms[ks[0]])
            pieces.append((sign, ms if body == "1" else f"{body} * {ms}"))
        else:
            pieces.append(("+", f"({format_scalar(coeff)}) * {ms}"))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


# -- operations named in the public contract --------------------------------


def normal_form(a: AlgebraElement) -> AlgebraElement:
    """Re-reduce every monomial; a no-op on elements built by this module."""
    return AlgebraElement.from_terms(a.pres, a.terms.items())


def alg_mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return a * b


def adjoint(a: AlgebraElement) -> AlgebraElement:
    return a.adjoint()


def trace_coeff(a: AlgebraElement) -> PhaseScalar:
    """Coefficient of the identity monomial."""
    return a.coefficient(a.pres.unit)


def substitute(a: AlgebraElement, images: Mapping[str, AlgebraElement], dst: Presentation) -> AlgebraElement:
    """Apply the *-homomorphism determined by generator images (no relation check)."""
    pres = a.pres
    missing = [g for g in pres.generators if g not in images]
    if missing:
        raise KeyError(f"unmapped generator(s): {', '.join(missing)}")
    imgs = {}
    for g in pres.generators:
        im = images[g]
        if not isinstance(im, AlgebraElement):
            im = dst.scalar(im)
        if im.pres != dst:
            raise PresentationMismatch(f"image of {g} lives in {im.pres}, expected {dst}")
        imgs[g] = im
    stars = {g: imgs[g].adjoint() for g in imgs}
    pow_cache: dict = {}

    def power(g, star, e):
        key = (g, star, e)
        if key not in pow_cache:
            pow_cache[key] = (stars[g] if star else imgs[g]) ** e
        return pow_cache[key]

    m = pres.m
    out = dst.zero()
    for mono, coeff in a.terms.items():
        val = dst.scalar(coeff)
        if pres.is_torus:
            for i, e in enumerate(mono):
                if e:
                    val = val * power(f"U{i + 1}", e < 0, abs(e))
        else:
            for i in range(m):
                g = f"{pres.prefix}{i + 1}"
                if mono[2 * i]:
                    val = val * power(g, False, mono[2 * i])
                if mono[2 * i + 1]:
                    val = val * power(g, True, mono[2 * i + 1])
            if mono[2 * m]:
                val = val * power(pres.central, False, mono[2 * m])
            if mono[2 * m + 1]:
                val = val * power("u", False, mono[2 * m + 1])
        out = out + val
    return out


# -- defining relations ------------------------------------------------------

Word = tuple  # sequence of (generator name, starred)


@dataclass(frozen=True)
class Relation:
    """A formal relation ``sum coeff * word = 0`` over generator symbols."""

    name: str
    terms: tuple  # ((PhaseScalar, Word), ...)

    def evaluate(self, images: Mapping[str, AlgebraElement], dst: Presentation) -> AlgebraElement:
        out = dst.zero()
        star_cache: dict = {}
        for coeff, word in self.terms:
            val = dst.scalar(coeff)
            for g, star in word:
                im = images[g]
                if star:
                    if g not in star_cache:
                        star_cache[g] = im.adjoint()
                    im = star_cache[g]
                val = val * im
            out = out + val
        return out


def _rel(name, *terms) -> Relation:
    out = []
    for coeff, word in terms:
        coeff = coeff if isinstance(coeff, PhaseScalar) else PhaseScalar.const(coeff)
        out.append((coeff, tuple(word)))
    return Relation(name, tuple(out))


def relations(pres: Presentation) -> list[Relation]:
    """Defining relations of a preset presentation."""
    m, p, tw = pres.m, pres.prefix, pres.twist
    g = [f"{p}{i + 1}" for i in range(m)]
    rels = []
    rho = PhaseScalar.rho(tw)
    rho_bar = PhaseScalar.rho(-tw)
    if pres.is_torus:
        for a in g:
            rels.append(_rel(f"{a}{a}' = 1", (1, [(a, False), (a, True)]), (-1, [])))
            rels.append(_rel(f"{a}'{a} = 1", (1, [(a, True), (a, False)]), (-1, [])))
    else:
        for a in g:
            rels.append(_rel(f"{a} normal", (1, [(a, False), (a, True)]), (-1, [(a, True), (a, False)])))
        radius = [(1, [(a, False), (a, True)]) for a in g]
        if pres.central:
            radius.append((1, [(pres.central, False), (pres.central, False)]))
        radius.append((-1, []))
        label = " + ".join(f"{a}{a}'" for a in g) + (f" + {pres.central}^2" if pres.central else "")
        rels.append(_rel(f"{label} = 1", *radius))
        c = pres.central
        if c:
            rels.append(_rel(f"{c} self-adjoint", (1, [(c, True)]), (-1, [(c, False)])))
            for a in g:
                rels.append(_rel(f"[{c}, {a}] = 0", (1, [(c, False), (a, False)]), (-1, [(a, False), (c, False)])))
                rels.append(_rel(f"[{c}, {a}'] = 0", (1, [(c, False), (a, True)]), (-1, [(a, True), (c, False)])))
        if pres.with_u:
            rels.append(_rel("u(1+y) = 1", (1, [("u", False)]), (1, [("u", False), ("y", False)]), (-1, [])))
            rels.append(_rel("u self-adjoint", (1, [("u", True)]), (-1, [("u", False)])))
            rels.append(_rel("[u, y] = 0", (1, [("u", False), ("y", False)]), (-1, [("y", False), ("u", False)])))
            for a in g:
                rels.append(_rel(f"[u, {a}] = 0", (1, [("u", False), (a, False)]), (-1, [(a, False), ("u", False)])))
    for j in range(m):
        for i in range(j):
            a, b = g[i], g[j]
            rels.append(_rel(f"{b}{a} = rho {a}{b}", (1, [(b, False), (a, False)]), (-rho, [(a, False), (b, False)])))
            rels.append(_rel(f"{b}{a}' = rho^-1 {a}'{b}", (1, [(b, False), (a, True)]), (-rho_bar, [(a, True), (b, False)])))
            rels.append(_rel(f"{b}'{a} = rho^-1 {a}{b}'", (1, [(b, True), (a, False)]), (-rho_bar, [(a, False), (b, True)])))
    return rels


def identity_images(pres: Presentation) -> dict:
    return {name: pres.gen(name) for name in pres.generators}


def hom_check(mapping: Mapping, src: Presentation, dst) -> Report:
    """Check that generator images satisfy every defining relation of ``src``.

    ``dst`` is a presentation, or a tuple of presentations for a pullback target
    (then each image is a tuple with one entry per summand).
    """
    missing = [gname for gname in src.generators if gname not in mapping]
    if missing:
        raise KeyError(f"unmapped generator(s): {', '.join(missing)}")
    summands = dst if isinstance(dst, tuple) else (dst,)
    report = Report(f"hom {src} -> {' (+) '.join(str(d) for d in summands)}")
    for k, d in enumerate(summands):
        images = {}
        for gname in src.generators:
            im = mapping[gname]
            if isinstance(dst, tuple):
                im = im[k]
            if not isinstance(im, AlgebraElement):
                im = d.scalar(im)
            if im.pres != d:
                raise PresentationMismatch(f"image of {gname} lives in {im.pres}, expected {d}")
            images[gname] = im
        tag = f"summand {k + 1}: " if isinstance(dst, tuple) else ""
        for rel in relations(src):
            res = rel.evaluate(images, d)
            report.add(tag + rel.name, res.is_zero(), len(res.terms), "" if res.is_zero() else str(res))
    return report
