"""Matrices over the twisted algebras and the exact charge-one instanton identities."""

from __future__ import annotations

import json
from typing import Sequence

from .algebra import (
    AlgebraElement,
    Presentation,
    PresentationMismatch,
    ball,
    even_sphere,
    odd_sphere,
    substitute,
)
from .report import Report

__all__ = [
    "AlgMatrix",
    "mat_mul",
    "is_projection",
    "alg_trace",
    "builtin",
    "BUILTINS",
    "quotient_map",
    "inclusion",
    "compute_h",
    "verify_factorization",
    "instanton_report",
]


class AlgMatrix:
    """Rectangular matrix of :class:`AlgebraElement` over one presentation."""

    __slots__ = ("pres", "entries")

    def __init__(self, pres: Presentation, entries: Sequence[Sequence]):
        rows = []
        for row in entries:
            out = []
            for a in row:
                if isinstance(a, str):
                    a = pres.parse(a)
                elif not isinstance(a, AlgebraElement):
                    a = pres.scalar(a)
                if a.pres != pres:
                    raise PresentationMismatch(f"entry lives in {a.pres}, expected {pres}")
                out.append(a)
            rows.append(out)
        if not rows or not rows[0] or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("matrix must be non-empty and rectangular")
        self.pres = pres
        self.entries = rows

    @classmethod
    def identity(cls, pres: Presentation, n: int) -> "AlgMatrix":
        return cls(pres, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, pres: Presentation, rows: int, cols: int) -> "AlgMatrix":
        return cls(pres, [[0] * cols for _ in range(rows)])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.entries[0])

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "AlgMatrix") -> "AlgMatrix":
        return mat_mul(self, other)

    def __add__(self, other: "AlgMatrix") -> "AlgMatrix":
        self._same_shape(other)
        return AlgMatrix(self.pres, [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other: "AlgMatrix") -> "AlgMatrix":
        self._same_shape(other)
        return AlgMatrix(self.pres, [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __neg__(self):
        return AlgMatrix(self.pres, [[-a for a in r] for r in self.entries])

    def scale(self, c) -> "AlgMatrix":
        return AlgMatrix(self.pres, [[a.scale(c) for a in r] for r in self.entries])

    def _same_shape(self, other):
        if other.pres != self.pres:
            raise PresentationMismatch(f"{self.pres} vs {other.pres}")
        if other.shape != self.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def adjoint(self) -> "AlgMatrix":
        r, c = self.shape
        return AlgMatrix(self.pres, [[self.entries[i][j].adjoint() for i in range(r)] for j in range(c)])

    @property
    def star(self) -> "AlgMatrix":
        return self.adjoint()

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.entries for a in r)

    def nonzero_terms(self) -> int:
        return sum(len(a.terms) for r in self.entries for a in r)

    def map(self, fn) -> "AlgMatrix":
        out = [[fn(a) for a in r] for r in self.entries]
        return AlgMatrix(out[0][0].pres, out)

    def __eq__(self, other):
        if not isinstance(other, AlgMatrix):
            return NotImplemented
        return self.pres == other.pres and self.shape == other.shape and all(
            a == b for r, s in zip(self.entries, other.entries) for a, b in zip(r, s)
        )

    def __hash__(self):
        return hash((self.pres, tuple(tuple(r) for r in self.entries)))

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "algebra": str(self.pres),
            "entries": [[str(a) for a in r] for r in self.entries],
        }

    @classmethod
    def from_json(cls, data: dict | str, pres: Presentation) -> "AlgMatrix":
        if isinstance(data, str):
            data = json.loads(data)
        mat = cls(pres, data["entries"])
        if mat.shape != (data["rows"], data["cols"]):
            raise ValueError("declared shape does not match entries")
        return mat

    def __str__(self):
        cells = [[str(a) for a in r] for r in self.entries]
        width = max(len(c) for r in cells for c in r)
        return "\n".join("[ " + " | ".join(c.ljust(width) for c in r) + " ]" for r in cells)

    def __repr__(self):
        return f"AlgMatrix({self.pres}, {self.rows}x{self.cols})"


def mat_mul(A: AlgMatrix, B: AlgMatrix) -> AlgMatrix:
    if A.pres != B.pres:
        raise PresentationMismatch(f"{A.pres} vs {B.pres}")
    if A.cols != B.rows:
        raise ValueError(f"cannot multiply {A.rows}x{A.cols} by {B.rows}x{B.cols}")
    zero = A.pres.zero()
    out = []
    for i in range(A.rows):
        row = []
        for j in range(B.cols):
            acc = zero
            for k in range(A.cols):
                a, b = A.entries[i][k], B.entries[k][j]
                if a.terms and b.terms:
                    acc = acc + a * b
            row.append(acc)
        out.append(row)
    return AlgMatrix(A.pres, out)


def alg_trace(A: AlgMatrix) -> AlgebraElement:
    if A.rows != A.cols:
        raise ValueError("trace of a non-square matrix")
    acc = A.pres.zero()
    for i in range(A.rows):
        acc = acc + A.entries[i][i]
    return acc


def is_projection(A: AlgMatrix) -> Report:
    """Exact residuals ``A^2 - A`` and ``A* - A``."""
    if A.rows != A.cols:
        raise ValueError("projection test needs a square matrix")
    report = Report("projection")
    idem = mat_mul(A, A) - A
    sa = A.adjoint() - A
    report.add("A^2 - A = 0", idem.is_zero(), idem.nonzero_terms())
    report.add("A* - A = 0", sa.is_zero(), sa.nonzero_terms())
    return report


# -- the instanton data --------------------------------------------------------

_E = [
    ["1/2*(1+x)", "0", "1/2*z2", "1/2*z1"],
    ["0", "1/2*(1+x)", "-1/2*rho*z1'", "1/2*z2'"],
    ["1/2*z2'", "-1/2*rho^-1*z1", "1/2*(1-x)", "0"],
    ["1/2*z1'", "1/2*z2", "0", "1/2*(1-x)"],
]
_PSI1 = [
    ["1", "0", "u*w2", "u*w1"],
    ["0", "1", "-rho*u*w1'", "u*w2'"],
]
_PSI1_INV = [
    ["1/2*(1+y)", "0"],
    ["0", "1/2*(1+y)"],
    ["1/2*w2'", "-1/2*rho^-1*w1"],
    ["1/2*w1'", "1/2*w2"],
]
_PSI2 = [
    ["u*w2'", "-rho^-1*u*w1", "1", "0"],
    ["u*w1'", "u*w2", "0", "1"],
]
_PSI2_INV = [
    ["1/2*w2", "1/2*w1"],
    ["-1/2*rho*w1'", "1/2*w2'"],
    ["1/2*(1+y)", "0"],
    ["0", "1/2*(1+y)"],
]
_H = [["z2'", "-rho^-1*z1"], ["z1'", "z2"]]
_H_INV = [["z2", "z1"], ["-rho*z1'", "z2'"]]
_Z = [["z1", "rho^(-1/2)*z2"], ["-rho^(-1/2)*z2'", "z1'"]]
_CHAIN = [
    [["1", "0"], ["0", "-rho"]],
    [["1", "0"], ["0", "rho^(-1/2)"]],
    _Z,
    [["1", "0"], ["0", "rho^(1/2)"]],
    [["0", "1"], ["1", "0"]],
]

BUILTINS = {
    "e": (_E, "even_sphere"),
    "psi1": (_PSI1, "ball_u"),
    "psi1_inv": (_PSI1_INV, "ball_u"),
    "psi2": (_PSI2, "ball_u"),
    "psi2_inv": (_PSI2_INV, "ball_u"),
    "h_expected": (_H, "odd_sphere"),
    "h_inverse": (_H_INV, "odd_sphere"),
    "z_corrected": (_Z, "odd_sphere"),
}


def _home(kind: str, twist: int) -> Presentation:
    if kind == "even_sphere":
        return even_sphere(2, twist)
    if kind == "odd_sphere":
        return odd_sphere(2, twist)
    return ball(2, with_u=True, twist=twist)


def builtin(name: str, twist: int = 1):
    """Exact matrices of the instanton computation.

    ``factorization_chain`` returns the list of its five 2x2 factors; every other
    name returns a single :class:`AlgMatrix`. ``twist=-1`` enters the same
    formulas under the swapped phase convention.
    """
    if name == "factorization_chain":
        pres = odd_sphere(2, twist)
        return [AlgMatrix(pres, f) for f in _CHAIN]
    try:
        entries, kind = BUILTINS[name]
    except KeyError:
        raise KeyError(f"unknown builtin {name!r}") from None
    return AlgMatrix(_home(kind, twist), entries)


def quotient_map(A: AlgMatrix) -> AlgMatrix:
    """Entry-wise ``j_k``: ball (with u) -> odd sphere, ``w_i -> z_i, y -> 0, u -> 1``."""
    src = A.pres
    if src.family != "ball":
        raise ValueError("quotient map is defined on the ball")
    dst = odd_sphere(src.m, src.twist)
    images = {f"w{i + 1}": dst.gen(f"z{i + 1}") for i in range(src.m)}
    images["y"] = dst.zero()
    if src.with_u:
        images["u"] = dst.one()
    return A.map(lambda a: substitute(a, images, dst))


def inclusion(A: AlgMatrix, sign: int = 1, with_u: bool = True) -> AlgMatrix:
    """Entry-wise ``i_k`` from the even sphere into the ball: ``z_i -> w_i, x -> sign*y``."""
    src = A.pres
    if src.family != "even_sphere":
        raise ValueError("inclusion is defined on the even sphere")
    dst = ball(src.m, with_u=with_u, twist=src.twist)
    images = {f"z{i + 1}": dst.gen(f"w{i + 1}") for i in range(src.m)}
    images["x"] = dst.gen("y").scale(sign)
    return A.map(lambda a: substitute(a, images, dst))


def compute_h(twist: int = 1) -> AlgMatrix:
    """``j2(psi2) * j1(psi1)^-1`` computed from the trivializations."""
    return mat_mul(quotient_map(builtin("psi2", twist)), quotient_map(builtin("psi1_inv", twist)))


def verify_factorization(twist: int = 1) -> Report:
    report = Report("factorization of h^-1")
    chain = builtin("factorization_chain", twist)
    prod = chain[0]
    for f in chain[1:]:
        prod = mat_mul(prod, f)
    h = builtin("h_expected", twist)
    h_inv = builtin("h_inverse", twist)
    one = AlgMatrix.identity(h.pres, 2)
    z = builtin("z_corrected", twist)
    for name, lhs, rhs in [
        ("five-factor product = h^-1", prod, h_inv),
        ("h h^-1 = 1", mat_mul(h, h_inv), one),
        ("h^-1 h = 1", mat_mul(h_inv, h), one),
        ("Z Z* = 1", mat_mul(z, z.adjoint()), one),
        ("Z* Z = 1", mat_mul(z.adjoint(), z), one),
    ]:
        diff = lhs - rhs
        report.add(name, diff.is_zero(), diff.nonzero_terms())
    return report


def _exact(report: Report, name: str, lhs: AlgMatrix, rhs: AlgMatrix) -> None:
    diff = lhs - rhs
    report.add(name, diff.is_zero(), diff.nonzero_terms())


def instanton_report(twist: int = 1, include_negative_control: bool = True) -> Report:
    """Every exact identity of the charge-one instanton computation."""
    report = Report("instanton")
    e = builtin("e", twist)
    report.extend(is_projection(e), "e: ")
    tr = alg_trace(e)
    report.add("trace(e) = 2", tr == e.pres.scalar(2), len((tr - e.pres.scalar(2)).terms))
    psi1, psi1_inv = builtin("psi1", twist), builtin("psi1_inv", twist)
    psi2, psi2_inv = builtin("psi2", twist), builtin("psi2_inv", twist)
    one = AlgMatrix.identity(psi1.pres, 2)
    _exact(report, "psi1 psi1^-1 = 1", mat_mul(psi1, psi1_inv), one)
    _exact(report, "psi2 psi2^-1 = 1", mat_mul(psi2, psi2_inv), one)
    _exact(report, "psi1^-1 psi1 = i1(e)", mat_mul(psi1_inv, psi1), inclusion(e, +1))
    _exact(report, "psi2^-1 psi2 = i2(e)", mat_mul(psi2_inv, psi2), inclusion(e, -1))
    _exact(report, "j2(psi2) j1(psi1)^-1 = h", compute_h(twist), builtin("h_expected", twist))
    report.extend(verify_factorization(twist))
    if include_negative_control:
        swapped = is_projection(builtin("e", -twist))
        report.add("negative control: e not idempotent under swapped convention",
                   not swapped.checks[0].passed, swapped.checks[0].residual)
    return report
