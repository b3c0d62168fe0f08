"""Clutching of free modules over the 4-sphere double cone and the semigroup of module classes.

A clutching datum is a loop ``h`` of invertible ``n x n`` block matrices over
the equator. Its idempotent lives in ``2n`` blocks: the constant ``1_n + 0_n``
on one hemisphere and ``L (1_n + 0_n) L^-1`` on the other, where

    L(sigma) = (h + 1) R(sigma) (h^-1 + 1) R(sigma)^-1

with ``R`` the block rotation by ``pi sigma / 2``. ``L(0) = 1`` at the pole and
``L(1) = h + h^-1`` on the seam, which commutes with ``1_n + 0_n`` so both
hemispheres agree there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .field import FieldElement, SingularFiberError, _grid, winding
from .phase import Theta
from .report import Report
from .torus_rep import Rep, RieffelParams, rieffel_projection

__all__ = [
    "ModuleClass",
    "KindMismatch",
    "make_class",
    "direct_sum",
    "cancellation_test",
    "paper_module_class",
    "ClutchingDatum",
    "ClutchingError",
    "AmbiguousInvariant",
    "make_x_datum",
    "make_matrix_datum",
    "conjugate_datum",
    "build_idempotent",
    "idempotent_report",
    "recover_invariants",
    "whitehead_family",
    "classical_chern",
]

KINDS = ("irrational", "rational")


# -- module classes ---------------------------------------------------------------


class KindMismatch(ValueError):
    pass


@dataclass(frozen=True, order=True)
class ModuleClass:
    """``0`` or ``N(n, s)``. Rational classes have ``s = 0`` whenever ``n <= 1``."""

    kind: str
    n: int
    s: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown theta kind {self.kind!r}")
        if self.n < 0:
            raise ValueError(f"rank must be non-negative, got {self.n}")
        if self.n == 0 and self.s != 0:
            raise ValueError("the zero class has index 0")
        if self.kind == "rational" and self.n == 1 and self.s != 0:
            raise ValueError("rational rank-1 classes have index 0")

    @property
    def is_zero(self) -> bool:
        return self.n == 0

    def __add__(self, other: "ModuleClass") -> "ModuleClass":
        return direct_sum(self, other)

    def __str__(self):
        return "0" if self.n == 0 else f"N({self.n},{self.s})"


def _kind(theta) -> str:
    if isinstance(theta, Theta):
        return theta.kind
    if theta in KINDS:
        return theta
    raise ValueError(f"expected a Theta or one of {KINDS}, got {theta!r}")


def make_class(theta, n: int, s: int = 0) -> ModuleClass:
    """Normalized class of rank ``n`` and index ``s``."""
    kind = _kind(theta)
    n, s = int(n), int(s)
    if n < 0:
        raise ValueError(f"rank must be non-negative, got {n}")
    if n == 0 or (kind == "rational" and n == 1):
        s = 0
    return ModuleClass(kind, n, s)


def direct_sum(a: ModuleClass, b: ModuleClass) -> ModuleClass:
    if a.kind != b.kind:
        raise KindMismatch(f"cannot add a {a.kind} class to a {b.kind} class")
    return make_class(a.kind, a.n + b.n, a.s + b.s)


def cancellation_test(a: ModuleClass, b: ModuleClass, c: ModuleClass) -> bool:
    """``a + c == b + c`` implies ``a == b``."""
    if not a.kind == b.kind == c.kind:
        raise KindMismatch("classes of different kinds")
    return direct_sum(a, c) != direct_sum(b, c) or a == b


def paper_module_class(name: str, n: int | None = None, s: int | None = None,
                       kind: str = "irrational") -> ModuleClass:
    """Classes of the known modules: ``instanton_e``, ``landi_vs`` (n) and ``brain_landi`` (n, s)."""
    if name == "instanton_e":
        return make_class(kind, 2, -1)
    if name == "landi_vs":
        if n is None or n < 1:
            raise ValueError("landi_vs needs n >= 1")
        return make_class(kind, n + 1, -(n * (n + 1) * (n + 2)) // 6)
    if name == "brain_landi":
        if n is None or s is None:
            raise ValueError("brain_landi needs n and s")
        if n < 1 or (n == 1 and s != 0):
            raise ValueError("brain_landi modules are the free rank-1 module or have rank >= 2")
        return make_class(kind, n, s)
    raise ValueError(f"unknown module {name!r}")


# -- clutching data -----------------------------------------------------------------


class ClutchingError(ValueError):
    pass


class AmbiguousInvariant(ValueError):
    pass


@dataclass
class ClutchingDatum:
    """An equator loop ``t -> h(t)`` of invertible ``n x n`` blocks over ``M_q``.

    ``sample`` maps an array of equator points to fibers of shape ``(N, nq, nq)``;
    ``inverse`` does the same for ``h^-1`` (numeric inversion when omitted).
    X-type loops carry the exponent ``power`` and the trace ``tau`` of the
    projection supporting ``X``; only those get a numeric index.
    """

    n: int
    q: int
    sample: Callable[[np.ndarray], np.ndarray]
    provenance: str = "custom"
    x_type: bool = False
    power: int | None = None
    tau: float | None = None
    inverse: Callable[[np.ndarray], np.ndarray] | None = None
    rep: Rep | None = None
    loop_grid: int = 2048
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.n * self.q

    def loop(self, grid=None) -> FieldElement:
        t = _grid(self.loop_grid if grid is None else grid)
        return FieldElement("interval", t, self.q, self.n, self.sample(t), rep=self.rep,
                            meta={"provenance": self.provenance})

    def inverse_fibers(self, t: np.ndarray, cond_max: float = 1e12) -> np.ndarray:
        if self.inverse is not None:
            return self.inverse(t)
        H = self.sample(t)
        cond = np.linalg.cond(H)
        bad = ~np.isfinite(cond) | (cond > cond_max)
        if bad.any():
            k = int(np.argmax(bad))
            raise SingularFiberError(f"loop fiber at t={t[k]:.6g} is singular (condition {cond[k]:.3g})")
        return np.linalg.inv(H)


def _pad_identity(block: np.ndarray, n: int, q: int) -> np.ndarray:
    """``diag(block, 1_{n-1})`` for a stack of ``q x q`` blocks."""
    out = np.zeros(block.shape[:-2] + (n * q, n * q), dtype=complex)
    out[..., :q, :q] = block
    for b in range(1, n):
        out[..., b * q:(b + 1) * q, b * q:(b + 1) * q] = np.eye(q)
    return out


def make_x_datum(rep: Rep, n: int, s: int, params: RieffelParams | None = None,
                 loop_grid: int = 2048) -> ClutchingDatum:
    """``diag(X^s, 1_{n-1})`` with ``X(t) = exp(2 pi i t) P + 1 - P`` for a Rieffel projection ``P``."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    rieffel = rieffel_projection(rep, params)
    P = rieffel.matrix
    comp = np.eye(rep.q) - P

    def power_of_x(t, k):
        phase = np.exp(2j * np.pi * k * np.asarray(t, dtype=float))
        return _pad_identity(phase[:, None, None] * P + comp, n, rep.q)

    return ClutchingDatum(
        n=n, q=rep.q,
        sample=lambda t: power_of_x(t, s),
        inverse=lambda t: power_of_x(t, -s),
        provenance=f"X^{s}", x_type=True, power=s, tau=rieffel.trace, rep=rep, loop_grid=loop_grid,
        meta={"idempotency_residual": rieffel.idempotency_residual},
    )


def make_matrix_datum(A, rep: Rep, provenance: str = "custom", A_inverse=None) -> ClutchingDatum:
    """A loop from an odd-sphere matrix evaluated on the 3-sphere field.

    Such loops generally have non-scalar endpoints, so they get no numeric index.
    """
    from .field import eval_s3_matrix

    if A.rows != A.cols:
        raise ValueError("need a square matrix")
    inverse = None if A_inverse is None else (lambda t: eval_s3_matrix(A_inverse, rep, np.asarray(t)).fibers)
    return ClutchingDatum(
        n=A.rows, q=rep.q,
        sample=lambda t: eval_s3_matrix(A, rep, np.asarray(t)).fibers,
        inverse=inverse, provenance=provenance, rep=rep,
    )


def conjugate_datum(d: ClutchingDatum, D: np.ndarray) -> ClutchingDatum:
    """``D h D^-1`` for a constant invertible ``D``; keeps the datum's provenance."""
    D = np.asarray(D, dtype=complex)
    if D.shape != (d.dim, d.dim):
        raise ValueError(f"conjugator must be {d.dim}x{d.dim}, got {D.shape}")
    Dinv = np.linalg.inv(D)
    return ClutchingDatum(
        n=d.n, q=d.q,
        sample=lambda t: D @ d.sample(t) @ Dinv,
        inverse=lambda t: D @ d.inverse_fibers(t) @ Dinv,
        provenance=d.provenance, x_type=d.x_type, power=d.power, tau=d.tau, rep=d.rep,
        loop_grid=d.loop_grid, meta=dict(d.meta, conjugated=True),
    )


# -- Whitehead lift and the idempotent ---------------------------------------------


def _rotation_coeffs(sigma: float) -> tuple[float, float]:
    return math.cos(math.pi * sigma / 2.0), math.sin(math.pi * sigma / 2.0)


def _whitehead(h: np.ndarray, hinv: np.ndarray, sigma: float) -> np.ndarray:
    """``L(sigma) = (h + 1) R (h^-1 + 1) R^-1`` as a ``2k x 2k`` matrix."""
    c, s = _rotation_coeffs(sigma)
    eye = np.eye(h.shape[-1])
    top = np.concatenate([c * c * eye + s * s * h, c * s * (eye - h)], axis=-1)
    bottom = np.concatenate([c * s * (hinv - eye), s * s * hinv + c * c * eye], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def _clutched_fiber(h: np.ndarray, hinv: np.ndarray, sigma: float) -> np.ndarray:
    """``L (1 + 0) L^-1`` from the first block column of ``L`` and first block row of ``L^-1``.

    ``L^-1 = R (h + 1) R^-1 (h^-1 + 1)`` has first block row
    ``[c^2 + s^2 h^-1, c s (h - 1)]``.
    """
    c, s = _rotation_coeffs(sigma)
    eye = np.eye(h.shape[-1])
    col = np.concatenate([c * c * eye + s * s * h, c * s * (hinv - eye)], axis=0)
    row = np.concatenate([c * c * eye + s * s * hinv, c * s * (h - eye)], axis=1)
    return col @ row


def _base_projection(k: int) -> np.ndarray:
    E = np.zeros((2 * k, 2 * k), dtype=complex)
    E[:k, :k] = np.eye(k)
    return E


def _active_blocks(H: np.ndarray, Hinv: np.ndarray, q: int, n: int) -> int:
    """Number ``m`` of leading blocks outside which ``h`` and ``h^-1`` are exactly the identity."""
    eye = np.eye(q)
    m = n
    while m > 1:
        b = slice((m - 1) * q, m * q)
        rest = slice(0, (m - 1) * q)
        ok = all(
            np.all(X[:, b, b] == eye) and not np.any(X[:, b, rest]) and not np.any(X[:, rest, b])
            for X in (H, Hinv)
        )
        if not ok:
            break
        m -= 1
    return m


def _embed(Pc: np.ndarray, m: int, n: int, q: int) -> np.ndarray:
    """Place a ``2mq`` core idempotent inside ``2nq`` blocks, with ``1 + 0`` on the idle blocks."""
    k, c = n * q, m * q
    P = np.zeros((2 * k, 2 * k), dtype=complex)
    P[:c, :c] = Pc[:c, :c]
    P[:c, k:k + c] = Pc[:c, c:]
    P[k:k + c, :c] = Pc[c:, :c]
    P[k:k + c, k:k + c] = Pc[c:, c:]
    P[c:k, c:k] = np.eye(k - c)
    return P


def build_idempotent(d: ClutchingDatum, rep: Rep | None = None, cone_grid=128, equator_grid=5,
                     seam_tol: float = 1e-8) -> FieldElement:
    """Projection field in ``2n`` blocks over the double cone, generated lazily.

    Hemisphere 0 is the constant ``1_n + 0_n``; hemisphere 1 at cone height ``s``
    is ``L(1 - s) (1_n + 0_n) L(1 - s)^-1``. A single pass over hemisphere 1
    records the idempotency, seam and pole residuals and the fiber traces in
    ``meta``; ``idempotent_report`` turns them into pass/fail checks.

    Blocks on which ``h`` is identically ``1`` stay ``1 + 0`` along the whole
    rotation, so the pass runs on the remaining core and re-checks a few
    assembled full fibers per equator point.
    """
    rep = rep or d.rep
    t = _grid(equator_grid)
    s = _grid(cone_grid)
    if s[0] != 0.0 or s[-1] != 1.0:
        raise ValueError("cone grid must run from the seam (0) to the pole (1)")
    H = d.sample(t)
    Hinv = d.inverse_fibers(t)
    n, q = d.n, d.q
    m = _active_blocks(H, Hinv, q, n)
    c = m * q
    Hc, Hcinv = H[:, :c, :c], Hinv[:, :c, :c]
    E = _base_projection(n * q)
    Ec = _base_projection(c)

    def sampler(index):
        hem, i, j = index
        if hem == 0:
            return E.copy()
        return _embed(_clutched_fiber(Hc[j], Hcinv[j], 1.0 - s[i]), m, n, q)

    idem = seam = pole = spread = 0.0
    trace_sum = 0.0
    spot = {0, len(s) // 2, len(s) - 1}
    for j in range(len(t)):
        for i in range(len(s)):
            Pc = _clutched_fiber(Hc[j], Hcinv[j], 1.0 - s[i])
            idem = max(idem, float(np.linalg.norm(Pc @ Pc - Pc)))
            tr = np.trace(Pc).real / q + (n - m)
            trace_sum += tr
            spread = max(spread, abs(tr - n))
            if i == 0:
                seam = max(seam, float(np.linalg.norm(Pc - Ec)))
            if i == len(s) - 1:
                pole = max(pole, float(np.linalg.norm(Pc - Ec)))
            if i in spot and m < n:
                P = sampler((1, i, j))
                idem = max(idem, float(np.linalg.norm(P @ P - P)))
                spread = max(spread, abs(np.trace(P).real / q - n))
    if seam > seam_tol:
        raise ClutchingError(f"seam fibers disagree by {seam:.3g} (> {seam_tol:g}); is h^-1 the inverse of h?")
    n_fibers = len(t) * len(s)
    meta = {
        "n": n,
        "provenance": d.provenance,
        "theta": None if rep is None else f"{rep.p}/{rep.q}",
        "projection_residual": idem,
        "seam_residual": seam,
        "pole_residual": pole,
        "trace_mean": (trace_sum + n * n_fibers) / (2 * n_fibers),
        "trace_spread": float(spread),
        "active_blocks": m,
    }
    return FieldElement(
        "double_cone", t, q, 2 * n, sampler=sampler, cone_grid=s, rep=rep, meta=meta,
        constraints={"seam": "s=0 fibers agree", "poles": "s=1 fibers equal 1_n + 0_n"},
    )


def idempotent_report(P: FieldElement, tol: float = 1e-6, seam_tol: float = 1e-8,
                      pole_tol: float = 1e-10, trace_tol: float = 1e-6) -> Report:
    """Checks on a :func:`build_idempotent` output.

    The idempotency residual is the Frobenius norm, an upper bound on the operator norm.
    """
    m = P.meta
    n = m["n"]
    report = Report(f"clutched idempotent {m['provenance']}, n={n}")
    report.add(f"||P^2 - P|| <= {tol:g} on every fiber", m["projection_residual"] <= tol, m["projection_residual"])
    report.add(f"seam fibers agree within {seam_tol:g}", m["seam_residual"] <= seam_tol, m["seam_residual"])
    report.add(f"pole fibers equal 1_n + 0_n within {pole_tol:g}", m["pole_residual"] <= pole_tol,
               m["pole_residual"])
    report.add(f"fiber trace / q = {n} within {trace_tol:g}", m["trace_spread"] <= trace_tol, m["trace_spread"])
    return report


def recover_invariants(P: FieldElement, d: ClutchingDatum, theta_kind: str = "irrational",
                       loop_grid=None, ambiguity: float = 0.2) -> tuple[int, int]:
    """``(rank, index)``: rank from the mean fiber trace, index from the loop's winding.

    ``theta_kind="irrational"`` treats ``p/q`` as a convergent of an irrational
    angle; ``"rational"`` normalizes through the rational semigroup.
    """
    if "trace_mean" in P.meta:
        mean = P.meta["trace_mean"]
    else:
        vals = [np.trace(f).real / P.q for _, f in P.iter_fibers()]
        mean = float(np.mean(vals))
    rank = round(mean)
    if abs(mean - rank) > ambiguity:
        raise AmbiguousInvariant(f"mean fiber trace / q = {mean:.4f} is not near an integer")
    if not d.x_type or d.tau is None:
        raise ValueError(f"index needs an X-type loop; provenance {d.provenance!r} has none")
    w = winding(d.loop(loop_grid)).value
    ratio = w / d.tau
    index = round(ratio)
    if abs(ratio - index) > ambiguity:
        raise AmbiguousInvariant(f"winding / tau = {ratio:.4f} is not near an integer")
    cls = make_class(theta_kind, rank, index)
    return cls.n, cls.s


def whitehead_family(d: ClutchingDatum, sigma_grid=17, equator_grid=9) -> np.ndarray:
    """``L(sigma, t)`` on a ``sigma x t`` grid, shape ``(Ns, Nt, 2k, 2k)``."""
    t = _grid(equator_grid)
    sig = _grid(sigma_grid)
    H = d.sample(t)
    Hinv = d.inverse_fibers(t)
    return np.stack([np.stack([_whitehead(H[j], Hinv[j], sg) for j in range(len(t))]) for sg in sig])


def classical_chern(s: int, grid: int = 1024) -> int:
    """Winding number of ``z -> z^s`` on the unit circle by the same log-increment rule.

    The clutched bundle over the classical 4-sphere has Chern number ``-s``.
    """
    if grid < 256:
        raise ValueError(f"grid must be at least 256, got {grid}")
    t = _grid(grid)
    fibers = np.exp(2j * np.pi * s * t)[:, None, None]
    value = winding(FieldElement("interval", t, 1, 1, fibers)).value
    return int(round(value))
