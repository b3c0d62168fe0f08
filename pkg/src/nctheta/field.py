"""Grid-sampled continuous-field models of the 3- and 4-spheres.

The 3-sphere is the interval field ``t -> M_q`` with ``z1 -> sqrt(t) U1`` and
``z2 -> sqrt(1-t) U2``; fibers at ``t = 0`` must lie in ``C*(U2)`` and at
``t = 1`` in ``C*(U1)``. The 4-sphere is a double cone over it: on hemisphere
``+/-`` at cone height ``s`` the sphere generators are scaled by
``sqrt(1 - s^2)`` and ``x -> +/- s``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np
from scipy.spatial import cKDTree

from .algebra import AlgebraElement
from .report import Report
from .torus_rep import Rep, RieffelParams, rieffel_projection

__all__ = [
    "FieldElement",
    "WindingResult",
    "BranchError",
    "SingularFiberError",
    "eval_s3",
    "eval_s3_matrix",
    "eval_s4",
    "boundary_check",
    "span_residual",
    "winding",
    "x_loop",
    "homotopy_check",
    "spectrum_c",
    "SpectrumResult",
    "retraction_check",
]


class SingularFiberError(ValueError):
    pass


class BranchError(ValueError):
    """A grid step is too coarse for the principal logarithm."""


@dataclass
class FieldElement:
    """Fibers sampled over an interval or a double cone.

    ``fibers`` has shape ``(N, d, d)`` on an interval and ``(2, Ns, Nt, d, d)`` on
    a double cone (hemisphere, cone height, equator parameter). ``d = block * q``.
    Lazily generated fields pass ``sampler(index) -> matrix`` instead of ``fibers``.
    """

    base: str
    grid: np.ndarray
    q: int
    block: int = 1
    fibers: np.ndarray | None = None
    cone_grid: np.ndarray | None = None
    constraints: dict = field(default_factory=dict)
    rep: Rep | None = None
    sampler: Callable | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.base not in ("interval", "double_cone"):
            raise ValueError(f"unknown base {self.base!r}")
        self.grid = np.asarray(self.grid, dtype=float)
        if self.cone_grid is not None:
            self.cone_grid = np.asarray(self.cone_grid, dtype=float)
        if self.base == "double_cone" and self.cone_grid is None:
            raise ValueError("double cone needs a cone grid")
        if self.fibers is None and self.sampler is None:
            raise ValueError("need fibers or a sampler")

    @property
    def dim(self) -> int:
        return self.block * self.q

    @property
    def index_shape(self) -> tuple:
        if self.base == "interval":
            return (len(self.grid),)
        return (2, len(self.cone_grid), len(self.grid))

    def fiber(self, *index) -> np.ndarray:
        if self.fibers is not None:
            return self.fibers[index]
        return self.sampler(index)

    def iter_fibers(self) -> Iterable[tuple[tuple, np.ndarray]]:
        for idx in np.ndindex(*self.index_shape):
            yield idx, self.fiber(*idx)

    def materialize(self) -> np.ndarray:
        if self.fibers is None:
            out = np.empty(self.index_shape + (self.dim, self.dim), dtype=complex)
            for idx, f in self.iter_fibers():
                out[idx] = f
            self.fibers = out
        return self.fibers

    def to_json(self) -> dict:
        fib = self.materialize()
        data = {
            "base": self.base,
            "grid": self.grid.tolist(),
            "block": self.block,
            "q": self.q,
            "fibers": {"re": fib.real.tolist(), "im": fib.imag.tolist()},
        }
        if self.cone_grid is not None:
            data["cone_grid"] = self.cone_grid.tolist()
        data.update(self.meta)
        return data

    @classmethod
    def from_json(cls, data: dict) -> "FieldElement":
        fib = np.asarray(data["fibers"]["re"]) + 1j * np.asarray(data["fibers"]["im"])
        return cls(
            base=data["base"],
            grid=np.asarray(data["grid"]),
            q=data["q"],
            block=data.get("block", 1),
            fibers=fib,
            cone_grid=None if "cone_grid" not in data else np.asarray(data["cone_grid"]),
            meta={k: v for k, v in data.items() if k not in _FIELD_KEYS},
        )


_FIELD_KEYS = {"base", "grid", "block", "q", "fibers", "cone_grid"}


def _grid(grid) -> np.ndarray:
    if np.isscalar(grid):
        n = int(grid)
        if n < 2:
            raise ValueError("grid needs at least two points")
        return np.linspace(0.0, 1.0, n)
    return np.asarray(grid, dtype=float)


def _sphere_terms(a: AlgebraElement, rep: Rep):
    """Yield (coeff, torus word matrix, radial degrees (d1, d2), central power)."""
    pres = a.pres
    theta = rep.theta * pres.twist
    for mono, coeff in a.terms.items():
        a1, b1, a2, b2, c, _ = mono
        yield coeff.evaluate(theta), rep.power(a1 - b1, a2 - b2), (a1 + b1, a2 + b2), c


def _check_two_generator(a: AlgebraElement, family: str) -> None:
    if a.pres.family != family or a.pres.m != 2:
        raise ValueError(f"expected a {family}(2) element, got {a.pres}")


def _s3_profile(t: np.ndarray, d1: int, d2: int) -> np.ndarray:
    return np.sqrt(t) ** d1 * np.sqrt(1.0 - t) ** d2


_S3_CONSTRAINTS = {"t=0": "C*(U2)", "t=1": "C*(U1)"}


def eval_s3(a: AlgebraElement, rep: Rep, grid=257) -> FieldElement:
    _check_two_generator(a, "odd_sphere")
    t = _grid(grid)
    out = np.zeros((len(t), rep.q, rep.q), dtype=complex)
    for coeff, word, (d1, d2), _ in _sphere_terms(a, rep):
        out += (coeff * _s3_profile(t, d1, d2))[:, None, None] * word
    return FieldElement("interval", t, rep.q, 1, out, constraints=dict(_S3_CONSTRAINTS), rep=rep)


def eval_s3_matrix(A, rep: Rep, grid=257) -> FieldElement:
    """Entry-wise :func:`eval_s3` of an odd-sphere matrix, assembled as ``n x n`` blocks."""
    n = A.rows
    if A.cols != n:
        raise ValueError("need a square matrix")
    t = _grid(grid)
    q = rep.q
    out = np.zeros((len(t), n * q, n * q), dtype=complex)
    for i in range(n):
        for j in range(n):
            out[:, i * q:(i + 1) * q, j * q:(j + 1) * q] = eval_s3(A[i, j], rep, t).fibers
    return FieldElement("interval", t, q, n, out, constraints=dict(_S3_CONSTRAINTS), rep=rep)


def eval_s4(a: AlgebraElement, rep: Rep, grid=17, cone_grid=None) -> FieldElement:
    _check_two_generator(a, "even_sphere")
    t = _grid(grid)
    s = _grid(grid if cone_grid is None else cone_grid)
    q = rep.q
    out = np.zeros((2, len(s), len(t), q, q), dtype=complex)
    scale = np.sqrt(np.clip(1.0 - s * s, 0.0, None))
    for coeff, word, (d1, d2), c in _sphere_terms(a, rep):
        radial = _s3_profile(t, d1, d2)
        for h, sign in enumerate((1.0, -1.0)):
            height = (sign * s) ** c * scale ** (d1 + d2)
            prof = coeff * height[:, None] * radial[None, :]
            out[h] += prof[:, :, None, None] * word
    return FieldElement(
        "double_cone", t, q, 1, out, cone_grid=s,
        constraints={"seam": "s=0 fibers agree", "poles": "s=1 fibers scalar"}, rep=rep,
    )


# -- boundary membership -------------------------------------------------------


def span_residual(M: np.ndarray, rep: Rep, which: int) -> float:
    """Normalized Hilbert-Schmidt distance from ``M`` to ``span{U_which^k}``.

    Uses the orthonormal basis ``U1^a U2^b`` of ``M_q`` under ``tr(A* B)/q``.
    """
    q = rep.q
    proj = np.zeros_like(M)
    for k in range(q):
        B = rep.power(k, 0) if which == 1 else rep.power(0, k)
        c = np.trace(B.conj().T @ M) / q
        proj += c * B
    return float(np.linalg.norm(M - proj) / np.sqrt(q))


def _block_span_residual(M: np.ndarray, rep: Rep, n: int, which: int) -> float:
    q = rep.q
    total = 0.0
    for i in range(n):
        for j in range(n):
            total = max(total, span_residual(M[i * q:(i + 1) * q, j * q:(j + 1) * q], rep, which))
    return total


def boundary_check(f: FieldElement, tol: float = 1e-8) -> Report:
    if f.base != "interval":
        raise ValueError("boundary_check needs an interval field")
    if f.rep is None:
        raise ValueError("field carries no representation")
    report = Report("boundary")
    if f.grid[0] == 0.0:
        r0 = _block_span_residual(f.fiber(0), f.rep, f.block, 2)
        report.add("f(0) in C*(U2)", r0 <= tol, r0)
    if f.grid[-1] == 1.0:
        r1 = _block_span_residual(f.fiber(len(f.grid) - 1), f.rep, f.block, 1)
        report.add("f(1) in C*(U1)", r1 <= tol, r1)
    return report


# -- trace pairing -------------------------------------------------------------


@dataclass
class WindingResult:
    value: float
    grid: int
    residual: float
    max_condition: float

    def __float__(self):
        return self.value


def _scalar_distance(M: np.ndarray) -> float:
    d = M.shape[0]
    lam = np.trace(M) / d
    return float(np.linalg.norm(M - lam * np.eye(d), 2))


def _diagonal_blocks(fibers: np.ndarray, q: int, n: int) -> list[np.ndarray] | None:
    """Diagonal ``q x q`` blocks if every fiber is exactly block-diagonal, else ``None``.

    A block that is constant along the loop is returned as its single fiber.
    """
    if n < 2:
        return None
    parts = []
    for i in range(n):
        for j in range(n):
            blk = fibers[:, i * q:(i + 1) * q, j * q:(j + 1) * q]
            if i != j and np.any(blk):
                return None
            if i == j:
                parts.append(blk if not np.all(blk == blk[:1]) else blk[:1])
    return parts


def _singular_bounds(block: np.ndarray, delta: np.ndarray, spacing: int) -> tuple[np.ndarray, np.ndarray]:
    """Lower bounds on the smallest and upper bounds on the largest singular value.

    Singular values are computed exactly every ``spacing`` fibers; in between,
    Weyl's inequality moves them by at most the accumulated ``||g_{k+1} - g_k||_F``.
    """
    m = len(block)
    anchors = np.arange(0, m, spacing)
    sv = np.linalg.svd(block[anchors], compute_uv=False)
    cum = np.concatenate([[0.0], np.cumsum(delta)])
    owner = np.arange(m) // spacing
    drift = cum - cum[anchors][owner]
    return sv[owner, -1] - drift, sv[owner, 0] + drift


def winding(g: FieldElement, endpoint_tol: float = 1e-8, cond_max: float = 1e12,
            chunk: int = 512, spacing: int = 8) -> WindingResult:
    """``(1/2pi) sum_k Im Tr_tau Log(g_k^-1 g_{k+1})`` with ``Tr_tau = tr / q``.

    Each increment must satisfy ``||g_k^-1 g_{k+1} - 1|| < 1`` so the principal
    logarithm is branch-safe. ``Im tr Log M`` is the sum of eigenvalue arguments;
    when ``(pi/2) sqrt(d) ||g_k^-1|| ||g_{k+1} - g_k||_F < pi`` that sum cannot
    wrap and equals the argument of ``det g_{k+1} / det g_k``, otherwise the
    eigenvalues of ``M`` are computed explicitly. ``||g_k^-1||`` and the
    reported ``max_condition`` are certified upper bounds (see
    :func:`_singular_bounds`); fibers whose bound is inconclusive get an exact SVD.
    """
    if g.base != "interval":
        raise ValueError("winding needs an interval field")
    n = len(g.grid)
    for end in (0, n - 1):
        dist = _scalar_distance(g.fiber(end))
        if dist > endpoint_tol:
            raise ValueError(f"endpoint fiber {end} is not scalar (distance {dist:.3g}); refusing non-loop path")
    fibers = g.materialize()
    blocks = _diagonal_blocks(fibers, g.q, g.block)
    if blocks is not None:
        # log det is additive over a block-diagonal decomposition; constant blocks add 0.
        total, worst_step, worst_cond = 0.0, 0.0, 1.0
        for part in blocks:
            if len(part) == 1:
                sv = np.linalg.svd(part[0], compute_uv=False)
                cond = sv[0] / sv[-1] if sv[-1] > 0 else np.inf
                if not cond <= cond_max:
                    raise SingularFiberError(f"constant block is singular (condition {cond:.3g})")
                worst_cond = max(worst_cond, float(cond))
                continue
            sub = FieldElement("interval", g.grid, g.q, 1, part)
            r = winding(sub, endpoint_tol, cond_max, chunk, spacing)
            total += r.value
            worst_step = max(worst_step, r.residual)
            worst_cond = max(worst_cond, r.max_condition)
        return WindingResult(total, n, worst_step, worst_cond)
    d = fibers.shape[-1]
    eye = np.eye(d)
    total = 0.0
    worst_step = 0.0
    worst_cond = 0.0
    for lo in range(0, n - 1, chunk):
        hi = min(lo + chunk, n - 1)
        block = fibers[lo:hi + 1]  # fibers lo..hi, increments lo..hi-1
        delta = np.linalg.norm(block[1:] - block[:-1], axis=(1, 2))
        smin, smax = _singular_bounds(block, delta, spacing)
        with np.errstate(divide="ignore", invalid="ignore"):
            cond = np.where(smin > 0, smax / smin, np.inf)
        loose = ~(cond <= cond_max)
        if loose.any():
            idx = np.flatnonzero(loose)
            sv = np.linalg.svd(block[idx], compute_uv=False)
            smin[idx], smax[idx] = sv[:, -1], sv[:, 0]
            with np.errstate(divide="ignore", invalid="ignore"):
                cond[idx] = np.where(sv[:, -1] > 0, sv[:, 0] / sv[:, -1], np.inf)
            bad = ~(cond <= cond_max)
            if bad.any():
                k = int(np.argmax(bad))
                raise SingularFiberError(f"fiber {lo + k} is singular (condition {cond[k]:.3g})")
        worst_cond = max(worst_cond, float(cond.max()))
        sign, _ = np.linalg.slogdet(block)
        bound = delta / smin[:-1]
        safe = (bound < 1.0) & (0.5 * np.sqrt(d) * bound < 1.0)
        total += float(np.sum(np.angle(sign[1:][safe] * np.conj(sign[:-1][safe]))))
        if safe.any():
            worst_step = max(worst_step, float(bound[safe].max()))
        for k in np.flatnonzero(~safe):
            M = np.linalg.solve(block[k], block[k + 1])
            step = float(np.linalg.norm(M - eye, 2))
            if step >= 1.0:
                raise BranchError(f"step {lo + k} too coarse: ||g^-1 g' - 1|| = {step:.3g}; refine the grid")
            worst_step = max(worst_step, step)
            total += float(np.sum(np.angle(np.linalg.eigvals(M))))
    return WindingResult(total / (2.0 * np.pi * g.q), n, worst_step, worst_cond)


def x_loop(rep: Rep, grid=2048, power: int = 1, n: int = 1, params: RieffelParams | None = None,
           projection: np.ndarray | None = None) -> FieldElement:
    """``diag(X^power, 1_{n-1})`` with ``X(t) = exp(2 pi i t) P + 1 - P``."""
    t = _grid(grid)
    P = projection if projection is not None else rieffel_projection(rep, params).matrix
    q = rep.q
    eye = np.eye(q)
    out = np.zeros((len(t), n * q, n * q), dtype=complex)
    phase = np.exp(2j * np.pi * t)
    if np.linalg.norm(P @ P - P, 2) <= 1e-12:
        # For an idempotent P, X(t)^s = exp(2 pi i s t) P + 1 - P.
        head = out[:, :q, :q]
        np.multiply((phase ** power)[:, None, None], P, out=head)
        head += eye - P
    else:
        X = phase[:, None, None] * P + (eye - P)
        out[:, :q, :q] = np.linalg.matrix_power(X, power) if power >= 0 else \
            np.linalg.matrix_power(np.linalg.inv(X), -power)
    for b in range(1, n):
        out[:, b * q:(b + 1) * q, b * q:(b + 1) * q] = eye
    return FieldElement("interval", t, q, n, out, constraints=dict(_S3_CONSTRAINTS), rep=rep)


# -- homotopies ----------------------------------------------------------------


def homotopy_check(family, floor: float = 1e-6) -> Report:
    """Minimum singular value over a sampled family of matrices.

    ``family`` is an array of shape ``(..., d, d)`` or an iterable of matrices.
    """
    if isinstance(family, np.ndarray):
        mats = family.reshape((-1,) + family.shape[-2:])
    else:
        mats = family
    smin = np.inf
    count = 0
    for M in mats:
        sv = np.linalg.svd(M, compute_uv=False)
        smin = min(smin, float(sv[-1]))
        count += 1
    report = Report("homotopy")
    report.add(f"min singular value over {count} samples >= {floor:g}", smin >= floor, smin)
    return report


# -- spectrum of the lifted element c -----------------------------------------


@dataclass
class SpectrumResult:
    points: np.ndarray
    coverage_gap: float
    boundary_residual: float
    report: Report


def spectrum_c(rep: Rep, grid: int = 64, params: RieffelParams | None = None,
               mesh_step: float = 0.02, coverage_tol: float = 0.1, boundary_tol: float = 1e-8) -> SpectrumResult:
    """Eigenvalues of ``c(u, t) = exp(2 pi i t)(1-u)P + 1 - (1-u)P`` over a ``(u, t)`` grid."""
    P = rieffel_projection(rep, params).matrix
    u = np.linspace(0.0, 1.0, grid)
    t = np.linspace(0.0, 1.0, grid)
    eye = np.eye(rep.q)
    pts = np.empty((grid, grid, rep.q), dtype=complex)
    for i, ui in enumerate(u):
        Q = (1.0 - ui) * P
        for j, tj in enumerate(t):
            pts[i, j] = np.linalg.eigvals(np.exp(2j * np.pi * tj) * Q + eye - Q)
    flat = pts.reshape(-1)
    xs = np.arange(-1.0, 1.0 + mesh_step / 2, mesh_step)
    X, Y = np.meshgrid(xs, xs)
    inside = X * X + Y * Y <= 1.0
    ang = np.linspace(0.0, 2 * np.pi, 1440, endpoint=False)
    mesh = np.concatenate([np.stack([X[inside], Y[inside]], axis=1), np.stack([np.cos(ang), np.sin(ang)], axis=1)])
    tree = cKDTree(np.stack([flat.real, flat.imag], axis=1))
    gap = float(tree.query(mesh)[0].max())
    slice0 = pts[0].reshape(-1)
    boundary = float(np.max(np.abs(np.abs(slice0) - 1.0)))
    reaches = float(np.max(np.abs(slice0)))
    outside = float(np.max(np.abs(flat)) - 1.0)
    report = Report("spectrum of c")
    report.add(f"disk coverage gap <= {coverage_tol:g}", gap <= coverage_tol, gap)
    report.add("u=0 slice on the unit circle", boundary <= boundary_tol, boundary)
    report.add("u=0 slice reaches the circle", abs(reaches - 1.0) <= boundary_tol, abs(reaches - 1.0))
    report.add("samples inside the closed disk", outside <= boundary_tol, max(outside, 0.0))
    u1 = pts[-1].reshape(-1)
    report.add("u=1 slice is {1}", float(np.max(np.abs(u1 - 1.0))) <= boundary_tol, float(np.max(np.abs(u1 - 1.0))))
    return SpectrumResult(flat, gap, boundary, report)


# -- retractions -----------------------------------------------------------------


def _ball_generators(rep: Rep, s: float, t: float):
    """Fibers of w1, w2, y for the ball as a cone over the 3-sphere field."""
    r = np.sqrt(max(1.0 - s * s, 0.0))
    w1 = r * np.sqrt(t) * rep.U1
    w2 = r * np.sqrt(1.0 - t) * rep.U2
    y = s * np.eye(rep.q)
    return w1, w2, y


def _ball_residuals(rep: Rep, w1, w2, y) -> dict:
    eye = np.eye(rep.q)
    rho = rep.omega
    return {
        "radius": np.linalg.norm(w1 @ w1.conj().T + w2 @ w2.conj().T + y @ y - eye, 2),
        "exchange": np.linalg.norm(w2 @ w1 - rho * w1 @ w2, 2),
        "normal": max(np.linalg.norm(w @ w.conj().T - w.conj().T @ w, 2) for w in (w1, w2)),
        "y central": max(np.linalg.norm(y @ w - w @ y, 2) for w in (w1, w2)),
        "y self-adjoint": np.linalg.norm(y - y.conj().T, 2),
    }


def _scalar_sqrt(M: np.ndarray) -> np.ndarray:
    d = M.shape[0]
    lam = np.trace(M).real / d
    if np.linalg.norm(M - lam * np.eye(d), 2) > 1e-10:
        raise ValueError("fiber is not scalar")
    return np.sqrt(max(lam, 0.0)) * np.eye(d)


def retraction_check(which: str, rep: Rep, grid: int = 9, cone_grid: int = 9, time_grid: int = 9,
                     tol: float = 1e-10, span_tol: float = 1e-8, element: AlgebraElement | None = None) -> Report:
    if which == "ball_to_scalars":
        return _ball_retraction(rep, grid, cone_grid, time_grid, tol)
    if which == "solid_torus_to_circle":
        return _solid_torus_retraction(rep, grid, time_grid, span_tol, element)
    raise ValueError(f"unknown retraction {which!r}")


def _ball_retraction(rep, grid, cone_grid, time_grid, tol) -> Report:
    report = Report("ball_to_scalars")
    eye = np.eye(rep.q)
    worst = {}
    ident = 0.0
    end_w = end_y = 0.0
    for tau in np.linspace(0.0, 1.0, time_grid):
        for s in np.linspace(0.0, 1.0, cone_grid):
            for t in np.linspace(0.0, 1.0, grid):
                w1, w2, y = _ball_generators(rep, s, t)
                Fw1, Fw2 = (1.0 - tau) * w1, (1.0 - tau) * w2
                # 1 - (1-tau)^2 (w1 w1* + w2 w2*) rewritten with the ball relation
                Fy = _scalar_sqrt((1.0 - (1.0 - tau) ** 2) * eye + (1.0 - tau) ** 2 * (y @ y))
                for k, v in _ball_residuals(rep, Fw1, Fw2, Fy).items():
                    worst[k] = max(worst.get(k, 0.0), float(v))
                if tau == 0.0:
                    ident = max(ident, float(max(np.linalg.norm(Fw1 - w1, 2), np.linalg.norm(Fw2 - w2, 2),
                                                 np.linalg.norm(Fy - y, 2))))
                if tau == 1.0:
                    end_w = max(end_w, float(max(np.linalg.norm(Fw1, 2), np.linalg.norm(Fw2, 2))))
                    end_y = max(end_y, float(np.linalg.norm(Fy - eye, 2)))
    for k, v in worst.items():
        report.add(f"F_t preserves {k}", v <= tol, v)
    report.add("F_0 = identity", ident <= tol, ident)
    report.add("F_1(w_k) = 0", end_w <= tol, end_w)
    report.add("F_1(y) = 1", end_y <= tol, end_y)
    return report


def _solid_torus_retraction(rep, grid, time_grid, span_tol, element) -> Report:
    from .algebra import odd_sphere

    if element is None:
        pres = odd_sphere(2)
        element = pres.parse("z1 + 2*z2 + z1*z2' + rho*z1^2 + z2*z2'")
    s = np.linspace(0.5, 1.0, grid)

    def f(points):
        return eval_s3(element, rep, np.asarray(points)).fibers

    base = f(s)
    report = Report("solid_torus_to_circle")
    fixed = ident = 0.0
    taus = np.linspace(0.0, 1.0, time_grid)
    last = None
    for tau in taus:
        ft = f((1.0 - tau) * s + tau)
        fixed = max(fixed, float(np.linalg.norm(ft[-1] - base[-1], 2)))
        if tau == 0.0:
            ident = float(np.max(np.linalg.norm(ft - base, axis=(1, 2))))
        last = ft
    const = float(np.max(np.linalg.norm(last - last[0], axis=(1, 2))))
    span = max(span_residual(M, rep, 1) for M in last)
    report.add("f_t(1) = f(1) for all t", fixed <= span_tol, fixed)
    report.add("f_0 = f", ident <= span_tol, ident)
    report.add("f_1 constant", const <= span_tol, const)
    report.add("f_1 in span{U1^k}", span <= span_tol, span)
    return report
