"""Clock-and-shift representations of the rational rotation algebra and Rieffel projections."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import AlgebraElement
from .phase import Theta

__all__ = [
    "Rep",
    "clock_shift",
    "rep_for_theta",
    "represent",
    "RieffelParams",
    "RieffelResult",
    "rieffel_projection",
    "numeric_trace",
    "matrix_to_json",
    "matrix_from_json",
]


@dataclass(frozen=True, eq=False)
class Rep:
    """``U1 = diag(omega^k)`` and ``U2 e_k = e_{k-1}``, so ``U2 U1 = omega U1 U2``."""

    p: int
    q: int
    U1: np.ndarray = field(repr=False)
    U2: np.ndarray = field(repr=False)

    @property
    def theta(self) -> float:
        return self.p / self.q

    @property
    def omega(self) -> complex:
        return np.exp(2j * np.pi * self.p / self.q)

    def clock_angles(self) -> np.ndarray:
        """Eigen-angles of U1 in [0, 1), exact multiples of 1/q."""
        k = np.arange(self.q)
        return ((k * self.p) % self.q) / self.q

    def power(self, a: int, b: int) -> np.ndarray:
        """``U1^a U2^b``."""
        q = self.q
        k = np.arange(q)
        diag = np.exp(2j * np.pi * ((a * k * self.p) % q) / q)
        shift = np.zeros((q, q), dtype=complex)
        shift[(k - b) % q, k] = 1.0
        return diag[:, None] * shift


def clock_shift(p: int, q: int) -> Rep:
    if q < 2:
        raise ValueError(f"q must be at least 2, got {q}")
    if math.gcd(p, q) != 1:
        raise ValueError(f"p={p} and q={q} are not coprime")
    p %= q
    k = np.arange(q)
    U1 = np.diag(np.exp(2j * np.pi * ((k * p) % q) / q))
    U2 = np.zeros((q, q), dtype=complex)
    U2[(k - 1) % q, k] = 1.0
    return Rep(p, q, U1, U2)


def rep_for_theta(theta: Theta, q_max: int = 89) -> Rep:
    """Representation at theta itself (rational) or at its last convergent (irrational)."""
    p, q = theta.convergent(q_max)
    return clock_shift(p, q)


def represent(a: AlgebraElement, rep: Rep) -> np.ndarray:
    pres = a.pres
    if not pres.is_torus or pres.m != 2:
        raise ValueError(f"represent needs a torus(2) element, got {pres}")
    theta = rep.theta * pres.twist
    out = np.zeros((rep.q, rep.q), dtype=complex)
    for (e1, e2), coeff in a.terms.items():
        out += coeff.evaluate(theta) * rep.power(e1, e2)
    return out


@dataclass(frozen=True)
class RieffelParams:
    """Piecewise-linear profile: ramp up on [0, eps], 1 on [eps, theta], ramp down after."""

    theta: float
    epsilon: float

    def __post_init__(self):
        th, eps = self.theta, self.epsilon
        if not 0.0 < th < 1.0:
            raise ValueError(f"theta must lie in (0, 1), got {th}")
        if not 0.0 < eps <= min(th, 1.0 - th) + 1e-15:
            raise ValueError(f"epsilon must lie in (0, min(theta, 1-theta)] = (0, {min(th, 1 - th)}], got {eps}")

    @classmethod
    def default(cls, theta: float, fraction: float = 0.2) -> "RieffelParams":
        return cls(theta, fraction * min(theta, 1.0 - theta))

    def f(self, x) -> np.ndarray:
        x = np.mod(np.asarray(x, dtype=float), 1.0)
        th, eps = self.theta, self.epsilon
        up = np.clip(x / eps, 0.0, 1.0)
        down = np.clip(1.0 - (x - th) / eps, 0.0, 1.0)
        return np.where(x <= eps, up, np.where(x <= th, 1.0, np.where(x <= th + eps, down, 0.0)))

    def g(self, x) -> np.ndarray:
        x = np.mod(np.asarray(x, dtype=float), 1.0)
        fx = self.f(x)
        return np.where(x <= self.epsilon, np.sqrt(np.clip(fx - fx * fx, 0.0, None)), 0.0)


@dataclass
class RieffelResult:
    matrix: np.ndarray
    idempotency_residual: float
    selfadjoint_residual: float
    trace: float

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def rieffel_projection(rep: Rep, params: RieffelParams | None = None) -> RieffelResult:
    """``P = g(U1) U2 + f(U1) + U2* g(U1)`` with operator-norm self-test residuals."""
    if params is None:
        params = RieffelParams.default(rep.theta)
    if abs(params.theta - rep.theta) > 1e-12:
        raise ValueError(f"profile built for theta={params.theta}, representation has {rep.theta}")
    x = rep.clock_angles()
    fU = np.diag(params.f(x).astype(complex))
    gU = np.diag(params.g(x).astype(complex))
    P = gU @ rep.U2 + fU + rep.U2.conj().T @ gU
    idem = float(np.linalg.norm(P @ P - P, 2))
    sa = float(np.linalg.norm(P.conj().T - P, 2))
    return RieffelResult(P, idem, sa, float(numeric_trace(P).real))


def numeric_trace(M) -> complex:
    """Normalized trace ``tr(M) / dim``."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"numeric_trace needs a square matrix, got shape {M.shape}")
    return complex(np.trace(M) / M.shape[0])


def matrix_to_json(M) -> dict:
    M = np.asarray(M)
    return {"dim": int(M.shape[0]), "re": M.real.tolist(), "im": M.imag.tolist()}


def matrix_from_json(data: dict) -> np.ndarray:
    M = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
    if M.shape != (data["dim"], data["dim"]):
        raise ValueError("declared dim does not match data")
    return M
