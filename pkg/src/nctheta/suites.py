"""Named verification suites shared by the command line and the tests."""

from __future__ import annotations

import numpy as np

from .algebra import ball, even_sphere, hom_check
from .clutching import KINDS, direct_sum, make_class, paper_module_class
from .field import retraction_check
from .matrices import instanton_report
from .report import Report
from .torus_rep import Rep, clock_shift

__all__ = ["SUITES", "run_suite", "pullback_report", "retractions_report", "semigroup_report", "small_classes"]


def pullback_report(twist: int = 1) -> Report:
    """``z_i -> (w_i, w_i)``, ``x -> (y, -y)`` respects every even-sphere relation."""
    src = even_sphere(2, twist)
    dst = ball(2, with_u=False, twist=twist)
    mapping = {
        "z1": (dst.gen("w1"), dst.gen("w1")),
        "z2": (dst.gen("w2"), dst.gen("w2")),
        "x": (dst.gen("y"), -dst.gen("y")),
    }
    report = hom_check(mapping, src, (dst, dst))
    report.title = "pullback"
    return report


def retractions_report(rep: Rep | None = None) -> Report:
    rep = rep or clock_shift(3, 8)
    report = Report(f"retractions at theta = {rep.p}/{rep.q}")
    report.extend(retraction_check("ball_to_scalars", rep), "ball: ")
    report.extend(retraction_check("solid_torus_to_circle", rep), "solid torus: ")
    return report


def small_classes(kind: str, max_n: int = 6, max_s: int = 6) -> list:
    """Every distinct class with ``n <= max_n`` and ``|s| <= max_s``."""
    seen = []
    for n in range(max_n + 1):
        for s in range(-max_s, max_s + 1):
            c = make_class(kind, n, s)
            if c not in seen:
                seen.append(c)
    return seen


class _Tables:
    """Sums of classes interned as integer ids so triple laws compare as arrays."""

    def __init__(self, classes):
        self.ids: dict = {}
        self.classes = list(classes)
        self.base = np.array([self.intern(c) for c in self.classes])

    def intern(self, c) -> int:
        return self.ids.setdefault(c, len(self.ids))

    def table(self, left, right) -> np.ndarray:
        by_id = {v: k for k, v in self.ids.items()}
        lc = [by_id[i] for i in left]
        rc = [by_id[i] for i in right]
        return np.array([[self.intern(direct_sum(a, b)) for b in rc] for a in lc])


def _semigroup_laws(kind: str, max_n: int, max_s: int) -> Report:
    classes = small_classes(kind, max_n, max_s)
    tab = _Tables(classes)
    base = tab.base
    N = len(base)
    pair = tab.table(base, base)
    sums = np.unique(pair)
    col = {v: i for i, v in enumerate(sums)}
    right = tab.table(sums, base)   # (a+b)+c
    left = tab.table(base, sums)    # a+(b+c)
    pos = np.vectorize(col.get)(pair)
    lhs = right[pos[:, :, None], np.arange(N)[None, None, :]]
    rhs = left[np.arange(N)[:, None, None], pos[None, :, :]]
    report = Report(f"{kind} semigroup, n <= {max_n}, |s| <= {max_s}")
    bad = int(np.count_nonzero(lhs != rhs))
    report.add("associativity", bad == 0, bad)
    bad = int(np.count_nonzero(pair != pair.T))
    report.add("commutativity", bad == 0, bad)
    zero = classes.index(make_class(kind, 0, 0))
    bad = int(np.count_nonzero(pair[zero] != base)) + int(np.count_nonzero(pair[:, zero] != base))
    report.add("zero is neutral", bad == 0, bad)
    # a + c = b + c with a != b means column c of the sum table repeats an id
    bad = sum(N - len(np.unique(pair[:, c])) for c in range(N))
    report.add("cancellation", bad == 0, bad)
    bad = 0
    for n in range(1, max_n + 1):
        for s in range(-max_s, max_s + 1):
            target = make_class(kind, n, s)
            if kind == "irrational":
                split = direct_sum(make_class(kind, 1, s), make_class(kind, n - 1, 0))
            elif n >= 2:
                split = direct_sum(make_class(kind, 2, s), make_class(kind, n - 2, 0))
            else:
                split = target
            bad += split != target
    label = "N(n,s) = N(1,s) + N(n-1,0)" if kind == "irrational" else "N(n,s) = N(2,s) + N(n-2,0)"
    report.add(label, bad == 0, bad)
    if kind == "rational":
        # rank-2 classes with s != 0 have no splitting into two nonzero summands
        bad = 0
        for s in range(-max_s, max_s + 1):
            if s == 0:
                continue
            target = make_class(kind, 2, s)
            bad += any(direct_sum(a, b) == target for a in classes for b in classes
                       if not a.is_zero and not b.is_zero)
        report.add("N(2,s), s != 0, is indecomposable", bad == 0, bad)
    return report


def semigroup_report(max_n: int = 6, max_s: int = 6) -> Report:
    report = Report("semigroup")
    for kind in KINDS:
        report.extend(_semigroup_laws(kind, max_n, max_s), f"{kind}: ")
    for label, got, want in [
        ("instanton_e = N(2,-1)", paper_module_class("instanton_e"), (2, -1)),
        ("landi_vs(1) = N(2,-1)", paper_module_class("landi_vs", 1), (2, -1)),
        ("landi_vs(2) = N(3,-4)", paper_module_class("landi_vs", 2), (3, -4)),
    ]:
        report.add(label, (got.n, got.s) == want)
    return report


SUITES = {
    "instanton": lambda **kw: instanton_report(),
    "pullback": lambda **kw: pullback_report(),
    "retractions": lambda rep=None, **kw: retractions_report(rep),
    "semigroup": lambda **kw: semigroup_report(),
}


def run_suite(name: str, **kwargs) -> Report:
    try:
        fn = SUITES[name]
    except KeyError:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}") from None
    return fn(**kwargs)
