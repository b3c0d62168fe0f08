import pytest

from nctheta.suites import SUITES, pullback_report, retractions_report, run_suite, semigroup_report, small_classes
from nctheta.torus_rep import clock_shift


def test_pullback():
    report = pullback_report()
    assert report.passed, report.summary()
    assert any(c.name.startswith("summand 2") for c in report.checks)


def test_pullback_swapped_convention():
    assert pullback_report(twist=-1).passed


def test_retractions_default_and_custom():
    assert retractions_report().passed
    assert retractions_report(clock_shift(2, 5)).passed


def test_semigroup():
    report = semigroup_report()
    assert report.passed, report.summary()
    names = [c.name for c in report.checks]
    assert "rational: N(2,s), s != 0, is indecomposable" in names


def test_small_classes_are_distinct():
    for kind in ("irrational", "rational"):
        classes = small_classes(kind, 3, 2)
        assert len(classes) == len(set(classes))
    assert len(small_classes("irrational", 1, 1)) == 4
    assert len(small_classes("rational", 1, 1)) == 2


@pytest.mark.parametrize("name", sorted(SUITES))
def test_run_suite(name):
    assert run_suite(name).passed


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope")
