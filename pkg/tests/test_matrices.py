import json

import pytest

from nctheta.algebra import odd_sphere
from nctheta.matrices import (
    AlgMatrix,
    alg_trace,
    builtin,
    compute_h,
    inclusion,
    instanton_report,
    is_projection,
    mat_mul,
    quotient_map,
    verify_factorization,
)

S3 = odd_sphere(2)


def test_identity_is_projection():
    assert is_projection(AlgMatrix.identity(S3, 3)).passed


def test_nonprojection_is_reported():
    A = AlgMatrix(S3, [["z1", "0"], ["0", "1"]])
    report = is_projection(A)
    assert not report.passed
    assert report.checks[0].residual > 0


def test_shape_errors():
    A = AlgMatrix(S3, [["1", "0"]])
    with pytest.raises(ValueError):
        mat_mul(A, A)
    with pytest.raises(ValueError):
        alg_trace(A)
    with pytest.raises(ValueError):
        is_projection(A)


def test_json_round_trip():
    h = builtin("h_expected")
    data = json.loads(json.dumps(h.to_json()))
    assert AlgMatrix.from_json(data, S3) == h


def test_adjoint_of_product():
    h, z = builtin("h_expected"), builtin("z_corrected")
    assert mat_mul(h, z).adjoint() == mat_mul(z.adjoint(), h.adjoint())


def test_instanton_projection():
    e = builtin("e")
    assert is_projection(e).passed
    assert alg_trace(e) == e.pres.scalar(2)


def test_swapped_convention_breaks_idempotency():
    assert not is_projection(builtin("e", -1)).checks[0].passed


def test_computed_transition_matches_expected():
    assert compute_h() == builtin("h_expected")


def test_factorization_chain_is_a_list_of_five():
    chain = builtin("factorization_chain")
    assert isinstance(chain, list) and len(chain) == 5
    assert all(f.shape == (2, 2) for f in chain)
    assert verify_factorization().passed


def test_quotient_and_inclusion_checks_domain():
    with pytest.raises(ValueError):
        quotient_map(builtin("e"))
    with pytest.raises(ValueError):
        inclusion(builtin("h_expected"))


def test_unknown_builtin():
    with pytest.raises(KeyError):
        builtin("nope")


def test_full_instanton_report():
    report = instanton_report()
    assert report.passed, report.summary()
    assert all(c.residual == 0 for c in report.checks if "negative control" not in c.name)
