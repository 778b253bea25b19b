import json

import pytest

from hspgen.hsp import FamilyKind, PairFamily, SigmaMode
from hspgen.matrix import PolyMatrix, SignMode
from hspgen.ring import U, var
from hspgen.verify import (
    IDENTITIES,
    IdentityReport,
    Mutation,
    SCHEMA_VERSION,
    Selection,
    check_deformed,
    check_generating_function,
    check_invariance,
    check_msf,
    check_nilpotency,
    check_phi_generating_function,
    check_structure,
    check_symbol_consistency,
    matrix_witness,
    plan,
    run_suite,
    scalar_witness,
    with_mutation,
)

u = var(U)


def test_scalar_witness_picks_least_term():
    assert scalar_witness(u, u) is None
    w = scalar_witness(u**2 + 3, u**2)
    assert w == {"kind": "term", "term": "3", "difference": "3"}


def test_matrix_witness_is_first_in_row_major_order():
    a = PolyMatrix.from_rows([[1, 2], [3, 4]])
    b = PolyMatrix.from_rows([[1, 0], [0, 4]])
    assert matrix_witness(a, a) is None
    assert matrix_witness(a, b) == {"kind": "entry", "row": 1, "col": 2, "difference": "2"}
    assert matrix_witness(a, PolyMatrix.zeros(1, 2))["kind"] == "shape"


def test_report_round_trip():
    r = check_nilpotency(PairFamily.su(2, 1))
    assert r.passed and r.witness is None
    back = IdentityReport.from_json(r.to_json())
    assert back == r
    d = json.loads(r.to_json())
    assert set(d) == {"identity", "family", "params", "status", "witness", "elapsed_ms", "options", "tool_version", "schema_version"}
    assert d["schema_version"] == SCHEMA_VERSION
    assert d["params"] == {"p": 2, "q": 1}
    assert r.to_text().startswith("PASS  nilpotency")
    assert "ms)" not in r.to_text() and "ms)" in r.to_text(timings=True)


@pytest.mark.parametrize(
    "check", [check_structure, check_nilpotency, check_deformed, check_generating_function, check_symbol_consistency, check_invariance]
)
def test_family_checks_pass_on_small_ranks(check):
    for f in (PairFamily.sostar(1), PairFamily.sostar(3), PairFamily.sp(1), PairFamily.su(2, 1)):
        assert check(f).passed


def test_degenerate_sostar_one():
    f = PairFamily.sostar(1)
    assert f.dimension == 1
    assert check_generating_function(f).passed


def test_standalone_checks():
    assert check_phi_generating_function(3).passed
    assert check_msf("pfaffian", {"n": 2}).passed
    assert check_msf("determinant", {"p": 2, "q": 2}).passed
    with pytest.raises(ValueError):
        check_msf("permanent", {"n": 2})


def test_printed_sign_mode_witness():
    r = check_msf("determinant", {"p": 1, "q": 1}, SignMode.PRINTED)
    assert not r.passed
    assert r.witness["term"] == "2 * b[1,1] * c[1,1]"
    assert r.options == {"sign_mode": "printed"}


def test_literal_sigma_mode_reports_failure():
    f = PairFamily.su(2, 1)
    r = check_deformed(f, sigma_mode=SigmaMode.LITERAL)
    assert not r.passed and r.options == {"sigma_mode": "literal"}
    assert check_deformed(PairFamily.su(2, 2), sigma_mode=SigmaMode.LITERAL).passed


def test_mutation_hook():
    f = PairFamily.sostar(3)
    for mut in (Mutation(0, 0), Mutation(1, 2, "bump")):
        r = check_deformed(f, mutation=mut)
        assert not r.passed and r.witness
        g = check_generating_function(f, mutation=mut)
        assert not g.passed and g.witness
    with pytest.raises(ValueError):
        Mutation(0, 0, "scramble").apply(PolyMatrix.identity(2))


def test_error_witness_instead_of_exception():
    # negating one entry of the SOstar matrix breaks the antidiagonal symmetry
    r = check_generating_function(PairFamily.sostar(3), mutation=Mutation(0, 1))
    assert not r.passed
    assert r.witness["kind"] in ("error", "term")


def test_plan_order_and_filters():
    tasks = plan(Selection())
    seen = [t.identity for t in tasks]
    assert seen == sorted(seen, key=IDENTITIES.index)
    assert {"msf-pf", "msf-det", "phi"} <= set(seen)
    only = plan(Selection(families=[FamilyKind.SOSTAR]))
    assert all(t.family is None or t.family.kind is FamilyKind.SOSTAR for t in only)
    assert not any(t.identity.startswith("msf") for t in only)
    narrow = plan(Selection(identities=["gen-fn"], sostar=(4,), families=[FamilyKind.SOSTAR]))
    assert [(t.identity, t.family.n) for t in narrow] == [("gen-fn", 4)]
    with pytest.raises(ValueError):
        plan(Selection(identities=["nope"]))


def test_default_grid_counts():
    tasks = plan(Selection())
    per_identity = {}
    for t in tasks:
        per_identity[t.identity] = per_identity.get(t.identity, 0) + 1
    assert per_identity["gen-fn"] == 5 + 3 + 5
    assert per_identity["phi"] == 5
    assert per_identity["msf-pf"] == 3
    assert per_identity["msf-det"] == 4


def _strip(reports):
    return [(r.identity, r.family, r.params, r.status, r.witness, r.options) for r in reports]


def test_parallel_run_is_deterministic():
    sel = Selection(identities=["deformed", "symbol", "msf-det"], sostar=(2, 3), sp=(1,), su=((2, 1),), msf_det=((1, 1), (2, 1)))
    serial = run_suite(sel)
    parallel = run_suite(sel, jobs=3)
    assert _strip(serial) == _strip(parallel)
    assert all(r.passed for r in serial)


def test_with_mutation_selection():
    sel = Selection(identities=["deformed"], families=[FamilyKind.SOSTAR], sostar=(3,))
    reports = run_suite(with_mutation(sel, Mutation(0, 0)))
    assert len(reports) == 1 and not reports[0].passed
    assert reports[0].witness["kind"] == "entry"
