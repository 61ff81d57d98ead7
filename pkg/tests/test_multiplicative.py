import json
import random

import pytest

from tn_ineq.errors import QueryError
from tn_ineq.expr_core import COL, ROW, apply_sequence
from tn_ineq.harness import VerifyConfig, find_counterexample, verify
from tn_ineq.multiplicative import (
    SmallestMultQuery,
    decide,
    decide_via_setops,
    dumps_verdict,
    enumerate_queries,
    falsify_search,
    falsify_search_expr,
    is_witness,
    minimal_witnesses,
    necessary_conditions,
    reduce_to_complementary,
    to_principal_form,
)

from cases import EX1_GE, EX1_LE, EX2_GE, EX2_LE, EX2_PRINCIPAL, KOTEL


def query(n, **sets):
    return SmallestMultQuery(n, **sets)


def test_principal_form_of_example():
    pf = to_principal_form(EX2_LE)
    assert (pf.R1, pf.R2, pf.K1, pf.K2) == tuple(EX2_PRINCIPAL[k] for k in ("R1", "R2", "K1", "K2"))


def test_principal_form_identity_and_koteljanskii():
    q = query(3, P1=(1,), P2=(2, 3), Q1=(2,), Q2=(1, 3), I1=(1,), I2=(2, 3), J1=(2,), J2=(1, 3))
    pf = to_principal_form(q)
    assert (pf.R1, pf.R2) == (pf.K1, pf.K2)
    pf = to_principal_form(KOTEL)
    assert pf.R1 == (1, 2, 3, 7) and pf.R2 == (2, 6, 7, 8)
    assert pf.K1 == (1, 2, 6, 7) and pf.K2 == (2, 3, 7, 8)


def test_decide_examples():
    v = decide(EX2_LE)
    assert not v.holds and v.witness_set == (6, 7)
    v = decide(EX2_GE)
    assert not v.holds and v.witness_set == (8, 9)
    assert not decide(EX1_LE).holds and not decide(EX1_GE).holds
    assert decide(KOTEL).holds


def test_koteljanskii_survives_sampling():
    rep = verify(KOTEL.to_expr(), VerifyConfig(4, 2000, 3, 0))
    assert rep.ok


def test_decide_invariant_under_relabeling():
    for q in list(enumerate_queries(3))[::37]:
        c = q.canonical()
        relabeled = SmallestMultQuery(
            3, c.P2, c.P1, c.Q2, c.Q1, c.I2, c.I1, c.J2, c.J1,
        )
        assert decide(q).holds == decide(relabeled).holds


def test_query_validation():
    with pytest.raises(QueryError):
        query(3, P1=(1,), P2=(2,), Q1=(1,), Q2=(2,), I1=(1,), I2=(2,), J1=(1,), J2=(2,))
    with pytest.raises(QueryError):
        query(3, P1=(1,), P2=(2, 3), Q1=(1, 2), Q2=(3,), I1=(1,), I2=(2, 3), J1=(1,), J2=(2, 3))
    with pytest.raises(QueryError):
        query(2, P1=(3,), P2=(1,), Q1=(1,), Q2=(1,), I1=(1,), I2=(2,), J1=(1,), J2=(2,))
    with pytest.raises(QueryError):
        SmallestMultQuery.from_json({"n": 2})


def test_query_json_round_trip():
    data = json.loads(json.dumps(EX2_GE.to_json()))
    assert SmallestMultQuery.from_json(data) == EX2_GE


def test_verdict_json():
    d = json.loads(dumps_verdict(decide(EX2_LE)))
    assert d["verdict"] == "FAILS" and d["witness"] == {"S": [6, 7]}


def test_setops_examples():
    assert not decide_via_setops(EX2_LE).holds
    q = query(3, P1=(1,), P2=(2, 3), Q1=(2,), Q2=(1, 3), I1=(1,), I2=(2, 3), J1=(2,), J2=(1, 3))
    assert decide_via_setops(q).holds
    assert decide_via_setops(KOTEL).holds


def test_setops_agrees_with_windows_n2():
    for q in enumerate_queries(2):
        assert decide(q).holds == decide_via_setops(q).holds, q


def test_falsify_examples():
    assert falsify_search(EX1_GE) == [ROW(1, 2)]
    cited = [ROW(3, 2), ROW(4, 3)]
    assert is_witness(EX1_LE, cited)
    found = falsify_search(EX1_LE)
    assert len(found) == 2 and is_witness(EX1_LE, found)
    assert cited in minimal_witnesses(EX1_LE)
    assert falsify_search(to_principal_form(EX2_LE)) == [ROW(6, 7)]
    assert falsify_search(EX2_LE, max_depth=None) is None


def test_fast_search_matches_generic_search():
    rng = random.Random(1)
    qs = list(enumerate_queries(3))
    for q in rng.sample(qs, 150):
        assert falsify_search(q, 3) == falsify_search_expr(q, 3), q


def test_search_never_refutes_holding_queries():
    for q in enumerate_queries(3):
        if decide(q).holds:
            assert falsify_search(q, max_depth=None) is None


def test_search_witness_is_a_real_failure():
    ops = falsify_search(EX1_LE)
    assert ops is not None
    assert find_counterexample(EX1_LE.to_expr(), 20_000) is not None


def test_necessary_conditions():
    assert necessary_conditions(KOTEL) == []
    assert necessary_conditions(EX1_LE) == []
    # labels refer to the <= form, whose smaller side moves at (1,2)
    assert "m_P(1,2) > m_I(1,2)" in necessary_conditions(EX1_GE)


def test_reduce_complementary_is_identity():
    q = query(4, P1=(1, 2), P2=(3, 4), Q1=(3, 4), Q2=(1, 2), I1=(1, 2), I2=(3, 4), J1=(3, 4), J2=(1, 2))
    r = reduce_to_complementary(q)
    assert r.ancestor == q and r.row_ops == () and r.col_ops == ()


def test_reduce_koteljanskii():
    r = reduce_to_complementary(KOTEL)
    a = r.ancestor
    assert not set(a.P1) & set(a.P2) and not set(a.I1) & set(a.I2)
    assert not set(a.Q1) & set(a.Q2) and not set(a.J1) & set(a.J2)
    assert decide(a).holds
    assert r.replay().same_as(KOTEL.to_expr())
    assert apply_sequence(a.to_expr(), r.col_ops + r.row_ops).same_as(KOTEL.to_expr())


def test_reduce_refuses_failing_query():
    with pytest.raises(QueryError):
        reduce_to_complementary(EX2_LE)


def test_reduce_needs_fallback_split_at_n4():
    q = query(4, P1=(1, 2), P2=(1, 2), Q1=(1, 4), Q2=(2, 3), I1=(1, 2), I2=(1, 2), J1=(1, 3), J2=(2, 4))
    assert decide(q).holds
    r = reduce_to_complementary(q)
    assert r.fallback_splits >= 1
    assert r.replay().same_as(q.to_expr()) and decide(r.ancestor).holds


def test_enumeration_size():
    assert sum(1 for _ in enumerate_queries(2)) == 324
    assert sum(1 for _ in enumerate_queries(3)) == 26896


def test_column_witness_on_reverse_example():
    assert falsify_search(EX2_GE) == [COL(2, 3)]
