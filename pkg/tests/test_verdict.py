import json

import pytest

from pencillab import verdict
from pencillab.errors import InternalInconsistency, InvalidDimension
from pencillab.krasnov import KrasnovInvariant
from pencillab.verdict import NO, UNKNOWN, YES, decide, enumerate_isotopy, table_for_N


def test_small_dimension_rejected():
    with pytest.raises(InvalidDimension):
        enumerate_isotopy(2)
    with pytest.raises(InvalidDimension):
        decide(2, KrasnovInvariant((1,), 2))


def test_n3_classes():
    assert [str(c) for c in enumerate_isotopy(3)] == ["(4)", "(1,1,2)", "(2)", "()"]


@pytest.mark.parametrize("N", range(3, 11))
def test_real_point_rule_against_thresholds(N):
    for cls in enumerate_isotopy(N):
        table = decide(N, cls.invariant)
        h, f = cls.hf.h, cls.hf.f
        assert len(table.rows) == N // 2
        for row in table.rows:
            r = row.r
            has_points = h <= N - 2 * r - 1
            assert row.fano_real_point.value == (YES if has_points else NO)
            if not has_points:
                assert row.q_r_real_connected.value == NO
                assert row.fano_R_rational.value in (NO, UNKNOWN)
            elif h <= N - 2 * r - 3 or f == 1:
                assert row.q_r_real_connected.value == YES
            if r <= N // 2 - 2:
                assert row.fano_R_unirational.value == (YES if has_points else NO)
                if h <= N - 2 * r - 3:
                    assert row.fano_R_rational.value == YES
            else:
                assert row.fano_R_rational.value == UNKNOWN
                assert row.fano_R_unirational.value == UNKNOWN


def test_open_cells_stay_unknown():
    # N = 9, r = 1, h = N-2r-1 = 6: real points but rationality is not decided
    inv = next(c.invariant for c in enumerate_isotopy(9) if c.hf.h == 6)
    row = decide(9, inv).row(1)
    assert row.fano_real_point.value == YES
    assert row.fano_R_rational.value == UNKNOWN
    assert row.fano_R_rational.citation == verdict.OPEN


def test_even_special_rows():
    for cls in enumerate_isotopy(8):
        table = decide(8, cls.invariant)
        h, f = cls.hf.h, cls.hf.f
        assert table.special["maximal_empty_but_q_rational"].value == (YES if (h, f) == (3, 1) else NO)
        assert table.special["second_maximal_unirational_not_rational"].value == (YES if h == 3 and f > 1 else NO)
        if h == 3 and f > 1:
            assert table.row(2).fano_R_rational.value == NO
            assert table.row(2).fano_R_unirational.value == YES


def test_odd_special_rows():
    for N in (5, 7, 9):
        for cls in enumerate_isotopy(N):
            table = decide(N, cls.invariant)
            assert table.special["maximal_real_point"].value == (YES if cls.hf.h <= 2 else NO)


def test_n6_lists_agree_with_rules():
    lists = verdict.n6_lists()
    assert [len(lists[k]) for k in ("f1-rational", "f1-unirational", "x-rational", "x-unirational")] == [7, 11, 14, 15]
    for cls in enumerate_isotopy(6):
        table = decide(6, cls.invariant)  # raises on any contradiction
        for key, (r, attr) in {"f1-rational": (1, "fano_R_rational"), "x-unirational": (0, "fano_R_unirational")}.items():
            value = getattr(table.row(r), attr).value
            assert value == (YES if cls.invariant.runs in lists[key] else NO)


def test_contradiction_is_detected(monkeypatch):
    monkeypatch.setitem(verdict._N6_EXTRA, "f1-rational", ["(7)"])
    with pytest.raises(InternalInconsistency):
        decide(6, KrasnovInvariant((1,), 6))


def test_predicates_and_filters():
    assert [str(t.invariant) for t in table_for_N(6, ["f2-real-point"])] == [
        "(1,1,1,1,1,1,1)",
        "(1,1,1,1,1)",
        "(1,1,1)",
        "(1)",
    ]
    both = table_for_N(6, ["f1-real-point", "h=3"])
    assert both and all(t.hf.h == 3 for t in both)
    assert verdict.invariants_matching(6, "x-real-point") == verdict.invariants_matching(6, "f0-real-point")
    with pytest.raises(ValueError):
        table_for_N(6, ["f1-bogus"])
    with pytest.raises(ValueError):
        table_for_N(6, ["nonsense"])


def test_tables_serialize_deterministically():
    a = json.dumps([t.to_json() for t in table_for_N(7)], sort_keys=True)
    b = json.dumps([t.to_json() for t in table_for_N(7)], sort_keys=True)
    assert a == b
    text = verdict.format_table_text(table_for_N(5))
    assert text.startswith("N = 5, 9 classes")
    assert "(1,2,3)" in text
