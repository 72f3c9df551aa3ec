from fractions import Fraction
from itertools import permutations
from math import comb

import pytest

from catstats.errors import DegenerateStatisticError, UsageError
from catstats.funcrec import builtin_families, builtin_spec, eval_full, eval_truncated
from catstats.moments import (
    central_from_raw,
    factorial_from_full,
    falling_factorial,
    moments_from_full,
    moments_from_truncated,
    normal_reference,
    raw_from_factorial,
    standardized,
    stirling2_row,
)
from catstats.perms import count_occurrences, enumerate_avoiders


def test_stirling_and_falling_factorial():
    assert stirling2_row(4) == [0, 1, 7, 6, 1]
    assert stirling2_row(0) == [1]
    assert falling_factorial(7, 3) == 7 * 6 * 5
    assert falling_factorial(3, 5) == 0
    assert falling_factorial(4, 0) == 1


def test_raw_and_central_conversions():
    # x ~ {0, 1, 2} uniform: factorial counts per value of x summed over 3 perms
    f = [3, 3, 2, 0]
    m = raw_from_factorial(f)
    assert m == [Fraction(1), Fraction(1), Fraction(5, 3), Fraction(3)]
    M = central_from_raw(m)
    assert M[1] == 0
    assert M[2] == Fraction(2, 3)


def test_normal_reference_odd_even():
    assert [normal_reference(r) for r in range(9)] == [1, 0, 1, 0, 3, 0, 15, 0, 105]


def test_frozen_inversion_moments():
    tab = moments_from_full(eval_full(builtin_spec("av132", "21"), 4), r_max=4)
    r3 = tab.row(3)
    assert r3.f[:4] == [5, 8, 10, 6]
    assert r3.m[1] == Fraction(8, 5)
    assert r3.M[2] == Fraction(26, 25)
    assert r3.M[3] == Fraction(-36, 125)
    assert r3.alpha.signed_square[3] == Fraction(-162, 2197)
    assert tab.alpha_float(3, 3) == pytest.approx(-0.271545417883639)

    r4 = tab.row(4)
    assert r4.f[:3] == [14, 47, 148]
    assert r4.M[2] == Fraction(521, 196)
    assert r4.M[3] == Fraction(-576, 343)
    assert tab.alpha_float(4, 3) == pytest.approx(-0.387485883606717)


def test_moments_match_brute_distribution():
    spec = builtin_spec("av132", "21")
    tab = moments_from_full(eval_full(spec, 6), r_max=4)
    for n in range(2, 7):
        counts = [
            count_occurrences((2, 1), p) for p in enumerate_avoiders((1, 3, 2), n)
        ]
        total = len(counts)
        raw = [
            Fraction(sum(c**r for c in counts), total) for r in range(5)
        ]
        row = tab.row(n)
        assert row.count == total
        assert row.m == raw
        fact = [sum(falling_factorial(c, r) for c in counts) for r in range(5)]
        assert row.f == fact


def test_factorial_from_full_is_derivative_data():
    # f_r(n) = sum over weights of (occ)_r, read off the enumerator
    spec = builtin_spec("av132", "123")
    seq = eval_full(spec, 6).specialize({"q": 1})
    for n in range(7):
        occs = [
            count_occurrences((1, 2, 3), p)
            for p in enumerate_avoiders((1, 3, 2), n)
        ]
        got = factorial_from_full(seq.values[n], 3)
        assert got == [
            sum(falling_factorial(c, r) for c in occs) for r in range(4)
        ]


def test_full_and_truncated_tables_agree():
    for family, statistic in builtin_families():
        spec = builtin_spec(family, statistic)
        if family != "av132":
            continue
        full = moments_from_full(eval_full(spec, 8), r_max=6)
        trunc = moments_from_truncated(eval_truncated(spec, 8, 6))
        for n in range(9):
            a, b = full.row(n), trunc.row(n)
            assert a.f == b.f
            assert a.M == b.M
            if a.alpha is None:
                assert b.alpha is None
            else:
                assert a.alpha.signed_square == b.alpha.signed_square


def test_standardized_invariants():
    # every catalog statistic: M1 = 0, alpha2 = 1, Pearson bound exact
    for family, statistic in builtin_families():
        spec = builtin_spec(family, statistic)
        tab = moments_from_truncated(eval_truncated(spec, 10, 4))
        for n in range(11):
            row = tab.row(n)
            assert row.M[1] == 0
            if row.alpha is None:
                continue
            ss = row.alpha.signed_square
            assert ss[2] == 1
            assert ss[4] >= (abs(ss[3]) + 1) ** 2


def test_degenerate_statistic_raises():
    tab = moments_from_full(eval_full(builtin_spec("av132", "132"), 5), r_max=4)
    assert tab.row(4).alpha is None
    assert "degenerate" in tab.row(4).note
    with pytest.raises(DegenerateStatisticError):
        tab.alpha_float(3, 4)


def test_standardized_requires_second_moment():
    with pytest.raises(UsageError):
        standardized([Fraction(1), Fraction(0)])


def test_csv_rows_shape():
    tab = moments_from_full(eval_full(builtin_spec("av132", "21"), 3), r_max=4)
    rows = tab.csv_rows()
    header = rows[0]
    assert header[:2] == ["n", "count"]
    assert "alpha4" in header
    assert len(rows) == 5
    assert all(len(r) == len(header) for r in rows[1:])
