import json

import pytest

from catstats.errors import UsageError
from catstats.funcrec import (
    FuncRecSpec,
    builtin_families,
    builtin_spec,
    eval_full,
    eval_truncated,
)
from catstats.perms import (
    AV132,
    brute_sigma_enum,
    brute_weight_enum,
    catalan_list,
    parse_perm,
)
from catstats.series import SeriesBasis, poly_to_series

CATALOG = [
    ("av123", "213"),
    ("av132", "12"),
    ("av132", "123"),
    ("av132", "132"),
    ("av132", "21"),
    ("av132", "213"),
    ("av132", "231"),
    ("av132", "312"),
    ("av132", "321"),
]


def test_catalog_contents():
    assert builtin_families() == CATALOG
    for family, statistic in CATALOG:
        spec = builtin_spec(family, statistic)
        assert spec.family == family
        assert spec.statistic == statistic
        assert spec.label == f"{family}:{statistic}"
        assert len(spec.variables) == len(spec.tracked) or spec.tracked


def test_unknown_spec_raises():
    with pytest.raises(UsageError):
        builtin_spec("av132", "999")
    with pytest.raises(UsageError):
        builtin_spec("av321", "21")


def test_masses_are_catalan_truncated():
    expected = catalan_list(30)
    for family, statistic in CATALOG:
        seq = eval_truncated(builtin_spec(family, statistic), 30, 1)
        assert seq.masses() == expected, f"{family}:{statistic}"
    with pytest.raises(UsageError):
        eval_truncated(builtin_spec("av132", "21"), 5, 0)


def test_masses_are_catalan_full():
    expected = catalan_list(8)
    for family, statistic in CATALOG:
        seq = eval_full(builtin_spec(family, statistic), 8)
        assert seq.masses() == expected, f"{family}:{statistic}"


def test_full_matches_brute_force_oracle():
    for family, statistic in CATALOG:
        spec = builtin_spec(family, statistic)
        seq = eval_full(spec, 7)
        tracked = dict(spec.tracked)
        for n in range(8):
            if family == "av132":
                stats = [parse_perm(tracked[v]) for v in spec.variables]
                expected = brute_weight_enum(AV132, stats, n, spec.variables)
            else:
                expected = brute_sigma_enum(n)
            assert seq.values[n] == expected, f"{family}:{statistic} n={n}"


def test_truncated_is_the_series_of_full():
    cap = 4
    for family, statistic in CATALOG:
        spec = builtin_spec(family, statistic)
        full = eval_full(spec, 7)
        trunc = eval_truncated(spec, 7, cap)
        basis = SeriesBasis(spec.variables, cap)
        for n in range(8):
            want = poly_to_series(full.values[n], basis)
            assert trunc.values[n].to_wire() == want.to_wire(), f"{family}:{statistic} n={n}"


def test_frozen_small_enumerators():
    seq21 = eval_full(builtin_spec("av132", "21"), 3)
    assert [str(p) for p in seq21.values] == ["1", "1", "1 + t", "1 + t + 2t^2 + t^3"]

    seq231 = eval_full(builtin_spec("av132", "231"), 3)
    assert str(seq231.values[3]) == "1 + q + q^2 + t*q + q^3"

    proj = eval_full(builtin_spec("av123", "213"), 4).specialize({"s1": 1, "s2": 1})
    assert [str(p) for p in proj.values] == ["1", "1", "2", "4 + t", "8 + 4t + t^2 + t^3"]


def test_pattern_equal_to_forbidden_is_trivial():
    # no 132-avoider contains a 132, so the enumerator collapses to the count
    seq = eval_full(builtin_spec("av132", "132"), 9)
    cats = catalan_list(9)
    for n, p in enumerate(seq.values):
        assert p.total_degree() == 0
        assert p.mass() == cats[n]


def test_spec_wire_roundtrip():
    for family, statistic in CATALOG:
        spec = builtin_spec(family, statistic)
        wire = spec.to_wire()
        back = FuncRecSpec.from_wire(json.loads(json.dumps(wire)))
        assert back.to_wire() == wire
        assert back.label == spec.label


def test_full_specialize_all_ones_gives_masses():
    seq = eval_full(builtin_spec("av132", "213"), 6)
    ones = seq.specialize({v: 1 for v in seq.spec.variables})
    assert [p.mass() for p in ones.values] == catalan_list(6)


def test_truncated_specialize_rules():
    tr = eval_truncated(builtin_spec("av123", "213"), 4, 2)
    kept = tr.specialize({"s1": 1, "s2": 1})
    assert [s.constant_term() for s in kept.values] == catalan_list(4)
    with pytest.raises(UsageError):
        tr.specialize({"s1": 2})
