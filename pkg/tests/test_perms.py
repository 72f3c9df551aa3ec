from itertools import permutations
from math import comb

import pytest

from catstats.errors import UsageError
from catstats import perms
from catstats.perms import (
    AV123,
    AV132,
    INSERTION_CANDIDATES,
    PAT_213,
    brute_sigma_enum,
    brute_weight_enum,
    catalan,
    catalan_list,
    classify_all_subsets,
    compose_123,
    compose_132,
    contains,
    count_occurrences,
    decompose_132,
    enumerate_avoiders,
    format_perm,
    insertion_map,
    insertion_map_reading,
    parse_perm,
    sigma_stats,
    standardize,
    validate_insertion_reading,
)

CATALAN_PREFIX = [1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786, 208012]


def test_catalan_values():
    assert catalan_list(12) == CATALAN_PREFIX
    assert [catalan(n) for n in range(13)] == CATALAN_PREFIX
    assert catalan(60) == comb(120, 60) // 61


def test_parse_and_format_roundtrip():
    assert parse_perm("132") == (1, 3, 2)
    assert parse_perm("3 1 4 2") == (3, 1, 4, 2)
    assert parse_perm("10,2,1,3,4,5,6,7,8,9") == (10, 2, 1, 3, 4, 5, 6, 7, 8, 9)
    assert format_perm((1, 3, 2)) == "132"
    assert parse_perm(format_perm((3, 1, 4, 2))) == (3, 1, 4, 2)


def test_parse_rejects_non_permutations():
    for bad in ("122", "13", "0 1"):
        with pytest.raises(UsageError):
            parse_perm(bad)
    assert parse_perm("") == ()


def test_standardize():
    assert standardize((5, 9, 2)) == (2, 3, 1)
    assert standardize("cab") == (3, 1, 2)
    assert standardize(()) == ()
    with pytest.raises(UsageError):
        standardize((1, 1))


def test_count_occurrences_hand_values():
    assert count_occurrences((1, 2), (1, 2, 3)) == 3
    assert count_occurrences((2, 1), (3, 2, 1)) == 3
    assert count_occurrences((1, 2, 3), (1, 2, 3, 4)) == 4
    assert count_occurrences(PAT_213, (2, 1, 4, 3)) == 2
    assert count_occurrences((1, 3, 2), (1, 3, 2)) == 1
    assert count_occurrences((), (3, 1, 2)) == 1
    assert contains((2, 1, 4, 3), PAT_213)
    assert not contains((1, 2, 3), (2, 1))


def test_occurrences_respect_inversion_symmetry():
    # occ(p, w) == occ(p^-1, w^-1), a reindexing of the occurrence sets
    def inv(p):
        out = [0] * len(p)
        for i, v in enumerate(p):
            out[v - 1] = i + 1
        return tuple(out)

    pats = [q for k in (2, 3, 4) for q in permutations(range(1, k + 1))]
    for n in range(1, 6):
        for w in permutations(range(1, n + 1)):
            wi = inv(w)
            for p in pats:
                assert count_occurrences(p, w) == count_occurrences(inv(p), wi)


def test_avoider_counts_are_catalan():
    for n in range(10):
        assert sum(1 for _ in enumerate_avoiders(AV132, n)) == catalan(n)
        assert sum(1 for _ in enumerate_avoiders(AV123, n)) == catalan(n)


def test_avoiders_match_naive_filter():
    for n in range(8):
        naive = {
            p
            for p in permutations(range(1, n + 1))
            if not contains(p, AV132)
        }
        assert set(enumerate_avoiders(AV132, n)) == naive


def test_decompose_compose_132_bijection():
    with pytest.raises(UsageError):
        decompose_132(())
    for n in range(1, 9):
        seen = set()
        for p in enumerate_avoiders(AV132, n):
            k, left, right = decompose_132(p)
            assert compose_132(k, left, right) == p
            seen.add((k, left, right))
        assert len(seen) == catalan(n)


def test_decompose_132_rejects_non_avoider():
    with pytest.raises(UsageError):
        decompose_132((1, 3, 2))


def test_selected_insertion_reading():
    assert insertion_map_reading() == "rl-maxima-chain"
    ok, diag = validate_insertion_reading(INSERTION_CANDIDATES["rl-maxima-chain"], 8)
    assert ok
    assert diag == "ok"


def test_insertion_map_frozen_images():
    expected = {
        (): (1,),
        (1,): (1, 2),
        (1, 2): (2, 1, 3),
        (2, 1): (1, 3, 2),
        (1, 3, 2): (2, 1, 4, 3),
        (2, 1, 3): (3, 2, 1, 4),
        (3, 1, 2): (2, 4, 1, 3),
    }
    for p, u in expected.items():
        assert insertion_map(p) == u


def test_insertion_map_is_a_bijection_per_size():
    for n in range(8):
        images = {insertion_map(p) for p in enumerate_avoiders(AV123, n)}
        assert len(images) == catalan(n)
        for u in images:
            assert len(u) == n + 1
            assert not contains(u, AV123)


def test_broken_insertion_candidates_fail_validation():
    for name in ("lr-maxima-chain", "rl-maxima-one-step"):
        ok, diag = validate_insertion_reading(INSERTION_CANDIDATES[name], 6)
        assert not ok
        assert diag


def test_all_candidates_failing_is_a_build_failure(monkeypatch):
    broken = {
        "lr-maxima-chain": INSERTION_CANDIDATES["lr-maxima-chain"],
        "rl-maxima-one-step": INSERTION_CANDIDATES["rl-maxima-one-step"],
    }
    monkeypatch.setattr(perms, "INSERTION_CANDIDATES", broken)
    monkeypatch.setattr(perms, "_selected_insertion", None)
    with pytest.raises(RuntimeError) as exc:
        perms._selected_insert_fn()
    msg = str(exc.value)
    assert "no insertion-map reading survives" in msg
    assert "lr-maxima-chain" in msg and "rl-maxima-one-step" in msg


def test_sigma_stats_match_their_definition():
    for n in range(1, 7):
        for p in enumerate_avoiders(AV123, n):
            u = insertion_map(p)
            uu = insertion_map(u)
            a0 = count_occurrences(PAT_213, p)
            a1 = count_occurrences(PAT_213, u)
            a2 = count_occurrences(PAT_213, uu)
            assert sigma_stats(p) == (a1 - a0, (a2 - a1) - (a1 - a0))


def test_brute_weight_enum_frozen_example():
    m = brute_weight_enum(AV132, [(2, 1)], 3, ["t"])
    assert {e[0]: c for e, c in m.terms.items()} == {0: 1, 1: 1, 2: 2, 3: 1}


def test_brute_sigma_enum_matches_per_perm_stats():
    for n in range(1, 7):
        m = brute_sigma_enum(n)
        assert m.variables == ("t", "s1", "s2")
        expected: dict = {}
        for p in enumerate_avoiders(AV123, n):
            occ = count_occurrences(PAT_213, p)
            s1, s2 = sigma_stats(p)
            key = (occ, s1, s2)
            expected[key] = expected.get(key, 0) + 1
        assert dict(m.terms) == expected


def test_classify_all_subsets_totals(rng):
    for n in range(1, 8):
        vals = list(range(1, n + 1))
        rng.shuffle(vals)
        p = tuple(vals)
        for k in range(1, min(4, n) + 1):
            table = classify_all_subsets(p, k)
            assert sum(table.values()) == comb(n, k)
            assert all(len(q) == k for q in table)


def test_classify_all_subsets_agrees_with_count():
    p = (3, 1, 4, 2, 5)
    table = classify_all_subsets(p, 3)
    for q in permutations((1, 2, 3)):
        assert table.get(q, 0) == count_occurrences(q, p)
