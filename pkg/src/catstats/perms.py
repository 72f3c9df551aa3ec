"""Permutations, pattern occurrence counting, and brute-force oracles.

Permutations are tuples of 1-based values in one-line notation; the empty
tuple is the length-0 permutation.  Everything here is exhaustive-by-design
reference code: the functional-recurrence engine is checked against these
enumerators on every build, so clarity beats speed, except where a loop is
genuinely hot (avoider generation, subset classification).

The insertion map on 123-avoiders deserves a note.  It rebuilds a permutation
of length m+1 from one of length m by freeing a front slot, letting the
entries that are not right-to-left maxima slide forward along the chain of
freed positions (first such entry into the front slot, each later one into
the position the previous one vacated), bumping every value by 1 and writing
the new smallest value 1 into the last vacated position.  The construction is
picked from several candidate readings by exhaustive validation: the chosen
reading must make (k, pi1, pi2) -> pi1-block + insert(pi2) a bijection onto
the 123-avoiders of each size up to the validation bound.  See
`insertion_map_reading`.
"""
from __future__ import annotations

import math
from itertools import combinations, permutations
from typing import Iterable, Sequence

from .errors import UsageError
from .multipoly import MultiPoly

Perm = "tuple[int, ...]"

DEFAULT_ORACLE_LIMIT = 12

AV132 = (1, 3, 2)
AV123 = (1, 2, 3)


def catalan(n: int) -> int:
    return math.comb(2 * n, n) // (n + 1)


def catalan_list(n_max: int) -> "list[int]":
    return [catalan(n) for n in range(n_max + 1)]


def standardize(seq: Sequence) -> Perm:
    """Relabel distinct values order-isomorphically to 1..len(seq)."""
    seq = tuple(seq)
    if len(set(seq)) != len(seq):
        raise UsageError(f"cannot standardize a sequence with repeats: {seq}")
    rank = {v: i + 1 for i, v in enumerate(sorted(seq))}
    return tuple(rank[v] for v in seq)


def parse_perm(text: str) -> Perm:
    """'213', '2 1 3' and '2,1,3' all denote the same permutation."""
    text = text.strip()
    if not text:
        return ()
    if any(ch in text for ch in " ,"):
        vals = tuple(int(tok) for tok in text.replace(",", " ").split())
    else:
        if not text.isdigit():
            raise UsageError(f"cannot parse permutation {text!r}")
        vals = tuple(int(ch) for ch in text)
    p = tuple(vals)
    if sorted(p) != list(range(1, len(p) + 1)):
        raise UsageError(f"not a permutation of 1..{len(p)}: {text!r}")
    return p


def format_perm(p: Perm) -> str:
    if not p:
        return "e"
    if len(p) <= 9:
        return "".join(str(v) for v in p)
    return " ".join(str(v) for v in p)


def count_occurrences(pattern: Perm, perm: Perm) -> int:
    """Number of subsequences of `perm` order-isomorphic to `pattern`."""
    k = len(pattern)
    if k == 0:
        return 1
    if k > len(perm):
        return 0
    count = 0
    for comb in combinations(perm, k):
        rank = {v: i + 1 for i, v in enumerate(sorted(comb))}
        if all(rank[v] == p for v, p in zip(comb, pattern)):
            count += 1
    return count


def contains(perm: Perm, pattern: Perm) -> bool:
    k = len(pattern)
    if k == 0:
        return True
    for comb in combinations(perm, k):
        rank = {v: i + 1 for i, v in enumerate(sorted(comb))}
        if all(rank[v] == p for v, p in zip(comb, pattern)):
            return True
    return False


def classify_all_subsets(perm: Perm, k: int) -> "dict[Perm, int]":
    """Pattern -> occurrence count over all C(n, k) subsequences of length k."""
    if k < 0:
        raise UsageError("subset size must be >= 0")
    out: "dict[Perm, int]" = {}
    for comb in combinations(perm, k):
        rank = {v: i + 1 for i, v in enumerate(sorted(comb))}
        pat = tuple(rank[v] for v in comb)
        out[pat] = out.get(pat, 0) + 1
    return out


def _check_oracle_limit(n: int, limit: int) -> None:
    if n > limit:
        raise UsageError(
            f"n = {n} exceeds the brute-force oracle limit {limit}; "
            "raise the limit explicitly if you really want this"
        )


_AVOIDER_CACHE: "dict[tuple, tuple]" = {}


def enumerate_avoiders(forbidden: Perm, n: int, limit: int = DEFAULT_ORACLE_LIMIT):
    """All permutations of 1..n avoiding the forbidden pattern, lex order.

    Only the two length-3 patterns this package studies are supported; both
    get an O(prefix) incremental completion test so generation prunes early.
    """
    forbidden = tuple(forbidden)
    if forbidden not in (AV132, AV123):
        raise UsageError("avoider enumeration supports forbidden patterns 132 and 123 only")
    if n < 0:
        raise UsageError("n must be >= 0")
    _check_oracle_limit(n, limit)
    key = (forbidden, n)
    hit = _AVOIDER_CACHE.get(key)
    if hit is not None:
        return hit
    out: "list[Perm]" = []
    prefix: "list[int]" = []
    used = [False] * (n + 1)
    if forbidden == AV123:
        # state: (min value so far, smallest value with a smaller one before it)
        def extend(cur_min: int, best: int) -> None:
            if len(prefix) == n:
                out.append(tuple(prefix))
                return
            for v in range(1, n + 1):
                if used[v] or v > best:
                    continue
                used[v] = True
                prefix.append(v)
                extend(min(cur_min, v), min(best, v) if v > cur_min else best)
                prefix.pop()
                used[v] = False

        extend(n + 1, n + 1)
    else:
        # appending v completes a 132 iff some earlier value below v
        # precedes some earlier value above v
        def extend() -> None:
            if len(prefix) == n:
                out.append(tuple(prefix))
                return
            for v in range(1, n + 1):
                if used[v]:
                    continue
                lo = n + 1
                ok = True
                for w in prefix:
                    if w < lo:
                        lo = w
                    elif w > v and lo < v:
                        ok = False
                        break
                if not ok:
                    continue
                used[v] = True
                prefix.append(v)
                extend()
                prefix.pop()
                used[v] = False

        extend()
    result = tuple(out)
    _AVOIDER_CACHE[key] = result
    return result


def enumerate_all(n: int, limit: int = 8):
    """Every permutation of 1..n; only for small cross-checks."""
    _check_oracle_limit(n, limit)
    return tuple(permutations(range(1, n + 1)))


# -- structure of 132-avoiders ---------------------------------------------


def decompose_132(p: Perm) -> "tuple[int, Perm, Perm]":
    """Split at the maximum: p = (block above) + (n) + (block below).

    Returns (k, left, right) with the maximum at position k (1-based), the
    left block standardized from the top k-1 values, the right block from the
    bottom n-k values.  Any 132-avoider splits this way and conversely.
    """
    n = len(p)
    if n == 0:
        raise UsageError("cannot decompose the empty permutation")
    k = p.index(n) + 1
    left, right = p[: k - 1], p[k:]
    if left and right and min(left) <= max(right):
        raise UsageError(f"{format_perm(p)} is not 132-avoiding: left block dips below right block")
    return k, standardize(left), standardize(right)


def compose_132(k: int, left: Perm, right: Perm) -> Perm:
    """Inverse of decompose_132; n = len(left) + len(right) + 1."""
    if not 1 <= k == len(left) + 1:
        raise UsageError("position k must equal len(left) + 1")
    n = len(left) + len(right) + 1
    shift = len(right)
    return tuple(v + shift for v in left) + (n,) + right


# -- the insertion map on 123-avoiders -------------------------------------


def _rl_maxima_mask(p: Perm) -> "list[bool]":
    mask = [False] * len(p)
    mx = 0
    for i in range(len(p) - 1, -1, -1):
        if p[i] > mx:
            mask[i] = True
            mx = p[i]
    return mask


def _lr_maxima_mask(p: Perm) -> "list[bool]":
    mask = [False] * len(p)
    mx = 0
    for i, v in enumerate(p):
        if v > mx:
            mask[i] = True
            mx = v
    return mask


def _slide_into_front(p: Perm, keep: "list[bool]"):
    """Cyclic forward slide of the non-kept entries; returns the new perm.

    Work in m+1 slots with slot 0 initially free.  The kept entry at index i
    stays in slot i+1; the sliding entries move forward along the chain of
    freed slots; the last slot freed receives the new value 1; every old
    value is bumped by 1.
    """
    m = len(p)
    out = [0] * (m + 1)
    for i in range(m):
        if keep[i]:
            out[i + 1] = p[i] + 1
    free = 0
    for i in range(m):
        if not keep[i]:
            out[free] = p[i] + 1
            free = i + 1
    out[free] = 1
    return tuple(out)


def _shift_once_literal(p: Perm, keep: "list[bool]"):
    """Every non-kept entry moves exactly one slot forward; None on collision."""
    m = len(p)
    out = [0] * (m + 1)
    for i in range(m):
        if keep[i]:
            out[i + 1] = p[i] + 1
    last_freed = None
    for i in range(m):
        if not keep[i]:
            if out[i] != 0:
                return None
            out[i] = p[i] + 1
            last_freed = i + 1
    out[last_freed if last_freed is not None else 0] = 1
    return tuple(out)


def _insert_rl_chain(p: Perm) -> Perm:
    return _slide_into_front(p, _rl_maxima_mask(p))


def _insert_lr_chain(p: Perm) -> Perm:
    return _slide_into_front(p, _lr_maxima_mask(p))


def _insert_rl_literal(p: Perm):
    return _shift_once_literal(p, _rl_maxima_mask(p))


INSERTION_CANDIDATES = {
    "rl-maxima-chain": _insert_rl_chain,
    "lr-maxima-chain": _insert_lr_chain,
    "rl-maxima-one-step": _insert_rl_literal,
}

_selected_insertion: "tuple[str, object] | None" = None


def compose_123(k: int, left: Perm, right: Perm, insert=None) -> Perm:
    """(k, left, right) -> left-block + insertion-image of right.

    The left factor is placed on the top values, the insertion map rebuilds
    the right factor with a fresh minimum; together with k this is the
    decomposition the three-variable recurrence sums over.
    """
    if insert is None:
        insert = _selected_insert_fn()
    u = insert(right)
    if u is None:
        raise UsageError("insertion reading is not defined on this input")
    shift = len(u)
    return tuple(v + shift for v in left) + u


def validate_insertion_reading(insert, n_max: int, limit: int = DEFAULT_ORACLE_LIMIT):
    """Check the (k, left, right) composition is a bijection for every n <= n_max.

    Returns (ok, diagnostic).
    """
    for n in range(0, n_max + 1):
        target = set(enumerate_avoiders(AV123, n, limit))
        seen = {}
        for k in range(1, n + 1):
            for left in enumerate_avoiders(AV123, n - k, limit):
                for right in enumerate_avoiders(AV123, k - 1, limit):
                    u = insert(right)
                    if u is None:
                        return False, f"undefined on {format_perm(right)}"
                    img = tuple(v + len(u) for v in left) + u
                    if img in seen:
                        return False, (
                            f"collision at n={n}: ({k},{format_perm(left)},{format_perm(right)}) "
                            f"and {seen[img]} both give {format_perm(img)}"
                        )
                    seen[img] = (k, format_perm(left), format_perm(right))
                    if img not in target:
                        return False, f"image {format_perm(img)} at n={n} contains 123"
        if n == 0:
            if () not in target:
                return False, "empty permutation missing"
            continue
        if len(seen) != len(target):
            missing = target - set(seen)
            return False, f"not onto at n={n}: {len(seen)} images vs {len(target)} avoiders, e.g. missing {sorted(missing)[:3]}"
    return True, "ok"


def _selected_insert_fn():
    global _selected_insertion
    if _selected_insertion is None:
        failures = []
        for name, fn in INSERTION_CANDIDATES.items():
            ok, diag = validate_insertion_reading(fn, 7)
            if ok:
                _selected_insertion = (name, fn)
                break
            failures.append(f"{name}: {diag}")
        else:
            raise RuntimeError(
                "no insertion-map reading survives bijectivity validation:\n  "
                + "\n  ".join(failures)
            )
    return _selected_insertion[1]


def insertion_map_reading() -> str:
    """Name of the validated reading (selects on first use)."""
    _selected_insert_fn()
    return _selected_insertion[0]


def insertion_map(p: Perm) -> Perm:
    """The validated insertion map; input must avoid 123."""
    if contains(p, AV123):
        raise UsageError(f"{format_perm(p)} contains 123")
    return _selected_insert_fn()(p)


PAT_213 = (2, 1, 3)


def sigma_stats(p: Perm) -> "tuple[int, int]":
    """First and second forward differences of the 213 count along the
    insertion-map orbit: the catalytic pair the 123-family recurrence tracks."""
    u = insertion_map(p)
    uu = insertion_map(u)
    a0 = count_occurrences(PAT_213, p)
    a1 = count_occurrences(PAT_213, u)
    a2 = count_occurrences(PAT_213, uu)
    return a1 - a0, (a2 - a1) - (a1 - a0)


# -- brute-force weight enumerators ----------------------------------------


def brute_weight_enum(
    forbidden: Perm,
    stats: "Sequence[Perm]",
    n: int,
    variables: "Sequence[str]",
    limit: int = DEFAULT_ORACLE_LIMIT,
) -> MultiPoly:
    """Sum over avoiders of prod_i var_i ^ (occurrences of stats[i])."""
    if len(stats) != len(variables):
        raise UsageError("one variable per statistic, in the same order")
    variables = tuple(variables)
    terms: "dict[tuple, int]" = {}
    for p in enumerate_avoiders(forbidden, n, limit):
        key = tuple(count_occurrences(s, p) for s in stats)
        terms[key] = terms.get(key, 0) + 1
    return MultiPoly(variables, terms)


def brute_sigma_enum(n: int, limit: int = DEFAULT_ORACLE_LIMIT) -> MultiPoly:
    """Weight enumerator of (213-count, sigma1, sigma2) over the 123-avoiders."""
    terms: "dict[tuple, int]" = {}
    for p in enumerate_avoiders(AV123, n, limit):
        s1, s2 = sigma_stats(p)
        key = (count_occurrences(PAT_213, p), s1, s2)
        terms[key] = terms.get(key, 0) + 1
    return MultiPoly(("t", "s1", "s2"), terms)
