"""Catalan-type functional recurrences with catalytic variables.

A spec describes how the weight enumerator Q_n of a pattern statistic over an
avoidance family decomposes at the position k of the maximum:

    Q_0 = 1
    Q_n = sum over terms, sum over k in the term's range of
          coef(n, k) * subst_L(Q_(k-1)) * subst_R(Q_(n-k))

where coef is a sum of atoms c * n^a * k^b * prod_i t_i^(E_i(n,k)) and each
substitution sends every variable to a monomial in the variables with
exponents that are themselves integer polynomials in (n, k).  This shape is
exactly what splitting an avoider at its maximum produces: the statistic of
the whole is an index-dependent affine combination of the statistics of the
two parts, which exponent bookkeeping turns into monomial substitutions.

Two evaluation modes share one spec.  Full mode carries entire polynomials
(exponential-size output, exact).  Truncated mode carries Taylor expansions
about the all-ones point to a fixed total degree, which is all the moment
pipeline ever reads; substitution images fix the all-ones point (monomials
always do), so truncation commutes with the recurrence and the truncated
values are exact initial segments, not approximations.

The builtin catalog covers the seven length-3-pattern statistics on the
132-avoiders (one catalytic variable) and the 213 statistic on the
123-avoiders (two catalytic variables driven by the insertion map; see
perms.py).  Every spec is mass-checked against the Catalan numbers at
construction time.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import UsageError
from .multipoly import IndexPoly, MultiPoly, index_poly, norm_coeff
from .perms import catalan_list
from .series import (
    SeriesBasis,
    TruncatedSeries,
    binomial_series,
    compose_prepared,
)

DEFAULT_FULL_LIMIT = 64
MAX_EXPONENT = 2**31


@dataclass(frozen=True)
class CoefAtom:
    """factor * n^n_deg * k^k_deg * prod_i var_i ^ var_exps[i](n, k)."""

    var_exps: "tuple[IndexPoly, ...]"
    factor: "int | Fraction" = 1
    n_deg: int = 0
    k_deg: int = 0

    def scalar(self, n: int, k: int):
        return self.factor * n**self.n_deg * k**self.k_deg


# Substitution: image of variable i is prod_j var_j ^ matrix[i][j](n, k).
SubstMatrix = "tuple[tuple[IndexPoly, ...], ...]"


@dataclass(frozen=True)
class RecTerm:
    """One summand of the recurrence.

    The sum runs k = k_low .. n by default; k_high pins an absolute upper
    bound instead (k_high=1 with k_low=1 encodes a single boundary summand,
    which the 123-family recurrence needs).
    """

    atoms: "tuple[CoefAtom, ...]"
    k_low: int = 1
    k_high: "int | None" = None
    left: "SubstMatrix | None" = None
    right: "SubstMatrix | None" = None

    def k_range(self, n: int) -> range:
        return range(self.k_low, (n if self.k_high is None else min(self.k_high, n)) + 1)


def subst_matrix(variables: "Sequence[str]", images: Mapping) -> SubstMatrix:
    """Build a substitution matrix from {source: {target: exponent}}.

    Unmentioned variables map to themselves; exponents are IndexPoly or int.
    """
    variables = tuple(variables)
    for src in images:
        if src not in variables:
            raise UsageError(f"unknown substitution source {src!r}")
    rows = []
    for i, v in enumerate(variables):
        img = images.get(v)
        if img is None:
            rows.append(tuple(IndexPoly.ONE if j == i else IndexPoly.ZERO for j in range(len(variables))))
        else:
            row = []
            for j, u in enumerate(variables):
                e = img.get(u, 0)
                row.append(index_poly(e) if not isinstance(e, IndexPoly) else e)
            rows.append(tuple(row))
    return tuple(rows)


def _identity_row(i: int, nv: int) -> tuple:
    return tuple(IndexPoly.ONE if j == i else IndexPoly.ZERO for j in range(nv))


class FuncRecSpec:
    """A validated functional recurrence for one (family, statistic) pair."""

    __slots__ = ("family", "statistic", "variables", "terms", "tracked")

    def __init__(
        self,
        family: str,
        statistic: str,
        variables: "Sequence[str]",
        terms: "Sequence[RecTerm]",
        tracked: "tuple[tuple[str, str], ...]" = (),
    ):
        self.family = family
        self.statistic = statistic
        self.variables = tuple(variables)
        self.terms = tuple(terms)
        self.tracked = tracked
        if not self.variables:
            raise UsageError("a spec needs at least one variable")
        if not self.terms:
            raise UsageError("a spec needs at least one term")
        nv = len(self.variables)
        for term in self.terms:
            if term.k_low < 1:
                raise UsageError("k_low must be >= 1")
            if term.k_high is not None and term.k_high < term.k_low:
                raise UsageError("k_high must be >= k_low")
            for atom in term.atoms:
                if len(atom.var_exps) != nv:
                    raise UsageError("atom exponent arity does not match variables")
            for mat in (term.left, term.right):
                if mat is not None and (
                    len(mat) != nv or any(len(row) != nv for row in mat)
                ):
                    raise UsageError("substitution matrix arity does not match variables")
        self._mass_check()

    @property
    def label(self) -> str:
        return f"{self.family}:{self.statistic}"

    def _mass_check(self, n_max: int = 12) -> None:
        """At the all-ones point the recurrence must reproduce the Catalan
        numbers; exponent data must also evaluate non-negative on the range."""
        cats = catalan_list(n_max)
        mass = [1]
        for n in range(1, n_max + 1):
            total = 0
            for term in self.terms:
                for k in term.k_range(n):
                    for atom in term.atoms:
                        for e in atom.var_exps:
                            if e.eval(n, k) < 0:
                                raise UsageError(
                                    f"{self.label}: negative coefficient exponent at (n={n}, k={k})"
                                )
                    for mat in (term.left, term.right):
                        if mat is not None:
                            for row in mat:
                                for e in row:
                                    if e.eval(n, k) < 0:
                                        raise UsageError(
                                            f"{self.label}: negative substitution exponent at (n={n}, k={k})"
                                        )
                    scal = sum(atom.scalar(n, k) for atom in term.atoms)
                    total += scal * mass[k - 1] * mass[n - k]
            mass.append(total)
            if total != cats[n]:
                raise UsageError(
                    f"{self.label}: mass check failed at n = {n}: {total} != {cats[n]}"
                )

    def __repr__(self):
        return f"FuncRecSpec({self.label}, vars={self.variables}, {len(self.terms)} terms)"

    # -- exchange format ---------------------------------------------------

    def to_wire(self) -> dict:
        def mat_wire(mat):
            if mat is None:
                return None
            return [[e.to_wire() for e in row] for row in mat]

        return {
            "family": self.family,
            "statistic": self.statistic,
            "variables": list(self.variables),
            "tracked": [list(pair) for pair in self.tracked],
            "terms": [
                {
                    "k_low": t.k_low,
                    "k_high": t.k_high,
                    "atoms": [
                        {
                            "factor": f"{Fraction(a.factor).numerator}/{Fraction(a.factor).denominator}",
                            "n_deg": a.n_deg,
                            "k_deg": a.k_deg,
                            "var_exps": [e.to_wire() for e in a.var_exps],
                        }
                        for a in t.atoms
                    ],
                    "left": mat_wire(t.left),
                    "right": mat_wire(t.right),
                }
                for t in self.terms
            ],
        }

    @classmethod
    def from_wire(cls, obj: Mapping) -> "FuncRecSpec":
        def mat_read(m):
            if m is None:
                return None
            return tuple(tuple(IndexPoly.from_wire(e) for e in row) for row in m)

        terms = []
        for t in obj["terms"]:
            atoms = tuple(
                CoefAtom(
                    var_exps=tuple(IndexPoly.from_wire(e) for e in a["var_exps"]),
                    factor=norm_coeff(Fraction(a["factor"])),
                    n_deg=a["n_deg"],
                    k_deg=a["k_deg"],
                )
                for a in t["atoms"]
            )
            terms.append(
                RecTerm(
                    atoms=atoms,
                    k_low=t["k_low"],
                    k_high=t["k_high"],
                    left=mat_read(t["left"]),
                    right=mat_read(t["right"]),
                )
            )
        return cls(
            obj["family"],
            obj["statistic"],
            tuple(obj["variables"]),
            terms,
            tuple(tuple(pair) for pair in obj.get("tracked", [])),
        )


@dataclass
class EnumeratorSequence:
    """Q_0 .. Q_N as produced by one of the evaluators."""

    spec: FuncRecSpec
    mode: str  # "full" | "truncated"
    cap: "int | None"
    values: list

    def __len__(self):
        return len(self.values)

    def masses(self) -> "list[int]":
        if self.mode == "full":
            return [p.mass() for p in self.values]
        return [s.constant_term() for s in self.values]

    def specialize(self, assignment: Mapping) -> "EnumeratorSequence":
        """Fix chosen variables after the fact.

        Full mode takes any rational values.  Truncated mode only supports
        the value 1 (drop the variable's deviation); anything else cannot be
        recovered from an expansion about the all-ones point.
        """
        if self.mode == "full":
            vals = [p.substitute_values(assignment) for p in self.values]
        else:
            if any(v != 1 for v in assignment.values()):
                raise UsageError("truncated sequences can only specialize variables to 1")
            vals = [s.restrict(assignment.keys()) for s in self.values]
        out = EnumeratorSequence(self.spec, self.mode, self.cap, vals)
        return out


# -- full mode -------------------------------------------------------------


def _coef_poly(term: RecTerm, n: int, k: int, variables) -> MultiPoly:
    terms: dict = {}
    for atom in term.atoms:
        exps = tuple(e.eval(n, k) for e in atom.var_exps)
        if any(e < 0 for e in exps):
            raise UsageError(f"negative exponent in coefficient at (n={n}, k={k})")
        terms[exps] = terms.get(exps, 0) + atom.scalar(n, k)
    return MultiPoly(variables, terms)


def _subst_images(mat: SubstMatrix, n: int, k: int, variables) -> "dict | None":
    """Concrete exponent vectors at (n, k); None when the matrix acts as identity."""
    nv = len(variables)
    images = {}
    for i, row in enumerate(mat):
        exps = tuple(e.eval(n, k) for e in row)
        if any(e < 0 for e in exps):
            raise UsageError(f"negative substitution exponent at (n={n}, k={k})")
        if exps != tuple(1 if j == i else 0 for j in range(nv)):
            images[variables[i]] = exps
    return images or None


def _projected_degrees(spec: FuncRecSpec, n_max: int) -> "list[list[int]]":
    """Per-variable degree bounds D[n][i] under the recurrence."""
    nv = len(spec.variables)
    D = [[0] * nv]
    for n in range(1, n_max + 1):
        best = [0] * nv
        for term in spec.terms:
            for k in term.k_range(n):
                contrib = [0] * nv
                for atom in term.atoms:
                    for i, e in enumerate(atom.var_exps):
                        contrib[i] = max(contrib[i], e.eval(n, k))
                for mat, src in ((term.left, D[k - 1]), (term.right, D[n - k])):
                    if mat is None:
                        for i in range(nv):
                            contrib[i] += src[i]
                    else:
                        for j in range(nv):
                            add = 0
                            for i in range(nv):
                                if src[i]:
                                    add += src[i] * mat[i][j].eval(n, k)
                            contrib[j] += add
                for i in range(nv):
                    if contrib[i] > best[i]:
                        best[i] = contrib[i]
        D.append(best)
    return D


def eval_full(spec: FuncRecSpec, n_max: int, limit: int = DEFAULT_FULL_LIMIT) -> EnumeratorSequence:
    """Exact polynomial enumerators Q_0 .. Q_n_max."""
    if n_max < 0:
        raise UsageError("n_max must be >= 0")
    if n_max > limit:
        raise UsageError(
            f"full mode is capped at n = {limit} by default; raise the limit "
            "explicitly, or use truncated mode for moment work"
        )
    degs = _projected_degrees(spec, n_max)
    worst = max((d for row in degs for d in row), default=0)
    if worst >= MAX_EXPONENT:
        raise UsageError(
            f"projected exponent {worst} exceeds {MAX_EXPONENT}; use truncated mode"
        )
    variables = spec.variables
    values = [MultiPoly.one(variables)]
    for n in range(1, n_max + 1):
        acc = MultiPoly.zero(variables)
        for term in spec.terms:
            for k in term.k_range(n):
                part = _coef_poly(term, n, k, variables)
                lf = values[k - 1]
                if term.left is not None:
                    img = _subst_images(term.left, n, k, variables)
                    if img:
                        lf = lf.subst_monomial(img)
                rf = values[n - k]
                if term.right is not None:
                    img = _subst_images(term.right, n, k, variables)
                    if img:
                        rf = rf.subst_monomial(img)
                acc = acc + part * lf * rf
        values.append(acc)
    return EnumeratorSequence(spec, "full", None, values)


# -- truncated mode --------------------------------------------------------


class _SubstPowers:
    """Caches compose-ready image power lists keyed by evaluated exponents."""

    def __init__(self, mat: SubstMatrix, basis: SeriesBasis):
        self.mat = mat
        self.basis = basis
        self.cache: dict = {}
        nv = len(basis.variables)
        self.unit_rows = [tuple(1 if j == i else 0 for j in range(nv)) for i in range(nv)]

    def at(self, n: int, k: int):
        key = tuple(tuple(e.eval(n, k) for e in row) for row in self.mat)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        basis = self.basis
        cap = basis.cap
        pows = []
        for i, row in enumerate(key):
            if row == self.unit_rows[i]:
                pows.append(None)
                continue
            if any(e < 0 for e in row):
                raise UsageError(f"negative substitution exponent at (n={n}, k={k})")
            img = None
            for j, e in enumerate(row):
                if e == 0:
                    continue
                f = binomial_series(basis, basis.variables[j], e)
                img = f if img is None else img * f
            if img is None:
                img = TruncatedSeries.constant(basis, 1)
            img = img - 1
            plist = [TruncatedSeries.constant(basis, 1)]
            for _ in range(cap):
                plist.append(plist[-1] * img)
            pows.append(plist)
        self.cache[key] = pows
        return pows


class _CoefSeries:
    """Caches the series of prod_i (1+z_i)^(E_i) keyed by evaluated exponents."""

    def __init__(self, basis: SeriesBasis):
        self.basis = basis
        self.cache: dict = {}

    def monomial_at(self, exps: tuple) -> TruncatedSeries:
        hit = self.cache.get(exps)
        if hit is not None:
            return hit
        out = None
        for v, e in zip(self.basis.variables, exps):
            if e:
                f = binomial_series(self.basis, v, e)
                out = f if out is None else out * f
        if out is None:
            out = TruncatedSeries.constant(self.basis, 1)
        self.cache[exps] = out
        return out


def eval_truncated(spec: FuncRecSpec, n_max: int, cap: int) -> EnumeratorSequence:
    """Taylor expansions of Q_0 .. Q_n_max about all-ones, total degree <= cap.

    The series coefficients are exact: coefficient of prod z_i^(e_i) equals
    the corresponding mixed Taylor coefficient of the full enumerator.
    """
    if n_max < 0:
        raise UsageError("n_max must be >= 0")
    if cap < 1:
        raise UsageError("cap must be >= 1")
    basis = SeriesBasis(spec.variables, cap)
    left_pows = [None if t.left is None else _SubstPowers(t.left, basis) for t in spec.terms]
    right_pows = [None if t.right is None else _SubstPowers(t.right, basis) for t in spec.terms]
    coef_cache = _CoefSeries(basis)
    values = [TruncatedSeries.constant(basis, 1)]
    for n in range(1, n_max + 1):
        acc = TruncatedSeries(basis)
        for ti, term in enumerate(spec.terms):
            for k in term.k_range(n):
                coef = None
                for atom in term.atoms:
                    exps = tuple(e.eval(n, k) for e in atom.var_exps)
                    if any(e < 0 for e in exps):
                        raise UsageError(f"negative exponent in coefficient at (n={n}, k={k})")
                    piece = coef_cache.monomial_at(exps) * atom.scalar(n, k)
                    coef = piece if coef is None else coef + piece
                lf = values[k - 1]
                if left_pows[ti] is not None:
                    lf = compose_prepared(lf, left_pows[ti].at(n, k))
                rf = values[n - k]
                if right_pows[ti] is not None:
                    rf = compose_prepared(rf, right_pows[ti].at(n, k))
                acc.add_inplace(coef * lf * rf)
        values.append(acc)
    return EnumeratorSequence(spec, "truncated", cap, values)


# -- builtin catalog -------------------------------------------------------

_E = index_poly
_K_MINUS_1 = _E({(0, 1): 1, (0, 0): -1})           # k - 1
_N_MINUS_K = _E({(1, 0): 1, (0, 1): -1})           # n - k
_K = _E({(0, 1): 1})                               # k
_K_TIMES_NK = _E({(1, 1): 1, (0, 2): -1})          # k(n - k)
_K1_TIMES_NK = _E({(1, 1): 1, (0, 2): -1, (1, 0): -1, (0, 1): 1})  # (k-1)(n-k)
_ZERO = IndexPoly.ZERO
_ONE = IndexPoly.ONE


def _atom(*var_exps) -> CoefAtom:
    return CoefAtom(var_exps=tuple(var_exps))


def _spec_av132_univariate(stat: str, exponent: IndexPoly) -> FuncRecSpec:
    return FuncRecSpec(
        "av132",
        stat,
        ("t",),
        [RecTerm(atoms=(_atom(exponent),))],
        tracked=(("t", stat),),
    )


def _spec_av132_catalytic(stat, coef_t, coef_q, left_images, right_images, q_pattern):
    variables = ("t", "q")
    left = subst_matrix(variables, left_images) if left_images else None
    right = subst_matrix(variables, right_images) if right_images else None
    return FuncRecSpec(
        "av132",
        stat,
        variables,
        [RecTerm(atoms=(_atom(coef_t, coef_q),), left=left, right=right)],
        tracked=(("t", stat), ("q", q_pattern)),
    )


def _spec_av123_213() -> FuncRecSpec:
    variables = ("t", "s1", "s2")
    boundary = RecTerm(
        atoms=(_atom(_ZERO, _ZERO, _ONE),),  # coefficient s2
        k_low=1,
        k_high=1,
    )
    bulk = RecTerm(
        atoms=(_atom(_ZERO, _ZERO, _ZERO),),  # coefficient 1
        k_low=2,
        left=subst_matrix(variables, {"s1": {"t": 1, "s1": 1}, "s2": {"s1": 1, "s2": 1}}),
    )
    return FuncRecSpec("av123", "213", variables, [boundary, bulk], tracked=(("t", "213"),))


_CATALOG_BUILDERS = {
    ("av132", "21"): lambda: _spec_av132_univariate("21", _K_TIMES_NK),
    ("av132", "12"): lambda: _spec_av132_univariate("12", _K_MINUS_1),
    ("av132", "132"): lambda: _spec_av132_univariate("132", _ZERO),
    ("av132", "231"): lambda: _spec_av132_catalytic(
        "231", _K1_TIMES_NK, _K_MINUS_1, {"q": {"t": _N_MINUS_K, "q": 1}}, None, "12"
    ),
    ("av132", "123"): lambda: _spec_av132_catalytic(
        "123", _ZERO, _K_MINUS_1, {"q": {"t": 1, "q": 1}}, None, "12"
    ),
    ("av132", "321"): lambda: _spec_av132_catalytic(
        "321",
        _ZERO,
        _K_TIMES_NK,
        {"q": {"t": _N_MINUS_K, "q": 1}},
        {"q": {"t": _K, "q": 1}},
        "21",
    ),
    ("av132", "213"): lambda: _spec_av132_catalytic(
        "213", _ZERO, _K_TIMES_NK, {"q": {"t": 1, "q": 1}}, None, "21"
    ),
    ("av132", "312"): lambda: _spec_av132_catalytic(
        "312", _ZERO, _K_MINUS_1, None, {"q": {"t": _K, "q": 1}}, "12"
    ),
    ("av123", "213"): _spec_av123_213,
}

_CATALOG_CACHE: dict = {}


def builtin_families() -> "list[tuple[str, str]]":
    return sorted(_CATALOG_BUILDERS)


def builtin_spec(family: str, statistic: str) -> FuncRecSpec:
    key = (family, statistic)
    if key not in _CATALOG_BUILDERS:
        known = ", ".join(f"{f}:{s}" for f, s in builtin_families())
        raise UsageError(f"no builtin recurrence for {family}:{statistic}; available: {known}")
    if key not in _CATALOG_CACHE:
        _CATALOG_CACHE[key] = _CATALOG_BUILDERS[key]()
    return _CATALOG_CACHE[key]
