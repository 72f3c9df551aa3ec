"""Truncated multivariate power series (total degree cap, exact coefficients).

A series lives in a SeriesBasis: the graded-lex-ordered list of all monomials
in the deviation variables with total degree <= cap.  Coefficients are stored
densely, indexed by that list, so multiplication walks a precomputed
index-by-index product table instead of hashing exponent tuples.  Bases are
interned per (variables, cap).

The intended reading everywhere in this package: the variables are deviations
z_v = v - 1 from the all-ones point, and a series holds the Taylor expansion
of a polynomial (or enumerator) around that point, truncated past the cap.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import UsageError
from .multipoly import MultiPoly, coeff_to_str, coeff_from_str, norm_coeff


def _monomials_upto(nvars: int, cap: int) -> "list[tuple[int, ...]]":
    out = [()]
    for _ in range(nvars):
        out = [e + (j,) for e in out for j in range(cap + 1 - sum(e))]
    out.sort(key=lambda e: (sum(e), e))
    return out


class SeriesBasis:
    """Shared monomial enumeration + product table for one (variables, cap)."""

    _interned: "dict[tuple, SeriesBasis]" = {}

    __slots__ = ("variables", "cap", "monomials", "index", "prod")

    def __new__(cls, variables: "tuple[str, ...]", cap: int):
        key = (tuple(variables), cap)
        hit = cls._interned.get(key)
        if hit is not None:
            return hit
        if cap < 1:
            raise UsageError("series cap must be >= 1")
        self = object.__new__(cls)
        self.variables = key[0]
        self.cap = cap
        self.monomials = _monomials_upto(len(self.variables), cap)
        self.index = {e: i for i, e in enumerate(self.monomials)}
        # prod[i][j] = index of monomial i*j, or -1 when past the cap
        n = len(self.monomials)
        self.prod = []
        for ea in self.monomials:
            row = []
            for eb in self.monomials:
                if sum(ea) + sum(eb) > cap:
                    row.append(-1)
                else:
                    row.append(self.index[tuple(x + y for x, y in zip(ea, eb))])
            self.prod.append(row)
        cls._interned[key] = self
        return self

    def __len__(self) -> int:
        return len(self.monomials)

    def __repr__(self):
        return f"SeriesBasis({self.variables!r}, cap={self.cap}, {len(self)} monomials)"


class TruncatedSeries:
    """Dense exact series over a SeriesBasis."""

    __slots__ = ("basis", "coeffs")

    def __init__(self, basis: SeriesBasis, coeffs: "Sequence | None" = None):
        self.basis = basis
        if coeffs is None:
            self.coeffs = [0] * len(basis)
        else:
            if len(coeffs) != len(basis):
                raise UsageError("coefficient list does not match basis size")
            self.coeffs = [norm_coeff(c) for c in coeffs]

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, basis: SeriesBasis, c) -> "TruncatedSeries":
        s = cls(basis)
        s.coeffs[0] = norm_coeff(c)
        return s

    @classmethod
    def from_terms(cls, basis: SeriesBasis, terms: Mapping) -> "TruncatedSeries":
        """Terms past the cap are rejected, not silently dropped."""
        s = cls(basis)
        for exps, c in terms.items():
            i = basis.index.get(tuple(exps))
            if i is None:
                raise UsageError(f"monomial {tuple(exps)} outside basis cap {basis.cap}")
            s.coeffs[i] = norm_coeff(c)
        return s

    def copy(self) -> "TruncatedSeries":
        s = TruncatedSeries(self.basis)
        s.coeffs = list(self.coeffs)
        return s

    # -- basics ------------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.basis is other.basis and self.coeffs == other.coeffs

    def __bool__(self):
        return any(self.coeffs)

    def coefficient(self, exps) -> "int | Fraction":
        i = self.basis.index.get(tuple(exps))
        if i is None:
            raise UsageError(f"monomial {tuple(exps)} outside basis cap {self.basis.cap}")
        return self.coeffs[i]

    def constant_term(self):
        return self.coeffs[0]

    def _check(self, other: "TruncatedSeries"):
        if self.basis is not other.basis:
            raise UsageError("series from different bases (variables or cap differ)")

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            out = self.copy()
            out.coeffs[0] = norm_coeff(out.coeffs[0] + other)
            return out
        self._check(other)
        out = TruncatedSeries(self.basis)
        out.coeffs = [a + b for a, b in zip(self.coeffs, other.coeffs)]
        return out

    __radd__ = __add__

    def add_inplace(self, other: "TruncatedSeries") -> None:
        """Accumulator support for the recurrence hot loop."""
        self._check(other)
        c = self.coeffs
        for i, b in enumerate(other.coeffs):
            if b:
                c[i] += b

    def __neg__(self):
        out = TruncatedSeries(self.basis)
        out.coeffs = [-a for a in self.coeffs]
        return out

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            out = self.copy()
            out.coeffs[0] = norm_coeff(out.coeffs[0] - other)
            return out
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            c = norm_coeff(other)
            out = TruncatedSeries(self.basis)
            out.coeffs = [a * c for a in self.coeffs]
            return out
        self._check(other)
        out = [0] * len(self.basis)
        prod = self.basis.prod
        bc = other.coeffs
        for i, a in enumerate(self.coeffs):
            if a:
                row = prod[i]
                for j, b in enumerate(bc):
                    if b:
                        t = row[j]
                        if t >= 0:
                            out[t] += a * b
        s = TruncatedSeries(self.basis)
        s.coeffs = out
        return s

    __rmul__ = __mul__

    def shift_monomial(self, exps) -> "TruncatedSeries":
        """Multiply by a pure monomial (index remap, no coefficient products)."""
        j = self.basis.index.get(tuple(exps))
        if j is None:
            raise UsageError(f"monomial {tuple(exps)} outside basis cap {self.basis.cap}")
        if j == 0:
            return self
        out = [0] * len(self.basis)
        prod = self.basis.prod
        for i, a in enumerate(self.coeffs):
            if a:
                t = prod[i][j]
                if t >= 0:
                    out[t] = a
        s = TruncatedSeries(self.basis)
        s.coeffs = out
        return s

    # -- composition -------------------------------------------------------

    def compose(self, images: "Mapping[str, TruncatedSeries]") -> "TruncatedSeries":
        """Substitute series for variables.

        Every image must share this basis and have zero constant term
        (substitutions must fix the expansion point).  Variables missing
        from `images` map to themselves.
        """
        basis = self.basis
        img_list: "list[TruncatedSeries | None]" = []
        for v in basis.variables:
            img = images.get(v)
            if img is None:
                img_list.append(None)
            else:
                self._check(img)
                if img.coeffs[0] != 0:
                    raise UsageError(f"image of {v!r} has nonzero constant term")
                img_list.append(img)
        if all(img is None for img in img_list):
            return self
        pows = _prepare_powers(basis, img_list, self._max_exps())
        return compose_prepared(self, pows)

    def _max_exps(self) -> "list[int]":
        nv = len(self.basis.variables)
        mx = [0] * nv
        for i, a in enumerate(self.coeffs):
            if a:
                e = self.basis.monomials[i]
                for j in range(nv):
                    if e[j] > mx[j]:
                        mx[j] = e[j]
        return mx

    def restrict(self, drop: "Iterable[str]") -> "TruncatedSeries":
        """Set the named original variables back to 1.

        At the expansion point a deviation fixed at 0 simply kills every
        monomial with a nonzero exponent in it; the survivors re-embed in the
        basis over the remaining variables at the same cap.
        """
        drop = set(drop)
        unknown = drop - set(self.basis.variables)
        if unknown:
            raise UsageError(f"unknown variables {sorted(unknown)}")
        keep_idx = [i for i, v in enumerate(self.basis.variables) if v not in drop]
        keep_vars = tuple(self.basis.variables[i] for i in keep_idx)
        if not keep_vars:
            raise UsageError("cannot restrict away every variable")
        new_basis = SeriesBasis(keep_vars, self.basis.cap)
        out = TruncatedSeries(new_basis)
        drop_idx = [i for i, v in enumerate(self.basis.variables) if v in drop]
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            e = self.basis.monomials[i]
            if any(e[d] for d in drop_idx):
                continue
            out.coeffs[new_basis.index[tuple(e[j] for j in keep_idx)]] = c
        return out

    # -- conversions and presentation --------------------------------------

    def to_poly(self) -> MultiPoly:
        """Reconstruct the polynomial whose expansion at all-ones this is.

        Exact only when nothing was truncated (polynomial degree <= cap).
        """
        basis = self.basis
        out = MultiPoly.zero(basis.variables)
        for i, c in enumerate(self.coeffs):
            if c:
                term = MultiPoly.constant(basis.variables, c)
                for v, e in zip(basis.variables, basis.monomials[i]):
                    if e:
                        vm = MultiPoly.variable(basis.variables, v) - 1
                        term = term * vm**e
                out = out + term
        return out

    def __str__(self):
        return str(self.as_deviation_poly())

    def as_deviation_poly(self) -> MultiPoly:
        """The coefficients as a polynomial in the deviation variables themselves."""
        return MultiPoly(
            self.basis.variables,
            {e: c for e, c in zip(self.basis.monomials, self.coeffs) if c},
        )

    def __repr__(self):
        return f"TruncatedSeries(cap={self.basis.cap}, {self})"

    def to_wire(self) -> dict:
        return {
            "variables": list(self.basis.variables),
            "cap": self.basis.cap,
            "terms": [
                [coeff_to_str(c), list(e)]
                for e, c in zip(self.basis.monomials, self.coeffs)
                if c
            ],
        }

    @classmethod
    def from_wire(cls, obj: Mapping) -> "TruncatedSeries":
        basis = SeriesBasis(tuple(obj["variables"]), obj["cap"])
        return cls.from_terms(basis, {tuple(e): coeff_from_str(c) for c, e in obj["terms"]})


# -- helpers ---------------------------------------------------------------


def binomial_coeffs(e: int, cap: int) -> "list[int]":
    """[C(e, 0), C(e, 1), ..., C(e, cap)] for arbitrarily large integer e >= 0.

    Multiplicative recurrence; never touches factorials of e.
    """
    if e < 0:
        raise UsageError("binomial exponent must be >= 0")
    out = [1]
    c = 1
    for j in range(1, cap + 1):
        c = c * (e - j + 1) // j
        out.append(c)
    return out


def binomial_series(basis: SeriesBasis, var: str, e: int) -> TruncatedSeries:
    """(1 + z_var)^e truncated at the basis cap."""
    try:
        vi = basis.variables.index(var)
    except ValueError:
        raise UsageError(f"unknown variable {var!r}") from None
    coeffs = binomial_coeffs(e, basis.cap)
    nv = len(basis.variables)
    s = TruncatedSeries(basis)
    for j, c in enumerate(coeffs):
        exps = tuple(j if i == vi else 0 for i in range(nv))
        s.coeffs[basis.index[exps]] = c
    return s


def poly_to_series(p: MultiPoly, basis: SeriesBasis) -> TruncatedSeries:
    """Taylor-expand a polynomial at the all-ones point: v_i -> 1 + z_i."""
    if p.variables != basis.variables:
        raise UsageError(f"variable mismatch: {p.variables} vs {basis.variables}")
    acc = TruncatedSeries(basis)
    for exps, c in p.terms.items():
        term = None
        for v, e in zip(basis.variables, exps):
            if e:
                f = binomial_series(basis, v, e)
                term = f if term is None else term * f
        if term is None:
            acc.coeffs[0] += c
        else:
            acc.add_inplace(term * c)
    acc.coeffs = [norm_coeff(c) if c else 0 for c in acc.coeffs]
    return acc


def _prepare_powers(basis, img_list, max_exps):
    """Per variable: list of powers of its image, or None for identity."""
    pows = []
    for img, mx in zip(img_list, max_exps):
        if img is None:
            pows.append(None)
        else:
            p = [TruncatedSeries.constant(basis, 1)]
            for _ in range(mx):
                p.append(p[-1] * img)
            pows.append(p)
    return pows


def compose_prepared(s: TruncatedSeries, pows) -> TruncatedSeries:
    """Composition with precomputed image powers (hot path of the evaluator).

    `pows[i]` is either None (variable i maps to itself) or the power list of
    its image series, long enough for every exponent appearing in `s`.
    """
    basis = s.basis
    nv = len(basis.variables)
    acc = TruncatedSeries(basis)
    for idx, c in enumerate(s.coeffs):
        if not c:
            continue
        exps = basis.monomials[idx]
        factor = None
        ident = [0] * nv
        for i in range(nv):
            e = exps[i]
            if not e:
                continue
            if pows[i] is None:
                ident[i] = e
            else:
                f = pows[i][e]
                factor = f if factor is None else factor * f
        if factor is None:
            # pure identity monomial: contributes itself
            acc.coeffs[idx] += c
            continue
        if any(ident):
            factor = factor.shift_monomial(tuple(ident))
        acc.add_inplace(factor * c)
    acc.coeffs = [norm_coeff(c) if c else 0 for c in acc.coeffs]
    return acc
