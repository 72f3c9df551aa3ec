"""Exact moment pipeline: enumerators -> factorial -> raw -> central -> standardized.

Everything up to the standardized stage is exact rational arithmetic.  For a
weight enumerator P_n(t) = sum_s count(s) t^s:

    f_r = r-th factorial moment sum  = sum_s count(s) * s(s-1)...(s-r+1)
        = r! * [z^r] P_n(1+z),

which is exactly what truncated-mode evaluation stores, so both evaluation
modes feed the same pipeline.  Raw moments divide by the object count f_0,
central moments recenter at the mean, and standardized moments divide by the
r/2 power of the variance.  Odd standardized moments involve a square root;
they are stored exactly as the signed square alpha*|alpha| and rendered to
float only for display and for the limit analysis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DegenerateStatisticError, UsageError
from .multipoly import MultiPoly, coeff_to_str
from .series import TruncatedSeries

DEFAULT_R_MAX = 8


def stirling2_row(r: int) -> "list[int]":
    """S(r, 0..r) by the triangular recurrence; cached."""
    rows = _STIRLING_ROWS
    while len(rows) <= r:
        prev = rows[-1]
        j = len(rows)
        row = [0] * (j + 1)
        for m in range(1, j + 1):
            row[m] = (prev[m - 1] if m - 1 <= j - 1 else 0) + m * (prev[m] if m <= j - 1 else 0)
        rows.append(row)
    return rows[r]


_STIRLING_ROWS: "list[list[int]]" = [[1]]


def falling_factorial(i: int, r: int) -> int:
    out = 1
    for j in range(r):
        out *= i - j
    return out


def factorial_from_full(poly: MultiPoly, r_max: int) -> "list[int]":
    """[f_0 .. f_r_max] from a univariate weight enumerator."""
    coeffs = poly.univariate_coeffs()
    out = []
    for r in range(r_max + 1):
        out.append(sum(c * falling_factorial(i, r) for i, c in enumerate(coeffs) if c))
    return out


def factorial_from_truncated(series: TruncatedSeries, r_max: int, var: str = "t") -> "list[int]":
    """[f_0 .. f_r_max] read off a truncated expansion about all-ones."""
    basis = series.basis
    if r_max > basis.cap:
        raise UsageError(f"r_max = {r_max} exceeds the series cap {basis.cap}")
    try:
        vi = basis.variables.index(var)
    except ValueError:
        raise UsageError(f"series has no variable {var!r}") from None
    nv = len(basis.variables)
    out = []
    fact = 1
    for r in range(r_max + 1):
        if r:
            fact *= r
        exps = tuple(r if i == vi else 0 for i in range(nv))
        out.append(fact * series.coefficient(exps))
    return out


def raw_from_factorial(frow: "Sequence[int]") -> "list[Fraction]":
    """[m_0 .. m_r]: r-th power sums divided by the object count f_0."""
    if not frow or frow[0] == 0:
        raise UsageError("cannot normalize by an empty family (f_0 = 0)")
    f0 = frow[0]
    out = [Fraction(1)]
    for r in range(1, len(frow)):
        srow = stirling2_row(r)
        total = sum(srow[j] * frow[j] for j in range(1, r + 1))
        out.append(Fraction(total, f0))
    return out


def central_from_raw(mrow: "Sequence[Fraction]") -> "list[Fraction]":
    """[M_0 .. M_r] about the mean; M_1 is identically 0."""
    mean = mrow[1] if len(mrow) > 1 else Fraction(0)
    out = [Fraction(1)]
    for r in range(1, len(mrow)):
        total = Fraction(0)
        for j in range(r + 1):
            total += math.comb(r, j) * mrow[j] * (-mean) ** (r - j)
        out.append(total)
    return out


@dataclass(frozen=True)
class StandardizedMoments:
    """Exact signed squares alpha_r * |alpha_r| plus float renderings.

    Index r of each list is the order; entries below r = 2 are fixed by
    definition (alpha_0 = 1, alpha_1 = 0, alpha_2 = 1).
    """

    signed_square: "tuple[Fraction, ...]"
    float_value: "tuple[float, ...]"


def standardized(Mrow: "Sequence[Fraction]") -> StandardizedMoments:
    """Standardize central moments; degenerate variance is an error."""
    if len(Mrow) < 3:
        raise UsageError("standardization needs central moments to order >= 2")
    var = Mrow[2]
    if var == 0:
        raise DegenerateStatisticError("variance is 0: standardized moments undefined")
    if var < 0:
        raise UsageError("negative variance: inconsistent central moments")
    ss = []
    fl = []
    for r, M in enumerate(Mrow):
        sq = M * M / var**r
        sq = sq if M >= 0 else -sq
        ss.append(sq)
        root = math.sqrt(float(abs(sq)))
        fl.append(root if sq >= 0 else -root)
    return StandardizedMoments(tuple(ss), tuple(fl))


def normal_reference(r: int) -> int:
    """Standardized moments of the Gaussian: 0 for odd r, (r-1)!! for even."""
    if r < 0:
        raise UsageError("moment order must be >= 0")
    if r % 2:
        return 0
    out = 1
    for j in range(r - 1, 0, -2):
        out *= j
    return out


@dataclass
class MomentRow:
    n: int
    f: "list[int]"
    m: "list[Fraction]"
    M: "list[Fraction]"
    alpha: "StandardizedMoments | None"
    note: str = ""

    @property
    def count(self) -> int:
        return self.f[0]


@dataclass
class MomentTable:
    family: str
    statistic: str
    mode: str
    cap: "int | None"
    r_max: int
    rows: "list[MomentRow]"

    def row(self, n: int) -> MomentRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise UsageError(f"no row for n = {n}")

    def alpha_float(self, n: int, r: int) -> float:
        row = self.row(n)
        if row.alpha is None:
            raise DegenerateStatisticError(f"variance is 0 at n = {n} ({row.note})")
        return row.alpha.float_value[r]

    def to_json_obj(self) -> dict:
        return {
            "family": self.family,
            "statistic": self.statistic,
            "mode": self.mode,
            "cap": self.cap,
            "r_max": self.r_max,
            "rows": [
                {
                    "n": row.n,
                    "count": str(row.count),
                    "f": [str(v) for v in row.f],
                    "m": [coeff_to_str(v) for v in row.m],
                    "M": [coeff_to_str(v) for v in row.M],
                    "alpha_signed_square": (
                        None if row.alpha is None else [coeff_to_str(v) for v in row.alpha.signed_square]
                    ),
                    "alpha_float": (
                        None if row.alpha is None else [float(f"{v:.15g}") for v in row.alpha.float_value]
                    ),
                    "note": row.note,
                }
                for row in self.rows
            ],
        }

    def csv_rows(self) -> "list[list[str]]":
        hdr = ["n", "count"]
        R = self.r_max
        hdr += [f"f{r}" for r in range(1, R + 1)]
        hdr += [f"m{r}" for r in range(1, R + 1)]
        hdr += [f"M{r}" for r in range(2, R + 1)]
        hdr += [f"alpha{r}" for r in range(3, R + 1)]
        out = [hdr]
        for row in self.rows:
            rec = [str(row.n), str(row.count)]
            rec += [str(v) for v in row.f[1:]]
            rec += [coeff_to_str(v) for v in row.m[1:]]
            rec += [coeff_to_str(v) for v in row.M[2:]]
            if row.alpha is None:
                rec += ["" for _ in range(3, R + 1)]
            else:
                rec += [f"{row.alpha.float_value[r]:.15g}" for r in range(3, R + 1)]
            out.append(rec)
        return out


def moment_table_from_rows(family, statistic, mode, cap, r_max, f_rows, n_start=0) -> MomentTable:
    """Shared tail of the pipeline: factorial rows in, full table out."""
    rows = []
    for i, frow in enumerate(f_rows):
        n = n_start + i
        m = raw_from_factorial(frow)
        M = central_from_raw(m)
        if len(M) < 3:
            alpha = None
            note = "standardized moments need r_max >= 2"
        else:
            try:
                alpha = standardized(M)
                note = ""
            except DegenerateStatisticError:
                alpha = None
                note = "degenerate: variance 0"
        rows.append(MomentRow(n=n, f=list(frow), m=m, M=M, alpha=alpha, note=note))
    return MomentTable(family, statistic, mode, cap, r_max, rows)


def moments_from_full(seq, r_max: int = DEFAULT_R_MAX, var: str = "t") -> MomentTable:
    """Moment table from a full-mode EnumeratorSequence (catalytic variables
    are specialized to 1 first)."""
    spec = seq.spec
    drop = [v for v in spec.variables if v != var]
    f_rows = []
    for p in seq.values:
        if drop:
            p = p.specialize_ones(drop)
        f_rows.append(factorial_from_full(p, r_max))
    return moment_table_from_rows(spec.family, spec.statistic, "full", None, r_max, f_rows)


def moments_from_truncated(seq, r_max: "int | None" = None, var: str = "t") -> MomentTable:
    """Moment table from a truncated-mode EnumeratorSequence."""
    spec = seq.spec
    cap = seq.cap
    if r_max is None:
        r_max = cap
    if r_max > cap:
        raise UsageError(f"r_max = {r_max} exceeds the evaluation cap {cap}")
    f_rows = [factorial_from_truncated(s, r_max, var) for s in seq.values]
    return moment_table_from_rows(spec.family, spec.statistic, "truncated", cap, r_max, f_rows)
