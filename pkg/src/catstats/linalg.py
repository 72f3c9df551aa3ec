"""Exact linear algebra: fraction-free echelon reduction, nullspace, solve.

Input rows may mix ints and Fractions; rows are scaled to integers first.
The forward pass is one-step fraction-free elimination (divide by the
previous pivot), which keeps every entry an integer minor of the original
matrix instead of letting Fraction gcds dominate the runtime.  Back
substitution happens over Fractions.

Nullspace bases are canonical: free columns are taken in increasing column
order and each basis vector has value 1 at its free column and 0 at the
other free columns, so downstream normalization is deterministic.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .errors import UsageError


def _int_rows(rows: "Sequence[Sequence]", ncols: int) -> "list[list[int]]":
    out = []
    for row in rows:
        if len(row) != ncols:
            raise UsageError("ragged matrix")
        denom = 1
        for v in row:
            if isinstance(v, Fraction):
                denom = lcm(denom, v.denominator)
            elif not isinstance(v, int):
                raise UsageError(f"matrix entries must be int or Fraction, got {type(v).__name__}")
        out.append([int(v * denom) for v in row])
    return out


def _echelon(mat: "list[list[int]]", ncols: int):
    """In-place fraction-free echelon form; returns the pivot (row, col) list."""
    m = len(mat)
    pivots = []
    r = 0
    prev = 1
    for c in range(ncols):
        sel = None
        for i in range(r, m):
            if mat[i][c]:
                sel = i
                break
        if sel is None:
            continue
        if sel != r:
            mat[r], mat[sel] = mat[sel], mat[r]
        pr = mat[r]
        for i in range(r + 1, m):
            ri = mat[i]
            if ri[c]:
                f = ri[c]
                for j in range(c + 1, ncols):
                    ri[j] = (pr[c] * ri[j] - f * pr[j]) // prev
                ri[c] = 0
            else:
                # the row still needs the pivot scaling to stay a minor
                for j in range(c + 1, ncols):
                    ri[j] = (pr[c] * ri[j]) // prev
        prev = pr[c]
        pivots.append((r, c))
        r += 1
        if r == m:
            break
    return pivots


def nullspace(rows: "Sequence[Sequence]", ncols: int) -> "list[list[Fraction]]":
    """Basis of {x : A x = 0}, one vector per free column, canonical form."""
    mat = _int_rows(rows, ncols)
    pivots = _echelon(mat, ncols)
    pivot_cols = [c for _, c in pivots]
    free_cols = [c for c in range(ncols) if c not in set(pivot_cols)]
    basis = []
    for fc in free_cols:
        x = [Fraction(0)] * ncols
        x[fc] = Fraction(1)
        for r, c in reversed(pivots):
            if c > fc:
                continue
            s = Fraction(0)
            row = mat[r]
            for j in range(c + 1, ncols):
                if row[j] and x[j]:
                    s += row[j] * x[j]
            x[c] = -s / row[c]
        basis.append(x)
    return basis


def solve(rows: "Sequence[Sequence]", rhs: "Sequence", ncols: int) -> "list[Fraction] | None":
    """One exact solution of A x = b (free variables 0), or None if inconsistent."""
    if len(rows) != len(rhs):
        raise UsageError("rhs length does not match row count")
    aug = [list(row) + [b] for row, b in zip(rows, rhs)]
    mat = _int_rows(aug, ncols + 1)
    pivots = _echelon(mat, ncols + 1)
    if any(c == ncols for _, c in pivots):
        return None
    x = [Fraction(0)] * (ncols + 1)
    x[ncols] = Fraction(-1)  # so that sum row[j] x[j] = 0 encodes A x = b
    for r, c in reversed(pivots):
        s = Fraction(0)
        row = mat[r]
        for j in range(c + 1, ncols + 1):
            if row[j] and x[j]:
                s += row[j] * x[j]
        x[c] = -s / row[c]
    return x[:ncols]


def integer_primitive(vec: "Sequence[Fraction]") -> "list[int]":
    """Scale a rational vector to coprime integers (empty/zero stays zero)."""
    denom = 1
    for v in vec:
        denom = lcm(denom, Fraction(v).denominator)
    ints = [int(v * denom) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g:
        ints = [v // g for v in ints]
    return ints
