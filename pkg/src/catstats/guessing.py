"""Fit exact models to sequences: P-recurrences, algebraic equations, closed forms.

All three guessers follow the same discipline: set up an exact linear system
on a training prefix, extract candidates from its nullspace (or the solver),
then accept a candidate only if it survives on every term, including a
holdout tail the fit never saw.  Search runs over (size, degree) bounds in
graded-then-lexicographic order, so the first hit is minimal for that order.
Nothing found within bounds returns None; that is an outcome, not an error.

Normalization: coefficient vectors are scaled to coprime integers and the
sign is fixed by the leading object (leading coefficient of the top-order
polynomial for recurrences, coefficient of the graded-lex-greatest monomial
for algebraic equations), so equal models always print identically.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import UsageError
from .linalg import integer_primitive, nullspace, solve
from .multipoly import norm_coeff
from .perms import catalan_list

DEFAULT_HOLDOUT = 10


def _poly_eval(coeffs: "Sequence[int]", n: int):
    out = 0
    for c in reversed(coeffs):
        out = out * n + c
    return out


def _poly_str(coeffs: "Sequence", var: str = "n") -> str:
    bits = []
    for j in range(len(coeffs) - 1, -1, -1):
        c = coeffs[j]
        if c == 0:
            continue
        if j == 0:
            mono = ""
        elif j == 1:
            mono = var
        else:
            mono = f"{var}^{j}"
        if mono and c == 1:
            body = mono
        elif mono and c == -1:
            body = f"-{mono}"
        elif mono:
            body = f"{c}*{mono}"
        else:
            body = str(c)
        if not bits:
            bits.append(body)
        elif body.startswith("-"):
            bits.append(f"- {body[1:]}")
        else:
            bits.append(f"+ {body}")
    return " ".join(bits) if bits else "0"


# -- P-recurrences ---------------------------------------------------------


@dataclass(frozen=True)
class PRecurrence:
    """sum_i q_i(n) * a(n+i) = 0 for n >= offset, with integer q_i."""

    order: int
    degree: int
    coeffs: "tuple[tuple[int, ...], ...]"  # coeffs[i][j]: n^j term of q_i
    offset: int = 0

    def residual(self, values: "Sequence", n_index: int, offset: int):
        """Residual at recurrence argument n = offset + n_index."""
        n = offset + n_index
        out = 0
        for i, q in enumerate(self.coeffs):
            out += _poly_eval(q, n) * values[n_index + i]
        return out

    def render(self) -> str:
        bits = []
        for i in range(self.order, -1, -1):
            q = self.coeffs[i]
            if not any(q):
                continue
            arg = f"a(n+{i})" if i else "a(n)"
            lead = next(c for c in reversed(q) if c)
            sign = "-" if lead < 0 else "+"
            body = _poly_str([-c for c in q] if lead < 0 else q)
            if not bits:
                chunk = f"({body})*{arg}" if sign == "+" else f"-({body})*{arg}"
            else:
                chunk = f"{sign} ({body})*{arg}"
            bits.append(chunk)
        return " ".join(bits) + " = 0"


def guess_p_recursive(
    values: "Sequence",
    offset: int = 0,
    max_order: int = 6,
    max_degree: int = 6,
    holdout: int = DEFAULT_HOLDOUT,
) -> "PRecurrence | None":
    """Smallest (order, degree) recurrence fitting every term, or None.

    `values[i]` is the term at n = offset + i.  The final `holdout` windows
    take no part in the fit and only vote during verification.
    """
    values = [norm_coeff(v) for v in values]
    T = len(values)
    need = (max_order + 1) * (max_degree + 1) + holdout + max_order
    if T < need:
        raise UsageError(
            f"need at least {need} terms for bounds (order {max_order}, degree {max_degree}) "
            f"with holdout {holdout}; got {T}"
        )
    if holdout < 1:
        raise UsageError("holdout must be >= 1")
    for weight in range(0, max_order + max_degree + 1):
        for order in range(0, min(weight, max_order) + 1):
            degree = weight - order
            if degree > max_degree:
                continue
            if order < 1:
                continue  # order 0 would say the sequence is identically 0
            hit = _try_p_rec(values, offset, order, degree, holdout)
            if hit is not None:
                return hit
    return None


def _try_p_rec(values, offset, order, degree, holdout) -> "PRecurrence | None":
    T = len(values)
    nwindows = T - order
    if nwindows - holdout < (order + 1) * (degree + 1):
        return None  # fewer training windows than unknowns at these bounds
    ncols = (order + 1) * (degree + 1)
    rows = []
    for s in range(nwindows - holdout):
        n = offset + s
        row = []
        for i in range(order + 1):
            a = values[s + i]
            p = 1
            for _ in range(degree + 1):
                row.append(a * p)
                p *= n
        rows.append(row)
    for vec in nullspace(rows, ncols):
        coeffs = tuple(
            tuple(vec[i * (degree + 1) + j] for j in range(degree + 1))
            for i in range(order + 1)
        )
        if not any(coeffs[order]):
            continue  # really lower order; the earlier search covers it
        cand = PRecurrence(order=order, degree=degree, coeffs=coeffs, offset=offset)
        ok = all(cand.residual(values, s, offset) == 0 for s in range(nwindows))
        if ok:
            return _normalize_p_rec(cand, offset)
    return None


def _normalize_p_rec(rec: PRecurrence, offset: int) -> PRecurrence:
    flat = [c for q in rec.coeffs for c in q]
    ints = integer_primitive([Fraction(c) for c in flat])
    top = rec.coeffs[-1]
    lead_j = max(j for j, c in enumerate(top) if c)
    w = len(rec.coeffs[0])
    if ints[(len(rec.coeffs) - 1) * w + lead_j] < 0:
        ints = [-c for c in ints]
    coeffs = tuple(tuple(ints[i * w : (i + 1) * w]) for i in range(len(rec.coeffs)))
    degree = max((j for q in coeffs for j, c in enumerate(q) if c), default=0)
    coeffs = tuple(q[: degree + 1] for q in coeffs)
    return PRecurrence(order=rec.order, degree=degree, coeffs=coeffs, offset=offset)


def verify_recurrence(rec: PRecurrence, values: "Sequence", offset: int = 0):
    """(True, None) when every window vanishes, else (False, first bad n)."""
    values = [norm_coeff(v) for v in values]
    for s in range(len(values) - rec.order):
        if rec.residual(values, s, offset) != 0:
            return False, offset + s
    return True, None


# -- algebraic equations ---------------------------------------------------


@dataclass(frozen=True)
class AlgebraicEquation:
    """sum phi[(i, j)] z^i y^j = 0 for the series y(z), integer coefficients."""

    coeffs: "tuple[tuple[tuple[int, int], int], ...]"  # ((z_deg, y_deg), c), sorted

    def degree_y(self) -> int:
        return max((j for (_, j), _ in self.coeffs), default=0)

    def degree_z(self) -> int:
        return max((i for (i, _), _ in self.coeffs), default=0)

    def render(self) -> str:
        by_j: "dict[int, list]" = {}
        for (i, j), c in self.coeffs:
            by_j.setdefault(j, []).append((i, c))
        bits = []
        for j in sorted(by_j):
            group = by_j[j]
            zpoly = [0] * (max(i for i, _ in group) + 1)
            for i, c in group:
                zpoly[i] = c
            lead = next(c for c in reversed(zpoly) if c)
            neg = lead < 0
            if neg:
                zpoly = [-c for c in zpoly]
            zs = _poly_str(zpoly, "z")
            y = "" if j == 0 else ("y" if j == 1 else f"y^{j}")
            if not y:
                body = zs if len(group) == 1 else f"({zs})"
            elif zs == "1":
                body = y
            elif len(group) == 1:
                body = f"{zs}*{y}"
            else:
                body = f"({zs})*{y}"
            if not bits:
                bits.append(f"-{body}" if neg else body)
            else:
                bits.append(f"{'-' if neg else '+'} {body}")
        return " ".join(bits) + " = 0"

    def render_solved(self) -> "str | None":
        """'y = ...' form when the y^1 coefficient is the constant -1 or 1."""
        cy = {c for (i, j), c in self.coeffs if j == 1 and i == 0}
        other_y1 = [1 for (i, j), _ in self.coeffs if j == 1 and i > 0]
        if other_y1 or cy not in ({1}, {-1}):
            return None
        sgn = -1 if cy == {1} else 1
        rest = [((i, j), sgn * c) for (i, j), c in self.coeffs if j != 1]
        if not rest:
            return "y = 0"
        bits = []
        for (i, j), c in sorted(rest, key=lambda t: (t[0][1], t[0][0])):
            mono = "*".join(
                ([f"z^{i}" if i > 1 else "z"] if i else []) + ([f"y^{j}" if j > 1 else "y"] if j else [])
            )
            if not mono:
                body = str(c)
            elif c == 1:
                body = mono
            elif c == -1:
                body = f"-{mono}"
            else:
                body = f"{c}*{mono}"
            if not bits:
                bits.append(body)
            elif body.startswith("-"):
                bits.append(f"- {body[1:]}")
            else:
                bits.append(f"+ {body}")
        return "y = " + " ".join(bits)


def _series_mul(a: "list", b: "list", T: int) -> "list":
    out = [0] * T
    for i, x in enumerate(a):
        if x:
            top = min(T - i, len(b))
            for j in range(top):
                y = b[j]
                if y:
                    out[i + j] += x * y
    return out


def guess_algebraic(
    values: "Sequence",
    max_deg_y: int = 4,
    max_deg_z: int = 12,
    holdout: int = DEFAULT_HOLDOUT,
) -> "AlgebraicEquation | None":
    """Smallest (deg_y, deg_z) polynomial equation satisfied by the series
    y(z) = sum values[m] z^m, checked to order len(values)-1, or None."""
    values = [norm_coeff(v) for v in values]
    T = len(values)
    need = (max_deg_y + 1) * (max_deg_z + 1) + holdout
    if T < need:
        raise UsageError(
            f"need at least {need} series terms for bounds (deg_y {max_deg_y}, "
            f"deg_z {max_deg_z}) with holdout {holdout}; got {T}"
        )
    if holdout < 1:
        raise UsageError("holdout must be >= 1")
    powers = [[1] + [0] * (T - 1)]
    for _ in range(max_deg_y):
        powers.append(_series_mul(powers[-1], values, T))
    for weight in range(1, max_deg_y + max_deg_z + 1):
        for dy in range(0, min(weight, max_deg_y) + 1):
            dz = weight - dy
            if dz > max_deg_z:
                continue
            if dy < 1:
                continue  # no y at all cannot model the series
            hit = _try_algebraic(values, powers, dy, dz, holdout)
            if hit is not None:
                return hit
    return None


def _try_algebraic(values, powers, dy, dz, holdout) -> "AlgebraicEquation | None":
    T = len(values)
    ncols = (dy + 1) * (dz + 1)
    train = T - holdout
    if train < ncols + 1:
        return None
    cols = [(j, i) for j in range(dy + 1) for i in range(dz + 1)]
    rows = []
    for m in range(train):
        row = []
        for j, i in cols:
            row.append(powers[j][m - i] if m >= i else 0)
        rows.append(row)
    for vec in nullspace(rows, ncols):
        if all(vec[p] == 0 for p, (j, _) in enumerate(cols) if j >= 1):
            continue
        ints = integer_primitive(vec)
        # full-range check, holdout included
        ok = True
        for m in range(T):
            s = 0
            for p, (j, i) in enumerate(cols):
                c = ints[p]
                if c and m >= i:
                    s += c * powers[j][m - i]
            if s != 0:
                ok = False
                break
        if not ok:
            continue
        lead = max(((j, i) for p, (j, i) in enumerate(cols) if ints[p]), key=lambda t: (t[0] + t[1], t))
        lead_pos = cols.index(lead)
        if ints[lead_pos] < 0:
            ints = [-c for c in ints]
        coeffs = tuple(
            sorted(((i, j), ints[p]) for p, (j, i) in enumerate(cols) if ints[p])
        )
        return AlgebraicEquation(coeffs=coeffs)
    return None


def algebraic_residual(eq: AlgebraicEquation, values: "Sequence") -> "list":
    """Series coefficients of Phi(z, y(z)); all zero when the equation holds."""
    values = [norm_coeff(v) for v in values]
    T = len(values)
    max_j = eq.degree_y()
    powers = [[1] + [0] * (T - 1)]
    for _ in range(max_j):
        powers.append(_series_mul(powers[-1], values, T))
    out = [0] * T
    for (i, j), c in eq.coeffs:
        pj = powers[j]
        for m in range(i, T):
            v = pj[m - i]
            if v:
                out[m] += c * v
    return out


# -- closed forms ----------------------------------------------------------

CLOSED_FORM_PARTS = ("4^n", "c(n)", "c(n-1)", "1")


@dataclass(frozen=True)
class ClosedFormFit:
    """a(n) = p1(n)*4^n + p2(n)*c(n) + p3(n)*c(n-1) + p4(n), rational p_i."""

    degree: int
    parts: "tuple[tuple[Fraction, ...], ...]"  # aligned with CLOSED_FORM_PARTS
    offset: int

    def evaluate(self, n: int, cats: "list[int] | None" = None):
        if cats is None:
            cats = catalan_list(max(n, 1))
        c_n = cats[n]
        c_prev = cats[n - 1] if n >= 1 else 0  # convention: c(-1) = 0
        vals = (4**n, c_n, c_prev, 1)
        out = Fraction(0)
        for poly, v in zip(self.parts, vals):
            s = Fraction(0)
            for c in reversed(poly):
                s = s * n + c
            out += s * v
        return norm_coeff(out)

    def render(self) -> str:
        bits = []
        for poly, label in zip(self.parts, CLOSED_FORM_PARTS):
            if not any(poly):
                continue
            ps = _poly_str(poly)
            if label == "1":
                bits.append(ps if "+" not in ps and "- " not in ps else f"({ps})")
            elif ps == "1":
                bits.append(label)
            elif "+" in ps or "- " in ps:
                bits.append(f"({ps})*{label}")
            else:
                bits.append(f"{ps}*{label}" if ps != "-1" else f"-{label}")
        return "a(n) = " + (" + ".join(bits) if bits else "0")


def fit_closed_form(
    values: "Sequence",
    offset: int = 1,
    degree: int = 3,
    holdout: int = DEFAULT_HOLDOUT,
) -> "ClosedFormFit | None":
    """Exact fit over the span of {n^i 4^n, n^i c(n), n^i c(n-1), n^i}, or None.

    `values[s]` is the term at n = offset + s; offset must be >= 1 because
    the basis involves c(n-1).
    """
    values = [norm_coeff(v) for v in values]
    if offset < 1:
        raise UsageError("closed-form fits need offset >= 1 (the basis uses c(n-1))")
    if degree < 0:
        raise UsageError("degree must be >= 0")
    T = len(values)
    ncols = 4 * (degree + 1)
    if T < ncols + holdout:
        raise UsageError(
            f"need at least {ncols + holdout} terms for degree {degree} "
            f"with holdout {holdout}; got {T}"
        )
    cats = catalan_list(offset + T)
    rows = []
    for s in range(T - holdout):
        n = offset + s
        base_vals = (4**n, cats[n], cats[n - 1], 1)
        row = []
        for v in base_vals:
            p = 1
            for _ in range(degree + 1):
                row.append(v * p)
                p *= n
        rows.append(row)
    x = solve(rows, values[: T - holdout], ncols)
    if x is None:
        return None
    parts = tuple(
        tuple(x[b * (degree + 1) + j] for j in range(degree + 1)) for b in range(4)
    )
    fit = ClosedFormFit(degree=degree, parts=parts, offset=offset)
    for s in range(T):
        if fit.evaluate(offset + s, cats) != values[s]:
            return None
    return fit
