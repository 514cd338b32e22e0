"""Exact linear algebra over the rationals.

Two layers live here.  The public layer (:func:`rref`, :func:`nullspace`,
:func:`solve`, :func:`quotient_dim`) works on small dense matrices and is the
contract surface used by the classification reports.  The :class:`EquationSystem`
layer is a sparse incremental echelon solver with integer rows; the derivation
and cohomology solvers feed it tens of thousands of coefficient equations and
read back a canonical reduced basis.

All elimination is plain exact Gaussian elimination with per-row content
normalization (divide by the gcd); pivots are chosen first-nonzero in column
order so every reported basis is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Mapping, Sequence

from .poly import Unknown


class LinalgError(Exception):
    pass


class NotASubspaceError(LinalgError):
    """Raised when a claimed subspace is not contained in the ambient span."""


Vector = Sequence[Fraction]


@dataclass
class Matrix:
    """Dense rational matrix with optional unknown labels for the columns."""

    rows: list
    labels: list = None

    def __post_init__(self):
        self.rows = [[_frac(x) for x in row] for row in self.rows]
        widths = {len(r) for r in self.rows}
        if len(widths) > 1:
            raise LinalgError("ragged rows")
        if self.labels is not None:
            if self.rows and len(self.labels) != len(self.rows[0]):
                raise LinalgError("label count does not match column count")
            if len(set(self.labels)) != len(self.labels):
                raise LinalgError("duplicate column labels")

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else (len(self.labels or []))

    @property
    def nrows(self) -> int:
        return len(self.rows)


@dataclass
class SolutionSpace:
    """Affine solution set: particular + span(homogeneous basis)."""

    particular: list
    basis: list
    labels: list = None

    @property
    def dimension(self) -> int:
        return len(self.basis)


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _normalize_row(row: list) -> list:
    pivot = next((x for x in row if x), None)
    if pivot is None:
        return row
    return [x / pivot for x in row]


def rref(m: Matrix):
    """Reduced row-echelon form; returns ``(Matrix, rank)``.

    The row space is preserved; zero rows are kept so shapes match.
    """
    rows = [list(r) for r in m.rows]
    nrows, ncols = len(rows), m.ncols
    pivots = []
    r = 0
    for c in range(ncols):
        src = next((i for i in range(r, nrows) if rows[i][c]), None)
        if src is None:
            continue
        rows[r], rows[src] = rows[src], rows[r]
        rows[r] = _normalize_row(rows[r])
        for i in range(nrows):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return Matrix(rows, m.labels), len(pivots)


def _pivot_columns(rows: list) -> list:
    cols = []
    for row in rows:
        c = next((k for k, x in enumerate(row) if x), None)
        if c is not None:
            cols.append(c)
    return cols


def nullspace(m: Matrix) -> list:
    """Canonical basis of the right kernel ``{x : m x = 0}``."""
    red, rank = rref(m)
    ncols = m.ncols
    piv = _pivot_columns(red.rows)
    piv_set = set(piv)
    basis = []
    for free in range(ncols):
        if free in piv_set:
            continue
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for r, c in enumerate(piv):
            vec[c] = -red.rows[r][free]
        basis.append(vec)
    return basis


def solve(m: Matrix, rhs: Sequence):
    """Full affine solution set of ``m x = rhs``, or None when inconsistent."""
    rhs = [_frac(x) for x in rhs]
    if len(rhs) != m.nrows:
        raise LinalgError("rhs length does not match row count")
    aug = Matrix([row + [b] for row, b in zip(m.rows, rhs)] or [[Fraction(0)] * (m.ncols + 1)])
    red, _ = rref(aug)
    ncols = m.ncols
    particular = [Fraction(0)] * ncols
    for row in red.rows:
        c = next((k for k, x in enumerate(row) if x), None)
        if c is None:
            continue
        if c == ncols:
            return None  # 0 = 1 row
        particular[c] = row[ncols]
    return SolutionSpace(particular, nullspace(m), m.labels)


def _span_rank(vectors: list, width: int) -> int:
    if not vectors:
        return 0
    _, rank = rref(Matrix([list(v) for v in vectors]))
    return rank


def quotient_dim(big: list, small: list) -> int:
    """dim span(big) - dim span(small), verifying span(small) is contained."""
    widths = {len(v) for v in list(big) + list(small)}
    if len(widths) > 1:
        raise LinalgError("mixed vector lengths")
    width = widths.pop() if widths else 0
    dim_big = _span_rank(big, width)
    dim_small = _span_rank(small, width)
    if small:
        joint = _span_rank(list(big) + list(small), width)
        if joint != dim_big:
            raise NotASubspaceError("small span is not contained in big span")
    return dim_big - dim_small


# --------------------------------------------------------------------------
# sparse incremental solver


def _row_from_fracs(row: Mapping[int, Fraction]) -> dict:
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = den * v.denominator // gcd(den, v.denominator)
    out = {}
    for c, v in row.items():
        n = int(v * den) if isinstance(v, Fraction) else v * den
        if n:
            out[c] = n
    return _content_normalize(out)


def _content_normalize(row: dict) -> dict:
    if not row:
        return row
    g = 0
    for v in row.values():
        g = gcd(g, v)
    if g > 1:
        row = {c: v // g for c, v in row.items()}
    return row


class EquationSystem:
    """Incremental exact echelon form for large sparse homogeneous systems.

    Rows are dicts ``column -> int`` with content 1.  Each inserted row is
    reduced along its leading-column chain; a final back-substitution pass
    (:meth:`reduce`) turns the accumulated echelon into the canonical RREF,
    so the nullspace basis is independent of insertion order.
    """

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.pivots: dict[int, dict] = {}
        self._reduced = True

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def add_linear_form(self, lf, col_of: Mapping[Unknown, int]) -> None:
        if lf.const:
            raise LinalgError("equation system is homogeneous; nonzero constant")
        self.add_row({col_of[u]: c for u, c in lf.coeffs.items()})

    def add_row(self, row: Mapping[int, object]) -> None:
        row = _row_from_fracs(row)
        while row:
            c = min(row)
            prow = self.pivots.get(c)
            if prow is None:
                self.pivots[c] = _content_normalize(row)
                self._reduced = False
                return
            a, b = prow[c], row[c]
            new = {}
            for k, v in row.items():
                new[k] = v * a
            for k, v in prow.items():
                acc = new.get(k, 0) - v * b
                if acc:
                    new[k] = acc
                else:
                    new.pop(k, None)
            row = _content_normalize(new)

    def reduce(self) -> None:
        """Back-substitute so every pivot row touches no other pivot column."""
        if self._reduced:
            return
        for c in sorted(self.pivots, reverse=True):
            row = self.pivots[c]
            hits = [k for k in row if k != c and k in self.pivots]
            for k in sorted(hits):
                prow = self.pivots[k]
                a, b = prow[k], row[k]
                new = {}
                for kk, v in row.items():
                    new[kk] = v * a
                for kk, v in prow.items():
                    acc = new.get(kk, 0) - v * b
                    if acc:
                        new[kk] = acc
                    else:
                        new.pop(kk, None)
                row = new
            self.pivots[c] = _content_normalize(row)
        self._reduced = True

    def nullspace_basis(self) -> list:
        """Canonical nullspace vectors as dicts ``column -> Fraction``."""
        self.reduce()
        occurs: dict[int, list] = {}
        for c, row in self.pivots.items():
            for k, v in row.items():
                if k != c:
                    occurs.setdefault(k, []).append((c, Fraction(-v, row[c])))
        basis = []
        for free in range(self.ncols):
            if free in self.pivots:
                continue
            vec = {free: Fraction(1)}
            for c, coeff in occurs.get(free, ()):
                vec[c] = coeff
            basis.append(vec)
        return basis

    def contains(self, row: Mapping[int, object]) -> bool:
        """True when the row is already in the accumulated row space."""
        row = _row_from_fracs(row)
        while row:
            c = min(row)
            prow = self.pivots.get(c)
            if prow is None:
                return False
            a, b = prow[c], row[c]
            new = {}
            for k, v in row.items():
                new[k] = v * a
            for k, v in prow.items():
                acc = new.get(k, 0) - v * b
                if acc:
                    new[k] = acc
                else:
                    new.pop(k, None)
            row = _content_normalize(new)
        return True


class SpanReducer:
    """Echelonized span of sparse vectors, for quotients and canonical reps."""

    def __init__(self):
        self.rows: dict[int, dict] = {}  # pivot col -> row with pivot value 1

    @property
    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, vec: Mapping[int, Fraction]) -> dict:
        vec = {c: _frac(v) for c, v in vec.items() if v}
        while vec:
            c = min(vec)
            row = self.rows.get(c)
            if row is None:
                return vec
            f = vec[c]
            for k, v in row.items():
                acc = vec.get(k, Fraction(0)) - f * v
                if acc:
                    vec[k] = acc
                else:
                    vec.pop(k, None)
        return vec

    def insert(self, vec: Mapping[int, Fraction]) -> bool:
        """Reduce and insert; returns False when the vector was dependent."""
        vec = self.reduce(vec)
        if not vec:
            return False
        c = min(vec)
        f = vec[c]
        vec = {k: v / f for k, v in vec.items()}
        # keep full reduction: clear the new pivot from existing rows
        for p, row in self.rows.items():
            if c in row:
                g = row[c]
                for k, v in vec.items():
                    acc = row.get(k, Fraction(0)) - g * v
                    if acc:
                        row[k] = acc
                    else:
                        row.pop(k, None)
        self.rows[c] = vec
        return True

    def basis(self) -> list:
        return [dict(self.rows[c]) for c in sorted(self.rows)]


def echelon_basis(vectors: list) -> list:
    """Canonical echelon basis of the span of sparse vectors."""
    red = SpanReducer()
    for v in vectors:
        red.insert(v)
    return red.basis()
