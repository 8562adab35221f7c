"""Matrices of bivariate polynomials with Kronecker and gradient calculus.

Matrices are stored dense and row major, but all products skip zero
entries, which matters because the structured matrices used downstream
(selection blocks, Kronecker lifts) are mostly zero.  Exact linear
algebra on constant matrices uses fraction-free (Bareiss) elimination.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .polycore import NEG_INF, ZERO, BivariatePoly, _as_fraction, _mul_into


class ShapeError(ValueError):
    """Operands whose shapes do not compose."""


class SingularMatrixError(ValueError):
    """Exact elimination met a structurally singular system."""


class InconsistentSystemError(ValueError):
    """An overdetermined exact system admits no solution."""


def _entry(v) -> BivariatePoly:
    if isinstance(v, BivariatePoly):
        return v
    if isinstance(v, (int, Fraction)):
        return BivariatePoly.const(v)
    raise TypeError(f"not a polynomial entry: {v!r}")


class PolyMatrix:
    """Immutable dense matrix of BivariatePoly entries.

    Zero-row or zero-column shapes are legal and behave like the empty
    factors they are: products with them produce zero matrices of the
    composed shape.
    """

    __slots__ = ("rows", "cols", "_e")

    def __init__(self, rows: int, cols: int, entries):
        if rows < 0 or cols < 0:
            raise ShapeError("negative dimension")
        entries = list(entries)
        if len(entries) != rows * cols:
            raise ShapeError(f"{rows}x{cols} matrix needs {rows * cols} entries, got {len(entries)}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "_e", entries)

    def __setattr__(self, name, value):
        raise AttributeError("PolyMatrix is immutable")

    # -- construction --------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "PolyMatrix":
        return cls(rows, cols, [ZERO] * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> "PolyMatrix":
        e = [ZERO] * (n * n)
        one = BivariatePoly.one()
        for i in range(n):
            e[i * n + i] = one
        return cls(n, n, e)

    @classmethod
    def from_rows(cls, rows) -> "PolyMatrix":
        rows = [list(r) for r in rows]
        r = len(rows)
        c = len(rows[0]) if rows else 0
        for row in rows:
            if len(row) != c:
                raise ShapeError("ragged rows")
        return cls(r, c, [_entry(v) for row in rows for v in row])

    @classmethod
    def column(cls, entries) -> "PolyMatrix":
        entries = [_entry(v) for v in entries]
        return cls(len(entries), 1, entries)

    @classmethod
    def row(cls, entries) -> "PolyMatrix":
        entries = [_entry(v) for v in entries]
        return cls(1, len(entries), entries)

    @classmethod
    def scalar(cls, p) -> "PolyMatrix":
        return cls(1, 1, [_entry(p)])

    # -- access ---------------------------------------------------------

    def __getitem__(self, key):
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(key)
        return self._e[i * self.cols + j]

    def row_list(self, i: int):
        return self._e[i * self.cols:(i + 1) * self.cols]

    def nonzeros(self):
        """Yield (i, j, entry) over nonzero entries."""
        c = self.cols
        for idx, p in enumerate(self._e):
            if p.terms:
                yield idx // c, idx % c, p

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def is_zero(self) -> bool:
        return all(not p.terms for p in self._e)

    @property
    def degree(self):
        """Max entry total degree, -inf for a zero or empty matrix."""
        d = NEG_INF
        for p in self._e:
            if p.terms:
                pd = p.total_degree
                if pd > d:
                    d = pd
        return d

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and self._e == other._e

    __hash__ = None

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ShapeError(f"add {self.shape} vs {other.shape}")
        return PolyMatrix(self.rows, self.cols,
                          [a + b for a, b in zip(self._e, other._e)])

    def __sub__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ShapeError(f"sub {self.shape} vs {other.shape}")
        return PolyMatrix(self.rows, self.cols,
                          [a - b for a, b in zip(self._e, other._e)])

    def __neg__(self):
        return PolyMatrix(self.rows, self.cols, [-a for a in self._e])

    def scale(self, s) -> "PolyMatrix":
        """Multiply every entry by a polynomial or exact scalar."""
        s = _entry(s)
        if s.is_zero:
            return PolyMatrix.zeros(self.rows, self.cols)
        return PolyMatrix(self.rows, self.cols, [p * s for p in self._e])

    def __mul__(self, s):
        if isinstance(s, (int, Fraction, BivariatePoly)):
            return self.scale(s)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ShapeError(f"matmul {self.shape} @ {other.shape}")
        rows, mid, cols = self.rows, self.cols, other.cols
        # gather nonzero entries of other by row once
        b_rows = [[] for _ in range(mid)]
        for k, j, p in other.nonzeros():
            b_rows[k].append((j, p.terms))
        acc = [None] * (rows * cols)
        for i in range(rows):
            base = i * mid
            obase = i * cols
            for k in range(mid):
                pa = self._e[base + k]
                if not pa.terms:
                    continue
                ta = pa.terms
                for j, tb in b_rows[k]:
                    d = acc[obase + j]
                    if d is None:
                        d = acc[obase + j] = {}
                    _mul_into(d, ta, tb)
        out = []
        for d in acc:
            if d is None:
                out.append(ZERO)
            else:
                out.append(BivariatePoly({e: c for e, c in d.items() if c != 0}))
        return PolyMatrix(rows, cols, out)

    def transpose(self) -> "PolyMatrix":
        e = [ZERO] * (self.rows * self.cols)
        for i in range(self.rows):
            for j in range(self.cols):
                e[j * self.rows + i] = self._e[i * self.cols + j]
        return PolyMatrix(self.cols, self.rows, e)

    def map_entries(self, fn) -> "PolyMatrix":
        return PolyMatrix(self.rows, self.cols, [fn(p) for p in self._e])

    # -- calculus ---------------------------------------------------------

    def dx(self) -> "PolyMatrix":
        return self.map_entries(lambda p: p.dx())

    def dy(self) -> "PolyMatrix":
        return self.map_entries(lambda p: p.dy())

    # -- block structure ----------------------------------------------------

    def top_half(self) -> "PolyMatrix":
        if self.rows % 2:
            raise ShapeError("odd row count has no halves")
        h = self.rows // 2
        return PolyMatrix(h, self.cols, self._e[: h * self.cols])

    def bottom_half(self) -> "PolyMatrix":
        if self.rows % 2:
            raise ShapeError("odd row count has no halves")
        h = self.rows // 2
        return PolyMatrix(h, self.cols, self._e[h * self.cols:])

    # -- conversion -----------------------------------------------------------

    def const_entries(self):
        """Entries of a degree <= 0 matrix as Fraction rows."""
        return [[self._e[i * self.cols + j].constant_value()
                 for j in range(self.cols)] for i in range(self.rows)]

    def eval_float(self, x0, y0) -> np.ndarray:
        out = np.empty((self.rows, self.cols), dtype=float)
        for i in range(self.rows):
            for j in range(self.cols):
                out[i, j] = self._e[i * self.cols + j].eval_float(x0, y0)
        return out

    def eval_exact(self, x0, y0):
        return [[self._e[i * self.cols + j].eval_exact(x0, y0)
                 for j in range(self.cols)] for i in range(self.rows)]

    def max_abs_coeff(self) -> Fraction:
        m = Fraction(0)
        for p in self._e:
            for c in p.terms.values():
                if abs(c) > m:
                    m = abs(c)
        return m

    def __repr__(self):
        if self.rows * self.cols > 36:
            return f"PolyMatrix({self.rows}x{self.cols})"
        body = "; ".join(
            ", ".join(p.to_text() for p in self.row_list(i)) for i in range(self.rows)
        )
        return f"PolyMatrix({self.rows}x{self.cols}: {body})"


def const_matrix(rows) -> PolyMatrix:
    """Build a constant matrix from nested Fractions/ints."""
    return PolyMatrix.from_rows(rows)


def hstack(*mats: PolyMatrix) -> PolyMatrix:
    mats = [m for m in mats]
    if not mats:
        raise ShapeError("nothing to stack")
    r = mats[0].rows
    if any(m.rows != r for m in mats):
        raise ShapeError("hstack needs equal row counts")
    entries = []
    for i in range(r):
        for m in mats:
            entries.extend(m.row_list(i))
    return PolyMatrix(r, sum(m.cols for m in mats), entries)


def vstack(*mats: PolyMatrix) -> PolyMatrix:
    mats = [m for m in mats]
    if not mats:
        raise ShapeError("nothing to stack")
    c = mats[0].cols
    if any(m.cols != c for m in mats):
        raise ShapeError("vstack needs equal column counts")
    entries = []
    for m in mats:
        entries.extend(m._e)
    return PolyMatrix(sum(m.rows for m in mats), c, entries)


def block_diag(*mats: PolyMatrix) -> PolyMatrix:
    rows = sum(m.rows for m in mats)
    cols = sum(m.cols for m in mats)
    e = [ZERO] * (rows * cols)
    ro = co = 0
    for m in mats:
        for i, j, p in m.nonzeros():
            e[(ro + i) * cols + (co + j)] = p
        ro += m.rows
        co += m.cols
    return PolyMatrix(rows, cols, e)


# ---------------------------------------------------------------------------
# Kronecker calculus


def kron(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    """Kronecker product: block (i, j) of the result is a[i, j] * b."""
    rows, cols = a.rows * b.rows, a.cols * b.cols
    e = [ZERO] * (rows * cols)
    for i, j, pa in a.nonzeros():
        for k, l, pb in b.nonzeros():
            e[(i * b.rows + k) * cols + (j * b.cols + l)] = pa * pb
    return PolyMatrix(rows, cols, e)


def kron_power(a: PolyMatrix, m: int) -> PolyMatrix:
    """m-fold Kronecker power; m = 0 gives the 1x1 identity."""
    if m < 0:
        raise ValueError("negative Kronecker power")
    out = PolyMatrix.identity(1)
    for _ in range(m):
        out = kron(a, out)
    return out


def kron_dx(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    """d/dx of kron(a, b) through the product rule."""
    return kron(a.dx(), b) + kron(a, b.dx())


def kron_dy(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    return kron(a.dy(), b) + kron(a, b.dy())


def mixed_product_check(a, b, c, d) -> bool:
    """Whether kron(a, b) @ kron(c, d) == kron(a @ c, b @ d)."""
    if a.cols != c.rows or b.cols != d.rows:
        raise ShapeError("factors do not compose")
    return kron(a, b) @ kron(c, d) == kron(a @ c, b @ d)


# ---------------------------------------------------------------------------
# gradient / divergence


@dataclass(frozen=True)
class GradPair:
    """x and y partial derivatives of one matrix, kept as a pair."""

    top: PolyMatrix
    bottom: PolyMatrix

    def __post_init__(self):
        if self.top.shape != self.bottom.shape:
            raise ShapeError("gradient halves must share a shape")

    def stack(self) -> PolyMatrix:
        """The 2r x c vertical stack (x half over y half)."""
        return vstack(self.top, self.bottom)


def grad(a: PolyMatrix) -> GradPair:
    return GradPair(a.dx(), a.dy())


def grad_stacked(a: PolyMatrix) -> PolyMatrix:
    return vstack(a.dx(), a.dy())


def divergence(g) -> PolyMatrix:
    """Divergence of a GradPair or of an even-row stacked matrix."""
    if isinstance(g, GradPair):
        return g.top.dx() + g.bottom.dy()
    if isinstance(g, PolyMatrix):
        return g.top_half().dx() + g.bottom_half().dy()
    raise TypeError("divergence wants a GradPair or stacked PolyMatrix")


# ---------------------------------------------------------------------------
# exact linear algebra (constant matrices)


def _const_rows(a: PolyMatrix):
    try:
        return [row[:] for row in a.const_entries()]
    except ValueError as exc:
        raise ValueError("exact linear algebra needs a constant matrix") from exc


def det_exact(a: PolyMatrix) -> Fraction:
    """Determinant of a constant square matrix by Bareiss elimination."""
    if a.rows != a.cols:
        raise ShapeError("determinant of a non-square matrix")
    n = a.rows
    if n == 0:
        return Fraction(1)
    m = _const_rows(a)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
            m[i][k] = Fraction(0)
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def rank_exact(a: PolyMatrix) -> int:
    """Rank of a constant matrix by exact Gaussian elimination."""
    m = _const_rows(a)
    rows, cols = a.rows, a.cols
    rank = 0
    row = 0
    for col in range(cols):
        piv = None
        for r in range(row, rows):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = Fraction(1) / m[row][col]
        m[row] = [v * inv for v in m[row]]
        for r in range(rows):
            if r != row and m[r][col] != 0:
                f = m[r][col]
                m[r] = [v - f * w for v, w in zip(m[r], m[row])]
        rank += 1
        row += 1
        if row == rows:
            break
    return rank


def rat_solve(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    """Solve a @ x = b exactly for square constant a.

    Fraction-free elimination with first-nonzero pivoting; raises
    SingularMatrixError when a has no inverse.
    """
    if a.rows != a.cols:
        raise ShapeError("rat_solve needs a square matrix")
    if a.rows != b.rows:
        raise ShapeError(f"rat_solve shapes {a.shape} vs {b.shape}")
    n = a.rows
    am = _const_rows(a)
    bm = _const_rows(b)
    w = [am[i] + bm[i] for i in range(n)]
    total = n + b.cols
    prev = Fraction(1)
    for k in range(n):
        if w[k][k] == 0:
            for r in range(k + 1, n):
                if w[r][k] != 0:
                    w[k], w[r] = w[r], w[k]
                    break
            else:
                raise SingularMatrixError(f"singular pivot at column {k}")
        for i in range(k + 1, n):
            for j in range(k + 1, total):
                w[i][j] = (w[i][j] * w[k][k] - w[i][k] * w[k][j]) / prev
            w[i][k] = Fraction(0)
        prev = w[k][k]
    # back substitution
    xs = [[Fraction(0)] * b.cols for _ in range(n)]
    for i in range(n - 1, -1, -1):
        for c in range(b.cols):
            s = w[i][n + c]
            for j in range(i + 1, n):
                s -= w[i][j] * xs[j][c]
            xs[i][c] = s / w[i][i]
    return const_matrix(xs)


def inverse_exact(a: PolyMatrix) -> PolyMatrix:
    return rat_solve(a, PolyMatrix.identity(a.rows))


def solve_columns(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    """Solve the possibly overdetermined exact system a @ x = b.

    a must have full column rank; every non-pivot equation is checked
    against the solution, and InconsistentSystemError is raised if any
    fails.  Used to extract constant right factors from polynomial
    coefficient systems.
    """
    if a.rows != b.rows:
        raise ShapeError(f"solve_columns shapes {a.shape} vs {b.shape}")
    m = _const_rows(a)
    rhs = _const_rows(b)
    rows, cols = a.rows, a.cols
    w = [m[i] + rhs[i] for i in range(rows)]
    piv_cols = []
    row = 0
    for col in range(cols):
        piv = None
        for r in range(row, rows):
            if w[r][col] != 0:
                piv = r
                break
        if piv is None:
            raise SingularMatrixError(f"column {col} has no pivot")
        w[row], w[piv] = w[piv], w[row]
        inv = Fraction(1) / w[row][col]
        w[row] = [v * inv for v in w[row]]
        for r in range(rows):
            if r != row and w[r][col] != 0:
                f = w[r][col]
                w[r] = [v - f * u for v, u in zip(w[r], w[row])]
        piv_cols.append(col)
        row += 1
    xs = [[Fraction(0)] * b.cols for _ in range(cols)]
    for r, col in enumerate(piv_cols):
        for c in range(b.cols):
            xs[col][c] = w[r][cols + c]
    # all eliminated non-pivot rows must have vanished entirely
    for r in range(row, rows):
        if any(v != 0 for v in w[r]):
            raise InconsistentSystemError("no constant solution matches every row")
    return const_matrix(xs)
