"""Monic vector orthogonal systems and their gradient stacks.

P_n is the column of n + 1 monic polynomials of degree n (leading block
the identity: entry k is x^(n-k) y^k plus lower degree) orthogonal to
every lower monomial vector: integral(X_j P_n^t rho) = 0 for j < n.  The
coefficients come from one exact block Gram solve per degree, driven by
the family's normalized moment oracle.

The level-m gradient stack of the system is
Q(n, m) = grad Q(n+1, m-1) with Q(n, 0) = P_n^t, a 2^m by (n+m+1)
polynomial matrix of degree n whose rows interleave all m-fold partial
derivatives of the entries of P_{n+m}.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .basisops import n_mat, x_vec
from .matpoly import (
    PolyMatrix,
    SingularMatrixError,
    const_matrix,
    hstack,
    kron,
    kron_power,
    rat_solve,
    vstack,
)
from .polycore import BivariatePoly
from .weights import QuadRule, WeightFamily


class SingularGramError(RuntimeError):
    """The block moment Gram matrix of some degree is singular."""


# ---------------------------------------------------------------------------
# integration


def integrate_poly(p: BivariatePoly, f: WeightFamily) -> Fraction:
    """Exact integral(p rho) / mu_00 through the moment oracle."""
    total = Fraction(0)
    for (i, j), c in p.terms.items():
        total += c * f.moment(i, j)
    return total


def integrate_matrix(m: PolyMatrix, f: WeightFamily) -> PolyMatrix:
    """Entrywise exact integration; returns a constant matrix."""
    return const_matrix(
        [[integrate_poly(m[i, j], f) for j in range(m.cols)] for i in range(m.rows)]
    )


def eval_entries(m: PolyMatrix, xs, ys) -> np.ndarray:
    """Float evaluation on node arrays, shaped (rows, cols, nodes)."""
    q = np.shape(xs)[0]
    out = np.zeros((m.rows, m.cols, q))
    for i, j, p in m.nonzeros():
        out[i, j, :] = p.eval_float(xs, ys)
    return out


def integrate_matrix_numeric(m: PolyMatrix, f: WeightFamily, rule: QuadRule) -> np.ndarray:
    me = eval_entries(m, rule.nodes_x, rule.nodes_y)
    return np.einsum("rcq,q->rc", me, rule.weights)


# ---------------------------------------------------------------------------
# construction


def _moment_block(f: WeightFamily, j: int, k: int) -> PolyMatrix:
    # integral(X_j X_k^t rho) / mu_00; entry (r, s) pairs the monomials
    # x^(j-r) y^r and x^(k-s) y^s
    rows = []
    for r in range(j + 1):
        rows.append([f.moment((j - r) + (k - s), r + s) for s in range(k + 1)])
    return const_matrix(rows)


class OrthoSystem:
    """Monic orthogonal columns P_0 .. P_nmax plus cached derived data."""

    def __init__(self, family: WeightFamily, pvecs):
        self.family = family
        self._p = list(pvecs)
        self._q = {}
        self._gram = {}
        self._phipow = {}

    @property
    def nmax(self) -> int:
        return len(self._p) - 1

    def p(self, n: int) -> PolyMatrix:
        """The degree-n monic column, shape (n+1, 1)."""
        return self._p[n]

    def q(self, n: int, m: int) -> PolyMatrix:
        """Level-m gradient stack of degree n, shape (2^m, n+m+1)."""
        if n < 0 or m < 0:
            raise ValueError("indices must be nonnegative")
        if n + m > self.nmax:
            raise ValueError(f"q({n},{m}) needs degree {n + m} > nmax {self.nmax}")
        key = (n, m)
        got = self._q.get(key)
        if got is None:
            if m == 0:
                got = self._p[n].transpose()
            else:
                prev = self.q(n + 1, m - 1)
                got = vstack(prev.dx(), prev.dy())
            self._q[key] = got
        return got

    def phi_power(self, m: int) -> PolyMatrix:
        got = self._phipow.get(m)
        if got is None:
            got = kron_power(self.family.phi, m)
            self._phipow[m] = got
        return got

    def gram(self, n: int) -> PolyMatrix:
        """integral(X_n P_n^t rho) / mu_00, the degree-n normalization block."""
        got = self._gram.get(n)
        if got is None:
            got = integrate_matrix(x_vec(n) @ self._p[n].transpose(), self.family)
            self._gram[n] = got
        return got


def build_monic(f: WeightFamily, nmax: int) -> OrthoSystem:
    """Construct P_0 .. P_nmax by exact block Gram elimination.

    Degree n couples all lower moment blocks: writing
    P_n = X_n + sum_k C_k X_k, the orthogonality conditions stack into
    one square system over the blocks M(j, k) = integral(X_j X_k^t rho).
    Raises SingularGramError when that system is singular, which is the
    exact signal that the moment data is not a quasi-definite weight.
    """
    if nmax < 0:
        raise ValueError("nmax must be nonnegative")
    pvecs = [PolyMatrix.column([1])]
    for n in range(1, nmax + 1):
        blocks = [[_moment_block(f, j, k) for k in range(n)] for j in range(n)]
        a = vstack(*[hstack(*row) for row in blocks])
        b = vstack(*[_moment_block(f, j, n) for j in range(n)])
        try:
            z = rat_solve(a, -b)
        except SingularMatrixError as exc:
            raise SingularGramError(f"degree {n}: {exc}") from exc
        entries = [[BivariatePoly.zero()] for _ in range(n + 1)]
        col = x_vec(n)
        for r in range(n + 1):
            entries[r][0] = col[r, 0]
        row0 = 0
        for k in range(n):
            ck_t = PolyMatrix(k + 1, n + 1, [z[row0 + r, s] for r in range(k + 1) for s in range(n + 1)])
            contrib = ck_t.transpose() @ x_vec(k)
            for r in range(n + 1):
                entries[r][0] = entries[r][0] + contrib[r, 0]
            row0 += k + 1
        pvecs.append(PolyMatrix.from_rows(entries))
    return OrthoSystem(f, pvecs)


# ---------------------------------------------------------------------------
# leading coefficients


def g_lead(n: int, m: int) -> PolyMatrix:
    """Leading coefficient block of Q(n, m), shape (2^m (n+1), n+m+1).

    Defined by the recurrence that mirrors the gradient stacking: the
    x and y derivative bands of degree n + 1 act on the level m - 1
    leading block, and level 0 is the identity (monicity).
    """
    if n < 0 or m < 0:
        raise ValueError("indices must be nonnegative")
    if m == 0:
        return PolyMatrix.identity(n + 1)
    prev = g_lead(n + 1, m - 1)
    eye = PolyMatrix.identity(2 ** (m - 1))
    top = kron(eye, n_mat(n + 1, 1)) @ prev
    bot = kron(eye, n_mat(n + 1, 2)) @ prev
    return vstack(top, bot)


def leading_block(q: PolyMatrix, n: int) -> PolyMatrix:
    """Extract the degree-n coefficient block of a level stack.

    Row r of the stack expands as X_n^t times rows r(n+1) .. r(n+1)+n of
    the returned matrix plus lower degree terms.
    """
    rows = q.rows
    out = []
    for r in range(rows):
        for s in range(n + 1):
            out.append([q[r, c].coeff(n - s, s) for c in range(q.cols)])
    return const_matrix(out)


# ---------------------------------------------------------------------------
# weighted inner products


def inner(a: PolyMatrix, b: PolyMatrix, m: int, f: WeightFamily,
          mode: str = "exact", rule: QuadRule | None = None):
    """integral(a^t phi_kron_m b rho) / mu_00.

    Exact mode returns a constant PolyMatrix of Fractions; numeric mode
    integrates on the given rule and returns a float array.
    """
    if a.rows != 2 ** m or b.rows != 2 ** m:
        raise ValueError(f"inner at level {m} needs 2^{m} rows")
    phim = kron_power(f.phi, m)
    if mode == "exact":
        return integrate_matrix(a.transpose() @ phim @ b, f)
    if mode != "numeric":
        raise ValueError(f"unknown mode {mode!r}")
    if rule is None:
        raise ValueError("numeric mode needs a quadrature rule")
    ae = eval_entries(a, rule.nodes_x, rule.nodes_y)
    pe = eval_entries(phim, rule.nodes_x, rule.nodes_y)
    be = eval_entries(b, rule.nodes_x, rule.nodes_y)
    return np.einsum("rcq,rsq,sdq,q->cd", ae, pe, be, rule.weights)
