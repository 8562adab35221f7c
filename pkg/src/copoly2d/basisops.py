"""Monomial column vectors and their shift and derivative matrices.

X_n is the column of the n + 1 degree-n monomials ordered by falling x
power: (x^n, x^(n-1) y, ..., y^n)^t.  Multiplication by x or y shifts
X_n into X_{n+1} through constant selection matrices L, and the partial
derivatives drop X_n onto X_{n-1} through banded matrices N:

    x * X_n = L(n, 1) X_{n+1}        d/dx X_n = N(n, 1)^t X_{n-1}
    y * X_n = L(n, 2) X_{n+1}        d/dy X_n = N(n, 2)^t X_{n-1}

The identity suite at the bottom checks that these relations, lifted by
Kronecker products with an identity block of width 2^m, stay consistent
with matrix multiplication from either side.  Each identity is an exact
polynomial matrix equation.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import NamedTuple

from .matpoly import PolyMatrix, const_matrix, kron, vstack
from .polycore import BivariatePoly


def x_vec(n: int) -> PolyMatrix:
    """Column of the degree-n monomials, x powers falling."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    return PolyMatrix.column([BivariatePoly.monomial(n - k, k) for k in range(n + 1)])


def l_mat(n: int, which: int) -> PolyMatrix:
    """Constant (n+1) x (n+2) selection with x*X_n = l_mat(n,1) @ X_{n+1}."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if which not in (1, 2):
        raise ValueError("which must be 1 (x) or 2 (y)")
    rows = [[Fraction(0)] * (n + 2) for _ in range(n + 1)]
    off = 0 if which == 1 else 1
    for k in range(n + 1):
        rows[k][k + off] = Fraction(1)
    return const_matrix(rows)


def n_mat(n: int, which: int) -> PolyMatrix:
    """Constant n x (n+1) band with d/dx X_n = n_mat(n,1)^t @ X_{n-1}.

    n = 0 gives the empty 0 x 1 matrix, matching the vanishing
    derivative of the constant monomial vector.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if which not in (1, 2):
        raise ValueError("which must be 1 (x) or 2 (y)")
    rows = [[Fraction(0)] * (n + 1) for _ in range(n)]
    for k in range(n):
        if which == 1:
            rows[k][k] = Fraction(n - k)
        else:
            rows[k][k + 1] = Fraction(k + 1)
    return const_matrix(rows) if n > 0 else PolyMatrix.zeros(0, 1)


class StackedPair(NamedTuple):
    L: PolyMatrix
    N: PolyMatrix


def stacked(n: int) -> StackedPair:
    """Vertical stacks L_n = [L(n,1); L(n,2)] and N_n = [N(n,1); N(n,2)]."""
    return StackedPair(
        vstack(l_mat(n, 1), l_mat(n, 2)),
        vstack(n_mat(n, 1), n_mat(n, 2)),
    )


def starred(n: int, m: int) -> StackedPair:
    """Three-block second order stacks used by the eigenvalue formula.

    The L member stacks I_{2^m} (x) L(n-1,1)L(n,1), I (x) L(n-1,2)L(n,1)
    and I (x) L(n-1,2)L(n,2); the N member is the same pattern with
    N(n-1,i)N(n,j).  For n = 0 (L) or n <= 1 (N) the corresponding
    blocks are empty, which downstream products treat as zero.
    """
    if n < 0 or m < 0:
        raise ValueError("indices must be nonnegative")
    eye = PolyMatrix.identity(2 ** m)
    if n == 0:
        lstar = PolyMatrix.zeros(0, 2 ** m * (n + 2))
    else:
        lstar = vstack(
            kron(eye, l_mat(n - 1, 1) @ l_mat(n, 1)),
            kron(eye, l_mat(n - 1, 2) @ l_mat(n, 1)),
            kron(eye, l_mat(n - 1, 2) @ l_mat(n, 2)),
        )
    if n <= 1:
        nstar = PolyMatrix.zeros(0, 2 ** m * (n + 1))
    else:
        nstar = vstack(
            kron(eye, n_mat(n - 1, 1) @ n_mat(n, 1)),
            kron(eye, n_mat(n - 1, 2) @ n_mat(n, 1)),
            kron(eye, n_mat(n - 1, 2) @ n_mat(n, 2)),
        )
    return StackedPair(lstar, nstar)


# ---------------------------------------------------------------------------
# identity suite


IDENTITY_KEYS = (
    "shift1",          # multiply by x and by y
    "shift_xx",        # multiply by x^2
    "shift_xy",
    "shift_yy",
    "linear_sandwich",  # (I (x) X_1^t) A (I (x) X_n^t) pushed to degree n+1
    "deriv1",          # d/dx and d/dy
    "deriv_xx",        # second derivatives
    "deriv_xy",
    "deriv_yy",
)

_MIN_N = {
    "shift1": 0, "shift_xx": 0, "shift_xy": 0, "shift_yy": 0,
    "linear_sandwich": 0,
    "deriv1": 1, "deriv_xx": 2, "deriv_xy": 2, "deriv_yy": 2,
}


def identity_min_degree(which: str) -> int:
    return _MIN_N[which]


def random_rational_matrix(rows: int, cols: int, rng: random.Random) -> PolyMatrix:
    """Seeded draw with entries p/q, |p| <= 9, 1 <= q <= 4."""
    return const_matrix(
        [[Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(cols)]
         for _ in range(rows)]
    )


def _lift(m: int, a: PolyMatrix) -> PolyMatrix:
    return kron(PolyMatrix.identity(2 ** m), a)


def basis_identity_check(n: int, m: int, which: str, rng: random.Random | None = None) -> bool:
    """Exact check of one lifted monomial-basis identity at (n, m).

    Both sides are built independently, the left by scalar multiplication
    or differentiation of I_{2^m} (x) X_n^t, the right by composing the
    constant selection matrices, and compared entrywise.  The
    linear_sandwich identity draws a random (2^{m+1}) x (2^m) rational
    matrix; pass a seeded rng for reproducibility.
    """
    if which not in _MIN_N:
        raise ValueError(f"unknown identity {which!r}")
    if n < _MIN_N[which]:
        raise ValueError(f"{which} needs n >= {_MIN_N[which]}")
    if m < 0:
        raise ValueError("m must be nonnegative")
    xr = _lift(m, x_vec(n).transpose())
    x = BivariatePoly.x()
    y = BivariatePoly.y()

    if which == "shift1":
        up = _lift(m, x_vec(n + 1).transpose())
        okx = xr.scale(x) == up @ _lift(m, l_mat(n, 1).transpose())
        oky = xr.scale(y) == up @ _lift(m, l_mat(n, 2).transpose())
        return okx and oky

    if which in ("shift_xx", "shift_xy", "shift_yy"):
        up2 = _lift(m, x_vec(n + 2).transpose())
        if which == "shift_xx":
            s, first, second = x * x, 1, 1
        elif which == "shift_xy":
            s, first, second = x * y, 1, 2
        else:
            s, first, second = y * y, 2, 2
        rhs = up2 @ _lift(m, (l_mat(n, second) @ l_mat(n + 1, first)).transpose())
        return xr.scale(s) == rhs

    if which == "linear_sandwich":
        if rng is None:
            rng = random.Random(0)
        a = random_rational_matrix(2 ** (m + 1), 2 ** m, rng)
        lhs = _lift(m, x_vec(1).transpose()) @ a @ xr
        rhs = (
            _lift(m, x_vec(n + 1).transpose())
            @ _lift(m, stacked(n).L.transpose())
            @ kron(a, PolyMatrix.identity(n + 1))
        )
        return lhs == rhs

    down = _lift(m, x_vec(n - 1).transpose())
    if which == "deriv1":
        okx = xr.dx() == down @ _lift(m, n_mat(n, 1))
        oky = xr.dy() == down @ _lift(m, n_mat(n, 2))
        return okx and oky

    down2 = _lift(m, x_vec(n - 2).transpose())
    if which == "deriv_xx":
        d, first, second = xr.dx().dx(), 1, 1
    elif which == "deriv_xy":
        d, first, second = xr.dx().dy(), 1, 2
    else:
        d, first, second = xr.dy().dy(), 2, 2
    rhs = down2 @ _lift(m, n_mat(n - 1, second) @ n_mat(n, first))
    return d == rhs


def identity_suite(n: int, m: int, rng: random.Random | None = None,
                   sandwich_draws: int = 1) -> dict:
    """Run every identity valid at (n, m); returns {key: bool}."""
    out = {}
    for key in IDENTITY_KEYS:
        if n < _MIN_N[key]:
            continue
        if key == "linear_sandwich":
            ok = all(
                basis_identity_check(n, m, key, rng) for _ in range(sandwich_draws)
            )
        else:
            ok = basis_identity_check(n, m, key)
        out[key] = ok
    return out
