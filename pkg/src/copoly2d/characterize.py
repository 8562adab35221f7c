"""Checkers for the five equivalent descriptions of a classical weight.

Each checker consumes a weight family (and usually a built orthogonal
system) and returns a PropertyReport carrying a pass/fail status, a
residual, and the tolerance it was measured against.  The property
tokens are the package-wide taxonomy (see the package docstring):

  a    the weight solves a matrix Pearson equation with degree bounds
       and an invertible drift matrix,
  b    every gradient stack level is orthogonal for the Kronecker power
       weight, which itself solves the lifted Pearson equation,
  c    every gradient stack solves a second order equation with a
       constant eigenvalue matrix,
  d    the iterated divergence identities hold level by level with
       invertible eigenvalue matrices,
  e    multiplying the next finer stack by the weight matrix expands
       over exactly three consecutive stacks one level down, with the
       lowest coefficient of full column rank,

plus the auxiliary structure tokens phi_conditions, lemma1 (interleaved
determinant identity), lemma2 (drift tower closed form) and prop1 (the
shift/derivative identity suite on the monomial basis).

Everything runs over exact rational arithmetic unless a check is asked
for numeric mode, in which case only the integrals move to quadrature;
the weight density itself is never materialized, identities involving
it are divided through and cleared to polynomial statements using the
family's logarithmic gradient.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .basisops import identity_suite, l_mat, n_mat, stacked, starred
from .matpoly import (
    InconsistentSystemError,
    PolyMatrix,
    ShapeError,
    SingularMatrixError,
    const_matrix,
    det_exact,
    hstack,
    inverse_exact,
    kron,
    kron_power,
    rank_exact,
    rat_solve,
    solve_columns,
    vstack,
)
from .orthosys import (
    OrthoSystem,
    build_monic,
    eval_entries,
    g_lead,
    inner,
    integrate_matrix,
    integrate_matrix_numeric,
)
from .polycore import ONE, RationalFn
from .weights import (
    WeightFamily,
    check_pearson,
    check_phi_conditions,
    make_quadrature,
)

RESIDUAL_REL = 1e-9
RANK_REL = 1e-8

PROPERTY_ORDER = (
    "a", "b", "c", "d", "e",
    "phi_conditions", "lemma1", "lemma2", "prop1",
)

AUX_PROPERTIES = ("phi_conditions", "lemma1", "lemma2", "prop1")


class NoConstantSolution(ValueError):
    """The second order image leaves the stack's constant column span."""


class SingularLambda(ValueError):
    """An eigenvalue matrix in a divergence tower is exactly singular."""


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class PropertyReport:
    """One verification outcome; residual <= tolerance whenever it passes."""

    property: str
    family: str
    n: int
    m: int
    status: str            # pass | fail | skipped
    residual: float
    tolerance: float
    mode: str              # exact | numeric
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "family": self.family,
            "n": self.n,
            "m": self.m,
            "status": self.status,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "mode": self.mode,
            "notes": self.notes,
        }


def _report(prop, family, n, m, ok, mode="exact", residual=0.0,
            tolerance=0.0, notes=""):
    return PropertyReport(prop, family, n, m, "pass" if ok else "fail",
                          float(residual), float(tolerance), mode, notes)


# ---------------------------------------------------------------------------
# quadratic and linear coefficient data of the weight matrix


def phi_coefficient_columns(f: WeightFamily):
    """Quadratic and linear coefficient columns of the three entries.

    Returns (a_cols, b_cols) where a_cols[i] is the 3x1 column of the
    x^2, xy, y^2 coefficients and b_cols[i] the 2x1 column of the x, y
    coefficients of entry i in (top left, off diagonal, bottom right).
    """
    a_cols = []
    b_cols = []
    for p in (f.phi[0, 0], f.phi[0, 1], f.phi[1, 1]):
        a_cols.append(const_matrix([[p.coeff(2, 0)], [p.coeff(1, 1)], [p.coeff(0, 2)]]))
        b_cols.append(const_matrix([[p.coeff(1, 0)], [p.coeff(0, 1)]]))
    return tuple(a_cols), tuple(b_cols)


# ---------------------------------------------------------------------------
# the drift tower: lifted first order coefficients at every stack level


@dataclass(frozen=True)
class PsiLevel:
    """Level data: the two drift matrices and their split-out parts.

    d1/d2 interleave the x and y coefficients of each entry row (row
    2r holds the x part of entry row r, row 2r+1 its y part); e1/e2
    hold the constant terms.  closed_form_ok records whether the level
    built by the recurrence matches the direct block closed form.
    """

    psi1: PolyMatrix
    psi2: PolyMatrix
    d1: PolyMatrix
    d2: PolyMatrix
    e1: PolyMatrix
    e2: PolyMatrix
    closed_form_ok: bool


@dataclass(frozen=True)
class PsiTower:
    levels: tuple

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    def level(self, m: int) -> PsiLevel:
        return self.levels[m]


def _linear_split(mat: PolyMatrix):
    """Interleaved first order coefficients and constants of a matrix."""
    rows, cols = mat.shape
    dref = [[Fraction(0)] * cols for _ in range(2 * rows)]
    eref = [[Fraction(0)] * cols for _ in range(rows)]
    for r in range(rows):
        for c in range(cols):
            p = mat[r, c]
            if p.total_degree > 1:
                raise ValueError("drift entry of degree above one")
            dref[2 * r][c] = p.coeff(1, 0)
            dref[2 * r + 1][c] = p.coeff(0, 1)
            eref[r][c] = p.coeff(0, 0)
    return const_matrix(dref), const_matrix(eref)


def _h_block(a_lo: PolyMatrix, a_hi: PolyMatrix, eyeh: PolyMatrix) -> PolyMatrix:
    """First order increment contributed by the quadratic parts.

    N(2, 1) a and N(2, 2) a are the x and y gradients of the quadratic
    coefficient column a, so the block carries exactly the linear terms
    that differentiating the weight entries adds at the next level.
    """
    n21 = n_mat(2, 1)
    n22 = n_mat(2, 2)
    return vstack(
        hstack(kron(eyeh, n21 @ a_lo), kron(eyeh, n21 @ a_hi)),
        hstack(kron(eyeh, n22 @ a_lo), kron(eyeh, n22 @ a_hi)),
    )


def _k_block(b_lo: PolyMatrix, b_hi: PolyMatrix, eyeh: PolyMatrix) -> PolyMatrix:
    """Constant increment contributed by the linear parts."""
    return vstack(
        hstack(eyeh.scale(b_lo[0, 0]), eyeh.scale(b_hi[0, 0])),
        hstack(eyeh.scale(b_lo[1, 0]), eyeh.scale(b_hi[1, 0])),
    )


def psi_tower(f: WeightFamily, mmax: int) -> PsiTower:
    """Drift matrices for every stack level 0 .. mmax.

    Level m is built by the doubling recurrence
    psi_i -> I_2 (x) psi_i + grad(column i of the weight matrix) (x) I,
    and each level's coefficient split is cross-checked against the
    closed form that adds one block of quadratic/linear weight data to
    the Kronecker-doubled previous level.
    """
    if mmax < 0:
        raise ValueError("mmax must be nonnegative")
    phi = f.phi
    grads = []
    for i in (0, 1):
        p, q = phi[0, i], phi[1, i]
        grads.append(PolyMatrix.from_rows([[p.dx(), q.dx()], [p.dy(), q.dy()]]))
    a_cols, b_cols = phi_coefficient_columns(f)
    psi1 = PolyMatrix.scalar(f.psi1)
    psi2 = PolyMatrix.scalar(f.psi2)
    d1, e1 = _linear_split(psi1)
    d2, e2 = _linear_split(psi2)
    levels = [PsiLevel(psi1, psi2, d1, d2, e1, e2, True)]
    eye2 = PolyMatrix.identity(2)
    for m in range(1, mmax + 1):
        eyeh = PolyMatrix.identity(2 ** (m - 1))
        prev = levels[m - 1]
        new1 = kron(eye2, prev.psi1) + kron(grads[0], eyeh)
        new2 = kron(eye2, prev.psi2) + kron(grads[1], eyeh)
        d1, e1 = _linear_split(new1)
        d2, e2 = _linear_split(new2)
        ok = True
        for i, (dd, ee, dprev, eprev) in enumerate(
            ((d1, e1, prev.d1, prev.e1), (d2, e2, prev.d2, prev.e2))
        ):
            want_d = _h_block(a_cols[i], a_cols[i + 1], eyeh) + kron(eye2, dprev)
            want_e = _k_block(b_cols[i], b_cols[i + 1], eyeh) + kron(eye2, eprev)
            ok = ok and dd == want_d and ee == want_e
        levels.append(PsiLevel(new1, new2, d1, d2, e1, e2, ok))
    return PsiTower(tuple(levels))


# ---------------------------------------------------------------------------
# auxiliary determinant identity


def interleaved_det_check(d1: PolyMatrix, d2: PolyMatrix, m: int) -> bool:
    """det(I_m (x) d1 | I_m (x) d2) == (-1)^(m//2) det(d1 | d2)^m, exactly.

    The columns d1, d2 are 2x1; the left side interleaves m copies of
    each, the right side is the base determinant raised to m with the
    sign of the unshuffling permutation.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if d1.shape != (2, 1) or d2.shape != (2, 1):
        raise ShapeError("interleaved_det_check wants 2x1 columns")
    eye = PolyMatrix.identity(m)
    big = hstack(kron(eye, d1), kron(eye, d2))
    base = det_exact(hstack(d1, d2))
    return det_exact(big) == Fraction(-1) ** (m // 2) * base ** m


# ---------------------------------------------------------------------------
# eigenvalue matrices: operator route and leading-coefficient route


def _second_order_image(f: WeightFamily, level: PsiLevel, q: PolyMatrix) -> PolyMatrix:
    """Apply the second order operator of the weight to a stack.

    phi11 dxx + 2 phi12 dxy + phi22 dyy acting entrywise, plus the
    level's drift matrices times the first derivatives.
    """
    qx = q.dx()
    qy = q.dy()
    out = qx.dx().scale(f.phi[0, 0])
    out = out + qx.dy().scale(f.phi[0, 1] * 2)
    out = out + qy.dy().scale(f.phi[1, 1])
    return out + level.psi1 @ qx + level.psi2 @ qy


def _solve_constant_right_factor(q: PolyMatrix, rhs: PolyMatrix) -> PolyMatrix:
    """Solve q @ c = rhs for a constant matrix c by coefficient matching.

    Every monomial of every row of both sides becomes one equation; the
    stacked system is solved exactly, and NoConstantSolution is raised
    when the equations are inconsistent or underdetermine c.
    """
    if q.rows != rhs.rows:
        raise ShapeError(f"row mismatch {q.shape} vs {rhs.shape}")
    arows = []
    brows = []
    for r in range(q.rows):
        monos = set()
        for c in range(q.cols):
            monos.update(q[r, c].terms)
        for c in range(rhs.cols):
            monos.update(rhs[r, c].terms)
        for mono in sorted(monos):
            arows.append([q[r, c].coeff(*mono) for c in range(q.cols)])
            brows.append([rhs[r, c].coeff(*mono) for c in range(rhs.cols)])
    if not arows:
        return PolyMatrix.zeros(q.cols, rhs.cols)
    try:
        return solve_columns(const_matrix(arows), const_matrix(brows))
    except InconsistentSystemError as exc:
        raise NoConstantSolution(f"inconsistent coefficient system: {exc}") from exc
    except SingularMatrixError as exc:
        raise NoConstantSolution(f"rank deficient coefficient system: {exc}") from exc


def lambda_via_operator(f: WeightFamily, sys: OrthoSystem, n: int, m: int,
                        tower: PsiTower | None = None,
                        stack: PolyMatrix | None = None) -> PolyMatrix:
    """Eigenvalue matrix of the level-m stack of gradient index n.

    Solves op(Q) + Q L = 0 for the constant matrix L, where op is the
    second order operator of the weight at level m.  The solution is
    exact; NoConstantSolution signals that no constant matrix works,
    which is how a non-classical input announces itself.
    """
    if n < 1 or m < 0:
        raise ValueError("need gradient index n >= 1 and level m >= 0")
    if tower is None or tower.depth < m:
        tower = psi_tower(f, m)
    q = sys.q(n, m) if stack is None else stack
    image = _second_order_image(f, tower.level(m), q)
    return _solve_constant_right_factor(q, -image)


def t_matrix(f: WeightFamily, n: int, m: int, tower: PsiTower,
             variant: str = "proof") -> PolyMatrix:
    """Constant second order symbol acting on leading coefficients.

    Assembled from the three-block shift/derivative stacks weighted by
    the quadratic coefficient columns, plus a first order part from the
    level drift data.  The two variants differ in how the shift factor
    of the first order part is laid out: "proof" lifts the transposed
    two-block stack by a Kronecker identity on the left, "statement"
    transposes the level-lifted stack, which permutes columns; they
    agree at level 0.
    """
    if n < 1 or m < 0:
        raise ValueError("need gradient index n >= 1 and level m >= 0")
    a_cols, _ = phi_coefficient_columns(f)
    a3 = hstack(a_cols[0], a_cols[1].scale(2), a_cols[2])
    eye = PolyMatrix.identity(2 ** m)
    lstar = starred(n - 1, m).L
    nstar = starred(n, m).N
    mid = kron(a3, PolyMatrix.identity(2 ** m * (n - 1)))
    term1 = lstar.transpose() @ mid @ nstar
    if variant == "proof":
        shift_t = kron(eye, stacked(n - 1).L.transpose())
    elif variant == "statement":
        shift_t = vstack(kron(eye, l_mat(n - 1, 1)),
                         kron(eye, l_mat(n - 1, 2))).transpose()
    else:
        raise ValueError(f"unknown variant {variant!r}")
    level = tower.level(m)
    dpair = hstack(level.d1, level.d2)
    nstk = vstack(kron(eye, n_mat(n, 1)), kron(eye, n_mat(n, 2)))
    term2 = shift_t @ kron(dpair, PolyMatrix.identity(n)) @ nstk
    return term1 + term2


def lambda_via_formula(f: WeightFamily, n: int, m: int,
                       tower: PsiTower | None = None,
                       variant: str = "proof") -> PolyMatrix:
    """Eigenvalue matrix from the leading-coefficient equation.

    The leading block G of the level-m stack satisfies G L = -T G with
    T the constant symbol from t_matrix; the system is overdetermined
    and solved exactly (G always has full column rank for monic data).
    """
    if tower is None or tower.depth < m:
        tower = psi_tower(f, m)
    g = g_lead(n, m)
    t = t_matrix(f, n, m, tower, variant)
    return solve_columns(g, -(t @ g))


class LambdaSet:
    """Cache of eigenvalue matrices keyed by (degree, level).

    The matrix stored under (d, m) acts on the columns of the level-m
    stack of gradient index d - m, so every entry of a fixed degree d
    has the same size d + 1.
    """

    def __init__(self, f: WeightFamily, sys: OrthoSystem, tower: PsiTower):
        self.family = f
        self.system = sys
        self.tower = tower
        self._entries: dict = {}

    def get(self, degree: int, m: int) -> PolyMatrix:
        if not 0 <= m < degree:
            raise ValueError("need 0 <= level < degree")
        key = (degree, m)
        got = self._entries.get(key)
        if got is None:
            got = lambda_via_operator(self.family, self.system,
                                      degree - m, m, self.tower)
            self._entries[key] = got
        return got


# ---------------------------------------------------------------------------
# property (a): Pearson data with degree bounds and invertible drift


def check_a(f: WeightFamily) -> PropertyReport:
    problems = []
    if f.psi1.total_degree > 1 or f.psi2.total_degree > 1:
        problems.append("psi degree above one")
    if not check_pearson(f):
        problems.append("pearson identity fails")
    if det_exact(f.d_matrix()) == 0:
        problems.append("drift matrix singular")
    return _report("a", f.name, 0, 0, not problems, notes="; ".join(problems))


# ---------------------------------------------------------------------------
# property (b): orthogonal stacks and the lifted Pearson equation


def level_pearson_check(f: WeightFamily, tower: PsiTower, m: int) -> bool:
    """The Kronecker power weight solves the level-m Pearson equation.

    Dividing by the scalar density and clearing both logarithmic
    gradient denominators turns the divergence identity into a single
    polynomial matrix statement, checked exactly.
    """
    lifted = kron_power(f.phi, m + 1)
    top = lifted.top_half()
    bot = lifted.bottom_half()
    lev = tower.level(m)
    drift = kron_power(f.phi, m) @ hstack(lev.psi1, lev.psi2)
    gxn, gxd = f.log_grad_x.num, f.log_grad_x.den
    gyn, gyd = f.log_grad_y.num, f.log_grad_y.den
    core = (top.dx() + bot.dy() - drift).scale(gxd * gyd)
    core = core + top.scale(gxn * gyd) + bot.scale(gyn * gxd)
    return core.is_zero


def check_b(f: WeightFamily, sys: OrthoSystem, n: int, m: int,
            mode: str = "exact", rule=None, tower: PsiTower | None = None,
            pearson_ok: bool | None = None) -> PropertyReport:
    """Level-m stack orthogonality plus the lifted Pearson equation."""
    if n < 1 or m < 1:
        raise ValueError("property b needs n >= 1 and m >= 1")
    if pearson_ok is None:
        if tower is None or tower.depth < m:
            tower = psi_tower(f, m)
        pearson_ok = level_pearson_check(f, tower, m)
    notes = [] if pearson_ok else ["lifted pearson identity fails"]
    qn = sys.q(n, m)
    if mode == "exact":
        ortho_ok = all(
            inner(sys.q(k, m), qn, m, f).is_zero for k in range(n)
        )
        if not ortho_ok:
            notes.append("cross terms with a lower stack survive")
        gram_ok = det_exact(inner(qn, qn, m, f)) != 0
        if not gram_ok:
            notes.append("level gram singular")
        ok = pearson_ok and ortho_ok and gram_ok
        return _report("b", f.name, n, m, ok, notes="; ".join(notes))
    if mode != "numeric":
        raise ValueError(f"unknown mode {mode!r}")
    if rule is None:
        rule = make_quadrature(f, 20)
    gram = inner(qn, qn, m, f, mode="numeric", rule=rule)
    scale = float(np.abs(np.diag(gram)).max())
    tol = RESIDUAL_REL * scale
    worst = 0.0
    for k in range(n):
        cross = inner(sys.q(k, m), qn, m, f, mode="numeric", rule=rule)
        worst = max(worst, float(np.abs(cross).max()))
    sv = np.linalg.svd(gram, compute_uv=False)
    gram_ok = bool(sv[-1] > RANK_REL * sv[0])
    if worst > tol:
        notes.append("cross terms with a lower stack survive")
    if not gram_ok:
        notes.append("level gram numerically singular")
    ok = pearson_ok and worst <= tol and gram_ok
    return _report("b", f.name, n, m, ok, mode="numeric", residual=worst,
                   tolerance=tol, notes="; ".join(notes))


# ---------------------------------------------------------------------------
# property (c): second order equation with constant eigenvalue matrix


def check_c(f: WeightFamily, sys: OrthoSystem, n: int, m: int,
            tower: PsiTower | None = None,
            lambdas: LambdaSet | None = None) -> PropertyReport:
    """Operator route must solve exactly and agree with the symbol route."""
    if tower is None or tower.depth < m:
        tower = psi_tower(f, m)
    notes = []
    try:
        if lambdas is not None:
            lam = lambdas.get(n + m, m)
        else:
            lam = lambda_via_operator(f, sys, n, m, tower)
    except NoConstantSolution as exc:
        return _report("c", f.name, n, m, False,
                       notes=f"no constant eigenvalue matrix: {exc}")
    ok = True
    lam_formula = lambda_via_formula(f, n, m, tower, "proof")
    if lam_formula != lam:
        ok = False
        notes.append("leading-coefficient route disagrees with the operator route")
    lam_alt = lambda_via_formula(f, n, m, tower, "statement")
    if lam_alt != lam:
        notes.append("alternate shift-factor layout disagrees (column permutation)")
    if n == 1 and m == 0:
        anchor_ok = lam == f.d_matrix().scale(-1)
        if not anchor_ok:
            ok = False
            notes.append("degree-one eigenvalue matrix is not minus the drift matrix")
        else:
            notes.append("degree-one anchor: eigenvalue matrix equals minus the drift matrix")
    return _report("c", f.name, n, m, ok, notes="; ".join(notes))


# ---------------------------------------------------------------------------
# property (d): divergence tower identities, level by level


def _cleared_divergence_identity(f: WeightFamily, sys: OrthoSystem, n: int,
                                 m: int, lam: PolyMatrix) -> bool:
    """One level of the divergence tower as a cleared polynomial identity.

    The level-m statement divides by the scalar density and clears both
    logarithmic gradient denominators, leaving an exact polynomial
    matrix identity in the weight data.
    """
    w = sys.phi_power(m + 1) @ sys.q(n - m - 1, m + 1)
    top = w.top_half()
    bot = w.bottom_half()
    gxn, gxd = f.log_grad_x.num, f.log_grad_x.den
    gyn, gyd = f.log_grad_y.num, f.log_grad_y.den
    core = (top.dx() + bot.dy() + sys.phi_power(m) @ sys.q(n - m, m) @ lam)
    core = core.scale(gxd * gyd) + top.scale(gxn * gyd) + bot.scale(gyn * gxd)
    return core.is_zero


def check_d(f: WeightFamily, sys: OrthoSystem, n: int,
            tower: PsiTower | None = None,
            lambdas: LambdaSet | None = None) -> PropertyReport:
    """All n divergence tower levels of the degree-n column, exactly."""
    if n < 1:
        raise ValueError("property d needs n >= 1")
    if tower is None or tower.depth < n - 1:
        tower = psi_tower(f, max(n - 1, 0))
    if lambdas is None:
        lambdas = LambdaSet(f, sys, tower)
    notes = []
    ok = True
    for m in range(n):
        try:
            lam = lambdas.get(n, m)
        except NoConstantSolution as exc:
            return _report("d", f.name, n, 0, False,
                           notes=f"level {m}: no constant eigenvalue matrix: {exc}")
        if det_exact(lam) == 0:
            ok = False
            notes.append(f"level {m}: singular eigenvalue matrix")
            continue
        if not _cleared_divergence_identity(f, sys, n, m, lam):
            ok = False
            notes.append(f"level {m}: divergence identity fails")
    return _report("d", f.name, n, 0, ok, notes="; ".join(notes))


# ---------------------------------------------------------------------------
# explicit tower iteration (used by the reconstruction checks)


def _rf_rows(mat: PolyMatrix):
    return [[RationalFn(mat[r, c]) for c in range(mat.cols)]
            for r in range(mat.rows)]


def _rf_tower_step(rows, gx: RationalFn, gy: RationalFn):
    """One divergence of the density-weighted tower, density divided out."""
    half = len(rows) // 2
    out = []
    for r in range(half):
        row = []
        for c in range(len(rows[0])):
            t = rows[r][c]
            b = rows[half + r][c]
            row.append(t.dx() + gx * t + b.dy() + gy * b)
        out.append(row)
    return out


def _rf_right_mul(rows, cmat: PolyMatrix):
    out = []
    for row in rows:
        new = []
        for c in range(cmat.cols):
            acc = RationalFn(0, ONE)
            for k in range(cmat.rows):
                acc = acc + row[k] * cmat[k, c]
            new.append(acc)
        out.append(new)
    return out


def _rf_equals_scaled(rows, mat: PolyMatrix, sign: int) -> bool:
    scaled = mat.scale(Fraction(sign))
    return all(
        rows[r][c] == scaled[r, c]
        for r in range(mat.rows) for c in range(mat.cols)
    )


def rodrigues_reconstruct(f: WeightFamily, sys: OrthoSystem, n: int,
                          tower: PsiTower | None = None,
                          lambdas: LambdaSet | None = None) -> dict:
    """Iterate the divergence tower down from level n and compare.

    Starting from the weight's n-th Kronecker power times the constant
    top stack, each step applies one density-divided divergence.  After
    k steps the result is compared against (-1)^k times the level
    (n - k) stack data times the eigenvalue product accumulated so far;
    after n steps it must be the degree-n column itself (transposed)
    times the full product.  Returns a dict with the per-level sign
    pattern, the resolved final sign, whether the reversed product
    order also matches, and whether the monic column is recovered
    exactly after inverting the product.

    Raises SingularLambda when some eigenvalue matrix is singular.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if tower is None or tower.depth < n - 1:
        tower = psi_tower(f, max(n - 1, 0))
    if lambdas is None:
        lambdas = LambdaSet(f, sys, tower)
    lams = []
    for m in range(n):
        lam = lambdas.get(n, m)
        if det_exact(lam) == 0:
            raise SingularLambda(f"degree {n} level {m}")
        lams.append(lam)
    gx, gy = f.log_grad_x, f.log_grad_y
    rows = _rf_rows(sys.phi_power(n) @ sys.q(0, n))
    suffix = PolyMatrix.identity(n + 1)
    level_sign_ok = []
    for k in range(1, n + 1):
        rows = _rf_tower_step(rows, gx, gy)
        level = n - k
        suffix = lams[level] @ suffix
        expected = sys.phi_power(level) @ sys.q(k, level) @ suffix
        level_sign_ok.append(_rf_equals_scaled(rows, expected, (-1) ** k))
    p_t = sys.p(n).transpose()
    forward = p_t @ suffix
    final_sign = 0
    for s in ((-1) ** n, -((-1) ** n)):
        if _rf_equals_scaled(rows, forward, s):
            final_sign = s
            break
    reversed_product = PolyMatrix.identity(n + 1)
    for m in range(n - 1, -1, -1):
        reversed_product = reversed_product @ lams[m]
    reversed_matches = _rf_equals_scaled(rows, p_t @ reversed_product, (-1) ** n)
    reconstruction_exact = False
    if final_sign:
        recon = _rf_right_mul(rows, inverse_exact(suffix))
        reconstruction_exact = all(
            recon[r][c] * final_sign == p_t[r, c]
            for r in range(p_t.rows) for c in range(p_t.cols)
        )
    return {
        "family": f.name,
        "n": n,
        "level_sign_ok": level_sign_ok,
        "alternating_sign": all(level_sign_ok),
        "final_sign": final_sign,
        "reversed_product_matches": reversed_matches,
        "reconstruction_exact": reconstruction_exact,
    }


# ---------------------------------------------------------------------------
# property (e): three term expansion of the weighted finer stack


def _block_apply(qk: PolyMatrix, a: PolyMatrix) -> PolyMatrix:
    """(I_2 (x) qk) @ a without forming the block diagonal."""
    return vstack(qk @ a.top_half(), qk @ a.bottom_half())


def check_e(f: WeightFamily, sys: OrthoSystem, n: int, m: int,
            mode: str = "exact", rule=None) -> PropertyReport:
    """Three term expansion with full-rank lowest coefficient.

    The weighted next-finer stack is projected on every coarser stack
    of degree up to n + 1: the projections below n - 1 must vanish, the
    three surviving ones must reconstruct the left side identically,
    and the lowest one must have full column rank.
    """
    if n < 1 or m < 0:
        raise ValueError("property e needs n >= 1 and m >= 0")
    qprime = sys.q(n - 1, m + 1)
    lhs = kron(f.phi, PolyMatrix.identity(2 ** m)) @ qprime
    mid = sys.phi_power(m + 1) @ qprime
    mid_top = mid.top_half()
    mid_bot = mid.bottom_half()
    notes = []
    if mode == "exact":
        ok = True
        for k in range(n - 1):
            qk_t = sys.q(k, m).transpose()
            nk = integrate_matrix(vstack(qk_t @ mid_top, qk_t @ mid_bot), f)
            if not nk.is_zero:
                ok = False
                notes.append(f"projection on stack {k} survives")
        recon = None
        a_low = None
        for k in range(max(n - 1, 0), n + 2):
            qk = sys.q(k, m)
            qk_t = qk.transpose()
            nk = integrate_matrix(vstack(qk_t @ mid_top, qk_t @ mid_bot), f)
            gram = inner(qk, qk, m, f)
            try:
                ak = vstack(
                    rat_solve(gram, nk.top_half()),
                    rat_solve(gram, nk.bottom_half()),
                )
            except SingularMatrixError:
                return _report("e", f.name, n, m, False,
                               notes=f"level gram singular at stack {k}")
            term = _block_apply(qk, ak)
            recon = term if recon is None else recon + term
            if k == n - 1:
                a_low = ak
        if lhs != recon:
            ok = False
            notes.append("three term reconstruction misses the left side")
        want = n + m + 1
        got = rank_exact(a_low)
        if got != want:
            ok = False
            notes.append(f"lowest coefficient rank {got}, want {want}")
        return _report("e", f.name, n, m, ok, notes="; ".join(notes))
    if mode != "numeric":
        raise ValueError(f"unknown mode {mode!r}")
    if rule is None:
        rule = make_quadrature(f, 20)
    gram_n = inner(sys.q(n, m), sys.q(n, m), m, f, mode="numeric", rule=rule)
    scale = float(np.abs(np.diag(gram_n)).max())
    tol = RESIDUAL_REL * scale
    tail = 0.0
    coeffs = {}
    for k in range(n + 2):
        qk = sys.q(k, m)
        qk_t = qk.transpose()
        nk = integrate_matrix_numeric(vstack(qk_t @ mid_top, qk_t @ mid_bot), f, rule)
        gram = inner(qk, qk, m, f, mode="numeric", rule=rule)
        dim = gram.shape[0]
        ak = np.vstack([np.linalg.solve(gram, nk[:dim]),
                        np.linalg.solve(gram, nk[dim:])])
        if k <= n - 2:
            tail = max(tail, float(np.abs(ak).max()))
        else:
            coeffs[k] = ak
    if tail > tol:
        notes.append("projection on a low stack survives")
    lhs_vals = eval_entries(lhs, rule.nodes_x, rule.nodes_y)
    acc = np.zeros_like(lhs_vals)
    half = 2 ** m
    for k, ak in coeffs.items():
        qk_vals = eval_entries(sys.q(k, m), rule.nodes_x, rule.nodes_y)
        dim = ak.shape[0] // 2
        acc[:half] += np.einsum("rsq,sc->rcq", qk_vals, ak[:dim])
        acc[half:] += np.einsum("rsq,sc->rcq", qk_vals, ak[dim:])
    recon_res = float(np.abs(lhs_vals - acc).max())
    if recon_res > tol:
        notes.append("three term reconstruction misses the left side")
    sv = np.linalg.svd(coeffs[n - 1], compute_uv=False)
    rank = int(np.sum(sv > RANK_REL * sv[0])) if sv.size else 0
    want = n + m + 1
    if rank != want:
        notes.append(f"lowest coefficient rank {rank}, want {want}")
    residual = max(tail, recon_res)
    ok = residual <= tol and rank == want
    return _report("e", f.name, n, m, ok, mode="numeric", residual=residual,
                   tolerance=tol, notes="; ".join(notes))


# ---------------------------------------------------------------------------
# the full verification grid


def _expand_properties(props):
    if props is None:
        props = ("a", "b", "c", "d", "e", "aux")
    chosen = set()
    for p in props:
        if p == "aux":
            chosen.update(AUX_PROPERTIES)
        elif p in ("a", "b", "c", "d", "e") or p in AUX_PROPERTIES:
            chosen.add(p)
        else:
            raise ValueError(f"unknown property token {p!r}")
    return chosen


def _guarded(prop, family, n, m, mode, fn):
    try:
        return fn()
    except Exception as exc:  # keep the grid running, report the cell
        return PropertyReport(prop, family, n, m, "fail", 1.0, 0.0, mode,
                              f"error: {type(exc).__name__}: {exc}")


def verify_all(f: WeightFamily, nmax: int = 4, mmax: int = 2,
               mode: str = "auto", seed: int = 0, properties=None,
               quad_order: int = 20, workers: int | None = None):
    """Run every selected checker over the (n, m) grid, never raising.

    Returns the list of PropertyReport sorted by (property, n, m) with
    properties in taxonomy order.  mode "auto" picks exact checks when
    the family carries an exact moment oracle and numeric integration
    otherwise; construction of the system itself always needs the
    oracle, so families without one fail the structural checks with an
    explanatory note while the data-only checks still run.
    """
    if nmax < 1:
        raise ValueError("nmax must be at least 1")
    if mmax < 0:
        raise ValueError("mmax must be nonnegative")
    if mode == "auto":
        resolved = "exact" if f.has_oracle() else "numeric"
    elif mode in ("exact", "numeric"):
        resolved = mode
    else:
        raise ValueError(f"unknown mode {mode!r}")
    chosen = _expand_properties(properties)
    rule = None
    if resolved == "numeric":
        try:
            rule = make_quadrature(f, quad_order)
        except Exception:
            rule = None  # per-cell guards will report the reason
    depth = max(1, mmax, nmax - 1)
    try:
        tower = psi_tower(f, depth)
        tower_err = ""
    except Exception as exc:
        tower = None
        tower_err = f"drift tower construction failed: {type(exc).__name__}: {exc}"
    reports = []
    if "a" in chosen:
        reports.append(_guarded("a", f.name, 0, 0, "exact", lambda: check_a(f)))
    if "phi_conditions" in chosen:
        reports.append(_guarded(
            "phi_conditions", f.name, 0, 0, "exact",
            lambda: _report("phi_conditions", f.name, 0, 0,
                            check_phi_conditions(f)),
        ))
    if "lemma1" in chosen:
        d = f.d_matrix()
        d1 = PolyMatrix.column([d[0, 0], d[1, 0]])
        d2 = PolyMatrix.column([d[0, 1], d[1, 1]])
        for m in range(1, 6):
            reports.append(_guarded(
                "lemma1", f.name, 0, m, "exact",
                lambda m=m: _report("lemma1", f.name, 0, m,
                                    interleaved_det_check(d1, d2, m)),
            ))
    if "lemma2" in chosen:
        for m in range(1, depth + 1):
            if tower is None:
                reports.append(PropertyReport("lemma2", f.name, 0, m, "fail",
                                              1.0, 0.0, "exact", tower_err))
            else:
                reports.append(_report("lemma2", f.name, 0, m,
                                       tower.level(m).closed_form_ok))
    if "prop1" in chosen:
        for n in range(nmax + 1):
            for m in range(mmax + 1):
                rng = random.Random(seed * 1_000_003 + n * 97 + m)
                got = identity_suite(n, m, rng, sandwich_draws=3)
                bad = sorted(k for k, v in got.items() if not v)
                reports.append(_report(
                    "prop1", f.name, n, m, not bad,
                    notes="; ".join(f"{k} fails" for k in bad),
                ))
    tasks = []
    if chosen & {"b", "c", "d", "e"}:
        try:
            system = build_monic(f, nmax + mmax + 1)
        except Exception as exc:
            note = f"system construction failed: {type(exc).__name__}: {exc}"
            for prop in sorted(chosen & {"b", "c", "d", "e"}):
                if prop == "d":
                    grid = [(n, 0) for n in range(1, nmax + 1)]
                elif prop == "b":
                    grid = [(n, m) for n in range(1, nmax + 1)
                            for m in range(1, mmax + 1)]
                else:
                    grid = [(n, m) for n in range(1, nmax + 1)
                            for m in range(mmax + 1)]
                for n, m in grid:
                    reports.append(PropertyReport(
                        prop, f.name, n, m, "fail", 1.0, 0.0, resolved, note))
        else:
            lambdas = LambdaSet(f, system, tower) if tower is not None else None
            pearson_memo: dict = {}

            def _pearson(m: int) -> bool:
                got = pearson_memo.get(m)
                if got is None:
                    got = level_pearson_check(f, tower, m)
                    pearson_memo[m] = got
                return got

            def _needs_tower(prop, n, m):
                reports.append(PropertyReport(prop, f.name, n, m, "fail",
                                              1.0, 0.0, "exact", tower_err))

            if "b" in chosen:
                for n in range(1, nmax + 1):
                    for m in range(1, mmax + 1):
                        if tower is None:
                            _needs_tower("b", n, m)
                            continue
                        tasks.append((lambda n=n, m=m: _guarded(
                            "b", f.name, n, m, resolved,
                            lambda: check_b(f, system, n, m, resolved, rule,
                                            tower, _pearson(m)))))
            if "c" in chosen:
                for n in range(1, nmax + 1):
                    for m in range(mmax + 1):
                        if tower is None:
                            _needs_tower("c", n, m)
                            continue
                        tasks.append((lambda n=n, m=m: _guarded(
                            "c", f.name, n, m, "exact",
                            lambda: check_c(f, system, n, m, tower, lambdas))))
            if "d" in chosen:
                for n in range(1, nmax + 1):
                    if tower is None:
                        _needs_tower("d", n, 0)
                        continue
                    tasks.append((lambda n=n: _guarded(
                        "d", f.name, n, 0, "exact",
                        lambda: check_d(f, system, n, tower, lambdas))))
            if "e" in chosen:
                for n in range(1, nmax + 1):
                    for m in range(mmax + 1):
                        tasks.append((lambda n=n, m=m: _guarded(
                            "e", f.name, n, m, resolved,
                            lambda: check_e(f, system, n, m, resolved, rule))))
    if workers and workers > 1 and tasks:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports.extend(pool.map(lambda t: t(), tasks))
    else:
        reports.extend(t() for t in tasks)
    order = {p: i for i, p in enumerate(PROPERTY_ORDER)}
    reports.sort(key=lambda r: (order[r.property], r.n, r.m))
    return reports
