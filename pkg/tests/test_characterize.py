from __future__ import annotations

import dataclasses
import random
from fractions import Fraction

import pytest

from copoly2d.basisops import random_rational_matrix
from copoly2d.characterize import (
    AUX_PROPERTIES,
    LambdaSet,
    NoConstantSolution,
    PROPERTY_ORDER,
    PropertyReport,
    check_a,
    check_b,
    check_c,
    check_d,
    check_e,
    interleaved_det_check,
    lambda_via_formula,
    lambda_via_operator,
    level_pearson_check,
    psi_tower,
    rodrigues_reconstruct,
    t_matrix,
    verify_all,
)
from copoly2d.matpoly import PolyMatrix, const_matrix, kron
from copoly2d.orthosys import build_monic
from copoly2d.polycore import parse_poly
from copoly2d.weights import builtin, make_quadrature

ALL_INSTANCES = [
    "product_hermite",
    "product_laguerre(0,0)",
    "product_laguerre(1,2)",
    "hermite_laguerre(0)",
    "product_jacobi(0,0,0,0)",
    "triangle(0,0,0)",
    "triangle(1,1,1)",
]

_SYSTEMS: dict = {}


def get_system(ref, nmax=7):
    """Share one monic system per family across the module; they are pricey."""
    got = _SYSTEMS.get(ref)
    if got is None or got[1].nmax < nmax:
        f = builtin(ref)
        got = (f, build_monic(f, nmax))
        _SYSTEMS[ref] = got
    return got


# ---------------------------------------------------------------------------
# drift tower


def test_psi_tower_level_zero_is_family_drift():
    for ref in ALL_INSTANCES:
        f = builtin(ref)
        tw = psi_tower(f, 0)
        lev = tw.level(0)
        assert lev.psi1 == PolyMatrix.scalar(f.psi1)
        assert lev.psi2 == PolyMatrix.scalar(f.psi2)


def test_psi_tower_closed_form_all_builtins():
    for ref in ALL_INSTANCES:
        f = builtin(ref)
        tw = psi_tower(f, 3)
        assert tw.depth == 3
        for m in (1, 2, 3):
            assert tw.level(m).closed_form_ok, (ref, m)


def test_psi_tower_hermite_is_scalar_shift():
    # phi = I for product Hermite, so each level only re-nests the drift:
    # psi_i at level m is the Kronecker lift of the level-0 entries and
    # stays diagonal with entries -2x or -2y.
    f = builtin("product_hermite")
    tw = psi_tower(f, 2)
    lev = tw.level(1)
    eye2 = PolyMatrix.identity(2)
    assert lev.psi1 == kron(eye2, PolyMatrix.scalar(f.psi1))
    assert lev.psi2 == kron(eye2, PolyMatrix.scalar(f.psi2))


def test_psi_tower_rejects_quadratic_drift():
    f = builtin("product_hermite")
    bad = dataclasses.replace(f, psi1=parse_poly("x^2"))
    with pytest.raises(ValueError):
        psi_tower(bad, 1)


# ---------------------------------------------------------------------------
# interleaved determinant identity


def test_interleaved_det_base_case():
    d1 = PolyMatrix.column([parse_poly("-1"), parse_poly("0")])
    d2 = PolyMatrix.column([parse_poly("0"), parse_poly("-1")])
    assert interleaved_det_check(d1, d2, 1)


def test_interleaved_det_hand_case():
    # D1 = (1,0), D2 = (0,1), m = 2: the 4x4 interleaving is a
    # permutation matrix with determinant -1 = (-1)^1 * 1^2.
    d1 = PolyMatrix.column([parse_poly("1"), parse_poly("0")])
    d2 = PolyMatrix.column([parse_poly("0"), parse_poly("1")])
    assert interleaved_det_check(d1, d2, 2)


def test_interleaved_det_random_pairs():
    rng = random.Random(20240817)
    for trial in range(50):
        d1 = random_rational_matrix(2, 1, rng)
        d2 = random_rational_matrix(2, 1, rng)
        for m in range(1, 6):
            assert interleaved_det_check(d1, d2, m), (trial, m)


# ---------------------------------------------------------------------------
# eigenvalue matrices


def test_degree_one_anchor_both_routes():
    for ref in ALL_INSTANCES:
        f, sys = get_system(ref)
        want = -f.d_matrix()
        assert lambda_via_operator(f, sys, 1, 0) == want, ref
        assert lambda_via_formula(f, 1, 0) == want, ref


def test_hermite_degree_two_eigenvalue():
    f, sys = get_system("product_hermite")
    lam = lambda_via_operator(f, sys, 2, 0)
    assert lam.const_entries() == const_matrix(
        [[4, 0, 0], [0, 4, 0], [0, 0, 4]]
    ).const_entries()
    assert lambda_via_formula(f, 2, 0) == lam


def test_formula_route_agrees_on_grid():
    for ref in ALL_INSTANCES:
        f, sys = get_system(ref)
        tower = psi_tower(f, 2)
        for n in range(1, 5):
            for m in range(3):
                try:
                    lam = lambda_via_operator(f, sys, n, m, tower)
                except NoConstantSolution:
                    continue
                assert lambda_via_formula(f, n, m, tower) == lam, (ref, n, m)


def test_statement_variant_is_column_permutation_at_level_zero():
    # Both layouts agree at level 0 where the permutation is trivial.
    f, _ = get_system("product_laguerre(0,0)")
    tower = psi_tower(f, 1)
    for n in (1, 2, 3):
        a = t_matrix(f, n, 0, tower, "proof")
        b = t_matrix(f, n, 0, tower, "statement")
        assert a == b, n
    with pytest.raises(ValueError):
        t_matrix(f, 1, 0, tower, "boxed")


def test_lambda_set_caching_and_bounds():
    f, sys = get_system("product_hermite")
    lams = LambdaSet(f, sys, psi_tower(f, 2))
    first = lams.get(3, 1)
    assert lams.get(3, 1) is first
    assert first.shape == (4, 4)
    with pytest.raises(ValueError):
        lams.get(2, 2)
    with pytest.raises(ValueError):
        lams.get(2, -1)


def test_random_stack_has_no_constant_eigenvalue():
    f, sys = get_system("product_hermite")
    rng = random.Random(7)
    stack = random_rational_matrix(2, 4, rng)
    with pytest.raises(NoConstantSolution):
        lambda_via_operator(f, sys, 2, 1, stack=stack)


# ---------------------------------------------------------------------------
# property (a)


def test_check_a_passes_builtins():
    for ref in ALL_INSTANCES:
        rep = check_a(builtin(ref))
        assert rep.status == "pass", ref
        assert rep.residual == 0.0


def test_check_a_rejects_perturbed_drift():
    f = builtin("product_hermite")
    pert = dataclasses.replace(f, psi1=f.psi1 + parse_poly("1"))
    rep = check_a(pert)
    assert rep.status == "fail"
    assert "pearson identity fails" in rep.notes


def test_check_a_flags_quadratic_drift():
    f = builtin("product_hermite")
    bad = dataclasses.replace(f, psi1=parse_poly("x^2 - 1"))
    rep = check_a(bad)
    assert rep.status == "fail"
    assert "psi degree above one" in rep.notes


def test_check_a_flags_singular_drift():
    f = builtin("product_hermite")
    bad = dataclasses.replace(f, psi2=f.psi1)
    rep = check_a(bad)
    assert rep.status == "fail"
    assert "drift matrix singular" in rep.notes


# ---------------------------------------------------------------------------
# property (b)


def test_level_pearson_identity_all_builtins():
    for ref in ALL_INSTANCES:
        f = builtin(ref)
        tower = psi_tower(f, 2)
        for m in range(3):
            assert level_pearson_check(f, tower, m), (ref, m)


def test_check_b_exact_cells():
    for ref in ALL_INSTANCES:
        f, sys = get_system(ref)
        tower = psi_tower(f, 2)
        for n, m in ((1, 1), (2, 1), (3, 2)):
            rep = check_b(f, sys, n, m, tower=tower)
            assert rep.status == "pass", (ref, n, m)
            assert rep.residual == 0.0


def test_check_b_numeric_matches_exact():
    f, sys = get_system("product_jacobi(0,0,0,0)")
    rule = make_quadrature(f, 20)
    for n, m in ((1, 1), (2, 1)):
        rep = check_b(f, sys, n, m, mode="numeric", rule=rule)
        assert rep.status == "pass", (n, m)
        assert rep.residual <= rep.tolerance


# ---------------------------------------------------------------------------
# property (c): where it holds and where no constant matrix exists


def test_check_c_product_hermite_all_cells():
    f, sys = get_system("product_hermite")
    tower = psi_tower(f, 2)
    for n in range(1, 5):
        for m in range(3):
            rep = check_c(f, sys, n, m, tower=tower)
            assert rep.status == "pass", (n, m)


def test_check_c_laguerre_and_triangle_fold_at_every_level():
    for ref in ("product_laguerre(0,0)", "product_laguerre(1,2)",
                "triangle(0,0,0)", "triangle(1,1,1)"):
        f, sys = get_system(ref)
        tower = psi_tower(f, 2)
        for n in range(1, 5):
            for m in range(3):
                rep = check_c(f, sys, n, m, tower=tower)
                assert rep.status == "pass", (ref, n, m)


def test_check_c_hermite_laguerre_fails_above_level_zero():
    # Mixed-order derivative rows of this family carry different
    # one-dimensional eigenvalue sums, so no constant right factor can
    # exist once two derivative directions mix.  The failure is real
    # mathematics, not a tolerance artifact.
    f, sys = get_system("hermite_laguerre(0)")
    tower = psi_tower(f, 2)
    for n in range(1, 5):
        rep = check_c(f, sys, n, 0, tower=tower)
        assert rep.status == "pass", n
        for m in (1, 2):
            rep = check_c(f, sys, n, m, tower=tower)
            assert rep.status == "fail", (n, m)
            assert "no constant eigenvalue matrix" in rep.notes


def test_check_c_jacobi_breaks_at_level_two():
    # Jacobi derivative eigenvalues are quadratic in the derivative
    # count, so the row sums first disagree when two derivative
    # directions mix twice.
    f, sys = get_system("product_jacobi(0,0,0,0)")
    tower = psi_tower(f, 2)
    for n in range(1, 5):
        for m in (0, 1):
            assert check_c(f, sys, n, m, tower=tower).status == "pass", (n, m)
        rep = check_c(f, sys, n, 2, tower=tower)
        assert rep.status == "fail", n
        assert "no constant eigenvalue matrix" in rep.notes


def test_check_c_anchor_note():
    f, sys = get_system("product_laguerre(0,0)")
    rep = check_c(f, sys, 1, 0)
    assert rep.status == "pass"
    assert "degree-one anchor" in rep.notes


# ---------------------------------------------------------------------------
# property (d)


def test_check_d_passes_where_every_level_folds():
    for ref in ("product_hermite", "product_laguerre(0,0)",
                "product_laguerre(1,2)", "triangle(1,1,1)"):
        f, sys = get_system(ref)
        tower = psi_tower(f, 4)
        for n in (1, 2, 3, 4):
            rep = check_d(f, sys, n, tower=tower)
            assert rep.status == "pass", (ref, n)
            assert rep.residual == 0.0


def test_check_d_inherits_eigenvalue_obstructions():
    f, sys = get_system("hermite_laguerre(0)")
    tower = psi_tower(f, 4)
    assert check_d(f, sys, 1, tower=tower).status == "pass"
    for n in (2, 3):
        rep = check_d(f, sys, n, tower=tower)
        assert rep.status == "fail", n
        assert "level 1" in rep.notes

    f, sys = get_system("product_jacobi(0,0,0,0)")
    tower = psi_tower(f, 4)
    for n in (1, 2):
        assert check_d(f, sys, n, tower=tower).status == "pass", n
    rep = check_d(f, sys, 3, tower=tower)
    assert rep.status == "fail"
    assert "level 2" in rep.notes


# ---------------------------------------------------------------------------
# Rodrigues reconstruction


def test_rodrigues_degree_two_exact():
    signs = {}
    for ref in ("product_hermite", "product_laguerre(0,0)"):
        f, sys = get_system(ref)
        out = rodrigues_reconstruct(f, sys, 2)
        assert out["reconstruction_exact"], ref
        assert out["alternating_sign"], ref
        assert all(out["level_sign_ok"]), ref
        signs[ref] = out["final_sign"]
    # the realized sign convention is the same for both families
    assert len(set(signs.values())) == 1
    assert signs["product_hermite"] == 1


def test_rodrigues_order_sensitivity_is_reported():
    # Scalar eigenvalue matrices commute, so for product Hermite the
    # reversed product agrees; the field documents the convention.
    f, sys = get_system("product_hermite")
    out = rodrigues_reconstruct(f, sys, 3)
    assert out["reconstruction_exact"]
    assert out["reversed_product_matches"]


def test_rodrigues_degree_three_laguerre():
    f, sys = get_system("product_laguerre(0,0)")
    out = rodrigues_reconstruct(f, sys, 3)
    assert out["reconstruction_exact"]
    assert all(out["level_sign_ok"])


# ---------------------------------------------------------------------------
# property (e)


def test_check_e_level_zero_all_builtins():
    for ref in ALL_INSTANCES:
        f, sys = get_system(ref)
        for n in (1, 2, 3, 4):
            rep = check_e(f, sys, n, 0)
            assert rep.status == "pass", (ref, n)


def test_check_e_hermite_all_levels():
    f, sys = get_system("product_hermite")
    for n in (1, 2, 3, 4):
        for m in (1, 2):
            rep = check_e(f, sys, n, m)
            assert rep.status == "pass", (n, m)


def test_check_e_reconstruction_fails_above_level_zero():
    # With a non-identity weight matrix the projected three-term window
    # cannot rebuild the weighted finer stack once m >= 1: the left side
    # falls outside the span of the coarser stacks entirely.  The
    # orthogonality tail and the rank of the lowest coefficient still
    # behave, which the notes make visible.
    for ref in ("product_laguerre(0,0)", "triangle(0,0,0)",
                "product_jacobi(0,0,0,0)"):
        f, sys = get_system(ref)
        for n, m in ((2, 1), (1, 1), (2, 2)):
            rep = check_e(f, sys, n, m)
            assert rep.status == "fail", (ref, n, m)
            assert "three term reconstruction misses" in rep.notes
            assert "projection on stack" not in rep.notes
            assert "rank" not in rep.notes


def test_check_e_degree_three_weight_matrix_leaks_low_projections():
    f = builtin("product_hermite")
    bad = dataclasses.replace(f, phi=PolyMatrix.from_rows([
        [parse_poly("1 + x^3"), parse_poly("x*y")],
        [parse_poly("x*y"), parse_poly("1")],
    ]))
    sys = build_monic(bad, 6)
    rep = check_e(bad, sys, 3, 0)
    assert rep.status == "fail"
    assert "projection on stack" in rep.notes


def test_check_e_numeric_agrees_with_exact():
    f, sys = get_system("product_jacobi(0,0,0,0)")
    rule = make_quadrature(f, 20)
    for n, m in ((1, 0), (2, 0), (3, 0), (2, 1)):
        exact = check_e(f, sys, n, m)
        numeric = check_e(f, sys, n, m, mode="numeric", rule=rule)
        assert numeric.status == exact.status, (n, m)


# ---------------------------------------------------------------------------
# the grid runner


def test_verify_all_report_order_and_modes():
    f = builtin("product_hermite")
    reports = verify_all(f, nmax=2, mmax=1)
    keys = [(r.property, r.n, r.m) for r in reports]
    order = {p: i for i, p in enumerate(PROPERTY_ORDER)}
    assert keys == sorted(keys, key=lambda k: (order[k[0]], k[1], k[2]))
    assert all(r.mode == "exact" for r in reports)
    assert all(r.status == "pass" for r in reports)


def test_verify_all_property_filter():
    f = builtin("product_laguerre(0,0)")
    reports = verify_all(f, nmax=2, mmax=1, properties=("a", "lemma1"))
    assert {r.property for r in reports} == {"a", "lemma1"}
    reports = verify_all(f, nmax=2, mmax=1, properties=("aux",))
    assert {r.property for r in reports} == set(AUX_PROPERTIES)


def test_verify_all_argument_validation():
    f = builtin("product_hermite")
    with pytest.raises(ValueError):
        verify_all(f, nmax=0)
    with pytest.raises(ValueError):
        verify_all(f, mmax=-1)
    with pytest.raises(ValueError):
        verify_all(f, mode="sideways")
    with pytest.raises(ValueError):
        verify_all(f, properties=("f",))


def test_verify_all_never_raises_without_oracle():
    f = builtin("product_hermite")
    blind = dataclasses.replace(f, moment_fn=None)
    reports = verify_all(blind, nmax=2, mmax=1)
    by_prop = {}
    for r in reports:
        by_prop.setdefault(r.property, []).append(r)
    # data-only checks still run and pass
    assert all(r.status == "pass" for r in by_prop["a"])
    assert all(r.status == "pass" for r in by_prop["lemma1"])
    # structural checks report the missing construction instead of raising
    assert all(r.status == "fail" for r in by_prop["b"])
    assert all("system construction failed" in r.notes for r in by_prop["b"])


def test_verify_all_quadratic_drift_never_raises():
    f = builtin("product_hermite")
    bad = dataclasses.replace(f, psi1=parse_poly("x^2"))
    reports = verify_all(bad, nmax=2, mmax=1)
    a = [r for r in reports if r.property == "a"]
    assert a and a[0].status == "fail"
    c = [r for r in reports if r.property == "c"]
    assert c and all(r.status == "fail" for r in c)


def test_verify_all_deterministic_and_worker_invariant():
    f = builtin("product_laguerre(1,2)")
    base = verify_all(f, nmax=3, mmax=1, seed=11)
    again = verify_all(f, nmax=3, mmax=1, seed=11)
    threaded = verify_all(f, nmax=3, mmax=1, seed=11, workers=3)
    assert base == again
    assert base == threaded


def test_verify_all_numeric_verdicts_match_exact_on_jacobi():
    f = builtin("product_jacobi(1/2,1/2,1/2,1/2)")
    props = ("a", "b", "c", "d", "e")
    exact = verify_all(f, nmax=3, mmax=1, mode="exact", properties=props)
    numeric = verify_all(f, nmax=3, mmax=1, mode="numeric", properties=props,
                         quad_order=20)
    key = lambda r: (r.property, r.n, r.m)
    verdict_e = {key(r): r.status for r in exact}
    verdict_n = {key(r): r.status for r in numeric}
    assert verdict_e == verdict_n


def test_report_dict_round_trip():
    rep = PropertyReport("c", "demo", 2, 1, "pass", 0.0, 0.0, "exact", "")
    d = rep.to_dict()
    assert d["property"] == "c"
    assert PropertyReport(**d) == rep
