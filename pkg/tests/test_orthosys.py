from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from copoly2d.basisops import x_vec
from copoly2d.matpoly import PolyMatrix, det_exact
from copoly2d.orthosys import (
    OrthoSystem,
    SingularGramError,
    build_monic,
    g_lead,
    inner,
    integrate_matrix,
    integrate_poly,
    leading_block,
)
from copoly2d.polycore import BivariatePoly as P, parse_poly
from copoly2d.weights import builtin, load_family, export_family, make_quadrature


def test_hermite_low_degrees():
    sys = build_monic(builtin("product_hermite"), 3)
    assert sys.p(0) == PolyMatrix.column([1])
    assert sys.p(1) == PolyMatrix.column([parse_poly("x"), parse_poly("y")])
    assert sys.p(2) == PolyMatrix.column(
        [parse_poly("x^2 - 1/2"), parse_poly("x*y"), parse_poly("y^2 - 1/2")]
    )
    p3 = sys.p(3)
    assert p3[0, 0] == parse_poly("x^3 - 3/2*x")
    assert p3[1, 0] == parse_poly("x^2*y - 1/2*y")


def test_triangle_first_degree():
    sys = build_monic(builtin("triangle(0,0,0)"), 1)
    assert sys.p(1) == PolyMatrix.column(
        [parse_poly("x - 1/3"), parse_poly("y - 1/3")]
    )


def test_monicity_and_orthogonality():
    for ref in ("product_laguerre(1,2)", "product_jacobi(0,0,0,0)", "triangle(1,1,1)"):
        f = builtin(ref)
        sys = build_monic(f, 5)
        for n in range(6):
            assert leading_block(sys.p(n).transpose(), n) == PolyMatrix.identity(n + 1), (ref, n)
            for j in range(n):
                z = integrate_matrix(x_vec(j) @ sys.p(n).transpose(), f)
                assert z.is_zero, (ref, n, j)
            assert det_exact(sys.gram(n)) != 0, (ref, n)


def test_gradient_stack_shapes_and_values():
    sys = build_monic(builtin("product_hermite"), 3)
    q11 = sys.q(1, 1)
    assert q11.shape == (2, 3)
    assert q11 == PolyMatrix.from_rows(
        [[parse_poly("2*x"), parse_poly("y"), 0], [0, parse_poly("x"), parse_poly("2*y")]]
    )
    assert sys.q(2, 0) == sys.p(2).transpose()
    q02 = sys.q(0, 2)
    assert q02.shape == (4, 3)
    # all four second partials of the degree-2 entries, constant
    assert q02.degree == 0
    with pytest.raises(ValueError):
        sys.q(3, 1)


def test_g_lead_values():
    assert g_lead(2, 0) == PolyMatrix.identity(3)
    got = g_lead(1, 1)
    assert got == PolyMatrix.from_rows(
        [[2, 0, 0], [0, 1, 0], [0, 1, 0], [0, 0, 2]]
    )
    assert g_lead(0, 1).shape == (2, 2)
    assert g_lead(1, 2).shape == (8, 4)


def test_leading_block_matches_g_lead():
    # the extracted top coefficients of any gradient stack follow the
    # band recurrence, independent of the family
    for ref in ("product_hermite", "triangle(0,0,0)", "product_jacobi(0,0,0,0)"):
        sys = build_monic(builtin(ref), 4)
        for m in range(3):
            for n in range(4 - m):
                q = sys.q(n, m)
                assert leading_block(q, n) == g_lead(n, m), (ref, n, m)


def test_gradient_orthogonality_exact():
    f = builtin("product_hermite")
    sys = build_monic(f, 4)
    for m in (1, 2):
        for n in range(1, 4 - m + 1):
            for k in range(n):
                z = inner(sys.q(k, m), sys.q(n, m), m, f)
                assert z.is_zero, (n, m, k)
            h = inner(sys.q(n, m), sys.q(n, m), m, f)
            assert det_exact(h) != 0


def test_inner_numeric_matches_exact():
    f = builtin("product_jacobi(0,0,0,0)")
    sys = build_monic(f, 4)
    rule = make_quadrature(f, 12)
    for n, m in ((1, 0), (2, 1), (1, 2)):
        a = sys.q(n, m)
        exact = inner(a, a, m, f, mode="exact")
        num = inner(a, a, m, f, mode="numeric", rule=rule)
        ex = np.array([[float(v) for v in row] for row in exact.const_entries()])
        scale = max(1.0, np.max(np.abs(ex)))
        assert np.max(np.abs(num - ex)) <= 1e-10 * scale, (n, m)


def test_integrate_poly_normalization():
    f = builtin("product_laguerre(0,0)")
    assert integrate_poly(P.one(), f) == 1
    assert integrate_poly(parse_poly("x*y"), f) == 1
    assert integrate_poly(parse_poly("x^2 - 2*x"), f) == 0


def test_singular_gram_detected():
    # constant-1 moment table: the degree-1 block Gram [[1,1],[1,1]] per
    # blocks collapses once degree 2 couples repeated monomials
    doc = export_family(builtin("product_hermite"), moment_degree=0)
    doc["moments"] = [[i, j, "1"] for i in range(9) for j in range(9)]
    f = load_family(doc)
    with pytest.raises(SingularGramError):
        build_monic(f, 2)


def test_build_monic_guard():
    with pytest.raises(ValueError):
        build_monic(builtin("product_hermite"), -1)
