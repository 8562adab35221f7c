"""Monic vector orthogonal systems and their gradient stacks.

P_n is a column of n+1 monic degree-n polynomials orthogonal to all
lower degrees.  Stacking m-fold gradients of P_{n+m} gives the matrix
Q_{n,m}, and a classical weight keeps those stacks orthogonal for the
Kronecker-power weight phi^(x)m.  Everything here is exact.
"""
from copoly2d.matpoly import det_exact
from copoly2d.orthosys import build_monic, g_lead, inner
from copoly2d.weights import builtin


def main():
    f = builtin("product_jacobi(0,0,0,0)")
    sys = build_monic(f, 5)

    p2 = sys.p(2)
    print("P_2 entries:")
    for i in range(3):
        print("  ", p2[i, 0].to_text())

    gram = sys.gram(2)
    print("block Gram matrix of P_2 is diagonal with entries:",
          [str(gram[i, i].constant_value()) for i in range(3)])

    # cross inner products with every lower degree vanish identically
    away = inner(sys.q(0, 0), sys.q(2, 0), 0, f)
    print("inner(P_0, P_2) is zero:", away.is_zero)

    # gradient stacks: Q_{1,1} stacks the two partials of P_2
    q11 = sys.q(1, 1)
    print("Q_{1,1} shape:", q11.shape)
    cross = inner(sys.q(0, 1), q11, 1, f)
    print("level-1 stacks of different degree are orthogonal:", cross.is_zero)
    level_gram = inner(q11, q11, 1, f)
    print("level-1 Gram determinant nonzero:", det_exact(level_gram) != 0)

    lead = g_lead(1, 1)
    print("leading block of Q_{1,1} has shape", lead.shape,
          "and full column rank by construction")


if __name__ == "__main__":
    main()
