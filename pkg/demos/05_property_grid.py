"""The five structural properties, including the ones that fail.

The checkers test five classical characterizations on a grid of
degrees n and derivative levels m:

  a  Pearson data: degree bounds and an invertible drift matrix
  b  gradient stacks stay orthogonal for the Kronecker-power weight
  c  each stack solves a second order equation with a CONSTANT
     eigenvalue matrix
  d  a Rodrigues-style divergence tower reconstructs P_n
  e  the weighted finer stack expands over three consecutive stacks

Property (c) above level zero needs the rows of a stack, which are
mixed partial derivatives, to share their one-dimensional eigenvalue
sums.  Hermite and Laguerre weights collapse those sums, the mixed
Hermite-Laguerre weight does not, and Jacobi weights stop collapsing
at level two; where the sums differ, NO constant matrix exists and the
checker reports exactly that.  Property (d) composes one level-(c)
identity per level, so it inherits the same obstructions.  Property
(e) above level zero asks the weighted stack to live inside the span
of coarser stacks, which already fails for a diagonal non-identity
weight matrix; level zero always works.  None of this is a tolerance
question: the checkers run in exact rational arithmetic and report the
insolvable linear systems.
"""
from copoly2d.characterize import verify_all
from copoly2d.weights import builtin


def show(ref: str, nmax: int = 3, mmax: int = 2) -> None:
    f = builtin(ref)
    reports = verify_all(f, nmax=nmax, mmax=mmax,
                         properties=("a", "b", "c", "d", "e"))
    passed = sum(1 for r in reports if r.status == "pass")
    print(f"\n{ref}: {passed}/{len(reports)} cells pass")
    for r in reports:
        if r.status != "pass":
            print(f"  {r.property} at n={r.n} m={r.m}: {r.notes}")


def main():
    show("product_hermite")        # identity weight matrix: everything passes
    show("product_laguerre(0,0)")  # only the expansion property fails, m >= 1
    show("hermite_laguerre(0)")    # eigenvalue sums break at level one
    show("product_jacobi(0,0,0,0)")  # eigenvalue sums break at level two


if __name__ == "__main__":
    main()
