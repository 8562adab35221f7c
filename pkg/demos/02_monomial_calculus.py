"""Constant matrices that implement calculus on monomial vectors.

The degree-n monomial vector X_n = (x^n, x^(n-1) y, ..., y^n)^t turns
multiplication by x or y and partial differentiation into constant
matrix products.  Stacked variants of those matrices drive every
eigenvalue formula later on, so this demo shows the raw identities.
"""
import random

from copoly2d.basisops import (
    IDENTITY_KEYS,
    identity_suite,
    l_mat,
    n_mat,
    stacked,
    starred,
    x_vec,
)


def main():
    n = 3
    xs = x_vec(n)
    print("X_3 entries:", [p.to_text() for p in (xs[i, 0] for i in range(n + 1))])

    lx = l_mat(n, 1)
    print("shift matrix for x has shape", lx.shape)
    shifted = lx @ x_vec(n + 1)
    print("L X_4 rows:", [shifted[i, 0].to_text() for i in range(n + 1)],
          " (this is x * X_3)")

    dx = n_mat(n, 1)
    print("derivative matrix for x has shape", dx.shape)
    print("N X_3 rows:", [(dx @ xs)[i, 0].to_text() for i in range(n)],
          " (this is d/dx X_3 without its zero entry)")

    pair = stacked(n)
    print("stacked shift shape:", pair.L.shape, " stacked derivative shape:", pair.N.shape)
    star = starred(n, 2)
    print("level-2 starred shapes:", star.L.shape, star.N.shape)

    # the full identity suite ties all of these together; every check
    # is an exact matrix equality
    rng = random.Random(0)
    results = identity_suite(4, 2, rng, sandwich_draws=3)
    width = max(len(k) for k in IDENTITY_KEYS)
    for key in IDENTITY_KEYS:
        if key in results:
            print(f"{key:<{width}s} : {'ok' if results[key] else 'BROKEN'}")


if __name__ == "__main__":
    main()
