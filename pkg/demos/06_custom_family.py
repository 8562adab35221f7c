"""Defining a weight family of your own from a JSON document.

The verification layer never evaluates the weight function.  Everything
it needs is Pearson data (phi, psi1, psi2, the logarithmic gradient)
plus a table of normalized moments, so a family is just a JSON
document.  Here we build the round Gaussian exp(-(x^2+y^2)/2), whose
normalized one-dimensional moments are the odd double factorials:

    E[x^(2j)] = (2j - 1)!!       E[x^(2j+1)] = 0

With phi the identity matrix this weight passes every property on the
grid, exactly like the built-in product_hermite (which is the same
weight with x, y scaled by sqrt(2)).

The same document saved to disk works on the command line:

    copoly2d verify --family my_family.json
"""
import json
import tempfile
from fractions import Fraction

from copoly2d.characterize import verify_all
from copoly2d.weights import FamilyLoadError, load_family


def double_factorial_moment(k: int) -> Fraction:
    """E[x^k] for the standard Gaussian: 0 for odd k, (k-1)!! for even."""
    if k % 2:
        return Fraction(0)
    out = Fraction(1)
    for t in range(1, k, 2):
        out *= t
    return out


def gaussian_doc(moment_degree: int = 24) -> dict:
    table = []
    for d in range(moment_degree + 1):
        for i in range(d + 1):
            m = double_factorial_moment(i) * double_factorial_moment(d - i)
            table.append([i, d - i, str(m)])
    return {
        "name": "round_gaussian",
        "phi": [["1", "0"], ["0", "1"]],
        "psi1": "-x",
        "psi2": "-y",
        "log_grad_x": {"num": "-x", "den": "1"},
        "log_grad_y": {"num": "-y", "den": "1"},
        "domain": {"kind": "plane", "params": []},
        "moments": table,
    }


def main():
    doc = gaussian_doc()

    # load_family takes a dict, a JSON string, or a path; show all three
    fam = load_family(doc)
    fam2 = load_family(json.dumps(doc))
    with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
        json.dump(doc, fh)
        path = fh.name
    fam3 = load_family(path)
    print("loaded:", fam.name, "on the", fam.domain.kind)
    assert fam2.name == fam3.name == fam.name

    print("moment (2,0):", fam.moment(2, 0))   # variance 1
    print("moment (4,2):", fam.moment(4, 2))   # 3!! * 1!! = 3
    print("moment (3,1):", fam.moment(3, 1))   # odd, vanishes

    reports = verify_all(fam, nmax=3, mmax=2,
                         properties=("a", "b", "c", "d", "e"))
    worst = [r for r in reports if r.status != "pass"]
    print(f"verification: {len(reports) - len(worst)}/{len(reports)} cells pass")
    for r in worst:
        print(f"  {r.property} at n={r.n} m={r.m}: {r.notes}")

    # validation rejects malformed documents before any math runs
    bad = gaussian_doc()
    bad["phi"] = [["1", "x"], ["0", "1"]]
    try:
        load_family(bad)
    except FamilyLoadError as exc:
        print("rejected asymmetric phi:", exc.args[0])


if __name__ == "__main__":
    main()
