"""Weight families: Pearson data, exact moment oracles and quadrature.

A weight family packages everything the verification layer needs about a
weight function rho on a planar domain without ever materializing rho
itself: the symmetric 2x2 polynomial matrix phi, the drift polynomials
psi1/psi2 from the divergence identity div(rho phi) = rho (psi1, psi2),
the logarithmic gradient (dx rho / rho, dy rho / rho) as exact rational
functions, a normalized moment oracle (i, j) -> mu_ij / mu_00, and a
Gauss quadrature factory for the domain.

Built-in families:

  product_hermite             exp(-x^2-y^2) on the plane
  product_laguerre(a, b)      x^a y^b exp(-x-y) on the open quadrant
  hermite_laguerre(a)         exp(-x^2) y^a exp(-y) on a half plane
  product_jacobi(a, b, c, d)  (1-x)^a (1+x)^b (1-y)^c (1+y)^d on the square
  triangle(a, b, c)           x^a y^b (1-x-y)^c on the unit simplex

Moment oracles are exact Fractions whenever the parameters are rational,
which lets every downstream orthogonality check run in exact arithmetic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .matpoly import PolyMatrix, const_matrix, det_exact
from .polycore import BivariatePoly, RationalFn, parse_poly


class UnknownFamilyError(KeyError):
    """Family name not in the built-in registry."""


class InvalidParameterError(ValueError):
    """Family parameters outside the admissible range."""


class OracleUnavailableError(RuntimeError):
    """No exact moment value exists for the request; fall back to quadrature."""


class FamilyLoadError(ValueError):
    """A family definition file failed validation."""


DOMAIN_KINDS = {
    "plane": 0,
    "quadrant": 2,
    "halfplane_x_quadrant": 1,
    "square": 4,
    "triangle": 3,
}


@dataclass(frozen=True)
class Domain:
    kind: str
    params: tuple

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise FamilyLoadError(f"unknown domain kind {self.kind!r}")
        if len(self.params) != DOMAIN_KINDS[self.kind]:
            raise FamilyLoadError(
                f"domain {self.kind!r} takes {DOMAIN_KINDS[self.kind]} parameters, "
                f"got {len(self.params)}"
            )


@dataclass(frozen=True)
class QuadRule:
    """Tensor Gauss rule; weights are normalized so they sum to one.

    Sums of w * f(x, y) therefore approximate integral(f rho) / mu_00,
    exactly (up to roundoff) for polynomial f of total degree at most
    2 * order - 1.
    """

    nodes_x: np.ndarray
    nodes_y: np.ndarray
    weights: np.ndarray
    order: int

    def integrate(self, fn) -> float:
        return float(np.sum(self.weights * fn(self.nodes_x, self.nodes_y)))


@dataclass(frozen=True, eq=False)
class WeightFamily:
    """Pearson data and oracles for one weight on one domain."""

    name: str
    phi: PolyMatrix
    psi1: BivariatePoly
    psi2: BivariatePoly
    log_grad_x: RationalFn
    log_grad_y: RationalFn
    domain: Domain
    params: tuple = ()
    moment_fn: Optional[Callable[[int, int], Fraction]] = None
    boundary_assumed: bool = True
    _mcache: dict = field(default_factory=dict, repr=False, compare=False, init=False)

    # -- drift structure ------------------------------------------------

    def d_matrix(self) -> PolyMatrix:
        """2x2 constant matrix whose columns are the linear parts of psi1, psi2."""
        return const_matrix(
            [[self.psi1.coeff(1, 0), self.psi2.coeff(1, 0)],
             [self.psi1.coeff(0, 1), self.psi2.coeff(0, 1)]]
        )

    def e_consts(self):
        return (self.psi1.coeff(0, 0), self.psi2.coeff(0, 0))

    def has_oracle(self) -> bool:
        return self.moment_fn is not None

    def moment(self, i: int, j: int) -> Fraction:
        """Normalized moment mu_ij / mu_00, exact."""
        if i < 0 or j < 0:
            raise ValueError("moment indices must be nonnegative")
        if self.moment_fn is None:
            raise OracleUnavailableError(f"{self.name}: no exact moment oracle")
        key = (i, j)
        v = self._mcache.get(key)
        if v is None:
            v = self.moment_fn(i, j)
            self._mcache[key] = v
        return v


# ---------------------------------------------------------------------------
# small exact helpers


def _poch(a: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for t in range(k):
        out *= a + t
    return out


def _hermite_m(k: int) -> Fraction:
    # integral x^k exp(-x^2) / integral exp(-x^2): odd vanish, (2j-1)!!/2^j
    if k % 2:
        return Fraction(0)
    j = k // 2
    out = Fraction(1)
    for t in range(1, j + 1):
        out *= Fraction(2 * t - 1, 2)
    return out


def _laguerre_m(k: int, a: Fraction) -> Fraction:
    return _poch(a + 1, k)


def _jacobi_m(k: int, a: Fraction, b: Fraction) -> Fraction:
    # moment of (1-x)^a (1+x)^b on (-1,1) via the shifted Beta expansion
    out = Fraction(0)
    for r in range(k + 1):
        out += (
            Fraction(math.comb(k, r))
            * Fraction(2) ** r
            * Fraction(-1) ** (k - r)
            * _poch(b + 1, r) / _poch(a + b + 2, r)
        )
    return out


def _as_params(params) -> tuple:
    return tuple(Fraction(p) for p in params)


def _require_gt(params, bound, what):
    for p in params:
        if p <= bound:
            raise InvalidParameterError(f"{what} parameters must exceed {bound}, got {p}")


# ---------------------------------------------------------------------------
# built-in registry


def _build_product_hermite(params) -> WeightFamily:
    if params:
        raise InvalidParameterError("product_hermite takes no parameters")
    two_x = parse_poly("-2*x")
    two_y = parse_poly("-2*y")
    return WeightFamily(
        name="product_hermite",
        phi=PolyMatrix.identity(2),
        psi1=two_x,
        psi2=two_y,
        log_grad_x=RationalFn(two_x),
        log_grad_y=RationalFn(two_y),
        domain=Domain("plane", ()),
        params=(),
        moment_fn=lambda i, j: _hermite_m(i) * _hermite_m(j),
    )


def _build_product_laguerre(params) -> WeightFamily:
    a, b = _as_params(params)
    _require_gt((a, b), -1, "product_laguerre")
    x, y = BivariatePoly.x(), BivariatePoly.y()
    return WeightFamily(
        name="product_laguerre",
        phi=PolyMatrix.from_rows([[x, 0], [0, y]]),
        psi1=BivariatePoly.const(a + 1) - x,
        psi2=BivariatePoly.const(b + 1) - y,
        log_grad_x=RationalFn(BivariatePoly.const(a) - x, x),
        log_grad_y=RationalFn(BivariatePoly.const(b) - y, y),
        domain=Domain("quadrant", (a, b)),
        params=(a, b),
        moment_fn=lambda i, j: _laguerre_m(i, a) * _laguerre_m(j, b),
    )


def _build_hermite_laguerre(params) -> WeightFamily:
    (a,) = _as_params(params)
    _require_gt((a,), -1, "hermite_laguerre")
    x, y = BivariatePoly.x(), BivariatePoly.y()
    return WeightFamily(
        name="hermite_laguerre",
        phi=PolyMatrix.from_rows([[1, 0], [0, y]]),
        psi1=parse_poly("-2*x"),
        psi2=BivariatePoly.const(a + 1) - y,
        log_grad_x=RationalFn(parse_poly("-2*x")),
        log_grad_y=RationalFn(BivariatePoly.const(a) - y, y),
        domain=Domain("halfplane_x_quadrant", (a,)),
        params=(a,),
        moment_fn=lambda i, j: _hermite_m(i) * _laguerre_m(j, a),
    )


def _build_product_jacobi(params) -> WeightFamily:
    a, b, c, d = _as_params(params)
    _require_gt((a, b, c, d), -1, "product_jacobi")
    x, y = BivariatePoly.x(), BivariatePoly.y()
    one = BivariatePoly.one()
    phi11 = one - x * x
    phi22 = one - y * y
    return WeightFamily(
        name="product_jacobi",
        phi=PolyMatrix.from_rows([[phi11, 0], [0, phi22]]),
        psi1=BivariatePoly.const(b - a) - (a + b + 2) * x,
        psi2=BivariatePoly.const(d - c) - (c + d + 2) * y,
        log_grad_x=RationalFn(BivariatePoly.const(b - a) - (a + b) * x, phi11),
        log_grad_y=RationalFn(BivariatePoly.const(d - c) - (c + d) * y, phi22),
        domain=Domain("square", (a, b, c, d)),
        params=(a, b, c, d),
        moment_fn=lambda i, j: _jacobi_m(i, a, b) * _jacobi_m(j, c, d),
    )


def _build_triangle(params) -> WeightFamily:
    a, b, c = _as_params(params)
    _require_gt((a, b, c), -1, "triangle")
    x, y = BivariatePoly.x(), BivariatePoly.y()
    one = BivariatePoly.one()
    rim = one - x - y  # vanishes on the slanted edge
    s = a + b + c + 3
    return WeightFamily(
        name="triangle",
        phi=PolyMatrix.from_rows([[x * (one - x), -(x * y)], [-(x * y), y * (one - y)]]),
        psi1=BivariatePoly.const(a + 1) - s * x,
        psi2=BivariatePoly.const(b + 1) - s * y,
        log_grad_x=RationalFn(BivariatePoly.const(a) * rim - c * x, x * rim),
        log_grad_y=RationalFn(BivariatePoly.const(b) * rim - c * y, y * rim),
        domain=Domain("triangle", (a, b, c)),
        params=(a, b, c),
        moment_fn=lambda i, j: _poch(a + 1, i) * _poch(b + 1, j) / _poch(s, i + j),
    )


_BUILTINS = {
    "product_hermite": (_build_product_hermite, 0, "plane"),
    "product_laguerre": (_build_product_laguerre, 2, "quadrant"),
    "hermite_laguerre": (_build_hermite_laguerre, 1, "halfplane_x_quadrant"),
    "product_jacobi": (_build_product_jacobi, 4, "square"),
    "triangle": (_build_triangle, 3, "triangle"),
}


def parse_family_ref(ref: str):
    """Split 'name' or 'name(p1,p2)' into (name, params tuple of str)."""
    ref = ref.strip()
    if "(" in ref:
        if not ref.endswith(")"):
            raise UnknownFamilyError(f"malformed family reference {ref!r}")
        name, body = ref[:-1].split("(", 1)
        params = tuple(s for s in (t.strip() for t in body.split(",")) if s)
        return name.strip(), params
    return ref, ()


def builtin(name: str, params=()) -> WeightFamily:
    """Construct a built-in family; name may carry parameters inline."""
    base, inline = parse_family_ref(name)
    if inline:
        if params:
            raise InvalidParameterError("parameters given twice")
        params = inline
    if base not in _BUILTINS:
        raise UnknownFamilyError(f"unknown family {base!r}; see list_builtins()")
    maker, nparams, _ = _BUILTINS[base]
    try:
        params = _as_params(params)
    except (ValueError, ZeroDivisionError) as exc:
        raise InvalidParameterError(f"unparseable parameters {params!r}") from exc
    if len(params) != nparams:
        raise InvalidParameterError(
            f"{base} takes {nparams} parameters, got {len(params)}"
        )
    f = maker(params)
    validate_family(f)
    return f


def list_builtins():
    """(name, parameter count, domain kind) for every built-in family."""
    return [(name, spec[1], spec[2]) for name, spec in sorted(_BUILTINS.items())]


# ---------------------------------------------------------------------------
# structural checks


def check_pearson(f: WeightFamily) -> bool:
    """Exact test of div(rho phi) = rho (psi1, psi2), divided through by rho.

    Column j of the identity reads
    phi_1j * gx + phi_2j * gy + dx phi_1j + dy phi_2j = psi_j
    with (gx, gy) the logarithmic gradient, compared as rational functions.
    """
    gx, gy = f.log_grad_x, f.log_grad_y
    for j, psi in ((0, f.psi1), (1, f.psi2)):
        lhs = (
            gx * f.phi[0, j] + gy * f.phi[1, j]
            + f.phi[0, j].dx() + f.phi[1, j].dy()
        )
        if not lhs == RationalFn(psi):
            return False
    return True


def _grad_cols(p: BivariatePoly, q: BivariatePoly) -> PolyMatrix:
    # 2x2 matrix of partials with columns indexed by (p, q)
    return PolyMatrix.from_rows([[p.dx(), q.dx()], [p.dy(), q.dy()]])


def check_phi_conditions(f: WeightFamily) -> bool:
    """Differential compatibility of phi with its own columns.

    For each column (phi_1j, phi_2j) the matrix identity
    phi_1j * dx(phi) + phi_2j * dy(phi) = phi @ grad_cols(phi_1j, phi_2j)
    must hold exactly.
    """
    phix, phiy = f.phi.dx(), f.phi.dy()
    for j in (0, 1):
        p, q = f.phi[0, j], f.phi[1, j]
        lhs = phix.scale(p) + phiy.scale(q)
        if lhs != f.phi @ _grad_cols(p, q):
            return False
    return True


def validate_family(f: WeightFamily) -> None:
    """Structural invariants: shape, symmetry, degree bounds, drift rank."""
    if f.phi.shape != (2, 2):
        raise FamilyLoadError("phi must be 2x2")
    if f.phi[0, 1] != f.phi[1, 0]:
        raise FamilyLoadError("phi must be symmetric")
    if f.phi.degree > 2:
        raise FamilyLoadError("phi entries must have degree <= 2")
    for nm, p in (("psi1", f.psi1), ("psi2", f.psi2)):
        if p.total_degree > 1:
            raise FamilyLoadError(f"{nm} must have degree <= 1")
    if det_exact(f.d_matrix()) == 0:
        raise FamilyLoadError("drift matrix (D1, D2) is singular")
    if f.moment_fn is not None and f.moment(0, 0) != 1:
        raise FamilyLoadError("normalized moment (0,0) must equal 1")


# ---------------------------------------------------------------------------
# quadrature


def _golub_welsch(diag, offdiag) -> tuple:
    q = len(diag)
    jm = np.zeros((q, q))
    for i in range(q):
        jm[i, i] = diag[i]
    for i in range(q - 1):
        jm[i, i + 1] = jm[i + 1, i] = offdiag[i]
    vals, vecs = np.linalg.eigh(jm)
    return vals, vecs[0, :] ** 2


def gauss_hermite_1d(order: int):
    diag = [0.0] * order
    off = [math.sqrt(k / 2.0) for k in range(1, order)]
    return _golub_welsch(diag, off)


def gauss_laguerre_1d(order: int, a: float):
    diag = [2 * k + a + 1 for k in range(order)]
    off = [math.sqrt(k * (k + a)) for k in range(1, order)]
    return _golub_welsch(diag, off)


def gauss_jacobi_1d(order: int, a: float, b: float):
    diag = []
    for k in range(order):
        if k == 0:
            diag.append((b - a) / (a + b + 2))
        else:
            s = 2 * k + a + b
            diag.append((b * b - a * a) / (s * (s + 2)))
    off = []
    for k in range(1, order):
        if k == 1:
            v = 4 * (1 + a) * (1 + b) / ((2 + a + b) ** 2 * (3 + a + b))
        else:
            s = 2 * k + a + b
            v = 4 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1) * (s - 1))
        off.append(math.sqrt(v))
    return _golub_welsch(diag, off)


def _tensor_rule(xs, wx, ys, wy, order: int) -> QuadRule:
    nx = np.repeat(xs, len(ys))
    ny = np.tile(ys, len(xs))
    w = np.repeat(wx, len(ys)) * np.tile(wy, len(xs))
    return QuadRule(nodes_x=nx, nodes_y=ny, weights=w, order=order)


def make_quadrature(f: WeightFamily, order: int) -> QuadRule:
    """Gauss rule matched to the family's domain and parameters."""
    if order < 1:
        raise InvalidParameterError("quadrature order must be >= 1")
    kind = f.domain.kind
    p = [float(v) for v in f.domain.params]
    if kind == "plane":
        xs, wx = gauss_hermite_1d(order)
        ys, wy = gauss_hermite_1d(order)
    elif kind == "quadrant":
        xs, wx = gauss_laguerre_1d(order, p[0])
        ys, wy = gauss_laguerre_1d(order, p[1])
    elif kind == "halfplane_x_quadrant":
        xs, wx = gauss_hermite_1d(order)
        ys, wy = gauss_laguerre_1d(order, p[0])
    elif kind == "square":
        xs, wx = gauss_jacobi_1d(order, p[0], p[1])
        ys, wy = gauss_jacobi_1d(order, p[2], p[3])
    elif kind == "triangle":
        a, b, c = p
        tu, wu = gauss_jacobi_1d(order, b + c + 1, a)
        tv, wv = gauss_jacobi_1d(order, c, b)
        u = (1 + tu) / 2
        v = (1 + tv) / 2
        # collapsed-square map x = u, y = v (1 - u); weights already absorb
        # the Jacobian because the u rule carries the extra (1 - u) power
        nx = np.repeat(u, order)
        vv = np.tile(v, order)
        ny = vv * (1 - nx)
        w = np.repeat(wu, order) * np.tile(wv, order)
        return QuadRule(nodes_x=nx, nodes_y=ny, weights=w, order=order)
    else:  # pragma: no cover - Domain guards kinds
        raise FamilyLoadError(f"no quadrature for domain {kind!r}")
    return _tensor_rule(xs, wx, ys, wy, order)


# ---------------------------------------------------------------------------
# family definition files


def _rf_to_dict(rf: RationalFn) -> dict:
    return {"num": rf.num.to_text(), "den": rf.den.to_text()}


def export_family(f: WeightFamily, moment_degree: int = 24) -> dict:
    """Serializable definition; moments tabulated up to the given degree."""
    doc = {
        "name": f.name,
        "phi": [[f.phi[i, j].to_text() for j in (0, 1)] for i in (0, 1)],
        "psi1": f.psi1.to_text(),
        "psi2": f.psi2.to_text(),
        "log_grad_x": _rf_to_dict(f.log_grad_x),
        "log_grad_y": _rf_to_dict(f.log_grad_y),
        "domain": {"kind": f.domain.kind, "params": [str(v) for v in f.domain.params]},
    }
    if f.moment_fn is not None:
        table = []
        for d in range(moment_degree + 1):
            for i in range(d + 1):
                table.append([i, d - i, str(f.moment(i, d - i))])
        doc["moments"] = table
    return doc


def _parse_rf(obj, label: str) -> RationalFn:
    if not isinstance(obj, dict) or set(obj) != {"num", "den"}:
        raise FamilyLoadError(f"{label} must be an object with num and den")
    try:
        return RationalFn(parse_poly(obj["num"]), parse_poly(obj["den"]))
    except (ValueError, ZeroDivisionError) as exc:
        raise FamilyLoadError(f"bad {label}: {exc}") from exc


def load_family(source) -> WeightFamily:
    """Load a family from a dict, a JSON string, or a file path."""
    if isinstance(source, dict):
        doc = source
    else:
        text = str(source)
        if text.lstrip().startswith("{"):
            doc = json.loads(text)
        else:
            with open(text, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
    required = {"name", "phi", "psi1", "psi2", "log_grad_x", "log_grad_y", "domain"}
    missing = required - set(doc)
    if missing:
        raise FamilyLoadError(f"missing fields: {sorted(missing)}")
    try:
        phi_rows = doc["phi"]
        phi = PolyMatrix.from_rows(
            [[parse_poly(phi_rows[i][j]) for j in (0, 1)] for i in (0, 1)]
        )
        psi1 = parse_poly(doc["psi1"])
        psi2 = parse_poly(doc["psi2"])
    except (ValueError, IndexError, TypeError) as exc:
        raise FamilyLoadError(f"bad polynomial field: {exc}") from exc
    dom = doc["domain"]
    if not isinstance(dom, dict) or "kind" not in dom:
        raise FamilyLoadError("domain must carry a kind")
    try:
        domain = Domain(str(dom["kind"]), _as_params(dom.get("params", ())))
    except (ValueError, ZeroDivisionError) as exc:
        raise FamilyLoadError(f"bad domain parameters: {exc}") from exc

    moment_fn = None
    if "moments" in doc:
        table = {}
        try:
            for i, j, v in doc["moments"]:
                table[(int(i), int(j))] = Fraction(v)
        except (ValueError, TypeError) as exc:
            raise FamilyLoadError(f"bad moments table: {exc}") from exc

        def moment_fn(i, j, _table=table):
            try:
                return _table[(i, j)]
            except KeyError:
                raise OracleUnavailableError(
                    f"moment ({i},{j}) beyond the tabulated degree"
                ) from None

    f = WeightFamily(
        name=str(doc["name"]),
        phi=phi,
        psi1=psi1,
        psi2=psi2,
        log_grad_x=_parse_rf(doc["log_grad_x"], "log_grad_x"),
        log_grad_y=_parse_rf(doc["log_grad_y"], "log_grad_y"),
        domain=domain,
        params=domain.params,
        moment_fn=moment_fn,
    )
    try:
        validate_family(f)
    except OracleUnavailableError as exc:
        raise FamilyLoadError(f"moments table too shallow: {exc}") from exc
    return f
