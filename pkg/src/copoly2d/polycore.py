"""Exact arithmetic for sparse bivariate polynomials and rational functions.

A polynomial is a dictionary mapping exponent pairs (i, j) to nonzero
Fraction coefficients and represents ``sum c_ij * x^i * y^j``.  Everything
in this module is exact; no floating point enters unless the caller asks
for a float evaluation.  Rational functions are kept as unreduced
numerator/denominator pairs and compared by cross multiplication, which
avoids bivariate gcd computations entirely.
"""

from __future__ import annotations

import re
from fractions import Fraction

NEG_INF = float("-inf")

_TERM_SPLIT = re.compile(r"(?=[+-])")
_NUM_RE = re.compile(r"^[+-]?(\d+(/\d+)?|\d*\.\d+)$")
_VAR_RE = re.compile(r"^([xy])(?:\^(\d+))?$")


class ZeroDenominatorError(ZeroDivisionError):
    """Raised when a rational function is built over the zero polynomial."""


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not an exact scalar: {c!r}")


class BivariatePoly:
    """Immutable sparse bivariate polynomial with Fraction coefficients.

    Instances should be built through the classmethods or module helpers;
    the constructor trusts its input dictionary to be canonical (no zero
    coefficients, nonnegative integer exponents).
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict):
        object.__setattr__(self, "terms", terms)

    def __setattr__(self, name, value):
        raise AttributeError("BivariatePoly is immutable")

    # -- construction -------------------------------------------------

    @classmethod
    def from_terms(cls, mapping) -> "BivariatePoly":
        """Build from any {(i, j): coeff} mapping, dropping zero entries."""
        out = {}
        for (i, j), c in dict(mapping).items():
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent in term ({i}, {j})")
            c = _as_fraction(c)
            if c != 0:
                out[(int(i), int(j))] = c
        return cls(out)

    @classmethod
    def zero(cls) -> "BivariatePoly":
        return cls({})

    @classmethod
    def one(cls) -> "BivariatePoly":
        return cls({(0, 0): Fraction(1)})

    @classmethod
    def const(cls, c) -> "BivariatePoly":
        c = _as_fraction(c)
        return cls({(0, 0): c} if c != 0 else {})

    @classmethod
    def x(cls) -> "BivariatePoly":
        return cls({(1, 0): Fraction(1)})

    @classmethod
    def y(cls) -> "BivariatePoly":
        return cls({(0, 1): Fraction(1)})

    @classmethod
    def monomial(cls, i: int, j: int, c=1) -> "BivariatePoly":
        c = _as_fraction(c)
        if i < 0 or j < 0:
            raise ValueError("negative exponent")
        return cls({(i, j): c} if c != 0 else {})

    # -- queries -------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self):
        """max(i + j) over stored terms; -inf sentinel for the zero polynomial."""
        if not self.terms:
            return NEG_INF
        return max(i + j for (i, j) in self.terms)

    def coeff(self, i: int, j: int) -> Fraction:
        return self.terms.get((i, j), Fraction(0))

    def constant_value(self) -> Fraction:
        """The value of a degree <= 0 polynomial; rejects anything else."""
        if self.total_degree > 0:
            raise ValueError(f"not a constant: {self}")
        return self.coeff(0, 0)

    # -- arithmetic ----------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s == 0:
                    del out[e]
                else:
                    out[e] = s
        return BivariatePoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BivariatePoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                return BivariatePoly({})
            return BivariatePoly({e: c * v for e, v in self.terms.items()})
        if isinstance(other, BivariatePoly):
            out: dict = {}
            _mul_into(out, self.terms, other.terms)
            return BivariatePoly({e: c for e, c in out.items() if c != 0})
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                raise ZeroDivisionError("division of polynomial by zero scalar")
            return self * (Fraction(1) / c)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = BivariatePoly.one()
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    # -- calculus ------------------------------------------------------

    def dx(self) -> "BivariatePoly":
        out = {}
        for (i, j), c in self.terms.items():
            if i > 0:
                out[(i - 1, j)] = c * i
        return BivariatePoly(out)

    def dy(self) -> "BivariatePoly":
        out = {}
        for (i, j), c in self.terms.items():
            if j > 0:
                out[(i, j - 1)] = c * j
        return BivariatePoly(out)

    # -- evaluation ----------------------------------------------------

    def eval_exact(self, x0, y0) -> Fraction:
        x0 = _as_fraction(x0)
        y0 = _as_fraction(y0)
        total = Fraction(0)
        for (i, j), c in self.terms.items():
            total += c * x0**i * y0**j
        return total

    def eval_float(self, x0, y0):
        """Evaluate at floats or numpy arrays; returns the same shape."""
        total = 0.0 * (x0 + y0)
        for (i, j), c in self.terms.items():
            total = total + float(c) * x0**i * y0**j
        return total

    # -- text ----------------------------------------------------------

    def to_text(self) -> str:
        """Render as a sum of c*x^i*y^j terms parseable by parse_poly."""
        if not self.terms:
            return "0"
        parts = []
        for (i, j) in sorted(self.terms, key=lambda e: (-(e[0] + e[1]), -e[0])):
            c = self.terms[(i, j)]
            factors = []
            if i == 1:
                factors.append("x")
            elif i > 1:
                factors.append(f"x^{i}")
            if j == 1:
                factors.append("y")
            elif j > 1:
                factors.append(f"y^{j}")
            if not factors:
                body = str(c)
            elif c == 1:
                body = "*".join(factors)
            elif c == -1:
                body = "-" + "*".join(factors)
            else:
                body = str(c) + "*" + "*".join(factors)
            if parts and not body.startswith("-"):
                parts.append("+" + body)
            else:
                parts.append(body)
        return "".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"BivariatePoly({self.to_text()!r})"


def _coerce(v):
    if isinstance(v, BivariatePoly):
        return v
    if isinstance(v, (int, Fraction)):
        return BivariatePoly.const(v)
    return NotImplemented


def _mul_into(acc: dict, ta: dict, tb: dict) -> None:
    # hot path shared with the matrix layer: accumulate ta*tb into acc
    for (ia, ja), ca in ta.items():
        for (ib, jb), cb in tb.items():
            e = (ia + ib, ja + jb)
            s = acc.get(e)
            acc[e] = ca * cb if s is None else s + ca * cb


ZERO = BivariatePoly.zero()
ONE = BivariatePoly.one()
X = BivariatePoly.x()
Y = BivariatePoly.y()


# ---------------------------------------------------------------------------
# parsing


def parse_poly(text: str) -> BivariatePoly:
    """Parse a sum of ``c*x^i*y^j`` terms.

    The coefficient is an optional integer, fraction (``-3/2``) or decimal
    (``0.5``); variable factors are ``x``, ``y``, ``x^k`` or ``y^k`` joined
    by ``*``.  Whitespace is ignored.  Examples: ``"x^2*y - 3/2"``,
    ``"-x*y + 2*y^2"``, ``"1"``.
    """
    s = "".join(text.split()).replace("**", "^")
    if not s:
        raise ValueError("empty polynomial text")
    total: dict = {}
    for raw in _TERM_SPLIT.split(s):
        if not raw or raw in "+-":
            if raw:
                raise ValueError(f"dangling sign in {text!r}")
            continue
        sign = Fraction(1)
        body = raw
        if body[0] == "+":
            body = body[1:]
        elif body[0] == "-":
            sign = Fraction(-1)
            body = body[1:]
        if not body:
            raise ValueError(f"dangling sign in {text!r}")
        coeff = sign
        i = j = 0
        for factor in body.split("*"):
            if not factor:
                raise ValueError(f"empty factor in term {raw!r}")
            if _NUM_RE.match(factor):
                coeff *= Fraction(factor)
                continue
            m = _VAR_RE.match(factor)
            if not m:
                raise ValueError(f"cannot parse factor {factor!r} in {text!r}")
            k = int(m.group(2)) if m.group(2) is not None else 1
            if m.group(1) == "x":
                i += k
            else:
                j += k
        e = (i, j)
        prev = total.get(e)
        total[e] = coeff if prev is None else prev + coeff
    return BivariatePoly({e: c for e, c in total.items() if c != 0})


# ---------------------------------------------------------------------------
# rational functions


class RationalFn:
    """Quotient of two BivariatePoly values, held unreduced.

    Equality is tested by cross multiplication, so representatives never
    need a gcd pass.  The denominator must be a nonzero polynomial.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: BivariatePoly, den: BivariatePoly = ONE):
        num = _coerce(num)
        den = _coerce(den)
        if num is NotImplemented or den is NotImplemented:
            raise TypeError("RationalFn needs polynomial or scalar parts")
        if den.is_zero:
            raise ZeroDenominatorError("zero denominator")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFn is immutable")

    @classmethod
    def from_poly(cls, p) -> "RationalFn":
        return cls(p, ONE)

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def __add__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RationalFn(self.num + other.num, self.den)
        return RationalFn(self.num * other.den + other.num * self.den,
                          self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den)

    def __sub__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, BivariatePoly)):
            other = _coerce(other)
            return RationalFn(self.num * other, self.den)
        if isinstance(other, RationalFn):
            return RationalFn(self.num * other.num, self.den * other.den)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        if other.num.is_zero:
            raise ZeroDenominatorError("division by zero rational function")
        return RationalFn(self.num * other.den, self.den * other.num)

    def __eq__(self, other):
        other = _coerce_rf(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num * other.den == other.num * self.den

    __hash__ = None

    def dx(self) -> "RationalFn":
        # (n/d)' = (n'd - nd')/d^2
        return RationalFn(self.num.dx() * self.den - self.num * self.den.dx(),
                          self.den * self.den)

    def dy(self) -> "RationalFn":
        return RationalFn(self.num.dy() * self.den - self.num * self.den.dy(),
                          self.den * self.den)

    def eval_exact(self, x0, y0) -> Fraction:
        d = self.den.eval_exact(x0, y0)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the point")
        return self.num.eval_exact(x0, y0) / d

    def __repr__(self):
        if self.den == ONE:
            return f"RationalFn({self.num.to_text()!r})"
        return f"RationalFn({self.num.to_text()!r}, {self.den.to_text()!r})"


def _coerce_rf(v):
    if isinstance(v, RationalFn):
        return v
    p = _coerce(v)
    if p is NotImplemented:
        return NotImplemented
    return RationalFn(p, ONE)


RF_ZERO = RationalFn(ZERO, ONE)
