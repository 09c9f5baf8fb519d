"""Concrete function fields: rational, odd-degree hyperelliptic and Hermitian.

Functions are formal products of a small dictionary of primitives
(``x - a``, ``y`` and Hermitian tangent lines).  Valuations come from closed
forms for each primitive, which is all the rook constructions need: every
generator they use has a known divisor.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field

from . import _upoly
from .errors import (
    BadHermitianField,
    CharacteristicTwoHyperelliptic,
    EvenDegreeUnsupported,
    IndeterminateForm,
    NotSquareFree,
    UnsupportedPlace,
    UnsupportedPrimitive,
)
from .galois import GF, field_from_order, field_make, prime_power

RATIONAL = "rational"
HYPERELLIPTIC = "hyperelliptic"
HERMITIAN = "hermitian"


# -- places -----------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Place:
    """A place of degree 1 (``inf``/``affine``) or 2 (``quad``).

    ``y`` is None on the rational curve.  A ``quad`` place sits over an ``x``
    where ``f(x)`` is a non-square on a hyperelliptic curve.
    """

    kind: str
    x: int | None = None
    y: int | None = None

    @property
    def degree(self):
        return 2 if self.kind == "quad" else 1

    @property
    def is_rational(self):
        return self.kind != "quad"

    @property
    def is_infinity(self):
        return self.kind == "inf"

    def sort_key(self):
        order = {"inf": 0, "affine": 1, "quad": 2}[self.kind]
        return (order, -1 if self.x is None else self.x, -1 if self.y is None else self.y)

    def serialize(self, F):
        if self.kind == "inf":
            return "inf"
        if self.kind == "quad":
            return f"quad:a={F.format(self.x)}"
        if self.y is None:
            return f"a={F.format(self.x)}"
        return f"a={F.format(self.x)},b={F.format(self.y)}"


INFINITY = Place("inf")


def parse_place(F, text):
    text = text.strip()
    if text == "inf":
        return INFINITY
    m = re.fullmatch(r"quad:a=([\d,]+)", text)
    if m:
        return Place("quad", F.parse(m.group(1)))
    m = re.fullmatch(r"a=([\d,]+?)(?:,b=([\d,]+))?", text)
    if not m:
        raise ValueError(f"bad place {text!r}")
    y = None if m.group(2) is None else F.parse(m.group(2))
    return Place("affine", F.parse(m.group(1)), y)


# -- functions --------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Primitive:
    kind: str          # "x-a", "y" or "tangent"
    a: int = 0
    b: int = 0

    def describe(self, F):
        if self.kind == "x-a":
            return "x" if self.a == 0 else f"(x-{F.format(self.a)})"
        if self.kind == "y":
            return "y"
        return f"T[{F.format(self.a)};{F.format(self.b)}]"


def X():
    return Primitive("x-a", 0)


def Y():
    return Primitive("y")


def XminusA(a):
    return Primitive("x-a", int(a))


def TangentAt(a, b):
    """``y - b - a^q0 (x - a)`` on the Hermitian curve."""
    return Primitive("tangent", int(a), int(b))


@dataclass(frozen=True)
class FunctionExpr:
    """``scalar * prod(prim ** exp)`` with distinct primitives and nonzero exponents."""

    field: GF
    scalar: int = 1
    factors: tuple = ()

    def __post_init__(self):
        if self.scalar == 0:
            raise ValueError("FunctionExpr scalar must be nonzero")

    @classmethod
    def const(cls, F, c=1):
        return cls(F, F.coerce(c))

    @classmethod
    def of(cls, F, prim, exp=1):
        return cls(F, 1, ((prim, int(exp)),) if exp else ())

    @staticmethod
    def _merge(*groups):
        acc = {}
        for group in groups:
            for prim, e in group:
                acc[prim] = acc.get(prim, 0) + e
        return tuple(sorted((p, e) for p, e in acc.items() if e != 0))

    def __mul__(self, other):
        if not isinstance(other, FunctionExpr):
            return FunctionExpr(self.field, self.field.mul(self.scalar, self.field.coerce(other)),
                                self.factors)
        return FunctionExpr(self.field, self.field.mul(self.scalar, other.scalar),
                            self._merge(self.factors, other.factors))

    __rmul__ = __mul__

    def inverse(self):
        return FunctionExpr(self.field, self.field.inv(self.scalar),
                            tuple((p, -e) for p, e in self.factors))

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, e):
        e = int(e)
        if e == 0:
            return FunctionExpr(self.field)
        return FunctionExpr(self.field, self.field.pow(self.scalar, e),
                            tuple((p, k * e) for p, k in self.factors))

    def describe(self):
        F = self.field
        parts = [] if self.scalar == 1 else [F.format(self.scalar)]
        for p, e in self.factors:
            parts.append(p.describe(F) + ("" if e == 1 else f"^{e}"))
        return "*".join(parts) or "1"

    def __str__(self):
        return self.describe()


def product(F, exprs):
    out = FunctionExpr(F)
    for e in exprs:
        out = out * e
    return out


# -- evaluation results and divisors ----------------------------------------

@dataclass(frozen=True)
class Value:
    value: int


@dataclass(frozen=True)
class Zero:
    order: int


@dataclass(frozen=True)
class Pole:
    order: int


@dataclass
class Divisor:
    coeffs: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self.coeffs = {P: int(a) for P, a in self.coeffs.items() if a != 0}

    @property
    def degree(self):
        return sum(a * P.degree for P, a in self.coeffs.items())

    @property
    def support(self):
        return set(self.coeffs)

    def zeros(self):
        return Divisor({P: a for P, a in self.coeffs.items() if a > 0})

    def poles(self):
        return Divisor({P: -a for P, a in self.coeffs.items() if a < 0})

    def __add__(self, other):
        acc = dict(self.coeffs)
        for P, a in other.coeffs.items():
            acc[P] = acc.get(P, 0) + a
        return Divisor(acc)

    def __neg__(self):
        return Divisor({P: -a for P, a in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __getitem__(self, P):
        return self.coeffs.get(P, 0)

    def __eq__(self, other):
        return isinstance(other, Divisor) and self.coeffs == other.coeffs

    def serialize(self, F):
        items = sorted(self.coeffs.items(), key=lambda kv: kv[0].sort_key())
        return {P.serialize(F): a for P, a in items}


# -- curves -----------------------------------------------------------------

class Curve:
    """One of the three supported function fields over a finite field.

    Build with :func:`curve_make` or :meth:`Curve.parse`.
    """

    def __init__(self, family, field, f=None, q0=None):
        self.family = family
        self.field = field
        self.f = None if f is None else tuple(_upoly.trim(f))
        self.q0 = q0
        F = field
        if family == RATIONAL:
            self.genus = 0
        elif family == HYPERELLIPTIC:
            if F.p == 2:
                raise CharacteristicTwoHyperelliptic("y^2 = f(x) needs odd characteristic")
            if not self.f or self.f[-1] != 1:
                raise ValueError("f must be monic")
            deg = len(self.f) - 1
            if deg % 2 == 0:
                raise EvenDegreeUnsupported(f"deg f = {deg} is even")
            if deg < 3:
                raise ValueError("deg f must be at least 3")
            if len(_upoly.gcd(F, list(self.f), _upoly.derivative(F, list(self.f)))) > 1:
                raise NotSquareFree("f has a repeated factor")
            self.genus = (deg - 1) // 2
        elif family == HERMITIAN:
            if q0 is None or F.q != q0 * q0:
                raise BadHermitianField(f"Hermitian curve needs a field of order q0^2, got {F}")
            self.genus = q0 * (q0 - 1) // 2
        else:
            raise ValueError(f"unknown curve family {family!r}")
        self._places, self._quad = self._enumerate()
        self._place_set = set(self._places) | set(self._quad)

    # -- construction helpers --------------------------------------------
    @classmethod
    def parse(cls, descriptor):
        """Parse ``rational/q=11``, ``hyper/q=11/f=0,10,0,0,0,1`` or ``hermitian/q0=3``.

        Hyperelliptic coefficients are element codes, low degree first.
        """
        parts = descriptor.strip().split("/")
        try:
            kv = dict(p.split("=", 1) for p in parts[1:])
        except ValueError:
            raise ValueError(f"bad curve descriptor {descriptor!r}") from None
        family = parts[0]
        if family == "rational" and set(kv) == {"q"}:
            return cls(RATIONAL, field_from_order(int(kv["q"])))
        if family in ("hyper", "hyperelliptic") and set(kv) == {"q", "f"}:
            F = field_from_order(int(kv["q"]))
            f = [int(c) for c in kv["f"].split(",")]
            if any(not 0 <= c < F.q for c in f):
                raise ValueError("coefficient code out of range")
            return cls(HYPERELLIPTIC, F, f=f)
        if family == "hermitian" and set(kv) == {"q0"}:
            q0 = int(kv["q0"])
            prime_power(q0)
            return cls(HERMITIAN, field_from_order(q0 * q0), q0=q0)
        raise ValueError(f"bad curve descriptor {descriptor!r}")

    def descriptor(self):
        if self.family == RATIONAL:
            return f"rational/q={self.field.q}"
        if self.family == HYPERELLIPTIC:
            return f"hyper/q={self.field.q}/f=" + ",".join(str(c) for c in self.f)
        return f"hermitian/q0={self.q0}"

    def __repr__(self):
        return f"Curve({self.descriptor()})"

    def _enumerate(self):
        F = self.field
        elts = F.elements()
        quad = []
        if self.family == RATIONAL:
            affine = [Place("affine", int(a)) for a in elts]
        elif self.family == HYPERELLIPTIC:
            affine = []
            values = _upoly.evaluate(F, list(self.f), elts)
            for a, v in zip(elts, values):
                roots = F.sqrt_codes(int(v))
                if roots:
                    affine.extend(Place("affine", int(a), r) for r in roots)
                else:
                    quad.append(Place("quad", int(a)))
        else:
            q0 = self.q0
            trace = F.add(F.pow(elts, q0), elts)
            norm = F.pow(elts, q0 + 1)
            by_trace = {}
            for b, t in zip(elts, trace):
                by_trace.setdefault(int(t), []).append(int(b))
            affine = [Place("affine", int(a), b)
                      for a, c in zip(elts, norm) for b in by_trace.get(int(c), [])]
        affine.sort(key=Place.sort_key)
        return [INFINITY] + affine, quad

    # -- places -----------------------------------------------------------
    def rational_places(self):
        return list(self._places)

    def quadratic_places(self):
        return list(self._quad)

    def contains(self, place):
        return place in self._place_set

    def on_curve(self, a, b):
        F = self.field
        if self.family == HERMITIAN:
            return F.add(F.pow(b, self.q0), b) == F.pow(a, self.q0 + 1)
        if self.family == HYPERELLIPTIC:
            return F.mul(b, b) == _upoly.evaluate(F, list(self.f), a)
        return True

    def _f_splits(self):
        roots = sum(1 for P in self._places if P.kind == "affine" and P.y == 0)
        return roots == len(self.f) - 1

    # -- primitive valuations ---------------------------------------------
    def _check_prim(self, prim):
        if self.family == RATIONAL and prim.kind != "x-a":
            raise UnsupportedPrimitive(f"{prim.kind} is not defined on the rational curve")
        if self.family == HYPERELLIPTIC and prim.kind == "tangent":
            raise UnsupportedPrimitive("tangent lines are only modelled on the Hermitian curve")
        if prim.kind == "tangent" and not self.contains(Place("affine", prim.a, prim.b)):
            raise UnsupportedPrimitive("tangent point is not a rational point of the curve")

    def _prim_val(self, prim, P):
        fam = self.family
        if fam == HERMITIAN and prim.kind == "y":
            prim = TangentAt(0, 0)
        if P.kind == "inf":
            if prim.kind == "x-a":
                return {RATIONAL: -1, HYPERELLIPTIC: -2, HERMITIAN: -(self.q0 or 0)}[fam]
            if prim.kind == "y":
                return -(2 * self.genus + 1)
            return -(self.q0 + 1)
        if prim.kind == "x-a":
            if P.x != prim.a:
                return 0
            if fam == HYPERELLIPTIC and P.kind == "affine" and P.y == 0:
                return 2
            return 1
        if prim.kind == "y":
            return 1 if (P.kind == "affine" and P.y == 0) else 0
        return self.q0 + 1 if (P.x, P.y) == (prim.a, prim.b) else 0

    def _prim_value(self, prim, P):
        F = self.field
        if prim.kind == "x-a":
            return F.sub(P.x, prim.a)
        if prim.kind == "y":
            return P.y
        return F.sub(F.sub(P.y, prim.b), F.mul(F.pow(prim.a, self.q0), F.sub(P.x, prim.a)))

    def _prim_support(self, prim):
        fam = self.family
        out = [INFINITY]
        if fam == HERMITIAN and prim.kind == "y":
            prim = TangentAt(0, 0)
        if prim.kind == "x-a":
            out += [P for P in self._places if P.kind == "affine" and P.x == prim.a]
            out += [P for P in self._quad if P.x == prim.a]
        elif prim.kind == "y":
            if not self._f_splits():
                raise UnsupportedPrimitive(
                    "divisor of y needs the non-rational roots of f, which are not modelled")
            out += [P for P in self._places if P.kind == "affine" and P.y == 0]
        else:
            out.append(Place("affine", prim.a, prim.b))
        return out

    # -- public queries ---------------------------------------------------
    def valuation(self, expr, place):
        if not self.contains(place):
            raise UnsupportedPlace(f"{place} is not a place of {self}")
        total = 0
        for prim, e in expr.factors:
            self._check_prim(prim)
            total += e * self._prim_val(prim, place)
        return total

    def evaluate(self, expr, place):
        """``Value``, ``Zero`` or ``Pole`` of ``expr`` at a rational place."""
        if not place.is_rational or not self.contains(place):
            raise UnsupportedPlace(f"{place} is not a rational place of {self}")
        F = self.field
        vals = []
        for prim, e in expr.factors:
            self._check_prim(prim)
            vals.append(self._prim_val(prim, place))
        total = sum(v * e for v, (_, e) in zip(vals, expr.factors))
        if all(v == 0 for v in vals):
            out = expr.scalar
            for prim, e in expr.factors:
                out = F.mul(out, F.pow(self._prim_value(prim, place), e))
            return Value(out)
        if total > 0:
            return Zero(total)
        if total < 0:
            return Pole(-total)
        raise IndeterminateForm(f"{expr} has cancelling zeros and poles at {place}")

    def value(self, expr, place):
        """Evaluate and insist on a finite value (zeros give 0)."""
        r = self.evaluate(expr, place)
        if isinstance(r, Pole):
            raise IndeterminateForm(f"{expr} has a pole at {place}")
        return 0 if isinstance(r, Zero) else r.value

    def divisor_of(self, expr):
        places = set()
        for prim, _ in expr.factors:
            self._check_prim(prim)
            places.update(self._prim_support(prim))
        return Divisor({P: self.valuation(expr, P) for P in places})

    def min_pole_generator(self, place):
        """``(z, r)`` with pole divisor of ``z`` equal to ``r * place``."""
        F = self.field
        if not self.contains(place) or not place.is_rational:
            raise UnsupportedPlace(f"{place} is not a rational place of {self}")
        if place.is_infinity:
            r = {RATIONAL: 1, HYPERELLIPTIC: 2, HERMITIAN: self.q0}[self.family]
            return FunctionExpr.of(F, X()), r
        if self.family == RATIONAL:
            return FunctionExpr.of(F, XminusA(place.x), -1), 1
        if self.family == HYPERELLIPTIC:
            if place.y != 0:
                raise UnsupportedPlace("only ramified affine places have a closed-form generator")
            return FunctionExpr.of(F, XminusA(place.x), -1), 2
        return FunctionExpr.of(F, TangentAt(place.x, place.y), -1), self.q0 + 1

    def supports_generator(self, place):
        try:
            self.min_pole_generator(place)
        except UnsupportedPlace:
            return False
        return True

    def is_true_min_pole(self, place):
        """Whether the generator's pole order is the Weierstrass multiplicity."""
        return not (self.family == HERMITIAN and place.kind == "affine")

    def generator_places(self):
        return [P for P in self._places if self.supports_generator(P)]

    def pole_sum(self, places):
        places = list(places)
        if len(set(places)) != len(places):
            raise ValueError("places must be distinct")
        rs = [self.min_pole_generator(P)[1] for P in places]
        return sum(rs), rs


def curve_make(family, params=None, field=None):
    """Build a curve.

    ``family`` is ``"rational"``, ``"hyperelliptic"`` or ``"hermitian"``;
    ``params`` holds ``f`` (coefficient codes, low degree first) for the
    hyperelliptic family and ``q0`` for the Hermitian one.
    """
    params = dict(params or {})
    if family in ("hyper", HYPERELLIPTIC):
        if field is None:
            raise ValueError("hyperelliptic curves need a field")
        return Curve(HYPERELLIPTIC, field, f=params["f"])
    if family == HERMITIAN:
        q0 = int(params["q0"])
        if field is None:
            p, m = prime_power(q0)
            field = field_make(p, 2 * m)
        return Curve(HERMITIAN, field, q0=q0)
    if family == RATIONAL:
        if field is None:
            raise ValueError("rational curves need a field")
        return Curve(RATIONAL, field)
    raise ValueError(f"unknown curve family {family!r}")


def enumerate_rational_places(curve):
    return curve.rational_places()


def valuation(curve, expr, place):
    return curve.valuation(expr, place)


def evaluate(curve, expr, place):
    return curve.evaluate(expr, place)


def divisor_of(curve, expr):
    return curve.divisor_of(expr)


def min_pole_generator(curve, place):
    return curve.min_pole_generator(place)


def pole_sum(curve, places):
    return curve.pole_sum(places)


def smallest_genus(n, k, q):
    """Smallest genus among the supported families over GF(q) that leaves room
    for ``k`` construction places with the generic ``(g+1)k`` budget plus ``n``
    evaluation places.

    Hyperelliptic candidates are the split models ``prod(x - a)`` over the
    first ``2g+1`` field elements.  Returns ``(genus, descriptor)`` or None.
    """
    F = field_from_order(q)
    candidates = [(0, f"rational/q={q}", q + 1)]
    p, m = prime_power(q)
    if m % 2 == 0:
        q0 = p ** (m // 2)
        candidates.append((q0 * (q0 - 1) // 2, f"hermitian/q0={q0}", q0 ** 3 + 1))
    if p != 2:
        for g in range(1, (q - 1) // 2 + 1):
            f = [1]
            for a in range(2 * g + 1):
                f = _upoly.mul(F, f, [F.neg(a), 1])
            desc = f"hyper/q={q}/f=" + ",".join(str(c) for c in f)
            candidates.append((g, desc, len(Curve.parse(desc).rational_places())))
    best = None
    for g, desc, count in candidates:
        if count >= (g + 1) * k + n and (best is None or g < best[0]):
            best = (g, desc)
    return best
