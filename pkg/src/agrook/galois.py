"""Exact arithmetic in GF(p^m).

Elements are stored as integer codes ``sum(c_i * p**i)`` where ``c_i`` are the
coefficients of the residue polynomial (little-endian).  Prime-field elements
therefore keep their usual integer value, and the prime subfield of any
extension is the set of codes ``0..p-1``.

All arithmetic methods on :class:`GF` accept Python ints or integer numpy
arrays and return the same kind.
"""

from __future__ import annotations

import functools
import itertools

import numpy as np

from .errors import DegreeTooLarge, DivisionByZero, NotPrime

MAX_ORDER = 2 ** 20
MAX_DEGREE = 8


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_power(q):
    """Split ``q`` into ``(p, m)`` with ``q == p**m``; raise NotPrime otherwise."""
    if q < 2:
        raise NotPrime(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            break
    m = 0
    r = q
    while r % p == 0:
        r //= p
        m += 1
    if r != 1:
        raise NotPrime(f"{q} is not a prime power")
    return p, m


def _factorize(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


# -- dense polynomials over Z_p, little-endian coefficient lists ------------

def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a, b, p):
    a = _poly_trim(a)
    b = _poly_trim(b)
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bi) % p
        a = _poly_trim(a)
    return a


def _monic_polys(p, degree):
    for tail in itertools.product(range(p), repeat=degree):
        yield list(reversed(tail)) + [1]


def is_irreducible(poly, p):
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _poly_trim(poly)
    deg = len(poly) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for g in _monic_polys(p, d):
            if not _poly_mod(poly, g, p):
                return False
    return True


def smallest_irreducible(p, m):
    """Lexicographically smallest monic irreducible of degree m over Z_p.

    Candidates are ordered by the integer code of their lower coefficients,
    i.e. lexicographically on ``(c_{m-1}, ..., c_0)``.
    """
    for code in range(p ** m):
        tail = [(code // p ** i) % p for i in range(m)]
        poly = tail + [1]
        if is_irreducible(poly, p):
            return tuple(poly)
    raise AssertionError("an irreducible polynomial always exists")


class GF:
    """The finite field GF(p^m)."""

    def __init__(self, p, m=1):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if m < 1 or m > MAX_DEGREE or p ** m > MAX_ORDER:
            raise DegreeTooLarge(f"GF({p}^{m}) exceeds the supported size")
        self.p = p
        self.m = m
        self.q = p ** m
        self.modulus = smallest_irreducible(p, m) if m > 1 else None
        self._exp = None
        self._log = None
        self._generator = None

    # -- identity ---------------------------------------------------------
    def __repr__(self):
        if self.m == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.m})"

    def __eq__(self, other):
        return isinstance(other, GF) and (self.p, self.m, self.modulus) == (
            other.p, other.m, other.modulus)

    def __hash__(self):
        return hash((self.p, self.m, self.modulus))

    @property
    def order(self):
        return self.q

    # -- element construction ---------------------------------------------
    def __call__(self, value):
        return FieldElement(self, self.coerce(value))

    def coerce(self, value):
        """Map an int, FieldElement or coefficient tuple to an element code.

        Plain ints are read as multiples of 1 (i.e. reduced mod p), so they
        always land in the prime subfield.
        """
        if isinstance(value, FieldElement):
            if value.field != self:
                raise ValueError(f"element of {value.field} used in {self}")
            return value.value
        if isinstance(value, (tuple, list)):
            return self.from_coeffs(value)
        return int(value) % self.p

    def from_coeffs(self, coeffs):
        coeffs = list(coeffs)
        if len(coeffs) > self.m:
            raise ValueError("too many coefficients")
        return sum((int(c) % self.p) * self.p ** i for i, c in enumerate(coeffs))

    def coeffs(self, a):
        a = int(a)
        return tuple((a // self.p ** i) % self.p for i in range(self.m))

    def format(self, a):
        """Serialize as ``c0,c1,...``; prime fields as a single decimal."""
        return ",".join(str(c) for c in self.coeffs(a))

    def parse(self, text):
        parts = [int(t) for t in str(text).split(",")]
        if len(parts) != self.m:
            raise ValueError(f"expected {self.m} coefficients, got {text!r}")
        if any(not 0 <= c < self.p for c in parts):
            raise ValueError(f"coefficient out of range in {text!r}")
        return self.from_coeffs(parts)

    def elements(self):
        return np.arange(self.q, dtype=np.int64)

    def random(self, rng, shape=None):
        return rng.integers(0, self.q, size=shape, dtype=np.int64)

    def in_prime_subfield(self, a):
        return np.all(np.asarray(a) < self.p)

    # -- slow polynomial multiplication, used to build tables -------------
    def _mul_slow(self, a, b):
        p, m = self.p, self.m
        ca, cb = self.coeffs(a), self.coeffs(b)
        prod = [0] * (2 * m - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] = (prod[i + j] + x * y) % p
        red = _poly_mod(prod, list(self.modulus), p)
        return self.from_coeffs(red)

    def _tables(self):
        if self._exp is None:
            q = self.q
            n = q - 1
            primes = _factorize(n) if n > 1 else []
            mul = (lambda a, b: a * b % self.p) if self.m == 1 else self._mul_slow

            def power(a, e):
                r, base = 1, a
                while e:
                    if e & 1:
                        r = mul(r, base)
                    base = mul(base, base)
                    e >>= 1
                return r

            g = next(c for c in range(1, q)
                     if all(power(c, n // ell) != 1 for ell in primes))
            exp = np.zeros(2 * n + 1, dtype=np.int64)
            log = np.zeros(q, dtype=np.int64)
            x = 1
            for i in range(n):
                exp[i] = x
                log[x] = i
                x = mul(x, g)
            exp[n:2 * n] = exp[:n]
            exp[2 * n] = exp[0]
            self._generator = g
            self._exp, self._log = exp, log
        return self._exp, self._log

    @property
    def generator(self):
        self._tables()
        return self._generator

    # -- arithmetic -------------------------------------------------------
    def add(self, a, b):
        p = self.p
        if self.m == 1:
            return (a + b) % p
        if p == 2:
            return a ^ b
        out = 0
        for i in range(self.m):
            pi = p ** i
            out = out + ((a // pi + b // pi) % p) * pi
        return out

    def neg(self, a):
        p = self.p
        if self.m == 1:
            return (-a) % p
        if p == 2:
            return a
        out = 0
        for i in range(self.m):
            pi = p ** i
            out = out + ((-(a // pi)) % p) * pi
        return out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.m == 1:
            return a * b % self.p
        exp, log = self._tables()
        if np.isscalar(a) and np.isscalar(b):
            if a == 0 or b == 0:
                return 0
            return int(exp[log[a] + log[b]])
        a = np.asarray(a)
        b = np.asarray(b)
        out = exp[log[a] + log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def inv(self, a):
        exp, log = self._tables()
        n = self.q - 1
        if np.isscalar(a):
            if a == 0:
                raise DivisionByZero("inverse of zero")
            return int(exp[(n - log[a]) % n])
        a = np.asarray(a)
        if np.any(a == 0):
            raise DivisionByZero("inverse of zero")
        return exp[(n - log[a]) % n]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e):
        """``a**e`` for any integer ``e``; negative powers go through the inverse."""
        exp, log = self._tables()
        n = self.q - 1
        e = int(e)
        if np.isscalar(a):
            if a == 0:
                if e < 0:
                    raise DivisionByZero("negative power of zero")
                return 1 if e == 0 else 0
            return int(exp[(int(log[a]) * e) % n])
        a = np.asarray(a)
        if e < 0 and np.any(a == 0):
            raise DivisionByZero("negative power of zero")
        out = exp[(log[a] * (e % n)) % n]
        if e == 0:
            return np.ones_like(a)
        return np.where(a == 0, 0, out)

    def frobenius(self, a):
        return self.pow(a, self.p)

    def is_square(self, a):
        if a == 0 or self.p == 2:
            return True
        _, log = self._tables()
        return int(log[a]) % 2 == 0

    def sqrt_codes(self, a):
        """All square roots of ``a`` as a sorted list of codes."""
        a = int(a)
        if a == 0:
            return [0]
        exp, log = self._tables()
        if self.p == 2:
            # squaring is a bijection; its inverse is x -> x^(q/2)
            return [self.pow(a, self.q // 2)]
        e = int(log[a])
        if e % 2:
            return []
        r = int(exp[e // 2])
        return sorted({r, self.neg(r)})

    def sqrt(self, a):
        return {FieldElement(self, r) for r in self.sqrt_codes(self.coerce(a))}

    # -- vector / matrix helpers -------------------------------------------
    def sum(self, a, axis=0):
        a = np.asarray(a)
        if self.m == 1:
            return a.sum(axis=axis) % self.p
        a = np.moveaxis(a, axis, 0)
        out = np.zeros(a.shape[1:], dtype=np.int64)
        for row in a:
            out = self.add(out, row)
        return out

    def matmul(self, A, B):
        """Matrix product over the field (2-D by 2-D, or 2-D by 1-D)."""
        A = np.asarray(A, dtype=np.int64)
        B = np.asarray(B, dtype=np.int64)
        if A.shape[-1] != B.shape[0]:
            raise ValueError(f"matmul shape mismatch {A.shape} @ {B.shape}")
        if self.m == 1:
            return (A @ B) % self.p
        vector = B.ndim == 1
        if vector:
            B = B[:, None]
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for t in range(A.shape[1]):
            out = self.add(out, self.mul(A[:, t, None], B[None, t, :]))
        return out[:, 0] if vector else out

    def lincomb(self, coeffs, items):
        """``sum_i coeffs[i] * items[i]`` where ``items`` stacks arrays on axis 0."""
        items = np.asarray(items, dtype=np.int64)
        coeffs = np.asarray(coeffs, dtype=np.int64)
        flat = items.reshape(items.shape[0], -1)
        return self.matmul(coeffs[None, :], flat).reshape(items.shape[1:])


class FieldElement:
    """An immutable element of a :class:`GF`."""

    __slots__ = ("field", "value")

    def __init__(self, field, value):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "value", int(value))

    def __setattr__(self, name, value):
        raise AttributeError("FieldElement is immutable")

    def _other(self, other):
        return self.field.coerce(other)

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._other(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field.sub(self._other(other), self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.value, self._other(other)))

    def __rtruediv__(self, other):
        return FieldElement(self.field, self.field.div(self._other(other), self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __pow__(self, e):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def inv(self):
        return FieldElement(self.field, self.field.inv(self.value))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == self.field.coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.value))

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __bool__(self):
        return self.value != 0

    @property
    def coeffs(self):
        return self.field.coeffs(self.value)

    def __str__(self):
        return self.field.format(self.value)

    def __repr__(self):
        return f"{self.field}({self})"


@functools.lru_cache(maxsize=None)
def field_make(p, m=1):
    return GF(p, m)


def field_from_order(q):
    return field_make(*prime_power(q))


def arith(field, op, *operands):
    """Apply ``op`` in {add, sub, mul, neg, inv, pow, div} to element operands."""
    vals = [field.coerce(x) for x in operands[:2 if op != "pow" else 1]]
    if op == "pow":
        return FieldElement(field, field.pow(vals[0], int(operands[1])))
    return FieldElement(field, getattr(field, op)(*vals))


def sqrt(field, a):
    return field.sqrt(a)


def enumerate_elements(field):
    return [FieldElement(field, c) for c in range(field.q)]
