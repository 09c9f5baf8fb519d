# Univariate polynomials over a GF as little-endian lists of element codes.

import numpy as np


def trim(a):
    a = [int(c) for c in a]
    while a and a[-1] == 0:
        a.pop()
    return a


def evaluate(F, coeffs, x):
    """Horner evaluation; ``x`` may be an int or an array of codes."""
    out = np.zeros_like(x) if isinstance(x, np.ndarray) else 0
    for c in reversed(coeffs):
        out = F.add(F.mul(out, x), int(c))
    return out


def mul(F, a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add(out[i + j], F.mul(x, y))
    return trim(out)


def power(F, a, e):
    out = [1]
    base = list(a)
    while e:
        if e & 1:
            out = mul(F, out, base)
        base = mul(F, base, base)
        e >>= 1
    return out


def sub(F, a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return trim([F.sub(x, y) for x, y in zip(a, b)])


def divmod_(F, a, b):
    a = trim(a)
    b = trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    inv_lead = F.inv(b[-1])
    quot = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        c = F.mul(a[-1], inv_lead)
        shift = len(a) - len(b)
        quot[shift] = c
        for i, bi in enumerate(b):
            a[shift + i] = F.sub(a[shift + i], F.mul(c, bi))
        a = trim(a)
    return trim(quot), a


def derivative(F, a):
    return trim([F.mul(F.coerce(i), c) for i, c in enumerate(a)][1:])


def gcd(F, a, b):
    a, b = trim(a), trim(b)
    while b:
        a, b = b, divmod_(F, a, b)[1]
    if a:
        inv = F.inv(a[-1])
        a = [F.mul(c, inv) for c in a]
    return a
