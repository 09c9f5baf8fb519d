"""Entangled rook codes: one-point exponent schemes that code the blocks and
carry out the block inner products at the same time.

With a generator ``z`` whose only pole is ``r0 * P0``, block ``A_ij`` is
attached to ``z^{-eA(i,j)}`` and ``B_kl`` to ``z^{-eB(k,l)}``.  The product of
the two coded matrices is a combination of powers ``z^{-e}``; the maps are
chosen so that the coefficient of ``z^{-d(i,l)}`` is exactly
``sum_j A_ij B_jl``.  Pure powers need no normalisation, so extracted
coefficients are the block sums themselves.

All indices are 0-based.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import NotEnoughPlaces, ShapeMismatch, UnsupportedPlace
from .rook_diagonal import _stack_responses, functional_decodability, interpolate_functionals


def default_maps(chi, zeta, upsilon):
    """``eA(i,j) = j + i*zeta*upsilon``, ``eB(k,l) = (zeta-1-k) + zeta*l``."""
    eA = np.array([[j + i * zeta * upsilon for j in range(zeta)] for i in range(chi)])
    eB = np.array([[(zeta - 1 - k) + zeta * l for l in range(upsilon)] for k in range(zeta)])
    return eA, eB


@dataclass
class DecodabilityReport:
    passed: bool
    d: np.ndarray | None
    witness: tuple | None = None
    reason: str = ""

    def __bool__(self):
        return self.passed


def check_decodability(eA, eB):
    """Exhaustively check that ``eA(i,j) + eB(k,l) = d(i',l')`` holds exactly when
    ``j == k``, ``i == i'`` and ``l == l'``.

    ``d(i,l)`` is read off as ``eA(i,j) + eB(j,l)``, which must not depend on ``j``.
    """
    eA = np.asarray(eA)
    eB = np.asarray(eB)
    chi, zeta = eA.shape
    if eB.shape[0] != zeta:
        raise ShapeMismatch("eA and eB disagree on the inner dimension")
    ups = eB.shape[1]
    d = np.zeros((chi, ups), dtype=np.int64)
    for i, l in itertools.product(range(chi), range(ups)):
        sums = {int(eA[i, j] + eB[j, l]) for j in range(zeta)}
        if len(sums) != 1:
            return DecodabilityReport(False, None, (i, l), "diagonal exponent depends on j")
        d[i, l] = sums.pop()
    for i, j, k, l in itertools.product(range(chi), range(zeta), range(zeta), range(ups)):
        s = eA[i, j] + eB[k, l]
        for i2, l2 in itertools.product(range(chi), range(ups)):
            if (s == d[i2, l2]) != (j == k and i == i2 and l == l2):
                return DecodabilityReport(False, d, (i, j, k, l, i2, l2), "exponent collision")
    return DecodabilityReport(True, d)


def exponent_support(eA, eB):
    return sorted({int(a + b) for a in np.ravel(eA) for b in np.ravel(eB)})


@dataclass
class EntangledScheme:
    curve: object
    base: object                # P0
    generator: object           # z
    r0: int
    dims: tuple
    eA: np.ndarray
    eB: np.ndarray
    d: np.ndarray
    exponents: list             # E, sorted
    evaluation: list
    U: np.ndarray               # z^{-1}(Q_w)
    V: np.ndarray               # (n, |E|): z^{-e}(Q_w)
    kind: str = dc_field(default="entangled", init=False)

    @property
    def field(self):
        return self.curve.field

    @property
    def n(self):
        return len(self.evaluation)

    @property
    def threshold(self):
        return self.r0 * max(self.exponents) + 1

    @property
    def target_rows(self):
        """Unit functionals picking the coefficients at ``d(i,l)``, row-major in ``(i, l)``."""
        col = {e: c for c, e in enumerate(self.exponents)}
        T = np.zeros((self.d.size, len(self.exponents)), dtype=np.int64)
        for row, e in enumerate(self.d.ravel()):
            T[row, col[int(e)]] = 1
        return T

    def encode(self, inputs):
        return encode_entangled(self, *inputs)

    def compute(self, payload):
        At, Bt = payload
        return self.field.matmul(At, Bt)

    def decode(self, responses):
        return decode_entangled(self, responses)

    def is_decodable(self, subset):
        idx = sorted(set(int(w) for w in subset))
        return functional_decodability(self.field, self.V[idx], self.target_rows)[0]

    def random_inputs(self, rng, t=(2, 2, 2)):
        chi, zeta, ups = self.dims
        t1, t2, t3 = t
        F = self.field
        return F.random(rng, (chi, zeta, t1, t2)), F.random(rng, (zeta, ups, t2, t3))

    def expected_output(self, inputs):
        from .mm_tensors import block_matmul
        return block_matmul(self.field, *inputs)

    def to_dict(self):
        F = self.field
        return {
            "kind": "entangled",
            "curve": self.curve.descriptor(),
            "base_place": self.base.serialize(F),
            "generator": self.generator.describe(),
            "r0": self.r0,
            "dims": list(self.dims),
            "eA": self.eA.tolist(),
            "eB": self.eB.tolist(),
            "d": self.d.tolist(),
            "exponents": list(self.exponents),
            "n": self.n,
            "evaluation_places": [P.serialize(F) for P in self.evaluation],
            "R_star": self.threshold,
            "genus": self.curve.genus,
        }


def build_entangled(curve, base, chi, zeta, upsilon, n=None, maps=None):
    """Entangled scheme at base place ``base`` (a Place, or None for the first
    supported affine place)."""
    F = curve.field
    if base is None:
        cands = [P for P in curve.generator_places() if not P.is_infinity]
        if not cands:
            raise UnsupportedPlace(f"{curve!r} has no supported affine base place")
        base = cands[0]
    z, r0 = curve.min_pole_generator(base)
    eA, eB = maps if maps is not None else default_maps(chi, zeta, upsilon)
    eA, eB = np.asarray(eA), np.asarray(eB)
    if eA.shape != (chi, zeta) or eB.shape != (zeta, upsilon):
        raise ShapeMismatch("exponent maps do not match the block dimensions")
    report = check_decodability(eA, eB)
    if not report:
        raise ValueError(f"exponent maps are not decodable: {report.reason} at {report.witness}")
    blocked = curve.divisor_of(z).support | {base}
    admissible = [P for P in curve.rational_places() if P not in blocked]
    if n is None:
        n = len(admissible)
    if len(admissible) < n:
        raise NotEnoughPlaces(f"{curve!r} leaves {len(admissible)} evaluation places, need {n}")
    evaluation = admissible[:n]
    zinv = z.inverse()
    U = np.array([curve.value(zinv, Q) for Q in evaluation], dtype=np.int64)
    E = exponent_support(eA, eB)
    V = np.stack([F.pow(U, e) for e in E], axis=1) if n else np.zeros((0, len(E)), np.int64)
    return EntangledScheme(curve, base, z, r0, (chi, zeta, upsilon), eA, eB, report.d, E,
                           evaluation, U, V)


def encode_entangled(scheme, A, B):
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    chi, zeta, ups = scheme.dims
    if A.ndim != 4 or B.ndim != 4 or A.shape[:2] != (chi, zeta) or B.shape[:2] != (zeta, ups) \
            or A.shape[3] != B.shape[2]:
        raise ShapeMismatch(f"blocks {A.shape} x {B.shape} do not fit dims {scheme.dims}")
    F = scheme.field
    # coefficient of A_ij at worker w is z^{-eA(i,j)}(Q_w)
    ca = np.stack([F.pow(scheme.U, int(e)) for e in scheme.eA.ravel()], axis=1)
    cb = np.stack([F.pow(scheme.U, int(e)) for e in scheme.eB.ravel()], axis=1)
    At = F.matmul(ca, A.reshape(chi * zeta, -1)).reshape((scheme.n,) + A.shape[2:])
    Bt = F.matmul(cb, B.reshape(zeta * ups, -1)).reshape((scheme.n,) + B.shape[2:])
    return list(zip(At, Bt))


def decode_entangled(scheme, responses):
    idx, Y, shape = _stack_responses(responses, scheme.n)
    out = interpolate_functionals(scheme.field, scheme.V[idx], scheme.target_rows, Y)
    chi, _, ups = scheme.dims
    return out.reshape((chi, ups) + tuple(shape))
