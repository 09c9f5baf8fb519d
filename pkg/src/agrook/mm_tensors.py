"""Bilinear matrix-multiplication algorithms and their use as a front end to
the diagonal rook code.

A ``(chi, zeta, upsilon)`` algorithm of rank ``r`` forms ``r`` products
``Ahat_t Bhat_t`` of linear combinations of the blocks of ``A`` (a
``chi x zeta`` block grid) and ``B`` (``zeta x upsilon``) and recombines them
into the ``chi x upsilon`` blocks of ``AB``.  Feeding the ``r`` pairs to a
diagonal rook code with ``k = r`` gives coded general matrix multiplication.

Block grids are 4-D arrays ``(block_rows, block_cols, rows, cols)``; flattened
block indices are row-major, ``(i, j) -> i * cols + j``.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np

from . import rook_diagonal
from .errors import RankMismatch, ShapeMismatch


@dataclass
class BilinearAlgorithm:
    chi: int
    zeta: int
    upsilon: int
    gamma: np.ndarray      # (r, chi*zeta)
    delta: np.ndarray      # (r, zeta*upsilon)
    epsilon: np.ndarray    # (chi*upsilon, r)
    name: str = "custom"

    @property
    def rank(self):
        return self.gamma.shape[0]

    def __post_init__(self):
        r = self.gamma.shape[0]
        if self.gamma.shape != (r, self.chi * self.zeta):
            raise ShapeMismatch(f"gamma has shape {self.gamma.shape}")
        if self.delta.shape != (r, self.zeta * self.upsilon):
            raise ShapeMismatch(f"delta has shape {self.delta.shape}")
        if self.epsilon.shape != (self.chi * self.upsilon, r):
            raise ShapeMismatch(f"epsilon has shape {self.epsilon.shape}")

    def to_dict(self, F=None):
        def ints(a):
            if F is None:
                return a.tolist()
            # signed representatives read better for {-1, 0, 1} tables
            return [[int(v) - F.p if F.m == 1 and v > F.p // 2 else int(v) for v in row]
                    for row in a]
        return {
            "name": self.name,
            "dims": [self.chi, self.zeta, self.upsilon],
            "rank": self.rank,
            "gamma": ints(self.gamma),
            "delta": ints(self.delta),
            "epsilon": ints(self.epsilon),
        }


def _reduce(F, grid):
    return np.array([[F.coerce(v) for v in row] for row in grid], dtype=np.int64).reshape(
        len(grid), -1)


def algorithm_from_dict(data, F):
    """Load an algorithm; integer tables are reduced into ``F``."""
    chi, zeta, ups = data["dims"]
    alg = BilinearAlgorithm(chi, zeta, ups, _reduce(F, data["gamma"]), _reduce(F, data["delta"]),
                            _reduce(F, data["epsilon"]), data.get("name", "custom"))
    if "rank" in data and int(data["rank"]) != alg.rank:
        raise RankMismatch(f"declared rank {data['rank']} but tables have {alg.rank} rows")
    return alg


def load_algorithm(path, F):
    with open(path) as fh:
        return algorithm_from_dict(json.load(fh), F)


def save_algorithm(alg, path, F=None):
    with open(path, "w") as fh:
        json.dump(alg.to_dict(F), fh, indent=1)


def naive_algorithm(chi, zeta, upsilon, F=None):
    """Schoolbook: one product ``A_ij B_jl`` per triple ``(i, j, l)``."""
    if min(chi, zeta, upsilon) < 1:
        raise ValueError("dimensions must be positive")
    r = chi * zeta * upsilon
    gamma = np.zeros((r, chi * zeta), dtype=np.int64)
    delta = np.zeros((r, zeta * upsilon), dtype=np.int64)
    eps = np.zeros((chi * upsilon, r), dtype=np.int64)
    for t, (i, j, l) in enumerate(itertools.product(range(chi), range(zeta), range(upsilon))):
        gamma[t, i * zeta + j] = 1
        delta[t, j * upsilon + l] = 1
        eps[i * upsilon + l, t] = 1
    return BilinearAlgorithm(chi, zeta, upsilon, gamma, delta, eps, "naive")


_STRASSEN = {
    # rows: M1..M7; columns: A11 A12 A21 A22 / B11 B12 B21 B22
    "gamma": [[1, 0, 0, 1], [0, 0, 1, 1], [1, 0, 0, 0], [0, 0, 0, 1],
              [1, 1, 0, 0], [-1, 0, 1, 0], [0, 1, 0, -1]],
    "delta": [[1, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, -1], [-1, 0, 1, 0],
              [0, 0, 0, 1], [1, 1, 0, 0], [0, 0, 1, 1]],
    # rows: C11 C12 C21 C22
    "epsilon": [[1, 0, 0, 1, -1, 0, 1], [0, 0, 1, 0, 1, 0, 0],
                [0, 1, 0, 1, 0, 0, 0], [1, -1, 1, 0, 0, 1, 0]],
}


def strassen_2x2x2(F):
    data = dict(_STRASSEN, dims=[2, 2, 2], rank=7, name="strassen")
    return algorithm_from_dict(data, F)


# -- applying an algorithm ----------------------------------------------------

def _check_blocks(alg, A, B):
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.ndim != 4 or B.ndim != 4:
        raise ShapeMismatch("block grids must be 4-D (block_rows, block_cols, rows, cols)")
    if A.shape[:2] != (alg.chi, alg.zeta) or B.shape[:2] != (alg.zeta, alg.upsilon):
        raise ShapeMismatch(f"block grids {A.shape[:2]} x {B.shape[:2]} do not fit "
                            f"({alg.chi}, {alg.zeta}, {alg.upsilon})")
    if A.shape[3] != B.shape[2]:
        raise ShapeMismatch("inner block dimensions differ")
    return A, B


def bilinear_inputs(F, alg, A, B):
    """``(Ahat, Bhat)`` stacks of shape ``(r, ...)``."""
    A, B = _check_blocks(alg, A, B)
    Af = A.reshape(alg.chi * alg.zeta, -1)
    Bf = B.reshape(alg.zeta * alg.upsilon, -1)
    Ahat = F.matmul(alg.gamma, Af).reshape((alg.rank,) + A.shape[2:])
    Bhat = F.matmul(alg.delta, Bf).reshape((alg.rank,) + B.shape[2:])
    return Ahat, Bhat


def recombine(F, alg, products):
    products = np.asarray(products, dtype=np.int64)
    flat = products.reshape(alg.rank, -1)
    out = F.matmul(alg.epsilon, flat)
    return out.reshape((alg.chi, alg.upsilon) + products.shape[1:])


def apply_algorithm(F, alg, A, B):
    Ahat, Bhat = bilinear_inputs(F, alg, A, B)
    prods = np.stack([F.matmul(a, b) for a, b in zip(Ahat, Bhat)])
    return recombine(F, alg, prods)


def block_matmul(F, A, B):
    """Schoolbook block product, the oracle for every algorithm."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    chi, zeta = A.shape[:2]
    ups = B.shape[1]
    out = np.zeros((chi, ups, A.shape[2], B.shape[3]), dtype=np.int64)
    for i, l in itertools.product(range(chi), range(ups)):
        acc = np.zeros((A.shape[2], B.shape[3]), dtype=np.int64)
        for j in range(zeta):
            acc = F.add(acc, F.matmul(A[i, j], B[j, l]))
        out[i, l] = acc
    return out


@dataclass
class VerifyResult:
    passed: bool
    mode: str
    cases: int
    witness: tuple | None = None

    def __bool__(self):
        return self.passed


EXHAUSTIVE_LIMIT = 2 ** 16


def verify_algorithm(alg, F, mode="auto", trials=100, seed=0, block=(2, 2, 2)):
    """Check the bilinear identity.

    ``auto`` is exhaustive over scalar blocks when there are at most 2^16
    input pairs and otherwise runs seeded random trials on ``block``-sized
    blocks against the schoolbook product.
    """
    na, nb = alg.chi * alg.zeta, alg.zeta * alg.upsilon
    if mode == "auto":
        mode = "exhaustive" if F.q ** (na + nb) <= EXHAUSTIVE_LIMIT else "random"
    if mode == "exhaustive":
        avecs = np.array(list(itertools.product(range(F.q), repeat=na)), dtype=np.int64)
        bvecs = np.array(list(itertools.product(range(F.q), repeat=nb)), dtype=np.int64)
        ahat = F.matmul(avecs, alg.gamma.T)                # (NA, r)
        bhat = F.matmul(bvecs, alg.delta.T)                # (NB, r)
        prods = F.mul(ahat[:, None, :], bhat[None, :, :])  # (NA, NB, r)
        got = F.matmul(prods.reshape(-1, alg.rank), alg.epsilon.T)
        A = avecs.reshape(-1, alg.chi, alg.zeta)
        B = bvecs.reshape(-1, alg.zeta, alg.upsilon)
        want = np.zeros((len(avecs), len(bvecs), alg.chi * alg.upsilon), dtype=np.int64)
        for i, l in itertools.product(range(alg.chi), range(alg.upsilon)):
            acc = 0
            for j in range(alg.zeta):
                acc = F.add(acc, F.mul(A[:, i, j][:, None], B[:, j, l][None, :]))
            want[:, :, i * alg.upsilon + l] = acc
        bad = np.argwhere(np.any(got.reshape(want.shape) != want, axis=2))
        if bad.size:
            a, b = bad[0]
            return VerifyResult(False, mode, want.shape[0] * want.shape[1],
                                (tuple(avecs[a].tolist()), tuple(bvecs[b].tolist())))
        return VerifyResult(True, mode, want.shape[0] * want.shape[1])
    rng = np.random.default_rng(seed)
    t1, t2, t3 = block
    for trial in range(trials):
        A = F.random(rng, (alg.chi, alg.zeta, t1, t2))
        B = F.random(rng, (alg.zeta, alg.upsilon, t2, t3))
        if not np.array_equal(apply_algorithm(F, alg, A, B), block_matmul(F, A, B)):
            return VerifyResult(False, "random", trial + 1, (trial,))
    return VerifyResult(True, "random", trials)


# -- composition with the diagonal rook code ----------------------------------

def composed_coefficients(scheme, alg):
    """Per-worker maps from the raw blocks: ``(X gamma, X delta)``.

    Row ``w`` of the first matrix gives the coefficients of ``A_ij`` in the
    coded matrix sent to worker ``w``; encoding is a single linear map.
    """
    if scheme.k != alg.rank:
        raise RankMismatch(f"scheme has k={scheme.k}, algorithm has rank {alg.rank}")
    F = scheme.field
    return F.matmul(scheme.X, alg.gamma), F.matmul(scheme.X, alg.delta)


def encode_composed(scheme, alg, A, B):
    A, B = _check_blocks(alg, A, B)
    F = scheme.field
    ca, cb = composed_coefficients(scheme, alg)
    At = F.matmul(ca, A.reshape(alg.chi * alg.zeta, -1)).reshape((scheme.n,) + A.shape[2:])
    Bt = F.matmul(cb, B.reshape(alg.zeta * alg.upsilon, -1)).reshape((scheme.n,) + B.shape[2:])
    return list(zip(At, Bt))


@dataclass
class MatmulScheme:
    """A diagonal rook code wrapped with a bilinear algorithm."""

    base: rook_diagonal.DiagonalScheme
    alg: BilinearAlgorithm
    kind: str = "general-matmul"

    def __post_init__(self):
        if self.base.k != self.alg.rank:
            raise RankMismatch(f"scheme has k={self.base.k}, algorithm has rank {self.alg.rank}")

    @property
    def field(self):
        return self.base.field

    @property
    def n(self):
        return self.base.n

    @property
    def threshold(self):
        return self.base.threshold

    def encode(self, inputs):
        return encode_composed(self.base, self.alg, *inputs)

    def compute(self, payload):
        return self.base.compute(payload)

    def decode(self, responses):
        prods = rook_diagonal.decode_batch(self.base, responses)
        return recombine(self.field, self.alg, prods)

    def is_decodable(self, subset):
        return self.base.is_decodable(subset)

    def random_inputs(self, rng, t=(2, 2, 2), field=None):
        F = field or self.field
        t1, t2, t3 = t
        return (F.random(rng, (self.alg.chi, self.alg.zeta, t1, t2)),
                F.random(rng, (self.alg.zeta, self.alg.upsilon, t2, t3)))

    def expected_output(self, inputs):
        return block_matmul(self.field, *inputs)

    def to_dict(self):
        d = self.base.to_dict()
        d.update(kind="general-matmul", algorithm=self.alg.name,
                 dims=[self.alg.chi, self.alg.zeta, self.alg.upsilon], rank=self.alg.rank)
        return d


def general_matmul(scheme, alg, A, B, responders=None):
    """Coded ``AB`` through ``scheme`` using ``alg``; ``responders`` defaults to all workers."""
    ms = MatmulScheme(scheme, alg)
    payloads = ms.encode((A, B))
    who = range(scheme.n) if responders is None else responders
    responses = {w: ms.compute(payloads[w]) for w in who}
    return ms.decode(responses)
