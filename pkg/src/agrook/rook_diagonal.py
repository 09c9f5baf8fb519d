"""Diagonal rook codes for batch matrix multiplication.

Construction places ``P_1..P_k`` carry one-point generators ``z_i`` with a
pole of order ``r_i`` at ``P_i`` only.  The encoding functions are

    x_i = prod_{j != i} z_j^{-1},

so ``x_i`` vanishes at every ``P_l`` with ``l != i`` and takes a nonzero value
``c_i`` at ``P_i``.  Worker ``w`` gets ``sum_i x_i(Q_w) A_i`` and
``sum_i x_i(Q_w) B_i`` and returns their product, a sample of the function
``C(Q) = sum_{i,j} A_i B_j x_i x_j (Q)``.  The master interpolates ``C`` from
the responding samples and reads off ``A_i B_i = C(P_i) / c_i^2``.

Workers are indexed from 0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import linalg
from .errors import (
    InconsistentResponses,
    InsufficientResponses,
    NotEnoughPlaces,
    RookConditionViolated,
    ShapeMismatch,
    UnsupportedPlace,
)
from .function_field import Pole, Zero, product

EXHAUSTIVE_MAX_N = 14


# -- place selection (shared with the tensor-power scheme) -------------------

def _compatible(curve, chosen, supports, P, supp_P):
    for Q, supp_Q in zip(chosen, supports):
        if P in supp_Q or Q in supp_P:
            return False
    return True


def select_places(curve, k, n=None, policy="canonical", seed=None, places=None):
    """Pick construction places, their generators and the evaluation places.

    Construction places are taken greedily from the supported generator
    places, skipping any place that lies in the divisor support of an already
    chosen generator (or whose own generator's support contains one).  The
    canonical policy tries affine places in canonical order and infinity last;
    the seeded policy shuffles the candidates first.  Evaluation places are the
    rational places outside every generator support.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = np.random.default_rng(seed) if policy == "seeded" else None
    if policy not in ("canonical", "seeded"):
        raise ValueError(f"unknown policy {policy!r}")

    chosen, gens, rs, supports = [], [], [], []
    if places is not None:
        places = list(places)
        if len(places) != k:
            raise ValueError(f"expected {k} construction places, got {len(places)}")
        for P in places:
            z, r = curve.min_pole_generator(P)
            supp = curve.divisor_of(z).support
            if not _compatible(curve, chosen, supports, P, supp):
                raise UnsupportedPlace(f"{P.serialize(curve.field)} clashes with an earlier generator")
            chosen.append(P); gens.append(z); rs.append(r); supports.append(supp)
    else:
        cands = curve.generator_places()
        cands = [P for P in cands if not P.is_infinity] + [P for P in cands if P.is_infinity]
        if rng is not None:
            cands = [cands[i] for i in rng.permutation(len(cands))]
        for P in cands:
            if len(chosen) == k:
                break
            z, r = curve.min_pole_generator(P)
            supp = curve.divisor_of(z).support
            if _compatible(curve, chosen, supports, P, supp):
                chosen.append(P); gens.append(z); rs.append(r); supports.append(supp)
        if len(chosen) < k:
            raise NotEnoughPlaces(
                f"{curve!r} has only {len(chosen)} compatible generator places, need {k}")

    blocked = set(chosen).union(*supports)
    admissible = [P for P in curve.rational_places() if P not in blocked]
    if rng is not None:
        admissible = [admissible[i] for i in rng.permutation(len(admissible))]
    if n is None:
        n = len(admissible)
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(admissible) < n:
        raise NotEnoughPlaces(
            f"{curve!r} leaves {len(admissible)} evaluation places, need {n}")
    evaluation = admissible[:n]
    if rng is not None:
        evaluation.sort(key=lambda P: P.sort_key())
    return chosen, gens, rs, evaluation


def rook_functions(curve, generators):
    """``x_i = prod_{j != i} z_j^{-1}``."""
    F = curve.field
    inv = [z.inverse() for z in generators]
    return [product(F, inv[:i] + inv[i + 1:]) for i in range(len(generators))]


def _value_or_zero(curve, expr, P):
    r = curve.evaluate(expr, P)
    if isinstance(r, Pole):
        raise RookConditionViolated(f"{expr} has a pole at {P}")
    return 0 if isinstance(r, Zero) else r.value


# -- the scheme -------------------------------------------------------------

@dataclass
class DiagonalScheme:
    curve: object
    k: int
    construction: list
    generators: list
    r: list
    xs: list
    normalizers: np.ndarray
    evaluation: list
    X: np.ndarray            # (n, k): x_i(Q_w)
    M: np.ndarray            # (n, k*k): (x_i x_j)(Q_w), column i*k + j
    E: np.ndarray            # (k, k*k): (x_a x_b)(P_i)
    policy: str = "canonical"
    seed: int | None = None
    kind: str = dc_field(default="diagonal", init=False)

    @property
    def field(self):
        return self.curve.field

    @property
    def n(self):
        return len(self.evaluation)

    @property
    def sigma_hat(self):
        return sum(self.r)

    @property
    def threshold(self):
        return guaranteed_threshold(self)

    @property
    def genus(self):
        return self.curve.genus

    @property
    def true_mu(self):
        return all(self.curve.is_true_min_pole(P) for P in self.construction)

    # -- coding pipeline, uniform across scheme kinds ----------------------
    def encode(self, inputs):
        A, B = inputs
        return encode_all(self, A, B)

    def compute(self, payload):
        return worker_multiply(self.field, *payload)

    def decode(self, responses):
        return decode_batch(self, responses)

    def is_decodable(self, subset):
        return decodability(self, subset)[0]

    def random_inputs(self, rng, t=(2, 2, 2)):
        t1, t2, t3 = t
        F = self.field
        return F.random(rng, (self.k, t1, t2)), F.random(rng, (self.k, t2, t3))

    def expected_output(self, inputs):
        A, B = inputs
        return np.stack([self.field.matmul(a, b) for a, b in zip(A, B)])

    def to_dict(self):
        F = self.field
        return {
            "kind": "diagonal",
            "curve": self.curve.descriptor(),
            "k": self.k,
            "n": self.n,
            "policy": self.policy,
            "seed": self.seed,
            "construction_places": [P.serialize(F) for P in self.construction],
            "evaluation_places": [P.serialize(F) for P in self.evaluation],
            "generators": [z.describe() for z in self.generators],
            "r_list": list(self.r),
            "normalizers": [F.format(c) for c in self.normalizers],
            "sigma_hat": self.sigma_hat,
            "R_star": self.threshold,
            "genus": self.genus,
        }


def assemble_diagonal(curve, construction, generators, rs, evaluation, policy="canonical",
                      seed=None):
    """Build the scheme tables without validating the rook condition."""
    F = curve.field
    k = len(construction)
    xs = rook_functions(curve, generators)
    normalizers = np.array([_value_or_zero(curve, x, P) for x, P in zip(xs, construction)],
                           dtype=np.int64)
    X = np.array([[curve.value(x, Q) for x in xs] for Q in evaluation], dtype=np.int64)
    X = X.reshape(len(evaluation), k)
    M = F.mul(X[:, :, None], X[:, None, :]).reshape(len(evaluation), k * k)
    E = np.zeros((k, k * k), dtype=np.int64)
    for i, P in enumerate(construction):
        for a, b in itertools.product(range(k), repeat=2):
            E[i, a * k + b] = _value_or_zero(curve, xs[a] * xs[b], P)
    return DiagonalScheme(curve, k, list(construction), list(generators), list(rs), xs,
                          normalizers, list(evaluation), X, M, E, policy, seed)


def build_diagonal(curve, k, n=None, policy="canonical", seed=None, places=None):
    """Construct a diagonal rook code with ``k`` construction and ``n`` evaluation places.

    ``n=None`` takes every admissible evaluation place.
    """
    construction, gens, rs, evaluation = select_places(curve, k, n, policy, seed, places)
    scheme = assemble_diagonal(curve, construction, gens, rs, evaluation, policy, seed)
    report = validate_rook_condition(scheme)
    if not report.passed:
        raise RookConditionViolated("; ".join(report.failures[:3]))
    return scheme


# -- encode / compute / decode ----------------------------------------------

def _check_batch(scheme, A, B):
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if A.ndim != 3 or B.ndim != 3:
        raise ShapeMismatch("A and B must be stacks of matrices (k, rows, cols)")
    if A.shape[0] != scheme.k or B.shape[0] != scheme.k:
        raise ShapeMismatch(f"expected {scheme.k} blocks, got {A.shape[0]} and {B.shape[0]}")
    if A.shape[2] != B.shape[1]:
        raise ShapeMismatch(f"inner dimensions differ: {A.shape} vs {B.shape}")
    return A, B


def coefficients(scheme, w):
    """``alpha_i^(w) = beta_i^(w) = x_i(Q_w)``."""
    return scheme.X[w].copy()


def encode_pair(scheme, A, B, w):
    if not 0 <= w < scheme.n:
        raise IndexError(f"worker {w} out of range")
    for arr, name in ((A, "A"), (B, "B")):
        shapes = {np.shape(a) for a in arr}
        if len(shapes) != 1:
            raise ShapeMismatch(f"{name} blocks have different shapes: {sorted(shapes)}")
    A, B = _check_batch(scheme, A, B)
    F = scheme.field
    return F.lincomb(scheme.X[w], A), F.lincomb(scheme.X[w], B)


def encode_all(scheme, A, B):
    A, B = _check_batch(scheme, A, B)
    F = scheme.field
    k = scheme.k
    At = F.matmul(scheme.X, A.reshape(k, -1)).reshape((scheme.n,) + A.shape[1:])
    Bt = F.matmul(scheme.X, B.reshape(k, -1)).reshape((scheme.n,) + B.shape[1:])
    return list(zip(At, Bt))


def worker_multiply(F, At, Bt):
    At = np.asarray(At, dtype=np.int64)
    Bt = np.asarray(Bt, dtype=np.int64)
    if At.ndim != 2 or Bt.ndim != 2 or At.shape[1] != Bt.shape[0]:
        raise ShapeMismatch(f"cannot multiply {At.shape} by {Bt.shape}")
    return F.matmul(At, Bt)


def functional_decodability(F, M_S, E):
    """``(ok, rank, needed)``: rows of ``E`` lie in the row space of ``M_S``."""
    if M_S.shape[0] == 0:
        needed = linalg.rank(F, E)
        return needed == 0, 0, needed
    R, piv = linalg.rref(F, M_S)
    resid = linalg.residual(F, R, piv, E)
    ok = not np.any(resid)
    needed = len(piv) + (0 if ok else linalg.rank(F, resid))
    return ok, len(piv), needed


def decodability(scheme, subset):
    idx = sorted(set(int(w) for w in subset))
    return functional_decodability(scheme.field, scheme.M[idx], scheme.E)


def _stack_responses(responses, n):
    if not responses:
        raise InsufficientResponses("no responses", rank=0, needed=None)
    idx = sorted(responses)
    if idx[0] < 0 or idx[-1] >= n:
        raise IndexError("worker index out of range")
    shapes = {np.shape(responses[w]) for w in idx}
    if len(shapes) != 1:
        raise ShapeMismatch(f"responses have different shapes: {sorted(shapes)}")
    shape = shapes.pop()
    Y = np.stack([np.asarray(responses[w], dtype=np.int64).reshape(-1) for w in idx])
    return idx, Y, shape


def interpolate_functionals(F, M_S, E, Y):
    """Solve ``M_S c = Y`` and return ``E c``; the interpolate-then-evaluate step."""
    ok, rk, needed = functional_decodability(F, M_S, E)
    if not ok:
        raise InsufficientResponses(
            f"responses have rank {rk}; determining the outputs needs {needed}",
            rank=rk, needed=needed)
    coeffs, consistent = linalg.solve(F, M_S, Y)
    if not consistent:
        raise InconsistentResponses("responses do not come from a single codeword")
    return F.matmul(E, coeffs)


def decode_batch(scheme, responses):
    """Recover ``[A_1 B_1, ..., A_k B_k]`` from ``{worker: response}``."""
    F = scheme.field
    idx, Y, shape = _stack_responses(responses, scheme.n)
    values = interpolate_functionals(F, scheme.M[idx], scheme.E, Y)
    scale = F.inv(F.mul(scheme.normalizers, scheme.normalizers))
    out = F.mul(scale[:, None], values)
    return out.reshape((scheme.k,) + tuple(shape))


# -- thresholds -------------------------------------------------------------

def guaranteed_threshold(scheme):
    """``R* = 2*sigma - 2*min(r) + 1``: products ``x_i x_j`` have pole degree at most
    ``2*sigma - r_i - r_j``, so that many zeros plus one pins them down."""
    return max(2 * scheme.sigma_hat - 2 * min(scheme.r) + 1, 1)


def pole_degree_certificate(curve, products):
    """Degree of the smallest divisor bounding the poles of every function given."""
    worst = {}
    for f in products:
        for P, a in curve.divisor_of(f).poles().coeffs.items():
            worst[P] = max(worst.get(P, 0), a)
    return sum(a * P.degree for P, a in worst.items())


@dataclass
class ThresholdResult:
    R_emp: int | None
    witness: tuple | None
    subsets_tested: int
    mode: str

    def to_dict(self):
        return {"R_emp": self.R_emp, "witness": None if self.witness is None else list(self.witness),
                "subsets_tested": self.subsets_tested, "mode": self.mode}


def subsets_of_size(n, size, mode="exhaustive", seed=0, trials=200):
    """Subsets of ``range(n)`` to test; the seeded draw depends only on ``(seed, size)``."""
    if mode == "exhaustive":
        return list(itertools.combinations(range(n), size))
    total = math.comb(n, size)
    if total <= trials:
        return list(itertools.combinations(range(n), size))
    rng = np.random.default_rng([seed, size])
    return [tuple(sorted(int(v) for v in rng.choice(n, size=size, replace=False)))
            for _ in range(trials)]


def empirical_threshold(scheme, mode="exhaustive", seed=0, trials=200):
    """Smallest ``R`` for which every tested ``R``-subset is decodable.

    Decodability is monotone in the responder set, so the search walks down
    from ``R*`` until a size fails.  The failing subset is returned as witness.
    """
    n = scheme.n
    if mode == "exhaustive" and n > EXHAUSTIVE_MAX_N:
        raise ValueError(f"exhaustive search needs n <= {EXHAUSTIVE_MAX_N}")
    if mode not in ("exhaustive", "monte_carlo"):
        raise ValueError(f"unknown mode {mode!r}")
    tested = 0

    def first_failure(size):
        nonlocal tested
        for S in subsets_of_size(n, size, mode, seed, trials):
            tested += 1
            if not scheme.is_decodable(S):
                return S
        return None

    size = min(scheme.threshold, n)
    witness = first_failure(size)
    while witness is not None:
        if size == n:
            return ThresholdResult(None, witness, tested, mode)
        size += 1
        witness = first_failure(size)
    while size > 0:
        witness = first_failure(size - 1)
        if witness is not None:
            return ThresholdResult(size, witness, tested, mode)
        size -= 1
    return ThresholdResult(0, None, tested, mode)


# -- validation -------------------------------------------------------------

@dataclass
class RookReport:
    passed: bool
    failures: list

    def __bool__(self):
        return self.passed


def validate_rook_condition(scheme):
    """Check the rook support pattern, the divisor-sum identity and the
    valuation form on the construction places, plus place disjointness."""
    curve, k, xs, F = scheme.curve, scheme.k, scheme.xs, scheme.field
    fails = []
    P = scheme.construction
    if len(set(P)) != len(P):
        fails.append("construction places are not distinct")
    if set(P) & set(scheme.evaluation):
        fails.append("construction and evaluation places overlap")
    blocked = set().union(*(curve.divisor_of(z).support for z in scheme.generators))
    bad = blocked & set(scheme.evaluation)
    if bad:
        fails.append(f"evaluation places in generator support: {sorted(Q.serialize(F) for Q in bad)}")
    vals = [[curve.valuation(x, Pl) for Pl in P] for x in xs]
    for i, j, l in itertools.product(range(k), repeat=3):
        v = curve.valuation(xs[i] * xs[j], P[l])
        diag = i == j == l
        if (v == 0) != diag or v < 0:
            fails.append(f"v_P{l}(x{i} x{j}) = {v}")
        if (vals[i][l] + vals[j][l] == 2 * vals[l][l]) != diag:
            fails.append(f"valuation form fails at (i, j, l) = ({i}, {j}, {l})")
    for i, j in itertools.product(range(k), repeat=2):
        if curve.divisor_of(xs[i] * xs[j]) != curve.divisor_of(xs[i]) + curve.divisor_of(xs[j]):
            fails.append(f"(x{i} x{j}) != (x{i}) + (x{j})")
    if np.any(scheme.normalizers == 0):
        fails.append("some x_i vanishes at its own construction place")
    cert = pole_degree_certificate(curve, [a * b for a in xs for b in xs])
    if cert + 1 > scheme.threshold:
        fails.append(f"pole degree {cert} exceeds the threshold budget {scheme.threshold - 1}")
    return RookReport(not fails, fails)


def threshold_bounds(scheme, ell=2):
    """Named inequalities between the computed threshold and the genus bounds.

    Values are ``(lhs, rhs, holds)``; the true-minimum bound is only reported
    when every generator attains the Weierstrass multiplicity.
    """
    g, k, sigma, R = scheme.genus, scheme.k, scheme.sigma_hat, scheme.threshold
    out = {
        "R* <= ell*sigma": (R, ell * sigma, R <= ell * sigma),
        "sigma <= (g+2)k": (sigma, (g + 2) * k, sigma <= (g + 2) * k),
        "k <= R*": (k, R, k <= R),
    }
    if scheme.true_mu:
        out["sigma <= (g+1)k"] = (sigma, (g + 1) * k, sigma <= (g + 1) * k)
        out["R* <= ell(g+1)k"] = (R, ell * (g + 1) * k, R <= ell * (g + 1) * k)
    return out
