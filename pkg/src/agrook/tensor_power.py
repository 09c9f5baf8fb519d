"""Coded evaluation of arbitrary functions over a finite field.

Pipeline: truth table -> reduced multivariate polynomial -> sum of l-th
powers of affine forms (a symmetric decomposition) -> diagonal rook code in
which every worker raises one coded scalar to the l-th power.

Inputs ``a`` in ``GF(q)^t`` are enumerated in lexicographic order of their
element codes, first variable slowest.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _upoly
from .errors import RookConditionViolated, SearchSpaceTooLarge, ShapeMismatch
from .function_field import product
from .rook_diagonal import (
    _value_or_zero,
    functional_decodability,
    interpolate_functionals,
    rook_functions,
    select_places,
)

SEARCH_LIMIT = 2 ** 24


def all_inputs(F, t):
    """``(q^t, t)`` array of every input vector."""
    if t == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product(range(F.q), repeat=t)), dtype=np.int64)


def _code(F, c):
    """Element code; plain ints are codes here, not integers mod p."""
    if isinstance(c, (int, np.integer)):
        if not 0 <= int(c) < F.q:
            raise ValueError(f"element code {c} out of range for {F}")
        return int(c)
    return F.coerce(c)


def _reduce_exponent(e, q):
    # x^q = x as functions on GF(q)
    return e if e < q else (e - 1) % (q - 1) + 1


@dataclass
class MultivariatePoly:
    field: object
    t: int
    terms: dict = dc_field(default_factory=dict)   # exponent tuple -> coefficient code

    def __post_init__(self):
        F = self.field
        acc = {}
        for exps, c in self.terms.items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != self.t:
                raise ShapeMismatch(f"exponent {exps} does not have {self.t} entries")
            key = tuple(_reduce_exponent(e, F.q) for e in exps)
            acc[key] = F.add(acc.get(key, 0), _code(F, c))
        self.terms = {k: v for k, v in sorted(acc.items()) if v != 0}

    @property
    def degree(self):
        return max((sum(k) for k in self.terms), default=0)

    def evaluate(self, points):
        F = self.field
        points = np.atleast_2d(np.asarray(points, dtype=np.int64))
        out = np.zeros(points.shape[0], dtype=np.int64)
        for exps, c in self.terms.items():
            term = np.full(points.shape[0], c, dtype=np.int64)
            for j, e in enumerate(exps):
                if e:
                    term = F.mul(term, F.pow(points[:, j], e))
            out = F.add(out, term)
        return out

    def values(self):
        return self.evaluate(all_inputs(self.field, self.t))

    def __eq__(self, other):
        return (isinstance(other, MultivariatePoly) and self.field == other.field
                and self.t == other.t and self.terms == other.terms)

    def to_lines(self):
        F = self.field
        return [",".join(map(str, k)) + ":" + F.format(c) for k, c in self.terms.items()]

    @classmethod
    def from_lines(cls, F, lines, t=None):
        terms = {}
        for line in lines:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            exps, coeff = line.split(":", 1)
            key = tuple(int(e) for e in exps.split(","))
            if t is None:
                t = len(key)
            terms[key] = F.add(terms.get(key, 0), F.parse(coeff))
        return cls(F, t or 0, terms)

    def __str__(self):
        F = self.field
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.terms.items():
            mono = "*".join(f"x{j + 1}" + ("" if e == 1 else f"^{e}")
                            for j, e in enumerate(exps) if e)
            coef = F.format(c)
            parts.append(mono if coef == "1" and mono else (f"{coef}*{mono}" if mono else coef))
        return " + ".join(parts)


@dataclass
class TruthTable:
    field: object
    t: int
    values: np.ndarray        # (q^t, u)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64)
        if self.values.ndim == 1:
            self.values = self.values[:, None]
        if self.values.shape[0] != self.field.q ** self.t:
            raise ShapeMismatch(f"table needs {self.field.q ** self.t} rows")

    @property
    def u(self):
        return self.values.shape[1]

    @classmethod
    def from_function(cls, F, t, func):
        pts = all_inputs(F, t)
        return cls(F, t, np.array([np.atleast_1d(func(*p)) for p in pts], dtype=np.int64))

    def write_csv(self, path):
        F = self.field
        outs = ["out"] if self.u == 1 else [f"out{j + 1}" for j in range(self.u)]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"in{j + 1}" for j in range(self.t)] + outs)
            for p, row in zip(all_inputs(F, self.t), self.values):
                w.writerow([int(v) for v in p] + [int(v) for v in row])

    @classmethod
    def read_csv(cls, F, path):
        """Read ``in1,...,int,out...`` rows (element codes); rows may come in any order."""
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], rows[1:]
        t = sum(1 for h in header if h.startswith("in"))
        u = len(header) - t
        if u < 1:
            raise ValueError("truth table needs at least one output column")
        table = {}
        for row in body:
            vals = [int(v) for v in row]
            if any(not 0 <= v < F.q for v in vals):
                raise ValueError(f"value out of range in row {row}")
            table[tuple(vals[:t])] = vals[t:]
        pts = all_inputs(F, t)
        missing = [tuple(p) for p in pts if tuple(int(v) for v in p) not in table]
        if missing:
            raise ValueError(f"truth table is incomplete, e.g. {missing[0]}")
        return cls(F, t, np.array([table[tuple(int(v) for v in p)] for p in pts]))


def indicator_matrix(F):
    """Row ``a`` holds the coefficients of ``1 - (x - a)^(q-1)``."""
    q = F.q
    D = np.zeros((q, q), dtype=np.int64)
    for a in range(q):
        poly = _upoly.sub(F, [1], _upoly.power(F, [F.neg(a), 1], q - 1))
        D[a, :len(poly)] = poly
    return D


def interpolate(table):
    """One reduced polynomial per output column, matching the table everywhere."""
    F, t, q = table.field, table.t, table.field.q
    D = indicator_matrix(F)
    polys = []
    for col in range(table.u):
        C = table.values[:, col].reshape((q,) * t) if t else table.values[:, col].copy()
        for axis in range(t):
            moved = np.moveaxis(C, axis, -1)
            shape = moved.shape
            moved = F.matmul(moved.reshape(-1, q), D).reshape(shape)
            C = np.moveaxis(moved, -1, axis)
        if t == 0:
            terms = {(): int(C[0])}
        else:
            terms = {tuple(int(e) for e in idx): int(C[idx]) for idx in zip(*np.nonzero(C))}
        polys.append(MultivariatePoly(F, t, terms))
    return polys


# -- symmetric decompositions -------------------------------------------------

@dataclass
class SymmetricDecomposition:
    """``sum_i (w_i . (x, 1))^ell``; ``forms`` is ``(k, t+1)``."""

    field: object
    ell: int
    forms: np.ndarray

    def __post_init__(self):
        forms = np.asarray(self.forms, dtype=np.int64)
        if forms.ndim != 2:
            raise ShapeMismatch("forms must be a (k, t+1) array")
        self.forms = forms

    @property
    def rank(self):
        return self.forms.shape[0]

    @property
    def t(self):
        return self.forms.shape[1] - 1

    def form_values(self, points):
        """``(len(points), k)`` array of ``w_i(a)``."""
        F = self.field
        points = np.atleast_2d(np.asarray(points, dtype=np.int64))
        homog = np.hstack([points, np.ones((points.shape[0], 1), dtype=np.int64)])
        if self.rank == 0:
            return np.zeros((points.shape[0], 0), dtype=np.int64)
        return F.matmul(homog, self.forms.T)

    def evaluate(self, points):
        F = self.field
        vals = F.pow(self.form_values(points), self.ell)
        if self.rank == 0:
            return np.zeros(vals.shape[0], dtype=np.int64)
        return F.sum(vals, axis=1)

    def to_lines(self):
        return [str(self.ell), str(self.rank)] + [",".join(str(int(v)) for v in row)
                                                  for row in self.forms]

    @classmethod
    def from_lines(cls, F, lines):
        lines = [ln.strip() for ln in lines if ln.strip() and not ln.startswith("#")]
        ell, k = int(lines[0]), int(lines[1])
        rows = [[_code(F, int(v)) for v in ln.split(",")] for ln in lines[2:2 + k]]
        if len(rows) != k or len({len(r) for r in rows}) > 1:
            raise ValueError(f"expected {k} forms of equal length")
        return cls(F, ell, np.array(rows, dtype=np.int64).reshape(k, -1))


@dataclass
class Infeasible:
    max_rank: int
    candidates: int


@dataclass
class DecompositionCheck:
    passed: bool
    witness: tuple | None = None

    def __bool__(self):
        return self.passed


def verify_decomposition(poly, decomp):
    F = poly.field
    pts = all_inputs(F, poly.t)
    if decomp.rank and decomp.t != poly.t:
        return DecompositionCheck(False, None)
    bad = np.flatnonzero(poly.evaluate(pts) != decomp.evaluate(pts))
    if bad.size:
        return DecompositionCheck(False, tuple(int(v) for v in pts[bad[0]]))
    return DecompositionCheck(True)


def waring_bruteforce(poly, ell, max_rank):
    """Smallest-rank decomposition by exhaustive search over form tuples.

    Returns :class:`SymmetricDecomposition` or :class:`Infeasible` when none
    exists with at most ``max_rank`` forms.
    """
    F, t = poly.field, poly.t
    if poly.degree > ell:
        raise ValueError(f"polynomial has degree {poly.degree} > {ell}")
    pts = all_inputs(F, t)
    target = poly.evaluate(pts)
    forms = all_inputs(F, t + 1)[1:]                # nonzero forms
    dummy = SymmetricDecomposition(F, ell, forms)
    powers = F.pow(dummy.form_values(pts).T, ell)   # (N, q^t)
    lookup = {}
    for idx, row in enumerate(powers):
        lookup.setdefault(row.tobytes(), idx)
    checked = 0
    if not np.any(target):
        return SymmetricDecomposition(F, ell, np.zeros((0, t + 1), dtype=np.int64))
    for rank in range(1, max_rank + 1):
        if (F.q ** (t + 1)) ** rank > SEARCH_LIMIT:
            raise SearchSpaceTooLarge(f"rank {rank} search over {F.q ** (t + 1)} forms is too large")
        for combo in itertools.combinations_with_replacement(range(len(forms)), rank - 1):
            checked += 1
            partial = F.sum(powers[list(combo)], axis=0) if combo else np.zeros_like(target)
            rest = F.sub(target, partial)
            hit = lookup.get(np.asarray(rest, dtype=np.int64).tobytes())
            if hit is not None and (not combo or hit >= combo[-1]):
                chosen = forms[list(combo) + [hit]]
                return SymmetricDecomposition(F, ell, chosen)
    return Infeasible(max_rank, checked)


# -- the coded scheme ---------------------------------------------------------

@dataclass
class PowerScheme:
    curve: object
    decomposition: SymmetricDecomposition
    construction: list
    generators: list
    r: list
    xs: list
    normalizers: np.ndarray
    evaluation: list
    X: np.ndarray              # (n, k)
    monomials: list            # multisets of size ell over range(k)
    M: np.ndarray              # (n, len(monomials))
    E: np.ndarray              # (k, len(monomials))
    policy: str = "canonical"
    seed: int | None = None
    kind: str = dc_field(default="power", init=False)

    @property
    def field(self):
        return self.curve.field

    @property
    def ell(self):
        return self.decomposition.ell

    @property
    def k(self):
        return self.decomposition.rank

    @property
    def n(self):
        return len(self.evaluation)

    @property
    def sigma_hat(self):
        return sum(self.r)

    @property
    def genus(self):
        return self.curve.genus

    @property
    def true_mu(self):
        return all(self.curve.is_true_min_pole(P) for P in self.construction)

    @property
    def threshold(self):
        return max(self.ell * (self.sigma_hat - min(self.r)) + 1, 1)

    def encode(self, v):
        return [encode_power(self, v, w) for w in range(self.n)]

    def compute(self, payload):
        return worker_power(self, payload)

    def decode(self, responses):
        return decode_power(self, responses)

    def is_decodable(self, subset):
        idx = sorted(set(int(w) for w in subset))
        return functional_decodability(self.field, self.M[idx], self.E)[0]

    def random_inputs(self, rng):
        return self.decomposition.field.random(rng, self.decomposition.t)

    def expected_output(self, v):
        F = self.field
        vals = F.pow(self.decomposition.form_values(v)[0], self.ell)
        return vals, int(F.sum(vals)) if len(vals) else 0

    def to_dict(self):
        F = self.field
        return {
            "kind": "power",
            "curve": self.curve.descriptor(),
            "ell": self.ell,
            "k": self.k,
            "forms": self.decomposition.forms.tolist(),
            "n": self.n,
            "policy": self.policy,
            "seed": self.seed,
            "construction_places": [P.serialize(F) for P in self.construction],
            "evaluation_places": [P.serialize(F) for P in self.evaluation],
            "r_list": list(self.r),
            "sigma_hat": self.sigma_hat,
            "R_star": self.threshold,
            "genus": self.genus,
        }


def _check_data_field(curve_field, data_field):
    if data_field == curve_field:
        return
    if data_field.m == 1 and data_field.p == curve_field.p:
        return  # prime subfield: element codes coincide
    raise ValueError(f"cannot embed {data_field} into {curve_field}")


def build_power_scheme(curve, decomp, n=None, policy="canonical", seed=None, places=None):
    F = curve.field
    _check_data_field(F, decomp.field)
    k, ell = decomp.rank, decomp.ell
    construction, gens, rs, evaluation = select_places(curve, k, n, policy, seed, places)
    xs = rook_functions(curve, gens)
    normalizers = np.array([_value_or_zero(curve, x, P) for x, P in zip(xs, construction)],
                           dtype=np.int64)
    X = np.array([[curve.value(x, Q) for x in xs] for Q in evaluation],
                 dtype=np.int64).reshape(len(evaluation), k)
    monomials = list(itertools.combinations_with_replacement(range(k), ell))
    M = np.ones((len(evaluation), len(monomials)), dtype=np.int64)
    E = np.zeros((k, len(monomials)), dtype=np.int64)
    for c, mono in enumerate(monomials):
        for i in mono:
            M[:, c] = F.mul(M[:, c], X[:, i])
        f = product(F, [xs[i] for i in mono])
        for i, P in enumerate(construction):
            E[i, c] = _value_or_zero(curve, f, P)
    scheme = PowerScheme(curve, decomp, construction, gens, rs, xs, normalizers, evaluation,
                         X, monomials, M, E, policy, seed)
    report = validate_tensor_rook_condition(scheme)
    if not report[0]:
        raise RookConditionViolated(report[1])
    return scheme


def validate_tensor_rook_condition(scheme, max_tuples=None):
    """``v_{P_m}(x_{i_1} ... x_{i_l}) == 0`` exactly when every ``i_j == m``; otherwise > 0."""
    curve, F, k = scheme.curve, scheme.field, scheme.k
    tuples = itertools.product(range(k), repeat=scheme.ell)
    for count, tup in enumerate(tuples):
        if max_tuples is not None and count >= max_tuples:
            break
        f = product(F, [scheme.xs[i] for i in tup])
        for m, P in enumerate(scheme.construction):
            v = curve.valuation(f, P)
            if (v == 0) != all(i == m for i in tup) or v < 0:
                return False, f"v_P{m}(prod x{tup}) = {v}"
    if np.any(scheme.normalizers == 0):
        return False, "some x_i vanishes at its own construction place"
    return True, ""


def encode_power(scheme, v, w):
    """``w~(Q_w) = sum_i w_i(v) x_i(Q_w)``."""
    F = scheme.field
    v = np.asarray(v, dtype=np.int64)
    if v.shape != (scheme.decomposition.t,):
        raise ShapeMismatch(f"input must have {scheme.decomposition.t} entries")
    wv = scheme.decomposition.form_values(v)[0]
    return int(F.sum(F.mul(wv, scheme.X[w]))) if scheme.k else 0


def worker_power(scheme, value):
    return scheme.field.pow(int(value), scheme.ell)


def decode_power(scheme, responses):
    """``([w_i(v)^l for i], f(v))`` from ``{worker: w~(Q_w)^l}``."""
    F = scheme.field
    if not responses:
        from .errors import InsufficientResponses
        raise InsufficientResponses("no responses", rank=0)
    idx = sorted(responses)
    Y = np.array([[int(responses[w])] for w in idx], dtype=np.int64)
    vals = interpolate_functionals(F, scheme.M[idx], scheme.E, Y)[:, 0]
    vals = F.mul(vals, F.inv(F.pow(scheme.normalizers, scheme.ell)))
    return vals, int(F.sum(vals))
