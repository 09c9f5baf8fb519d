"""Master/worker straggler simulation on top of any built scheme.

Stragglers are erasures: a worker either returns its exact result or nothing.
Everything is sequential and seeded, so reports are reproducible byte for byte.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import InconsistentResponses, InsufficientResponses, SearchSpaceTooLarge

EXHAUSTIVE_LIMIT = 2 ** 22


@dataclass(frozen=True)
class FixedSet:
    responders: tuple

    def draw(self, n, trial=0):
        bad = [w for w in self.responders if not 0 <= w < n]
        if bad:
            raise ValueError(f"responders {bad} are outside range({n})")
        return tuple(sorted(set(self.responders)))


@dataclass(frozen=True)
class Bernoulli:
    p_respond: float
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p_respond <= 1.0:
            raise ValueError("p_respond must lie in [0, 1]")

    def draw(self, n, trial=0):
        rng = np.random.default_rng([self.seed, trial])
        return tuple(int(w) for w in np.flatnonzero(rng.random(n) < self.p_respond))


@dataclass(frozen=True)
class ExhaustiveAdversary:
    """Plays every ``size``-subset in turn; ``trial`` indexes the subset."""

    size: int

    def draw(self, n, trial=0):
        return next(itertools.islice(itertools.combinations(range(n), self.size), trial, None))


def output_digest(output):
    """sha256 over the canonical int64 bytes of a decoded output."""
    h = hashlib.sha256()
    parts = output if isinstance(output, tuple) else (output,)
    for part in parts:
        arr = np.ascontiguousarray(np.asarray(part, dtype=np.int64))
        h.update(repr(arr.shape).encode())
        h.update(arr.tobytes())
    return h.hexdigest()


def _scheme_id(scheme):
    blob = json.dumps(scheme.to_dict(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


@dataclass
class RunReport:
    scheme_id: str
    responders: tuple
    success: bool
    digest: str | None
    correct: bool | None
    witness: tuple | None
    trials: int
    wall_clock: float
    error: str = ""

    def to_dict(self, include_timing=False):
        d = {
            "scheme_id": self.scheme_id,
            "responders": list(self.responders),
            "success": self.success,
            "digest": self.digest,
            "correct": self.correct,
            "witness": None if self.witness is None else list(self.witness),
            "trials": self.trials,
            "error": self.error,
        }
        if include_timing:
            d["wall_clock"] = self.wall_clock
        return d

    def to_json(self, include_timing=False):
        return json.dumps(self.to_dict(include_timing), sort_keys=True)


def simulate_run(scheme, inputs, model, trial=0):
    """Encode, let the responders compute, decode.

    ``correct`` compares the decoded output with the scheme's direct oracle.
    """
    start = time.perf_counter()
    responders = model.draw(scheme.n, trial)
    sid = _scheme_id(scheme)
    payloads = scheme.encode(inputs)
    responses = {w: scheme.compute(payloads[w]) for w in responders}
    try:
        out = scheme.decode(responses)
    except (InsufficientResponses, InconsistentResponses) as exc:
        return RunReport(sid, responders, False, None, None,
                         responders if isinstance(model, ExhaustiveAdversary) else None,
                         1, time.perf_counter() - start, type(exc).__name__)
    expected = scheme.expected_output(inputs)
    correct = output_digest(out) == output_digest(expected)
    return RunReport(sid, responders, True, output_digest(out), correct, None, 1,
                     time.perf_counter() - start)


@dataclass
class CurvePoint:
    m: int
    success_rate: float
    trials: int
    seed: int


def success_curve(scheme, trials, seed=0, inputs=None):
    """Decode-success rate for seeded uniform ``m``-subsets, ``m = 1..n``.

    Without ``inputs`` success is decided by the rank test and no payloads
    are generated.  With ``inputs`` every subset is run end to end and only
    correct decodes count.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    n = scheme.n
    points = []
    for m in range(1, n + 1):
        rng = np.random.default_rng([seed, m])
        subsets = [tuple(sorted(int(v) for v in rng.choice(n, size=m, replace=False)))
                   for _ in range(trials)]
        if inputs is None:
            ok = sum(1 for S in subsets if scheme.is_decodable(S))
        else:
            ok = sum(1 for S in subsets
                     if simulate_run(scheme, inputs, FixedSet(S)).correct)
        points.append(CurvePoint(m, ok / trials, trials, seed))
    return points


def curve_to_csv(points):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "success_rate", "trials", "seed"])
    for p in points:
        w.writerow([p.m, f"{p.success_rate:.6f}", p.trials, p.seed])
    return buf.getvalue()


def curve_from_csv(text):
    rows = list(csv.DictReader(io.StringIO(text)))
    return [CurvePoint(int(r["m"]), float(r["success_rate"]), int(r["trials"]), int(r["seed"]))
            for r in rows]


@dataclass
class Certified:
    size: int
    subsets_checked: int
    mode: str

    status = "certified"

    def to_dict(self):
        return {"size": self.size, "status": self.status}


@dataclass
class Witness:
    size: int
    subset: tuple
    subsets_checked: int
    mode: str

    status = "witness"

    def to_dict(self):
        return {"size": self.size, "status": self.status, "witness": list(self.subset)}


def certification_to_json(result):
    return json.dumps(result.to_dict(), sort_keys=True)


def certification_from_json(text):
    d = json.loads(text)
    if d["status"] == "certified":
        return Certified(int(d["size"]), 0, "")
    return Witness(int(d["size"]), tuple(d["witness"]), 0, "")


def certify_adversarial(scheme, size, mode="exhaustive", trials=200, seed=0):
    """Check every (or ``trials`` seeded) ``size``-subsets for decodability.

    Only the exhaustive mode proves that ``size`` is a recovery threshold.
    """
    n = scheme.n
    if not 0 <= size <= n:
        raise ValueError(f"size must lie in [0, {n}]")
    if mode == "exhaustive":
        if math.comb(n, size) > EXHAUSTIVE_LIMIT:
            raise SearchSpaceTooLarge(f"C({n}, {size}) subsets exceed {EXHAUSTIVE_LIMIT}")
        subsets = itertools.combinations(range(n), size)
    elif mode == "monte_carlo":
        rng = np.random.default_rng([seed, size])
        subsets = (tuple(sorted(int(v) for v in rng.choice(n, size=size, replace=False)))
                   for _ in range(trials))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    checked = 0
    for S in subsets:
        checked += 1
        if not scheme.is_decodable(S):
            return Witness(size, tuple(S), checked, mode)
    return Certified(size, checked, mode)
