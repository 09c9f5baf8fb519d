"""
More workers than field elements
================================

A genus-0 code over GF(9) tops out at ten evaluation places.  The Hermitian
curve over the same field has 28 rational places, so 20 workers fit.
"""

import numpy as np

from agrook import runtime_sim as rs
from agrook.errors import NotEnoughPlaces
from agrook.function_field import Curve
from agrook.rook_diagonal import build_diagonal, decode_batch, encode_all

try:
    build_diagonal(Curve.parse("rational/q=9"), 3, 20)
except NotEnoughPlaces as exc:
    print("projective line:", exc)

herm = Curve.parse("hermitian/q0=3")
print(f"Hermitian: genus {herm.genus}, {len(herm.rational_places())} rational places")

scheme = build_diagonal(herm, 3, 20)
print(f"n={scheme.n}, sigma_hat={scheme.sigma_hat}, R*={scheme.threshold}")

###############################################################################
# Full round trip.

F = scheme.field
rng = np.random.default_rng(3)
A, B = F.random(rng, (3, 2, 2)), F.random(rng, (3, 2, 2))
responses = {w: F.matmul(a, b) for w, (a, b) in enumerate(encode_all(scheme, A, B))}
keep = sorted(rng.choice(scheme.n, size=scheme.threshold, replace=False).tolist())
out = decode_batch(scheme, {w: responses[w] for w in keep})
print("decoded from", keep, ":", np.array_equal(out, np.stack([F.matmul(a, b) for a, b in zip(A, B)])))

###############################################################################
# C(20, 17) is small, but Monte-Carlo is what scales.

print(rs.certify_adversarial(scheme, scheme.threshold, mode="monte_carlo", trials=100, seed=3))
