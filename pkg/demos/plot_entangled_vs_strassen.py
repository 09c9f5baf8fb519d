"""
One block product, two ways to code it
======================================

A 2x2 by 2x2 block product can be coded directly with exponent maps or by
running Strassen's seven products through a batch code.  The direct route
needs fewer responses.
"""

import numpy as np

from agrook import runtime_sim as rs
from agrook.function_field import Curve
from agrook.mm_tensors import MatmulScheme, block_matmul, strassen_2x2x2
from agrook.rook_diagonal import build_diagonal, empirical_threshold
from agrook.rook_entangled import build_entangled

ent = build_entangled(Curve.parse("rational/q=13"), None, 2, 2, 2, n=12)
print("entangled: R* =", ent.threshold, " measured:", empirical_threshold(ent).R_emp)

base = build_diagonal(Curve.parse("rational/q=289"), 7, 16)
strassen = MatmulScheme(base, strassen_2x2x2(base.field))
print("strassen over a batch code: R* =", strassen.threshold)

###############################################################################
# Both decode the same product from random survivors.

F = ent.field
rng = np.random.default_rng(4)
A, B = F.random(rng, (2, 2, 2, 2)), F.random(rng, (2, 2, 2, 2))
payloads = ent.encode((A, B))
resp = {w: ent.compute(payloads[w]) for w in rng.choice(ent.n, ent.threshold, replace=False)}
print("entangled correct:", np.array_equal(ent.decode(resp), block_matmul(F, A, B)))

###############################################################################
# Side by side under Bernoulli stragglers.

for p in (0.6, 0.8, 0.9):
    rates = []
    for s in (ent, strassen):
        inputs = s.random_inputs(np.random.default_rng(0), (2, 2, 2))
        runs = [rs.simulate_run(s, inputs, rs.Bernoulli(p, seed=11), t) for t in range(40)]
        rates.append(sum(r.success for r in runs) / len(runs))
    print(f"p_respond={p}: entangled {rates[0]:.2f}, strassen {rates[1]:.2f}")
