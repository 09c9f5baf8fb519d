"""
Evaluating a polynomial through sums of powers
==============================================

Start from a truth table, interpolate it, find a sum of squares of linear
forms, and evaluate it on coded workers.
"""

import itertools

from agrook.function_field import Curve
from agrook.galois import field_make
from agrook.tensor_power import (
    Infeasible,
    MultivariatePoly,
    TruthTable,
    all_inputs,
    build_power_scheme,
    interpolate,
    waring_bruteforce,
)

F5 = field_make(5)
table = TruthTable.from_function(F5, 2, lambda a, b: a * b % 5)
[poly] = interpolate(table)
print("interpolated:", poly)

###############################################################################
# Search for x1*x2 as a sum of squares.

decomp = waring_bruteforce(poly, ell=2, max_rank=3)
print("rank", decomp.rank, "forms", decomp.forms.tolist())

###############################################################################
# Two squares need three responses.  The curve lives over GF(25), the data
# stays in GF(5).

scheme = build_power_scheme(Curve.parse("rational/q=25"), decomp, n=8)
print(f"n={scheme.n}, R*={scheme.threshold}")
bad = 0
for v, fv in zip(all_inputs(F5, 2), table.values[:, 0]):
    payload = scheme.encode(v)
    resp = {w: scheme.compute(payload[w]) for w in range(scheme.n)}
    for S in itertools.combinations(range(scheme.n), scheme.threshold):
        bad += scheme.decode({w: resp[w] for w in S})[1] != fv
print("wrong decodes:", bad)

###############################################################################
# In characteristic two squaring is additive, so no sum of squares of
# linear forms gives x1*x2.

F2 = field_make(2)
print(isinstance(waring_bruteforce(MultivariatePoly(F2, 2, {(1, 1): 1}), 2, 3), Infeasible))
