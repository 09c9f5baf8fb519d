import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from agrook import tensor_power as tp
from agrook.errors import (
    InsufficientResponses,
    NotEnoughPlaces,
    SearchSpaceTooLarge,
    ShapeMismatch,
)
from agrook.function_field import Curve
from agrook.galois import field_make
from agrook.rook_diagonal import empirical_threshold, threshold_bounds
from agrook.tensor_power import (
    Infeasible,
    MultivariatePoly,
    SymmetricDecomposition,
    TruthTable,
    all_inputs,
    build_power_scheme,
    decode_power,
    encode_power,
    interpolate,
    verify_decomposition,
    waring_bruteforce,
    worker_power,
)

F2, F3, F5, F7 = (field_make(p) for p in (2, 3, 5, 7))
X1X2_5 = MultivariatePoly(F5, 2, {(1, 1): 1})
RANK2_5 = SymmetricDecomposition(F5, 2, [[2, 2, 0], [1, 4, 0]])


def brute_table(F, t, func):
    return np.array([func(*a) for a in itertools.product(range(F.q), repeat=t)])


# -- polynomials and tables ------------------------------------------------------------

def test_exponent_reduction():
    p = MultivariatePoly(F3, 1, {(3,): 1, (5,): 2, (0,): 0})
    assert p.terms == {}                 # x^3 = x^5 = x on GF(3), and 1 + 2 = 0
    q = MultivariatePoly(F3, 1, {(3,): 1, (1,): 2})
    assert q.terms == {}
    r = MultivariatePoly(F3, 1, {(4,): 1})
    assert r.terms == {(2,): 1}
    assert all(all(e < 3 for e in k) for k in p.terms)


def test_poly_file_roundtrip():
    p = MultivariatePoly(F5, 3, {(1, 0, 2): 3, (0, 0, 0): 4, (4, 4, 1): 1})
    lines = p.to_lines()
    assert "1,0,2:3" in lines
    assert MultivariatePoly.from_lines(F5, lines) == p


def test_poly_str():
    assert str(MultivariatePoly(F5, 2, {(1, 1): 1, (0, 0): 2})) == "2 + x1*x2"


def test_and_gate():
    table = TruthTable.from_function(F2, 2, lambda a, b: a & b)
    [p] = interpolate(table)
    assert p.terms == {(1, 1): 1}


def test_constant_table():
    table = TruthTable(F5, 2, np.full(25, 3))
    [p] = interpolate(table)
    assert p.terms == {(0, 0): 3}


@pytest.mark.parametrize("seed", range(20))
def test_random_gf3_functions(seed):
    rng = np.random.default_rng(seed)
    table = TruthTable(F3, 2, F3.random(rng, 9))
    [p] = interpolate(table)
    assert np.array_equal(p.values(), table.values[:, 0])


@pytest.mark.parametrize("q,t", [(2, 3), (4, 2), (5, 2), (9, 1), (7, 2)])
def test_interpolation_is_inverse_of_evaluation(q, t):
    from agrook.galois import field_from_order
    F = field_from_order(q)
    rng = np.random.default_rng(q * 10 + t)
    table = TruthTable(F, t, F.random(rng, (q ** t, 2)))
    polys = interpolate(table)
    assert len(polys) == 2
    for j, p in enumerate(polys):
        assert np.array_equal(p.values(), table.values[:, j])
        assert all(max(k) < q for k in p.terms)


@given(st.lists(st.integers(0, 4), min_size=25, max_size=25))
def test_interpolate_evaluate_identity_gf5(vals):
    table = TruthTable(F5, 2, np.array(vals))
    [p] = interpolate(table)
    assert np.array_equal(p.values(), table.values[:, 0])


def test_truth_table_csv_roundtrip(tmp_path):
    table = TruthTable.from_function(F3, 2, lambda a, b: (a * b + 1) % 3)
    path = tmp_path / "t.csv"
    table.write_csv(path)
    assert path.read_text().splitlines()[0] == "in1,in2,out"
    back = TruthTable.read_csv(F3, path)
    assert np.array_equal(back.values, table.values)


def test_truth_table_incomplete(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("in1,in2,out\n0,0,1\n")
    with pytest.raises(ValueError):
        TruthTable.read_csv(F3, path)
    with pytest.raises(ShapeMismatch):
        TruthTable(F3, 2, np.zeros(8))


# -- decompositions -----------------------------------------------------------------------

def test_known_rank2_decomposition():
    assert verify_decomposition(X1X2_5, RANK2_5)


def test_waring_x1x2_gf5():
    d = waring_bruteforce(X1X2_5, 2, 3)
    assert isinstance(d, SymmetricDecomposition) and d.rank == 2
    assert verify_decomposition(X1X2_5, d)


def test_waring_zero_polynomial():
    d = waring_bruteforce(MultivariatePoly(F5, 2, {}), 2, 2)
    assert d.rank == 0
    assert verify_decomposition(MultivariatePoly(F5, 2, {}), d)


def test_waring_gf2_infeasible():
    res = waring_bruteforce(MultivariatePoly(F2, 2, {(1, 1): 1}), 2, 3)
    assert isinstance(res, Infeasible) and res.max_rank == 3


def test_waring_search_limit():
    p = MultivariatePoly(F7, 3, {(1, 1, 0): 1})
    with pytest.raises(SearchSpaceTooLarge):
        waring_bruteforce(p, 2, 5)


def test_waring_degree_check():
    with pytest.raises(ValueError):
        waring_bruteforce(MultivariatePoly(F5, 1, {(3,): 1}), 2, 2)


def test_waring_finds_minimal_rank_for_square():
    p = MultivariatePoly(F7, 1, {(2,): 1, (1,): 2, (0,): 1})     # (x + 1)^2
    d = waring_bruteforce(p, 2, 2)
    assert d.rank == 1 and verify_decomposition(p, d)


def test_corrupted_decomposition_fails():
    bad = SymmetricDecomposition(F5, 2, [[2, 2, 0], [1, 4, 1]])
    res = verify_decomposition(X1X2_5, bad)
    assert not res and res.witness is not None
    a = np.array(res.witness)
    assert X1X2_5.evaluate(a)[0] != bad.evaluate(a)[0]


def test_decomposition_file_roundtrip():
    lines = RANK2_5.to_lines()
    assert lines[:2] == ["2", "2"]
    back = SymmetricDecomposition.from_lines(F5, lines)
    assert np.array_equal(back.forms, RANK2_5.forms) and back.ell == 2


# -- power schemes --------------------------------------------------------------------------

@pytest.fixture(scope="module")
def power25():
    return build_power_scheme(Curve.parse("rational/q=25"), RANK2_5, n=8)


def test_power_scheme_threshold(power25):
    assert power25.threshold == 3
    assert power25.threshold <= power25.ell * power25.sigma_hat == 4
    assert empirical_threshold(power25).R_emp == 3


def test_power_scheme_k1():
    d = SymmetricDecomposition(F7, 3, [[1, 2]])
    s = build_power_scheme(Curve.parse("rational/q=7"), d, n=5)
    assert s.threshold == 1
    for w in range(s.n):
        v = np.array([4])
        vals, total = decode_power(s, {w: worker_power(s, encode_power(s, v, w))})
        assert total == F7.pow(F7.add(4, 2), 3)


def test_power_scheme_hyperelliptic_ell3(hyper11):
    F = hyper11.field
    d = SymmetricDecomposition(F, 3, [[1, 0], [1, 1]])
    s = build_power_scheme(hyper11, d)
    assert s.r == [2, 2]
    assert s.threshold == 7 <= 3 * s.sigma_hat == 12
    poly = MultivariatePoly(F, 1, {(3,): 2, (2,): 3, (1,): 3, (0,): 1})
    assert verify_decomposition(poly, d)
    for v in range(F.q):
        payload = s.encode(np.array([v]))
        got = s.decode({w: s.compute(payload[w]) for w in range(s.n)})[1]
        assert got == poly.evaluate(np.array([v]))[0]


def test_power_pipeline_gf5_exhaustive(power25):
    s = power25
    expect = X1X2_5.values()
    for v, fv in zip(all_inputs(F5, 2), expect):
        payload = s.encode(v)
        resp = {w: s.compute(payload[w]) for w in range(s.n)}
        for S in itertools.combinations(range(s.n), 3):
            vals, total = s.decode({w: resp[w] for w in S})
            assert total == fv
    v = np.array([2, 3])
    payload = s.encode(v)
    assert s.decode({w: s.compute(payload[w]) for w in (1, 4, 6)})[1] == 1


def test_power_zero_input(power25):
    payload = power25.encode(np.array([0, 0]))
    vals, total = power25.decode({w: power25.compute(payload[w]) for w in range(3)})
    assert total == 0 and not np.any(vals)


def test_power_insufficient(power25):
    payload = power25.encode(np.array([1, 2]))
    with pytest.raises(InsufficientResponses):
        power25.decode({w: power25.compute(payload[w]) for w in (0, 1)})
    with pytest.raises(InsufficientResponses):
        decode_power(power25, {})


def test_power_needs_places():
    with pytest.raises(NotEnoughPlaces):
        build_power_scheme(Curve.parse("rational/q=5"), RANK2_5, n=8)


def test_power_rejects_foreign_data_field():
    with pytest.raises(ValueError):
        build_power_scheme(Curve.parse("rational/q=49"), RANK2_5, n=8)


def test_tensor_rook_condition(power25, herm3):
    assert tp.validate_tensor_rook_condition(power25)[0]
    F = herm3.field
    d = SymmetricDecomposition(F, 3, [[1, 0], [0, 1], [1, 1], [2, 1]])
    s = build_power_scheme(herm3, d, n=10)
    assert tp.validate_tensor_rook_condition(s)[0]


@pytest.mark.parametrize("desc,forms,ell", [
    ("rational/q=25", [[2, 2, 0], [1, 4, 0]], 2),
    ("rational/q=11", [[1, 2, 3], [4, 0, 1], [2, 2, 2]], 2),
    ("hyper/q=11/f=0,2,5,2,1,1", [[1, 3], [2, 5]], 3),
    ("hermitian/q0=3", [[1, 0], [0, 1]], 2),
])
def test_pipeline_identity_and_bounds(desc, forms, ell):
    curve = Curve.parse(desc)
    data = field_make(curve.field.p) if curve.field.m > 1 and desc.startswith("rational") \
        else curve.field
    d = SymmetricDecomposition(data, ell, forms)
    s = build_power_scheme(curve, d)
    pts = all_inputs(data, d.t)
    if len(pts) > 125:
        pts = pts[:: len(pts) // 100]
    expect = d.evaluate(pts)
    for v, fv in zip(pts, expect):
        payload = s.encode(v)
        assert s.decode({w: s.compute(payload[w]) for w in range(s.n)})[1] == fv
    g, k = s.genus, s.k
    assert s.k <= s.threshold <= ell * s.sigma_hat <= ell * (g + 2) * k
    if s.true_mu:
        assert s.sigma_hat <= (g + 1) * k
    assert all(v[2] for v in threshold_bounds(s, ell).values())
