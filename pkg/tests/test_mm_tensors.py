import itertools
import json

import numpy as np
import pytest

from agrook import mm_tensors as mm
from agrook.errors import RankMismatch, ShapeMismatch
from agrook.function_field import Curve
from agrook.galois import field_from_order, field_make
from agrook.mm_tensors import (
    MatmulScheme,
    apply_algorithm,
    block_matmul,
    composed_coefficients,
    general_matmul,
    naive_algorithm,
    strassen_2x2x2,
    verify_algorithm,
)
from agrook.rook_diagonal import build_diagonal, encode_all


def test_naive_111():
    alg = naive_algorithm(1, 1, 1)
    assert alg.rank == 1
    assert alg.gamma.tolist() == alg.delta.tolist() == alg.epsilon.tolist() == [[1]]


def test_naive_222_rank_and_exhaustive_gf2():
    alg = naive_algorithm(2, 2, 2)
    assert alg.rank == 8
    res = verify_algorithm(alg, field_make(2))
    assert res and res.mode == "exhaustive" and res.cases == 256


@pytest.mark.parametrize("dims", [(1, 2, 3), (3, 1, 2), (2, 3, 1)])
def test_naive_rectangular(dims):
    assert verify_algorithm(naive_algorithm(*dims), field_make(3), mode="random", trials=20)


def test_strassen_rank():
    assert strassen_2x2x2(field_make(5)).rank == 7


@pytest.mark.parametrize("q", [2, 3, 4])
def test_strassen_exhaustive(q):
    res = verify_algorithm(strassen_2x2x2(field_from_order(q)), field_from_order(q),
                           mode="exhaustive")
    assert res


def test_strassen_gf3_random():
    F = field_make(3)
    res = verify_algorithm(strassen_2x2x2(F), F, mode="random", trials=100, seed=1)
    assert res and res.cases == 100


def test_strassen_char2_signs():
    F = field_make(2)
    alg = strassen_2x2x2(F)
    assert set(np.unique(alg.gamma)) <= {0, 1}


def test_corrupted_algorithm_fails_with_witness():
    F = field_make(3)
    alg = strassen_2x2x2(F)
    alg.gamma[0, 0] = F.add(alg.gamma[0, 0], 1)
    res = verify_algorithm(alg, F)
    assert not res and res.witness is not None
    res = verify_algorithm(alg, F, mode="random", trials=10)
    assert not res and res.witness is not None


def test_algorithm_file_roundtrip(tmp_path):
    F = field_make(17)
    alg = strassen_2x2x2(F)
    path = tmp_path / "strassen.json"
    mm.save_algorithm(alg, path, F)
    data = json.loads(path.read_text())
    assert data["rank"] == 7 and data["dims"] == [2, 2, 2]
    assert min(min(row) for row in data["gamma"]) == -1
    back = mm.load_algorithm(path, F)
    assert np.array_equal(back.gamma, alg.gamma) and np.array_equal(back.epsilon, alg.epsilon)


def test_declared_rank_mismatch():
    data = dict(mm._STRASSEN, dims=[2, 2, 2], rank=6)
    with pytest.raises(RankMismatch):
        mm.algorithm_from_dict(data, field_make(5))


def test_apply_shape_checks(rng):
    F = field_make(5)
    alg = strassen_2x2x2(F)
    with pytest.raises(ShapeMismatch):
        apply_algorithm(F, alg, F.random(rng, (2, 3, 2, 2)), F.random(rng, (2, 2, 2, 2)))
    with pytest.raises(ShapeMismatch):
        apply_algorithm(F, alg, F.random(rng, (2, 2, 2, 3)), F.random(rng, (2, 2, 2, 2)))


def test_block_matmul_matches_dense(rng):
    F = field_make(7)
    A, B = F.random(rng, (2, 3, 2, 2)), F.random(rng, (3, 2, 2, 4))
    dense = lambda X: np.block([[X[i, j] for j in range(X.shape[1])] for i in range(X.shape[0])])
    C = block_matmul(F, A, B)
    assert np.array_equal(dense(C), (dense(A) @ dense(B)) % 7)


def test_rank_mismatch_in_scheme(rational11):
    s = build_diagonal(rational11, 3, 8)
    with pytest.raises(RankMismatch):
        MatmulScheme(s, strassen_2x2x2(s.field))
    with pytest.raises(RankMismatch):
        composed_coefficients(s, strassen_2x2x2(s.field))


def test_naive_111_reduces_to_scalar_code(rational11, rng):
    F = rational11.field
    s = build_diagonal(rational11, 1, 4)
    A, B = F.random(rng, (1, 1, 2, 2)), F.random(rng, (1, 1, 2, 2))
    out = general_matmul(s, naive_algorithm(1, 1, 1, F), A, B, responders=[2])
    assert np.array_equal(out, block_matmul(F, A, B))


@pytest.fixture(scope="module")
def strassen289():
    return build_diagonal(Curve.parse("rational/q=289"), 7, 16)


def test_strassen_threshold_13(strassen289):
    assert strassen289.threshold == 13 == 2 * 7 - 1


def test_strassen_vs_naive_threshold():
    c = Curve.parse("rational/q=29")
    t_str = build_diagonal(c, 7, 16).threshold
    t_naive = build_diagonal(c, 8, 16).threshold
    assert (t_str, t_naive) == (13, 15) and t_str < t_naive


def test_strassen_any_13_of_16(strassen289, rng):
    s = strassen289
    F17 = field_make(17)
    alg = strassen_2x2x2(s.field)
    A, B = F17.random(rng, (2, 2, 2, 2)), F17.random(rng, (2, 2, 2, 2))
    expect = block_matmul(F17, A, B)
    ms = MatmulScheme(s, alg)
    payloads = ms.encode((A, B))
    full = {w: ms.compute(payloads[w]) for w in range(s.n)}
    for S in itertools.islice(itertools.combinations(range(16), 13), 0, None, 37):
        assert np.array_equal(ms.decode({w: full[w] for w in S}), expect)


def test_composition_is_transparent(strassen289, rng):
    s = strassen289
    F = s.field
    alg = strassen_2x2x2(F)
    A, B = F.random(rng, (2, 2, 2, 2)), F.random(rng, (2, 2, 2, 2))
    Ahat, Bhat = mm.bilinear_inputs(F, alg, A, B)
    two_step = encode_all(s, Ahat, Bhat)
    one_step = mm.encode_composed(s, alg, A, B)
    for (a1, b1), (a2, b2) in zip(two_step, one_step):
        assert np.array_equal(a1, a2) and np.array_equal(b1, b2)
    ca, cb = composed_coefficients(s, alg)
    assert np.array_equal(ca, F.matmul(s.X, alg.gamma))
    assert np.array_equal(cb, F.matmul(s.X, alg.delta))


@pytest.mark.parametrize("desc", ["rational/q=25", "rational/q=27"])
def test_general_matmul_full_responses(desc, rng):
    c = Curve.parse(desc)
    F = c.field
    for alg in (strassen_2x2x2(F), naive_algorithm(2, 2, 2, F)):
        s = build_diagonal(c, alg.rank)
        assert s.n >= s.threshold
        A, B = F.random(rng, (2, 2, 2, 3)), F.random(rng, (2, 2, 3, 2))
        assert np.array_equal(general_matmul(s, alg, A, B), block_matmul(F, A, B))
