import numpy as np
import pytest

from qmarkov import (
    Channel,
    FactorizationWitness,
    Verdict,
    build_counterexample,
    degree4_word_classes,
    involution_family,
    sphere_family,
    square_factorization_witness,
    square_hypotheses,
    squared_channel,
    verify_markov,
    verify_witness,
    witness_residuals,
)
from qmarkov.numerics import DEFAULT_TOL
from qmarkov.rota import (
    _canonical_word,
    _structured_report,
    ancilla_frame_4,
    involution_words_independent,
)

from conftest import haar_unitary, random_commuting_family


def test_canonical_word_collapses_squares():
    assert _canonical_word((0, 0, 1, 2)) == ((0,), (1, 2))
    assert _canonical_word((1, 0, 0, 2)) == ((0,), (1, 2))
    assert _canonical_word((1, 2, 0, 0)) == ((0,), (1, 2))
    assert _canonical_word((0, 1, 0, 0)) == ((0,), (0, 1))  # a0 a1 a0^2 = a0^3 a1
    assert _canonical_word((0, 1, 1, 0)) == ((0, 1), ())
    assert _canonical_word((0, 1, 0, 1)) == ((), (0, 1, 0, 1))
    assert _canonical_word((2, 2, 2, 2)) == ((2, 2), ())


def test_word_classes_counts_for_d5():
    classes = degree4_word_classes(5)
    assert classes.count == 435
    assert classes.bucket_counts == {
        "plain": 320,
        "mixed": 60,
        "cubed": 40,
        "double_square": 10,
        "fourth_power": 5,
    }


def test_word_classes_partition_all_words():
    # every one of the d^4 index words lands in exactly one class
    from itertools import product

    for d in (2, 3, 5):
        classes = degree4_word_classes(d)
        keys = {_canonical_word(w) for w in product(range(d), repeat=4)}
        assert len(keys) == classes.count
        reps = {_canonical_word(r) for r in classes.representatives}
        assert reps == keys


def test_square_hypotheses_commuting_d4():
    fam = random_commuting_family(6, 4, 0)
    report = square_hypotheses(fam)
    assert not report.enough_terms
    assert not report.all_hold
    assert report.squares_central


def test_square_hypotheses_proportional_family():
    d = 5
    fam = [np.eye(3, dtype=complex) / np.sqrt(d)] * d
    report = square_hypotheses(fam)
    assert not report.pairs_independent
    assert report.certificate().verdict is Verdict.INCONCLUSIVE


def test_square_hypotheses_validates_preconditions():
    with pytest.raises(ValueError):
        square_hypotheses([1j * np.eye(2)])
    with pytest.raises(ValueError):
        square_hypotheses([np.eye(2)] * 2)


def test_structured_report_matches_dense_on_small_family():
    # undersized on purpose: ranks will be deficient, but the two evaluation
    # routes must agree exactly on what they compute
    rng = np.random.default_rng(5)
    d, m, r = 5, 6, 6
    pts = rng.standard_normal((m, d))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    bvecs = pts.T
    perms = []
    for _ in range(d):
        shuffle = rng.permutation(r)
        inv = np.empty(r, dtype=int)
        inv[shuffle[0::2]] = shuffle[1::2]
        inv[shuffle[1::2]] = shuffle[0::2]
        perms.append(inv)
    perms = np.stack(perms)
    mats = []
    for i in range(d):
        pm = np.zeros((r, r), dtype=complex)
        pm[perms[i], np.arange(r)] = 1.0
        mats.append(np.kron(np.diag(bvecs[i].astype(complex)), pm))
    dense = square_hypotheses(mats)
    fast = _structured_report(bvecs, perms, DEFAULT_TOL)
    assert dense.pair_rank == fast.pair_rank
    assert dense.word_rank == fast.word_rank
    assert dense.word_count == fast.word_count
    assert dense.squares_central and fast.squares_central


def test_sphere_family_basics():
    mats, m = sphere_family(5, seed=3)
    assert m >= 15
    assert len(mats) == 5
    vecs = np.stack([np.diag(mat).real for mat in mats])
    assert np.abs((vecs**2).sum(axis=0) - 1.0).max() < 1e-12
    assert np.abs(vecs).min() > 0  # no zero coordinate survives
    # the 10 squared pairs are independent
    sq = vecs**2
    fam = [np.diag(sq[i] * sq[j]) for i in range(5) for j in range(i + 1, 5)]
    from qmarkov import rank_of_set

    assert rank_of_set(fam).rank == 10


def test_sphere_family_needs_five():
    with pytest.raises(ValueError):
        sphere_family(4, seed=0)


def test_involution_family_exactness():
    fam = involution_family(5, seed=11)
    for mat, perm in zip(fam.mats, fam.perms):
        assert np.array_equal(mat, mat.conj().T)
        assert np.array_equal(mat @ mat, np.eye(fam.r, dtype=complex))
        assert np.array_equal(perm[perm], np.arange(fam.r))
    count, rank = involution_words_independent(fam)
    assert count == 1 + 5 * 4 + 5 * 4**3 == 341
    assert rank == 341
    # 341 independent words need a representation of linear dimension >= 341;
    # permutation matrices of degree r span (r-1)^2 + 1 dimensions
    assert (fam.r - 1) ** 2 + 1 >= 341
    assert fam.r >= 19


def test_build_counterexample_certifies():
    result = build_counterexample(5, seed=7)
    report = result.report
    assert report.all_hold
    assert report.word_rank == report.word_count == 435
    assert result.channel.dim == result.m * result.r
    assert result.channel.dim >= 285
    mk = verify_markov(result.channel)
    assert mk.is_markov and mk.is_self_adjoint
    assert result.certificate().verdict is Verdict.NOT_FACTORIZABLE


def test_counterexample_square_rejects_witnesses():
    # no unitary-plus-trace data can reproduce the squared channel; spot-check
    # a random candidate on a few matrix units
    result = build_counterexample(5, seed=7)
    T2 = squared_channel(result.channel.kraus)
    rng = np.random.default_rng(0)
    w = FactorizationWitness.uniform(T2.dim, 2, haar_unitary(2 * T2.dim, rng))
    res = witness_residuals(T2, w, units=[(0, 0), (0, 1), (1, 1), (2, 3)])
    assert res["action"] > DEFAULT_TOL.verify_abs


def test_ancilla_frame_trace_identity_exact():
    frame = [f.real.astype(int) for f in ancilla_frame_4()]
    for i in range(4):
        for j in range(4):
            for k in range(4):
                for l in range(4):
                    lhs = int(np.trace(frame[4 * i + j] @ frame[4 * k + l]))
                    assert lhs == 4 * int(i == l and j == k)


def test_square_witness_single_identity():
    w = square_factorization_witness([np.eye(2)])
    assert w.unitarity_residual() < 1e-14
    assert verify_witness(Channel.identity(2), w)


@pytest.mark.parametrize("seed", range(6))
def test_square_witness_random_commuting(seed):
    fam = random_commuting_family(5, 4, [7, seed])
    w = square_factorization_witness(fam)
    res = witness_residuals(squared_channel(fam), w)
    assert res["unitarity"] < 1e-10
    assert res["action"] < 1e-10


def test_square_witness_noncommuting_family():
    # commutation is not needed: the Pauli pair has squares summing to 1
    x = np.array([[0, 1], [1, 0]], dtype=complex) / np.sqrt(2)
    z = np.diag([1.0, -1.0]).astype(complex) / np.sqrt(2)
    assert np.abs(x @ z - z @ x).max() > 0.5
    w = square_factorization_witness([x, z])
    assert verify_witness(squared_channel([x, z]), w)


def test_square_witness_input_validation():
    with pytest.raises(ValueError):
        square_factorization_witness([np.eye(2)] * 5)
    with pytest.raises(ValueError):
        square_factorization_witness([1j * np.eye(2)])
    with pytest.raises(ValueError):
        square_factorization_witness([np.eye(2) * 0.3])


def test_counterexample_deterministic():
    a = build_counterexample(5, seed=3)
    b = build_counterexample(5, seed=3)
    assert a.m == b.m and a.r == b.r
    assert all(np.array_equal(x, y) for x, y in zip(a.channel.kraus, b.channel.kraus))
