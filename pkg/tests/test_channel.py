import numpy as np
import pytest

from qmarkov import (
    Channel,
    CompletePositivityError,
    ResourceLimitError,
    adjoint,
    choi_distance,
    choi_frobenius_distance,
    choi_of,
    compose,
    compress_check,
    is_psd,
    kraus_canonical,
    rank_of_set,
    tensor,
    tensor_power,
    verify_markov,
)
from qmarkov.channel import ChoiMatrix, canonical_kraus_family, partial_trace_second
from qmarkov.schur import rank_two_family, schur_channel
from qmarkov.zoo import antisym_triple, shift_triple

from conftest import antisym_kraus, random_markov_channel


def matrix_unit(n, i, j):
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1.0
    return e


def test_choi_of_identity():
    C = choi_of(Channel.identity(2))
    assert abs(np.trace(C.mat) - 2.0) < 1e-12
    eig = np.linalg.eigvalsh(C.mat)
    assert np.count_nonzero(eig > 1e-12) == 1


def test_choi_of_trace_map():
    # brute force over the four matrix units: x -> tr(x)/2 * identity
    kraus = [matrix_unit(2, i, j) / np.sqrt(2) for i in range(2) for j in range(2)]
    T = Channel.from_kraus(kraus)
    for i in range(2):
        for j in range(2):
            expected = np.trace(matrix_unit(2, i, j)) / 2 * np.eye(2)
            assert np.abs(T.apply(matrix_unit(2, i, j)) - expected).max() < 1e-14
    C = choi_of(T)
    assert np.abs(C.mat - np.eye(4) / 2).max() < 1e-14


def test_choi_of_antisym_triple():
    from qmarkov import hermitian_eig

    T = antisym_triple()
    C = choi_of(T)
    assert is_psd(C.mat)
    assert abs(np.trace(C.mat) - 3.0) < 1e-12
    eig, _ = hermitian_eig(C.mat)
    # exactly as many nonzero Choi eigenvalues as Kraus operators
    assert np.count_nonzero(eig > 1e-9 * eig.max()) == len(T.kraus)


def test_kraus_canonical_identity():
    canon = kraus_canonical(choi_of(Channel.identity(3)))
    assert len(canon.kraus) == 1
    a = canon.kraus[0]
    assert np.abs(a - a[0, 0] * np.eye(3)).max() < 1e-12


def test_kraus_canonical_rank_two_schur():
    T = schur_channel(rank_two_family(1 / 3))
    canon = kraus_canonical(choi_of(T))
    assert len(canon.kraus) == 2
    assert choi_distance(canon, T) < 1e-12


def test_kraus_canonical_antisym_span():
    T = antisym_triple()
    canon = kraus_canonical(choi_of(T))
    assert len(canon.kraus) == 3
    union = list(canon.kraus) + antisym_kraus()
    assert rank_of_set(union).rank == 3


def test_kraus_canonical_orthogonality():
    T = random_markov_channel(3, 2, 99)
    canon = kraus_canonical(choi_of(T))
    stack = np.stack(canon.kraus)
    gram = np.einsum("iab,jab->ij", stack.conj(), stack)
    off = gram - np.diag(np.diag(gram))
    assert np.abs(off).max() < 1e-10


def test_kraus_canonical_rejects_non_psd():
    bad = np.diag([1.0, 1.0, 1.0, -0.5])
    with pytest.raises(CompletePositivityError) as err:
        kraus_canonical(ChoiMatrix(dim=2, mat=bad.astype(complex)))
    assert err.value.min_eigenvalue == pytest.approx(-0.5)


def test_canonical_family_matches_choi_route():
    for seed in range(5):
        T = random_markov_channel(3, 2, [17, seed])
        assert choi_distance(canonical_kraus_family(T), kraus_canonical(choi_of(T))) < 1e-11


def test_verify_markov_antisym():
    report = verify_markov(antisym_triple())
    assert report.is_markov and report.is_cp
    assert report.is_self_adjoint
    assert report.kraus_rank == 3


def test_verify_markov_flags_non_unital():
    T = Channel.from_kraus([np.diag([1.0, 0.0])])
    report = verify_markov(T)
    assert not report.is_unital
    assert not report.is_markov


def test_shift_triple_markov_and_self_adjoint():
    # the adjoint family {a_i*} is the same set of matrices, so the map is
    # exactly self-adjoint
    report = verify_markov(shift_triple())
    assert report.is_markov
    assert report.is_self_adjoint
    assert report.residuals["self_adjoint"] < 1e-12


def test_adjoint_identity_and_involution():
    ident = Channel.identity(3)
    assert choi_distance(adjoint(ident), ident) < 1e-14
    T = random_markov_channel(3, 2, 5)
    assert choi_distance(adjoint(adjoint(T)), T) < 1e-13


def test_adjoint_defining_identity_on_matrix_units():
    T = random_markov_channel(3, 2, 8)
    Ts = adjoint(T)
    n = 3
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    x = matrix_unit(n, i, j)
                    y = matrix_unit(n, k, l)
                    lhs = np.trace(Ts.apply(y) @ x) / n
                    rhs = np.trace(y @ T.apply(x)) / n
                    assert abs(lhs - rhs) < 1e-12


def test_adjoint_of_schur_is_entrywise_conjugate_multiplier():
    # tau(T*(y) x) = tau(y T(x)) forces the adjoint multiplier matrix to be
    # the transpose, i.e. the entrywise conjugate for a Hermitian matrix
    b = rank_two_family(0.4).b
    T = schur_channel(rank_two_family(0.4))
    from qmarkov.schur import SchurMatrix

    T_conj = schur_channel(SchurMatrix.of(b.conj()))
    assert choi_distance(adjoint(T), T_conj) < 1e-12


def test_antisym_adjoint_equals_itself():
    T = antisym_triple()
    assert choi_distance(adjoint(T), T) < 1e-13


def test_compose_with_identity():
    T = random_markov_channel(3, 2, 2)
    assert choi_distance(compose(T, Channel.identity(3)), T) < 1e-13
    assert choi_distance(compose(Channel.identity(3), T), T) < 1e-13


def test_compose_kraus_products():
    mats = antisym_kraus()
    T = antisym_triple()
    squared = compose(T, T)
    direct = Channel.from_kraus([a @ b for a in mats for b in mats])
    assert choi_distance(squared, direct) < 1e-13


def test_tensor_power_identity():
    T = tensor_power(Channel.identity(2), 3)
    assert choi_distance(T, Channel.identity(8)) < 1e-13


def test_tensor_power_cap():
    with pytest.raises(ResourceLimitError):
        tensor_power(Channel.identity(4), 8)


def test_tensor_markov_closure():
    T = random_markov_channel(2, 2, 3)
    S = random_markov_channel(3, 2, 4)
    assert verify_markov(tensor(T, S)).is_markov


def test_partial_trace_second():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    y = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    z = np.kron(x, y)
    out = partial_trace_second(z, 3, 4)
    assert np.abs(out - x * np.trace(y) / 4).max() < 1e-12


def test_compress_check_identity_ancilla():
    T = random_markov_channel(3, 2, 6)
    assert compress_check(T, Channel.identity(4))


def test_compress_check_cross_pair():
    assert compress_check(antisym_triple(), schur_channel(rank_two_family(1 / 3)))


def test_compress_check_fails_for_non_unital():
    S = Channel.from_kraus([np.diag([1.0, 0.0])])
    assert not compress_check(antisym_triple(), S)


@pytest.mark.parametrize("seed", range(8))
def test_round_trip_random_markov(seed):
    n = 2 + seed % 7
    T = random_markov_channel(n, 2, [21, seed])
    canon = kraus_canonical(choi_of(T))
    assert choi_distance(canon, T) <= 1e-9 * n * n


def test_choi_trace_equals_dim_for_trace_preserving():
    for seed in range(5):
        n = 2 + seed
        T = random_markov_channel(n, 2, [31, seed])
        assert abs(np.trace(choi_of(T).mat) - n) < 1e-10


def test_self_adjoint_for_symmetric_kraus(rng):
    # families with a_i* = a_i or a_i* = -a_i give self-adjoint channels
    q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
    pts = rng.standard_normal((4, 3))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    sym = [q @ np.diag(pts[:, i]) @ q.T for i in range(3)]
    assert verify_markov(Channel.from_kraus(sym)).is_self_adjoint
    assert verify_markov(antisym_triple()).is_self_adjoint


def test_choi_frobenius_matches_dense():
    T = random_markov_channel(3, 2, 44)
    S = random_markov_channel(3, 2, 45)
    dense = np.linalg.norm(choi_of(T).mat - choi_of(S).mat)
    lowrank = choi_frobenius_distance(T, S)
    assert abs(dense - lowrank) < 1e-10
