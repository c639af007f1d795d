import numpy as np
import pytest

from qmarkov import (
    Channel,
    CompletePositivityError,
    MarkovViolationError,
    Verdict,
    car_factorize,
    is_psd,
    non_factorizable_certificate,
    rank_of_set,
    verify_gram_unitaries,
    verify_markov,
    verify_witness,
)
from qmarkov.channel import choi_of
from qmarkov.schur import (
    SchurMatrix,
    diagonal_kraus,
    fifth_root_correlation,
    rank_two_family,
    real_commuting_kraus,
    schur_channel,
)

from conftest import haar_unitary


def random_correlation(n, seed, real=False):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n))
    if not real:
        g = g + 1j * rng.standard_normal((n, n))
    b = g @ g.conj().T
    dd = np.sqrt(np.diag(b).real)
    return SchurMatrix.of(b / np.outer(dd, dd))


def test_all_ones_gives_identity():
    B = SchurMatrix.of(np.ones((3, 3), dtype=complex))
    T = schur_channel(B)
    assert len(T.kraus) == 1
    assert np.abs(T.kraus[0] - np.eye(3)).max() < 1e-12


def test_rank_two_third_has_two_kraus():
    T = schur_channel(rank_two_family(1 / 3))
    assert len(T.kraus) == 2
    assert verify_markov(T).is_markov


def test_fifth_root_kraus_span():
    B = fifth_root_correlation()
    T = schur_channel(B)
    assert len(T.kraus) == 3
    beta = 1 / np.sqrt(5)
    gamma = np.exp(2j * np.pi / 5)
    b1 = np.diag(np.array([1.0] + [beta] * 5, dtype=complex))
    b2 = np.diag(np.sqrt(2 / 5) * np.array([0] + [gamma**k for k in range(5)], dtype=complex))
    b3 = b2.conj()
    union = list(T.kraus) + [b1, b2, b3]
    assert rank_of_set(union).rank == 3


@pytest.mark.parametrize("seed", range(8))
def test_schur_action_on_matrix_units(seed):
    B = random_correlation(4, seed)
    T = schur_channel(B)
    for i in range(4):
        for j in range(4):
            unit = np.zeros((4, 4), dtype=complex)
            unit[i, j] = 1.0
            assert np.abs(T.apply(unit) - B.b[i, j] * unit).max() < 1e-10


def test_schur_channel_rejects_non_psd():
    bad = np.eye(3, dtype=complex)
    bad[0, 1] = bad[1, 0] = 2.0
    with pytest.raises(CompletePositivityError):
        schur_channel(SchurMatrix.of(bad))


def test_schur_channel_rejects_bad_diagonal():
    b = 0.5 * np.eye(3, dtype=complex)
    with pytest.raises(MarkovViolationError):
        schur_channel(SchurMatrix.of(b))


@pytest.mark.parametrize("seed", range(6))
def test_positivity_equivalence(seed):
    # acceptance of the Schur matrix is exactly PSD + unit diagonal, and the
    # resulting channel has a PSD block matrix of unit images
    rng = np.random.default_rng(seed)
    B = random_correlation(4, seed)
    T = schur_channel(B)
    assert is_psd(choi_of(T).mat)
    h = (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    h = (h + h.conj().T) / 2
    h = h - np.diag(np.diag(h)) + np.eye(4)
    if not is_psd(h):
        with pytest.raises(CompletePositivityError):
            schur_channel(SchurMatrix.of(h))


def test_diagonal_kraus_gram_identity():
    B = random_correlation(5, 3)
    vecs = diagonal_kraus(B)
    rebuilt = sum(np.outer(v.conj(), v) for v in vecs)
    assert np.abs(rebuilt - B.b).max() < 1e-10


def test_real_commuting_kraus_requires_real():
    with pytest.raises(ValueError):
        real_commuting_kraus(rank_two_family(0.5))


@pytest.mark.parametrize("n", [3, 5, 8])
def test_real_correlation_always_factorizable(n):
    B = random_correlation(n, n, real=True)
    kraus = real_commuting_kraus(B)
    T = Channel.from_kraus(kraus)
    assert verify_witness(T, car_factorize(kraus))


def test_gram_unitaries_cyclic_group():
    # the shift representation of the cyclic group: trace-orthogonal unitaries
    n = 4
    shift = np.roll(np.eye(n), 1, axis=0).astype(complex)
    unitaries = [np.linalg.matrix_power(shift, j) for j in range(n)]
    check = verify_gram_unitaries(SchurMatrix.of(np.eye(n, dtype=complex)), unitaries)
    assert check.ok
    assert check.witness is not None
    T = schur_channel(SchurMatrix.of(np.eye(n, dtype=complex)))
    assert verify_witness(T, check.witness)


def test_gram_unitaries_all_ones():
    B = SchurMatrix.of(np.ones((3, 3), dtype=complex))
    check = verify_gram_unitaries(B, [np.eye(2)] * 3)
    assert check.ok
    assert verify_witness(schur_channel(B), check.witness)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_gram_unitaries_fail_for_rank_two_family(k, rng):
    # certified non-factorizable, so no small Gram data can reproduce it
    B = rank_two_family(1 / 3)
    unitaries = [haar_unitary(k, rng) for _ in range(4)]
    check = verify_gram_unitaries(B, unitaries)
    assert not check.ok
    assert check.witness is None


def test_gram_unitaries_block_weights():
    # abelian ancilla as two 1-dim blocks: tau(u1* u2) = w1 - w2 for the sign pair
    u1 = np.eye(2, dtype=complex)
    u2 = np.diag([1.0, -1.0]).astype(complex)
    w1, w2 = 0.8, 0.2
    b = np.array([[1.0, w1 - w2], [w1 - w2, 1.0]], dtype=complex)
    check = verify_gram_unitaries(
        SchurMatrix.of(b), [u1, u2], weights=((1, w1), (1, w2))
    )
    assert check.ok
    assert verify_witness(schur_channel(SchurMatrix.of(b)), check.witness)
    # the same data under the uniform trace gives a different Gram entry
    assert not verify_gram_unitaries(SchurMatrix.of(b), [u1, u2]).ok


def test_gram_unitaries_shape_errors():
    B = SchurMatrix.of(np.eye(3, dtype=complex))
    with pytest.raises(Exception):
        verify_gram_unitaries(B, [np.eye(2)] * 2)


def test_rank_two_family_s_one_is_all_ones():
    B = rank_two_family(1.0, 4)
    assert np.abs(B.b - np.ones((4, 4))).max() < 1e-12


def test_rank_two_family_matches_display_at_one_third():
    w = np.exp(2j * np.pi / 3)
    r3 = 1 / np.sqrt(3)
    expected = np.array(
        [
            [1, r3, r3, r3],
            [r3, 1, 1j * r3, -1j * r3],
            [r3, -1j * r3, 1, 1j * r3],
            [r3, 1j * r3, -1j * r3, 1],
        ],
        dtype=complex,
    )
    assert np.abs(rank_two_family(1 / 3).b - expected).max() < 1e-12


@pytest.mark.parametrize("n", [5, 6])
def test_rank_two_family_general_n_certificate(n):
    cert = non_factorizable_certificate(schur_channel(rank_two_family(0.5, n)))
    assert cert.verdict is Verdict.NOT_FACTORIZABLE


def test_rank_two_family_validates_input():
    with pytest.raises(ValueError):
        rank_two_family(1.5)
    with pytest.raises(ValueError):
        rank_two_family(0.5, 3)


def test_rank_two_family_continuity():
    # the sqrt(s) entries make the family 1/2-Hoelder at s = 0, so the honest
    # modulus is Lipschitz in sqrt(s); away from 0 plain Lipschitz holds too
    rng = np.random.default_rng(0)
    for _ in range(200):
        s, t = np.sort(rng.uniform(0, 1, size=2))
        gap = np.linalg.norm(rank_two_family(t).b - rank_two_family(s).b, 2)
        assert gap <= 8 * (np.sqrt(t) - np.sqrt(s)) + 1e-9
        if s >= 0.1:
            assert gap <= 5 * (t - s) + 1e-9


def test_fifth_root_entries_and_rank():
    B = fifth_root_correlation()
    beta = 1 / np.sqrt(5)
    assert abs(B.b[0, 1] - beta) < 1e-14
    assert np.abs(np.diag(B.b) - 1).max() < 1e-14
    offdiag = np.abs(B.b[~np.eye(6, dtype=bool)])
    assert np.abs(offdiag - beta).max() < 1e-12
    ev = np.linalg.eigvalsh(B.b)
    assert np.count_nonzero(ev > 1e-9 * ev.max()) == 3


def test_fifth_root_hadamard_identity():
    gamma = np.exp(2j * np.pi / 5)
    H = np.array([[gamma ** (k * l) for l in range(5)] for k in range(5)])
    assert np.abs(H.conj().T @ H - 5 * np.eye(5)).max() < 1e-12
    assert np.abs(np.abs(H) - 1.0).max() < 1e-12
