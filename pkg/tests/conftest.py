import numpy as np
import pytest

from qmarkov import Channel


def haar_unitary(n, rng):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_markov_channel(n, k, seed) -> Channel:
    """Markov channel from a Haar unitary on C^n (x) C^k: Kraus are its n-blocks."""
    rng = np.random.default_rng(seed)
    u = haar_unitary(n * k, rng)
    blocks = u.reshape(n, k, n, k)
    return Channel.from_kraus(
        [blocks[:, p, :, q] / np.sqrt(k) for p in range(k) for q in range(k)]
    )


def random_commuting_family(n, d, seed):
    """Commuting self-adjoint matrices with squares summing to the identity."""
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((n, d))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return [q @ np.diag(pts[:, i]) @ q.T for i in range(d)]


def antisym_kraus():
    s = 1 / np.sqrt(2)
    a1 = s * np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=complex)
    a2 = s * np.array([[0, 0, 1], [0, 0, 0], [-1, 0, 0]], dtype=complex)
    a3 = s * np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)
    return [a1, a2, a3]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
