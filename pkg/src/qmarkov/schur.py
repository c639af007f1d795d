"""Schur multipliers: entrywise multiplication channels and their certificates.

T_B multiplies entrywise by B; it is completely positive iff B is PSD, and a
Markov map iff additionally the diagonal of B is all ones.  The diagonal Kraus
family comes from the eigendecomposition of B.  A Markov Schur multiplier is
factorizable exactly when B is a Gram matrix of unitaries under a tracial
state, which ``verify_gram_unitaries`` checks for proposed data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import Channel
from .factorize import FactorizationWitness
from .numerics import (
    DEFAULT_TOL,
    CompletePositivityError,
    DimensionError,
    MarkovViolationError,
    Tolerances,
    as_matrix,
    hermitian_residual,
    phase_normalize_columns,
)


@dataclass(frozen=True)
class SchurMatrix:
    n: int
    b: np.ndarray

    def __post_init__(self):
        if self.b.shape != (self.n, self.n):
            raise DimensionError(f"expected {self.n}x{self.n}, got {self.b.shape}")

    @classmethod
    def of(cls, b) -> "SchurMatrix":
        b = as_matrix(b).astype(complex, copy=True)
        if b.shape[0] != b.shape[1]:
            raise DimensionError("Schur matrices are square")
        b.setflags(write=False)
        return cls(n=b.shape[0], b=b)

    def apply(self, x) -> np.ndarray:
        x = as_matrix(x)
        if x.shape != (self.n, self.n):
            raise DimensionError("argument shape mismatch")
        return self.b * x


def diagonal_kraus(B: SchurMatrix, tol: Tolerances = DEFAULT_TOL) -> list[np.ndarray]:
    """Diagonal Kraus vectors a_i with sum_i conj(a_i[j]) a_i[k] = B[j, k].

    One vector per nonzero eigenvalue: sqrt(lambda) times the conjugated
    eigenvector, phase-normalized for determinism.  Real symmetric input gives
    real (hence self-adjoint) diagonals.
    """
    b = B.b
    if hermitian_residual(b) > tol.verify_abs:
        raise CompletePositivityError(
            "Schur matrix is not Hermitian", min_eigenvalue=float("nan")
        )
    values, vectors = np.linalg.eigh((b + b.conj().T) / 2)
    radius = float(np.abs(values).max()) if values.size else 0.0
    if radius > 0 and float(values.min()) < -tol.psd_floor * radius:
        raise CompletePositivityError(
            f"Schur matrix has negative eigenvalue {values.min():.3e}",
            min_eigenvalue=float(values.min()),
        )
    vectors = phase_normalize_columns(vectors)
    top = max(float(values[-1]), 0.0)
    keep = np.nonzero(values > tol.rank_rel * top)[0] if top > 0 else []
    pairs = [(float(values[i]), np.sqrt(values[i]) * vectors[:, i].conj()) for i in keep]
    pairs.sort(
        key=lambda p: (
            -round(p[0], 12),
            tuple(np.round(np.ascontiguousarray(p[1]).view(float), 9)),
        )
    )
    return [v for _, v in pairs]


def schur_channel(B: SchurMatrix, tol: Tolerances = DEFAULT_TOL) -> Channel:
    """Markov channel of a PSD unit-diagonal Schur matrix, with diagonal Kraus."""
    diag_res = float(np.abs(np.diag(B.b) - 1.0).max())
    if diag_res > tol.verify_abs:
        raise MarkovViolationError(
            f"Schur matrix diagonal deviates from 1 by {diag_res:.3e}"
        )
    vecs = diagonal_kraus(B, tol)
    if not vecs:
        raise CompletePositivityError("zero Schur matrix", min_eigenvalue=0.0)
    return Channel.from_kraus([np.diag(v) for v in vecs])


@dataclass(frozen=True)
class GramUnitaryCheck:
    ok: bool
    residuals: dict
    witness: FactorizationWitness | None

    def __bool__(self) -> bool:
        return self.ok


def verify_gram_unitaries(
    B: SchurMatrix,
    unitaries,
    weights: tuple[tuple[int, float], ...] | None = None,
    tol: Tolerances = DEFAULT_TOL,
) -> GramUnitaryCheck:
    """Check b_ij = tau(u_i* u_j) for proposed unitaries under a tracial state.

    ``weights`` describes the trace on a block decomposition of the common
    ancilla dimension; the default is the normalized trace on one full block.
    A passing check also carries the factorization witness sum_j e_jj (x) u_j.
    """
    mats = [as_matrix(u) for u in unitaries]
    if len(mats) != B.n:
        raise DimensionError(f"need {B.n} unitaries, got {len(mats)}")
    k = mats[0].shape[0]
    for u in mats:
        if u.shape != (k, k):
            raise DimensionError("unitaries must share one dimension")
    blocks = weights if weights is not None else ((k, 1.0),)
    omega = np.concatenate([np.full(d, w / d) for d, w in blocks])
    if omega.size != k:
        raise DimensionError("block dimensions must sum to the ancilla dimension")

    unit_res = max(
        float(np.abs(u.conj().T @ u - np.eye(k)).max()) for u in mats
    )
    stack = np.stack(mats)
    gram = np.einsum("iab,jab,b->ij", stack.conj(), stack, omega, optimize=True)
    gram_res = float(np.abs(gram - B.b).max())
    ok = unit_res <= tol.verify_abs * k and gram_res <= tol.verify_abs
    witness = None
    if ok:
        u = np.zeros((B.n * k, B.n * k), dtype=complex)
        for j, m in enumerate(mats):
            e = np.zeros((B.n, B.n))
            e[j, j] = 1.0
            u += np.kron(e, m)
        u.setflags(write=False)
        witness = FactorizationWitness(n=B.n, k=k, u=u, ancilla_blocks=tuple(blocks))
    return GramUnitaryCheck(
        ok=ok, residuals={"unitarity": unit_res, "gram": gram_res}, witness=witness
    )


def rank_two_family(s: float, n: int = 4) -> SchurMatrix:
    """PSD rank-<=2 correlation matrix from two frame rows.

    Row one is (1, sqrt(s), ..., sqrt(s)); row two distributes the remaining
    weight over the (n-1)-st roots of unity.  At s = 1 the matrix is all ones
    (the identity channel); for 0 < s < 1 the two diagonal Kraus operators
    have independent pairwise products.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    if n < 4:
        raise ValueError(f"family is defined for n >= 4, got {n}")
    rho = np.exp(2j * np.pi / (n - 1))
    x1 = np.array([1.0] + [np.sqrt(s)] * (n - 1), dtype=complex)
    x2 = np.sqrt(1.0 - s) * np.array(
        [0.0] + [rho**j for j in range(n - 1)], dtype=complex
    )
    b = np.outer(x1.conj(), x1) + np.outer(x2.conj(), x2)
    return SchurMatrix.of(b)


def fifth_root_correlation() -> SchurMatrix:
    """The 6x6 correlation matrix of three fifth-root-of-unity frame rows.

    Entries are 1 on the diagonal and plus/minus 1/sqrt(5) off it; the matrix
    is PSD of rank 3.  Its Schur multiplier is factorizable yet not a mixture
    of unitary conjugations.
    """
    beta = 1 / np.sqrt(5)
    gamma = np.exp(2j * np.pi / 5)
    x1 = np.array([1.0] + [beta] * 5, dtype=complex)
    x2 = np.sqrt(2 / 5) * np.array(
        [0.0] + [gamma**j for j in range(5)], dtype=complex
    )
    x3 = x2.conj()
    b = sum(np.outer(x.conj(), x) for x in (x1, x2, x3))
    return SchurMatrix.of(b.real)  # imaginary parts cancel exactly in the sum


def real_commuting_kraus(B: SchurMatrix, tol: Tolerances = DEFAULT_TOL) -> list[np.ndarray]:
    """Self-adjoint diagonal Kraus family of a real PSD unit-diagonal matrix.

    Real correlation matrices always admit one, which feeds the anticommuting
    witness construction: every real Markov Schur multiplier is factorizable.
    """
    if float(np.abs(B.b.imag).max()) > tol.verify_abs:
        raise ValueError("real_commuting_kraus expects a real matrix")
    vecs = diagonal_kraus(SchurMatrix.of(B.b.real.astype(complex)), tol)
    out = []
    for v in vecs:
        if float(np.abs(v.imag).max()) > tol.verify_abs:
            raise ValueError("eigenbasis of a real matrix came out complex")
        out.append(np.diag(v.real.astype(complex)))
    return out
