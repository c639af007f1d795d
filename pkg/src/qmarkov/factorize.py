"""Factorizability certificates and constructive witnesses.

Negative direction: a Markov map whose canonical Kraus family has linearly
independent pairwise products (d >= 2) cannot be written as a unitary
conjugation followed by a partial trace over a tracial ancilla, so it is not
factorizable.  Positive direction: commuting self-adjoint Kraus families admit
an explicit witness built from anticommuting self-adjoint unitaries (a CAR
family in its Jordan-Wigner form).  The toolkit never asserts factorizability
without a verified witness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .channel import Channel, canonical_kraus_family, verify_markov
from .numerics import (
    DEFAULT_TOL,
    DimensionError,
    MarkovViolationError,
    Tolerances,
    as_matrix,
    rank_of_set,
)


class Verdict(str, Enum):
    NOT_FACTORIZABLE = "NOT_FACTORIZABLE"
    FACTORIZABLE_WITNESS = "FACTORIZABLE_WITNESS"
    NOT_IN_CONV_AUT = "NOT_IN_CONV_AUT"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class Certificate:
    """Machine-checkable verdict with its numeric evidence.

    ``reason`` names the criterion that fired, e.g. ``kraus-product-independence``.
    """

    verdict: Verdict
    reason: str
    evidence: dict = field(default_factory=dict)


@dataclass(frozen=True)
class FactorizationWitness:
    """A unitary u on M_n (x) M_k together with a trace on the ancilla.

    ``ancilla_blocks`` lists (block_dim, weight) pairs describing a trace on a
    block-diagonal subalgebra of M_k; weights are probabilities.  The witness
    realizes T(x) = (id (x) tau)(u* (x (x) 1) u).
    """

    n: int
    k: int
    u: np.ndarray
    ancilla_blocks: tuple[tuple[int, float], ...]

    def __post_init__(self):
        nk = self.n * self.k
        if self.u.shape != (nk, nk):
            raise DimensionError(f"witness unitary must be {nk}x{nk}")
        dims = sum(d for d, _ in self.ancilla_blocks)
        if dims != self.k:
            raise ValueError("ancilla block dimensions must sum to k")
        weights = np.array([w for _, w in self.ancilla_blocks], dtype=float)
        if np.any(weights < -1e-12) or abs(weights.sum() - 1.0) > 1e-9:
            raise ValueError("ancilla weights must be a probability vector")

    @classmethod
    def uniform(cls, n: int, k: int, u) -> "FactorizationWitness":
        u = as_matrix(u).astype(complex, copy=True)
        u.setflags(write=False)
        return cls(n=n, k=k, u=u, ancilla_blocks=((k, 1.0),))

    def weight_vector(self) -> np.ndarray:
        """Per-coordinate trace weights: weight/dim repeated over each block."""
        out = np.concatenate(
            [np.full(d, w / d) for d, w in self.ancilla_blocks]
        )
        return out

    def unitarity_residual(self) -> float:
        nk = self.n * self.k
        return float(np.abs(self.u.conj().T @ self.u - np.eye(nk)).max())


def witness_action_tensor(w: FactorizationWitness) -> np.ndarray:
    """The map realized by a witness, as the tensor out[i, p, j, q] = T(e_ij)[p, q].

    Uses the block Gram identity: the weighted ancilla trace of
    u*(e_ij (x) 1)u in block (p, q) is a weighted inner product of two
    n-block rows of u, so no large intermediate products are formed.
    """
    n, k = w.n, w.k
    u4 = w.u.reshape(n, k, n, k)
    omega = w.weight_vector()
    return np.einsum("iapb,jaqb,b->ipjq", u4.conj(), u4, omega, optimize=True)


def channel_action_tensor(T: Channel) -> np.ndarray:
    """out[i, p, j, q] = T(e_ij)[p, q] straight from the Kraus family."""
    stack = np.stack(T.kraus)
    return np.einsum("kip,kjq->ipjq", stack.conj(), stack, optimize=True)


def witness_residuals(T: Channel, w: FactorizationWitness, units=None) -> dict:
    """Unitarity and action residuals of a witness against a channel.

    ``units`` restricts the action comparison to the listed (i, j) matrix
    units; the resulting residual is then a lower bound on the full one (a
    violation on a subset already disproves the witness).  The default
    compares all n^2 units at once.
    """
    if w.n != T.dim:
        raise DimensionError("witness dimension does not match the channel")
    if units is None:
        action = float(
            np.abs(witness_action_tensor(w) - channel_action_tensor(T)).max()
        )
    else:
        n, k = w.n, w.k
        u4 = w.u.reshape(n, k, n, k)
        omega = w.weight_vector()
        stack = np.stack(T.kraus)
        action = 0.0
        for i, j in units:
            got = np.einsum(
                "apb,aqb,b->pq", u4[i].conj(), u4[j], omega, optimize=True
            )
            want = np.einsum("kp,kq->pq", stack[:, i, :].conj(), stack[:, j, :])
            action = max(action, float(np.abs(got - want).max()))
    return {"unitarity": w.unitarity_residual(), "action": action}


def verify_witness(
    T: Channel, w: FactorizationWitness, tol: Tolerances = DEFAULT_TOL
) -> bool:
    """True iff u is unitary and reproduces T on every matrix unit."""
    res = witness_residuals(T, w)
    nk = w.n * w.k
    return (
        res["unitarity"] <= tol.verify_abs * nk and res["action"] <= tol.verify_abs
    )


def non_factorizable_certificate(
    T: Channel, tol: Tolerances = DEFAULT_TOL
) -> Certificate:
    """Negative certificate from independence of canonical Kraus products.

    The Kraus family is canonicalized first, so the test never fires on a
    redundant presentation.  Returns NOT_FACTORIZABLE or INCONCLUSIVE; the
    toolkit never claims factorizability here.
    """
    report = verify_markov(T, tol)
    if not report.is_markov:
        raise MarkovViolationError(
            f"certificate requires a Markov map; residuals {report.residuals}"
        )
    canonical = canonical_kraus_family(T, tol)
    d = len(canonical.kraus)
    if d < 2:
        return Certificate(
            Verdict.INCONCLUSIVE,
            reason="single-kraus",
            evidence={"d": d},
        )
    products = [
        a.conj().T @ b for a in canonical.kraus for b in canonical.kraus
    ]
    rk = rank_of_set(products, tol)
    evidence = {
        "d": d,
        "product_count": d * d,
        "product_rank": rk.rank,
        "gram_retained_ratio": rk.retained_ratio,
        "gram_max_eigenvalue": float(rk.gram_eigenvalues[-1]),
    }
    if rk.independent:
        return Certificate(
            Verdict.NOT_FACTORIZABLE,
            reason="kraus-product-independence",
            evidence=evidence,
        )
    return Certificate(
        Verdict.INCONCLUSIVE, reason="dependent-products", evidence=evidence
    )


def _check_commuting_selfadjoint(a, tol: Tolerances):
    """Validate the commuting self-adjoint square-partition preconditions."""
    mats = [as_matrix(m) for m in a]
    if not mats:
        raise ValueError("need at least one matrix")
    n = mats[0].shape[0]
    for m in mats:
        if m.shape != (n, n):
            raise DimensionError("family must share one square shape")
    sa = max(float(np.abs(m - m.conj().T).max()) for m in mats)
    if sa > tol.verify_abs:
        raise ValueError(f"family is not self-adjoint (residual {sa:.3e})")
    comm = 0.0
    for i, x in enumerate(mats):
        for y in mats[i + 1 :]:
            comm = max(comm, float(np.abs(x @ y - y @ x).max()))
    if comm > tol.verify_abs:
        raise ValueError(f"family does not commute (residual {comm:.3e})")
    unit = float(np.abs(sum(m @ m for m in mats) - np.eye(n)).max())
    if unit > tol.verify_abs * n:
        raise ValueError(f"squares do not sum to the identity (residual {unit:.3e})")
    return mats, n


def jordan_wigner_involutions(d: int) -> list[np.ndarray]:
    """d anticommuting self-adjoint unitaries in M_{2^d}, with integer entries.

    v_i = Z^(i-1) (x) X (x) 1^(d-i); they satisfy v_i v_j + v_j v_i = 2 delta_ij.
    """
    if d < 1:
        raise ValueError("need d >= 1")
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    out = []
    for i in range(d):
        op = np.eye(1, dtype=complex)
        for j in range(d):
            if j < i:
                op = np.kron(op, z)
            elif j == i:
                op = np.kron(op, x)
            else:
                op = np.kron(op, eye)
        out.append(op)
    return out


def car_factorize(a, tol: Tolerances = DEFAULT_TOL) -> FactorizationWitness:
    """Factorization witness for T(x) = sum a_i x a_i with commuting self-adjoint a_i.

    The ancilla carries anticommuting self-adjoint unitaries v_i
    (Jordan-Wigner form), and u = sum a_i (x) v_i is unitary because
    sum a_i^2 = 1; the v_i are trace-orthonormal, so the witness reproduces T.
    """
    mats, n = _check_commuting_selfadjoint(a, tol)
    d = len(mats)
    vs = jordan_wigner_involutions(d)
    k = 2**d
    u = sum(np.kron(m, v) for m, v in zip(mats, vs))
    return FactorizationWitness.uniform(n, k, u)


def conv_aut_obstruction(a, tol: Tolerances = DEFAULT_TOL) -> Certificate:
    """Certificate that T(x) = sum a_i x a_i is not a mixture of unitary conjugations.

    Fires when d >= 3 and the symmetric products {a_i a_j : i <= j} are
    linearly independent; otherwise INCONCLUSIVE.
    """
    mats, _ = _check_commuting_selfadjoint(a, tol)
    d = len(mats)
    if d < 3:
        return Certificate(
            Verdict.INCONCLUSIVE, reason="too-few-terms", evidence={"d": d}
        )
    products = [mats[i] @ mats[j] for i in range(d) for j in range(i, d)]
    rk = rank_of_set(products, tol)
    evidence = {
        "d": d,
        "product_count": len(products),
        "product_rank": rk.rank,
        "gram_retained_ratio": rk.retained_ratio,
    }
    if rk.independent:
        return Certificate(
            Verdict.NOT_IN_CONV_AUT,
            reason="symmetric-product-independence",
            evidence=evidence,
        )
    return Certificate(
        Verdict.INCONCLUSIVE, reason="dependent-products", evidence=evidence
    )


def witness_from_unitary_mixture(unitaries, weights) -> FactorizationWitness:
    """Abelian-ancilla witness for a convex combination of unitary conjugations."""
    mats = [as_matrix(u) for u in unitaries]
    n = mats[0].shape[0]
    s = len(mats)
    weights = np.asarray(weights, dtype=float)
    u = np.zeros((n * s, n * s), dtype=complex)
    for i, m in enumerate(mats):
        e = np.zeros((s, s))
        e[i, i] = 1.0
        u += np.kron(m, e)
    blocks = tuple((1, float(w)) for w in weights)
    u.setflags(write=False)
    return FactorizationWitness(n=n, k=s, u=u, ancilla_blocks=blocks)


def verify_conv_aut_combination(
    T: Channel, unitaries, weights, tol: Tolerances = DEFAULT_TOL
) -> bool:
    """Whether sum_i c_i u_i* x u_i reproduces T on every matrix unit."""
    mats = [as_matrix(u) for u in unitaries]
    weights = np.asarray(weights, dtype=float)
    if len(mats) != len(weights):
        raise ValueError("one weight per unitary")
    if np.any(weights < -1e-12) or abs(weights.sum() - 1.0) > 1e-9:
        return False
    n = T.dim
    for u in mats:
        if u.shape != (n, n):
            raise DimensionError("unitaries must match the channel dimension")
        if float(np.abs(u.conj().T @ u - np.eye(n)).max()) > tol.verify_abs * n:
            return False
    target = channel_action_tensor(T)
    stack = np.stack(mats)
    got = np.einsum("k,kip,kjq->ipjq", weights, stack.conj(), stack, optimize=True)
    return float(np.abs(got - target).max()) <= tol.verify_abs
