"""Completely positive maps on M_n in Kraus form, with the star on the left.

A channel acts as ``T(x) = sum_i a_i* x a_i``; with this convention the map is
unital iff ``sum a_i* a_i = 1`` and trace-preserving iff ``sum a_i a_i* = 1``.
A Markov map is unital, trace-preserving and completely positive.  The Choi
matrix is the block matrix ``(T(e_ij))_ij``, derived on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import (
    DEFAULT_TOL,
    CompletePositivityError,
    DimensionError,
    ResourceLimitError,
    Tolerances,
    as_matrix,
    hermitian_residual,
    phase_normalize_columns,
    rank_of_set,
)

# Above this dimension Choi matrices are never materialized densely; equality
# checks switch to the low-rank QR route.
DENSE_CHOI_MAX_DIM = 40

TENSOR_DIM_CAP = 4096


@dataclass(frozen=True)
class Channel:
    """A completely positive map stored as a Kraus family of n-by-n matrices."""

    dim: int
    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        for a in self.kraus:
            if a.shape != (self.dim, self.dim):
                raise DimensionError(
                    f"Kraus operator of shape {a.shape} on a dim-{self.dim} channel"
                )

    @classmethod
    def from_kraus(cls, mats) -> "Channel":
        mats = [as_matrix(m) for m in mats]
        if not mats:
            raise ValueError("a channel needs at least one Kraus operator")
        n = mats[0].shape[0]
        if mats[0].shape != (n, n):
            raise DimensionError("Kraus operators must be square")
        frozen = []
        for m in mats:
            c = m.astype(complex, copy=True)
            c.setflags(write=False)
            frozen.append(c)
        return cls(dim=n, kraus=tuple(frozen))

    @classmethod
    def identity(cls, n: int) -> "Channel":
        return cls.from_kraus([np.eye(n)])

    def apply(self, x) -> np.ndarray:
        x = as_matrix(x)
        if x.shape != (self.dim, self.dim):
            raise DimensionError(f"argument shape {x.shape}, channel dim {self.dim}")
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for a in self.kraus:
            out += a.conj().T @ x @ a
        return out

    __call__ = apply


@dataclass(frozen=True)
class ChoiMatrix:
    """Block matrix with block (i, j) equal to T(e_ij)."""

    dim: int
    mat: np.ndarray

    def __post_init__(self):
        n2 = self.dim * self.dim
        if self.mat.shape != (n2, n2):
            raise DimensionError(f"Choi of a dim-{self.dim} map must be {n2}x{n2}")


@dataclass(frozen=True)
class MarkovReport:
    is_cp: bool
    is_unital: bool
    is_trace_preserving: bool
    is_self_adjoint: bool
    kraus_rank: int
    residuals: dict = field(default_factory=dict)

    @property
    def is_markov(self) -> bool:
        return self.is_cp and self.is_unital and self.is_trace_preserving


def _choi_vectors(T: Channel) -> np.ndarray:
    """Rows are vec(conj(a_k)); the Choi is the sum of their outer squares."""
    return np.stack([a.conj().reshape(-1) for a in T.kraus])


def choi_of(T: Channel) -> ChoiMatrix:
    """Choi matrix of a channel: PSD, with trace n for trace-preserving maps."""
    if T.dim > DENSE_CHOI_MAX_DIM:
        raise ResourceLimitError(
            f"dense Choi for dim {T.dim} exceeds the cap {DENSE_CHOI_MAX_DIM}"
        )
    vs = _choi_vectors(T)
    mat = vs.T @ vs.conj()
    return ChoiMatrix(dim=T.dim, mat=mat)


def kraus_canonical(C: ChoiMatrix, tol: Tolerances = DEFAULT_TOL) -> Channel:
    """Linearly independent, trace-orthogonal Kraus family from a Choi matrix.

    Eigenvectors of the nonzero eigenvalues, scaled by the square root of the
    eigenvalue; non-PSD input raises carrying the offending eigenvalue.  The
    ordering (descending eigenvalue, then lexicographic on the phase-normalized
    entries) makes the output deterministic.
    """
    mat = as_matrix(C.mat)
    if hermitian_residual(mat) > tol.verify_abs * max(1.0, float(np.abs(mat).max())):
        raise CompletePositivityError(
            "Choi matrix is not Hermitian", min_eigenvalue=float("nan")
        )
    values, vectors = np.linalg.eigh((mat + mat.conj().T) / 2)
    radius = float(np.abs(values).max()) if values.size else 0.0
    if radius > 0 and float(values.min()) < -tol.psd_floor * radius:
        raise CompletePositivityError(
            f"Choi matrix has negative eigenvalue {values.min():.3e}",
            min_eigenvalue=float(values.min()),
        )
    top = max(float(values[-1]), 0.0)
    keep = np.nonzero(values > tol.rank_rel * top)[0] if top > 0 else []
    n = C.dim
    ops = []
    for idx in keep:
        vec = phase_normalize_columns(vectors[:, idx : idx + 1])[:, 0]
        ops.append(np.sqrt(values[idx]) * vec.conj().reshape(n, n))
    # descending eigenvalue; ties resolved by entry lexicographic order
    keys = sorted(
        range(len(ops)),
        key=lambda i: (
            -round(float(values[keep[i]]), 12),
            tuple(np.round(np.ascontiguousarray(ops[i].reshape(-1)).view(float), 9)),
        ),
    )
    ops = [ops[i] for i in keys]
    if not ops:
        ops = [np.zeros((n, n), dtype=complex)]
    return Channel.from_kraus(ops)


def canonical_kraus_family(T: Channel, tol: Tolerances = DEFAULT_TOL) -> Channel:
    """Canonical (independent, trace-orthogonal) presentation of the same map.

    Equivalent to eigendecomposing the Choi matrix, but computed from the
    d-by-d Gram of the Kraus family, so it works at any dimension: the Choi
    eigenvectors with nonzero eigenvalue are exactly the Gram-eigenvector
    combinations of the given operators.
    """
    stack = np.stack(T.kraus)
    gram = np.einsum("iab,jab->ij", stack.conj(), stack)
    values, vectors = np.linalg.eigh((gram + gram.conj().T) / 2)
    top = max(float(values[-1]), 0.0)
    keep = np.nonzero(values > tol.rank_rel * top)[0] if top > 0 else []
    ops = []
    for idx in keep:
        w = vectors[:, idx]
        op = np.einsum("k,kab->ab", w.conj(), stack)
        flat = op.reshape(-1)
        mags = np.abs(flat)
        pivot = flat[int(np.argmax(mags > 1e-12 * mags.max()))]
        if abs(pivot) > 0:
            op = op * (abs(pivot) / pivot)
        ops.append(op)
    keys = sorted(
        range(len(ops)),
        key=lambda i: (
            -round(float(values[keep[i]]), 12),
            tuple(np.round(np.ascontiguousarray(ops[i].reshape(-1)[:64]).view(float), 9)),
        ),
    )
    ops = [ops[i] for i in keys]
    if not ops:
        ops = [np.zeros((T.dim, T.dim), dtype=complex)]
    return Channel.from_kraus(ops)


def choi_distance(T: Channel, S: Channel) -> float:
    """Max-abs entrywise distance between two Choi matrices (dense route)."""
    if T.dim != S.dim:
        raise DimensionError("channels act on different dimensions")
    return float(np.abs(choi_of(T).mat - choi_of(S).mat).max())


def choi_frobenius_distance(T: Channel, S: Channel) -> float:
    """Frobenius distance between Choi matrices without forming them.

    Works on the span of the Kraus vectorizations via a thin QR, so it is
    accurate for channels of any dimension.
    """
    if T.dim != S.dim:
        raise DimensionError("channels act on different dimensions")
    a = _choi_vectors(T).T  # columns
    b = _choi_vectors(S).T
    stacked = np.concatenate([a, b], axis=1)
    q, r = np.linalg.qr(stacked)
    ra = r[:, : a.shape[1]]
    rb = r[:, a.shape[1] :]
    diff = ra @ ra.conj().T - rb @ rb.conj().T
    return float(np.linalg.norm(diff))


def adjoint(T: Channel) -> Channel:
    """Adjoint with respect to the normalized trace: Kraus family {a_i*}."""
    return Channel.from_kraus([a.conj().T for a in T.kraus])


def verify_markov(T: Channel, tol: Tolerances = DEFAULT_TOL) -> MarkovReport:
    """Axiomatic report: unitality, trace preservation, self-adjointness.

    Complete positivity is automatic in Kraus form.  Self-adjointness compares
    the Choi matrices of T and its adjoint through the low-rank route.  State
    symmetry (the modular condition) is trivial for the normalized trace, so
    it is not a separate flag.
    """
    n = T.dim
    eye = np.eye(n)
    unital_res = float(np.abs(sum(a.conj().T @ a for a in T.kraus) - eye).max())
    tp_res = float(np.abs(sum(a @ a.conj().T for a in T.kraus) - eye).max())
    sa_res = choi_frobenius_distance(T, adjoint(T))
    rank = rank_of_set(T.kraus, tol).rank
    return MarkovReport(
        is_cp=True,
        is_unital=unital_res <= tol.verify_abs * n,
        is_trace_preserving=tp_res <= tol.verify_abs * n,
        is_self_adjoint=sa_res <= tol.verify_abs * n,
        kraus_rank=rank,
        residuals={
            "unital": unital_res,
            "trace_preserving": tp_res,
            "self_adjoint": sa_res,
        },
    )


def compose(S: Channel, T: Channel) -> Channel:
    """The map x -> T(S(x)); Kraus family of all products a_i b_j."""
    if S.dim != T.dim:
        raise DimensionError("composition needs matching dimensions")
    return Channel.from_kraus([a @ b for a in S.kraus for b in T.kraus])


def tensor(T: Channel, S: Channel) -> Channel:
    """Tensor product channel with Kraus family {a_i (x) b_j}."""
    return Channel.from_kraus([np.kron(a, b) for a in T.kraus for b in S.kraus])


def tensor_power(T: Channel, k: int, dim_cap: int = TENSOR_DIM_CAP) -> Channel:
    if k < 1:
        raise ValueError("tensor_power needs k >= 1")
    if T.dim**k > dim_cap:
        raise ResourceLimitError(
            f"tensor power dimension {T.dim}^{k} exceeds the cap {dim_cap}"
        )
    out = T
    for _ in range(k - 1):
        out = tensor(out, T)
    return out


def partial_trace_second(z: np.ndarray, m: int, l: int) -> np.ndarray:
    """Normalized partial trace M_m (x) M_l -> M_m, i.e. (1 (x) tau_l)."""
    z = as_matrix(z)
    if z.shape != (m * l, m * l):
        raise DimensionError(f"expected {(m * l, m * l)}, got {z.shape}")
    return np.einsum("albl->ab", z.reshape(m, l, m, l)) / l


def compress_check(T: Channel, S: Channel, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Whether compressing T (x) S back to the first factor returns T.

    Embeds x as x (x) 1, applies the tensor channel, then takes the normalized
    partial trace over the second factor; checked on all matrix units.
    """
    m, l = T.dim, S.dim
    ts = tensor(T, S)
    eye_l = np.eye(l)
    worst = 0.0
    for i in range(m):
        for j in range(m):
            unit = np.zeros((m, m), dtype=complex)
            unit[i, j] = 1.0
            lifted = ts.apply(np.kron(unit, eye_l))
            back = partial_trace_second(lifted, m, l)
            worst = max(worst, float(np.abs(back - T.apply(unit)).max()))
    return worst <= tol.verify_abs
