"""One-parameter Schur-multiplier semigroups T(t) = T_{exp(-tL)} entrywise.

A Hermitian zero-diagonal generator L is admissible when its quadratic form is
nonpositive on the mean-zero subspace (conditional negativity); by Schoenberg
the entrywise exponentials exp(-tL) are then PSD with unit diagonal, so every
T(t) is Markov.  The obstruction scan evaluates the quadratic survival
function f(c, t) at three fixed mean-zero vectors; a positive margin
sqrt(g) - 2 sqrt(h) - sqrt(k) is incompatible with any Gram-of-unitaries
realization of exp(-tL) at that t, hence certifies non-factorizability there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import Channel
from .numerics import (
    DEFAULT_TOL,
    DimensionError,
    GeneratorError,
    Tolerances,
    as_matrix,
    hermitian_residual,
    op_norm,
)
from .schur import SchurMatrix, schur_channel


@dataclass(frozen=True)
class SemigroupGenerator:
    n: int
    L: np.ndarray

    def __post_init__(self):
        if self.L.shape != (self.n, self.n):
            raise DimensionError(f"expected {self.n}x{self.n}, got {self.L.shape}")

    @classmethod
    def of(cls, L, tol: Tolerances = DEFAULT_TOL) -> "SemigroupGenerator":
        L = as_matrix(L).astype(complex, copy=True)
        if L.shape[0] != L.shape[1]:
            raise DimensionError("generator must be square")
        if float(np.abs(np.diag(L)).max()) > 0.0:
            raise GeneratorError("generator diagonal must be exactly zero")
        if hermitian_residual(L) > tol.verify_abs:
            raise GeneratorError(
                "generator must be Hermitian; it is rejected rather than symmetrized"
            )
        L.setflags(write=False)
        return cls(n=L.shape[0], L=L)


@dataclass(frozen=True)
class ObstructionSample:
    """Values of the survival function at one time, plus the witness margin."""

    t: float
    g: float
    h: float
    k: float
    margin: float


def cnd_check(G: SemigroupGenerator, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Conditional negativity of the generator on the mean-zero subspace.

    Implemented as a definiteness test of P L P for the mean-zero projection P:
    every eigenvalue must be <= psd_floor * ||L||.  This is exactly the
    Schoenberg direction: it holds iff exp(-tL) is entrywise-exponential PSD
    for all t >= 0.
    """
    n = G.n
    p = np.eye(n) - np.full((n, n), 1.0 / n)
    compressed = p @ G.L @ p
    ev = np.linalg.eigvalsh((compressed + compressed.conj().T) / 2)
    scale = max(op_norm(G.L), 1e-300)
    return float(ev.max()) <= tol.psd_floor * scale


def evolve(
    G: SemigroupGenerator, t: float, tol: Tolerances = DEFAULT_TOL
) -> Channel:
    """The Markov Schur channel of exp(-tL); t = 0 gives the identity."""
    if t < 0:
        raise ValueError("the semigroup is defined for t >= 0")
    if not cnd_check(G, tol):
        raise GeneratorError(
            "generator fails conditional negativity; exp(-tL) would not stay PSD"
        )
    c = np.exp(-t * G.L)
    return schur_channel(SchurMatrix.of(c), tol)


def survival_value(G: SemigroupGenerator, c: np.ndarray, t: float) -> float:
    """f(c, t) = sum_jk conj(c_j) c_k exp(-t L_jk); real for Hermitian L."""
    c = np.asarray(c, dtype=complex)
    if c.shape != (G.n,):
        raise DimensionError(f"vector length {c.shape} vs generator size {G.n}")
    mat = np.exp(-t * G.L)
    return float((c.conj() @ mat @ c).real)


def _obstruction_vectors() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    w = np.exp(2j * np.pi / 3)
    c_g = np.array([0.0, 1.0, w.conjugate(), w], dtype=complex) / 3.0
    c_h = np.array([0.0, 1.0, w, w.conjugate()], dtype=complex) / 3.0
    c_k = np.array([-1.0, 1 / 3, 1 / 3, 1 / 3], dtype=complex)
    return c_g, c_h, c_k


def obstruction_scan(G: SemigroupGenerator, times) -> list[ObstructionSample]:
    """Evaluate the three survival values and the margin at each positive time.

    g grows linearly in t while h and k are quadratic, so the margin is
    positive for all small t: in that window exp(-tL) admits no
    Gram-of-unitaries data and T(t) is not factorizable.
    """
    if G.n != 4:
        raise ValueError("the obstruction vectors are 4-dimensional")
    c_g, c_h, c_k = _obstruction_vectors()
    out = []
    for t in times:
        t = float(t)
        if t <= 0:
            raise ValueError("scan times must be positive")
        g = survival_value(G, c_g, t)
        h = survival_value(G, c_h, t)
        k = survival_value(G, c_k, t)
        margin = (
            np.sqrt(max(g, 0.0)) - 2 * np.sqrt(max(h, 0.0)) - np.sqrt(max(k, 0.0))
        )
        out.append(ObstructionSample(t=t, g=g, h=h, k=k, margin=float(margin)))
    return out


def cyclic_generator() -> SemigroupGenerator:
    """The bundled 4x4 generator: first row 1/2, cyclic 1-omega pattern below.

    It is the s-derivative at s = 1 of the rank-two correlation family, hence
    conditionally negative; its semigroup exits the factorizable set
    immediately after t = 0.
    """
    w = np.exp(2j * np.pi / 3)
    wb = w.conjugate()
    L = np.array(
        [
            [0.0, 0.5, 0.5, 0.5],
            [0.5, 0.0, 1 - w, 1 - wb],
            [0.5, 1 - wb, 0.0, 1 - w],
            [0.5, 1 - w, 1 - wb, 0.0],
        ],
        dtype=complex,
    )
    return SemigroupGenerator.of(L)
