"""Tolerance-controlled dense complex linear algebra shared by every module.

All matrices are plain ``numpy`` arrays of ``complex128``; there is no wrapper
type.  Rank decisions are made on Gram-matrix eigenvalues (trace inner
product), positivity decisions relative to the spectral radius, so uniformly
scaled inputs behave identically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DimensionError(ValueError):
    """Shapes of the supplied matrices are inconsistent."""


class CompletePositivityError(ValueError):
    """A matrix required to be positive semidefinite is not.

    Carries the offending eigenvalue in ``min_eigenvalue``.
    """

    def __init__(self, message: str, min_eigenvalue: float):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class MarkovViolationError(ValueError):
    """Input fails a unitality / trace-preservation precondition."""


class GeneratorError(ValueError):
    """A semigroup generator fails its admissibility test."""


class SearchFailureError(RuntimeError):
    """A randomized constructive search exhausted its budget."""


class ResourceLimitError(RuntimeError):
    """Requested computation exceeds a configured size cap."""


@dataclass(frozen=True)
class Tolerances:
    """Numeric thresholds used across the toolkit.

    rank_rel
        Relative Gram-eigenvalue cutoff for rank decisions.
    psd_floor
        Most negative admissible eigenvalue, relative to the spectral radius.
    verify_abs
        Absolute entrywise tolerance for equality verification.
    """

    rank_rel: float = 1e-9
    psd_floor: float = 1e-10
    verify_abs: float = 1e-10

    def __post_init__(self):
        for name in ("rank_rel", "psd_floor", "verify_abs"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name} must be strictly positive")


DEFAULT_TOL = Tolerances()


def as_matrix(m) -> np.ndarray:
    """Coerce input to a finite 2-d complex array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).conj().T


def frob_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Trace inner product trace(a* b)."""
    return complex(np.vdot(a, b))


def gram_matrix(mats) -> np.ndarray:
    """Gram matrix G[i, j] = trace(m_i* m_j) of a family of same-shape matrices."""
    stack = np.stack([as_matrix(m) for m in mats])
    return np.einsum("iab,jab->ij", stack.conj(), stack)


@dataclass(frozen=True)
class RankResult:
    rank: int
    independent: bool
    gram_eigenvalues: np.ndarray  # ascending

    @property
    def retained_ratio(self) -> float:
        """Smallest retained eigenvalue over the largest (1.0 when rank 0)."""
        ev = self.gram_eigenvalues
        if self.rank == 0:
            return 1.0
        kept = ev[len(ev) - self.rank :]
        return float(kept[0] / kept[-1])


def rank_from_gram(gram: np.ndarray, size: int, tol: Tolerances = DEFAULT_TOL) -> RankResult:
    """Rank decision from an already-computed Gram matrix of a size-``size`` family."""
    ev = np.linalg.eigvalsh((gram + gram.conj().T) / 2)
    top = max(float(ev[-1]), 0.0)
    rank = 0 if top == 0.0 else int(np.count_nonzero(ev > tol.rank_rel * top))
    return RankResult(rank=rank, independent=rank == size, gram_eigenvalues=ev)


def rank_of_set(mats, tol: Tolerances = DEFAULT_TOL) -> RankResult:
    """Numerical rank of a family of matrices in trace inner-product space.

    The rank is the number of Gram eigenvalues above ``rank_rel`` times the
    largest one; ``independent`` means the rank equals the family size.
    """
    mats = list(mats)
    if not mats:
        raise ValueError("rank_of_set requires a nonempty family")
    shape = as_matrix(mats[0]).shape
    for m in mats[1:]:
        if as_matrix(m).shape != shape:
            raise DimensionError("rank_of_set requires a common shape")
    return rank_from_gram(gram_matrix(mats), len(mats), tol)


def hermitian_residual(m: np.ndarray) -> float:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError("hermiticity is defined for square matrices only")
    return float(np.abs(m - m.conj().T).max())


def is_psd(m, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Positive semidefiniteness up to ``psd_floor`` relative to the spectral radius.

    Non-Hermitian input (beyond ``verify_abs``) is simply not PSD.  The zero
    matrix counts as PSD.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError("is_psd requires a square matrix")
    if hermitian_residual(m) > tol.verify_abs:
        return False
    ev = np.linalg.eigvalsh((m + m.conj().T) / 2)
    radius = float(np.abs(ev).max()) if ev.size else 0.0
    if radius == 0.0:
        return True
    return float(ev.min()) >= -tol.psd_floor * radius


def hermitian_eig(m, tol: Tolerances = DEFAULT_TOL):
    """Eigendecomposition of a Hermitian matrix: ascending values, unitary columns."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionError("hermitian_eig requires a square matrix")
    if hermitian_residual(m) > tol.verify_abs:
        raise ValueError(
            f"matrix is not Hermitian within {tol.verify_abs} "
            f"(residual {hermitian_residual(m):.3e})"
        )
    values, vectors = np.linalg.eigh((m + m.conj().T) / 2)
    return values, vectors


def op_norm(m) -> float:
    """Operator (spectral) norm: largest singular value, via the Gram eigenproblem."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix contains non-finite entries")
    if m.size == 0:
        return 0.0
    gram = m.conj().T @ m
    values = np.linalg.eigvalsh((gram + gram.conj().T) / 2)
    return float(np.sqrt(max(float(values[-1]), 0.0)))


def phase_normalize_columns(v: np.ndarray, cutoff: float = 1e-12) -> np.ndarray:
    """Rescale each column by a unimodular so its first significant entry is real positive.

    Makes eigenvector-derived constructions deterministic and keeps real input
    real up to sign.
    """
    v = np.array(v, dtype=complex, copy=True)
    for j in range(v.shape[1]):
        col = v[:, j]
        mags = np.abs(col)
        top = mags.max()
        if top <= 0:
            continue
        idx = int(np.argmax(mags > cutoff * top))
        pivot = col[idx]
        if abs(pivot) > 0:
            v[:, j] = col * (abs(pivot) / pivot)
    return v
