"""Trace-coefficient maps into a d-dimensional Hilbert space and their cb gap.

A frame a_1 .. a_d in a tracial algebra A (orthonormal under the trace, with
sum a_i* a_i = sum a_i a_i* = d 1) defines T x = (tau(a_1* x), ..,
tau(a_d* x)).  Such maps satisfy the optimal pointwise bound
||Tx||^2 <= tau(x* x) with constant one (Bessel), yet when d >= 2 and the
products a_i* a_j are linearly independent the completely bounded norm is
strictly below one.  The ascent engine produces certified lower bounds on
||T||_cb^2: every unitary U in A (x) M_k yields the value
||sum_i u_i (x) conj(u_i)|| through its frame coefficients u_i, and the
supremum over U and k is ||T||_cb^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .numerics import (
    DEFAULT_TOL,
    DimensionError,
    Tolerances,
    rank_from_gram,
)


@dataclass(frozen=True)
class Algebra:
    """Carrier algebra: full matrices M_n, or the diagonal functions on N points.

    Elements of the abelian algebra are 1-d arrays; the trace is the uniform
    mean.  Matrix elements are n-by-n arrays; the trace is tr/n.
    """

    dim: int
    abelian: bool = False

    def element(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        want = (self.dim,) if self.abelian else (self.dim, self.dim)
        if x.shape != want:
            raise DimensionError(f"expected shape {want}, got {x.shape}")
        return x

    def star(self, x) -> np.ndarray:
        return x.conj() if self.abelian else x.conj().T

    def mult(self, x, y) -> np.ndarray:
        return x * y if self.abelian else x @ y

    def identity(self) -> np.ndarray:
        return np.ones(self.dim, complex) if self.abelian else np.eye(self.dim, dtype=complex)

    def trace(self, x) -> complex:
        return complex(np.sum(x) / self.dim if self.abelian else np.trace(x) / self.dim)

    def inner(self, x, y) -> complex:
        """tau(x* y)."""
        return complex(np.vdot(x, y) / self.dim)

    def gaussian(self, rng: np.random.Generator) -> np.ndarray:
        shape = (self.dim,) if self.abelian else (self.dim, self.dim)
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    @property
    def linear_dimension(self) -> int:
        return self.dim if self.abelian else self.dim * self.dim

    def basis(self) -> list[np.ndarray]:
        """A trace-orthonormal linear basis (point masses / matrix units)."""
        out = []
        if self.abelian:
            for t in range(self.dim):
                e = np.zeros(self.dim, complex)
                e[t] = np.sqrt(self.dim)
                out.append(e)
        else:
            for i in range(self.dim):
                for j in range(self.dim):
                    e = np.zeros((self.dim, self.dim), complex)
                    e[i, j] = np.sqrt(self.dim)
                    out.append(e)
        return out


@dataclass(frozen=True)
class OHMap:
    """A validated trace-coefficient map given by its frame."""

    algebra: Algebra
    frame: tuple[np.ndarray, ...]
    products_independent: bool
    strict_gap: bool
    residuals: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return len(self.frame)

    def apply(self, x) -> np.ndarray:
        x = self.algebra.element(x)
        return np.array([self.algebra.inner(a, x) for a in self.frame])

    __call__ = apply


def frame_validate(frame, algebra: Algebra, tol: Tolerances = DEFAULT_TOL) -> OHMap:
    """Check orthonormality and the two-sided sum rule; report the gap flags.

    Violations of the structural conditions raise with residuals; the
    independence of the d^2 frame products only sets ``strict_gap`` (together
    with d >= 2), which is the guarantee that the cb norm is strictly below 1.
    """
    mats = [algebra.element(a) for a in frame]
    if not mats:
        raise ValueError("a frame needs at least one element")
    d = len(mats)
    gram = np.array([[algebra.inner(x, y) for y in mats] for x in mats])
    ortho_res = float(np.abs(gram - np.eye(d)).max())
    if ortho_res > tol.verify_abs:
        raise ValueError(f"frame is not trace-orthonormal (residual {ortho_res:.3e})")
    left = sum(algebra.mult(algebra.star(a), a) for a in mats)
    right = sum(algebra.mult(a, algebra.star(a)) for a in mats)
    ident = algebra.identity()
    sum_res = max(
        float(np.abs(left - d * ident).max()), float(np.abs(right - d * ident).max())
    )
    if sum_res > tol.verify_abs * algebra.dim:
        raise ValueError(f"frame sum rule fails (residual {sum_res:.3e})")
    products = [algebra.mult(algebra.star(x), y) for x in mats for y in mats]
    stack = np.stack([p.reshape(-1) for p in products])
    rk = rank_from_gram(stack.conj() @ stack.T, len(products), tol)
    frozen = []
    for m in mats:
        c = m.copy()
        c.setflags(write=False)
        frozen.append(c)
    return OHMap(
        algebra=algebra,
        frame=tuple(frozen),
        products_independent=rk.independent,
        strict_gap=d >= 2 and rk.independent,
        residuals={"orthonormal": ortho_res, "sum_rule": sum_res},
    )


def frame_m3() -> OHMap:
    """Three scaled antisymmetric 3x3 matrices; coefficient map on M_3."""
    s = np.sqrt(3.0 / 2.0)
    a1 = s * np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=complex)
    a2 = s * np.array([[0, 0, 1], [0, 0, 0], [-1, 0, 0]], dtype=complex)
    a3 = s * np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)
    return frame_validate([a1, a2, a3], Algebra(3, abelian=False))


def frame_l4() -> OHMap:
    """Two-element frame on the four-point diagonal algebra (uniform trace)."""
    w = np.exp(2j * np.pi / 3)
    a1 = np.array([np.sqrt(2)] + [np.sqrt(2) / np.sqrt(3)] * 3, dtype=complex)
    a2 = (2 / np.sqrt(3)) * np.array([0, 1, w, w.conjugate()], dtype=complex)
    return frame_validate([a1, a2], Algebra(4, abelian=True))


@dataclass(frozen=True)
class BesselReport:
    samples: int
    violations: int
    max_excess: float
    frame_norms_sq: np.ndarray
    frame_sum_residual: float

    @property
    def ok(self) -> bool:
        return self.violations == 0


def check_ct_one(
    T: OHMap, samples: int = 1000, seed: int = 0, tol: Tolerances = DEFAULT_TOL
) -> BesselReport:
    """Both sides of the constant-one property of the pointwise bound.

    Upper side: ||Tx||^2 <= tau(x* x) on random Gaussian elements (Bessel for
    an orthonormal family); a violation is an excess beyond 1e-12 relative.
    Lower side: each frame element is mapped to a unit vector, and the norms
    square-sum to d, which forces the constant to be at least one.
    """
    alg = T.algebra
    rng = np.random.default_rng(seed)
    violations = 0
    max_excess = 0.0
    for _ in range(samples):
        x = alg.gaussian(rng)
        lhs = float(np.sum(np.abs(T.apply(x)) ** 2))
        rhs = float(alg.inner(x, x).real)
        excess = lhs - rhs
        max_excess = max(max_excess, excess)
        if excess > 1e-12 * max(rhs, 1.0):
            violations += 1
    norms = np.array([float(np.sum(np.abs(T.apply(a)) ** 2)) for a in T.frame])
    return BesselReport(
        samples=samples,
        violations=violations,
        max_excess=max_excess,
        frame_norms_sq=norms,
        frame_sum_residual=abs(float(norms.sum()) - T.d),
    )


# ---------------------------------------------------------------------------
# unitary decomposition and the ascent engine
# ---------------------------------------------------------------------------

def orthonormal_extension(T: OHMap) -> list[np.ndarray]:
    """Extend the frame to a trace-orthonormal basis of the whole algebra."""
    alg = T.algebra
    basis = list(T.frame)
    for cand in alg.basis():
        v = cand.astype(complex)
        for b in basis:
            v = v - alg.inner(b, v) * b
        norm = np.sqrt(alg.inner(v, v).real)
        if norm > 1e-8:
            v = v / norm
            # a second pass keeps orthogonality at working precision
            for b in basis:
                v = v - alg.inner(b, v) * b
            v = v / np.sqrt(alg.inner(v, v).real)
            basis.append(v)
    if len(basis) != alg.linear_dimension:
        raise RuntimeError("orthonormal extension has the wrong cardinality")
    return basis


def _extract_coeff(T: OHMap, U: np.ndarray, a: np.ndarray, k: int) -> np.ndarray:
    """(tau (x) id)((a* (x) 1) U) in M_k."""
    alg = T.algebra
    if alg.abelian:
        return np.einsum("t,tpq->pq", a.conj(), U) / alg.dim
    n = alg.dim
    u4 = U.reshape(n, k, n, k)
    return np.einsum("rs,rpsq->pq", a.conj(), u4) / n


def decompose_unitary(T: OHMap, U: np.ndarray, k: int, basis=None) -> list[np.ndarray]:
    """All coefficients of U over the orthonormal extension (frame first)."""
    basis = orthonormal_extension(T) if basis is None else basis
    return [_extract_coeff(T, U, a, k) for a in basis]


def reconstruct_unitary(T: OHMap, coeffs, k: int, basis=None) -> np.ndarray:
    basis = orthonormal_extension(T) if basis is None else basis
    alg = T.algebra
    if alg.abelian:
        out = np.zeros((alg.dim, k, k), dtype=complex)
        for a, c in zip(basis, coeffs):
            out += a[:, None, None] * c[None, :, :]
        return out
    out = np.zeros((alg.dim * k, alg.dim * k), dtype=complex)
    for a, c in zip(basis, coeffs):
        out += np.kron(a, c)
    return out


def _frame_coeffs(T: OHMap, U: np.ndarray, k: int) -> list[np.ndarray]:
    return [_extract_coeff(T, U, a, k) for a in T.frame]


def tensor_conjugate_norm(us) -> float:
    """The spectral norm of sum_i u_i (x) conj(u_i)."""
    mat = sum(np.kron(u, u.conj()) for u in us)
    return float(np.linalg.svd(mat, compute_uv=False)[0])


def objective(T: OHMap, U: np.ndarray, k: int) -> float:
    return tensor_conjugate_norm(_frame_coeffs(T, U, k))


def _polar(m: np.ndarray) -> np.ndarray:
    w, _, vh = np.linalg.svd(m)
    return w @ vh


def _retract(T: OHMap, U: np.ndarray) -> np.ndarray:
    if T.algebra.abelian:
        return np.stack([_polar(block) for block in U])
    return _polar(U)


def _random_unitary(T: OHMap, k: int, rng: np.random.Generator) -> np.ndarray:
    alg = T.algebra
    if alg.abelian:
        g = rng.standard_normal((alg.dim, k, k)) + 1j * rng.standard_normal(
            (alg.dim, k, k)
        )
        return np.stack([_polar(b) for b in g])
    nk = alg.dim * k
    g = rng.standard_normal((nk, nk)) + 1j * rng.standard_normal((nk, nk))
    return _polar(g)


def _euclidean_gradient(T: OHMap, U: np.ndarray, k: int) -> tuple[np.ndarray, float]:
    """Subgradient of the spectral-norm objective, lifted to the carrier of U.

    Top singular pairs within a relative 1e-9 tie are averaged.  Returns the
    gradient and the current objective value.
    """
    alg = T.algebra
    us = _frame_coeffs(T, U, k)
    mat = sum(np.kron(u, u.conj()) for u in us)
    w, s, vh = np.linalg.svd(mat)
    top = s[0]
    tied = [j for j, val in enumerate(s) if val >= top * (1 - 1e-9)] or [0]
    coeff_grads = [np.zeros((k, k), dtype=complex) for _ in us]
    for j in tied:
        xi = w[:, j].reshape(k, k)
        eta = vh[j, :].conj().reshape(k, k)
        for i, u in enumerate(us):
            coeff_grads[i] += (
                xi @ u @ eta.conj().T + xi.conj().T @ u @ eta
            ) / len(tied)
    if alg.abelian:
        grad = np.zeros_like(U)
        for a, g in zip(T.frame, coeff_grads):
            grad += a[:, None, None] * g[None, :, :] / alg.dim
    else:
        grad = np.zeros_like(U)
        for a, g in zip(T.frame, coeff_grads):
            grad += np.kron(a, g) / alg.dim
    return grad, float(top)


@dataclass(frozen=True)
class CbBoundResult:
    """Outcome of the seeded multi-restart ascent; a lower bound on ||T||_cb^2."""

    k: int
    best_value: float
    iterations: int
    history: tuple[tuple[float, ...], ...]
    per_restart: tuple[float, ...]


def cb_lower_bound(
    T: OHMap,
    k: int,
    restarts: int = 16,
    max_iter: int = 120,
    seed: int = 0,
    k_cap: int = 8,
) -> CbBoundResult:
    """Gradient ascent over unitaries in A (x) M_k with polar retraction.

    Every evaluated point is a unitary, so every objective value is itself a
    certified lower bound on ||T||_cb^2; the result is the best value found.
    The per-restart history is nondecreasing (a step is only accepted if it
    does not lose ground).  Deterministic given (seed, restarts).
    """
    if k < 1:
        raise ValueError("ancilla dimension k must be at least 1")
    if k > k_cap:
        raise ValueError(f"k={k} exceeds the configured cap {k_cap}")
    histories = []
    finals = []
    total_steps = 0
    for restart in range(restarts):
        rng = np.random.default_rng([seed, restart])
        U = _random_unitary(T, k, rng)
        value = objective(T, U, k)
        history = [value]
        for _ in range(max_iter):
            grad, value = _euclidean_gradient(T, U, k)
            scale = float(np.linalg.norm(grad))
            if scale < 1e-14:
                break
            step = 1.0 / scale
            improved = False
            for _ in range(30):
                cand = _retract(T, U + step * grad)
                cand_val = objective(T, cand, k)
                if cand_val > value + 1e-15:
                    U, value = cand, cand_val
                    improved = True
                    break
                step /= 2.0
            if not improved:
                break
            history.append(value)
            total_steps += 1
            if len(history) > 3 and history[-1] - history[-4] < 1e-13:
                break
        histories.append(tuple(history))
        finals.append(history[-1])
    best = max(finals)
    return CbBoundResult(
        k=k,
        best_value=best,
        iterations=total_steps,
        history=tuple(histories),
        per_restart=tuple(finals),
    )
