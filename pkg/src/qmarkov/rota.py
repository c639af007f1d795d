"""Channels whose square is certifiably non-factorizable, and the converse.

The negative direction works with self-adjoint Kraus families whose squares
are central: the degree-4 Kraus words of the squared channel then collapse
into a known multiplicity pattern, and once the surviving word set is linearly
independent (with at least 5 generators) the squared channel cannot be
factorizable; in particular it admits no dilation of Rota type.  A concrete
family is assembled as a_i = b_i (x) u_i from commuting diagonals (coordinate
functions sampled on a sphere) and involutive permutation matrices with
independent short words.

The converse: with at most 4 self-adjoint Kraus terms the square always
factorizes, through an explicit unitary on a 4-dimensional ancilla.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .channel import Channel, compose
from .factorize import Certificate, FactorizationWitness, Verdict
from .numerics import (
    DEFAULT_TOL,
    DimensionError,
    RankResult,
    SearchFailureError,
    Tolerances,
    as_matrix,
    rank_from_gram,
    rank_of_set,
)

SPHERE_COORD_FLOOR_SCALE = 0.1  # reject points with a coordinate below this / sqrt(d)


# ---------------------------------------------------------------------------
# degree-4 word bookkeeping
# ---------------------------------------------------------------------------

def _canonical_word(word: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Canonical (squares multiset, residual letters) of a word.

    Valid whenever the squares of the generators are central: adjacent equal
    letters form a square that commutes with everything, so a word is
    determined by which squares it contains and the order of the leftovers.
    """
    letters = list(word)
    squares: list[int] = []
    changed = True
    while changed:
        changed = False
        for t in range(len(letters) - 1):
            if letters[t] == letters[t + 1]:
                squares.append(letters[t])
                del letters[t : t + 2]
                changed = True
                break
    return tuple(sorted(squares)), tuple(letters)


@dataclass(frozen=True)
class WordClasses:
    """Representatives of the degree-4 words modulo central squares."""

    d: int
    representatives: tuple[tuple[int, ...], ...]  # lexicographically smallest member
    bucket_counts: dict

    @property
    def count(self) -> int:
        return len(self.representatives)


def degree4_word_classes(d: int) -> WordClasses:
    """Group all d^4 index words by their canonical form; one representative each.

    Buckets: plain (no square factor), mixed (one square, two leftovers split
    by whether the squared letter reappears), double squares, fourth powers.
    """
    classes: dict = {}
    for word in product(range(d), repeat=4):
        key = _canonical_word(word)
        if key not in classes or word < classes[key]:
            classes[key] = word
    counts = {"plain": 0, "mixed": 0, "cubed": 0, "double_square": 0, "fourth_power": 0}
    for (squares, residual), _ in classes.items():
        if len(residual) == 4:
            counts["plain"] += 1
        elif len(residual) == 2:
            if squares[0] in residual:
                counts["cubed"] += 1
            else:
                counts["mixed"] += 1
        elif len(set(squares)) == 2:
            counts["double_square"] += 1
        else:
            counts["fourth_power"] += 1
    reps = tuple(sorted(classes.values()))
    return WordClasses(d=d, representatives=reps, bucket_counts=counts)


@dataclass(frozen=True)
class SquareObstructionReport:
    """Hypothesis flags for the square-channel obstruction.

    All four must hold for the certificate: central squares, independent pair
    products, independent degree-4 word representatives, and d >= 5.
    """

    d: int
    n: int
    squares_central: bool
    pair_rank: int
    pairs_independent: bool
    word_count: int
    word_rank: int
    words_independent: bool
    enough_terms: bool
    residuals: dict = field(default_factory=dict)

    @property
    def all_hold(self) -> bool:
        return (
            self.squares_central
            and self.pairs_independent
            and self.words_independent
            and self.enough_terms
        )

    def certificate(self) -> Certificate:
        evidence = {
            "d": self.d,
            "n": self.n,
            "pair_rank": self.pair_rank,
            "word_rank": self.word_rank,
            "word_count": self.word_count,
        }
        if self.all_hold:
            return Certificate(
                Verdict.NOT_FACTORIZABLE,
                reason="square-word-independence",
                evidence=evidence,
            )
        return Certificate(
            Verdict.INCONCLUSIVE, reason="hypotheses-not-met", evidence=evidence
        )


def _validate_square_partition(a, tol: Tolerances):
    mats = [as_matrix(m) for m in a]
    if not mats:
        raise ValueError("need at least one matrix")
    n = mats[0].shape[0]
    for m in mats:
        if m.shape != (n, n):
            raise DimensionError("family must share one square shape")
    sa_res = max(float(np.abs(m - m.conj().T).max()) for m in mats)
    if sa_res > tol.verify_abs:
        raise ValueError(f"family is not self-adjoint (residual {sa_res:.3e})")
    unit_res = float(np.abs(sum(m @ m for m in mats) - np.eye(n)).max())
    if unit_res > tol.verify_abs * n:
        raise ValueError(f"squares do not sum to identity (residual {unit_res:.3e})")
    return mats, n, {"self_adjoint": sa_res, "unit_partition": unit_res}


def square_hypotheses(a, tol: Tolerances = DEFAULT_TOL) -> SquareObstructionReport:
    """Dense hypothesis check for a self-adjoint family with sum of squares 1."""
    mats, n, residuals = _validate_square_partition(a, tol)
    d = len(mats)
    central = 0.0
    for x in mats:
        sq = x @ x
        for y in mats:
            central = max(central, float(np.abs(sq @ y - y @ sq).max()))
    residuals["squares_central"] = central

    pairs = [x @ y for x in mats for y in mats]
    pair_rk = rank_of_set(pairs, tol)

    classes = degree4_word_classes(d)
    words = [
        mats[i] @ mats[j] @ mats[k] @ mats[l]
        for (i, j, k, l) in classes.representatives
    ]
    word_rk = rank_of_set(words, tol)
    return SquareObstructionReport(
        d=d,
        n=n,
        squares_central=central <= tol.verify_abs,
        pair_rank=pair_rk.rank,
        pairs_independent=pair_rk.independent,
        word_count=classes.count,
        word_rank=word_rk.rank,
        words_independent=word_rk.independent,
        enough_terms=d >= 5,
        residuals=residuals,
    )


# ---------------------------------------------------------------------------
# structured (diagonal (x) permutation) fast path
# ---------------------------------------------------------------------------

def _perm_word(perms: np.ndarray, word: tuple[int, ...]) -> np.ndarray:
    """Composition of the listed permutations, applied right to left."""
    n = perms.shape[1]
    out = np.arange(n)
    for idx in reversed(word):
        out = perms[idx][out]
    return out


def _vector_word(vecs: np.ndarray, word: tuple[int, ...]) -> np.ndarray:
    out = np.ones(vecs.shape[1])
    for idx in word:
        out = out * vecs[idx]
    return out


def _fix_count_gram(perm_words: np.ndarray) -> np.ndarray:
    """G[w, w'] = number of points where the two permutations agree.

    Equals the trace inner product of the corresponding permutation matrices.
    """
    return (perm_words[:, None, :] == perm_words[None, :, :]).sum(axis=2).astype(float)


def _structured_word_rank(
    bvecs: np.ndarray, perms: np.ndarray, words, tol: Tolerances
) -> RankResult:
    """Rank of {prod b (x) prod u} over words, via the Kronecker trace identity.

    The Gram factors entrywise: trace((D (x) P)*(D' (x) P')) =
    trace(D*D') trace(P*P'), so only the small diagonal and permutation sides
    are ever formed.
    """
    beta = np.stack([_vector_word(bvecs, w) for w in words])
    pw = np.stack([_perm_word(perms, w) for w in words])
    gram = (beta @ beta.T) * _fix_count_gram(pw)
    return rank_from_gram(gram, len(words), tol)


def _structured_report(
    bvecs: np.ndarray, perms: np.ndarray, tol: Tolerances
) -> SquareObstructionReport:
    """Hypothesis report for a_i = diag(b_i) (x) P_i without dense products.

    Diagonals commute and involutions square to the identity exactly, so the
    central-squares condition and the unit partition hold with the residual of
    the diagonal side alone.
    """
    d, m = bvecs.shape
    r = perms.shape[1]
    unit_res = float(np.abs((bvecs**2).sum(axis=0) - 1.0).max())
    pair_words = [(i, j) for i in range(d) for j in range(d)]
    pair_rk = _structured_word_rank(bvecs, perms, pair_words, tol)
    classes = degree4_word_classes(d)
    word_rk = _structured_word_rank(bvecs, perms, classes.representatives, tol)
    return SquareObstructionReport(
        d=d,
        n=m * r,
        squares_central=True,
        pair_rank=pair_rk.rank,
        pairs_independent=pair_rk.independent,
        word_count=classes.count,
        word_rank=word_rk.rank,
        words_independent=word_rk.independent,
        enough_terms=d >= 5,
        residuals={"self_adjoint": 0.0, "unit_partition": unit_res,
                   "squares_central": 0.0},
    )


# ---------------------------------------------------------------------------
# constructive searches
# ---------------------------------------------------------------------------

def _sphere_points(d: int, count: int, seed: int) -> np.ndarray:
    """Deterministic well-spread points on the unit sphere, no tiny coordinates.

    A scrambled Sobol stream is mapped through the Gaussian quantile and
    normalized; points with a coordinate below the floor are discarded (such
    points would put a near-zero in some degree-4 product).
    """
    floor = SPHERE_COORD_FLOOR_SCALE / np.sqrt(d)
    sampler = qmc.Sobol(d, scramble=True, seed=seed)
    points = []
    while len(points) < count:
        batch = sampler.random(64)
        batch = np.clip(batch, 1e-12, 1 - 1e-12)
        gauss = ndtri(batch)
        norms = np.linalg.norm(gauss, axis=1)
        unit = gauss / norms[:, None]
        for row in unit:
            if np.abs(row).min() >= floor:
                points.append(row)
                if len(points) == count:
                    break
    return np.array(points)


def _vector_rank(vectors, tol: Tolerances) -> RankResult:
    stack = np.stack(vectors)
    return rank_from_gram(stack @ stack.T.conj(), len(vectors), tol)


def _sphere_conditions_hold(bvecs: np.ndarray, tol: Tolerances) -> bool:
    d, m = bvecs.shape
    # every length-4 product is nonzero: no coordinate of any b_i vanishes
    if float(np.abs(bvecs).min()) <= 0.0:
        return False
    sq = bvecs**2
    for i in range(d):
        for j in range(d):
            if i == j:
                continue
            fam = [bvecs[i] * bvecs[j] * sq[k] for k in range(d)]
            if not _vector_rank(fam, tol).independent:
                return False
    # squares of squares, including fourth powers: needed by the word test
    fam = [sq[i] * sq[j] for i in range(d) for j in range(i, d)]
    return _vector_rank(fam, tol).independent


def sphere_family(
    d: int,
    seed: int,
    tol: Tolerances = DEFAULT_TOL,
    m_start: int = 20,
    m_step: int = 10,
    m_cap: int = 240,
) -> tuple[list[np.ndarray], int]:
    """Commuting self-adjoint diagonals from sphere points, as a square partition.

    Coordinate functions restricted to a finite sample: b_i[t] is the i-th
    coordinate of the t-th point, so sum b_i^2 = 1 holds by normalization and
    commutation is automatic.  The sample grows until the per-pair and
    squared-pair independence conditions hold.
    """
    if d < 5:
        raise ValueError("the construction needs d >= 5")
    m = m_start
    while m <= m_cap:
        points = _sphere_points(d, m, seed)
        bvecs = points.T  # row i = values of coordinate i across points
        if _sphere_conditions_hold(bvecs, tol):
            mats = [np.diag(v.astype(complex)) for v in bvecs]
            return mats, m
        m += m_step
    raise SearchFailureError(
        f"no admissible sphere sample of size <= {m_cap} for d={d}, seed={seed}"
    )


@dataclass(frozen=True)
class InvolutionFamily:
    """Self-adjoint permutation unitaries with independent short words."""

    r: int
    mats: tuple[np.ndarray, ...]
    perms: tuple[np.ndarray, ...]

    @property
    def d(self) -> int:
        return len(self.mats)


def _short_words(d: int) -> list[tuple[int, ...]]:
    """(), all ordered pairs with distinct letters, all adjacent-distinct quadruples."""
    words: list[tuple[int, ...]] = [()]
    words += [(i, j) for i in range(d) for j in range(d) if i != j]
    words += [
        (i, j, k, l)
        for i in range(d)
        for j in range(d)
        for k in range(d)
        for l in range(d)
        if i != j and j != k and k != l
    ]
    return words


def _perm_matrix(p: np.ndarray) -> np.ndarray:
    n = len(p)
    mat = np.zeros((n, n), dtype=complex)
    mat[p, np.arange(n)] = 1.0
    return mat


def involution_family(
    d: int,
    seed: int,
    degrees=(20, 24, 28, 32, 40, 56, 80),
    tries_per_degree: int = 12,
    tol: Tolerances = DEFAULT_TOL,
) -> InvolutionFamily:
    """Random fixed-point-free involutions whose short words are independent.

    Words are compared exactly as permutations; independence of the
    corresponding permutation matrices is then checked by the Gram rank test
    (the Gram entries are integer fixed-point counts).  First success in seed
    order is returned, so the result is reproducible.
    """
    if d < 2:
        raise ValueError("need at least two involutions")
    words = _short_words(d)
    attempt = 0
    for degree in degrees:
        for _ in range(tries_per_degree):
            rng = np.random.default_rng([seed, attempt])
            attempt += 1
            perms = []
            for _ in range(d):
                shuffle = rng.permutation(degree)
                inv = np.empty(degree, dtype=int)
                inv[shuffle[0::2]] = shuffle[1::2]
                inv[shuffle[1::2]] = shuffle[0::2]
                perms.append(inv)
            perms = np.stack(perms)
            word_perms = np.stack([_perm_word(perms, w) for w in words])
            distinct = len({tuple(p) for p in word_perms}) == len(words)
            if not distinct:
                continue
            gram = _fix_count_gram(word_perms)
            if rank_from_gram(gram, len(words), tol).independent:
                mats = tuple(_perm_matrix(p) for p in perms)
                return InvolutionFamily(r=degree, mats=mats, perms=tuple(perms))
    raise SearchFailureError(
        f"no involution family found for d={d}, seed={seed} "
        f"up to degree {degrees[-1]}"
    )


def involution_words_independent(
    fam: InvolutionFamily, tol: Tolerances = DEFAULT_TOL
) -> tuple[int, int]:
    """(word count, Gram rank) of the short-word set of an involution family."""
    words = _short_words(fam.d)
    perms = np.stack(fam.perms)
    word_perms = np.stack([_perm_word(perms, w) for w in words])
    rank = rank_from_gram(_fix_count_gram(word_perms), len(words), tol).rank
    return len(words), rank


@dataclass(frozen=True)
class CounterexampleResult:
    channel: Channel
    report: SquareObstructionReport
    m: int
    r: int
    diagonals: tuple[np.ndarray, ...]
    involutions: InvolutionFamily

    def certificate(self) -> Certificate:
        return self.report.certificate()


def build_counterexample(
    d: int = 5, seed: int = 0, tol: Tolerances = DEFAULT_TOL
) -> CounterexampleResult:
    """Assemble a_i = b_i (x) u_i and certify its square non-factorizable.

    The hypothesis report is computed through the Kronecker trace identity, so
    the degree-4 word Gram never touches the full n = m*r dimension.
    """
    if d < 5:
        raise ValueError("the obstruction needs d >= 5")
    diags, m = sphere_family(d, seed, tol)
    invs = involution_family(d, seed, tol=tol)
    bvecs = np.stack([np.diag(mat).real for mat in diags])
    perms = np.stack(invs.perms)
    report = _structured_report(bvecs, perms, tol)
    kraus = [np.kron(np.diag(bvecs[i].astype(complex)), invs.mats[i]) for i in range(d)]
    channel = Channel.from_kraus(kraus)
    return CounterexampleResult(
        channel=channel,
        report=report,
        m=m,
        r=invs.r,
        diagonals=tuple(diags),
        involutions=invs,
    )


# ---------------------------------------------------------------------------
# the d <= 4 converse
# ---------------------------------------------------------------------------

def ancilla_frame_4() -> list[np.ndarray]:
    """The sixteen 4x4 integer matrices 2 e_ij - delta_ij 1, indexed (i, j)."""
    out = []
    eye = np.eye(4, dtype=complex)
    for i in range(4):
        for j in range(4):
            e = np.zeros((4, 4), dtype=complex)
            e[i, j] = 2.0
            out.append(e - (eye if i == j else 0))
    return out


def square_factorization_witness(
    a, tol: Tolerances = DEFAULT_TOL
) -> FactorizationWitness:
    """Explicit witness that the square of a small self-adjoint channel factorizes.

    For at most four self-adjoint Kraus terms with squares summing to one
    (commutation is not needed), u = sum_ij a_i a_j (x) (2 e_ij - delta_ij 1)
    is a self-adjoint unitary on a 4-dimensional ancilla whose compressed
    conjugation reproduces the squared channel.
    """
    mats = [as_matrix(m) for m in a]
    if not 1 <= len(mats) <= 4:
        raise ValueError(f"the converse handles 1 to 4 terms, got {len(mats)}")
    n = mats[0].shape[0]
    for mat in mats:
        if mat.shape != (n, n):
            raise DimensionError("family must share one square shape")
    sa = max(float(np.abs(m - m.conj().T).max()) for m in mats)
    if sa > tol.verify_abs:
        raise ValueError(f"family is not self-adjoint (residual {sa:.3e})")
    unit = float(np.abs(sum(m @ m for m in mats) - np.eye(n)).max())
    if unit > tol.verify_abs * n:
        raise ValueError(f"squares do not sum to identity (residual {unit:.3e})")
    while len(mats) < 4:
        mats.append(np.zeros((n, n), dtype=complex))
    frame = ancilla_frame_4()
    u = np.zeros((4 * n, 4 * n), dtype=complex)
    for i in range(4):
        for j in range(4):
            u += np.kron(mats[i] @ mats[j], frame[4 * i + j])
    return FactorizationWitness.uniform(n, 4, u)


def squared_channel(a) -> Channel:
    """The square of T(x) = sum a_i x a_i for a self-adjoint family."""
    base = Channel.from_kraus([as_matrix(m) for m in a])
    return compose(base, base)
