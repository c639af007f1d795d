"""The acceptance gate: nine timed criteria, one pass/fail line each.

Each criterion returns its verdict with the measured wall time and a detail
string; ``run_all`` executes them in order.  The pytest acceptance module and
the ``selftest`` CLI command both drive these functions, so the gate has a
single source of truth.  A small warmup runs first so one-time BLAS setup is
not billed to the first criterion.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .channel import (
    Channel,
    adjoint,
    choi_distance,
    choi_of,
    compose,
    compress_check,
    kraus_canonical,
    tensor,
    verify_markov,
)
from .factorize import (
    Verdict,
    car_factorize,
    conv_aut_obstruction,
    non_factorizable_certificate,
    verify_witness,
    witness_residuals,
)
from .grothendieck import cb_lower_bound, check_ct_one, frame_l4, frame_m3
from .numerics import DEFAULT_TOL, is_psd
from .rota import (
    build_counterexample,
    involution_family,
    involution_words_independent,
    sphere_family,
    square_factorization_witness,
    squared_channel,
)
from .schur import fifth_root_correlation, rank_two_family, real_commuting_kraus, schur_channel
from .semigroup import cnd_check, cyclic_generator, evolve, obstruction_scan
from .zoo import antisym_triple


@dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    ok: bool
    elapsed: float
    limit: float
    detail: str

    @property
    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return (
            f"[{status}] {self.index}. {self.name}: {self.detail} "
            f"({self.elapsed:.3f}s < {self.limit:g}s)"
        )


def _timed(index, name, limit, fn) -> CriterionResult:
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failure, not an abort of the gate
        elapsed = time.perf_counter() - start
        return CriterionResult(index, name, False, elapsed, limit, f"raised {exc!r}")
    elapsed = time.perf_counter() - start
    if elapsed >= limit:
        ok = False
        detail += f"; runtime {elapsed:.3f}s exceeded {limit:g}s"
    return CriterionResult(index, name, ok, elapsed, limit, detail)


def _warmup():
    rng = np.random.default_rng(0)
    m = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    np.linalg.eigh(m @ m.conj().T)
    np.linalg.svd(m)


# ---------------------------------------------------------------------------


def criterion_1():
    """Antisymmetric-triple certificate."""

    def run():
        T = antisym_triple()
        canonical = kraus_canonical(choi_of(T))
        cert = non_factorizable_certificate(T)
        ratio = cert.evidence.get("gram_retained_ratio", 0.0)
        ok = (
            len(canonical.kraus) == 3
            and cert.verdict is Verdict.NOT_FACTORIZABLE
            and cert.evidence["product_rank"] == 9
            and cert.evidence["product_count"] == 9
            and ratio > 1e-6
        )
        return ok, (
            f"canonical={len(canonical.kraus)}, rank "
            f"{cert.evidence['product_rank']}/9, eig ratio {ratio:.3f}, "
            f"{cert.verdict.value}"
        )

    return _timed(1, "antisymmetric triple not factorizable", 0.1, run)


def criterion_2():
    """Rank-two correlation family across s and n."""

    def run():
        cases = [(s, 4) for s in (0.1, 0.3, 1 / 3, 0.5, 0.9)] + [(0.5, 5), (0.5, 6)]
        for s, n in cases:
            T = schur_channel(rank_two_family(s, n))
            if not verify_markov(T).is_markov:
                return False, f"markov check failed at s={s}, n={n}"
            cert = non_factorizable_certificate(T)
            if cert.verdict is not Verdict.NOT_FACTORIZABLE or cert.evidence[
                "product_rank"
            ] != 4:
                return False, f"certificate did not fire at s={s}, n={n}"
        T1 = schur_channel(rank_two_family(1.0, 4))
        dist = choi_distance(T1, Channel.identity(4))
        cert1 = non_factorizable_certificate(T1)
        ok = dist < 1e-12 and cert1.verdict is Verdict.INCONCLUSIVE
        return ok, (
            f"{len(cases)} parameter points fire at rank 4/4; "
            f"s=1 identity distance {dist:.1e}, {cert1.verdict.value}"
        )

    return _timed(2, "rank-two family certificates", 1.0, run)


def criterion_3():
    """Fifth-root correlation: witness plus mixture obstruction."""

    def run():
        B = fifth_root_correlation()
        if not is_psd(B.b):
            return False, "B is not PSD"
        kraus = real_commuting_kraus(B)
        T = Channel.from_kraus(kraus)
        witness = car_factorize(kraus)
        res = witness_residuals(T, witness)
        aut = conv_aut_obstruction(kraus)
        ok = (
            witness.n == 6
            and witness.k == 8
            and res["unitarity"] < 1e-10
            and res["action"] < 1e-10
            and verify_witness(T, witness)
            and aut.verdict is Verdict.NOT_IN_CONV_AUT
            and aut.evidence["product_rank"] == 6
        )
        return ok, (
            f"witness on M6(x)M8, unitarity {res['unitarity']:.1e}, action "
            f"{res['action']:.1e}; symmetric rank {aut.evidence['product_rank']}/6"
        )

    return _timed(3, "fifth-root witness and conv-aut obstruction", 1.0, run)


def criterion_4():
    """Semigroup: admissibility, the semigroup law, and the margin window."""

    def run():
        G = cyclic_generator()
        if not cnd_check(G):
            return False, "generator failed conditional negativity"
        worst = 0.0
        for s, t in [(0.1, 0.2), (0.1, 0.7), (0.3, 0.2), (0.3, 0.7)]:
            lhs = compose(evolve(G, s), evolve(G, t))
            worst = max(worst, choi_distance(lhs, evolve(G, s + t)))
        if worst >= 1e-12:
            return False, f"semigroup law residual {worst:.2e}"
        samples = obstruction_scan(G, [1e-4, 1e-3, 1e-2])
        slope = samples[0].g / 1e-4
        margins = [s.margin for s in samples]
        ok = 0.99 <= slope <= 1.01 and all(m > 0 for m in margins)
        return ok, (
            f"law residual {worst:.1e}; g(1e-4)/1e-4 = {slope:.4f}; "
            f"margins {['%.3e' % m for m in margins]}"
        )

    return _timed(4, "semigroup obstruction window", 0.5, run)


def criterion_5():
    """Assembled square-obstruction family at d = 5 (seed-pinned)."""

    def run():
        seed = 7
        _, m = sphere_family(5, seed)
        fam = involution_family(5, seed)
        count, rank = involution_words_independent(fam)
        result = build_counterexample(5, seed)
        report = result.report
        mk = verify_markov(result.channel)
        residual = max(mk.residuals.values())
        ok = (
            m >= 15
            and count == 341
            and rank == 341
            and report.all_hold
            and mk.is_markov
            and mk.is_self_adjoint
            and residual < 1e-9
        )
        return ok, (
            f"m={m} (>=15), words {rank}/{count}, flags all hold, "
            f"n={result.channel.dim}, markov residual {residual:.1e}"
        )

    return _timed(5, "square-obstruction pipeline at d=5", 60.0, run)


def criterion_6():
    """Small-family converse witnesses plus the exact ancilla trace identity."""

    def run():
        # the integer identity 4 tau((2e_ij - d_ij)(2e_kl - d_kl)) = 4 d_il d_jk
        eye = np.eye(4, dtype=int)
        frame = []
        for i in range(4):
            for j in range(4):
                e = np.zeros((4, 4), dtype=int)
                e[i, j] = 2
                frame.append(e - (eye if i == j else 0))
        for i in range(4):
            for j in range(4):
                for k in range(4):
                    for l in range(4):
                        lhs = int(np.trace(frame[4 * i + j] @ frame[4 * k + l]))
                        rhs = 4 * int(i == l and j == k)
                        if lhs != rhs:
                            return False, f"trace identity fails at {(i, j, k, l)}"
        worst_u = worst_a = 0.0
        for trial in range(20):
            rng = np.random.default_rng([42, trial])
            n = int(rng.integers(3, 9))
            pts = rng.standard_normal((n, 4))
            pts /= np.linalg.norm(pts, axis=1)[:, None]
            q, _ = np.linalg.qr(rng.standard_normal((n, n)))
            fam = [q @ np.diag(pts[:, i]) @ q.T for i in range(4)]
            witness = square_factorization_witness(fam)
            res = witness_residuals(squared_channel(fam), witness)
            worst_u = max(worst_u, res["unitarity"])
            worst_a = max(worst_a, res["action"])
        ok = worst_u < 1e-10 and worst_a < 1e-10
        return ok, (
            f"256 trace identities exact; 20 witnesses, worst unitarity "
            f"{worst_u:.1e}, worst action {worst_a:.1e}"
        )

    return _timed(6, "small-family square converse", 2.0, run)


def criterion_7():
    """Compression identity over all nine channel pairs."""

    def run():
        tol = DEFAULT_TOL
        pool = [
            antisym_triple(),
            schur_channel(rank_two_family(1 / 3, 4)),
            Channel.identity(2),
        ]
        from .channel import partial_trace_second, tensor as tensor_ch

        worst = 0.0
        for T in pool:
            for S in pool:
                if not compress_check(T, S, tol):
                    return False, "compression identity failed"
                ts = tensor_ch(T, S)
                for i in range(T.dim):
                    for j in range(T.dim):
                        unit = np.zeros((T.dim, T.dim), dtype=complex)
                        unit[i, j] = 1.0
                        back = partial_trace_second(
                            ts.apply(np.kron(unit, np.eye(S.dim))), T.dim, S.dim
                        )
                        worst = max(worst, float(np.abs(back - T.apply(unit)).max()))
        ok = worst < 1e-11
        return ok, f"9 pairs, worst residual {worst:.1e}"

    return _timed(7, "compression identity", 1.0, run)


def criterion_8():
    """Trace-coefficient frames: validation, pointwise bound, cb gap evidence."""

    def run():
        details = []
        for name, T in (("m3", frame_m3()), ("l4", frame_l4())):
            if not (T.strict_gap and T.products_independent):
                return False, f"{name}: frame flags missing"
            if max(T.residuals.values()) >= 1e-12:
                return False, f"{name}: validation residual too large"
            report = check_ct_one(T, samples=1000, seed=3)
            if report.violations != 0 or report.frame_sum_residual >= 1e-12:
                return False, f"{name}: pointwise-bound check failed"
            best = 0.0
            for k in (1, 2, 3):
                bound = cb_lower_bound(T, k=k, restarts=16, seed=0)
                values = [v for h in bound.history for v in h]
                if any(v > 1 + 1e-9 for v in values):
                    return False, f"{name}: objective exceeded 1 at k={k}"
                best = max(best, bound.best_value)
            if not best < 1.0:
                return False, f"{name}: no strict gap observed ({best})"
            details.append(f"{name} best={best:.6f}")
        return True, "; ".join(details) + " (both strictly below 1)"

    return _timed(8, "cb-norm gap exploration", 120.0, run)


def criterion_9():
    """Randomized property suites, 100 instances each."""

    def run():
        def random_markov(n, k, seed):
            rng = np.random.default_rng(seed)
            g = rng.standard_normal((n * k, n * k)) + 1j * rng.standard_normal(
                (n * k, n * k)
            )
            q, _ = np.linalg.qr(g)
            blocks = q.reshape(n, k, n, k)
            return Channel.from_kraus(
                [blocks[:, p, :, q_] / np.sqrt(k) for p in range(k) for q_ in range(k)]
            )

        def random_commuting(n, d, seed):
            rng = np.random.default_rng(seed)
            pts = rng.standard_normal((n, d))
            pts /= np.linalg.norm(pts, axis=1)[:, None]
            q, _ = np.linalg.qr(rng.standard_normal((n, n)))
            return [q @ np.diag(pts[:, i]) @ q.T for i in range(d)]

        # round trip and adjoint involution
        for i in range(100):
            n = 2 + i % 7
            T = random_markov(n, 2, [1, i])
            rt = kraus_canonical(choi_of(T))
            if choi_distance(rt, T) > 1e-9 * n * n:
                return False, f"round trip failed at instance {i}"
            if choi_distance(adjoint(adjoint(T)), T) > 1e-11:
                return False, f"adjoint involution failed at instance {i}"
        # tensor closure
        for i in range(100):
            T = random_markov(2 + i % 3, 2, [2, i])
            S = random_markov(2 + (i + 1) % 3, 2, [3, i])
            if not verify_markov(tensor(T, S)).is_markov:
                return False, f"tensor closure failed at instance {i}"
        # entrywise-exponential PSD closure for admissible generators
        from .semigroup import SemigroupGenerator

        for i in range(100):
            rng = np.random.default_rng([4, i])
            n = 3 + i % 6
            g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            kmat = g @ g.conj().T
            L = np.add.outer(np.diag(kmat).real, np.diag(kmat).real) - 2 * kmat
            np.fill_diagonal(L, 0.0)
            gen = SemigroupGenerator.of(L)
            if not cnd_check(gen):
                return False, f"negative-type generator rejected at instance {i}"
            for t in (0.1, 1.0, 10.0):
                if not is_psd(np.exp(-t * gen.L)):
                    return False, f"exponential left PSD cone at instance {i}, t={t}"
        # certificate mutual exclusion on commuting families
        for i in range(100):
            rng = np.random.default_rng([5, i])
            n = int(rng.integers(3, 7))
            d = int(rng.integers(2, 5))
            fam = random_commuting(n, d, [6, i])
            T = Channel.from_kraus(fam)
            witness = car_factorize(fam)
            if not verify_witness(T, witness):
                return False, f"witness failed at instance {i}"
            cert = non_factorizable_certificate(T)
            if cert.verdict is not Verdict.INCONCLUSIVE:
                return False, f"certificates co-fired at instance {i}"
        return True, "5 suites x 100 randomized instances, zero failures"

    return _timed(9, "randomized property suites", 120.0, run)


CRITERIA = (
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
)


def run_all(echo=print) -> list[CriterionResult]:
    _warmup()
    results = []
    for criterion in CRITERIA:
        result = criterion()
        results.append(result)
        if echo is not None:
            echo(result.line)
    return results
