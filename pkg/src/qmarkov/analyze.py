"""Consolidated analysis reports: one object in, Markov checks plus certificates out."""

from __future__ import annotations

import numpy as np

from . import __version__
from .channel import (
    Channel,
    canonical_kraus_family,
    choi_frobenius_distance,
    verify_markov,
)
from .factorize import (
    Certificate,
    Verdict,
    car_factorize,
    conv_aut_obstruction,
    non_factorizable_certificate,
    verify_witness,
    witness_residuals,
)
from .grothendieck import OHMap, cb_lower_bound, check_ct_one
from .numerics import DEFAULT_TOL, CompletePositivityError, MarkovViolationError, Tolerances
from .schur import SchurMatrix, real_commuting_kraus, schur_channel
from .semigroup import SemigroupGenerator, cnd_check, evolve, obstruction_scan
from .serialize import certificate_to_json, jsonable, witness_to_json

DEFAULT_SCAN_TIMES = (1e-4, 1e-3, 1e-2)


def _base_report(kind: str, tol: Tolerances, seed: int | None = None) -> dict:
    report = {
        "tool": "qmarkov",
        "version": __version__,
        "kind": kind,
        "tolerances": {
            "rank_rel": tol.rank_rel,
            "psd_floor": tol.psd_floor,
            "verify_abs": tol.verify_abs,
        },
        "certificates": [],
        "summary": [],
    }
    if seed is not None:
        report["seed"] = seed
    return report


def _attach(report: dict, cert: Certificate):
    report["certificates"].append(certificate_to_json(cert))


def _commuting_selfadjoint(kraus, tol: Tolerances) -> bool:
    mats = list(kraus)
    n = mats[0].shape[0]
    if max(float(np.abs(m - m.conj().T).max()) for m in mats) > tol.verify_abs:
        return False
    for i, x in enumerate(mats):
        for y in mats[i + 1 :]:
            if float(np.abs(x @ y - y @ x).max()) > tol.verify_abs:
                return False
    return float(np.abs(sum(m @ m for m in mats) - np.eye(n)).max()) <= tol.verify_abs * n


def analyze_channel(
    T: Channel,
    tol: Tolerances = DEFAULT_TOL,
    include_witness: bool = False,
) -> dict:
    """Markov verification, canonical form, and every applicable certificate."""
    report = _base_report("channel", tol)
    report["dim"] = T.dim
    mk = verify_markov(T, tol)
    report["markov"] = jsonable(
        {
            "is_markov": mk.is_markov,
            "is_cp": mk.is_cp,
            "is_unital": mk.is_unital,
            "is_trace_preserving": mk.is_trace_preserving,
            "is_self_adjoint": mk.is_self_adjoint,
            "kraus_rank": mk.kraus_rank,
            "residuals": mk.residuals,
        }
    )
    canonical = canonical_kraus_family(T, tol)
    report["canonical_kraus"] = len(canonical.kraus)
    report["summary"].append(
        f"dim {T.dim}, {len(T.kraus)} Kraus operators "
        f"({len(canonical.kraus)} canonical), markov={mk.is_markov}, "
        f"self-adjoint={mk.is_self_adjoint}"
    )
    if mk.is_markov:
        ident = choi_frobenius_distance(T, Channel.identity(T.dim)) <= 1e-12
        report["is_identity"] = bool(ident)
        if ident:
            report["summary"].append("channel equals the identity map")
        cert = non_factorizable_certificate(T, tol)
        _attach(report, cert)
        if cert.verdict is Verdict.NOT_FACTORIZABLE:
            ev = cert.evidence
            report["summary"].append(
                "not factorizable: the pairwise products of the canonical Kraus "
                f"family are linearly independent (rank {ev['product_rank']}/"
                f"{ev['product_count']}, d={ev['d']})"
            )
        else:
            report["summary"].append(
                f"product criterion inconclusive ({cert.reason})"
            )
    else:
        report["summary"].append("not a Markov map; certificates skipped")
        return report

    if _commuting_selfadjoint(T.kraus, tol):
        witness = car_factorize(T.kraus, tol)
        if verify_witness(T, witness, tol):
            res = witness_residuals(T, witness)
            _attach(
                report,
                Certificate(
                    Verdict.FACTORIZABLE_WITNESS,
                    reason="anticommuting-ancilla-witness",
                    evidence={
                        "ancilla_dim": witness.k,
                        "unitarity_residual": res["unitarity"],
                        "action_residual": res["action"],
                    },
                ),
            )
            report["summary"].append(
                "factorizable: verified witness on a "
                f"{witness.k}-dimensional ancilla of anticommuting involutions"
            )
            if include_witness:
                report["witness"] = witness_to_json(witness)
        aut = conv_aut_obstruction(T.kraus, tol)
        _attach(report, aut)
        if aut.verdict is Verdict.NOT_IN_CONV_AUT:
            ev = aut.evidence
            report["summary"].append(
                "not a mixture of unitary conjugations: symmetric Kraus products "
                f"are independent (rank {ev['product_rank']}/{ev['product_count']})"
            )
    return report


def analyze_schur(
    B: SchurMatrix, tol: Tolerances = DEFAULT_TOL, include_witness: bool = False
) -> dict:
    """Schur-multiplier analysis: positivity, Markov property, certificates."""
    report = _base_report("schur", tol)
    report["dim"] = B.n
    try:
        channel = schur_channel(B, tol)
    except CompletePositivityError as exc:
        report["markov"] = {"is_cp": False, "min_eigenvalue": exc.min_eigenvalue}
        report["summary"].append(
            f"not completely positive (eigenvalue {exc.min_eigenvalue:.3e})"
        )
        return report
    except MarkovViolationError as exc:
        report["markov"] = {"is_cp": True, "is_markov": False}
        report["summary"].append(str(exc))
        return report

    is_real = float(np.abs(B.b.imag).max()) <= tol.verify_abs
    if is_real:
        # real correlation matrices get the self-adjoint diagonal presentation,
        # which feeds the witness construction
        channel = Channel.from_kraus(real_commuting_kraus(B, tol))
    inner = analyze_channel(channel, tol, include_witness=include_witness)
    for key in ("markov", "canonical_kraus", "certificates", "is_identity", "witness"):
        if key in inner:
            report[key] = inner[key]
    report["summary"].extend(inner["summary"])
    return report


def analyze_generator(
    G: SemigroupGenerator,
    tol: Tolerances = DEFAULT_TOL,
    times=DEFAULT_SCAN_TIMES,
) -> dict:
    """Conditional negativity, a Markov spot check, and the small-time obstruction."""
    report = _base_report("generator", tol)
    report["dim"] = G.n
    admissible = cnd_check(G, tol)
    report["conditionally_negative"] = admissible
    if not admissible:
        report["summary"].append(
            "generator is not conditionally negative: the semigroup leaves the PSD cone"
        )
        return report
    report["summary"].append("generator is conditionally negative (semigroup is Markov)")
    mk = verify_markov(evolve(G, 1.0, tol), tol)
    report["markov_at_t1"] = mk.is_markov
    if G.n == 4:
        samples = obstruction_scan(G, times)
        report["scan"] = [
            {"t": s.t, "g": s.g, "h": s.h, "k": s.k, "margin": s.margin}
            for s in samples
        ]
        positive = [s for s in samples if s.margin > 0]
        if positive:
            _attach(
                report,
                Certificate(
                    Verdict.NOT_FACTORIZABLE,
                    reason="semigroup-margin",
                    evidence={
                        "times": [s.t for s in positive],
                        "margins": [s.margin for s in positive],
                    },
                ),
            )
            report["summary"].append(
                "not factorizable for the scanned small times: "
                "sqrt(g) - 2 sqrt(h) - sqrt(k) > 0 rules out any "
                "Gram-of-unitaries realization there"
            )
    return report


def analyze_frame(
    T: OHMap,
    tol: Tolerances = DEFAULT_TOL,
    seed: int = 0,
    samples: int = 500,
    k: int = 2,
    restarts: int = 6,
) -> dict:
    """Frame validation flags, the pointwise-bound check, and a quick cb bound."""
    report = _base_report("frame", tol, seed=seed)
    report["dim"] = T.algebra.dim
    report["abelian"] = T.algebra.abelian
    report["d"] = T.d
    report["flags"] = {
        "products_independent": T.products_independent,
        "cb_strictly_below_one": T.strict_gap,
    }
    bessel = check_ct_one(T, samples=samples, seed=seed, tol=tol)
    report["pointwise_bound"] = jsonable(
        {
            "samples": bessel.samples,
            "violations": bessel.violations,
            "max_excess": bessel.max_excess,
            "frame_norms_sq": bessel.frame_norms_sq,
            "sum_residual": bessel.frame_sum_residual,
        }
    )
    bound = cb_lower_bound(T, k=k, restarts=restarts, seed=seed)
    report["cb_lower_bound"] = jsonable(
        {"k": bound.k, "best_value": bound.best_value, "per_restart": bound.per_restart}
    )
    report["summary"].append(
        f"frame of {T.d} elements; pointwise constant one holds "
        f"({bessel.violations} violations in {bessel.samples} samples); "
        f"cb-norm^2 lower bound {bound.best_value:.6f} at k={k}"
        + (" with a strict gap guaranteed" if T.strict_gap else "")
    )
    return report
