"""JSON wire formats.

Complex numbers are always [re, im] pairs.  Channel Kraus and Choi matrices
are flat row-major lists of pairs (the dimension field fixes the shape);
Schur matrices and semigroup generators are nested lists of rows.  Parsers
accept either layout.
"""

from __future__ import annotations

import numpy as np

from .channel import Channel, ChoiMatrix, kraus_canonical
from .factorize import Certificate, FactorizationWitness
from .grothendieck import Algebra, OHMap, frame_validate
from .numerics import DEFAULT_TOL, Tolerances
from .schur import SchurMatrix
from .semigroup import SemigroupGenerator


def complex_pair(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def matrix_flat(m: np.ndarray) -> list[list[float]]:
    """Row-major flat list of [re, im] pairs."""
    return [complex_pair(z) for z in np.asarray(m, dtype=complex).reshape(-1)]


def matrix_rows(m: np.ndarray) -> list[list[list[float]]]:
    """Nested rows of [re, im] pairs."""
    m = np.asarray(m, dtype=complex)
    return [[complex_pair(z) for z in row] for row in m]


def _entry_to_complex(e) -> complex:
    if isinstance(e, (int, float)):
        return complex(e)
    if isinstance(e, (list, tuple)) and len(e) == 2 and all(
        isinstance(v, (int, float)) for v in e
    ):
        return complex(e[0], e[1])
    raise ValueError(f"matrix entry {e!r} is neither a number nor an [re, im] pair")


def _looks_like_entry(e) -> bool:
    if isinstance(e, (int, float)):
        return True
    return (
        isinstance(e, (list, tuple))
        and len(e) == 2
        and all(isinstance(v, (int, float)) for v in e)
    )


def matrix_from_json(obj, rows: int, cols: int) -> np.ndarray:
    """Parse a matrix from a flat row-major pair list or nested rows."""
    if not isinstance(obj, list):
        raise ValueError("matrix payload must be a list")
    if len(obj) == rows * cols and all(_looks_like_entry(e) for e in obj):
        flat = [_entry_to_complex(e) for e in obj]
    elif len(obj) == rows and all(
        isinstance(r, list) and len(r) == cols and all(_looks_like_entry(e) for e in r)
        for r in obj
    ):
        flat = [_entry_to_complex(e) for row in obj for e in row]
    else:
        raise ValueError(
            f"matrix payload is neither a flat row-major list of {rows * cols} "
            f"entries nor {rows} rows of {cols}"
        )
    return np.array(flat, dtype=complex).reshape(rows, cols)


def channel_to_json(T: Channel) -> dict:
    return {"dim": T.dim, "kraus": [matrix_flat(a) for a in T.kraus]}


def channel_from_json(obj: dict, tol: Tolerances = DEFAULT_TOL) -> Channel:
    if "dim" not in obj:
        raise ValueError("channel JSON needs a 'dim' field")
    n = int(obj["dim"])
    if "kraus" in obj:
        mats = [matrix_from_json(k, n, n) for k in obj["kraus"]]
        return Channel.from_kraus(mats)
    if "choi" in obj:
        mat = matrix_from_json(obj["choi"], n * n, n * n)
        return kraus_canonical(ChoiMatrix(dim=n, mat=mat), tol)
    raise ValueError("channel JSON needs a 'kraus' or 'choi' field")


def schur_to_json(B: SchurMatrix) -> dict:
    return {"n": B.n, "b": matrix_rows(B.b)}


def schur_from_json(obj: dict) -> SchurMatrix:
    if "n" not in obj or "b" not in obj:
        raise ValueError("Schur JSON needs 'n' and 'b' fields")
    n = int(obj["n"])
    return SchurMatrix.of(matrix_from_json(obj["b"], n, n))


def generator_to_json(G: SemigroupGenerator) -> dict:
    return {"n": G.n, "L": matrix_rows(G.L)}


def generator_from_json(obj: dict, tol: Tolerances = DEFAULT_TOL) -> SemigroupGenerator:
    if "n" not in obj or "L" not in obj:
        raise ValueError("generator JSON needs 'n' and 'L' fields")
    n = int(obj["n"])
    return SemigroupGenerator.of(matrix_from_json(obj["L"], n, n), tol)


def witness_to_json(w: FactorizationWitness) -> dict:
    return {
        "n": w.n,
        "k": w.k,
        "u": matrix_flat(w.u),
        "ancilla_trace": {"blocks": [[d, wt] for d, wt in w.ancilla_blocks]},
    }


def witness_from_json(obj: dict) -> FactorizationWitness:
    n, k = int(obj["n"]), int(obj["k"])
    u = matrix_from_json(obj["u"], n * k, n * k)
    trace = obj.get("ancilla_trace", "uniform")
    if trace == "uniform":
        return FactorizationWitness.uniform(n, k, u)
    blocks = tuple((int(d), float(wt)) for d, wt in trace["blocks"])
    u = u.copy()
    u.setflags(write=False)
    return FactorizationWitness(n=n, k=k, u=u, ancilla_blocks=blocks)


def frame_to_json(T: OHMap) -> dict:
    alg = T.algebra
    frame = [
        [complex_pair(z) for z in a] if alg.abelian else matrix_flat(a)
        for a in T.frame
    ]
    return {
        "algebra": {"dim": alg.dim, "abelian": alg.abelian},
        "frame": frame,
    }


def frame_from_json(obj: dict, tol: Tolerances = DEFAULT_TOL) -> OHMap:
    spec = obj["algebra"]
    alg = Algebra(dim=int(spec["dim"]), abelian=bool(spec.get("abelian", False)))
    frame = []
    for payload in obj["frame"]:
        if alg.abelian:
            frame.append(
                np.array([_entry_to_complex(e) for e in payload], dtype=complex)
            )
        else:
            frame.append(matrix_from_json(payload, alg.dim, alg.dim))
    return frame_validate(frame, alg, tol)


def jsonable(x):
    """Recursively convert numpy scalars/arrays and certificates to JSON types."""
    if isinstance(x, Certificate):
        return {
            "verdict": x.verdict.value,
            "reason": x.reason,
            "evidence": jsonable(x.evidence),
        }
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, complex):
        return complex_pair(x)
    if isinstance(x, np.complexfloating):
        return complex_pair(complex(x))
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def certificate_to_json(cert: Certificate) -> dict:
    return jsonable(cert)
