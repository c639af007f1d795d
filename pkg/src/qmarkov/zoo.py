"""Built-in example objects with their expected certificate outcomes.

Names are stable identifiers describing the object itself; each entry knows
which verdicts the analyzer must reproduce under default tolerances, which
the test suite asserts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channel import Channel
from .grothendieck import frame_l4, frame_m3
from .schur import SchurMatrix, fifth_root_correlation, rank_two_family
from .semigroup import cyclic_generator


def antisym_triple() -> Channel:
    """Three scaled antisymmetric 3x3 Kraus operators; not factorizable."""
    s = 1 / np.sqrt(2)
    a1 = s * np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=complex)
    a2 = s * np.array([[0, 0, 1], [0, 0, 0], [-1, 0, 0]], dtype=complex)
    a3 = s * np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)
    return Channel.from_kraus([a1, a2, a3])


def shift_triple() -> Channel:
    """Three shift-type 3x3 Kraus operators; Markov, self-adjoint, not factorizable."""
    s = 1 / np.sqrt(2)
    a1 = s * np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=complex)
    a2 = s * np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]], dtype=complex)
    a3 = s * np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=complex)
    return Channel.from_kraus([a1, a2, a3])


def diagonal_pair(n: int = 4) -> SchurMatrix:
    """Rank-2 correlation matrix of two diagonal Kraus vectors on M_n, n >= 4."""
    if n < 4:
        raise ValueError("the diagonal pair needs n >= 4")
    a1 = np.array([1, 2**-0.5, 2**-0.5] + [0.0] * (n - 3), dtype=complex)
    a2 = np.array([0, 2**-0.5, 1j * 2**-0.5] + [1.0] * (n - 3), dtype=complex)
    # b[j, k] = sum_i conj(a_i[j]) a_i[k] so that the a_i are diagonal Kraus vectors
    b = np.outer(a1.conj(), a1) + np.outer(a2.conj(), a2)
    return SchurMatrix.of(b)


@dataclass(frozen=True)
class ZooEntry:
    name: str
    kind: str  # channel | schur | generator | frame
    description: str
    build: Callable
    params: dict = field(default_factory=dict)
    expected_verdicts: tuple[str, ...] = ()
    expected_flags: tuple[str, ...] = ()


ENTRIES: dict[str, ZooEntry] = {}


def _register(entry: ZooEntry):
    ENTRIES[entry.name] = entry


_register(
    ZooEntry(
        name="antisym3",
        kind="channel",
        description="channel of 3 scaled antisymmetric 3x3 matrices",
        build=lambda params: antisym_triple(),
        expected_verdicts=("NOT_FACTORIZABLE",),
    )
)
_register(
    ZooEntry(
        name="shift3",
        kind="channel",
        description="channel of 3 shift-type 3x3 matrices",
        build=lambda params: shift_triple(),
        expected_verdicts=("NOT_FACTORIZABLE",),
    )
)
_register(
    ZooEntry(
        name="rank2",
        kind="schur",
        description="rank-<=2 correlation family B(s) on M_n (s in [0,1], n >= 4)",
        build=lambda params: rank_two_family(params.get("s", 1 / 3), int(params.get("n", 4))),
        params={"s": 1 / 3, "n": 4},
        expected_verdicts=("NOT_FACTORIZABLE",),
    )
)
_register(
    ZooEntry(
        name="rank2-n5",
        kind="schur",
        description="the rank-2 family at s = 1/2 on M_5",
        build=lambda params: rank_two_family(params.get("s", 0.5), int(params.get("n", 5))),
        params={"s": 0.5, "n": 5},
        expected_verdicts=("NOT_FACTORIZABLE",),
    )
)
_register(
    ZooEntry(
        name="fifthroot6",
        kind="schur",
        description="6x6 correlation of fifth-root frame rows: factorizable, "
        "yet not a mixture of unitary conjugations",
        build=lambda params: fifth_root_correlation(),
        expected_verdicts=("FACTORIZABLE_WITNESS", "NOT_IN_CONV_AUT"),
    )
)
_register(
    ZooEntry(
        name="diagpair4",
        kind="schur",
        description="correlation of two diagonal vectors on M_n (n >= 4)",
        build=lambda params: diagonal_pair(int(params.get("n", 4))),
        params={"n": 4},
        expected_verdicts=("NOT_FACTORIZABLE",),
    )
)
_register(
    ZooEntry(
        name="cyclic4",
        kind="generator",
        description="4x4 conditionally negative generator whose Schur semigroup "
        "is non-factorizable for small t > 0",
        build=lambda params: cyclic_generator(),
        expected_verdicts=("NOT_FACTORIZABLE",),
    )
)
_register(
    ZooEntry(
        name="ohframe-m3",
        kind="frame",
        description="3-element trace-coefficient frame on M_3 with a strict cb gap",
        build=lambda params: frame_m3(),
        expected_flags=("cb_strictly_below_one",),
    )
)
_register(
    ZooEntry(
        name="ohframe-l4",
        kind="frame",
        description="2-element frame on the 4-point diagonal algebra with a strict cb gap",
        build=lambda params: frame_l4(),
        expected_flags=("cb_strictly_below_one",),
    )
)


def parse_zoo_ref(ref: str) -> tuple[ZooEntry, dict]:
    """Parse ``zoo:name?key=value&...`` into an entry and parameter overrides."""
    if ref.startswith("zoo:"):
        ref = ref[len("zoo:") :]
    name, _, query = ref.partition("?")
    if name not in ENTRIES:
        raise KeyError(
            f"unknown zoo entry {name!r}; available: {', '.join(sorted(ENTRIES))}"
        )
    entry = ENTRIES[name]
    params = dict(entry.params)
    if query:
        for piece in query.split("&"):
            key, _, value = piece.partition("=")
            if not key or not value:
                raise ValueError(f"malformed zoo parameter {piece!r}")
            try:
                params[key] = int(value)
            except ValueError:
                params[key] = float(value)
    return entry, params


def build(ref: str):
    """Construct the object behind a zoo reference."""
    entry, params = parse_zoo_ref(ref)
    return entry, entry.build(params)
