"""Domain types and the graceful difference labeling (gdl) verifier.

A family of directed circuits is laid out with globally contiguous vertex
indices, circuit by circuit.  Circuit ``c`` with vertices ``u_1 .. u_k``
carries the arcs ``u_1u_2, ..., u_{k-1}u_k, u_ku_1``.  Labels are 1-based,
vertex indices are 0-based.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping, Optional, Sequence


class GdlError(Exception):
    """Base class for errors raised by this package."""


class StructureError(GdlError, ValueError):
    """Malformed family, labeling or argument."""


class UnsupportedError(GdlError):
    """The requested object cannot be built by the invoked construction."""

    def __init__(self, reason: str, exception_family: bool = False):
        super().__init__(reason)
        self.reason = reason
        self.exception_family = exception_family


class ConstructionError(GdlError, RuntimeError):
    """A construction produced something that failed verification (a bug)."""

    def __init__(self, message: str, trace: Any = None):
        super().__init__(message)
        self.trace = trace


EXCEPTION_FAMILIES = ((3,), (2, 3))


@dataclass(frozen=True)
class CircuitFamily:
    lengths: tuple[int, ...]

    def __post_init__(self):
        lengths = tuple(int(k) for k in self.lengths)
        for k in lengths:
            if k < 2:
                raise StructureError(f"circuit length must be >= 2, got {k}")
        object.__setattr__(self, "lengths", lengths)

    @classmethod
    def of(cls, *lengths: int) -> "CircuitFamily":
        return cls(tuple(lengths))

    @property
    def n(self) -> int:
        return sum(self.lengths)

    @property
    def num_circuits(self) -> int:
        return len(self.lengths)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for k in self.lengths:
            out.append(acc)
            acc += k
        return tuple(out)

    def circuit_vertices(self, index: int) -> range:
        start = self.offsets[index]
        return range(start, start + self.lengths[index])

    @property
    def arcs(self) -> list[tuple[int, int]]:
        """Arcs in canonical order: circuits in declaration order, then arc order."""
        out = []
        for start, k in zip(self.offsets, self.lengths):
            for i in range(k):
                out.append((start + i, start + (i + 1) % k))
        return out

    def counts(self) -> Counter:
        return Counter(self.lengths)

    def canonical(self) -> "CircuitFamily":
        return CircuitFamily(tuple(sorted(self.lengths)))

    def is_exception(self) -> bool:
        return tuple(sorted(self.lengths)) in EXCEPTION_FAMILIES

    def __add__(self, other: "CircuitFamily") -> "CircuitFamily":
        return CircuitFamily(self.lengths + other.lengths)

    def __str__(self) -> str:
        return ",".join(map(str, self.lengths))


EMPTY_FAMILY = CircuitFamily(())


@dataclass(frozen=True)
class Labeling:
    family: CircuitFamily
    labels: tuple[int, ...]

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        if len(labels) != self.family.n:
            raise StructureError(
                f"labeling has {len(labels)} labels for {self.family.n} vertices"
            )
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.family.n

    def circuit_labels(self, index: int) -> tuple[int, ...]:
        r = self.family.circuit_vertices(index)
        return self.labels[r.start:r.stop]

    def circuits(self) -> list[tuple[int, ...]]:
        return [self.circuit_labels(i) for i in range(self.family.num_circuits)]

    def difference_labels(self) -> list[int]:
        lab = self.labels
        return [lab[v] - lab[u] for u, v in self.family.arcs]

    def to_json(self) -> dict:
        return {"circuits": list(self.family.lengths), "labels": list(self.labels)}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "Labeling":
        if not isinstance(obj, Mapping) or "circuits" not in obj or "labels" not in obj:
            raise StructureError('labeling JSON needs "circuits" and "labels"')
        circuits, labels = obj["circuits"], obj["labels"]
        if not isinstance(circuits, list) or not isinstance(labels, list):
            raise StructureError('"circuits" and "labels" must be arrays')
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in circuits + labels):
            raise StructureError("circuit lengths and labels must be integers")
        return cls(CircuitFamily(tuple(circuits)), tuple(labels))

    @classmethod
    def from_circuits(cls, circuits: Sequence[Sequence[int]]) -> "Labeling":
        lengths = tuple(len(c) for c in circuits)
        labels = tuple(x for c in circuits for x in c)
        return cls(CircuitFamily(lengths), labels)


@dataclass
class VerificationReport:
    is_bijection: bool
    difference_labels: list[int]
    is_gdl: bool
    max_magnitude: int
    magnitude_counts: dict[int, int]
    duplicate_pairs: list[tuple[int, int]]

    def to_json(self) -> dict:
        return {
            "is_gdl": self.is_gdl,
            "is_bijection": self.is_bijection,
            "difference_labels": self.difference_labels,
            "max_magnitude": self.max_magnitude,
            "magnitude_counts": {str(k): v for k, v in sorted(self.magnitude_counts.items())},
            "duplicate_pairs": [list(p) for p in self.duplicate_pairs],
        }


def verify_gdl(labeling: Labeling) -> VerificationReport:
    """Check that ``labeling`` is a bijection with pairwise distinct arc labels.

    Duplicate pairs are reported as index pairs into the canonical arc list.
    """
    n = labeling.n
    labels = labeling.labels
    is_bijection = sorted(labels) == list(range(1, n + 1))
    diffs = labeling.difference_labels()

    mags: Counter = Counter(abs(d) for d in diffs)
    duplicates: list[tuple[int, int]] = []
    if is_bijection:
        # presence table over [-(n-1), n-1]; slot holds first arc index + 1
        table = [0] * (2 * n - 1) if n else []
        for a, d in enumerate(diffs):
            slot = d + n - 1
            if table[slot]:
                duplicates.append((table[slot] - 1, a))
            else:
                table[slot] = a + 1
    else:
        seen: dict[int, int] = {}
        for a, d in enumerate(diffs):
            if d in seen:
                duplicates.append((seen[d], a))
            else:
                seen[d] = a
    return VerificationReport(
        is_bijection=is_bijection,
        difference_labels=diffs,
        is_gdl=is_bijection and not duplicates,
        max_magnitude=max(mags) if mags else 0,
        magnitude_counts=dict(mags),
        duplicate_pairs=duplicates,
    )


def is_gdl(labeling: Labeling) -> bool:
    return verify_gdl(labeling).is_gdl


def arc_count_bound(family: CircuitFamily) -> bool:
    """Necessary condition |A| <= 2(|V| - 1) for a gdl to exist."""
    return family.n <= 2 * (family.n - 1)


def flip_circuit(labeling: Labeling, circuit_index: int) -> Labeling:
    """Reverse the labels of one circuit behind its first vertex.

    Every difference label of the circuit changes sign; for a triangle this
    exchanges the labels of its second and third vertices.
    """
    if not 0 <= circuit_index < labeling.family.num_circuits:
        raise StructureError(f"circuit index {circuit_index} out of range")
    r = labeling.family.circuit_vertices(circuit_index)
    labels = list(labeling.labels)
    block = labels[r.start:r.stop]
    labels[r.start:r.stop] = [block[0]] + block[:0:-1]
    return Labeling(labeling.family, tuple(labels))


def flip_triangle(labeling: Labeling, circuit_index: int) -> Labeling:
    if not 0 <= circuit_index < labeling.family.num_circuits:
        raise StructureError(f"circuit index {circuit_index} out of range")
    if labeling.family.lengths[circuit_index] != 3:
        raise StructureError(f"circuit {circuit_index} is not a triangle")
    return flip_circuit(labeling, circuit_index)


def shift_and_embed(
    inner: Labeling,
    offset: int,
    outer_family: CircuitFamily,
    placement: Sequence[int],
    partial: Optional[Sequence[Optional[int]]] = None,
) -> list[Optional[int]]:
    """Write ``inner`` labels shifted by ``offset`` into slots of ``outer_family``.

    ``placement[c]`` is the outer circuit receiving inner circuit ``c``; the
    lengths must agree.  Unassigned outer slots are ``None``.
    """
    if offset < 0:
        raise StructureError("offset must be non-negative")
    if len(placement) != inner.family.num_circuits or len(set(placement)) != len(placement):
        raise StructureError("placement must map every inner circuit to a distinct slot")
    out: list[Optional[int]] = list(partial) if partial is not None else [None] * outer_family.n
    if len(out) != outer_family.n:
        raise StructureError("partial labeling has the wrong length")
    used = {x for x in out if x is not None}
    for c, target in enumerate(placement):
        if inner.family.lengths[c] != outer_family.lengths[target]:
            raise StructureError(f"inner circuit {c} does not fit outer circuit {target}")
        src = inner.family.circuit_vertices(c)
        dst = outer_family.circuit_vertices(target)
        for u, v in zip(src, dst):
            value = inner.labels[u] + offset
            if not 1 <= value <= outer_family.n:
                raise StructureError(f"shifted label {value} outside 1..{outer_family.n}")
            if out[v] is not None or value in used:
                raise StructureError(f"label collision at outer vertex {v} (label {value})")
            out[v] = value
            used.add(value)
    return out


def concat(*parts: Labeling) -> Labeling:
    """Juxtapose labelings without shifting (callers pick disjoint label ranges)."""
    lengths: tuple[int, ...] = ()
    labels: tuple[int, ...] = ()
    for p in parts:
        lengths += p.family.lengths
        labels += p.labels
    return Labeling(CircuitFamily(lengths), labels)


def shifted(labeling: Labeling, offset: int) -> Labeling:
    return Labeling(labeling.family, tuple(x + offset for x in labeling.labels))


def reorder(labeling: Labeling, lengths: Iterable[int]) -> Labeling:
    """Permute whole circuits so the family reads as ``lengths``.

    Circuits of equal length keep their relative order.
    """
    target = tuple(lengths)
    if sorted(target) != sorted(labeling.family.lengths):
        raise StructureError(f"cannot reorder {labeling.family} into {target}")
    pools: dict[int, list[tuple[int, ...]]] = {}
    for block in labeling.circuits():
        pools.setdefault(len(block), []).append(block)
    for pool in pools.values():
        pool.reverse()
    return Labeling.from_circuits([pools[k].pop() for k in target])


@dataclass
class Certificate:
    """Outcome for a family: a gdl, proven non-existence, unsupported, or timeout."""

    status: str
    family: CircuitFamily
    labeling: Optional[Labeling] = None
    reason: str = ""
    provenance: dict = field(default_factory=dict)

    GDL = "gdl"
    NO_GDL = "no-gdl"
    UNSUPPORTED = "unsupported"
    TIMEOUT = "timeout"

    def __post_init__(self):
        if self.status == self.GDL:
            if self.labeling is None or not verify_gdl(self.labeling).is_gdl:
                raise ConstructionError("gdl certificate without a verified labeling")

    @property
    def exception_family(self) -> bool:
        return bool(self.provenance.get("exception"))

    def to_json(self) -> dict:
        out: dict = {"status": self.status, "family": list(self.family.lengths)}
        if self.labeling is not None:
            out["labeling"] = self.labeling.to_json()
        if self.reason:
            out["reason"] = self.reason
        out["provenance"] = self.provenance
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), ensure_ascii=False)
