"""Closed-form gdl constructions for circuits and the planner that composes them.

Bases label a small family outright; extensions append circuits to an
existing gdl by shifting its labels up and wrapping the new circuit around
them with magnitudes larger than every old one.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from .core import (
    Certificate,
    CircuitFamily,
    ConstructionError,
    EMPTY_FAMILY,
    Labeling,
    StructureError,
    UnsupportedError,
    concat,
    reorder,
    shifted,
    verify_gdl,
)

log = logging.getLogger(__name__)


def _single_circuit_labels(k: int) -> list[int]:
    # index 1..k, slot 0 unused
    f = [0] * (k + 1)
    if k == 2:
        return [1, 2]
    p, rem = divmod(k, 4)
    if rem == 0:
        for i in range(0, 2 * p - 1):
            f[2 * i + 1] = i + 1
        for i in range(1, 2 * p - 1):
            f[2 * i] = 4 * p + 1 - i
        f[4 * p - 2], f[4 * p - 1], f[4 * p] = 2 * p + 1, 2 * p + 2, 2 * p
    elif rem == 1:
        for i in range(0, 2 * p + 1):
            f[2 * i + 1] = i + 1
        for i in range(1, 2 * p + 1):
            f[2 * i] = 4 * p + 2 - i
    elif rem == 2:
        for i in range(0, 2 * p + 1):
            f[2 * i + 1] = i + 1
        for i in range(1, 2 * p + 2):
            f[2 * i] = 4 * p + 3 - i
    else:
        for i in range(0, 2 * p):
            f[2 * i + 1] = i + 1
        for i in range(1, 2 * p + 1):
            f[2 * i] = 4 * p + 4 - i
        f[4 * p + 1], f[4 * p + 2], f[4 * p + 3] = 2 * p + 2, 2 * p + 1, 2 * p + 3
    return f[1:]


def label_single_circuit(k: int) -> Labeling:
    """Gdl of one circuit of length ``k`` (k = 2 or k >= 4).

    For k >= 5 the labeling has exactly one arc of magnitude 1; its sign is
    given by :func:`unit_arc_sign`.
    """
    if k < 2:
        raise StructureError(f"circuit length must be >= 2, got {k}")
    if k == 3:
        raise UnsupportedError("C3 has no gdl", exception_family=True)
    return Labeling(CircuitFamily((k,)), tuple(_single_circuit_labels(k)))


def unit_arc_sign(k: int) -> Optional[int]:
    """Sign of the unique magnitude-1 arc of ``label_single_circuit(k)``, k >= 5.

    k = 0, 2 (mod 4): the arc v_{k-1}v_k-ish climb is +1; k = 1, 3 (mod 4): -1.
    Returns None when the circuit has no unique magnitude-1 arc.
    """
    if k < 5:
        return None
    return 1 if k % 4 in (0, 2) else -1


def extend_with_two_c4(g: Labeling) -> Labeling:
    """Append two 4-circuits to a gdl; old labels move up by 4."""
    _require_gdl(g)
    v = g.n
    first = (1, v + 8, 2, v + 6)
    second = (3, v + 5, 4, v + 7)
    return concat(shifted(g, 4), Labeling.from_circuits([first, second]))


def extend_with_even_circuit(g: Labeling, two_k: int) -> Labeling:
    """Append a circuit of even length ``two_k`` (2 or >= 6) to a gdl.

    Old labels move up by k; the new circuit alternates the k smallest
    labels (descending) with the k largest ones.
    """
    if two_k % 2 or two_k < 2:
        raise StructureError(f"even circuit length >= 2 required, got {two_k}")
    if two_k == 4:
        raise UnsupportedError("a single C4 cannot be appended; use extend_with_two_c4")
    _require_gdl(g)
    v = g.n
    k = two_k // 2
    f = [0] * (two_k + 1)
    for i in range(1, k + 1):
        f[2 * i - 1] = k - i + 1
    if k % 2:
        for i in range(1, k + 1):
            f[2 * i] = v + k + i
    else:
        for i in range(1, k - 2):
            f[2 * i] = v + k + i
        f[2 * k - 4] = v + 2 * k
        f[2 * k - 2] = v + 2 * k - 2
        f[2 * k] = v + 2 * k - 1
    return concat(shifted(g, k), Labeling.from_circuits([f[1:]]))


def _require_gdl(g: Labeling) -> None:
    if g.n and not verify_gdl(g).is_gdl:
        raise StructureError("input labeling is not a gdl")


# --- fixed bases -----------------------------------------------------------

TWO_C2_PLUS_C3 = Labeling.from_circuits([(1, 6), (3, 7), (2, 4, 5)])

# found by exhaustive search (lexicographically smallest); covers C3 + 2C4,
# which none of the closed-form bases reaches
TWO_C4_PLUS_C3 = Labeling.from_circuits([(3, 10, 7, 9), (4, 8, 6, 11), (1, 2, 5)])


def label_c4_plus_odd(odd: int) -> Labeling:
    """Gdl of C4 + C_{2k+1}, carved out of one longer single-circuit labeling."""
    if odd < 3 or odd % 2 == 0:
        raise StructureError(f"odd circuit length >= 3 required, got {odd}")
    k = (odd - 1) // 2
    if k % 2:
        n = 2 * k + 5
        f = [0] + _single_circuit_labels(n)
        c4 = (f[1], f[n - 2], f[n - 1], f[n])
        rest = tuple(f[2:n - 2])
    else:
        f = [0] + _single_circuit_labels(2 * k + 4) + [2 * k + 5]
        c4 = (f[1], f[2 * k + 2], f[2 * k + 3], f[2 * k + 4])
        rest = tuple(f[2:2 * k + 2]) + (f[2 * k + 5],)
    return Labeling.from_circuits([c4, rest])


def label_ck_plus_c3(k: int) -> Labeling:
    """Gdl of C_k + C3 for k >= 5: triangle on {1, 2, k + 3}, oriented so its
    unit arc opposes the circuit's unit arc."""
    if k < 5:
        raise StructureError(f"C_k + C3 needs k >= 5, got {k}")
    ck = shifted(label_single_circuit(k), 2)
    tri = (1, 2, k + 3) if unit_arc_sign(k) == -1 else (2, 1, k + 3)
    return concat(ck, Labeling.from_circuits([tri]))


@dataclass(frozen=True)
class Base:
    kind: str
    size: int = 0

    def __str__(self) -> str:
        return f"{self.kind}({self.size})" if self.size else self.kind

    @property
    def family(self) -> CircuitFamily:
        kind, s = self.kind, self.size
        if kind == "SingleCircuit":
            return CircuitFamily((s,))
        if kind == "TwoC2PlusC3":
            return CircuitFamily((2, 2, 3))
        if kind == "TwoC4PlusC3":
            return CircuitFamily((4, 4, 3))
        if kind == "C4PlusOdd":
            return CircuitFamily((4, s))
        if kind == "CkPlusC3":
            return CircuitFamily((s, 3))
        if kind == "NC3":
            return CircuitFamily((3,) * s)
        if kind == "C4PlusNC3":
            return CircuitFamily((4,) + (3,) * s)
        if kind == "Empty":
            return EMPTY_FAMILY
        raise StructureError(f"unknown base {kind}")


def label_fixed_base(kind: Base) -> Labeling:
    """Label one of the fixed small bases (2C2+C3, C4+C_odd, C_k+C3, C3+2C4)."""
    if kind.kind == "TwoC2PlusC3":
        return TWO_C2_PLUS_C3
    if kind.kind == "TwoC4PlusC3":
        return TWO_C4_PLUS_C3
    if kind.kind == "C4PlusOdd":
        return label_c4_plus_odd(kind.size)
    if kind.kind == "CkPlusC3":
        return label_ck_plus_c3(kind.size)
    raise StructureError(f"{kind} is not a fixed base")


@dataclass
class ConstructionPlan:
    base: Base
    extensions: list[tuple[str, int]] = field(default_factory=list)

    @property
    def family(self) -> CircuitFamily:
        lengths = list(self.base.family.lengths)
        for kind, size in self.extensions:
            lengths += [4, 4] if kind == "AddTwoC4" else [size]
        return CircuitFamily(tuple(lengths))

    def to_json(self) -> dict:
        return {
            "base": str(self.base),
            "extensions": [k if k == "AddTwoC4" else f"{k}({s})" for k, s in self.extensions],
        }


def in_construction_scope(family: CircuitFamily) -> bool:
    """At most one odd circuit, or every odd circuit is a triangle."""
    odd = [k for k in family.lengths if k % 2]
    return len(odd) <= 1 or all(k == 3 for k in odd)


def plan_construction(family: CircuitFamily) -> Optional[ConstructionPlan]:
    """Choose a base and extensions for a supported family, or None.

    Raises UnsupportedError for the two exception families.
    """
    if not family.lengths:
        raise StructureError("empty family")
    if family.is_exception():
        name = "+".join(f"C{k}" for k in sorted(family.lengths))
        raise UnsupportedError(f"{name} has no gdl", exception_family=True)
    if not in_construction_scope(family):
        return None

    counts = Counter(family.lengths)
    odd = sorted(k for k in family.lengths if k % 2)
    c4 = counts.pop(4, 0)
    evens = Counter({k: m for k, m in counts.items() if k % 2 == 0})

    def take_even(k):
        evens[k] -= 1
        if not evens[k]:
            del evens[k]

    if len(odd) >= 2:
        if c4 % 2:
            base, c4 = Base("C4PlusNC3", len(odd)), c4 - 1
        else:
            base = Base("NC3", len(odd))
    elif odd == [3]:
        big = [k for k in evens if k >= 6]
        if c4 % 2:
            base, c4 = Base("C4PlusOdd", 3), c4 - 1
        elif evens.get(2, 0) >= 2:
            base = Base("TwoC2PlusC3")
            take_even(2)
            take_even(2)
        elif big:
            base = Base("CkPlusC3", max(big))
            take_even(max(big))
        else:
            # remaining shape: C3 + (C2 at most once) + an even, positive number of C4s
            base, c4 = Base("TwoC4PlusC3"), c4 - 2
    elif odd:
        if c4 % 2:
            base, c4 = Base("C4PlusOdd", odd[0]), c4 - 1
        else:
            base = Base("SingleCircuit", odd[0])
    elif c4 % 2:
        base, c4 = Base("SingleCircuit", 4), c4 - 1
    elif evens:
        base = Base("SingleCircuit", max(evens))
        take_even(max(evens))
    else:
        base = Base("Empty")

    extensions: list[tuple[str, int]] = [("AddTwoC4", 0)] * (c4 // 2)
    for k in sorted(evens.elements(), reverse=True):
        extensions.append(("AddEvenCircuit", k))
    plan = ConstructionPlan(base, extensions)
    assert sorted(plan.family.lengths) == sorted(family.lengths)
    return plan


def _label_base(base: Base) -> tuple[Labeling, dict]:
    from . import triangles

    if base.kind == "Empty":
        return Labeling(EMPTY_FAMILY, ()), {}
    if base.kind == "SingleCircuit":
        return label_single_circuit(base.size), {}
    if base.kind == "NC3":
        built = triangles.build_n_c3(base.size)
        return built.labeling, built.provenance()
    if base.kind == "C4PlusNC3":
        built = triangles.build_c4_plus_n_c3(base.size)
        return built.labeling, built.provenance()
    return label_fixed_base(base), {}


def execute_plan(plan: ConstructionPlan) -> tuple[Labeling, dict]:
    g, extra = _label_base(plan.base)
    for kind, size in plan.extensions:
        g = extend_with_two_c4(g) if kind == "AddTwoC4" else extend_with_even_circuit(g, size)
    return g, extra


def plan_and_construct(family: CircuitFamily, budget=None) -> Certificate:
    """Certificate for ``family``: constructed gdl, exception, or search result.

    Families outside the constructive coverage go to the exhaustive search
    when a ``budget`` is given, otherwise come back unsupported.
    """
    try:
        plan = plan_construction(family)
    except UnsupportedError as exc:
        return Certificate(
            Certificate.UNSUPPORTED, family, reason=exc.reason,
            provenance={"exception": True},
        )
    if plan is None:
        if budget is None:
            return Certificate(
                Certificate.UNSUPPORTED, family,
                reason="two or more odd circuits with one of length >= 5: no construction known",
                provenance={"exception": False},
            )
        from .search import search_gdl

        return search_gdl(family, budget)

    g, extra = execute_plan(plan)
    g = reorder(g, family.lengths)
    report = verify_gdl(g)
    if not report.is_gdl:
        raise ConstructionError(
            f"plan {plan.to_json()} produced a non-gdl for {family}",
            trace={"labels": list(g.labels), "duplicates": report.duplicate_pairs},
        )
    provenance = {"plan": plan.to_json(), **extra}
    return Certificate(Certificate.GDL, family, g, provenance=provenance)
