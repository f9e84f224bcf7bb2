"""Gdls of n disjoint triangles, and of one 4-circuit plus n triangles.

For n >= 10 the labeling is built from a gdl of t triangles (n = 7t + r,
-4 <= r <= 2): 2θ or 2θ - 1 fresh triangles get closed-form labels, the
t-triangle gdl is shifted into the middle label range, and the remaining
coincidences between big and medium difference labels are removed by
flipping triangles.  Small n come from the search-generated catalog.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .core import (
    CircuitFamily,
    ConstructionError,
    Labeling,
    StructureError,
    UnsupportedError,
    flip_circuit,
    reorder,
    verify_gdl,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CaseParameters:
    n: int
    t: int
    r: int
    theta: int
    case_tag: str

    @property
    def main_count(self) -> int:
        """Number of freshly labeled triangles T_1 .. T_main."""
        return 2 * self.theta if self.case_tag in "AB" else 2 * self.theta - 1

    @property
    def sub_offset(self) -> int:
        return 3 * self.theta if self.case_tag in "AB" else 3 * self.theta - 1

    @property
    def regular_range(self) -> range:
        """Pair indices following the generic table rows (>= 2)."""
        top = {"A": self.theta, "B": self.theta - 1, "C": self.theta - 1, "D": self.theta - 3}
        return range(2, top[self.case_tag] + 1)

    def to_json(self) -> dict:
        return {"n": self.n, "t": self.t, "r": self.r, "theta": self.theta, "case": self.case_tag}


_CASES = {-4: "A", -2: "A", 0: "A", 2: "B", -3: "C", -1: "C", 1: "D"}


def case_parameters(n: int) -> CaseParameters:
    if n < 10:
        raise StructureError(f"recursive case split needs n >= 10, got {n}")
    t = (n + 4) // 7
    r = n - 7 * t
    theta = 3 * t + (r + 1) // 2 if r > 0 else 3 * t - ((-r) // 2)
    return CaseParameters(n, t, r, theta, _CASES[r])


def _main_triangles(p: CaseParameters) -> list[tuple[int, int, int]]:
    th, t = p.theta, p.t
    top = 6 * th + 3 * t
    if p.case_tag in "AB":
        rows = [
            (1, 2 * th + 1, top - 3),
            (2, top, 4 * th + 3 * t),
            (3, top - 1, 2 * th + 2),
            (4, 4 * th + 3 * t - 1, top - 2),
        ]
        last_k = th if p.case_tag == "A" else th - 1
        for k in range(3, last_k + 1):
            rows.append((2 * k - 1, 2 * th + k, top - 2 * k + 2))
            rows.append((2 * k, top - 2 * k + 1, 4 * th + 3 * t - k + 1))
        if p.case_tag == "B":
            rows.append((2 * th - 1, 3 * th + 3 * t + 1, 4 * th + 3 * t + 1))
            rows.append((2 * th, 4 * th + 3 * t + 2, 3 * th))
        return rows
    rows = [
        (1, 2 * th, top - 6),
        (2, top - 3, 4 * th + 3 * t - 2),
        (3, top - 4, 2 * th + 1),
        (4, 4 * th + 3 * t - 3, top - 5),
        (5, 2 * th + 2, top - 7),
    ]
    last_k = th - 1 if p.case_tag == "C" else th - 3
    for k in range(3, last_k + 1):
        rows.append((2 * k, top - 2 * k - 2, 4 * th + 3 * t - k - 1))
        rows.append((2 * k + 1, 2 * th + k, top - 2 * k - 3))
    if p.case_tag == "D":
        rows += [
            (2 * th - 4, 4 * th + 3 * t - 1, 3 * th + 3 * t + 1),
            (2 * th - 3, 4 * th + 3 * t + 2, 3 * th - 2),
            (2 * th - 2, 3 * th + 3 * t, 4 * th + 3 * t + 1),
            (2 * th - 1, 3 * th - 1, 4 * th + 3 * t),
        ]
    return rows


def _sub_profile_ok(sub: Labeling, t: int) -> bool:
    counts = verify_gdl(sub).magnitude_counts
    top = 3 * t - 2
    return all(m <= top for m in counts) and counts.get(top, 0) <= 1


def base_table_labeling(params: CaseParameters, sub_gdl: Labeling) -> Labeling:
    """Closed-form labels on T_1..T_main followed by the shifted t-triangle gdl.

    The result is a bijection onto 1..3n but usually not yet a gdl.
    """
    t = params.t
    if sub_gdl.family.lengths != (3,) * t:
        raise StructureError(f"sub labeling must cover {t} triangles")
    report = verify_gdl(sub_gdl)
    if not report.is_gdl or not _sub_profile_ok(sub_gdl, t):
        raise StructureError("sub labeling must be a gdl with at most one arc of magnitude 3t-2")
    rows = _main_triangles(params)
    assert len(rows) == params.main_count
    labels = [x for row in rows for x in row]
    labels += [x + params.sub_offset for x in sub_gdl.labels]
    n3 = 3 * params.n
    if sorted(labels) != list(range(1, n3 + 1)):
        raise ConstructionError(f"table labels for n={params.n} are not a bijection")
    return Labeling(CircuitFamily((3,) * params.n), tuple(labels))


# --- pairs ------------------------------------------------------------------

@dataclass(frozen=True)
class Member:
    name: str                 # "T5", "D1", ...
    triangle: Optional[int]   # 0-based circuit index; None for dummies
    small: int
    medium: int
    big: int

    @property
    def dummy(self) -> bool:
        return self.triangle is None

    def negated(self) -> "Member":
        return Member(self.name, self.triangle, -self.small, -self.medium, -self.big)


@dataclass(frozen=True)
class TrianglePairing:
    index: int
    members: tuple[Member, Member]

    @property
    def triangles(self) -> list[int]:
        return [m.triangle for m in self.members if m.triangle is not None]


def _pair_layout(p: CaseParameters) -> list[tuple[int, list[tuple[str, tuple[int, int, int]]]]]:
    """Table rows: for each pair index, the members' names and (s, m, b) formulas."""
    th, t = p.theta, p.t
    c3 = 3 * t
    if p.case_tag in "AB":
        def first(k):
            return (-(2 * th - k), -(4 * th + c3 - 3 * k + 1), 6 * th + c3 - 4 * k + 1)

        def second(k):
            return (2 * th - k, 4 * th + c3 - 3 * k - 1, -(6 * th + c3 - 4 * k - 1))

        layout = [
            (0, [("T1", (2 * th, 4 * th + c3 - 4, -(6 * th + c3 - 4))),
                 ("T2", (-2 * th, -(4 * th + c3 - 2), 6 * th + c3 - 2))]),
            (1, [("T3", (-(2 * th - 1), -(4 * th + c3 - 3), 6 * th + c3 - 4)),
                 ("T4", (2 * th - 1, 4 * th + c3 - 5, -(6 * th + c3 - 6)))]),
            (2, [("D1", first(2)), ("T5", second(2))]),
        ]
        last = th - 1 if p.case_tag == "A" else th - 2
        for k in range(3, last + 1):
            layout.append((k, [(f"T{2 * k}", first(k)), (f"T{2 * k + 1}", second(k))]))
        end = th if p.case_tag == "A" else th - 1
        layout.append((end, [(f"T{2 * end}", first(end)), ("D2", second(end))]))
        if p.case_tag == "B":
            layout.append((th, [
                (f"T{2 * th - 1}", (th, th + c3 + 2, -(2 * th + c3 + 2))),
                (f"T{2 * th}", (-th, -(th + c3 + 2), 2 * th + c3 + 2)),
            ]))
        return layout

    def first(k):
        return (-(2 * th - k - 1), -(4 * th + c3 - 3 * k - 1), 6 * th + c3 - 4 * k - 2)

    def second(k):
        return (2 * th - k - 1, 4 * th + c3 - 3 * k - 3, -(6 * th + c3 - 4 * k - 4))

    layout = [
        (0, [("T1", (2 * th - 1, 4 * th + c3 - 6, -(6 * th + c3 - 7))),
             ("T2", (-(2 * th - 1), -(4 * th + c3 - 4), 6 * th + c3 - 5))]),
        (1, [("T3", (-(2 * th - 2), -(4 * th + c3 - 5), 6 * th + c3 - 7)),
             ("T4", (2 * th - 2, 4 * th + c3 - 7, -(6 * th + c3 - 9)))]),
        (2, [("D1", first(2)), ("T5", second(2))]),
    ]
    last = th - 1 if p.case_tag == "C" else th - 3
    for k in range(3, last + 1):
        layout.append((k, [(f"T{2 * k}", first(k)), (f"T{2 * k + 1}", second(k))]))
    if p.case_tag == "D":
        layout.append((th - 2, [
            (f"T{2 * th - 3}", (-(th + 1), -(th + c3 + 4), 2 * th + c3 + 5)),
            (f"T{2 * th - 2}", (th + 1, th + c3 + 2, -(2 * th + c3 + 3))),
        ]))
        layout.append((th - 1, [
            (f"T{2 * th - 1}", (th, th + c3 + 1, -(2 * th + c3 + 1))),
            (f"T{2 * th - 4}", (-(th - 2), -(th + c3 + 5), 2 * th + c3 + 3)),
        ]))
    return layout


def triangle_dls(labeling: Labeling, index: int) -> tuple[int, int, int]:
    """(small, medium, big) difference labels of one triangle, by magnitude."""
    a, b, c = labeling.circuit_labels(index)
    s, m, g = sorted((b - a, c - b, a - c), key=abs)
    return s, m, g


def classify_pairs(
    labeling: Labeling,
    params: CaseParameters,
    flipped: frozenset = frozenset(),
    check: bool = True,
) -> list[TrianglePairing]:
    """Group T_1..T_main (and the dummies) into pairs π_0..π_θ.

    Real members get their labels from ``labeling``; dummies take the table
    values, negated when their pair index is in ``flipped``.  With ``check``,
    every real member must match its table row up to a global sign.
    """
    out = []
    for index, rows in _pair_layout(params):
        members = []
        for name, formula in rows:
            if name.startswith("D"):
                mem = Member(name, None, *formula)
                members.append(mem.negated() if index in flipped else mem)
                continue
            tri = int(name[1:]) - 1
            dls = triangle_dls(labeling, tri)
            if check and dls != formula and dls != tuple(-x for x in formula):
                raise ConstructionError(
                    f"{name} of case {params.case_tag} (n={params.n}) has dls {dls}, table says {formula}"
                )
            members.append(Member(name, tri, *dls))
        out.append(TrianglePairing(index, (members[0], members[1])))
    return out


# --- conflicts --------------------------------------------------------------

@dataclass(frozen=True)
class Conflict:
    source: int           # pair whose big dl ...
    target: int           # ... equals a medium dl of this pair
    source_member: int    # 1 or 2
    target_member: int
    value: int
    dummy: bool           # a dummy member is involved

    @property
    def kind(self) -> str:
        return f"{self.source_member}{self.target_member}"


@dataclass
class ConflictRelation:
    conflicts: list[Conflict]

    @property
    def edges(self) -> set[tuple[int, int]]:
        return {(c.source, c.target) for c in self.conflicts}

    def real(self) -> "ConflictRelation":
        return ConflictRelation([c for c in self.conflicts if not c.dummy])

    def within(self, indices) -> "ConflictRelation":
        keep = set(indices)
        return ConflictRelation(
            [c for c in self.conflicts if c.source in keep and c.target in keep]
        )

    def sources(self, target: int) -> list[int]:
        return sorted({c.source for c in self.conflicts if c.target == target})

    def targets(self, source: int) -> list[int]:
        return sorted({c.target for c in self.conflicts if c.source == source})

    def __bool__(self) -> bool:
        return bool(self.conflicts)


def detect_conflicts(pairings: list[TrianglePairing]) -> ConflictRelation:
    """All (i, j), i != j, where a big dl of π_i equals a medium dl of π_j."""
    mediums: dict[int, list[tuple[int, int, bool]]] = {}
    for p in pairings:
        for pos, m in enumerate(p.members, 1):
            mediums.setdefault(m.medium, []).append((p.index, pos, m.dummy))
    out = []
    for p in pairings:
        for pos, m in enumerate(p.members, 1):
            for j, jpos, jdummy in mediums.get(m.big, ()):
                if j != p.index:
                    out.append(Conflict(p.index, j, pos, jpos, m.big, m.dummy or jdummy))
    out.sort(key=lambda c: (c.source, c.target, c.source_member, c.target_member))
    return ConflictRelation(out)


# --- resolution -------------------------------------------------------------

def _duplicates(labels: list[int], family: CircuitFamily) -> list[tuple[int, int]]:
    return verify_gdl(Labeling(family, tuple(labels))).duplicate_pairs


def greedy_repair(
    labeling: Labeling, units: list[list[int]], max_iter: int
) -> tuple[Labeling, list[int], bool]:
    """Flip whole units (lists of circuit indices) until no difference label repeats.

    Each round flips the unit touching a duplicate whose flip leaves the
    fewest duplicates.  Returns (labeling, flipped unit ids, success).
    """
    family = labeling.family
    arc_circuit = [c for c, k in enumerate(family.lengths) for _ in range(k)]
    unit_of: dict[int, list[int]] = {}
    for u, circuits in enumerate(units):
        for c in circuits:
            unit_of.setdefault(c, []).append(u)
    applied: list[int] = []
    current = labeling
    for _ in range(max_iter):
        dups = verify_gdl(current).duplicate_pairs
        if not dups:
            return current, applied, True
        touched = sorted({arc_circuit[a] for pair in dups for a in pair})
        candidates = sorted({u for c in touched for u in unit_of.get(c, ())})
        best = None
        for u in candidates:
            trial = current
            for c in units[u]:
                trial = flip_circuit(trial, c)
            score = len(verify_gdl(trial).duplicate_pairs)
            if best is None or score < best[0]:
                best = (score, u, trial)
        if best is None:
            break
        _, u, current = best
        applied.append(u)
    return current, applied, not verify_gdl(current).duplicate_pairs


class _Resolver:
    def __init__(self, base: Labeling, params: CaseParameters):
        self.p = params
        self.family = base.family
        self.labeling = base
        self.flipped_pairs: set[int] = set()
        self.tri_flipped = [False] * params.n
        self.trace: list[dict] = []
        self.layout = {i: p for i, p in ((pp.index, pp) for pp in self.pairings())}
        self.fallback_used = False

    # state helpers
    def pairings(self) -> list[TrianglePairing]:
        return classify_pairs(self.labeling, self.p, frozenset(self.flipped_pairs))

    def relation(self) -> ConflictRelation:
        return detect_conflicts(self.pairings())

    def _flip_triangles(self, tris):
        lab = self.labeling
        for c in tris:
            lab = flip_circuit(lab, c)
            self.tri_flipped[c] = not self.tri_flipped[c]
        self.labeling = lab

    def flip_pair(self, i: int, why: str):
        self._flip_triangles(self.layout[i].triangles)
        self.flipped_pairs ^= {i}
        self.trace.append({"flip": f"pi_{i}", "why": why})

    def flip_sub(self, why: str):
        self._flip_triangles(range(self.p.main_count, self.p.n))
        self.trace.append({"flip": "sub_block", "why": why})

    def _dups_between(self, lo: int, hi: int) -> list[tuple[int, int]]:
        # duplicates with both arcs on triangles lo..hi-1 (0-based)
        return [
            d for d in verify_gdl(self.labeling).duplicate_pairs
            if all(lo * 3 <= a < hi * 3 for a in d)
        ]

    # procedure
    def run(self) -> Labeling:
        p = self.p
        reg = list(p.regular_range)
        rel = self.relation().real().within(reg)
        fwd = [c for c in rel.conflicts if c.target < c.source]
        inn: dict[int, set] = {}
        out: dict[int, set] = {}
        for c in fwd:
            out.setdefault(c.source, set()).add(c.target)
            inn.setdefault(c.target, set()).add(c.source)
        J = {j for j in reg if inn.get(j) and out.get(j)}
        J2 = set()
        for k, srcs in inn.items():
            if srcs & J:
                J2 |= {x for x in srcs if x not in J}
        # J2 holds j' != j with j -> k and j' -> k for some j in J
        J2 = {x for x in J2 if any(j != x and k in out.get(j, ()) for j in J for k in out.get(x, ()))}
        for i in sorted(J | J2):
            self.flip_pair(i, "J" if i in J else "J'")
        self.trace.append({"J": sorted(J), "J'": sorted(J2)})

        done = J | J2
        for _ in range(len(reg) + 2):
            rel = self.relation().real().within(reg)
            fwd = [c for c in rel.conflicts if c.target < c.source]
            if not fwd:
                break
            j = min(c.target for c in fwd)
            srcs = sorted({c.source for c in fwd if c.target == j})
            i = srcs[0]
            if 3 * i <= 2 * p.theta:
                self.flip_pair(j, f"threshold: pi_{i} -> pi_{j}, i <= 2θ/3")
            else:
                for s in srcs[:2]:
                    self.flip_pair(s, f"threshold: pi_{i} -> pi_{j}, i > 2θ/3")
            done |= {j, *srcs}
        else:
            self.trace.append({"note": "threshold rule did not settle all regular conflicts"})

        # sub block against the main block (only case A with θ = 3t - 2 can clash)
        main_arcs = 3 * p.main_count
        dls = self.labeling.difference_labels()
        if set(dls[:main_arcs]) & set(dls[main_arcs:]):
            self.flip_sub("sub block shares a difference label with T_1..T_main")

        if p.case_tag == "D":
            self._case_d_tail()
        if p.case_tag in "AB":
            self._head(guard=1, primary=0, secondary=1)
        else:
            self._head(guard=0, primary=1, secondary=0)

        if not verify_gdl(self.labeling).is_gdl:
            self._fallback()
        return self.labeling

    def _case_d_tail(self):
        th = self.p.theta
        pairs = {pp.index: pp for pp in self.pairings()}
        watched = {pairs[th - 1].members[0].big, pairs[th - 2].members[0].big}
        hit = any(
            m.medium in watched
            for idx, pp in pairs.items() if idx < th - 2
            for m in pp.members if not m.dummy
        )
        if hit:
            self.flip_pair(th - 2, "medium dl meets the big dl of pi_{θ-2}/pi_{θ-1}")
            self.flip_pair(th - 1, "flipped together with pi_{θ-2}")

    def _head(self, guard: int, primary: int, secondary: int):
        rel = self.relation().real()
        if any(c.target == guard and c.source >= 2 for c in rel.conflicts):
            self.flip_pair(guard, f"pi_j -> pi_{guard} for some j >= 2")
        if not self._dups_between(0, 4):
            return
        self.flip_pair(primary, "pi_0 / pi_1 clash")
        if not self._dups_between(0, 4):
            return
        self.flip_pair(primary, "undo")
        self.flip_pair(secondary, "pi_0 / pi_1 clash (alternate)")
        self.trace.append({"note": f"pi_0/pi_1 clash needed pi_{secondary}"})

    def _fallback(self):
        self.fallback_used = True
        log.warning("fallback resolver engaged for n=%d (case %s)", self.p.n, self.p.case_tag)
        order = sorted(self.layout)
        units = [self.layout[i].triangles for i in order]
        units.append(list(range(self.p.main_count, self.p.n)))
        lab, applied, ok = greedy_repair(self.labeling, units, 4 * self.p.theta)
        for u in applied:
            tris = units[u]
            for c in tris:
                self.tri_flipped[c] = not self.tri_flipped[c]
            if u < len(order):
                self.flipped_pairs ^= {order[u]}
            self.trace.append({"flip": f"pi_{order[u]}" if u < len(order) else "sub_block",
                               "why": "fallback"})
        self.labeling = lab
        if not ok:
            raise ConstructionError(
                f"conflict resolution failed for n={self.p.n}", trace=self.trace
            )

    @property
    def flips(self) -> tuple[int, ...]:
        return tuple(i for i, f in enumerate(self.tri_flipped) if f)


def resolve_conflicts(
    labeling: Labeling,
    pairings: list[TrianglePairing],
    conflicts: ConflictRelation,
    params: CaseParameters,
    sub_block: Optional[range] = None,
) -> Labeling:
    """Flip pairs of ``labeling`` (a base table labeling) until it is a gdl.

    ``pairings`` and ``conflicts`` describe the input and are recomputed as
    flips are applied; ``sub_block`` defaults to the embedded t triangles.
    """
    if sub_block is not None and sub_block != range(params.main_count, params.n):
        raise StructureError("sub block must be the embedded t triangles")
    if not conflicts and verify_gdl(labeling).is_gdl:
        return labeling
    resolver = _Resolver(labeling, params)
    return resolver.run()


# --- constructions ----------------------------------------------------------

@dataclass(frozen=True)
class TriangleConstruction:
    labeling: Labeling
    source: str                                  # "catalog", "recursive", "c4-plus-odd"
    params: Optional[CaseParameters] = None
    base: Optional[Labeling] = None              # table labeling before flips
    flips: tuple[int, ...] = ()                  # F: triangles flipped w.r.t. base
    trace: tuple = ()
    fallback_used: bool = False
    sub: Optional["TriangleConstruction"] = None
    extra: dict = field(default_factory=dict, hash=False, compare=False)

    def fallback_count(self) -> int:
        own = 1 if self.fallback_used else 0
        return own + (self.sub.fallback_count() if self.sub else 0)

    def provenance(self) -> dict:
        levels = []
        node: Optional[TriangleConstruction] = self
        while node is not None:
            entry = {"source": node.source, "size": node.labeling.n}
            if node.params is not None:
                entry.update(node.params.to_json())
                entry["flips"] = list(node.flips)
                entry["fallback_used"] = node.fallback_used
            entry.update(node.extra)
            levels.append(entry)
            node = node.sub
        return {"triangles": levels, "fallback_activations": self.fallback_count()}


def _catalog_labeling(family: tuple[int, ...], profile: str) -> Labeling:
    from .catalog import lookup

    return lookup(family, profile)


@lru_cache(maxsize=None)
def build_n_c3(n: int) -> TriangleConstruction:
    if n <= 1:
        raise UnsupportedError("C3 has no gdl", exception_family=(n == 1))
    if n <= 9:
        return TriangleConstruction(_catalog_labeling((3,) * n, "lemma7"), "catalog")
    params = case_parameters(n)
    sub = build_n_c3(params.t)
    base = base_table_labeling(params, sub.labeling)
    resolver = _Resolver(base, params)
    labeling = resolver.run()
    report = verify_gdl(labeling)
    top = 3 * n - 2
    if not report.is_gdl or report.max_magnitude > top or report.magnitude_counts.get(top, 0) > 1:
        raise ConstructionError(f"n={n}: result violates the gdl/magnitude contract",
                                trace=resolver.trace)
    return TriangleConstruction(
        labeling, "recursive", params, base, resolver.flips, tuple(resolver.trace),
        resolver.fallback_used, sub,
    )


def label_n_c3(n: int) -> Labeling:
    """Gdl of n triangles (n >= 2) with at most one arc of magnitude 3n - 2
    and every other magnitude below it."""
    return build_n_c3(n).labeling


def _insert_vertex(big: TriangleConstruction) -> tuple[Labeling, int]:
    """Turn one triangle of the base table labeling of (n+1) triangles into a
    4-circuit through a new vertex.  Returns the labeling and the C4's index."""
    p = big.params
    circuits = [list(c) for c in big.base.circuits()]
    if p.case_tag in "AB":
        circuits = [[x + 1 for x in c] for c in circuits]
        a, b, c = circuits[1]
        circuits[1] = [a, b, 1, c]       # v4 v5 v0 v6
        at = 1
    else:
        a, b, c = circuits[2]
        circuits[2] = [a, b, c, 3 * p.n + 1]   # v7 v8 v9 v0
        at = 2
    return Labeling.from_circuits(circuits), at


@lru_cache(maxsize=None)
def build_c4_plus_n_c3(n: int) -> TriangleConstruction:
    if n <= 0:
        raise StructureError(f"C4 + nC3 needs n >= 1, got {n}")
    if n == 1:
        from .constructions import label_c4_plus_odd

        return TriangleConstruction(label_c4_plus_odd(3), "c4-plus-odd")
    if n <= 8:
        return TriangleConstruction(_catalog_labeling((4,) + (3,) * n, "plain"), "catalog")

    big = build_n_c3(n + 1)
    lab, at = _insert_vertex(big)
    for c in big.flips:
        lab = flip_circuit(lab, c)       # on the 4-circuit: reverse it
    extra = {"c4_slot": f"T{at + 1}", "replayed_flips": len(big.flips)}
    fallback = False
    if not verify_gdl(lab).is_gdl:
        fallback = True
        log.warning("flip replay left duplicates for C4 + %dC3; repairing", n)
        pairs = classify_pairs(big.base, big.params, check=False)
        units = [pp.triangles for pp in pairs]
        units.append(list(range(big.params.main_count, big.params.n)))
        lab, applied, ok = greedy_repair(lab, units, 4 * big.params.theta)
        extra["repair_units"] = applied
        if not ok:
            raise ConstructionError(f"C4 + {n}C3: replay and repair failed")
    lab = reorder(lab, (4,) + (3,) * n)
    return TriangleConstruction(
        lab, "vertex-insertion", big.params, big.base, big.flips, (), fallback, big, extra
    )


def label_c4_plus_n_c3(n: int) -> Labeling:
    """Gdl of a 4-circuit plus n triangles (n >= 1); the 4-circuit comes first."""
    return build_c4_plus_n_c3(n).labeling
