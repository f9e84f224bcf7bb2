"""Exhaustive backtracking search for gdls of small circuit families.

Vertices are assigned circuit by circuit in arc order, labels in increasing
order, so the first labeling found is the lexicographically smallest one in
the symmetry-reduced space.  Pruning uses presence tables for vertex labels
and for difference labels (offset by n - 1).

Symmetry reduction: the minimum label of every circuit sits on its first
vertex (kills rotations), and circuits of equal length appear with
increasing first labels (kills permutations of equal circuits).

The inner loop is an iterative numba kernel that can pause after a node
quota and resume, so wall-clock budgets are enforced from Python.  Families
of at most SMALL_N vertices use an equivalent plain-Python DFS (same order,
same node counts) so tiny searches do not pay the JIT warm-up.
"""

from __future__ import annotations

import math
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numba
import numpy as np

from .core import Certificate, CircuitFamily, Labeling, StructureError, verify_gdl

EXHAUSTION_GUARD = 12
CHUNK_NODES = 1 << 20
SMALL_N = 7   # below this the JIT warm-up costs more than the search

FOUND, EXHAUSTED, PAUSED = 1, 0, 2


@dataclass(frozen=True)
class SearchBudget:
    max_nodes: Optional[int] = None
    max_seconds: Optional[float] = None
    canonical: bool = True

    @property
    def bounded(self) -> bool:
        return self.max_nodes is not None or self.max_seconds is not None


UNLIMITED = SearchBudget()


@dataclass(frozen=True)
class MagnitudeProfile:
    """No magnitude above ``max_magnitude`` and at most ``top_count`` arcs
    of magnitude exactly ``max_magnitude``."""

    max_magnitude: int
    top_count: int

    @classmethod
    def triangle_recursion(cls, triangles: int) -> "MagnitudeProfile":
        return cls(3 * triangles - 2, 1)

    def admits(self, labeling: Labeling) -> bool:
        counts = verify_gdl(labeling).magnitude_counts
        if any(m > self.max_magnitude for m in counts):
            return False
        return counts.get(self.max_magnitude, 0) <= self.top_count


@numba.njit(cache=True)
def _kernel(n, first, is_last, circ, clen, prev_first, after, tail_uniform,
            max_mag, top_count, symmetry, prefix, quota, st, labels, used, dused,
            cand, hi, d1, d2, tops):
    """Resume the DFS described by the state arrays for at most ``quota`` nodes.

    ``st`` = [level, nodes, initialised].  Returns FOUND / EXHAUSTED / PAUSED.
    """
    off = n - 1
    v = st[0]
    nodes = 0
    npre = prefix.shape[0]
    if st[2] == 0:
        st[2] = 1
        v = 0
        tops[0] = 0
        # fall through to level initialisation
        init = True
    else:
        init = False
    while True:
        if init:
            init = False
            if v == n:
                st[0] = v
                st[1] += nodes
                return 1
            f = first[v]
            c = circ[v]
            if v == f:
                lo = 1
                h = n
                if symmetry:
                    h = n - clen[c] + 1
                    if prev_first[c] >= 0:
                        lo = max(lo, labels[prev_first[c]] + 1)
                    if tail_uniform[c]:
                        s = 1
                        while s <= n and used[s]:
                            s += 1
                        lo = max(lo, s)
                        h = min(h, s)
            else:
                lo = labels[f] + 1 if symmetry else 1
                h = n
            if v < npre:
                if prefix[v] < lo or prefix[v] > h:
                    lo = 1
                    h = 0
                else:
                    lo = prefix[v]
                    h = prefix[v]
            cand[v] = lo
            hi[v] = h
            labels[v] = 0

        if v < 0:
            st[0] = v
            st[1] += nodes
            return 0
        # undo the current assignment at this level, if any
        if labels[v] != 0:
            used[labels[v]] = False
            if d1[v] >= 0:
                dused[d1[v]] = False
            if d2[v] >= 0:
                dused[d2[v]] = False
            labels[v] = 0
        if nodes >= quota:
            st[0] = v
            st[1] += nodes
            return 2

        f = first[v]
        c = circ[v]
        placed = False
        x = cand[v]
        while x <= hi[v]:
            if used[x]:
                x += 1
                continue
            b1 = -1
            b2 = -1
            top = tops[v]
            ok = True
            if v != f:
                d = x - labels[v - 1]
                m = d if d > 0 else -d
                if m > max_mag or dused[d + off]:
                    ok = False
                else:
                    b1 = d + off
                    if top_count >= 0 and m == max_mag:
                        top += 1
                    if is_last[v]:
                        e = labels[f] - x
                        me = e if e > 0 else -e
                        if me > max_mag or dused[e + off] or e + off == b1:
                            ok = False
                        else:
                            b2 = e + off
                            if top_count >= 0 and me == max_mag:
                                top += 1
                    if ok and top_count >= 0 and top > top_count:
                        ok = False
            elif symmetry:
                # free labels below this circuit's minimum must open later circuits
                below = 0
                for y in range(1, x):
                    if not used[y]:
                        below += 1
                if below > after[c]:
                    ok = False
            if ok:
                labels[v] = x
                used[x] = True
                d1[v] = b1
                d2[v] = b2
                if b1 >= 0:
                    dused[b1] = True
                if b2 >= 0:
                    dused[b2] = True
                cand[v] = x + 1
                tops[v + 1] = top
                nodes += 1
                placed = True
                break
            x += 1
        if placed:
            v += 1
            init = True
        else:
            cand[v] = hi[v] + 1
            v -= 1


class _State:
    """Static tables plus resumable DFS state for one (family, prefix) search."""

    def __init__(self, family: CircuitFamily, profile: Optional[MagnitudeProfile],
                 symmetry: bool, prefix: tuple[int, ...] = ()):
        n = family.n
        lengths = family.lengths
        first, is_last, circ = [], [], []
        for c, (start, k) in enumerate(zip(family.offsets, lengths)):
            for i in range(k):
                first.append(start)
                is_last.append(i == k - 1)
                circ.append(c)
        prev_first, seen = [], {}
        for c, k in enumerate(lengths):
            prev_first.append(seen.get(k, -1))
            seen[k] = family.offsets[c]
        i64 = np.int64
        self.n = n
        self.static = (
            n,
            np.array(first, dtype=i64),
            np.array(is_last, dtype=np.bool_),
            np.array(circ, dtype=i64),
            np.array(lengths, dtype=i64),
            np.array(prev_first, dtype=i64),
            np.array([len(lengths) - c - 1 for c in range(len(lengths))], dtype=i64),
            np.array([all(k == lengths[c] for k in lengths[c:]) for c in range(len(lengths))],
                     dtype=np.bool_),
            profile.max_magnitude if profile else max(n - 1, 0),
            profile.top_count if profile else -1,
            symmetry,
            np.array(prefix, dtype=i64),
        )
        self.st = np.zeros(3, dtype=i64)
        self.labels = np.zeros(n + 1, dtype=i64)
        self.used = np.zeros(n + 2, dtype=np.bool_)
        self.dused = np.zeros(2 * n + 1, dtype=np.bool_)
        self.cand = np.zeros(n + 1, dtype=i64)
        self.hi = np.zeros(n + 1, dtype=i64)
        self.d1 = np.full(n + 1, -1, dtype=i64)
        self.d2 = np.full(n + 1, -1, dtype=i64)
        self.tops = np.zeros(n + 2, dtype=i64)

    @property
    def nodes(self) -> int:
        return int(self.st[1])

    def step(self, quota: int) -> int:
        return _kernel(*self.static, quota, self.st, self.labels, self.used, self.dused,
                       self.cand, self.hi, self.d1, self.d2, self.tops)

    def solution(self) -> list[int]:
        return [int(x) for x in self.labels[: self.n]]


def _run_python(family, budget, profile, symmetry):
    """Same DFS and ordering as the kernel, in plain Python, for tiny families."""
    start = time.monotonic()
    n = family.n
    lengths = family.lengths
    starts = family.offsets
    circ = [c for c, k in enumerate(lengths) for _ in range(k)]
    prev_first, seen = [], {}
    for c, k in enumerate(lengths):
        prev_first.append(seen.get(k, -1))
        seen[k] = starts[c]
    tail_uniform = [all(k == lengths[c] for k in lengths[c:]) for c in range(len(lengths))]
    max_mag = profile.max_magnitude if profile else max(n - 1, 0)
    top_count = profile.top_count if profile else -1
    labels = [0] * n
    used = [False] * (n + 2)
    dused: set[int] = set()
    nodes = 0
    timed_out = False

    def over_budget():
        if budget.max_nodes is not None and nodes >= budget.max_nodes:
            return True
        return budget.max_seconds is not None and time.monotonic() - start > budget.max_seconds

    def dfs(v, tops):
        nonlocal nodes, timed_out
        if v == n:
            return True
        c = circ[v]
        f = starts[c]
        last = v == f + lengths[c] - 1
        if v == f:
            lo, hi = 1, n
            if symmetry:
                hi = n - lengths[c] + 1
                if prev_first[c] >= 0:
                    lo = max(lo, labels[prev_first[c]] + 1)
                if tail_uniform[c]:
                    s = next(y for y in range(1, n + 2) if y > n or not used[y])
                    lo, hi = max(lo, s), min(hi, s)
        else:
            lo, hi = (labels[f] + 1 if symmetry else 1), n
        for x in range(lo, hi + 1):
            if used[x]:
                continue
            new, top = [], tops
            if v != f:
                d = x - labels[v - 1]
                if abs(d) > max_mag or d in dused:
                    continue
                new.append(d)
                top += top_count >= 0 and abs(d) == max_mag
                if last:
                    e = labels[f] - x
                    if abs(e) > max_mag or e in dused or e == d:
                        continue
                    new.append(e)
                    top += top_count >= 0 and abs(e) == max_mag
                if top_count >= 0 and top > top_count:
                    continue
            elif symmetry:
                below = sum(1 for y in range(1, x) if not used[y])
                if below > len(lengths) - c - 1:
                    continue
            if over_budget():
                timed_out = True
                return False
            nodes += 1
            labels[v] = x
            used[x] = True
            dused.update(new)
            if dfs(v + 1, top):
                return True
            if timed_out:
                return False
            used[x] = False
            dused.difference_update(new)
            labels[v] = 0
        return False

    found = dfs(0, 0)
    return (list(labels) if found else None), timed_out, nodes, time.monotonic() - start


def _run(family, budget, profile, symmetry, prefix=()):
    """Returns (labels or None, timed_out, nodes, elapsed)."""
    start = time.monotonic()
    if family.n == 0:
        return [], False, 0, 0.0
    if family.n <= SMALL_N and not prefix:
        return _run_python(family, budget, profile, symmetry)
    state = _State(family, profile, symmetry, prefix)
    deadline = start + budget.max_seconds if budget.max_seconds is not None else None
    while True:
        quota = CHUNK_NODES
        if budget.max_nodes is not None:
            quota = min(quota, budget.max_nodes - state.nodes)
            if quota <= 0:
                return None, True, state.nodes, time.monotonic() - start
        status = state.step(quota)
        if status == FOUND:
            return state.solution(), False, state.nodes, time.monotonic() - start
        if status == EXHAUSTED:
            return None, False, state.nodes, time.monotonic() - start
        if deadline is not None and time.monotonic() > deadline:
            return None, True, state.nodes, time.monotonic() - start


def _run_job(args):
    return _run(*args)


def symmetry_factor(family: CircuitFamily) -> int:
    """Order of the rotation/permutation group the reduction quotients out."""
    factor = 1
    for k in family.lengths:
        factor *= k
    for m in Counter(family.lengths).values():
        factor *= math.factorial(m)
    return factor


def search_gdl(
    family: CircuitFamily,
    budget: SearchBudget = UNLIMITED,
    extra_constraint: Optional[MagnitudeProfile] = None,
    *,
    symmetry: bool = True,
    workers: int = 1,
    allow_unbounded: bool = False,
) -> Certificate:
    """Depth-first gdl search.

    Returns a ``gdl`` certificate on success, ``no-gdl`` when the (reduced)
    space was exhausted, or ``timeout`` when the budget ran out first.
    With ``workers > 1`` the space is split on the first two labels and the
    budget applies to each part separately.
    """
    if not budget.bounded and family.n > EXHAUSTION_GUARD and not allow_unbounded:
        raise StructureError(
            f"unbounded search on {family.n} vertices; give a node or time budget"
        )
    stats = {
        "search": True,
        "symmetry_reduction": symmetry,
        "symmetry_factor": symmetry_factor(family) if symmetry else 1,
        "raw_assignments": math.factorial(family.n),
    }
    if extra_constraint is not None:
        stats["profile"] = {
            "max_magnitude": extra_constraint.max_magnitude,
            "top_count": extra_constraint.top_count,
        }
    if workers > 1 and family.n >= 3:
        found, timed_out, nodes, elapsed = _parallel(family, budget, extra_constraint, symmetry, workers)
    else:
        found, timed_out, nodes, elapsed = _run(family, budget, extra_constraint, symmetry)
    stats.update(nodes=nodes, elapsed=round(elapsed, 6))

    if found is not None:
        labeling = Labeling(family, tuple(found))
        return Certificate(Certificate.GDL, family, labeling, provenance=stats)
    if timed_out:
        stats["budget"] = {"max_nodes": budget.max_nodes, "max_seconds": budget.max_seconds}
        return Certificate(Certificate.TIMEOUT, family, reason="search budget exhausted",
                           provenance=stats)
    what = "gdl" if extra_constraint is None else "gdl with the requested magnitude profile"
    return Certificate(Certificate.NO_GDL, family, reason=f"no {what} (exhaustive search)",
                       provenance=stats)


def _parallel(family, budget, profile, symmetry, workers):
    # the smallest successful prefix holds the lexicographic minimum
    n = family.n
    prefixes = [(a, b) for a in range(1, n + 1) for b in range(1, n + 1) if a != b]
    jobs = [(family, budget, profile, symmetry, p) for p in prefixes]
    start = time.monotonic()
    nodes, timed_out, best = 0, False, None
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for found, t_out, k, _ in pool.map(_run_job, jobs):
            nodes += k
            if found is not None:
                best = found
                break
            timed_out |= t_out
            if t_out and budget.canonical:
                break
        pool.shutdown(cancel_futures=True)
    return best, timed_out and best is None, nodes, time.monotonic() - start


def certify_nonexistence(family: CircuitFamily, *, override: bool = False) -> Certificate:
    """Exhaustive unlimited search; refuses families above the size guard."""
    if family.n > EXHAUSTION_GUARD and not override:
        raise StructureError(
            f"{family.n} vertices exceeds the exhaustion guard of {EXHAUSTION_GUARD}"
        )
    return search_gdl(family, UNLIMITED, allow_unbounded=True)
