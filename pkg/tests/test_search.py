from __future__ import annotations

import itertools

import pytest

from gdl.core import Certificate, CircuitFamily, Labeling, StructureError, is_gdl
from gdl.search import (
    MagnitudeProfile,
    SearchBudget,
    certify_nonexistence,
    search_gdl,
    symmetry_factor,
)


def _canonical_form(lab: Labeling) -> tuple:
    # rotate each circuit to its minimum; equal-length circuits by increasing minimum
    blocks = []
    for block in lab.circuits():
        i = block.index(min(block))
        blocks.append(block[i:] + block[:i])
    pools = {}
    for b in sorted(blocks):
        pools.setdefault(len(b), []).append(b)
    out = []
    for k in lab.family.lengths:
        out.extend(pools[k].pop(0))
    return tuple(out)


def _brute(lengths, profile=None):
    family = CircuitFamily(tuple(lengths))
    found = []
    for perm in itertools.permutations(range(1, family.n + 1)):
        lab = Labeling(family, perm)
        if is_gdl(lab) and (profile is None or profile.admits(lab)):
            found.append(lab)
    return found


@pytest.mark.parametrize("lengths", [(3,), (2, 3)])
def test_exceptions_exhausted(lengths):
    cert = certify_nonexistence(CircuitFamily(lengths))
    assert cert.status == Certificate.NO_GDL
    assert cert.provenance["nodes"] <= cert.provenance["raw_assignments"]


@pytest.mark.parametrize(
    "lengths",
    [(2,), (4,), (5,), (2, 2), (3, 3), (2, 4), (3, 4), (2, 2, 3), (3, 5), (2, 2, 2), (6,), (2, 5)],
)
def test_first_solution_is_smallest_canonical_form(lengths):
    cert = search_gdl(CircuitFamily(lengths))
    solutions = _brute(lengths)
    assert (cert.status == Certificate.GDL) == bool(solutions)
    if solutions:
        forms = sorted({_canonical_form(s) for s in solutions})
        assert cert.labeling.labels == forms[0]


def test_profile_respected():
    profile = MagnitudeProfile.triangle_recursion(2)
    cert = search_gdl(CircuitFamily.of(3, 3), extra_constraint=profile)
    assert profile.admits(cert.labeling)
    assert any(profile.admits(s) for s in _brute((3, 3), profile))


def test_profile_can_make_search_fail():
    cert = search_gdl(CircuitFamily.of(2, 2), extra_constraint=MagnitudeProfile(1, 1))
    assert cert.status == Certificate.NO_GDL


@pytest.mark.parametrize("lengths", [(3, 3, 3), (2, 3, 4), (4, 5), (3, 3, 4)])
def test_symmetry_reduction_preserves_existence(lengths):
    fam = CircuitFamily(lengths)
    a = search_gdl(fam)
    b = search_gdl(fam, symmetry=False)
    assert a.status == b.status == Certificate.GDL
    assert b.provenance["nodes"] >= a.provenance["nodes"]


def test_node_budget_times_out():
    cert = search_gdl(CircuitFamily((3,) * 9), SearchBudget(max_nodes=50),
                      MagnitudeProfile.triangle_recursion(9))
    assert cert.status == Certificate.TIMEOUT
    assert cert.provenance["nodes"] <= 50


def test_unbounded_guard():
    with pytest.raises(StructureError):
        search_gdl(CircuitFamily((3,) * 5))
    with pytest.raises(StructureError):
        certify_nonexistence(CircuitFamily((3,) * 5))


def test_parallel_matches_serial():
    fam = CircuitFamily((3,) * 5)
    budget = SearchBudget(max_nodes=10**7)
    a = search_gdl(fam, budget, MagnitudeProfile.triangle_recursion(5))
    b = search_gdl(fam, budget, MagnitudeProfile.triangle_recursion(5), workers=2)
    assert a.labeling == b.labeling


def test_symmetry_factor():
    assert symmetry_factor(CircuitFamily.of(3, 3, 4)) == 3 * 3 * 4 * 2


def test_empty_family():
    assert search_gdl(CircuitFamily(())).status == Certificate.GDL


def test_python_engine_matches_kernel():
    from gdl import search
    from gdl.cli import enumerate_families

    for fam in enumerate_families(9):
        for symmetry in (True, False):
            for profile in (None, MagnitudeProfile(max(fam.n - 2, 1), 1)):
                found, _, nodes, _ = search._run_python(fam, search.UNLIMITED, profile, symmetry)
                state = search._State(fam, profile, symmetry)
                status = state.step(10**9)
                assert found == (state.solution() if status == search.FOUND else None)
                assert nodes == state.nodes


def test_python_engine_budget():
    from gdl import search

    fam = CircuitFamily.of(2, 2, 3)
    _, timed_out, nodes, _ = search._run_python(fam, SearchBudget(max_nodes=3), None, True)
    assert timed_out and nodes == 3
