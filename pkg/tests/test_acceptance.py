"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

from __future__ import annotations

import logging
import random
import time
from contextlib import contextmanager

from conftest import ACCEPTANCE_LINES

from gdl import catalog
from gdl.cli import enumerate_families
from gdl.constructions import (
    extend_with_even_circuit,
    extend_with_two_c4,
    in_construction_scope,
    label_single_circuit,
    plan_and_construct,
)
from gdl.core import Certificate, CircuitFamily, Labeling, flip_circuit, is_gdl, verify_gdl
from gdl.search import certify_nonexistence
from gdl.triangles import (
    base_table_labeling,
    build_c4_plus_n_c3,
    build_n_c3,
    case_parameters,
    classify_pairs,
)


@contextmanager
def criterion(number: int, title: str):
    start = time.monotonic()
    detail = {}
    try:
        yield detail
    except BaseException as exc:
        ACCEPTANCE_LINES.append(
            f"[{number}] FAIL {title} ({time.monotonic() - start:.2f} s): {exc}"
        )
        raise
    extra = detail.get("note", "")
    ACCEPTANCE_LINES.append(
        f"[{number}] PASS {title} ({time.monotonic() - start:.2f} s){' ' + extra if extra else ''}"
    )


def _clear_caches():
    build_n_c3.cache_clear()
    build_c4_plus_n_c3.cache_clear()


def test_1_exception_families_have_no_gdl():
    with criterion(1, "C3 and C2+C3 exhausted, < 1 s each") as d:
        notes = []
        for lengths, raw in (((3,), 6), ((2, 3), 120)):
            start = time.monotonic()
            cert = certify_nonexistence(CircuitFamily(lengths))
            elapsed = time.monotonic() - start
            assert cert.status == Certificate.NO_GDL, lengths
            assert cert.provenance["nodes"] <= raw
            assert elapsed < 1.0, f"{lengths} took {elapsed:.3f} s"
            notes.append(f"{lengths}: {cert.provenance['nodes']} nodes {elapsed:.3f} s")
        d["note"] = "; ".join(notes)


def test_2_single_circuit_sweep():
    with criterion(2, "single circuits k = 2, 4..1000 in < 5 s"):
        start = time.monotonic()
        for k in [2] + list(range(4, 1001)):
            report = verify_gdl(label_single_circuit(k))
            assert report.is_gdl, k
            if k >= 5:
                assert report.magnitude_counts.get(1, 0) == 1, k
        assert time.monotonic() - start < 5.0


def test_3_triangle_sweep():
    with criterion(3, "n triangles, n = 2..300, magnitude profile, < 30 s") as d:
        _clear_caches()
        start = time.monotonic()
        fallbacks = 0
        for n in range(2, 301):
            built = build_n_c3(n)
            report = verify_gdl(built.labeling)
            top = 3 * n - 2
            assert report.is_gdl, n
            assert report.max_magnitude <= top, n
            assert report.magnitude_counts.get(top, 0) <= 1, n
            fallbacks += built.fallback_used
        elapsed = time.monotonic() - start
        assert elapsed < 30.0, f"{elapsed:.1f} s"
        d["note"] = f"fallback activations {fallbacks}"


def test_4_c4_plus_triangles_sweep():
    with criterion(4, "C4 + n triangles, n = 1..300, < 30 s") as d:
        _clear_caches()
        start = time.monotonic()
        fallbacks = 0
        for n in range(1, 301):
            built = build_c4_plus_n_c3(n)
            assert built.labeling.family.lengths == (4,) + (3,) * n
            assert is_gdl(built.labeling), n
            fallbacks += built.fallback_used
        elapsed = time.monotonic() - start
        assert elapsed < 30.0, f"{elapsed:.1f} s"
        d["note"] = f"replay repairs {fallbacks}"


def _random_hypothesis_family(rng: random.Random) -> CircuitFamily:
    while True:
        evens = [rng.choice([2, 4, 6, 8, 10, 12, 14, 16]) for _ in range(rng.randint(0, 6))]
        if rng.random() < 0.5:
            lengths = evens + [3] * rng.randint(0, 18)
        else:
            lengths = evens + [rng.randrange(3, 40, 2)]
        rng.shuffle(lengths)
        fam = CircuitFamily(tuple(lengths))
        if lengths and fam.n <= 60 and not fam.is_exception():
            assert in_construction_scope(fam)
            return fam


class _Counter(logging.Handler):
    def __init__(self):
        super().__init__(logging.WARNING)
        self.count = 0

    def emit(self, record):
        if "fallback" in record.getMessage() or "repair" in record.getMessage():
            self.count += 1


def test_5_construction_coverage():
    with criterion(5, "1000 random families <= 60 vertices construct, fallbacks <= 5") as d:
        _clear_caches()
        handler = _Counter()
        logging.getLogger("gdl").addHandler(handler)
        try:
            rng = random.Random(20240101)
            for _ in range(1000):
                fam = _random_hypothesis_family(rng)
                cert = plan_and_construct(fam)
                assert cert.status == Certificate.GDL, str(fam)
                assert cert.labeling.family == fam and is_gdl(cert.labeling)
        finally:
            logging.getLogger("gdl").removeHandler(handler)
        assert handler.count <= 5
        d["note"] = f"fallback activations {handler.count}"


def test_6_search_matches_construction():
    with criterion(6, "all families <= 11 vertices: search agrees with construction, < 10 min") as d:
        start = time.monotonic()
        no_gdl = []
        families = list(enumerate_families(11))
        for fam in families:
            found = certify_nonexistence(fam)
            built = plan_and_construct(fam)
            if built.status == Certificate.GDL:
                assert found.status == Certificate.GDL, str(fam)
            if found.status == Certificate.NO_GDL:
                no_gdl.append(fam.lengths)
                assert built.exception_family, str(fam)
        assert sorted(no_gdl) == [(2, 3), (3,)]
        assert time.monotonic() - start < 600
        d["note"] = f"{len(families)} families"


def test_7_extension_chains():
    with criterion(7, "200 random extension chains verify, new magnitudes > |V|"):
        rng = random.Random(7)
        for _ in range(200):
            g = label_single_circuit(rng.choice([2] + list(range(4, 30))))
            for _ in range(rng.randint(1, 8)):
                old = g.n
                if rng.random() < 0.4:
                    g = extend_with_two_c4(g)
                else:
                    g = extend_with_even_circuit(g, rng.choice([2, 6, 8, 10, 12, 14]))
                assert is_gdl(g)
                dls = g.difference_labels()
                assert all(abs(x) > old for x in dls[old:])


def _random_labeling(rng: random.Random) -> Labeling:
    lengths = [rng.randint(2, 12) for _ in range(rng.randint(1, 8))]
    labels = list(range(1, sum(lengths) + 1))
    rng.shuffle(labels)
    return Labeling(CircuitFamily(tuple(lengths)), tuple(labels))


def test_8_property_suite():
    with criterion(8, "flip/negation/s+m=-b/telescoping on >= 1000 instances each") as d:
        rng = random.Random(8)
        for _ in range(1000):
            lab = _random_labeling(rng)
            c = rng.randrange(lab.family.num_circuits)
            flipped = flip_circuit(lab, c)
            assert flip_circuit(flipped, c) == lab
            r = lab.family.circuit_vertices(c)
            before = lab.difference_labels()[r.start:r.stop]
            after = flipped.difference_labels()[r.start:r.stop]
            assert sorted(after) == sorted(-x for x in before)
        for _ in range(1000):
            lab = _random_labeling(rng)
            dls = lab.difference_labels()
            for c in range(lab.family.num_circuits):
                r = lab.family.circuit_vertices(c)
                assert sum(dls[r.start:r.stop]) == 0
        members = 0
        for _ in range(1000):
            n = rng.randint(10, 120)
            p = case_parameters(n)
            lab = base_table_labeling(p, build_n_c3(p.t).labeling)
            for tri in rng.sample(range(p.main_count), rng.randint(0, p.main_count)):
                lab = flip_circuit(lab, tri)
            for pair in classify_pairs(lab, p):
                for m in pair.members:
                    assert m.small + m.medium == -m.big
                    members += 1
        d["note"] = f"{members} classified members"


def test_9_catalog(tmp_path):
    with criterion(9, "catalog: 15 entries, profiles hold, deterministic, bit-exact JSON"):
        first = catalog.generate_catalog(tmp_path / "a.json")
        second = catalog.generate_catalog(tmp_path / "b.json")
        assert len(first) == 15
        assert all(e.check() for e in first)
        assert first == second
        raw_a = (tmp_path / "a.json").read_bytes()
        assert raw_a == (tmp_path / "b.json").read_bytes()
        catalog.save_catalog(catalog.load_catalog(tmp_path / "a.json"), tmp_path / "c.json")
        assert (tmp_path / "c.json").read_bytes() == raw_a
        bundled = catalog.default_catalog_path()
        if bundled.exists():
            assert bundled.read_bytes() == raw_a
