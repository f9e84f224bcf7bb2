from __future__ import annotations

import json
from collections import Counter

import pytest

from gdl.cli import enumerate_families, main, parse_family, run_survey
from gdl.core import CircuitFamily, StructureError
from gdl.search import SearchBudget

# partitions of n into parts >= 2 (OEIS A002865), n = 2..15
PARTS_GE2 = [1, 1, 2, 2, 4, 4, 7, 8, 12, 14, 21, 24, 34, 41]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "text, lengths",
    [
        ("3,3,4", (3, 3, 4)),
        ("2*C3+C4", (3, 3, 4)),
        ("C3", (3,)),
        ("C2 + 3*C5", (2, 5, 5, 5)),
        ("7", (7,)),
    ],
)
def test_parse_family(text, lengths):
    assert parse_family(text).lengths == lengths


@pytest.mark.parametrize("text", ["", "3,", "C", "2*3", "3,x", "0*C3", "C1", "3+C2", "C3++C4"])
def test_parse_family_rejects(text):
    with pytest.raises(StructureError):
        parse_family(text)


def test_enumeration_counts_and_order():
    fams = list(enumerate_families(15))
    by_total = Counter(f.n for f in fams)
    assert [by_total[n] for n in range(2, 16)] == PARTS_GE2
    keys = [(f.n, f.lengths) for f in fams]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)
    assert all(list(f.lengths) == sorted(f.lengths) for f in fams)


def test_construct_exit_codes(capsys):
    code, out, _ = run(capsys, "construct", "3,3")
    assert code == 0 and json.loads(out)["status"] == "gdl"
    code, out, _ = run(capsys, "construct", "C3")
    assert code == 2 and "C3 has no gdl" in json.loads(out)["reason"]
    code, _, _ = run(capsys, "construct", "C2+C3")
    assert code == 2
    code, out, _ = run(capsys, "construct", "3,5")
    assert code == 3
    code, out, _ = run(capsys, "construct", "3,5", "--search")
    assert code == 0 and json.loads(out)["provenance"]["search"]
    code, _, err = run(capsys, "construct", "3,y")
    assert code == 1 and "error" in err


def test_construct_timeout_exit(capsys):
    code, out, _ = run(capsys, "construct", "5,5,7", "--search", "--budget-nodes", "10")
    assert code == 3 and json.loads(out)["status"] == "timeout"


def test_construct_text(capsys):
    code, out, _ = run(capsys, "construct", "2*C3+C4", "--text")
    assert code == 0
    assert "status  gdl" in out and "C4 #2" in out


def test_printed_labelings_verify(capsys, tmp_path):
    for text in ["2,2,3", "3*C3+C4", "5,4,4,2", "9,6", "3,3,3,3,3,3,3,3,3,3,3"]:
        code, out, _ = run(capsys, "construct", text)
        assert code == 0
        path = tmp_path / "lab.json"
        path.write_text(json.dumps(json.loads(out)["labeling"]), encoding="utf-8")
        code, out, _ = run(capsys, "verify", str(path))
        assert code == 0 and json.loads(out)["is_gdl"]


def test_verify_exit_codes(capsys, tmp_path):
    good = tmp_path / "good.json"
    good.write_text('{"circuits": [2, 2, 3], "labels": [1, 6, 3, 7, 2, 4, 5]}', encoding="utf-8")
    assert run(capsys, "verify", str(good))[0] == 0
    bad = tmp_path / "c3.json"
    bad.write_text('{"circuits": [3], "labels": [1, 2, 3]}', encoding="utf-8")
    code, out, _ = run(capsys, "verify", str(bad))
    assert code == 2 and json.loads(out)["duplicate_pairs"] == [[0, 1]]
    cut = tmp_path / "cut.json"
    cut.write_text('{"circuits": [3], "lab', encoding="utf-8")
    assert run(capsys, "verify", str(cut))[0] == 1
    assert run(capsys, "verify", str(tmp_path / "missing.json"))[0] == 1


def test_search_command(capsys):
    code, out, _ = run(capsys, "search", "3,3,3", "--profile", "lemma7")
    assert code == 0
    assert json.loads(out)["labeling"]["labels"] == [1, 2, 8, 3, 5, 9, 4, 7, 6]
    code, out, _ = run(capsys, "search", "C2+C3")
    assert code == 2 and json.loads(out)["status"] == "no-gdl"
    code, _, err = run(capsys, "search", "3,3,3,3,3")
    assert code == 1 and "budget" in err


def test_catalog_command(capsys):
    code, out, _ = run(capsys, "catalog")
    assert code == 0 and len(json.loads(out)["entries"]) == 15
    code, out, _ = run(capsys, "catalog", "--text")
    assert code == 0 and len(out.strip().splitlines()) == 15


def test_catalog_command_bad_file(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("[]", encoding="utf-8")
    code, _, err = run(capsys, "catalog", "--catalog-path", str(path))
    from gdl import catalog

    catalog.set_catalog_path(None)
    assert code == 2 and "error" in err


def test_survey_small():
    report = run_survey(5, SearchBudget(max_seconds=10.0))
    rows = {r.family: r.status for r in report.rows}
    assert rows == {
        (2,): "constructed", (3,): "exception", (4,): "constructed",
        (2, 2): "constructed", (5,): "constructed", (2, 3): "exception",
    }
    assert [r.family for r in run_survey(2, SearchBudget(max_seconds=1.0)).rows] == [(2,)]


def test_survey_eleven(capsys, tmp_path):
    out_path = tmp_path / "survey.json"
    code, _, _ = run(capsys, "survey", "--max-vertices", "11", "--output", str(out_path))
    assert code == 0
    doc = json.loads(out_path.read_text(encoding="utf-8"))
    assert doc["counterexamples"] == []
    assert doc["summary"]["exception"] == 2
    for row in doc["rows"]:
        assert row["status"] in {"constructed", "searched-found", "exception"}
        if row["labels"] is not None:
            from gdl.core import Labeling, is_gdl

            assert is_gdl(Labeling(CircuitFamily(tuple(row["family"])), tuple(row["labels"])))


def test_survey_text(capsys):
    code, out, _ = run(capsys, "survey", "--max-vertices", "6", "--text")
    assert code == 0 and "summary" in out and "3,3" in out


def test_survey_flags_counterexamples():
    from gdl.cli import SurveyReport, SurveyRow

    report = SurveyReport(5, [SurveyRow((3,), "no-gdl", None, 0.0), SurveyRow((5,), "no-gdl", None, 0.0)])
    assert report.counterexamples() == [(5,)]
    assert report.to_json()["counterexamples"] == [[5]]
