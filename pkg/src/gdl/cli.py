"""Command-line front end.

    gdl construct 3,3,4            build (or search) a gdl, print a certificate
    gdl verify labeling.json       check a labeling file
    gdl search 2*C3+C5             exhaustive search under a budget
    gdl catalog [--regenerate]     show or rebuild the base-case catalog
    gdl survey --max-vertices 11   try every family up to a size

Exit codes: 0 gdl, 2 known non-existence (or a failed verify), 3 unsupported
or timeout, 1 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Optional, Sequence

from . import catalog
from .constructions import plan_and_construct
from .core import Certificate, CircuitFamily, Labeling, StructureError, verify_gdl
from .search import MagnitudeProfile, SearchBudget, search_gdl

EXIT_OK, EXIT_INPUT, EXIT_NONE, EXIT_OPEN = 0, 1, 2, 3

SURVEY_SECONDS = 10.0
SURVEY_NODES = 10**8

_TERM = re.compile(r"^(?:(\d+)\*)?C(\d+)$")


def parse_family(text: str) -> CircuitFamily:
    """Parse "3,3,4" or "2*C3+C4" into a family (order preserved)."""
    s = text.replace(" ", "")
    if not s:
        raise StructureError("empty family")
    if re.fullmatch(r"\d+(,\d+)*", s):
        return CircuitFamily(tuple(int(x) for x in s.split(",")))
    lengths: list[int] = []
    for term in s.split("+"):
        m = _TERM.match(term)
        if m is None:
            raise StructureError(f"cannot parse family term {term!r}")
        count = int(m.group(1)) if m.group(1) else 1
        if count < 1:
            raise StructureError(f"multiplicity must be positive in {term!r}")
        lengths += [int(m.group(2))] * count
    return CircuitFamily(tuple(lengths))


def _partitions(total: int, smallest: int) -> Iterator[tuple[int, ...]]:
    if total == 0:
        yield ()
        return
    for first in range(smallest, total + 1):
        rest = total - first
        if rest == 0 or rest >= first:
            for tail in _partitions(rest, first):
                yield (first,) + tail


def enumerate_families(max_vertices: int) -> Iterator[CircuitFamily]:
    """Multisets of lengths >= 2, by total then lexicographically."""
    for total in range(2, max_vertices + 1):
        for parts in sorted(_partitions(total, 2)):
            yield CircuitFamily(parts)


def exit_code(cert: Certificate) -> int:
    if cert.status == Certificate.GDL:
        return EXIT_OK
    if cert.status == Certificate.NO_GDL or cert.exception_family:
        return EXIT_NONE
    return EXIT_OPEN


# --- survey -----------------------------------------------------------------

@dataclass
class SurveyRow:
    family: tuple[int, ...]
    status: str          # constructed, searched-found, no-gdl, open-timeout, exception
    max_magnitude: Optional[int]
    elapsed: float
    labels: Optional[list[int]] = None

    def to_json(self) -> dict:
        return {
            "family": list(self.family),
            "status": self.status,
            "max_magnitude": self.max_magnitude,
            "elapsed": round(self.elapsed, 6),
            "labels": self.labels,
        }


@dataclass
class SurveyReport:
    max_vertices: int
    rows: list[SurveyRow] = field(default_factory=list)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.rows:
            out[r.status] = out.get(r.status, 0) + 1
        return dict(sorted(out.items()))

    def counterexamples(self) -> list[tuple[int, ...]]:
        """No-gdl rows outside the two known exceptions."""
        return [r.family for r in self.rows
                if r.status == "no-gdl" and not CircuitFamily(r.family).is_exception()]

    def to_json(self) -> dict:
        return {
            "max_vertices": self.max_vertices,
            "summary": self.counts(),
            "counterexamples": [list(f) for f in self.counterexamples()],
            "rows": [r.to_json() for r in self.rows],
        }


def survey_row(family: CircuitFamily, budget: SearchBudget) -> SurveyRow:
    start = time.monotonic()
    cert = plan_and_construct(family, budget)
    elapsed = time.monotonic() - start
    if cert.status == Certificate.GDL:
        status = "searched-found" if cert.provenance.get("search") else "constructed"
        return SurveyRow(family.lengths, status, verify_gdl(cert.labeling).max_magnitude,
                         elapsed, list(cert.labeling.labels))
    if cert.exception_family:
        status = "exception"
    elif cert.status == Certificate.NO_GDL:
        status = "no-gdl"
    else:
        status = "open-timeout"
    return SurveyRow(family.lengths, status, None, elapsed)


def _survey_job(args):
    return survey_row(*args)


def run_survey(max_vertices: int, budget: SearchBudget, workers: int = 1) -> SurveyReport:
    if max_vertices < 2:
        raise StructureError("max_vertices must be >= 2")
    jobs = [(f, budget) for f in enumerate_families(max_vertices)]
    report = SurveyReport(max_vertices)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            report.rows = list(pool.map(_survey_job, jobs))
    else:
        report.rows = [survey_row(*job) for job in jobs]
    return report


# --- output -----------------------------------------------------------------

def _emit(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj, ensure_ascii=False) + "\n")


def _labeling_text(lab: Labeling) -> list[str]:
    lines = []
    diffs = lab.difference_labels()
    pos = 0
    for i, block in enumerate(lab.circuits()):
        d = diffs[pos:pos + len(block)]
        pos += len(block)
        lines.append(f"  C{len(block)} #{i}: labels {' '.join(map(str, block))}"
                     f"  | dls {' '.join(map(str, d))}")
    return lines


def _certificate_text(cert: Certificate) -> str:
    lines = [f"family  {cert.family}", f"status  {cert.status}"]
    if cert.reason:
        lines.append(f"reason  {cert.reason}")
    if cert.labeling is not None:
        lines += _labeling_text(cert.labeling)
    plan = cert.provenance.get("plan")
    if plan:
        lines.append(f"plan    {plan['base']} + {', '.join(plan['extensions']) or 'nothing'}")
    if "nodes" in cert.provenance:
        lines.append(f"search  {cert.provenance['nodes']} nodes, {cert.provenance['elapsed']} s")
    return "\n".join(lines) + "\n"


def _report_text(report) -> str:
    lines = [f"gdl        {report.is_gdl}", f"bijection  {report.is_bijection}",
             f"dls        {' '.join(map(str, report.difference_labels))}",
             f"max |dl|   {report.max_magnitude}"]
    if report.duplicate_pairs:
        lines.append("duplicates " + " ".join(f"{a}/{b}" for a, b in report.duplicate_pairs))
    return "\n".join(lines) + "\n"


def _survey_text(report: SurveyReport) -> str:
    lines = [f"{'family':<24} {'status':<15} {'max|dl|':>7} {'seconds':>9}"]
    for r in report.rows:
        mm = "-" if r.max_magnitude is None else str(r.max_magnitude)
        fam = ",".join(map(str, r.family))
        lines.append(f"{fam:<24} {r.status:<15} {mm:>7} {r.elapsed:>9.3f}")
    lines.append("summary  " + ", ".join(f"{k}={v}" for k, v in report.counts().items()))
    bad = report.counterexamples()
    if bad:
        lines.append("COUNTEREXAMPLES  " + "; ".join(",".join(map(str, f)) for f in bad))
    return "\n".join(lines) + "\n"


# --- commands ---------------------------------------------------------------

def _budget(args, default_seconds=None, default_nodes=None) -> SearchBudget:
    seconds = args.budget_seconds if args.budget_seconds is not None else default_seconds
    nodes = args.budget_nodes if args.budget_nodes is not None else default_nodes
    return SearchBudget(max_nodes=nodes, max_seconds=seconds, canonical=args.canonical)


def cmd_construct(args) -> int:
    family = parse_family(args.family)
    budget = _budget(args, SURVEY_SECONDS, SURVEY_NODES) if args.search else None
    cert = plan_and_construct(family, budget)
    if args.text:
        sys.stdout.write(_certificate_text(cert))
    else:
        _emit(cert.to_json())
    return exit_code(cert)


def cmd_verify(args) -> int:
    try:
        text = sys.stdin.read() if args.file == "-" else Path(args.file).read_text(encoding="utf-8")
        lab = Labeling.from_json(json.loads(text))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = verify_gdl(lab)
    if args.text:
        sys.stdout.write(_report_text(report))
    else:
        _emit(report.to_json())
    return EXIT_OK if report.is_gdl else EXIT_NONE


def cmd_search(args) -> int:
    family = parse_family(args.family)
    profile = MagnitudeProfile.triangle_recursion(family.num_circuits) if args.profile == "lemma7" else None
    cert = search_gdl(family, _budget(args), profile, workers=args.workers,
                      allow_unbounded=args.unbounded)
    if args.text:
        sys.stdout.write(_certificate_text(cert))
    else:
        _emit(cert.to_json())
    return exit_code(cert)


def cmd_catalog(args) -> int:
    path = Path(args.catalog_path) if args.catalog_path else catalog.default_catalog_path()
    if args.regenerate:
        entries = catalog.generate_catalog(path, workers=args.workers)
    else:
        try:
            entries = catalog.load_catalog(path)
        except StructureError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_NONE
    if args.text:
        for e in entries:
            fam = ",".join(map(str, e.family))
            sys.stdout.write(f"{fam:<22} {e.profile:<7} {' '.join(map(str, e.labels))}\n")
    else:
        _emit({"path": str(path), "entries": [e.to_json() for e in entries]})
    return EXIT_OK


def cmd_survey(args) -> int:
    budget = _budget(args, SURVEY_SECONDS, SURVEY_NODES)
    report = run_survey(args.max_vertices, budget, workers=args.workers)
    doc = report.to_json()
    if args.output:
        Path(args.output).write_text(json.dumps(doc, ensure_ascii=False) + "\n", encoding="utf-8")
    if args.text:
        sys.stdout.write(_survey_text(report))
    elif not args.output:
        _emit(doc)
    bad = report.counterexamples()
    if bad:
        print(f"WARNING: no-gdl families besides C3 and C2+C3: {bad}", file=sys.stderr)
        return EXIT_NONE
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    fmt = shared.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="text", action="store_false", help="JSON output (default)")
    fmt.add_argument("--text", dest="text", action="store_true", help="human-readable tables")
    shared.set_defaults(text=False)
    shared.add_argument("--budget-seconds", type=float, default=None)
    shared.add_argument("--budget-nodes", type=int, default=None)
    shared.add_argument("--canonical", action=argparse.BooleanOptionalAction, default=True,
                        help="return the lexicographically smallest labeling (default on)")
    shared.add_argument("--catalog-path", default=None,
                        help="catalog JSON file (else $GDL_CATALOG, else the bundled file)")
    shared.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="gdl", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", parents=[shared], help="build a gdl for a family")
    p.add_argument("family", help='e.g. "3,3,4" or "2*C3+C4"')
    p.add_argument("--search", action="store_true",
                   help="fall back to search outside the constructive coverage")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("verify", parents=[shared], help="verify a labeling JSON file")
    p.add_argument("file", help='path, or "-" for stdin')
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("search", parents=[shared], help="exhaustive search")
    p.add_argument("family")
    p.add_argument("--profile", choices=("plain", "lemma7"), default="plain",
                   help="lemma7: triangles only; no magnitude above 3n-2, at most one arc at 3n-2")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--unbounded", action="store_true",
                   help="allow an unbudgeted search above 12 vertices")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("catalog", parents=[shared], help="show or regenerate the catalog")
    p.add_argument("--regenerate", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("survey", parents=[shared], help="try every family up to a size")
    p.add_argument("--max-vertices", type=int, required=True)
    p.add_argument("--output", default=None, help="write the report JSON here")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_survey)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.catalog_path:
        catalog.set_catalog_path(args.catalog_path)
    try:
        return args.func(args)
    except StructureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
