"""Search-generated base cases used by the triangle constructions.

Entries cover n triangles for n = 2..9 (with the magnitude profile the
recursion needs) and a 4-circuit plus n triangles for n = 2..8.  The file
is plain JSON; a missing or corrupt file is regenerated by search.
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Optional, Union

from .core import CircuitFamily, Labeling, StructureError, UnsupportedError, verify_gdl
from .search import MagnitudeProfile, SearchBudget, search_gdl

log = logging.getLogger(__name__)

GENERATOR_VERSION = "1.0.0"
ENV_VAR = "GDL_CATALOG"
PROFILES = ("lemma7", "plain")


@dataclass(frozen=True)
class CatalogEntry:
    family: tuple[int, ...]
    labels: tuple[int, ...]
    profile: str
    generator: str = GENERATOR_VERSION

    @property
    def labeling(self) -> Labeling:
        return Labeling(CircuitFamily(self.family), self.labels)

    def constraint(self) -> Optional[MagnitudeProfile]:
        if self.profile == "lemma7":
            return MagnitudeProfile.triangle_recursion(len(self.family))
        return None

    def check(self) -> bool:
        if self.profile not in PROFILES:
            return False
        try:
            lab = self.labeling
        except StructureError:
            return False
        if not verify_gdl(lab).is_gdl:
            return False
        profile = self.constraint()
        return profile is None or profile.admits(lab)

    def to_json(self) -> dict:
        return {
            "family": list(self.family),
            "labels": list(self.labels),
            "profile": self.profile,
            "generator": self.generator,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CatalogEntry":
        try:
            return cls(tuple(obj["family"]), tuple(obj["labels"]), obj["profile"], obj["generator"])
        except (KeyError, TypeError) as exc:
            raise StructureError(f"bad catalog entry: {obj!r}") from exc


def catalog_specs() -> list[tuple[tuple[int, ...], str]]:
    specs = [((3,) * n, "lemma7") for n in range(2, 10)]
    specs += [((4,) + (3,) * n, "plain") for n in range(2, 9)]
    return specs


def generate_catalog(path: Union[str, Path, None] = None, workers: int = 1) -> list[CatalogEntry]:
    """Search every base case (canonical, so the output is deterministic)."""
    entries = []
    for family, profile in catalog_specs():
        fam = CircuitFamily(family)
        constraint = MagnitudeProfile.triangle_recursion(len(family)) if profile == "lemma7" else None
        cert = search_gdl(fam, SearchBudget(canonical=True), constraint,
                          workers=workers, allow_unbounded=True)
        if cert.labeling is None:
            raise UnsupportedError(f"catalog search failed for {fam}: {cert.status}")
        entries.append(CatalogEntry(family, cert.labeling.labels, profile))
        log.info("catalog: %s (%s) after %s nodes", fam, profile, cert.provenance.get("nodes"))
    if path is not None:
        save_catalog(entries, path)
    return entries


def dumps_catalog(entries: list[CatalogEntry]) -> str:
    return json.dumps([e.to_json() for e in entries], indent=1) + "\n"


def save_catalog(entries: list[CatalogEntry], path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_catalog(entries), encoding="utf-8")


def load_catalog(path: Union[str, Path]) -> list[CatalogEntry]:
    """Read and verify a catalog file; raises StructureError on any defect."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise StructureError(f"cannot read catalog {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise StructureError("catalog must be a JSON array")
    entries = [CatalogEntry.from_json(obj) for obj in raw]
    bad = [e.family for e in entries if not e.check()]
    if bad:
        raise StructureError(f"catalog entries fail verification: {bad}")
    have = {(e.family, e.profile) for e in entries}
    missing = [s for s in catalog_specs() if s not in have]
    if missing:
        raise StructureError(f"catalog lacks entries: {missing}")
    return entries


def default_catalog_path() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(__file__).with_name("data") / "catalog.json"


_override: Optional[Path] = None


def set_catalog_path(path: Union[str, Path, None]) -> None:
    """Point lookups at another file (the CLI's --catalog-path)."""
    global _override
    _override = Path(path) if path is not None else None
    _index.cache_clear()


@lru_cache(maxsize=None)
def _index(path: Path) -> dict[tuple[tuple[int, ...], str], Labeling]:
    try:
        entries = load_catalog(path)
    except StructureError as exc:
        log.warning("regenerating catalog (%s)", exc)
        entries = generate_catalog()
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            save_catalog(entries, path)
        except OSError:
            log.warning("could not write catalog to %s", path)
    return {(e.family, e.profile): e.labeling for e in entries}


def lookup(family: tuple[int, ...], profile: str) -> Labeling:
    path = _override or default_catalog_path()
    index = _index(path)
    try:
        return index[(tuple(family), profile)]
    except KeyError:
        raise UnsupportedError(f"no catalog entry for {family} ({profile})") from None
