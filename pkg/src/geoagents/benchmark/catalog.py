"""The benchmark case catalog and its manifest."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema

from ..errors import GeoError
from .checks import Check

LEVELS = ("Basic", "Intermediate", "Advanced")
LEVEL_PREFIX = {"B": "Basic", "I": "Intermediate", "A": "Advanced"}


class CatalogError(GeoError):
    code = "catalog_error"


@dataclass(frozen=True)
class BenchmarkCase:
    id: str
    level: str
    prompt: str
    inputs: tuple  # absolute dataset paths
    checks: tuple
    plans: dict = field(default_factory=dict)  # worker kind -> plan path
    remote: dict = field(default_factory=dict)  # url -> absolute fixture path
    implementable: bool = True
    provenance: str = "synthetic"
    note: str = ""

    @property
    def number(self) -> int:
        return int(self.id.split("-")[1])


def manifest_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("manifest.schema.json").read_text(encoding="utf-8"))


def stock_manifest_path() -> Path:
    return Path(str(resources.files(__package__).joinpath("data", "manifest.json")))


def _parse(doc, base: Path) -> list[BenchmarkCase]:
    try:
        jsonschema.validate(doc, manifest_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "(root)"
        raise CatalogError(f"manifest schema violation at {where}: {exc.message}") from exc
    data_dir = base / doc.get("dataset_dir", ".")
    cases, seen = [], set()
    for raw in doc["cases"]:
        cid = raw["id"]
        if cid in seen:
            raise CatalogError(f"duplicate case id {cid}")
        seen.add(cid)
        if LEVEL_PREFIX[cid[0]] != raw["level"]:
            raise CatalogError(f"case {cid}: id prefix does not match level {raw['level']}")
        inputs = []
        for name in raw["inputs"]:
            p = (data_dir / name).resolve()
            if not p.is_file():
                raise CatalogError(f"case {cid}: missing dataset {name}")
            inputs.append(p)
        remote = {}
        for url, rel in raw.get("remote", {}).items():
            p = (base / rel).resolve()
            if not p.is_file():
                raise CatalogError(f"case {cid}: missing remote fixture {rel}")
            remote[url] = p
        plans = {kind: (base / rel).resolve() for kind, rel in raw.get("plan", {}).items()}
        try:
            checks = tuple(Check.from_json(c) for c in raw["checks"])
        except (GeoError, TypeError) as exc:
            raise CatalogError(f"case {cid}: bad check: {exc}") from exc
        cases.append(BenchmarkCase(cid, raw["level"], raw["prompt"], tuple(inputs), checks, plans, remote,
                                   raw.get("implementable", True), raw.get("provenance", "synthetic"),
                                   raw.get("note", "")))
    return cases


def load_catalog(path: str | Path | None = None) -> list[BenchmarkCase]:
    """Cases of a manifest (the shipped one by default), in manifest order."""
    path = Path(path) if path is not None else stock_manifest_path()
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise CatalogError(f"cannot read manifest {path}: {exc}") from exc
    return _parse(doc, path.parent)


def attempts_tables(path: str | Path | None = None) -> dict:
    """Level -> attempts CSV path declared by a manifest."""
    path = Path(path) if path is not None else stock_manifest_path()
    doc = json.loads(path.read_text(encoding="utf-8"))
    return {lvl: (path.parent / rel).resolve() for lvl, rel in doc.get("attempts", {}).items()}


@dataclass(frozen=True)
class CaseStudy:
    name: str
    goal: str
    inputs: tuple  # absolute dataset paths
    plan: Path
    expected_rounds: int
    expected_outcome: str


def load_case_studies(path: str | Path | None = None) -> list[CaseStudy]:
    """Worked examples shipped next to the stock manifest, in index order."""
    root = stock_manifest_path().parent
    path = Path(path) if path is not None else root / "case_studies" / "index.json"
    try:
        entries = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise CatalogError(f"cannot read case-study index {path}: {exc}") from exc
    data_dir = root / "datasets"
    return [CaseStudy(e["name"], e["goal"], tuple((data_dir / i).resolve() for i in e["inputs"]),
                      (path.parent / e["plan"]).resolve(), e["expected_rounds"], e["expected_outcome"])
            for e in entries]


def level_counts(cases) -> dict:
    return {lvl: sum(1 for c in cases if c.level == lvl) for lvl in LEVELS}


__all__ = ["BenchmarkCase", "CaseStudy", "CatalogError", "LEVELS", "attempts_tables", "level_counts", "load_case_studies", "load_catalog",
           "manifest_schema", "stock_manifest_path"]
