"""Session manifests: which files make up which areas, and how areas group into domains.

A manifest is a JSON document::

    {
      "seed": 7,
      "output_dir": "out",
      "areas": {
        "social networks": {"path": "data/social.txt", "format": "wos-plain"},
        "swarming": {"path": "data/swarm.csv", "format": "csv",
                     "options": {"authors_column": "AU", "separator": ";"}}
      },
      "domains": {"complexity": ["social networks", "swarming"]}
    }

Relative paths are resolved against the manifest's own directory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigurationError
from .ingest import SOURCE_FORMATS

CSV_OPTIONS = ("authors_column", "separator", "title_column", "year_column", "delimiter")


@dataclass(frozen=True)
class AreaSource:
    path: str
    format: str
    options: dict = field(default_factory=dict)


@dataclass
class SessionManifest:
    areas: dict[str, AreaSource]
    domains: dict[str, list[str]]
    seed: int = 0
    output_dir: str = "out"
    base_dir: Path = field(default=Path("."), compare=False)

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name, src in self.areas.items():
            if not name:
                raise ConfigurationError("area names must be non-empty")
            if src.format not in SOURCE_FORMATS:
                raise ConfigurationError(f"area {name!r}: unknown format {src.format!r}")
            unknown = set(src.options) - set(CSV_OPTIONS)
            if unknown:
                raise ConfigurationError(f"area {name!r}: unknown options {sorted(unknown)}")
        for domain, members in self.domains.items():
            missing = [a for a in members if a not in self.areas]
            if missing:
                raise ConfigurationError(f"domain {domain!r} references undeclared areas {missing}")
            if len(set(members)) != len(members):
                raise ConfigurationError(f"domain {domain!r} lists an area twice")

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p

    def domain(self, name: str) -> list[str]:
        try:
            return list(self.domains[name])
        except KeyError:
            raise ConfigurationError(f"unknown domain {name!r}") from None

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "output_dir": self.output_dir,
            "areas": {
                name: {"path": s.path, "format": s.format, **({"options": dict(s.options)} if s.options else {})}
                for name, s in self.areas.items()
            },
            "domains": {name: list(members) for name, members in self.domains.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, doc: dict, base_dir: Path = Path(".")) -> "SessionManifest":
        try:
            areas = {
                name: AreaSource(d["path"], d["format"], dict(d.get("options", {})))
                for name, d in doc["areas"].items()
            }
            domains = {name: list(members) for name, members in doc.get("domains", {}).items()}
            return cls(areas, domains, int(doc.get("seed", 0)), doc.get("output_dir", "out"), Path(base_dir))
        except (KeyError, TypeError, AttributeError) as exc:
            raise ConfigurationError(f"malformed manifest: {exc!r}") from None

    @classmethod
    def from_json(cls, text: str, base_dir: Path = Path(".")) -> "SessionManifest":
        def no_duplicates(pairs):
            keys = [k for k, _ in pairs]
            dupes = sorted({k for k in keys if keys.count(k) > 1})
            if dupes:
                raise ConfigurationError(f"duplicate keys in manifest: {dupes}")
            return dict(pairs)

        try:
            doc = json.loads(text, object_pairs_hook=no_duplicates)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"manifest is not valid JSON: {exc}") from None
        return cls.from_dict(doc, base_dir)

    @classmethod
    def load(cls, path) -> "SessionManifest":
        path = Path(path)
        return cls.from_json(path.read_text(encoding="utf-8"), path.parent)
