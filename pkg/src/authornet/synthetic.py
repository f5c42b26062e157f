"""Synthetic corpora with planted structure, for testing the pipeline end to end.

People are drawn as fresh individuals for every area, so areas share no
real authors except where a pair is planted to share a fraction of its
people.  Each person receives a name key (surname, initials) uniformly
from a finite key space, so two distinct people collide with probability
``1 / key_space``.  That collision rate is the matching probability the
noise estimate should recover between unrelated areas.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .ingest import SOURCE_FORMATS, AreaAuthorList, AuthorKey
from .manifest import AreaSource, SessionManifest

_CONSONANTS = "bcdfghjklmnprstvwxyz"
_VOWELS = "aeiou"
SYLLABLES = tuple(c + v for c in _CONSONANTS for v in _VOWELS)
LETTERS = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class PlantedPair:
    a: int
    b: int
    fraction: float


@dataclass(frozen=True)
class DomainPlan:
    name: str
    n_areas: int = 10
    planted: tuple[PlantedPair, ...] = ()


@dataclass(frozen=True)
class CorpusPlan:
    domains: tuple[DomainPlan, ...]
    size_range: tuple[int, int] = (1000, 10000)
    n_surnames: int = 700
    max_initials: int = 2

    @property
    def n_initial_combos(self) -> int:
        return sum(26**i for i in range(1, self.max_initials + 1))

    @property
    def key_space(self) -> int:
        return self.n_surnames * self.n_initial_combos

    @property
    def collision_rate(self) -> float:
        return 1.0 / self.key_space


def default_plan() -> CorpusPlan:
    """Two ten-area domains; the first has three planted pairs, the second two."""
    return CorpusPlan((
        DomainPlan("alpha", 10, (PlantedPair(0, 1, 0.30), PlantedPair(2, 3, 0.20), PlantedPair(4, 5, 0.10))),
        DomainPlan("beta", 10, (PlantedPair(0, 1, 0.25), PlantedPair(6, 7, 0.15))),
    ))


def area_name(domain: str, index: int) -> str:
    return f"{domain}-{index:02d}"


def surname(index: int) -> str:
    s = SYLLABLES
    return (s[index % 100] + s[(index // 100) % 100] + s[(index // 10000) % 100]).capitalize()


def initials(index: int) -> str:
    if index < 26:
        return LETTERS[index]
    index -= 26
    return LETTERS[index // 26] + LETTERS[index % 26]


def decode(key: int, plan: CorpusPlan) -> tuple[str, str]:
    """Surname and initials letters of an integer name key."""
    s, i = divmod(int(key), plan.n_initial_combos)
    return surname(s), initials(i)


def author_key(key: int, plan: CorpusPlan) -> AuthorKey:
    last, inits = decode(key, plan)
    return AuthorKey(last.casefold(), tuple(inits))


def draw_people(plan: CorpusPlan, seed: int) -> dict[str, dict[str, np.ndarray]]:
    """Name keys of the people in every area, one array entry per person."""
    rng = np.random.default_rng(seed)
    lo, hi = plan.size_range
    out = {}
    for domain in plan.domains:
        sizes = np.exp(rng.uniform(math.log(lo), math.log(hi), domain.n_areas)).astype(int)
        people = [rng.integers(0, plan.key_space, size) for size in sizes]
        for pair in domain.planted:
            shared = int(round(pair.fraction * min(len(people[pair.a]), len(people[pair.b]))))
            chosen = rng.choice(len(people[pair.a]), shared, replace=False)
            people[pair.b][:shared] = people[pair.a][chosen]
        out[domain.name] = {area_name(domain.name, i): keys for i, keys in enumerate(people)}
    return out


def key_lists(plan: CorpusPlan, seed: int, as_author_keys: bool = False) -> dict[str, list[AreaAuthorList]]:
    """Deduplicated area lists straight from the generator, skipping files.

    Integer keys are used unless ``as_author_keys``; overlap counts are the
    same either way.
    """
    out = {}
    for domain, areas in draw_people(plan, seed).items():
        lists = []
        for name, keys in areas.items():
            unique = set(keys.tolist())
            if as_author_keys:
                unique = {author_key(k, plan) for k in unique}
            lists.append(AreaAuthorList(name, frozenset(unique)))
        out[domain] = lists
    return out


def planted_pairs(plan: CorpusPlan) -> dict[str, set[tuple[str, str]]]:
    return {
        d.name: {tuple(sorted((area_name(d.name, p.a), area_name(d.name, p.b)))) for p in d.planted}
        for d in plan.domains
    }


def _render(key, plan, style):
    last, inits = decode(key, plan)
    up = inits.upper()
    if style == "wos-plain":
        return f"{last}, {up}"
    if style == "ris":
        return f"{last}, " + "".join(f"{c}." for c in up)
    if style == "csv":
        return " ".join(f"{c}." for c in up) + f" {last}"
    return f"{last}, " + " ".join(f"{c}." for c in up)


def _records(keys, rng):
    order = rng.permutation(len(keys))
    repeat = rng.choice(len(keys), len(keys) // 10, replace=False)
    order = np.concatenate([order, repeat])
    records = []
    i = 0
    while i < len(order):
        size = int(rng.integers(1, 5))
        records.append([int(keys[j]) for j in order[i:i + size]])
        i += size
    return records


def _write_area(path, fmt, authors_by_record, plan):
    if fmt == "wos-plain":
        lines = ["FN Synthetic Export", "VR 1.0"]
        for r, authors in enumerate(authors_by_record):
            lines.append("PT J")
            names = [_render(k, plan, fmt) for k in authors]
            lines.append(f"AU {names[0]}")
            lines.extend(f"   {n}" for n in names[1:])
            lines += [f"TI Synthetic article {r}", f"PY {2000 + r % 13}", "ER", ""]
        lines.append("EF")
        text = "\n".join(lines) + "\n"
    elif fmt == "ris":
        lines = []
        for r, authors in enumerate(authors_by_record):
            lines.append("TY  - JOUR")
            lines.extend(f"AU  - {_render(k, plan, fmt)}" for k in authors)
            lines += [f"TI  - Synthetic article {r}", f"PY  - {2000 + r % 13}", "ER  - ", ""]
        text = "\n".join(lines)
    elif fmt == "csv":
        buf = io.StringIO(newline="")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["Title", "Authors", "Year"])
        for r, authors in enumerate(authors_by_record):
            writer.writerow([f"Synthetic article {r}", "; ".join(_render(k, plan, fmt) for k in authors), 2000 + r % 13])
        text = buf.getvalue()
    else:
        text = "".join(f"{_render(k, plan, fmt)}\n" for authors in authors_by_record for k in authors)
    Path(path).write_text(text, encoding="utf-8")


def write_corpus(plan: CorpusPlan, seed: int, directory, output_dir: str = "out") -> SessionManifest:
    """Write every area as an export file and return a manifest for them.

    Area formats cycle through all supported formats; ``manifest.json`` is
    written alongside the data.
    """
    directory = Path(directory)
    (directory / "data").mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))
    areas, domains = {}, {}
    index = 0
    for domain, members in draw_people(plan, seed).items():
        domains[domain] = list(members)
        for name, keys in members.items():
            fmt = SOURCE_FORMATS[index % len(SOURCE_FORMATS)]
            index += 1
            ext = {"wos-plain": "txt", "ris": "ris", "csv": "csv", "author-lines": "lst"}[fmt]
            rel = f"data/{name}.{ext}"
            _write_area(directory / rel, fmt, _records(keys, rng), plan)
            areas[name] = AreaSource(rel, fmt)
    manifest = SessionManifest(areas, domains, seed, output_dir, directory)
    (directory / "manifest.json").write_text(manifest.to_json(), encoding="utf-8")
    return manifest
