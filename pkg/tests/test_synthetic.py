import numpy as np
import pytest

from authornet import ingest
from authornet.cli import main
from authornet.manifest import SessionManifest
from authornet.overlap import count_common
from authornet.synthetic import (
    CorpusPlan,
    DomainPlan,
    PlantedPair,
    author_key,
    decode,
    default_plan,
    draw_people,
    key_lists,
    planted_pairs,
    write_corpus,
)

SMALL = CorpusPlan(
    (DomainPlan("alpha", 4, (PlantedPair(0, 1, 0.5),)), DomainPlan("beta", 4)),
    size_range=(40, 120),
)


def test_key_space():
    plan = default_plan()
    assert plan.n_initial_combos == 26 + 26 * 26
    assert plan.key_space == 700 * 702
    assert plan.collision_rate == pytest.approx(2.035e-6, rel=1e-3)


def test_keys_decode_uniquely():
    plan = default_plan()
    sample = range(0, plan.key_space, 997)
    decoded = {decode(k, plan) for k in sample}
    assert len(decoded) == len(sample)
    assert {author_key(k, plan) for k in sample} == {
        ingest.normalize_author(f"{last}, {'. '.join(i.upper())}.") for last, i in map(lambda k: decode(k, plan), sample)
    }


def test_draw_is_deterministic_and_sized():
    a, b = draw_people(default_plan(), 7), draw_people(default_plan(), 7)
    assert a.keys() == b.keys() == {"alpha", "beta"}
    for domain in a:
        assert list(a[domain]) == [f"{domain}-{i:02d}" for i in range(10)]
        for name in a[domain]:
            assert np.array_equal(a[domain][name], b[domain][name])
            assert 1000 <= len(a[domain][name]) <= 10000
    assert not np.array_equal(draw_people(default_plan(), 8)["alpha"]["alpha-00"], a["alpha"]["alpha-00"])


def test_planted_sharing():
    lists = {l.area_name: l for l in key_lists(default_plan(), 3)["alpha"]}
    shared = count_common(lists["alpha-00"], lists["alpha-01"])
    smaller = min(len(lists["alpha-00"]), len(lists["alpha-01"]))
    assert shared >= 0.25 * smaller
    background = count_common(lists["alpha-06"], lists["alpha-07"])
    assert background < 0.05 * smaller
    assert planted_pairs(default_plan())["beta"] == {("beta-00", "beta-01"), ("beta-06", "beta-07")}


def test_written_corpus_ingests_to_generator_keys(tmp_path):
    manifest = write_corpus(SMALL, 11, tmp_path)
    assert SessionManifest.load(tmp_path / "manifest.json") == manifest
    assert {s.format for s in manifest.areas.values()} == set(ingest.SOURCE_FORMATS)
    assert main(["--manifest", str(tmp_path / "manifest.json"), "ingest"]) == 0
    expected = {l.area_name: l for lists in key_lists(SMALL, 11, as_author_keys=True).values() for l in lists}
    for name, area in expected.items():
        got = ingest.read_author_list(tmp_path / "out" / "lists" / f"{name}.txt", name)
        assert got.authors == area.authors


def test_corpus_is_reproducible(tmp_path):
    write_corpus(SMALL, 2, tmp_path / "a")
    write_corpus(SMALL, 2, tmp_path / "b")
    for path in sorted((tmp_path / "a").rglob("*")):
        if path.is_file():
            assert path.read_bytes() == (tmp_path / "b" / path.relative_to(tmp_path / "a")).read_bytes()
