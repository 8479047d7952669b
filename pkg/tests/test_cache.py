import json
import logging
import os
import subprocess
import sys

import numpy as np
import pytest

from hilbert_siegel.cache import ENV_VAR, SCHEMA_VERSION, Cache, canonical_json, default_cache_dir
from hilbert_siegel.pipeline import compute_brandt, compute_level, parse_level


def test_round_trip(tmp_path):
    c = Cache(tmp_path)
    assert c.get("brandt", {"a": 1}) is None
    c.put("brandt", {"a": 1, "b": [1, 2]}, {"x": [[1, 2], [3, 4]]})
    assert c.get("brandt", {"b": [1, 2], "a": 1}) == {"x": [[1, 2], [3, 4]]}
    assert c.get("brandt", {"a": 2}) is None
    (path,) = list(tmp_path.rglob("*.json"))
    assert path.read_text().splitlines()[0] == canonical_json({"schema": SCHEMA_VERSION})
    assert not list(tmp_path.rglob(".tmp-*"))


@pytest.mark.parametrize("damage", ["truncate", "schema", "garbage", "key"])
def test_corrupt_entries_are_discarded(tmp_path, caplog, damage):
    c = Cache(tmp_path)
    c.put("theta", {"p": "2"}, [1, 2, 3])
    (path,) = list(tmp_path.rglob("*.json"))
    text = path.read_text()
    if damage == "truncate":
        path.write_text(text[: len(text) // 2])
    elif damage == "schema":
        path.write_text(text.replace('"schema":1', '"schema":0'))
    elif damage == "garbage":
        path.write_bytes(b"\x00\xff not json")
    else:
        path.write_text(text.replace('"p":"2"', '"p":"3"'))
    with caplog.at_level(logging.WARNING):
        assert c.get("theta", {"p": "2"}) is None
    assert "discarding" in caplog.text
    assert not path.exists()


def test_disabled_cache(tmp_path):
    c = Cache(tmp_path, enabled=False)
    c.put("k", {}, 1)
    assert c.get("k", {}) is None and not list(tmp_path.iterdir())


def test_clear(tmp_path):
    c = Cache(tmp_path)
    for i in range(3):
        c.put("k", {"i": i}, i)
    assert c.clear() == 3 and c.get("k", {"i": 0}) is None
    assert Cache(tmp_path / "missing").clear() == 0


def test_env_override(monkeypatch, tmp_path):
    monkeypatch.setenv(ENV_VAR, str(tmp_path / "here"))
    assert default_cache_dir() == tmp_path / "here"
    assert Cache().root == tmp_path / "here"


def test_warm_equals_cold_in_process(tmp_path):
    spec = parse_level("11,3+w")
    cold = compute_level(spec.level, cache=Cache(tmp_path))
    warm = compute_level(spec.level, cache=Cache(tmp_path))
    assert list(tmp_path.rglob("*.json"))
    for k in cold.brandt:
        assert np.array_equal(cold.brandt[k].entries, warm.brandt[k].entries)
    assert [s.to_json() for s in cold.systems] == [s.to_json() for s in warm.systems]


def test_cached_brandt_survives_garbage(tmp_path):
    spec = parse_level("4,2")
    c = Cache(tmp_path)
    from hilbert_siegel.base_ring import prime_ideal

    B = compute_brandt(spec.level, prime_ideal("3"), 1, c)
    for p in (tmp_path / "brandt").glob("*.json"):
        p.write_text("{")
    B2 = compute_brandt(spec.level, prime_ideal("3"), 1, c)
    assert np.array_equal(B.entries, B2.entries)


def _run(args, cache_dir):
    env = dict(os.environ, **{ENV_VAR: str(cache_dir)})
    out = subprocess.run([sys.executable, "-m", "hilbert_siegel", *args], capture_output=True, env=env, check=True)
    return out.stdout


def test_warm_equals_cold_across_processes(tmp_path):
    args = ["eigen", "--level", "19,4+w", "--json"]
    cold = _run(args, tmp_path)
    n_entries = len(list(tmp_path.rglob("*.json")))
    assert n_entries > 0
    warm = _run(args, tmp_path)
    assert cold == warm
    assert len(list(tmp_path.rglob("*.json"))) == n_entries
    assert json.loads(cold)["h"] == 5
