import io
import json

import pytest

from bnquintic.cache import CacheConflictError, CountCache
from bnquintic.cli import main, parse_int_list
from bnquintic.modularity import VerificationReport

TABLE = [
    (5, 100, 1620, 6), (7, 340, 3160, -16), (11, 1300, 7920, 12), (13, 2140, 11260, 38),
    (17, 5020, 20340, -126), (19, 6820, 25840, 20), (23, 11980, 39600, 168),
    (73, 388780, 658900, 218),
]


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_parse_int_list():
    assert parse_int_list("5,7") == [5, 7]
    assert parse_int_list("5..13,73") == [5, 7, 11, 13, 73]
    assert parse_int_list("2..4", primes_only=False) == [2, 3, 4]


def test_count_table(tmp_path):
    code, out = run("count", "--primes", "5,7,11,13,17,19,23,73", "--cache", str(tmp_path / "c.json"))
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split("\t") == ["p", "#U", "#Y", "t3"]
    assert [tuple(map(int, ln.split("\t"))) for ln in lines[1:]] == TABLE


def test_count_twisted_json():
    code, out = run("count", "--prime", "13", "--twisted", "--format", "json")
    row = json.loads(out)["rows"][0]
    assert code == 0 and row["n_Ytilde"] == 13080 and row["n_Utilde"] == 3440


@pytest.mark.parametrize("argv", [["count", "--prime", "4"], ["count", "--prime", "3"],
                                  ["maps", "--prime", "3"], ["qexp", "-N", "0"],
                                  ["count"], ["verify", "--hodge-prime", "9"]])
def test_usage_errors_exit_2(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_not_prime_message(capsys):
    with pytest.raises(SystemExit):
        main(["count", "--prime", "4"])
    assert "not prime" in capsys.readouterr().err


def test_qexp():
    code, out = run("qexp", "-N", "13")
    assert code == 0
    assert [int(ln.split("\t")[1]) for ln in out.splitlines()[1:]] == [
        1, -2, -3, 4, 6, 6, -16, -8, 9, -12, 12, -12, 38]
    code, out = run("qexp", "-N", "100", "--check", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["checks"]["hecke"]["violations"] == []


def test_verify_json_roundtrip(tmp_path):
    code, out = run("verify", "--hodge-prime", "13", "--cache", str(tmp_path / "c.json"))
    assert code == 0
    doc = json.loads(out)
    for key in ("tool_version", "primes", "rows", "livne", "hodge", "k_values", "verdict"):
        assert key in doc
    assert set(doc["rows"][0]) >= {"p", "n_U", "n_Y", "t3", "a_p", "match"}
    assert doc["verdict"] == "verified"
    assert [h["admissible"] for h in doc["hodge"]] == [[0], [0]]
    assert json.loads(json.dumps(doc)) == doc
    assert VerificationReport.from_dict(doc).to_dict() == doc


def test_verify_k_range():
    code, out = run("verify", "--k-range", "7..59")
    ks = json.loads(out)["k_values"]
    assert code == 0
    assert [k["p"] for k in ks] == [7, 11, 19, 23, 31, 43, 47, 59]
    assert all(k["k"] == 40 for k in ks)


def test_verify_with_corrupted_cache(tmp_path):
    path = tmp_path / "c.json"
    cache = CountCache(path)
    cache.put("U", 13, 2142)
    cache.save()
    code, out = run("verify", "--cache", str(path), "--k-range", "7..7")
    assert code == 1
    assert json.loads(out)["verdict"] == "failed: trace mismatch at p=13"


def test_count_recheck_detects_bad_cache(tmp_path):
    path = tmp_path / "c.json"
    cache = CountCache(path)
    cache.put("U", 7, 342)
    cache.put("U_square", 7, 30)
    cache.save()
    code, _ = run("count", "--prime", "7", "--cache", str(path), "--recheck")
    assert code == 1


def test_cache_env_var_and_append_only(tmp_path, monkeypatch):
    path = tmp_path / "env.json"
    monkeypatch.setenv("BNQUINTIC_CACHE", str(path))
    code, _ = run("count", "--primes", "5,7")
    assert code == 0
    cache = CountCache(path)
    assert cache.get("U", 7) == 340 and cache.get("U_square", 5) == 100
    assert all(e["tool_version"] and e["method"] == "fast" for e in cache.entries.values())
    with pytest.raises(CacheConflictError):
        cache.put("U", 7, 341)
    cache.put("U", 7, 340)  # identical value is a no-op
    code, _ = run("count", "--primes", "5,7", "--recheck")
    assert code == 0


def test_threads_do_not_change_output():
    _, one = run("count", "--primes", "29,31", "--twisted", "--threads", "1")
    _, four = run("count", "--primes", "29,31", "--twisted", "--threads", "4")
    assert one == four


def test_maps_commands():
    code, out = run("maps", "--prime", "13", "--samples", "1000", "--seed", "3", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["seed"] == 3
    assert doc["beauville"]["failed"] == doc["verrill"]["failed"] == 0
    code, out = run("maps", "--prime", "5", "--exhaustive", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["n"] == 100


def test_cayley_commands():
    code, out = run("cayley", "--primes", "5..41")
    assert code == 0
    assert all(ln.endswith("True") for ln in out.splitlines()[1:])
    code, out = run("cayley", "--prime", "13", "--format", "json")
    assert json.loads(out)["rows"][0]["cover"] == 274
    code, out = run("cayley", "--prime", "7", "--format", "json")
    assert json.loads(out)["rows"][0]["cover"] == 92
