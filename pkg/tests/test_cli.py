import io
import json
import subprocess
import sys

import pytest

from epimem.cli import main
from epimem.miner import write_patterns, PatternSet
from epimem.sequence_model import TimeConstraints, read_sequences, write_sequences
from fixtures import SPLIT_CANDIDATES, SPLIT_DB, similar_sequences

REFERENCE_ROWS = [
    "<(0, c1 e1{0.7})>",
    "<(0, c3), (2, c5 b3)>",
    "<(0, c4 b4), (1, c5)>",
    "<(0, c3), (1, c4), (2, c5 b3)>",
]


def run(argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


def test_mine_six_sequences(six_db_path, tmp_path):
    code, out = run(["mine", six_db_path, "--minsup", "32%", "--no-constraints",
                     "--closed-only=false", "-o", tmp_path / "p.jsonl"])
    assert code == 0
    for row in REFERENCE_ROWS:
        assert row in out
    assert out.splitlines()[1] == "support min 2/6 max 4/6"
    lines = (tmp_path / "p.jsonl").read_text().splitlines()
    assert len(lines) == int(out.split()[0])
    json.loads(lines[0])


def test_minsup_spellings_agree(six_db_path, tmp_path):
    for name, ms in (("a", "0.32"), ("b", "32%")):
        assert run(["mine", six_db_path, "--minsup", ms, "--no-constraints", "-o",
                    tmp_path / f"{name}.jsonl"])[0] == 0
    assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()


def test_mine_empty_database(tmp_path, capsys):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    assert run(["mine", path])[0] == 2
    assert "empty database" in capsys.readouterr().err


@pytest.mark.parametrize("argv, code", [
    (["--minsup", "150%"], 2),
    (["--minsup", "abc"], 2),
    (["--min-span", "5", "--max-span", "2"], 3),
])
def test_mine_bad_flags(six_db_path, argv, code):
    assert run(["mine", six_db_path] + argv)[0] == code


def test_mine_malformed_file(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"id": "S1", "events": [{"t": 0, "colour": "red"}]}\n')
    assert run(["mine", path])[0] == 2
    assert run(["mine", tmp_path / "missing.jsonl"])[0] == 2


def test_closed_versus_capped_non_closed(tmp_path, capsys):
    path = tmp_path / "similar.jsonl"
    write_sequences(path, similar_sequences())
    code, out = run(["mine", path, "--minsup", "1", "--no-constraints"])
    assert code == 0 and out.startswith("1 closed patterns")
    code, _ = run(["mine", path, "--minsup", "1", "--no-constraints", "--closed-only=false",
                   "--max-candidates", "20000"])
    assert code == 3
    assert "candidate cap" in capsys.readouterr().err


@pytest.fixture
def split_patterns(tmp_path):
    path = tmp_path / "patterns.jsonl"
    write_patterns(path, PatternSet(tuple(SPLIT_CANDIDATES), 0.5, TimeConstraints(), 2))
    return path


def test_learn_prints_scores(split_patterns):
    code, out = run(["learn", split_patterns, "--history", "cA,cB", "--candidates", "cC,cD"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "selected cC (Episodic)"
    assert [ln.split("\t")[:2] for ln in lines[1:]] == [["cC", "1"], ["cD", "-0.4"]]


def test_learn_falls_back_without_matches(split_patterns):
    code, out = run(["learn", split_patterns, "--history", "cB", "--candidates", "cC,cD",
                     "--fallback", "cD"])
    assert code == 0 and out.splitlines() == ["selected cD (Attention)"]


def test_learn_verifies_supports(split_patterns, tmp_path):
    db = tmp_path / "db.jsonl"
    write_sequences(db, SPLIT_DB)
    assert run(["learn", split_patterns, "--history", "cA,cB", "--candidates", "cC",
                "--db", db])[0] == 0
    write_sequences(db, SPLIT_DB[:1])
    assert run(["learn", split_patterns, "--history", "cA,cB", "--candidates", "cC",
                "--db", db])[0] == 2


def test_simulate_is_byte_reproducible(tmp_path):
    for name in ("a", "b"):
        code, _ = run(["simulate", "--executions", 1, "--seed", 7, "-o", tmp_path / f"{name}.jsonl",
                       "--decision-log", tmp_path / f"{name}.log"])
        assert code == 0
    assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()
    assert (tmp_path / "a.log").read_bytes() == (tmp_path / "b.log").read_bytes()
    trace = read_sequences(tmp_path / "a.jsonl")
    assert len(trace) == 1
    log = [json.loads(ln) for ln in (tmp_path / "a.log").read_text().splitlines()]
    assert len(log) == len(trace[0])
    assert set(log[0]) == {"cycle", "broadcast", "provenance", "score"}


def test_bench_rows(tmp_path):
    code, _ = run(["bench", "--executions", 3, "-o", tmp_path / "b.csv"])
    assert code == 0
    lines = (tmp_path / "b.csv").read_text().splitlines()
    assert lines[0] == "execution,mining_ms,pattern_count,mean_pattern_len,learner_decision_us"
    assert [ln.split(",")[0] for ln in lines[1:]] == ["1", "2", "3"]


def test_module_entry_point(six_db_path):
    res = subprocess.run([sys.executable, "-m", "epimem", "mine", str(six_db_path), "--minsup", "32%",
                          "--no-constraints"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "<(0, c1 e1{0.7})>" in res.stdout
