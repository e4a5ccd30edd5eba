import json
import subprocess
import sys

import pytest

from hgut import corpus
from hgut.cli import main


@pytest.fixture
def uniform_file(tmp_path):
    path = tmp_path / "u.json"
    corpus.save(corpus.make("uniform", (3, 3, 3)), path)
    return path


def test_test_verb_csv(tmp_path, uniform_file, capsys):
    out = tmp_path / "rows.csv"
    code = main(["test", "--dist", str(uniform_file), "--eps", "0.25", "--trials", "5",
                 "--out", str(out), "--expect", "accept"])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "# schema: hgut-trials/1" and len(lines) == 7


def test_test_verb_expectation_failure(uniform_file, capsys):
    code = main(["test", "--dist", str(uniform_file), "--eps", "0.25", "--trials", "3",
                 "--expect", "reject"])
    assert code == 1


def test_test_verb_json_stdout(uniform_file, capsys):
    assert main(["test", "--dist", str(uniform_file), "--eps", "0.5", "--trials", "2",
                 "--format", "json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert {"trial", "verdict", "queries_total", "queries_by_phase", "depth_max",
            "wall_ms"} <= set(data["rows"][0])


def test_usage_errors(tmp_path, uniform_file, capsys):
    with pytest.raises(SystemExit) as e:
        main(["test", "--eps", "0.1"])
    assert e.value.code == 2
    assert main(["test", "--dist", str(tmp_path / "missing.json"), "--eps", "0.1"]) == 2
    assert main(["test", "--dist", str(uniform_file), "--eps", "0.9"]) == 2
    with pytest.raises(SystemExit) as e:
        main(["frobnicate"])
    assert e.value.code == 2


def test_verify_verb_and_fault(tmp_path, capsys):
    out = tmp_path / "v.json"
    assert main(["verify", "--suite", "lemmas", "--corpus-size", "2", "--out", str(out)]) == 0
    assert isinstance(json.loads(out.read_text()), list)
    assert main(["verify", "--suite", "lemmas", "--corpus-size", "4", "--inject-fault",
                 "--out", str(tmp_path / "f.json")]) == 1


def test_verify_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        main(["verify", "--suite", "identities", "--corpus-size", "3", "--seed", "4",
              "--out", str(p)])
    assert a.read_bytes() == b.read_bytes()


def test_corpus_verb(tmp_path, capsys):
    assert main(["corpus", "--kind", "heavy_atom", "--shape", "2", "2", "--params",
                 '{"weight": 1}', "--out-dir", str(tmp_path)]) == 0
    assert "d_tv=0.750000" in capsys.readouterr().out
    assert main(["corpus", "--kind", "dirichlet", "--shape", "2", "2", "--params", "{bad",
                 "--out-dir", str(tmp_path)]) == 2


def test_sweep_verb_with_config(tmp_path, capsys):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({"name": "x", "generator": {"name": "heavy_atom"},
                               "eps_grid": [0.25], "shapes": [[3, 3, 3]], "trials": 5,
                               "expect": {"max_accept_rate": 0.33}}))
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "r.csv")]) == 0
    assert (tmp_path / "r.csv").read_text().startswith("# schema: hgut-results/1")


def test_sweep_verb_scaling(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert main(["sweep", "--n", "16", "32", "--trials", "2", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["n"] == [16, 32]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "hgut", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "verify" in r.stdout
