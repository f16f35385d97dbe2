import json
import math
import subprocess
import sys

import pytest

from torusnorms.cli import main
from torusnorms.polynomial import build, dump, univariate


@pytest.fixture
def corpus_file(tmp_path):
    path = tmp_path / "c.json"
    assert main(["corpus", "--seed", "2", "--n", "2", "--deg", "3", "--count", "5", "--out", str(path)]) == 0
    return path


def test_lambda_prints_both_forms(capsys):
    assert main(["lambda", "--p", "2", "--m", "3"]) == 0
    out = capsys.readouterr().out
    vals = [float(line.split()[-1]) for line in out.splitlines() if "form" in line]
    assert len(vals) == 2
    assert all(v == pytest.approx(math.sqrt(20), abs=1e-6) for v in vals)
    assert "4.47213595499958" in out
    gap = float(out.splitlines()[-1].split()[-1])
    assert gap < 1e-8


def test_norm_and_mahler(tmp_path, capsys):
    path = tmp_path / "p.json"
    dump(univariate([1, 1]), path)
    assert main(["norm", "--poly", str(path), "--p", "2"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["value"] == pytest.approx(math.sqrt(2))
    assert main(["norm", "--poly", str(path), "--p", "1", "--tol", "1e-9"]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == pytest.approx(4 / math.pi, rel=1e-8)
    assert main(["mahler", "--poly", str(path)]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == pytest.approx(1.0, abs=1e-12)


def test_orlicz(tmp_path, capsys):
    path = tmp_path / "p.json"
    dump(build(1, [((2,), 3)]), path)
    assert main(["orlicz", "--poly", str(path), "--alpha", "0.5"]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == pytest.approx(3 / math.log(2) ** 2, rel=1e-8)
    assert main(["orlicz", "--poly", str(path), "--alpha", "3"]) == 2


def test_missing_file_is_usage_error(tmp_path, capsys):
    assert main(["norm", "--poly", str(tmp_path / "missing.json"), "--p", "2"]) == 2
    assert "missing.json" in capsys.readouterr().err


def test_usage_errors(capsys):
    assert main(["norm", "--p", "2"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["lambda", "--p", "2", "--m", "3", "--bogus"]) == 2
    assert "usage" in capsys.readouterr().err


def test_verify_pass_exit_zero(corpus_file, tmp_path, capsys):
    report = tmp_path / "r.csv"
    assert main(["verify", "--theorem", "mahler-cor", "--corpus", str(corpus_file), "--p", "1",
                 "--report", str(report)]) == 0
    assert "PASS" in capsys.readouterr().out
    assert report.read_text().startswith("theorem_id,params,lhs,rhs,ratio,pass,methods,witness_hash\n")


def test_verify_fail_exit_one(corpus_file, monkeypatch, capsys):
    # a constant below the proven one makes degree >= 1 members fail
    from torusnorms import verify
    monkeypatch.setattr(verify.K, "comparison_constants", lambda p, q: (0.5, 0.5))
    assert main(["verify", "--theorem", "thm21", "--corpus", str(corpus_file)]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_verify_all_skipped_exit_two(tmp_path, capsys):
    path = tmp_path / "p.json"
    dump(univariate([1, 1]), path)
    assert main(["verify", "--theorem", "bayart", "--corpus", str(path)]) == 2
    assert "nothing checked" in capsys.readouterr().err


def test_verify_unknown_theorem(corpus_file):
    assert main(["verify", "--theorem", "nope", "--corpus", str(corpus_file)]) == 2


def test_verify_bad_pair(corpus_file):
    assert main(["verify", "--theorem", "thm21", "--corpus", str(corpus_file), "--p", "3", "--q", "2"]) == 2


def test_scan(tmp_path, capsys):
    report = tmp_path / "s.json"
    assert main(["scan", "--family", "weissler-violation", "--grid", "0.5,0.51", "--report", str(report)]) == 0
    rows = json.loads(report.read_text())
    assert [r["details"]["violated"] for r in rows] == [False, True]


def test_corpus_to_stdout(capsys):
    assert main(["corpus", "--seed", "1", "--n", "1", "--deg", "2", "--count", "2", "--out", "-"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["polynomials"]) == 2


def test_byte_identical_outputs(tmp_path):
    paths = []
    for k in range(2):
        c = tmp_path / f"c{k}.json"
        r = tmp_path / f"r{k}.json"
        assert main(["corpus", "--seed", "11", "--n", "2", "--deg", "3", "--count", "6", "--kind", "homogeneous",
                     "--out", str(c)]) == 0
        assert main(["verify", "--theorem", "bayart", "--corpus", str(c), "--report", str(r)]) == 0
        paths.append((c, r))
    assert paths[0][0].read_bytes() == paths[1][0].read_bytes()
    assert paths[0][1].read_bytes() == paths[1][1].read_bytes()


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "torusnorms", "lambda", "--p", "1", "--m", "1"],
                         capture_output=True, text=True, check=True).stdout
    assert "1.27323954473516" in out
