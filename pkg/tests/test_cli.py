from __future__ import annotations

import json
import subprocess
import sys

import pytest

from schmidt_witness.cli import main
from schmidt_witness.countsfile import read_counts
from schmidt_witness.stats import no_signaling_test, score_all_spectators, score_dataset


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def set1_file(tmp_path):
    path = tmp_path / "a.txt"
    assert main(["simulate", "--scenario", "a-set1", "--shots", "5000", "--jobs", "3", "--seed", "4", "-o", str(path)]) == 0
    return path


@pytest.fixture
def b_file(tmp_path):
    path = tmp_path / "b.txt"
    assert main(["simulate", "--scenario", "b", "--shots", "20000", "--jobs", "2", "--reps", "3", "--seed", "1", "-o", str(path)]) == 0
    return path


def test_simulate_is_byte_identical(tmp_path):
    paths = [tmp_path / "x.txt", tmp_path / "y.txt"]
    for p in paths:
        main(["simulate", "--scenario", "a-set2", "--shots", "100", "--jobs", "2", "--seed", "9", "-o", str(p)])
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_score_matches_library(capsys, set1_file):
    code, out, _ = run(capsys, "score", str(set1_file), "--json")
    assert code == 0
    data = json.loads(out)
    lib = score_dataset(read_counts(set1_file))
    assert data["witness"]["W"] == lib.W
    assert data["witness"]["deltaWprime"] == lib.deltaWprime
    assert data["nosignal"]["comparisons"] == 48
    assert data["unit"] == 1e-6


def test_score_kind_b_reports_all_spectators(capsys, b_file):
    code, out, _ = run(capsys, "score", str(b_file), "--json")
    assert code == 0
    data = json.loads(out)
    lib = score_all_spectators(read_counts(b_file))
    assert set(data["spectators"]) == {"00", "01", "10", "11"}
    for s, r in lib.items():
        assert data["spectators"][f"{s[0]}{s[1]}"]["W"] == r.W
    assert data["unit"] == 1e-12


def test_score_text_is_deterministic_except_clock(capsys, b_file):
    _, a, _ = run(capsys, "score", str(b_file))
    _, b, _ = run(capsys, "score", str(b_file), "--matrix")
    strip = lambda s: [l for l in s.splitlines() if not l.startswith("wall-clock")]
    assert strip(a) == strip(b)[: len(strip(a))]
    assert "a0=1 b0=1" in a and "1e-12" in a
    assert "probability matrix a0=0 b0=0:" in b


def test_nosignal_table(capsys, set1_file):
    code, out, _ = run(capsys, "nosignal", str(set1_file))
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 50
    rep = no_signaling_test(read_counts(set1_file))
    assert f"max |z| {rep.max_abs_z:.3f}" in lines[-1]


def test_nosignal_rejects_kind_b(capsys, b_file):
    code, _, err = run(capsys, "nosignal", str(b_file))
    assert code == 2 and "kind A" in err


def test_perturb_signaling_detected(capsys, tmp_path):
    src = tmp_path / "big.txt"
    main(["simulate", "--scenario", "a-set1", "--shots", "1000000", "--seed", "2", "-o", str(src)])
    out = tmp_path / "sig.txt"
    code, _, _ = run(capsys, "perturb", str(src), "--epsilon", "0.01", "--mode", "signaling", "--setting", "4", "3", "-o", str(out))
    assert code == 0
    w = no_signaling_test(read_counts(out)).worst()
    assert (w.party, w.index) == ("A", 4) and abs(w.z) > 5


def test_perturb_extra_dim_kind_b(capsys, tmp_path):
    src = tmp_path / "big.txt"
    main(["simulate", "--scenario", "b", "--shots", "5000000", "--jobs", "2", "--seed", "3", "-o", str(src)])
    out = tmp_path / "leak.txt"
    assert run(capsys, "perturb", str(src), "--epsilon", "0.01", "--mode", "extra-dim", "-o", str(out))[0] == 0
    reps = score_all_spectators(read_counts(out))
    assert all(abs(r.zScore) > 5 for r in reps.values())


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--scenario", "c", "--shots", "10"],
        ["simulate", "--scenario", "b", "--shots", "0"],
        ["simulate", "--scenario", "b", "--shots", "10", "--middle", "3"],
        ["perturb", "missing.txt", "--epsilon", "0.1", "--mode", "signaling"],
        ["perturb", "missing.txt", "--epsilon", "2", "--mode", "signaling"],
        ["score", "does-not-exist.txt"],
        ["maxima", "--kind", "a", "--model", "classical", "--n", "9", "--d", "2"],
        [],
    ],
)
def test_input_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_malformed_file_exit_2(capsys, tmp_path, set1_file):
    bad = tmp_path / "bad.txt"
    bad.write_text(set1_file.read_text().replace("format 1", "format 7"))
    code, _, err = run(capsys, "score", str(bad))
    assert code == 2 and "line 1" in err and "format" in err


def test_maxima_classical(capsys):
    code, out, _ = run(capsys, "maxima", "--kind", "a", "--model", "classical", "--n", "4", "--d", "5")
    assert code == 0
    value = float(out.splitlines()[1].split()[1])
    assert value == pytest.approx(0.74, abs=0.005)
    assert "published" in out


def test_maxima_case_b(capsys):
    code, out, _ = run(capsys, "maxima", "--kind", "b", "--model", "real", "--n", "3", "--d", "3")
    assert code == 0 and "method etf" in out


def test_verify_exit_zero(capsys):
    code, out, _ = run(capsys, "verify", "--n7-restarts", "20")
    assert code == 0
    assert "FAIL" not in out
    assert "printed matrix det = 1/8" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "schmidt_witness", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "0.1.0" in res.stdout
