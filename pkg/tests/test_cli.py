import json
import subprocess
import sys

import pytest

from frobspec.cli import main, parse_complex, parse_polynomial, parse_spectrum
from frobspec.errors import InputError
from frobspec.matrix_lab import read_matrix


def run(argv, tmp_path, name="report.json"):
    out = tmp_path / name
    code = main([*argv, "--out", str(out)])
    return code, json.loads(out.read_text())


def write(path, text):
    path.write_text(text)
    return path


@pytest.mark.parametrize("tok, z", [
    ("2", 2), ("-1.5", -1.5), ("1+2i", 1 + 2j), ("1-2j", 1 - 2j), ("2i", 2j),
    ("-i", -1j), ("i", 1j), ("1e-3+1e2i", 1e-3 + 100j), ("-1.5e+2-3i", -150 - 3j),
])
def test_parse_complex(tok, z):
    assert parse_complex(tok) == z


@pytest.mark.parametrize("tok", ["", "abc", "1+", "nan", "inf", "1+xi", "--1"])
def test_parse_complex_rejects(tok):
    with pytest.raises(InputError):
        parse_complex(tok)


def test_parse_spectrum_and_polynomial():
    assert parse_spectrum("[2, -1, -1]") == [2, -1, -1]
    assert parse_spectrum("1+2i 1-2i;3") == [1 + 2j, 1 - 2j, 3]
    assert parse_polynomial("1 0 -2") == [-2, 0, 1]
    with pytest.raises(InputError, match="monic"):
        parse_polynomial("2 0 -2")
    with pytest.raises(InputError):
        parse_polynomial("1")


def test_check_kor_example(tmp_path):
    code, rep = run(["check", "--spectrum", "[1.4142135624, -1.4142135624]", "--checks", "kor"], tmp_path)
    assert code == 0 and rep["status"] == "holds"
    verdicts = {v["condition_id"]: v for v in rep["suites"]["kor"]["verdicts"]}
    assert verdicts["integer_polynomial"]["data"]["coefficients"] == [-2, 0, 1]


def test_check_traces_failure(tmp_path, capsys):
    code, rep = run(["check", "--spectrum", "[-1]", "--checks", "traces"], tmp_path)
    assert code == 1
    v = rep["suites"]["traces"]["verdicts"][0]
    assert v["data"]["k"] == 1 and v["data"]["s_k"] == -1
    assert "k=1" in capsys.readouterr().out


def test_check_polynomial_irreducible(tmp_path):
    code, rep = run(["check", "--poly", "1 0 -2", "--checks", "irreducible"], tmp_path)
    assert code == 0
    verdicts = {v["condition_id"]: v for v in rep["suites"]["irreducible"]["verdicts"]}
    assert verdicts["frobenius.rotation"]["data"]["p"] == 2
    roots = sorted(re for re, im, mult in rep["input"]["canonical_list"])
    assert roots == pytest.approx([-2**0.5, 2**0.5], abs=1e-12)


def test_check_inconclusive_exit(tmp_path):
    # {2, -2, 1}: Frobenius fails, positivity sits on the tolerance band
    code, rep = run(["check", "--spectrum", "2 -2 1", "--checks", "loewy-london"], tmp_path)
    statuses = {v["condition_id"]: v["status"] for v in rep["suites"]["loewy-london"]["verdicts"]}
    assert statuses["positivity"] == "inconclusive"
    assert code == 2


def test_check_all_suites_default(tmp_path):
    code, rep = run(["check", "--spectrum", "2 -1 -1"], tmp_path)
    assert code == 0 and set(rep["suites"]) == {
        "traces", "structure", "loewy-london", "frobenius", "boyle-handelman", "irreducible", "kor"}
    assert rep["schema_version"] == "frobspec.report/1"


@pytest.mark.parametrize("argv", [
    ["check", "--spectrum", "[0, 1]"],
    ["check", "--spectrum", "1 abc"],
    ["check", "--spectrum", ""],
    ["check", "--poly", "1 0 0"],
    ["check", "--spectrum", "1", "--checks", "bogus"],
    ["check", "--spectrum", "1", "--kmax", "0"],
    ["check"],
    ["nonsense"],
    [],
])
def test_usage_errors(argv, capsys):
    assert main(argv) == 3


def test_analyze(tmp_path):
    f = write(tmp_path / "a.txt", "2\n0 1\n2 0\n")
    code, rep = run(["analyze", str(f)], tmp_path)
    assert code == 0
    a = rep["analysis"]
    assert (a["irreducible"], a["period"], a["primitive"]) == (True, 2, False)
    assert rep["suites"]["matrix_net_traces"]["status"] == "holds"
    f = write(tmp_path / "b.txt", "2\n1 1\n0 1\n")
    code, rep = run(["analyze", str(f)], tmp_path)
    assert code == 0 and rep["suites"] == {} and "skipped" in rep["analysis"]


def test_analyze_bad_file(tmp_path):
    assert main(["analyze", str(tmp_path / "missing.txt")]) == 3
    f = write(tmp_path / "bad.txt", "2\n1 -1\n0 1\n")
    assert main(["analyze", str(f)]) == 3


def test_lift_with_p(tmp_path):
    f = write(tmp_path / "b.txt", "1\n2\n")
    emit = tmp_path / "a.txt"
    code, rep = run(["lift", str(f), "--p", "3", "--emit", str(emit)], tmp_path)
    assert code == 0
    cons = rep["constructions"]["lift"]
    assert cons["measured_period"] == 3 and cons["power_map_matches_copies"]
    assert read_matrix(emit).entries.tolist() == [[0, 1, 0], [0, 0, 1], [2, 0, 0]]


def test_lift_with_target(tmp_path):
    f = write(tmp_path / "b.txt", "1\n2\n")
    code, rep = run(["lift", str(f), "--target", "1.4142135623730951 -1.4142135623730951"], tmp_path)
    assert code == 0
    cons = rep["constructions"]["lift"]
    assert cons["verified"] and cons["evidence"]["polynomial_identity"]
    code, rep = run(["lift", str(f), "--target", "2 -2 1"], tmp_path)
    assert code == 1 and "NotFrobenius" in rep["constructions"]["lift"]["reason"]


def test_search(tmp_path):
    emit = tmp_path / "r.txt"
    code, rep = run(["search", "--spectrum", "2 -1 -1", "--nmax", "3", "--emit", str(emit)], tmp_path)
    assert code == 0 and rep["constructions"]["search"]["status"] == "found"
    assert read_matrix(emit).order == 3
    code, rep = run(["search", "--spectrum", "1 -2"], tmp_path)
    assert code == 1 and rep["constructions"]["search"]["status"] == "not-admissible"


def test_batch(tmp_path):
    d = tmp_path / "mats"
    d.mkdir()
    write(d / "a.txt", "2\n0 1\n2 0\n")
    write(d / "b.txt", "2\n1 1\n0 1\n")
    code, rep = run(["batch", str(d)], tmp_path)
    assert code == 0
    entries = {e["file"]: e for e in rep["batch"]["entries"]}
    assert entries["a.txt"]["status"] == "holds" and entries["a.txt"]["analysis"]["period"] == 2
    assert entries["b.txt"]["status"] == "skipped"
    write(d / "c.txt", "2\n0 x\n1 0\n")
    code, rep = run(["batch", str(d)], tmp_path)
    assert code == 2 and rep["batch"]["counts"]["unreadable"] == 1
    assert any("c.txt" in e for e in rep["errors"])


def test_batch_empty_directory(tmp_path):
    d = tmp_path / "empty"
    d.mkdir()
    assert main(["batch", str(d)]) == 3
    assert main(["batch", str(tmp_path / "nope")]) == 3


def test_reports_are_byte_identical(tmp_path):
    d = tmp_path / "mats"
    d.mkdir()
    write(d / "a.txt", "3\n0 1 1\n1 0 1\n1 1 0\n")
    write(d / "b.txt", "2\n0.5 1\n1 0\n")
    for argv in (["check", "--spectrum", "2 -1 -1", "--seed", "7"], ["batch", str(d), "--seed", "7"]):
        main([*argv, "--out", str(tmp_path / "r1.json")])
        main([*argv, "--out", str(tmp_path / "r2.json")])
        assert (tmp_path / "r1.json").read_bytes() == (tmp_path / "r2.json").read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "frobspec", "check", "--spectrum", "[-1]", "--checks", "traces"],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and "fails" in proc.stdout
