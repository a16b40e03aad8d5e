import io
import subprocess
import sys
from pathlib import Path

import pytest

from choicelab import cli, reproduce

DATA = Path(__file__).parent / "data"


def run(*argv):
    out = io.StringIO()
    code = cli.run(list(argv), out)
    return code, out.getvalue()


def test_compute_cycle():
    code, text = run("compute", "--scf", "mc,bp", "--in", str(DATA / "cycle3.prof"))
    assert code == 0
    assert text == "mc: a b c\nbp: a b c\n"


def test_compute_machine_format():
    code, text = run("compute", "--scf", "copeland", "--in", str(DATA / "mixed.prof"), "--format", "machine")
    assert code == 0 and text == "copeland\t1\n"


def test_compute_undefined_plurality():
    code, text = run("compute", "--in", str(DATA / "mixed.prof"))
    assert code == 0 and "plurality: undefined" in text
    code, _ = run("compute", "--scf", "plurality", "--in", str(DATA / "mixed.prof"))
    assert code == 2


def test_axioms_command():
    code, text = run("axioms", "--scf", "topcycle", "--axiom", "setmono", "--n", "3", "--m", "3", "--mode", "strict")
    assert code == 0
    assert "verdict: pass" in text and "instances: 216" in text


def test_expected_failures_exit_zero():
    code, text = run("axioms", "--scf", "borda", "--axiom", "setmono", "--n", "3", "--m", "3", "--mode", "strict")
    assert code == 0 and "verdict: fail" in text


def test_manipulate_from_file():
    code, text = run("manipulate", "--scf", "copeland", "--in", str(DATA / "cycle3.prof"), "--pref", "strict", "--misreport", "any")
    assert code == 0


def test_participation_command():
    code, text = run("participation", "--scf", "mc", "--n", "1", "--m", "3", "--mode", "strict", "--format", "machine")
    assert code == 0 and '"verdict": "pass"' in text


def test_enumerate():
    code, text = run("enumerate", "--n", "2", "--m", "3", "--mode", "weak")
    assert code == 0
    assert "relations: 13\n" in text and "profiles: 169\n" in text


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["axioms", "--scf", "mc"],
        ["compute", "--scf", "nope", "--in", str(DATA / "cycle3.prof")],
        ["compute", "--in", "/nonexistent/file.prof"],
        ["axioms", "--n", "2", "--m", "3", "--samples", "5"],
        ["reproduce", "thm1", "--scf", "copeland", "--bless"],
    ],
)
def test_usage_errors(argv, capsys):
    code, _ = run(*argv)
    assert code == 2


def test_reproduce_filtered():
    code, text = run("reproduce", "thm1", "--scf", "copeland", "--m", "3")
    assert code == 0
    assert "witness: manipulation" in text and text.endswith("thm1: matches golden\n")


@pytest.mark.parametrize("target", ["thm1", "thm3", "prop3"])
def test_reproduce_matches_golden(target):
    code, text = run("reproduce", target)
    assert code == 0, text


def test_reproduce_mismatch_and_bless(tmp_path, monkeypatch):
    fake = tmp_path / "thm1.txt"
    fake.write_text("stale\n")
    monkeypatch.setattr(reproduce, "golden_path", lambda target: tmp_path / f"{target}.txt")
    code, text = run("reproduce", "thm1", "--m", "3")
    assert code == 1 and "MISMATCH" in text
    code, _ = run("reproduce", "thm1", "--bless")
    assert code == 0
    assert fake.read_text() == reproduce.run_target("thm1")
    code, _ = run("reproduce", "thm1")
    assert code == 0


def test_missing_golden(tmp_path, monkeypatch):
    monkeypatch.setattr(reproduce, "golden_path", lambda target: tmp_path / f"{target}.txt")
    code, text = run("reproduce", "thm1", "--m", "3")
    assert code == 1 and "run with --bless" in text


def test_console_script_is_byte_stable():
    argv = [sys.executable, "-m", "choicelab.cli", "manipulate", "--scf", "copeland", "--n", "2", "--m", "3",
            "--mode", "weak", "--format", "machine"]
    first = subprocess.run(argv, capture_output=True, check=False)
    second = subprocess.run(argv, capture_output=True, check=False)
    assert first.returncode == 0 and first.stdout and first.stdout == second.stdout
