import json
import subprocess
import sys

import pytest

from mixed3geo.cli import main

FAST = ["--points", "3", "--vectors", "2"]


def test_pass_exit_code_and_json(tmp_path):
    out = tmp_path / "r.json"
    code = main(["--suite", "einstein", "--model", "pseudo-sphere:1:+1", *FAST,
                 "--format", "json", "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["pass"] is True


def test_failure_exit_code(capsys):
    assert main(["--suite", "axioms", "--model", "pseudo-sphere:1:+1", *FAST, "--perturb", "g"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_negative_control_exit_code(capsys):
    assert main(["--suite", "contact-class", "--model", "flat-pq:1", *FAST]) == 1


@pytest.mark.parametrize("argv", [
    ["--suite", "einstein", "--model", "flat-pq:1"],
    ["--suite", "nope"],
    ["--model", "nowhere:1"],
    ["--tol", "einstein"],
    ["--tol", "bogus=1"],
    ["--suite", "scalar", "--model", "pseudo-sphere:1:+1", "--points", "0"],
])
def test_config_errors(argv, capsys):
    assert main(FAST + argv) == 2
    assert "error" in capsys.readouterr().err


def test_argparse_error_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["--format", "yaml"])
    assert exc.value.code == 2


def test_lists(capsys):
    assert main(["--list-models", "--list-suites"]) == 0
    out = capsys.readouterr().out
    assert "pseudo-sphere:1:+1" in out and "kashiwada" in out


def test_all_expansion_skips_inapplicable(capsys):
    code = main(["--suite", "einstein,domega", "--model", "all", *FAST, "--format", "json"])
    assert code == 0
    runs = json.loads(capsys.readouterr().out)
    pairs = {(r["suite"], r["model"]) for r in runs}
    assert ("einstein", "pseudo-sphere:1:+1") in pairs
    assert all(s != "domega" or m.startswith("product") for s, m in pairs)


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("MIXED3GEO_SEED", "11")
    main(["--suite", "scalar", "--model", "pseudo-sphere:1:+1", *FAST, "--format", "json"])
    assert json.loads(capsys.readouterr().out)["seed"] == 11
    monkeypatch.setenv("MIXED3GEO_SEED", "x")
    assert main(["--suite", "scalar", "--model", "pseudo-sphere:1:+1", *FAST]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mixed3geo", "--suite", "scalar", "--model",
                           "pseudo-sphere:1:-1", *FAST, "--format", "csv"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("suite,model,seed")
