import json
import shutil
import subprocess
import sys

import pytest

from effects_lab import checks, cli
from effects_lab.report import Report, record


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_demo_m1m2_json(capsys):
    code, out, _ = run(capsys, "demo", "m1m2", "--format", "json")
    assert code == 0
    body = json.loads(out)
    assert body["verdict"] == "pass"
    for rec in body["records"]:
        assert list(rec)[:4] == ["check", "verdict", "witness", "seed"]
        assert rec["verdict"] in ("pass", "fail", "info")


def test_sobrify_codiscrete_has_one_point(capsys):
    code, out, _ = run(capsys, "sobrify", "--space", "codiscrete2", "--monad", "giry", "--format", "json")
    assert code == 0
    info = json.loads(out)["records"][0]
    assert info["details"]["points"] == 1


def test_repeat_runs_are_identical(capsys):
    first = run(capsys, "chain", "--kernels", "50", "--seed", "7", "--format", "json")
    second = run(capsys, "chain", "--kernels", "50", "--seed", "7", "--format", "json")
    assert first == second and first[0] == 0
    assert '"seed": 7' in first[1]


def test_usage_errors_exit_2(capsys):
    code, _, err = run(capsys, "classify", "no-such-kernel")
    assert code == 2 and "effects-lab: error:" in err and "no-such-kernel" in err
    code, _, _ = run(capsys, "sobrify", "--space", "bool")
    assert code == 2
    code, _, _ = run(capsys, "frobnicate")
    assert code == 2
    code, _, err = run(capsys, "laws", "--corpus", "/nonexistent/x.lab")
    assert code == 2


def test_check_failure_exits_1(capsys, monkeypatch):
    def failing(*args, **kw):
        return Report("stub", [record("fine", True), record("broken", False, witness={"x": 1})])

    monkeypatch.setattr(checks, "cmd_classify", failing)
    code, out, err = run(capsys, "classify")
    assert code == 1
    assert "[FAIL] broken" in out
    assert "first failure: broken" in err


def test_text_report_and_timing(capsys):
    code, out, _ = run(capsys, "classify", "coin", "drop")
    assert code == 0 and out.startswith("== ") and "verdict: pass" in out
    assert "elapsed" not in out
    code, out, _ = run(capsys, "classify", "coin", "--timing")
    assert "elapsed:" in out


def test_corpus_config_supplies_defaults(tmp_path, capsys):
    lab = tmp_path / "c.lab"
    lab.write_text("config { seed = 11 }\nspace bool { kind = set; points = [ff, tt] }\n")
    code, out, _ = run(capsys, "thunkdet", "--kernels", "5", "--corpus", str(lab), "--format", "json")
    assert code == 0
    seeds = {r["seed"] for r in json.loads(out)["records"]} - {None}
    assert seeds == {11}


@pytest.mark.skipif(shutil.which("effects-lab") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["effects-lab", "equiv", "h-every", "h-once"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "2" in proc.stdout


def test_module_entry():
    proc = subprocess.run([sys.executable, "-m", "effects_lab.cli", "demo", "nope"], capture_output=True, text=True)
    assert proc.returncode == 2
