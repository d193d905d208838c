import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from audel import cli
from audel.model import load_model, model_to_dict, to_dot
from audel.proofkit import soundness_suite
from audel.reduction import reduce_to_el
from audel.semantics import EvalContext
from audel.syntax import parse_formula, print_formula
from audel.testkit import GenConfig, bundled_data

DATA = bundled_data()
GOLDEN = Path(__file__).parent / "golden"

CASES = {
    "check_m0": ["check", "-m", str(DATA / "gruffalo" / "M0.json"), "-f", "~P[g] true"],
    "check_chain": ["check", "-m", str(DATA / "gruffalo" / "M0.json"),
                    "-f", "<U1@u1> <U2@u2> (P[f] P[g] true & ~P[f] P[o] P[g] true)"],
    "reduce_top": ["reduce", "-f", "<U4@v4> true", "--frames", str(DATA / "gruffalo")],
    "reduce_trace": ["reduce", "-f", "<U1@u1> P[f] P[g] true", "--frames", str(DATA / "gruffalo"), "--trace"],
    "sat_unsat": ["sat", "-f", "(p & ~p)"],
    "sat_oracle": ["sat", "-f", "P[i] p & ~B[i] P[i] p", "--oracle", "3"],
    "update_warden": ["update", "-m", str(DATA / "dorm" / "warden_model.json"),
                      "-u", str(DATA / "dorm" / "warden.json") + "@u"],
    "dot_john": ["dot", "-m", str(DATA / "dorm" / "john_model.json")],
    "scenario_john": ["scenario", "run", "dorm-john"],
    "gen_model": ["gen", "model", "--seed", "3"],
    "gen_formula": ["gen", "formula", "--seed", "10", "--depth", "2"],
}
CODES = {"sat_unsat": 1}


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, capsys):
    code, out, _ = run(CASES[name], capsys)
    assert code == CODES.get(name, 0)
    golden = GOLDEN / f"{name}.txt"
    if os.environ.get("AUDEL_REGOLD"):
        golden.write_text(out)
    assert out == golden.read_text()


def test_check_false_exits_one(capsys):
    code, out, _ = run(["check", "-m", str(DATA / "gruffalo" / "M0.json"), "-f", "P[g] true"], capsys)
    assert (code, out) == (1, "false\n")


def test_reduce_matches_library(capsys):
    f = "<U1@u1 + U2@u2> P[o] P[g] true"
    _, out, _ = run(["reduce", "-f", f, "--frames", str(DATA / "gruffalo")], capsys)
    el, _ = reduce_to_el(parse_formula(f), EvalContext(directory=DATA / "gruffalo"))
    assert out.strip() == print_formula(el)


def test_trace_lines_are_json(capsys):
    _, out, _ = run(CASES["reduce_trace"], capsys)
    lines = [json.loads(x) for x in out.splitlines()]
    assert lines[-1]["steps"] == len(lines) - 1
    assert {"position", "rule", "before", "after"} <= set(lines[0])


def test_update_writes_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(["update", "-m", str(DATA / "gruffalo" / "M0.json"),
                      "-u", str(DATA / "gruffalo" / "U1.json") + "@u1",
                      "-u", str(DATA / "gruffalo" / "U2.json") + "@u2", "-o", str(out)], capsys)
    assert code == 0
    m = load_model(out)
    assert m.designated == "(s,u1,u2)" and len(m.worlds) == 16


def test_update_precondition_failure(capsys):
    code, _, err = run(["update", "-m", str(DATA / "gruffalo" / "M0.json"),
                        "-u", str(DATA / "gruffalo" / "U4.json") + "@v4"], capsys)
    assert code == 1 and "precondition" in err


def test_sat_witness_file(tmp_path, capsys):
    w = tmp_path / "w.json"
    code, out, _ = run(["sat", "-f", "P[i] p & ~B[i] P[i] p", "--witness", str(w)], capsys)
    assert code == 0 and out == "SAT\n"
    m = load_model(w)
    assert cli.model_check(m, m.designated, parse_formula("P[i] p & ~B[i] P[i] p"))


def test_dot_matches_library(capsys):
    path = DATA / "dorm" / "tom_model.json"
    _, out, _ = run(["dot", "-m", str(path)], capsys)
    assert out == to_dot(load_model(path), "tom_model")


def test_soundness_matches_library(capsys):
    code, out, _ = run(["soundness", "--trials", "30", "--seed", "2"], capsys)
    report = json.loads(out)
    lib = soundness_suite(30, 2, GenConfig(seed=2))
    report.pop("elapsed_s"), lib.pop("elapsed_s")
    assert report == lib
    assert code == (0 if lib["failed_trials"] == 0 else 1)


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("AUDEL_SEED", "3")
    _, from_env, _ = run(["gen", "model"], capsys)
    _, explicit, _ = run(["gen", "model", "--seed", "3"], capsys)
    assert from_env == explicit
    monkeypatch.setenv("AUDEL_SEED", "x")
    assert run(["gen", "model"], capsys)[0] == 2


def test_scenario_failure_exit(tmp_path, capsys):
    sc = tmp_path / "bad.json"
    sc.write_text(json.dumps({
        "model": str(DATA / "dorm" / "warden_model.json"),
        "steps": [str(DATA / "dorm" / "warden.json") + "@u"],
        "assertions": [{"step": 1, "formula": "B[i] p", "expected": True}],
    }))
    code, out, _ = run(["scenario", "run", str(sc)], capsys)
    assert code == 1 and out.startswith("FAIL")


def test_scenario_list(capsys):
    code, out, _ = run(["scenario", "list"], capsys)
    assert code == 0 and "gruffalo" in out


@pytest.mark.parametrize("argv", [
    [],
    ["check", "-m", "/nonexistent.json", "-f", "true"],
    ["check", "-m", str(DATA / "gruffalo" / "M0.json"), "-f", "p &"],
    ["reduce", "-f", "<Nope@u> true"],
    ["update", "-m", str(DATA / "gruffalo" / "M0.json"), "-u", "nonsense"],
    ["sat", "-f", "<X@u> p"],
])
def test_usage_and_data_errors(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and err


def test_console_script_runs():
    out = subprocess.run([sys.executable, "-m", "audel.cli", "sat", "-f", "(p & ~p)"],
                         capture_output=True, text=True)
    assert out.returncode == 1 and out.stdout == "UNSAT\n"
