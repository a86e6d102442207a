from __future__ import annotations

import io
import json
import os
import shutil
import subprocess
from importlib import resources

import jsonschema
import pydot
import pytest

from schematic_ceres.cli import FAILED, OK, USAGE, Output, main


@pytest.fixture(scope="module")
def schema():
    text = (resources.files("schematic_ceres") / "schema" / "report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, schema, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    data = json.loads(out)
    jsonschema.validate(data, schema)
    return code, data, err


def parse_dot(text: str):
    graphs = pydot.graph_from_dot_data(text)
    assert graphs, text
    return graphs[0]


def test_check_ok(capsys, eca_path):
    code, out, _ = run(capsys, "check", eca_path)
    assert code == OK
    assert out.strip().endswith("ok")


def test_check_parse_error_exits_2(capsys, tmp_path):
    bad = tmp_path / "bad.lks"
    bad.write_text("(fun g (iota) iota)\n(oops\n", encoding="utf-8")
    code, _, err = run(capsys, "check", str(bad))
    assert code == USAGE
    assert "bad.lks:2:1" in err


def test_missing_file_exits_2(capsys, tmp_path):
    code, _, err = run(capsys, "check", str(tmp_path / "nope.lks"))
    assert code == USAGE and "cannot read" in err


def test_usage_errors(capsys, eca_path):
    assert run(capsys, "frobnicate")[0] == USAGE
    assert run(capsys, "refute", eca_path)[0] == USAGE
    assert run(capsys, "refute", eca_path, "--n", "-1")[0] == USAGE
    assert run(capsys, "report", eca_path, "--n-range", "zero")[0] == USAGE
    assert run(capsys, "refute", eca_path, "--n", "1", "--variant", "nosuch")[0] == USAGE


def test_refute_verify(capsys, eca_path):
    code, out, _ = run(capsys, "refute", eca_path, "--n", "2", "--k", "0", "--verify")
    assert code == OK
    assert out.strip().endswith("verified")
    assert "C7 level=2 omega=2,1" in out


def test_printed_variant_fails_with_hints(capsys, eca_path):
    code, _, err = run(capsys, "refute", eca_path, "--n", "1", "--variant", "printed")
    assert code == FAILED
    assert "rho4-step-shape" in err and "c7-bound" in err


def test_printed_variant_json(capsys, schema, eca_path):
    code, data, _ = run_json(capsys, schema, "refute", eca_path, "--n", "1", "--variant", "printed")
    assert code == FAILED
    assert data["verified"] is False
    assert any(d["hint"] and "rho8-params" in d["hint"] for d in data["diagnostics"])


def test_variant_diff(capsys, eca_path):
    code, out, _ = run(capsys, "refute", eca_path, "--n", "0", "--diff")
    assert code == OK
    assert out.startswith("---") and "rho4-base-shape" in out


def test_herbrand_exit_codes(capsys, eca_path):
    assert run(capsys, "herbrand", eca_path, "--n", "2", "--minimal", "--check")[0] == OK
    assert run(capsys, "herbrand", eca_path, "--n", "2", "--check", "--no-axioms")[0] == FAILED
    code, out, _ = run(capsys, "herbrand", eca_path, "--n", "1", "--check", "--axioms", "printed")
    assert code == FAILED and "NOT-PROVABLE" in out


@pytest.mark.parametrize("argv", [
    ("check", "{path}"),
    ("unfold-proof", "{path}", "--n", "1"),
    ("clauseset", "{path}", "--n", "1", "--reduce"),
    ("refute", "{path}", "--n", "1", "--verify"),
    ("herbrand", "{path}", "--n", "1", "--check"),
    ("report", "{path}", "--n-range", "0..1", "--timings"),
])
def test_json_outputs_match_schema(capsys, schema, eca_path, argv):
    argv = [a.format(path=eca_path) for a in argv]
    code, data, _ = run_json(capsys, schema, *argv)
    assert code == OK
    assert data["command"] == argv[0]


def test_json_output_is_stable(capsys, eca_path):
    first = run(capsys, "refute", eca_path, "--n", "2", "--verify", "--format", "json")[1]
    second = run(capsys, "refute", eca_path, "--n", "2", "--verify", "--format", "json")[1]
    assert first == second


def test_report_rows_in_order(capsys, schema, eca_path):
    code, data, _ = run_json(capsys, schema, "report", eca_path, "--n-range", "0..3", "--jobs", "3")
    assert code == OK
    assert [r["gamma"] for r in data["instances"]] == [0, 1, 2, 3]
    assert [r["clause_set_size"] for r in data["instances"]] == [5, 7, 9, 11]
    assert all("timings_us" not in r for r in data["instances"])


@pytest.mark.parametrize("argv", [
    ("check", "{path}"),
    ("unfold-proof", "{path}", "--n", "1"),
    ("clauseset", "{path}", "--n", "1"),
    ("refute", "{path}", "--n", "2"),
    ("herbrand", "{path}", "--n", "1", "--check", "--minimal"),
    ("report", "{path}", "--n-range", "0..2"),
])
def test_dot_outputs_parse(capsys, eca_path, argv):
    argv = [a.format(path=eca_path) for a in argv]
    code, out, _ = run(capsys, *argv, "--format", "dot")
    assert code == OK
    g = parse_dot(out)
    assert g.get_nodes() or g.get_edges()


def test_rho_graph_edges(capsys, eca_path):
    out = run(capsys, "check", eca_path, "--format", "dot")[1]
    g = parse_dot(out)
    edges = {(e.get_source(), e.get_destination()) for e in g.get_edges()}
    assert ("rho9", "rho5") in edges and ("rho5", "rho5") in edges and len(edges) == 12


def test_dot_for_herbrand_needs_check(capsys, eca_path):
    assert run(capsys, "herbrand", eca_path, "--n", "1", "--format", "dot")[0] == USAGE


def test_out_writes_file(capsys, eca_path, tmp_path):
    target = tmp_path / "tree.json"
    code, out, _ = run(capsys, "refute", eca_path, "--n", "1", "--format", "json", "--out", str(target))
    assert code == OK and out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["command"] == "refute"


class _Tty(io.StringIO):
    def isatty(self) -> bool:
        return True


def test_colour_only_on_tty_without_no_color(monkeypatch):
    monkeypatch.setattr("sys.stdout", _Tty())
    monkeypatch.delenv("NO_COLOR", raising=False)
    assert "\033[" in Output(None).paint("ok", True)
    monkeypatch.setenv("NO_COLOR", "1")
    assert Output(None).paint("ok", True) == "ok"
    monkeypatch.delenv("NO_COLOR")
    assert Output("file.txt").paint("ok", True) == "ok"


def test_piped_output_has_no_escapes(capsys, eca_path):
    out = run(capsys, "refute", eca_path, "--n", "1", "--verify")[1]
    assert "\033[" not in out


@pytest.mark.skipif(shutil.which("schematic-ceres") is None, reason="console script not installed")
def test_console_script(eca_path):
    env = {**os.environ, "NO_COLOR": "1"}
    proc = subprocess.run(["schematic-ceres", "check", eca_path], capture_output=True, text=True, env=env)
    assert proc.returncode == 0
    assert proc.stdout.strip().endswith("ok")
