import json
import subprocess
import sys

import pytest

from orlicz_kit.cli import SCHEMA, main

SQUARE = '{"kind": "power", "p": 2}'


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, *argv):
    code, out = run(capsys, *argv)
    return code, json.loads(out)


def test_eval(capsys):
    code, doc = run_json(capsys, "eval", "--fn", '{"kind":"max_powers","p":1,"q":2}', "--u", "[0, 0.5, 2]")
    assert code == 0
    assert doc["schema"] == SCHEMA
    assert doc["tolerance"]["grid_points"] == 2048
    assert doc["result"]["value"] == [0.0, 0.5, 4.0]


def test_inverse(capsys):
    code, doc = run_json(capsys, "inverse", "--fn", SQUARE, "--y", "9")
    assert code == 0 and doc["result"]["u"] == pytest.approx(3.0)


def test_grid_points_flag_is_recorded(capsys):
    code, doc = run_json(capsys, "indices", "--fn", SQUARE, "--grid-points", "128")
    assert doc["tolerance"]["grid_points"] == 128
    assert doc["result"]["chord_min"] == pytest.approx(2.0)


def test_check_delta_conditions(capsys):
    _, doc = run_json(capsys, "check-delta", "--fn", SQUARE)
    assert doc["result"]["constant"] == pytest.approx(4.0)
    _, doc = run_json(capsys, "check-delta", "--fn", SQUARE, "--condition", "delta_star_p", "--exponent", "3")
    assert doc["result"]["holds"] is False
    _, doc = run_json(capsys, "check-delta", "--fn", '{"kind":"exp_minus_one"}', "--regime", "large:1")
    assert doc["result"]["holds"] is False


def test_regularize(capsys):
    code, doc = run_json(capsys, "regularize", "--fn", SQUARE, "--mode", "convex", "--exponent", "1",
                         "--grid-points", "128")
    assert code == 0
    assert doc["result"]["psi"]["kind"] == "table"
    assert doc["result"]["report"]["shape_holds"] is True


def test_conjugate_marks_finite_domain(capsys):
    _, doc = run_json(capsys, "conjugate", "--fn", '{"kind":"power","p":1}', "--grid-points", "64")
    assert doc["result"]["u_inf"] == pytest.approx(1.0)
    _, doc = run_json(capsys, "conjugate", "--fn", SQUARE, "--grid-points", "64")
    assert doc["result"]["u_inf"] == "inf"


def test_norm_and_rademacher(capsys):
    vec = '{"space": {"kind": "discrete", "n": 2}, "coeffs": [3, -4]}'
    _, doc = run_json(capsys, "norm", "--fn", SQUARE, "--vec", vec)
    assert doc["result"]["norm"] == pytest.approx(5.0)
    fam = '{"space": {"kind": "discrete"}, "vectors": [[1], [1]]}'
    _, doc = run_json(capsys, "rademacher", "--fn", SQUARE, "--vec", fam)
    assert doc["result"]["mean"] == pytest.approx(1.0)


def test_probe_json_and_csv(capsys):
    code, doc = run_json(capsys, "probe", "--fn", SQUARE, "--property", "cotype", "--exponent", "2",
                         "--count", "10", "--moment", "2", "--seed", "4")
    assert code == 0
    assert doc["seed"] == 4
    assert doc["result"]["best_ratio"] == pytest.approx(1.0)
    code, out = run(capsys, "probe", "--fn", SQUARE, "--property", "type", "--exponent", "2",
                    "--count", "10", "--out", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "instance,ratio"
    assert len(lines) > 10


def test_csv_rejected_for_non_tabular_output(capsys):
    code, doc = run_json(capsys, "eval", "--fn", SQUARE, "--u", "1", "--out", "csv")
    assert code == 2 and "error" in doc


def test_counterexample_kinds(capsys):
    code, doc = run_json(capsys, "counterexample", "--fn", SQUARE, "--kind", "lower-estimate",
                         "--exponent", "1", "--n", "3")
    assert code == 0 and doc["result"]["meta"]["a_n"] == 8
    code, doc = run_json(capsys, "counterexample", "--fn", '{"kind":"power","p":1}', "--kind", "type-failure",
                         "--exponent", "2", "--s", "1", "--n", "2")
    assert code == 0 and doc["result"]["sum_norm"] == pytest.approx(1.0)
    code, doc = run_json(capsys, "counterexample", "--fn", '{"kind":"exp_minus_one"}', "--kind", "linfty",
                         "--m", "3")
    assert code == 0 and len(doc["result"]["vectors"]) == 3


def test_exit_code_malformed_json(capsys):
    code, doc = run_json(capsys, "eval", "--fn", "{not json", "--u", "1")
    assert code == 1
    assert doc["error"]["type"] == "malformed_json"


def test_exit_code_domain_error(capsys):
    code, doc = run_json(capsys, "eval", "--fn", SQUARE, "--u", "-1")
    assert code == 2 and doc["error"]["type"] == "DomainError"
    code, doc = run_json(capsys, "eval", "--fn", '{"kind": "nope"}', "--u", "1")
    assert code == 2


def test_exit_code_precondition_and_size(capsys):
    fam = '{"space": {"kind": "discrete"}, "vectors": [[1, 1], [1, 0]]}'
    code, doc = run_json(capsys, "probe", "--fn", SQUARE, "--property", "upper_estimate", "--exponent", "2",
                         "--count", "0", "--vec", fam)
    assert code == 2 and doc["error"]["type"] == "PreconditionError"
    many = json.dumps({"space": {"kind": "discrete"}, "vectors": [[1, 1]] * 6})
    code, doc = run_json(capsys, "rademacher", "--fn", SQUARE, "--vec", many, "--cap", "4")
    assert code == 2 and doc["error"]["type"] == "SizeError"


def test_exit_code_search_failed(capsys):
    code, doc = run_json(capsys, "counterexample", "--fn", SQUARE, "--kind", "linfty", "--m", "2",
                         "--grid-points", "128")
    assert code == 3 and doc["error"]["type"] == "search_failed"


def test_function_json_from_file(tmp_path, capsys):
    p = tmp_path / "f.json"
    p.write_text(SQUARE)
    code, doc = run_json(capsys, "eval", "--fn", f"@{p}", "--u", "3")
    assert code == 0 and doc["result"]["value"] == 9.0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "orlicz_kit", "eval", "--fn", SQUARE, "--u", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["value"] == 4.0
