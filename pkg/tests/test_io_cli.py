import json
import subprocess
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from epatlas.cli import main, parse_kv, tolerances
from epatlas.errors import ParseError
from epatlas.io import dumps, load_matrix, matrix_from_csv, matrix_from_json, matrix_to_csv, matrix_to_json
from epatlas.models import h42_ep

FIXTURES = Path(__file__).parent / "fixtures"

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


def schema(name):
    return json.loads(resources.files("epatlas").joinpath("schemas", f"{name}.json").read_text())


def cli(capsys, *argv, env=None):
    code = main(list(argv), env=env or {})
    out, err = capsys.readouterr()
    return code, out, err


# ------------------------------------------------------------------ io


@given(arrays(complex, (3, 3), elements=st.complex_numbers(max_magnitude=1e6, allow_nan=False)))
def test_json_round_trip(M):
    back = matrix_from_json(json.loads(dumps(matrix_to_json(M))))
    assert np.array_equal(back, M)


@given(arrays(float, (4, 4), elements=finite), arrays(float, (4, 4), elements=finite))
def test_csv_round_trip(re, im):
    M = re + 1j * im
    assert np.array_equal(matrix_from_csv(matrix_to_csv(M)), M)


def test_json_matches_schema():
    jsonschema.validate(matrix_to_json(h42_ep()), schema("matrix"))


def test_load_fixtures():
    for name in ("h42_ep.json", "h42_ep.csv"):
        assert np.array_equal(load_matrix(FIXTURES / name), h42_ep())


def test_well_formed_2x2(tmp_path):
    p = tmp_path / "m.json"
    p.write_text('{"rows": 2, "cols": 2, "entries": [[1, 0], [2, 0], [0, 1], [4, -1]]}')
    assert np.array_equal(load_matrix(p), np.array([[1, 2], [1j, 4 - 1j]]))


def test_csv_nan_names_cell(tmp_path):
    p = tmp_path / "m.csv"
    p.write_text("i,j,re,im\n0,0,1,0\n0,1,nan,0\n1,0,0,0\n1,1,1,0\n")
    with pytest.raises(ParseError, match=r"line 3, field 3.*cell \(0,1\)"):
        load_matrix(p)


def test_json_nan_names_cell(tmp_path):
    p = tmp_path / "m.json"
    p.write_text('{"rows": 1, "cols": 2, "entries": [[1, 0], [NaN, 0]]}')
    with pytest.raises(ParseError, match=r"cell 0,1"):
        load_matrix(p)


@pytest.mark.parametrize("text, where", [
    ('{"rows": 2,\n "cols": 2, "entries": [1, }', "line 2"),
    ('{"rows": 2, "cols": 2}', "entries"),
    ('{"rows": 2, "cols": 2, "entries": [[1, 0]]}', "entries"),
    ('{"rows": 1, "cols": 2, "entries": [[1, 0], [2, 0]]}', "square"),
])
def test_json_errors(tmp_path, text, where):
    p = tmp_path / "m.json"
    p.write_text(text)
    with pytest.raises(ParseError, match=where):
        load_matrix(p)


@pytest.mark.parametrize("text, where", [
    ("0,0,1\n", "line 1"),
    ("i,j,re,im\n0,x,1,0\n", "line 2"),
    ("0,0,1,0\n0,1,abc,0\n", "line 2, field 3"),
    ("# rows=1 cols=1\n0,3,1,0\n", r"cell \(0,3\)"),
    ("", "no matrix"),
])
def test_csv_errors(text, where):
    with pytest.raises(ParseError, match=where):
        matrix_from_csv(text)


# ------------------------------------------------------------- helpers


def test_parse_kv_and_tolerances():
    assert parse_kv("tau=0.25, beta=-1e-3") == {"tau": 0.25, "beta": -1e-3}
    cfg = tolerances({"EPATLAS_TOL_RANK": "1e-10", "EPATLAS_MAX_ITER": "50"}, "residual=1e-6")
    assert cfg.rank_rel_tol == 1e-10 and cfg.max_iter == 50 and cfg.residual_tol == 1e-6
    cfg = tolerances({"EPATLAS_TOL_RANK": "1e-10"}, "rank=1e-9")
    assert cfg.rank_rel_tol == 1e-9


# ----------------------------------------------------------------- cli


def test_cli_jordan_h42(capsys):
    code, out, _ = cli(capsys, "jordan", "--model", "h42_ep")
    assert code == 0
    rep = json.loads(out)
    assert rep["blocks"] == [4, 2] and rep["geom_mult"] == 2
    assert np.allclose(rep["eta"], [0, 0], atol=1e-9)
    jsonschema.validate(rep, schema("jordan"))


def test_cli_jordan_fixture_file(capsys):
    code, out, _ = cli(capsys, "jordan", "--file", str(FIXTURES / "h42_ep.csv"))
    assert code == 0 and json.loads(out)["blocks"] == [4, 2]


def test_cli_spectrum_h6(capsys):
    code, out, _ = cli(capsys, "spectrum", "--model", "h6", "--params", "tau=0.25,beta=0")
    assert code == 0
    rep = json.loads(out)
    jsonschema.validate(rep, schema("spectrum"))
    got = sorted(complex(*z).real for z in rep["eigenvalues"])
    assert np.allclose(got, [-4.5, -1.5, -0.5, 0.5, 1.5, 4.5], atol=1e-9)


def test_cli_metric_ep_obstruction(capsys):
    code, out, err = cli(capsys, "metric", "--model", "h222_ep", "--params", "eps=0")
    assert code == 1 and out == ""
    line = json.loads(err)
    assert line["reason"] == "EP obstruction: non-diagonalizable input"
    jsonschema.validate(line, schema("error"))
    assert err.count("\n") == 1


@pytest.mark.parametrize("argv", [
    ["spectrum", "--model", "h6", "--params", "tau=0.1,gamma=1"],
    ["spectrum"],
    ["spectrum", "--model", "h222_ep", "--file", "x.json"],
    ["spectrum", "--model", "h222_ep", "--bogus"],
    ["nope"],
    ["spectrum", "--file", "missing-dir/none.json"],
    ["metric", "--model", "h6", "--params", "tau=0.25,beta=0", "--output", "csv"],
])
def test_cli_usage_errors(capsys, argv):
    code, out, err = cli(capsys, *argv)
    assert code == 2 and out == ""
    assert "reason" in json.loads(err)


def test_cli_model_domain_error(capsys):
    code, _, err = cli(capsys, "spectrum", "--model", "h6", "--params", "tau=2,beta=0")
    assert code == 1 and json.loads(err)["reason"]


def test_cli_not_found_is_domain_error(capsys):
    code, _, err = cli(capsys, "ep-locate", "--model", "h6", "--params", "beta=0", "--free", "tau",
                       "--bracket", "0.1,0.9")
    assert code == 1 and json.loads(err)["reason"]


def test_cli_bad_file(capsys, tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("0,0,inf,0\n")
    code, _, err = cli(capsys, "spectrum", "--file", str(p))
    assert code == 2 and "cell (0,0)" in json.loads(err)["error"]


SUBCOMMANDS = {
    "spectrum": ["--model", "h6", "--params", "tau=0.25,beta=0.01"],
    "jordan": ["--model", "h222_ep", "--params", "eps=0"],
    "transition": ["--model", "h42_ep"],
    "metric": ["--model", "h222_pert", "--params", "a=0,b=0.5,c=2.5"],
    "secular": ["--tau", "0.25", "--beta", "0.01"],
    "region-map": ["--steps", "5"],
    "sweep": ["--model", "h222_pert", "--params", "a=0", "--free", "b", "--tie", "c=5", "--range", "0,0.9",
              "--steps", "5"],
    "ep-locate": ["--model", "h222_tilde", "--params", "a=0", "--free", "b", "--bracket", "0.5,1.5"],
    "unfold": ["--model", "jordan_pert", "--params", "N=3", "--free", "g", "--ep", "0", "--g-range", "1e-2,1e-8"],
    "reality": ["--N", "3", "--mode", "generic", "--trials", "5", "--g-values", "1e-2,1e-4", "--seed", "3"],
    "locus": ["--model", "h6", "--free", "tau,beta", "--x-range", "0.01,1", "--y-range=-0.5,0.5", "--steps", "4"],
}


@pytest.mark.parametrize("command", sorted(SUBCOMMANDS))
def test_every_subcommand_matches_schema(capsys, command):
    code, out, err = cli(capsys, command, *SUBCOMMANDS[command])
    assert code == 0, err
    jsonschema.validate(json.loads(out), schema(command))


@pytest.mark.parametrize("command", sorted(SUBCOMMANDS))
def test_reports_are_deterministic(capsys, command):
    _, first, _ = cli(capsys, command, *SUBCOMMANDS[command])
    _, second, _ = cli(capsys, command, *SUBCOMMANDS[command])
    assert first == second


def test_cli_csv_output(capsys):
    code, out, _ = cli(capsys, "sweep", *SUBCOMMANDS["sweep"], "--output", "csv")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0].startswith("b,re_E0,im_E0") and len(lines) == 6
    code, out, _ = cli(capsys, "reality", *SUBCOMMANDS["reality"], "--output", "csv")
    assert out.split("\n")[0] == "g,fraction_real"


def test_cli_out_path(capsys, tmp_path):
    p = tmp_path / "report.json"
    code, out, _ = cli(capsys, "jordan", "--model", "h42_ep", "--out", str(p))
    assert code == 0 and out == ""
    assert json.loads(p.read_text())["blocks"] == [4, 2]


def test_cli_env_tolerance(capsys):
    # an absurd residual tolerance makes every eigenvalue count as real
    argv = ["locus", "--model", "h6", "--free", "tau,beta", "--x-range", "0.01,1", "--y-range=-0.5,0.5",
            "--steps", "3"]
    _, strict, _ = cli(capsys, *argv)
    _, loose, _ = cli(capsys, *argv, env={"EPATLAS_TOL_RESIDUAL": "1e3"})
    counts = [row[2] for row in json.loads(loose)["rows"]]
    assert set(counts) == {6} and strict != loose


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "epatlas", "jordan", "--model", "h42_tilde", "--params", "gamma=1"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and json.loads(res.stdout)["blocks"] == [6]
