import json

import jsonschema
import pytest

from approxsym.cli import EXIT_DIFF, EXIT_ERROR, EXIT_OK, load_schema, main
from approxsym.grammar import parse, to_text
from approxsym.symbolic import normalize


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "json")
    data = json.loads(out)
    return code, data, out


@pytest.mark.parametrize("command", ["symmetries", "algebra", "adjoint", "optimal", "invariants"])
def test_preset_json_validates_and_reports_diffs(capsys, command):
    code, data, _ = run_json(capsys, command, "--preset", "harry-dym")
    jsonschema.validate(data, load_schema(command))
    assert code == EXIT_DIFF
    assert data["reference_diff"]


def test_json_is_byte_stable(capsys):
    first = run_json(capsys, "algebra", "--seed", "0")[2]
    second = run_json(capsys, "algebra", "--seed", "0")[2]
    assert first == second


def test_symmetries_counts_and_round_trip(capsys):
    _, data, _ = run_json(capsys, "symmetries")
    assert len(data["exact"]) == 5 and len(data["approximate"]) == 10
    assert all(data["stable"]) and all(data["approximate_residual_zero"])
    for f in data["exact"] + data["approximate"]:
        for key in ("xi", "tau", "phi"):
            assert to_text(parse(f[key])) == f[key]
            assert normalize(parse(to_text(parse(f[key])))) == normalize(parse(f[key]))


def test_custom_equation_smoke(capsys):
    code, out, _ = run(capsys, "symmetries", "--pde", "u_t + u*u_x", "--perturb", "u_xx",
                       "--ansatz-deg", "2")
    assert code == EXIT_OK
    assert "== approximate symmetries ==" in out


def test_algebra_text_annotates_v2_v4(capsys):
    _, out, _ = run(capsys, "algebra")
    assert "[v2,v4]: published 12*v2 | derived 3*v2" in out
    assert "radical = span{v2, v4, v6, v7, v8, v9, v10}" in out


def test_empty_basis_is_an_error(capsys):
    code, _, err = run(capsys, "algebra", "--pde", "u_t - x*t*u*u_xx", "--ansatz-deg", "0")
    assert code == EXIT_ERROR
    assert "empty basis" in err


def test_non_polynomial_equation_is_an_error(capsys):
    code, _, err = run(capsys, "symmetries", "--pde", "u_t - exp(u)*u_xx")
    assert code == EXIT_ERROR and "not polynomial" in err


def test_adjoint_spot_entry(capsys):
    _, data, _ = run_json(capsys, "adjoint")
    assert data["entries"][2][0] == "exp(mu)*v1"
    assert data["identity_at_zero"]


def test_optimal_vector(capsys):
    code, data, _ = run_json(capsys, "optimal", "--vector", "0,0,0,0,0,0,0,1,0,0")
    jsonschema.validate(data, load_schema("optimal"))
    assert code == EXIT_OK
    assert data["family"] == 1 and data["trace"] == "scale 1\n"


def test_optimal_zero_vector(capsys):
    code, _, err = run(capsys, "optimal", "--vector", "0,0,0,0,0,0,0,0,0,0")
    assert code == EXIT_ERROR and "zero vector" in err


def test_optimal_bad_vector(capsys):
    code, _, err = run(capsys, "optimal", "--vector", "1,2")
    assert code == EXIT_ERROR and "10 entries" in err


def test_invariants_single_generator(capsys):
    code, data, _ = run_json(capsys, "invariants", "--generator", "v7 + a*v8")
    assert code == EXIT_OK
    (row,) = data["rows"]
    assert row["derived"][1] == "u/x" and row["derived_ok"]


def test_invariants_out_of_catalog(capsys):
    code, _, err = run(capsys, "invariants", "--generator", "v4")
    assert code == EXIT_ERROR
    assert "not in catalog" in err and "verify_invariant" in err


def test_parse_error_has_position(capsys):
    code, _, err = run(capsys, "symmetries", "--pde", "u_t + *u")
    assert code == EXIT_ERROR and "line 1, column 7" in err


def test_conflicting_sources(capsys):
    code, _, err = run(capsys, "symmetries", "--pde", "u_t + u_xx", "--preset", "harry-dym")
    assert code == EXIT_ERROR


def test_color_can_be_disabled(capsys, monkeypatch):
    monkeypatch.setenv("APPROXSYM_COLOR", "0")
    _, out, _ = run(capsys, "adjoint")
    assert "\033[" not in out


def test_latex_outputs(capsys):
    assert r"\begin{array}" in run(capsys, "adjoint", "--format", "latex")[1]
    assert r"\begin{tabular}" in run(capsys, "invariants", "--format", "latex")[1]
    assert r"\mathbf{v}_{2}" in run(capsys, "algebra", "--format", "latex")[1]
