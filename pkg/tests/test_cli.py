"""Command-line interface: subcommands, exit codes, determinism."""

import json

import pytest

from jethier.cli import InputError, main, parse_poly
from jethier.jetcalc import JetPoly

V = JetPoly.var


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


# ---------------------------------------------------------------------------
# expression parser
# ---------------------------------------------------------------------------

def test_parse_poly_basic():
    assert parse_poly("v") == V(1, 0)
    assert parse_poly("v2") == V(2, 0)
    assert parse_poly("1/2*v^2 + 3") == V(1, 0) ** 2 / 2 + 3
    assert parse_poly("-(v1 - v2)^2") == -((V(1, 0) - V(2, 0)) ** 2)
    assert parse_poly("w3") == V(3, 0)


def test_parse_poly_rejects_garbage():
    for bad in ("v +", "2 ** v", "v^^2", "(v", "x", "3/", "v^(1/2)"):
        with pytest.raises(InputError):
            parse_poly(bad)


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

def test_generate_kdv_contains_tabulated_entry(capsys):
    code, out = run(capsys, "generate", "kdv", "--pmax", "2", "--qmax", "2",
                    "--hbar", "2", "--format", "text")
    assert code == 0
    assert "1/6*w[1,0]^3 + hbar*(1/12*w[1,0]*w[1,2] + 1/24*w[1,1]^2)" \
           " + hbar^2*(1/240*w[1,4])" in out


def test_generate_principal_monomial_table(capsys):
    code, out = run(capsys, "generate", "principal", "--dim", "1",
                    "--hessian", '[["v"]]', "--pmax", "3", "--qmax", "0",
                    "--format", "text")
    assert code == 0
    assert "1.3.1.0: 1/24*w[1,0]^4" in out


def test_generate_tensor_block_diagonal(capsys):
    code, out = run(capsys, "generate", "kdv", "--tensor", "2", "--pmax", "1",
                    "--qmax", "1", "--hbar", "1")
    assert code == 0
    obj = json.loads(out)
    assert obj["dim"] == 2
    assert obj["entries"]["1.0.2.0"]["coeffs"] == [[], []]
    assert obj["entries"]["2.0.2.0"]["coeffs"][0] == [
        {"coeff": "1", "mono": [[2, 0, 1]]}]


def test_generate_malformed_hessian_exit2(capsys):
    code, _ = run(capsys, "generate", "principal", "--dim", "1",
                  "--hessian", '[["v +"]]')
    assert code == 2
    code, _ = run(capsys, "generate", "principal", "--dim", "1",
                  "--hessian", '[["v^2"]]')
    assert code == 2  # unit normalization fails


def test_generate_out_of_range_exit2(capsys):
    code, _ = run(capsys, "generate", "kdv", "--pmax", "5", "--qmax", "5",
                  "--hbar", "2")
    assert code == 2


def test_generate_byte_determinism(capsys):
    _, first = run(capsys, "generate", "kdv", "--pmax", "2", "--qmax", "2")
    _, second = run(capsys, "generate", "kdv", "--pmax", "2", "--qmax", "2")
    assert first == second


# ---------------------------------------------------------------------------
# deform
# ---------------------------------------------------------------------------

def write_gen(tmp_path, obj):
    path = tmp_path / "gen.json"
    path.write_text(json.dumps(obj))
    return str(path)


def test_deform_bracket_level1(tmp_path, capsys):
    path = write_gen(tmp_path, {"kind": "r", "level": 1, "matrix": [[1]]})
    code, out = run(capsys, "deform", "bracket", "--generator", path,
                    "--pmax", "2", "--hbar", "1")
    assert code == 0
    obj = json.loads(out)
    assert obj["all_pass"] is True
    assert all(r["nonzero_monomials"] == 0 for r in obj["residuals"])
    assert obj["skew_ok"] and obj["order0_ok"] and obj["homogeneity_ok"]


def test_deform_omega_symmetric(tmp_path, capsys):
    path = write_gen(tmp_path, {"kind": "r", "level": 1, "matrix": [[1]]})
    code, out = run(capsys, "deform", "omega", "--generator", path,
                    "--pmax", "1", "--qmax", "1", "--hbar", "1")
    assert code == 0
    obj = json.loads(out)
    assert obj["symmetric_ok"] and obj["homogeneity_ok"]


def test_deform_lower_zero_deformation(tmp_path, capsys):
    path = write_gen(tmp_path, {"kind": "s", "level": 1, "matrix": [[1]]})
    code, out = run(capsys, "deform", "bracket", "--generator", path,
                    "--pmax", "1", "--hbar", "1")
    assert code == 0
    obj = json.loads(out)
    assert obj["all_pass"] is True


def test_deform_invalid_generator_exit2(tmp_path, capsys):
    path = write_gen(tmp_path, {"kind": "r", "level": 2, "matrix": [[1]]})
    code, _ = run(capsys, "deform", "bracket", "--generator", path)
    assert code == 2
    path2 = write_gen(tmp_path, {"kind": "zz", "level": 1, "matrix": [[1]]})
    code, _ = run(capsys, "deform", "bracket", "--generator", path2)
    assert code == 2
    code, _ = run(capsys, "deform", "bracket", "--generator",
                  str(tmp_path / "missing.json"))
    assert code == 2


def test_deform_dimension_mismatch_exit2(tmp_path, capsys):
    path = write_gen(tmp_path, {"kind": "r", "level": 2,
                                "matrix": [[0, 1], [-1, 0]]})
    code, _ = run(capsys, "deform", "bracket", "--generator", path)
    assert code == 2


def test_deform_two_color(tmp_path, capsys):
    path = write_gen(tmp_path, {"kind": "r", "level": 2,
                                "matrix": [[0, 1], [-1, 0]]})
    code, out = run(capsys, "deform", "bracket", "--generator", path,
                    "--tensor", "2", "--pmax", "1", "--hbar", "1")
    assert code == 0
    assert json.loads(out)["all_pass"] is True


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def test_verify_lemmas_seeded(capsys):
    code, out = run(capsys, "verify", "lemmas", "--seed", "7",
                    "--count", "10")
    assert code == 0
    obj = json.loads(out)
    assert obj["ok"] is True
    assert obj["checks"][0]["detail"] == "10/10 zero residuals"


def test_verify_commutation(capsys):
    code, out = run(capsys, "verify", "commutation", "--pmax", "2")
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_verify_uniqueness(capsys):
    code, out = run(capsys, "verify", "uniqueness")
    assert code == 0
    assert json.loads(out)["ok"] is True


# ---------------------------------------------------------------------------
# dump
# ---------------------------------------------------------------------------

def test_dump_flows_text(capsys):
    code, out = run(capsys, "dump", "flows", "--format", "text")
    assert code == 0
    assert "dw/dt1: w[1,0]*w[1,1] + hbar*(1/12*w[1,3])" in out


def test_dump_hamiltonians(capsys):
    code, out = run(capsys, "dump", "hamiltonians", "--format", "text")
    assert code == 0
    assert "h-1: w[1,0]" in out


def test_dump_quasi_miura_roundtrip(capsys):
    code, out = run(capsys, "dump", "quasi-miura")
    assert code == 0
    obj = json.loads(out)
    assert obj["forward"]["trunc"] == 2


def test_deform_zero_generator_exit0(tmp_path, capsys):
    path = write_gen(tmp_path, {"kind": "r", "level": 2, "matrix": [[0]]})
    code, out = run(capsys, "deform", "bracket", "--generator", path,
                    "--pmax", "1", "--hbar", "1")
    assert code == 0
    assert json.loads(out)["all_pass"] is True


def test_deform_byte_determinism(tmp_path, capsys):
    path = write_gen(tmp_path, {"kind": "r", "level": 1, "matrix": [[1]]})
    argv = ("deform", "bracket", "--generator", path, "--pmax", "1",
            "--hbar", "1")
    _, first = run(capsys, *argv)
    _, second = run(capsys, *argv)
    assert first == second


@pytest.mark.parametrize("suite", ["lemmas", "commutation", "quasimiura",
                                   "homogeneity", "uniqueness",
                                   "defining-equation", "all"])
def test_verify_every_suite_passes(capsys, suite):
    code, out = run(capsys, "verify", suite, "--count", "5", "--pmax", "2")
    assert code == 0
    assert json.loads(out)["ok"] is True
