"""Command-line front end: outputs, exit codes and configuration."""
import csv
import io
import json

import pytest

from starflux.cli import EXIT_MATH, EXIT_OK, EXIT_USAGE, main, series_text
from starflux.formal import FormalScalar, GaussQ
from starflux.torus import TorusFun


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_flux_rotation_text():
    code, text = run("flux-rotation", "--v", "1,0", "--omega", "2,5", "--K", "3")
    assert code == EXIT_OK
    assert "deformed    (0, 1 - 2*nu - 5*nu^2)" in text


def test_flux_rotation_json():
    code, text = run("flux-rotation", "--v", "1,0", "--omega", "2,5", "--K", "3", "--json")
    data = json.loads(text)
    assert code == EXIT_OK and data["match"] is True
    second = data["deformed"][1]
    assert [c["re"] for c in second] == [[1, 1], [-2, 1], [-5, 1], [0, 1]]
    assert all(c["im"] == [0, 1] for c in second)


def test_output_is_byte_stable():
    argv = ("flux-rotation", "--v", "0,1", "--omega", "1/2,-3", "--K", "3", "--json")
    assert run(*argv) == run(*argv)


def test_star_table_empty_and_small():
    assert run("star-table", "--modes", "") == (EXIT_OK, "(empty table)\n")
    code, text = run("star-table", "--modes", "1,0;0,1", "--product", "moyal", "--K", "2", "--json")
    rows = json.loads(text)["table"]
    assert code == EXIT_OK and len(rows) == 12
    row = next(r for r in rows if r["m"] == [1, 0] and r["n"] == [0, 1] and r["r"] == 1)
    assert row["value"] == [{"mode": [1, 1], "coeff": {"re": [1, 2], "im": [0, 1]}}]


def test_oracle_gate():
    code, text = run("fedosov-vs-moyal", "--K", "2", "--modes", "1", "--json")
    assert code == EXIT_OK and json.loads(text)["mismatches"] == []


def test_associativity_check():
    code, text = run("associativity-check", "--K", "2", "--trials", "2", "--seed", "5")
    assert code == EXIT_OK and "0 non-associative" in text


def test_gamma_table(tmp_path):
    sweep = tmp_path / "sweep.json"
    sweep.write_text(json.dumps([[1, 0], ["1/2", -3]]))
    code, text = run("gamma-table", "--omega-sweep", str(sweep), "--K", "3")
    rows = list(csv.reader(io.StringIO(text)))
    assert code == EXIT_OK
    assert rows[0] == ["omega", "loop", "period_1", "period_2"]
    assert rows[3] == ["1/2;-3", "1,0", "0", "1 - 1/2*nu + 3*nu^2"]


def test_heisenberg_demo(tmp_path):
    nu = FormalScalar.nu(2)
    H = TorusFun({(1, 0): nu, (-1, 0): nu}, 2, 2)
    path = tmp_path / "H.json"
    path.write_text(json.dumps(H.to_json()))
    code, text = run("heisenberg-demo", "--H", str(path), "--K", "2", "--probe-bound", "1", "--product", "moyal")
    assert code == EXIT_OK
    assert "A_1 e(1, 0) = (1) e(1, 0)" in text


def test_heisenberg_demo_rejects_classical_hamiltonian(tmp_path):
    path = tmp_path / "H.json"
    path.write_text(json.dumps(TorusFun({(1, 0): 1}, 2, 2).to_json()))
    code, _ = run("heisenberg-demo", "--H", str(path), "--K", "2", "--product", "moyal")
    assert code == EXIT_USAGE


def test_equiv_check(tmp_path):
    T = tmp_path / "T.json"
    T.write_text(json.dumps({"terms": [{"r": 1, "mu": [2, 0], "coeff": [1, 1]},
                                       {"r": 1, "mu": [1, 1], "coeff": [2, 1]}]}))
    code, text = run("equiv-check", "--T", str(T), "--loop", "0,1", "--omega", "2,5", "--K", "3", "--json")
    data = json.loads(text)
    assert code == EXIT_OK and data["match"] and data["flux"] == data["flux_transported"]


def test_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"K": 3, "omega": [[1, 2], 3], "christoffel": {"0,0,1": 2}}))
    code, text = run("flux-rotation", "--config", str(cfg), "--v", "1,0")
    assert code == EXIT_OK and "match       True" in text


@pytest.mark.parametrize("argv", [
    ("flux-rotation", "--v", "1,0", "--omega", "1,2,3,4", "--K", "3"),
    ("flux-rotation", "--v", "1,x"),
    ("flux-rotation", "--v", "1,0", "--K", "0"),
    ("nonsense",),
    ("flux-rotation",),
])
def test_usage_errors(argv, capsys):
    assert run(*argv)[0] == EXIT_USAGE


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"K": 3, "colour": "blue"}))
    assert run("flux-rotation", "--config", str(cfg), "--v", "1,0")[0] == EXIT_USAGE


def test_acceptance_subset_reports_and_fails_on_sign():
    code, text = run("acceptance", "--K", "3", "--criteria", "1,10", "--json")
    data = json.loads(text)
    assert code == EXIT_MATH
    c1, c10 = data["criteria"]
    assert c10["pass"] and not c1["pass"]
    failed = [k for k, v in c1["checks"].items() if not v]
    assert failed and all("d/dtheta2" in k for k in failed)


def test_series_text():
    assert series_text(FormalScalar([1, -2, -5], 3)) == "1 - 2*nu - 5*nu^2"
    assert series_text(FormalScalar([0, 1, GaussQ(0, 1)], 2)) == "nu + 1*I*nu^2"
