import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gcelab import io
from gcelab.blaschke import BlaschkeProduct
from gcelab.cli import main
from gcelab.grid import ScalarField, make_grid
from gcelab.holo import holofn_from_dict

R2_PROBLEM = {
    "H": {"kind": "poly", "coeffs": [[1.0, 0.0]]},
    "h": {"kind": "constant", "value": float(np.log(4 / 3))},
    "grid": {"n_r": 64, "n_theta": 128, "refinement": 2.0},
    "tol": 1e-8,
    "max_iter": 60,
}


def strip_time(obj):
    if isinstance(obj, dict):
        return {k: strip_time(v) for k, v in obj.items() if k != "wall_time"}
    if isinstance(obj, list):
        return [strip_time(v) for v in obj]
    return obj


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return p


def test_solve_closed_form(tmp_path):
    cfg = write(tmp_path, "prob.json", R2_PROBLEM)
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path / "out")]) == 0
    rep = io.read_json(tmp_path / "out" / "report.json")
    assert rep["converged"] and rep["pde_residual"] <= 1e-3
    assert {"grid", "tolerances", "seed", "wall_time"} <= rep.keys()
    u = io.read_field(tmp_path / "out" / "u.csv", make_grid(64, 128, 2.0))
    z = u.grid.points
    assert np.max(np.abs(u.values - np.log(4 / (4 - np.abs(z) ** 2)))) <= 1e-3


def test_solve_is_deterministic(tmp_path):
    cfg = write(tmp_path, "prob.json", R2_PROBLEM)
    for d in ("a", "b"):
        assert main(["solve", "--config", str(cfg), "--out", str(tmp_path / d), "--grid", "16x32"]) == 0
    a, b = (io.read_json(tmp_path / d / "report.json") for d in "ab")
    assert strip_time(a) == strip_time(b)
    assert (tmp_path / "a" / "u.csv").read_bytes() == (tmp_path / "b" / "u.csv").read_bytes()


def test_solve_non_convergence(tmp_path):
    cfg = write(tmp_path, "prob.json", {**R2_PROBLEM, "max_iter": 1})
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path), "--grid", "16x32"]) == 3


@pytest.mark.parametrize(
    "payload",
    ["{not json", {"H": {"kind": "poly", "coeffs": [[0, 0]]}, "h": {"kind": "constant", "value": 0}},
     {"H": {"kind": "nope"}, "h": {"kind": "constant", "value": 0}}, {"h": {"kind": "constant", "value": 0}}],
)
def test_invalid_input(tmp_path, payload):
    cfg = write(tmp_path, "bad.json", payload)
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path), "--grid", "16x32"]) == 2


def test_bad_flags(tmp_path):
    assert main(["solve", "--tol", "-1"]) == 2
    assert main(["frobnicate"]) == 2
    assert main(["heins", "--critical", "0.3+zi", "--out", str(tmp_path)]) == 2
    assert main(["lp", "--grid", "12by4", "--config", str(write(tmp_path, "f.json", {"f": {"kind": "poly", "coeffs": [[1, 0]]}}))]) == 2


def test_heins_z_squared(tmp_path):
    assert main(["heins", "--critical", "0.0+0.0i", "--out", str(tmp_path)]) == 0
    B = holofn_from_dict(io.read_json(tmp_path / "blaschke.json"))
    assert B == BlaschkeProduct((0, 0), 0.0)


def test_heins_report(tmp_path):
    assert main(["heins", "--critical", "0.2-0.1i,-0.3i", "--out", str(tmp_path), "--seed", "5"]) == 0
    rep = io.read_json(tmp_path / "report.json")
    assert rep["seed"] == 5 and rep["max_distance"] <= 1e-6
    assert all(r["abs_deriv"] <= 1e-10 for r in rep["residuals"])


def test_maximal_and_canonical(tmp_path):
    cfg = write(tmp_path, "H.json", {"H": {"kind": "poly", "coeffs": [[0, 0], [1, 0]]}})
    assert main(["maximal", "--config", str(cfg), "--out", str(tmp_path / "m")]) == 0
    assert io.read_json(tmp_path / "m" / "report.json")["compact_residual"] <= 1e-3
    assert main(["canonical", "--config", str(cfg), "--out", str(tmp_path / "c"), "--grid", "32x64"]) == 0
    rep = io.read_json(tmp_path / "c" / "report.json")
    assert rep["monotone"] and rep["converged_on_compact"]
    assert (tmp_path / "c" / "u_infinity.csv").exists()


def test_lp(tmp_path):
    cfg = write(tmp_path, "f.json", {"f": {"kind": "poly", "coeffs": [[3, 0], [0, 0], [1, 0]]}})
    assert main(["lp", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    rep = io.read_json(tmp_path / "report.json")
    assert rep["lhs"] == pytest.approx(10) and rep["relative_gap"] <= 1e-3


def test_verify_single_suite(tmp_path, capsys):
    assert main(["verify", "--suite", "disk", "--seed", "7", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert out.count("PASS") == 6 and "FAIL" not in out
    rep = io.read_json(tmp_path / "verify.json")
    assert rep["seed"] == 7 and rep["all_passed"]
    assert main(["verify", "--suite", "nope"]) == 2


# -- io ---------------------------------------------------------------------------


@given(x=st.floats(allow_nan=False, allow_infinity=False))
def test_float_round_trip(x):
    assert json.loads(io.dumps({"x": x}))["x"] == x


def test_non_finite_are_strings():
    assert json.loads(io.dumps([float("inf"), float("nan"), 1.0])) == ["inf", "nan", 1.0]


@pytest.mark.parametrize(
    "text,value", [("0.0+0.0i", 0j), ("1-2i", 1 - 2j), ("-0.3i", -0.3j), ("0.5", 0.5), (" 2 + 1i ", 2 + 1j)]
)
def test_parse_complex(text, value):
    assert io.parse_complex(text) == value


def test_parse_complex_list():
    assert io.parse_complex_list("0.2+0.1i, -0.3i") == [0.2 + 0.1j, -0.3j]


def test_field_csv_round_trip(tmp_path):
    g = make_grid(8, 16, 2.0)
    f = ScalarField.from_function(g, lambda z: np.log(2 / (1 - np.abs(z) ** 2)) + z.real / 3)
    io.write_field(tmp_path / "f.csv", f)
    back = io.read_field(tmp_path / "f.csv", g)
    np.testing.assert_array_equal(back.values, f.values)
    assert back.center == f.center
    assert back.boundary_trace is None or np.array_equal(back.boundary_trace, f.boundary_trace)


def test_atomic_write_leaves_no_temp(tmp_path):
    io.write_json(tmp_path / "r.json", {"a": 1.5})
    assert [p.name for p in tmp_path.iterdir()] == ["r.json"]
