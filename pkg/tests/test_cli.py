import json
import math
from pathlib import Path

from besselbvp.cli import main

import numpy as np


FIXTURES = Path(__file__).parent.parent / "fixtures"


def run_cmd(command, fixture, out, fmt="json", seed=0):
    return main([command, "--config", str(FIXTURES / fixture),
                 "--out", str(out), "--format", fmt, "--seed", str(seed),
                 "--quiet"])


def test_modes_fixture(tmp_path):
    assert run_cmd("modes", "dirichlet_nu05.cfg", tmp_path) == 0
    body = json.loads((tmp_path / "modes_dirichlet_nu05.json").read_text())
    want = [1.0 + (n * math.pi) ** 2 for n in range(1, 7)]
    got = [e["re"] for e in body["eigenvalues"]]
    assert np.allclose(got, want, rtol=1e-8)
    meta = json.loads(
        (tmp_path / "modes_dirichlet_nu05.meta.json").read_text())
    assert meta["command"] == "modes"
    assert meta["config"]["operator"]["nu"] == "0.5"


def test_lopatinskii_oblique_fixture(tmp_path):
    assert run_cmd("lopatinskii", "oblique_fail.cfg", tmp_path) == 0
    body = json.loads((tmp_path / "lopatinskii_oblique_fail.json").read_text())
    assert body["summary"]["all_pass"] is False
    fails = [s for s in body["samples"] if not s["pass"]]
    assert len(fails) == 2


def test_lopatinskii_lambda_robin_fixture(tmp_path):
    assert run_cmd("lopatinskii", "lambda_robin.cfg", tmp_path) == 0
    body = json.loads((tmp_path / "lopatinskii_lambda_robin.json").read_text())
    assert body["summary"]["all_pass"] is True


def test_solve_manufactured_fixture(tmp_path):
    assert run_cmd("solve", "manufactured.cfg", tmp_path) == 0
    body = json.loads((tmp_path / "solve_manufactured.json").read_text())
    assert body["residual"] < 1e-7
    assert body["oracle_max_error"] < 1e-10
    assert abs(body["traces"]["gamma_plus"]["re"] - 0.8) < 1e-8


def test_solve_csv_output(tmp_path):
    assert run_cmd("solve", "manufactured.cfg", tmp_path, fmt="csv") == 0
    csv_path = tmp_path / "solve_manufactured.csv"
    assert csv_path.exists()
    header = csv_path.read_text().splitlines()[0]
    assert header == "x,value_re,value_im"
    assert (tmp_path / "solve_manufactured.json").exists()


def test_sweep_fixture(tmp_path):
    assert run_cmd("sweep", "resolvent.cfg", tmp_path) == 0
    body = json.loads((tmp_path / "sweep_resolvent.json").read_text())
    assert body["bounded"] is True
    assert len(body["rows"]) == 4


def test_kg_fixture(tmp_path):
    assert run_cmd("kg", "ads_static.cfg", tmp_path) == 0
    body = json.loads((tmp_path / "kg_ads_static.json").read_text())
    assert abs(body["nu"] - 0.5) < 1e-14
    assert body["elliptic"] and body["parameter_elliptic"]
    lams = sorted(abs(m["re"]) for m in body["normal_modes"])
    assert abs(lams[0] - math.pi) < 1e-6


def test_expand_roundtrip(tmp_path):
    # write a grid function, then run the expand command on it
    from besselbvp.core import GridFunction, RadialGrid, gridfunction_to_csv
    g = RadialGrid.build(1.0, 256)
    u = GridFunction.from_pair(g, 0.3, [3.0], [5.0])
    csv = tmp_path / "field.csv"
    gridfunction_to_csv(GridFunction(g, u.values), str(csv))
    cfg = tmp_path / "expand_case.cfg"
    cfg.write_text(f"[input]\ncsv = {csv}\nnu = 0.3\n")
    code = main(["expand", "--config", str(cfg), "--out", str(tmp_path),
                 "--quiet"])
    assert code == 0
    body = json.loads((tmp_path / "expand_expand_case.json").read_text())
    assert abs(body["g_minus"]["re"] - 3.0) < 1e-8
    assert abs(body["g_plus"]["re"] - 5.0) < 1e-8


def test_byte_identical_reruns(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_cmd("modes", "dirichlet_nu05.cfg", a, seed=3)
    run_cmd("modes", "dirichlet_nu05.cfg", b, seed=3)
    fa = (a / "modes_dirichlet_nu05.json").read_bytes()
    fb = (b / "modes_dirichlet_nu05.json").read_bytes()
    assert fa == fb
    ma = (a / "modes_dirichlet_nu05.meta.json").read_bytes()
    mb = (b / "modes_dirichlet_nu05.meta.json").read_bytes()
    assert ma == mb


def test_unknown_key_is_hard_error(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("[operator]\nnu = 0.5\nbogus = 1\n\n[modes]\nq = 0\n")
    assert main(["modes", "--config", str(cfg), "--out", str(tmp_path),
                 "--quiet"]) == 1


def test_unknown_section_is_hard_error(tmp_path):
    cfg = tmp_path / "bad2.cfg"
    cfg.write_text("[operator]\nnu = 0.5\n\n[surprise]\nkey = 1\n")
    assert main(["modes", "--config", str(cfg), "--out", str(tmp_path),
                 "--quiet"]) == 1


def test_numerical_failure_exit_code(tmp_path):
    cfg = tmp_path / "cut.cfg"
    cfg.write_text("[operator]\nnu = 0.4\na_re = -1.0\n\n"
                   "[boundary]\ntype = dirichlet\ndata_re = 1.0\n\n"
                   "[grid]\nnodes = 64\ncap = decay\n\n[rhs]\nkind = zero\n")
    assert main(["solve", "--config", str(cfg), "--out", str(tmp_path),
                 "--quiet"]) == 2


def test_missing_config_file(tmp_path):
    assert main(["modes", "--config", str(tmp_path / "nope.cfg"),
                 "--out", str(tmp_path), "--quiet"]) == 1


def test_tolerance_override_section(tmp_path):
    cfg = tmp_path / "tol.cfg"
    cfg.write_text("[operator]\nnu = 0.5\n\n[modes]\nq = 0\ncount = 2\n\n"
                   "[grid]\nnodes = 128\n\n"
                   "[tolerances]\nsolver_residual_tol = 1e-5\n")
    assert main(["modes", "--config", str(cfg), "--out", str(tmp_path),
                 "--quiet"]) == 0
