import csv
import json
import math

import pytest

from geonum.cli import main


def run(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr().out
    return status, json.loads(out)


def test_field(capsys):
    status, rep = run(capsys, "field", "--field", "Q(sqrt -1)")
    assert status == 0 and rep["result"]["disc"] == 4
    assert rep["result"]["log_disc"] == pytest.approx(math.log(4))


def test_rr_example(capsys):
    status, rep = run(capsys, "rr", "--field", "Q", "--lattice", "diag:0.5", "--tol", "1e-12")
    assert status == 0 and abs(rep["result"]["residual"]) < 1e-12
    assert rep["inputs"]["tol"] == 1e-12 and "wall_time" in rep and rep["error"] is None


def test_semistable_verdict_is_in_json(capsys):
    status, rep = run(capsys, "semistable", "--field", "Q", "--lattice", "diag:2,0.5")
    assert status == 0 and rep["result"]["semistable"] is False
    assert rep["result"]["max_slope"] == pytest.approx(math.log(2))


def test_zeta_rank1(capsys):
    status, rep = run(capsys, "zeta", "--rank", "1", "--s", "2")
    assert status == 0
    assert rep["result"]["value"]["re"] == pytest.approx(math.pi / 6, abs=1e-12)
    assert rep["result"]["abs_error"] <= 1e-12


def test_zeta_rank2_complex_argument(capsys):
    status, rep = run(capsys, "zeta", "--rank", "2", "--s", "0.5+3i", "--tol", "1e-4", "--json")
    assert status == 0 and rep["result"]["rank"] == 2 and rep["result"]["error_kind"] == "estimated"


def test_h0_and_hn(capsys):
    status, rep = run(capsys, "h0", "--lattice", "std:1")
    assert status == 0 and rep["result"]["h0"]["h0"] == pytest.approx(0.0829015, abs=1e-7)
    status, rep = run(capsys, "hn", "--lattice", "diag:0.25,1,4")
    assert [v[0] for v in rep["result"]["vertices"]] == [0, 1, 2, 3]
    status, rep = run(capsys, "hn", "--field", "Q(sqrt -1)", "--lattice", "std:1", "--restrict")
    assert rep["result"]["vertices"][-1][1] == pytest.approx(-math.log(2))


def test_vanish(capsys):
    status, rep = run(capsys, "vanish", "probe", "--lattice", "std:1", "--twist-deg", "0.7", "--steps", "20")
    assert status == 0 and rep["result"]["reached"]
    status, rep = run(capsys, "vanish", "bounds", "--lattice", "diag:2,0.5")
    assert status == 2 and rep["error"]["code"] == "hypothesis-violated"


def test_moduli_csv(capsys, tmp_path):
    path = tmp_path / "m.csv"
    status, rep = run(capsys, "moduli", "extremal", "--n", "2", "--d", "10", "--samples", "20", "--seed", "1",
                      "--csv", str(path))
    assert status == 0 and rep["result"]["M_hat"] - 10 < 1e-3
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["sample_id", "degree", "h0", "semistable"]
    assert len(rows) - 1 == rep["result"]["attempts"]


def test_usage_errors(capsys):
    assert main(["h0"]) == 1
    assert main(["h0", "--lattice", "std:1", "--tol", "-1"]) == 1
    assert main(["nonsense"]) == 1
    assert main(["zeta", "--s", "1"]) == 1
    capsys.readouterr()


def test_budget_error(capsys):
    status, rep = run(capsys, "hn", "--lattice", "std:7")
    assert status == 3 and rep["error"]["code"] == "search-too-large"


def test_config_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# experiment\nlattice = diag:0.5\ntol = 1e-10\n")
    status, rep = run(capsys, "h0", "--config", str(cfg))
    assert status == 0 and rep["inputs"]["lattice"] == "diag:0.5" and rep["inputs"]["tol"] == 1e-10
    status, rep = run(capsys, "h0", "--config", str(cfg), "--lattice", "std:1")
    assert rep["inputs"]["lattice"] == "std:1" and rep["inputs"]["tol"] == 1e-10
    cfg.write_text("lattice = std:1\ncolour = blue\n")
    assert main(["h0", "--config", str(cfg)]) == 1
    capsys.readouterr()


def test_output_is_reproducible(capsys, tmp_path):
    argv = ["moduli", "extremal", "--n", "2", "--d", "0", "--samples", "10", "--seed", "4", "--threads", "2"]
    texts = []
    for _ in range(2):
        main(argv)
        rep = json.loads(capsys.readouterr().out)
        rep.pop("wall_time")
        texts.append(json.dumps(rep, sort_keys=True))
    assert texts[0] == texts[1]


def test_threads_do_not_change_results(capsys):
    _, a = run(capsys, "h0", "--lattice", "random:2,0.3,0.5,1", "--threads", "1")
    _, b = run(capsys, "h0", "--lattice", "random:2,0.3,0.5,1", "--threads", "4")
    assert a["result"] == b["result"]


def test_out_and_plain(capsys, tmp_path):
    path = tmp_path / "r.json"
    assert main(["field", "--out", str(path)]) == 0
    assert json.loads(path.read_text())["command"] == "field"
    assert main(["field", "--output", "plain"]) == 0
    assert "result.degree: 1" in capsys.readouterr().out


def test_zeta_grid_csv(capsys, tmp_path):
    path = tmp_path / "g.csv"
    status, rep = run(capsys, "zeta", "grid", "--re", "0.2:0.8:2", "--im", "1:5:3", "--csv", str(path))
    assert status == 0 and rep["result"]["points"] == 6
    assert len(path.read_text().splitlines()) == 7


def test_selftest_subset(capsys):
    status = main(["selftest", "--only", "3,7"])
    captured = capsys.readouterr()
    assert status == 0 and "[PASS]  3." in captured.err
    assert json.loads(captured.out)["result"]["passed"] is True
