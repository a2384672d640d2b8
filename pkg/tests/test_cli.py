import json

import numpy as np
import pytest

from cyclic_designs import cli, matcore


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr().out
    return code, out


def test_construct_u1(capsys):
    code, out = run(["construct", "--method", "u1", "--t", "1,2,3"], capsys)
    js = json.loads(out)
    assert code == 0 and all(c["epsilon"] <= 1e-10 for c in js["certificates"])


def test_construct_diffset_golden(capsys):
    code, out = run(["construct", "--method", "diffset", "--dim", "3", "--basis", "golden",
                     "--dset", "1,2,4", "--modulus", "7"], capsys)
    assert code == 0 and json.loads(out)["certificates"][0]["epsilon"] < 1e-9


def test_construct_construction1(capsys):
    code, out = run(["construct", "--method", "construction1", "--n", "1"], capsys)
    js = json.loads(out)
    assert code == 0 and js["design"]["dim"] == 4 and js["mub"] < 1e-10


def test_construct_bad_method_is_usage_error(capsys):
    assert cli.main(["construct", "--method", "nope"]) == 2
    assert cli.main(["construct", "--method", "diffset", "--dset", "1,2,4"]) == 2


def test_verify_exit_codes(tmp_path, capsys):
    design = tmp_path / "u1.json"
    assert cli.main(["construct", "--method", "u1", "-o", str(design)]) == 0
    assert (tmp_path / "u1.json.manifest.json").exists()
    assert cli.main(["verify", str(design), "--t", "1,2,3"]) == 0
    assert cli.main(["verify", str(design), "--t", "4"]) == 1
    capsys.readouterr()


def test_verify_corrupted_constellation(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dim": 2, "vectors": [[[1.0, 0.0], [0.5, 0.0]]]}))
    assert cli.main(["verify", str(bad)]) == 2
    (tmp_path / "junk.json").write_text("{not json")
    assert cli.main(["verify", str(tmp_path / "junk.json")]) == 2
    assert cli.main(["verify", str(tmp_path / "missing.json")]) == 2


def test_verify_non_unitary_generator(tmp_path):
    obj = {"k": 2, "generator": matcore.matrix_to_json(2 * np.eye(2))}
    path = tmp_path / "d.json"
    path.write_text(json.dumps(obj))
    assert cli.main(["verify", str(path)]) == 2


def test_manifest_reproduces_outputs(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["approx", "--dim", "3", "--k", "8", "--samples", "20", "--seed", "4"]
    assert cli.main(args + ["-o", str(a)]) == 0
    assert cli.main(args + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    man = json.loads((tmp_path / "a.json.manifest.json").read_text())
    assert man["seed"] == 4 and str(a) in man["outputs"] and man["version"]


def test_seed_from_environment(monkeypatch, capsys):
    monkeypatch.setenv(cli.SEED_ENV, "17")
    code, out = run(["approx", "--dim", "2", "--k", "5", "--samples", "3"], capsys)
    assert code == 0 and json.loads(out)["seed"] == 17


def test_diffset_commands(capsys):
    code, out = run(["diffset", "mian-chowla", "--n", "8"], capsys)
    assert json.loads(out)["sequence"] == [1, 2, 4, 8, 13, 21, 31, 45]
    code, out = run(["diffset", "search", "--v", "22", "--K", "5"], capsys)
    assert code == 1 and json.loads(out)["status"] == "not_found"
    code, out = run(["diffset", "search", "--v", "21", "--K", "5"], capsys)
    assert code == 0 and json.loads(out)["status"] == "found"
    code, out = run(["diffset", "verify", "--v", "7", "--elements", "1,2,3"], capsys)
    assert code == 1
    code, out = run(["diffset", "power2", "--d", "4"], capsys)
    assert json.loads(out)["elements"] == [1, 2, 4, 8]


def test_basis_command(capsys):
    code, out = run(["basis", "--kind", "numeric", "--dim", "5", "--seed", "1"], capsys)
    js = json.loads(out)
    assert code == 0 and js["residual"] <= 1e-10 and js["dim"] == 5
    assert cli.main(["basis", "--kind", "qutrit", "--phi", "0.1"]) == 2


def test_search_command(capsys):
    code, out = run(["search", "--dim", "4", "--k", "6", "--spectrum", "0,1,3,4"], capsys)
    js = json.loads(out)
    assert code == 0 and js["dephased_spectrum"] == ["0", "1/7", "3/7", "4/7"]


def test_scan_command(capsys):
    code, out = run(["scan", "--dims", "2", "--ks", "2..3", "--restarts", "3"], capsys)
    assert code == 0 and out.splitlines()[0].startswith("dim,k,status")


def test_tomo_command(tmp_path, capsys):
    design = tmp_path / "fano.json"
    cli.main(["construct", "--method", "diffset", "--dim", "3", "--basis", "golden", "-o", str(design)])
    state = tmp_path / "state.json"
    state.write_text(json.dumps({"vector": [[1, 0], [0, 1], [0, 0]]}))
    csv_path = tmp_path / "p.csv"
    capsys.readouterr()
    code, out = run(["tomo", "--design", str(design), "--state", str(state), "--csv", str(csv_path)], capsys)
    assert code == 0 and json.loads(out)["error_infinity"] < 1e-9
    assert csv_path.read_text().startswith("j,mu,p")
    assert cli.main(["tomo", "--design", str(design), "--shots", "0"]) == 2


def test_nogo_commands(capsys):
    code, out = run(["nogo", "rank", "--dim", "4"], capsys)
    assert json.loads(out)["rank"] == 10
    code, out = run(["nogo", "qubit-moments", "--tmax", "4"], capsys)
    assert json.loads(out)["feasible"] is False
    code, out = run(["nogo", "fh", "--grid", "50"], capsys)
    assert json.loads(out)["min"] > 0.0169


def test_pipeline_exact(capsys):
    code, out = run(["pipeline", "--dim", "3", "--shots", "exact"], capsys)
    assert code == 0 and json.loads(out)["error_infinity"] < 1e-8


def test_pipeline_shots_scaling(capsys):
    _, hi = run(["pipeline", "--dim", "3", "--shots", "100000", "--seed", "7"], capsys)
    _, lo = run(["pipeline", "--dim", "3", "--shots", "100", "--seed", "7"], capsys)
    e_hi, e_lo = json.loads(hi)["error_infinity"], json.loads(lo)["error_infinity"]
    assert np.isfinite(e_hi) and e_hi < e_lo


def test_pipeline_dim5_uses_mian_chowla(capsys):
    code, out = run(["pipeline", "--dim", "5"], capsys)
    js = json.loads(out)
    assert code == 0 and js["basis"] == "numeric" and js["difference_set"]["v"] == 27


def test_pipeline_stage_error(capsys):
    code = cli.main(["pipeline", "--dim", "1"])
    err = capsys.readouterr().err
    assert code == 2 and "stage 'basis'" in err


def test_global_tol_is_restored(capsys):
    cli.main(["construct", "--method", "u1", "--tol", "1e-3"])
    capsys.readouterr()
    assert matcore.DEFAULT_TOL == 1e-10
