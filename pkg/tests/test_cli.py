import csv
import io as _io
import json
import subprocess
import sys

import numpy as np
import pytest

from cryptoherm import io
from cryptoherm.cli import main
from cryptoherm.linalg import SymmetricBandMetric
from cryptoherm.penta import PentaHamiltonian


@pytest.fixture
def legendre(tmp_path):
    path = tmp_path / "legendre.json"
    assert main(["hamiltonian", "--family", "legendre", "--size", "4", "--out", str(path)]) == 0
    return path


def run_json(capsys, argv, code=0):
    assert main(argv) == code
    return json.loads(capsys.readouterr().out)


def test_hamiltonian_file(legendre):
    mf = io.MatrixFile.read(legendre)
    assert mf.kind == "tridiagonal-hamiltonian"
    assert mf.metadata == {"family": "legendre", "params": {}}
    assert mf.payload["sub"] == [1 / 3, 0.4, 3 / 7]


def test_hamiltonian_requires_family_parameters(capsys):
    assert main(["hamiltonian", "--family", "jacobi", "--size", "3", "--mu", "0"]) == 2
    assert "--nu" in capsys.readouterr().err


@pytest.mark.parametrize("size", ["0", "-3"])
def test_hamiltonian_bad_size(size):
    assert main(["hamiltonian", "--family", "hermite", "--size", size]) == 2


def test_hamiltonian_bad_jacobi_parameter():
    assert main(["hamiltonian", "--family", "jacobi", "--size", "3", "--mu", "-2", "--nu", "0"]) == 2


def test_unknown_family_is_usage_error():
    assert main(["hamiltonian", "--family", "bessel", "--size", "3"]) == 2


def test_metric_and_verify(tmp_path, legendre, capsys):
    metric = tmp_path / "m.json"
    assert main(["metric", str(legendre), "--band", "0", "--out", str(metric)]) == 0
    np.testing.assert_array_equal(io.load(metric).diagonal, [1.0, 3.0, 5.0, 7.0])
    report = run_json(capsys, ["verify", str(legendre), str(metric), "--require-positive", "--kappa"])
    assert report["pass"] is True
    assert report["relative_residual"] <= 1e-15
    assert report["null_space_dimension"] == 1
    assert report["min_eigenvalue"] == 1.0
    assert len(report["kappa"]) == 4 and min(report["kappa"]) > 0


@pytest.mark.parametrize("band", ["1", "2"])
def test_metric_higher_bands_verify(tmp_path, legendre, capsys, band):
    metric = tmp_path / "m.json"
    assert main(["metric", str(legendre), "--band", band, "--out", str(metric)]) == 0
    assert io.load(metric).bandwidth == int(band)
    report = run_json(capsys, ["verify", str(legendre), str(metric)])
    assert report["pass"] is True
    assert report["projection_residual"] <= 1e-9


def test_indefinite_metric_fails_positivity(tmp_path, legendre, capsys):
    metric = tmp_path / "m.json"
    main(["metric", str(legendre), "--band", "1", "--out", str(metric)])
    report = run_json(capsys, ["verify", str(legendre), str(metric), "--require-positive"], code=1)
    assert report["min_eigenvalue"] < 0


def test_metric_unsupported_band(legendre, capsys):
    assert main(["metric", str(legendre), "--band", "3"]) == 2
    assert "unsupported band" in capsys.readouterr().err


def test_verify_identity_fails(tmp_path, legendre, capsys):
    io.save(SymmetricBandMetric.identity(4), tmp_path / "eye.json")
    report = run_json(capsys, ["verify", str(legendre), str(tmp_path / "eye.json")], code=1)
    assert report["pass"] is False
    assert report["relative_residual"] > 0.01


def test_verify_size_mismatch(tmp_path, legendre):
    io.save(SymmetricBandMetric.identity(3), tmp_path / "eye.json")
    assert main(["verify", str(legendre), str(tmp_path / "eye.json")]) == 2


def test_verify_env_tolerance(tmp_path, legendre, capsys, monkeypatch):
    io.save(SymmetricBandMetric.identity(4), tmp_path / "eye.json")
    monkeypatch.setenv("CRYPTOHERM_TOL", "10")
    report = run_json(capsys, ["verify", str(legendre), str(tmp_path / "eye.json")])
    assert report["tolerance"] == 10.0 and report["pass"] is True
    monkeypatch.setenv("CRYPTOHERM_TOL", "abc")
    assert main(["verify", str(legendre), str(tmp_path / "eye.json")]) == 2


def test_missing_and_malformed_input(tmp_path, capsys):
    assert main(["spectrum", str(tmp_path / "absent.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{}")
    assert main(["spectrum", str(bad)]) == 2
    assert "format_version" in capsys.readouterr().err


def test_wrong_kind_rejected(tmp_path):
    io.save(SymmetricBandMetric.identity(3), tmp_path / "eye.json")
    assert main(["spectrum", str(tmp_path / "eye.json")]) == 2


def test_breakdown_exit_code(tmp_path, capsys):
    h = {"diag": [0.0, 0.0, 0.0], "super": [1.0, 1.0], "sub": [1.0, 0.0]}
    path = tmp_path / "h.json"
    io.MatrixFile("tridiagonal-hamiltonian", 3, h).write(path)
    assert main(["metric", str(path), "--band", "0"]) == 3
    assert "index 3" in capsys.readouterr().err


def test_scan_csv(legendre, capsys):
    assert main(["scan", str(legendre), "--alpha-range", "-1", "1", "--beta-range", "0", "0.5", "--grid", "3"]) == 0
    rows = list(csv.reader(_io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["alpha", "beta", "min_eig"]
    assert len(rows) == 10
    origin = [r for r in rows[1:] if float(r[0]) == 0.0 and float(r[1]) == 0.0]
    assert float(origin[0][2]) == pytest.approx(1.0)


def test_scan_beta_needs_band_two(legendre):
    argv = ["scan", str(legendre), "--alpha-range", "0", "1", "--beta-range", "0", "1", "--band-max", "1"]
    assert main(argv) == 2


def test_spectrum_csv(legendre, capsys):
    assert main(["spectrum", str(legendre)]) == 0
    rows = list(csv.reader(_io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["index", "energy"]
    nodes, _ = np.polynomial.legendre.leggauss(4)
    np.testing.assert_allclose([float(r[1]) for r in rows[1:]], nodes, atol=1e-14)


def test_spectrum_complex_is_breakdown(tmp_path):
    path = tmp_path / "h.json"
    io.MatrixFile("tridiagonal-hamiltonian", 2, {"diag": [0.0, 0.0], "super": [1.0], "sub": [-1.0]}).write(path)
    assert main(["spectrum", str(path)]) == 3


def test_basis_with_metric(tmp_path, legendre, capsys):
    metric = tmp_path / "m.json"
    main(["metric", str(legendre), "--band", "0", "--out", str(metric)])
    doc = run_json(capsys, ["basis", str(legendre), "--metric", str(metric)])
    assert doc["kind"] == "biorthogonal-basis"
    assert doc["completeness_residual"] <= 1e-10
    kets = np.array(doc["kets"]).T
    ketkets = np.array(doc["ketkets"]).T
    np.testing.assert_allclose(ketkets.T @ kets, np.eye(4), atol=1e-12)
    assert all(k > 0 for k in doc["kappa"])


def test_penta_subcommand(tmp_path, capsys):
    off = PentaHamiltonian(None, [1.0, -1.5, 0.7, 1.2], [0.9, 1.1, 1.3, 0.6], [0.8, -0.5, 1.9], [1.4, 0.6, 0.7])
    io.save(off, tmp_path / "off.json")
    prefix = tmp_path / "pair"
    report = run_json(capsys, ["penta", str(tmp_path / "off.json"), "--out-prefix", str(prefix)])
    assert report["pass"] is True
    assert report["null_space_dimension"] >= 1
    h = io.load(f"{prefix}.hamiltonian.json")
    theta = io.load(f"{prefix}.metric.json")
    assert h.diag is not None and theta.bandwidth == 1


def test_penta_breakdown(tmp_path):
    off = PentaHamiltonian(None, [1.0, 1.0, 1.0], [1.0, 1.0, 1.0], [0.0, 0.0], [0.0, 0.0])
    io.save(off, tmp_path / "off.json")
    assert main(["penta", str(tmp_path / "off.json"), "--out-prefix", str(tmp_path / "x")]) == 3


def test_penta_zero_seed_is_usage_error(tmp_path):
    off = PentaHamiltonian(None, [1.0, 1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 1.0], [1.0, 1.0])
    io.save(off, tmp_path / "off.json")
    assert main(["penta", str(tmp_path / "off.json"), "--out-prefix", str(tmp_path / "x"), "--b12", "0"]) == 2


def test_missing_subcommand_is_usage_error():
    assert main([]) == 2


def test_output_is_deterministic(tmp_path):
    outs = []
    for tag in ("a", "b"):
        h = tmp_path / f"{tag}.json"
        m = tmp_path / f"{tag}.metric.json"
        main(["hamiltonian", "--family", "jacobi", "--mu", "0.5", "--nu", "-0.25", "--size", "8", "--out", str(h)])
        main(["metric", str(h), "--band", "2", "--b12", "0.3", "--out", str(m)])
        outs.append((h.read_bytes(), m.read_bytes()))
    assert outs[0] == outs[1]


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "cryptoherm", "hamiltonian", "--family", "hermite", "--size", "3"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["payload"]["sub"] == [2.0, 4.0]
