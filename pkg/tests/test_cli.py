"""End-to-end runs of the command line driver via main(argv)."""

from __future__ import annotations

import csv
import json

import numpy as np
import pytest

from packflow import curvature, parse_dpm
from packflow.cli import EXIT_BUDGET, EXIT_ERROR, EXIT_OK, main


@pytest.fixture
def tetra_file(tmp_path):
    path = tmp_path / "tetra.dpm"
    assert main(["generate", "tetrahedron", "--out", str(path)]) == EXIT_OK
    return path


@pytest.fixture
def bumpy_file(tmp_path):
    # a tetrahedron pushed away from constant curvature
    path = tmp_path / "bumpy.dpm"
    assert main(["generate", "tetrahedron", "--out", str(path)]) == EXIT_OK
    doc = json.loads(path.read_text())
    doc["conformal_factors"] = [0.2, -0.1, 0.05, -0.15]
    path.write_text(json.dumps(doc))
    return path


def test_generate_to_stdout(capsys):
    assert main(["generate", "octahedron", "--radius", "0.5"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["format"] == "dpm-1"
    assert doc["radii"] == [0.5] * 6


def test_validate_clean_document(tetra_file, capsys):
    assert main(["validate", str(tetra_file)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "admissible: yes" in out
    assert "weighted Delaunay: ok" in out
    assert "chi: 2" in out


def test_validate_reports_violations(tmp_path, capsys):
    path = tmp_path / "warped.dpm"
    main(["generate", "tetrahedron", "--out", str(path)])
    doc = json.loads(path.read_text())
    doc["conformal_factors"] = [1.02, 1.02, -1.02, -1.02]
    path.write_text(json.dumps(doc))
    assert main(["validate", str(path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "1 violating edges" in out


def test_validate_inadmissible_exits_one(tmp_path, capsys):
    path = tmp_path / "flat.dpm"
    main(["generate", "tetrahedron", "--out", str(path)])
    doc = json.loads(path.read_text())
    doc["conformal_factors"] = [1.10, 1.10, -1.10, -1.10]
    path.write_text(json.dumps(doc))
    assert main(["validate", str(path)]) == EXIT_ERROR
    assert "admissible: no" in capsys.readouterr().out


def test_curvature_output(tetra_file, capsys):
    assert main(["curvature", str(tetra_file)]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    values = [float(line.split("=")[1]) for line in lines[:4]]
    assert values == pytest.approx([np.pi] * 4)
    assert "gauss-bonnet residual" in lines[4]


def test_flow_pipeline(bumpy_file, tmp_path, capsys):
    trace_path = tmp_path / "trace.csv"
    out_path = tmp_path / "final.dpm"
    code = main([
        "flow", str(bumpy_file),
        "--flow", "calabi",
        "--target", "uniform",
        "--trace", str(trace_path),
        "--out", str(out_path),
    ])
    assert code == EXIT_OK
    assert "converged" in capsys.readouterr().out

    rows = list(csv.reader(trace_path.open()))
    assert rows[0] == ["step", "t", "max_curv_err", "calabi_energy",
                       "W_est", "flips_total", "min_margin", "h"]
    errs = [float(r[2]) for r in rows[1:]]
    assert errs[-1] < 1e-8
    assert errs[-1] < errs[0]

    final = parse_dpm(out_path.read_text())
    assert np.max(np.abs(curvature(final.metric) - np.pi)) < 1e-8
    assert final.target is not None


def test_flow_budget_exit_code(bumpy_file):
    code = main([
        "flow", str(bumpy_file), "--target", "uniform", "--max-steps", "2",
    ])
    assert code == EXIT_BUDGET


def test_flow_target_from_array_file(bumpy_file, tmp_path):
    target_path = tmp_path / "target.json"
    target_path.write_text(json.dumps([np.pi] * 4))
    code = main(["flow", str(bumpy_file), "--target", str(target_path)])
    assert code == EXIT_OK


def test_flow_target_embedded_in_document(bumpy_file, tmp_path):
    doc = json.loads(bumpy_file.read_text())
    doc["target_curvature"] = [np.pi] * 4
    embedded = tmp_path / "with_target.dpm"
    embedded.write_text(json.dumps(doc))
    assert main(["flow", str(embedded)]) == EXIT_OK


def test_flow_without_target_is_an_error(bumpy_file, capsys):
    assert main(["flow", str(bumpy_file)]) == EXIT_ERROR
    assert "no target curvature" in capsys.readouterr().err


def test_flow_p_calabi_spelling(bumpy_file):
    code = main([
        "flow", str(bumpy_file), "--flow", "p-calabi", "--p", "3",
        "--target", "uniform",
    ])
    assert code == EXIT_OK


def test_flow_fractional(bumpy_file):
    code = main([
        "flow", str(bumpy_file), "--flow", "fractional", "--s", "0.5",
        "--target", "uniform",
    ])
    assert code == EXIT_OK


def test_bad_file_exits_one(tmp_path, capsys):
    path = tmp_path / "broken.dpm"
    path.write_text('{"format": "dpm-1"')
    assert main(["validate", str(path)]) == EXIT_ERROR
    assert "error:" in capsys.readouterr().err
    assert main(["validate", str(tmp_path / "missing.dpm")]) == EXIT_ERROR


def test_jacobian_check_random(capsys):
    assert main(["jacobian-check", "--count", "3"]) == EXIT_OK
    assert "3 metrics" in capsys.readouterr().out


def test_jacobian_check_on_file(tetra_file, capsys):
    assert main(["jacobian-check", str(tetra_file)]) == EXIT_OK
    out = capsys.readouterr().out
    assert "1 metrics" in out


def test_jacobian_check_tolerance_failure(tetra_file, capsys):
    assert main(["jacobian-check", str(tetra_file), "--tol-rel", "1e-16"]) == EXIT_ERROR
    assert "exceeds tolerance" in capsys.readouterr().err
