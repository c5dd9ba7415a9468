import json
import subprocess
import sys

import numpy as np
import pytest

from varietal.cli import main, read_points_csv, write_points_csv
from varietal.numerics import largest_principal_angle
from varietal.subspaces import (
    AffineSubspace,
    LinearSubspace,
    UnionOfAffine,
    UnionOfLinear,
    model_from_json,
    model_to_json,
    random_affine_union,
    sample_union,
    samples_to_arrays,
)

from _helpers import match_labels


def run_cli(*argv):
    return main([str(a) for a in argv])


def write_json(path, obj):
    path.write_text(json.dumps(obj))


def line(direction):
    d = np.asarray(direction, dtype=float).reshape(-1, 1)
    return LinearSubspace.from_basis(d / np.linalg.norm(d))


def plane_with_normal(normal):
    b = np.asarray(normal, dtype=float).reshape(-1, 1)
    return LinearSubspace.from_complement(b / np.linalg.norm(b))


@pytest.fixture
def synth_fixture(tmp_path):
    """Two affine lines in R^2 generated by the synth command with seed 7."""
    spec = tmp_path / "spec.json"
    write_json(spec, {"ambient_dim": 2, "dims": [1, 1], "affine": True})
    points = tmp_path / "points.csv"
    model = tmp_path / "model.json"
    assert run_cli("synth", "--spec", spec, "--per-subspace", 50, "--seed", 7,
                   "--out-points", points, "--out-model", model) == 0
    return points, model


# ---------------------------------------------------------------------------
# CSV handling

def test_csv_round_trip_with_labels(tmp_path):
    path = tmp_path / "pts.csv"
    pts = np.array([[1.5, -2.25], [0.1, 3.0]])
    write_points_csv(path, pts, labels=[1, 0])
    back, labels = read_points_csv(path, labeled=True)
    np.testing.assert_array_equal(back, pts)
    np.testing.assert_array_equal(labels, [1, 0])


def test_csv_header_is_auto_detected(tmp_path):
    path = tmp_path / "pts.csv"
    path.write_text("x,y\n1.0,2.0\n3.0,4.0\n")
    pts, _ = read_points_csv(path)
    np.testing.assert_array_equal(pts, [[1.0, 2.0], [3.0, 4.0]])


def test_empty_csv_is_an_input_error(tmp_path, capsys):
    path = tmp_path / "empty.csv"
    path.write_text("")
    assert run_cli("cluster", path, "--n", 2) == 1
    assert "no data rows" in capsys.readouterr().err


def test_malformed_csv_reports_row_and_column(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("1.0,2.0,3.0\n4.0,oops,6.0\n")
    assert run_cli("cluster", path, "--n", 1) == 1
    err = capsys.readouterr().err
    assert "row 2" in err and "column 2" in err


def test_ragged_csv_is_an_input_error(tmp_path, capsys):
    path = tmp_path / "ragged.csv"
    path.write_text("1.0,2.0\n3.0\n")
    assert run_cli("cluster", path, "--n", 1) == 1
    assert "row 2" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# synth

def test_synth_shapes_and_labels(synth_fixture):
    points_path, model_path = synth_fixture
    pts, labels = read_points_csv(points_path, labeled=True)
    assert pts.shape == (100, 2)
    assert set(labels.tolist()) == {0, 1}
    model = model_from_json(json.loads(model_path.read_text()))
    assert isinstance(model, UnionOfAffine) and model.n == 2


def test_synth_is_byte_deterministic(tmp_path):
    spec = tmp_path / "spec.json"
    write_json(spec, {"ambient_dim": 3, "dims": [2, 1], "affine": True})
    outs = []
    for tag in ("a", "b"):
        points = tmp_path / f"p{tag}.csv"
        model = tmp_path / f"m{tag}.json"
        assert run_cli("synth", "--spec", spec, "--per-subspace", 20,
                       "--seed", 11, "--out-points", points,
                       "--out-model", model) == 0
        outs.append((points.read_bytes(), model.read_bytes()))
    assert outs[0] == outs[1]


def test_synth_models_lift_transversally(tmp_path):
    """Generic translations keep the lifted union transversal, seed after seed."""
    from varietal.subspaces import check_transversality, embed_affine_union

    hits = 0
    for seed in range(200):
        rng = np.random.default_rng(7000 + seed)
        D = int(rng.integers(2, 5))
        n = int(rng.integers(1, 4))
        dims = [int(rng.integers(1, D)) for _ in range(n)]
        union = random_affine_union(rng, D, dims)
        hits += check_transversality(embed_affine_union(union)).transversal
    assert hits == 200


def test_synth_accepts_per_subspace_spec_form(tmp_path):
    spec = tmp_path / "spec.json"
    write_json(spec, {"ambient_dim": 3, "subspaces": [
        {"dim": 2, "affine": True}, {"dim": 1, "affine": False}]})
    points = tmp_path / "p.csv"
    model = tmp_path / "m.json"
    assert run_cli("synth", "--spec", spec, "--per-subspace", 10, "--seed", 5,
                   "--out-points", points, "--out-model", model) == 0
    union = model_from_json(json.loads(model.read_text()))
    assert isinstance(union, UnionOfAffine)
    np.testing.assert_allclose(union.subspaces[1].translation, 0.0, atol=1e-15)
    assert np.linalg.norm(union.subspaces[0].translation) > 1e-6


def test_synth_rejects_bad_spec(tmp_path, capsys):
    spec = tmp_path / "spec.json"
    write_json(spec, {"ambient_dim": 3, "dims": [3], "affine": True})
    assert run_cli("synth", "--spec", spec, "--out-points", tmp_path / "p.csv",
                   "--out-model", tmp_path / "m.json") == 1
    assert "dim" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# cluster

def test_cluster_fixture_recovers_ground_truth(synth_fixture, tmp_path):
    points_path, model_path = synth_fixture
    out = tmp_path / "result.json"
    assert run_cli("cluster", points_path, "--n", 2, "--affine", "--labeled",
                   "--out", out) == 0
    result = json.loads(out.read_text())
    _, truth = read_points_csv(points_path, labeled=True)
    hits, _ = match_labels(truth, np.array(result["labels"]))
    assert hits == len(truth)
    assert result["diagnostics"]["s"] >= 1
    assert len(result["diagnostics"]["per_point_dims"]) == len(truth)


def test_cluster_can_export_the_fitted_basis(synth_fixture, tmp_path):
    from varietal.polynomials import evaluate, poly_from_json

    points_path, _ = synth_fixture
    out_basis = tmp_path / "basis.json"
    assert run_cli("cluster", points_path, "--n", 2, "--affine", "--labeled",
                   "--out", tmp_path / "r.json", "--out-basis", out_basis) == 0
    polys = [poly_from_json(obj) for obj in json.loads(out_basis.read_text())]
    assert polys and all(p.num_vars == 3 and p.degree == 2 for p in polys)
    pts, _ = read_points_csv(points_path, labeled=True)
    lifted = np.hstack([np.ones((len(pts), 1)), pts])
    for p in polys:
        assert max(abs(evaluate(p, x)) for x in lifted) < 1e-9


def test_cluster_output_is_byte_deterministic(synth_fixture, tmp_path):
    points_path, _ = synth_fixture
    outs = []
    for tag in ("a", "b"):
        out = tmp_path / f"r{tag}.json"
        assert run_cli("cluster", points_path, "--n", 2, "--affine",
                       "--labeled", "--out", out) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_cluster_degree_one_fits_single_hyperplane(tmp_path):
    rng = np.random.default_rng(31)
    plane = plane_with_normal(rng.standard_normal(3))
    pts = np.array([plane.basis @ rng.uniform(-1, 1, 2) for _ in range(40)])
    path = tmp_path / "plane.csv"
    write_points_csv(path, pts)
    out = tmp_path / "result.json"
    assert run_cli("cluster", path, "--n", 1, "--degree", 1, "--out", out) == 0
    result = json.loads(out.read_text())
    rec = model_from_json(result["models"])
    # oracle: direct least-squares hyperplane through the data
    _, _, vh = np.linalg.svd(pts, full_matrices=True)
    direct = LinearSubspace.from_complement(vh[-1].reshape(-1, 1))
    assert largest_principal_angle(rec.subspaces[0].basis, direct.basis) < 1e-8


def test_cluster_grouping_failure_exit_code(tmp_path, capsys):
    rng = np.random.default_rng(32)
    plane = plane_with_normal(rng.standard_normal(3))
    pts = np.array([plane.basis @ rng.uniform(-1, 1, 2) for _ in range(40)])
    path = tmp_path / "plane.csv"
    write_points_csv(path, pts)
    assert run_cli("cluster", path, "--n", 2) == 2


def test_cluster_too_few_points_exit_code(tmp_path):
    rng = np.random.default_rng(33)
    pts = rng.uniform(-1, 1, size=(60, 3))     # no degree-2 structure
    path = tmp_path / "scatter.csv"
    write_points_csv(path, pts)
    assert run_cli("cluster", path, "--n", 2) == 3


# ---------------------------------------------------------------------------
# check-transversal

def test_check_transversal_two_lines_zero_translation(tmp_path, capsys):
    rng = np.random.default_rng(34)
    union = random_affine_union(rng, 3, [1, 1], affine_flags=[False, False])
    model = tmp_path / "model.json"
    write_json(model, model_to_json(union))
    assert run_cli("check-transversal", model, "--embed") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["transversal"] is False
    assert report["witness"]["subspaces"] == [0, 1]


def test_check_transversal_line_plus_plane_any_translation(tmp_path, capsys):
    for seed in range(5):
        rng = np.random.default_rng(35 + seed)
        flags = [bool(seed % 2), bool((seed // 2) % 2)]
        union = random_affine_union(rng, 3, [1, 2], affine_flags=flags)
        model = tmp_path / f"model{seed}.json"
        write_json(model, model_to_json(union))
        assert run_cli("check-transversal", model, "--embed") == 0
        report = json.loads(capsys.readouterr().out)
        assert report["transversal"] is True


def test_check_transversal_single_subspace(tmp_path, capsys):
    model = tmp_path / "model.json"
    write_json(model, model_to_json(UnionOfLinear([line([1.0, 1.0, 0.0])])))
    assert run_cli("check-transversal", model) == 0
    assert json.loads(capsys.readouterr().out)["transversal"] is True


def test_check_transversal_affine_without_embed_uses_linear_parts(tmp_path, capsys):
    # parallel flats: linear parts coincide as subspaces, so without --embed
    # the model cannot even be formed into a valid union -> input error
    union = UnionOfAffine([
        AffineSubspace(line([1.0, 0.0]), np.array([0.0, 1.0])),
        AffineSubspace(line([1.0, 0.0]), np.array([0.0, -1.0])),
    ])
    model = tmp_path / "model.json"
    write_json(model, model_to_json(union))
    assert run_cli("check-transversal", model) == 1
    assert run_cli("check-transversal", model, "--embed") == 0
    capsys.readouterr()


# ---------------------------------------------------------------------------
# check-genpos

def _two_planes_fixture(tmp_path, n_points_first=2):
    rng = np.random.default_rng(36)
    union = UnionOfLinear([
        plane_with_normal(rng.standard_normal(3)),
        plane_with_normal(rng.standard_normal(3)),
    ])
    pts = np.array(
        [union.subspaces[0].basis @ rng.uniform(-1, 1, 2)
         for _ in range(n_points_first)]
        + [union.subspaces[1].basis @ rng.uniform(-1, 1, 2) for _ in range(2)]
    )
    points = tmp_path / "pts.csv"
    model = tmp_path / "model.json"
    write_points_csv(points, pts)
    write_json(model, model_to_json(union))
    return points, model


def test_check_genpos_starved_linear_fixture(tmp_path, capsys):
    points, model = _two_planes_fixture(tmp_path, n_points_first=2)
    assert run_cli("check-genpos", points, model, "--n", 2) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["in_general_position"] is False
    assert report["s_data"] >= 2 and report["s_model"] == 1


def test_check_genpos_five_point_fixture(tmp_path, capsys):
    points, model = _two_planes_fixture(tmp_path, n_points_first=3)
    assert run_cli("check-genpos", points, model, "--n", 2) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["in_general_position"] is True


def test_check_genpos_affine_reports_both_sides(tmp_path, capsys):
    rng = np.random.default_rng(37)
    union = random_affine_union(rng, 3, [2, 1])
    pts, _ = samples_to_arrays(sample_union(union, 150, seed=38))
    points = tmp_path / "pts.csv"
    model = tmp_path / "model.json"
    write_points_csv(points, pts)
    write_json(model, model_to_json(union))
    assert run_cli("check-genpos", points, model) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["in_general_position"] is True
    assert report["embedded"]["in_general_position"] is True
    assert report["sides_agree"] is True


def test_check_genpos_off_model_points_exit_4(tmp_path, capsys):
    points, model = _two_planes_fixture(tmp_path)
    with open(points, "a") as fh:
        fh.write("9.0,9.0,9.0\n")
    assert run_cli("check-genpos", points, model, "--n", 2) == 4
    assert "4" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# eval

def _result_and_truth(tmp_path, flip=(), n=100):
    rng = np.random.default_rng(39)
    union = UnionOfAffine([
        AffineSubspace(line([1.0, 0.0]), np.array([0.0, 1.0])),
        AffineSubspace(line([0.0, 1.0]), np.array([2.0, 0.0])),
    ])
    pts, labels = samples_to_arrays(sample_union(union, n // 2, seed=40))
    truth_csv = tmp_path / "truth.csv"
    write_points_csv(truth_csv, pts, labels)
    pred = labels.copy()
    for j in flip:
        pred[j] = 1 - pred[j]
    result = {
        "labels": [int(v) for v in pred],
        "models": model_to_json(union),
        "diagnostics": {"s": 1, "singular_values": [], "per_point_dims": []},
    }
    result_json = tmp_path / "result.json"
    write_json(result_json, result)
    return result_json, truth_csv


def test_eval_identical_labelings(tmp_path, capsys):
    result_json, truth_csv = _result_and_truth(tmp_path)
    assert run_cli("eval", result_json, truth_csv) == 0
    metrics = json.loads(capsys.readouterr().out)
    assert metrics["clustering_error"] == 0.0
    assert max(metrics["per_cluster_angles"]) < 1e-10
    assert max(metrics["translation_errors"]) < 1e-12


def test_eval_is_permutation_invariant(tmp_path, capsys):
    result_json, truth_csv = _result_and_truth(tmp_path, flip=range(100))
    assert run_cli("eval", result_json, truth_csv) == 0
    metrics = json.loads(capsys.readouterr().out)
    assert metrics["clustering_error"] == 0.0


def test_eval_one_of_hundred_misassigned(tmp_path, capsys):
    result_json, truth_csv = _result_and_truth(tmp_path, flip=[3])
    assert run_cli("eval", result_json, truth_csv) == 0
    metrics = json.loads(capsys.readouterr().out)
    assert metrics["clustering_error"] == pytest.approx(0.01)


def test_eval_size_mismatch_is_input_error(tmp_path, capsys):
    result_json, truth_csv = _result_and_truth(tmp_path)
    obj = json.loads(result_json.read_text())
    obj["labels"] = obj["labels"][:-1]
    write_json(result_json, obj)
    assert run_cli("eval", result_json, truth_csv) == 1
    assert "counts differ" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# end-to-end round trips

@pytest.mark.parametrize("spec", [
    {"ambient_dim": 2, "dims": [1, 1], "affine": True},
    {"ambient_dim": 3, "dims": [2, 1], "affine": True},
    {"ambient_dim": 4, "dims": [2, 1], "affine": True},
    {"ambient_dim": 3, "dims": [2, 2], "affine": [True, False]},
])
def test_synth_cluster_eval_round_trip(tmp_path, capsys, spec):
    spec_path = tmp_path / "spec.json"
    write_json(spec_path, spec)
    points = tmp_path / "points.csv"
    model = tmp_path / "model.json"
    result = tmp_path / "result.json"
    n = len(spec["dims"])
    assert run_cli("synth", "--spec", spec_path, "--per-subspace", 40,
                   "--seed", 3, "--out-points", points, "--out-model", model) == 0
    assert run_cli("cluster", points, "--n", n, "--affine", "--labeled",
                   "--out", result) == 0
    capsys.readouterr()
    assert run_cli("eval", result, points, "--truth-model", model) == 0
    metrics = json.loads(capsys.readouterr().out)
    assert metrics["clustering_error"] == 0.0
    assert max(metrics["per_cluster_angles"]) < 1e-8
    assert max(metrics["translation_errors"]) < 1e-8


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "varietal.cli", "--help"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "cluster" in proc.stdout
