"""Command-line entry points, driven through main() on tmp files."""

import numpy as np
import pytest

from ordviz import (
    config_metric_space,
    edge_order,
    random_edge_order,
    read_coords,
    read_edge_order,
    read_points,
    sample_config,
    write_distance_matrix,
    write_edge_order,
    write_points,
)
from ordviz.cli import main

from tests.test_prover import FIG_ORDER


@pytest.fixture
def space_file(tmp_path):
    cfg = sample_config(6, seed=12)
    p = tmp_path / "space.txt"
    write_distance_matrix(p, config_metric_space(cfg))
    return p, cfg


def test_accuracy_command(tmp_path, capsys):
    cfg = sample_config(5, seed=3)
    po = tmp_path / "order.txt"
    pp = tmp_path / "points.txt"
    write_edge_order(po, edge_order(cfg))
    write_points(pp, cfg)
    assert main(["accuracy", "--order", str(po), "--against", str(pp)]) == 0
    out = capsys.readouterr().out
    assert "1" in out and "accuracy" in out.lower()


def test_accuracy_missing_file(tmp_path, capsys):
    po = tmp_path / "order.txt"
    write_edge_order(po, edge_order(sample_config(5, seed=3)))
    assert main(["accuracy", "--order", str(po),
                 "--against", str(tmp_path / "nope.txt")]) == 2
    assert "error" in capsys.readouterr().err


def test_optimize_command(tmp_path, capsys):
    cfg = sample_config(5, seed=8)
    po = tmp_path / "order.txt"
    out = tmp_path / "drawing.txt"
    svg = tmp_path / "drawing.svg"
    write_edge_order(po, edge_order(cfg))
    code = main(["optimize", "--order", str(po), "--seed", "1",
                 "--out", str(out), "--svg", str(svg)])
    assert code == 0
    drawn = read_points(out)
    assert drawn.n == 5
    assert svg.read_text().startswith("<svg")
    assert "final accuracy" in capsys.readouterr().out


def test_optimize_warm_start_self(tmp_path, capsys):
    cfg = sample_config(6, seed=21)
    po = tmp_path / "order.txt"
    pp = tmp_path / "warm.txt"
    write_edge_order(po, edge_order(cfg))
    write_points(pp, cfg)
    assert main(["optimize", "--order", str(po), "--warm-start", str(pp)]) == 0
    out = capsys.readouterr().out
    assert "epochs used" in out and "= 0" in out
    assert "success        = True" in out


def test_prove_command_refuted_and_check(tmp_path, capsys):
    po = tmp_path / "order.txt"
    proof = tmp_path / "proof.txt"
    write_edge_order(po, FIG_ORDER)
    code = main(["prove", "--order", str(po), "--mode", "extremal",
                 "--max-depth", "1", "--out", str(proof)])
    assert code == 0
    assert "refuted" in capsys.readouterr().out.lower()
    text = proof.read_text()
    assert "CONTRADICTION in all" in text

    assert main(["prove", "--check", str(proof)]) == 0
    assert "valid" in capsys.readouterr().out.lower()

    proof.write_text(text.replace("< 60", "< 61", 1))
    assert main(["prove", "--check", str(proof)]) == 4


def test_prove_command_unknown_exit(tmp_path, capsys):
    cfg = sample_config(5, seed=2)
    po = tmp_path / "order.txt"
    write_edge_order(po, edge_order(cfg))
    code = main(["prove", "--order", str(po), "--max-depth", "1"])
    assert code == 3
    assert "unknown" in capsys.readouterr().out.lower()


def test_nn_command(space_file, capsys):
    path, cfg = space_file
    assert main(["nn", "--dist", str(path), "--check-plane"]) == 0
    out = capsys.readouterr().out
    edge_lines = [ln for ln in out.splitlines()
                  if ln and not ln.startswith("#")]
    assert len(edge_lines) == 6
    d = cfg.distance_matrix()
    np.fill_diagonal(d, np.inf)
    for ln in edge_lines:
        u, v = (int(t) for t in ln.split())
        assert v == int(d[u].argmin())
    assert "# plane:" in out


def test_nnstats_command(capsys):
    assert main(["nnstats", "--n", "100", "--trials", "5", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "biroot" in out and "components" in out


def test_embed_farthest_command(space_file, tmp_path, capsys):
    path, cfg = space_file
    out = tmp_path / "far.txt"
    assert main(["embed-farthest", "--dist", str(path), "--out", str(out)]) == 0
    emb = read_points(out)
    d = emb.distance_matrix()
    space_d = cfg.distance_matrix()
    assert tuple(d.argmax(axis=1)) == tuple(space_d.argmax(axis=1))


def test_embed_cluster_command(space_file, tmp_path, capsys):
    path, _ = space_file
    out = tmp_path / "line.txt"
    assert main(["embed-cluster", "--dist", str(path), "--out", str(out)]) == 0
    coords = read_coords(out)
    assert coords.shape == (6,)
    assert len(set(coords.tolist())) == 6


def test_embed_line_command(space_file, tmp_path, capsys):
    path, _ = space_file
    out = tmp_path / "line.txt"
    certs = tmp_path / "certs.txt"
    code = main(["embed-line", "--dist", str(path), "--out", str(out),
                 "--certificates", str(certs)])
    assert code == 0
    assert "accuracy" in capsys.readouterr().out
    assert read_coords(out).shape == (6,)
    rows = certs.read_text().strip().splitlines()
    assert rows[0].split() == ["cut", "total", "gamma", "gamma_prime"]
    for row in rows[1:]:
        cut, total, *_ = (int(t) for t in row.split())
        assert 2 * cut >= total or total == 0


def test_coverage_command(capsys):
    assert main(["coverage", "--n", "4", "--trials", "50",
                 "--kind", "nearest"]) == 0
    out = capsys.readouterr().out
    assert "fraction of possible" in out
    assert "distinct structures" in out


def test_confidence_command(capsys):
    assert main(["confidence", "--s", "795", "--N", "10000"]) == 0
    out = capsys.readouterr().out
    # the CLI applies the half-count continuity correction before evaluating
    assert "0.9271" in out


def test_bad_order_file_is_reported(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("0-1 zebra\n")
    assert main(["accuracy", "--order", str(bad), "--against", str(bad)]) == 2
    assert "error" in capsys.readouterr().err
