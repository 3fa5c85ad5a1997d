"""File format round-trips and malformed-input rejection."""

import numpy as np
import pytest

from ordviz import (
    EdgeOrder,
    FormatError,
    MetricSpace,
    PointConfig,
    config_metric_space,
    edge_order,
    random_edge_order,
    read_coords,
    read_digraph,
    read_distance_matrix,
    read_edge_order,
    read_points,
    sample_config,
    sniff_and_read,
    write_coords,
    write_digraph,
    write_distance_matrix,
    write_edge_order,
    write_points,
)


def test_distance_matrix_roundtrip(tmp_path):
    rng = np.random.default_rng(7)
    for trial in range(10):
        cfg = sample_config(5 + trial % 4, seed=100 + trial)
        space = config_metric_space(cfg)
        p = tmp_path / f"d{trial}.txt"
        write_distance_matrix(p, space)
        back = read_distance_matrix(p)
        assert back.n == space.n
        assert np.array_equal(back.dist, space.dist)  # repr() is exact


def test_points_roundtrip(tmp_path):
    cfg = sample_config(6, seed=3)
    p = tmp_path / "pts.txt"
    write_points(p, cfg)
    back = read_points(p)
    assert back.metric == "l2"
    assert np.array_equal(back.coords, cfg.coords)

    l1 = PointConfig(coords=cfg.coords, metric="l1")
    write_points(p, l1)
    assert read_points(p).metric == "l1"


def test_edge_order_roundtrip(tmp_path):
    rng = np.random.default_rng(11)
    for trial in range(10):
        order = random_edge_order(4 + trial % 5, rng)
        p = tmp_path / "ord.txt"
        write_edge_order(p, order)
        back = read_edge_order(p)
        assert back == order


def test_edge_order_file_matches_geometry(tmp_path):
    cfg = sample_config(5, seed=9)
    order = edge_order(cfg)
    p = tmp_path / "ord.txt"
    write_edge_order(p, order)
    text = p.read_text().split()
    # first token on disk is the closest pair
    i, j = (int(t) for t in text[0].split("-"))
    d = cfg.distance_matrix()
    iu = np.triu_indices(cfg.n, 1)
    assert d[i, j] == d[iu].min()
    assert read_edge_order(p) == order


def test_digraph_and_coords_roundtrip(tmp_path):
    edges = [(0, 3), (1, 3), (2, 0), (3, 0)]
    p = tmp_path / "g.txt"
    write_digraph(p, edges)
    assert read_digraph(p) == edges

    coords = [0.0, 1.5, -2.25, 7.0]
    q = tmp_path / "c.txt"
    write_coords(q, coords)
    assert np.array_equal(read_coords(q), np.array(coords))


def test_sniffing(tmp_path):
    cfg = sample_config(5, seed=21)
    space = config_metric_space(cfg)
    order = edge_order(cfg)

    pd = tmp_path / "a.txt"
    pp = tmp_path / "b.txt"
    po = tmp_path / "c.txt"
    write_distance_matrix(pd, space)
    write_points(pp, cfg)
    write_edge_order(po, order)

    assert isinstance(sniff_and_read(pd), MetricSpace)
    assert isinstance(sniff_and_read(pp), PointConfig)
    assert isinstance(sniff_and_read(po), EdgeOrder)


def test_comments_and_blank_lines_skipped(tmp_path):
    p = tmp_path / "d.txt"
    p.write_text("# three points\n\n3\n0 1 2\n1 0 1.5\n\n2 1.5 0\n# end\n")
    space = read_distance_matrix(p)
    assert space.n == 3
    assert space.dist[0, 2] == 2.0


@pytest.mark.parametrize("text", [
    "",
    "x\n0",
    "2\n0 1\n",                       # missing row
    "2\n0 1 2\n1 0 2\n",              # wrong row width
    "2\n0 q\nq 0\n",                  # non-numeric
])
def test_bad_distance_files(tmp_path, text):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    with pytest.raises(FormatError):
        read_distance_matrix(p)


@pytest.mark.parametrize("text", [
    "2 2 chebyshev\n0 0\n1 1\n",      # unknown metric
    "2 2 l2\n0 0\n",                  # missing row
    "2 2 l2\n0 0 0\n1 1 1\n",        # wrong width
])
def test_bad_points_files(tmp_path, text):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    with pytest.raises(FormatError):
        read_points(p)


@pytest.mark.parametrize("text", [
    "0-1 0-2\n1-2\n",                 # two lines
    "0-1 0-0 1-2\n",                  # repeated point
    "0-1 1-0 0-2\n",                  # duplicate pair
    "0-1 0-2\n",                      # incomplete order on 3 points
    "0-1 apple 1-2\n",                # junk token
])
def test_bad_edge_order_files(tmp_path, text):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    with pytest.raises(FormatError):
        read_edge_order(p)


def test_bad_digraph_and_sniff(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("0 1 2\n")
    with pytest.raises(FormatError):
        read_digraph(p)
    p.write_text("0 1\nare friends\n")
    with pytest.raises(FormatError):
        read_digraph(p)
    p.write_text("what even is\nthis file\n")
    with pytest.raises(FormatError):
        sniff_and_read(p)
