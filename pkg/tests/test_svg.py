"""SVG rendering sanity checks."""

import pytest

from ordviz import (
    InvalidInputError,
    config_metric_space,
    neighbour_maps,
    render_config_svg,
    sample_config,
    write_svg,
)


def test_render_basic(tmp_path):
    cfg = sample_config(5, seed=6)
    text = render_config_svg(cfg, title="five points")
    assert text.startswith("<svg")
    assert text.rstrip().endswith("</svg>")
    assert text.count("<circle") == 5
    assert "five points" in text

    out = tmp_path / "fig.svg"
    write_svg(out, text)
    assert out.read_text().rstrip() == text.rstrip()


def test_render_with_arrows():
    cfg = sample_config(6, seed=9)
    maps = neighbour_maps(config_metric_space(cfg))
    plain = render_config_svg(cfg)
    nn = render_config_svg(cfg, maps=maps, which="nn")
    both = render_config_svg(cfg, maps=maps, which="both")
    assert plain.count("<path") < nn.count("<path") <= both.count("<path")
    with pytest.raises(InvalidInputError):
        render_config_svg(cfg, maps=maps, which="sideways")


def test_render_rejects_high_dimensions():
    cfg = sample_config(5, seed=1)
    import numpy as np
    from ordviz import PointConfig
    three_d = PointConfig(coords=np.random.default_rng(0).random((4, 3)))
    with pytest.raises(InvalidInputError):
        render_config_svg(three_d)
