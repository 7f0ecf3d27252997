"""Artifact writer tests: CSV round trips, SVG validity, manifests."""

import hashlib
import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from thetanet.errors import ConfigError
from thetanet.outputs import (
    emit_plot,
    read_csv,
    read_csv_columns,
    svg_heatmap,
    svg_line_plot,
    write_csv,
    write_manifest,
)


def _parse_svg(path):
    tree = ET.parse(path)  # raises on malformed XML
    assert tree.getroot().tag.endswith("svg")
    return open(path, encoding="ascii").read()


def test_csv_round_trip(tmp_path):
    path = tmp_path / "table.csv"
    rows = [(0.1, 2, True, "up"), (1.0 / 3.0, -5, False, "down")]
    write_csv(path, ["x", "count", "flag", "tag"], rows)
    header, body = read_csv(path)
    assert header == ["x", "count", "flag", "tag"]
    assert body[0] == ["0.1", "2", "1", "up"]
    assert float(body[1][0]) == pytest.approx(1.0 / 3.0, rel=1e-11)
    cols = read_csv_columns(path)
    assert cols["count"] == pytest.approx([2.0, -5.0])
    assert cols["tag"].dtype == object


def test_csv_read_rejects_malformed_files(tmp_path):
    missing = tmp_path / "none.csv"
    with pytest.raises(ConfigError):
        read_csv(missing)
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("a,b\n1,2\n3\n", encoding="ascii")
    with pytest.raises(ConfigError):
        read_csv(ragged)
    empty = tmp_path / "empty.csv"
    empty.write_text("", encoding="ascii")
    with pytest.raises(ConfigError):
        read_csv(empty)
    headonly = tmp_path / "headonly.csv"
    headonly.write_text("a,b\n", encoding="ascii")
    with pytest.raises(ConfigError):
        read_csv_columns(headonly)


def test_line_plot_writes_valid_svg(tmp_path):
    path = tmp_path / "plot.svg"
    x = np.linspace(0.0, 1.0, 20)
    svg_line_plot(path, [
        {"x": x, "y": np.sin(x), "label": "sine"},
        {"x": x, "y": np.cos(x), "label": "cosine", "style": "dashed"},
        {"x": x, "y": x * 0.5, "label": "dots", "style": "dots"},
    ], title="demo", xlabel="x", ylabel="y")
    text = _parse_svg(path)
    assert "polyline" in text and "circle" in text
    assert "stroke-dasharray" in text
    assert "demo" in text and "sine" in text


def test_line_plot_validates_series(tmp_path):
    path = tmp_path / "bad.svg"
    with pytest.raises(ConfigError):
        svg_line_plot(path, [])
    with pytest.raises(ConfigError):
        svg_line_plot(path, [{"x": [], "y": [], "label": "void"}])
    with pytest.raises(ConfigError):
        svg_line_plot(path, [{"x": [1.0, 2.0], "y": [1.0], "label": "odd"}])
    assert not path.exists()


def test_heatmap_writes_valid_svg(tmp_path):
    path = tmp_path / "heat.svg"
    z = np.array([[0.0, 1.0, np.nan], [2.0, 3.0, 4.0]])
    svg_heatmap(path, [1.0, 2.0, 3.0], [10.0, 20.0], z, title="grid")
    text = _parse_svg(path)
    assert "#cccccc" in text          # the nan cell
    assert text.count("<rect") > 6    # cells plus colorbar


def test_heatmap_validates_shape(tmp_path):
    with pytest.raises(ConfigError):
        svg_heatmap(tmp_path / "x.svg", [1.0], [1.0, 2.0], np.zeros((1, 2)))
    with pytest.raises(ConfigError):
        svg_heatmap(tmp_path / "x.svg", [1.0], [1.0],
                    np.array([[np.nan]]))


def test_emit_plot_line_and_heatmap(tmp_path):
    line_csv = tmp_path / "line.csv"
    write_csv(line_csv, ["t", "a", "b"],
              [(0.0, 1.0, 2.0), (1.0, 2.0, 1.0), (2.0, 0.0, 3.0)])
    out = emit_plot(line_csv, "line", tmp_path / "line.svg", ylabel="value")
    assert "polyline" in _parse_svg(out)

    heat_csv = tmp_path / "heat.csv"
    rows = [(x, y, x * y) for y in (0.0, 1.0) for x in (0.0, 1.0, 2.0)]
    write_csv(heat_csv, ["x", "y", "value"], rows)
    out = emit_plot(heat_csv, "heatmap", tmp_path / "heat.svg")
    _parse_svg(out)

    with pytest.raises(ConfigError):
        emit_plot(line_csv, "pie", tmp_path / "pie.svg")
    only_x = tmp_path / "onlyx.csv"
    write_csv(only_x, ["t"], [(0.0,), (1.0,)])
    with pytest.raises(ConfigError):
        emit_plot(only_x, "line", tmp_path / "bad.svg")


def test_manifest_contents(tmp_path):
    config_text = "[run]\nseed = 9\n"
    path = write_manifest(tmp_path, config_text, seed=9, wall_time=1.23456,
                          outputs=[tmp_path / "a.csv", "b.svg"],
                          extra={"onset": 0.5})
    payload = json.loads(open(path, encoding="ascii").read())
    assert payload["config"] == config_text
    assert payload["config_sha256"] == hashlib.sha256(
        config_text.encode("ascii")).hexdigest()
    assert payload["seed"] == 9
    assert payload["wall_time_s"] == 1.235
    assert payload["outputs"] == ["a.csv", "b.svg"]
    assert payload["results"] == {"onset": 0.5}
    assert set(payload["versions"]) == {"package", "numpy", "scipy"}


def test_outputs_are_ascii(tmp_path):
    path = write_csv(tmp_path / "t.csv", ["x"], [(np.pi,)])
    open(path, encoding="ascii").read()
    path = svg_line_plot(tmp_path / "t.svg",
                         [{"x": [0.0, 1.0], "y": [0.0, 1.0], "label": "l"}])
    open(path, encoding="ascii").read()
