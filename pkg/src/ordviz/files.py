"""Plain-text on-disk formats.

* distance matrix - first line ``n``, then ``n`` rows of ``n`` decimals;
* point list      - first line ``n m metric`` with metric ``l2`` or ``l1``,
                    then ``n`` rows of ``m`` decimals;
* edge order      - a single line of ``C(n,2)`` tokens ``i-j`` listed from
                    the closest pair to the farthest;
* digraph         - one ``u v`` edge per line;
* coordinates     - one number per line (line embeddings);
* certificates    - one bisection step per line:
                    ``cut total gamma gamma_ref orientation``.

Readers raise :class:`~ordviz.errors.FormatError` on malformed input.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import FormatError
from .metric import MetricSpace, PointConfig, build_metric_space, pair_count
from .orders import EdgeOrder

PathLike = Union[str, Path]

_PAIR_TOKEN = re.compile(r"^(\d+)-(\d+)$")


def _lines(path: PathLike) -> list[str]:
    text = Path(path).read_text()
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def read_distance_matrix(path: PathLike, tie_policy: str = "reject") -> MetricSpace:
    lines = _lines(path)
    if not lines:
        raise FormatError(f"{path}: empty distance file")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise FormatError(f"{path}: first line must be the point count") from exc
    if len(lines) != n + 1:
        raise FormatError(f"{path}: expected {n} matrix rows, found {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != n:
            raise FormatError(f"{path}: matrix row has {len(parts)} entries, expected {n}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as exc:
            raise FormatError(f"{path}: non-numeric matrix entry") from exc
    return build_metric_space(np.array(rows), tie_policy=tie_policy)  # type: ignore[arg-type]


def write_distance_matrix(path: PathLike, space: MetricSpace) -> None:
    out = [str(space.n)]
    for row in space.dist:
        out.append(" ".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(out) + "\n")


def read_points(path: PathLike) -> PointConfig:
    lines = _lines(path)
    if not lines:
        raise FormatError(f"{path}: empty points file")
    head = lines[0].split()
    if len(head) != 3 or head[2] not in ("l2", "l1"):
        raise FormatError(f"{path}: header must be 'n m metric' with metric l2|l1")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise FormatError(f"{path}: bad point/dimension counts") from exc
    if len(lines) != n + 1:
        raise FormatError(f"{path}: expected {n} coordinate rows, found {len(lines) - 1}")
    coords = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != m:
            raise FormatError(f"{path}: coordinate row has {len(parts)} entries, expected {m}")
        coords.append([float(p) for p in parts])
    return PointConfig(coords=np.array(coords), metric=head[2])  # type: ignore[arg-type]


def write_points(path: PathLike, config: PointConfig) -> None:
    out = [f"{config.n} {config.m} {config.metric}"]
    for row in config.coords:
        out.append(" ".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(out) + "\n")


def read_edge_order(path: PathLike) -> EdgeOrder:
    lines = _lines(path)
    if len(lines) != 1:
        raise FormatError(f"{path}: edge order files hold exactly one line of i-j tokens")
    pairs = []
    seen = set()
    top = -1
    for tok in lines[0].split():
        m = _PAIR_TOKEN.match(tok)
        if not m:
            raise FormatError(f"{path}: bad pair token {tok!r}")
        i, j = int(m.group(1)), int(m.group(2))
        if i == j:
            raise FormatError(f"{path}: pair token {tok!r} repeats a point")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise FormatError(f"{path}: duplicate pair {tok!r}")
        seen.add(key)
        pairs.append(key)
        top = max(top, j, i)
    n = top + 1
    if len(pairs) != pair_count(n):
        raise FormatError(
            f"{path}: found {len(pairs)} pairs; a complete order on {n} points needs {pair_count(n)}")
    return EdgeOrder.from_pairs(n, pairs)


def write_edge_order(path: PathLike, order: EdgeOrder) -> None:
    toks = [f"{i}-{j}" for i, j in order.pairs_by_rank()]
    Path(path).write_text(" ".join(toks) + "\n")


def read_digraph(path: PathLike) -> list[tuple[int, int]]:
    edges = []
    for ln in _lines(path):
        parts = ln.split()
        if len(parts) != 2:
            raise FormatError(f"{path}: digraph lines are 'u v', got {ln!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise FormatError(f"{path}: non-integer vertex id in {ln!r}") from exc
    return edges


def write_digraph(path: PathLike, edges: Sequence[tuple[int, int]]) -> None:
    Path(path).write_text("".join(f"{u} {v}\n" for u, v in edges))


def read_coords(path: PathLike) -> np.ndarray:
    try:
        vals = [float(ln) for ln in _lines(path)]
    except ValueError as exc:
        raise FormatError(f"{path}: coordinate files hold one number per line") from exc
    return np.array(vals)


def write_coords(path: PathLike, coords: Sequence[float]) -> None:
    Path(path).write_text("".join(f"{v}\n" for v in coords))


def sniff_and_read(path: PathLike):
    """Load a distance matrix, point list, or edge order, guessing the format.

    The three headers are disjoint: an edge order starts with an ``i-j``
    token, a points file with ``n m metric``, a distance matrix with a
    bare integer.
    """
    lines = _lines(path)
    if not lines:
        raise FormatError(f"{path}: empty file")
    head = lines[0].split()
    if _PAIR_TOKEN.match(head[0]):
        return read_edge_order(path)
    if len(head) == 3 and head[2] in ("l2", "l1"):
        return read_points(path)
    if len(head) == 1:
        return read_distance_matrix(path)
    raise FormatError(f"{path}: unrecognised format (header {lines[0]!r})")
