"""Nearest/farthest-neighbour digraphs and their plane geometry.

Sending every point to its nearest (or farthest) point defines a
functional digraph.  Each weakly connected component contains exactly one
cycle, and for distance data with distinct values that cycle is always a
*double edge*: a mutual pair whose members point at each other.  All other
edges flow toward the double edge, so each component is a tree rooted in
its mutual pair ("bi-rooted forest", :func:`decompose_bi_rooted`).

In the Euclidean plane a nearest-neighbour digraph can give a vertex at
most four *proper* children (in-edges not returned by the vertex).
:func:`plane_nn_feasible` applies that criterion; :func:`nn_embed_plane`
actually draws any feasible forest of up to nine vertices and proves the
drawing right by recomputing its nn digraph.

:func:`fejes_toth_delta` is the classical bound on the smallest pairwise
distance achievable by n points on the unit sphere; it dips below 1
between n = 13 and n = 14, which caps the in-degree of farthest-neighbour
digraphs realisable on a sphere.

:func:`nn_statistics` estimates, by simulation, how common mutual nearest
pairs are for uniformly random planar points (about 62.15% of points
belong to one, hence about 0.31 n components) and how often a uniformly
random edge order keeps every vertex at four proper children or fewer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import ConstructionError, InvalidInputError
from .metric import (MetricSpace, NeighbourMaps, PointConfig, index_pair,
                     neighbour_maps, pair_count)
from .orders import EdgeOrder, neighbour_maps_from_order


@dataclass(frozen=True)
class Digraph:
    """Functional digraph: vertex ``v`` points at ``out[v]``."""

    out: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.out)

    def edges(self) -> list[tuple[int, int]]:
        return [(v, self.out[v]) for v in range(self.n)]

    def in_neighbours(self, v: int) -> list[int]:
        return [u for u in range(self.n) if self.out[u] == v]


def neighbour_digraph(source: MetricSpace | NeighbourMaps | EdgeOrder,
                      which: str = "nearest") -> Digraph:
    """The nn or fn digraph of a space, neighbour maps, or bare edge order."""
    if which not in ("nearest", "farthest"):
        raise InvalidInputError("which must be 'nearest' or 'farthest'")
    if isinstance(source, MetricSpace):
        maps = neighbour_maps(source)
    elif isinstance(source, EdgeOrder):
        maps = neighbour_maps_from_order(source)
    elif isinstance(source, NeighbourMaps):
        maps = source
    else:
        raise InvalidInputError(f"cannot build a digraph from {type(source).__name__}")
    return Digraph(out=maps.nn if which == "nearest" else maps.fn)


@dataclass(frozen=True)
class ForestComponent:
    """One component: a mutual pair of roots plus trees hanging off them.

    ``parent`` maps every non-root member to the vertex it points at;
    ``depth`` is the longest root-to-leaf distance.
    """

    roots: tuple[int, int]
    members: tuple[int, ...]
    parent: tuple[tuple[int, int], ...]
    depth: int

    def parent_of(self, v: int) -> Optional[int]:
        return dict(self.parent).get(v)

    def children(self, v: int) -> list[int]:
        return sorted(u for u, p in self.parent if p == v)


@dataclass(frozen=True)
class BiRootedForestDecomposition:
    valid: bool
    components: tuple[ForestComponent, ...] = ()
    reason: Optional[str] = None

    @property
    def n(self) -> int:
        return sum(len(c.members) for c in self.components)


def decompose_bi_rooted(graph: Digraph) -> BiRootedForestDecomposition:
    """Split a functional digraph into bi-rooted trees.

    Valid iff every component's unique cycle is a double edge (length 2).
    Self-loops or longer cycles make the decomposition invalid; digraphs
    of distinct-distance data never have them, but arbitrary digraphs are
    accepted and reported.
    """
    n = graph.n
    out = graph.out
    if any(not 0 <= v < n for v in out):
        raise InvalidInputError("digraph edge leaves the vertex range")
    comp = [-1] * n
    comps: list[list[int]] = []
    for start in range(n):
        if comp[start] != -1:
            continue
        stack = [start]
        comp[start] = len(comps)
        members = []
        while stack:
            v = stack.pop()
            members.append(v)
            for u in [out[v]] + graph.in_neighbours(v):
                if comp[u] == -1:
                    comp[u] = comp[start]
                    stack.append(u)
        comps.append(sorted(members))

    built = []
    for members in comps:
        # walk from any member until a vertex repeats: that closes the cycle
        seen = {}
        v = members[0]
        steps = 0
        while v not in seen:
            seen[v] = steps
            v = out[v]
            steps += 1
        cycle_len = steps - seen[v]
        if cycle_len != 2:
            return BiRootedForestDecomposition(
                valid=False,
                reason=f"component {members} has a cycle of length {cycle_len}, not a double edge")
        r0, r1 = sorted((v, out[v]))
        parent = []
        depth = 0
        for u in members:
            if u in (r0, r1):
                continue
            parent.append((u, out[u]))
            w, dist = u, 0
            while w not in (r0, r1):
                w = out[w]
                dist += 1
            depth = max(depth, dist)
        built.append(ForestComponent(roots=(r0, r1), members=tuple(members),
                                     parent=tuple(parent), depth=depth))
    return BiRootedForestDecomposition(valid=True, components=tuple(built))


def proper_children(graph: Digraph, v: int) -> list[int]:
    """In-neighbours of v whose edge is not returned by v."""
    return [u for u in graph.in_neighbours(v) if graph.out[v] != u]


def max_proper_children(graph: Digraph) -> int:
    return max((len(proper_children(graph, v)) for v in range(graph.n)), default=0)


@dataclass(frozen=True)
class PlaneFeasibility:
    verdict: str  # "feasible" | "infeasible" | "out-of-scope"
    max_proper_children: int
    reason: str


def plane_nn_feasible(graph: Digraph) -> PlaneFeasibility:
    """Can this digraph be the nn digraph of plane points?

    Five or more proper children anywhere is impossible at any size.  Up
    to four is constructively realisable for forests of at most nine
    vertices; larger low-fanout forests are reported out of scope rather
    than decided.
    """
    decomp = decompose_bi_rooted(graph)
    if not decomp.valid:
        return PlaneFeasibility(verdict="infeasible", max_proper_children=-1,
                                reason=f"not a bi-rooted forest: {decomp.reason}")
    mpc = max_proper_children(graph)
    if mpc >= 5:
        return PlaneFeasibility(
            verdict="infeasible", max_proper_children=mpc,
            reason=f"a vertex has {mpc} proper children; at most 4 fit in the plane")
    if graph.n >= 10:
        return PlaneFeasibility(
            verdict="out-of-scope", max_proper_children=mpc,
            reason=f"{graph.n} vertices with fanout <= 4: not decided by this construction")
    return PlaneFeasibility(verdict="feasible", max_proper_children=mpc,
                            reason="at most 4 proper children and at most 9 vertices")


# -- constructive plane embedding of feasible nn forests ---------------------

_COMPONENT_OFFSET = 1.0e4
_BASE_EDGE = 100.0
_NN_MARGIN = 1e-9


def _ang_diff(a: float, b: float) -> float:
    d = (a - b) % (2 * math.pi)
    return d - 2 * math.pi if d > math.pi else d


def _free_arc_centre(parent_xy: np.ndarray, length: float,
                     child_offsets: Sequence[float],
                     placed: list[np.ndarray], clearance: float) -> Optional[float]:
    """Direction around ``parent_xy`` placing children (at ``child_offsets``
    from it) at least ``(1+clearance)*length`` from every placed point."""
    min_dist = (1.0 + clearance) * length
    bad: list[tuple[float, float]] = []
    for q in placed:
        rel = q - parent_xy
        dist = float(np.hypot(rel[0], rel[1]))
        if dist >= min_dist + length:
            continue
        cosb = (dist * dist + length * length - min_dist * min_dist) / (2 * dist * length)
        if cosb >= 1.0:
            continue
        if cosb <= -1.0:
            return None
        bad.append((math.atan2(rel[1], rel[0]), math.acos(cosb)))
    best = None
    for k in range(720):
        centre = k * math.pi / 360.0
        margin = math.inf
        for ang, beta in bad:
            for off in child_offsets:
                sep = abs(_ang_diff(centre + off, ang))
                margin = min(margin, sep - beta)
                if margin <= 0:
                    break
            if margin <= 0:
                break
        if margin > 0 and (best is None or margin > best[1]):
            best = (centre, margin)
    return None if best is None else best[0]


def _try_embed_component(comp: ForestComponent, origin: np.ndarray, theta: float,
                         clearance: float) -> Optional[dict[int, np.ndarray]]:
    r0, r1 = comp.roots
    pos: dict[int, np.ndarray] = {
        r0: origin.copy(),
        r1: origin + np.array([_BASE_EDGE, 0.0]),
    }
    depth_of = {r0: 0, r1: 0}
    queue = [r0, r1]
    while queue:
        v = queue.pop(0)
        kids = comp.children(v)
        if not kids:
            continue
        d = depth_of[v] + 1
        length = _BASE_EDGE + d
        span = (len(kids) - 1) * theta
        offsets = [-span / 2 + i * theta for i in range(len(kids))]
        placed = [p for u, p in pos.items() if u != v]
        centre = _free_arc_centre(pos[v], length, offsets, placed, clearance)
        if centre is None:
            return None
        for idx, u in enumerate(kids):
            phi = centre + offsets[idx]
            # slightly distinct radii keep the drawing's distances generic
            r = length + 0.001 * (idx + 1)
            pos[u] = pos[v] + r * np.array([math.cos(phi), math.sin(phi)])
            depth_of[u] = d
            queue.append(u)
    return pos


def _verified_nn(coords: np.ndarray, expected: dict[int, int]) -> bool:
    config = PointConfig(coords=coords)
    d = config.distance_matrix()
    np.fill_diagonal(d, np.inf)
    for v, want in expected.items():
        row = d[v].copy()
        dv = row[want]
        row[want] = np.inf
        if not dv * (1.0 + _NN_MARGIN) < row.min():
            return False
    return True


def nn_embed_plane(decomp: BiRootedForestDecomposition) -> PointConfig:
    """Draw a feasible bi-rooted forest so its nn digraph comes back exactly.

    Roots sit 100 apart; depth-d edges have length about 100 + d, and each
    vertex's children fan out with a mutual angle slightly above 60
    degrees, centred on the direction left widest by everything already
    placed.  Components are stacked far apart and each gets its own slight
    rotation so no two drawings align.  Several (angle, clearance)
    settings are tried; a drawing is only returned once recomputing
    nearest neighbours reproduces the forest with a safe margin.
    """
    if not decomp.valid:
        raise InvalidInputError("cannot embed an invalid decomposition")
    n = decomp.n
    if n == 0:
        raise InvalidInputError("empty forest")
    if n > 9:
        raise InvalidInputError("constructive embedding covers at most 9 vertices")
    for comp in decomp.components:
        for v in comp.members:
            if len(comp.children(v)) > 4:
                raise InvalidInputError(
                    f"vertex {v} has {len(comp.children(v))} proper children; not plane-feasible")

    expected: dict[int, int] = {}
    for comp in decomp.components:
        r0, r1 = comp.roots
        expected[r0] = r1
        expected[r1] = r0
        expected.update(dict(comp.parent))

    for theta_deg in (62.0, 64.0, 61.0, 66.0, 63.0):
        for clearance in (0.06, 0.03, 0.012):
            theta = math.radians(theta_deg)
            pos: dict[int, np.ndarray] = {}
            ok = True
            for ci, comp in enumerate(decomp.components):
                origin = np.array([ci * _COMPONENT_OFFSET, 0.0])
                placed = _try_embed_component(comp, origin, theta, clearance)
                if placed is None:
                    ok = False
                    break
                rot = ci * 0.07
                c, s = math.cos(rot), math.sin(rot)
                for u, p in placed.items():
                    rel = p - origin
                    pos[u] = origin + np.array([c * rel[0] - s * rel[1],
                                                s * rel[0] + c * rel[1]])
            if not ok:
                continue
            coords = np.array([pos[v] for v in range(n)])
            if _verified_nn(coords, expected):
                return PointConfig(coords=coords)
    raise ConstructionError("no angle schedule produced a verifiable drawing")


def fejes_toth_delta(n: int) -> float:
    """Largest achievable minimum pairwise distance of n points on the unit
    sphere: sqrt(4 - cosec^2((n/(n-2)) * pi/6)).  Strictly decreasing in n;
    the value crosses 1 between n = 13 and n = 14."""
    if n < 3:
        raise InvalidInputError("the sphere bound needs n >= 3")
    x = (n / (n - 2)) * (math.pi / 6.0)
    radicand = 4.0 - 1.0 / math.sin(x) ** 2
    if radicand < 0:
        raise InvalidInputError(f"negative radicand for n={n}")
    return math.sqrt(radicand)


def non_nn_fraction(source: MetricSpace | PointConfig | NeighbourMaps) -> Fraction:
    """Exact fraction of points that are nobody's nearest neighbour."""
    if isinstance(source, PointConfig):
        d = source.distance_matrix()
        np.fill_diagonal(d, np.inf)
        nn = tuple(int(v) for v in d.argmin(axis=1))
        n = source.n
    elif isinstance(source, MetricSpace):
        maps = neighbour_maps(source)
        nn, n = maps.nn, source.n
    elif isinstance(source, NeighbourMaps):
        nn, n = source.nn, source.n
    else:
        raise InvalidInputError(f"cannot compute nn image of {type(source).__name__}")
    return Fraction(n - len(set(nn)), n)


# -- Monte Carlo -------------------------------------------------------------


def _decode_pair_indices(n: int, ks: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised inverse of the lexicographic pair index."""
    kf = ks.astype(np.float64)
    b = 2.0 * n - 1.0
    i = np.floor((b - np.sqrt(b * b - 8.0 * kf)) / 2.0).astype(np.int64)
    # nudge float boundary cases onto the right row
    for _ in range(2):
        start = i * (2 * n - i - 1) // 2
        i = np.where(ks < start, i - 1, i)
        start = i * (2 * n - i - 1) // 2
        nxt = (i + 1) * (2 * n - i - 2) // 2
        i = np.where(ks >= nxt, i + 1, i)
    start = i * (2 * n - i - 1) // 2
    j = ks - start + i + 1
    return i, j


def random_order_nn(n: int, rng: np.random.Generator) -> np.ndarray:
    """nn map of a uniformly random edge order, sampled directly.

    In a uniform order the nearest neighbour of v is v's partner in the
    earliest pair containing v, so drawing distinct pairs uniformly until
    every vertex has appeared reproduces the map without ranking all
    C(n, 2) pairs.
    """
    if n < 2:
        raise InvalidInputError("need at least two points")
    m = pair_count(n)
    nn = np.full(n, -1, dtype=np.int64)
    unset = n
    drawn: set[int] = set()
    while unset:
        ks = rng.integers(0, m, size=max(256, 2 * unset))
        ii, jj = _decode_pair_indices(n, ks)
        for k, i, j in zip(ks.tolist(), ii.tolist(), jj.tolist()):
            if k in drawn:
                continue
            drawn.add(k)
            if nn[i] == -1:
                nn[i] = j
                unset -= 1
            if nn[j] == -1:
                nn[j] = i
                unset -= 1
            if not unset:
                break
    return nn


@dataclass(frozen=True)
class NnStatistics:
    biroot_prob: float
    components_per_point: float
    plane_feasible_rate: float
    trials: int
    n: int


def nn_statistics(n: int, trials: int, seed: int = 0) -> NnStatistics:
    """Monte Carlo facts about nearest-neighbour digraphs.

    ``biroot_prob`` and ``components_per_point`` average over uniform
    samples of n points in the unit square (for large n they approach
    0.6215 and half of that).  ``plane_feasible_rate`` is the fraction of
    uniformly random edge orders on n points whose nn digraph keeps at
    most 4 proper children per vertex — the plane-realisability criterion.
    Each trial reseeds from ``(seed, trial)``.
    """
    if n < 2 or trials < 1:
        raise InvalidInputError("need n >= 2 and at least one trial")
    biroot = np.empty(trials)
    comppp = np.empty(trials)
    feas = np.empty(trials)
    idx0 = np.arange(n)
    for t in range(trials):
        rng = np.random.default_rng((seed, t))
        pts = rng.random((n, 2))
        _, idx = cKDTree(pts).query(pts, k=2)
        nn = idx[:, 1].astype(np.int64)
        mutual = nn[nn] == idx0
        biroot[t] = mutual.mean()
        comppp[t] = mutual.sum() / 2 / n

        onn = random_order_nn(n, rng)
        indeg = np.bincount(onn, minlength=n)
        proper = indeg - (onn[onn] == idx0)
        feas[t] = 1.0 if proper.max() <= 4 else 0.0
    return NnStatistics(biroot_prob=float(biroot.mean()),
                        components_per_point=float(comppp.mean()),
                        plane_feasible_rate=float(feas.mean()),
                        trials=trials, n=n)


def forest_from_children(children_of_roots: Sequence[int]) -> Digraph:
    """Convenience builder: one component, two roots, and the given number
    of proper children attached to each root (no grandchildren)."""
    if len(children_of_roots) != 2:
        raise InvalidInputError("give the child count for each of the two roots")
    out = [1, 0]
    for root, k in enumerate(children_of_roots):
        for _ in range(k):
            out.append(root)
    return Digraph(out=tuple(out))
