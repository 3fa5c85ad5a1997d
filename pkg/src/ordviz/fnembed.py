"""Constructive farthest-neighbour representation in the plane.

Every finite metric space admits plane points whose farthest-neighbour
digraph equals the original's.  The construction places each component of
the fn digraph (a bi-rooted forest) on a pair of antipodal circles:

* component j gets circles of radius 2 around the unit-circle points
  ``c_j`` and ``-c_j``, where ``c_j = exp(i * 2^(-j-1) * pi)``;
* a vertex with parity q and curve parameter xi sits at
  ``exp(i*(q*pi + 2^(-j-1)*pi)) * (1 + 2*exp(i*lambda*xi*pi))``,
  so each circle carries one parity and the two roots (xi = 0) land at
  the antipodes ``3c_j`` and ``-3c_j``, distance 6 apart — the maximum.

For two points on opposite circles with parameters xi and eta the squared
distance is ``12 + 8cos(a) + 16cos(a/2)cos(b - a/2)`` with ``a =
lambda*xi*pi``, ``b = lambda*eta*pi``: for fixed xi it is exactly
unimodal in eta with peak at eta = xi/2.  Hence "farther" is equivalent
to "parameter closer to xi/2" while all angles stay below a quarter
turn, and it suffices to give every vertex a parameter whose half is
closer to its parent's parameter than to any other same-circle one.
The dyadic scheme below does that: one root's tree uses positive
parameters, the other's negative; the m-th child of a root gets
``1 + 2^-m``, and deeper children interpolate between twice the parent's
parameter and the parent's next sibling's.

``lambda`` only needs to be small.  It starts at ``1/(4*2^D)`` (D = tree
depth, keeping angles at or below a quarter turn) and is halved until
recomputing farthest neighbours from the drawn points returns the input
digraph with a safe relative margin; the result is never returned
unverified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import ConstructionError, InvalidInputError
from .metric import MetricSpace, PointConfig, neighbour_maps
from .neighbours import (BiRootedForestDecomposition, decompose_bi_rooted,
                         neighbour_digraph)

_FN_MARGIN = 1e-9
_MAX_HALVINGS = 40


@lru_cache(maxsize=None)
def _xi(path: tuple[int, ...]) -> Fraction:
    """Curve parameter of the tree address ``path`` (sibling indices from
    the root down).  Sibling parameters referenced by the recursion exist
    in the infinite tree even when the finite graph leaves them empty."""
    if not path:
        return Fraction(0)
    m = path[-1]
    w = Fraction(1, 2 ** m)
    if len(path) == 1:
        return 1 + w
    parent = path[:-1]
    uncle = parent[:-1] + (parent[-1] + 1,)
    return (1 + w) * _xi(parent) + (1 - w) * _xi(uncle)


def curve_point(j: int, q: int, xi: float, lam: float) -> tuple[float, float]:
    """Plane position for parity q, parameter xi on component j's circles."""
    base = (q + 2.0 ** (-j - 1)) * math.pi
    turn = lam * xi * math.pi
    re = math.cos(base) + 2.0 * math.cos(base + turn)
    im = math.sin(base) + 2.0 * math.sin(base + turn)
    return re, im


@dataclass(frozen=True)
class FnComponentPlan:
    index: int
    roots: tuple[int, int]
    centre0: tuple[float, float]
    centre1: tuple[float, float]
    lam: float
    depth: int


@dataclass(frozen=True)
class FnVertexPlan:
    vertex: int
    component: int
    parity: int
    xi: Fraction


@dataclass(frozen=True)
class FnEmbeddingPlan:
    components: tuple[FnComponentPlan, ...]
    vertices: tuple[FnVertexPlan, ...]

    def coords(self) -> np.ndarray:
        lam = {c.index: c.lam for c in self.components}
        out = np.empty((len(self.vertices), 2))
        for v in self.vertices:
            out[v.vertex] = curve_point(v.component, v.parity,
                                        float(v.xi), lam[v.component])
        return out


def _vertex_plans(decomp: BiRootedForestDecomposition) -> tuple[list[FnVertexPlan], list[int]]:
    plans: list[FnVertexPlan] = []
    depths: list[int] = []
    for j, comp in enumerate(decomp.components):
        depths.append(comp.depth)
        for side, root in enumerate(comp.roots):
            sign = 1 if side == 0 else -1
            stack: list[tuple[int, tuple[int, ...], int]] = [(root, (), 0)]
            while stack:
                v, path, depth = stack.pop()
                parity = (depth + side) % 2
                plans.append(FnVertexPlan(vertex=v, component=j, parity=parity,
                                          xi=sign * _xi(path)))
                for m, u in enumerate(comp.children(v)):
                    stack.append((u, path + (m,), depth + 1))
    return plans, depths


def _verified_fn(coords: np.ndarray, fn: tuple[int, ...]) -> bool:
    d = np.hypot(coords[:, None, 0] - coords[None, :, 0],
                 coords[:, None, 1] - coords[None, :, 1])
    n = len(fn)
    for v in range(n):
        row = d[v].copy()
        dv = row[fn[v]]
        row[fn[v]] = -np.inf
        row[v] = -np.inf
        others = row.max()
        if others > 0 and not dv > (1.0 + _FN_MARGIN) * others:
            return False
    return True


def fn_embedding_plan(space: MetricSpace) -> FnEmbeddingPlan:
    """Verified drawing plan whose point set has the space's fn digraph."""
    graph = neighbour_digraph(space, "farthest")
    decomp = decompose_bi_rooted(graph)
    if not decomp.valid:
        raise InvalidInputError(
            f"farthest-neighbour digraph is not a bi-rooted forest: {decomp.reason}")
    vplans, depths = _vertex_plans(decomp)
    lams = [1.0 / (4.0 * 2 ** d) for d in depths]
    fn = graph.out
    for _ in range(_MAX_HALVINGS):
        comps = tuple(
            FnComponentPlan(index=j, roots=comp.roots,
                            centre0=_centre(j, 0), centre1=_centre(j, 1),
                            lam=lams[j], depth=depths[j])
            for j, comp in enumerate(decomp.components))
        plan = FnEmbeddingPlan(components=comps, vertices=tuple(vplans))
        if _verified_fn(plan.coords(), fn):
            return plan
        lams = [l / 2.0 for l in lams]
    raise ConstructionError(
        "farthest-neighbour drawing failed verification at every curve scale")


def _centre(j: int, q: int) -> tuple[float, float]:
    ang = (q + 2.0 ** (-j - 1)) * math.pi
    return math.cos(ang), math.sin(ang)


def fn_embed_plane(space: MetricSpace) -> PointConfig:
    """Plane points whose farthest-neighbour digraph equals the space's.

    The digraph equality is verified (with relative margin) before
    returning; a failure raises instead of returning a bad drawing.
    """
    return PointConfig(coords=fn_embedding_plan(space).coords())
