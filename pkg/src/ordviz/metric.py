"""Finite metric spaces, point configurations, and neighbour maps.

A :class:`MetricSpace` is a symmetric matrix of pairwise distances over
``n`` labelled points with zero diagonal, positive off-diagonal entries
and *pairwise distinct* off-diagonal values.  Distinctness is what makes
the order of the ``C(n, 2)`` pair distances well defined, and everything
else in this package works on that order.  The triangle inequality is
checked and reported (``triangle_ok``) but never required.

A :class:`PointConfig` is an ``n x m`` array of coordinates together with
a metric tag (``"l2"`` Euclidean, or ``"l1"`` Manhattan restricted to the
plane).  It induces a distance matrix and thereby, when distances are
distinct, a MetricSpace.

:class:`NeighbourMaps` holds the nearest- and farthest-point maps
``nn`` and ``fn``; with distinct distances both are single valued and
never fix a point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import DegenerateConfigError, InvalidInputError, TiedDistancesError

TiePolicy = Literal["reject", "perturb"]
MetricTag = Literal["l2", "l1"]


def pair_count(n: int) -> int:
    """Number of unordered point pairs, C(n, 2)."""
    return n * (n - 1) // 2


def pair_index(n: int, i: int, j: int) -> int:
    """Index of the pair {i, j} (i < j) in lexicographic pair order."""
    if not 0 <= i < j < n:
        raise InvalidInputError(f"need 0 <= i < j < n, got i={i} j={j} n={n}")
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


def index_pair(n: int, k: int) -> tuple[int, int]:
    """Inverse of :func:`pair_index`."""
    if not 0 <= k < pair_count(n):
        raise InvalidInputError(f"pair index {k} out of range for n={n}")
    i = 0
    row = n - 1
    while k >= row:
        k -= row
        i += 1
        row -= 1
    return i, i + 1 + k


def all_pairs(n: int) -> list[tuple[int, int]]:
    """All pairs {i, j}, i < j, in lexicographic order."""
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


@dataclass(frozen=True)
class MetricSpace:
    """Validated distance data over ``n`` labelled points.

    Attributes
    ----------
    n : int
        Number of points (>= 2).
    dist : np.ndarray
        Symmetric ``n x n`` float matrix, zero diagonal, distinct
        positive off-diagonal entries.
    triangle_ok : bool
        Whether all triangle inequalities hold.  Informational only.
    """

    n: int
    dist: np.ndarray = field(repr=False)
    triangle_ok: bool

    def pair_distances(self) -> np.ndarray:
        """The C(n, 2) distances in lexicographic pair order."""
        iu = np.triu_indices(self.n, k=1)
        return self.dist[iu]

    def d(self, i: int, j: int) -> float:
        return float(self.dist[i, j])


def _check_triangle(dist: np.ndarray) -> bool:
    # d[i,k] <= d[i,j] + d[j,k] for all j: vectorised via min-plus product.
    n = dist.shape[0]
    if n < 3:
        return True
    through = (dist[:, :, None] + dist[None, :, :]).min(axis=1)
    return bool(np.all(dist <= through + 1e-12 * np.maximum(dist, 1.0)))


def build_metric_space(dist: Sequence[Sequence[float]] | np.ndarray,
                       tie_policy: TiePolicy = "reject") -> MetricSpace:
    """Validate a distance matrix and wrap it as a :class:`MetricSpace`.

    The matrix must be square, symmetric, with zero diagonal and positive
    off-diagonal entries.  Exactly tied off-diagonal values are rejected
    under ``tie_policy="reject"``; under ``"perturb"`` the k-th tied entry
    in row-major upper-triangle order receives an additive ``k * eps``
    with ``eps = (smallest nonzero gap between distinct values) /
    (2 * C(n, 2))``, which breaks every tie while preserving all strict
    comparisons.  The perturbation is deterministic.
    """
    d = np.array(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise InvalidInputError(f"distance matrix must be square, got shape {d.shape}")
    n = d.shape[0]
    if n < 2:
        raise InvalidInputError("need at least 2 points")
    if not np.all(np.isfinite(d)):
        raise InvalidInputError("distances must be finite")
    if not np.allclose(d, d.T, rtol=0, atol=0):
        raise InvalidInputError("distance matrix must be exactly symmetric")
    if np.any(np.diag(d) != 0.0):
        raise InvalidInputError("diagonal must be zero")
    iu = np.triu_indices(n, k=1)
    off = d[iu]
    if np.any(off <= 0.0):
        raise InvalidInputError("off-diagonal distances must be positive")

    values, counts = np.unique(off, return_counts=True)
    if np.any(counts > 1):
        if tie_policy == "reject":
            raise TiedDistancesError(
                f"{int(np.sum(counts[counts > 1]))} off-diagonal entries share tied values")
        gaps = np.diff(values)
        gaps = gaps[gaps > 0]
        base = float(gaps.min()) if gaps.size else float(values.min())
        eps = base / (2 * pair_count(n))
        tied_values = set(values[counts > 1].tolist())
        k = 0
        for i in range(n):
            for j in range(i + 1, n):
                if d[i, j] in tied_values:
                    k += 1
                    d[i, j] = d[i, j] + k * eps
                    d[j, i] = d[i, j]
        off = d[np.triu_indices(n, k=1)]
        if np.unique(off).size != off.size:  # pragma: no cover - eps math guarantees this
            raise TiedDistancesError("tie perturbation failed to separate all entries")

    return MetricSpace(n=n, dist=d, triangle_ok=_check_triangle(d))


@dataclass(frozen=True)
class PointConfig:
    """``n`` points in ``m``-dimensional space under the tagged metric."""

    coords: np.ndarray = field(repr=False)
    metric: MetricTag = "l2"

    def __post_init__(self) -> None:
        c = np.asarray(self.coords, dtype=float)
        if c.ndim != 2:
            raise InvalidInputError(f"coords must be 2-d, got shape {c.shape}")
        if self.metric == "l1" and c.shape[1] != 2:
            raise InvalidInputError("the l1 metric is only supported in the plane (m=2)")
        if self.metric not in ("l2", "l1"):
            raise InvalidInputError(f"unknown metric tag {self.metric!r}")
        object.__setattr__(self, "coords", c)

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def m(self) -> int:
        return self.coords.shape[1]

    def distance_matrix(self) -> np.ndarray:
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        if self.metric == "l2":
            return np.sqrt((diff ** 2).sum(axis=2))
        return np.abs(diff).sum(axis=2)

    def pair_distances(self) -> np.ndarray:
        iu = np.triu_indices(self.n, k=1)
        return self.distance_matrix()[iu]


def config_metric_space(config: PointConfig, tie_policy: TiePolicy = "reject") -> MetricSpace:
    """MetricSpace induced by a configuration (errors on coincident points)."""
    d = config.distance_matrix()
    iu = np.triu_indices(config.n, k=1)
    if np.any(d[iu] == 0.0):
        raise DegenerateConfigError("configuration has coincident points")
    return build_metric_space(d, tie_policy=tie_policy)


@dataclass(frozen=True)
class NeighbourMaps:
    """Nearest (``nn``) and farthest (``fn``) point maps, one entry per point."""

    nn: tuple[int, ...]
    fn: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.nn)

    def fn_image(self) -> frozenset[int]:
        return frozenset(self.fn)

    def nn_image(self) -> frozenset[int]:
        return frozenset(self.nn)


def neighbour_maps(space: "MetricSpace | PointConfig") -> NeighbourMaps:
    """nn and fn maps of a space (well defined by distinctness).

    A PointConfig is accepted too: its maps come straight from its
    distance matrix, ties resolving to the lowest index.
    """
    if space.n < 2:
        raise InvalidInputError("neighbour maps need at least 2 points")
    d = space.distance_matrix() if isinstance(space, PointConfig) else space.dist.copy()
    np.fill_diagonal(d, np.inf)
    nn = tuple(int(x) for x in d.argmin(axis=1))
    np.fill_diagonal(d, -np.inf)
    fn = tuple(int(x) for x in d.argmax(axis=1))
    return NeighbourMaps(nn=nn, fn=fn)
