"""Edge orders and order-agreement measures.

An :class:`EdgeOrder` on ``n`` points ranks all ``M = C(n, 2)`` unordered
pairs from closest (rank 0) to farthest (rank M-1).  It is the purely
ordinal residue of a metric space: everything a ranking-faithful drawing
is asked to preserve.

``order_accuracy`` is the probability that two pairs drawn at random
compare the same way in two orders; tied image comparisons count as
disagreements.  ``kendall_tau`` is the usual rescaling ``2*accuracy - 1``.
Both are exact rationals, computed in ``O(M log M)`` with a merge-sort
inversion count.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import InvalidInputError, TiedDistancesError
from .metric import (MetricSpace, NeighbourMaps, PointConfig, all_pairs,
                     index_pair, pair_count, pair_index)


@dataclass(frozen=True)
class EdgeOrder:
    """Bijection from the C(n, 2) point pairs onto ranks 0..C(n,2)-1.

    ``ranks[k]`` is the rank of the pair with lexicographic index ``k``;
    rank 0 is the closest pair.
    """

    n: int
    ranks: tuple[int, ...]

    def __post_init__(self) -> None:
        m = pair_count(self.n)
        if len(self.ranks) != m or sorted(self.ranks) != list(range(m)):
            raise InvalidInputError(
                f"ranks must be a permutation of 0..{m - 1} for n={self.n}")

    @property
    def m(self) -> int:
        return pair_count(self.n)

    def rank_of(self, i: int, j: int) -> int:
        if i > j:
            i, j = j, i
        return self.ranks[pair_index(self.n, i, j)]

    def pairs_by_rank(self) -> list[tuple[int, int]]:
        """Pairs listed from closest to farthest."""
        order = sorted(range(self.m), key=lambda k: self.ranks[k])
        return [index_pair(self.n, k) for k in order]

    def rank_matrix(self) -> np.ndarray:
        """Symmetric n x n int matrix of ranks, -1 on the diagonal."""
        out = np.full((self.n, self.n), -1, dtype=np.int64)
        for k, (i, j) in enumerate(all_pairs(self.n)):
            out[i, j] = out[j, i] = self.ranks[k]
        return out

    def key(self) -> bytes:
        """Stable hashable identity, e.g. for deduplication."""
        return np.asarray(self.ranks, dtype=np.int32).tobytes()

    @staticmethod
    def from_pairs(n: int, pairs: Iterable[tuple[int, int]]) -> "EdgeOrder":
        """Build from pairs listed closest-first."""
        ranks = [-1] * pair_count(n)
        for r, (i, j) in enumerate(pairs):
            if i > j:
                i, j = j, i
            ranks[pair_index(n, i, j)] = r
        return EdgeOrder(n=n, ranks=tuple(ranks))


OrderSource = Union[MetricSpace, PointConfig]


def edge_order(source: OrderSource) -> EdgeOrder:
    """The strict distance order induced by a space or configuration.

    A :class:`PointConfig` with exactly tied induced distances is rejected;
    see :func:`order_accuracy_against_config` for the tie-tolerant path.
    """
    if isinstance(source, MetricSpace):
        vals = source.pair_distances()
    elif isinstance(source, PointConfig):
        vals = source.pair_distances()
        if np.unique(vals).size != vals.size:
            raise TiedDistancesError("configuration induces tied distances")
    else:
        raise InvalidInputError(f"cannot take the edge order of {type(source).__name__}")
    order = np.argsort(vals, kind="stable")
    ranks = np.empty(vals.size, dtype=np.int64)
    ranks[order] = np.arange(vals.size)
    return EdgeOrder(n=source.n, ranks=tuple(int(r) for r in ranks))


def count_inversions(seq: Sequence[int]) -> int:
    """Number of pairs i < j with seq[i] > seq[j] (merge-sort, O(M log M))."""
    a = list(seq)
    if len(a) < 2:
        return 0
    buf = a[:]
    return _merge_count(a, buf, 0, len(a))


def _merge_count(a: list[int], buf: list[int], lo: int, hi: int) -> int:
    if hi - lo < 2:
        return 0
    mid = (lo + hi) // 2
    inv = _merge_count(a, buf, lo, mid) + _merge_count(a, buf, mid, hi)
    i, j, k = lo, mid, lo
    while i < mid and j < hi:
        if a[j] < a[i]:
            buf[k] = a[j]
            j += 1
            inv += mid - i
        else:
            buf[k] = a[i]
            i += 1
        k += 1
    buf[k:hi] = a[i:mid] if i < mid else a[j:hi]
    a[lo:hi] = buf[lo:hi]
    return inv


def tie_pair_count(values: Sequence) -> int:
    """Number of unordered index pairs with equal values."""
    return sum(c * (c - 1) // 2 for c in Counter(values).values() if c > 1)


def concordant_pairs(reference: EdgeOrder, image: EdgeOrder) -> int:
    """Pair-of-pairs comparisons on which the two strict orders agree."""
    if reference.n != image.n:
        raise InvalidInputError(
            f"orders live on different point counts ({reference.n} vs {image.n})")
    m = reference.m
    seq = [0] * m
    for k in range(m):
        seq[reference.ranks[k]] = image.ranks[k]
    total = m * (m - 1) // 2
    return total - count_inversions(seq)


def order_accuracy(reference: EdgeOrder, image: EdgeOrder, tie_count: int = 0) -> Fraction:
    """Exact agreement probability between two edge orders.

    ``tie_count`` is the number of pair-of-pairs comparisons that were
    tied in the image before it was forced into a strict order.  The
    convention is that the caller broke those ties *in the reference's
    favour*, so they sit in the concordant count and are subtracted here:
    tied comparisons count as disagreements.  Pass 0 when the image is an
    honest strict order.
    """
    m = reference.m
    total = m * (m - 1) // 2
    if not 0 <= tie_count <= total:
        raise InvalidInputError(f"tie_count {tie_count} outside 0..{total}")
    return Fraction(concordant_pairs(reference, image) - tie_count, total)


def order_accuracy_against_values(reference: EdgeOrder, values: Sequence) -> Fraction:
    """Order accuracy of image distance values, tie tolerant and exact.

    ``values[k]`` is the image distance of the pair with lexicographic
    index k; any exactly comparable type works (float, int, Fraction).
    Tied values are broken in the reference's favour and the resulting
    tied comparisons charged as disagreements, so the result equals the
    brute-force count with ties-as-discordant semantics.
    """
    vals = list(values)
    if len(vals) != reference.m:
        raise InvalidInputError(
            f"expected {reference.m} image values, got {len(vals)}")
    keys = sorted(range(len(vals)), key=lambda k: (vals[k], reference.ranks[k]))
    ranks = [0] * len(vals)
    for r, k in enumerate(keys):
        ranks[k] = r
    image = EdgeOrder(n=reference.n, ranks=tuple(ranks))
    return order_accuracy(reference, image, tie_count=tie_pair_count(vals))


def order_accuracy_against_config(reference: EdgeOrder, config: PointConfig) -> Fraction:
    """Order accuracy of a configuration's induced distances, tie tolerant."""
    if config.n != reference.n:
        raise InvalidInputError(
            f"config has {config.n} points, reference expects {reference.n}")
    return order_accuracy_against_values(reference, config.pair_distances().tolist())


def kendall_tau(a: EdgeOrder, b: EdgeOrder) -> Fraction:
    """Rank correlation 2*accuracy - 1 between two strict edge orders."""
    return 2 * order_accuracy(a, b, 0) - 1


def neighbour_maps_from_order(order: EdgeOrder) -> NeighbourMaps:
    """nn and fn maps read off an edge order alone."""
    rm = order.rank_matrix()
    np.fill_diagonal(rm, np.iinfo(np.int64).max)
    nn = tuple(int(x) for x in rm.argmin(axis=1))
    np.fill_diagonal(rm, -1)
    fn = tuple(int(x) for x in rm.argmax(axis=1))
    return NeighbourMaps(nn=nn, fn=fn)


def random_edge_order(n: int, rng: np.random.Generator) -> EdgeOrder:
    """Uniformly random strict order on the pairs of n points."""
    m = pair_count(n)
    return EdgeOrder(n=n, ranks=tuple(int(r) for r in rng.permutation(m)))
