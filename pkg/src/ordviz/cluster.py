"""Cluster trees and order-faithful line representations.

A :class:`ClusterTree` is a chain of partitions from singletons to the
whole set, one merge per level.  Placing clusters side by side on the
integer line with rapidly growing gaps (:func:`cluster_embed_line`) makes
every later merge's cross distances dominate everything inside the merged
parts, so any clustering method that must join two clusters once all
their cross distances are smallest (the forced-merge property) recovers
the tree from the coordinates alone.  The construction keeps all
coordinates in {0, ..., width_bound(n)} with width_bound(n) =
floor((1+sqrt(2))^n / 4); :func:`verify_cluster_representation` replays
single- and complete-linkage clustering on the image to confirm a
representation.

:func:`line_embed_bisection` turns the same placement scheme into an
order-accuracy guarantee: it builds a balanced binary hierarchy top-down,
splitting each cluster by a greedy half/half cut that provably captures
at least half the total pair weight (weights = within-cluster distance
ranks, :func:`balanced_bisection`), then assembles coordinates bottom-up,
reflecting either part whenever the mirrored orientation agrees with more
distance comparisons.  Each step emits a :class:`BisectionCertificate`
whose two integer inequalities (cut at least half; best orientation at
least half of the cross-pair comparisons) are checked exactly.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import InvalidInputError
from .metric import MetricSpace, PointConfig, pair_count, pair_index
from .orders import (count_inversions, edge_order,
                     order_accuracy_against_values, tie_pair_count)

Cluster = tuple[int, ...]
Partition = tuple[Cluster, ...]


def _normalize_partition(clusters) -> Partition:
    return tuple(sorted((tuple(sorted(c)) for c in clusters), key=lambda c: c[0]))


@dataclass(frozen=True)
class ClusterTree:
    """Chain of partitions; level k+1 merges exactly two clusters of level k."""

    n: int
    partitions: tuple[Partition, ...]

    def __post_init__(self) -> None:
        n = self.n
        if len(self.partitions) != n:
            raise InvalidInputError(f"need {n} partition levels, got {len(self.partitions)}")
        if self.partitions[0] != tuple((i,) for i in range(n)):
            raise InvalidInputError("first level must be the discrete partition")
        if self.partitions[-1] != (tuple(range(n)),):
            raise InvalidInputError("last level must be the whole set")
        for k in range(n - 1):
            cur, nxt = set(self.partitions[k]), set(self.partitions[k + 1])
            gone, new = cur - nxt, nxt - cur
            if len(gone) != 2 or len(new) != 1:
                raise InvalidInputError(f"level {k + 1} is not a single merge")
            a, b = gone
            if tuple(sorted(a + b)) != next(iter(new)):
                raise InvalidInputError(f"level {k + 1} merge is not a union")

    def merge_steps(self) -> list[tuple[Cluster, Cluster]]:
        """Per level, the merged pair (A, B) with min A < min B."""
        out = []
        for k in range(self.n - 1):
            a, b = sorted(set(self.partitions[k]) - set(self.partitions[k + 1]),
                          key=lambda c: c[0])
            out.append((a, b))
        return out


def cluster_tree_from_merges(n: int, merges: Sequence[tuple[Cluster, Cluster]]) -> ClusterTree:
    parts = [_normalize_partition((i,) for i in range(n))]
    for a, b in merges:
        cur = [c for c in parts[-1] if c not in (tuple(sorted(a)), tuple(sorted(b)))]
        cur.append(tuple(sorted(tuple(a) + tuple(b))))
        parts.append(_normalize_partition(cur))
    return ClusterTree(n=n, partitions=tuple(parts))


def _linkage(space: MetricSpace, agg: Callable) -> ClusterTree:
    clusters: list[Cluster] = [(i,) for i in range(space.n)]
    merges = []
    while len(clusters) > 1:
        best = None
        for ai in range(len(clusters)):
            for bi in range(ai + 1, len(clusters)):
                val = agg(space.dist[np.ix_(clusters[ai], clusters[bi])])
                if best is None or val < best[0]:
                    best = (val, ai, bi)
        _, ai, bi = best
        a, b = clusters[ai], clusters[bi]
        merges.append((a, b))
        clusters = [c for k, c in enumerate(clusters) if k not in (ai, bi)]
        clusters.append(tuple(sorted(a + b)))
    return cluster_tree_from_merges(space.n, merges)


def single_linkage(space: MetricSpace) -> ClusterTree:
    """Agglomerate by minimal minimum inter-cluster distance (deterministic
    for distinct distances)."""
    return _linkage(space, np.min)


def complete_linkage(space: MetricSpace) -> ClusterTree:
    """Agglomerate by minimal maximum inter-cluster distance."""
    return _linkage(space, np.max)


def random_cluster_tree(n: int, rng: np.random.Generator) -> ClusterTree:
    """Uniformly random merge at every level."""
    clusters: list[Cluster] = [(i,) for i in range(n)]
    merges = []
    while len(clusters) > 1:
        ai, bi = sorted(rng.choice(len(clusters), size=2, replace=False).tolist())
        a, b = clusters[ai], clusters[bi]
        merges.append((a, b))
        clusters = [c for k, c in enumerate(clusters) if k not in (ai, bi)]
        clusters.append(tuple(sorted(a + b)))
    return cluster_tree_from_merges(n, merges)


def width_bound(n: int) -> int:
    """floor((1+sqrt(2))^n / 4), computed exactly.

    With S_0 = S_1 = 2 and S_k = 2 S_{k-1} + S_{k-2} (so that S_k =
    (1+sqrt(2))^k + (1-sqrt(2))^k), every S_k is 2 mod 4 and the floor is
    (S_n - 2) / 4 for n >= 1.
    """
    if n < 1:
        raise InvalidInputError("width bound needs n >= 1")
    s_prev, s = 2, 2
    for _ in range(n - 1):
        s_prev, s = s, 2 * s + s_prev
    return (s - 2) // 4


@dataclass(frozen=True)
class LineStep:
    part_a: Cluster
    part_b: Cluster
    delta: int
    width_a: int
    width_b: int
    reflected: bool


@dataclass(frozen=True)
class LineRepresentation:
    """Integer coordinates plus the merge-by-merge placement log."""

    coords: tuple[int, ...]
    steps: tuple[LineStep, ...]

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def width(self) -> int:
        return max(self.coords) - min(self.coords)

    def gaps(self) -> list[int]:
        """Image distance per lexicographic pair index (exact integers)."""
        n = self.n
        out = [0] * pair_count(n)
        for i in range(n):
            for j in range(i + 1, n):
                out[pair_index(n, i, j)] = abs(self.coords[i] - self.coords[j])
        return out


def _assemble_line(n: int, merge_steps: Sequence[tuple[Cluster, Cluster]],
                   reflect_choice=None) -> LineRepresentation:
    """Shared bottom-up placement: concatenate parts with gap delta,
    delta growing past every width so later merges dominate earlier ones.
    ``reflect_choice(step_index, a, b, widths, delta, f)`` may mirror the
    parts before concatenation; None keeps everything as built.
    """
    f = [0] * n
    w: dict[Cluster, int] = {(i,): 0 for i in range(n)}
    delta = 1
    steps = []
    for idx, (a, b) in enumerate(merge_steps):
        wa, wb = w[a], w[b]
        reflected = False
        if reflect_choice is not None:
            reflected = reflect_choice(idx, a, b, wa, wb, delta, f)
            if reflected:
                for x in a:
                    f[x] = wa - f[x]
                for y in b:
                    f[y] = wb - f[y]
        for y in b:
            f[y] += delta + wa
        merged = tuple(sorted(a + b))
        w[merged] = delta + wa + wb
        steps.append(LineStep(part_a=a, part_b=b, delta=delta,
                              width_a=wa, width_b=wb, reflected=reflected))
        delta = w[merged] + 1
    return LineRepresentation(coords=tuple(f), steps=tuple(steps))


def cluster_embed_line(tree: ClusterTree) -> LineRepresentation:
    """Integer-line placement from which forced-merge clusterers recover
    the tree; all coordinates lie in {0, ..., width_bound(n)}."""
    return _assemble_line(tree.n, tree.merge_steps())


def _induced_distance(coords: Union[LineRepresentation, PointConfig]):
    if isinstance(coords, LineRepresentation):
        c = coords.coords
        return len(c), (lambda x, y: abs(c[x] - c[y]))
    if isinstance(coords, PointConfig):
        d = coords.distance_matrix()
        return coords.n, (lambda x, y: d[x, y])
    raise InvalidInputError(f"cannot verify against {type(coords).__name__}")


def verify_cluster_representation(tree: ClusterTree,
                                  coords: Union[LineRepresentation, PointConfig]) -> bool:
    """Do forced-merge clusterers recover the tree from the image alone?

    Replays single linkage and complete linkage on the induced distances.
    At each level the tree's merge must be the strictly best pair; on a
    tie the merge is accepted only when it is forced (all distances inside
    the union smaller than every other inter-cluster distance), which
    every admissible method must follow.
    """
    n, dist = _induced_distance(coords)
    if n != tree.n:
        raise InvalidInputError(f"coords for {n} points, tree on {tree.n}")

    def cross(a: Cluster, b: Cluster):
        return [dist(x, y) for x in a for y in b]

    for agg in (min, max):
        clusters: list[Cluster] = [(i,) for i in range(n)]
        for a, b in tree.merge_steps():
            vals = {}
            for ai in range(len(clusters)):
                for bi in range(ai + 1, len(clusters)):
                    vals[(clusters[ai], clusters[bi])] = agg(cross(clusters[ai], clusters[bi]))
            key = (a, b) if (a, b) in vals else (b, a)
            if key not in vals:
                return False
            best = min(vals.values())
            if vals[key] != best:
                return False
            if sum(1 for v in vals.values() if v == best) > 1:
                # tie: only a forced merge is method-independent
                union = tuple(sorted(a + b))
                inside = max(dist(x, y) for x in union for y in union if x < y)
                outside = min(min(cross(p, q)) for p, q in vals if (p, q) != key)
                if not inside < outside:
                    return False
            clusters = [c for c in clusters if c not in (a, b)]
            clusters.append(tuple(sorted(a + b)))
    return True


# -- balanced bisection with certificates ------------------------------------


@dataclass(frozen=True)
class BisectionCertificate:
    """Auditable record of one split (and, once placed, its orientation).

    ``gamma`` counts pairs of cross-pairs whose image-gap comparison does
    not reverse the distance comparison in the kept orientation;
    ``gamma_reflected`` the same for the mirrored orientation; exact gap
    ties are counted in both, so gamma + gamma_reflected = C(q, 2) +
    gap_ties with q = |A|·|B|, and the best orientation always reaches
    half of C(q, 2).
    """

    members: tuple[int, ...]
    part_a: tuple[int, ...]
    part_b: tuple[int, ...]
    cut_weight: int
    total_weight: int
    gamma: Optional[int] = None
    gamma_reflected: Optional[int] = None
    gap_ties: Optional[int] = None
    reflected: Optional[bool] = None

    def cut_ok(self) -> bool:
        return 2 * self.cut_weight >= self.total_weight

    def orientation_bound(self) -> int:
        q = len(self.part_a) * len(self.part_b)
        return q * (q - 1) // 4

    def orientation_ok(self) -> bool:
        if self.gamma is None:
            return True
        return max(self.gamma, self.gamma_reflected) >= self.orientation_bound()


def balanced_bisection(members: Sequence[int], weight: Callable[[int, int], int],
                       seed: int = 0) -> BisectionCertificate:
    """Split members into equal halves cutting at least half the weight.

    Members are shuffled and consumed two at a time; each pair contributes
    its mutual weight to the cut outright and is oriented to cut more
    weight against everything already placed, which keeps the running cut
    at or above the running half-total.  An equal-swap local search then
    improves the cut further.  Odd member counts are allowed (sizes differ
    by one) but carry no half-total guarantee.
    """
    members = list(members)
    m = len(members)
    if m < 2:
        raise InvalidInputError("bisection needs at least two members")
    w = np.zeros((m, m), dtype=np.int64)
    for i in range(m):
        for j in range(i + 1, m):
            w[i, j] = w[j, i] = weight(members[i], members[j])

    rng = np.random.default_rng(seed)
    order = rng.permutation(m)
    ia: list[int] = []
    ib: list[int] = []
    for k in range(0, m - 1, 2):
        u, v = int(order[k]), int(order[k + 1])
        keep = w[u, ib].sum() + w[v, ia].sum()
        swap = w[v, ib].sum() + w[u, ia].sum()
        if swap > keep:
            u, v = v, u
        ia.append(u)
        ib.append(v)
    if m % 2:
        ib.append(int(order[-1]))

    # equal-swap local search; swapping a in A with b in B changes the cut
    # by (sumA - sumB)[a] + (sumB - sumA)[b] + 2 w[a,b]
    while True:
        sum_a = w[:, ia].sum(axis=1)
        sum_b = w[:, ib].sum(axis=1)
        da = (sum_a - sum_b)[ia]
        db = (sum_b - sum_a)[ib]
        gains = da[:, None] + db[None, :] + 2 * w[np.ix_(ia, ib)]
        i, j = np.unravel_index(int(gains.argmax()), gains.shape)
        if gains[i, j] <= 0:
            break
        ia[i], ib[j] = ib[j], ia[i]

    cut = int(w[np.ix_(ia, ib)].sum())
    return BisectionCertificate(members=tuple(sorted(members)),
                                part_a=tuple(sorted(members[k] for k in ia)),
                                part_b=tuple(sorted(members[k] for k in ib)),
                                cut_weight=cut,
                                total_weight=int(w.sum()) // 2)


# -- accuracy-guaranteed line embedding --------------------------------------


@dataclass(frozen=True)
class LineEmbedResult:
    representation: LineRepresentation
    certificates: tuple[BisectionCertificate, ...]
    tree: ClusterTree
    accuracy: Fraction
    guaranteed: bool


def _rank_weights(space: MetricSpace, members: Sequence[int]) -> Callable[[int, int], int]:
    """weight(x, y) = number of strictly smaller member pairs."""
    pairs = [(x, y) for k, x in enumerate(members) for y in members[k + 1:]]
    vals = sorted(space.d(x, y) for x, y in pairs)
    table = {}
    for x, y in pairs:
        table[(x, y)] = table[(y, x)] = bisect_left(vals, space.d(x, y))
    return lambda x, y: table[(x, y)]


def line_embed_bisection(space: MetricSpace, seed: int = 0,
                         require_guarantee: bool = False) -> LineEmbedResult:
    """Line coordinates with certified per-step order agreement.

    Top-down, the point set is halved again and again — always splitting
    a largest cluster (ties to the lowest minimum element) with
    :func:`balanced_bisection` under within-cluster rank weights.
    Bottom-up, parts are concatenated as in :func:`cluster_embed_line`,
    each step keeping or mirroring the parts according to which
    orientation agrees with more cross-pair distance comparisons; the
    separation of scales makes every cross-pair image gap at a step
    dominate all earlier gaps.  For n a power of two each certificate's
    two inequalities are guaranteed; other sizes run best-effort.
    """
    n = space.n
    power_of_two = n >= 2 and (n & (n - 1)) == 0
    if require_guarantee and not power_of_two:
        raise InvalidInputError(f"n={n} is not a power of two")

    clusters: list[Cluster] = [tuple(range(n))]
    splits: list[BisectionCertificate] = []
    split_idx = 0
    while True:
        big = max(clusters, key=lambda c: (len(c), -c[0]))
        if len(big) < 2:
            break
        cert = balanced_bisection(big, _rank_weights(space, big),
                                  seed=seed * 1_000_003 + split_idx)
        split_idx += 1
        splits.append(cert)
        clusters.remove(big)
        clusters.extend([cert.part_a, cert.part_b])

    merges = [(min((c.part_a, c.part_b)), max((c.part_a, c.part_b)))
              for c in reversed(splits)]
    tree = cluster_tree_from_merges(n, merges)
    by_union = {tuple(sorted(c.part_a + c.part_b)): k for k, c in enumerate(splits)}
    final = list(splits)

    def reflect_choice(idx, a, b, wa, wb, delta, f):
        cross = [(x, y) for x in a for y in b]
        cross.sort(key=lambda p: space.d(*p))
        gaps = [f[y] + delta + wa - f[x] for x, y in cross]
        c_total = len(gaps) * (len(gaps) - 1) // 2
        inv = count_inversions(gaps)
        ties = tie_pair_count(gaps)
        gamma, gamma_ref = c_total - inv, inv + ties
        k = by_union[tuple(sorted(a + b))]
        final[k] = replace(final[k], gamma=gamma, gamma_reflected=gamma_ref,
                           gap_ties=ties, reflected=gamma_ref > gamma)
        return gamma_ref > gamma

    rep = _assemble_line(n, merges, reflect_choice)
    order = edge_order(space)
    acc = order_accuracy_against_values(order, rep.gaps())
    return LineEmbedResult(representation=rep, certificates=tuple(final),
                           tree=tree, accuracy=acc, guaranteed=power_of_two)
