"""Random sampling experiments and the confidence bound for their rates.

Coverage runs sample point configurations, record which distance orders
they realize, and report what share of *all* orders on the pair set is
covered at a given representation strength.  For the full-order kind
that share is simply the count of distinct sampled orders; for weaker
kinds an order counts as covered when its induced structure (nearest
map, extremal maps, ...) matches a sampled one, and the share is
computed exactly from a census over every one of the C(n,2)! orders.
Only n in {4, 5} is supported: 10! = 3 628 800 orders is the largest
space where exact bookkeeping stays desk-sized.

Rates estimated this way come with a one-sided lower confidence bound
(normal approximation to the binomial):

    (s + c^2/2 - c * sqrt(s - s^2/N + c^2/4)) / (N + c^2)

with c the standard-normal quantile of the confidence level.  The
formula is evaluated with the success count as given; callers that want
the half-integer continuity correction pass s + 1/2 themselves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import chain, permutations
from typing import Iterator

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import ConstructionError, InvalidInputError
from .metric import MetricTag, PointConfig, all_pairs, pair_count
from .orders import EdgeOrder, edge_order
from .represent import RepresentationKind

_MAX_RESAMPLES = 100

_COVERAGE_SIZES = (4, 5)

_METRIC_ALIASES: dict[str, MetricTag] = {
    "l2": "l2", "euclidean": "l2",
    "l1": "l1", "manhattan": "l1",
}


# ---------------------------------------------------------------------------
# sampling domains


@dataclass(frozen=True)
class SampleDomain:
    """The unit hypercube [0, 1]^dim points are drawn from uniformly."""

    dim: int

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InvalidInputError(f"domain dimension must be >= 1, got {self.dim}")


UnitSquare = SampleDomain(dim=2)


def unit_cube(dim: int) -> SampleDomain:
    """The unit cube in ``dim`` dimensions (``unit_cube(2) == UnitSquare``)."""
    return SampleDomain(dim=dim)


def sample_config(n: int, domain: SampleDomain = UnitSquare, seed: int = 0,
                  metric: str = "l2") -> PointConfig:
    """n i.i.d. uniform points from ``domain``, with all distances distinct.

    Deterministic per seed.  A draw with tied induced distances is thrown
    away and redrawn from the same stream (the tie has probability zero;
    the retry guards against float coincidences), so the budget running
    out signals genuinely broken input rather than bad luck.
    """
    if n < 2:
        raise InvalidInputError(f"need at least 2 points, got n={n}")
    tag = _metric_tag(metric)
    rng = np.random.default_rng(seed)
    return _draw_untied(n, domain, tag, rng)


def _metric_tag(metric: str) -> MetricTag:
    try:
        return _METRIC_ALIASES[metric.lower()]
    except (KeyError, AttributeError):
        raise InvalidInputError(
            f"unknown metric {metric!r}; use 'euclidean'/'l2' or 'manhattan'/'l1'"
        ) from None


def _draw_untied(n: int, domain: SampleDomain, tag: MetricTag,
                 rng: np.random.Generator) -> PointConfig:
    for _ in range(_MAX_RESAMPLES):
        cfg = PointConfig(coords=rng.random((n, domain.dim)), metric=tag)
        vals = cfg.pair_distances()
        if np.unique(vals).size == vals.size:
            return cfg
    raise ConstructionError(
        f"{_MAX_RESAMPLES} consecutive draws of {n} points in "
        f"[0,1]^{domain.dim} had tied distances; check the inputs")


# ---------------------------------------------------------------------------
# ranking orders


def order_rank(order: EdgeOrder) -> int:
    """Lexicographic rank of ``order.ranks`` among all C(n,2)! permutations."""
    seq = order.ranks
    m = len(seq)
    rank = 0
    for i in range(m):
        rank = rank * (m - i) + sum(seq[j] < seq[i] for j in range(i + 1, m))
    return rank


def order_from_rank(n: int, rank: int) -> EdgeOrder:
    """Inverse of :func:`order_rank` for the given point count."""
    m = pair_count(n)
    fact = math.factorial(m)
    if not 0 <= rank < fact:
        raise InvalidInputError(f"rank {rank} outside [0, {m}!)")
    avail = list(range(m))
    ranks = []
    for i in range(m, 0, -1):
        fact //= i
        digit, rank = divmod(rank, fact)
        ranks.append(avail.pop(digit))
    return EdgeOrder(n=n, ranks=tuple(ranks))


# ---------------------------------------------------------------------------
# the store of realized orders


@dataclass
class CoverageStore:
    """Bitset over the C(n,2)! order ranks realized so far (n in {4, 5})."""

    n: int
    bits: np.ndarray

    @classmethod
    def empty(cls, n: int) -> "CoverageStore":
        if n not in _COVERAGE_SIZES:
            raise InvalidInputError(
                f"exact coverage bookkeeping supports n in {_COVERAGE_SIZES}, got {n}")
        fact = math.factorial(pair_count(n))
        return cls(n=n, bits=np.zeros(fact // 8, dtype=np.uint8))

    def add(self, rank: int) -> bool:
        """Record one order rank; True iff it was new."""
        byte, mask = rank >> 3, 1 << (rank & 7)
        seen = bool(self.bits[byte] & mask)
        self.bits[byte] |= mask
        return not seen

    @property
    def count(self) -> int:
        return int(np.bitwise_count(self.bits).sum())

    def ranks(self) -> np.ndarray:
        """Sorted array of all recorded ranks."""
        return np.flatnonzero(np.unpackbits(self.bits, bitorder="little"))

    def __contains__(self, rank: int) -> bool:
        return bool(self.bits[rank >> 3] & (1 << (rank & 7)))

    def merge(self, other: "CoverageStore") -> None:
        """Union in another store's orders (order-independent)."""
        if other.n != self.n:
            raise InvalidInputError(f"cannot merge stores for n={self.n} and n={other.n}")
        np.bitwise_or(self.bits, other.bits, out=self.bits)


# ---------------------------------------------------------------------------
# exact census of structures over all orders


@lru_cache(maxsize=None)
def _all_order_rows(n: int) -> np.ndarray:
    """(C(n,2)!, C(n,2)) int8 array of every ranks tuple, in rank order."""
    m = pair_count(n)
    fact = math.factorial(m)
    flat = np.fromiter(chain.from_iterable(permutations(range(m))),
                       dtype=np.int8, count=fact * m)
    rows = flat.reshape(fact, m)
    rows.flags.writeable = False
    return rows


def _vertex_columns(n: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Per vertex: the pair indices containing it, and the partner at each."""
    cols = [[] for _ in range(n)]
    partners = [[] for _ in range(n)]
    for k, (i, j) in enumerate(all_pairs(n)):
        cols[i].append(k)
        partners[i].append(j)
        cols[j].append(k)
        partners[j].append(i)
    return ([np.asarray(c) for c in cols], [np.asarray(p) for p in partners])


def structure_codes(rows: np.ndarray, n: int, kind: RepresentationKind) -> np.ndarray:
    """One integer per ranks-row identifying its induced ``kind`` structure.

    Two orders get equal codes exactly when their structures of the given
    strength coincide.  The same function serves the full census and the
    sampled orders, so the two sides cannot disagree on the encoding.
    """
    if kind is RepresentationKind.ORDER:
        raise InvalidInputError("full orders are deduplicated by rank, not coded")
    cols, partners = _vertex_columns(n)
    big = np.int64(1 << 30)
    codes = np.zeros(len(rows), dtype=np.int64)
    base = np.int64((n - 1) ** (n - 1)) if kind is RepresentationKind.LOCAL_ORDER \
        else np.int64(n * n)
    for v in range(n):
        sub = rows[:, cols[v]].astype(np.int64)
        if kind is RepresentationKind.LOCAL_ORDER:
            pattern = np.argsort(sub, axis=1)
            feat = np.zeros(len(rows), dtype=np.int64)
            for j in range(n - 1):
                feat = feat * (n - 1) + pattern[:, j]
        elif kind is RepresentationKind.NEAREST:
            feat = partners[v][sub.argmin(axis=1)]
        elif kind is RepresentationKind.FARTHEST:
            feat = partners[v][sub.argmax(axis=1)]
        elif kind is RepresentationKind.EXTREMAL_NEIGHBOURS:
            feat = partners[v][sub.argmin(axis=1)] * n + partners[v][sub.argmax(axis=1)]
        else:
            a1 = sub.argmin(axis=1)
            masked = sub.copy()
            np.put_along_axis(masked, a1[:, None], big, axis=1)
            first = partners[v][a1]
            second = partners[v][masked.argmin(axis=1)]
            if kind is RepresentationKind.TWO_NEAREST_SET:
                lo = np.minimum(first, second)
                hi = np.maximum(first, second)
                feat = lo * n + hi
            elif kind is RepresentationKind.FIRST_AND_SECOND_NEAREST:
                feat = first * n + second
            else:
                raise InvalidInputError(f"unknown representation kind {kind!r}")
        codes = codes * base + feat
    return codes


@lru_cache(maxsize=None)
def _structure_census(n: int, kind: RepresentationKind) -> tuple[np.ndarray, np.ndarray]:
    """(sorted distinct codes, order count per code) over all C(n,2)! orders."""
    rows = _all_order_rows(n)
    chunk = 250_000
    codes = np.empty(len(rows), dtype=np.int64)
    for lo in range(0, len(rows), chunk):
        codes[lo:lo + chunk] = structure_codes(rows[lo:lo + chunk], n, kind)
    uniq, counts = np.unique(codes, return_counts=True)
    uniq.flags.writeable = False
    counts.flags.writeable = False
    return uniq, counts


# ---------------------------------------------------------------------------
# the experiment


@dataclass(frozen=True)
class CoverageResult:
    """What a sampling run realized, and how much of order space it covers."""

    n: int
    metric: MetricTag
    kind: RepresentationKind
    trials: int
    distinct_orders_found: int
    orders_covered: int
    fraction_of_factorial: Fraction
    store: CoverageStore

    def realized_orders(self) -> Iterator[EdgeOrder]:
        """The distinct sampled orders, in rank order."""
        for rank in self.store.ranks():
            yield order_from_rank(self.n, int(rank))


def coverage_experiment(n: int, metric: str, kind: RepresentationKind,
                        trials: int, seed: int = 0) -> CoverageResult:
    """Sample ``trials`` configurations and measure order-space coverage.

    Each trial draws points uniformly from the unit square, reads off the
    induced distance order under the chosen metric, and records its rank.
    Trials use seeds derived per index, so a longer run extends a shorter
    one sample for sample (coverage is nondecreasing in ``trials``), and
    stores from split runs can be merged.
    """
    if trials < 1:
        raise InvalidInputError(f"need at least one trial, got {trials}")
    tag = _metric_tag(metric)
    store = CoverageStore.empty(n)
    for t in range(trials):
        rng = np.random.default_rng((seed, t))
        cfg = _draw_untied(n, UnitSquare, tag, rng)
        store.add(order_rank(edge_order(cfg)))
    return _coverage_of(store, tag, kind, trials)


def _coverage_of(store: CoverageStore, tag: MetricTag, kind: RepresentationKind,
                 trials: int) -> CoverageResult:
    n = store.n
    fact = math.factorial(pair_count(n))
    if kind is RepresentationKind.ORDER:
        covered = store.count
    else:
        realized = store.ranks()
        rows = np.array([order_from_rank(n, int(r)).ranks for r in realized],
                        dtype=np.int8)
        seen = np.unique(structure_codes(rows, n, kind))
        uniq, counts = _structure_census(n, kind)
        covered = int(counts[np.searchsorted(uniq, seen)].sum())
    return CoverageResult(
        n=n, metric=tag, kind=kind, trials=trials,
        distinct_orders_found=store.count, orders_covered=covered,
        fraction_of_factorial=Fraction(covered, fact), store=store)


# ---------------------------------------------------------------------------
# confidence bound


def normal_quantile(beta: float) -> float:
    """Inverse standard-normal CDF."""
    if not 0.0 < beta < 1.0:
        raise InvalidInputError(f"quantile level must be in (0, 1), got {beta}")
    return float(ndtri(beta))


def normal_cdf(x: float) -> float:
    """Standard-normal CDF (the inverse of :func:`normal_quantile`)."""
    return float(ndtr(x))


@dataclass(frozen=True)
class ConfidenceQuery:
    """s successes out of N trials, to be bounded at confidence ``beta``."""

    s: float
    N: int
    beta: float

    def __post_init__(self) -> None:
        if self.N < 1:
            raise InvalidInputError(f"sample size must be >= 1, got {self.N}")
        if not 0.0 <= self.s <= self.N:
            raise InvalidInputError(f"successes must lie in [0, {self.N}], got {self.s}")
        if not 0.5 < self.beta < 1.0:
            raise InvalidInputError(
                f"confidence level must be in (0.5, 1), got {self.beta}")

    @property
    def c(self) -> float:
        return normal_quantile(self.beta)


def confidence_lower_bound(query: ConfidenceQuery) -> float:
    """One-sided lower confidence bound on the success probability.

    Normal approximation:
    (s + c^2/2 - c*sqrt(s - s^2/N + c^2/4)) / (N + c^2).  The success
    count is used as passed in; apply any continuity correction before
    building the query.
    """
    s, N, c = float(query.s), float(query.N), query.c
    root = math.sqrt(s - s * s / N + c * c / 4.0)
    return (s + c * c / 2.0 - c * root) / (N + c * c)


__all__ = [
    "SampleDomain", "UnitSquare", "unit_cube", "sample_config",
    "order_rank", "order_from_rank", "CoverageStore",
    "structure_codes", "CoverageResult", "coverage_experiment",
    "normal_quantile", "normal_cdf", "ConfidenceQuery", "confidence_lower_bound",
]
