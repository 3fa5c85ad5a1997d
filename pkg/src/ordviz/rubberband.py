"""Iterative force layout that repairs a drawing's distance order.

One *epoch* scans every ordered comparison between two point pairs
({x,y} closer than {z,w} in the target order).  Whenever the drawing
disagrees - the image of {x,y} is at least as long as the image of
{z,w} - the four endpoints move like rubber bands: x and y walk toward
each other and z and w walk apart, each by ``fraction/2`` of the current
pair length, so each violated pair length changes by exactly
``fraction``.  Updates are applied immediately, so later comparisons in
the same scan see the moved points; the scan order is reshuffled every
epoch (deterministically from the seed).

Success means the drawing's order accuracy against the target is exactly
1; runs stop early after ``stall_epochs`` epochs without improvement.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Optional

import numpy as np

from .errors import InvalidInputError
from .metric import MetricSpace, PointConfig, pair_count
from .orders import EdgeOrder, order_accuracy_against_config

try:  # pragma: no cover - exercised implicitly
    from numba import njit as _njit
except ImportError:  # pragma: no cover
    _njit = None

_COINCIDENT = 1e-12
_JITTER_SCALE = 1e-6
_JITTER_POOL = 64


@dataclass(frozen=True)
class RubberBandParams:
    fraction: float = 0.05
    max_epochs: int = 400
    stall_epochs: int = 50
    scan: Literal["shuffled", "lexicographic"] = "shuffled"

    def __post_init__(self) -> None:
        if not 0.0 < self.fraction < 1.0:
            raise InvalidInputError("fraction must lie strictly between 0 and 1")
        if self.max_epochs < 0 or self.stall_epochs < 1:
            raise InvalidInputError("need max_epochs >= 0 and stall_epochs >= 1")


@dataclass(frozen=True)
class OptimizeResult:
    config: PointConfig
    accuracy: Fraction
    accuracy_trace: tuple[Fraction, ...]
    epochs_used: int
    success: bool
    stalled: bool
    seed: Optional[int] = None


def _comparison_table(target: EdgeOrder) -> np.ndarray:
    """All C(M,2) comparisons as rows (x, y, z, w), {x,y} closer in target."""
    by_rank = target.pairs_by_rank()
    m = len(by_rank)
    rows = np.empty((m * (m - 1) // 2, 4), dtype=np.int64)
    t = 0
    for p in range(m):
        x, y = by_rank[p]
        for q in range(p + 1, m):
            z, w = by_rank[q]
            rows[t, 0] = x
            rows[t, 1] = y
            rows[t, 2] = z
            rows[t, 3] = w
            t += 1
    return rows


def _epoch_scan(coords, comps, visit, fraction, jitter_pool):
    moved = 0
    dim = coords.shape[1]
    for t in range(visit.shape[0]):
        c = visit[t]
        x = comps[c, 0]
        y = comps[c, 1]
        z = comps[c, 2]
        w = comps[c, 3]
        dxy = 0.0
        for k in range(dim):
            diff = coords[y, k] - coords[x, k]
            dxy += diff * diff
        dxy = np.sqrt(dxy)
        dzw = 0.0
        for k in range(dim):
            diff = coords[w, k] - coords[z, k]
            dzw += diff * diff
        dzw = np.sqrt(dzw)
        if dxy < dzw:
            continue
        moved += 1
        half = 0.5 * fraction
        for k in range(dim):
            step = half * (coords[y, k] - coords[x, k])
            coords[x, k] += step
            coords[y, k] -= step
        if dzw < _COINCIDENT:
            j = c % jitter_pool.shape[0]
            for k in range(dim):
                coords[w, k] += jitter_pool[j, k] * _JITTER_SCALE
        for k in range(dim):
            step = half * (coords[w, k] - coords[z, k])
            coords[z, k] -= step
            coords[w, k] += step
    return moved


if _njit is not None:  # pragma: no branch
    _epoch_scan = _njit(cache=True)(_epoch_scan)


def rubber_band_epoch(target: EdgeOrder, config: PointConfig,
                      params: RubberBandParams,
                      rng: np.random.Generator) -> PointConfig:
    """One full scan over all pair-of-pairs comparisons; returns the moved config."""
    if config.metric != "l2":
        raise InvalidInputError("rubber-band moves are defined for the Euclidean metric")
    if config.n != target.n:
        raise InvalidInputError(f"config has {config.n} points, target expects {target.n}")
    comps = _comparison_table(target)
    coords = config.coords.copy()
    if params.scan == "shuffled":
        visit = rng.permutation(comps.shape[0])
    else:
        visit = np.arange(comps.shape[0])
    jitter = rng.standard_normal((_JITTER_POOL, config.m))
    jitter /= np.linalg.norm(jitter, axis=1, keepdims=True)
    _epoch_scan(coords, comps, visit.astype(np.int64), params.fraction, jitter)
    return PointConfig(coords=coords, metric="l2")


def optimize(target: EdgeOrder,
             params: RubberBandParams = RubberBandParams(),
             initial: PointConfig | Literal["random"] = "random",
             seed: int = 0,
             dim: int = 2) -> OptimizeResult:
    """Run epochs until the target order is realised, stalled, or out of budget.

    With ``initial="random"`` the start is drawn uniformly from the unit
    cube; a warm-start config must be Euclidean.  The accuracy trace
    includes the initial accuracy, so a warm start already realising the
    target succeeds with 0 epochs used.  Fully deterministic per seed.
    """
    rng = np.random.default_rng(seed)
    if initial == "random":
        coords = rng.random((target.n, dim))
        config = PointConfig(coords=coords, metric="l2")
    else:
        config = initial
        if config.metric != "l2":
            raise InvalidInputError("warm starts must be Euclidean")
        if config.n != target.n:
            raise InvalidInputError(
                f"warm start has {config.n} points, target expects {target.n}")
    comps = _comparison_table(target)

    acc = order_accuracy_against_config(target, config)
    trace = [acc]
    best = acc
    stall = 0
    stalled = False
    epochs_used = 0
    coords = config.coords.copy()
    for epoch in range(1, params.max_epochs + 1):
        if acc == 1:
            break
        if params.scan == "shuffled":
            visit = rng.permutation(comps.shape[0])
        else:
            visit = np.arange(comps.shape[0])
        jitter = rng.standard_normal((_JITTER_POOL, coords.shape[1]))
        jitter /= np.linalg.norm(jitter, axis=1, keepdims=True)
        _epoch_scan(coords, comps, visit.astype(np.int64), params.fraction, jitter)
        config = PointConfig(coords=coords.copy(), metric="l2")
        acc = order_accuracy_against_config(target, config)
        trace.append(acc)
        epochs_used = epoch
        if acc > best:
            best = acc
            stall = 0
        else:
            stall += 1
            if stall >= params.stall_epochs:
                stalled = True
                break
    return OptimizeResult(config=config, accuracy=acc,
                          accuracy_trace=tuple(trace), epochs_used=epochs_used,
                          success=(acc == 1), stalled=stalled, seed=seed)


def optimize_restarts(target: EdgeOrder,
                      params: RubberBandParams = RubberBandParams(),
                      restarts: int = 3,
                      seed: int = 0,
                      dim: int = 2) -> OptimizeResult:
    """Independent restarts with derived seeds; returns the first success
    or the best-accuracy attempt."""
    if restarts < 1:
        raise InvalidInputError("need at least one restart")
    best: Optional[OptimizeResult] = None
    for r in range(restarts):
        res = optimize(target, params=params, initial="random",
                       seed=seed + 1_000_003 * r, dim=dim)
        if best is None or res.accuracy > best.accuracy:
            best = res
        if res.success:
            return res
    assert best is not None
    return best


def stretch_spread(space: MetricSpace, config: PointConfig) -> float:
    """Relative spread (max - min) / min of the per-pair quotients
    original distance / image distance.  Small spread means the drawing is
    close to a uniform rescaling of the original data."""
    if config.n != space.n:
        raise InvalidInputError(f"config has {config.n} points, space has {space.n}")
    image = config.pair_distances()
    if np.any(image <= 0):
        raise InvalidInputError("stretch spread undefined with coincident image points")
    q = space.pair_distances() / image
    return float((q.max() - q.min()) / q.min())
