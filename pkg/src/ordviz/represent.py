"""What it means for a drawing to represent a metric space.

A configuration ``f`` represents a space at one of several strengths,
from the full distance order down to per-point neighbour data:

* ``ORDER`` - the complete order of all C(n,2) distances is preserved.
* ``LOCAL_ORDER`` - comparisons between pairs sharing a point are preserved
  (equivalently: each point ranks the others identically in both).
* ``EXTREMAL_NEIGHBOURS`` - nearest and farthest point maps both commute
  with ``f``.
* ``NEAREST`` / ``FARTHEST`` - just one of the two maps commutes.
* ``TWO_NEAREST_SET`` - each point's *set* of two closest others is kept.
* ``FIRST_AND_SECOND_NEAREST`` - the two closest others are kept in order.

The strengths are monotone: ORDER implies LOCAL_ORDER, which implies
FIRST_AND_SECOND_NEAREST and EXTREMAL_NEIGHBOURS, and so on down.
Checks use strict inequalities, so a tie in the image can never be
counted as preserving anything.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import DegenerateConfigError, InvalidInputError, TiedDistancesError
from .metric import MetricSpace, PointConfig
from .orders import edge_order


class RepresentationKind(enum.Enum):
    ORDER = "order"
    LOCAL_ORDER = "local-order"
    EXTREMAL_NEIGHBOURS = "extremal-neighbours"
    NEAREST = "nearest"
    FARTHEST = "farthest"
    TWO_NEAREST_SET = "two-nearest-set"
    FIRST_AND_SECOND_NEAREST = "first-and-second-nearest"


def _strict_sort_by(space_row: np.ndarray, x: int, n: int) -> list[int]:
    others = [y for y in range(n) if y != x]
    return sorted(others, key=lambda y: space_row[y])


def check_representation(space: MetricSpace, config: PointConfig,
                         kind: RepresentationKind) -> bool:
    """True iff ``config`` represents ``space`` at strength ``kind``.

    Raises on size mismatch, and on image ties where the kind requires a
    strict image order (ORDER and LOCAL_ORDER).
    """
    if config.n != space.n:
        raise InvalidInputError(f"config has {config.n} points, space has {space.n}")
    n = space.n
    if n < 3 and kind in (RepresentationKind.TWO_NEAREST_SET,
                          RepresentationKind.FIRST_AND_SECOND_NEAREST):
        raise InvalidInputError(f"{kind.value} needs at least 3 points")

    e = config.distance_matrix()
    d = space.dist

    if kind is RepresentationKind.ORDER:
        try:
            image = edge_order(config)
        except TiedDistancesError as exc:
            raise DegenerateConfigError(
                "image distances are tied; the full order is undefined") from exc
        return image == edge_order(space)

    if kind is RepresentationKind.LOCAL_ORDER:
        for x in range(n):
            vals = [e[x, y] for y in range(n) if y != x]
            if len(set(vals)) != len(vals):
                raise DegenerateConfigError(
                    f"image distances from point {x} are tied; local order undefined")
            if _strict_sort_by(d[x], x, n) != _strict_sort_by(e[x], x, n):
                return False
        return True

    def nearest_ok(x: int) -> bool:
        y = min((z for z in range(n) if z != x), key=lambda z: d[x, z])
        return all(e[x, y] < e[x, z] for z in range(n) if z not in (x, y))

    def farthest_ok(x: int) -> bool:
        y = max((z for z in range(n) if z != x), key=lambda z: d[x, z])
        return all(e[x, y] > e[x, z] for z in range(n) if z not in (x, y))

    if kind is RepresentationKind.NEAREST:
        return all(nearest_ok(x) for x in range(n))
    if kind is RepresentationKind.FARTHEST:
        return all(farthest_ok(x) for x in range(n))
    if kind is RepresentationKind.EXTREMAL_NEIGHBOURS:
        return all(nearest_ok(x) and farthest_ok(x) for x in range(n))

    if kind is RepresentationKind.TWO_NEAREST_SET:
        for x in range(n):
            a, b = _strict_sort_by(d[x], x, n)[:2]
            far = max(e[x, a], e[x, b])
            if not all(far < e[x, z] for z in range(n) if z not in (x, a, b)):
                return False
        return True

    if kind is RepresentationKind.FIRST_AND_SECOND_NEAREST:
        for x in range(n):
            a, b = _strict_sort_by(d[x], x, n)[:2]
            if not e[x, a] < e[x, b]:
                return False
            if not all(e[x, b] < e[x, z] for z in range(n) if z not in (x, a, b)):
                return False
        return True

    raise InvalidInputError(f"unknown representation kind {kind!r}")


__all__ = ["RepresentationKind", "check_representation"]
