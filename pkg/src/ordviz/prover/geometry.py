"""Index tables for angle reasoning about n labeled plane points.

Everything the inference engine touches is pre-enumerated here as flat
integer arrays so the hot loops never build objects:

* angles ``(apex; {x, y})`` - one interval per unordered arm pair;
* "between" facts ``(apex; outer, mid, outer)`` - seen from the apex,
  the ray to ``mid`` lies inside the sector spanned by the rays to the
  two outer points (equivalently the whole angle is the sum of the two
  parts);
* "in hull" facts ``(z; {p, q, r})`` - z lies strictly inside the
  triangle pqr.

Side-length comparisons feed the engine as a boolean ``less`` matrix
over pair indices; it is either the full strict order or the partial
order generated by each point's nearest/farthest neighbour and closed
under transitivity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from ..errors import InvalidInputError
from ..metric import all_pairs, pair_count, pair_index
from ..orders import EdgeOrder, neighbour_maps_from_order


@dataclass(frozen=True)
class AngleTables:
    """Static enumeration of angles, facts and rule instances for one n."""

    n: int
    # entity counts
    num_angles: int
    num_between: int
    num_hull: int
    # entity -> points
    angle_points: np.ndarray = field(repr=False)    # (A, 3): apex, lo arm, hi arm
    between_points: np.ndarray = field(repr=False)  # (B, 4): apex, mid, lo outer, hi outer
    hull_points: np.ndarray = field(repr=False)     # (H, 4): z, p, q, r sorted
    # rule instance tables (documented in build_tables)
    tripod: np.ndarray = field(repr=False)
    triangles: np.ndarray = field(repr=False)
    hull_alts: np.ndarray = field(repr=False)
    between_sum: np.ndarray = field(repr=False)
    quad_single: np.ndarray = field(repr=False)
    quad_cross: np.ndarray = field(repr=False)
    quad_contain: np.ndarray = field(repr=False)

    def angle_index(self, apex: int, x: int, y: int) -> int:
        if x > y:
            x, y = y, x
        if apex == x or apex == y or x == y:
            raise InvalidInputError(f"angle needs 3 distinct points, got {apex},{x},{y}")
        u = x - (x > apex)
        v = y - (y > apex)
        return apex * pair_count(self.n - 1) + pair_index(self.n - 1, u, v)

    def between_index(self, apex: int, mid: int, o1: int, o2: int) -> int:
        if o1 > o2:
            o1, o2 = o2, o1
        if len({apex, mid, o1, o2}) != 4:
            raise InvalidInputError("between fact needs 4 distinct points")
        slot = apex * (self.n - 1) + (mid - (mid > apex))
        u = o1 - (o1 > apex) - (o1 > mid)
        v = o2 - (o2 > apex) - (o2 > mid)
        return slot * pair_count(self.n - 2) + pair_index(self.n - 2, u, v)

    def hull_index(self, z: int, p: int, q: int, r: int) -> int:
        p, q, r = sorted((p, q, r))
        if len({z, p, q, r}) != 4:
            raise InvalidInputError("hull fact needs 4 distinct points")
        u = p - (p > z)
        v = q - (q > z)
        w = r - (r > z)
        # colex rank of the 3-subset {u < v < w}
        rank = u + v * (v - 1) // 2 + w * (w - 1) * (w - 2) // 6
        return z * ((self.n - 1) * (self.n - 2) * (self.n - 3) // 6) + rank


@lru_cache(maxsize=None)
def build_tables(n: int) -> AngleTables:
    """Enumerate all entities and rule instances for n points.

    Instance tables (int64 rows):
    - tripod (z, each 3-subset of others, each mid choice):
      [whole angle, part1 angle, part2 angle]; whole <= part1 + part2.
    - triangles (each 3-subset {x,y,z}):
      [angle at x, angle at y, angle at z, side yz, side xz, side xy]
      (each angle listed with its opposite side at the same position).
    - hull_alts (apex z, each 3-subset {p,q,r} of others):
      [hull fact, between mid p, between mid q, between mid r,
       angle pq, angle pr, angle qr] - the four mutually exclusive and
      exhaustive placements of z against pqr, plus the sector angles.
    - between_sum (each between fact):
      [fact, whole angle, part to lo outer, part to hi outer].
    - quad_single (each between fact (z; x, m, y), x < y):
      [fact, (m; z, x, y), (m; z, y, x), (y; x, z, m), (x; y, z, m)]
      as fact indices: the premise forces all four listed facts false
      (from the mid, neither outer can be mid of apex+other-outer;
      from an outer, the apex cannot be mid of mid+other-outer).
    - quad_cross (each apex pair {z,w}, outer pair {x,y}):
      [(z; x, w, y), (w; x, z, y), (y; z, x, w), (x; z, y, w)]:
      the first two true force the last two true (the segment between
      the two apexes crosses the segment between the two outers).
    - quad_contain (each mid w, shared outer x, apex pair {z,y}):
      [(z; x, w, y), (y; z, w, x), hull fact w in {x,y,z}]:
      the two between facts force the containment (w lies in both
      sectors, whose intersection is the triangle).
    """
    if n < 4:
        raise InvalidInputError(f"angle reasoning needs n >= 4, got n={n}")
    points = range(n)

    angle_points = np.zeros((n * pair_count(n - 1), 3), dtype=np.int64)
    between_points = np.zeros((n * (n - 1) * pair_count(n - 2), 4), dtype=np.int64)
    hull_points = np.zeros((n * (n - 1) * (n - 2) * (n - 3) // 6, 4), dtype=np.int64)

    tables = AngleTables(
        n=n, num_angles=len(angle_points), num_between=len(between_points),
        num_hull=len(hull_points), angle_points=angle_points,
        between_points=between_points, hull_points=hull_points,
        tripod=np.zeros(0, dtype=np.int64), triangles=np.zeros(0, dtype=np.int64),
        hull_alts=np.zeros(0, dtype=np.int64), between_sum=np.zeros(0, dtype=np.int64),
        quad_single=np.zeros(0, dtype=np.int64), quad_cross=np.zeros(0, dtype=np.int64),
        quad_contain=np.zeros(0, dtype=np.int64))
    ai = tables.angle_index
    bi = tables.between_index
    hi = tables.hull_index

    for z in points:
        for x, y in combinations((p for p in points if p != z), 2):
            angle_points[ai(z, x, y)] = (z, x, y)
        for m in (p for p in points if p != z):
            for o1, o2 in combinations((p for p in points if p not in (z, m)), 2):
                between_points[bi(z, m, o1, o2)] = (z, m, o1, o2)
        for p, q, r in combinations((u for u in points if u != z), 3):
            hull_points[hi(z, p, q, r)] = (z, p, q, r)

    tripod = []
    for z in points:
        for trip in combinations((p for p in points if p != z), 3):
            for m in trip:
                x, y = (p for p in trip if p != m)
                tripod.append((ai(z, x, y), ai(z, x, m), ai(z, m, y)))

    triangles = []
    for x, y, z in combinations(points, 3):
        triangles.append((ai(x, y, z), ai(y, x, z), ai(z, x, y),
                          pair_index(n, y, z), pair_index(n, x, z),
                          pair_index(n, x, y)))

    hull_alts = []
    for z in points:
        for p, q, r in combinations((u for u in points if u != z), 3):
            hull_alts.append((hi(z, p, q, r), bi(z, p, q, r), bi(z, q, p, r),
                              bi(z, r, p, q), ai(z, p, q), ai(z, p, r), ai(z, q, r)))

    between_sum = []
    quad_single = []
    for b in range(len(between_points)):
        z, m, o1, o2 = (int(v) for v in between_points[b])
        between_sum.append((b, ai(z, o1, o2), ai(z, o1, m), ai(z, m, o2)))
        quad_single.append((b, bi(m, o1, z, o2), bi(m, o2, z, o1),
                            bi(o2, z, o1, m), bi(o1, z, o2, m)))

    quad_cross = []
    for z, w in combinations(points, 2):
        for x, y in combinations((p for p in points if p not in (z, w)), 2):
            quad_cross.append((bi(z, w, x, y), bi(w, z, x, y),
                               bi(y, x, z, w), bi(x, y, z, w)))

    quad_contain = []
    for w in points:
        for x in (p for p in points if p != w):
            for z, y in combinations((p for p in points if p not in (w, x)), 2):
                quad_contain.append((bi(z, w, x, y), bi(y, w, z, x), hi(w, x, y, z)))

    def freeze(rows: list) -> np.ndarray:
        arr = np.asarray(rows, dtype=np.int64).reshape(len(rows), -1)
        arr.flags.writeable = False
        return arr

    for name, rows in (("tripod", tripod), ("triangles", triangles),
                       ("hull_alts", hull_alts), ("between_sum", between_sum),
                       ("quad_single", quad_single), ("quad_cross", quad_cross),
                       ("quad_contain", quad_contain)):
        object.__setattr__(tables, name, freeze(rows))
    for arr in (angle_points, between_points, hull_points):
        arr.flags.writeable = False
    return tables


def full_order_less(order: EdgeOrder) -> np.ndarray:
    """less[p, q] = 1 iff pair p is closer than pair q (total order)."""
    r = np.asarray(order.ranks)
    return (r[:, None] < r[None, :]).astype(np.uint8)


def extremal_less(order: EdgeOrder) -> np.ndarray:
    """Side comparisons implied by nearest/farthest maps alone, closed
    under transitivity.

    For each point x: the pair to its nearest neighbour is closer than
    every other pair at x, and every pair at x is closer than the pair
    to its farthest neighbour.
    """
    n = order.n
    m = pair_count(n)
    maps = neighbour_maps_from_order(order)
    less = np.zeros((m, m), dtype=bool)
    for x in range(n):
        at_x = [pair_index(n, min(x, y), max(x, y)) for y in range(n) if y != x]
        near = pair_index(n, min(x, maps.nn[x]), max(x, maps.nn[x]))
        far = pair_index(n, min(x, maps.fn[x]), max(x, maps.fn[x]))
        for k in at_x:
            if k != near:
                less[near, k] = True
            if k != far:
                less[k, far] = True
    while True:
        closed = less | (less @ less)
        if np.array_equal(closed, less):
            break
        less = closed
    return less.astype(np.uint8)


__all__ = ["AngleTables", "build_tables", "full_order_less", "extremal_less"]
