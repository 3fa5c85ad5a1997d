"""Constraint-state construction and propagation for order refutation.

A state tracks, for a fixed edge order and comparison mode:
- an exact interval [lo, hi] (degrees, scaled integers) for every angle
  (apex; arm, arm) over the point set, each endpoint carrying a
  strictness flag and the derivation line that produced it;
- a truth value (unknown / true / false) for every angular-between fact
  (apex; middle arm, two outer arms) and every containment fact
  (apex inside a triple), plus static on-boundary marks.

Seeding reads the side-comparison matrix for the chosen mode:
- a side smaller than both others of its triangle faces an angle < 60,
- a side smaller than some other side faces an angle < 90,
- a side larger than both others faces an angle > 60,
- every point that is some point's farthest neighbour lies on the
  boundary of the configuration, hence inside no triangle of others.
Seeds are grouped into up to four numbered premise lines; derived lines
continue the numbering and land in the shared numeric log.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Optional

import numpy as np

from ..errors import InvalidInputError
from ..metric import pair_index
from ..orders import EdgeOrder, neighbour_maps_from_order
from . import kernel as K
from .geometry import AngleTables, build_tables, extremal_less, full_order_less


class ConstraintMode(str, Enum):
    """Which side comparisons the refutation may use."""

    FULL_ORDER = "full-order"
    EXTREMAL_ONLY = "extremal-only"

    @classmethod
    def coerce(cls, value) -> "ConstraintMode":
        if isinstance(value, ConstraintMode):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {
            "full": cls.FULL_ORDER,
            "full-order": cls.FULL_ORDER,
            "fullorder": cls.FULL_ORDER,
            "order": cls.FULL_ORDER,
            "extremal": cls.EXTREMAL_ONLY,
            "extremal-only": cls.EXTREMAL_ONLY,
            "extremalonly": cls.EXTREMAL_ONLY,
            "neighbours": cls.EXTREMAL_ONLY,
        }
        try:
            return aliases[key]
        except KeyError:
            raise InvalidInputError(f"unknown constraint mode: {value!r}")


class AngleId(NamedTuple):
    """Angle at `apex` between the rays towards `x` and `y` (x < y)."""

    apex: int
    x: int
    y: int

    @classmethod
    def of(cls, apex: int, x: int, y: int) -> "AngleId":
        if len({apex, x, y}) != 3:
            raise InvalidInputError("angle needs three distinct points")
        return cls(apex, min(x, y), max(x, y))


@dataclass(frozen=True)
class AngleInterval:
    """Exact degree interval with per-endpoint strictness."""

    lower: Fraction
    upper: Fraction
    lower_strict: bool
    upper_strict: bool

    @property
    def is_empty(self) -> bool:
        if self.upper < self.lower:
            return True
        return self.upper == self.lower and (self.lower_strict or
                                             self.upper_strict)

    def __str__(self) -> str:
        lb = "(" if self.lower_strict else "["
        rb = ")" if self.upper_strict else "]"
        return f"{lb}{self.lower}, {self.upper}{rb}"


#: GeomFact.kind values
FACT_BETWEEN = "angular-between"
FACT_IN_HULL = "in-hull"
FACT_ON_BOUNDARY = "on-boundary"


@dataclass(frozen=True)
class GeomFact:
    """A resolved qualitative fact about the hypothetical configuration.

    points: between -> (apex, middle, outer, outer); in-hull ->
    (inner, corner, corner, corner); on-boundary -> (point,).
    """

    kind: str
    points: tuple
    truth: bool


@dataclass(frozen=True)
class SeedGroup:
    """One numbered premise line: a tag plus its member entities."""

    line: int
    tag: str  # "smallest" | "dominated" | "largest" | "boundary"
    members: tuple  # angle indices, or point indices for "boundary"


_STATUS_NAMES = {
    K.FIXPOINT: "fixpoint",
    K.CONTRADICTION: "contradiction",
    K.LOG_FULL: "line-limit",
    K.PASS_CAP_HIT: "pass-limit",
}

_DEFAULT_PASS_CAP = 64

# one shared numeric log buffer; prove() copies out the rows it used
_LOG_POOL: dict = {}


def _log_buffer(max_lines: int) -> np.ndarray:
    buf = _LOG_POOL.get(max_lines)
    if buf is None:
        buf = np.zeros((max_lines, 10), dtype=np.int64)
        _LOG_POOL[max_lines] = buf
    return buf


class ConstraintState:
    """Mutable deduction state; copy() gives an independent branch."""

    def __init__(self, order: EdgeOrder, mode: ConstraintMode,
                 tables: AngleTables, less: np.ndarray, log: np.ndarray,
                 pass_cap: int):
        self.order = order
        self.mode = mode
        self.tables = tables
        self.less = less
        self.log = log
        self.pass_cap = pass_cap
        A, B, H = tables.num_angles, tables.num_between, tables.num_hull
        self.lo = np.zeros(A, dtype=np.int64)
        self.hi = np.full(A, K.D180, dtype=np.int64)
        self.los = np.zeros(A, dtype=np.int64)
        self.his = np.zeros(A, dtype=np.int64)
        self.lol = np.zeros(A, dtype=np.int64)
        self.hil = np.zeros(A, dtype=np.int64)
        self.bst = np.zeros(B, dtype=np.int64)
        self.bln = np.zeros(B, dtype=np.int64)
        self.hst = np.zeros(H, dtype=np.int64)
        self.hln = np.zeros(H, dtype=np.int64)
        self.obd = np.zeros(order.n, dtype=np.int64)
        self.obl = np.zeros(order.n, dtype=np.int64)
        self.hapex = tables.hull_points[:, 0].astype(np.int64)
        self.seed_groups: tuple = ()
        self.base = 1  # line number of log row 0; set by init_state
        self.next_line = 1

    def copy(self) -> "ConstraintState":
        dup = object.__new__(ConstraintState)
        dup.order = self.order
        dup.mode = self.mode
        dup.tables = self.tables
        dup.less = self.less
        dup.log = self.log
        dup.pass_cap = self.pass_cap
        for name in ("lo", "hi", "los", "his", "lol", "hil",
                     "bst", "bln", "hst", "hln"):
            setattr(dup, name, getattr(self, name).copy())
        dup.obd = self.obd  # static after seeding
        dup.obl = self.obl
        dup.hapex = self.hapex
        dup.seed_groups = self.seed_groups
        dup.base = self.base
        dup.next_line = self.next_line
        return dup

    # -- deduction ---------------------------------------------------

    def propagate(self) -> str:
        """Sweep all rules to a fixpoint; returns the ending status."""
        t = self.tables
        status, nl = K.propagate_kernel(
            self.lo, self.hi, self.los, self.his, self.lol, self.hil,
            self.bst, self.bln, self.hst, self.hln, self.obd, self.obl,
            self.less, self.hapex,
            t.tripod, t.triangles, t.hull_alts, t.between_sum,
            t.quad_single, t.quad_cross, t.quad_contain,
            self.log, self.base, self.next_line, self.pass_cap)
        self.next_line = int(nl)
        return _STATUS_NAMES[int(status)]

    # -- queries -----------------------------------------------------

    def angle_interval(self, apex: int, x: int, y: int) -> AngleInterval:
        a = self.tables.angle_index(apex, min(x, y), max(x, y))
        scale = Fraction(1, K.ONE)
        return AngleInterval(self.lo[a] * scale, self.hi[a] * scale,
                             bool(self.los[a]), bool(self.his[a]))

    def between_truth(self, apex: int, mid: int, o1: int, o2: int
                      ) -> Optional[bool]:
        b = self.tables.between_index(apex, mid, min(o1, o2), max(o1, o2))
        s = self.bst[b]
        return None if s == K.UNKNOWN else bool(s == K.TRUE)

    def hull_truth(self, z: int, p: int, q: int, r: int) -> Optional[bool]:
        h = self.tables.hull_index(z, *sorted((p, q, r)))
        s = self.hst[h]
        return None if s == K.UNKNOWN else bool(s == K.TRUE)

    def on_boundary(self, z: int) -> bool:
        return bool(self.obd[z])

    def facts(self) -> list:
        """All currently resolved facts, most recently derived last."""
        t = self.tables
        out = []
        for z in range(self.order.n):
            if self.obd[z]:
                out.append((0, GeomFact(FACT_ON_BOUNDARY, (int(z),), True)))
        for b in range(t.num_between):
            if self.bst[b] != K.UNKNOWN:
                pts = tuple(int(v) for v in t.between_points[b])
                out.append((int(self.bln[b]),
                            GeomFact(FACT_BETWEEN, pts,
                                     self.bst[b] == K.TRUE)))
        for h in range(t.num_hull):
            if self.hst[h] != K.UNKNOWN:
                pts = tuple(int(v) for v in t.hull_points[h])
                out.append((int(self.hln[h]),
                            GeomFact(FACT_IN_HULL, pts,
                                     self.hst[h] == K.TRUE)))
        out.sort(key=lambda pair: pair[0])
        return [fact for _line, fact in out]

    @property
    def derived_line_count(self) -> int:
        return self.next_line - self.base


def init_state(order: EdgeOrder, mode=ConstraintMode.FULL_ORDER, *,
               max_lines: int = 10000,
               pass_cap: int = _DEFAULT_PASS_CAP) -> ConstraintState:
    """Build the seeded state for an edge order under the given mode."""
    mode = ConstraintMode.coerce(mode)
    n = order.n
    if n < 4:
        raise InvalidInputError("refutation needs at least 4 points")
    tables = build_tables(n)
    if mode is ConstraintMode.FULL_ORDER:
        less = full_order_less(order).astype(np.int64)
    else:
        less = extremal_less(order).astype(np.int64)
    log = _log_buffer(max_lines)
    st = ConstraintState(order, mode, tables, less, log, pass_cap)

    smallest: list = []
    dominated: list = []
    largest: list = []
    for a in range(tables.num_angles):
        z, x, y = (int(v) for v in tables.angle_points[a])
        s = pair_index(n, x, y)
        t1 = pair_index(n, min(z, x), max(z, x))
        t2 = pair_index(n, min(z, y), max(z, y))
        if less[s, t1] and less[s, t2]:
            smallest.append(a)
        elif less[s, t1] or less[s, t2]:
            dominated.append(a)
        if less[t1, s] and less[t2, s]:
            largest.append(a)

    maps = neighbour_maps_from_order(order)
    boundary = sorted(set(int(v) for v in maps.fn))

    groups = []
    line = 0
    for tag, members in (("smallest", smallest), ("dominated", dominated),
                         ("largest", largest), ("boundary", boundary)):
        if not members:
            continue
        line += 1
        groups.append(SeedGroup(line, tag, tuple(members)))
        if tag == "smallest":
            for a in members:
                st.hi[a] = K.D60
                st.his[a] = 1
                st.hil[a] = line
        elif tag == "dominated":
            for a in members:
                st.hi[a] = K.D90
                st.his[a] = 1
                st.hil[a] = line
        elif tag == "largest":
            for a in members:
                st.lo[a] = K.D60
                st.los[a] = 1
                st.lol[a] = line
        else:
            for z in members:
                st.obd[z] = 1
                st.obl[z] = line
            for h in range(tables.num_hull):
                if st.obd[st.hapex[h]]:
                    st.hst[h] = K.FALSE
                    st.hln[h] = line

    st.seed_groups = tuple(groups)
    st.base = line + 1
    st.next_line = line + 1
    return st


__all__ = [
    "ConstraintMode", "AngleId", "AngleInterval", "GeomFact", "SeedGroup",
    "FACT_BETWEEN", "FACT_IN_HULL", "FACT_ON_BOUNDARY",
    "ConstraintState", "init_state",
]
