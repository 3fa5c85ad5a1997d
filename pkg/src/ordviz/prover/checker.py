"""Independent transcript replay: re-derive every line from what it cites.

The checker shares no state with the deduction engine.  It parses a
rendered transcript, rebuilds the edge order and comparison mode from
the header, recomputes the side-comparison relation itself, and then
walks the numbered lines in order.  Each line must follow from the
order premise and the lines it cites, under the line's stated rule:
cited values must match the printed ones exactly (rational arithmetic,
zero tolerance), strictness markers must agree, case analyses must
cover exactly the placement alternatives still open in scope, and
every contradiction must name two (or four) visible lines that
genuinely clash.  Scope is enforced: a line inside one case may not
cite lines of a sibling case.

check_proof returns ok=False on the first invalid step; refuted=True
only when the derivation closes every branch of a complete analysis.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..orders import EdgeOrder

_TAGS = ("contradiction!", "smallest", "dominated", "largest", "on bndry",
         "new circ", "new sum", "tri sum", "tripod", "larger", "hence",
         "side", "circ", "open", "not", "sum")

_ROMANS = {"i": 1, "ii": 2, "iii": 3, "iv": 4, "v": 5,
           "vi": 6, "vii": 7, "viii": 8, "ix": 9, "x": 10}


class CheckFailure(Exception):
    pass


@dataclass(frozen=True)
class Angle:
    apex: int
    x: int
    y: int  # x < y

    @property
    def side(self):
        """The opposite side (the segment the angle subtends)."""
        return (self.x, self.y)

    def arm(self, other: int):
        return tuple(sorted((self.apex, other)))


@dataclass(frozen=True)
class Between:
    apex: int
    mid: int
    o1: int
    o2: int  # o1 < o2


@dataclass(frozen=True)
class Hull:
    apex: int
    p: int
    q: int
    r: int  # sorted


@dataclass
class Effect:
    """What one accepted line contributes to later derivations."""

    kind: str               # "bounds" | "fact" | "boundary" | "none"
    bounds: dict = field(default_factory=dict)
    # bounds: {("ub"|"lb", Angle): (Fraction, strict)}
    fact: Optional[object] = None
    truth: bool = True
    boundary: frozenset = frozenset()


@dataclass
class CheckResult:
    ok: bool
    refuted: bool
    lines_checked: int
    error: Optional[str] = None

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------- parsing

@dataclass
class Parsed:
    number: Optional[int]
    tag: str
    prop: str
    refs: tuple
    marker: Optional[str] = None  # "analysis" | "trailer"
    marker_points: Optional[tuple] = None


_REF_RE = re.compile(r"\s\s((?:\d+\.)+)\s*$")
_NUM_RE = re.compile(r"^\s*(\d+)\.\s(.*)$")
_ANALYSIS_RE = re.compile(
    r"^\s*CASE ANALYSIS using points ([a-z]),([a-z]{3}):\s*$")
_TRAILER_RE = re.compile(r"^\s*CONTRADICTION in all (\w+) cases!\s*$")
_CASE_RE = re.compile(r"^\(([ivx]+)\) ASSUMING (.+?)\.\.\.$")


def _parse_line(raw: str) -> Optional[Parsed]:
    if not raw.strip():
        return None
    m = _ANALYSIS_RE.match(raw)
    if m:
        apex = m.group(1)
        trip = tuple(m.group(2))
        return Parsed(None, "", "", (), "analysis", (apex,) + trip)
    m = _TRAILER_RE.match(raw)
    if m:
        return Parsed(None, "", m.group(1), (), "trailer")
    m = _NUM_RE.match(raw)
    if m is None:
        return None
    number = int(m.group(1))
    rest = m.group(2)
    refs: tuple = ()
    rm = _REF_RE.search(rest)
    if rm:
        refs = tuple(int(t) for t in rm.group(1).rstrip(".").split("."))
        rest = rest[: rm.start()]
    rest = rest.strip()
    tag = ""
    for cand in _TAGS:
        if rest == cand or rest.startswith(cand + " "):
            tag = cand
            rest = rest[len(cand):].strip()
            break
    return Parsed(number, tag, rest, refs)


def parse_proof(text: str) -> tuple:
    """(order, mode_extremal, labels, parsed lines).

    Raises CheckFailure on malformed header or unparseable lines.
    """
    lines = text.splitlines()
    order_toks = None
    extremal = None
    for raw in lines[:6]:
        low = raw.strip()
        if low.startswith("refutation attempt for edge order"):
            order_toks = low.split("edge order", 1)[1].strip().split(" < ")
        elif low.startswith("using "):
            extremal = "extremal" in low
    if order_toks is None or extremal is None:
        raise CheckFailure("missing or malformed transcript header")
    letters = sorted({c for tok in order_toks for c in tok})
    if any(len(tok) != 2 for tok in order_toks):
        raise CheckFailure("malformed segment token in header order")
    n = len(letters)
    index = {c: i for i, c in enumerate(letters)}
    m = n * (n - 1) // 2
    if len(order_toks) != m:
        raise CheckFailure(
            f"header order lists {len(order_toks)} segments, expected {m}")
    pos = {}
    for rank, tok in enumerate(order_toks):
        i, j = sorted((index[tok[0]], index[tok[1]]))
        if (i, j) in pos:
            raise CheckFailure(f"segment {tok} repeated in header order")
        pos[(i, j)] = rank
    # canonical pair enumeration must match EdgeOrder's (lex by index)
    pairs = _all_pairs(n)
    ranks = tuple(pos[p] for p in pairs)
    order = EdgeOrder(n, ranks)

    parsed = []
    in_body = False
    for raw in lines:
        if not in_body:
            if raw.lstrip().startswith("line") and "type" in raw:
                in_body = True
            continue
        p = _parse_line(raw)
        if p is not None:
            parsed.append(p)
        elif raw.strip():
            raise CheckFailure(f"unrecognised transcript line: {raw.strip()!r}")
    return order, extremal, tuple(letters), parsed


def _all_pairs(n: int):
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            out.append((i, j))
    return out


# ------------------------------------------------------- the re-deriver

class _Replay:
    def __init__(self, order: EdgeOrder, extremal: bool, labels: tuple):
        self.order = order
        self.labels = labels
        self.index = {c: i for i, c in enumerate(labels)}
        self.n = order.n
        self.pairs = _all_pairs(self.n)
        self.pair_pos = {p: k for k, p in enumerate(self.pairs)}
        self.less = self._less_matrix(order, extremal)
        self.fn_image = self._fn_image(order)
        self.effects: dict = {}      # line -> Effect
        self.frame_of: dict = {}     # line -> frame id
        self.frames: list = [0]      # active frame stack (ids)
        self._next_frame = 1
        # split stack: dicts with apex, triple, open list, seen cases,
        # closed flags, frame id in which the split lives
        self.splits: list = []
        self.root_closed = False

    # -- order-derived ground truth ---------------------------------

    def _rank(self, i: int, j: int) -> int:
        return self.order.ranks[self.pair_pos[tuple(sorted((i, j)))]]

    def _less_matrix(self, order: EdgeOrder, extremal: bool):
        m = len(self.pairs)
        ranks = order.ranks
        less = [[False] * m for _ in range(m)]
        if not extremal:
            for a in range(m):
                for b in range(m):
                    less[a][b] = ranks[a] < ranks[b]
            return less
        nn, fn = self._nn_fn(order)
        for x in range(self.n):
            at_x = [self.pair_pos[tuple(sorted((x, y)))]
                    for y in range(self.n) if y != x]
            near = self.pair_pos[tuple(sorted((x, nn[x])))]
            far = self.pair_pos[tuple(sorted((x, fn[x])))]
            for k in at_x:
                if k != near:
                    less[near][k] = True
                if k != far:
                    less[k][far] = True
        changed = True
        while changed:
            changed = False
            for a in range(m):
                for b in range(m):
                    if less[a][b]:
                        for c in range(m):
                            if less[b][c] and not less[a][c]:
                                less[a][c] = True
                                changed = True
        return less

    def _nn_fn(self, order: EdgeOrder):
        nn, fn = [], []
        for x in range(self.n):
            others = [y for y in range(self.n) if y != x]
            nn.append(min(others, key=lambda y: self._rank(x, y)))
            fn.append(max(others, key=lambda y: self._rank(x, y)))
        return nn, fn

    def _fn_image(self, order: EdgeOrder):
        _, fn = self._nn_fn(order)
        return frozenset(fn)

    def _side_less(self, s1, s2) -> bool:
        return self.less[self.pair_pos[tuple(sorted(s1))]][
            self.pair_pos[tuple(sorted(s2))]]

    # -- token parsing ----------------------------------------------

    def pt(self, c: str) -> int:
        try:
            return self.index[c]
        except KeyError:
            raise CheckFailure(f"unknown point label {c!r}")

    def parse_angle(self, tok: str) -> Angle:
        m = re.fullmatch(r"([a-z]):([a-z])([a-z])", tok)
        if not m:
            raise CheckFailure(f"bad angle token {tok!r}")
        apex = self.pt(m.group(1))
        x, y = sorted((self.pt(m.group(2)), self.pt(m.group(3))))
        if len({apex, x, y}) != 3:
            raise CheckFailure(f"degenerate angle token {tok!r}")
        return Angle(apex, x, y)

    def parse_between(self, tok: str) -> Between:
        m = re.fullmatch(r"([a-z]):([a-z])([a-z])([a-z])", tok)
        if not m:
            raise CheckFailure(f"bad between token {tok!r}")
        apex = self.pt(m.group(1))
        o1, mid, o2 = (self.pt(m.group(k)) for k in (2, 3, 4))
        if len({apex, o1, mid, o2}) != 4:
            raise CheckFailure(f"degenerate between token {tok!r}")
        lo, hi = sorted((o1, o2))
        return Between(apex, mid, lo, hi)

    def parse_hull(self, tok: str) -> Hull:
        m = re.fullmatch(r"([a-z]) in ([a-z])([a-z])([a-z])", tok)
        if not m:
            raise CheckFailure(f"bad containment token {tok!r}")
        apex = self.pt(m.group(1))
        p, q, r = sorted(self.pt(m.group(k)) for k in (2, 3, 4))
        if len({apex, p, q, r}) != 4:
            raise CheckFailure(f"degenerate containment token {tok!r}")
        return Hull(apex, p, q, r)

    def parse_fact(self, tok: str):
        if " in " in tok:
            return self.parse_hull(tok)
        return self.parse_between(tok)

    # -- effect lookup with scope -----------------------------------

    def _visible(self, line: int) -> bool:
        if line == 0:
            return True
        fr = self.frame_of.get(line)
        return fr is not None and fr in self.frames

    def get_bound(self, line: int, direction: str, angle: Angle):
        if line == 0:
            return (Fraction(180), False) if direction == "ub" \
                else (Fraction(0), False)
        if not self._visible(line):
            raise CheckFailure(f"cites line {line} outside current scope")
        eff = self.effects.get(line)
        if eff is None:
            raise CheckFailure(f"cites unknown line {line}")
        key = (direction, angle)
        if key not in eff.bounds:
            raise CheckFailure(
                f"line {line} provides no {direction} bound for that angle")
        return eff.bounds[key]

    def fact_truth_at(self, line: int, fact) -> Optional[bool]:
        """Truth of `fact` as established by `line`, if any."""
        if line == 0 or not self._visible(line):
            if line != 0 and not self._visible(line):
                raise CheckFailure(
                    f"cites line {line} outside current scope")
            return None
        eff = self.effects.get(line)
        if eff is None:
            raise CheckFailure(f"cites unknown line {line}")
        if eff.kind == "boundary" and isinstance(fact, Hull):
            if fact.apex in eff.boundary:
                return False
            return None
        if eff.kind == "fact" and eff.fact == fact:
            return eff.truth
        return None

    def require_fact(self, line: int, fact, truth: bool):
        got = self.fact_truth_at(line, fact)
        if got is None or got is not truth:
            want = "asserting" if truth else "denying"
            raise CheckFailure(
                f"line {line} is not a visible line {want} that fact")


# ---------------------------------------------------------- main checker

_VALUE = r"-?\d+(?:/\d+)?"


def _frac(tok: str) -> Fraction:
    return Fraction(tok)


def _ops_strict(op: str) -> bool:
    return op in ("<", ">")


def _settle_ub(printed: Fraction, computed: Fraction, op_strict: bool,
               strict_in: bool):
    """Printed upper bound vs recomputed one, allowing the clamp at 0.

    A computed value below zero is recorded as the (still sound,
    necessarily strict) bound 0.  Returns (value, strict) to store.
    """
    if printed == computed and op_strict == strict_in:
        return printed, strict_in
    if computed < 0 and printed == 0 and op_strict:
        return Fraction(0), True
    raise CheckFailure(
        f"stated bound {printed} does not follow (recomputed {computed})")


def _settle_lb(printed: Fraction, computed: Fraction, op_strict: bool,
               strict_in: bool):
    """Printed lower bound vs recomputed one, allowing the cap at 360."""
    if printed == computed and op_strict == strict_in:
        return printed, strict_in
    if computed > 360 and printed == 360 and op_strict == strict_in:
        return Fraction(360), strict_in
    raise CheckFailure(
        f"stated bound {printed} does not follow (recomputed {computed})")


class _Checker:
    def __init__(self, order, extremal, labels, parsed):
        self.r = _Replay(order, extremal, labels)
        self.parsed = parsed
        self.count = 0
        self.expected_no = 1
        # case bookkeeping mirrors _Replay.splits
        self.closed_stack: list = []  # parallel: is current case closed?

    def run(self) -> CheckResult:
        try:
            for p in self.parsed:
                self._dispatch(p)
            # EOF: any incomplete split leaves the proof open
            return CheckResult(True, self.r.root_closed, self.count)
        except CheckFailure as exc:
            return CheckResult(False, False, self.count, str(exc))

    # ---------------------------------------------------------------

    def _dispatch(self, p: Parsed):
        r = self.r
        if p.marker == "analysis":
            self._open_split(p)
            return
        if p.marker == "trailer":
            self._close_split(p)
            return
        if p.number is None:
            return
        if p.number != self.expected_no:
            raise CheckFailure(
                f"line {p.number} out of sequence (expected "
                f"{self.expected_no})")
        if self.r.root_closed:
            raise CheckFailure(
                f"line {p.number} appears after the derivation closed")
        self.expected_no += 1
        self.count += 1
        handler = {
            "smallest": self._seed_small,
            "dominated": self._seed_dom,
            "largest": self._seed_large,
            "on bndry": self._seed_boundary,
            "tripod": self._tripod,
            "tri sum": self._tri_sum,
            "side": self._side,
            "larger": self._larger,
            "not": self._not,
            "hence": self._hence,
            "sum": self._sum,
            "circ": self._circ,
            "new sum": self._new_sum,
            "new circ": self._new_circ,
            "open": self._open_line,
            "contradiction!": self._contradiction,
            "": self._case,
        }.get(p.tag)
        if handler is None:
            raise CheckFailure(f"line {p.number}: unknown tag {p.tag!r}")
        try:
            handler(p)
        except CheckFailure as exc:
            raise CheckFailure(f"line {p.number}: {exc}") from None
        except (IndexError, ValueError) as exc:
            raise CheckFailure(
                f"line {p.number}: malformed ({exc})") from None

    def _store(self, p: Parsed, eff: Effect):
        self.r.effects[p.number] = eff
        self.r.frame_of[p.number] = self.r.frames[-1]

    # -- seeds -------------------------------------------------------

    def _seed_angles(self, p: Parsed, rel: str):
        prop = p.prop
        if not prop.endswith(rel):
            raise CheckFailure(f"expected proposition ending {rel!r}")
        toks = [t.strip() for t in prop[: -len(rel)].strip().split(",")]
        return [self.r.parse_angle(t) for t in toks]

    def _seed_small(self, p: Parsed):
        angles = self._seed_angles(p, "< 60")
        eff = Effect("bounds")
        for a in angles:
            s, t1, t2 = a.side, a.arm(a.x), a.arm(a.y)
            if not (self.r._side_less(s, t1) and self.r._side_less(s, t2)):
                raise CheckFailure(
                    f"side {s} is not the smallest of its triangle")
            eff.bounds[("ub", a)] = (Fraction(60), True)
        self._store(p, eff)

    def _seed_dom(self, p: Parsed):
        angles = self._seed_angles(p, "< 90")
        eff = Effect("bounds")
        for a in angles:
            s, t1, t2 = a.side, a.arm(a.x), a.arm(a.y)
            if not (self.r._side_less(s, t1) or self.r._side_less(s, t2)):
                raise CheckFailure(
                    f"side {s} is not smaller than another side")
            eff.bounds[("ub", a)] = (Fraction(90), True)
        self._store(p, eff)

    def _seed_large(self, p: Parsed):
        angles = self._seed_angles(p, "> 60")
        eff = Effect("bounds")
        for a in angles:
            s, t1, t2 = a.side, a.arm(a.x), a.arm(a.y)
            if not (self.r._side_less(t1, s) and self.r._side_less(t2, s)):
                raise CheckFailure(
                    f"side {s} is not the largest of its triangle")
            eff.bounds[("lb", a)] = (Fraction(60), True)
        self._store(p, eff)

    def _seed_boundary(self, p: Parsed):
        m = re.fullmatch(r"((?:[a-z],)*[a-z]) since in fn image", p.prop)
        if not m:
            raise CheckFailure("malformed boundary premise")
        pts = frozenset(self.r.pt(c) for c in m.group(1).split(","))
        for z in pts:
            if z not in self.r.fn_image:
                raise CheckFailure(
                    f"point {self.r.labels[z]} is nobody's farthest"
                    " neighbour")
        self._store(p, Effect("boundary", boundary=pts))

    # -- bound rules -------------------------------------------------

    def _check_value_chain(self, printed: Fraction, computed: Fraction):
        if printed != computed:
            raise CheckFailure(
                f"stated value {printed} != recomputed {computed}")

    def _tripod(self, p: Parsed):
        m = re.fullmatch(
            rf"(\S+) <= (\S+) \+ (\S+) (<=?) ({_VALUE}) \+ ({_VALUE})"
            rf" = ({_VALUE})", p.prop)
        if m:
            w = self.r.parse_angle(m.group(1))
            p1 = self.r.parse_angle(m.group(2))
            p2 = self.r.parse_angle(m.group(3))
            self._tripod_shape(w, p1, p2)
            v1, s1 = self.r.get_bound(p.refs[0], "ub", p1)
            v2, s2 = self.r.get_bound(p.refs[1], "ub", p2)
            if v1 != _frac(m.group(5)) or v2 != _frac(m.group(6)):
                raise CheckFailure("cited bounds differ from printed ones")
            strict = s1 or s2
            if _ops_strict(m.group(4)) != strict:
                raise CheckFailure("strictness marker wrong")
            v = v1 + v2
            self._check_value_chain(_frac(m.group(7)), v)
            self._store(p, Effect("bounds",
                                  bounds={("ub", w): (v, strict)}))
            return
        m = re.fullmatch(
            rf"(\S+) (>=?) (\S+) - (\S+) (>=?) ({_VALUE}) - ({_VALUE})"
            rf" = ({_VALUE})", p.prop)
        if not m:
            raise CheckFailure("malformed tripod line")
        part = self.r.parse_angle(m.group(1))
        w = self.r.parse_angle(m.group(3))
        other = self.r.parse_angle(m.group(4))
        self._tripod_shape(w, part, other)
        v1, s1 = self.r.get_bound(p.refs[0], "lb", w)
        v2, s2 = self.r.get_bound(p.refs[1], "ub", other)
        if v1 != _frac(m.group(6)) or v2 != _frac(m.group(7)):
            raise CheckFailure("cited bounds differ from printed ones")
        strict = s1 or s2
        if _ops_strict(m.group(2)) != strict or \
                _ops_strict(m.group(5)) != strict:
            raise CheckFailure("strictness marker wrong")
        v = v1 - v2
        self._check_value_chain(_frac(m.group(8)), v)
        if v < 0:
            raise CheckFailure("negative lower bound is never an advance")
        self._store(p, Effect("bounds", bounds={("lb", part): (v, strict)}))

    def _tripod_shape(self, w: Angle, p1: Angle, p2: Angle):
        if not (w.apex == p1.apex == p2.apex):
            raise CheckFailure("tripod angles must share the apex")
        arms1 = {p1.x, p1.y}
        arms2 = {p2.x, p2.y}
        if arms1 ^ arms2 != {w.x, w.y} or not (arms1 & arms2):
            raise CheckFailure("tripod angles do not split the target")

    def _tri_sum(self, p: Parsed):
        m = re.fullmatch(
            rf"(\S+) = 180 - (\S+) - (\S+) ([<>]=?) 180 - ({_VALUE})"
            rf" - ({_VALUE}) = ({_VALUE})", p.prop)
        if not m:
            raise CheckFailure("malformed triangle-sum line")
        t = self.r.parse_angle(m.group(1))
        a = self.r.parse_angle(m.group(2))
        b = self.r.parse_angle(m.group(3))
        self._triangle_shape(t, a, b)
        up = m.group(4) in ("<", "<=")
        d = "lb" if up else "ub"
        v1, s1 = self.r.get_bound(p.refs[0], d, a)
        v2, s2 = self.r.get_bound(p.refs[1], d, b)
        if v1 != _frac(m.group(5)) or v2 != _frac(m.group(6)):
            raise CheckFailure("cited bounds differ from printed ones")
        settle = _settle_ub if up else _settle_lb
        v, strict = settle(_frac(m.group(7)), 180 - v1 - v2,
                           _ops_strict(m.group(4)), s1 or s2)
        self._store(p, Effect(
            "bounds", bounds={("ub" if up else "lb", t): (v, strict)}))

    def _triangle_shape(self, *angles: Angle):
        pts = {angles[0].apex, angles[0].x, angles[0].y}
        if len(pts) != 3:
            raise CheckFailure("not a triangle")
        apexes = {a.apex for a in angles}
        if apexes != pts or len(angles) != len(apexes):
            raise CheckFailure("angles are not the three triangle angles")
        for a in angles:
            if {a.x, a.y} != pts - {a.apex}:
                raise CheckFailure("angle arms leave the triangle")

    def _side(self, p: Parsed):
        m = re.fullmatch(
            rf"(\S+) > (\S+) (>=?) ({_VALUE})", p.prop)
        if m:
            big = self.r.parse_angle(m.group(1))
            small = self.r.parse_angle(m.group(2))
            self._side_shape(big, small)
            v, s = self.r.get_bound(p.refs[0], "lb", small)
            if v != _frac(m.group(4)) or _ops_strict(m.group(3)) != s:
                raise CheckFailure("cited bound differs from printed one")
            self._store(p, Effect("bounds",
                                  bounds={("lb", big): (v, True)}))
            return
        m = re.fullmatch(
            rf"(\S+) < (\S+) (<=?) ({_VALUE})", p.prop)
        if not m:
            raise CheckFailure("malformed side-comparison line")
        small = self.r.parse_angle(m.group(1))
        big = self.r.parse_angle(m.group(2))
        self._side_shape(big, small)
        v, s = self.r.get_bound(p.refs[0], "ub", big)
        if v != _frac(m.group(4)) or _ops_strict(m.group(3)) != s:
            raise CheckFailure("cited bound differs from printed one")
        self._store(p, Effect("bounds", bounds={("ub", small): (v, True)}))

    def _side_shape(self, big: Angle, small: Angle):
        self._triangle_pair(big, small)
        if not self.r._side_less(small.side, big.side):
            raise CheckFailure(
                "the order does not make the first angle's side longer")

    def _triangle_pair(self, a: Angle, b: Angle):
        pts = {a.apex, a.x, a.y}
        if pts != {b.apex, b.x, b.y} or a.apex == b.apex:
            raise CheckFailure("angles are not two angles of one triangle")

    def _larger(self, p: Parsed):
        m = re.fullmatch(
            rf"(\S+) > \(180 - (\S+)\) / 2 > \(180 - ({_VALUE})\) / 2"
            rf" = ({_VALUE})", p.prop)
        if not m:
            raise CheckFailure("malformed larger-angle line")
        big = self.r.parse_angle(m.group(1))
        third = self.r.parse_angle(m.group(2))
        self._triangle_pair(big, third)
        pts = {big.apex, big.x, big.y}
        partner_apex = (pts - {big.apex, third.apex}).pop()
        rest = sorted(pts - {partner_apex})
        partner = Angle(partner_apex, rest[0], rest[1])
        if not self.r._side_less(partner.side, big.side):
            raise CheckFailure(
                "the order does not make this the larger of the two")
        v1, _s1 = self.r.get_bound(p.refs[0], "ub", third)
        if v1 != _frac(m.group(3)):
            raise CheckFailure("cited bound differs from printed one")
        exact = Fraction(180 - v1, 2)
        # the engine halves in fixed-point arithmetic, rounding down
        scale = 1 << 32
        floored = Fraction((exact.numerator * scale)
                           // exact.denominator, scale)
        printed = _frac(m.group(4))
        if printed not in (exact, floored) or printed < 0:
            raise CheckFailure(
                f"stated value {printed} != recomputed {exact}")
        self._store(p, Effect("bounds",
                              bounds={("lb", big): (printed, True)}))

    # -- fact rules --------------------------------------------------

    def _not(self, p: Parsed):
        prop = p.prop
        m = re.fullmatch(
            r"(\S+ in \S+) since (\S+) \+ (\S+) \+ (\S+) ([<>]) 360", prop)
        if m:
            hull = self.r.parse_hull(m.group(1))
            angles = [self.r.parse_angle(m.group(k)) for k in (2, 3, 4)]
            self._hull_angle_shape(hull, angles)
            low = m.group(5) == "<"
            d = "ub" if low else "lb"
            total = Fraction(0)
            any_strict = False
            for ref, a in zip(p.refs, angles):
                v, s = self.r.get_bound(ref, d, a)
                total += v
                any_strict = any_strict or s
            if low and not (total < 360 or (total == 360 and any_strict)):
                raise CheckFailure("bounds do not force the sum under 360")
            if not low and not (total > 360 or
                                (total == 360 and any_strict)):
                raise CheckFailure("bounds do not force the sum over 360")
            self._store(p, Effect("fact", fact=hull, truth=False))
            return
        m = re.fullmatch(
            r"(\S+) since (\S+) ([<>]) (\S+) \+ (\S+)", prop)
        if m and ":" in m.group(2):
            bet = self.r.parse_between(m.group(1))
            w = self.r.parse_angle(m.group(2))
            p1 = self.r.parse_angle(m.group(4))
            p2 = self.r.parse_angle(m.group(5))
            self._between_shape(bet, w, p1, p2)
            low = m.group(3) == "<"
            if low:
                vw, sw = self.r.get_bound(p.refs[0], "ub", w)
                v1, s1 = self.r.get_bound(p.refs[1], "lb", p1)
                v2, s2 = self.r.get_bound(p.refs[2], "lb", p2)
                if not (vw < v1 + v2 or
                        (vw == v1 + v2 and (sw or s1 or s2))):
                    raise CheckFailure(
                        "bounds do not exclude the angle equality")
            else:
                vw, sw = self.r.get_bound(p.refs[0], "lb", w)
                v1, s1 = self.r.get_bound(p.refs[1], "ub", p1)
                v2, s2 = self.r.get_bound(p.refs[2], "ub", p2)
                if not (vw > v1 + v2 or
                        (vw == v1 + v2 and (sw or s1 or s2))):
                    raise CheckFailure(
                        "bounds do not exclude the angle equality")
            self._store(p, Effect("fact", fact=bet, truth=False))
            return
        m = re.fullmatch(r"(.+?) since (.+)", prop)
        if not m:
            raise CheckFailure("malformed negation line")
        target = self.r.parse_fact(m.group(1))
        source = self.r.parse_fact(m.group(2))
        if len(p.refs) != 1:
            raise CheckFailure("fact negation cites exactly one line")
        self.r.require_fact(p.refs[0], source, True)
        if self._same_family(target, source):
            pass  # exclusivity of placement alternatives
        elif isinstance(target, Between) and isinstance(source, Between) \
                and self._quad_excludes(source, target):
            pass  # quadrilateral consequence
        else:
            raise CheckFailure(
                "stated fact is not excluded by the cited one")
        self._store(p, Effect("fact", fact=target, truth=False))

    def _hull_angle_shape(self, hull: Hull, angles):
        want = {tuple(sorted(p)) for p in
                ((hull.p, hull.q), (hull.p, hull.r), (hull.q, hull.r))}
        got = set()
        for a in angles:
            if a.apex != hull.apex:
                raise CheckFailure("angle apex differs from inner point")
            got.add((a.x, a.y))
        if got != want:
            raise CheckFailure("angles do not cover the three corner pairs")

    def _between_shape(self, bet: Between, w: Angle, p1: Angle, p2: Angle):
        if not (w.apex == p1.apex == p2.apex == bet.apex):
            raise CheckFailure("angle apexes differ from the between apex")
        if {w.x, w.y} != {bet.o1, bet.o2}:
            raise CheckFailure("whole angle does not span the outer arms")
        parts = {frozenset((bet.mid, bet.o1)), frozenset((bet.mid, bet.o2))}
        if {frozenset((p1.x, p1.y)), frozenset((p2.x, p2.y))} != parts:
            raise CheckFailure("part angles do not meet at the middle arm")

    def _family(self, fact):
        if isinstance(fact, Hull):
            return (fact.apex, (fact.p, fact.q, fact.r))
        outers = tuple(sorted({fact.mid, fact.o1, fact.o2}))
        return (fact.apex, outers)

    def _same_family(self, a, b) -> bool:
        return a != b and self._family(a) == self._family(b)

    def _quad_excludes(self, src: Between, tgt: Between) -> bool:
        z, m, x, y = src.apex, src.mid, src.o1, src.o2
        candidates = [
            Between(m, x, *sorted((z, y))),
            Between(m, y, *sorted((z, x))),
            Between(y, z, *sorted((x, m))),
            Between(x, z, *sorted((y, m))),
        ]
        return tgt in candidates

    def _hence(self, p: Parsed):
        fact = self.r.parse_fact(p.prop)
        family = self._family(fact)
        apex, triple = family
        alts = self._family_alts(apex, triple)
        if fact not in alts:
            raise CheckFailure("fact is not a placement alternative")
        others = [f for f in alts if f != fact]
        if len(p.refs) != 3:
            raise CheckFailure("needs the three excluded alternatives")
        remaining = list(others)
        for ref in p.refs:
            hit = None
            for f in remaining:
                if self.r.fact_truth_at(ref, f) is False:
                    hit = f
                    break
            if hit is None:
                raise CheckFailure(
                    f"line {ref} excludes none of the other alternatives")
            remaining.remove(hit)
        if remaining:
            raise CheckFailure("not all other alternatives are excluded")
        self._store(p, Effect("fact", fact=fact, truth=True))

    def _family_alts(self, apex: int, triple) -> list:
        p_, q_, r_ = triple
        return [
            Hull(apex, p_, q_, r_),
            Between(apex, p_, *sorted((q_, r_))),
            Between(apex, q_, *sorted((p_, r_))),
            Between(apex, r_, *sorted((p_, q_))),
        ]

    def _sum(self, p: Parsed):
        m = re.fullmatch(
            rf"(\S+) = (\S+) ([-+]) (\S+) ([<>]=?) ({_VALUE}) [-+]"
            rf" ({_VALUE}) = ({_VALUE})", p.prop)
        if not m:
            raise CheckFailure("malformed between-sum line")
        t = self.r.parse_angle(m.group(1))
        a1 = self.r.parse_angle(m.group(2))
        a2 = self.r.parse_angle(m.group(4))
        plus = m.group(3) == "+"
        op = m.group(5)
        up = op in ("<", "<=")
        bet = self._implied_between(p.refs[0], t, a1, a2, plus)
        if plus:
            d = "ub" if up else "lb"
            v1, s1 = self.r.get_bound(p.refs[1], d, a1)
            v2, s2 = self.r.get_bound(p.refs[2], d, a2)
            v = v1 + v2
        else:
            d1, d2 = ("ub", "lb") if up else ("lb", "ub")
            v1, s1 = self.r.get_bound(p.refs[1], d1, a1)
            v2, s2 = self.r.get_bound(p.refs[2], d2, a2)
            v = v1 - v2
        if v1 != _frac(m.group(6)) or v2 != _frac(m.group(7)):
            raise CheckFailure("cited bounds differ from printed ones")
        settle = _settle_ub if up else _settle_lb
        v, strict = settle(_frac(m.group(8)), v,
                           _ops_strict(op), s1 or s2)
        if not up and v < 0:
            raise CheckFailure("negative lower bound is never an advance")
        self._store(p, Effect(
            "bounds", bounds={("ub" if up else "lb", t): (v, strict)}))

    def _implied_between(self, ref: int, t: Angle, a1: Angle, a2: Angle,
                         plus: bool) -> Between:
        """Validate the angle-split equality and the cited between fact."""
        if plus:
            w, p1, p2 = t, a1, a2
        else:
            w, p1, p2 = a1, t, a2
        if not (w.apex == p1.apex == p2.apex):
            raise CheckFailure("angles do not share an apex")
        arms1, arms2 = {p1.x, p1.y}, {p2.x, p2.y}
        mids = arms1 & arms2
        if len(mids) != 1 or arms1 ^ arms2 != {w.x, w.y}:
            raise CheckFailure("angles do not form a split of the whole")
        mid = mids.pop()
        bet = Between(w.apex, mid, w.x, w.y)
        self.r.require_fact(ref, bet, True)
        return bet

    def _circ(self, p: Parsed):
        m = re.fullmatch(
            rf"(\S+) = 360 - (\S+) - (\S+) ([<>]=?) 360 - ({_VALUE})"
            rf" - ({_VALUE}) = ({_VALUE})", p.prop)
        if not m:
            raise CheckFailure("malformed full-circle line")
        t = self.r.parse_angle(m.group(1))
        a = self.r.parse_angle(m.group(2))
        b = self.r.parse_angle(m.group(3))
        apex = t.apex
        if a.apex != apex or b.apex != apex:
            raise CheckFailure("angles do not share the inner point")
        corners = {t.x, t.y} | {a.x, a.y} | {b.x, b.y}
        if len(corners) != 3:
            raise CheckFailure("angles do not surround a triangle")
        pr, q_, r_ = sorted(corners)
        hull = Hull(apex, pr, q_, r_)
        self._hull_angle_shape(hull, [t, a, b])
        self.r.require_fact(p.refs[0], hull, True)
        up = m.group(4) in ("<", "<=")
        d = "lb" if up else "ub"
        v1, s1 = self.r.get_bound(p.refs[1], d, a)
        v2, s2 = self.r.get_bound(p.refs[2], d, b)
        if v1 != _frac(m.group(5)) or v2 != _frac(m.group(6)):
            raise CheckFailure("cited bounds differ from printed ones")
        settle = _settle_ub if up else _settle_lb
        v, strict = settle(_frac(m.group(7)), 360 - v1 - v2,
                           _ops_strict(m.group(4)), s1 or s2)
        self._store(p, Effect(
            "bounds", bounds={("ub" if up else "lb", t): (v, strict)}))

    def _new_sum(self, p: Parsed):
        m = re.fullmatch(
            r"(\S+) since ([a-z]{2}) diag in ([a-z]{4})", p.prop)
        if not m:
            raise CheckFailure("malformed quadrilateral line")
        target = self.r.parse_between(m.group(1))
        diag = {self.r.pt(c) for c in m.group(2)}
        quad = [self.r.pt(c) for c in m.group(3)]
        if len(set(quad)) != 4:
            raise CheckFailure("quadrilateral letters repeat")
        apex, z, other, w = quad
        if {z, w} != diag:
            raise CheckFailure("named diagonal is not the quad diagonal")
        prem1 = Between(z, w, *sorted((apex, other)))
        prem2 = Between(w, z, *sorted((apex, other)))
        if target != Between(apex, other, *sorted((z, w))):
            raise CheckFailure("conclusion does not match the quad")
        if len(p.refs) != 2:
            raise CheckFailure("needs the two crossing premises")
        try:
            self.r.require_fact(p.refs[0], prem1, True)
            self.r.require_fact(p.refs[1], prem2, True)
        except CheckFailure:
            self.r.require_fact(p.refs[0], prem2, True)
            self.r.require_fact(p.refs[1], prem1, True)
        self._store(p, Effect("fact", fact=target, truth=True))

    def _new_circ(self, p: Parsed):
        m = re.fullmatch(r"(\S+ in \S+) since (\S+) and (\S+)", p.prop)
        if not m:
            raise CheckFailure("malformed containment line")
        hull = self.r.parse_hull(m.group(1))
        b1 = self.r.parse_between(m.group(2))
        b2 = self.r.parse_between(m.group(3))
        w = hull.apex
        if b1.mid != w or b2.mid != w:
            raise CheckFailure("premises do not share the inner point as"
                               " middle arm")
        if b2.apex not in (b1.o1, b1.o2) or b1.apex not in (b2.o1, b2.o2):
            raise CheckFailure("premise apexes do not cross")
        pts = {b1.apex, b1.o1, b1.o2}
        if {b2.apex, b2.o1, b2.o2} != pts:
            raise CheckFailure("premises do not range over the same"
                               " three corners")
        if {hull.p, hull.q, hull.r} != pts:
            raise CheckFailure("containment corners differ from premises")
        self.r.require_fact(p.refs[0], b1, True)
        self.r.require_fact(p.refs[1], b2, True)
        self._store(p, Effect("fact", fact=hull, truth=True))

    # -- structure ---------------------------------------------------

    def _open_split(self, p: Parsed):
        apex = self.r.pt(p.marker_points[0])
        triple = tuple(sorted(self.r.pt(c) for c in p.marker_points[1:]))
        if len({apex, *triple}) != 4:
            raise CheckFailure("case analysis points are not distinct")
        alts = self._family_alts(apex, triple)
        open_alts = []
        for f in alts:
            if self._visible_truth(f) is None:
                open_alts.append(f)
        if len(open_alts) < 2:
            raise CheckFailure(
                "case analysis over fewer than two open alternatives")
        self.r.splits.append({
            "apex": apex, "triple": triple, "open": open_alts,
            "cases": [], "case_closed": [], "frame": None,
            "depth_frames": list(self.r.frames),
        })

    def _case(self, p: Parsed):
        m = _CASE_RE.fullmatch(p.prop)
        if not m:
            raise CheckFailure("malformed case assumption")
        ordinal = _ROMANS.get(m.group(1))
        if ordinal is None:
            raise CheckFailure(f"bad case numeral {m.group(1)!r}")
        fact = self.r.parse_fact(m.group(2))
        # unwind to the split this ordinal belongs to
        while self.r.splits:
            split = self.r.splits[-1]
            if ordinal == len(split["cases"]) + 1:
                break
            self._pop_incomplete_split()
        else:
            raise CheckFailure("case assumption outside any case analysis")
        split = self.r.splits[-1]
        if split["cases"]:
            self._end_case(split, closed=None)
        if fact not in split["open"] or fact in split["cases"]:
            raise CheckFailure(
                "assumed fact is not an untried open alternative")
        split["cases"].append(fact)
        frame = self._next_frame()
        self.r.frames.append(frame)
        split["frame"] = frame
        self.r.effects[p.number] = Effect("fact", fact=fact, truth=True)
        self.r.frame_of[p.number] = frame
        split["case_closed"].append(False)

    def _next_frame(self) -> int:
        fid = self.r._next_frame
        self.r._next_frame += 1
        return fid

    def _end_case(self, split, closed: Optional[bool]):
        """Leave the currently open case of `split` (if any)."""
        if split["frame"] is not None:
            if self.r.frames and self.r.frames[-1] == split["frame"]:
                self.r.frames.pop()
            split["frame"] = None
            if closed is not None and split["case_closed"]:
                split["case_closed"][-1] = closed

    def _pop_incomplete_split(self):
        split = self.r.splits.pop()
        self._end_case(split, closed=None)

    def _open_line(self, p: Parsed):
        self._store(p, Effect("none"))

    def _contradiction(self, p: Parsed):
        refs = p.refs
        if len(refs) == 2:
            self._check_clash(refs)
        elif len(refs) == 4:
            self._check_exhaust(refs)
        else:
            raise CheckFailure("contradiction cites two or four lines")
        self._store(p, Effect("none"))
        self._close_current_branch()

    def _close_current_branch(self):
        if not self.r.splits or self.r.splits[-1]["frame"] is None:
            # contradiction in the trunk of the current branch level
            if self.r.splits:
                raise CheckFailure(
                    "contradiction outside any case of the open analysis")
            self.r.root_closed = True
            return
        split = self.r.splits[-1]
        self._end_case(split, closed=True)
        split["case_closed"][-1] = True

    def _visible_truth(self, fact) -> Optional[bool]:
        for line, eff in self.r.effects.items():
            if not self.r._visible(line):
                continue
            if eff.kind == "fact" and eff.fact == fact:
                return eff.truth
            if eff.kind == "boundary" and isinstance(fact, Hull) \
                    and fact.apex in eff.boundary:
                return False
        return None

    def _check_clash(self, refs):
        l1, l2 = refs
        for a, b in ((l1, l2), (l2, l1)):
            if not (self.r._visible(a) and self.r._visible(b)):
                raise CheckFailure("cited line out of scope")
            ea = self.r.effects.get(a)
            eb = self.r.effects.get(b)
            if ea is None or eb is None:
                raise CheckFailure("cited line unknown")
            # fact vs fact
            if ea.kind == "fact" and eb.kind == "fact" \
                    and ea.fact == eb.fact and ea.truth != eb.truth:
                return
            # containment vs boundary
            if ea.kind == "fact" and isinstance(ea.fact, Hull) \
                    and ea.truth and eb.kind == "boundary" \
                    and ea.fact.apex in eb.boundary:
                return
            # bound clash: some angle with empty interval
            if ea.kind == "bounds" and eb.kind == "bounds":
                for (d1, ang), (v1, s1) in ea.bounds.items():
                    if d1 != "ub":
                        continue
                    got = eb.bounds.get(("lb", ang))
                    if got is None:
                        continue
                    v2, s2 = got
                    if v1 < v2 or (v1 == v2 and (s1 or s2)):
                        return
        raise CheckFailure("cited lines do not clash")

    def _check_exhaust(self, refs):
        facts_false = []
        for line in refs:
            if not self.r._visible(line):
                raise CheckFailure("cited line out of scope")
            eff = self.r.effects.get(line)
            if eff is None:
                raise CheckFailure("cited line unknown")
            facts_false.append(eff)
        # the four cited lines must deny the four alternatives of one family
        families = set()
        denied = []
        for eff in facts_false:
            if eff.kind == "fact" and eff.truth is False:
                denied.append(eff.fact)
                families.add(self._family(eff.fact))
            elif eff.kind == "boundary":
                denied.append(eff)
            else:
                raise CheckFailure("cited line denies nothing")
        real = [f for f in denied if not isinstance(f, Effect)]
        if not real:
            raise CheckFailure("no concrete alternative denied")
        if len(families) != 1:
            raise CheckFailure("denied facts span several placements")
        apex, triple = families.pop()
        alts = self._family_alts(apex, triple)
        for alt in alts:
            ok = any(
                (not isinstance(f, Effect) and f == alt) or
                (isinstance(f, Effect) and isinstance(alt, Hull)
                 and alt.apex in f.boundary)
                for f in denied)
            if not ok:
                raise CheckFailure(
                    "cited lines leave a placement alternative open")

    def _close_split(self, p: Parsed):
        word = {"one": 1, "two": 2, "three": 3, "four": 4}.get(p.prop)
        if not self.r.splits:
            raise CheckFailure("closing marker outside any case analysis")
        split = self.r.splits[-1]
        self._end_case(split, closed=None)
        if word is None or word != len(split["cases"]):
            raise CheckFailure("closing marker count mismatch")
        if len(split["cases"]) != len(split["open"]):
            raise CheckFailure(
                "case analysis did not try every open alternative")
        if not all(split["case_closed"]):
            raise CheckFailure("closing marker with an unclosed case")
        self.r.splits.pop()
        # a completed analysis refutes its enclosing branch
        self._close_current_branch()


def check_proof(text: str) -> CheckResult:
    """Replay a rendered transcript; see module docstring."""
    try:
        order, extremal, labels, parsed = parse_proof(text)
    except CheckFailure as exc:
        return CheckResult(False, False, 0, str(exc))
    return _Checker(order, extremal, labels, parsed).run()


__all__ = ["CheckResult", "CheckFailure", "check_proof", "parse_proof"]
