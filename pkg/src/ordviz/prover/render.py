"""Transcript rendering for refutation derivations.

The derivation log is numeric (one int64 row per accepted line); this
module decodes it into a monospaced, human-readable transcript:
numbered lines with a rule-tag column, a proposition, and the line
numbers each step follows from, with case analyses as indented blocks
under "(i) ASSUMING ..." headers.

Notation (also stated in the transcript legend): points are letters,
``xy`` names a segment, ``x:yz`` the angle at ``x`` in triangle
``xyz``, ``x:yzw`` the claim that ``x:yz = x:yw + x:wz`` (the middle
letter is the angularly-between one), and ``x in yzw`` the claim that
``x`` lies inside triangle ``yzw``.  Numeric bounds are exact degree
values, printed as integers or fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..errors import InvalidInputError
from ..orders import EdgeOrder
from ..metric import index_pair
from . import kernel as K
from .geometry import build_tables
from .search import CaseBranch, LeafNode, ProofResult, SplitNode
from .state import ConstraintMode, SeedGroup

_LETTERS = "abcdefghijklmnopqrstuvwxyz"
_ROMANS = ("i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x")
_WORDS = {1: "one", 2: "two", 3: "three", 4: "four"}

_SEED_TAGS = {"smallest": "smallest", "dominated": "dominated",
              "largest": "largest", "boundary": "on bndry"}
_SEED_VALUES = {"smallest": ("ub", K.D60), "dominated": ("ub", K.D90),
                "largest": ("lb", K.D60)}


def point_labels(n: int) -> tuple:
    if n > len(_LETTERS):
        raise InvalidInputError(
            f"transcripts support at most {len(_LETTERS)} points, got {n}")
    return tuple(_LETTERS[:n])


def _fmt_degrees(scaled: int) -> str:
    f = Fraction(int(scaled), K.ONE)
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


@dataclass(frozen=True)
class ProofLine:
    """One transcript line; markers carry no number."""

    number: Optional[int]
    tag: str
    proposition: str
    refs: tuple
    depth: int
    kind: str  # "seed" | "derived" | "case" | "contradiction" | "open"
    #          | "analysis" | "trailer"


@dataclass(frozen=True)
class ProofLog:
    """Structured transcript: header metadata plus ordered lines."""

    order: EdgeOrder
    mode: ConstraintMode
    verdict: str
    labels: tuple
    lines: tuple

    @property
    def line_count(self) -> int:
        return sum(1 for l in self.lines if l.number is not None)


class _Decoder:
    """Turns numeric records into ProofLine objects."""

    def __init__(self, result: ProofResult):
        self.res = result
        self.n = result.order.n
        self.labels = point_labels(self.n)
        self.tables = build_tables(self.n)
        self.records = result.records
        self.base = result.base
        self.seed_groups = {g.line: g for g in result.seed_groups}

    # -- tokens ------------------------------------------------------

    def seg(self, pair_idx: int) -> str:
        i, j = index_pair(self.n, int(pair_idx))
        return self.labels[i] + self.labels[j]

    def ang(self, a: int) -> str:
        z, x, y = self.tables.angle_points[int(a)]
        return f"{self.labels[z]}:{self.labels[x]}{self.labels[y]}"

    def bet(self, b: int) -> str:
        z, m, o1, o2 = self.tables.between_points[int(b)]
        return (f"{self.labels[z]}:{self.labels[o1]}{self.labels[m]}"
                f"{self.labels[o2]}")

    def hull(self, h: int) -> str:
        z, p, q, r = self.tables.hull_points[int(h)]
        return (f"{self.labels[z]} in "
                f"{self.labels[p]}{self.labels[q]}{self.labels[r]}")

    def fact(self, idx: int, kind: int) -> str:
        return self.hull(idx) if kind == K.KIND_HULL else self.bet(idx)

    # -- cited-value resolution -------------------------------------

    def cited(self, line: int, want: str) -> tuple:
        """(scaled value, strict) that cited `line` contributes for
        bound direction `want` ('ub' or 'lb')."""
        line = int(line)
        if line == 0:
            return (K.D180, 0) if want == "ub" else (0, 0)
        group = self.seed_groups.get(line)
        if group is not None:
            direction, value = _SEED_VALUES[group.tag]
            if direction != want:
                raise InvalidInputError(
                    f"line {line} provides no {want} bound")
            return (value, 1)
        row = self.records[line - self.base]
        return (int(row[5]), int(row[6]))

    # -- line decoding ----------------------------------------------

    def decode(self, line_no: int, depth: int) -> ProofLine:
        row = self.records[line_no - self.base]
        rule = int(row[0])
        f1, f2, f3, f4 = (int(row[1]), int(row[2]), int(row[3]), int(row[4]))
        value, strict = int(row[5]), int(row[6])
        refs = tuple(int(r) for r in (row[7], row[8], row[9]) if r >= 0)

        def mk(tag, prop, kind="derived", use_refs=refs):
            return ProofLine(line_no, tag, prop, use_refs, depth, kind)

        lt = "<" if strict else "<="
        gt = ">" if strict else ">="

        if rule == K.TRIPOD_UB:
            v1, _ = self.cited(refs[0], "ub")
            v2, _ = self.cited(refs[1], "ub")
            return mk("tripod",
                      f"{self.ang(f1)} <= {self.ang(f2)} + {self.ang(f3)}"
                      f" {lt} {_fmt_degrees(v1)} + {_fmt_degrees(v2)}"
                      f" = {_fmt_degrees(value)}")
        if rule == K.TRIPOD_LB:
            v1, _ = self.cited(refs[0], "lb")
            v2, _ = self.cited(refs[1], "ub")
            return mk("tripod",
                      f"{self.ang(f1)} {gt} {self.ang(f2)} - {self.ang(f3)}"
                      f" {gt} {_fmt_degrees(v1)} - {_fmt_degrees(v2)}"
                      f" = {_fmt_degrees(value)}")
        if rule == K.ANGSUM_UB:
            v1, _ = self.cited(refs[0], "lb")
            v2, _ = self.cited(refs[1], "lb")
            return mk("tri sum",
                      f"{self.ang(f1)} = 180 - {self.ang(f2)} - {self.ang(f3)}"
                      f" {lt} 180 - {_fmt_degrees(v1)} - {_fmt_degrees(v2)}"
                      f" = {_fmt_degrees(value)}")
        if rule == K.ANGSUM_LB:
            v1, _ = self.cited(refs[0], "ub")
            v2, _ = self.cited(refs[1], "ub")
            return mk("tri sum",
                      f"{self.ang(f1)} = 180 - {self.ang(f2)} - {self.ang(f3)}"
                      f" {gt} 180 - {_fmt_degrees(v1)} - {_fmt_degrees(v2)}"
                      f" = {_fmt_degrees(value)}")
        if rule == K.SIDE_LB:
            return mk("side",
                      f"{self.ang(f1)} > {self.ang(f2)} "
                      f"{'>' if self.cited(refs[0], 'lb')[1] else '>='} "
                      f"{_fmt_degrees(value)}")
        if rule == K.SIDE_UB:
            return mk("side",
                      f"{self.ang(f1)} < {self.ang(f2)} "
                      f"{'<' if self.cited(refs[0], 'ub')[1] else '<='} "
                      f"{_fmt_degrees(value)}")
        if rule == K.LARGER:
            v1, _ = self.cited(refs[0], "ub")
            return mk("larger",
                      f"{self.ang(f1)} > (180 - {self.ang(f2)}) / 2"
                      f" > (180 - {_fmt_degrees(v1)}) / 2"
                      f" = {_fmt_degrees(value)}")
        if rule == K.HULLNOT_LOW:
            return mk("not",
                      f"{self.hull(f1)} since {self.ang(f2)} + {self.ang(f3)}"
                      f" + {self.ang(f4)} < 360")
        if rule == K.HULLNOT_HIGH:
            return mk("not",
                      f"{self.hull(f1)} since {self.ang(f2)} + {self.ang(f3)}"
                      f" + {self.ang(f4)} > 360")
        if rule == K.CIRC_UB:
            v1, _ = self.cited(refs[1], "lb")
            v2, _ = self.cited(refs[2], "lb")
            return mk("circ",
                      f"{self.ang(f1)} = 360 - {self.ang(f3)} - {self.ang(f4)}"
                      f" {lt} 360 - {_fmt_degrees(v1)} - {_fmt_degrees(v2)}"
                      f" = {_fmt_degrees(value)}")
        if rule == K.CIRC_LB:
            v1, _ = self.cited(refs[1], "ub")
            v2, _ = self.cited(refs[2], "ub")
            return mk("circ",
                      f"{self.ang(f1)} = 360 - {self.ang(f3)} - {self.ang(f4)}"
                      f" {gt} 360 - {_fmt_degrees(v1)} - {_fmt_degrees(v2)}"
                      f" = {_fmt_degrees(value)}")
        if rule == K.NOTBTW_LOW:
            return mk("not",
                      f"{self.bet(f1)} since {self.ang(f2)} < {self.ang(f3)}"
                      f" + {self.ang(f4)}")
        if rule == K.NOTBTW_HIGH:
            return mk("not",
                      f"{self.bet(f1)} since {self.ang(f2)} > {self.ang(f3)}"
                      f" + {self.ang(f4)}")
        if rule == K.BTW_WHOLE_UB:
            v1, _ = self.cited(refs[1], "ub")
            v2, _ = self.cited(refs[2], "ub")
            return mk("sum",
                      f"{self.ang(f1)} = {self.ang(f3)} + {self.ang(f4)}"
                      f" {lt} {_fmt_degrees(v1)} + {_fmt_degrees(v2)}"
                      f" = {_fmt_degrees(value)}")
        if rule == K.BTW_WHOLE_LB:
            v1, _ = self.cited(refs[1], "lb")
            v2, _ = self.cited(refs[2], "lb")
            return mk("sum",
                      f"{self.ang(f1)} = {self.ang(f3)} + {self.ang(f4)}"
                      f" {gt} {_fmt_degrees(v1)} + {_fmt_degrees(v2)}"
                      f" = {_fmt_degrees(value)}")
        if rule == K.BTW_PART_UB:
            v1, _ = self.cited(refs[1], "ub")
            v2, _ = self.cited(refs[2], "lb")
            return mk("sum",
                      f"{self.ang(f1)} = {self.ang(f3)} - {self.ang(f4)}"
                      f" {lt} {_fmt_degrees(v1)} - {_fmt_degrees(v2)}"
                      f" = {_fmt_degrees(value)}")
        if rule == K.BTW_PART_LB:
            v1, _ = self.cited(refs[1], "lb")
            v2, _ = self.cited(refs[2], "ub")
            return mk("sum",
                      f"{self.ang(f1)} = {self.ang(f3)} - {self.ang(f4)}"
                      f" {gt} {_fmt_degrees(v1)} - {_fmt_degrees(v2)}"
                      f" = {_fmt_degrees(value)}")
        if rule == K.EXCL:
            return mk("not", f"{self.fact(f1, f2)} since {self.fact(f3, f4)}")
        if rule == K.HENCE:
            return mk("hence", self.fact(f1, f2))
        if rule in (K.Q_MID_A, K.Q_MID_B, K.Q_OUTER_A, K.Q_OUTER_B):
            return mk("not", f"{self.bet(f1)} since {self.bet(f2)}")
        if rule in (K.CROSS_A, K.CROSS_B):
            z, w, x, y = self.tables.between_points[int(f2)]
            diag = "".join(sorted((self.labels[z], self.labels[w])))
            apex, other = (y, x) if rule == K.CROSS_A else (x, y)
            quad = (self.labels[apex] + self.labels[z] + self.labels[other]
                    + self.labels[w])
            return mk("new sum",
                      f"{self.bet(f1)} since {diag} diag in {quad}")
        if rule == K.CONTAIN:
            return mk("new circ",
                      f"{self.hull(f1)} since {self.bet(f2)}"
                      f" and {self.bet(f3)}")
        if rule == K.CASE:
            roman = _ROMANS[f4] if f4 < len(_ROMANS) else str(f4 + 1)
            return mk("", f"({roman}) ASSUMING {self.fact(f1, f2)}...",
                      kind="case", use_refs=())
        if rule == K.OPEN:
            return mk("open", "no contradiction found within limits",
                      kind="open", use_refs=())
        if rule in (K.CONTRA_FACT, K.CONTRA_EMPTY, K.CONTRA_BOUNDARY):
            return mk("contradiction!", "", kind="contradiction")
        if rule == K.CONTRA_EXHAUST:
            all_refs = tuple(int(r) for r in (row[7], f2, f3, f4) if r >= 0)
            return mk("contradiction!", "", kind="contradiction",
                      use_refs=all_refs)
        raise InvalidInputError(f"unknown rule id {rule} at line {line_no}")

    # -- seed lines --------------------------------------------------

    def seed_line(self, group: SeedGroup) -> ProofLine:
        tag = _SEED_TAGS[group.tag]
        if group.tag == "boundary":
            prop = (",".join(self.labels[z] for z in group.members)
                    + " since in fn image")
        else:
            toks = ", ".join(self.ang(a) for a in group.members)
            rel = "> 60" if group.tag == "largest" else (
                "< 60" if group.tag == "smallest" else "< 90")
            prop = f"{toks} {rel}"
        return ProofLine(group.line, tag, prop, (), 0, "seed")


def build_log(result: ProofResult) -> ProofLog:
    """Decode a proof result into a structured transcript."""
    dec = _Decoder(result)
    lines: list = []
    for group in result.seed_groups:
        lines.append(dec.seed_line(group))

    def walk(node, depth):
        if isinstance(node, LeafNode):
            for ln in range(node.start, node.end):
                lines.append(dec.decode(ln, depth))
            return
        assert isinstance(node, SplitNode)
        for ln in range(node.start, node.split_at):
            lines.append(dec.decode(ln, depth))
        h = int(dec.tables.hull_alts[node.alts_row][0])
        z, p, q, r = (int(v) for v in dec.tables.hull_points[h])
        L = dec.labels
        lines.append(ProofLine(
            None, "", f"CASE ANALYSIS using points {L[z]},{L[p]}{L[q]}{L[r]}:",
            (), depth, "analysis"))
        for case in node.cases:
            if case.case_line >= 0:
                lines.append(dec.decode(case.case_line, depth))
            walk(case.node, depth + 1)
        if node.closed:
            word = _WORDS.get(len(node.cases), str(len(node.cases)))
            lines.append(ProofLine(
                None, "", f"CONTRADICTION in all {word} cases!",
                (), depth, "trailer"))

    walk(result.tree, 0)
    return ProofLog(order=result.order, mode=result.mode,
                    verdict=result.verdict, labels=dec.labels,
                    lines=tuple(lines))


def _order_phrase(order: EdgeOrder, labels) -> str:
    toks = []
    for i, j in order.pairs_by_rank():
        toks.append(labels[i] + labels[j])
    return " < ".join(toks)


def render_proof(source) -> str:
    """Render a ProofResult or ProofLog as transcript text."""
    log = source.log if isinstance(source, ProofResult) else source
    labels = log.labels
    mode_line = ("using extremal neighbour comparisons only"
                 if log.mode is ConstraintMode.EXTREMAL_ONLY
                 else "using the full distance order")
    out = []
    out.append("refutation attempt for edge order "
               f"{_order_phrase(log.order, labels)}")
    out.append(f" {mode_line}")
    out.append("")
    out.append(f"legend: points are labeled {','.join(labels)}")
    out.append(" xy is a segment, xyz is a triangle,"
               " x:yz is the angle in xyz at vertex x")
    out.append(" x:yzw means that x:yz = x:yw + x:wz,"
               " x in yzw means x lies inside triangle yzw")
    out.append("")
    width = max((len(str(l.number)) for l in log.lines
                 if l.number is not None), default=1) + 1
    tag_w = 14
    header = f"{'line':<{width + 1}} {'type':<{tag_w}} proposition"
    out.append(header + "  [follows from]")
    for line in log.lines:
        indent = "  " * line.depth
        if line.number is None:
            out.append("")
            out.append(f"{indent}{line.proposition}")
            if line.kind == "analysis":
                out.append("")
            continue
        refs = "".join(f"{r}." for r in line.refs)
        no = f"{line.number}."
        body = f"{no:<{width + 1}} {line.tag:<{tag_w}} {indent}{line.proposition}"
        out.append(f"{body}  {refs}".rstrip())
    return "\n".join(out) + "\n"


__all__ = ["ProofLine", "ProofLog", "build_log", "render_proof",
           "point_labels"]
