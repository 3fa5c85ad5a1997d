"""Refutation search: saturate, then case-split on placement alternatives.

prove() runs interval/fact propagation to a fixpoint; if no
contradiction surfaces it picks an apex/triple whose open placement
alternatives look most refutable (greedy lookahead: one propagation
probe per alternative, ties broken by enumeration order, which lists
apexes ascending and triples lexicographically) and recurses into each
open alternative up to `max_depth` nested splits.  The order is
Refuted only if every branch of the chosen analysis closes; exhausted
depth or line budget always reports Unknown, never Refuted.

The numeric derivation log is written during the search itself (the
scoring probes scribble into scratch rows that the kept branches later
overwrite), and the rows belonging to the returned derivation tree are
copied out into the result.  Rendering them as a transcript is done
lazily, so bulk soundness sweeps never pay for string work.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import InvalidInputError
from ..orders import EdgeOrder
from . import kernel as K
from .state import ConstraintMode, ConstraintState, init_state

REFUTED = "refuted"
UNKNOWN = "unknown"

_CASE_ORDER = (1, 2, 3, 0)  # middles by ascending point, containment last


@dataclass
class LeafNode:
    """End of a branch: either a contradiction or an open end."""

    start: int
    end: int
    closed: bool
    reason: Optional[str] = None  # set when open


@dataclass
class CaseBranch:
    alt: int            # column in the alternatives row (0 = containment)
    case_line: int      # line number of the assumption
    node: "ProofNode"


@dataclass
class SplitNode:
    """A completed case analysis over one apex/triple."""

    start: int
    end: int
    split_at: int       # first line of the case analysis
    alts_row: int       # row index into tables.hull_alts
    cases: list = field(default_factory=list)

    @property
    def closed(self) -> bool:
        return all(c.node.closed for c in self.cases)


ProofNode = object  # LeafNode | SplitNode


def _open_reason(status: str) -> str:
    if status == "line-limit":
        return "line limit exhausted"
    if status == "pass-limit":
        return "propagation pass limit exhausted"
    return "no contradiction found"


def _emit_row(st: ConstraintState, rule: int, f1: int, f2: int, f3: int,
              f4: int, value: int, strict: int, r1: int, r2: int, r3: int
              ) -> Optional[int]:
    """Append one row from the driver side; None when the log is full."""
    row = st.next_line - st.base
    if row >= st.log.shape[0]:
        return None
    st.log[row] = (rule, f1, f2, f3, f4, value, strict, r1, r2, r3)
    line = st.next_line
    st.next_line += 1
    return line


def _assert_case(st: ConstraintState, alts_row: int, alt: int, ordinal: int
                 ) -> tuple:
    """Assume one placement alternative; returns (case_line|None, closed)."""
    row = st.tables.hull_alts[alts_row]
    if alt == 0:
        idx, kind = int(row[0]), K.KIND_HULL
    else:
        idx, kind = int(row[alt]), K.KIND_BETWEEN
    line = _emit_row(st, K.CASE, idx, kind, alts_row, ordinal, 0, 0,
                     -1, -1, -1)
    if line is None:
        return None, False
    if kind == K.KIND_HULL:
        st.hst[idx] = K.TRUE
        st.hln[idx] = line
        apex = int(st.hapex[idx])
        if st.obd[apex]:
            _emit_row(st, K.CONTRA_BOUNDARY, apex, idx, 0, 0, 0, 0,
                      line, int(st.obl[apex]), -1)
            return line, True
    else:
        st.bst[idx] = K.TRUE
        st.bln[idx] = line
    return line, False


def _open_alts(st: ConstraintState, alts_row: int) -> list:
    row = st.tables.hull_alts[alts_row]
    out = []
    for alt in _CASE_ORDER:
        state = st.hst[row[0]] if alt == 0 else st.bst[row[alt]]
        if state == K.UNKNOWN:
            out.append(alt)
    return out


def _search(st: ConstraintState, depth: int, status: str, start: int,
            lookahead: bool = True) -> ProofNode:
    """Resolve the branch whose state is `st` (already propagated).

    `start` is the line number at which this branch's content began,
    i.e. before the propagation that produced `status`.
    """
    if status == "contradiction":
        return LeafNode(start, st.next_line, True)
    if status in ("line-limit", "pass-limit"):
        return LeafNode(start, st.next_line, False, _open_reason(status))

    candidates = [i for i in range(len(st.tables.hull_alts))
                  if len(_open_alts(st, i)) >= 2]
    if depth <= 0 or not candidates:
        reason = ("case depth exhausted" if candidates
                  else "no open case analysis remains")
        _emit_row(st, K.OPEN, 0, 0, 0, 0, 0, 0, -1, -1, -1)
        return LeafNode(start, st.next_line, False, reason)

    if not lookahead:
        best_row = candidates[0]
        best_open = _open_alts(st, best_row)
    else:
        # greedy lookahead: score candidates by immediately-closed branches
        best_row = -1
        best_score = -1
        best_open = []
        for i in candidates:
            alts = _open_alts(st, i)
            score = 0
            for ordinal, alt in enumerate(alts):
                probe = st.copy()
                _, closed = _assert_case(probe, i, alt, ordinal)
                if not closed:
                    closed = probe.propagate() == "contradiction"
                if closed:
                    score += 1
            if score > best_score:
                best_score = score
                best_row = i
                best_open = alts
            if score == len(alts):
                break  # fully refutable analysis; no better score exists

    split = SplitNode(start, st.next_line, st.next_line, best_row)
    for ordinal, alt in enumerate(best_open):
        branch = st.copy()
        branch.next_line = split.end
        case_line, closed = _assert_case(branch, best_row, alt, ordinal)
        if case_line is None:
            node: ProofNode = LeafNode(split.end, split.end, False,
                                       "line limit exhausted")
            split.cases.append(CaseBranch(alt, -1, node))
            continue
        if closed:
            node = LeafNode(case_line + 1, branch.next_line, True)
        else:
            branch_status = branch.propagate()
            node = _search(branch, depth - 1, branch_status, case_line + 1,
                           lookahead)
        split.cases.append(CaseBranch(alt, case_line, node))
        split.end = node.end
    return split


@dataclass
class ProofResult:
    """Outcome of a refutation attempt, with a lazily rendered log."""

    verdict: str                      # "refuted" | "unknown"
    order: EdgeOrder
    mode: ConstraintMode
    max_depth: int
    max_lines: int
    reason: Optional[str]             # why unknown, else None
    seed_groups: tuple
    records: np.ndarray               # numeric rows for lines base..end-1
    base: int                         # line number of records[0]
    tree: ProofNode

    @property
    def refuted(self) -> bool:
        return self.verdict == REFUTED

    @property
    def line_count(self) -> int:
        return self.base - 1 + len(self.records)

    @property
    def log(self):
        from .render import build_log
        return build_log(self)

    def render(self) -> str:
        from .render import render_proof
        return render_proof(self)


def _collect_reason(node: ProofNode) -> Optional[str]:
    if isinstance(node, LeafNode):
        return None if node.closed else node.reason
    reasons = [_collect_reason(c.node) for c in node.cases]
    reasons = [r for r in reasons if r]
    if not reasons:
        return None
    for pref in ("line limit exhausted", "case depth exhausted"):
        if pref in reasons:
            return pref
    return reasons[0]


def _tree_end(node: ProofNode) -> int:
    return node.end


def prove(order: EdgeOrder, mode=ConstraintMode.FULL_ORDER, *,
          max_depth: int = 3, max_lines: int = 10000,
          pass_cap: int = 64, lookahead: bool = True) -> ProofResult:
    """Try to refute planar realizability of an edge order.

    Returns Refuted only on a complete derivation tree in which every
    branch reaches a contradiction; all budget exhaustion (case depth,
    derivation lines, propagation passes) yields Unknown.  `lookahead`
    controls split selection only: with it off the first eligible case
    analysis is used, which is much faster per call but tends to give
    longer proofs; soundness and the Refuted/Unknown meaning are
    unaffected.
    """
    if max_depth < 0:
        raise InvalidInputError("max_depth must be >= 0")
    if max_lines < 1:
        raise InvalidInputError("max_lines must be >= 1")
    mode = ConstraintMode.coerce(mode)
    st = init_state(order, mode, max_lines=max_lines, pass_cap=pass_cap)
    trunk_start = st.next_line
    status = st.propagate()
    tree = _search(st, max_depth, status, trunk_start, lookahead)
    end = _tree_end(tree)
    records = st.log[: end - st.base].copy()
    closed = tree.closed
    reason = None if closed else (_collect_reason(tree)
                                  or "no contradiction found")
    return ProofResult(
        verdict=REFUTED if closed else UNKNOWN,
        order=order, mode=mode, max_depth=max_depth, max_lines=max_lines,
        reason=reason, seed_groups=st.seed_groups,
        records=records, base=st.base, tree=tree)


__all__ = ["REFUTED", "UNKNOWN", "LeafNode", "SplitNode", "CaseBranch",
           "ProofResult", "prove"]
