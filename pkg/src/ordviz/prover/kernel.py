"""The angle-inference engine: monotone interval/fact propagation.

One implementation serves both the fast search path and transcript
production: every accepted derivation is appended to a numeric log
(one int64 row per line); the renderer turns rows into transcript
lines afterwards, so search speed never depends on string work.

Arithmetic is exact: bounds are degrees scaled by 2**32, all rule
outputs are sums/differences plus one halving rule.  A halving of an
odd scaled value (which in practice never happens - it would need a
chain of 32 halvings) rounds the bound in the weaker direction, so
every stored bound remains valid.

Rules (sweep order is fixed and part of the engine's determinism):
- placement alternatives: for an apex z and triple {p,q,r}, exactly one
  holds of: z inside pqr, or one of p,q,r angularly between the other
  two as seen from z.  One true forces the others false; three false
  force the fourth true; four false is a contradiction.
- hull angle sum: the three angles at an interior point sum to 360;
  used contrapositively (sum provably != 360 refutes containment) and
  as an equality once containment is asserted.
- between sums: an established between fact is an exact angle equality
  and propagates bounds in all six directions; while unresolved, bound
  windows that make the equality impossible refute it.
- quadrilateral schemata: a between fact, alone or paired with a
  crossing one, forces between/containment facts at the other corners.
- tripod: angle(x,y) <= angle(x,m) + angle(m,y) at a common apex.
- triangle: angles sum to 180; a strictly longer side faces a strictly
  larger angle; and the larger of two angles is above half of what the
  third leaves (the one rule that halves).
Each accepted update immediately checks for an empty interval or a
fact clash, so contradictions surface mid-pass.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(**_kwargs):
        def wrap(fn):
            return fn
        return wrap

SCALE_BITS = 32
ONE = 1 << SCALE_BITS
D60 = 60 * ONE
D90 = 90 * ONE
D180 = 180 * ONE
D360 = 360 * ONE

# fact states
UNKNOWN, TRUE, FALSE = 0, 1, 2

# rule ids (log row column 0)
TRIPOD_UB, TRIPOD_LB = 10, 11
ANGSUM_UB, ANGSUM_LB = 20, 21
SIDE_LB, SIDE_UB, LARGER = 22, 23, 24
HULLNOT_LOW, HULLNOT_HIGH = 30, 31
CIRC_UB, CIRC_LB = 32, 33
NOTBTW_LOW, NOTBTW_HIGH = 40, 41
BTW_WHOLE_UB, BTW_WHOLE_LB, BTW_PART_UB, BTW_PART_LB = 50, 51, 52, 53
EXCL, HENCE = 60, 61
Q_MID_A, Q_MID_B, Q_OUTER_A, Q_OUTER_B = 70, 71, 72, 73
CROSS_A, CROSS_B, CONTAIN = 80, 81, 82
CASE, OPEN = 90, 94
CONTRA_FACT, CONTRA_EMPTY, CONTRA_BOUNDARY, CONTRA_EXHAUST = 91, 92, 93, 95

# fact kinds used in EXCL/HENCE/CASE rows
KIND_BETWEEN, KIND_HULL = 0, 1

# propagate return codes
FIXPOINT, CONTRADICTION, LOG_FULL, PASS_CAP_HIT = 0, 1, 2, 3


@njit(cache=True)
def _emit(log, base, nl, rule, f1, f2, f3, f4, value, strict, r1, r2, r3):
    """Append one derivation row; returns the new line counter or -1 if full."""
    row = nl - base
    if row >= log.shape[0]:
        return -1
    log[row, 0] = rule
    log[row, 1] = f1
    log[row, 2] = f2
    log[row, 3] = f3
    log[row, 4] = f4
    log[row, 5] = value
    log[row, 6] = strict
    log[row, 7] = r1
    log[row, 8] = r2
    log[row, 9] = r3
    return nl + 1


@njit(cache=True)
def _try_ub(lo, hi, los, his, lol, hil, a, v, strict, log, base, nl,
            rule, f2, f3, f4, r1, r2, r3):
    """Tighten an upper bound; returns (code, next_line)."""
    if v > D180 or (v == D180 and strict == 0):
        return 0, nl
    if v < 0:
        v = 0
        strict = 1
    if not (v < hi[a] or (v == hi[a] and strict == 1 and his[a] == 0)):
        return 0, nl
    nl2 = _emit(log, base, nl, rule, a, f2, f3, f4, v, strict, r1, r2, r3)
    if nl2 < 0:
        return 3, nl
    hi[a] = v
    his[a] = strict
    hil[a] = nl
    nl = nl2
    if hi[a] < lo[a] or (hi[a] == lo[a] and (los[a] == 1 or his[a] == 1)):
        nl2 = _emit(log, base, nl, CONTRA_EMPTY, a, 0, 0, 0, 0, 0,
                    hil[a], lol[a], -1)
        if nl2 < 0:
            return 3, nl
        return 2, nl2
    return 1, nl


@njit(cache=True)
def _try_lb(lo, hi, los, his, lol, hil, a, v, strict, log, base, nl,
            rule, f2, f3, f4, r1, r2, r3):
    """Raise a lower bound; returns (code, next_line)."""
    if v < 0 or (v == 0 and strict == 0):
        return 0, nl
    if v > D360:
        v = D360
    if not (v > lo[a] or (v == lo[a] and strict == 1 and los[a] == 0)):
        return 0, nl
    nl2 = _emit(log, base, nl, rule, a, f2, f3, f4, v, strict, r1, r2, r3)
    if nl2 < 0:
        return 3, nl
    lo[a] = v
    los[a] = strict
    lol[a] = nl
    nl = nl2
    if hi[a] < lo[a] or (hi[a] == lo[a] and (los[a] == 1 or his[a] == 1)):
        nl2 = _emit(log, base, nl, CONTRA_EMPTY, a, 0, 0, 0, 0, 0,
                    lol[a], hil[a], -1)
        if nl2 < 0:
            return 3, nl
        return 2, nl2
    return 1, nl


@njit(cache=True)
def _set_fact(st, ln, idx, val, hull_apex, obd, obl, log, base, nl,
              rule, f2, f3, f4, value, r1, r2, r3):
    """Set a between/hull fact; returns (code, next_line).

    hull_apex >= 0 marks a hull fact with that apex, enabling the
    boundary clash check when the fact becomes true.
    """
    if st[idx] == val:
        return 0, nl
    nl2 = _emit(log, base, nl, rule, idx, f2, f3, f4, value, 0, r1, r2, r3)
    if nl2 < 0:
        return 3, nl
    this_line = nl
    nl = nl2
    if st[idx] != UNKNOWN:
        nl2 = _emit(log, base, nl, CONTRA_FACT, idx,
                    KIND_HULL if hull_apex >= 0 else KIND_BETWEEN, 0, 0, 0, 0,
                    this_line, ln[idx], -1)
        if nl2 < 0:
            return 3, nl
        return 2, nl2
    st[idx] = val
    ln[idx] = this_line
    if val == TRUE and hull_apex >= 0 and obd[hull_apex] == 1:
        nl2 = _emit(log, base, nl, CONTRA_BOUNDARY, hull_apex, idx, 0, 0, 0, 0,
                    this_line, obl[hull_apex], -1)
        if nl2 < 0:
            return 3, nl
        return 2, nl2
    return 1, nl


@njit(cache=True)
def propagate_kernel(lo, hi, los, his, lol, hil,
                     bst, bln, hst, hln, obd, obl, less, hapex,
                     tripod, triangles, hull_alts, between_sum,
                     quad_single, quad_cross, quad_contain,
                     log, base, next_line, pass_cap):
    """Run rule sweeps to a fixpoint; returns (status, next_line)."""
    nl = next_line
    for _pass in range(pass_cap):
        changed = False

        # placement alternatives + hull angle sum
        for i in range(hull_alts.shape[0]):
            h = hull_alts[i, 0]
            apex = 0  # resolved below only when needed
            states = (hst[h], bst[hull_alts[i, 1]], bst[hull_alts[i, 2]],
                      bst[hull_alts[i, 3]])
            true_at = -1
            n_false = 0
            for k in range(4):
                if states[k] == TRUE and true_at < 0:
                    true_at = k
                if states[k] == FALSE:
                    n_false += 1
            if true_at >= 0:
                src_line = hln[h] if true_at == 0 else bln[hull_alts[i, true_at]]
                src_idx = h if true_at == 0 else hull_alts[i, true_at]
                for k in range(4):
                    if k == true_at or states[k] == FALSE:
                        continue
                    if k == 0:
                        code, nl = _set_fact(
                            hst, hln, h, FALSE, -1, obd, obl, log, base, nl,
                            EXCL, KIND_HULL, src_idx,
                            KIND_HULL if true_at == 0 else KIND_BETWEEN,
                            0, src_line, -1, -1)
                    else:
                        code, nl = _set_fact(
                            bst, bln, hull_alts[i, k], FALSE, -1, obd, obl,
                            log, base, nl, EXCL, KIND_BETWEEN, src_idx,
                            KIND_HULL if true_at == 0 else KIND_BETWEEN,
                            0, src_line, -1, -1)
                    if code >= 2:
                        return (CONTRADICTION if code == 2 else LOG_FULL), nl
                    if code == 1:
                        changed = True
            elif n_false == 4:
                l0 = hln[h]
                nl2 = _emit(log, base, nl, CONTRA_EXHAUST, h,
                            bln[hull_alts[i, 1]], bln[hull_alts[i, 2]],
                            bln[hull_alts[i, 3]], 0, 0, l0, -1, -1)
                if nl2 < 0:
                    return LOG_FULL, nl
                return CONTRADICTION, nl2
            elif n_false == 3:
                refs = np.empty(3, dtype=np.int64)
                j = 0
                target = -1
                for k in range(4):
                    if states[k] == FALSE:
                        refs[j] = hln[h] if k == 0 else bln[hull_alts[i, k]]
                        j += 1
                    else:
                        target = k
                if target == 0:
                    code, nl = _set_fact(hst, hln, h, TRUE,
                                         hapex[h], obd, obl,
                                         log, base, nl, HENCE, KIND_HULL,
                                         0, 0, 0, refs[0], refs[1], refs[2])
                else:
                    code, nl = _set_fact(bst, bln, hull_alts[i, target], TRUE,
                                         -1, obd, obl, log, base, nl,
                                         HENCE, KIND_BETWEEN, 0, 0, 0,
                                         refs[0], refs[1], refs[2])
                if code >= 2:
                    return (CONTRADICTION if code == 2 else LOG_FULL), nl
                if code == 1:
                    changed = True

            a1 = hull_alts[i, 4]
            a2 = hull_alts[i, 5]
            a3 = hull_alts[i, 6]
            if hst[h] == UNKNOWN:
                ub_sum = hi[a1] + hi[a2] + hi[a3]
                ub_strict = his[a1] | his[a2] | his[a3]
                lb_sum = lo[a1] + lo[a2] + lo[a3]
                lb_strict = los[a1] | los[a2] | los[a3]
                if ub_sum < D360 or (ub_sum == D360 and ub_strict == 1):
                    code, nl = _set_fact(hst, hln, h, FALSE, -1, obd, obl,
                                         log, base, nl, HULLNOT_LOW, a1, a2, a3,
                                         ub_sum, hil[a1], hil[a2], hil[a3])
                    if code >= 2:
                        return (CONTRADICTION if code == 2 else LOG_FULL), nl
                    if code == 1:
                        changed = True
                elif lb_sum > D360 or (lb_sum == D360 and lb_strict == 1):
                    code, nl = _set_fact(hst, hln, h, FALSE, -1, obd, obl,
                                         log, base, nl, HULLNOT_HIGH, a1, a2, a3,
                                         lb_sum, lol[a1], lol[a2], lol[a3])
                    if code >= 2:
                        return (CONTRADICTION if code == 2 else LOG_FULL), nl
                    if code == 1:
                        changed = True
            elif hst[h] == TRUE:
                for t in range(3):
                    at = a1 if t == 0 else (a2 if t == 1 else a3)
                    o1 = a2 if t == 0 else (a1 if t == 1 else a1)
                    o2 = a3 if t == 0 else (a3 if t == 1 else a2)
                    code, nl = _try_ub(lo, hi, los, his, lol, hil, at,
                                       D360 - lo[o1] - lo[o2],
                                       los[o1] | los[o2], log, base, nl,
                                       CIRC_UB, h, o1, o2,
                                       hln[h], lol[o1], lol[o2])
                    if code >= 2:
                        return (CONTRADICTION if code == 2 else LOG_FULL), nl
                    if code == 1:
                        changed = True
                    code, nl = _try_lb(lo, hi, los, his, lol, hil, at,
                                       D360 - hi[o1] - hi[o2],
                                       his[o1] | his[o2], log, base, nl,
                                       CIRC_LB, h, o1, o2,
                                       hln[h], hil[o1], hil[o2])
                    if code >= 2:
                        return (CONTRADICTION if code == 2 else LOG_FULL), nl
                    if code == 1:
                        changed = True

        # between facts: equality sums while true, impossibility while open
        for i in range(between_sum.shape[0]):
            b = between_sum[i, 0]
            w = between_sum[i, 1]
            p1 = between_sum[i, 2]
            p2 = between_sum[i, 3]
            if bst[b] == TRUE:
                code, nl = _try_ub(lo, hi, los, his, lol, hil, w,
                                   hi[p1] + hi[p2], his[p1] | his[p2],
                                   log, base, nl, BTW_WHOLE_UB, b, p1, p2,
                                   bln[b], hil[p1], hil[p2])
                if code >= 2:
                    return (CONTRADICTION if code == 2 else LOG_FULL), nl
                if code == 1:
                    changed = True
                code, nl = _try_lb(lo, hi, los, his, lol, hil, w,
                                   lo[p1] + lo[p2], los[p1] | los[p2],
                                   log, base, nl, BTW_WHOLE_LB, b, p1, p2,
                                   bln[b], lol[p1], lol[p2])
                if code >= 2:
                    return (CONTRADICTION if code == 2 else LOG_FULL), nl
                if code == 1:
                    changed = True
                for t in range(2):
                    pt = p1 if t == 0 else p2
                    po = p2 if t == 0 else p1
                    code, nl = _try_ub(lo, hi, los, his, lol, hil, pt,
                                       hi[w] - lo[po], his[w] | los[po],
                                       log, base, nl, BTW_PART_UB, b, w, po,
                                       bln[b], hil[w], lol[po])
                    if code >= 2:
                        return (CONTRADICTION if code == 2 else LOG_FULL), nl
                    if code == 1:
                        changed = True
                    code, nl = _try_lb(lo, hi, los, his, lol, hil, pt,
                                       lo[w] - hi[po], los[w] | his[po],
                                       log, base, nl, BTW_PART_LB, b, w, po,
                                       bln[b], lol[w], hil[po])
                    if code >= 2:
                        return (CONTRADICTION if code == 2 else LOG_FULL), nl
                    if code == 1:
                        changed = True
            elif bst[b] == UNKNOWN:
                s = lo[p1] + lo[p2]
                if hi[w] < s or (hi[w] == s and
                                 (his[w] | los[p1] | los[p2]) == 1):
                    code, nl = _set_fact(bst, bln, b, FALSE, -1, obd, obl,
                                         log, base, nl, NOTBTW_LOW, w, p1, p2,
                                         0, hil[w], lol[p1], lol[p2])
                    if code >= 2:
                        return (CONTRADICTION if code == 2 else LOG_FULL), nl
                    if code == 1:
                        changed = True
                else:
                    s = hi[p1] + hi[p2]
                    if lo[w] > s or (lo[w] == s and
                                     (los[w] | his[p1] | his[p2]) == 1):
                        code, nl = _set_fact(bst, bln, b, FALSE, -1, obd, obl,
                                             log, base, nl, NOTBTW_HIGH, w,
                                             p1, p2, 0, lol[w], hil[p1],
                                             hil[p2])
                        if code >= 2:
                            return (CONTRADICTION if code == 2 else LOG_FULL), nl
                        if code == 1:
                            changed = True

        # quadrilateral schemata
        for i in range(quad_single.shape[0]):
            b = quad_single[i, 0]
            if bst[b] != TRUE:
                continue
            for t in range(4):
                target = quad_single[i, 1 + t]
                rule = Q_MID_A + t
                code, nl = _set_fact(bst, bln, target, FALSE, -1, obd, obl,
                                     log, base, nl, rule, b, 0, 0, 0,
                                     bln[b], -1, -1)
                if code >= 2:
                    return (CONTRADICTION if code == 2 else LOG_FULL), nl
                if code == 1:
                    changed = True

        for i in range(quad_cross.shape[0]):
            b1 = quad_cross[i, 0]
            b2 = quad_cross[i, 1]
            if bst[b1] != TRUE or bst[b2] != TRUE:
                continue
            for t in range(2):
                target = quad_cross[i, 2 + t]
                code, nl = _set_fact(bst, bln, target, TRUE, -1, obd, obl,
                                     log, base, nl, CROSS_A + t, b1, b2, 0, 0,
                                     bln[b1], bln[b2], -1)
                if code >= 2:
                    return (CONTRADICTION if code == 2 else LOG_FULL), nl
                if code == 1:
                    changed = True

        for i in range(quad_contain.shape[0]):
            b1 = quad_contain[i, 0]
            b2 = quad_contain[i, 1]
            if bst[b1] != TRUE or bst[b2] != TRUE:
                continue
            h = quad_contain[i, 2]
            code, nl = _set_fact(hst, hln, h, TRUE, hapex[h], obd, obl,
                                 log, base, nl, CONTAIN, b1, b2, 0, 0,
                                 bln[b1], bln[b2], -1)
            if code >= 2:
                return (CONTRADICTION if code == 2 else LOG_FULL), nl
            if code == 1:
                changed = True

        # tripod inequality
        for i in range(tripod.shape[0]):
            w = tripod[i, 0]
            p1 = tripod[i, 1]
            p2 = tripod[i, 2]
            code, nl = _try_ub(lo, hi, los, his, lol, hil, w,
                               hi[p1] + hi[p2], his[p1] | his[p2],
                               log, base, nl, TRIPOD_UB, p1, p2, 0,
                               hil[p1], hil[p2], -1)
            if code >= 2:
                return (CONTRADICTION if code == 2 else LOG_FULL), nl
            if code == 1:
                changed = True
            for t in range(2):
                pt = p1 if t == 0 else p2
                po = p2 if t == 0 else p1
                code, nl = _try_lb(lo, hi, los, his, lol, hil, pt,
                                   lo[w] - hi[po], los[w] | his[po],
                                   log, base, nl, TRIPOD_LB, w, po, 0,
                                   lol[w], hil[po], -1)
                if code >= 2:
                    return (CONTRADICTION if code == 2 else LOG_FULL), nl
                if code == 1:
                    changed = True

        # triangle rules
        for i in range(triangles.shape[0]):
            for t in range(3):
                at = triangles[i, t]
                o1 = triangles[i, (t + 1) % 3]
                o2 = triangles[i, (t + 2) % 3]
                code, nl = _try_ub(lo, hi, los, his, lol, hil, at,
                                   D180 - lo[o1] - lo[o2], los[o1] | los[o2],
                                   log, base, nl, ANGSUM_UB, o1, o2, 0,
                                   lol[o1], lol[o2], -1)
                if code >= 2:
                    return (CONTRADICTION if code == 2 else LOG_FULL), nl
                if code == 1:
                    changed = True
                code, nl = _try_lb(lo, hi, los, his, lol, hil, at,
                                   D180 - hi[o1] - hi[o2], his[o1] | his[o2],
                                   log, base, nl, ANGSUM_LB, o1, o2, 0,
                                   hil[o1], hil[o2], -1)
                if code >= 2:
                    return (CONTRADICTION if code == 2 else LOG_FULL), nl
                if code == 1:
                    changed = True
            for t in range(3):
                for u in range(3):
                    if u == t:
                        continue
                    a_big = triangles[i, t]
                    a_small = triangles[i, u]
                    s_big = triangles[i, 3 + t]
                    s_small = triangles[i, 3 + u]
                    if less[s_small, s_big] == 0:
                        continue
                    code, nl = _try_lb(lo, hi, los, his, lol, hil, a_big,
                                       lo[a_small], 1, log, base, nl,
                                       SIDE_LB, a_small, s_big, s_small,
                                       lol[a_small], -1, -1)
                    if code >= 2:
                        return (CONTRADICTION if code == 2 else LOG_FULL), nl
                    if code == 1:
                        changed = True
                    code, nl = _try_ub(lo, hi, los, his, lol, hil, a_small,
                                       hi[a_big], 1, log, base, nl,
                                       SIDE_UB, a_big, s_small, s_big,
                                       hil[a_big], -1, -1)
                    if code >= 2:
                        return (CONTRADICTION if code == 2 else LOG_FULL), nl
                    if code == 1:
                        changed = True
                    third = 3 - t - u
                    a_third = triangles[i, third]
                    code, nl = _try_lb(lo, hi, los, his, lol, hil, a_big,
                                       (D180 - hi[a_third]) >> 1, 1,
                                       log, base, nl, LARGER, a_third,
                                       s_big, s_small, hil[a_third], -1, -1)
                    if code >= 2:
                        return (CONTRADICTION if code == 2 else LOG_FULL), nl
                    if code == 1:
                        changed = True

        if not changed:
            return FIXPOINT, nl
    return PASS_CAP_HIT, nl


__all__ = [
    "HAVE_NUMBA", "SCALE_BITS", "ONE", "D60", "D90", "D180", "D360",
    "UNKNOWN", "TRUE", "FALSE",
    "TRIPOD_UB", "TRIPOD_LB", "ANGSUM_UB", "ANGSUM_LB",
    "SIDE_LB", "SIDE_UB", "LARGER",
    "HULLNOT_LOW", "HULLNOT_HIGH", "CIRC_UB", "CIRC_LB",
    "NOTBTW_LOW", "NOTBTW_HIGH",
    "BTW_WHOLE_UB", "BTW_WHOLE_LB", "BTW_PART_UB", "BTW_PART_LB",
    "EXCL", "HENCE", "Q_MID_A", "Q_MID_B", "Q_OUTER_A", "Q_OUTER_B",
    "CROSS_A", "CROSS_B", "CONTAIN", "CASE", "OPEN",
    "CONTRA_FACT", "CONTRA_EMPTY", "CONTRA_BOUNDARY", "CONTRA_EXHAUST",
    "KIND_BETWEEN", "KIND_HULL",
    "FIXPOINT", "CONTRADICTION", "LOG_FULL", "PASS_CAP_HIT",
    "propagate_kernel",
]
