"""Refutation engine for candidate segment-length orders.

Given a total (or extremal-comparison) order on the segments of a
point set, the engine derives interval bounds on the angles any planar
realization would have to exhibit, case-splits on where a point can
lie relative to a triangle of others, and reports Refuted when every
branch reaches a contradiction.  A refuted order has no planar
realization with those segment comparisons; engine and transcript
checker are independent implementations, so a replayed transcript is
evidence rather than trust.
"""

from .state import (
    ConstraintMode,
    AngleId,
    AngleInterval,
    GeomFact,
    FACT_BETWEEN,
    FACT_IN_HULL,
    FACT_ON_BOUNDARY,
    SeedGroup,
    ConstraintState,
    init_state,
)
from .search import prove, ProofResult, REFUTED, UNKNOWN
from .render import ProofLine, ProofLog, build_log, render_proof
from .checker import CheckResult, CheckFailure, check_proof, parse_proof

__all__ = [
    "ConstraintMode",
    "AngleId",
    "AngleInterval",
    "GeomFact",
    "FACT_BETWEEN",
    "FACT_IN_HULL",
    "FACT_ON_BOUNDARY",
    "SeedGroup",
    "ConstraintState",
    "init_state",
    "prove",
    "ProofResult",
    "REFUTED",
    "UNKNOWN",
    "ProofLine",
    "ProofLog",
    "build_log",
    "render_proof",
    "CheckResult",
    "CheckFailure",
    "check_proof",
    "parse_proof",
]
