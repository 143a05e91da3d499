"""Conflict analysis: isolation and addition in reverse trail coordinates.

The working clause is carried as coordinate vectors over the trail's stored
rows (plus the contradiction, which is itself the last stored row once a
conflict is deduced).  Echelon form under highest-bit pivots in that
coordinate space makes the latest propagated equation already isolated, so
each loop step is a single XOR: the isolated rows of the working clause and
of the reason cancel their shared trail index and the contradiction bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .f2linalg import ContractViolation, EchelonBasis, jordan_msb, msb_insert
from .formula import ClauseDb, normalize_clause
from .propagate import Trail, classify


@dataclass
class AdditionStep:
    """One affine-resolution step, in equation space (for proof extraction)."""
    left_ref: int | None  # antecedent clause id for the first step, else None
    right_ref: int        # reason clause id
    f_eq: int             # isolated negation row of the working clause
    g_eq: int             # isolated negation row of the reason
    result_rows: list[int]


@dataclass
class Analysis:
    rows: list[int]            # canonical negation rows of the learned clause
    level: int                 # asserting level
    hints: list[int]           # antecedent ids in resolution order (conflict reason first)
    iterations: int            # addition count
    asserting_index: int       # largest trail index the clause uses (0-based), -1 if empty
    steps: list[AdditionStep] = field(default_factory=list)


def _classify_coords(work: dict[int, int], prefix: int) -> str:
    """Alg.-2 outcome of the working clause against a trail prefix.

    Trail rows are linearly independent, so residues against the prefix are
    determined by coordinate bits at positions >= prefix; the contradiction
    residue cannot occur because working rows never carry the conflict bit.
    """
    common = 0
    for c in work.values():
        high = c >> prefix
        if high and high != common:
            if common:
                return "undetermined"
            common = high
    return "unit" if common else "conflict"


def analyze(trail: Trail, db: ClauseDb, record_steps: bool = False,
            stop_at_asserting: bool = True) -> Analysis:
    """Derive an asserting clause from a conflicted trail (1-UIP-like).

    With stop_at_asserting=False the loop only stops at decisions, which
    turns the run into the input-proof extraction of the theory layer.
    Hints are the antecedents in resolution order, conflict reason first.
    """
    if not trail.in_conflict:
        raise ContractViolation("analysis requires a conflicted trail")
    if stop_at_asserting and trail.level == 0:
        raise ContractViolation("level-0 conflict has no asserting clause")
    basis = trail.basis
    m = len(basis) - 1  # index of the contradiction row
    one_bit = 1 << m
    conflict_cid = trail.conflict_reason
    work: dict[int, int] = {}
    for r in db.clauses[conflict_cid].basis.rows:
        msb_insert(work, basis.coordinates(r))
    hints = [conflict_cid]
    steps: list[AdditionStep] = []
    iterations = 0
    level = trail.level
    prefix_below = trail.prefix_length_of_level(level - 1) if level else 0

    while work:
        if any(c >> m for c in work.values()):
            raise ContractViolation("working clause escaped span of the trail units")
        if stop_at_asserting and _classify_coords(work, prefix_below) != "undetermined":
            break
        i = max(work)
        if not stop_at_asserting and trail.reasons[i] is None:
            break  # reached a decision: input-proof extraction stops here
        reason_cid = trail.reasons[i]
        if reason_cid is None:
            raise ContractViolation("conflict analysis reached a decision reason")
        x = work.pop(i)
        reason_coords: dict[int, int] = {}
        for r in db.clauses[reason_cid].basis.rows:
            msb_insert(reason_coords, basis.coordinates(r))
        y = reason_coords.pop(m, 0)
        if not y or not y >> i & 1:
            raise ContractViolation("reason clause does not isolate its propagated unit")
        z = x ^ y ^ one_bit
        for c in reason_coords.values():
            msb_insert(work, c)
        if z:
            msb_insert(work, z)
        hints.append(reason_cid)
        iterations += 1
        if record_steps:
            rows = [basis.expand(c) for c in jordan_msb(dict(work))]
            steps.append(AdditionStep(
                left_ref=conflict_cid if iterations == 1 else None,
                right_ref=reason_cid,
                f_eq=basis.expand(x),
                g_eq=basis.expand(y),
                result_rows=rows,
            ))

    canonical = jordan_msb(work)
    asserting_index = max(work) if work else -1
    rows = [basis.expand(c) for c in canonical]
    assert_level = 0
    if stop_at_asserting:
        for k in range(level):
            if _classify_coords(work, trail.prefix_length_of_level(k)) != "undetermined":
                assert_level = k
                break
        else:
            raise ContractViolation("derived clause is not asserting")
    return Analysis(rows, assert_level, hints, iterations, asserting_index, steps)


def asserting_level(neg_rows: list[int], trail: Trail) -> int:
    """Smallest level whose unit prefix makes the clause propagate or conflict.

    Independent of the coordinate trick in analyze(): reduces the clause's
    negation rows against growing level prefixes of the trail.
    """
    scratch = EchelonBasis(trail.nvars)
    pos = 0
    for k in range(trail.level + 1):
        end = trail.prefix_length_of_level(k)
        while pos < end:
            row = trail.basis.rows[pos]
            if row != 1 << trail.nvars:
                scratch.insert(row)
            pos += 1
        outcome, _ = classify(neg_rows, scratch)
        if outcome in ("unit", "conflict"):
            return k
    raise ContractViolation("clause does not conflict with the full trail")


def build_learned_clause(db: ClauseDb, rows: list[int]):
    """Normalize and insert an analysis result as a learned clause."""
    basis = normalize_clause(db.nvars, [r ^ (1 << db.nvars) for r in rows])
    if basis is None:
        raise ContractViolation("learned clause is tautological")
    return db.add_clause(basis, learned=True)
