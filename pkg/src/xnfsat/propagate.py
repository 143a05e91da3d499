"""The trail and generalized unit propagation over linear clauses.

Propagation on one clause reduces each row of the clause's negation basis by
the trail: some row reducing to the contradiction means the clause is
satisfied; all rows vanishing is a conflict; and a single surviving residue g
deduces the unit g+1.  Clauses are scheduled by cycling through the database
with a watched-equation fast path.
"""

from __future__ import annotations

from bisect import bisect_left

from .f2linalg import ContractViolation, EchelonBasis
from .formula import ClauseDb, LinClause

CONFLICT = "conflict"
PROPAGATED = "propagated"
NO_ACTION = "no_action"

DECISION = None


class Trail:
    """Insertion-ordered row-echelon basis of true units with reasons/levels.

    The basis rows of a conflicted trail end with the contradiction row,
    whose reason records the conflicting clause.
    """

    __slots__ = ("nvars", "basis", "reasons", "levels", "decision_indices",
                 "conflict_reason", "_one")

    def __init__(self, nvars: int):
        self.nvars = nvars
        self._one = 1 << nvars
        self.basis = EchelonBasis(nvars)
        self.reasons: list[int | None] = []
        self.levels: list[int] = []
        self.decision_indices: list[int] = []
        self.conflict_reason: int | None = None

    def __len__(self) -> int:
        return len(self.basis)

    @property
    def level(self) -> int:
        return len(self.decision_indices)

    @property
    def in_conflict(self) -> bool:
        return self.conflict_reason is not None

    @property
    def dimension(self) -> int:
        n = len(self.basis)
        return n - 1 if self.in_conflict else n

    def prefix_length_of_level(self, k: int) -> int:
        """Number of trail units with level <= k."""
        if k < self.level:
            return self.decision_indices[k]
        return len(self.basis)

    def decide(self, eq: int) -> int:
        """Append a decision.  The equation must be undetermined."""
        if self.in_conflict:
            raise ContractViolation("cannot decide on a conflicted trail")
        stored = self.basis.insert(eq)
        if stored == 0:
            raise ContractViolation("decision already implied by the trail")
        if stored == self._one:
            raise ContractViolation("decision inconsistent with the trail")
        self.decision_indices.append(len(self.basis) - 1)
        self.reasons.append(DECISION)
        self.levels.append(self.level)
        return stored

    def assign(self, unit: int, reason_cid: int) -> int:
        """Append a propagated unit with its reason clause."""
        stored = self.basis.insert(unit)
        if stored == 0 or stored == self._one:
            raise ContractViolation("propagated unit not free")
        self.reasons.append(reason_cid)
        self.levels.append(self.level)
        return stored

    def set_conflict(self, reason_cid: int) -> None:
        """Deduce the contradiction: append it with the conflicting reason."""
        self.basis.insert(self._one, allow_inconsistent=True)
        self.reasons.append(reason_cid)
        self.levels.append(self.level)
        self.conflict_reason = reason_cid

    def backjump(self, k: int) -> None:
        """Remove every unit above level k, restoring the prefix state."""
        if k >= self.level:
            raise ValueError(f"backjump target {k} not below current level {self.level}")
        cut = self.decision_indices[k]
        self.basis.truncate(cut)
        del self.reasons[cut:]
        del self.levels[cut:]
        del self.decision_indices[k:]
        self.conflict_reason = None

    def seed(self, rows) -> None:
        """Seed a scratch trail with the given units as decisions.

        Rows already implied are skipped; an inconsistent seed raises.
        """
        for r in rows:
            g = self.basis.reduce(r)
            if g == 0:
                continue
            if g == self._one:
                raise ContractViolation("seed rows are inconsistent")
            self.decide(r)


def classify(neg_rows: list[int], basis: EchelonBasis) -> tuple[str, int]:
    """Alg.-2 classification of a clause's negation rows against a basis.

    Returns one of ("satisfied", 0), (CONFLICT, 0), ("unit", g) with g the
    common residue, or ("undetermined", 0).
    """
    o = basis._one
    common = 0
    reduce = basis.reduce
    for r in neg_rows:
        g = reduce(r)
        if g == o:
            return "satisfied", 0
        if g and g != common:
            if common:
                return "undetermined", 0
            common = g
    if common:
        return "unit", common
    return CONFLICT, 0


def propagate_clause(trail: Trail, clause: LinClause) -> str:
    """Run unit propagation on one clause, updating the trail.

    Returns CONFLICT, PROPAGATED, or NO_ACTION.  A satisfied clause is
    NO_ACTION; the deduced unit is the common residue plus the contradiction,
    which spans the same extension as any admissible choice.
    """
    o = trail._one
    basis = trail.basis
    reduce = basis.reduce
    rows = clause.basis.rows
    common = 0
    first_idx = -1
    second_idx = -1
    for idx, r in enumerate(rows):
        g = reduce(r)
        if g == o:
            return NO_ACTION
        if g and g != common:
            if common:
                second_idx = idx
                break
            common = g
            first_idx = idx
    if second_idx >= 0:
        clause.w1, clause.w2 = first_idx, second_idx
        return NO_ACTION
    if common:
        trail.assign(common ^ o, clause.cid)
        return PROPAGATED
    trail.set_conflict(clause.cid)
    return CONFLICT


def propagate_all(trail: Trail, db: ClauseDb, start_hint: int | None = None) -> int | None:
    """Cycle through clauses until a conflict or a full propagation-free sweep.

    Returns the conflicting clause id, or None at the fixed point.  A clause
    is skipped without full reduction when its two watched rows reduce to
    distinct nonzero values (then it can neither propagate nor conflict).
    """
    order = db.order
    n_active = len(order)
    if n_active == 0 or trail.in_conflict:
        return trail.conflict_reason
    clauses = db.clauses
    basis = trail.basis
    reduce = basis.reduce
    o = trail._one
    idx = bisect_left(order, start_hint) % n_active if start_hint is not None else 0
    streak = 0
    while streak < n_active:
        cid = order[idx]
        clause = clauses[cid]
        rows = clause.basis.rows
        w1 = clause.w1
        if w1 >= 0:
            g1 = reduce(rows[w1])
            if g1:
                g2 = reduce(rows[clause.w2])
                if g2 and g1 != g2:
                    streak += 1
                    idx = idx + 1 if idx + 1 < n_active else 0
                    continue
        outcome = propagate_clause(trail, clause)
        if outcome == CONFLICT:
            return cid
        if outcome == PROPAGATED:
            streak = 0
        else:
            streak += 1
        idx = idx + 1 if idx + 1 < n_active else 0
    return None
