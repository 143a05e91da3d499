"""Trail maintenance and generalized unit propagation, vs enumeration oracles."""

import random

import pytest

from xnfsat import f2linalg as f2
from xnfsat.f2linalg import ContractViolation
from xnfsat.formula import ClauseDb, normalize_clause, parse_xnf
from xnfsat.propagate import (CONFLICT, NO_ACTION, PROPAGATED, Trail,
                              propagate_all, propagate_clause)

from helpers import (all_assignments, classify_by_enumeration, clause_true,
                     eval_equation, span_of)

from test_formula import APP_B_XNF

B = f2.eq_from_bits


def make_db(nvars, clause_eqs):
    db = ClauseDb(nvars)
    for eqs in clause_eqs:
        basis = normalize_clause(nvars, eqs)
        assert basis is not None
        db.add_clause(basis)
    return db


def test_section31_example_propagates_z():
    # U = {x=0, y=0}, C = [x xor y xor z = 1] v [z=1]  deduces a unit spanning z=1
    n = 3
    db = make_db(n, [[f2.equation(n, [1, 2, 3], 1), f2.equation(n, [3], 1)]])
    trail = Trail(n)
    trail.seed([f2.equation(n, [1], 0), f2.equation(n, [2], 0)])
    outcome = propagate_clause(trail, db.clauses[1])
    assert outcome == PROPAGATED
    assert span_of(trail.basis.rows) == span_of(
        [f2.equation(n, [1], 0), f2.equation(n, [2], 0), f2.equation(n, [3], 1)])


def test_appendix_b_propagation_bit_exact():
    db = parse_xnf(APP_B_XNF)
    trail = Trail(5)
    trail.decide(B("011000"))
    assert propagate_all(trail, db) is None  # no clause propagates after f1
    assert trail.basis.rows == [B("011000")]
    trail.decide(B("110101"))
    conflict = propagate_all(trail, db)
    assert conflict == 3
    assert trail.basis.rows == [B("011000"), B("110101"), B("000110"),
                                B("001011"), f2.one(5)]
    assert trail.reasons == [None, None, 1, 2, 3]
    assert trail.levels == [1, 2, 2, 2, 2]
    assert trail.in_conflict


def test_empty_clause_conflicts_from_any_trail():
    db = ClauseDb(2)
    db.add_clause(normalize_clause(2, []))
    trail = Trail(2)
    assert propagate_clause(trail, db.clauses[1]) == CONFLICT
    trail2 = Trail(2)
    trail2.seed([f2.equation(2, [1], 1)])
    trail2.conflict_reason = None
    db2 = ClauseDb(2)
    db2.add_clause(normalize_clause(2, []))
    assert propagate_clause(trail2, db2.clauses[1]) == CONFLICT


def test_empty_db_fixed_point():
    assert propagate_all(Trail(3), ClauseDb(3)) is None


def test_satisfied_clause_no_action():
    n = 2
    db = make_db(n, [[f2.equation(n, [1], 1), f2.equation(n, [2], 1)]])
    trail = Trail(n)
    trail.seed([f2.equation(n, [1], 1)])
    assert propagate_clause(trail, db.clauses[1]) == NO_ACTION


def test_backjump_restores_prefix_and_contract():
    db = parse_xnf(APP_B_XNF)
    trail = Trail(5)
    trail.decide(B("011000"))
    trail.decide(B("110101"))
    propagate_all(trail, db)
    trail.backjump(1)
    assert trail.basis.rows == [B("011000")]
    assert trail.levels == [1] and not trail.in_conflict
    with pytest.raises(ValueError):
        trail.backjump(1)


def test_backjump_replay_oracle():
    rng = random.Random(77)
    for _ in range(60):
        n = rng.randrange(2, 7)
        db = ClauseDb(n)
        for _ in range(rng.randrange(1, 6)):
            eqs = [rng.getrandbits(n + 1) | 1 << rng.randrange(n)
                   for _ in range(rng.randrange(1, 3))]
            basis = normalize_clause(n, eqs)
            if basis is not None:
                db.add_clause(basis)
        trail = Trail(n)
        script = []
        for _ in range(4):
            eq = rng.getrandbits(n + 1)
            if trail.basis.member(eq) != f2.FREE or trail.in_conflict:
                continue
            trail.decide(eq)
            script.append(eq)
            propagate_all(trail, db)
        if trail.level < 2:
            continue
        k = rng.randrange(0, trail.level)
        trail.backjump(k)
        # replay oracle: a fresh trail driven by the kept prefix of decisions
        fresh = Trail(n)
        for eq in script[:k]:
            fresh.decide(eq)
            propagate_all(fresh, db)
        assert fresh.basis.rows == trail.basis.rows[:len(fresh.basis.rows)]
        assert span_of(fresh.basis.rows) == span_of(trail.basis.rows)


def random_instance(rng, n, nclauses, width=3):
    db = ClauseDb(n)
    while len(db.order) < nclauses:
        eqs = []
        for _ in range(rng.randrange(1, width + 1)):
            eq = rng.getrandbits(n + 1)
            if eq & ((1 << n) - 1):
                eqs.append(eq)
        basis = normalize_clause(n, eqs)
        if basis is not None and len(basis):
            db.add_clause(basis)
    return db


def test_propagate_clause_semantics_exhaustive():
    # soundness per the semantic characterization, n <= 5
    rng = random.Random(4)
    for _ in range(400):
        n = rng.randrange(1, 6)
        db = random_instance(rng, n, 1)
        clause = db.clauses[1]
        trail = Trail(n)
        for _ in range(rng.randrange(0, n)):
            eq = rng.getrandbits(n + 1)
            if trail.basis.member(eq) == f2.FREE:
                trail.decide(eq)
        units_before = list(trail.basis.rows)
        outcome = propagate_clause(trail, clause)
        models = [a for a in all_assignments(n)
                  if all(eval_equation(r, n, a) for r in units_before)
                  and clause_true(clause.basis.rows, n, a)]
        if outcome == CONFLICT:
            assert not models
        elif outcome == PROPAGATED:
            new_unit = trail.basis.rows[-1]
            assert all(eval_equation(new_unit, n, a) for a in models)
            assert models  # conflict would have been returned otherwise
            free = EchelonOracle(units_before, n)
            assert free.member(new_unit) == "free"
        else:
            assert classify_by_enumeration(
                clause.basis.rows, units_before, n) in ("satisfied", "undetermined")


class EchelonOracle:
    """Span membership by enumeration only."""

    def __init__(self, rows, n):
        self.span = span_of(rows)
        self.one = 1 << n

    def member(self, x):
        if x in self.span:
            return "in"
        if x ^ self.one in self.span:
            return "complement"
        return "free"


def test_propagated_unit_canonical_up_to_span():
    # any admissible deduced equation spans the same extension (Prop 3.1(2))
    rng = random.Random(21)
    for _ in range(300):
        n = rng.randrange(1, 6)
        db = random_instance(rng, n, 1)
        clause = db.clauses[1]
        trail = Trail(n)
        for _ in range(rng.randrange(0, n)):
            eq = rng.getrandbits(n + 1)
            if trail.basis.member(eq) == f2.FREE:
                trail.decide(eq)
        units = list(trail.basis.rows)
        if propagate_clause(trail, clause) != PROPAGATED:
            continue
        got = span_of(trail.basis.rows)
        sp = span_of(units)
        one = 1 << n
        admissible = []
        for fcand in range(1 << (n + 1)):
            if fcand in sp or fcand ^ one in sp:
                continue
            # deduction condition: neg rows within span(units, f+1)
            ext = span_of(units + [fcand ^ one])
            if all(r in ext for r in clause.basis.rows):
                admissible.append(fcand)
        assert admissible
        for fcand in admissible:
            assert span_of(units + [fcand]) == got


def test_watched_fast_path_never_skips_action():
    # differential: cyclic propagation with watches vs unconditional reduction
    rng = random.Random(13)
    for _ in range(150):
        n = rng.randrange(2, 8)
        db = random_instance(rng, n, rng.randrange(1, 8))
        trail = Trail(n)
        for _ in range(rng.randrange(0, n)):
            eq = rng.getrandbits(n + 1)
            if trail.basis.member(eq) == f2.FREE and not trail.in_conflict:
                trail.decide(eq)
                propagate_all(trail, db, start_hint=rng.choice(db.order))
        if trail.in_conflict:
            continue
        # at the fixed point no clause may propagate or conflict
        for clause in db.clauses.values():
            out = classify_by_enumeration(clause.basis.rows, trail.basis.rows, n)
            assert out in ("satisfied", "undetermined")


def test_confluence_random_orders():
    # Prop 3.1 confluence: identical span or uniformly conflicting
    rng = random.Random(6)
    for _ in range(40):
        n = rng.randrange(2, 8)
        db = random_instance(rng, n, rng.randrange(2, 9))
        seeds = [rng.getrandbits(n + 1) for _ in range(rng.randrange(0, 3))]
        outcomes = []
        for _ in range(12):
            perm = list(db.order)
            rng.shuffle(perm)
            db.order = perm
            trail = Trail(n)
            try:
                trail.seed(seeds)
            except ContractViolation:
                break
            cid = propagate_all(trail, db, start_hint=perm[0])
            outcomes.append((cid is not None, frozenset(span_of(trail.basis.rows))))
        db.order = sorted(db.order)
        if not outcomes:
            continue
        conflicts = {c for c, _ in outcomes}
        assert len(conflicts) == 1
        if not conflicts.pop():
            assert len({s for _, s in outcomes}) == 1
