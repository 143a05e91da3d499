"""Independent brute-force oracles shared by the test suite.

Everything here enumerates; nothing reuses the package's reduction or
propagation paths, so these stay valid as cross-checks.
"""

from __future__ import annotations

import itertools
import random


def span_of(rows) -> set[int]:
    """All XOR combinations of the given rows."""
    s = {0}
    for r in rows:
        s |= {x ^ r for x in s}
    return s


def eval_equation(eq: int, nvars: int, assign: int) -> bool:
    coeffs = eq & ((1 << nvars) - 1)
    return (coeffs & assign).bit_count() & 1 == eq >> nvars


def clause_true(neg_rows, nvars: int, assign: int) -> bool:
    """A linear clause holds iff some row of its negation evaluates false."""
    if not neg_rows:
        return False
    return any(not eval_equation(r, nvars, assign) for r in neg_rows)


def equations_clause_true(equations, nvars: int, assign: int) -> bool:
    """Disjunction of equations, evaluated directly."""
    return any(eval_equation(e, nvars, assign) for e in equations)


def all_assignments(nvars: int):
    return range(1 << nvars)


def formula_models(db) -> list[int]:
    """Brute-force models of a ClauseDb (all original clauses)."""
    out = []
    neg_sets = [c.basis.rows for c in db.clauses.values()]
    for a in all_assignments(db.nvars):
        if all(clause_true(rows, db.nvars, a) for rows in neg_sets):
            out.append(a)
    return out


def formula_satisfiable(db) -> bool:
    neg_sets = [c.basis.rows for c in db.clauses.values()]
    return any(
        all(clause_true(rows, db.nvars, a) for rows in neg_sets)
        for a in all_assignments(db.nvars)
    )


def random_equation(rng: random.Random, nvars: int, nonconstant: bool = True) -> int:
    while True:
        eq = rng.getrandbits(nvars + 1)
        if not nonconstant or eq & ((1 << nvars) - 1):
            return eq


def random_rows(rng: random.Random, nvars: int, k: int) -> list[int]:
    return [random_equation(rng, nvars) for _ in range(k)]


def subspace_equal(rows_a, rows_b) -> bool:
    return span_of(rows_a) == span_of(rows_b)


def brute_intersection(rows_a, rows_b) -> set[int]:
    return span_of(rows_a) & span_of(rows_b)


def classify_by_enumeration(neg_rows, units, nvars: int) -> str:
    """Alg.-2 outcome for a clause against a set of units, via span enumeration."""
    one = 1 << nvars
    sp = span_of(units)
    residues = []
    for r in neg_rows:
        cands = {r ^ s for s in sp}
        if one in cands:
            return "satisfied"
        residues.append(min(cands))
    nonzero = {g for g in residues if g}
    if not nonzero:
        return "conflict"
    if len(nonzero) == 1:
        return "unit"
    return "undetermined"


def minimal_prefix_level(neg_rows, trail, nvars: int) -> int | None:
    """Smallest level k whose unit prefix makes the clause propagate or conflict."""
    for k in range(trail.level + 1):
        length = trail.prefix_length_of_level(k)
        out = classify_by_enumeration(neg_rows, trail.basis.rows[:length], nvars)
        if out in ("conflict", "unit"):
            return k
    return None
