"""Linear clauses, XNF/CNF DIMACS parsing, and the clause database.

A linear clause is stored canonically as an echelon basis of its linear
negation (the spans of ``equation + 1`` for each disjunct); two clauses are
equivalent exactly when those spans coincide.  The database owns clause
activities for CSIDS and the level-0 substitution used by compaction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .f2linalg import EchelonBasis, one

RESCALE_LIMIT = 1e100


class ParseError(ValueError):
    def __init__(self, message: str, lineno: int):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class LinClause:
    """A linear clause: basis of the linear negation plus solver metadata."""

    __slots__ = ("basis", "cid", "learned", "activity", "w1", "w2")

    def __init__(self, basis: EchelonBasis, cid: int, learned: bool = False,
                 activity: float = 0.0):
        self.basis = basis
        self.cid = cid
        self.learned = learned
        self.activity = activity
        self.reset_watches()

    def reset_watches(self) -> None:
        if len(self.basis) >= 2:
            self.w1, self.w2 = 0, 1
        else:
            self.w1 = self.w2 = -1

    @property
    def width(self) -> int:
        return len(self.basis)

    def equations(self) -> list[int]:
        """The disjuncts, recovered from the stored negation rows."""
        o = one(self.basis.nvars)
        return [r ^ o for r in self.basis.rows]

    def __repr__(self) -> str:
        return f"LinClause(id={self.cid}, rows={self.basis.rows})"


@dataclass
class CompactionReport:
    removed: list[int]
    rewritten: int
    level0_dim: int


class ClauseDb:
    """Id-indexed store of linear clauses with CSIDS activities.

    Ids start at 1 and are never reused; learned clauses always get ids above
    every original id, and the same ids double as proof-line ids.
    """

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.clauses: dict[int, LinClause] = {}
        self.order: list[int] = []  # active ids, ascending
        self.next_id = 1
        self.original_count = 0
        self.tautologies_dropped = 0
        self.a0 = 1.0
        self.delta = 1.0
        self.alpha = 0.98
        self.bump_scale = 1.0
        self.level0: EchelonBasis | None = None

    def configure_csids(self, a0: float, delta: float, alpha: float) -> None:
        if not (0.0 <= alpha <= 1.0 and a0 >= 0.0 and delta >= 0.0):
            raise ValueError("need A0 >= 0, Delta >= 0, 0 <= alpha <= 1")
        self.a0, self.delta, self.alpha = a0, delta, alpha

    def add_clause(self, basis: EchelonBasis, learned: bool = False) -> LinClause:
        if basis.nvars != self.nvars:
            raise ValueError("clause/database variable count mismatch")
        activity = self.a0 * self.bump_scale if learned else 0.0
        clause = LinClause(basis, self.next_id, learned, activity)
        self.clauses[clause.cid] = clause
        self.order.append(clause.cid)
        self.next_id += 1
        if not learned:
            self.original_count += 1
        return clause

    def remove_clause(self, cid: int) -> None:
        del self.clauses[cid]
        self.order.remove(cid)

    def bump_and_decay(self, used_ids: Iterable[int]) -> None:
        """Bump every clause touched by conflict analysis, then decay.

        Decay is implemented by scaling the bump increment by 1/alpha; all
        activities renormalize when the increment grows too large.
        """
        inc = self.delta * self.bump_scale
        if inc:
            for cid in used_ids:
                clause = self.clauses.get(cid)
                if clause is not None:
                    clause.activity += inc
        if self.alpha == 0.0:
            # multiplicative decay by zero wipes all history each conflict
            for clause in self.clauses.values():
                clause.activity = 0.0
            self.bump_scale = 1.0
            return
        self.bump_scale /= self.alpha
        if self.bump_scale > RESCALE_LIMIT:
            for clause in self.clauses.values():
                clause.activity /= RESCALE_LIMIT
            self.bump_scale /= RESCALE_LIMIT

    def snapshot_rows(self) -> list[tuple[int, list[int]]]:
        """Frozen (id, negation rows) pairs, for post-hoc model checking."""
        return [(cid, list(self.clauses[cid].basis.rows)) for cid in self.order]


def normalize_clause(nvars: int, equations: Iterable[int]) -> EchelonBasis | None:
    """Canonical negation basis for a disjunction of equations.

    Returns None for a tautology (the contradiction enters the span, i.e. the
    clause contains complementary or trivially true parts).  An empty result
    basis is the false clause: it arises only from an empty disjunction or
    one made of ``0 = 1`` disjuncts, and conflicts immediately since
    span({}) = {0} lies in every span.
    """
    o = one(nvars)
    basis = EchelonBasis(nvars)
    for eq in equations:
        if basis.insert(eq ^ o) == o:
            return None
    return basis


def term_to_equation(term: str, nvars: int, lineno: int = 0) -> int:
    """Parse a `+`-joined signed-literal XOR term into an equation.

    The term is true iff an odd number of its literals are true, so the RHS
    is 1 XOR (number of negative literals mod 2).
    """
    bits = 0
    negs = 0
    parts = term.split("+")
    if term == "" or any(p == "" for p in parts):
        raise ParseError(f"empty XOR term in {term!r}", lineno)
    for p in parts:
        try:
            lit = int(p)
        except ValueError:
            raise ParseError(f"bad literal {p!r}", lineno) from None
        if lit == 0 or abs(lit) > nvars:
            raise ParseError(f"literal {lit} out of range", lineno)
        if lit < 0:
            negs ^= 1
        bits ^= 1 << (abs(lit) - 1)
    if negs == 0:
        bits |= 1 << nvars
    return bits


def equation_to_term(eq: int, nvars: int) -> str:
    """Render an equation as a `+`-joined term (first literal negative iff RHS=0)."""
    variables = [v for v in range(1, nvars + 1) if eq >> (v - 1) & 1]
    if not variables:
        raise ValueError("constant equation has no term rendering")
    lits = [str(v) for v in variables]
    if not eq >> nvars & 1:
        lits[0] = "-" + lits[0]
    return "+".join(lits)


def _parse_dimacs(text: str, kind: str) -> ClauseDb:
    db: ClauseDb | None = None
    declared = None
    pending: list[int] = []
    nclauses = 0
    lineno = 0
    for raw in text.splitlines():
        lineno += 1
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if db is not None:
                raise ParseError("duplicate header", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[1] != kind:
                raise ParseError(f"bad header {line!r}", lineno)
            try:
                nvars, declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"bad header {line!r}", lineno) from None
            if nvars < 0 or declared < 0:
                raise ParseError(f"bad header {line!r}", lineno)
            db = ClauseDb(nvars)
            continue
        if db is None:
            raise ParseError("clause before header", lineno)
        for tok in line.split():
            if tok == "0":
                basis = normalize_clause(db.nvars, pending)
                if basis is None:
                    db.tautologies_dropped += 1
                else:
                    db.add_clause(basis)
                nclauses += 1
                pending = []
            else:
                pending.append(term_to_equation(tok, db.nvars, lineno))
    if db is None:
        raise ParseError("missing header", lineno)
    if pending:
        raise ParseError("clause missing terminating 0", lineno)
    return db


def parse_xnf(text: str) -> ClauseDb:
    """Parse XNF DIMACS: header ``p xnf <nvars> <nclauses>``, XOR-term clauses."""
    return _parse_dimacs(text, "xnf")


def parse_cnf(text: str) -> ClauseDb:
    """Parse CNF DIMACS; each literal becomes a single-variable equation."""
    return _parse_dimacs(text, "cnf")


def write_xnf(db: ClauseDb, comments: Iterable[str] = ()) -> str:
    lines = [f"c {c}" for c in comments]
    lines.append(f"p xnf {db.nvars} {len(db.order)}")
    for cid in db.order:
        clause = db.clauses[cid]
        terms = [equation_to_term(eq, db.nvars) for eq in clause.equations()]
        lines.append(" ".join(terms + ["0"]))
    return "\n".join(lines) + "\n"


def write_cnf(db: ClauseDb, comments: Iterable[str] = ()) -> str:
    """Emit a pure-CNF database (every disjunct a single-variable equation)."""
    lines = [f"c {c}" for c in comments]
    lines.append(f"p cnf {db.nvars} {len(db.order)}")
    for cid in db.order:
        clause = db.clauses[cid]
        lits = []
        for eq in clause.equations():
            variables = [v for v in range(1, db.nvars + 1) if eq >> (v - 1) & 1]
            if len(variables) != 1:
                raise ValueError(f"clause {cid} is not Boolean")
            lits.append(str(variables[0] if eq >> db.nvars & 1 else -variables[0]))
        lines.append(" ".join(lits + ["0"]))
    return "\n".join(lines) + "\n"


def clause_satisfied(clause: LinClause, assignment: int) -> bool:
    """A clause holds iff some negation row evaluates false."""
    nv = clause.basis.nvars
    mask = (1 << nv) - 1
    for row in clause.basis.rows:
        if (row & mask & assignment).bit_count() & 1 != row >> nv:
            return True
    return False


def compact(db: ClauseDb, trail) -> CompactionReport:
    """Level-0 simplification: drop satisfied clauses, reduce the rest.

    Clause ids are kept stable and vectors are not shrunk; dead columns are
    simply always zero.  The substitution basis is recorded on the database so
    proofs and models can be related back to the uncompacted clauses.
    """
    if trail.level != 0:
        raise ValueError("compaction requires decision level 0")
    units = trail.basis
    o = one(db.nvars)
    removed: list[int] = []
    rewritten = 0
    for cid in db.order:
        clause = db.clauses[cid]
        new_basis = EchelonBasis(db.nvars)
        satisfied = False
        for row in clause.basis.rows:
            # satisfaction can hide in row combinations, so it is detected as
            # the contradiction entering the span of the reduced negation
            if new_basis.insert(units.reduce(row)) == o:
                satisfied = True
                break
        if satisfied:
            removed.append(cid)
        elif new_basis.rows != clause.basis.rows:
            clause.basis = new_basis
            clause.reset_watches()
            rewritten += 1
    if removed:
        gone = set(removed)
        db.order = [cid for cid in db.order if cid not in gone]
        for cid in removed:
            del db.clauses[cid]
    db.level0 = units.copy()
    return CompactionReport(removed, rewritten, len(units))
