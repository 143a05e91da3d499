"""Bit-packed affine-equation arithmetic over GF(2).

An affine equation over n variables is a plain int of n+1 bits: bit i-1
holds the coefficient of variable i (i = 1..n) and bit n holds the
right-hand side.  0 is the trivially true equation ``0 = 0`` and
``one(n) = 1 << n`` is the contradiction ``0 = 1``.  Addition of equations
is bitwise XOR.
"""

from __future__ import annotations

from typing import Iterable

IN_SPAN = "in_span"
COMPLEMENT_IN_SPAN = "complement_in_span"
FREE = "free"


class ContractViolation(Exception):
    """An operation was invoked outside its stated contract."""


def one(nvars: int) -> int:
    """The contradiction equation ``0 = 1``."""
    return 1 << nvars


def equation(nvars: int, variables: Iterable[int], rhs: int) -> int:
    """Build the equation ``x_{v1} xor ... xor x_{vk} = rhs``.

    Repeated variables toggle (XOR semantics).
    """
    bits = 0
    for v in variables:
        if not 1 <= v <= nvars:
            raise ValueError(f"variable {v} out of range 1..{nvars}")
        bits ^= 1 << (v - 1)
    if rhs:
        bits |= 1 << nvars
    return bits


def eq_from_bits(s: str) -> int:
    """Parse a paper-style bitstring (variable 1 first, RHS last) into an int."""
    x = 0
    for pos, ch in enumerate(s):
        if ch == "1":
            x |= 1 << pos
        elif ch != "0":
            raise ValueError(f"bad bitstring {s!r}")
    return x


def eq_to_bits(eq: int, nvars: int) -> str:
    """Render an equation as a paper-style bitstring of length nvars+1."""
    return "".join("1" if eq >> p & 1 else "0" for p in range(nvars + 1))


def eq_variables(eq: int, nvars: int) -> list[int]:
    """1-based variables with a set coefficient."""
    return [v for v in range(1, nvars + 1) if eq >> (v - 1) & 1]


def evaluate(eq: int, nvars: int, assignment: int) -> bool:
    """Truth value of the equation under an assignment bitmask (bit i-1 = var i)."""
    coeffs = eq & ((1 << nvars) - 1)
    return (coeffs & assignment).bit_count() & 1 == eq >> nvars


class EchelonBasis:
    """Insertion-ordered basis of equations with unique leading (lowest set) bits.

    Kept in row-echelon form, not reduced row-echelon form: an incoming row is
    XORed with existing rows only while its leading bit collides with a pivot,
    then stored as-is.  Because rows are only ever appended, the stored prefix
    of length k spans exactly the first k inserted equations, which conflict
    analysis relies on to recover the trail prefixes.
    """

    __slots__ = ("nvars", "rows", "pivots", "_one")

    def __init__(self, nvars: int, rows: Iterable[int] = ()):
        self.nvars = nvars
        self._one = 1 << nvars
        self.rows: list[int] = []
        self.pivots: dict[int, int] = {}  # leading bit value -> row index
        for r in rows:
            self.insert(r)

    def __len__(self) -> int:
        return len(self.rows)

    def copy(self) -> "EchelonBasis":
        b = EchelonBasis.__new__(EchelonBasis)
        b.nvars = self.nvars
        b._one = self._one
        b.rows = list(self.rows)
        b.pivots = dict(self.pivots)
        return b

    def reduce(self, x: int) -> int:
        """Eliminate from x every bit that is the leading bit of some row.

        The result is 0 iff x is in the span, and ``one(nvars)`` iff the
        complement x+1 is in the span.
        """
        pivots = self.pivots
        rows = self.rows
        out = 0
        while x:
            b = x & -x
            idx = pivots.get(b)
            if idx is None:
                out |= b
                x ^= b
            else:
                x ^= rows[idx]
        return out

    def insert(self, x: int, *, allow_inconsistent: bool = False) -> int:
        """Insert x, keeping row-echelon form.

        Returns the stored row, 0 if x was already in the span, or the
        contradiction ``one(nvars)`` if x is inconsistent with the span.  The
        contradiction is only appended when allow_inconsistent is set (the
        trail does this when a conflict is deduced).
        """
        if x >> (self.nvars + 1):
            raise ValueError("equation has bits beyond nvars+1")
        pivots = self.pivots
        rows = self.rows
        while x:
            b = x & -x
            idx = pivots.get(b)
            if idx is None:
                break
            x ^= rows[idx]
        if x == 0:
            return 0
        if x == self._one and not allow_inconsistent:
            return x
        pivots[x & -x] = len(rows)
        rows.append(x)
        return x

    def member(self, x: int) -> str:
        """Classify x as IN_SPAN, COMPLEMENT_IN_SPAN, or FREE."""
        g = self.reduce(x)
        if g == 0:
            return IN_SPAN
        if g == self._one:
            return COMPLEMENT_IN_SPAN
        return FREE

    def contains(self, x: int) -> bool:
        return self.reduce(x) == 0

    @property
    def consistent(self) -> bool:
        return self._one & -self._one not in self.pivots

    def pop(self) -> int:
        row = self.rows.pop()
        del self.pivots[row & -row]
        return row

    def truncate(self, length: int) -> None:
        while len(self.rows) > length:
            self.pop()

    def prefix_reduce(self, x: int, length: int) -> int:
        """reduce() against only the first `length` rows."""
        pivots = self.pivots
        rows = self.rows
        out = 0
        while x:
            b = x & -x
            idx = pivots.get(b)
            if idx is None or idx >= length:
                out |= b
                x ^= b
            else:
                x ^= rows[idx]
        return out

    def coordinates(self, x: int) -> int:
        """Express x over (rows, 1): bit j is the coefficient of rows[j].

        The coefficient of the contradiction, when it is not itself a stored
        row, is the virtual bit len(rows).  Raises ContractViolation when x is
        outside span(rows + {1}).
        """
        pivots = self.pivots
        rows = self.rows
        coords = 0
        while x:
            b = x & -x
            idx = pivots.get(b)
            if idx is None:
                if b == self._one:
                    coords |= 1 << len(rows)
                    x ^= b
                else:
                    raise ContractViolation("row not in span(target + {1})")
            else:
                coords |= 1 << idx
                x ^= rows[idx]
        return coords

    def expand(self, coords: int) -> int:
        """Inverse of coordinates() for the same basis state."""
        x = 0
        dim = len(self.rows)
        while coords:
            b = coords & -coords
            j = b.bit_length() - 1
            coords ^= b
            x ^= self._one if j == dim else self.rows[j]
        return x

    def solve(self) -> int:
        """Back-substitute the unique solution when dimension equals nvars.

        Returns the assignment bitmask.  Requires a consistent full-rank basis.
        """
        if len(self.rows) != self.nvars or not self.consistent:
            raise ContractViolation("solve() needs a consistent basis of dimension nvars")
        var_mask = self._one - 1
        assign = 0
        for row in sorted(self.rows, key=lambda r: r & -r, reverse=True):
            b = row & -row
            rest = (row ^ b) & var_mask
            val = (rest & assign).bit_count() & 1 ^ (row >> self.nvars)
            if val:
                assign |= b
        return assign


def change_basis(rows: Iterable[int], target: EchelonBasis) -> list[int]:
    """Coordinates of each row over target's insertion-ordered rows plus 1."""
    return [target.coordinates(r) for r in rows]


def echelonize_msb(rows: Iterable[int]) -> dict[int, int]:
    """Echelonize with highest-set-bit pivots; returns {pivot position: row}."""
    d: dict[int, int] = {}
    for v in rows:
        msb_insert(d, v)
    return d


def msb_insert(d: dict[int, int], v: int) -> None:
    while v:
        b = v.bit_length() - 1
        if b not in d:
            d[b] = v
            return
        v ^= d[b]


def jordan_msb(d: dict[int, int]) -> list[int]:
    """Fully reduce an MSB-pivot echelon dict; rows by descending pivot."""
    pivs = sorted(d)
    for b in pivs:
        row = d[b]
        for b2 in pivs:
            if b2 > b and d[b2] >> b & 1:
                d[b2] ^= row
    return [d[b] for b in reversed(pivs)]


def same_span(rows_a: Iterable[int], rows_b: Iterable[int], nvars: int) -> bool:
    """Whether two row sets span the same subspace."""
    a = EchelonBasis(nvars, rows_a)
    b = EchelonBasis(nvars, rows_b)
    if len(a) != len(b):
        return False
    return all(a.contains(r) for r in b.rows)


def intersect_spans(rows_a: Iterable[int], rows_b: Iterable[int], nvars: int) -> list[int]:
    """Basis of span(rows_a) intersected with span(rows_b) (Zassenhaus)."""
    w = nvars + 1
    d: dict[int, int] = {}
    for a in rows_a:
        msb_insert(d, (a << w) | a)
    for b in rows_b:
        msb_insert(d, b << w)
    low = (1 << w) - 1
    return [row & low for b, row in d.items() if b < w and row & low]
