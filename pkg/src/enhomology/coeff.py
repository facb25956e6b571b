"""
Exact coefficient arithmetic and sparse matrix reduction.

Behavior:
- CoefficientRing wraps the three supported ground rings: the rationals
  (arbitrary-precision Fraction), a prime field F_p (machine-word residues,
  p < 2^31) and the integers.
- SparseMatrix stores only nonzero entries, keyed by (row, col).
- rank() eliminates sparsely with a Markowitz-style pivot choice (sparsest
  column first, then the sparsest row inside it).
- smith_normal_form() diagonalises an integer matrix by alternating row and
  column reduction around a minimal pivot, then repairs the divisibility
  chain with gcd/lcm swaps.

Notes:
- No floating point anywhere.
- Integer SNF refuses matrices wider than the configured column bound.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Any, Dict, Iterable, List, Optional, Tuple

from sympy import isprime

from .config import DEFAULT_SNF_MAX_COLUMNS, MAX_PRIME, RING_PRESETS
from .errors import InvariantError, ResourceError, RingError, SchemaError

logger = logging.getLogger(__name__)

RATIONALS_KIND = 'rationals'
PRIME_FIELD_KIND = 'prime_field'
INTEGERS_KIND = 'integers'


@dataclass(frozen=True)
class CoefficientRing:
    kind: str
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind not in (RATIONALS_KIND, PRIME_FIELD_KIND, INTEGERS_KIND):
            raise SchemaError(f"unknown ring kind {self.kind!r}")
        if self.kind == PRIME_FIELD_KIND:
            if self.p is None or not isprime(self.p):
                raise SchemaError(f"prime field needs a prime characteristic, got {self.p!r}")
            if self.p >= MAX_PRIME:
                raise SchemaError(f"characteristic {self.p} does not fit a machine word")
        elif self.p is not None:
            raise SchemaError(f"{self.kind} takes no characteristic")

    @property
    def is_field(self) -> bool:
        return self.kind != INTEGERS_KIND

    @property
    def label(self) -> str:
        if self.kind == PRIME_FIELD_KIND:
            return f"f:{self.p}"
        return 'q' if self.kind == RATIONALS_KIND else 'z'

    @property
    def zero(self):
        return Fraction(0) if self.kind == RATIONALS_KIND else 0

    @property
    def one(self):
        return Fraction(1) if self.kind == RATIONALS_KIND else 1

    def convert(self, value) -> Any:
        """Map an exact rational scalar into this ring."""
        value = Fraction(value)
        if self.kind == RATIONALS_KIND:
            return value
        if self.kind == INTEGERS_KIND:
            if value.denominator != 1:
                raise RingError(f"scalar {value} is not an integer")
            return value.numerator
        den = value.denominator % self.p
        if den == 0:
            raise RingError(f"scalar {value} has a denominator divisible by {self.p}")
        return (value.numerator * pow(den, -1, self.p)) % self.p

    def normalize(self, x):
        if self.kind == PRIME_FIELD_KIND:
            return x % self.p
        return x

    def is_zero(self, x) -> bool:
        if self.kind == PRIME_FIELD_KIND:
            return x % self.p == 0
        return x == 0

    def add(self, a, b):
        return self.normalize(a + b)

    def sub(self, a, b):
        return self.normalize(a - b)

    def mul(self, a, b):
        return self.normalize(a * b)

    def inverse(self, a):
        if self.is_zero(a):
            raise ZeroDivisionError("inverse of zero")
        if self.kind == RATIONALS_KIND:
            return 1 / Fraction(a)
        if self.kind == PRIME_FIELD_KIND:
            return pow(int(a), -1, self.p)
        if a in (1, -1):
            return a
        raise RingError(f"{a} is not a unit of the integers")


RATIONALS = CoefficientRing(RATIONALS_KIND)
INTEGERS = CoefficientRing(INTEGERS_KIND)


def prime_field(p: int) -> CoefficientRing:
    return CoefficientRing(PRIME_FIELD_KIND, p)


def parse_ring(text: str) -> CoefficientRing:
    """Parse the --ring spelling: q, z or f:P."""
    spelled = text.strip().lower()
    head, _, tail = spelled.partition(':')
    kind = RING_PRESETS.get(head)
    if kind is None:
        raise SchemaError(f"unknown ring {text!r}; expected q, z or f:P")
    if kind == PRIME_FIELD_KIND:
        try:
            return prime_field(int(tail))
        except ValueError:
            raise SchemaError(f"bad prime in ring {text!r}") from None
    if tail:
        raise SchemaError(f"ring {head!r} takes no parameter")
    return CoefficientRing(kind)


@dataclass(frozen=True)
class SparseMatrix:
    rows: int
    cols: int
    entries: Dict[Tuple[int, int], Any] = field(default_factory=dict)

    def __post_init__(self):
        for (r, c), v in self.entries.items():
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise InvariantError(f"entry ({r}, {c}) outside a {self.rows}x{self.cols} matrix")
            if v == 0:
                raise InvariantError(f"stored zero at ({r}, {c})")

    @classmethod
    def from_entries(cls, rows: int, cols: int, triples: Iterable[Tuple[int, int, Any]],
                     ring: Optional[CoefficientRing] = None) -> "SparseMatrix":
        """Accumulate (row, col, value) triples, merging duplicates and dropping zeros."""
        acc: Dict[Tuple[int, int], Any] = {}
        for r, c, v in triples:
            acc[(r, c)] = acc.get((r, c), 0) + v
        if ring is not None:
            acc = {k: ring.normalize(v) for k, v in acc.items()}
        return cls(rows, cols, {k: v for k, v in acc.items() if v != 0})

    @classmethod
    def from_dense(cls, data: List[List[Any]], ring: Optional[CoefficientRing] = None) -> "SparseMatrix":
        rows = len(data)
        cols = len(data[0]) if rows else 0
        triples = ((r, c, v) for r, line in enumerate(data) for c, v in enumerate(line))
        return cls.from_entries(rows, cols, triples, ring)

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols, {})

    @classmethod
    def identity(cls, size: int, ring: CoefficientRing = RATIONALS) -> "SparseMatrix":
        return cls(size, size, {(i, i): ring.one for i in range(size)})

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def nnz(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not self.entries

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self.entries.items()})

    def to_dense(self) -> List[List[Any]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def row_dicts(self) -> Dict[int, Dict[int, Any]]:
        rows: Dict[int, Dict[int, Any]] = defaultdict(dict)
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return dict(rows)

    def matmul(self, other: "SparseMatrix", ring: CoefficientRing) -> "SparseMatrix":
        if self.cols != other.rows:
            raise InvariantError(f"cannot compose {self.shape} with {other.shape}")
        right = other.row_dicts()
        acc: Dict[Tuple[int, int], Any] = defaultdict(int)
        for (i, k), v in self.entries.items():
            for j, w in right.get(k, {}).items():
                acc[(i, j)] += v * w
        return SparseMatrix.from_entries(self.rows, other.cols,
                                         ((i, j, v) for (i, j), v in acc.items()), ring)

    def permuted(self, row_perm: List[int], col_perm: List[int]) -> "SparseMatrix":
        """Entry (r, c) moves to (row_perm[r], col_perm[c])."""
        return SparseMatrix(self.rows, self.cols,
                            {(row_perm[r], col_perm[c]): v for (r, c), v in self.entries.items()})


def _column_index(rows: Dict[int, Dict[int, Any]]) -> Dict[int, set]:
    cols: Dict[int, set] = defaultdict(set)
    for r, row in rows.items():
        for c in row:
            cols[c].add(r)
    return cols


def rank(m: SparseMatrix, ring: CoefficientRing) -> int:
    """Rank of m over a field, by sparse Gaussian elimination."""
    if not ring.is_field:
        raise RingError("rank needs a field; use smith_normal_form over the integers")
    rows = {r: {c: ring.normalize(v) for c, v in row.items() if not ring.is_zero(v)}
            for r, row in m.row_dicts().items()}
    rows = {r: row for r, row in rows.items() if row}
    cols = _column_index(rows)
    result = 0
    while cols:
        c = min(cols, key=lambda k: (len(cols[k]), k))
        if not cols[c]:
            del cols[c]
            continue
        r = min(cols[c], key=lambda k: (len(rows[k]), k))
        pivot_row = rows.pop(r)
        for cc in pivot_row:
            cols[cc].discard(r)
        inv = ring.inverse(pivot_row[c])
        for other in list(cols[c]):
            row = rows[other]
            factor = ring.mul(row[c], inv)
            for cc, v in pivot_row.items():
                new = ring.sub(row.get(cc, 0), ring.mul(factor, v))
                if ring.is_zero(new):
                    if cc in row:
                        del row[cc]
                        cols[cc].discard(other)
                else:
                    if cc not in row:
                        cols[cc].add(other)
                    row[cc] = new
        for cc in list(pivot_row):
            if not cols.get(cc, True):
                del cols[cc]
        result += 1
    return result


def _integer_rows(m: SparseMatrix) -> Dict[int, Dict[int, int]]:
    rows: Dict[int, Dict[int, int]] = {}
    for r, row in m.row_dicts().items():
        converted = {}
        for c, v in row.items():
            v = Fraction(v)
            if v.denominator != 1:
                raise RingError(f"Smith normal form needs integer entries, got {v}")
            if v:
                converted[c] = v.numerator
        if converted:
            rows[r] = converted
    return rows


def _divisibility_chain(diagonal: List[int]) -> Tuple[int, ...]:
    d = sorted(diagonal)
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = gcd(d[i], d[j])
            d[i], d[j] = g, d[i] * d[j] // g
    return tuple(d)


def smith_normal_form(m: SparseMatrix, max_columns: int = DEFAULT_SNF_MAX_COLUMNS) -> Tuple[int, ...]:
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix."""
    if m.cols > max_columns:
        raise ResourceError(f"Smith normal form limited to {max_columns} columns, matrix has {m.cols}")
    rows = _integer_rows(m)
    cols = _column_index(rows)

    def set_entry(r: int, c: int, value: int) -> None:
        if value:
            rows[r][c] = value
            cols[c].add(r)
        elif c in rows[r]:
            del rows[r][c]
            cols[c].discard(r)

    diagonal: List[int] = []
    while rows:
        r, c = min(
            ((rr, cc) for rr, row in rows.items() for cc in row),
            key=lambda rc: (abs(rows[rc[0]][rc[1]]),
                            (len(rows[rc[0]]) - 1) * (len(cols[rc[1]]) - 1), rc),
        )
        while True:
            piv = rows[r][c]
            for other in sorted(cols[c] - {r}):
                q = rows[other][c] // piv
                for cc, v in list(rows[r].items()):
                    set_entry(other, cc, rows[other].get(cc, 0) - q * v)
            rest = cols[c] - {r}
            if rest:
                r = min(rest, key=lambda k: (abs(rows[k][c]), k))
                continue
            for cc in sorted(set(rows[r]) - {c}):
                set_entry(r, cc, rows[r][cc] - (rows[r][cc] // piv) * piv)
            rest = set(rows[r]) - {c}
            if rest:
                c = min(rest, key=lambda k: (abs(rows[r][k]), k))
                continue
            break
        diagonal.append(abs(rows[r][c]))
        del rows[r]
        del cols[c]
        for row_id in [k for k, row in rows.items() if not row]:
            del rows[row_id]
    return _divisibility_chain(diagonal)


@dataclass(frozen=True)
class HomologyRanks:
    dim: int
    cycles: int
    boundaries: int
    betti: int
    torsion: Tuple[int, ...] = ()


def homology_ranks(d_in: SparseMatrix, d_out: SparseMatrix, ring: CoefficientRing,
                   check: bool = True, snf_max_columns: int = DEFAULT_SNF_MAX_COLUMNS) -> HomologyRanks:
    """Ranks of the homology at the space between d_in (incoming) and d_out (outgoing)."""
    dim = d_out.cols
    if d_in.rows != dim:
        raise InvariantError(f"incoming map lands in dimension {d_in.rows}, outgoing starts at {dim}")
    if check and not d_out.matmul(d_in, ring).is_zero():
        raise InvariantError("composition-nonzero: consecutive differentials do not compose to zero")
    if ring.is_field:
        cycles = dim - rank(d_out, ring)
        boundaries = rank(d_in, ring)
        return HomologyRanks(dim, cycles, boundaries, cycles - boundaries)
    cycles = dim - rank(d_out, RATIONALS)
    factors = smith_normal_form(d_in, snf_max_columns)
    boundaries = len(factors)
    torsion = tuple(f for f in factors if f != 1)
    return HomologyRanks(dim, cycles, boundaries, cycles - boundaries, torsion)


def homology_dims(d_in: SparseMatrix, d_out: SparseMatrix, ring: CoefficientRing) -> Tuple[int, List[int]]:
    """(free rank, torsion invariant factors) of ker(d_out) / im(d_in)."""
    ranks = homology_ranks(d_in, d_out, ring)
    return ranks.betti, list(ranks.torsion)
