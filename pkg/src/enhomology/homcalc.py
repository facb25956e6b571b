"""
Homology tables, d^2 audits and the finite-n stability scan.

Behavior:
- homology_table() reduces every degree of a complex independently and
  collects the rows in degree order.
- d_squared_check() multiplies consecutive differentials and reports the
  first nonzero entry instead of raising.
- stability_scan() recomputes one Betti number for n = 1 .. n_max.

Output:
    JSON  {"schema_version": 1, "metadata": {...}, "rows": [{"degree": 0, ...}]}
    TSV   degree  dim  cycles  boundaries  betti  torsion
Edge rows are kept, marked "edge" in JSON and listed in a leading TSV
comment; their Betti number is only an upper bound.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from .algdata import AlgebraPresentation, BimodulePresentation, format_scalar
from .coeff import CoefficientRing, HomologyRanks, homology_ranks
from .config import SCHEMA_VERSION
from .errors import InvariantError, SchemaError
from .twist import TwistedComplex, assemble_homology_complex

logger = logging.getLogger(__name__)

TSV_COLUMNS = ('degree', 'dim', 'cycles', 'boundaries', 'betti', 'torsion')
EDGE_NOTE = "edge: upper bound only (incoming differential outside the range)"


@dataclass(frozen=True)
class DegreeRow:
    degree: int
    dim: int
    cycles: int
    boundaries: int
    betti: int
    torsion: Tuple[int, ...] = ()
    edge: bool = False


@dataclass
class HomologyTable:
    rows: List[DegreeRow]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def row(self, degree: int) -> DegreeRow:
        for r in self.rows:
            if r.degree == degree:
                return r
        raise KeyError(degree)

    def betti(self, degree: int) -> int:
        return self.row(degree).betti

    def betti_numbers(self, exact_only: bool = False) -> Dict[int, int]:
        return {r.degree: r.betti for r in self.rows if not (exact_only and r.edge)}

    def to_dict(self) -> Dict[str, Any]:
        rows = []
        for r in self.rows:
            entry = asdict(r)
            entry['torsion'] = list(r.torsion)
            if r.edge:
                entry['note'] = EDGE_NOTE
            rows.append(entry)
        return {'schema_version': SCHEMA_VERSION, 'metadata': dict(self.metadata), 'rows': rows}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_tsv(self) -> str:
        lines = []
        edges = [str(r.degree) for r in self.rows if r.edge]
        if edges:
            lines.append(f"# edge degrees {','.join(edges)}: {EDGE_NOTE}")
        lines.append('\t'.join(TSV_COLUMNS))
        for r in self.rows:
            torsion = ','.join(str(t) for t in r.torsion)
            lines.append('\t'.join(str(v) for v in (r.degree, r.dim, r.cycles, r.boundaries, r.betti, torsion)))
        return '\n'.join(lines) + '\n'


def _row(c: TwistedComplex, d: int) -> DegreeRow:
    ranks: HomologyRanks = homology_ranks(c.incoming(d), c.outgoing(d), c.ring, check=False)
    return DegreeRow(d, ranks.dim, ranks.cycles, ranks.boundaries, ranks.betti, ranks.torsion,
                     d in c.edge_degrees)


def homology_table(c: TwistedComplex, jobs: int = 1) -> HomologyTable:
    degrees = list(c.degrees)
    if jobs <= 1 or len(degrees) <= 1:
        rows = [_row(c, d) for d in degrees]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {d: pool.submit(_row, c, d) for d in degrees}
            rows = [futures[d].result() for d in sorted(futures)]
    for r in rows:
        if r.betti < 0:
            raise InvariantError(f"negative Betti number in degree {r.degree}")
    metadata = dict(c.metadata)
    metadata['edge_degrees'] = sorted(c.edge_degrees)
    return HomologyTable(rows, metadata)


@dataclass(frozen=True)
class SquareZeroReport:
    clean: bool
    checked: int
    degree: Optional[int] = None
    row_element: Optional[str] = None
    column_element: Optional[str] = None
    value: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def d_squared_check(c: TwistedComplex) -> SquareZeroReport:
    """Audit every consecutive composite; report the first nonzero entry."""
    checked = 0
    for d in c.degrees:
        first = c.differentials.get(d)
        second = c.differentials.get(d + c.step)
        if first is None or second is None:
            continue
        checked += 1
        composite = second.matmul(first, c.ring)
        if composite.is_zero():
            continue
        (row, col), value = min(composite.entries.items())
        logger.warning("d^2 != 0 starting in degree %d", d)
        return SquareZeroReport(
            clean=False,
            checked=checked,
            degree=d,
            row_element=c.format_generator(c.bases[d + 2 * c.step][row]),
            column_element=c.format_generator(c.bases[d][col]),
            value=format_scalar(value) if c.ring.kind == 'rationals' else str(value),
        )
    return SquareZeroReport(clean=True, checked=checked)


@dataclass
class StabilityScan:
    degree: int
    rows: List[Tuple[int, int]]
    last_change: Optional[int]
    stable: bool
    label: str = "observed"

    def to_dict(self) -> Dict[str, Any]:
        return {
            'schema_version': SCHEMA_VERSION,
            'degree': self.degree,
            'rows': [{'n': n, 'betti': b} for n, b in self.rows],
            'last_change': self.last_change,
            'stable': self.stable,
            'label': self.label,
        }


def stability_scan(A: AlgebraPresentation, M: BimodulePresentation, degree: int, n_max: int,
                   ring: CoefficientRing, jobs: int = 1) -> StabilityScan:
    """Betti number in one degree for n = 1 .. n_max.

    Stability is observed, never proven: the last two values agree. n_max = 1
    is accepted and gives a single, trivially stable row.
    """
    if n_max < 1:
        raise SchemaError(f"n_max must be at least 1, got {n_max}")
    rows = []
    for n in range(1, n_max + 1):
        # one extra degree so the requested one is not an edge
        c = assemble_homology_complex(A, M, n, degree + 1, ring, jobs=jobs)
        if not c.degrees or degree < c.degrees[0]:
            betti = 0
        else:
            betti = homology_table(c, jobs).betti(degree)
        logger.info("stability scan n=%d degree %d: betti %d", n, degree, betti)
        rows.append((n, betti))
    last_change = None
    for (_, before), (n, after) in zip(rows, rows[1:]):
        if before != after:
            last_change = n
    stable = len(rows) == 1 or rows[-1][1] == rows[-2][1]
    return StabilityScan(degree, rows, last_change, stable)
