"""
Independent ground truth for the homology engine.

Behavior:
- HochschildComplex is the normalized Hochschild complex of A_+ with
  coefficients in M, coded directly on words m|a_1|...|a_l. Its degree is
  l + |m| + sum |a_i|. The reduced variant drops the length-0 chains M and
  is a quotient complex; the level-1 twisted complex in degree d matches it
  in degree d + 1.
- dense_homology_oracle() recomputes ranks from dense numpy object arrays by
  textbook Gaussian elimination, and integer invariant factors with sympy.

Hochschild differential on m|a_1|...|a_l:
    b  = (m.a_1)|a_2..a_l + sum_i (-1)^i m|..|a_i a_{i+1}|..
         + (-1)^(l + |a_l|(|m| + |a_1| + ... + |a_{l-1}|)) (a_l.m)|a_1..a_{l-1}
    internal = d_M m|.. + sum_i (-1)^(|m| + |a_1| + ... + |a_{i-1}|) m|..|d a_i|..
    total = b + (-1)^l internal

Notes:
- Nothing here uses the bar complex or twist helpers.
- Dense reduction refuses spaces above DENSE_ORACLE_MAX_DIM.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from sympy import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors

from .algdata import AlgebraPresentation, BimodulePresentation
from .coeff import CoefficientRing, SparseMatrix, RATIONALS_KIND
from .config import DENSE_ORACLE_MAX_DIM, max_basis_size
from .errors import InvariantError, ResourceError
from .homcalc import DegreeRow, HomologyTable, homology_table

logger = logging.getLogger(__name__)

Word = Tuple[int, Tuple[int, ...]]


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


def _accumulate(acc: Dict[Word, Fraction], key: Word, value) -> None:
    total = acc.get(key, 0) + value
    if total:
        acc[key] = total
    else:
        acc.pop(key, None)


@dataclass(frozen=True)
class HochschildComplex:
    """Normalized Hochschild chains of A_+ with coefficients in M."""

    ring: CoefficientRing
    degrees: Tuple[int, ...]
    bases: Mapping[int, Sequence[Word]]
    differentials: Mapping[int, SparseMatrix]
    metadata: Mapping[str, Any] = field(default_factory=dict)
    edge_degrees: FrozenSet[int] = frozenset()
    mode: str = 'homology'
    step: int = -1

    def dimension(self, d: int) -> int:
        return len(self.bases.get(d, ()))

    def outgoing(self, d: int) -> SparseMatrix:
        matrix = self.differentials.get(d)
        return matrix if matrix is not None else SparseMatrix.zero(self.dimension(d - 1), self.dimension(d))

    def incoming(self, d: int) -> SparseMatrix:
        matrix = self.differentials.get(d + 1)
        return matrix if matrix is not None else SparseMatrix.zero(self.dimension(d), self.dimension(d + 1))

    def format_generator(self, g: Word) -> str:
        return repr(g)


def _words(A: AlgebraPresentation, length: int, total: int) -> List[Tuple[int, ...]]:
    if length == 0:
        return [()] if total == 0 else []
    out = []
    for a in range(len(A)):
        if A.degree(a) <= total:
            out.extend((a,) + rest for rest in _words(A, length - 1, total - A.degree(a)))
    return out


def _chains(A: AlgebraPresentation, M: BimodulePresentation, degree: int, reduced: bool = False) -> List[Word]:
    out = []
    for m in range(len(M)):
        budget = degree - M.degree(m)
        for length in range(1 if reduced else 0, budget + 1):
            out.extend((m, w) for w in _words(A, length, budget - length))
    return out


def hochschild_boundary(A: AlgebraPresentation, M: BimodulePresentation, chain: Word) -> Dict[Word, Fraction]:
    m, word = chain
    length = len(word)
    out: Dict[Word, Fraction] = {}
    if length:
        first = word[0]
        # m.a = (-1)^(|a||m|) a.m
        right = _sign(A.degree(first) * M.degree(m))
        for m2, c in M.left(first, m).items():
            _accumulate(out, (m2, word[1:]), right * c)
        for i in range(length - 1):
            for k, c in A.multiply(word[i], word[i + 1]).items():
                _accumulate(out, (m, word[:i] + (k,) + word[i + 2:]), _sign(i + 1) * c)
        last = word[-1]
        passed = M.degree(m) + sum(A.degree(a) for a in word[:-1])
        cyclic = _sign(length + A.degree(last) * passed)
        for m2, c in M.left(last, m).items():
            _accumulate(out, (m2, word[:-1]), cyclic * c)
    outer = _sign(length)
    for m2, c in M.d(m).items():
        _accumulate(out, (m2, word), outer * c)
    passed = M.degree(m)
    for i, a in enumerate(word):
        for k, c in A.d(a).items():
            _accumulate(out, (m, word[:i] + (k,) + word[i + 1:]), outer * _sign(passed) * c)
        passed += A.degree(a)
    return out


def hochschild_complex(A: AlgebraPresentation, M: BimodulePresentation, max_degree: int,
                       ring: CoefficientRing, reduced: bool = False) -> HochschildComplex:
    lo = min(M.basis.degrees)
    degrees = tuple(range(lo, max_degree + 1))
    bound = max_basis_size()
    bases = {}
    for d in degrees:
        bases[d] = _chains(A, M, d, reduced)
        if len(bases[d]) > bound:
            raise ResourceError(f"Hochschild degree {d} has {len(bases[d])} chains, more than {bound}")
    differentials = {}
    for d in degrees:
        target_basis = bases.get(d - 1, _chains(A, M, d - 1, reduced))
        target = {w: i for i, w in enumerate(target_basis)}
        triples = []
        for col, chain in enumerate(bases[d]):
            for image, c in hochschild_boundary(A, M, chain).items():
                if reduced and not image[1]:
                    continue
                if image not in target:
                    raise InvariantError(f"Hochschild boundary of {chain} leaves degree {d - 1}")
                triples.append((target[image], col, ring.convert(c)))
        differentials[d] = SparseMatrix.from_entries(len(target_basis), len(bases[d]), triples, ring)
    for d in degrees[1:]:
        if not differentials[d - 1].matmul(differentials[d], ring).is_zero():
            raise InvariantError(f"Hochschild differential squares to nonzero from degree {d}")
    return HochschildComplex(
        ring=ring,
        degrees=degrees,
        bases=bases,
        differentials=differentials,
        metadata={'algebra': A.name, 'module': M.name, 'ring': ring.label, 'mode': 'hochschild',
                  'reduced': reduced},
        edge_degrees=frozenset(degrees[-1:]),
    )


def hochschild_homology(A: AlgebraPresentation, M: BimodulePresentation, max_degree: int,
                        ring: CoefficientRing, reduced: bool = False) -> HomologyTable:
    return homology_table(hochschild_complex(A, M, max_degree, ring, reduced))


# ---------------------------------------------------------------------------
# Dense reduction
# ---------------------------------------------------------------------------

def _dense(matrix: SparseMatrix, ring: CoefficientRing) -> np.ndarray:
    out = np.zeros((matrix.rows, matrix.cols), dtype=object)
    zero = ring.zero
    out[:, :] = zero
    for (r, c), v in matrix.entries.items():
        out[r, c] = ring.convert(v) if ring.kind == RATIONALS_KIND else ring.normalize(int(Fraction(v)))
    return out


def dense_rank(matrix: SparseMatrix, ring: CoefficientRing) -> int:
    """Rank over a field by full-pivot-search Gaussian elimination on a dense array."""
    R = _dense(matrix, ring)
    rows, cols = R.shape
    rank = 0
    for col in range(cols):
        pivot = next((r for r in range(rank, rows) if not ring.is_zero(R[r, col])), None)
        if pivot is None:
            continue
        if pivot != rank:
            R[[rank, pivot]] = R[[pivot, rank]]
        inv = ring.inverse(R[rank, col])
        R[rank] = np.array([ring.mul(v, inv) for v in R[rank]], dtype=object)
        for r in range(rows):
            if r != rank and not ring.is_zero(R[r, col]):
                factor = R[r, col]
                R[r] = np.array([ring.sub(a, ring.mul(factor, b)) for a, b in zip(R[r], R[rank])], dtype=object)
        rank += 1
        if rank == rows:
            break
    return rank


def dense_invariant_factors(matrix: SparseMatrix) -> Tuple[int, ...]:
    """Nonzero invariant factors of an integer matrix, via sympy."""
    if not matrix.rows or not matrix.cols or matrix.is_zero():
        return ()
    data = [[ZZ(int(Fraction(v))) for v in row] for row in matrix.to_dense()]
    factors = invariant_factors(DomainMatrix(data, matrix.shape, ZZ))
    return tuple(abs(int(f)) for f in factors if f != 0)


def dense_homology_oracle(matrices: Mapping[int, SparseMatrix], ring: CoefficientRing,
                          dims: Optional[Mapping[int, int]] = None) -> HomologyTable:
    """Homology of the chain complex whose differential out of degree d is matrices[d].

    Dimensions come from the matrices unless given; a degree without an
    incoming matrix is an edge.
    """
    dims = dict(dims) if dims is not None else {}
    for d, m in matrices.items():
        dims.setdefault(d, m.cols)
        if m.cols != dims[d]:
            raise InvariantError(f"matrix out of degree {d} has {m.cols} columns, expected {dims[d]}")
    for d, m in matrices.items():
        if d - 1 in dims and m.rows != dims[d - 1]:
            raise InvariantError(f"matrix out of degree {d} has {m.rows} rows, expected {dims[d - 1]}")
    for d, size in dims.items():
        if size > DENSE_ORACLE_MAX_DIM:
            raise ResourceError(f"dense oracle limited to dimension {DENSE_ORACLE_MAX_DIM}, degree {d} has {size}")
    rows = []
    for d in sorted(dims):
        dim = dims[d]
        out = matrices.get(d)
        inc = matrices.get(d + 1)
        if ring.is_field:
            cycles = dim - (dense_rank(out, ring) if out is not None else 0)
            boundaries = dense_rank(inc, ring) if inc is not None else 0
            torsion: Tuple[int, ...] = ()
        else:
            rational = CoefficientRing(RATIONALS_KIND)
            cycles = dim - (dense_rank(out, rational) if out is not None else 0)
            factors = dense_invariant_factors(inc) if inc is not None else ()
            boundaries = len(factors)
            torsion = tuple(f for f in factors if f != 1)
        rows.append(DegreeRow(d, dim, cycles, boundaries, cycles - boundaries, torsion,
                              edge=(d + 1) not in dims))
    return HomologyTable(rows, {'ring': ring.label, 'mode': 'dense-oracle'})
