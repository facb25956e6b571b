"""
Twisted complexes with coefficients in a symmetric bimodule.

Behavior:
- theta_on_basis() is the coefficient twist: for every top fiber with at
  least two leaves it deletes the min leaf (coefficient m becomes m.a) and
  the max leaf (coefficient becomes a.m), with the edge-index sign of
  treecomb.theta_deletions() and a Koszul sign for moving the label past the
  labels before it.
- assemble_homology_complex() builds M (x) bar complex with
  d = d_q + theta + (-1)^q (d_M (x) 1 + (-1)^|m| 1 (x) d_p), degree by degree.
- assemble_cohomology_complex() contracts the universal complex with
  coefficients in A_+ against M; the cochain in degree k pairs a bar element
  x with a module element m, |x| - |m| = k.
- assemble_bar_complex() packages the untwisted bar complex alone.

Notes:
- Every complex is checked for d^2 = 0 after assembly; a failure raises
  InvariantError.
- The top degree of the range is an edge: its incoming differential lies
  outside the range, so its cycle rank only bounds the homology from above.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Callable, Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .algdata import (
    AlgebraPresentation,
    BimodulePresentation,
    add_into,
    koszul,
    load_and_validate_algebra,
    trivial_algebra,
    unital_extension,
)
from .barcplx import BarComplex, LabeledBarElement, bar_differential
from .coeff import CoefficientRing, SparseMatrix
from .errors import InvariantError, ResourceError, RingError
from .treecomb import LevelTree, delete_leaf, theta_deletions

logger = logging.getLogger(__name__)

HOMOLOGY = 'homology'
COHOMOLOGY = 'cohomology'

Generator = Tuple[int, LabeledBarElement]


@dataclass(frozen=True)
class TwistedComplex:
    """Bases and differentials of a bounded chain or cochain complex.

    differentials[d] starts in degree d: it lowers the degree in homology
    mode and raises it in cohomology mode. A missing entry means the map
    leaves the assembled range.
    """

    ring: CoefficientRing
    mode: str
    degrees: Tuple[int, ...]
    bases: Mapping[int, Sequence[Any]]
    differentials: Mapping[int, SparseMatrix]
    metadata: Mapping[str, Any] = field(default_factory=dict)
    edge_degrees: FrozenSet[int] = frozenset()
    formatter: Optional[Callable[[Any], str]] = field(default=None, compare=False, repr=False)

    @property
    def step(self) -> int:
        return -1 if self.mode == HOMOLOGY else 1

    def dimension(self, d: int) -> int:
        return len(self.bases.get(d, ()))

    def outgoing(self, d: int) -> SparseMatrix:
        matrix = self.differentials.get(d)
        if matrix is None:
            return SparseMatrix.zero(self.dimension(d + self.step), self.dimension(d))
        return matrix

    def incoming(self, d: int) -> SparseMatrix:
        matrix = self.differentials.get(d - self.step)
        if matrix is None:
            return SparseMatrix.zero(self.dimension(d), self.dimension(d - self.step))
        return matrix

    def format_generator(self, g: Any) -> str:
        return self.formatter(g) if self.formatter is not None else repr(g)

    def permuted(self, perms: Mapping[int, Sequence[int]]) -> "TwistedComplex":
        """Reorder the bases; perms[d][i] is the new position of basis element i."""
        bases = {}
        for d, basis in self.bases.items():
            perm = perms.get(d, range(len(basis)))
            new = [None] * len(basis)
            for i, g in enumerate(basis):
                new[perm[i]] = g
            bases[d] = new
        identity = {d: list(range(len(b))) for d, b in self.bases.items()}
        differentials = {}
        for d, matrix in self.differentials.items():
            rows = perms.get(d + self.step, identity.get(d + self.step, []))
            cols = perms.get(d, identity[d])
            differentials[d] = matrix.permuted(list(rows), list(cols))
        return replace(self, bases=bases, differentials=differentials)

    def matrix_sizes(self) -> Dict[int, Tuple[int, int]]:
        return {d: m.shape for d, m in sorted(self.differentials.items())}


def _prefix_degrees(A: AlgebraPresentation, labels: Sequence[int]) -> List[int]:
    out = []
    passed = 0
    for a in labels:
        out.append(passed)
        passed += A.degree(a)
    return out


def theta_on_basis(m: int, el: LabeledBarElement, A: AlgebraPresentation,
                   M: BimodulePresentation) -> Dict[Generator, Fraction]:
    """The coefficient twist of m (x) el, as a combination of (module index, element)."""
    out: Dict[Generator, Fraction] = {}
    prefix = _prefix_degrees(A, el.labels)
    for leaf, sign, is_min in theta_deletions(el.tree):
        a = el.labels[leaf]
        rest = LabeledBarElement(delete_leaf(el.tree, leaf), el.labels[:leaf] + el.labels[leaf + 1:])
        if is_min:
            coefficient = M.right(m, a)
            sign *= koszul(A.degree(a) * prefix[leaf])
        else:
            coefficient = M.left(a, m)
            sign *= koszul(A.degree(a) * (M.degree(m) + prefix[leaf]))
        for m2, c in coefficient.items():
            add_into(out, {(m2, rest): c}, sign)
    return out


class TwistedDifferential:
    """Differential of M (x) bar complex, generator by generator."""

    def __init__(self, A: AlgebraPresentation, M: BimodulePresentation, n: int,
                 bar: Optional[BarComplex] = None):
        self.A = A
        self.M = M
        self.n = n
        self.bar = bar if bar is not None else BarComplex(A, n)

    def basis(self, d: int) -> List[Generator]:
        return [(m, x) for m in range(len(self.M)) for x in self.bar.basis(d - self.M.degree(m))]

    def __call__(self, m: int, x: LabeledBarElement) -> Dict[Generator, Fraction]:
        out: Dict[Generator, Fraction] = {}
        for y, c in self.bar.d_q(x).items():
            add_into(out, {(m, y): c})
        add_into(out, theta_on_basis(m, x, self.A, self.M))
        sign = koszul(x.q)
        for m2, c in self.M.d(m).items():
            add_into(out, {(m2, x): c}, sign)
        sign *= koszul(self.M.degree(m))
        for y, c in self.bar.d_p(x).items():
            add_into(out, {(m, y): c}, sign)
        return out

    def format(self, g: Generator) -> str:
        m, x = g
        return f"{self.M.basis.names[m]}|{x.format(self.A)}"


def _run_per_degree(work: Callable[[int], Any], degrees: Sequence[int], jobs: int) -> Dict[int, Any]:
    if jobs <= 1 or len(degrees) <= 1:
        return {d: work(d) for d in degrees}
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = {d: pool.submit(work, d) for d in degrees}
        return {d: futures[d].result() for d in sorted(futures)}


def _check_size(bases: Mapping[int, Sequence[Any]], bound: int) -> None:
    for d, basis in bases.items():
        if len(basis) > bound:
            raise ResourceError(f"degree {d} has {len(basis)} generators, more than the bound {bound}")


def verify_square_zero(c: TwistedComplex) -> None:
    """Raise InvariantError unless consecutive differentials compose to zero."""
    for d in c.degrees:
        first = c.differentials.get(d)
        second = c.differentials.get(d + c.step)
        if first is None or second is None:
            continue
        if not second.matmul(first, c.ring).is_zero():
            raise InvariantError(f"d^2 != 0 starting in degree {d} ({c.mode} complex)")


def _homology_matrix(diff: TwistedDifferential, bases: Mapping[int, List[Generator]],
                     d: int, ring: CoefficientRing) -> SparseMatrix:
    source = bases[d]
    target_basis = bases.get(d - 1)
    if target_basis is None:
        target_basis = diff.basis(d - 1)
    target = {g: i for i, g in enumerate(target_basis)}
    triples = []
    for col, (m, x) in enumerate(source):
        for g, c in diff(m, x).items():
            row = target.get(g)
            if row is None:
                raise InvariantError(f"degree mismatch: {diff.format((m, x))} maps to {diff.format(g)}")
            triples.append((row, col, ring.convert(c)))
    return SparseMatrix.from_entries(len(target_basis), len(source), triples, ring)


def _module_range(M: BimodulePresentation) -> Tuple[int, int]:
    degrees = M.basis.degrees
    return min(degrees), max(degrees)


def assemble_homology_complex(A: AlgebraPresentation, M: BimodulePresentation, n: int, max_degree: int,
                              ring: CoefficientRing, jobs: int = 1, check: bool = True,
                              max_basis: Optional[int] = None) -> TwistedComplex:
    """B^[n](A, M) in degrees min|m| .. max_degree."""
    bar = BarComplex(A, n, max_basis)
    diff = TwistedDifferential(A, M, n, bar)
    lo, _ = _module_range(M)
    degrees = tuple(range(lo, max_degree + 1))
    bases = _run_per_degree(diff.basis, degrees, jobs)
    _check_size(bases, bar.max_basis)
    logger.info("homology complex n=%d: dims %s", n, {d: len(b) for d, b in bases.items()})
    differentials = _run_per_degree(lambda d: _homology_matrix(diff, bases, d, ring), degrees, jobs)
    complex_ = TwistedComplex(
        ring=ring,
        mode=HOMOLOGY,
        degrees=degrees,
        bases=bases,
        differentials=differentials,
        metadata={'algebra': A.name, 'module': M.name, 'n': n, 'ring': ring.label, 'mode': HOMOLOGY},
        edge_degrees=frozenset(degrees[-1:]),
        formatter=diff.format,
    )
    if check:
        verify_square_zero(complex_)
    return complex_


def assemble_bar_complex(A: AlgebraPresentation, n: int, max_degree: int, ring: CoefficientRing,
                         jobs: int = 1, check: bool = True) -> TwistedComplex:
    """The untwisted desuspended bar complex, generators (0, element)."""
    bar = BarComplex(A, n)
    degrees = tuple(range(0, max_degree + 1))
    bases = _run_per_degree(lambda d: [(0, x) for x in bar.basis(d)], degrees, jobs)
    differentials = _run_per_degree(lambda d: bar_differential(bar, d, ring), degrees, jobs)
    complex_ = TwistedComplex(
        ring=ring,
        mode=HOMOLOGY,
        degrees=degrees,
        bases=bases,
        differentials=differentials,
        metadata={'algebra': A.name, 'module': None, 'n': n, 'ring': ring.label, 'mode': 'bar'},
        edge_degrees=frozenset(degrees[-1:]),
        formatter=lambda g: g[1].format(A),
    )
    if check:
        verify_square_zero(complex_)
    return complex_


def _act(U: BimodulePresentation, M: BimodulePresentation, u: int, m: int) -> Dict[int, Fraction]:
    a = U.algebra_part[u]
    if a is None:
        return {m: Fraction(1)}
    return M.left(a, m)


def assemble_cohomology_complex(A: AlgebraPresentation, M: BimodulePresentation, n: int, max_degree: int,
                                ring: CoefficientRing, jobs: int = 1, check: bool = True,
                                max_basis: Optional[int] = None) -> TwistedComplex:
    """Hom over A_+ from the universal complex into M, in degrees -max|m| .. max_degree.

    The universal complex is first conjugated by u (x) x -> (-1)^(|u| q(x)),
    which makes its differential A_+-linear for the Koszul rule; then for a
    cochain f = x'* (x) m of degree k,
        delta f = x'* (x) d_M m - (-1)^k sum c (-1)^(k |u|) x* (x) u.m
    over the terms c u (x) x' of d(1 (x) x).
    """
    if not ring.is_field:
        raise RingError("cohomology is only computed over a field")
    U = unital_extension(A)
    bar = BarComplex(A, n, max_basis)
    universal = TwistedDifferential(A, U, n, bar)
    lo, hi_m = -_module_range(M)[1], _module_range(M)[1]
    degrees = tuple(range(lo, max_degree + 1))

    def cochain_basis(k: int) -> List[Tuple[LabeledBarElement, int]]:
        return [(x, m) for m in range(len(M)) for x in bar.basis(k + M.degree(m))]

    bases = _run_per_degree(cochain_basis, degrees, jobs)
    _check_size(bases, bar.max_basis)
    index = {k: {g: i for i, g in enumerate(b)} for k, b in bases.items()}
    logger.info("cohomology complex n=%d: dims %s", n, {k: len(b) for k, b in bases.items()})

    def universal_terms(j: int) -> List[Tuple[LabeledBarElement, Dict[Generator, Fraction]]]:
        out = []
        for x in bar.basis(j):
            terms = {}
            for (u, y), c in universal(0, x).items():
                add_into(terms, {(u, y): c}, koszul(U.degree(u) * y.q))
            out.append((x, terms))
        return out

    bar_degrees = tuple(range(0, max_degree + hi_m + 1))
    universal_by_degree = _run_per_degree(universal_terms, bar_degrees, jobs)

    triples: Dict[int, List[Tuple[int, int, Any]]] = {k: [] for k in degrees[:-1]}
    for k in degrees[:-1]:
        for col, (y, m) in enumerate(bases[k]):
            for m2, c in M.d(m).items():
                triples[k].append((index[k + 1][(y, m2)], col, ring.convert(c)))
    for j in bar_degrees:
        for x, terms in universal_by_degree[j]:
            for (u, y), c in terms.items():
                for m in range(len(M)):
                    k = j - 1 - U.degree(u) - M.degree(m)
                    if k not in triples:
                        continue
                    col = index[k].get((y, m))
                    if col is None:
                        raise InvariantError(f"cochain {y.format(A)}|{M.basis.names[m]} missing in degree {k}")
                    sign = -koszul(k) * koszul(k * U.degree(u))
                    for m2, a in _act(U, M, u, m).items():
                        row = index[k + 1][(x, m2)]
                        triples[k].append((row, col, ring.convert(sign * c * a)))
    differentials = {
        k: SparseMatrix.from_entries(len(bases[k + 1]), len(bases[k]), triples[k], ring)
        for k in degrees[:-1]
    }

    def fmt(g: Tuple[LabeledBarElement, int]) -> str:
        x, m = g
        return f"{x.format(A)}*|{M.basis.names[m]}"

    complex_ = TwistedComplex(
        ring=ring,
        mode=COHOMOLOGY,
        degrees=degrees,
        bases=bases,
        differentials=differentials,
        metadata={'algebra': A.name, 'module': M.name, 'n': n, 'ring': ring.label, 'mode': COHOMOLOGY},
        edge_degrees=frozenset(degrees[-1:]),
        formatter=fmt,
    )
    if check:
        verify_square_zero(complex_)
    return complex_


# ---------------------------------------------------------------------------
# Worked example
# ---------------------------------------------------------------------------

GOLDEN_TREE = "[2];[3,2]"
GOLDEN_DEGREE_VARIANTS = (
    (0, 0, 0, 0, 0),
    (1, 0, 0, 1, 0),
    (0, 1, 1, 0, 0),
    (1, 0, 0, 0, 1),
    (1, 1, 1, 1, 1),
)
# None is the unit of A_+; an odd u pins the Koszul sign of the coefficient
GOLDEN_COEFFICIENT_DEGREES = (None, 1)


@dataclass(frozen=True)
class GoldenCheck:
    degrees: Tuple[int, ...]
    computed: Mapping[Generator, Fraction]
    expected: Mapping[Generator, Fraction]
    formatter: Callable[[Generator], str] = field(compare=False, repr=False)
    coefficient_degree: Optional[int] = None

    @property
    def matches(self) -> bool:
        return dict(self.computed) == dict(self.expected)

    @property
    def label(self) -> str:
        unit = "unit" if self.coefficient_degree is None else f"|u|={self.coefficient_degree}"
        return f"degrees {list(self.degrees)}, {unit}"

    def describe(self, comb: Mapping[Generator, Fraction]) -> str:
        return " + ".join(f"{c}*{self.formatter(g)}" for g, c in sorted(comb.items())) or "0"


def _golden_algebra(degrees: Sequence[int], coefficient_degree: int) -> AlgebraPresentation:
    """a_0..a_4, a coefficient u and b_i = u a_i; every other product vanishes."""
    basis = [{'name': f"a{i}", 'degree': d} for i, d in enumerate(degrees)]
    basis.append({'name': 'u', 'degree': coefficient_degree})
    basis.extend({'name': f"b{i}", 'degree': coefficient_degree + d} for i, d in enumerate(degrees))
    products = [{'left': 'u', 'right': f"a{i}", 'result': [{'basis': f"b{i}", 'coeff': '1'}]}
                for i in range(len(degrees))]
    return load_and_validate_algebra({'basis': basis, 'products': products}, name="golden")


def golden_theta_example(degrees: Sequence[int] = GOLDEN_DEGREE_VARIANTS[0],
                         coefficient_degree: Optional[int] = None) -> GoldenCheck:
    """theta of u (x) t(a_0, ..., a_4) on the tree [2];[3,2], against the hand-expanded answer.

    With no coefficient degree u is the unit of A_+ over a zero-product
    algebra. Otherwise u is an algebra element of that degree with u a_i = b_i,
    so the left actions a_i.u = (-1)^(|a_i||u|) b_i carry the Koszul sign of
    moving a_i past u. Either way every term of the twist survives.
    """
    d = list(degrees)
    labels = tuple(range(5))
    if coefficient_degree is None:
        A = trivial_algebra(5, degrees)
        M = unital_extension(A)
        m = 0

        def target(leaf: int) -> int:
            return leaf + 1
    else:
        A = _golden_algebra(degrees, coefficient_degree)
        M = unital_extension(A)
        m = 1 + A.basis.index('u')

        def target(leaf: int) -> int:
            return 1 + A.basis.index(f"b{leaf}")
    tree = LevelTree.from_text(GOLDEN_TREE)
    u = M.degree(m)

    def term(leaf: int) -> Generator:
        rest = LabeledBarElement(delete_leaf(tree, leaf), labels[:leaf] + labels[leaf + 1:])
        return (target(leaf), rest)

    def left_action(leaf: int) -> int:
        # a.u = (-1)^(|a||u|) u a; for the unit both are a
        return 1 if coefficient_degree is None else koszul(d[leaf] * u)

    expected: Dict[Generator, Fraction] = {}
    # minimal leaves act on the right: u.a_0 and u.a_3
    add_into(expected, {term(0): Fraction(-1)})
    add_into(expected, {term(3): Fraction(-koszul(d[3] * (d[0] + d[1] + d[2])))})
    # maximal leaves act on the left, moving a_i past u and the labels before it
    add_into(expected, {term(2): Fraction(koszul(d[2] * (u + d[0] + d[1])) * left_action(2))})
    add_into(expected, {term(4): Fraction(-koszul(d[4] * (u + d[0] + d[1] + d[2] + d[3])) * left_action(4))})
    computed = theta_on_basis(m, LabeledBarElement(tree, labels), A, M)
    diff = TwistedDifferential(A, M, tree.n)
    return GoldenCheck(tuple(d), computed, expected, diff.format, coefficient_degree)
