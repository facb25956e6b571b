"""
Barratt-Eccles chains, complete-graph cells and the twisting-cochain lift.

Behavior:
- A Barratt-Eccles tuple on a vertex set is a tuple of orderings
  (w_0, ..., w_l), each ordering listing the vertices first to last; l is
  the degree. Tuples with two equal neighbours are zero.
- be_differential(), psi(), iota() and nu() form the retract of the
  Barratt-Eccles operad onto Com: psi keeps degree-0 tuples, iota picks the
  canonical (ascending) ordering, nu appends it with sign (-1)^(l+1).
- variations_count(), e_kappa_membership() and en_membership() read the
  complete-graph cell structure off a tuple.
- theta_restriction_check() verifies that deleting a min or max leaf keeps a
  labeled tree inside the cell of its minimal complete graph.
- lift_twisting_cochain() transports a Com-valued twisting cochain on tree
  generators to a Barratt-Eccles-valued one, alpha = alpha_0 + alpha_1 + ...,
  alpha_0 = iota beta and alpha_m = nu (sum_{a+b=m-1} partial_{alpha_a} alpha_b),
  inside a truncation by arity, chain degree and leaf count.

Element format of the lift:
    (U-block, tree, ((block_1, tuple_1), ..., (block_l, tuple_l)))
The U-block is the set of inputs absorbed into the coefficient slot; each
leaf carries the block of inputs composed into it and a tuple of orderings
of that block. Com-valued elements carry blocks only.

Notes:
- Tree generators have degree (edges - n); tuples have degree l; the
  coefficient slot has degree 0. Signs follow the Koszul rule for these
  degrees.
- All checks are exhaustive inside their bounds and report at most a few
  counterexamples each.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from typing import Any, Callable, Dict, FrozenSet, Hashable, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from .algdata import add_into, koszul
from .barcplx import NestedDifferential, nest_word, unnest_word
from .config import DEFAULT_OPERAD_BOUNDS, RETRACT_MAX_ARITY, RETRACT_MAX_DEGREE
from .errors import GraphError, HypothesisError, InvariantError, SchemaError
from .treecomb import (
    CompleteGraph,
    Labeling,
    LevelTree,
    delete_leaf,
    enumerate_trees,
    minimal_complete_graph,
    relabel,
    theta_deletions,
    tree_kappa_membership,
)

logger = logging.getLogger(__name__)

Ordering = Tuple[int, ...]
BETuple = Tuple[Ordering, ...]
Block = FrozenSet[int]
ComKey = Tuple[Block, LevelTree, Tuple[Block, ...]]
EKey = Tuple[Block, LevelTree, Tuple[Tuple[Block, BETuple], ...]]

MAX_COUNTEREXAMPLES = 5


# ---------------------------------------------------------------------------
# Barratt-Eccles chains
# ---------------------------------------------------------------------------

def normalize(t: Sequence[Ordering]) -> Optional[BETuple]:
    """The tuple itself, or None when two neighbours agree."""
    t = tuple(t)
    if any(a == b for a, b in zip(t, t[1:])):
        return None
    return t


def canonical_ordering(vertices: Iterable[int]) -> Ordering:
    return tuple(sorted(vertices))


@dataclass(frozen=True)
class BarrattEcclesChain:
    """A combination of normalized tuples on one vertex set."""

    vertices: Ordering
    terms: Mapping[BETuple, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        expected = set(self.vertices)
        for t, c in self.terms.items():
            if normalize(t) is None:
                raise InvariantError(f"degenerate tuple {t}")
            if any(set(w) != expected or len(w) != len(expected) for w in t):
                raise GraphError(f"tuple {t} is not made of orderings of {self.vertices}")
            if not c:
                raise InvariantError(f"zero coefficient on {t}")

    @classmethod
    def of(cls, *tuples: Sequence[Ordering], vertices: Optional[Iterable[int]] = None) -> "BarrattEcclesChain":
        """Sum of the given tuples with coefficient 1 each, dropping degenerate ones."""
        terms: Dict[BETuple, Fraction] = {}
        for t in tuples:
            t = normalize(t)
            if t is not None:
                add_into(terms, {t: Fraction(1)})
        if vertices is None:
            first = tuples[0][0] if tuples else ()
            vertices = first
        return cls(canonical_ordering(vertices), terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> List[int]:
        return sorted({len(t) - 1 for t in self.terms})

    def __add__(self, other: "BarrattEcclesChain") -> "BarrattEcclesChain":
        terms = dict(self.terms)
        add_into(terms, other.terms)
        return BarrattEcclesChain(self.vertices, terms)

    def scaled(self, c) -> "BarrattEcclesChain":
        return BarrattEcclesChain(self.vertices, {t: c * v for t, v in self.terms.items() if c * v})


def _d_tuple(t: BETuple) -> Dict[BETuple, int]:
    out: Dict[BETuple, int] = {}
    if len(t) < 2:
        return out
    for i in range(len(t)):
        face = normalize(t[:i] + t[i + 1:])
        if face is not None:
            add_into(out, {face: koszul(i)})
    return out


def _nu_tuple(t: BETuple, vertices: Iterable[int]) -> Optional[Tuple[BETuple, int]]:
    tau = canonical_ordering(vertices)
    if t[-1] == tau:
        return None
    return t + (tau,), koszul(len(t))


def be_differential(c: BarrattEcclesChain) -> BarrattEcclesChain:
    """Alternating sum of deletions, normalized."""
    terms: Dict[BETuple, Fraction] = {}
    for t, coeff in c.terms.items():
        add_into(terms, _d_tuple(t), coeff)
    return BarrattEcclesChain(c.vertices, terms)


def psi(c: BarrattEcclesChain) -> Fraction:
    """Coefficient of the Com generator: the sum over degree-0 tuples."""
    return sum((coeff for t, coeff in c.terms.items() if len(t) == 1), Fraction(0))


def iota(value, vertices: Iterable[int]) -> BarrattEcclesChain:
    vertices = canonical_ordering(vertices)
    value = Fraction(value)
    return BarrattEcclesChain(vertices, {(vertices,): value} if value else {})


def nu(c: BarrattEcclesChain) -> BarrattEcclesChain:
    """Append the canonical ordering with sign (-1)^(l+1)."""
    terms: Dict[BETuple, Fraction] = {}
    for t, coeff in c.terms.items():
        image = _nu_tuple(t, c.vertices)
        if image is not None:
            add_into(terms, {image[0]: coeff}, image[1])
    return BarrattEcclesChain(c.vertices, terms)


def be_basis(vertices: Iterable[int], degree: int, first: Optional[Ordering] = None) -> Iterator[BETuple]:
    """All normalized tuples of the given degree on the vertex set, optionally with a fixed first ordering."""
    orderings = list(permutations(canonical_ordering(vertices)))

    def extend(prefix: BETuple) -> Iterator[BETuple]:
        if len(prefix) == degree + 1:
            yield prefix
            return
        for w in orderings:
            if not prefix or w != prefix[-1]:
                yield from extend(prefix + (w,))

    yield from extend((first,) if first is not None else ())


@dataclass
class CheckResult:
    name: str
    checked: int = 0
    failure_count: int = 0
    counterexamples: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def fail(self, text: str) -> None:
        self.failure_count += 1
        if len(self.counterexamples) < MAX_COUNTEREXAMPLES:
            self.counterexamples.append(text)

    def merge(self, other: "CheckResult") -> None:
        self.checked += other.checked
        for text in other.counterexamples:
            if len(self.counterexamples) < MAX_COUNTEREXAMPLES:
                self.counterexamples.append(text)
        self.failure_count += other.failure_count

    def to_dict(self) -> Dict[str, Any]:
        return {'passed': self.passed, 'checked': self.checked, 'failures': self.failure_count,
                'counterexamples': list(self.counterexamples)}


@dataclass
class VerificationReport:
    checks: Dict[str, CheckResult] = field(default_factory=dict)
    parameters: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def add(self, result: CheckResult) -> CheckResult:
        if result.name in self.checks:
            self.checks[result.name].merge(result)
        else:
            self.checks[result.name] = result
        return self.checks[result.name]

    def to_dict(self) -> Dict[str, Any]:
        return {'passed': self.passed, 'parameters': dict(self.parameters),
                'checks': {name: c.to_dict() for name, c in sorted(self.checks.items())}}


RETRACT_IDENTITIES = (
    'psi iota = id',
    'd nu + nu d = id - iota psi',
    'psi nu = 0',
    'psi d = 0 in positive degrees',
)


def _retract_on_prefix(vertices: Ordering, first: Ordering, l_max: int) -> List[CheckResult]:
    homotopy, psi_nu, psi_d = (CheckResult(name) for name in RETRACT_IDENTITIES[1:])
    for degree in range(l_max + 1):
        for t in be_basis(vertices, degree, first):
            x = BarrattEcclesChain(vertices, {t: Fraction(1)})
            lhs = be_differential(nu(x)) + nu(be_differential(x))
            rhs = x + iota(psi(x), vertices).scaled(-1)
            homotopy.checked += 1
            if lhs != rhs:
                homotopy.fail(f"{t}: d nu + nu d = {dict(lhs.terms)}, id - iota psi = {dict(rhs.terms)}")
            psi_nu.checked += 1
            if psi(nu(x)) != 0:
                psi_nu.fail(f"{t}: psi nu = {psi(nu(x))}")
            if degree > 0:
                psi_d.checked += 1
                if psi(be_differential(x)) != 0:
                    psi_d.fail(f"{t}: psi d = {psi(be_differential(x))}")
    return [homotopy, psi_nu, psi_d]


def retract_check(r: int, l_max: int, jobs: int = 1) -> VerificationReport:
    """Exhaustive check of the retract identities on tuples of arity r, degree <= l_max."""
    if not 1 <= r <= RETRACT_MAX_ARITY:
        raise SchemaError(f"arity must lie in 1..{RETRACT_MAX_ARITY}, got {r}")
    if not 0 <= l_max <= RETRACT_MAX_DEGREE:
        raise SchemaError(f"simplicial degree must lie in 0..{RETRACT_MAX_DEGREE}, got {l_max}")
    vertices = tuple(range(1, r + 1))
    report = VerificationReport(parameters={'arity': r, 'max_simplicial_degree': l_max})
    section = CheckResult(RETRACT_IDENTITIES[0], checked=1)
    if psi(iota(1, vertices)) != 1:
        section.fail(f"psi(iota(1)) = {psi(iota(1, vertices))}")
    report.add(section)
    firsts = list(permutations(vertices))
    if jobs <= 1:
        parts = {w: _retract_on_prefix(vertices, w, l_max) for w in firsts}
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {w: pool.submit(_retract_on_prefix, vertices, w, l_max) for w in firsts}
            parts = {w: futures[w].result() for w in firsts}
    for w in firsts:
        for result in parts[w]:
            report.add(result)
    return report


# ---------------------------------------------------------------------------
# Complete-graph cells
# ---------------------------------------------------------------------------

def _tuples_of(chain: Union[Sequence[Ordering], BarrattEcclesChain]) -> List[BETuple]:
    if isinstance(chain, BarrattEcclesChain):
        return list(chain.terms)
    return [tuple(chain)]


def variations_count(t: Sequence[Ordering], e: int, f: int) -> int:
    """Number of times the relative order of e and f flips along the tuple."""
    if e == f:
        raise GraphError("variations need two distinct vertices")
    flips = 0
    previous = None
    for w in t:
        current = w.index(e) < w.index(f)
        if previous is not None and current != previous:
            flips += 1
        previous = current
    return flips


def _tuple_in_cell(t: BETuple, k: CompleteGraph) -> bool:
    if set(t[0]) != set(k.vertices):
        raise GraphError(f"tuple on {sorted(t[0])} tested against a graph on {sorted(k.vertices, key=repr)}")
    final = t[-1]
    for e, f in combinations(k.ordering, 2):
        v = variations_count(t, e, f)
        mu = k.weight(e, f)
        if v < mu:
            continue
        if v == mu and (final.index(e) < final.index(f)) == k.oriented(e, f):
            continue
        return False
    return True


def e_kappa_membership(chain: Union[Sequence[Ordering], BarrattEcclesChain], k: CompleteGraph) -> bool:
    return all(_tuple_in_cell(t, k) for t in _tuples_of(chain))


def en_membership(chain: Union[Sequence[Ordering], BarrattEcclesChain], n: int) -> bool:
    """At most n - 1 variations for every pair of vertices."""
    for t in _tuples_of(chain):
        for e, f in combinations(sorted(t[0]), 2):
            if variations_count(t, e, f) > n - 1:
                return False
    return True


def graphs_up_to(vertices: Iterable[int], max_weight: int) -> Iterator[CompleteGraph]:
    """Every complete graph on the vertices with weights in 0..max_weight."""
    vertices = canonical_ordering(vertices)
    pairs = list(combinations(vertices, 2))
    for ordering in permutations(vertices):
        for weights in product(range(max_weight + 1), repeat=len(pairs)):
            yield CompleteGraph.build(ordering, dict(zip(pairs, weights)))


def en_colimit_check(r: int, l_max: int, n_max: int) -> CheckResult:
    """Variation counting against membership in some cell of K_n, exhaustively."""
    result = CheckResult('E_n by variations = colimit over K_n')
    vertices = tuple(range(1, r + 1))
    for n in range(1, n_max + 1):
        graphs = list(graphs_up_to(vertices, n - 1))
        for degree in range(l_max + 1):
            for t in be_basis(vertices, degree):
                result.checked += 1
                by_count = en_membership(t, n)
                by_cells = any(_tuple_in_cell(t, k) for k in graphs)
                if by_count != by_cells:
                    result.fail(f"n={n} {t}: variations say {by_count}, cells say {by_cells}")
    return result


def theta_restriction_check(n_max: int, leaves_max: int) -> VerificationReport:
    """Every theta term of a labeled tree stays in the restricted minimal cell."""
    if not 1 <= n_max <= 3 or not 1 <= leaves_max <= 4:
        raise SchemaError("theta restriction check is bounded by n <= 3 and leaves <= 4")
    membership = CheckResult('theta terms stay in the restricted cell')
    shape = CheckResult('n = 1 theta has two terms for r >= 2, none for r = 1')
    for n in range(1, n_max + 1):
        for r in range(1, leaves_max + 1):
            for t in enumerate_trees(n, r):
                lab = Labeling(tuple(range(1, r + 1)))
                k = minimal_complete_graph(t, lab, n)
                deletions = theta_deletions(t)
                if n == 1:
                    shape.checked += 1
                    if len(deletions) != (2 if r >= 2 else 0):
                        shape.fail(f"{t}: {len(deletions)} terms")
                for leaf, _, _ in deletions:
                    membership.checked += 1
                    rest = relabel(lab, leaf)
                    if not tree_kappa_membership(delete_leaf(t, leaf), rest, k.restrict(rest.labels)):
                        membership.fail(f"{t} minus leaf {leaf}")
    report = VerificationReport(parameters={'n_max': n_max, 'leaves_max': leaves_max})
    report.add(membership)
    report.add(shape)
    return report


# ---------------------------------------------------------------------------
# Twisting-cochain lift
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LiftBounds:
    arity: int = DEFAULT_OPERAD_BOUNDS['arity']
    degree: int = DEFAULT_OPERAD_BOUNDS['degree']
    leaves: int = DEFAULT_OPERAD_BOUNDS['leaves']

    def __post_init__(self):
        if self.arity < 1 or self.degree < 0 or self.leaves < 1:
            raise SchemaError(f"bad truncation bounds {self}")


def _tree_degree(t: LevelTree) -> int:
    return t.edge_count - t.n


def _blocks(r: int) -> Tuple[Block, ...]:
    return tuple(frozenset({i}) for i in range(1, r + 1))


def lift_generators(n: int, bounds: LiftBounds) -> List[LevelTree]:
    top = min(bounds.leaves, bounds.arity)
    return [t for r in range(1, top + 1) for t in enumerate_trees(n, r)]


def _block_engine() -> NestedDifferential:
    return NestedDifferential(lambda block: 0, lambda a, b: {a | b: 1})


def standard_beta(n: int, bounds: Optional[LiftBounds] = None) -> Dict[LevelTree, Dict[ComKey, Fraction]]:
    """theta + (unit) (x) gamma on every tree generator, with Com labels."""
    bounds = bounds or LiftBounds()
    engine = _block_engine()
    beta = {}
    for t in lift_generators(n, bounds):
        blocks = _blocks(t.leaf_count)
        image: Dict[ComKey, Fraction] = {}
        for leaf, sign, _ in theta_deletions(t):
            key = (blocks[leaf], delete_leaf(t, leaf), blocks[:leaf] + blocks[leaf + 1:])
            add_into(image, {key: Fraction(sign)})
        for word, c in engine.d_q(nest_word(t, blocks), n).items():
            tree, labels = unnest_word(word, n)
            add_into(image, {(frozenset(), tree, tuple(labels)): Fraction(c)})
        beta[t] = image
    return beta


def _com_apply(f: Mapping[LevelTree, Mapping[ComKey, Fraction]], key: ComKey) -> Dict[ComKey, Fraction]:
    """partial_f on one Com-labelled element: f(tree) with the blocks substituted."""
    u, t, blocks = key
    if t not in f:
        raise InvariantError(f"generator map undefined on {t}")
    out: Dict[ComKey, Fraction] = {}
    for (u2, t2, blocks2), c in f[t].items():
        new_u = u.union(*(blocks[j - 1] for j in u2))
        new_blocks = tuple(frozenset().union(*(blocks[j - 1] for j in b)) for b in blocks2)
        add_into(out, {(new_u, t2, new_blocks): c})
    return out


def _multiset_words(counts: Sequence[int]) -> Iterator[Tuple[int, ...]]:
    remaining = list(counts)
    total = sum(counts)
    word: List[int] = []

    def walk() -> Iterator[Tuple[int, ...]]:
        if len(word) == total:
            yield tuple(word)
            return
        for k, left in enumerate(remaining):
            if left:
                remaining[k] -= 1
                word.append(k)
                yield from walk()
                word.pop()
                remaining[k] += 1

    yield from walk()


def be_compose(outer: BETuple, inner: Mapping[int, BETuple]) -> Dict[BETuple, int]:
    """Operadic composite: outer tuple on the inner labels, inner tuples substituted.

    Sum over multi-shuffles of the factors (outer first, then inner by label)
    with the sign of the shuffle; each vertex concatenates the current inner
    orderings in the current outer order.
    """
    labels = sorted(inner)
    factors = [outer] + [inner[j] for j in labels]
    slot = {j: i + 1 for i, j in enumerate(labels)}
    out: Dict[BETuple, int] = {}
    for word in _multiset_words([len(f) - 1 for f in factors]):
        at = [0] * len(factors)

        def vertex() -> Ordering:
            order: List[int] = []
            for j in outer[at[0]]:
                order.extend(inner[j][at[slot[j]]])
            return tuple(order)

        vertices = [vertex()]
        for s in word:
            at[s] += 1
            vertices.append(vertex())
        t = normalize(vertices)
        if t is None:
            continue
        inversions = sum(1 for a, b in combinations(word, 2) if a > b)
        add_into(out, {t: koszul(inversions)})
    return out


def _rearrangement_sign(source: Sequence[Tuple[Hashable, int]], target: Sequence[Hashable]) -> int:
    pos = {ident: i for i, ident in enumerate(target)}
    exponent = 0
    for (a, da), (b, db) in combinations(source, 2):
        if pos[a] > pos[b]:
            exponent += da * db
    return koszul(exponent)


def _e_apply(f: Mapping[LevelTree, Mapping[EKey, Fraction]], key: EKey) -> Dict[EKey, Fraction]:
    """partial_f on one element: u . (f(tree) o (c_1, ..., c_l))."""
    u, t, leaves = key
    if t not in f:
        raise InvariantError(f"generator map undefined on {t}")
    out: Dict[EKey, Fraction] = {}
    for (u2, t2, leaves2), kappa in f[t].items():
        if any(len(leaves[j - 1][1]) != 1 for j in u2):
            continue
        new_u = u.union(*(leaves[j - 1][0] for j in u2))
        source = [(('outer', i), len(c) - 1) for i, (_, c) in enumerate(leaves2)]
        source += [(('inner', j), len(leaves[j - 1][1]) - 1) for j in range(1, len(leaves) + 1)]
        target: List[Hashable] = []
        for i, (block2, _) in enumerate(leaves2):
            target.append(('outer', i))
            target.extend(('inner', j) for j in sorted(block2))
        target.extend(('inner', j) for j in sorted(u2))
        sign = _rearrangement_sign(source, target)
        options = []
        for block2, c2 in leaves2:
            block = frozenset().union(*(leaves[j - 1][0] for j in block2))
            composite = be_compose(c2, {j: leaves[j - 1][1] for j in block2})
            options.append([((block, tup), v) for tup, v in composite.items()])
        for choice in product(*options):
            coeff = kappa * sign
            for _, v in choice:
                coeff *= v
            add_into(out, {(new_u, t2, tuple(leaf for leaf, _ in choice)): coeff})
    return out


def _apply_all(apply: Callable[[Any], Dict[Any, Fraction]], comb: Mapping[Any, Fraction]) -> Dict[Any, Fraction]:
    out: Dict[Any, Fraction] = {}
    for key, c in comb.items():
        add_into(out, apply(key), c)
    return out


def iota_tilde(comb: Mapping[ComKey, Fraction]) -> Dict[EKey, Fraction]:
    return {(u, t, tuple((b, (canonical_ordering(b),)) for b in blocks)): c
            for (u, t, blocks), c in comb.items()}


def psi_tilde(comb: Mapping[EKey, Fraction]) -> Dict[ComKey, Fraction]:
    out: Dict[ComKey, Fraction] = {}
    for (u, t, leaves), c in comb.items():
        if all(len(chain) == 1 for _, chain in leaves):
            add_into(out, {(u, t, tuple(b for b, _ in leaves)): c})
    return out


def nu_tilde(comb: Mapping[EKey, Fraction]) -> Dict[EKey, Fraction]:
    """sum_i (iota psi)^(i-1) (x) nu (x) id on the leaf chains, signed by the tree degree."""
    out: Dict[EKey, Fraction] = {}
    for (u, t, leaves), c in comb.items():
        sign = koszul(_tree_degree(t))
        for i, (block, chain) in enumerate(leaves):
            image = _nu_tuple(chain, block)
            if image is not None:
                head = tuple((b, (canonical_ordering(b),)) for b, _ in leaves[:i])
                new = head + ((block, image[0]),) + leaves[i + 1:]
                add_into(out, {(u, t, new): c}, sign * image[1])
            if len(chain) != 1:
                break
    return out


def d_tilde(comb: Mapping[EKey, Fraction]) -> Dict[EKey, Fraction]:
    out: Dict[EKey, Fraction] = {}
    for (u, t, leaves), c in comb.items():
        passed = _tree_degree(t)
        for i, (block, chain) in enumerate(leaves):
            for face, s in _d_tuple(chain).items():
                new = leaves[:i] + ((block, face),) + leaves[i + 1:]
                add_into(out, {(u, t, new): c}, koszul(passed) * s)
            passed += len(chain) - 1
    return out


def _arity(key) -> int:
    u, _, leaves = key
    return len(u) + sum(len(leaf[0] if isinstance(leaf, tuple) else leaf) for leaf in leaves)


def _mass(comb: Mapping[Any, Fraction]) -> Fraction:
    return sum((abs(c) for c in comb.values()), Fraction(0))


def _format_key(key) -> str:
    u, t, leaves = key
    parts = []
    for leaf in leaves:
        if isinstance(leaf, tuple):
            block, chain = leaf
            parts.append(f"{sorted(block)}:{list(chain)}")
        else:
            parts.append(str(sorted(leaf)))
    return f"U{sorted(u)} {t.to_text()} ({'; '.join(parts)})"


def format_combination(comb: Mapping[Any, Fraction]) -> str:
    if not comb:
        return "0"
    return " + ".join(f"{c}*[{_format_key(k)}]" for k, c in sorted(comb.items(), key=lambda kv: repr(kv[0])))


@dataclass
class LiftResult:
    n: int
    bounds: LiftBounds
    alpha: Dict[int, Dict[LevelTree, Dict[EKey, Fraction]]]
    closed: bool
    dropped_mass: Fraction
    report: VerificationReport

    def total(self, t: LevelTree) -> Dict[EKey, Fraction]:
        out: Dict[EKey, Fraction] = {}
        for layer in self.alpha.values():
            add_into(out, layer.get(t, {}))
        return out

    def nonzero_orders(self) -> List[int]:
        return [m for m, layer in sorted(self.alpha.items()) if any(layer.values())]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'bounds': {'arity': self.bounds.arity, 'degree': self.bounds.degree, 'leaves': self.bounds.leaves},
            'closed': self.closed,
            'dropped_mass': str(self.dropped_mass),
            'terms_per_order': {str(m): sum(len(v) for v in layer.values()) for m, layer in sorted(self.alpha.items())},
            'report': self.report.to_dict(),
        }


def _run(work: Callable[[LevelTree], Any], gens: Sequence[LevelTree], jobs: int) -> Dict[LevelTree, Any]:
    if jobs <= 1:
        return {t: work(t) for t in gens}
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = {t: pool.submit(work, t) for t in gens}
        return {t: futures[t].result() for t in gens}


def lift_twisting_cochain(beta: Mapping[LevelTree, Mapping[ComKey, Fraction]], n: int,
                          bounds: Optional[LiftBounds] = None, jobs: int = 1) -> LiftResult:
    """Lift a Com-valued twisting cochain on n-level tree generators to Barratt-Eccles labels."""
    bounds = bounds or LiftBounds()
    gens = lift_generators(n, bounds)
    beta = {t: dict(beta.get(t, {})) for t in gens}
    for t, image in beta.items():
        for key in image:
            if _arity(key) != t.leaf_count:
                raise HypothesisError("beta does not preserve arity", (t.to_text(),), _format_key(key),
                                      f"arity {t.leaf_count}")

    hypothesis = CheckResult('partial_beta beta = 0', checked=len(gens))
    for t in gens:
        square = _apply_all(lambda key: _com_apply(beta, key), beta[t])
        if square:
            raise HypothesisError("partial_beta beta != 0", (t.to_text(),), format_combination(square), "0")

    alpha: Dict[int, Dict[LevelTree, Dict[EKey, Fraction]]] = {0: {t: iota_tilde(beta[t]) for t in gens}}
    sources: Dict[int, Dict[LevelTree, Dict[EKey, Fraction]]] = {0: {t: {} for t in gens}}

    def source(m: int, t: LevelTree) -> Dict[EKey, Fraction]:
        out: Dict[EKey, Fraction] = {}
        for a in range(m):
            b = m - 1 - a
            add_into(out, _apply_all(lambda key: _e_apply(alpha[a], key), alpha[b][t]))
        return out

    top = max((_tree_degree(t) for t in gens), default=0) - 1
    last = min(bounds.degree, top)
    for m in range(1, last + 1):
        sources[m] = _run(lambda t: source(m, t), gens, jobs)
        alpha[m] = {t: nu_tilde(sources[m][t]) for t in gens}
        logger.info("lift n=%d: alpha_%d has %d terms", n, m, sum(len(v) for v in alpha[m].values()))

    closed = True
    dropped = Fraction(0)
    if top > bounds.degree:
        beyond = _run(lambda t: nu_tilde(source(bounds.degree + 1, t)), gens, jobs)
        dropped = sum((_mass(v) for v in beyond.values()), Fraction(0))
        closed = dropped == 0
        if not closed:
            logger.warning("lift n=%d: truncation at chain degree %d drops mass %s", n, bounds.degree, dropped)

    report = VerificationReport(parameters={'n': n, 'arity': bounds.arity, 'degree': bounds.degree,
                                            'leaves': bounds.leaves, 'generators': len(gens)})
    report.add(hypothesis)
    projection = report.add(CheckResult('projection of alpha is beta'))
    vanishing = report.add(CheckResult('projection of alpha_m vanishes for m >= 1'))
    twisting = report.add(CheckResult('d alpha_m = sum partial_alpha_a alpha_b'))
    cells = report.add(CheckResult('lift stays E_n-labelled'))
    for t in gens:
        total: Dict[EKey, Fraction] = {}
        for m in sorted(alpha):
            add_into(total, alpha[m][t])
            if m >= 1:
                vanishing.checked += 1
                leftover = psi_tilde(alpha[m][t])
                if leftover:
                    vanishing.fail(f"{t} m={m}: {format_combination(leftover)}")
            twisting.checked += 1
            lhs = d_tilde(alpha[m][t])
            if lhs != sources[m][t]:
                twisting.fail(f"{t} m={m}: d alpha = {format_combination(lhs)}, "
                              f"expected {format_combination(sources[m][t])}")
            for key in alpha[m][t]:
                cells.checked += 1
                if not all(en_membership(chain, n) for _, chain in key[2]):
                    cells.fail(f"{t} m={m}: {_format_key(key)}")
        projection.checked += 1
        if psi_tilde(total) != beta[t]:
            projection.fail(f"{t}: {format_combination(psi_tilde(total))} != {format_combination(beta[t])}")
    truncation = report.add(CheckResult('truncation closes the recursion', checked=1))
    if not closed:
        truncation.fail(f"dropped mass {dropped} beyond chain degree {bounds.degree}")
    return LiftResult(n, bounds, alpha, closed, dropped, report)


def operad_verify(arity: int = DEFAULT_OPERAD_BOUNDS['arity'], l_max: int = 2,
                  bounds: Optional[LiftBounds] = None, n_values: Sequence[int] = (1, 2),
                  jobs: int = 1) -> VerificationReport:
    """Every operadic check in one report."""
    bounds = bounds or LiftBounds()
    report = VerificationReport(parameters={'arity': arity, 'max_simplicial_degree': l_max,
                                            'lift_bounds': {'arity': bounds.arity, 'degree': bounds.degree,
                                                            'leaves': bounds.leaves},
                                            'lift_n': list(n_values)})
    for result in retract_check(arity, l_max, jobs).checks.values():
        report.add(result)
    report.add(en_colimit_check(min(arity, 3), min(l_max, 3), 3))
    for result in theta_restriction_check(3, 4).checks.values():
        report.add(result)
    for n in n_values:
        lift = lift_twisting_cochain(standard_beta(n, bounds), n, bounds, jobs)
        for result in lift.report.checks.values():
            report.add(CheckResult(f"lift n={n}: {result.name}", result.checked,
                                   result.failure_count, list(result.counterexamples)))
    return report
