"""
The iterated bar complex of a commutative algebra, desuspended n times.

Behavior:
- A basis element is an n-level tree whose leaves carry algebra basis
  indices. Its total degree is the sum of the label degrees plus the edge
  count of the tree minus n.
- enumerate_basis() lists all elements of one total degree in canonical
  order: tree order first, then lexicographic labels.
- The differential splits into two commuting parts:
    d_q  merges adjacent siblings (algebra product at the top level,
         shuffle of the child lists below it) and recurses into children;
    d_p  applies the internal differential of the algebra to one label.
  The bar differential is d_q + (-1)^q d_p, where q is the edge count.

Sign conventions:
- Every element is bigraded: q counts suspensions (edges), p is the sum of
  the label degrees.
- d_q on a level-k word (c_1, ..., c_l):
    child term  -(-1)^(sum_{j<i} (q(c_j)+1)) (..., d_q c_i, ...)
    merge term   (-1)^(sum_{j<=i} (q(c_j)+1)) (..., c_i * c_{i+1}, ...)
- Swapping two factors in a shuffle costs (-1)^((q+1)(q'+1) + p p').

Notes:
- Bases larger than the configured bound raise ResourceError before any
  matrix is built.
- Caches are shared between worker threads; each key is written once.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple, Union

from .algdata import AlgebraPresentation, add_into, koszul
from .coeff import CoefficientRing, SparseMatrix
from .config import max_basis_size
from .errors import InvariantError, ResourceError, TreeError
from .treecomb import LevelTree, enumerate_trees

logger = logging.getLogger(__name__)

Nested = Tuple[Any, ...]
Degree = Union[int, Tuple[int, ...]]


class KeyedCache:
    """Dictionary cache where the first writer of a key wins."""

    def __init__(self):
        self._data: Dict[Hashable, Any] = {}
        self._lock = threading.Lock()

    def get_or_compute(self, key: Hashable, compute: Callable[[], Any]) -> Any:
        try:
            return self._data[key]
        except KeyError:
            pass
        value = compute()
        with self._lock:
            return self._data.setdefault(key, value)

    def __len__(self) -> int:
        return len(self._data)


@dataclass(frozen=True, order=True)
class LabeledBarElement:
    tree: LevelTree
    labels: Tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) != self.tree.leaf_count:
            raise TreeError(f"{len(self.labels)} labels for a tree with {self.tree.leaf_count} leaves")

    def degree(self, A: AlgebraPresentation) -> int:
        return sum(A.degree(a) for a in self.labels) + self.tree.edge_count - self.tree.n

    @property
    def q(self) -> int:
        return self.tree.edge_count

    def nested(self) -> Nested:
        """Level-n word: a tuple of level-(n-1) words, down to label indices."""
        return nest_word(self.tree, self.labels)

    @classmethod
    def from_nested(cls, word: Nested, n: int) -> "LabeledBarElement":
        tree, labels = unnest_word(word, n)
        return cls(tree, labels)

    def format(self, A: AlgebraPresentation) -> str:
        return f"{self.tree.to_text()}({','.join(A.basis.names[a] for a in self.labels)})"


def nest_word(tree: LevelTree, labels: Tuple[int, ...]) -> Nested:
    if tree.n == 1:
        return tuple(labels)
    out = []
    pos = 0
    for sub in tree.subtrees():
        out.append(nest_word(sub, labels[pos:pos + sub.leaf_count]))
        pos += sub.leaf_count
    return tuple(out)


def unnest_word(word: Nested, n: int) -> Tuple[LevelTree, Tuple[int, ...]]:
    if n == 1:
        return LevelTree.corolla(len(word)), tuple(word)
    parts = [unnest_word(child, n - 1) for child in word]
    tree = LevelTree.graft([t for t, _ in parts])
    return tree, tuple(label for _, labs in parts for label in labs)


def _swap_exponent(a: Degree, b: Degree) -> int:
    if isinstance(a, tuple):
        return sum(x * y for x, y in zip(a, b))
    return a * b


def shuffle(u: Sequence[Any], v: Sequence[Any],
            degree: Optional[Callable[[Any], Degree]] = None) -> Dict[Tuple[Any, ...], int]:
    """Signed shuffle product of two words.

    degree(factor) gives the suspended degree of a factor, or a tuple of
    degrees for multigraded factors; each inversion of factors a, b costs
    (-1)^(deg a * deg b), summed componentwise. By default factors are
    (name, degree) pairs and the suspended degree is degree + 1.
    """
    if degree is None:
        degree = lambda factor: factor[1] + 1  # noqa: E731
    u = tuple(u)
    v = tuple(v)
    out: Dict[Tuple[Any, ...], int] = {}

    def walk(i: int, j: int, prefix: Tuple[Any, ...], sign: int) -> None:
        if i == len(u) or j == len(v):
            word = prefix + u[i:] + v[j:]
            total = out.get(word, 0) + sign
            if total:
                out[word] = total
            else:
                out.pop(word, None)
            return
        walk(i + 1, j, prefix + (u[i],), sign)
        flips = sum(_swap_exponent(degree(a), degree(v[j])) for a in u[i:])
        walk(i, j + 1, prefix + (v[j],), sign * koszul(flips))

    walk(0, 0, (), 1)
    return out


class NestedDifferential:
    """The merge part d_q of the iterated bar differential on nested words.

    Labels are opaque: label_degree and label_product describe the graded
    commutative product the top level merges with. The same engine serves
    algebra labels and block labels of the operadic experiments.
    """

    def __init__(self, label_degree: Callable[[Any], int],
                 label_product: Callable[[Any, Any], Mapping[Any, Any]]):
        self._label_degree = label_degree
        self._label_product = label_product
        self._q = KeyedCache()
        self._p = KeyedCache()
        self._dq = KeyedCache()

    def q(self, word: Any, level: int) -> int:
        if level == 0:
            return 0
        return self._q.get_or_compute((word, level),
                                      lambda: sum(self.q(c, level - 1) + 1 for c in word))

    def p(self, word: Any, level: int) -> int:
        if level == 0:
            return self._label_degree(word)
        return self._p.get_or_compute((word, level), lambda: sum(self.p(c, level - 1) for c in word))

    def merge(self, left: Any, right: Any, level: int) -> Mapping[Any, Any]:
        """Product of two sibling words of the given level."""
        if level == 0:
            return self._label_product(left, right)
        return shuffle(left, right, lambda c: (self.q(c, level - 1) + 1, self.p(c, level - 1)))

    def d_q(self, word: Nested, level: int) -> Dict[Nested, Fraction]:
        return self._dq.get_or_compute((word, level), lambda: self._compute_d_q(word, level))

    def _compute_d_q(self, word: Nested, level: int) -> Dict[Nested, Fraction]:
        out: Dict[Nested, Fraction] = {}
        prefix = 0
        for i, child in enumerate(word):
            if level >= 2:
                inner = self.d_q(child, level - 1)
                sign = -koszul(prefix)
                for new_child, c in inner.items():
                    add_into(out, {word[:i] + (new_child,) + word[i + 1:]: c}, sign)
            prefix += self.q(child, level - 1) + 1
            if i + 1 < len(word):
                sign = koszul(prefix)
                for merged, c in self.merge(child, word[i + 1], level - 1).items():
                    add_into(out, {word[:i] + (merged,) + word[i + 2:]: Fraction(c)}, sign)
        return out


class BarComplex:
    """Bases and differentials of the n-fold desuspended bar complex of A."""

    def __init__(self, algebra: AlgebraPresentation, n: int, max_basis: Optional[int] = None):
        if n < 1:
            raise TreeError(f"level count must be at least 1, got {n}")
        self.algebra = algebra
        self.n = n
        self.max_basis = max_basis if max_basis is not None else max_basis_size()
        self._engine = NestedDifferential(algebra.degree, algebra.multiply)
        self._bases = KeyedCache()
        self._indices = KeyedCache()
        self._labels = KeyedCache()

    # -- bases -------------------------------------------------------------

    def _label_tuples(self, count: int, total: int) -> Tuple[Tuple[int, ...], ...]:
        """Label tuples of the given length whose degrees sum to total, lexicographic."""
        def compute():
            if count == 0:
                return ((),) if total == 0 else ()
            out = []
            for a in range(len(self.algebra)):
                deg = self.algebra.degree(a)
                if deg <= total:
                    out.extend((a,) + rest for rest in self._label_tuples(count - 1, total - deg))
            return tuple(out)

        return self._labels.get_or_compute((count, total), compute)

    def basis(self, d: int) -> List[LabeledBarElement]:
        """All elements of total degree d, canonically ordered."""
        return self._bases.get_or_compute(d, lambda: self._enumerate(d))

    def _enumerate(self, d: int) -> List[LabeledBarElement]:
        out: List[LabeledBarElement] = []
        if d < 0:
            return out
        n = self.n
        # every leaf adds at least one edge, so r leaves force degree >= r - 1
        trees = [t for r in range(1, d + 2) for t in enumerate_trees(n, r) if t.edge_count <= d + n]
        for tree in sorted(trees):
            for labels in self._label_tuples(tree.leaf_count, d + n - tree.edge_count):
                out.append(LabeledBarElement(tree, labels))
                if len(out) > self.max_basis:
                    raise ResourceError(
                        f"bar basis in degree {d} (n={n}) exceeds {self.max_basis} elements; "
                        f"raise ENH_MAX_BASIS or lower the degree")
        logger.debug("bar basis n=%d degree %d: %d elements", n, d, len(out))
        return out

    def index(self, d: int) -> Dict[LabeledBarElement, int]:
        return self._indices.get_or_compute(d, lambda: {el: i for i, el in enumerate(self.basis(d))})

    # -- differential ------------------------------------------------------

    def d_q(self, el: LabeledBarElement) -> Dict[LabeledBarElement, Fraction]:
        out: Dict[LabeledBarElement, Fraction] = {}
        for word, c in self._engine.d_q(el.nested(), self.n).items():
            add_into(out, {LabeledBarElement.from_nested(word, self.n): c})
        return out

    def d_p(self, el: LabeledBarElement) -> Dict[LabeledBarElement, Fraction]:
        """Internal differential on one label at a time, Koszul over preceding labels."""
        out: Dict[LabeledBarElement, Fraction] = {}
        passed = 0
        for x, a in enumerate(el.labels):
            sign = koszul(passed)
            for da, c in self.algebra.d(a).items():
                labels = el.labels[:x] + (da,) + el.labels[x + 1:]
                add_into(out, {LabeledBarElement(el.tree, labels): c}, sign)
            passed += self.algebra.degree(a)
        return out

    def differential(self, el: LabeledBarElement) -> Dict[LabeledBarElement, Fraction]:
        out = self.d_q(el)
        add_into(out, self.d_p(el), koszul(el.q))
        return out

    def matrix(self, d: int, ring: CoefficientRing) -> SparseMatrix:
        return bar_differential(self, d, ring)


def enumerate_basis(A: AlgebraPresentation, n: int, d: int) -> List[LabeledBarElement]:
    return BarComplex(A, n).basis(d)


def bar_differential(bar: Union[BarComplex, AlgebraPresentation], d: int, ring: CoefficientRing,
                     n: Optional[int] = None) -> SparseMatrix:
    """Matrix of the bar differential from degree d to degree d - 1.

    Accepts a BarComplex, or an algebra together with n.
    """
    if not isinstance(bar, BarComplex):
        if n is None:
            raise TreeError("bar_differential on an algebra needs the level count n")
        bar = BarComplex(bar, n)
    source = bar.basis(d)
    target = bar.index(d - 1)
    triples = []
    for col, el in enumerate(source):
        for image, c in bar.differential(el).items():
            row = target.get(image)
            if row is None:
                raise InvariantError(
                    f"degree mismatch: {el.format(bar.algebra)} maps to {image.format(bar.algebra)} "
                    f"outside degree {d - 1}")
            triples.append((row, col, ring.convert(c)))
    return SparseMatrix.from_entries(len(target), len(source), triples, ring)
