"""
Planar fully grown n-level trees and complete graphs.

Behavior:
- A LevelTree is stored as its fiber sizes, level by level. Level 0 is the
  single root; fibers[i - 1] lists, for every vertex at level i - 1, how many
  children it has at level i. The leaves are the vertices at level n.
- Trees are enumerated in canonical order (lexicographic on the fiber
  tuples), grafted from and split into their level-1 subtrees, and edited by
  deleting a leaf from a non-singleton top fiber.
- dfs_edge_index() numbers edges depth-first, root first, children left to
  right; the number of the edge above a leaf drives the sign of the
  coefficient twist.
- CompleteGraph is an ordering of a vertex set plus a symmetric weight on
  pairs. graph_leq, graph_compose, in_Kn and the cell membership test
  tree_kappa_membership live here as well.

Text form:
    n=2, level-1 fibers (2,), level-2 fibers (3, 2)  <->  "[2];[3,2]"
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import accumulate, combinations, product
from typing import Dict, Hashable, Iterable, Iterator, List, Mapping, NamedTuple, Sequence, Tuple

from .errors import GraphError, SchemaError, TreeError


def compositions(total: int) -> Iterator[Tuple[int, ...]]:
    """Ordered compositions of total into positive parts."""
    if total == 0:
        yield ()
        return
    for first in range(1, total + 1):
        for rest in compositions(total - first):
            yield (first,) + rest


def _owner(fiber_sizes: Sequence[int], child: int) -> int:
    """Index of the fiber (= parent vertex) containing child."""
    for parent, end in enumerate(accumulate(fiber_sizes)):
        if child < end:
            return parent
    raise TreeError(f"vertex {child} outside a level with {sum(fiber_sizes)} vertices")


@dataclass(frozen=True, order=True)
class LevelTree:
    fibers: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if not self.fibers:
            raise TreeError("a level tree needs at least one level")
        if len(self.fibers[0]) != 1:
            raise TreeError("level 1 must hang from a single root")
        for i, level in enumerate(self.fibers):
            if any(size < 1 for size in level):
                raise TreeError(f"empty fiber at level {i + 1}: {level}")
            if i and len(level) != sum(self.fibers[i - 1]):
                raise TreeError(
                    f"level {i + 1} has {len(level)} fibers but level {i} has {sum(self.fibers[i - 1])} vertices"
                )

    @classmethod
    def corolla(cls, leaves: int) -> "LevelTree":
        return cls(((leaves,),))

    @classmethod
    def trunk(cls, n: int) -> "LevelTree":
        return cls(tuple((1,) for _ in range(n)))

    @classmethod
    def graft(cls, subtrees: Sequence["LevelTree"]) -> "LevelTree":
        """The tree whose level-1 subtrees are the given (n-1)-level trees."""
        depth = {t.n for t in subtrees}
        if len(depth) != 1:
            raise TreeError("grafted subtrees must share a level count")
        (sub_n,) = depth
        levels = [(len(subtrees),)]
        for i in range(sub_n):
            levels.append(tuple(size for t in subtrees for size in t.fibers[i]))
        return cls(tuple(levels))

    @classmethod
    def from_text(cls, text: str) -> "LevelTree":
        try:
            levels = []
            for chunk in text.strip().split(';'):
                body = chunk.strip()
                if not (body.startswith('[') and body.endswith(']')):
                    raise ValueError(chunk)
                levels.append(tuple(int(x) for x in body[1:-1].split(',')))
        except ValueError:
            raise SchemaError(f"cannot parse tree {text!r}") from None
        return cls(tuple(levels))

    def to_text(self) -> str:
        return ';'.join('[' + ','.join(str(s) for s in level) + ']' for level in self.fibers)

    def __str__(self) -> str:
        return self.to_text()

    @property
    def n(self) -> int:
        return len(self.fibers)

    @property
    def vertex_counts(self) -> Tuple[int, ...]:
        return tuple(sum(level) for level in self.fibers)

    @property
    def leaf_count(self) -> int:
        return sum(self.fibers[-1])

    @property
    def edge_count(self) -> int:
        return sum(self.vertex_counts)

    def subtrees(self) -> Tuple["LevelTree", ...]:
        """The (n-1)-level trees hanging from the level-1 vertices."""
        if self.n == 1:
            raise TreeError("a 1-level tree has no level-1 subtrees")
        owned = [1] * self.fibers[0][0]
        parts: List[List[Tuple[int, ...]]] = [[] for _ in owned]
        for level in self.fibers[1:]:
            pos = 0
            next_owned = []
            for j, k in enumerate(owned):
                chunk = level[pos:pos + k]
                pos += k
                parts[j].append(chunk)
                next_owned.append(sum(chunk))
            owned = next_owned
        return tuple(LevelTree(tuple(p)) for p in parts)

    def ancestors(self, leaf: int) -> Tuple[int, ...]:
        """Vertex indices on the path root -> leaf, one per level 0..n."""
        self._check_leaf(leaf)
        path = [leaf]
        vertex = leaf
        for level in reversed(self.fibers):
            vertex = _owner(level, vertex)
            path.append(vertex)
        return tuple(reversed(path))

    def meet_level(self, i: int, j: int) -> int:
        """Level of the deepest common ancestor of two leaves."""
        common = 0
        for level, (a, b) in enumerate(zip(self.ancestors(i), self.ancestors(j))):
            if a != b:
                break
            common = level
        return common

    def top_fiber_of(self, leaf: int) -> int:
        self._check_leaf(leaf)
        return _owner(self.fibers[-1], leaf)

    def top_fiber_ranges(self) -> List[Tuple[int, int]]:
        """(first leaf, one past last leaf) for each level-n fiber."""
        ends = list(accumulate(self.fibers[-1]))
        return [(end - size, end) for end, size in zip(ends, self.fibers[-1])]

    def leaf_edge_indices(self) -> Tuple[int, ...]:
        indices: Dict[int, int] = {}
        starts = [[0] + list(accumulate(level))[:-1] for level in self.fibers]
        counter = 0

        def visit(level: int, vertex: int) -> None:
            nonlocal counter
            first = starts[level][vertex]
            for child in range(first, first + self.fibers[level][vertex]):
                counter += 1
                if level + 1 == self.n:
                    indices[child] = counter
                else:
                    visit(level + 1, child)

        visit(0, 0)
        return tuple(indices[i] for i in range(self.leaf_count))

    def _check_leaf(self, leaf: int) -> None:
        if not 0 <= leaf < self.leaf_count:
            raise TreeError(f"leaf {leaf} outside a tree with {self.leaf_count} leaves")


@lru_cache(maxsize=None)
def _enumerate(n: int, leaves: int) -> Tuple[LevelTree, ...]:
    if n == 1:
        return (LevelTree.corolla(leaves),)
    out = []
    for parts in compositions(leaves):
        for subs in product(*(_enumerate(n - 1, k) for k in parts)):
            out.append(LevelTree.graft(subs))
    return tuple(sorted(out))


def enumerate_trees(n: int, leaves: int) -> List[LevelTree]:
    """All n-level trees with the given leaf count, canonically ordered."""
    if n < 1:
        raise TreeError(f"level count must be at least 1, got {n}")
    if leaves < 1:
        raise TreeError(f"leaf count must be at least 1, got {leaves}")
    return list(_enumerate(n, leaves))


def tree_count(n: int, leaves: int) -> int:
    """c_n(r) by the composition recursion, without building trees."""
    if n == 1:
        return 1
    total = 0
    for parts in compositions(leaves):
        prod = 1
        for k in parts:
            prod *= tree_count(n - 1, k)
        total += prod
    return total


def delete_leaf(t: LevelTree, s: int) -> LevelTree:
    """t minus leaf s; s must share its top fiber with another leaf."""
    fiber = t.top_fiber_of(s)
    top = list(t.fibers[-1])
    if top[fiber] == 1:
        raise TreeError(f"leaf {s} is the only leaf of its fiber")
    top[fiber] -= 1
    return LevelTree(t.fibers[:-1] + (tuple(top),))


class ThetaDeletion(NamedTuple):
    leaf: int
    sign: int
    is_min: bool


def dfs_edge_index(t: LevelTree, i: int) -> int:
    t._check_leaf(i)
    return t.leaf_edge_indices()[i]


def theta_deletions(t: LevelTree) -> List[ThetaDeletion]:
    """Min and max leaf of every top fiber of size > 1, with their edge signs.

    The min leaf x carries (-1)^(s_x - 1), the max leaf y carries (-1)^s_y,
    where s is the depth-first edge index.
    """
    edges = t.leaf_edge_indices()
    out = []
    for first, end in t.top_fiber_ranges():
        if end - first < 2:
            continue
        last = end - 1
        out.append(ThetaDeletion(first, -1 if (edges[first] - 1) % 2 else 1, True))
        out.append(ThetaDeletion(last, -1 if edges[last] % 2 else 1, False))
    return out


@dataclass(frozen=True)
class Labeling:
    """order[i] is the label sitting on leaf i."""

    order: Tuple[Hashable, ...]

    def __post_init__(self):
        if len(set(self.order)) != len(self.order):
            raise TreeError(f"labeling is not a bijection: {self.order}")

    @classmethod
    def canonical(cls, leaves: int) -> "Labeling":
        return cls(tuple(range(leaves)))

    @property
    def labels(self) -> frozenset:
        return frozenset(self.order)

    def position(self, label: Hashable) -> int:
        return self.order.index(label)

    def __len__(self) -> int:
        return len(self.order)


def relabel(lab: Labeling, s: int) -> Labeling:
    """Labeling of t minus leaf s: positions after s shift down by one."""
    if not 0 <= s < len(lab.order):
        raise TreeError(f"leaf {s} outside a labeling of {len(lab.order)} leaves")
    return Labeling(lab.order[:s] + lab.order[s + 1:])


def _pair(e: Hashable, f: Hashable) -> frozenset:
    return frozenset((e, f))


@dataclass(frozen=True)
class CompleteGraph:
    """An ordering of the vertices (listed from first to last) plus pair weights."""

    ordering: Tuple[Hashable, ...]
    weights: Mapping[frozenset, int]

    def __post_init__(self):
        if len(set(self.ordering)) != len(self.ordering):
            raise GraphError(f"ordering is not a bijection: {self.ordering}")
        expected = {_pair(e, f) for e, f in combinations(self.ordering, 2)}
        if set(self.weights) != expected:
            raise GraphError("weights must cover exactly the vertex pairs")
        if any(w < 0 for w in self.weights.values()):
            raise GraphError("weights must be nonnegative")

    @classmethod
    def build(cls, ordering: Iterable[Hashable], weight) -> "CompleteGraph":
        """weight is a constant, a mapping keyed by vertex pairs, or a callable (e, f) -> int."""
        ordering = tuple(ordering)
        weights = {}
        for e, f in combinations(ordering, 2):
            if callable(weight):
                w = weight(e, f)
            elif isinstance(weight, Mapping):
                w = weight[(e, f)] if (e, f) in weight else weight[(f, e)]
            else:
                w = weight
            weights[_pair(e, f)] = int(w)
        return cls(ordering, weights)

    def __hash__(self) -> int:
        return hash((self.ordering, frozenset(self.weights.items())))

    @property
    def vertices(self) -> frozenset:
        return frozenset(self.ordering)

    def weight(self, e: Hashable, f: Hashable) -> int:
        return self.weights[_pair(e, f)]

    def oriented(self, e: Hashable, f: Hashable) -> bool:
        """True when e comes before f (sigma_ef = id)."""
        return self.ordering.index(e) < self.ordering.index(f)

    def restrict(self, subset: Iterable[Hashable]) -> "CompleteGraph":
        keep = set(subset)
        if not keep <= self.vertices:
            raise GraphError(f"cannot restrict to vertices {sorted(keep - self.vertices, key=repr)}")
        ordering = tuple(v for v in self.ordering if v in keep)
        return CompleteGraph(ordering, {p: w for p, w in self.weights.items() if p <= keep})


def graph_leq(a: CompleteGraph, b: CompleteGraph) -> bool:
    if a.vertices != b.vertices:
        raise GraphError("graphs on different vertex sets are incomparable")
    for e, f in combinations(a.ordering, 2):
        wa, wb = a.weight(e, f), b.weight(e, f)
        if wa < wb:
            continue
        if wa == wb and a.oriented(e, f) == b.oriented(e, f):
            continue
        return False
    return True


def graph_compose(a: CompleteGraph, v: Hashable, b: CompleteGraph) -> CompleteGraph:
    """Substitute b for the vertex v of a."""
    if v not in a.vertices:
        raise GraphError(f"vertex {v!r} absent from the outer graph")
    outer = a.vertices - {v}
    if outer & b.vertices:
        raise GraphError("inserted graph shares vertices with the outer graph")
    ordering = []
    for w in a.ordering:
        ordering.extend(b.ordering if w == v else (w,))

    def weight(e, f):
        if e in b.vertices and f in b.vertices:
            return b.weight(e, f)
        if e in b.vertices:
            e = v
        if f in b.vertices:
            f = v
        return a.weight(e, f)

    return CompleteGraph.build(ordering, weight)


def in_Kn(k: CompleteGraph, n: int) -> bool:
    return all(w <= n - 1 for w in k.weights.values())


def minimal_complete_graph(t: LevelTree, lab: Labeling, n: int) -> CompleteGraph:
    """Leaf order plus weight n - 1 - (level where the two leaf paths meet)."""
    if t.n != n:
        raise TreeError(f"tree has {t.n} levels, expected {n}")
    if len(lab) != t.leaf_count:
        raise TreeError("labeling size does not match the leaf count")
    pos = {label: i for i, label in enumerate(lab.order)}
    return CompleteGraph.build(lab.order, lambda e, f: n - 1 - t.meet_level(pos[e], pos[f]))


def tree_kappa_membership(t: LevelTree, lab: Labeling, k: CompleteGraph) -> bool:
    """Whether the labeled tree lies in the cell of T^n indexed by k."""
    if lab.labels != k.vertices:
        raise GraphError("graph vertices differ from the tree labels")
    if len(lab) != t.leaf_count:
        raise TreeError("labeling size does not match the leaf count")
    return _member(t, lab.order, k)


def _member(t: LevelTree, order: Tuple[Hashable, ...], k: CompleteGraph) -> bool:
    n = t.n
    if n == 1:
        # weight-0 pairs must follow the leaf order
        return all(k.weight(e, f) > 0 or k.oriented(e, f) for e, f in combinations(order, 2))
    subs = t.subtrees()
    block: Dict[Hashable, int] = {}
    chunks = []
    pos = 0
    for j, sub in enumerate(subs):
        chunk = order[pos:pos + sub.leaf_count]
        pos += sub.leaf_count
        chunks.append(chunk)
        block.update((label, j) for label in chunk)
    for e, f in combinations(order, 2):
        w = k.weight(e, f)
        if block[e] == block[f]:
            continue
        if w < n - 1:
            return False
        if w == n - 1 and not k.oriented(e, f):
            return False
    return all(_member(sub, chunk, k.restrict(chunk)) for sub, chunk in zip(subs, chunks))
