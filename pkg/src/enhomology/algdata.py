"""
Presentations of the algebra A and the symmetric bimodule M.

Behavior:
- load_and_validate_algebra() and load_and_validate_bimodule() turn JSON
  documents into immutable presentations and then check every graded axiom
  exhaustively over basis tuples.
- builtin() produces the standard small examples used by tests and the CLI.
- dump_algebra() / dump_bimodule() write presentations back in the input
  schema, so an accepted presentation always survives a round trip.

Algebra document:
    {"basis": [{"name": "x", "degree": 0}, ...],
     "products": [{"left": "x", "right": "x", "result": [{"basis": "x2", "coeff": "1"}]}],
     "differential": [{"on": "y", "result": [...]}]}

Bimodule document:
    {"basis": [...],
     "action": [{"algebra": "x", "module": "m", "result": [...]}],
     "differential": [...]}

Notes:
- Algebras are nonunital; a unit only enters through unital_extension().
- Missing product pairs are zero; of (a, b) and (b, a) one suffices, the
  other is filled in by Koszul symmetry.
- Scalars are exact: integers or "p/q" strings in lowest terms.
- Axioms are compared in the coefficient ring the presentation will be used
  over, the rationals unless a ring is passed; built-ins are checked over the
  rationals and have integral structure constants.
- Algebra degrees must be nonnegative so that bar complexes are finite in
  each degree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .coeff import RATIONALS, CoefficientRing
from .errors import SchemaError, ValidationError

Combination = Dict[int, Fraction]

_NAME_PATTERN = re.compile(r'^[A-Za-z0-9_]+$')
_SCALAR_PATTERN = re.compile(r'^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$')


def koszul(*exponents: int) -> int:
    """(-1)^(sum of exponents)."""
    return -1 if sum(exponents) % 2 else 1


def add_into(acc: Dict[Any, Fraction], comb: Mapping[Any, Fraction], scale=1) -> None:
    for key, value in comb.items():
        new = acc.get(key, 0) + scale * value
        if new:
            acc[key] = new
        else:
            acc.pop(key, None)


def parse_scalar(value: Any) -> Fraction:
    if isinstance(value, bool):
        raise SchemaError(f"boolean is not a scalar: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise SchemaError(f"scalar must be an integer or a 'p/q' string, got {value!r}")
    match = _SCALAR_PATTERN.match(value)
    if match is None:
        raise SchemaError(f"malformed scalar {value!r}")
    num = int(match.group(1))
    if match.group(2) is None:
        return Fraction(num)
    den = int(match.group(2))
    if den == 0:
        raise SchemaError(f"zero denominator in {value!r}")
    result = Fraction(num, den)
    if result.numerator != num or result.denominator != den:
        raise SchemaError(f"scalar {value!r} is not in lowest terms")
    return result


def format_scalar(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class GradedBasis:
    names: Tuple[str, ...]
    degrees: Tuple[int, ...]
    _index: Dict[str, int] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.names:
            raise SchemaError("basis must be nonempty")
        if len(self.names) != len(self.degrees):
            raise SchemaError("basis names and degrees differ in length")
        for name in self.names:
            if not isinstance(name, str) or not _NAME_PATTERN.match(name):
                raise SchemaError(f"bad basis name {name!r}")
        if len(set(self.names)) != len(self.names):
            raise SchemaError(f"duplicate basis names in {self.names}")
        for d in self.degrees:
            if isinstance(d, bool) or not isinstance(d, int):
                raise SchemaError(f"degree must be an integer, got {d!r}")
        object.__setattr__(self, '_index', {name: i for i, name in enumerate(self.names)})

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[str, int]]) -> "GradedBasis":
        return cls(tuple(n for n, _ in pairs), tuple(d for _, d in pairs))

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SchemaError(f"unknown basis element {name!r}") from None

    def degree(self, i: int) -> int:
        return self.degrees[i]

    def format(self, comb: Mapping[int, Fraction]) -> str:
        if not comb:
            return "0"
        return " + ".join(f"{format_scalar(c)}*{self.names[i]}" for i, c in sorted(comb.items()))


@dataclass(frozen=True)
class AlgebraPresentation:
    basis: GradedBasis
    product: Mapping[Tuple[int, int], Combination]
    differential: Mapping[int, Combination] = field(default_factory=dict)
    name: str = "A"

    def __len__(self) -> int:
        return len(self.basis)

    def degree(self, i: int) -> int:
        return self.basis.degrees[i]

    def multiply(self, i: int, j: int) -> Combination:
        return self.product.get((i, j), {})

    def d(self, i: int) -> Combination:
        return self.differential.get(i, {})

    def multiply_combinations(self, left: Mapping[int, Fraction], right: Mapping[int, Fraction]) -> Combination:
        out: Combination = {}
        for i, a in left.items():
            for j, b in right.items():
                add_into(out, self.multiply(i, j), a * b)
        return out

    def d_combination(self, comb: Mapping[int, Fraction]) -> Combination:
        out: Combination = {}
        for i, a in comb.items():
            add_into(out, self.d(i), a)
        return out

    @property
    def has_differential(self) -> bool:
        return bool(self.differential)


@dataclass(frozen=True)
class BimodulePresentation:
    algebra: AlgebraPresentation
    basis: GradedBasis
    action: Mapping[Tuple[int, int], Combination]
    differential: Mapping[int, Combination] = field(default_factory=dict)
    name: str = "M"
    # for A_+: the algebra basis index behind each module basis element (None = unit)
    algebra_part: Optional[Tuple[Optional[int], ...]] = None

    def __len__(self) -> int:
        return len(self.basis)

    def degree(self, m: int) -> int:
        return self.basis.degrees[m]

    def left(self, a: int, m: int) -> Combination:
        return self.action.get((a, m), {})

    def right(self, m: int, a: int) -> Combination:
        """m.a = (-1)^(|a||m|) a.m"""
        sign = koszul(self.algebra.degree(a) * self.degree(m))
        return {k: sign * v for k, v in self.left(a, m).items()}

    def left_combination(self, a_comb: Mapping[int, Fraction], m_comb: Mapping[int, Fraction]) -> Combination:
        out: Combination = {}
        for a, x in a_comb.items():
            for m, y in m_comb.items():
                add_into(out, self.left(a, m), x * y)
        return out

    def d(self, m: int) -> Combination:
        return self.differential.get(m, {})

    def d_combination(self, comb: Mapping[int, Fraction]) -> Combination:
        out: Combination = {}
        for m, a in comb.items():
            add_into(out, self.d(m), a)
        return out

    @property
    def is_unital_extension(self) -> bool:
        return self.algebra_part is not None


# ---------------------------------------------------------------------------
# Document parsing
# ---------------------------------------------------------------------------

def _require(document: Mapping, key: str, kind, where: str):
    if key not in document:
        raise SchemaError(f"{where}: missing field {key!r}")
    value = document[key]
    if not isinstance(value, kind):
        raise SchemaError(f"{where}: field {key!r} has the wrong type")
    return value


def _parse_basis(document: Mapping, where: str) -> GradedBasis:
    entries = _require(document, 'basis', list, where)
    pairs = []
    for entry in entries:
        if not isinstance(entry, Mapping):
            raise SchemaError(f"{where}: basis entries must be objects")
        name = _require(entry, 'name', str, where)
        degree = _require(entry, 'degree', int, where)
        if isinstance(degree, bool):
            raise SchemaError(f"{where}: degree of {name!r} must be an integer")
        pairs.append((name, degree))
    return GradedBasis.from_pairs(pairs)


def _parse_combination(terms: Any, basis: GradedBasis, where: str) -> Combination:
    if not isinstance(terms, list):
        raise SchemaError(f"{where}: result must be a list")
    out: Combination = {}
    for term in terms:
        if not isinstance(term, Mapping):
            raise SchemaError(f"{where}: result terms must be objects")
        index = basis.index(_require(term, 'basis', str, where))
        if 'coeff' not in term:
            raise SchemaError(f"{where}: term without 'coeff'")
        add_into(out, {index: parse_scalar(term['coeff'])})
    return out


def _parse_differential(document: Mapping, basis: GradedBasis, where: str) -> Dict[int, Combination]:
    out: Dict[int, Combination] = {}
    for entry in document.get('differential', []) or []:
        if not isinstance(entry, Mapping):
            raise SchemaError(f"{where}: differential entries must be objects")
        source = basis.index(_require(entry, 'on', str, where))
        if source in out:
            raise SchemaError(f"{where}: differential of {basis.names[source]!r} given twice")
        comb = _parse_combination(entry.get('result'), basis, where)
        if comb:
            out[source] = comb
    return out


def load_and_validate_algebra(document: Mapping, name: str = "A",
                              ring: CoefficientRing = RATIONALS) -> AlgebraPresentation:
    """Parse an algebra document and check all graded axioms with scalars taken in ring."""
    where = "algebra"
    if not isinstance(document, Mapping):
        raise SchemaError(f"{where}: document must be an object")
    basis = _parse_basis(document, where)
    for n, d in zip(basis.names, basis.degrees):
        if d < 0:
            raise SchemaError(f"{where}: basis element {n!r} has negative degree {d}")
    given: Dict[Tuple[int, int], Combination] = {}
    for entry in document.get('products', []) or []:
        if not isinstance(entry, Mapping):
            raise SchemaError(f"{where}: product entries must be objects")
        key = (basis.index(_require(entry, 'left', str, where)),
               basis.index(_require(entry, 'right', str, where)))
        if key in given:
            raise SchemaError(f"{where}: product {basis.names[key[0]]}*{basis.names[key[1]]} given twice")
        given[key] = _parse_combination(entry.get('result'), basis, where)
    product = {k: v for k, v in given.items() if v}
    for (i, j), comb in given.items():
        if (j, i) not in given and comb:
            sign = koszul(basis.degrees[i] * basis.degrees[j])
            product[(j, i)] = {k: sign * v for k, v in comb.items()}
    algebra = AlgebraPresentation(basis, product, _parse_differential(document, basis, where), name)
    validate_algebra(algebra, ring)
    return algebra


def load_and_validate_bimodule(document: Mapping, algebra: AlgebraPresentation,
                               name: str = "M", ring: CoefficientRing = RATIONALS) -> BimodulePresentation:
    """Parse a bimodule document over a validated algebra and check its axioms in ring."""
    where = "bimodule"
    if not isinstance(document, Mapping):
        raise SchemaError(f"{where}: document must be an object")
    basis = _parse_basis(document, where)
    action: Dict[Tuple[int, int], Combination] = {}
    for entry in document.get('action', []) or []:
        if not isinstance(entry, Mapping):
            raise SchemaError(f"{where}: action entries must be objects")
        key = (algebra.basis.index(_require(entry, 'algebra', str, where)),
               basis.index(_require(entry, 'module', str, where)))
        if key in action:
            raise SchemaError(f"{where}: action of {algebra.basis.names[key[0]]} on "
                              f"{basis.names[key[1]]} given twice")
        comb = _parse_combination(entry.get('result'), basis, where)
        if comb:
            action[key] = comb
    module = BimodulePresentation(algebra, basis, action, _parse_differential(document, basis, where), name)
    validate_bimodule(module, ring)
    return module


# ---------------------------------------------------------------------------
# Axiom checks
# ---------------------------------------------------------------------------

def _scaled(comb: Mapping[int, Fraction], scale) -> Combination:
    return {k: scale * v for k, v in comb.items() if scale * v}


def _sum(*combs: Mapping[int, Fraction]) -> Combination:
    out: Combination = {}
    for comb in combs:
        add_into(out, comb)
    return out


def _agree(lhs: Mapping[int, Fraction], rhs: Mapping[int, Fraction], ring: CoefficientRing) -> bool:
    return all(ring.is_zero(ring.convert(lhs.get(k, 0) - rhs.get(k, 0))) for k in set(lhs) | set(rhs))


def validate_algebra(A: AlgebraPresentation, ring: CoefficientRing = RATIONALS) -> None:
    basis = A.basis
    names = basis.names
    fmt = basis.format
    idx = range(len(A))
    for (i, j), comb in A.product.items():
        for k in comb:
            if basis.degrees[k] != basis.degrees[i] + basis.degrees[j]:
                raise ValidationError("degree additivity", (names[i], names[j]),
                                      f"|{names[k]}|={basis.degrees[k]}",
                                      f"|{names[i]}|+|{names[j]}|={basis.degrees[i] + basis.degrees[j]}")
    for i, comb in A.differential.items():
        for k in comb:
            if basis.degrees[k] != basis.degrees[i] - 1:
                raise ValidationError("differential must lower degree by one", (names[i],),
                                      f"|{names[k]}|={basis.degrees[k]}", f"|{names[i]}|-1={basis.degrees[i] - 1}")
    for i, j in cartesian(idx, idx):
        lhs = A.multiply(i, j)
        rhs = _scaled(A.multiply(j, i), koszul(basis.degrees[i] * basis.degrees[j]))
        if not _agree(lhs, rhs, ring):
            raise ValidationError("graded commutativity", (names[i], names[j]), fmt(lhs), fmt(rhs))
    for i, j, k in cartesian(idx, idx, idx):
        lhs = A.multiply_combinations(A.multiply(i, j), {k: Fraction(1)})
        rhs = A.multiply_combinations({i: Fraction(1)}, A.multiply(j, k))
        if not _agree(lhs, rhs, ring):
            raise ValidationError("associativity", (names[i], names[j], names[k]), fmt(lhs), fmt(rhs))
    for i in idx:
        dd = A.d_combination(A.d(i))
        if not _agree(dd, {}, ring):
            raise ValidationError("d^2 = 0", (names[i],), fmt(dd), "0")
    for i, j in cartesian(idx, idx):
        lhs = A.d_combination(A.multiply(i, j))
        rhs = _sum(A.multiply_combinations(A.d(i), {j: Fraction(1)}),
                   _scaled(A.multiply_combinations({i: Fraction(1)}, A.d(j)), koszul(basis.degrees[i])))
        if not _agree(lhs, rhs, ring):
            raise ValidationError("Leibniz rule", (names[i], names[j]), fmt(lhs), fmt(rhs))


def validate_bimodule(M: BimodulePresentation, ring: CoefficientRing = RATIONALS) -> None:
    A = M.algebra
    anames = A.basis.names
    mnames = M.basis.names
    fmt = M.basis.format
    one = Fraction(1)
    for (a, m), comb in M.action.items():
        for k in comb:
            if M.degree(k) != A.degree(a) + M.degree(m):
                raise ValidationError("action degree additivity", (anames[a], mnames[m]),
                                      f"|{mnames[k]}|={M.degree(k)}",
                                      f"|{anames[a]}|+|{mnames[m]}|={A.degree(a) + M.degree(m)}")
    for m, comb in M.differential.items():
        for k in comb:
            if M.degree(k) != M.degree(m) - 1:
                raise ValidationError("differential must lower degree by one", (mnames[m],),
                                      f"|{mnames[k]}|={M.degree(k)}", f"|{mnames[m]}|-1={M.degree(m) - 1}")
    for a, b, m in cartesian(range(len(A)), range(len(A)), range(len(M))):
        lhs = M.left_combination(A.multiply(a, b), {m: one})
        rhs = M.left_combination({a: one}, M.left(b, m))
        if not _agree(lhs, rhs, ring):
            raise ValidationError("action associativity (ab)m = a(bm)", (anames[a], anames[b], mnames[m]),
                                  fmt(lhs), fmt(rhs))
    for m in range(len(M)):
        dd = M.d_combination(M.d(m))
        if not _agree(dd, {}, ring):
            raise ValidationError("d^2 = 0", (mnames[m],), fmt(dd), "0")
    for a, m in cartesian(range(len(A)), range(len(M))):
        lhs = M.d_combination(M.left(a, m))
        rhs = _sum(M.left_combination(A.d(a), {m: one}),
                   _scaled(M.left_combination({a: one}, M.d(m)), koszul(A.degree(a))))
        if not _agree(lhs, rhs, ring):
            raise ValidationError("Leibniz rule for the action", (anames[a], mnames[m]), fmt(lhs), fmt(rhs))


# ---------------------------------------------------------------------------
# Built-in presentations
# ---------------------------------------------------------------------------

def trivial_algebra(generators: int, degrees: Union[int, Sequence[int]]) -> AlgebraPresentation:
    """g generators x1..xg with all products zero; a single int degree serves one generator."""
    if isinstance(degrees, int):
        degrees = [degrees]
    if generators < 1 or len(degrees) != generators:
        raise SchemaError("trivial_algebra needs g >= 1 generators and one degree per generator")
    if any(d < 0 for d in degrees):
        raise SchemaError("trivial_algebra degrees must be nonnegative")
    basis = GradedBasis(tuple(f"x{i + 1}" for i in range(generators)), tuple(int(d) for d in degrees))
    algebra = AlgebraPresentation(basis, {}, {}, f"trivial_algebra({generators},{list(degrees)})")
    validate_algebra(algebra)
    return algebra


def truncated_polynomial(order: int, degree: int = 0) -> AlgebraPresentation:
    """Augmentation ideal of k[x]/(x^order): basis x, x2, ..., x{order-1}."""
    if order < 2:
        raise SchemaError("truncated_polynomial needs truncation order >= 2")
    if degree < 0:
        raise SchemaError("generator degree must be nonnegative")
    names = tuple('x' if p == 1 else f"x{p}" for p in range(1, order))
    basis = GradedBasis(names, tuple(p * degree for p in range(1, order)))
    product = {}
    for p, q in cartesian(range(1, order), range(1, order)):
        if p + q < order:
            product[(p - 1, q - 1)] = {p + q - 1: Fraction(1)}
    label = f"truncated_polynomial({order})" if degree == 0 else f"truncated_polynomial({order},{degree})"
    algebra = AlgebraPresentation(basis, product, {}, label)
    validate_algebra(algebra)
    return algebra


def exterior_generator(degree: int) -> AlgebraPresentation:
    """The one-dimensional algebra spanned by e with e*e = 0."""
    if degree < 0:
        raise SchemaError("generator degree must be nonnegative")
    algebra = AlgebraPresentation(GradedBasis(('e',), (degree,)), {}, {}, f"exterior_generator({degree})")
    validate_algebra(algebra)
    return algebra


UNIT_NAME = '1'


def unital_extension(A: AlgebraPresentation) -> BimodulePresentation:
    """A_+ = k.1 + A as a symmetric bimodule over A."""
    if UNIT_NAME in A.basis.names:
        raise SchemaError(f"algebra basis already uses the unit name {UNIT_NAME!r}")
    basis = GradedBasis((UNIT_NAME,) + A.basis.names, (0,) + A.basis.degrees)
    action: Dict[Tuple[int, int], Combination] = {}
    for a in range(len(A)):
        action[(a, 0)] = {a + 1: Fraction(1)}
        for b in range(len(A)):
            comb = A.multiply(a, b)
            if comb:
                action[(a, b + 1)] = {k + 1: v for k, v in comb.items()}
    differential = {i + 1: {k + 1: v for k, v in comb.items()} for i, comb in A.differential.items()}
    module = BimodulePresentation(A, basis, action, differential, f"unital_extension({A.name})",
                                  (None,) + tuple(range(len(A))))
    validate_bimodule(module)
    return module


def trivial_coefficients(A: AlgebraPresentation) -> BimodulePresentation:
    """k in degree 0 with zero action."""
    module = BimodulePresentation(A, GradedBasis(('k',), (0,)), {}, {}, "trivial_coefficients")
    validate_bimodule(module)
    return module


BUILTINS = {
    'trivial_algebra': trivial_algebra,
    'truncated_polynomial': truncated_polynomial,
    'exterior_generator': exterior_generator,
    'unital_extension': unital_extension,
    'trivial_coefficients': trivial_coefficients,
}


def builtin(name: str, *params):
    """Look up a built-in presentation by name."""
    factory = BUILTINS.get(name)
    if factory is None:
        raise SchemaError(f"unknown builtin {name!r}; choose from {', '.join(sorted(BUILTINS))}")
    try:
        return factory(*params)
    except TypeError as exc:
        raise SchemaError(f"bad parameters for builtin {name!r}: {exc}") from None


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _dump_combination(comb: Mapping[int, Fraction], basis: GradedBasis) -> List[Dict[str, str]]:
    return [{'basis': basis.names[k], 'coeff': format_scalar(v)} for k, v in sorted(comb.items())]


def _dump_basis(basis: GradedBasis) -> List[Dict[str, Any]]:
    return [{'name': n, 'degree': d} for n, d in zip(basis.names, basis.degrees)]


def _dump_differential(differential: Mapping[int, Combination], basis: GradedBasis) -> List[Dict[str, Any]]:
    return [{'on': basis.names[i], 'result': _dump_combination(comb, basis)}
            for i, comb in sorted(differential.items())]


def dump_algebra(A: AlgebraPresentation) -> Dict[str, Any]:
    basis = A.basis
    products = [
        {'left': basis.names[i], 'right': basis.names[j], 'result': _dump_combination(comb, basis)}
        for (i, j), comb in sorted(A.product.items()) if i <= j
    ]
    document: Dict[str, Any] = {'basis': _dump_basis(basis), 'products': products}
    if A.differential:
        document['differential'] = _dump_differential(A.differential, basis)
    return document


def dump_bimodule(M: BimodulePresentation) -> Dict[str, Any]:
    action = [
        {'algebra': M.algebra.basis.names[a], 'module': M.basis.names[m],
         'result': _dump_combination(comb, M.basis)}
        for (a, m), comb in sorted(M.action.items())
    ]
    document: Dict[str, Any] = {'basis': _dump_basis(M.basis), 'action': action}
    if M.differential:
        document['differential'] = _dump_differential(M.differential, M.basis)
    return document
