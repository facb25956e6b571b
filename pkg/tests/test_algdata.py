from fractions import Fraction

import pytest

from enhomology.algdata import (
    builtin,
    dump_algebra,
    dump_bimodule,
    exterior_generator,
    load_and_validate_algebra,
    load_and_validate_bimodule,
    parse_scalar,
    trivial_algebra,
    trivial_coefficients,
    truncated_polynomial,
    unital_extension,
)
from enhomology.coeff import prime_field
from enhomology.errors import SchemaError, ValidationError

from conftest import builtin_algebras, random_algebras

TRUNC3_DOCUMENT = {
    'basis': [{'name': 'x', 'degree': 0}, {'name': 'x2', 'degree': 0}],
    'products': [{'left': 'x', 'right': 'x', 'result': [{'basis': 'x2', 'coeff': '1'}]}],
}


def test_truncated_polynomial_document_is_accepted():
    A = load_and_validate_algebra(TRUNC3_DOCUMENT)
    assert A.basis.names == ('x', 'x2')
    assert A.multiply(0, 0) == {1: Fraction(1)}
    assert A.multiply(0, 1) == {}
    assert A.product == truncated_polynomial(3).product


def test_commutativity_violation_is_reported():
    document = {
        'basis': [{'name': 'x', 'degree': 0}, {'name': 'x2', 'degree': 0}],
        'products': [
            {'left': 'x', 'right': 'x2', 'result': [{'basis': 'x', 'coeff': '1'}]},
            {'left': 'x2', 'right': 'x', 'result': []},
        ],
    }
    with pytest.raises(ValidationError) as info:
        load_and_validate_algebra(document)
    assert "commutativity" in str(info.value)
    assert info.value.tuple == ('x', 'x2')


def test_axioms_are_checked_in_the_target_ring():
    # x idempotent, y.x = 3y: commutative and associative only mod 2
    document = {
        'basis': [{'name': 'x', 'degree': 0}, {'name': 'y', 'degree': 0}],
        'products': [
            {'left': 'x', 'right': 'x', 'result': [{'basis': 'x', 'coeff': '1'}]},
            {'left': 'x', 'right': 'y', 'result': [{'basis': 'y', 'coeff': '1'}]},
            {'left': 'y', 'right': 'x', 'result': [{'basis': 'y', 'coeff': '3'}]},
        ],
    }
    with pytest.raises(ValidationError, match="commutativity"):
        load_and_validate_algebra(document)
    A = load_and_validate_algebra(document, ring=prime_field(2))
    assert A.multiply(1, 0) == {1: Fraction(3)}
    with pytest.raises(ValidationError):
        load_and_validate_algebra(document, ring=prime_field(3))


def test_degree_additivity_violation():
    document = {
        'basis': [{'name': 'x', 'degree': 0}, {'name': 'x2', 'degree': 1}],
        'products': [{'left': 'x', 'right': 'x', 'result': [{'basis': 'x2', 'coeff': '1'}]}],
    }
    with pytest.raises(ValidationError, match="degree additivity"):
        load_and_validate_algebra(document)


def test_schema_errors():
    with pytest.raises(SchemaError):
        load_and_validate_algebra({'products': []})
    with pytest.raises(SchemaError):
        load_and_validate_algebra({'basis': [{'name': 'x', 'degree': -1}]})
    with pytest.raises(SchemaError):
        load_and_validate_algebra({'basis': [{'name': 'x', 'degree': 0}],
                                   'products': [{'left': 'x', 'right': 'y', 'result': []}]})


def test_parse_scalar():
    assert parse_scalar("3/4") == Fraction(3, 4)
    assert parse_scalar(-2) == Fraction(-2)
    for bad in ("2/4", "1/0", "x", True, 1.5):
        with pytest.raises(SchemaError):
            parse_scalar(bad)


def test_trivial_module_is_accepted(trunc3):
    M = load_and_validate_bimodule({'basis': [{'name': 'k', 'degree': 0}]}, trunc3)
    assert len(M) == 1
    assert M.left(0, 0) == {}


def test_action_associativity_violation(trunc3):
    # (x x).m = x2.m = 0 while x.(x.m) = x.n = n
    document = {
        'basis': [{'name': 'm', 'degree': 0}, {'name': 'n', 'degree': 0}],
        'action': [
            {'algebra': 'x', 'module': 'm', 'result': [{'basis': 'n', 'coeff': '1'}]},
            {'algebra': 'x', 'module': 'n', 'result': [{'basis': 'n', 'coeff': '1'}]},
        ],
    }
    with pytest.raises(ValidationError) as info:
        load_and_validate_bimodule(document, trunc3)
    assert info.value.tuple == ('x', 'x', 'm')


def test_unital_extension(trunc3):
    M = unital_extension(trunc3)
    assert M.basis.names == ('1', 'x', 'x2')
    assert M.left(0, 0) == {1: Fraction(1)}
    assert M.left(0, 1) == {2: Fraction(1)}
    # forgetting the unit gives the algebra acting on itself
    for a in range(len(trunc3)):
        for b in range(len(trunc3)):
            assert {k - 1: v for k, v in M.left(a, b + 1).items()} == trunc3.multiply(a, b)


def test_right_action_is_koszul_symmetric():
    A = exterior_generator(1)
    M = unital_extension(A)
    assert M.right(0, 0) == M.left(0, 0)
    A = trivial_algebra(2, [1, 1])
    M = unital_extension(A)
    assert M.right(0, 0) == {1: Fraction(1)}


def test_builtins():
    A = builtin('trivial_algebra', 1, [0])
    assert A.basis.names == ('x1',) and A.product == {}
    assert builtin('trivial_algebra', 1, 0).basis == A.basis
    assert builtin('truncated_polynomial', 3).product == truncated_polynomial(3).product
    M = builtin('unital_extension', truncated_polynomial(3))
    assert len(M) == 3
    with pytest.raises(SchemaError):
        builtin('free_algebra')
    with pytest.raises(SchemaError):
        builtin('truncated_polynomial', 3, 2, 1)
    with pytest.raises(SchemaError):
        truncated_polynomial(1)


@pytest.mark.parametrize("A", builtin_algebras() + random_algebras(10), ids=lambda A: A.name)
def test_serialization_round_trip(A):
    again = load_and_validate_algebra(dump_algebra(A), name=A.name)
    assert again.basis == A.basis
    assert again.product == A.product
    assert again.differential == A.differential
    for M in (trivial_coefficients(A), unital_extension(A)):
        back = load_and_validate_bimodule(dump_bimodule(M), A)
        assert back.basis == M.basis
        assert back.action == M.action
        assert back.differential == M.differential


def test_derived_right_action_is_associative():
    for A in builtin_algebras():
        M = unital_extension(A)
        for m in range(len(M)):
            for a in range(len(A)):
                for b in range(len(A)):
                    lhs = {}
                    for ab, c in A.multiply(a, b).items():
                        for k, v in M.right(m, ab).items():
                            lhs[k] = lhs.get(k, 0) + c * v
                    rhs = {}
                    for ma, c in M.right(m, a).items():
                        for k, v in M.right(ma, b).items():
                            rhs[k] = rhs.get(k, 0) + c * v
                    assert {k: v for k, v in lhs.items() if v} == {k: v for k, v in rhs.items() if v}
