import pytest

from enhomology.algdata import trivial_coefficients, truncated_polynomial, unital_extension
from enhomology.barcplx import BarComplex
from enhomology.coeff import INTEGERS, RATIONALS, prime_field
from enhomology.errors import RingError
from enhomology.homcalc import homology_table
from enhomology.twist import (
    COHOMOLOGY,
    GOLDEN_COEFFICIENT_DEGREES,
    GOLDEN_DEGREE_VARIANTS,
    HOMOLOGY,
    assemble_bar_complex,
    assemble_cohomology_complex,
    assemble_homology_complex,
    golden_theta_example,
    theta_on_basis,
    verify_square_zero,
)

from conftest import FIELDS, builtin_algebras, module_choices, random_algebras


@pytest.mark.parametrize("u", GOLDEN_COEFFICIENT_DEGREES)
@pytest.mark.parametrize("degrees", GOLDEN_DEGREE_VARIANTS)
def test_worked_example_term_for_term(degrees, u):
    check = golden_theta_example(degrees, u)
    assert check.matches, f"{check.describe(check.computed)} != {check.describe(check.expected)}"
    assert len(check.computed) == 4


@pytest.mark.parametrize("degrees,expected", [
    ((1, 1, 1, 1, 1), {"b0": -1, "b2": 1, "b3": 1, "b4": -1}),
    ((1, 0, 0, 0, 1), {"b0": -1, "b2": 1, "b3": -1, "b4": 1}),
    ((0, 0, 0, 0, 0), {"b0": -1, "b2": 1, "b3": -1, "b4": -1}),
])
def test_odd_coefficient_signs(degrees, expected):
    check = golden_theta_example(degrees, 1)
    by_name = {check.formatter(g).split("|", 1)[0]: c for g, c in check.computed.items()}
    assert by_name == expected
    assert check.matches


def test_theta_removes_one_leaf_and_one_degree():
    for A in builtin_algebras():
        M = unital_extension(A)
        for n in (1, 2):
            bar = BarComplex(A, n)
            for d in range(4):
                for el in bar.basis(d):
                    for m in range(len(M)):
                        for (m2, rest), _ in theta_on_basis(m, el, A, M).items():
                            assert rest.tree.leaf_count == el.tree.leaf_count - 1
                            assert M.degree(m2) + rest.degree(A) == M.degree(m) + d - 1


def test_theta_vanishes_with_trivial_action(trunc3):
    M = trivial_coefficients(trunc3)
    for el in BarComplex(trunc3, 2).basis(3):
        assert theta_on_basis(0, el, trunc3, M) == {}


@pytest.mark.parametrize("ring", FIELDS, ids=lambda r: r.label)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_twisted_differential_squares_to_zero(ring, n):
    top = 4 if n < 3 else 3
    for A in builtin_algebras() + random_algebras(4):
        for M in module_choices(A):
            c = assemble_homology_complex(A, M, n, top, ring, check=False)
            verify_square_zero(c)
            assert c.mode == HOMOLOGY


@pytest.mark.parametrize("ring", FIELDS, ids=lambda r: r.label)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_fifty_random_algebras_square_to_zero(ring, n):
    top = 3 if n < 3 else 2
    for A in random_algebras(50):
        for M in module_choices(A):
            verify_square_zero(assemble_homology_complex(A, M, n, top, ring, check=False))


def test_random_algebras_have_products():
    algebras = random_algebras(50)
    assert max(A.degree(i) for A in algebras for i in range(len(A))) <= 6
    assert sum(1 for A in algebras if A.product) >= 5


def test_internal_differentials_enter_the_twist(dg_pair):
    for n in (1, 2):
        for M in module_choices(dg_pair):
            c = assemble_homology_complex(dg_pair, M, n, 4, RATIONALS)
            assert any(not m.is_zero() for m in c.differentials.values())


@pytest.mark.parametrize("n", [1, 2, 3])
def test_trivial_coefficients_give_the_bar_complex(n):
    top = 6 if n == 1 else 4
    for A in builtin_algebras()[:5]:
        twisted = assemble_homology_complex(A, trivial_coefficients(A), n, top, RATIONALS)
        bare = assemble_bar_complex(A, n, top, RATIONALS)
        for d in twisted.degrees:
            assert twisted.differentials[d].to_dense() == bare.differentials[d].to_dense()
        assert homology_table(twisted).betti_numbers() == homology_table(bare).betti_numbers()


@pytest.mark.parametrize("ring", [RATIONALS, prime_field(3)], ids=lambda r: r.label)
@pytest.mark.parametrize("order", [3, 4])
def test_cohomology_dimensions_match_homology(ring, order):
    A = truncated_polynomial(order)
    top = 4
    for M in module_choices(A):
        for n in (1, 2):
            chains = homology_table(assemble_homology_complex(A, M, n, top, ring))
            cochains = homology_table(assemble_cohomology_complex(A, M, n, top, ring))
            assert cochains.metadata['mode'] == COHOMOLOGY
            for d in range(0, top):
                assert cochains.row(d).dim == chains.row(d).dim
                assert cochains.betti(d) == chains.betti(d), (M.name, n, d)


def test_cohomology_differential_squares_to_zero():
    for A in builtin_algebras() + random_algebras(4):
        for M in module_choices(A):
            for n in (1, 2):
                c = assemble_cohomology_complex(A, M, n, 3, prime_field(2), check=False)
                verify_square_zero(c)


def test_cohomology_needs_a_field(trunc3):
    with pytest.raises(RingError):
        assemble_cohomology_complex(trunc3, trivial_coefficients(trunc3), 1, 3, INTEGERS)


def test_matrix_sizes_follow_the_bases(trunc3):
    c = assemble_homology_complex(trunc3, unital_extension(trunc3), 2, 3, RATIONALS)
    for d, (rows, cols) in c.matrix_sizes().items():
        assert cols == c.dimension(d)
        assert rows == c.dimension(d - 1)


def test_reordering_bases_keeps_homology(trunc3):
    c = assemble_homology_complex(trunc3, unital_extension(trunc3), 1, 4, RATIONALS)
    perms = {d: list(reversed(range(c.dimension(d)))) for d in c.degrees}
    shuffled = c.permuted(perms)
    verify_square_zero(shuffled)
    assert homology_table(shuffled).betti_numbers() == homology_table(c).betti_numbers()
