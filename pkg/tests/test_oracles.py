import pytest

from enhomology.algdata import trivial_coefficients, truncated_polynomial, unital_extension
from enhomology.coeff import INTEGERS, RATIONALS, SparseMatrix, prime_field
from enhomology.errors import InvariantError, ResourceError
from enhomology.homcalc import homology_table
from enhomology.oracles import (
    dense_homology_oracle,
    dense_invariant_factors,
    hochschild_complex,
    hochschild_homology,
)
from enhomology.twist import assemble_homology_complex

from conftest import graded_algebras, module_choices, odd_pair, random_algebras

TOP = 4


def outgoing_matrices(c):
    return {d: c.outgoing(d) for d in c.degrees}, {d: c.dimension(d) for d in c.degrees}


@pytest.mark.parametrize("ring", [RATIONALS, prime_field(3)], ids=lambda r: r.label)
def test_one_level_matches_shifted_reduced_hochschild(ring):
    for A in [truncated_polynomial(3), truncated_polynomial(4)] + graded_algebras():
        for M in module_choices(A):
            bar = homology_table(assemble_homology_complex(A, M, 1, TOP + 1, ring))
            hochschild = hochschild_homology(A, M, TOP + 2, ring, reduced=True)
            for d in range(TOP + 1):
                assert bar.betti(d) == hochschild.betti(d + 1), (A.name, M.name, d)


def test_length_zero_chains_split_off():
    # b(m|a) = m.a - a.m vanishes for a symmetric M, so M is a direct summand
    for A in graded_algebras():
        for M in module_choices(A):
            full = hochschild_homology(A, M, TOP, RATIONALS)
            reduced = hochschild_homology(A, M, TOP, RATIONALS, reduced=True)
            for d in range(TOP):
                assert full.betti(d) == reduced.betti(d) + M.basis.degrees.count(d), (A.name, M.name, d)


def test_odd_products_at_one_level():
    A = odd_pair()
    M = unital_extension(A)
    bar = homology_table(assemble_homology_complex(A, M, 1, 3, RATIONALS))
    assert [bar.betti(d) for d in range(3)] == [0, 2, 4]
    reduced = hochschild_complex(A, M, 3, RATIONALS, reduced=True)
    assert reduced.metadata['reduced']
    assert all(word for d in reduced.degrees for _, word in reduced.bases[d])


def test_dual_numbers_hochschild_line(dual_numbers):
    table = hochschild_homology(dual_numbers, trivial_coefficients(dual_numbers), 7, RATIONALS)
    assert table.betti_numbers(exact_only=True) == {d: 1 for d in range(7)}


def test_hochschild_complex_is_normalized(trunc3):
    c = hochschild_complex(trunc3, trivial_coefficients(trunc3), 3, RATIONALS)
    # k tensor words in x, x2: 2^d of them in degree d
    assert [c.dimension(d) for d in range(4)] == [1, 2, 4, 8]


@pytest.mark.parametrize("ring", [RATIONALS, prime_field(2), INTEGERS], ids=lambda r: r.label)
def test_sparse_reduction_matches_dense_oracle(ring):
    for A in random_algebras(4) + [truncated_polynomial(3)]:
        for M in module_choices(A):
            c = assemble_homology_complex(A, M, 2, 2, ring)
            matrices, dims = outgoing_matrices(c)
            dense = dense_homology_oracle(matrices, ring, dims)
            sparse = homology_table(c)
            for d in c.degrees:
                assert dense.betti(d) == sparse.betti(d), (A.name, M.name, d)
                assert sorted(dense.row(d).torsion) == sorted(sparse.row(d).torsion)


def test_integer_free_rank_matches_rationals(trunc3):
    for M in module_choices(trunc3):
        over_z = homology_table(assemble_homology_complex(trunc3, M, 1, 4, INTEGERS))
        over_q = homology_table(assemble_homology_complex(trunc3, M, 1, 4, RATIONALS))
        assert over_z.betti_numbers() == over_q.betti_numbers()


def test_dense_invariant_factors():
    m = SparseMatrix.from_dense([[2, 4, 4], [-6, 6, 12], [10, 4, 16]])
    assert dense_invariant_factors(m) == (2, 2, 156)
    assert dense_invariant_factors(SparseMatrix.zero(2, 2)) == ()


def test_dense_oracle_size_bound():
    with pytest.raises(ResourceError):
        dense_homology_oracle({0: SparseMatrix.zero(0, 501)}, RATIONALS)


def test_dense_oracle_rejects_mismatched_shapes():
    with pytest.raises(InvariantError):
        dense_homology_oracle({1: SparseMatrix.zero(2, 3)}, RATIONALS, {0: 1, 1: 3})
