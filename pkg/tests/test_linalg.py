from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bggkit.linalg import (
    InnerProduct,
    LinAlgError,
    SparseMat,
    block_matrix,
    column_space,
    inverse,
    nullspace,
    orthogonal_complement,
    pinv_onto,
    project,
    projection_onto,
    rank,
    solve_dense,
    solve_thin,
)

from oracles import bareiss_rank, dense_nullspace

F = Fraction


def mat(rows):
    return SparseMat.from_dense(rows)


small_fractions = st.builds(F, st.integers(-6, 6), st.integers(1, 4))
small_matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(
            st.lists(small_fractions, min_size=c, max_size=c),
            min_size=r, max_size=r).map(mat)))


def test_rank_identity_and_zero():
    assert rank(SparseMat.identity(2)) == 2
    assert rank(SparseMat.zero(3, 4)) == 0


def test_rank_rectangular():
    m = mat([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    assert rank(m) == 2
    assert rank(m) == bareiss_rank(m.to_dense())


@settings(max_examples=150, deadline=None)
@given(small_matrices)
def test_rank_matches_dense_oracle(m):
    assert rank(m) == bareiss_rank(m.to_dense())


@settings(max_examples=150, deadline=None)
@given(small_matrices)
def test_rank_nullity(m):
    assert rank(m) + len(nullspace(m)) == m.cols


def test_nullspace_identity_empty():
    assert nullspace(SparseMat.identity(4)) == []


def test_nullspace_sum_to_zero():
    basis = nullspace(mat([[1, 1, 1]]))
    assert len(basis) == 2
    for v in basis:
        assert sum(v) == 0


@settings(max_examples=100, deadline=None)
@given(small_matrices)
def test_nullspace_vectors_annihilate(m):
    basis = nullspace(m)
    assert len(basis) == len(dense_nullspace(m.to_dense()))
    for v in basis:
        assert all(x == 0 for x in m.apply(v))
    # linear independence: stacking them keeps full rank
    if basis:
        b = SparseMat.from_columns(basis, m.cols)
        assert rank(b) == len(basis)


def test_column_space_spans():
    m = mat([[1, 2, 3], [2, 4, 6], [0, 1, 1]])
    c = column_space(m)
    assert c.cols == 2
    assert rank(c) == 2
    # every column of m is a combination of the pivot columns
    solve_thin(c, m)


def test_project_onto_axis():
    ip = InnerProduct.standard(2)
    assert project([[F(1), F(0)]], ip, [F(3), F(4)]) == [F(3), F(0)]


def test_project_full_space_is_identity():
    ip = InnerProduct.standard(3)
    basis = [[F(1), F(0), F(0)], [F(1), F(1), F(0)], [F(0), F(2), F(1)]]
    v = [F(5), F(-7), F(13, 3)]
    assert project(basis, ip, v) == v


def test_project_identity_onto_span_in_m2():
    # M_2 flattened row-major; span of the identity and the 2D rotation
    # generator under the Frobenius inner product.
    ident = [F(1), F(0), F(0), F(1)]
    rot = [F(0), F(-1), F(1), F(0)]
    ip = InnerProduct.standard(4)
    assert project([ident, rot], ip, ident) == ident


def test_project_rejects_dependent_basis():
    ip = InnerProduct.standard(2)
    with pytest.raises(LinAlgError):
        project([[F(1), F(1)], [F(2), F(2)]], ip, [F(1), F(0)])


def test_projection_idempotent_and_self_adjoint():
    gram = mat([[2, 1, 0], [1, 2, 0], [0, 0, 1]])
    ip = InnerProduct(gram)
    basis = SparseMat.from_columns([[F(1), F(2), F(0)], [F(0), F(1), F(1)]], 3)
    p = projection_onto(basis, ip)
    assert p @ p == p
    # self-adjoint wrt ip: gram @ p symmetric
    gp = ip.gram @ p
    assert gp == gp.transpose()


def test_inner_product_rejects_indefinite():
    with pytest.raises(LinAlgError):
        InnerProduct(mat([[1, 2], [2, 1]]))
    with pytest.raises(LinAlgError):
        InnerProduct(mat([[0, 0], [0, 1]]))
    with pytest.raises(LinAlgError):
        InnerProduct(mat([[1, 2], [3, 4]]))


def test_pinv_invertible_is_inverse():
    m = mat([[1, 2], [3, 5]])
    assert pinv_onto(m) == inverse(m)


def test_pinv_zero_is_zero_transposed_shape():
    p = pinv_onto(SparseMat.zero(2, 5))
    assert (p.rows, p.cols) == (5, 2)
    assert p.is_zero()


@settings(max_examples=100, deadline=None)
@given(small_matrices)
def test_penrose_identities(m):
    p = pinv_onto(m)
    assert m @ p @ m == m
    assert p @ m @ p == p


def test_pinv_with_nonstandard_inner_products():
    m = mat([[1, 1, 0]])
    ip_dom = InnerProduct(mat([[2, 0, 0], [0, 1, 0], [0, 0, 3]]))
    ip_cod = InnerProduct(mat([[5]]))
    p = pinv_onto(m, ip_dom, ip_cod)
    assert m @ p @ m == m
    assert p @ m @ p == p
    # p@m is the ip_dom-orthogonal projection onto ker(m)^perp
    pm = p @ m
    assert pm @ pm == pm
    gpm = ip_dom.gram @ pm
    assert gpm == gpm.transpose()


def test_pinv_left_inverse_for_injective():
    m = mat([[1, 0], [0, 1], [1, 1]])
    p = pinv_onto(m)
    assert p @ m == SparseMat.identity(2)


def test_orthogonal_complement_dims():
    b = SparseMat.from_columns([[F(1), F(1), F(0)]], 3)
    c = orthogonal_complement(b)
    assert c.cols == 2
    assert (b.transpose() @ c).is_zero()


def test_block_matrix_and_kron():
    a = SparseMat.identity(2)
    b = mat([[1, 2], [3, 4]])
    blk = block_matrix([[a, None], [None, b]], [2, 2], [2, 2])
    assert blk.get(0, 0) == 1 and blk.get(2, 3) == 2 and blk.get(1, 2) == 0
    k = a.kron(b)
    assert k.get(0, 1) == 2 and k.get(2, 2) == 1 and k.get(3, 2) == 3


def test_matmul_empty_shapes():
    a = SparseMat.zero(0, 3)
    b = SparseMat.zero(3, 2)
    c = a @ b
    assert (c.rows, c.cols) == (0, 2)
    assert rank(c) == 0
    assert len(nullspace(SparseMat.zero(0, 4))) == 4


def test_solve_dense_exact():
    a = mat([[2, 1], [1, 1]])
    b = mat([[1], [1]])
    x = solve_dense(a, b)
    assert a @ x == b
    assert x.get(0, 0) == 0 and x.get(1, 0) == 1
