import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import space_shape, subspaces, vectors
from koszulkit import linalg
from koszulkit.words import Alphabet, parse_expression, tensor_expand

X2 = Alphabet(("x1", "x2"))
F1 = parse_expression("x2*x1*x1 - 2*x1*x2*x1 + x1*x1*x2", X2)
F2 = parse_expression("x2*x2*x1 - 2*x2*x1*x2 + x1*x2*x2", X2)
R = linalg.span([F1, F2])


def test_span_examples():
    assert R.dim == 2
    assert set(R.pivots) == {X2.word("x2*x1*x1"), X2.word("x2*x2*x1")}
    assert linalg.span([], 3).dim == 0
    assert linalg.span([F1, F1 * 2]).dim == 1


def test_yang_mills_degree_four_intersection():
    left = linalg.tensor_shift(R, 0, 1, 2)
    right = linalg.tensor_shift(R, 1, 0, 2)
    v = tensor_expand(parse_expression("x2", X2), F1) + tensor_expand(parse_expression("x1", X2), F2)
    J = linalg.intersect(left, right)
    assert J == linalg.span([v])
    assert linalg.solve_in_basis(J, v) == [1]


def test_yang_mills_degree_five_intersection_is_zero():
    left = linalg.tensor_shift(R, 0, 2, 2)
    right = linalg.tensor_shift(R, 2, 0, 2)
    assert linalg.intersect(left, right).dim == 0


def test_membership_and_inclusion():
    assert linalg.contains(R, F1 + F2 * 3)
    assert not linalg.contains(R, parse_expression("x1*x1*x1", X2))
    zero = linalg.zero_space(3)
    assert linalg.includes(R, zero)
    assert linalg.includes(zero, R) == (R.dim == 0)
    with pytest.raises(ValueError):
        linalg.solve_in_basis(R, parse_expression("x1*x1*x1", X2))


def test_degree_mismatch_is_an_error():
    with pytest.raises(ValueError):
        linalg.sum_spaces(R, linalg.zero_space(2))


def _dense(U, n, m):
    return oracles.matrix([dict(b.items()) for b in U.basis], n, m)


@given(space_shape().flatmap(lambda s: st.tuples(st.just(s), vectors(*s, max_count=5))))
def test_echelon_matches_dense_rref(data):
    (n, m), vecs = data
    U = linalg.span(vecs, m)
    assert U.dim == oracles.rank(vecs, n, m)
    # reduced echelon in descending order: monic pivots absent from the other rows
    for p, row in U.rows.items():
        assert row[p] == 1
        assert max(row) == p
        for q in U.pivots:
            if q != p:
                assert q not in row
    # independent route: the same canonical basis from sympy's rref on reversed columns
    T = oracles.theta_inv(vecs, n, m)
    ws = oracles.words(n, m)
    for p, row in U.rows.items():
        j = ws.index(p)
        expected = sp.eye(len(ws))[:, j] - T[:, j]
        assert oracles.column(row, ws) == expected


@given(space_shape().flatmap(lambda s: st.tuples(st.just(s), subspaces(*s), subspaces(*s), subspaces(*s))))
def test_lattice_laws_and_dimension_formula(data):
    (n, m), U, W, Z = data
    S = linalg.sum_spaces(U, W)
    I = linalg.intersect(U, W)
    assert S.dim == U.dim + W.dim - I.dim
    assert S.dim == oracles.rank([dict(b.items()) for b in U.basis + W.basis], n, m)
    assert I.dim == oracles.intersection(_dense(U, n, m), _dense(W, n, m)).cols
    assert linalg.intersect(U, U) == U
    assert linalg.sum_spaces(U, linalg.zero_space(m)) == U
    assert linalg.intersect(U, W) == linalg.intersect(W, U)
    assert linalg.sum_spaces(linalg.sum_spaces(U, W), Z) == linalg.sum_spaces(U, linalg.sum_spaces(W, Z))
    assert linalg.intersect(linalg.intersect(U, W), Z) == linalg.intersect(U, linalg.intersect(W, Z))
    assert linalg.intersect(U, linalg.sum_spaces(U, W)) == U
    assert linalg.includes(U, I) and linalg.includes(S, W)


@given(space_shape().flatmap(lambda s: st.tuples(st.just(s), subspaces(*s), vectors(*s, max_count=3))))
def test_solve_in_basis_reconstructs(data):
    (n, m), U, coeffs = data
    for vec in coeffs:
        v = U.reduce(vec)
        target = {w: c for w, c in vec.items()}
        for w, c in v.items():
            target[w] = target.get(w, 0) - c
        target = {w: c for w, c in target.items() if c}
        coords = linalg.solve_in_basis(U, target)
        rebuilt = {}
        for c, b in zip(coords, U.basis):
            for w, a in b.items():
                rebuilt[w] = rebuilt.get(w, 0) + c * a
        assert {w: c for w, c in rebuilt.items() if c} == target


@given(st.integers(1, 2).flatmap(lambda n: st.tuples(st.just(n), subspaces(n, 2), st.integers(0, 1), st.integers(0, 1))))
def test_tensor_shift_matches_kronecker(data):
    n, U, left, right = data
    S = linalg.tensor_shift(U, left, right, n)
    assert S.degree == 2 + left + right
    dense = oracles.shift(_dense(U, n, 2), n, left, right)
    assert S.dim == (dense.rank() if dense.cols else 0)
    assert S.dim == U.dim * n ** (left + right)
