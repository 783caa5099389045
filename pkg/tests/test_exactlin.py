from __future__ import annotations

from fractions import Fraction

import pytest
from conftest import small_gq, vectors
from hypothesis import given
from hypothesis import strategies as st

from penvelope.exactlin import (
    ONE,
    ZERO,
    Basis,
    DenseMatrix,
    GaussianRational as GQ,
    Subspace,
    inverse,
    parse_scalar,
    rref,
    solve,
    subspace_calculus,
)


def M(rows):
    return DenseMatrix(rows)


# --- scalars


def test_parse_scalar_forms():
    assert parse_scalar("3/4") == GQ(Fraction(3, 4))
    assert parse_scalar("-i") == GQ(0, -1)
    assert parse_scalar("1/2+3/4i") == GQ(Fraction(1, 2), Fraction(3, 4))
    assert parse_scalar("-2/3i") == GQ(0, Fraction(-2, 3))
    assert parse_scalar(5) == GQ(5)


@pytest.mark.parametrize("bad", ["1/0", "abc", "1//2", "", "2+", True])
def test_parse_scalar_rejects(bad):
    with pytest.raises((ValueError, ZeroDivisionError)):
        parse_scalar(bad)


@given(small_gq())
def test_str_roundtrip(z):
    assert parse_scalar(str(z)) == z


@given(small_gq(), small_gq())
def test_lowest_terms_and_positive_denominators(a, b):
    for z in (a + b, a * b, a - b):
        for part in (z.re, z.im):
            assert isinstance(part, Fraction)
            assert part.denominator > 0
            assert Fraction(part.numerator, part.denominator) == part


@given(small_gq())
def test_conjugation_is_involution(z):
    assert z.conjugate().conjugate() == z


@given(small_gq())
def test_inverse(z):
    if z:
        assert z * z.inverse() == ONE


def test_large_integers_do_not_overflow():
    big = GQ(Fraction(10**40 + 1, 3**30))
    m = M([[big, ONE], [ONE, big]])
    inv = inverse(m)
    assert m @ inv == DenseMatrix.identity(2)


# --- rref / solve examples


def test_rref_identity():
    red, rank, piv = rref(DenseMatrix.identity(2))
    assert red == DenseMatrix.identity(2) and rank == 2 and piv == [0, 1]


def test_rref_zero():
    red, rank, piv = rref(DenseMatrix.zeros(2, 2))
    assert red == DenseMatrix.zeros(2, 2) and rank == 0 and piv == []


def test_rref_rank_one():
    red, rank, _ = rref(M([[1, 1], [1, 1]]))
    assert red == M([[1, 1], [0, 0]]) and rank == 1


def test_solve_identity():
    x, null = solve(DenseMatrix.identity(2), [3, 5])
    assert x == (GQ(3), GQ(5)) and null.dim == 0


def test_solve_inconsistent():
    x, null = solve(DenseMatrix.zeros(2, 2), [1, 0])
    assert x is None and null == Subspace.full(2)


def test_solve_underdetermined():
    m = M([[1, 1], [0, 0]])
    x, null = solve(m, [2, 0])
    assert x is not None and m.apply(x) == (GQ(2), ZERO)
    assert null.dim == 1


def test_subspace_calculus_examples():
    u = Subspace(2, [[1, 2]])
    s, i, member = subspace_calculus(u, u)
    assert s == u and i == u and member([2, 4]) == (True, True)
    s, i, _ = subspace_calculus(Subspace(2, [[1, 0]]), Subspace(2, [[0, 1]]))
    assert s == Subspace.full(2) and i == Subspace.zero(2)
    a = Subspace(3, [[1, 1, 0]])
    b = Subspace(3, [[1, 1, 0], [0, 0, 1]])
    _, i, _ = subspace_calculus(a, b)
    assert i == a


def test_ambient_mismatch():
    with pytest.raises(ValueError):
        subspace_calculus(Subspace.full(2), Subspace.full(3))


def test_basis_coordinates():
    b = Basis([[1, 1, 0], [0, 1, 1]])
    assert b.coordinates([1, 3, 2]) == (GQ(1), GQ(2))
    assert b.coordinates([1, 0, 0]) is None
    with pytest.raises(ValueError):
        Basis([[1, 0], [2, 0]])


# --- properties

matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(lambda c: st.lists(vectors(c, 2), min_size=r, max_size=r))
)


@given(matrices)
def test_rref_idempotent(rows):
    red, rank, piv = rref(M(rows))
    again, rank2, piv2 = rref(red)
    assert again == red and rank == rank2 and piv == piv2


@given(matrices)
def test_rref_preserves_row_space(rows):
    red, rank, _ = rref(M(rows))
    assert Subspace(len(rows[0]), rows) == Subspace(len(rows[0]), red.entries)
    assert Subspace(len(rows[0]), rows).dim == rank


@given(matrices, st.data())
def test_solve_zero_residual(rows, data):
    m = M(rows)
    b = data.draw(vectors(m.rows, 2))
    x, null = solve(m, b)
    if x is not None:
        assert m.apply(x) == b
    for v in null.basis:
        assert all(not c for c in m.apply(v))
    assert null.dim == m.cols - rref(m)[1]


@given(matrices)
def test_consistent_systems_are_solved(rows):
    m = M(rows)
    x0 = tuple(GQ(k + 1, -k) for k in range(m.cols))
    x, _ = solve(m, m.apply(x0))
    assert x is not None


@given(st.integers(1, 5).flatmap(lambda n: st.tuples(
    st.lists(vectors(n, 2), max_size=4), st.lists(vectors(n, 2), max_size=4), st.just(n))))
def test_grassmann_identity(data):
    us, vs, n = data
    u, v = Subspace(n, us), Subspace(n, vs)
    s, i, member = subspace_calculus(u, v)
    assert u.dim + v.dim == s.dim + i.dim
    for w in i.basis:
        assert member(w) == (True, True)
    assert s.contains_space(u) and s.contains_space(v)
    assert u.contains_space(i) and v.contains_space(i)


@given(st.integers(1, 4).flatmap(lambda n: st.lists(vectors(n, 2), min_size=1, max_size=5)), st.randoms())
def test_canonical_form_is_order_independent(vecs, rnd):
    shuffled = list(vecs)
    rnd.shuffle(shuffled)
    scaled = [tuple(GQ(2, 1) * x for x in v) for v in shuffled]
    a = Subspace(len(vecs[0]), vecs)
    b = Subspace(len(vecs[0]), scaled)
    assert a.matrix() == b.matrix()
    assert a == b and hash(a) == hash(b)


@given(st.integers(1, 4).flatmap(lambda n: st.lists(vectors(n, 3), min_size=n, max_size=n)))
def test_inverse_property(rows):
    m = M(rows)
    if rref(m)[1] < m.rows:
        with pytest.raises(ValueError):
            inverse(m)
    else:
        assert m @ inverse(m) == DenseMatrix.identity(m.rows)
