from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from penvelope.fingroup import (
    build,
    check_group,
    cyclic,
    dihedral,
    direct_product,
    extend_homomorphism,
    from_table,
    generators,
    homomorphisms,
    noncommuting_pair,
    random_homomorphism,
    symmetric,
)

NAMES = ["cyclic(1)", "cyclic(2)", "cyclic(5)", "symmetric(3)", "dihedral(4)",
         "cyclic(2)xcyclic(2)", "cyclic(2)xsymmetric(3)", "cyclic(4)xcyclic(2)", "cyclic(2)xcyclic(2)xcyclic(2)"]


def test_z2_passes():
    assert check_group(from_table([[0, 1], [1, 0]])).ok


def test_trivial_group():
    g = from_table([[0]])
    assert check_group(g).ok and g.order == 1 and g.identity == 0


def test_broken_associativity_is_witnessed():
    # Latin square with identity 0 that is not a group table
    table = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    g = from_table(table)
    rep = check_group(g)
    assert rep.failed_names() == ["associativity"]
    a, b, c = rep.failures()[0].witness
    assert table[table[a][b]][c] != table[a][table[b][c]]


def test_swapped_entry_breaks_associativity():
    s3 = symmetric(3)
    a, b = noncommuting_pair(s3)
    table = [list(r) for r in s3.table]
    table[a][b], table[b][a] = table[b][a], table[a][b]
    rep = check_group(from_table(table))
    assert "associativity" in rep.failed_names()
    a, b, c = rep.failures()[0].witness
    assert table[table[a][b]][c] != table[a][table[b][c]]


@pytest.mark.parametrize("table", [[], [[0, 1]], [[0, 2], [1, 0]], [[1, 0], [0, 0]], [[0, 1], [1, 1]]])
def test_malformed_tables(table):
    with pytest.raises(ValueError):
        from_table(table)


def test_build_examples():
    g = build("cyclic(2)")
    assert g.order == 2 and g.identity == 0
    s3 = build("symmetric(3)")
    assert s3.order == 6 and not s3.is_abelian()
    a, b = noncommuting_pair(s3)
    assert s3.mul(a, b) != s3.mul(b, a)
    k = build("cyclic(2)xcyclic(2)")
    assert k.order == 4 and all(k.inv(a) == a for a in k.elements)
    assert build("dihedral(4)").order == 8 and not build("dihedral(4)").is_abelian()
    assert noncommuting_pair(cyclic(6)) is None


@pytest.mark.parametrize("name", ["quaternion(8)", "cyclic(x)", "cyclic(0)", "dihedral(1)", "cyclic(65)",
                                  "symmetric(5)", "cyclic(8)xcyclic(9)"])
def test_build_rejects(name):
    with pytest.raises(ValueError):
        build(name)


def test_order_bound_is_configurable():
    assert build("cyclic(65)", order_bound=100).order == 65
    with pytest.raises(ValueError):
        build("cyclic(3)", order_bound=2)


@pytest.mark.parametrize("name", NAMES)
def test_built_groups_satisfy_axioms(name):
    g = build(name)
    assert check_group(g).ok
    e = g.identity
    for a in g.elements:
        assert g.inv(g.inv(a)) == a
        assert g.mul(e, a) == a == g.mul(a, e)


def test_labels_round_trip():
    g = symmetric(3)
    for a in g.elements:
        assert g.index(g.label(a)) == a
    with pytest.raises(KeyError):
        g.index("nope")


def test_homomorphism_counts():
    # Hom(Z/n, Z/m) has gcd(n, m) elements; Hom(S3, Z/2) has 2
    assert len(homomorphisms(cyclic(4), cyclic(6))) == 2
    assert len(homomorphisms(cyclic(6), cyclic(3))) == 3
    assert len(homomorphisms(symmetric(3), cyclic(2))) == 2
    assert len(homomorphisms(cyclic(2), symmetric(3))) == 4


def test_extend_rejects_non_homomorphism():
    g = cyclic(2)
    assert extend_homomorphism(g, cyclic(3), {1: 1}) is None


@given(st.sampled_from(NAMES), st.sampled_from(NAMES), st.integers(0, 10**6))
def test_random_homomorphisms_are_homomorphisms(a, b, seed):
    g, h = build(a), build(b)
    hom = random_homomorphism(g, h, random.Random(seed))
    for x in g.elements:
        for y in g.elements:
            assert hom[g.mul(x, y)] == h.mul(hom[x], hom[y])


@given(st.sampled_from(NAMES))
def test_generators_generate(name):
    g = build(name)
    gens = generators(g)
    hom = extend_homomorphism(g, g, {s: s for s in gens})
    assert hom == list(g.elements)


def test_direct_product_of_dihedral():
    g = direct_product(dihedral(3), cyclic(2))
    assert g.order == 12 and check_group(g).ok
