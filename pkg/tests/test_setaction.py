from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from penvelope.corpus import e1, e2
from penvelope.envelope import adjoint_inclusion, adjoint_inclusion_of_pair, canonical_family, check_family, compare_envelopes
from penvelope.exactlin import DenseMatrix
from penvelope.fingroup import build, cyclic, homomorphisms, symmetric
from penvelope.paction import check_partial_action
from penvelope.setaction import (
    SetPAction,
    check_set_paction,
    diagonal_set_action,
    envelope_adjoint_data,
    from_partial_permutations,
    function_algebra_action,
    functions_functor,
    global_set_action,
    set_envelope,
    spectrum_of_e2,
)


def _s3_perm(label):
    return (0, 1, 2) if label == "e" else tuple(int(c) for c in label.strip("[]"))


def test_global_permutation_action_passes():
    g = cyclic(3)
    alpha = global_set_action(g, "abc", [{"a": "a", "b": "b", "c": "c"},
                                         {"a": "b", "b": "c", "c": "a"},
                                         {"a": "c", "b": "a", "c": "b"}])
    assert check_set_paction(alpha).ok
    env = set_envelope(alpha)
    assert env.size == 3
    # beta is alpha transported along iota
    for t in g.elements:
        for x in alpha.points:
            y = alpha.maps[t][x]
            assert env.perms[t][env.iota[alpha.index(x)]] == env.iota[alpha.index(y)]


def test_spectrum_of_e2():
    alpha = spectrum_of_e2(cyclic(2))
    assert check_set_paction(alpha).ok
    env = set_envelope(alpha)
    assert env.size == 3
    assert [[(s, alpha.points[x]) for s, x in c] for c in env.classes] == [[(0, 1), (1, 1)], [(0, 2)], [(1, 2)]]
    assert env.labels() == ["[(e,1)]", "[(e,2)]", "[(g,2)]"]


def test_range_violation():
    g = cyclic(2)
    # alpha_g(1) = 2 lands outside X_g = {1}
    alpha = SetPAction.create(g, (1, 2), [{1, 2}, {1}], [{1: 1, 2: 2}, {1: 2}])
    rep = check_set_paction(alpha)
    assert "range" in rep.failed_names()
    with pytest.raises(ValueError):
        set_envelope(alpha)


def test_malformed_bijections():
    g = cyclic(2)
    with pytest.raises(ValueError):
        check_set_paction(SetPAction.create(g, (1, 2), [{1, 2}, {1, 2}], [{1: 1, 2: 2}, {1: 1, 2: 1}]))
    with pytest.raises(ValueError):
        check_set_paction(SetPAction.create(g, (1, 2), [{1, 2}, {1}], [{1: 1, 2: 2}, {2: 1}]))
    with pytest.raises(ValueError):
        SetPAction.create(g, (1, 1), [{1}, {1}], [{1: 1}, {1: 1}])


def test_composition_failure():
    # Z/3 with all domains full but alpha_2 not equal to alpha_1 o alpha_1
    g = cyclic(3)
    ident = {0: 0, 1: 1, 2: 2}
    cyc = {0: 1, 1: 2, 2: 0}
    alpha = SetPAction.create(g, (0, 1, 2), [{0, 1, 2}] * 3, [ident, cyc, cyc])
    assert "composition" in check_set_paction(alpha).failed_names()


def test_empty_off_diagonal_domains():
    g = symmetric(3)
    maps = [{1: 1, 2: 2}] + [{}] * 5
    alpha = from_partial_permutations(g, (1, 2), maps)
    assert check_set_paction(alpha).ok
    assert set_envelope(alpha).size == g.order * 2


def test_global_envelope_has_same_size():
    g = symmetric(3)
    perms = [dict(enumerate(_s3_perm(lab))) for lab in g.labels]
    alpha = global_set_action(g, (0, 1, 2), perms)
    env = set_envelope(alpha)
    assert env.size == 3


def test_functions_functor_on_e2_spectrum():
    env = set_envelope(spectrum_of_e2(cyclic(2)))
    beta, ideal, emb = functions_functor(env)
    assert beta.algebra.dim == 3
    assert beta.matrix(1) == DenseMatrix([[1, 0, 0], [0, 0, 1], [0, 1, 0]])
    assert ideal.space.dim == 2
    assert emb == DenseMatrix([[1, 0], [0, 1], [0, 0]])


def test_functions_functor_small_cases():
    g1 = build("cyclic(1)")
    env = set_envelope(global_set_action(g1, ("p",), [{"p": "p"}]))
    beta, ideal, _ = functions_functor(env)
    assert beta.algebra.dim == 1 and beta.maps == (DenseMatrix.identity(1),)
    env = set_envelope(global_set_action(cyclic(2), (0, 1), [{0: 0, 1: 1}, {0: 1, 1: 0}]))
    beta, ideal, emb = functions_functor(env)
    assert ideal.space.dim == 2 and beta.maps == e1().maps


def test_function_algebra_of_spectrum_is_e2():
    alpha = function_algebra_action(spectrum_of_e2(cyclic(2)))
    ref = e2()
    assert alpha.domains == ref.domains and alpha.maps == ref.maps
    assert check_partial_action(alpha).ok


def test_diagonal_set_action_round_trip():
    s = diagonal_set_action(e2())
    assert s is not None and check_set_paction(s).ok
    assert function_algebra_action(s).maps == e2().maps
    assert diagonal_set_action(e2(2)) is None


def test_oracle_agrees_with_multiplier_envelope_on_e2():
    alpha, beta, emb = envelope_adjoint_data(set_envelope(spectrum_of_e2(cyclic(2))))
    F = canonical_family(alpha)
    assert check_family(alpha, F).ok
    assert compare_envelopes(adjoint_inclusion(alpha, F), adjoint_inclusion_of_pair(alpha, beta, emb)).equal


def test_oracle_agrees_on_diagonal_corpus_cases(corpus, corpus_decisions):
    seen = 0
    for case, dec in zip(corpus, corpus_decisions):
        sa = diagonal_set_action(case.alpha)
        if sa is None:
            continue
        seen += 1
        env = set_envelope(sa)
        assert env.size == dec.pair.dim
        alpha, beta, emb = envelope_adjoint_data(env)
        F = dec.pair.family
        assert compare_envelopes(adjoint_inclusion(alpha, F), adjoint_inclusion_of_pair(alpha, beta, emb)).equal
    assert seen > 0


# --- restrictions of random global set actions

GROUPS = ["cyclic(2)", "cyclic(3)", "cyclic(4)", "cyclic(2)xcyclic(2)", "symmetric(3)", "cyclic(6)"]


@st.composite
def restricted_actions(draw):
    g = build(draw(st.sampled_from(GROUPS)))
    npts = draw(st.integers(1, 3))
    sym = symmetric(npts) if npts > 1 else None
    if sym is None:
        perms = [(0,)] * g.order
    else:
        homs = homomorphisms(g, sym)
        hom = draw(st.sampled_from(homs))
        perms = [_s3_perm(sym.labels[h]) if npts == 3 else ((0, 1) if sym.labels[h] == "e" else (1, 0))
                 for h in hom]
    # a few copies of each orbit so the saturation is a proper superset
    copies = draw(st.integers(1, 2))
    points = [(c, p) for c in range(copies) for p in range(npts)]
    glob = [{(c, p): (c, perm[p]) for c, p in points} for perm in perms]
    z = draw(st.sets(st.sampled_from(points), min_size=1))
    zs = sorted(z)
    subsets = [{glob[t][x] for x in zs} & z for t in range(g.order)]
    maps = [{x: glob[t][x] for x in zs if glob[t][x] in z} for t in range(g.order)]
    return SetPAction.create(g, zs, subsets, maps), glob


@given(restricted_actions())
def test_restrictions_are_partial_actions(data):
    alpha, _ = data
    assert check_set_paction(alpha).ok


@given(restricted_actions())
def test_envelope_is_orbit_saturation(data):
    alpha, glob = data
    env = set_envelope(alpha)
    saturation = {glob[t][x] for t in range(alpha.group.order) for x in alpha.points}
    assert env.size == len(saturation)
    # the quotient partitions G x X
    members = [p for c in env.classes for p in c]
    assert len(members) == len(set(members)) == alpha.group.order * len(alpha.points)
    g = alpha.group
    image = set(env.iota)
    for t in g.elements:
        moved = {env.perms[t][y] for y in image}
        assert {env.iota[alpha.index(x)] for x in alpha.subsets[t]} == image & moved
