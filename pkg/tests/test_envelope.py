from __future__ import annotations

import random

import pytest
from conftest import vectors
from hypothesis import given
from hypothesis import strategies as st

from penvelope.corpus import (
    e1, e2, e2_handcrafted_envelope, e3, e4, e4_realization,
)
from penvelope.envelope import (
    UNITAL_JUSTIFICATION,
    WEAK_JUSTIFICATION,
    EnvFamily,
    FamilyFailure,
    GlobalizationError,
    GMultiplier,
    adjoint_inclusion,
    adjoint_inclusion_of_pair,
    canonical_family,
    check_family,
    compare_envelopes,
    decide_envelope,
    domain_units,
    envelope_restriction,
    globalize,
    mu_multiplier,
    norm_inequality_check,
    ns_witness,
    recovered_family,
    translation_matrix,
    unital_identities_check,
)
from penvelope.exactlin import ONE, ZERO, DenseMatrix, GaussianRational as GQ, Subspace, inverse, vadd, vsub
from penvelope.fingroup import cyclic
from penvelope.paction import GlobalAction, from_ambient_maps, verify_morphism
from penvelope.staralg import StarAlgebra, annihilator, diagonal_algebra, is_ideal, matrix_blocks, natural_realization


def validated_family(alpha):
    F = canonical_family(alpha)
    assert isinstance(F, EnvFamily)
    assert check_family(alpha, F).ok
    return F


def T(*xs):
    return tuple(GQ(x) for x in xs)


# --- NS witnesses and canonical families


def test_ns_witness_at_identity_is_product():
    alpha = e4()
    alg = alpha.algebra
    a, b = alg.basis_vec(1), alg.basis_vec(2)
    w = ns_witness(alpha, 0, a, b)
    assert w.value == alg.mul_vec(a, b) and w.unique


@given(vectors(5, 2), vectors(5, 2))
def test_ns_witness_matches_unit_formula_on_e4(a, b):
    alpha = e4()
    alg = alpha.algebra
    one_g = domain_units(alpha)[1]
    w = ns_witness(alpha, 1, a, b)
    assert w.unique
    assert w.value == alg.mul_vec(alpha.apply(1, alg.mul_vec(one_g, a)), b)


def test_ns_witness_absent_on_e3():
    alpha = e3()
    w = ns_witness(alpha, 1, T(1, 0), T(1, 0))
    assert not w.exists
    # d = x: d * (c x) = 0 but alpha_g(alpha_g(x) 1) 1 = x
    alg = alpha.algebra
    x = T(0, 1)
    assert alg.mul_vec(alpha.apply(1, alg.mul_vec(alpha.apply(1, x), T(1, 0))), T(1, 0)) == x


def test_ns_witness_not_unique_when_annihilator_meets_domain():
    alpha = e3()
    w = ns_witness(alpha, 1, T(0, 1), T(0, 1))
    assert w.exists and not w.unique and w.nullity == 1


def test_canonical_family_of_global_action():
    beta = e1()
    F = canonical_family(beta)
    alg = beta.algebra
    for t in range(2):
        for i in range(2):
            for j in range(2):
                assert F.basis_value(t, i, j) == alg.mul_vec(beta.apply(t, alg.basis_vec(i)), alg.basis_vec(j))


@given(vectors(2, 3), vectors(2, 3))
def test_e2_family_formula(a, b):
    F = canonical_family(e2())
    assert F.value(1, a, b) == (a[0] * b[0], ZERO)
    assert F.value(0, a, b) == (a[0] * b[0], a[1] * b[1])


def test_e3_family_failure():
    fail = canonical_family(e3())
    assert isinstance(fail, FamilyFailure) and not fail
    assert fail.t == 1 and fail.reason == "no NS witness" and fail.missing_units == [1]
    assert fail.describe(e3()) == ["D[g] has no unit", "no NS witness at (g,1,1)"]


# --- family axioms


def test_e2_family_passes_both_modes():
    alpha = e2()
    F = canonical_family(alpha)
    assert check_family(alpha, F, "algebraic").ok
    assert check_family(alpha, F, "star").ok
    assert F.validated


def test_doubled_fg_fails_III():
    alpha = e2()
    bad = canonical_family(alpha).scaled(1, 2)
    rep = check_family(alpha, bad)
    assert "III" in rep.failed_names() and not bad.validated
    w = rep.clauses["III"].witness
    g, e = alpha.group, alpha.algebra.basis_vec
    t, s = g.index(w["t"]), g.index(w["s"])
    # F_t(alpha_s^-1(F_s(a,b)), c) versus F_t(a, F_ts^-1(b,c)) at the witness
    back = alpha.apply(g.inv(s), bad.basis_value(s, w["a"], w["b"]))
    lhs = bad.value(t, back, e(w["c"]))
    rhs = bad.value(t, e(w["a"]), bad.basis_value(g.mul(t, g.inv(s)), w["b"], w["c"]))
    assert lhs != rhs
    # the plain composition law picks up 4 against 2 at t = s = g on e0
    assert bad.value(1, bad.basis_value(1, 0, 0), e(0)) == T(4, 0)
    assert bad.value(0, e(0), bad.basis_value(1, 0, 0)) == T(2, 0)
    assert check_family(alpha, bad, "star").failed_names()


def test_identity_mutation_fails_I():
    alpha = e2()
    bad = canonical_family(alpha).scaled(0, 3)
    assert "I" in check_family(alpha, bad).failed_names()
    assert "I'" in check_family(alpha, bad, "star").failed_names()


def test_check_family_rejects_unknown_mode():
    with pytest.raises(ValueError):
        check_family(e2(), canonical_family(e2()), "topological")


def test_axiom_iv_kernel():
    # the zero family on C with the trivial group kills every a
    g = cyclic(1)
    alg = diagonal_algebra(1)
    beta = GlobalAction.from_matrices(g, alg, [DenseMatrix.identity(1)])
    zero = EnvFamily(beta, [[[T(0)]]])
    assert "IV" in check_family(beta, zero).failed_names()


def test_corpus_families_pass_both_modes(corpus):
    for case in corpus:
        F = canonical_family(case.alpha)
        assert isinstance(F, EnvFamily), case.name
        assert check_family(case.alpha, F, "algebraic").ok, case.name
        assert check_family(case.alpha, F, "star").ok, case.name


@given(st.integers(0, 19), st.data())
def test_family_identities_on_random_elements(corpus, k, data):
    case = corpus[k]
    alpha = case.alpha
    alg = alpha.algebra
    g = alpha.group
    F = canonical_family(alpha)
    units = domain_units(alpha)
    d = alg.dim
    a, b, c = (data.draw(vectors(d, 2)) for _ in range(3))
    t = data.draw(st.integers(0, g.order - 1))
    s = data.draw(st.integers(0, g.order - 1))
    ti = g.inv(t)
    ftab = F.value(t, a, b)
    assert ftab == alg.mul_vec(alpha.apply(t, alg.mul_vec(units[ti], a)), b)
    assert alpha.domains[t].contains(ftab)
    assert F.value(t, a, alg.mul_vec(b, c)) == alg.mul_vec(ftab, c)
    assert F.value(t, F.value(s, a, b), c) == F.value(g.mul(t, s), a, F.value(t, b, c))
    # star identity F_t(a,b)* = alpha_t(F_t^-1(b*, a*))
    assert alg.star_vec(ftab) == alpha.apply(t, F.value(ti, alg.star_vec(b), alg.star_vec(a)))


# --- multipliers: dense oracle on F(G, A)


def _pointwise(alg, f, h):
    return [alg.mul_vec(x, y) for x, y in zip(f, h)]


def _flat(f):
    return tuple(x for v in f for x in v)


def _split(v, n, d):
    return [tuple(v[r * d:(r + 1) * d]) for r in range(n)]


def test_mu_on_trivial_group_is_multiplication():
    g = cyclic(1)
    alg = matrix_blocks([2])
    beta = GlobalAction.from_matrices(g, alg, [DenseMatrix.identity(4)])
    F = validated_family(beta)
    a = T(1, 2, 0, -1)
    m = mu_multiplier(beta, F, a)
    L, R = m.slots[0]
    assert DenseMatrix(L) == alg.left_matrix(a)
    assert DenseMatrix(R) == alg.right_matrix(a)


def test_mu_examples_on_e2():
    alpha = e2()
    F = validated_family(alpha)
    m = mu_multiplier(alpha, F, T(1, 0))
    diag10 = ((ONE, ZERO), (ZERO, ZERO))
    assert m.slots == ((diag10, diag10), (diag10, diag10))
    m2 = mu_multiplier(alpha, F, T(0, 1))
    assert m2.slots[1] == (((ZERO, ZERO), (ZERO, ZERO)),) * 2
    assert mu_multiplier(alpha, F, T(0, 0)).is_zero()


def test_mu_requires_validated_family():
    alpha = e2()
    F = canonical_family(alpha)
    with pytest.raises(ValueError):
        mu_multiplier(alpha, F, T(1, 0))
    assert not mu_multiplier(alpha, F, T(1, 0), formal=True).is_zero()
    with pytest.raises(ValueError):
        globalize(alpha, F)


@pytest.mark.parametrize("build", [e2, e4])
def test_dense_oracle_for_mu(build):
    alpha = build()
    F = validated_family(alpha)
    g, alg = alpha.group, alpha.algebra
    n, d = g.order, alg.dim
    rng = random.Random(7)
    rand = lambda: tuple(GQ(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(d))  # noqa: E731
    for _ in range(5):
        a = rand()
        m = mu_multiplier(alpha, F, a)
        Ld, Rd = m.to_dense()
        f = [rand() for _ in range(n)]
        h = [rand() for _ in range(n)]
        # formula for the left action, computed slot by slot
        expect = [F.value(g.inv(r), a, f[r]) for r in range(n)]
        assert _split(Ld.apply(_flat(f)), n, d) == expect
        expect = [alpha.apply(g.inv(r), F.value(r, f[r], a)) if alpha.domains[r].dim else alg.zero_vec()
                  for r in range(n)]
        assert _split(Rd.apply(_flat(f)), n, d) == expect
        # multiplier identities on non-basis functions
        Lf = _split(Ld.apply(_flat(f)), n, d)
        Rf = _split(Rd.apply(_flat(f)), n, d)
        Lh = _split(Ld.apply(_flat(h)), n, d)
        Rh = _split(Rd.apply(_flat(h)), n, d)
        fh = _flat(_pointwise(alg, f, h))
        assert _split(Ld.apply(fh), n, d) == _pointwise(alg, Lf, h)
        assert _split(Rd.apply(fh), n, d) == _pointwise(alg, f, Rh)
        assert _pointwise(alg, f, Lh) == _pointwise(alg, Rf, h)
        # Ad_s is conjugation by the translation lambda_s
        for s in range(n):
            lam = translation_matrix(g, s, d)
            lam_inv = translation_matrix(g, g.inv(s), d)
            La, Ra = m.ad(s, g).to_dense()
            assert La == lam @ Ld @ lam_inv
            assert Ra == lam @ Rd @ lam_inv


def test_gmultiplier_algebra():
    alpha = e4()
    F = validated_family(alpha)
    g, alg = alpha.group, alpha.algebra
    mus = [mu_multiplier(alpha, F, alg.basis_vec(i)) for i in range(alg.dim)]
    for i in range(alg.dim):
        # mu is multiplicative and *-preserving, Ad is a group action
        for j in range(alg.dim):
            prod = mu_multiplier(alpha, F, alg.mul_vec(alg.basis_vec(i), alg.basis_vec(j)))
            assert mus[i] @ mus[j] == prod
        assert mus[i].star(alg) == mu_multiplier(alpha, F, alg.star_vec(alg.basis_vec(i)))
        for s in range(g.order):
            for t in range(g.order):
                assert mus[i].ad(t, g).ad(s, g) == mus[i].ad(g.mul(s, t), g)
        flat = mus[i].flatten()
        assert GMultiplier.from_flat(flat, g.order, alg.dim) == mus[i]
    assert (mus[0] + mus[1].scale(2)).flatten() == vadd(mus[0].flatten(), tuple(2 * x for x in mus[1].flatten()))


# --- globalization


def test_e1_envelope_is_itself():
    pair = globalize(e1(), validated_family(e1()))
    assert pair.dim == 2
    ai = adjoint_inclusion_of_pair(e1(), e1(), DenseMatrix.identity(2))
    assert compare_envelopes(adjoint_inclusion(e1(), pair.family), ai)


def test_e2_envelope():
    pair = globalize(e2(), validated_family(e2()))
    assert pair.dim == 3
    bg = pair.action.matrix(1)
    assert bg @ bg == DenseMatrix.identity(3)
    # one fixed direction and one swapped pair: trace 1
    assert sum((bg.entries[i][i] for i in range(3)), ZERO) == ONE
    fixed = Subspace(3, [vsub(c, u) for c, u in zip(bg.columns(), DenseMatrix.identity(3).columns())])
    assert fixed.dim == 1
    # B is commutative with units: a copy of C^3
    B = pair.algebra
    for i in range(3):
        for j in range(3):
            assert B.mul_vec(B.basis_vec(i), B.basis_vec(j)) == B.mul_vec(B.basis_vec(j), B.basis_vec(i))
    assert B.is_unital()
    assert pair.report.ok


def test_e4_envelope_dimension():
    alpha = e4()
    pair = globalize(alpha, validated_family(alpha))
    muA = Subspace(pair.dim, pair.embedding.columns())
    moved = pair.action.image(1, muA)
    mu_dg = Subspace(pair.dim, (pair.embedding.apply(v) for v in alpha.domains[1].basis))
    assert (muA.dim, moved.dim, mu_dg.dim) == (5, 5, 4)
    assert pair.dim == 6 == muA.dim + moved.dim - mu_dg.dim
    bg = pair.action.matrix(1)
    assert bg @ bg == DenseMatrix.identity(6)


def test_forced_bad_family_is_caught_by_globalize():
    alpha = e2()
    bad = canonical_family(alpha).scaled(1, 2)
    bad.validated = True  # bypass the axiom checks on purpose
    with pytest.raises((GlobalizationError, AssertionError)):
        globalize(alpha, bad)


def test_envelope_invariants_on_corpus(corpus, corpus_decisions):
    for case, dec in zip(corpus, corpus_decisions):
        assert dec.yes, case.name
        pair = dec.pair
        g = case.alpha.group
        assert pair.dim == case.expected_dim, case.name
        # Ad restricted to B is a global action
        for s in range(g.order):
            for t in range(g.order):
                assert pair.action.matrix(s) @ pair.action.matrix(t) == pair.action.matrix(g.mul(s, t))
        assert recovered_family(pair) == pair.family
        assert annihilator(is_ideal(Subspace.full(pair.dim), pair.algebra), pair.algebra).dim == 0
        rho, phi = envelope_restriction(pair)
        assert verify_morphism(phi, case.alpha, rho).ok
        assert verify_morphism(inverse(phi), rho, case.alpha).ok


# --- adjoint inclusions and classification


def test_global_adjoint_inclusion_is_translated_multiplication():
    beta = e1()
    incl = adjoint_inclusion(beta, validated_family(beta))
    alg = beta.algebra
    g = beta.group
    for i, m in enumerate(incl.multipliers):
        for r in range(g.order):
            b = beta.apply(g.inv(r), alg.basis_vec(i))
            assert DenseMatrix(m.slots[r][0]) == alg.left_matrix(b)
            assert DenseMatrix(m.slots[r][1]) == alg.right_matrix(b)


def test_e2_adjoint_inclusion():
    alpha = e2()
    F = validated_family(alpha)
    incl = adjoint_inclusion(alpha, F)
    assert incl.report.ok
    assert set(incl.report.failed_names()) == set()
    assert [c for c in incl.report.clauses] == ["equals-mu", "injective", "adjoint-intersections",
                                               "determination"]
    assert incl.multipliers == [mu_multiplier(alpha, F, alpha.algebra.basis_vec(i)) for i in range(2)]


def test_classification_on_e2():
    alpha = e2()
    F = validated_family(alpha)
    built = adjoint_inclusion(alpha, F)
    beta, emb = e2_handcrafted_envelope()
    hand = adjoint_inclusion_of_pair(alpha, beta, emb)
    assert compare_envelopes(built, hand).equal
    assert compare_envelopes(built, built).equal
    mutant = adjoint_inclusion(alpha, canonical_family(alpha).scaled(1, 2), validate=False)
    cmp = compare_envelopes(built, mutant)
    assert not cmp.equal
    w = cmp.witness
    assert w == {"a": 0, "r": "g", "slot": "left", "entry": [0, 0], "values": ["1", "2"]}
    m1, m2 = built.multipliers[w["a"]], mutant.multipliers[w["a"]]
    assert m1.slots[1][0][0][0] != m2.slots[1][0][0][0]


def test_compare_refuses_different_actions():
    a = adjoint_inclusion(e2(), validated_family(e2()))
    b = adjoint_inclusion(e1(), validated_family(e1()))
    with pytest.raises(ValueError):
        compare_envelopes(a, b)


def test_corpus_adjoint_inclusions(corpus):
    for case in corpus[:8]:
        F = validated_family(case.alpha)
        incl = adjoint_inclusion(case.alpha, F)
        assert incl.report.ok, (case.name, incl.report.failed_names())
        assert compare_envelopes(incl, incl).equal


def _literal_left_determination_failures(alpha, incl):
    # d [mu'(a) f](r) = alpha_{r^-1}(alpha_r(d) f(r)) a, the ordering as literally displayed
    g, alg = alpha.group, alpha.algebra
    e = alg.basis_vec
    bad = total = 0
    for i, m in enumerate(incl.multipliers):
        for r in range(g.order):
            ri = g.inv(r)
            L = DenseMatrix(m.slots[r][0])
            for j in range(alg.dim):
                val = L.apply(e(j))
                for dv in alpha.domains[ri].basis:
                    lhs = alg.mul_vec(dv, val)
                    inner = alg.mul_vec(alpha.apply(r, dv), e(j))
                    if not alpha.domains[r].contains(inner):
                        bad += 1
                        total += 1
                        continue
                    rhs = alg.mul_vec(alpha.apply(ri, inner), e(i))
                    bad += lhs != rhs
                    total += 1
    return bad, total


def test_literal_determination_ordering_fails_on_e4():
    alpha = e4()
    incl = adjoint_inclusion(alpha, validated_family(alpha))
    assert incl.report.clauses["determination"].ok
    bad, total = _literal_left_determination_failures(alpha, incl)
    assert total == 225 and bad == 48


# --- decision


def test_decide_examples():
    d2 = decide_envelope(e2())
    assert d2.yes and d2.pair.dim == 3
    d1 = decide_envelope(e1())
    assert d1.yes and d1.pair.dim == 2
    d4 = decide_envelope(e4())
    assert d4.yes and d4.pair.dim == 6
    d3 = decide_envelope(e3())
    assert not d3.yes
    assert d3.messages == ["D[g] has no unit", "no NS witness at (g,1,1)"]
    assert d3.justification == UNITAL_JUSTIFICATION
    assert d3.witness == {"t": "g", "reason": "no NS witness", "missing_units": ["g"], "a": "1", "b": "1"}


def test_decide_refuses_invalid_action():
    with pytest.raises(ValueError):
        decide_envelope(e2(2))


def test_non_unital_algebra_gets_weak_justification():
    # Z/2 acting trivially on the non-unital algebra span{x} with x^2 = 0
    g = cyclic(2)
    alg = StarAlgebra([[[0]]], DenseMatrix.identity(1))
    beta = GlobalAction.from_matrices(g, alg, [DenseMatrix.identity(1)] * 2)
    dec = decide_envelope(beta)
    assert not dec.yes and dec.justification == WEAK_JUSTIFICATION
    assert dec.reason == "non-unique NS witness"


def _e2_with_spectator():
    # E2 plus a third coordinate untouched by g
    g = cyclic(2)
    alg = diagonal_algebra(3)
    dom = Subspace(3, [[1, 0, 0], [0, 1, 0]])
    return from_ambient_maps(g, alg, [Subspace.full(3), dom], [DenseMatrix.identity(3)] * 2)


def test_decision_coherence(corpus, corpus_decisions):
    actions = [c.alpha for c in corpus] + [e1(), e2(), e3(), e4(), _e2_with_spectator()]
    decisions = list(corpus_decisions) + [decide_envelope(a) for a in actions[len(corpus):]]
    for alpha, dec in zip(actions, decisions):
        if not alpha.algebra.is_unital():
            continue
        g = alpha.group
        units_ok = all(u is not None for u in domain_units(alpha))
        e = alpha.algebra.basis_vec
        ns_ok = all(
            ns_witness(alpha, t, e(i), e(j)).unique
            for t in range(g.order) for i in range(alpha.algebra.dim) for j in range(alpha.algebra.dim)
        )
        assert units_ok == ns_ok == dec.yes


# --- unital identities and norms


def test_unital_identities_examples():
    alpha = e2()
    units = domain_units(alpha)
    assert units[1] == T(1, 0) and units[0] == T(1, 1)
    assert unital_identities_check(alpha).ok
    assert unital_identities_check(e1()).ok
    alpha4 = e4()
    assert unital_identities_check(alpha4).ok
    u = domain_units(alpha4)
    alg = alpha4.algebra
    assert alpha4.apply(1, alg.mul_vec(u[1], u[1])) == alg.mul_vec(u[1], u[0])
    with pytest.raises(ValueError):
        unital_identities_check(e3())


def test_unital_identities_on_corpus(corpus):
    for case in corpus:
        assert unital_identities_check(case.alpha).ok, case.name


def test_norm_check_e4():
    res = norm_inequality_check(e4(), e4_realization(), samples=1000, seed=42)
    assert res.violations == 0 and res.samples == 1000 and res.seed == 42
    again = norm_inequality_check(e4(), e4_realization(), samples=1000, seed=42)
    assert again.to_dict() == res.to_dict()


def test_norm_check_trivial_group_has_zero_left_side():
    g = cyclic(1)
    alg = matrix_blocks([2])
    beta = GlobalAction.from_matrices(g, alg, [DenseMatrix.identity(4)])
    res = norm_inequality_check(beta, natural_realization([2]), samples=50, seed=1)
    assert res.violations == 0 and res.max_excess == 0.0


def test_norm_check_needs_units():
    with pytest.raises(ValueError):
        norm_inequality_check(e3(), natural_realization([1, 1]), samples=1)


def test_norm_check_rejects_bad_realization():
    r = e4_realization()
    r.images[1], r.images[2] = r.images[2], r.images[1]
    with pytest.raises(ValueError):
        norm_inequality_check(e4(), r, samples=1)
