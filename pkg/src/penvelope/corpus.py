"""Named example actions and a seeded random corpus of restricted global actions."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .exactlin import ONE, ZERO, DenseMatrix, GaussianRational, Subspace, unit_vector
from .fingroup import Group, build, cyclic, from_table, homomorphisms, random_homomorphism, symmetric
from .paction import GlobalAction, PartialAction, from_ambient_maps, restrict
from .staralg import (
    BlockRealization,
    diagonal_algebra,
    is_ideal,
    matrix_blocks,
    natural_realization,
    truncated_polynomial,
)

I = GaussianRational(0, 1)


def _diag(values) -> DenseMatrix:
    n = len(values)
    return DenseMatrix([[GaussianRational.coerce(values[i]) if i == j else ZERO for j in range(n)] for i in range(n)])


def _perm_matrix(perm) -> DenseMatrix:
    """Matrix sending e_j to e_perm[j]."""
    return DenseMatrix.from_columns([unit_vector(len(perm), perm[j]) for j in range(len(perm))], len(perm))


def _span(n: int, *indices) -> Subspace:
    return Subspace(n, (unit_vector(n, i) for i in indices))


def e1() -> GlobalAction:
    """Z/2 swapping the two coordinates of C^2."""
    g = cyclic(2)
    alg = diagonal_algebra(2)
    return GlobalAction.from_matrices(g, alg, [DenseMatrix.identity(2), _perm_matrix([1, 0])])


def e2(scale=1) -> PartialAction:
    """Z/2 on C^2 with D[g] = C+0 and alpha_g = scale * id (scale 1 is the genuine action)."""
    g = cyclic(2)
    alg = diagonal_algebra(2)
    dom = _span(2, 0)
    return from_ambient_maps(g, alg, [Subspace.full(2), dom],
                             [DenseMatrix.identity(2), DenseMatrix.identity(2).scale(scale)])


def e3() -> PartialAction:
    """Z/2 on C[x]/(x^2) with D[g] = span{x} and alpha_g(x) = -x."""
    g = cyclic(2)
    alg = truncated_polynomial(2)
    return from_ambient_maps(g, alg, [Subspace.full(2), _span(2, 1)],
                             [DenseMatrix.identity(2), _diag([1, -1])])


def e4() -> PartialAction:
    """Z/2 on M_2 + C with D[g] = M_2 + 0 and alpha_g = Ad diag(1, -1)."""
    g = cyclic(2)
    alg = matrix_blocks([2, 1])
    # E_pq -> (-1)^(p+q) E_pq on the M_2 block
    return from_ambient_maps(g, alg, [Subspace.full(5), _span(5, 0, 1, 2, 3)],
                             [DenseMatrix.identity(5), _diag([1, -1, -1, 1, 1])])


def e4_realization() -> BlockRealization:
    return natural_realization([2, 1])


def e2_handcrafted_envelope() -> tuple[GlobalAction, DenseMatrix]:
    """C^3 with g swapping coordinates 1 and 2, and e0 -> e0, e1 -> e1."""
    g = cyclic(2)
    alg = diagonal_algebra(3)
    beta = GlobalAction.from_matrices(g, alg, [DenseMatrix.identity(3), _perm_matrix([0, 2, 1])])
    emb = DenseMatrix.from_columns([unit_vector(3, 0), unit_vector(3, 1)], 3)
    return beta, emb


NAMED = {"e1": e1, "e2": e2, "e3": e3, "e4": e4}


# ---------------------------------------------------------------------------
# random corpus

# unitaries with exact Gaussian-rational entries
_F = Fraction
UNITARIES = (
    ((ONE, ZERO), (ZERO, ONE)),
    ((GaussianRational(_F(3, 5)), GaussianRational(_F(-4, 5))),
     (GaussianRational(_F(4, 5)), GaussianRational(_F(3, 5)))),
    ((GaussianRational(_F(3, 5)), GaussianRational(0, _F(4, 5))),
     (GaussianRational(0, _F(4, 5)), GaussianRational(_F(3, 5)))),
    ((ZERO, ONE), (ONE, ZERO)),
    ((ONE, ZERO), (ZERO, I)),
)

CORPUS_GROUPS = (
    "cyclic(1)", "cyclic(2)", "cyclic(3)", "cyclic(4)", "cyclic(5)", "cyclic(6)", "cyclic(7)", "cyclic(8)",
    "cyclic(2)xcyclic(2)", "symmetric(3)", "dihedral(4)", "cyclic(2)xcyclic(4)",
    "cyclic(2)xcyclic(2)xcyclic(2)",
)


def _mat2_mul(a, b):
    return tuple(tuple(sum((a[i][k] * b[k][j] for k in range(2)), ZERO) for j in range(2)) for i in range(2))


def _adjoint2(a):
    return tuple(tuple(a[j][i].conjugate() for j in range(2)) for i in range(2))


def monomial_group() -> tuple[Group, list]:
    """2x2 monomial matrices with entries in {1, i, -1, -i} (order 32)."""
    phases = [ONE, I, -ONE, -I]
    mats = []
    for swap in (False, True):
        for p, q in itertools.product(phases, repeat=2):
            if swap:
                mats.append(((ZERO, p), (q, ZERO)))
            else:
                mats.append(((p, ZERO), (ZERO, q)))
    pos = {m: k for k, m in enumerate(mats)}
    table = [[pos[_mat2_mul(a, b)] for b in mats] for a in mats]
    return from_table(table, [f"m{k}" for k in range(len(mats))], "monomial(2)"), mats


@dataclass
class CorpusCase:
    name: str
    group: Group
    sizes: tuple
    beta: GlobalAction
    ideal_blocks: tuple
    alpha: PartialAction
    expected_dim: int

    def realization(self) -> BlockRealization:
        return natural_realization([self.sizes[b] for b in self.ideal_blocks])


_HOM_CACHE: dict = {}


def _homs(key, count, g, sym):
    if (key, count) not in _HOM_CACHE:
        _HOM_CACHE[key, count] = homomorphisms(g, sym)
    return _HOM_CACHE[key, count]


def _block_hom(g: Group, count: int, rng: random.Random) -> list[tuple]:
    if count <= 1:
        return [tuple(range(count))] * g.order
    sym = symmetric(count)
    homs = _homs(g.name, count, g, sym)
    nontrivial = [h for h in homs if any(x != sym.identity for x in h)]
    hom = rng.choice(nontrivial or homs)
    perms = sorted(itertools.permutations(range(count)))
    return [perms[h] for h in hom]


def global_block_action(g: Group, sizes, sigma, pi, unitaries) -> GlobalAction:
    """Global action on the block algebra: ``beta_g(x)_{sigma_g j} = W_{g,j} x_j W_{g,j}^*``.

    ``W_{g,j} = V_{sigma_g j} pi(g) V_j^*`` on 2x2 blocks and 1 on 1x1 blocks.
    """
    alg = matrix_blocks(sizes)
    offs = []
    o = 0
    for n in sizes:
        offs.append(o)
        o += n * n
    mats = []
    for h in range(g.order):
        cols = []
        for j, n in enumerate(sizes):
            tgt = sigma[h][j]
            if n == 1:
                cols.append(unit_vector(alg.dim, offs[tgt]))
                continue
            W = _mat2_mul(_mat2_mul(unitaries[tgt], pi[h]), _adjoint2(unitaries[j]))
            Wa = _adjoint2(W)
            for p in range(2):
                for q in range(2):
                    # W E_pq W^* = sum_{r,s} W[r][p] conj(W[s][q]) E_rs
                    v = [ZERO] * alg.dim
                    for r in range(2):
                        for s in range(2):
                            v[offs[tgt] + 2 * r + s] = W[r][p] * Wa[q][s]
                    cols.append(tuple(v))
        mats.append(DenseMatrix.from_columns(cols, alg.dim))
    return GlobalAction.from_matrices(g, alg, mats)


def random_case(rng: random.Random, name: str = "", tries: int = 50) -> CorpusCase:
    """A random restricted block action; global outcomes are redrawn up to ``tries`` times."""
    for _ in range(tries - 1):
        case = _draw_case(rng, name)
        if not case.alpha.is_global:
            return case
    return _draw_case(rng, name)


def _draw_case(rng: random.Random, name: str) -> CorpusCase:
    gname = rng.choice(CORPUS_GROUPS)
    g = build(gname)
    k = rng.choice((1, 2, 2, 3, 3, 3))
    sizes = tuple(rng.choice((1, 2)) for _ in range(k))
    ones = [j for j, n in enumerate(sizes) if n == 1]
    twos = [j for j, n in enumerate(sizes) if n == 2]
    s1 = _block_hom(g, len(ones), rng)
    s2 = _block_hom(g, len(twos), rng)
    sigma = []
    for h in range(g.order):
        perm = [0] * k
        for a, j in enumerate(ones):
            perm[j] = ones[s1[h][a]]
        for a, j in enumerate(twos):
            perm[j] = twos[s2[h][a]]
        sigma.append(tuple(perm))
    mono, mats = monomial_group()
    pi = [mats[m] for m in random_homomorphism(g, mono, rng)]
    unitaries = [UNITARIES[rng.randrange(len(UNITARIES))] for _ in range(k)]
    beta = global_block_action(g, sizes, sigma, pi, unitaries)
    # proper summands whenever there is more than one block
    chosen = tuple(sorted(rng.sample(range(k), rng.randint(1, max(1, k - 1)))))
    offs = [sum(n * n for n in sizes[:j]) for j in range(k)]
    idx = [offs[j] + m for j in chosen for m in range(sizes[j] ** 2)]
    ideal = is_ideal(_span(beta.algebra.dim, *idx), beta.algebra)
    alpha = restrict(beta, ideal)
    orbit = {sigma[h][j] for h in range(g.order) for j in chosen}
    expected = sum(sizes[j] ** 2 for j in orbit)
    return CorpusCase(name or f"{gname}:{sizes}:{chosen}", g, sizes, beta, chosen, alpha, expected)


def random_corpus(count: int = 20, seed: int = 2024) -> list[CorpusCase]:
    rng = random.Random(seed)
    return [random_case(rng, f"case{k:02d}") for k in range(count)]


def case_document(case: CorpusCase) -> dict:
    """A CLI document describing ``case`` as a global action plus an ideal."""
    g = case.group
    beta = case.beta
    mats = {g.label(t): [[str(x) for x in row] for row in beta.matrix(t).entries]
            for t in range(g.order) if t != g.identity}
    offs = [sum(n * n for n in case.sizes[:j]) for j in range(len(case.sizes))]
    idx = [offs[j] + m for j in case.ideal_blocks for m in range(case.sizes[j] ** 2)]
    dim = beta.algebra.dim
    ideal = [["1" if k == i else "0" for k in range(dim)] for i in idx]
    return {
        "version": 1,
        "name": case.name,
        "description": f"{g.name} on blocks {list(case.sizes)} restricted to blocks {list(case.ideal_blocks)}",
        "group": g.name,
        "algebra": {"preset": "matrix_blocks", "sizes": list(case.sizes), "realization": "natural"},
        "action": {"global": mats, "ideal": ideal},
    }
