"""Partial actions on finite sets, their quotient envelope, and function algebras.

Used as an independent oracle for the commutative (diagonal) examples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

from .exactlin import ONE, DenseMatrix, Subspace, unit_vector
from .fingroup import Group
from .paction import GlobalAction, PartialAction, restrict, verify_morphism
from .report import Report
from .staralg import diagonal_algebra, is_ideal


@dataclass(frozen=True)
class SetPAction:
    """``subsets[t]`` is X_t; ``maps[t]`` is a dict X_{t^-1} -> X_t."""

    group: Group
    points: tuple
    subsets: tuple
    maps: tuple

    @classmethod
    def create(cls, group: Group, points: Sequence[Hashable], subsets, maps) -> SetPAction:
        pts = tuple(points)
        if len(set(pts)) != len(pts):
            raise ValueError("points must be distinct")
        if len(subsets) != group.order or len(maps) != group.order:
            raise ValueError("need one subset and one map per group element")
        return cls(group, pts, tuple(frozenset(s) for s in subsets), tuple(dict(m) for m in maps))

    def index(self, x) -> int:
        return self.points.index(x)


def global_set_action(group: Group, points: Sequence[Hashable], perms) -> SetPAction:
    """``perms[t]`` maps each point to its image under t."""
    full = frozenset(points)
    return SetPAction.create(group, points, [full] * group.order, perms)


def check_set_paction(alpha: SetPAction) -> Report:
    g = alpha.group
    X = set(alpha.points)
    lab = g.label
    rep = Report("set partial action")
    for t in range(g.order):
        if not alpha.subsets[t] <= X:
            raise ValueError(f"X_{lab(t)} is not a subset of X")
        m = alpha.maps[t]
        if set(m) != alpha.subsets[g.inv(t)]:
            raise ValueError(f"map of {lab(t)} must be defined exactly on X_{lab(g.inv(t))}")
        if len(set(m.values())) != len(m):
            raise ValueError(f"map of {lab(t)} is not injective")
    e = g.identity
    rep.check("identity", alpha.subsets[e] == X and all(alpha.maps[e][x] == x for x in X), {"t": lab(e)})
    rep.clause("range")
    for t in range(g.order):
        for x, y in sorted(alpha.maps[t].items(), key=lambda kv: alpha.index(kv[0])):
            if y not in alpha.subsets[t]:
                rep.fail("range", {"t": lab(t), "x": x})
    rep.clause("domain-compatibility")
    rep.clause("composition")
    for t in range(g.order):
        ti = g.inv(t)
        for s in range(g.order):
            src = alpha.subsets[ti] & alpha.subsets[s]
            img = {alpha.maps[t][x] for x in src}
            if img != alpha.subsets[t] & alpha.subsets[g.mul(t, s)]:
                rep.fail("domain-compatibility", {"t": lab(t), "s": lab(s)})
    for s in range(g.order):
        for t in range(g.order):
            st = g.mul(s, t)
            common = alpha.subsets[g.inv(st)] & alpha.subsets[g.inv(t)]
            for x in sorted(common, key=alpha.index):
                y = alpha.maps[t][x]
                if y not in alpha.maps[s] or alpha.maps[s][y] != alpha.maps[st][x]:
                    rep.fail("composition", {"s": lab(s), "t": lab(t), "x": x})
    return rep


@dataclass
class SetEnvelope:
    """Classes of G x X, each labeled by its least pair (group index, point index)."""

    alpha: SetPAction
    classes: list
    perms: list
    iota: list

    @property
    def size(self) -> int:
        return len(self.classes)

    def labels(self) -> list[str]:
        g, pts = self.alpha.group, self.alpha.points
        return [f"[({g.label(s)},{pts[x]})]" for s, x in (cls[0] for cls in self.classes)]


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _related(alpha: SetPAction, s: int, x: int, t: int, y: int) -> bool:
    g, pts = alpha.group, alpha.points
    u = g.mul(g.inv(s), t)
    px = pts[x]
    return px in alpha.subsets[u] and alpha.maps[g.inv(u)][px] == pts[y]


def set_envelope(alpha: SetPAction) -> SetEnvelope:
    """Quotient of G x X by ``(s,x) ~ (t,y)`` iff ``x in X_{s^-1 t}`` and ``alpha_{t^-1 s}(x) = y``.

    Reflexivity, symmetry and transitivity are checked on the generated
    relation; failure raises ValueError (it means the input is not a
    partial action). The invariants of the result are asserted.
    """
    rep = check_set_paction(alpha)
    if not rep.ok:
        raise ValueError(f"not a partial action: {rep.failed_names()}")
    g = alpha.group
    n, m = g.order, len(alpha.points)
    pairs = [(s, x) for s in range(n) for x in range(m)]
    rel = {(p, q) for p in pairs for q in pairs if _related(alpha, *p, *q)}
    for p in pairs:
        if (p, p) not in rel:
            raise ValueError(f"relation not reflexive at {p}")
    for p, q in rel:
        if (q, p) not in rel:
            raise ValueError(f"relation not symmetric at {p}, {q}")
    succ: dict = {}
    for p, q in rel:
        succ.setdefault(p, set()).add(q)
    for p, q in rel:
        if not succ[q] <= succ[p]:
            raise ValueError(f"relation not transitive through {q}")
    uf = _UnionFind(len(pairs))
    pos = {p: k for k, p in enumerate(pairs)}
    for p, q in rel:
        uf.union(pos[p], pos[q])
    groups: dict = {}
    for k, p in enumerate(pairs):
        groups.setdefault(uf.find(k), []).append(p)
    classes = sorted((sorted(c) for c in groups.values()), key=lambda c: c[0])
    where = {p: i for i, c in enumerate(classes) for p in c}
    perms = []
    for h in range(n):
        perm = [where[(g.mul(h, c[0][0]), c[0][1])] for c in classes]
        for c, img in zip(classes, perm):
            if any(where[(g.mul(h, s), x)] != img for s, x in c):
                raise AssertionError("translation is not well defined on classes")
        perms.append(perm)
    iota = [where[(g.identity, x)] for x in range(m)]
    env = SetEnvelope(alpha, classes, perms, iota)
    _assert_envelope(env)
    return env


def _assert_envelope(env: SetEnvelope) -> None:
    alpha, g = env.alpha, env.alpha.group
    n = g.order
    for a in range(n):
        for b in range(n):
            ab = g.mul(a, b)
            if any(env.perms[a][env.perms[b][y]] != env.perms[ab][y] for y in range(env.size)):
                raise AssertionError("envelope action is not a group action")
    if len(set(env.iota)) != len(env.iota):
        raise AssertionError("embedding is not injective")
    image = set(env.iota)
    cover = set()
    for t in range(n):
        moved = {env.perms[t][y] for y in image}
        cover |= moved
        sub = {env.iota[alpha.index(x)] for x in alpha.subsets[t]}
        if sub != image & moved:
            raise AssertionError(f"embedded X_{g.label(t)} differs from the orbit intersection")
        for x, y in alpha.maps[t].items():
            if env.perms[t][env.iota[alpha.index(x)]] != env.iota[alpha.index(y)]:
                raise AssertionError("embedding is not equivariant")
    if cover != set(range(env.size)):
        raise AssertionError("orbit of the embedded set does not cover the envelope")


def function_algebra_action(alpha: SetPAction) -> PartialAction:
    """The induced partial action on C^X: ``alpha_t(f) = f o alpha_{t^-1}`` on functions supported in X_{t^-1}."""
    g = alpha.group
    m = len(alpha.points)
    alg = diagonal_algebra(m)
    domains = [Subspace(m, (unit_vector(m, alpha.index(x)) for x in alpha.subsets[t])) for t in range(g.order)]
    maps = []
    for t in range(g.order):
        src = domains[g.inv(t)]
        cols = []
        for b in src.basis:
            x = alpha.points[next(i for i, c in enumerate(b) if c)]
            cols.append(unit_vector(m, alpha.index(alpha.maps[t][x])))
        maps.append(DenseMatrix.from_columns(cols, m))
    return PartialAction(g, alg, tuple(domains), tuple(maps))


def functions_functor(env: SetEnvelope):
    """Diagonal algebra over Y with beta by permutation, and the ideal of functions on iota(X).

    Returns ``(beta, ideal, embedding)``; restricting beta to the ideal is
    checked to reproduce :func:`function_algebra_action` through the
    embedding ``e_x -> e_{iota(x)}``.
    """
    g = env.alpha.group
    k = env.size
    alg = diagonal_algebra(k)
    mats = [DenseMatrix.from_columns([unit_vector(k, env.perms[h][y]) for y in range(k)], k) for h in range(g.order)]
    beta = GlobalAction.from_matrices(g, alg, mats)
    ideal = is_ideal(Subspace(k, (unit_vector(k, y) for y in env.iota)), alg)
    embedding = DenseMatrix.from_columns([unit_vector(k, y) for y in env.iota], k)
    alpha = function_algebra_action(env.alpha)
    rep = verify_morphism(embedding, alpha, beta)
    if not rep.ok:
        raise AssertionError(f"embedding is not a morphism: {rep.failed_names()}")
    rho = restrict(beta, ideal)
    sp = ideal.space
    phi = DenseMatrix.from_columns([sp.coordinates(c) for c in embedding.columns()], sp.dim)
    rep = verify_morphism(phi, alpha, rho)
    if not rep.ok or any(a.dim != b.dim for a, b in zip(alpha.domains, rho.domains)):
        raise AssertionError("restriction does not reproduce the function-algebra action")
    return beta, ideal, embedding


def spectrum_of_e2(group: Group) -> SetPAction:
    """X = {1, 2}, X_g = {1}, alpha_g = id on {1}, for a group of order 2."""
    g = group.identity
    other = 1 - g
    subsets = [None, None]
    maps = [None, None]
    subsets[g] = {1, 2}
    maps[g] = {1: 1, 2: 2}
    subsets[other] = {1}
    maps[other] = {1: 1}
    return SetPAction.create(group, (1, 2), subsets, maps)


def from_partial_permutations(group: Group, points, maps) -> SetPAction:
    """Set partial action whose X_t is the image of ``maps[t]``."""
    subsets = [set(m.values()) for m in maps]
    return SetPAction.create(group, points, subsets, maps)


def diagonal_set_action(alpha: PartialAction) -> SetPAction | None:
    """The set action behind a partial action on a diagonal algebra, when domains are coordinate spans."""
    g, alg = alpha.group, alpha.algebra
    m = alg.dim
    if alg != diagonal_algebra(m):
        return None
    maps = []
    for t in range(g.order):
        src = alpha.domains[g.inv(t)]
        mt = {}
        for k, b in enumerate(src.basis):
            nz = [i for i, c in enumerate(b) if c]
            img = alpha.maps[t].column(k)
            inz = [i for i, c in enumerate(img) if c]
            if len(nz) != 1 or len(inz) != 1 or b[nz[0]] != ONE or img[inz[0]] != ONE:
                return None
            mt[nz[0]] = inz[0]
        maps.append(mt)
    return from_partial_permutations(g, tuple(range(m)), maps)


def envelope_adjoint_data(env: SetEnvelope):
    """``(alpha, beta, embedding)`` ready for the adjoint-inclusion comparison."""
    beta, _, emb = functions_functor(env)
    return function_algebra_action(env.alpha), beta, emb
