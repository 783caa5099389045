"""Partial actions of finite groups on *-algebras.

``maps[t]`` is the matrix of ``alpha_t`` from coordinates in the canonical
rref basis of ``domains[t^-1]`` to coefficient vectors of the algebra; its
columns are the images of that basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .exactlin import DenseMatrix, GaussianRational, Subspace
from .fingroup import Group
from .report import Report
from .staralg import Ideal, StarAlgebra, is_ideal


def vec_str(v: Sequence) -> list[str]:
    return [str(x) for x in v]


@dataclass(frozen=True)
class PartialAction:
    group: Group
    algebra: StarAlgebra
    domains: tuple
    maps: tuple

    def __post_init__(self):
        n = self.group.order
        if len(self.domains) != n or len(self.maps) != n:
            raise ValueError("need one domain and one map per group element")
        for t in range(n):
            d = self.domains[t]
            if d.ambient_dim != self.algebra.dim:
                raise ValueError(f"domain of {self.group.label(t)} has wrong ambient dimension")
            m = self.maps[t]
            src = self.domains[self.group.inv(t)]
            if m.rows != self.algebra.dim or m.cols != src.dim:
                raise ValueError(
                    f"map of {self.group.label(t)} must be {self.algebra.dim}x{src.dim}, got {m.rows}x{m.cols}"
                )

    def domain(self, t: int) -> Subspace:
        return self.domains[t]

    def apply(self, t: int, v: Sequence) -> tuple:
        """``alpha_t(v)`` for ``v`` in ``D[t^-1]`` (membership is not rechecked)."""
        src = self.domains[self.group.inv(t)]
        return self.maps[t].apply(src.coordinates(v))

    def apply_checked(self, t: int, v: Sequence) -> tuple:
        src = self.domains[self.group.inv(t)]
        if not src.contains(v):
            raise ValueError(f"vector not in the domain of alpha_{self.group.label(t)}")
        return self.maps[t].apply(src.coordinates(v))

    @property
    def is_global(self) -> bool:
        return all(d.dim == self.algebra.dim for d in self.domains)

    def image(self, t: int, space: Subspace) -> Subspace:
        """``alpha_t(space)`` for a subspace of ``D[t^-1]``."""
        return Subspace(self.algebra.dim, (self.apply(t, v) for v in space.basis))


class GlobalAction(PartialAction):
    """A partial action whose every domain is the whole algebra."""

    @classmethod
    def from_matrices(cls, group: Group, algebra: StarAlgebra, matrices: Sequence[DenseMatrix]) -> GlobalAction:
        full = Subspace.full(algebra.dim)
        return cls(group, algebra, tuple(full for _ in range(group.order)), tuple(matrices))

    def matrix(self, t: int) -> DenseMatrix:
        return self.maps[t]


def from_ambient_maps(group: Group, algebra: StarAlgebra, domains: Sequence[Subspace],
                      ambient: Sequence[DenseMatrix]) -> PartialAction:
    """Partial action whose ``alpha_t`` is the restriction of ``ambient[t]`` to ``D[t^-1]``."""
    maps = []
    for t in range(group.order):
        src = domains[group.inv(t)]
        cols = [ambient[t].apply(b) for b in src.basis]
        maps.append(DenseMatrix.from_columns(cols, algebra.dim))
    return PartialAction(group, algebra, tuple(domains), tuple(maps))


def check_partial_action(alpha: PartialAction) -> Report:
    """Check every partial-action axiom exactly; collect all violations."""
    g, alg = alpha.group, alpha.algebra
    n, dim = g.order, alg.dim
    rep = Report("partial action")
    e = g.identity
    lab = g.label
    rep.check("identity-domain", alpha.domains[e] == Subspace.full(dim), witness={"t": lab(e)})
    ident_ok = alpha.maps[e] == DenseMatrix.identity(dim) if alpha.domains[e].dim == dim else False
    rep.check("identity-map", ident_ok, witness={"t": lab(e)})

    rep.clause("ideal")
    for t in range(n):
        ideal = is_ideal(alpha.domains[t], alg)
        if not ideal:
            side, i, k = ideal.witness
            rep.fail("ideal", {"t": lab(t), "side": side, "basis": i, "domain_vector": k})

    rep.clause("range")
    for t in range(n):
        img = Subspace(dim, alpha.maps[t].columns())
        if img != alpha.domains[t]:
            rep.fail("range", {"t": lab(t)})

    rep.clause("inverse")
    for t in range(n):
        ti = g.inv(t)
        src = alpha.domains[ti]
        tgt = alpha.domains[t]
        for v in src.basis:
            w = alpha.apply(t, v)
            if not tgt.contains(w) or alpha.apply(ti, w) != v:
                rep.fail("inverse", {"t": lab(t), "x": vec_str(v)})

    rep.clause("multiplicative")
    rep.clause("star")
    for t in range(n):
        src = alpha.domains[g.inv(t)]
        imgs = [alpha.apply(t, v) for v in src.basis]
        for a, (x, ax) in enumerate(zip(src.basis, imgs)):
            for y, ay in zip(src.basis, imgs):
                if alpha.apply(t, alg.mul_vec(x, y)) != alg.mul_vec(ax, ay):
                    rep.fail("multiplicative", {"t": lab(t), "x": vec_str(x), "y": vec_str(y)})
            xs = alg.star_vec(x)
            if not src.contains(xs) or alpha.apply(t, xs) != alg.star_vec(ax):
                rep.fail("star", {"t": lab(t), "x": vec_str(x)})

    rep.clause("domain-compatibility")
    rep.clause("composition")
    for t in range(n):
        ti = g.inv(t)
        for s in range(n):
            lhs = alpha.image(t, alpha.domains[ti] & alpha.domains[s])
            rhs = alpha.domains[t] & alpha.domains[g.mul(t, s)]
            if lhs != rhs:
                rep.fail("domain-compatibility", {"t": lab(t), "s": lab(s)})
    for s in range(n):
        for t in range(n):
            st = g.mul(s, t)
            common = alpha.domains[g.inv(st)] & alpha.domains[g.inv(t)]
            for x in common.basis:
                y = alpha.apply(t, x)
                if not alpha.domains[g.inv(s)].contains(y) or alpha.apply(s, y) != alpha.apply(st, x):
                    rep.fail("composition", {"s": lab(s), "t": lab(t), "x": vec_str(x)})
    return rep


def ideal_algebra(alg: StarAlgebra, ideal: Ideal) -> StarAlgebra:
    """The ideal as a *-algebra in its own right, on its canonical basis."""
    if not ideal.verified:
        raise ValueError("not a verified ideal")
    sp = ideal.space
    basis = sp.basis
    k = len(basis)
    c = [[sp.coordinates(alg.mul_vec(a, b)) for b in basis] for a in basis]
    inv = []
    ech = sp.echelon()
    for a in basis:
        s = alg.star_vec(a)
        if not ech.contains(s):
            raise ValueError("ideal is not closed under the involution")
        inv.append(sp.coordinates(s))
    names = [alg.format_vec(b) for b in basis]
    if len(set(names)) != k:
        names = None
    return StarAlgebra(c, inv, names)


def restrict(beta: PartialAction, ideal: Ideal, check: bool = True) -> PartialAction:
    """Restriction of a global action to an ideal.

    The restricted algebra is the ideal on its canonical basis; domains are
    ``D[t] = I ∩ beta_t(I)`` so that every ``alpha_t`` lands back in ``I``.
    The ideal's basis rows give the inclusion into ``beta``'s algebra.
    """
    if not beta.is_global:
        raise ValueError("restrict expects a global action")
    if not ideal.verified:
        ideal = is_ideal(ideal.space, beta.algebra)
        if not ideal:
            raise ValueError(f"not an ideal: witness {ideal.witness}")
    g = beta.group
    sp = ideal.space
    sub = ideal_algebra(beta.algebra, ideal)
    k = sp.dim
    domains = []
    for t in range(g.order):
        amb = sp & beta.image(t, sp)
        domains.append(Subspace(k, (sp.coordinates(v) for v in amb.basis)))
    maps = []
    ech = sp.echelon()
    for t in range(g.order):
        cols = []
        for w in domains[g.inv(t)].basis:
            img = beta.apply(t, sp.combine(w))
            if not ech.contains(img):
                raise AssertionError("restricted map leaves the ideal")
            cols.append(sp.coordinates(img))
        maps.append(DenseMatrix.from_columns(cols, k))
    alpha = PartialAction(g, sub, tuple(domains), tuple(maps))
    if check:
        rep = check_partial_action(alpha)
        if not rep.ok:
            raise AssertionError(f"restriction is not a partial action: {rep.failed_names()}")
    return alpha


def inclusion_matrix(ideal: Ideal) -> DenseMatrix:
    """Coefficient map from the ideal's canonical basis into the ambient algebra."""
    return DenseMatrix.from_columns(ideal.space.basis, ideal.space.ambient_dim)


def verify_morphism(phi: DenseMatrix, alpha: PartialAction, beta: PartialAction) -> Report:
    """Check that ``phi`` is an equivariant *-homomorphism alpha -> beta."""
    A, B = alpha.algebra, beta.algebra
    if phi.rows != B.dim or phi.cols != A.dim:
        raise ValueError(f"morphism must be {B.dim}x{A.dim}, got {phi.rows}x{phi.cols}")
    if alpha.group.order != beta.group.order:
        raise ValueError("actions of different groups")
    g = alpha.group
    lab = g.label
    rep = Report("morphism")
    imgs = [phi.column(i) for i in range(A.dim)]
    rep.clause("multiplicative")
    for i in range(A.dim):
        for j in range(A.dim):
            lhs = phi.apply(A.mul_vec(A.basis_vec(i), A.basis_vec(j)))
            if lhs != B.mul_vec(imgs[i], imgs[j]):
                rep.fail("multiplicative", [i, j])
    rep.clause("star")
    for i in range(A.dim):
        if phi.apply(A.star_vec(A.basis_vec(i))) != B.star_vec(imgs[i]):
            rep.fail("star", [i])
    rep.clause("domains")
    for t in range(g.order):
        for v in alpha.domains[t].basis:
            if not beta.domains[t].contains(phi.apply(v)):
                rep.fail("domains", {"t": lab(t), "x": vec_str(v)})
    rep.clause("equivariance")
    for t in range(g.order):
        ti = g.inv(t)
        for v in alpha.domains[ti].basis:
            pv = phi.apply(v)
            if not beta.domains[ti].contains(pv):
                continue  # already reported under "domains"
            if beta.apply(t, pv) != phi.apply(alpha.apply(t, v)):
                rep.fail("equivariance", {"t": lab(t), "x": vec_str(v)})
    return rep


def ambient_matrix(rows: Sequence[Sequence]) -> DenseMatrix:
    return DenseMatrix([[GaussianRational.coerce(x) for x in r] for r in rows])
