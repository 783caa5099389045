"""Enveloping families, multiplier globalization and the existence decision.

The function algebra ``F(G, A)`` is ``A^|G|`` with pointwise product; a
function is a tuple of per-slot coefficient vectors indexed by group
element. Every multiplier built here is slotwise (its left and right maps
act on each slot separately), so :class:`GMultiplier` stores one pair of
``dim x dim`` blocks per slot; :meth:`GMultiplier.to_dense` gives the full
``N x N`` pair with ``N = |G| dim(A)``.

Conventions used throughout::

    [mu(a) f](r) = F_{r^-1}(a, f(r))
    [f mu(a)](r) = alpha_{r^-1}(F_r(f(r), a))
    Ad_s(L, R)   = (lambda_s L lambda_{s^-1}, lambda_s R lambda_{s^-1}),
                   (lambda_s f)(r) = f(s^-1 r)
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .exactlin import (
    ONE,
    ZERO,
    Basis,
    DenseMatrix,
    Echelon,
    GaussianRational,
    Subspace,
    _annihilating_functionals,
    inverse,
    kernel,
    matmul_rows,
    solve,
    vadd,
    vscale,
    vsub,
    zero_vector,
)
from .paction import (
    GlobalAction,
    PartialAction,
    check_partial_action,
    restrict,
    vec_str,
    verify_morphism,
)
from .report import Report
from .staralg import (
    BlockRealization,
    Ideal,
    StarAlgebra,
    annihilator,
    cstar_norm,
    is_ideal,
    unit_of,
)

NORM_SLACK = 1e-9


def _ideal(space: Subspace) -> Ideal:
    # domains of a checked partial action are ideals by construction
    return Ideal(space, True)


def _require_valid(alpha: PartialAction):
    rep = check_partial_action(alpha)
    if not rep.ok:
        raise ValueError(f"partial action fails axioms: {', '.join(rep.failed_names())}")


# ---------------------------------------------------------------------------
# enveloping families


class EnvFamily:
    """Bilinear maps ``F_t: A x A -> A`` stored on basis pairs.

    ``tensors[t][i][j]`` is the coefficient vector of ``F_t(e_i, e_j)``.
    ``validated`` is set by :func:`check_family` when the algebraic axioms hold.
    """

    def __init__(self, alpha: PartialAction, tensors):
        n, d = alpha.group.order, alpha.algebra.dim
        if len(tensors) != n or any(len(T) != d or any(len(row) != d for row in T) for T in tensors):
            raise ValueError(f"family needs {n} tensors of shape {d}x{d}")
        self.alpha = alpha
        self.tensors = tuple(
            tuple(tuple(tuple(GaussianRational.coerce(x) for x in v) for v in row) for row in T)
            for T in tensors
        )
        self.validated = False
        self._sparse = [
            [[[(k, x) for k, x in enumerate(v) if x] for v in row] for row in T] for T in self.tensors
        ]

    def value(self, t: int, a: Sequence, b: Sequence) -> tuple:
        d = self.alpha.algebra.dim
        out = [ZERO] * d
        bnz = [(j, y) for j, y in enumerate(b) if y]
        T = self._sparse[t]
        for i, x in enumerate(a):
            if not x:
                continue
            row = T[i]
            for j, y in bnz:
                xy = x * y
                for k, c in row[j]:
                    out[k] = out[k] + xy * c
        return tuple(out)

    def basis_value(self, t: int, i: int, j: int) -> tuple:
        return self.tensors[t][i][j]

    def scaled(self, t: int, factor) -> EnvFamily:
        """Copy with ``F_t`` multiplied by ``factor`` (used to build mutants)."""
        c = GaussianRational.coerce(factor)
        tensors = [list(T) for T in self.tensors]
        tensors[t] = [[vscale(c, v) for v in row] for row in self.tensors[t]]
        return EnvFamily(self.alpha, tensors)

    def __eq__(self, other):
        if not isinstance(other, EnvFamily):
            return NotImplemented
        return self.tensors == other.tensors

    def __hash__(self):
        return hash(self.tensors)


@dataclass
class NSWitness:
    value: tuple | None
    nullity: int

    @property
    def exists(self) -> bool:
        return self.value is not None

    @property
    def unique(self) -> bool:
        return self.value is not None and self.nullity == 0


def ns_witness(alpha: PartialAction, t: int, a: Sequence, b: Sequence) -> NSWitness:
    """Solve for ``x`` in ``D[t]`` with, for every basis vector ``d`` of ``D[t]``,

        d x = alpha_t(alpha_{t^-1}(d) a) b,   x d = alpha_t(a alpha_{t^-1}(b d)).

    At ``t = e`` the product ``ab`` is returned (it always solves the system);
    ``nullity`` is the dimension of the solution set's direction space.
    """
    g, alg = alpha.group, alpha.algebra
    a = tuple(GaussianRational.coerce(x) for x in a)
    b = tuple(GaussianRational.coerce(x) for x in b)
    Dt = alpha.domains[t]
    ti = g.inv(t)
    basis = Dt.basis
    cols = [[] for _ in basis]
    rhs: list = []
    for d in basis:
        left = alg.mul_vec(alpha.apply(t, alg.mul_vec(alpha.apply(ti, d), a)), b)
        right = alpha.apply(t, alg.mul_vec(a, alpha.apply(ti, alg.mul_vec(b, d))))
        for k, u in enumerate(basis):
            cols[k].extend(alg.mul_vec(d, u))
            cols[k].extend(alg.mul_vec(u, d))
        rhs.extend(left)
        rhs.extend(right)
    if not basis:
        return NSWitness(alg.zero_vec(), 0)
    coords, null = solve(DenseMatrix.from_columns(cols, len(rhs)), rhs)
    if t == g.identity:
        return NSWitness(alg.mul_vec(a, b), null.dim)
    if coords is None:
        return NSWitness(None, null.dim)
    return NSWitness(Dt.combine(coords), null.dim)


@dataclass
class FamilyFailure:
    """Why no enveloping family could be built."""

    t: int
    reason: str
    missing_units: list = field(default_factory=list)
    pair: tuple | None = None

    def __bool__(self):
        return False

    def witness(self, alpha: PartialAction) -> dict:
        g, alg = alpha.group, alpha.algebra
        w = {"t": g.label(self.t), "reason": self.reason,
             "missing_units": [g.label(s) for s in self.missing_units]}
        if self.pair is not None:
            w["a"] = alg.names[self.pair[0]]
            w["b"] = alg.names[self.pair[1]]
        return w

    def describe(self, alpha: PartialAction) -> list[str]:
        g, alg = alpha.group, alpha.algebra
        lines = [f"D[{g.label(s)}] has no unit" for s in self.missing_units]
        if self.pair is not None:
            a, b = (alg.names[k] for k in self.pair)
            lines.append(f"{self.reason} at ({g.label(self.t)},{a},{b})")
        else:
            lines.append(f"{self.reason} at {g.label(self.t)}")
        return lines


def domain_units(alpha: PartialAction) -> list:
    """``unit_of(D[t])`` for every t (None where a domain is not unital)."""
    out = []
    for t in range(alpha.group.order):
        u = unit_of(_ideal(alpha.domains[t]), alpha.algebra)
        out.append(None if u is None else u.coeffs)
    return out


def canonical_family(alpha: PartialAction) -> EnvFamily | FamilyFailure:
    """The family ``F_t(a, b) = alpha_t(1_{t^-1} a) b`` when all domains are unital.

    Otherwise every ``F_t(e_i, e_j)`` is taken as the unique NS witness;
    the first ``(t, i, j)`` where it is absent or not unique is reported.
    """
    g, alg = alpha.group, alpha.algebra
    n, d = g.order, alg.dim
    units = domain_units(alpha)
    missing = [t for t in range(n) if units[t] is None]
    e = [alg.basis_vec(i) for i in range(d)]
    tensors = []
    if not missing:
        for t in range(n):
            if t == g.identity:
                tensors.append([[alg.mul_vec(e[i], e[j]) for j in range(d)] for i in range(d)])
                continue
            u = units[g.inv(t)]
            left = [alpha.apply(t, alg.mul_vec(u, e[i])) for i in range(d)]
            tensors.append([[alg.mul_vec(left[i], e[j]) for j in range(d)] for i in range(d)])
        return EnvFamily(alpha, tensors)
    for t in range(n):
        if t == g.identity:
            tensors.append([[alg.mul_vec(e[i], e[j]) for j in range(d)] for i in range(d)])
            continue
        T = []
        for i in range(d):
            row = []
            for j in range(d):
                w = ns_witness(alpha, t, e[i], e[j])
                if not w.exists:
                    return FamilyFailure(t, "no NS witness", missing, (i, j))
                if not w.unique:
                    return FamilyFailure(t, "non-unique NS witness", missing, (i, j))
                row.append(w.value)
            T.append(row)
        tensors.append(T)
    return EnvFamily(alpha, tensors)


class _Ops:
    """Cached evaluation helpers shared by the family axiom checks."""

    def __init__(self, alpha: PartialAction, F: EnvFamily):
        self.alpha = alpha
        self.F = F
        self.g = alpha.group
        self.alg = alpha.algebra
        self.d = self.alg.dim
        self.e = [self.alg.basis_vec(i) for i in range(self.d)]
        self._dom_ech = [dom.echelon() for dom in alpha.domains]

    def mul(self, u, v):
        return self.alg.mul_vec(u, v)

    def fv(self, t, a, b):
        return self.F.value(t, a, b)

    def act(self, t, v):
        """``alpha_t(v)``, or None when ``v`` is outside ``D[t^-1]``."""
        if v is None or not self._dom_ech[self.g.inv(t)].contains(v):
            return None
        return self.alpha.apply(t, v)

    def in_domain(self, t, v) -> bool:
        return self._dom_ech[t].contains(v)


def _check_I(ops: _Ops, rep: Report, name: str):
    g, F, d = ops.g, ops.F, ops.d
    rep.clause(name)
    for i in range(d):
        for j in range(d):
            if F.basis_value(g.identity, i, j) != ops.mul(ops.e[i], ops.e[j]):
                rep.fail(name, {"t": g.label(g.identity), "a": i, "b": j, "part": "product"})
    for t in range(g.order):
        for i in range(d):
            for j in range(d):
                if not ops.in_domain(t, F.basis_value(t, i, j)):
                    rep.fail(name, {"t": g.label(t), "a": i, "b": j, "part": "range"})


def _check_bc(ops: _Ops, rep: Report, name: str):
    """F_t(a, bc) = F_t(a, b) c."""
    g, d, e = ops.g, ops.d, ops.e
    for t in range(g.order):
        for i in range(d):
            for j in range(d):
                fab = ops.F.basis_value(t, i, j)
                for k in range(d):
                    if ops.fv(t, e[i], ops.mul(e[j], e[k])) != ops.mul(fab, e[k]):
                        rep.fail(name, {"t": g.label(t), "a": i, "b": j, "c": k, "identity": "F_t(a,bc)=F_t(a,b)c"})


def _check_left_module(ops: _Ops, rep: Report, name: str):
    """a F_t(b, c) = alpha_t(F_{t^-1}(a, b)) c."""
    g, d, e = ops.g, ops.d, ops.e
    for t in range(g.order):
        ti = g.inv(t)
        for i in range(d):
            for j in range(d):
                mid = ops.act(t, ops.F.basis_value(ti, i, j))
                for k in range(d):
                    lhs = ops.mul(e[i], ops.F.basis_value(t, j, k))
                    if mid is None or lhs != ops.mul(mid, e[k]):
                        rep.fail(name, {"t": g.label(t), "a": i, "b": j, "c": k,
                                        "identity": "aF_t(b,c)=alpha_t(F_t^-1(a,b))c"})


def _check_composition(ops: _Ops, rep: Report, name: str):
    """F_t(F_s(a, b), c) = F_{ts}(a, F_t(b, c))."""
    g, d, e = ops.g, ops.d, ops.e
    F = ops.F
    for t in range(g.order):
        for s in range(g.order):
            ts = g.mul(t, s)
            for i in range(d):
                for j in range(d):
                    fs = F.basis_value(s, i, j)
                    for k in range(d):
                        lhs = ops.fv(t, fs, e[k])
                        rhs = ops.fv(ts, e[i], F.basis_value(t, j, k))
                        if lhs != rhs:
                            rep.fail(name, {"t": g.label(t), "s": g.label(s), "a": i, "b": j, "c": k,
                                            "identity": "F_t(F_s(a,b),c)=F_ts(a,F_t(b,c))"})


def _check_V_first(ops: _Ops, rep: Report, name: str):
    """For a in D[t^-1]: F_{st}(a, b) = F_s(alpha_t(a), b)."""
    g, d, e = ops.g, ops.d, ops.e
    for t in range(g.order):
        src = ops.alpha.domains[g.inv(t)]
        for a in src.basis:
            at = ops.alpha.apply(t, a)
            for s in range(g.order):
                st = g.mul(s, t)
                for j in range(d):
                    if ops.fv(st, a, e[j]) != ops.fv(s, at, e[j]):
                        rep.fail(name, {"t": g.label(t), "s": g.label(s), "a": vec_str(a), "b": j,
                                        "identity": "F_st(a,b)=F_s(alpha_t(a),b)"})


def check_family(alpha: PartialAction, F: EnvFamily, mode: str = "algebraic") -> Report:
    """Check the enveloping-family axioms exhaustively over basis tuples.

    ``mode="algebraic"`` checks axioms I-VI, ``mode="star"`` checks I'-III'.
    Axiom IV is the statement that the joint kernel of ``a -> F_t(a, .)`` and
    ``a -> F_t(., a)`` over all t is zero. For axiom VI the hypothesis is
    solved jointly for the pair ``(a, b)``; the conclusion ``a in D[t]`` is
    then a subspace inclusion.
    """
    if mode not in ("algebraic", "star"):
        raise ValueError(f"unknown mode {mode!r}")
    ops = _Ops(alpha, F)
    g, d, e, alg = ops.g, ops.d, ops.e, ops.alg
    rep = Report(f"family ({mode})")
    if mode == "algebraic":
        _check_I(ops, rep, "I")

        rep.clause("II")
        _check_bc(ops, rep, "II")
        for t in range(g.order):
            ti = g.inv(t)
            for i in range(d):
                for j in range(d):
                    ab = ops.mul(e[i], e[j])
                    for k in range(d):
                        lhs = ops.act(t, ops.fv(ti, ab, e[k]))
                        inner = ops.act(t, ops.F.basis_value(ti, j, k))
                        if lhs is None or inner is None or lhs != ops.mul(e[i], inner):
                            rep.fail("II", {"t": g.label(t), "a": i, "b": j, "c": k,
                                            "identity": "alpha_t(F_t^-1(ab,c))=a alpha_t(F_t^-1(b,c))"})
        _check_left_module(ops, rep, "II")

        rep.clause("III")
        _check_composition(ops, rep, "III")
        for t in range(g.order):
            for s in range(g.order):
                si = g.inv(s)
                tsi = g.mul(t, si)
                for i in range(d):
                    for j in range(d):
                        back = ops.act(si, F.basis_value(s, i, j))
                        for k in range(d):
                            rhs = ops.fv(t, e[i], F.basis_value(tsi, j, k))
                            if back is None or ops.fv(t, back, e[k]) != rhs:
                                rep.fail("III", {"t": g.label(t), "s": g.label(s), "a": i, "b": j, "c": k,
                                                 "identity": "F_t(alpha_s^-1(F_s(a,b)),c)=F_t(a,F_ts^-1(b,c))"})

        rep.clause("IV")
        cols = []
        for k in range(d):
            col = []
            for t in range(g.order):
                for j in range(d):
                    col.extend(F.basis_value(t, k, j))
                    col.extend(F.basis_value(t, j, k))
            cols.append(tuple(col))
        ker = kernel(cols, len(cols[0]) if cols else 0)
        if ker.dim:
            rep.fail("IV", {"a": vec_str(ker.basis[0])}, detail=f"kernel dimension {ker.dim}")

        rep.clause("V")
        _check_V_first(ops, rep, "V")
        for t in range(g.order):
            src = alpha.domains[g.inv(t)]
            for a in src.basis:
                at = alpha.apply(t, a)
                for s in range(g.order):
                    st = g.mul(s, t)
                    sti = g.inv(st)
                    si = g.inv(s)
                    for j in range(d):
                        lhs = ops.act(st, ops.fv(sti, e[j], a))
                        rhs = ops.act(s, ops.fv(si, e[j], at))
                        if lhs is None or rhs is None or lhs != rhs:
                            rep.fail("V", {"t": g.label(t), "s": g.label(s), "a": vec_str(a), "b": j,
                                           "identity": "alpha_st(F_(st)^-1(b,a))=alpha_s(F_s^-1(b,alpha_t(a)))"})

        rep.passed("VI", detail="hypothesis solved jointly over (a, b) in A+A")
        for t in range(g.order):
            w = _axiom_vi_violation(ops, t)
            if w is not None:
                rep.fail("VI", {"t": g.label(t), "a": vec_str(w)})
        if rep.ok:
            F.validated = True
    else:
        _check_I(ops, rep, "I'")
        rep.clause("II'")
        for t in range(g.order):
            ti = g.inv(t)
            for i in range(d):
                for j in range(d):
                    lhs = alg.star_vec(F.basis_value(t, i, j))
                    rhs = ops.act(t, ops.fv(ti, alg.star_vec(e[j]), alg.star_vec(e[i])))
                    if rhs is None or lhs != rhs:
                        rep.fail("II'", {"t": g.label(t), "a": i, "b": j,
                                         "identity": "F_t(a,b)*=alpha_t(F_t^-1(b*,a*))"})
        _check_bc(ops, rep, "II'")
        _check_composition(ops, rep, "II'")
        _check_left_module(ops, rep, "II'")
        rep.clause("III'")
        _check_V_first(ops, rep, "III'")
    return rep


def _axiom_vi_violation(ops: _Ops, t: int) -> tuple | None:
    """An ``a`` outside ``D[t]`` satisfying the hypothesis of axiom VI, if any."""
    g, d, F, alpha = ops.g, ops.d, ops.F, ops.alpha
    n = g.order
    ti = g.inv(t)
    src = alpha.domains[ti]
    # linear functionals cutting out D[t^-1]
    perp = _annihilating_functionals(src)

    def ext_alpha(v):
        return alpha.maps[t].apply(src.coordinates(v)) if src.dim else zero_vector(d)

    cols = []
    for k in range(2 * d):
        col: list = []
        is_a = k < d
        kk = k if is_a else k - d
        for s in range(n):
            st = g.mul(s, t)
            for j in range(d):
                col.extend(F.basis_value(s, kk, j) if is_a else vscale(-ONE, F.basis_value(st, kk, j)))
        for s in range(n):
            tis = g.mul(ti, s)
            for j in range(d):
                if is_a:
                    col.extend(ZERO for _ in perp)
                else:
                    v = F.basis_value(tis, j, kk)
                    col.extend(sum((f[m] * v[m] for m in range(d) if f[m] and v[m]), ZERO) for f in perp)
        for s in range(n):
            tis = g.mul(ti, s)
            for j in range(d):
                if is_a:
                    col.extend(F.basis_value(s, j, kk))
                else:
                    col.extend(vscale(-ONE, ext_alpha(F.basis_value(tis, j, kk))))
        cols.append(tuple(col))
    sol = kernel(cols, len(cols[0]))
    Dt = alpha.domains[t]
    for v in sol.basis:
        a = tuple(v[:d])
        if not Dt.contains(a):
            return a
    return None


# ---------------------------------------------------------------------------
# multipliers of F(G, A)


class GMultiplier:
    """Slotwise multiplier of ``F(G, A)``: ``slots[r] = (L_r, R_r)`` as row tuples."""

    __slots__ = ("slots", "dim")

    def __init__(self, slots, dim: int):
        self.slots = tuple((tuple(L), tuple(R)) for L, R in slots)
        self.dim = dim

    @classmethod
    def from_flat(cls, v: Sequence, order: int, dim: int) -> GMultiplier:
        dd = dim * dim
        slots = []
        for r in range(order):
            L = v[r * dd:(r + 1) * dd]
            R = v[(order + r) * dd:(order + r + 1) * dd]
            slots.append((
                tuple(tuple(L[i * dim:(i + 1) * dim]) for i in range(dim)),
                tuple(tuple(R[i * dim:(i + 1) * dim]) for i in range(dim)),
            ))
        return cls(slots, dim)

    @property
    def order(self) -> int:
        return len(self.slots)

    def flatten(self) -> tuple:
        """All left blocks (slot order, row-major) followed by all right blocks."""
        out: list = []
        for L, _ in self.slots:
            for row in L:
                out.extend(row)
        for _, R in self.slots:
            for row in R:
                out.extend(row)
        return tuple(out)

    def __eq__(self, other):
        if not isinstance(other, GMultiplier):
            return NotImplemented
        return self.slots == other.slots

    def __hash__(self):
        return hash(self.slots)

    def is_zero(self) -> bool:
        return not any(x for L, R in self.slots for m in (L, R) for row in m for x in row)

    def __matmul__(self, other: GMultiplier) -> GMultiplier:
        """Multiplier product ``(L, R)(L', R') = (L L', R' R)``."""
        d = self.dim
        return GMultiplier(
            [(matmul_rows(L, L2, d), matmul_rows(R2, R, d))
             for (L, R), (L2, R2) in zip(self.slots, other.slots)],
            d,
        )

    def __add__(self, other: GMultiplier) -> GMultiplier:
        return GMultiplier(
            [(tuple(vadd(a, b) for a, b in zip(L, L2)), tuple(vadd(a, b) for a, b in zip(R, R2)))
             for (L, R), (L2, R2) in zip(self.slots, other.slots)],
            self.dim,
        )

    def scale(self, c) -> GMultiplier:
        c = GaussianRational.coerce(c)
        return GMultiplier(
            [(tuple(vscale(c, r) for r in L), tuple(vscale(c, r) for r in R)) for L, R in self.slots],
            self.dim,
        )

    def ad(self, s: int, group) -> GMultiplier:
        """``Ad_s``: slot r of the result is slot ``s^-1 r`` of self."""
        si = group.inv(s)
        return GMultiplier([self.slots[group.mul(si, r)] for r in range(group.order)], self.dim)

    def star(self, alg: StarAlgebra) -> GMultiplier:
        """``(L, R)* = (x -> R(x*)*, x -> L(x*)*)``."""
        d = self.dim
        sig = alg.involution.transpose().entries
        sig_c = tuple(tuple(x.conjugate() for x in r) for r in sig)

        def sharp(M):
            Mc = tuple(tuple(x.conjugate() for x in r) for r in M)
            return matmul_rows(matmul_rows(sig, Mc, d), sig_c, d)

        return GMultiplier([(sharp(R), sharp(L)) for L, R in self.slots], d)

    def apply_left(self, f: Sequence[Sequence]) -> tuple:
        return tuple(_mv(L, v) for (L, _), v in zip(self.slots, f))

    def apply_right(self, f: Sequence[Sequence]) -> tuple:
        return tuple(_mv(R, v) for (_, R), v in zip(self.slots, f))

    def is_multiplier(self, alg: StarAlgebra) -> bool:
        """``L(fh) = L(f)h``, ``R(fh) = fR(h)``, ``fL(h) = R(f)h`` on a spanning set."""
        d = self.dim
        e = [alg.basis_vec(i) for i in range(d)]
        for L, R in self.slots:
            Le = [_mv(L, x) for x in e]
            Re = [_mv(R, x) for x in e]
            for i in range(d):
                for j in range(d):
                    ab = alg.mul_vec(e[i], e[j])
                    if _mv(L, ab) != alg.mul_vec(Le[i], e[j]):
                        return False
                    if _mv(R, ab) != alg.mul_vec(e[i], Re[j]):
                        return False
                    if alg.mul_vec(e[i], Le[j]) != alg.mul_vec(Re[i], e[j]):
                        return False
        return True

    def to_dense(self) -> tuple[DenseMatrix, DenseMatrix]:
        """The block-diagonal ``N x N`` left and right matrices."""
        n, d = self.order, self.dim
        N = n * d

        def dense(which):
            rows = []
            for r, pair in enumerate(self.slots):
                M = pair[which]
                for i in range(d):
                    row = [ZERO] * N
                    row[r * d:(r + 1) * d] = M[i]
                    rows.append(tuple(row))
            return DenseMatrix._wrap(tuple(rows), N)

        return dense(0), dense(1)


def _mv(M, v):
    out = []
    nz = [(j, x) for j, x in enumerate(v) if x]
    for row in M:
        acc = ZERO
        for j, x in nz:
            y = row[j]
            if y:
                acc = acc + y * x
        out.append(acc)
    return tuple(out)


def translation_matrix(group, s: int, dim: int) -> DenseMatrix:
    """Dense matrix of ``lambda_s`` on ``F(G, A)`` coefficients."""
    N = group.order * dim
    rows = [[ZERO] * N for _ in range(N)]
    si = group.inv(s)
    for r in range(group.order):
        src = group.mul(si, r)
        for i in range(dim):
            rows[r * dim + i][src * dim + i] = ONE
    return DenseMatrix(rows)


def mu_multiplier(alpha: PartialAction, F: EnvFamily, a: Sequence, formal: bool = False) -> GMultiplier:
    """``mu(a)``, acting by ``[mu(a) f](r) = F_{r^-1}(a, f(r))`` and
    ``[f mu(a)](r) = alpha_{r^-1}(F_r(f(r), a))``.

    Raises ValueError unless ``F`` passed :func:`check_family` (pass
    ``formal=True`` to build it from an unvalidated family).
    """
    if not (F.validated or formal):
        raise ValueError("family has not been validated")
    g, alg = alpha.group, alpha.algebra
    d = alg.dim
    a = tuple(GaussianRational.coerce(x) for x in a)
    e = [alg.basis_vec(j) for j in range(d)]
    slots = []
    for r in range(g.order):
        ri = g.inv(r)
        Lcols = [F.value(ri, a, e[j]) for j in range(d)]
        src = alpha.domains[r]
        Rcols = []
        for j in range(d):
            v = F.value(r, e[j], a)
            Rcols.append(alpha.maps[ri].apply(src.coordinates(v)) if src.dim else zero_vector(d))
        slots.append((DenseMatrix.from_columns(Lcols, d).entries, DenseMatrix.from_columns(Rcols, d).entries))
    m = GMultiplier(slots, d)
    if not formal and not m.is_multiplier(alg):
        raise AssertionError("mu(a) violates the multiplier identities")
    return m


# ---------------------------------------------------------------------------
# globalization


class GlobalizationError(Exception):
    def __init__(self, clause: str, witness, report: Report):
        super().__init__(f"globalization clause {clause!r} failed: witness {witness}")
        self.clause = clause
        self.witness = witness
        self.report = report


@dataclass
class EnvelopePair:
    """The constructed global action ``beta = Ad|B`` with embedding ``mu``.

    ``algebra`` is B on its canonical basis ``basis`` (a list of
    GMultipliers); ``action`` holds the matrices of ``beta_s`` in that basis
    and ``embedding`` has the B-coordinates of ``mu(e_i)`` as columns.
    """

    alpha: PartialAction
    family: EnvFamily
    mu: list
    basis: list
    algebra: StarAlgebra
    action: GlobalAction
    embedding: DenseMatrix
    report: Report

    @property
    def dim(self) -> int:
        return self.algebra.dim


def _coords_in(ech: Echelon, v) -> tuple | None:
    if not ech.contains(v):
        return None
    return ech.coordinates(v)


def globalize(alpha: PartialAction, F: EnvFamily) -> EnvelopePair:
    """Build ``B = span{Ad_s(mu(e_i))}`` and verify it envelopes ``alpha``.

    Raises :class:`GlobalizationError` naming the first failing clause.
    """
    if not F.validated:
        raise ValueError("family has not been validated")
    g, alg = alpha.group, alpha.algebra
    n, d = g.order, alg.dim
    rep = Report("globalization")

    def need(name, ok, witness=None, detail=""):
        if not rep.check(name, ok, witness, detail):
            raise GlobalizationError(name, witness, rep)

    mus = [mu_multiplier(alpha, F, alg.basis_vec(i)) for i in range(d)]
    rep.passed("multipliers")

    # canonical orbit basis: group-then-basis order, echelon-reduced
    ech = Echelon(2 * n * d * d)
    for s in range(n):
        for m in mus:
            ech.add(m.ad(s, g).flatten())
    basis = [GMultiplier.from_flat(row, n, d) for row in ech.basis_rows()]
    dimB = len(basis)

    # structure constants of B from exact multiplier products
    struct = []
    for i, x in enumerate(basis):
        row = []
        for j, y in enumerate(basis):
            c = _coords_in(ech, (x @ y).flatten())
            need("closure", c is not None, {"basis_pair": [i, j]})
            row.append(c)
        struct.append(row)
    stars = []
    for i, x in enumerate(basis):
        c = _coords_in(ech, x.star(alg).flatten())
        need("star-closed", c is not None, {"basis": i})
        stars.append(c)
    Balg = StarAlgebra(struct, stars, [f"b{i}" for i in range(dimB)])

    mats = []
    for s in range(n):
        cols = []
        for i, x in enumerate(basis):
            c = _coords_in(ech, x.ad(s, g).flatten())
            need("ad-invariant", c is not None, {"s": g.label(s), "basis": i})
            cols.append(c)
        mats.append(DenseMatrix.from_columns(cols, dimB))
    beta = GlobalAction.from_matrices(g, Balg, mats)
    act_rep = check_partial_action(beta)
    need("ad-global-action", act_rep.ok, act_rep.failed_names())

    emb_cols = [ech.coordinates(m.flatten()) for m in mus]
    embedding = DenseMatrix.from_columns(emb_cols, dimB)
    muA = Subspace(dimB, emb_cols)
    inj = muA.dim == d
    need("mu-injective", inj, {"rank": muA.dim})
    mu_coords = Basis(emb_cols, dimB)

    # (i) closure identity Ad_t(mu a) Ad_s(mu b) = Ad_s(mu F_{s^-1 t}(a, b))
    ad_mu = [[beta.matrix(s).apply(emb_cols[i]) for i in range(d)] for s in range(n)]
    for t in range(n):
        for s in range(n):
            u = g.mul(g.inv(s), t)
            for i in range(d):
                for j in range(d):
                    lhs = Balg.mul_vec(ad_mu[t][i], ad_mu[s][j])
                    rhs = beta.matrix(s).apply(embedding.apply(F.basis_value(u, i, j)))
                    need("closure-identity", lhs == rhs,
                         {"t": g.label(t), "s": g.label(s), "a": i, "b": j})

    # (ii) mu(A) is an ideal of B
    ideal = is_ideal(muA, Balg)
    need("mu(A)-ideal", bool(ideal), ideal.witness)

    # (iii) Ad_t(mu(A)) ∩ mu(A) = mu(D[t])
    for t in range(n):
        lhs = beta.image(t, muA) & muA
        rhs = Subspace(dimB, (embedding.apply(v) for v in alpha.domains[t].basis))
        need("intersections", lhs == rhs, {"t": g.label(t)})

    span = Subspace.zero(dimB)
    for t in range(n):
        span = span + beta.image(t, muA)
    need("orbit-spans", span.dim == dimB, {"dim": span.dim})

    # (iv) trivial annihilator
    annB = annihilator(_ideal(Subspace.full(dimB)), Balg)
    need("trivial-annihilator", annB.dim == 0, vec_str(annB.basis[0]) if annB.dim else None)

    # (v) mu is an equivariant injective *-homomorphism alpha -> beta
    mrep = verify_morphism(embedding, alpha, beta)
    need("mu-equivariant", mrep.ok, mrep.failed_names())

    # (vi) the family is recovered from the envelope
    for t in range(n):
        for i in range(d):
            for j in range(d):
                prod = Balg.mul_vec(ad_mu[t][i], emb_cols[j])
                rec = mu_coords.coordinates(prod)
                need("family-recovery", rec is not None and rec == F.basis_value(t, i, j),
                     {"t": g.label(t), "a": i, "b": j})

    # restriction of beta to mu(A) is alpha, through mu, in both directions
    rho = restrict(beta, ideal)
    phi = DenseMatrix.from_columns([muA.coordinates(c) for c in emb_cols], d)
    fwd = verify_morphism(phi, alpha, rho)
    bwd = verify_morphism(inverse(phi), rho, alpha)
    need("restriction-isomorphic", fwd.ok and bwd.ok, fwd.failed_names() + bwd.failed_names())

    return EnvelopePair(alpha, F, mus, basis, Balg, beta, embedding, rep)


def envelope_restriction(pair: EnvelopePair) -> tuple[PartialAction, DenseMatrix]:
    """``restrict(beta, mu(A))`` together with the isomorphism alpha -> it."""
    cols = pair.embedding.columns()
    muA = Subspace(pair.dim, cols)
    rho = restrict(pair.action, is_ideal(muA, pair.algebra))
    phi = DenseMatrix.from_columns([muA.coordinates(c) for c in cols], pair.alpha.algebra.dim)
    return rho, phi


def recovered_family(pair: EnvelopePair) -> EnvFamily:
    """``mu^-1(beta_t(mu(a)) mu(b))`` on basis pairs."""
    alpha = pair.alpha
    g, d = alpha.group, alpha.algebra.dim
    cols = pair.embedding.columns()
    mu_coords = Basis(cols, pair.dim)
    tensors = []
    for t in range(g.order):
        T = []
        for i in range(d):
            bi = pair.action.matrix(t).apply(cols[i])
            T.append([mu_coords.coordinates(pair.algebra.mul_vec(bi, cols[j])) for j in range(d)])
        tensors.append(T)
    return EnvFamily(alpha, tensors)


# ---------------------------------------------------------------------------
# adjoint inclusions and classification


@dataclass
class AdjointInclusion:
    """``mu'(e_i) = pi(mu(e_i))`` for every basis element of A."""

    alpha: PartialAction
    multipliers: list
    report: Report = field(default_factory=Report)

    def __eq__(self, other):
        if not isinstance(other, AdjointInclusion):
            return NotImplemented
        return self.multipliers == other.multipliers


def adjoint_inclusion_of_pair(alpha: PartialAction, beta: PartialAction, embedding: DenseMatrix) -> AdjointInclusion:
    """Adjoint inclusion of an enveloping pair ``(mu, beta)`` given concretely.

    Slot r of ``mu'(a)`` acts by ``c -> mu^-1(beta_{r^-1}(mu a) mu c)`` on the
    left and ``c -> mu^-1(mu c beta_{r^-1}(mu a))`` on the right.
    """
    if not beta.is_global:
        raise ValueError("enveloping action must be global")
    g, A, B = alpha.group, alpha.algebra, beta.algebra
    d = A.dim
    if embedding.rows != B.dim or embedding.cols != d:
        raise ValueError("embedding has the wrong shape")
    cols = embedding.columns()
    coords = Basis(cols, B.dim)
    out = []
    for i in range(d):
        slots = []
        for r in range(g.order):
            b = beta.apply(g.inv(r), cols[i])
            Lc, Rc = [], []
            for j in range(d):
                lc = coords.coordinates(B.mul_vec(b, cols[j]))
                rc = coords.coordinates(B.mul_vec(cols[j], b))
                if lc is None or rc is None:
                    raise ValueError("mu(A) is not an ideal of the enveloping algebra")
                Lc.append(lc)
                Rc.append(rc)
            slots.append((DenseMatrix.from_columns(Lc, d).entries, DenseMatrix.from_columns(Rc, d).entries))
        out.append(GMultiplier(slots, d))
    return AdjointInclusion(alpha, out)


def _determination_check(alpha: PartialAction, mults: list, rep: Report):
    g, alg = alpha.group, alpha.algebra
    d = alg.dim
    e = [alg.basis_vec(i) for i in range(d)]
    name = "determination"
    rep.clause(name)
    for i, m in enumerate(mults):
        for r in range(g.order):
            ri = g.inv(r)
            L = m.slots[r][0]
            dom = alpha.domains[ri]
            for j in range(d):
                val = _mv(L, e[j])
                if not dom.contains(val):
                    rep.fail(name, {"a": i, "r": g.label(r), "f(r)": j, "part": "range"})
                    continue
                for dv in dom.basis:
                    lhs = alg.mul_vec(val, dv)
                    rhs = alpha.apply(ri, alg.mul_vec(e[i], alpha.apply(r, alg.mul_vec(e[j], dv))))
                    if lhs != rhs:
                        rep.fail(name, {"a": i, "r": g.label(r), "f(r)": j, "d": vec_str(dv), "part": "right"})
                    lhs = alg.mul_vec(dv, val)
                    rhs = alg.mul_vec(alpha.apply(ri, alg.mul_vec(alpha.apply(r, dv), e[i])), e[j])
                    if lhs != rhs:
                        rep.fail(name, {"a": i, "r": g.label(r), "f(r)": j, "d": vec_str(dv), "part": "left"})


def adjoint_inclusion(alpha: PartialAction, F: EnvFamily, validate: bool = True) -> AdjointInclusion:
    """Adjoint inclusion of the envelope built from ``F``.

    With ``validate`` the envelope is constructed, ``pi(mu(a))`` is computed
    through it and compared with ``mu(a)``; when every domain has trivial
    annihilator the identities that pin ``mu'`` down are also checked.
    Without ``validate`` the multipliers ``mu(a)`` are returned formally.
    """
    d = alpha.algebra.dim
    formal = [mu_multiplier(alpha, F, alpha.algebra.basis_vec(i), formal=True) for i in range(d)]
    if not validate:
        return AdjointInclusion(alpha, formal, Report("adjoint inclusion (formal)"))
    pair = globalize(alpha, F)
    incl = adjoint_inclusion_of_pair(alpha, pair.action, pair.embedding)
    rep = Report("adjoint inclusion")
    rep.check("equals-mu", incl.multipliers == formal)
    kernel_dim = d - Subspace(len(formal[0].flatten()), (m.flatten() for m in incl.multipliers)).dim
    rep.check("injective", kernel_dim == 0, {"kernel_dim": kernel_dim})
    _adjoint_pair_laws(alpha, incl.multipliers, rep)
    trivial = all(
        (annihilator(_ideal(D), alpha.algebra) & D).dim == 0 for D in alpha.domains
    )
    if trivial:
        _determination_check(alpha, incl.multipliers, rep)
    incl.report = rep
    return incl


def _adjoint_pair_laws(alpha: PartialAction, mults: list, rep: Report):
    """``mu'(A) ∩ Ad_t(mu'(A)) = mu'(D[t])`` in the flattened multiplier space."""
    g = alpha.group
    L = len(mults[0].flatten())
    base = Subspace(L, (m.flatten() for m in mults))
    rep.clause("adjoint-intersections")
    for t in range(g.order):
        moved = Subspace(L, (m.ad(t, g).flatten() for m in mults))
        images = []
        for v in alpha.domains[t].basis:
            acc = None
            for c, m in zip(v, mults):
                if c:
                    acc = m.scale(c) if acc is None else acc + m.scale(c)
            if acc is not None:
                images.append(acc.flatten())
        if (base & moved) != Subspace(L, images):
            rep.fail("adjoint-intersections", {"t": g.label(t)})


@dataclass
class Comparison:
    equal: bool
    witness: dict | None = None

    def __bool__(self):
        return self.equal


def _same_action(a: PartialAction, b: PartialAction) -> bool:
    return (a.group.table == b.group.table and a.algebra == b.algebra
            and a.domains == b.domains and a.maps == b.maps)


def compare_envelopes(p1: AdjointInclusion, p2: AdjointInclusion) -> Comparison:
    """Equal iff the adjoint inclusions agree entrywise."""
    if not _same_action(p1.alpha, p2.alpha):
        raise ValueError("adjoint inclusions of different partial actions")
    g = p1.alpha.group
    for i, (m1, m2) in enumerate(zip(p1.multipliers, p2.multipliers)):
        for r in range(g.order):
            for side, k in (("left", 0), ("right", 1)):
                A, B = m1.slots[r][k], m2.slots[r][k]
                if A != B:
                    p, q = next((p, q) for p in range(len(A)) for q in range(len(A[p])) if A[p][q] != B[p][q])
                    return Comparison(False, {"a": i, "r": g.label(r), "slot": side, "entry": [p, q],
                                              "values": [str(A[p][q]), str(B[p][q])]})
    return Comparison(True)


# ---------------------------------------------------------------------------
# decision procedure

UNITAL_JUSTIFICATION = (
    "the algebra is unital, so an enveloping action exists iff every domain ideal is unital"
)
WEAK_JUSTIFICATION = "no enveloping family found by this procedure"


@dataclass
class Decision:
    yes: bool
    pair: EnvelopePair | None = None
    reason: str = ""
    witness: dict | None = None
    justification: str = ""
    messages: list = field(default_factory=list)
    reports: dict = field(default_factory=dict)

    def __bool__(self):
        return self.yes


def decide_envelope(alpha: PartialAction) -> Decision:
    """Decide whether ``alpha`` has an enveloping action, constructing it if so."""
    _require_valid(alpha)
    unital = alpha.algebra.is_unital()
    fam = canonical_family(alpha)
    if isinstance(fam, FamilyFailure):
        just = UNITAL_JUSTIFICATION if unital and fam.missing_units else WEAK_JUSTIFICATION
        return Decision(False, reason=fam.reason, witness=fam.witness(alpha),
                        justification=just, messages=fam.describe(alpha))
    reports = {}
    for mode in ("algebraic", "star"):
        rep = check_family(alpha, fam, mode)
        reports[mode] = rep
        if not rep.ok:
            bad = rep.failures()[0]
            return Decision(False, reason="family axiom violation",
                            witness={"mode": mode, "axiom": bad.name, "witness": bad.witness},
                            justification=WEAK_JUSTIFICATION,
                            messages=[f"axiom {bad.name} fails ({mode} mode)"], reports=reports)
    fam.validated = reports["algebraic"].ok
    try:
        pair = globalize(alpha, fam)
    except GlobalizationError as err:
        return Decision(False, reason="globalization clause failure",
                        witness={"clause": err.clause, "witness": err.witness},
                        justification=WEAK_JUSTIFICATION,
                        messages=[f"globalization clause {err.clause} fails"], reports=reports)
    reports["globalization"] = pair.report
    return Decision(True, pair=pair, reports=reports,
                    messages=[f"enveloping action of dimension {pair.dim}"])


# ---------------------------------------------------------------------------
# unital identities and the norm estimate


def _units_or_raise(alpha: PartialAction) -> list:
    units = domain_units(alpha)
    missing = [alpha.group.label(t) for t, u in enumerate(units) if u is None]
    if missing:
        raise ValueError(f"domains without unit: {', '.join(missing)}")
    return units


def unital_identities_check(alpha: PartialAction) -> Report:
    """Exact identities between the domain units ``1_t``."""
    units = _units_or_raise(alpha)
    g, alg = alpha.group, alpha.algebra
    n, d = g.order, alg.dim
    e = [alg.basis_vec(i) for i in range(d)]
    rep = Report("unital identities")
    rep.clause("central")
    for t in range(n):
        for i in range(d):
            if alg.mul_vec(units[t], e[i]) != alg.mul_vec(e[i], units[t]):
                rep.fail("central", {"t": g.label(t), "basis": i})
    rep.clause("intersection-unit")
    rep.clause("sum-unit")
    rep.clause("translated-unit")
    for s in range(n):
        for t in range(n):
            p = alg.mul_vec(units[s], units[t])
            inter = alpha.domains[s] & alpha.domains[t]
            ok = inter.contains(p) and all(
                alg.mul_vec(p, v) == v == alg.mul_vec(v, p) for v in inter.basis)
            if not ok:
                rep.fail("intersection-unit", {"s": g.label(s), "t": g.label(t)})
            q = vsub(vadd(units[t], units[s]), p)
            summ = alpha.domains[t] + alpha.domains[s]
            ok = summ.contains(q) and all(
                alg.mul_vec(q, v) == v == alg.mul_vec(v, q) for v in summ.basis)
            if not ok:
                rep.fail("sum-unit", {"s": g.label(s), "t": g.label(t)})
            lhs = alpha.apply(t, alg.mul_vec(units[g.inv(t)], units[s]))
            rhs = alg.mul_vec(units[t], units[g.mul(t, s)])
            if lhs != rhs:
                rep.fail("translated-unit", {"s": g.label(s), "t": g.label(t)})
    return rep


@dataclass
class NormCheck:
    samples: int
    seed: int
    violations: int
    max_excess: float
    min_margin: float
    witness: dict | None = None

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        d = {"samples": self.samples, "seed": self.seed, "violations": self.violations,
             "max_excess": self.max_excess, "min_margin": self.min_margin, "slack": NORM_SLACK,
             "ok": self.ok}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


def norm_inequality_check(alpha: PartialAction, realization: BlockRealization,
                          samples: int = 1000, seed: int = 42, coeff_bound: int = 3) -> NormCheck:
    """Sample ``(a, r, t)`` and test

        ||alpha_rt(1_{(rt)^-1} a) - alpha_r(1_{r^-1} a)||^2
            <= 2 ||a|| (||a - alpha_{t^-1}(1_t a)|| + ||a - alpha_t(1_{t^-1} a)||)

    up to ``NORM_SLACK``. Elements have Gaussian-integer coefficients drawn
    from ``[-coeff_bound, coeff_bound]``; the differences are formed exactly
    and only the norms are evaluated in floating point.
    """
    units = _units_or_raise(alpha)
    if not realization.validated:
        vrep = realization.validate(alpha.algebra)
        if not vrep.ok:
            raise ValueError(f"invalid block realization: {vrep.failed_names()}")
    g, alg = alpha.group, alpha.algebra
    n, d = g.order, alg.dim
    rng = random.Random(seed)

    def shifted(t, a):
        return alpha.apply(t, alg.mul_vec(units[g.inv(t)], a))

    def norm(v):
        return cstar_norm(v, realization)

    violations = 0
    max_excess = 0.0
    min_margin = float("inf")
    witness = None
    for k in range(samples):
        a = tuple(GaussianRational(rng.randint(-coeff_bound, coeff_bound), rng.randint(-coeff_bound, coeff_bound))
                  for _ in range(d))
        r = rng.randrange(n)
        t = rng.randrange(n)
        rt = g.mul(r, t)
        lhs = norm(vsub(shifted(rt, a), shifted(r, a))) ** 2
        rhs = 2 * norm(a) * (norm(vsub(a, shifted(g.inv(t), a))) + norm(vsub(a, shifted(t, a))))
        margin = rhs - lhs
        min_margin = min(min_margin, margin)
        if lhs > rhs:
            max_excess = max(max_excess, lhs - rhs)
        if lhs > rhs + NORM_SLACK:
            violations += 1
            if witness is None:
                witness = {"sample": k, "a": vec_str(a), "r": g.label(r), "t": g.label(t)}
    if samples == 0:
        min_margin = 0.0
    return NormCheck(samples, seed, violations, max_excess, min_margin, witness)
