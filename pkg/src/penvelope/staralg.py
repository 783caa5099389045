"""Finite-dimensional *-algebras given by structure constants.

An algebra with basis ``e_0 .. e_{n-1}`` is described by the table
``c[i][j][k]`` (``e_i e_j = sum_k c[i][j][k] e_k``) and the involution
table ``s[i][j]`` (``e_i* = sum_j s[i][j] e_j``, extended
conjugate-linearly). Elements are plain coefficient tuples internally;
:class:`Element` wraps one together with its algebra for the public API.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exactlin import (
    ONE,
    ZERO,
    DenseMatrix,
    GaussianRational,
    Subspace,
    kernel,
    solve,
    unit_vector,
    vadd,
    vscale,
    zero_vector,
)
from .report import Report

NORM_TOL = 1e-9


class StarAlgebra:
    def __init__(self, structconst, involution, names: Sequence[str] | None = None):
        dim = len(structconst)
        table = []
        for i, row in enumerate(structconst):
            if len(row) != dim:
                raise ValueError(f"structure constants: row {i} has {len(row)} entries, expected {dim}")
            trow = []
            for j, vec in enumerate(row):
                if len(vec) != dim:
                    raise ValueError(f"structure constants: c[{i}][{j}] has length {len(vec)}, expected {dim}")
                trow.append(tuple(GaussianRational.coerce(x) for x in vec))
            table.append(tuple(trow))
        inv = DenseMatrix(involution) if not isinstance(involution, DenseMatrix) else involution
        if inv.rows != dim or inv.cols != dim:
            raise ValueError(f"involution must be {dim}x{dim}, got {inv.rows}x{inv.cols}")
        self.dim = dim
        self.structconst = tuple(table)
        self.involution = inv
        self.names = tuple(names) if names is not None else tuple(f"e{i}" for i in range(dim))
        if len(self.names) != dim:
            raise ValueError("basis names do not match dimension")
        self._sparse = [
            [[(k, x) for k, x in enumerate(self.structconst[i][j]) if x] for j in range(dim)]
            for i in range(dim)
        ]
        self._star_rows = [[(j, x) for j, x in enumerate(inv.row(i)) if x] for i in range(dim)]

    def __repr__(self):
        return f"StarAlgebra(dim={self.dim})"

    def __eq__(self, other):
        if not isinstance(other, StarAlgebra):
            return NotImplemented
        return self.structconst == other.structconst and self.involution == other.involution

    def __hash__(self):
        return hash((self.structconst, self.involution))

    # coefficient-level operations

    def mul_vec(self, u: Sequence, v: Sequence) -> tuple:
        out = [ZERO] * self.dim
        vnz = [(j, y) for j, y in enumerate(v) if y]
        for i, x in enumerate(u):
            if not x:
                continue
            row = self._sparse[i]
            for j, y in vnz:
                xy = x * y
                for k, c in row[j]:
                    out[k] = out[k] + xy * c
        return tuple(out)

    def star_vec(self, u: Sequence) -> tuple:
        out = [ZERO] * self.dim
        for i, x in enumerate(u):
            if not x:
                continue
            xc = x.conjugate()
            for j, s in self._star_rows[i]:
                out[j] = out[j] + xc * s
        return tuple(out)

    def basis_vec(self, i: int) -> tuple:
        return unit_vector(self.dim, i)

    def zero_vec(self) -> tuple:
        return zero_vector(self.dim)

    def left_matrix(self, u: Sequence) -> DenseMatrix:
        """Matrix of ``x -> u x``."""
        return DenseMatrix.from_columns([self.mul_vec(u, self.basis_vec(j)) for j in range(self.dim)], self.dim)

    def right_matrix(self, u: Sequence) -> DenseMatrix:
        """Matrix of ``x -> x u``."""
        return DenseMatrix.from_columns([self.mul_vec(self.basis_vec(j), u) for j in range(self.dim)], self.dim)

    # element API

    def element(self, coeffs: Sequence) -> Element:
        coeffs = tuple(GaussianRational.coerce(x) for x in coeffs)
        if len(coeffs) != self.dim:
            raise ValueError(f"element needs {self.dim} coefficients, got {len(coeffs)}")
        return Element(self, coeffs)

    def basis(self) -> list[Element]:
        return [Element(self, self.basis_vec(i)) for i in range(self.dim)]

    def zero(self) -> Element:
        return Element(self, self.zero_vec())

    def unit(self) -> Element | None:
        return unit_of(Ideal(Subspace.full(self.dim), True), self)

    def is_unital(self) -> bool:
        return self.unit() is not None

    def format_vec(self, v: Sequence) -> str:
        terms = []
        for x, name in zip(v, self.names):
            if not x:
                continue
            if x == ONE:
                terms.append(name)
            elif x == -ONE:
                terms.append(f"-{name}")
            else:
                terms.append(f"({x}){name}")
        return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class Element:
    algebra: StarAlgebra = field(repr=False, compare=False)
    coeffs: tuple

    def _same(self, other: Element):
        if not isinstance(other, Element):
            raise TypeError("expected an Element")
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise ValueError("elements belong to different algebras")

    def __mul__(self, other):
        if isinstance(other, Element):
            self._same(other)
            return Element(self.algebra, self.algebra.mul_vec(self.coeffs, other.coeffs))
        return Element(self.algebra, vscale(GaussianRational.coerce(other), self.coeffs))

    def __rmul__(self, scalar):
        return Element(self.algebra, vscale(GaussianRational.coerce(scalar), self.coeffs))

    def __add__(self, other: Element):
        self._same(other)
        return Element(self.algebra, vadd(self.coeffs, other.coeffs))

    def __sub__(self, other: Element):
        self._same(other)
        return Element(self.algebra, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return Element(self.algebra, tuple(-a for a in self.coeffs))

    def star(self) -> Element:
        return Element(self.algebra, self.algebra.star_vec(self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __str__(self):
        return self.algebra.format_vec(self.coeffs)


def mul(a: Element, b: Element) -> Element:
    return a * b


def star(a: Element) -> Element:
    return a.star()


def check_algebra(alg: StarAlgebra) -> Report:
    """Exhaustively check associativity and the involution laws.

    Both sides of each identity are bilinear (resp. conjugate-bilinear), so
    checking basis tuples is a complete test.
    """
    rep = Report("algebra")
    n = alg.dim
    e = [alg.basis_vec(i) for i in range(n)]
    prods = [[alg.mul_vec(e[i], e[j]) for j in range(n)] for i in range(n)]
    rep.clause("associativity")
    for i in range(n):
        for j in range(n):
            for k in range(n):
                lhs = alg.mul_vec(prods[i][j], e[k])
                rhs = alg.mul_vec(e[i], prods[j][k])
                if lhs != rhs:
                    m = next(m for m in range(n) if lhs[m] != rhs[m])
                    rep.fail("associativity", [i, j, k, m])
    stars = [alg.star_vec(e[i]) for i in range(n)]
    rep.clause("involutive")
    for i in range(n):
        if alg.star_vec(stars[i]) != e[i]:
            rep.fail("involutive", [i])
    rep.clause("anti-multiplicative")
    for i in range(n):
        for j in range(n):
            if alg.star_vec(prods[i][j]) != alg.mul_vec(stars[j], stars[i]):
                rep.fail("anti-multiplicative", [i, j])
    return rep


@dataclass(frozen=True)
class Ideal:
    space: Subspace
    verified: bool = False
    witness: tuple | None = None

    def __bool__(self):
        return self.verified

    @property
    def dim(self) -> int:
        return self.space.dim


def is_ideal(space: Subspace, alg: StarAlgebra) -> Ideal:
    """Check ``A*I`` and ``I*A`` lie in ``space``.

    On failure the returned Ideal is unverified and carries the witness
    ``(side, i, k)``: the product of ``e_i`` with basis vector ``k`` of the
    space (on the given side) falls outside it.
    """
    if space.ambient_dim != alg.dim:
        raise ValueError("subspace ambient dimension does not match algebra")
    ech = space.echelon()
    for i in range(alg.dim):
        ei = alg.basis_vec(i)
        for k, v in enumerate(space.basis):
            if not ech.contains(alg.mul_vec(ei, v)):
                return Ideal(space, False, ("left", i, k))
            if not ech.contains(alg.mul_vec(v, ei)):
                return Ideal(space, False, ("right", i, k))
    return Ideal(space, True)


def _require(ideal: Ideal):
    if not ideal.verified:
        raise ValueError("ideal has not been verified")


def annihilator(ideal: Ideal, alg: StarAlgebra) -> Subspace:
    """``{a in A : ab = ba = 0 for all b in I}`` as an exact kernel."""
    _require(ideal)
    n = alg.dim
    if not ideal.space.basis:
        return Subspace.full(n)
    cols = []
    for k in range(n):
        ek = alg.basis_vec(k)
        col = []
        for b in ideal.space.basis:
            col.extend(alg.mul_vec(ek, b))
            col.extend(alg.mul_vec(b, ek))
        cols.append(tuple(col))
    return kernel(cols, 2 * n * ideal.dim)


def unit_of(ideal: Ideal, alg: StarAlgebra) -> Element | None:
    """Two-sided unit of the ideal, or None when it has none.

    A returned unit is checked to be central in the whole algebra.
    """
    _require(ideal)
    basis = ideal.space.basis
    n = alg.dim
    if not basis:
        return Element(alg, alg.zero_vec())
    cols = [[] for _ in basis]
    rhs = []
    for b in basis:
        for k, u in enumerate(basis):
            cols[k].extend(alg.mul_vec(u, b))
        rhs.extend(b)
        for k, u in enumerate(basis):
            cols[k].extend(alg.mul_vec(b, u))
        rhs.extend(b)
    coords, null = solve(DenseMatrix.from_columns(cols, len(rhs)), rhs)
    if coords is None:
        return None
    if null.dim:
        raise AssertionError("two-sided unit of an ideal must be unique")
    u = ideal.space.combine(coords)
    for j in range(n):
        ej = alg.basis_vec(j)
        if alg.mul_vec(u, ej) != alg.mul_vec(ej, u):
            raise AssertionError(f"unit of ideal fails to commute with basis element {j}")
    return Element(alg, u)


@dataclass(frozen=True)
class MultiplierPair:
    """Multiplier ``(L, R)`` acting on coordinates of an ideal's basis."""

    left: DenseMatrix
    right: DenseMatrix

    def is_zero(self) -> bool:
        return self.left.is_zero() and self.right.is_zero()

    def __matmul__(self, other: MultiplierPair) -> MultiplierPair:
        return MultiplierPair(self.left @ other.left, other.right @ self.right)

    def is_multiplier(self, ideal: Ideal, alg: StarAlgebra) -> bool:
        basis = ideal.space.basis
        sp = ideal.space

        def L(v):
            return sp.combine(self.left.apply(sp.coordinates(v)))

        def R(v):
            return sp.combine(self.right.apply(sp.coordinates(v)))

        for a in basis:
            for b in basis:
                ab = alg.mul_vec(a, b)
                if L(ab) != alg.mul_vec(L(a), b):
                    return False
                if R(ab) != alg.mul_vec(a, R(b)):
                    return False
                if alg.mul_vec(a, L(b)) != alg.mul_vec(R(a), b):
                    return False
        return True


def canonical_multiplier(a: Element, ideal: Ideal) -> MultiplierPair:
    """``phi(a)``: left and right multiplication by ``a`` restricted to the ideal."""
    _require(ideal)
    alg = a.algebra
    sp = ideal.space
    left = [sp.coordinates(alg.mul_vec(a.coeffs, b)) for b in sp.basis]
    right = [sp.coordinates(alg.mul_vec(b, a.coeffs)) for b in sp.basis]
    return MultiplierPair(
        DenseMatrix.from_columns(left, sp.dim), DenseMatrix.from_columns(right, sp.dim)
    )


# Block realizations and C*-norms


class BlockRealization:
    """A *-homomorphism into a direct sum of matrix algebras, in floats.

    ``images[i][b]`` is the complex matrix of basis element ``e_i`` in
    block ``b``. Norms are only available after :meth:`validate` succeeds.
    """

    def __init__(self, block_sizes: Sequence[int], images):
        self.block_sizes = tuple(int(n) for n in block_sizes)
        self.images = [
            [np.asarray(m, dtype=complex).reshape(n, n) for m, n in zip(per, self.block_sizes)]
            for per in images
        ]
        for per in self.images:
            if len(per) != len(self.block_sizes):
                raise ValueError("each basis image needs one matrix per block")
        self.validated = False
        self._flat = None

    def realize(self, coeffs: Sequence) -> list[np.ndarray]:
        c = np.array([complex(x) for x in coeffs])
        return [sum(ci * per[b] for ci, per in zip(c, self.images)) + np.zeros((n, n), complex)
                for b, n in enumerate(self.block_sizes)]

    def restrict(self, vectors: Sequence[Sequence]) -> BlockRealization:
        """The realization of the subalgebra whose basis is ``vectors``."""
        return BlockRealization(self.block_sizes, [self.realize(v) for v in vectors])

    def validate(self, alg: StarAlgebra, tol: float = NORM_TOL) -> Report:
        rep = Report("realization")
        n = alg.dim
        rep.check("shape", len(self.images) == n, witness=len(self.images))
        if len(self.images) != n:
            return rep
        rep.clause("multiplicative")
        for i in range(n):
            for j in range(n):
                lhs = [x @ y for x, y in zip(self.images[i], self.images[j])]
                rhs = self.realize(alg.mul_vec(alg.basis_vec(i), alg.basis_vec(j)))
                if any(np.max(np.abs(x - y), initial=0.0) > tol for x, y in zip(lhs, rhs)):
                    rep.fail("multiplicative", [i, j])
        rep.clause("star-preserving")
        for i in range(n):
            rhs = self.realize(alg.star_vec(alg.basis_vec(i)))
            if any(np.max(np.abs(x.conj().T - y), initial=0.0) > tol for x, y in zip(self.images[i], rhs)):
                rep.fail("star-preserving", [i])
        flat = np.array([np.concatenate([m.ravel() for m in per]) for per in self.images])
        rank = np.linalg.matrix_rank(flat, tol=tol) if flat.size else 0
        rep.check("injective", rank == n, witness=int(rank))
        self.validated = rep.ok
        return rep


def cstar_norm(a: Element | Sequence, r: BlockRealization) -> float:
    """Largest singular value over the blocks of the realized element."""
    if not r.validated:
        raise ValueError("block realization has not been validated")
    coeffs = a.coeffs if isinstance(a, Element) else a
    return max((float(np.linalg.norm(m, 2)) for m in r.realize(coeffs) if m.size), default=0.0)


# Named constructions


def diagonal_algebra(n: int) -> StarAlgebra:
    """C^n with pointwise product and conjugation."""
    c = [[[ONE if i == j == k else ZERO for k in range(n)] for j in range(n)] for i in range(n)]
    return StarAlgebra(c, DenseMatrix.identity(n), [f"d{i}" for i in range(n)])


def truncated_polynomial(n: int) -> StarAlgebra:
    """C[x]/(x^n) with basis 1, x, .., x^(n-1) and x* = x."""
    c = [[[ONE if k == i + j else ZERO for k in range(n)] for j in range(n)] for i in range(n)]
    names = ["1", "x"] + [f"x^{k}" for k in range(2, n)]
    return StarAlgebra(c, DenseMatrix.identity(n), names[:n])


def _block_offsets(sizes: Sequence[int]) -> list[int]:
    offs, o = [], 0
    for s in sizes:
        offs.append(o)
        o += s * s
    return offs


def matrix_blocks(sizes: Sequence[int]) -> StarAlgebra:
    """Direct sum of full matrix algebras M_n, basis of matrix units.

    Block ``b`` of size ``n`` contributes ``E^b_{pq}`` at index
    ``offset_b + p*n + q``; ``(E_pq)* = E_qp``.
    """
    offs = _block_offsets(sizes)
    dim = sum(s * s for s in sizes)
    c = [[[ZERO] * dim for _ in range(dim)] for _ in range(dim)]
    s = [[ZERO] * dim for _ in range(dim)]
    names = []
    for b, (n, o) in enumerate(zip(sizes, offs)):
        for p in range(n):
            for q in range(n):
                names.append(f"E{b}[{p}{q}]" if n > 1 else f"E{b}")
                s[o + p * n + q][o + q * n + p] = ONE
                for r in range(n):
                    c[o + p * n + q][o + q * n + r][o + p * n + r] = ONE
    return StarAlgebra(c, s, names)


def natural_realization(sizes: Sequence[int]) -> BlockRealization:
    """The identity realization of :func:`matrix_blocks` (or of C^n with sizes all 1)."""
    images = []
    for b, n in enumerate(sizes):
        for p in range(n):
            for q in range(n):
                per = [np.zeros((m, m), complex) for m in sizes]
                per[b][p, q] = 1.0
                images.append(per)
    return BlockRealization(sizes, images)


def block_matrix_coeffs(sizes: Sequence[int], blocks: Sequence[Sequence[Sequence]]) -> tuple:
    """Coefficients in :func:`matrix_blocks` of the block-diagonal element ``blocks``."""
    out = []
    for n, m in zip(sizes, blocks):
        for p in range(n):
            for q in range(n):
                out.append(GaussianRational.coerce(m[p][q]))
    return tuple(out)


def canonical_map_kernel(ideal: Ideal, alg: StarAlgebra) -> Subspace:
    """Kernel of ``a -> phi(a)`` computed from basis multipliers.

    It is asserted to coincide with :func:`annihilator`.
    """
    _require(ideal)
    sp = ideal.space
    cols = []
    for k in range(alg.dim):
        m = canonical_multiplier(alg.basis()[k], ideal)
        cols.append(tuple(x for row in m.left.entries + m.right.entries for x in row))
    ker = kernel(cols, 2 * sp.dim * sp.dim) if sp.dim else Subspace.full(alg.dim)
    if ker != annihilator(ideal, alg):
        raise AssertionError("kernel of the canonical map differs from the annihilator")
    return ker
