"""Finite groups materialized as Cayley tables."""

from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from typing import Sequence

from .report import Report

DEFAULT_ORDER_BOUND = 64


@dataclass(frozen=True)
class Group:
    """``table[a][b]`` is the index of ``a*b``."""

    table: tuple
    identity: int
    inverse: tuple
    labels: tuple
    name: str = ""

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    @property
    def elements(self) -> range:
        return range(self.order)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown group element {label!r}") from None

    def label(self, a: int) -> str:
        return self.labels[a]

    def is_abelian(self) -> bool:
        return noncommuting_pair(self) is None


def from_table(table: Sequence[Sequence[int]], labels: Sequence[str] | None = None, name: str = "") -> Group:
    """Build a Group from a raw table, locating identity and inverses.

    Raises ValueError if the table is malformed or has no identity/inverses;
    associativity is left to :func:`check_group`.
    """
    n = len(table)
    if n == 0:
        raise ValueError("empty group table")
    rows = []
    for a, row in enumerate(table):
        if len(row) != n:
            raise ValueError(f"group table row {a} has {len(row)} entries, expected {n}")
        for x in row:
            if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < n:
                raise ValueError(f"group table entry {x!r} out of range in row {a}")
        rows.append(tuple(row))
    ident = next((e for e in range(n) if all(rows[e][a] == a == rows[a][e] for a in range(n))), None)
    if ident is None:
        raise ValueError("group table has no identity")
    inverse = []
    for a in range(n):
        b = next((b for b in range(n) if rows[a][b] == ident == rows[b][a]), None)
        if b is None:
            raise ValueError(f"element {a} has no inverse")
        inverse.append(b)
    if labels is None:
        labels = [str(a) for a in range(n)]
    if len(labels) != n or len(set(labels)) != n:
        raise ValueError("group labels must be distinct and one per element")
    return Group(tuple(rows), ident, tuple(inverse), tuple(labels), name)


def check_group(g: Group) -> Report:
    rep = Report("group")
    n = g.order
    t = g.table
    rep.clause("associativity")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                if t[t[a][b]][c] != t[a][t[b][c]]:
                    rep.fail("associativity", [a, b, c])
    rep.clause("identity")
    for a in range(n):
        if not (t[g.identity][a] == a == t[a][g.identity]):
            rep.fail("identity", [a])
    rep.clause("inverse")
    for a in range(n):
        if not (t[a][g.inverse[a]] == g.identity == t[g.inverse[a]][a]):
            rep.fail("inverse", [a])
    return rep


def noncommuting_pair(g: Group) -> tuple[int, int] | None:
    for a in range(g.order):
        for b in range(a + 1, g.order):
            if g.table[a][b] != g.table[b][a]:
                return a, b
    return None


def _from_elements(elements: list, op, labels: list[str], name: str) -> Group:
    pos = {x: i for i, x in enumerate(elements)}
    table = [[pos[op(x, y)] for y in elements] for x in elements]
    return from_table(table, labels, name)


def cyclic(n: int) -> Group:
    if n < 1:
        raise ValueError("cyclic group order must be positive")
    labels = ["e", "g"] + [f"g^{k}" for k in range(2, n)]
    return _from_elements(list(range(n)), lambda a, b: (a + b) % n, labels[:n], f"cyclic({n})")


def _perm_label(p: tuple) -> str:
    if all(i == x for i, x in enumerate(p)):
        return "e"
    return "[" + "".join(str(x) for x in p) + "]"


def symmetric(n: int) -> Group:
    perms = sorted(itertools.permutations(range(n)))
    return _from_elements(
        perms,
        lambda p, q: tuple(p[q[i]] for i in range(n)),
        [_perm_label(p) for p in perms],
        f"symmetric({n})",
    )


def dihedral(n: int) -> Group:
    """Symmetries of the regular n-gon (order 2n): ``r^k s^f`` as ``(k, f)``."""
    if n < 2:
        raise ValueError("dihedral(n) needs n >= 2")
    elements = [(k, f) for f in (0, 1) for k in range(n)]

    def op(x, y):
        k1, f1 = x
        k2, f2 = y
        return ((k1 + (-k2 if f1 else k2)) % n, f1 ^ f2)

    def lab(x):
        k, f = x
        if (k, f) == (0, 0):
            return "e"
        r = "" if k == 0 else ("r" if k == 1 else f"r^{k}")
        return r + ("s" if f else "")

    return _from_elements(elements, op, [lab(x) for x in elements], f"dihedral({n})")


def direct_product(g: Group, h: Group) -> Group:
    elements = [(a, b) for a in range(g.order) for b in range(h.order)]

    def lab(x):
        a, b = x
        if a == g.identity and b == h.identity:
            return "e"
        return f"({g.labels[a]},{h.labels[b]})"

    return _from_elements(
        elements,
        lambda x, y: (g.table[x[0]][y[0]], h.table[x[1]][y[1]]),
        [lab(x) for x in elements],
        f"{g.name}x{h.name}",
    )


_FACTOR_RE = re.compile(r"^\s*(cyclic|symmetric|dihedral)\s*\(\s*(\d+)\s*\)\s*$")
_ORDERS = {
    "cyclic": lambda n: n,
    "symmetric": lambda n: _factorial(n),
    "dihedral": lambda n: 2 * n,
}
_BUILDERS = {"cyclic": cyclic, "symmetric": symmetric, "dihedral": dihedral}


def _factorial(n: int) -> int:
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def build(name: str, order_bound: int = DEFAULT_ORDER_BOUND) -> Group:
    """Build a group from a name like ``cyclic(4)`` or ``cyclic(2)xsymmetric(3)``.

    Factors are joined by ``x`` (or ``×``). Raises ValueError for unknown
    names and when the order exceeds ``order_bound``.
    """
    factors = re.split(r"\s*[x×]\s*(?=[a-z])", name.strip())
    parsed = []
    order = 1
    for f in factors:
        m = _FACTOR_RE.match(f)
        if m is None:
            raise ValueError(f"unknown group name {f!r}")
        kind, n = m.group(1), int(m.group(2))
        if kind == "dihedral" and n < 2 or kind == "cyclic" and n < 1:
            raise ValueError(f"invalid parameter in {f!r}")
        order *= _ORDERS[kind](n)
        if order > order_bound:
            raise ValueError(f"group {name!r} exceeds order bound {order_bound}")
        parsed.append((kind, n))
    g = _BUILDERS[parsed[0][0]](parsed[0][1])
    for kind, n in parsed[1:]:
        g = direct_product(g, _BUILDERS[kind](n))
    return g


# homomorphisms, used by the randomized corpus


def generators(g: Group) -> list[int]:
    """A small generating set, chosen greedily in index order."""
    gens: list[int] = []
    span = {g.identity}
    for a in range(g.order):
        if a not in span:
            gens.append(a)
            span = _closure(g, gens)
    return gens


def _closure(g: Group, gens: Sequence[int]) -> set[int]:
    seen = {g.identity}
    frontier = [g.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s in gens:
                y = g.table[x][s]
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def extend_homomorphism(g: Group, h: Group, images: dict[int, int]) -> list[int] | None:
    """Extend generator images to a homomorphism g -> h, or None if impossible."""
    phi = {g.identity: h.identity}
    frontier = [g.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s, hs in images.items():
                y = g.table[x][s]
                hy = h.table[phi[x]][hs]
                if y in phi:
                    if phi[y] != hy:
                        return None
                else:
                    phi[y] = hy
                    nxt.append(y)
        frontier = nxt
    if len(phi) != g.order:
        return None
    hom = [phi[a] for a in range(g.order)]
    for a in range(g.order):
        for b in range(g.order):
            if hom[g.table[a][b]] != h.table[hom[a]][hom[b]]:
                return None
    return hom


def homomorphisms(g: Group, h: Group) -> list[list[int]]:
    gens = generators(g)
    out = []
    for imgs in itertools.product(range(h.order), repeat=len(gens)):
        hom = extend_homomorphism(g, h, dict(zip(gens, imgs)))
        if hom is not None:
            out.append(hom)
    return out


def random_homomorphism(g: Group, h: Group, rng: random.Random, tries: int = 200) -> list[int]:
    """A random homomorphism found by sampling generator images (trivial as fallback)."""
    gens = generators(g)
    for _ in range(tries):
        hom = extend_homomorphism(g, h, {s: rng.randrange(h.order) for s in gens})
        if hom is not None:
            return hom
    return [h.identity] * g.order
