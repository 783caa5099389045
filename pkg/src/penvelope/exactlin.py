"""Exact Gaussian-rational scalars, dense matrices and subspaces.

Every identity checked elsewhere in the package is an equality, so the
arithmetic here never rounds. Subspaces are kept in reduced row-echelon
form, which makes subspace equality a literal comparison of basis rows.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "GaussianRational",
    "GQ",
    "DenseMatrix",
    "Subspace",
    "Echelon",
    "Basis",
    "inverse",
    "rref",
    "solve",
    "subspace_calculus",
    "parse_scalar",
    "ZERO",
    "ONE",
]


class GaussianRational:
    """An element ``re + im*i`` of Q(i), with both parts stored as Fraction.

    Instances are treated as immutable. ``Fraction`` keeps denominators
    positive and reduced after every operation.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            re, im = re.re, re.im + Fraction(im)
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> GaussianRational:
        z = object.__new__(cls)
        z.re = re
        z.im = im
        return z

    @staticmethod
    def coerce(x) -> GaussianRational:
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            return GaussianRational(Fraction(x.real), Fraction(x.imag))
        if isinstance(x, str):
            return parse_scalar(x)
        return GaussianRational(x)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return self.re == other.real and self.im == other.imag
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __add__(self, other):
        if not isinstance(other, GaussianRational):
            other = GaussianRational.coerce(other)
        return GaussianRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, GaussianRational):
            other = GaussianRational.coerce(other)
        return GaussianRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __mul__(self, other):
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b:
            if not d:
                return GaussianRational._raw(a * c, _F0)
            return GaussianRational._raw(a * c, a * d)
        if not d:
            return GaussianRational._raw(a * c, b * c)
        return GaussianRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def inverse(self) -> GaussianRational:
        if not self:
            raise ZeroDivisionError("inverse of zero")
        if not self.im:
            return GaussianRational._raw(1 / self.re, _F0)
        n = self.re * self.re + self.im * self.im
        return GaussianRational._raw(self.re / n, -self.im / n)

    def __truediv__(self, other):
        return self * GaussianRational.coerce(other).inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def conjugate(self) -> GaussianRational:
        if not self.im:
            return self
        return GaussianRational._raw(self.re, -self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GQ({str(self)!r})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if self.im == 1:
            im = "i"
        elif self.im == -1:
            im = "-i"
        else:
            im = f"{self.im}i"
        if not self.re:
            return im
        sign = "" if im.startswith("-") else "+"
        return f"{self.re}{sign}{im}"


GQ = GaussianRational
_F0 = Fraction(0)
ZERO = GaussianRational._raw(_F0, _F0)
ONE = GaussianRational._raw(Fraction(1), _F0)

_RAT = r"[+-]?\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^\s*(?:(?P<re>{_RAT})(?:\s*(?P<im>[+-]\s*(?:\d+(?:/\d+)?)?)\s*i)?"
    rf"|(?P<pure>[+-]?(?:\d+(?:/\d+)?)?)\s*i)\s*$"
)


def parse_scalar(text) -> GaussianRational:
    """Parse ``"p/q"``, ``"p/q+r/s i"``, ``"-i"``, ``"3/4i"`` or an int.

    Raises ValueError on malformed input, including zero denominators.
    """
    if isinstance(text, bool):
        raise ValueError(f"not a scalar: {text!r}")
    if isinstance(text, int):
        return GaussianRational(text)
    if not isinstance(text, str):
        raise ValueError(f"scalar must be a string or integer, got {text!r}")
    m = _SCALAR_RE.match(text)
    if m is None:
        raise ValueError(f"malformed scalar literal {text!r}")

    def rat(s: str) -> Fraction:
        s = s.replace(" ", "")
        if s in ("", "+"):
            return Fraction(1)
        if s == "-":
            return Fraction(-1)
        if "/" in s and int(s.split("/")[1]) == 0:
            raise ValueError(f"zero denominator in {text!r}")
        return Fraction(s)

    if m.group("re") is not None:
        re_part = rat(m.group("re"))
        im_part = rat(m.group("im")) if m.group("im") is not None else _F0
        return GaussianRational(re_part, im_part)
    return GaussianRational(0, rat(m.group("pure")))


def _vec(values: Iterable) -> tuple:
    return tuple(GaussianRational.coerce(v) for v in values)


class DenseMatrix:
    """A rows x cols grid of Gaussian rationals, row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence], cols: int | None = None):
        rows = tuple(_vec(r) for r in entries)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise ValueError("ragged matrix rows")
        self.rows = len(rows)
        self.cols = cols
        self.entries = rows

    @classmethod
    def _wrap(cls, rows: tuple, cols: int) -> DenseMatrix:
        m = object.__new__(cls)
        m.rows = len(rows)
        m.cols = cols
        m.entries = rows
        return m

    @classmethod
    def zeros(cls, rows: int, cols: int) -> DenseMatrix:
        return cls._wrap(tuple((ZERO,) * cols for _ in range(rows)), cols)

    @classmethod
    def identity(cls, n: int) -> DenseMatrix:
        return cls._wrap(
            tuple(tuple(ONE if i == j else ZERO for j in range(n)) for i in range(n)), n
        )

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], rows: int) -> DenseMatrix:
        cols = [tuple(c) for c in columns]
        return cls._wrap(tuple(tuple(c[i] for c in cols) for i in range(rows)), len(cols))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.cols)]

    def __eq__(self, other):
        if not isinstance(other, DenseMatrix):
            return NotImplemented
        return self.cols == other.cols and self.entries == other.entries

    def __hash__(self):
        return hash((self.cols, self.entries))

    def __repr__(self):
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.entries)
        return f"DenseMatrix([{body}])"

    def transpose(self) -> DenseMatrix:
        if not self.rows:
            return DenseMatrix._wrap(tuple(() for _ in range(self.cols)), 0)
        return DenseMatrix._wrap(tuple(zip(*self.entries)), self.rows)

    def conj(self) -> DenseMatrix:
        return DenseMatrix._wrap(
            tuple(tuple(x.conjugate() for x in r) for r in self.entries), self.cols
        )

    def __add__(self, other: DenseMatrix) -> DenseMatrix:
        return DenseMatrix._wrap(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)),
            self.cols,
        )

    def __sub__(self, other: DenseMatrix) -> DenseMatrix:
        return DenseMatrix._wrap(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)),
            self.cols,
        )

    def scale(self, c) -> DenseMatrix:
        c = GaussianRational.coerce(c)
        return DenseMatrix._wrap(tuple(tuple(c * x for x in r) for r in self.entries), self.cols)

    def __matmul__(self, other: DenseMatrix) -> DenseMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        return DenseMatrix._wrap(matmul_rows(self.entries, other.entries, other.cols), other.cols)

    def apply(self, v: Sequence) -> tuple:
        """Matrix times column vector."""
        if len(v) != self.cols:
            raise ValueError("vector length does not match matrix columns")
        return matvec(self.entries, v)

    def is_zero(self) -> bool:
        return not any(x for r in self.entries for x in r)


def matvec(rows: Sequence[Sequence], v: Sequence) -> tuple:
    nz = [(j, x) for j, x in enumerate(v) if x]
    out = []
    for r in rows:
        acc = ZERO
        for j, x in nz:
            a = r[j]
            if a:
                acc = acc + a * x
        out.append(acc)
    return tuple(out)


def matmul_rows(a: Sequence[Sequence], b: Sequence[Sequence], bcols: int) -> tuple:
    """Product of two row-tuple matrices, skipping zero entries."""
    bnz = [[(j, x) for j, x in enumerate(row) if x] for row in b]
    out = []
    for r in a:
        acc = [ZERO] * bcols
        for k, x in enumerate(r):
            if x:
                for j, y in bnz[k]:
                    acc[j] = acc[j] + x * y
        out.append(tuple(acc))
    return tuple(out)


def is_zero_vec(v: Sequence) -> bool:
    return not any(v)


def vadd(u: Sequence, v: Sequence) -> tuple:
    return tuple(a + b for a, b in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> tuple:
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, v: Sequence) -> tuple:
    if not c:
        return (ZERO,) * len(v)
    return tuple(c * x if x else ZERO for x in v)


def unit_vector(n: int, i: int) -> tuple:
    return tuple(ONE if k == i else ZERO for k in range(n))


def zero_vector(n: int) -> tuple:
    return (ZERO,) * n


class Echelon:
    """Incrementally maintained reduced row-echelon basis.

    Rows are stored sparsely as ``{column: value}`` with a leading 1 at the
    pivot. The basis stays fully reduced after every insertion, so the
    coordinates of any vector of the span are its entries at the pivots.
    """

    def __init__(self, ambient_dim: int):
        self.ambient_dim = ambient_dim
        self._rows: dict[int, dict[int, GaussianRational]] = {}

    def __len__(self):
        return len(self._rows)

    @property
    def pivots(self) -> list[int]:
        return sorted(self._rows)

    def _reduce(self, v: dict) -> dict:
        v = dict(v)
        for p in sorted(self._rows):
            c = v.get(p)
            if c:
                for j, x in self._rows[p].items():
                    y = v.get(j, ZERO) - c * x
                    if y:
                        v[j] = y
                    else:
                        v.pop(j, None)
        return v

    def reduce(self, v: Sequence) -> tuple:
        """Residual of ``v`` after elimination against the basis."""
        r = self._reduce({j: x for j, x in enumerate(v) if x})
        out = [ZERO] * self.ambient_dim
        for j, x in r.items():
            out[j] = x
        return tuple(out)

    def contains(self, v: Sequence) -> bool:
        return not self._reduce({j: x for j, x in enumerate(v) if x})

    def add(self, v: Sequence) -> bool:
        """Insert ``v``; return True if it enlarged the span."""
        if len(v) != self.ambient_dim:
            raise ValueError("vector length does not match ambient dimension")
        return self.add_sparse({j: x for j, x in enumerate(v) if x})

    def add_sparse(self, v: dict) -> bool:
        r = self._reduce(v)
        if not r:
            return False
        p = min(r)
        inv = r[p].inverse()
        r = {j: x * inv for j, x in r.items()}
        for q, row in self._rows.items():
            c = row.get(p)
            if c:
                for j, x in r.items():
                    y = row.get(j, ZERO) - c * x
                    if y:
                        row[j] = y
                    else:
                        row.pop(j, None)
        self._rows[p] = r
        return True

    def coordinates(self, v: Sequence) -> tuple:
        """Coordinates of ``v`` in the echelon basis (``v`` must lie in the span)."""
        return tuple(v[p] for p in self.pivots)

    def basis_rows(self) -> tuple:
        out = []
        for p in self.pivots:
            row = [ZERO] * self.ambient_dim
            for j, x in self._rows[p].items():
                row[j] = x
            out.append(tuple(row))
        return tuple(out)

    def subspace(self) -> Subspace:
        return Subspace._wrap(self.ambient_dim, self.basis_rows(), tuple(self.pivots))


def rref(m: DenseMatrix) -> tuple[DenseMatrix, int, list[int]]:
    """Reduced row-echelon form of ``m`` with rank and pivot columns.

    Zero rows are kept at the bottom so the shape of ``m`` is preserved.
    """
    ech = Echelon(m.cols)
    for r in m.entries:
        ech.add(r)
    rows = ech.basis_rows()
    rows = rows + tuple((ZERO,) * m.cols for _ in range(m.rows - len(rows)))
    return DenseMatrix._wrap(rows, m.cols), len(ech), ech.pivots


def solve(m: DenseMatrix, b: Sequence) -> tuple[tuple | None, Subspace]:
    """Solve ``m x = b``.

    Returns the particular solution with free variables set to zero (or
    None when the system is inconsistent) and the full kernel of ``m``.
    """
    b = _vec(b)
    if len(b) != m.rows:
        raise ValueError("right-hand side length does not match matrix rows")
    n = m.cols
    ech = Echelon(n + 1)
    for r, x in zip(m.entries, b):
        ech.add(r + (x,))
    pivots = ech.pivots
    rows = {p: ech._rows[p] for p in pivots}
    free = [j for j in range(n) if j not in rows]
    kernel = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for p, row in rows.items():
            if p < n:
                c = row.get(f)
                if c:
                    v[p] = -c
        kernel.append(v)
    null = Echelon(n)
    for v in kernel:
        null.add(v)
    if n in rows:
        return None, null.subspace()
    x = [ZERO] * n
    for p, row in rows.items():
        x[p] = row.get(n, ZERO)
    return tuple(x), null.subspace()


def kernel(columns: Sequence[Sequence], rows: int) -> Subspace:
    """Kernel of the matrix whose columns are given."""
    m = DenseMatrix.from_columns(columns, rows)
    return solve(m, zero_vector(rows))[1]


class Subspace:
    """A linear subspace of Q(i)^n stored by its canonical rref basis."""

    __slots__ = ("ambient_dim", "basis", "pivots")

    def __init__(self, ambient_dim: int, vectors: Iterable[Sequence] = ()):
        ech = Echelon(ambient_dim)
        for v in vectors:
            ech.add(_vec(v))
        self.ambient_dim = ambient_dim
        self.basis = ech.basis_rows()
        self.pivots = tuple(ech.pivots)

    @classmethod
    def _wrap(cls, ambient_dim: int, basis: tuple, pivots: tuple) -> Subspace:
        s = object.__new__(cls)
        s.ambient_dim = ambient_dim
        s.basis = basis
        s.pivots = pivots
        return s

    @classmethod
    def full(cls, n: int) -> Subspace:
        return cls._wrap(n, tuple(unit_vector(n, i) for i in range(n)), tuple(range(n)))

    @classmethod
    def zero(cls, n: int) -> Subspace:
        return cls._wrap(n, (), ())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> DenseMatrix:
        return DenseMatrix._wrap(self.basis, self.ambient_dim)

    def echelon(self) -> Echelon:
        ech = Echelon(self.ambient_dim)
        for p, row in zip(self.pivots, self.basis):
            ech._rows[p] = {j: x for j, x in enumerate(row) if x}
        return ech

    def contains(self, v: Sequence) -> bool:
        if len(v) != self.ambient_dim:
            raise ValueError("ambient dimension mismatch")
        return self.echelon().contains(v)

    __contains__ = contains

    def contains_space(self, other: Subspace) -> bool:
        self._check(other)
        ech = self.echelon()
        return all(ech.contains(v) for v in other.basis)

    def coordinates(self, v: Sequence) -> tuple:
        """Coordinates of a member ``v`` with respect to ``basis``."""
        return tuple(v[p] for p in self.pivots)

    def combine(self, coords: Sequence) -> tuple:
        out = zero_vector(self.ambient_dim)
        for c, b in zip(coords, self.basis):
            if c:
                out = vadd(out, vscale(c, b))
        return out

    def _check(self, other: Subspace):
        if self.ambient_dim != other.ambient_dim:
            raise ValueError(
                f"ambient dimension mismatch: {self.ambient_dim} vs {other.ambient_dim}"
            )

    def __add__(self, other: Subspace) -> Subspace:
        self._check(other)
        ech = self.echelon()
        for v in other.basis:
            ech.add(v)
        return ech.subspace()

    def __and__(self, other: Subspace) -> Subspace:
        """Intersection by the Zassenhaus construction.

        Rows ``(u | u)`` and ``(v | 0)`` are echelon-reduced; rows whose left
        half vanishes span the intersection in their right half.
        """
        self._check(other)
        n = self.ambient_dim
        if not self.basis or not other.basis:
            return Subspace.zero(n)
        ech = Echelon(2 * n)
        for u in self.basis:
            d = {j: x for j, x in enumerate(u) if x}
            d.update({n + j: x for j, x in enumerate(u) if x})
            ech.add_sparse(d)
        for v in other.basis:
            ech.add_sparse({j: x for j, x in enumerate(v) if x})
        out = Echelon(n)
        for p in ech.pivots:
            if p >= n:
                out.add_sparse({j - n: x for j, x in ech._rows[p].items()})
        return out.subspace()

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient_dim, self.basis))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"


class Basis:
    """Coordinates with respect to a fixed list of independent vectors.

    Built once as the echelon form of the rows ``v_i | e_i``; every pivot
    lies in the left part, so reducing ``x | 0`` leaves ``0 | -coords``.
    """

    def __init__(self, vectors: Sequence[Sequence], ambient_dim: int | None = None):
        vectors = [_vec(v) for v in vectors]
        if ambient_dim is None:
            ambient_dim = len(vectors[0]) if vectors else 0
        self.ambient_dim = ambient_dim
        self.size = len(vectors)
        self.vectors = vectors
        n, k = ambient_dim, len(vectors)
        self._ech = Echelon(n + k)
        for i, v in enumerate(vectors):
            d = {j: x for j, x in enumerate(v) if x}
            d[n + i] = ONE
            self._ech.add_sparse(d)
        if any(p >= n for p in self._ech.pivots):
            raise ValueError("basis vectors are linearly dependent")

    def coordinates(self, x: Sequence) -> tuple | None:
        """Coordinates of ``x``, or None if ``x`` is outside the span."""
        n = self.ambient_dim
        r = self._ech._reduce({j: v for j, v in enumerate(x) if v})
        if any(j < n for j in r):
            return None
        return tuple(-r.get(n + i, ZERO) for i in range(self.size))


def inverse(m: DenseMatrix) -> DenseMatrix:
    """Inverse of a square matrix; ValueError if singular."""
    if m.rows != m.cols:
        raise ValueError("inverse of a non-square matrix")
    b = Basis(m.columns(), m.rows)
    cols = [b.coordinates(unit_vector(m.rows, i)) for i in range(m.rows)]
    if any(c is None for c in cols):
        raise ValueError("matrix is singular")
    return DenseMatrix.from_columns(cols, m.rows)


def _annihilating_functionals(s: Subspace) -> list[tuple]:
    """Vectors f with sum_j f[j] v[j] = 0 for every v in s (bilinear pairing)."""
    n = s.ambient_dim
    free = [j for j in range(n) if j not in s.pivots]
    out = []
    for f in free:
        v = [ZERO] * n
        v[f] = ONE
        for p, row in zip(s.pivots, s.basis):
            c = row[f]
            if c:
                v[p] = -c
        out.append(tuple(v))
    return out


def subspace_calculus(u: Subspace, v: Subspace):
    """Sum, intersection and a membership predicate for ``u`` and ``v``.

    The predicate reports membership in (u, v) separately.
    """
    u._check(v)
    total = u + v
    inter = u & v

    def member(x):
        return u.contains(x), v.contains(x)

    return total, inter, member
