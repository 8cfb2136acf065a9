"""Exact rational linear algebra.

Everything here works over :class:`fractions.Fraction`; no floats are
accepted.  Points are :class:`RatVec` (an immutable tuple of fractions),
affine subspaces are :class:`AffineSubspace` with a canonical (reduced row
echelon) direction basis, and convex membership is decided by an exact
phase-one simplex with Bland's rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence


class UsageError(ValueError):
    """Raised on malformed input (empty point lists, dimension mismatch)."""


def rat(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: geometry must stay exact.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def rat_to_str(x: Fraction) -> str:
    x = rat(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class RatVec(tuple):
    """Immutable vector of Fractions with componentwise arithmetic.

    ``+`` and ``-`` are vector operations, not tuple concatenation.
    Ordering is lexicographic, which gives canonical vertex lists.
    """

    __slots__ = ()

    def __new__(cls, coords: Iterable = ()):
        return super().__new__(cls, (rat(c) for c in coords))

    @classmethod
    def zeros(cls, n: int) -> "RatVec":
        return cls([0] * n)

    @classmethod
    def unit(cls, n: int, i: int) -> "RatVec":
        return cls([1 if j == i else 0 for j in range(n)])

    @property
    def ambient_dim(self) -> int:
        return len(self)

    def __add__(self, other):
        _check_same_dim(self, other)
        return RatVec(a + b for a, b in zip(self, other))

    def __sub__(self, other):
        _check_same_dim(self, other)
        return RatVec(a - b for a, b in zip(self, other))

    def __neg__(self):
        return RatVec(-a for a in self)

    def __mul__(self, c):
        c = rat(c)
        return RatVec(c * a for a in self)

    __rmul__ = __mul__

    def __getitem__(self, item):
        out = super().__getitem__(item)
        if isinstance(item, slice):
            return RatVec(out)
        return out

    def dot(self, other) -> Fraction:
        _check_same_dim(self, other)
        return sum((a * b for a, b in zip(self, other)), Fraction(0))

    def concat(self, other) -> "RatVec":
        return RatVec(tuple(self) + tuple(other))

    def to_json(self) -> list[str]:
        return [rat_to_str(c) for c in self]

    @classmethod
    def from_json(cls, data: Sequence) -> "RatVec":
        return cls(data)

    def to_floats(self) -> tuple[float, ...]:
        return tuple(float(c) for c in self)

    def __repr__(self):
        return "RatVec(" + ", ".join(rat_to_str(c) for c in self) + ")"


def _check_same_dim(a, b):
    if len(a) != len(b):
        raise UsageError(f"dimension mismatch: {len(a)} vs {len(b)}")


def rv(*coords) -> RatVec:
    """Shorthand: ``rv(0, "1/2", 2)``."""
    return RatVec(coords)


# ---------------------------------------------------------------------------
# row reduction


def rref(rows: Sequence[Sequence[Fraction]], ncols: int | None = None):
    """Reduced row echelon form over Q.

    Returns ``(reduced_rows, pivot_columns)`` with zero rows dropped.
    """
    m = [list(map(rat, r)) for r in rows]
    if ncols is None:
        ncols = len(m[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        if piv != 1:
            m[r] = [x / piv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(vectors: Sequence[Sequence]) -> int:
    if not vectors:
        return 0
    return len(rref(vectors)[1])


def solve_linear(columns: Sequence[Sequence], rhs: Sequence):
    """Solve ``sum_j x_j * columns[j] = rhs`` exactly.

    Returns ``(particular, nullspace_basis)`` or ``None`` if inconsistent.
    """
    n = len(rhs)
    k = len(columns)
    aug = [[rat(columns[j][i]) for j in range(k)] + [rat(rhs[i])] for i in range(n)]
    red, piv = rref(aug, k + 1)
    if k in piv:
        return None
    x = [Fraction(0)] * k
    for row, c in zip(red, piv):
        x[c] = row[k]
    free = [j for j in range(k) if j not in piv]
    null = []
    for f in free:
        v = [Fraction(0)] * k
        v[f] = Fraction(1)
        for row, c in zip(red, piv):
            v[c] = -row[f]
        null.append(v)
    return x, null


# ---------------------------------------------------------------------------
# affine subspaces


@dataclass(frozen=True)
class AffineSubspace:
    """``base + span(basis)`` with a canonical basis.

    The basis is kept in reduced row echelon form and the base point is
    reduced modulo the span, so two equal subspaces compare equal.
    """

    base: RatVec
    basis: tuple[RatVec, ...]

    @classmethod
    def make(cls, base, directions=()) -> "AffineSubspace":
        base = RatVec(base)
        dirs = [RatVec(d) for d in directions]
        for d in dirs:
            _check_same_dim(base, d)
        red, piv = rref(dirs, len(base)) if dirs else ([], [])
        basis = tuple(RatVec(r) for r in red)
        # canonical base: eliminate pivot coordinates
        b = list(base)
        for row, c in zip(basis, piv):
            if b[c] != 0:
                f = b[c]
                b = [x - f * y for x, y in zip(b, row)]
        return cls(RatVec(b), basis)

    @property
    def ambient_dim(self) -> int:
        return len(self.base)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, p) -> bool:
        p = RatVec(p)
        _check_same_dim(p, self.base)
        d = p - self.base
        if not self.basis:
            return all(x == 0 for x in d)
        return rank(list(self.basis) + [d]) == self.dim

    def contains_direction(self, v) -> bool:
        v = RatVec(v)
        if all(x == 0 for x in v):
            return True
        return rank(list(self.basis) + [v]) == self.dim

    def image(self, affine_map) -> "AffineSubspace":
        """Image under an affine map given as a callable on RatVec."""
        b0 = affine_map(self.base)
        return AffineSubspace.make(b0, [affine_map(self.base + v) - b0 for v in self.basis])

    def to_json(self) -> dict:
        return {"base": self.base.to_json(), "basis": [v.to_json() for v in self.basis]}


def affine_hull(points: Sequence) -> AffineSubspace:
    """Smallest affine subspace containing ``points``."""
    pts = [RatVec(p) for p in points]
    if not pts:
        raise UsageError("affine_hull of an empty point list")
    p0 = pts[0]
    for p in pts[1:]:
        _check_same_dim(p0, p)
    return AffineSubspace.make(p0, [p - p0 for p in pts[1:]])


def directions_independent(a: AffineSubspace, b: AffineSubspace) -> bool:
    """True iff span(a.basis) and span(b.basis) meet only in 0."""
    vecs = list(a.basis) + list(b.basis)
    return rank(vecs) == len(vecs)


def intersect_affine(a: AffineSubspace, b: AffineSubspace):
    """Exact intersection: ``None`` (empty), a RatVec (point) or a subspace."""
    _check_same_dim(a.base, b.base)
    cols = list(a.basis) + [-v for v in b.basis]
    rhs = b.base - a.base
    if not cols:
        return a.base if all(x == 0 for x in rhs) else None
    sol = solve_linear(cols, rhs)
    if sol is None:
        return None
    x, null = sol
    k = a.dim
    point = a.base
    for c, v in zip(x[:k], a.basis):
        point = point + v * c
    dirs = []
    for nv in null:
        d = RatVec.zeros(a.ambient_dim)
        for c, v in zip(nv[:k], a.basis):
            d = d + v * c
        dirs.append(d)
    sub = AffineSubspace.make(point, dirs)
    if sub.dim == 0:
        return sub.base
    return sub


# ---------------------------------------------------------------------------
# exact LP feasibility


def feasible_nonneg(A: Sequence[Sequence], b: Sequence):
    """Find ``x >= 0`` with ``A x = b`` or return ``None``.

    Phase-one simplex over Q with Bland's anti-cycling rule.  ``A`` is a
    list of rows.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    rows = []
    for i in range(m):
        r = [rat(v) for v in A[i]]
        bi = rat(b[i])
        if bi < 0:
            r = [-v for v in r]
            bi = -bi
        rows.append(r + [Fraction(1) if j == i else Fraction(0) for j in range(m)] + [bi])
    ncols = n + m
    basis = [n + i for i in range(m)]
    # objective: minimise sum of artificials -> reduced costs row
    cost = [Fraction(0)] * (ncols + 1)
    for r in rows:
        for j in range(ncols + 1):
            cost[j] -= r[j]
    for i in range(m):
        cost[n + i] = Fraction(0)
    while True:
        enter = next((j for j in range(ncols) if cost[j] < 0), None)
        if enter is None:
            break
        best = None
        for i, r in enumerate(rows):
            if r[enter] > 0:
                ratio = r[-1] / r[enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # cannot happen in phase one (bounded below by 0)
            break
        i = best[1]
        piv = rows[i][enter]
        rows[i] = [v / piv for v in rows[i]]
        for k in range(m):
            if k != i and rows[k][enter] != 0:
                f = rows[k][enter]
                rows[k] = [a - f * c for a, c in zip(rows[k], rows[i])]
        if cost[enter] != 0:
            f = cost[enter]
            cost = [a - f * c for a, c in zip(cost, rows[i])]
        basis[i] = enter
    if cost[-1] != 0:
        return None
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = rows[i][-1]
        elif rows[i][-1] != 0:
            return None
    return x


def convex_weights(p, vertices: Sequence):
    """Exact convex weights expressing ``p`` over ``vertices``, or ``None``."""
    p = RatVec(p)
    verts = [RatVec(v) for v in vertices]
    if not verts:
        raise UsageError("convex_membership needs at least one vertex")
    for v in verts:
        _check_same_dim(p, v)
    A = [[v[i] for v in verts] for i in range(len(p))]
    A.append([Fraction(1)] * len(verts))
    b = list(p) + [Fraction(1)]
    return feasible_nonneg(A, b)


def convex_membership(p, vertices: Sequence) -> bool:
    """True iff ``p`` is an exact convex combination of ``vertices``."""
    return convex_weights(p, vertices) is not None


def convex_combination(vertices: Sequence, weights: Sequence) -> RatVec:
    verts = [RatVec(v) for v in vertices]
    out = RatVec.zeros(len(verts[0]))
    for v, w in zip(verts, weights):
        out = out + v * w
    return out
