"""Associahedra K_n in R^n with face and degeneracy operators.

Coordinates: ``t_1 = 0``, ``0 <= t_k <= k-1-(t_1+...+t_{k-1})`` for
``1 < k < n`` and ``t_1+...+t_n = n-1``.  Vertices are enumerated through
the face operators, and the cubic complex K(n) is the cone from the
interior point ``b_n`` over the facet complexes L_k(r,s).
"""

from __future__ import annotations

import functools
import math
import os
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from . import cubic
from .cubic import CubicComplex, CubicSet
from .geometry import RatVec, UsageError, affine_hull

DEFAULT_MAX_N = 6


class DomainError(ValueError):
    """A point lies outside the associahedron an operator is defined on."""


def max_complex_n() -> int:
    return int(os.environ.get("AINFTY_MAX_N", DEFAULT_MAX_N))


def catalan(m: int) -> int:
    return math.comb(2 * m, m) // (m + 1)


class FaceIndex(NamedTuple):
    k: int
    r: int
    s: int

    @property
    def n(self) -> int:
        return self.r + self.s - 1


def face_indices(n: int) -> list[FaceIndex]:
    """A(n), sorted lexicographically by (k, r, s)."""
    out = []
    for s in range(2, n):
        r = n - s + 1
        for k in range(1, r + 1):
            out.append(FaceIndex(k, r, s))
    return sorted(out)


def in_index_set(k: int, r: int, s: int, n: int | None = None) -> bool:
    if n is None:
        n = r + s - 1
    return r + s - 1 == n and 1 <= k <= r and 2 <= s <= n - 1


def interior_point(n: int) -> RatVec:
    """``b_n = (0, 1/2, ..., 1/2, n/2)``; ``b_1 = (0)``."""
    if n < 1:
        raise UsageError("n must be >= 1")
    if n == 1:
        return RatVec([0])
    half = Fraction(1, 2)
    return RatVec([0] + [half] * (n - 2) + [Fraction(n, 2)])


@dataclass(frozen=True)
class AssociahedronSpec:
    """H-representation of K_n.

    ``equalities`` and ``inequalities`` are lists of ``(a, beta)`` meaning
    ``a.x == beta`` and ``a.x <= beta``.
    """

    n: int
    equalities: tuple
    inequalities: tuple
    b: RatVec

    def contains(self, t, strict: bool = False) -> bool:
        t = RatVec(t)
        if len(t) != self.n:
            raise UsageError(f"point has dimension {len(t)}, expected {self.n}")
        if any(a.dot(t) != beta for a, beta in self.equalities):
            return False
        if strict:
            return all(a.dot(t) < beta for a, beta in self.inequalities)
        return all(a.dot(t) <= beta for a, beta in self.inequalities)

    @property
    def vertices(self) -> list[RatVec]:
        return vertices(self.n)

    @property
    def facets(self) -> list[FaceIndex]:
        return face_indices(self.n)


@functools.cache
def build_spec(n: int) -> AssociahedronSpec:
    if not isinstance(n, int) or n < 1:
        raise UsageError(f"n must be a positive integer, got {n!r}")
    eqs = [(RatVec.unit(n, 0), Fraction(0))]
    if n >= 2:
        eqs.append((RatVec([1] * n), Fraction(n - 1)))
    ineqs = []
    for k in range(2, n):  # 1-based k with 1 < k < n
        ineqs.append((-RatVec.unit(n, k - 1), Fraction(0)))
        ineqs.append((RatVec([1] * k + [0] * (n - k)), Fraction(k - 1)))
    return AssociahedronSpec(n, tuple(eqs), tuple(ineqs), interior_point(n))


def contains(n: int, t) -> bool:
    return build_spec(n).contains(t)


# ---------------------------------------------------------------------------
# face operators


def d_face_raw(k: int, x, y) -> RatVec:
    """The linear map R^r x R^s -> R^n behind ∂_k, without domain checks."""
    x, y = RatVec(x), RatVec(y)
    r, s = len(x), len(y)
    if not 1 <= k <= r:
        raise IndexError(f"k={k} out of range for r={r}")
    return RatVec(list(x[:k - 1]) + list(y[:s - 1]) + [y[s - 1] + x[k - 1]] + list(x[k:]))


def d_face(k: int, r: int, s: int, x, y) -> RatVec:
    """∂_k : K_r x K_s -> K_n, n = r + s - 1."""
    n = r + s - 1
    if not in_index_set(k, r, s, n):
        raise IndexError(f"({k},{r},{s}) is not in A({n})")
    x, y = RatVec(x), RatVec(y)
    if len(x) != r or len(y) != s:
        raise UsageError("argument dimensions do not match (r, s)")
    if not contains(r, x):
        raise DomainError(f"{x!r} is not in K_{r}")
    if not contains(s, y):
        raise DomainError(f"{y!r} is not in K_{s}")
    return d_face_raw(k, x, y)


def d_face_inverse(k: int, r: int, s: int, t) -> tuple[RatVec, RatVec]:
    """Left inverse of ∂_k on K_r x K_s (valid when ``t`` is in the image).

    The s-block ``t_k, ..., t_{k+s-2}`` is the head of the inner point; its
    last coordinate is forced by the sum condition of K_s.
    """
    t = RatVec(t)
    head = list(t[k - 1:k + s - 2])
    last = Fraction(s - 1) - sum(head, Fraction(0))
    y = RatVec(head + [last])
    x = RatVec(list(t[:k - 1]) + [t[k + s - 2] - last] + list(t[k + s - 1:]))
    return x, y


def in_facet(idx: FaceIndex, t) -> bool:
    """Membership of ``t`` in L_k(r,s) = ∂_k(K_r x K_s)."""
    k, r, s = idx
    t = RatVec(t)
    if not contains(r + s - 1, t):
        return False
    x, y = d_face_inverse(k, r, s, t)
    return contains(r, x) and contains(s, y)


def facet_condition(idx: FaceIndex, t) -> bool:
    """The intrinsic description of L_k(r,s) inside K_n.

    ``t`` in K_n, ``(t_k, ..., t_{k+s-2}, u) in K_s`` and ``t_{k+s-1} >= u``
    where ``u = s-1 - (t_k + ... + t_{k+s-2})``.
    """
    k, r, s = idx
    t = RatVec(t)
    if not contains(r + s - 1, t):
        return False
    head = list(t[k - 1:k + s - 2])
    u = Fraction(s - 1) - sum(head, Fraction(0))
    return contains(s, head + [u]) and t[k + s - 2] >= u


def facets_containing(n: int, t) -> list[FaceIndex]:
    return [idx for idx in face_indices(n) if in_facet(idx, t)]


@functools.cache
def _vertices(n: int) -> tuple[RatVec, ...]:
    if n == 1:
        return (RatVec([0]),)
    if n == 2:
        return (RatVec([0, 1]),)
    out = set()
    for k, r, s in face_indices(n):
        for x in _vertices(r):
            for y in _vertices(s):
                out.add(d_face_raw(k, x, y))
    return tuple(sorted(out))


def vertices(n: int) -> list[RatVec]:
    """Vertices of K_n as the union of ∂_k images of vertex pairs."""
    if n < 1:
        raise UsageError("n must be >= 1")
    return list(_vertices(n))


# ---------------------------------------------------------------------------
# cone decomposition


@dataclass(frozen=True)
class FacetDecomposition:
    """``t = (1-c) * ∂_k(rho, sigma) + c * b_n``.

    At the centre ``t = b_n`` the index and points are ``None`` and c = 1.
    """

    index: FaceIndex | None
    rho: RatVec | None
    sigma: RatVec | None
    c: Fraction

    @property
    def boundary_point(self) -> RatVec | None:
        if self.index is None:
            return None
        return d_face_raw(self.index.k, self.rho, self.sigma)


def ray_to_boundary(n: int, t) -> tuple[RatVec, Fraction]:
    """Exit point of the ray from b_n through t, and the cone parameter c."""
    spec = build_spec(n)
    t = RatVec(t)
    d = t - spec.b
    lam = None
    for a, beta in spec.inequalities:
        ad = a.dot(d)
        if ad > 0:
            cand = (beta - a.dot(spec.b)) / ad
            if lam is None or cand < lam:
                lam = cand
    if lam is None:
        raise DomainError("ray from b_n does not leave K_n")
    p = spec.b + d * lam
    return p, 1 - 1 / lam


def facet_decompose(n: int, t, prefer: FaceIndex | None = None) -> FacetDecomposition:
    """Write ``t`` as a point on the segment from a facet point to b_n.

    Ties on ridges go to the lexicographically smallest (k, r, s) unless
    ``prefer`` names another facet that also contains the exit point.
    """
    spec = build_spec(n)
    t = RatVec(t)
    if not spec.contains(t):
        raise DomainError(f"{t!r} is not in K_{n}")
    if t == spec.b:
        return FacetDecomposition(None, None, None, Fraction(1))
    p, c = ray_to_boundary(n, t)
    candidates = facets_containing(n, p)
    if not candidates:
        raise RuntimeError(f"boundary point {p!r} lies on no facet of K_{n}")
    idx = candidates[0]
    if prefer is not None:
        if prefer not in candidates:
            raise DomainError(f"exit point {p!r} is not on facet {tuple(prefer)}")
        idx = FaceIndex(*prefer)
    rho, sigma = d_face_inverse(*idx, p)
    return FacetDecomposition(idx, rho, sigma, c)


# ---------------------------------------------------------------------------
# degeneracies


def degeneracy(j: int, n: int, t) -> RatVec:
    """s_j : K_n -> K_{n-1}, extended conewise from the facets."""
    if n < 2 or not 1 <= j <= n:
        raise IndexError(f"s_{j} is not defined on K_{n}")
    t = RatVec(t)
    if not contains(n, t):
        raise DomainError(f"{t!r} is not in K_{n}")
    if n == 2:
        return interior_point(1)
    dec = facet_decompose(n, t)
    if dec.c == 1:
        return interior_point(n - 1)
    val = degeneracy_on_facet(j, dec.index, dec.rho, dec.sigma)
    return val * (1 - dec.c) + interior_point(n - 1) * dec.c


def degeneracy_on_facet(j: int, idx: FaceIndex, rho, sigma) -> RatVec:
    """The case table for ``s_j ∘ ∂_k(rho, sigma)``."""
    k, r, s = idx
    n = r + s - 1
    rho, sigma = RatVec(rho), RatVec(sigma)
    if r == 2 and j == 1 and k == 2:
        return sigma
    if r == 2 and j == n and k == 1:
        return sigma
    if j < k:
        return d_face(k - 1, r - 1, s, degeneracy(j, r, rho), sigma)
    if j < k + s:
        if s == 2:
            return rho
        return d_face(k, r, s - 1, rho, degeneracy(j - k + 1, s, sigma))
    # the inserted block sits before the deleted letter, so slot k is unchanged
    return d_face(k, r - 1, s, degeneracy(j - s + 1, r, rho), sigma)


# ---------------------------------------------------------------------------
# the cubic complex K(n)


@dataclass
class AssocComplex:
    n: int
    complex: CubicComplex
    facets: dict  # FaceIndex -> CubicComplex for L_k(r,s)

    def boundary(self) -> CubicComplex:
        """Cells lying in the boundary (those not containing b_n)."""
        b = interior_point(self.n)
        return self.complex.subcomplex(c for c in self.complex if b not in c.vertices)


def build_complex(n: int, max_n: int | None = None) -> AssocComplex:
    if max_n is None:
        max_n = max_complex_n()
    if n < 1:
        raise UsageError("n must be >= 1")
    if n > max_n:
        raise UsageError(f"n={n} exceeds the complex size cap {max_n} (set --max-n or AINFTY_MAX_N)")
    return _build_complex(n)


@functools.cache
def _build_complex(n: int) -> AssocComplex:
    if n == 1:
        return AssocComplex(1, CubicComplex([cubic.empty(1)], 1), {})
    bn = cubic.point(interior_point(n))
    e = cubic.empty(n)
    cells = [e, bn]
    facets = {}
    for idx in face_indices(n):
        k, r, s = idx
        br, bs = interior_point(r), interior_point(s)
        anchor = d_face_raw(k, br, bs)
        left = [cubic.affine_image(c, lambda x: d_face_raw(k, x, bs)) for c in _build_complex(r).complex]
        right = [cubic.affine_image(c, lambda y: d_face_raw(k, br, y)) for c in _build_complex(s).complex]
        L = CubicComplex([cubic.product(a, b, anchor=anchor) for a in left for b in right], n)
        facets[idx] = L
        for c in L:
            if not c.is_empty:
                cells.append(c)
                cells.append(cubic.join(c, bn))
    return AssocComplex(n, CubicComplex(cells, n), facets)


# ---------------------------------------------------------------------------
# sampling


def barycentric_sample(n: int, rng: random.Random, den: int = 8) -> RatVec:
    """Random point of K_n with barycentric weights in (1/den)Z over its vertices."""
    vs = vertices(n)
    if len(vs) == 1:
        return vs[0]
    # random composition of den into len(vs) nonnegative parts
    cuts = sorted(rng.randint(0, den) for _ in range(len(vs) - 1))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    out = RatVec.zeros(n)
    for v, w in zip(vs, parts):
        out = out + v * Fraction(w, den)
    return out


def sample_points(n: int, count: int, seed: int = 0, den: int = 8) -> list[RatVec]:
    """``b_n`` first, then distinct barycentric grid samples."""
    rng = random.Random(f"K{n}-{seed}")
    pts = [interior_point(n)]
    seen = set(pts)
    tries = 0
    while len(pts) < count and tries < 50 * count:
        tries += 1
        p = barycentric_sample(n, rng, den)
        if p not in seen:
            seen.add(p)
            pts.append(p)
    return pts


def _boundary_candidates(n: int, rng: random.Random, den: int):
    """Points ∂_k(rho, sigma) with rho, sigma drawn from vertices and grid samples."""
    for k, r, s in face_indices(n):
        for x in vertices(r) + [barycentric_sample(r, rng, den)]:
            for y in vertices(s) + [barycentric_sample(s, rng, den)]:
                yield d_face_raw(k, x, y)


def ridge_points(n: int, count: int = 10, seed: int = 0, den: int = 8) -> list[RatVec]:
    """Deterministic points of K_n whose facet exit point lies on two or more facets.

    Each is ``(1-c) p + c b_n`` for a ridge point p and c in {0, 1/4, 1/2};
    every such point lies on two facet cones at once.
    """
    if n < 4:
        return []
    rng = random.Random(f"ridge-{n}-{seed}")
    ridges = sorted({p for p in _boundary_candidates(n, rng, den) if len(facets_containing(n, p)) >= 2})
    rng.shuffle(ridges)
    b = interior_point(n)
    out = []
    for c in (Fraction(0), Fraction(1, 4), Fraction(1, 2)):
        out += [p * (1 - c) + b * c for p in ridges]
    return out[:count]


@dataclass
class DegeneracyReport:
    n: int
    checked: int
    mismatches: list

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {"condition": "degeneracy", "n": self.n, "samples": self.checked,
                "mismatches": len(self.mismatches), "pass": self.ok}


def verify_degeneracies(n: int, samples: int = 3, seed: int = 0, den: int = 8) -> DegeneracyReport:
    """s_j∘∂_k against the case table, for every j and every facet containing the point.

    For each (k, r, s) in A(n) and sampled (rho, sigma), the table entry
    must equal the conewise degeneracy of ∂_k(rho, sigma), lie in K_{n-1},
    and agree with the entries of every other facet through that point.
    """
    checked, bad = 0, []
    for k, r, s in face_indices(n):
        rhos = list(dict.fromkeys(vertices(r) + sample_points(r, samples, seed, den)))
        sigmas = list(dict.fromkeys(vertices(s) + sample_points(s, samples, seed + 1, den)))
        for rho in rhos:
            for sigma in sigmas:
                p = d_face_raw(k, rho, sigma)
                others = [idx for idx in facets_containing(n, p)]
                for j in range(1, n + 1):
                    want = degeneracy(j, n, p)
                    checked += 1
                    for idx in others:
                        x, y = d_face_inverse(*idx, p)
                        got = degeneracy_on_facet(j, idx, x, y)
                        if got != want or not contains(n - 1, got):
                            bad.append({"j": j, "facet": tuple(idx), "point": p.to_json()})
    return DegeneracyReport(n, checked, bad)
