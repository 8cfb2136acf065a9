"""Cubic sets and cubic complexes over exact rational geometry.

A cubic set is a point, a join of two cubic sets in general position, or a
transverse product of two cubic sets glued at an anchor point.  Cells keep
their construction tree (faces are defined on it) but compare equal by
their vertex sets, so the same cell reached through two constructions is
deduplicated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .geometry import (
    AffineSubspace,
    RatVec,
    UsageError,
    affine_hull,
    convex_membership,
    directions_independent,
    feasible_nonneg,
    intersect_affine,
    rank,
)


class CubicError(ValueError):
    pass


class JoinDegenerate(CubicError):
    """The two cells are not in general position for a join."""


class ProductDegenerate(CubicError):
    """The two cells do not meet transversally in a single anchor point."""


EMPTY, POINT, JOIN, PRODUCT = "empty", "point", "join", "product"


class CubicSet:
    """A q-cubic set in R^n.

    Build with :func:`empty`, :func:`point`, :func:`join` and
    :func:`product` rather than calling the constructor.
    """

    __slots__ = ("kind", "children", "vertices", "ambient_dim", "dim", "anchor",
                 "_hull", "_key", "_faces")

    def __init__(self, kind, children, vertices, ambient_dim, dim, anchor=None):
        self.kind = kind
        self.children = tuple(children)
        self.vertices = tuple(sorted(set(vertices)))
        self.ambient_dim = ambient_dim
        self.dim = dim
        self.anchor = anchor
        self._hull = None
        self._key = (ambient_dim, self.vertices)
        self._faces = None

    @property
    def hull(self) -> AffineSubspace | None:
        if self.kind == EMPTY:
            return None
        if self._hull is None:
            self._hull = affine_hull(self.vertices)
        return self._hull

    @property
    def is_empty(self) -> bool:
        return self.kind == EMPTY

    def __eq__(self, other):
        return isinstance(other, CubicSet) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other):
        return sort_key(self) < sort_key(other)

    def __repr__(self):
        if self.kind == EMPTY:
            return "CubicSet(empty)"
        return f"CubicSet({self.kind}, dim={self.dim}, {len(self.vertices)} vertices)"

    def contains(self, p) -> bool:
        if self.kind == EMPTY:
            return False
        return convex_membership(p, self.vertices)


def sort_key(c: CubicSet):
    return (c.dim, c.vertices)


def empty(ambient_dim: int) -> CubicSet:
    return CubicSet(EMPTY, (), (), ambient_dim, -1)


def point(p) -> CubicSet:
    p = RatVec(p)
    return CubicSet(POINT, (), (p,), len(p), 0)


def _same_ambient(a: CubicSet, b: CubicSet):
    if a.ambient_dim != b.ambient_dim:
        raise UsageError(f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")


def join(s1: CubicSet, s2: CubicSet) -> CubicSet:
    """``s1 * s2``: all segments from s1 to s2.

    The empty set is a two-sided identity.  Otherwise the hulls must be
    skew: the directions of both hulls together with ``a2 - a1`` must be
    linearly independent.
    """
    _same_ambient(s1, s2)
    if s1.is_empty:
        return s2
    if s2.is_empty:
        return s1
    h1, h2 = s1.hull, s2.hull
    vecs = list(h1.basis) + list(h2.basis) + [s2.vertices[0] - s1.vertices[0]]
    if rank(vecs) != len(vecs):
        raise JoinDegenerate(f"cells {s1!r} and {s2!r} are not in general position")
    return _make_join(s1, s2)


def _make_join(s1: CubicSet, s2: CubicSet) -> CubicSet:
    # no precondition check: callers guarantee general position
    if s1.is_empty:
        return s2
    if s2.is_empty:
        return s1
    return CubicSet(JOIN, (s1, s2), s1.vertices + s2.vertices, s1.ambient_dim,
                    s1.dim + s2.dim + 1)


def product(s1: CubicSet, s2: CubicSet, anchor=None) -> CubicSet:
    """``{x + y - a : x in s1, y in s2}``.

    Without ``anchor`` the hulls must meet in exactly one point, which
    becomes the anchor.  With an explicit anchor ``a`` the frames
    ``aff(s1 + a)`` and ``aff(s2 + a)`` must have independent directions.
    A product with the empty set is empty.
    """
    _same_ambient(s1, s2)
    if s1.is_empty or s2.is_empty:
        return empty(s1.ambient_dim)
    if anchor is None:
        if not directions_independent(s1.hull, s2.hull):
            raise ProductDegenerate(f"directions of {s1!r} and {s2!r} overlap")
        a = intersect_affine(s1.hull, s2.hull)
        if not isinstance(a, RatVec):
            raise ProductDegenerate(f"hulls of {s1!r} and {s2!r} do not meet in a single point")
    else:
        a = RatVec(anchor)
        if len(a) != s1.ambient_dim:
            raise UsageError("anchor has the wrong dimension")
        f1 = affine_hull(list(s1.vertices) + [a])
        f2 = affine_hull(list(s2.vertices) + [a])
        if not directions_independent(f1, f2):
            raise ProductDegenerate(f"frames of {s1!r} and {s2!r} through the anchor overlap")
    return _make_product(s1, s2, a)


def _make_product(s1: CubicSet, s2: CubicSet, a: RatVec) -> CubicSet:
    if s1.is_empty or s2.is_empty:
        return empty(s1.ambient_dim)
    verts = [x + y - a for x in s1.vertices for y in s2.vertices]
    return CubicSet(PRODUCT, (s1, s2), verts, s1.ambient_dim, s1.dim + s2.dim, anchor=a)


def faces(s: CubicSet) -> tuple[CubicSet, ...]:
    """All faces of ``s`` including the empty set and ``s`` itself."""
    if s._faces is not None:
        return s._faces
    if s.kind == EMPTY:
        out = [s]
    elif s.kind == POINT:
        out = [empty(s.ambient_dim), s]
    else:
        a, b = s.children
        seen = {}
        for t1 in faces(a):
            for t2 in faces(b):
                # faces of a valid cell inherit its general position
                if s.kind == JOIN:
                    f = _make_join(t1, t2)
                else:
                    f = _make_product(t1, t2, s.anchor)
                seen.setdefault(f, f)
        seen[s] = s  # keep the caller's construction for the top cell
        out = list(seen)
    s._faces = tuple(sorted(out, key=sort_key))
    return s._faces


def is_face(t: CubicSet, s: CubicSet) -> bool:
    """``t ≺ s`` (reflexive)."""
    return t in set(faces(s))


def affine_image(s: CubicSet, f: Callable[[RatVec], RatVec], check: bool = False) -> CubicSet:
    """Image of ``s`` under an affine map, keeping the construction.

    Injective affine maps preserve general position, so the join and
    product preconditions are only re-checked when ``check`` is set.
    """
    if s.kind == EMPTY:
        n = len(f(RatVec.zeros(s.ambient_dim)))
        return empty(n)
    if s.kind == POINT:
        return point(f(s.vertices[0]))
    a, b = (affine_image(c, f, check) for c in s.children)
    if s.kind == JOIN:
        return join(a, b) if check else _make_join(a, b)
    anchor = f(s.anchor)
    return product(a, b, anchor=anchor) if check else _make_product(a, b, anchor)


# ---------------------------------------------------------------------------
# complexes


@dataclass
class Report:
    """Outcome of a verification: ``ok`` plus a list of violation records."""

    ok: bool = True
    violations: list[dict] = field(default_factory=list)
    checked: int = 0

    def add(self, **violation):
        self.ok = False
        self.violations.append(violation)

    def __bool__(self):
        return self.ok


class CubicComplex:
    """A finite, face-closed family of cubic sets in a common R^n."""

    def __init__(self, cells: Iterable[CubicSet], ambient_dim: int | None = None):
        uniq: dict[CubicSet, CubicSet] = {}
        for c in cells:
            uniq.setdefault(c, c)
        if ambient_dim is None:
            if not uniq:
                raise UsageError("ambient_dim required for an empty family")
            ambient_dim = next(iter(uniq)).ambient_dim
        self.ambient_dim = ambient_dim
        self.cells: tuple[CubicSet, ...] = tuple(sorted(uniq, key=sort_key))
        self._index = {c: i for i, c in enumerate(self.cells)}

    def __contains__(self, c):
        return c in self._index

    def __iter__(self):
        return iter(self.cells)

    def __len__(self):
        return len(self.cells)

    def get(self, c: CubicSet) -> CubicSet | None:
        i = self._index.get(c)
        return None if i is None else self.cells[i]

    @property
    def dim(self) -> int:
        return max((c.dim for c in self.cells), default=-1)

    def cells_of_dim(self, q: int) -> list[CubicSet]:
        return [c for c in self.cells if c.dim == q]

    def f_vector(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for c in self.cells:
            out[c.dim] = out.get(c.dim, 0) + 1
        return out

    def euler_characteristic(self) -> int:
        return sum((-1) ** q * k for q, k in self.f_vector().items() if q >= 0)

    def vertices(self) -> list[RatVec]:
        return sorted({v for c in self.cells for v in c.vertices})

    def hull_rank(self) -> int:
        vs = self.vertices()
        return affine_hull(vs).dim if vs else -1

    def face_pairs(self) -> list[tuple[CubicSet, CubicSet]]:
        """All ``(t, s)`` with ``t`` a proper face of ``s``, both cells."""
        out = []
        for s in self.cells:
            for t in faces(s):
                if t != s and t in self._index:
                    out.append((self.get(t), s))
        return out

    def maximal_cells(self) -> list[CubicSet]:
        covered = {t for t, _ in self.face_pairs()}
        return [c for c in self.cells if c not in covered]

    def contains_point(self, p) -> bool:
        return any(c.contains(p) for c in self.cells if not c.is_empty)

    def subcomplex(self, cells: Iterable[CubicSet]) -> "CubicComplex":
        return CubicComplex(cells, self.ambient_dim)

    def verify(self, geometric: bool = False) -> Report:
        return verify_complex(self.cells, geometric=geometric)


def boundary_complex(s: CubicSet) -> CubicComplex:
    """The complex of proper faces of ``s``."""
    if s.is_empty:
        raise UsageError("boundary of the empty cell is undefined")
    return CubicComplex([f for f in faces(s) if f != s], s.ambient_dim)


def cell_complex(s: CubicSet) -> CubicComplex:
    return CubicComplex(faces(s), s.ambient_dim)


def _overlap_outside_face(P: CubicSet, Q: CubicSet, shared: frozenset) -> bool:
    """True if conv(P) and conv(Q) share a point outside conv(shared).

    Decided by one exact LP: look for a common point whose weight on the
    non-shared vertices of P is positive.
    """
    pv, qv = P.vertices, Q.vertices
    n = P.ambient_dim
    A = []
    for i in range(n):
        A.append([v[i] for v in pv] + [-w[i] for w in qv])
    A.append([1] * len(pv) + [-1] * len(qv))
    A.append([0 if v in shared else 1 for v in pv] + [0] * len(qv))
    b = [0] * (n + 1) + [1]
    return feasible_nonneg(A, b) is not None


def verify_complex(cells: Iterable[CubicSet], geometric: bool = False) -> Report:
    """Check the cubic complex axioms.

    * the empty cell is present,
    * every face of every cell is a cell,
    * every pairwise intersection (taken as the common vertex set) is a
      face of both cells.

    Pairs whose shared vertices do not span a generated face of both cells
    are reported as ``unverifiable`` rather than guessed at.  With
    ``geometric=True`` maximal cells are additionally checked by exact LP
    to meet only inside their common face.
    """
    cells = list(dict.fromkeys(cells))
    rep = Report()
    if not cells:
        rep.add(kind="missing_empty")
        return rep
    n = cells[0].ambient_dim
    for c in cells:
        if c.ambient_dim != n:
            rep.add(kind="ambient", cell=c)
    cellset = set(cells)
    if empty(n) not in cellset:
        rep.add(kind="missing_empty")
    face_index = {}
    for c in cells:
        fs = faces(c)
        face_index[c] = {frozenset(f.vertices): f for f in fs}
        for f in fs:
            if f not in cellset:
                rep.add(kind="closure", face=f, cell=c)
    vsets = {c: frozenset(c.vertices) for c in cells}
    nonempty = [c for c in cells if not c.is_empty]
    for i, t in enumerate(nonempty):
        for s in nonempty[i + 1:]:
            rep.checked += 1
            shared = vsets[t] & vsets[s]
            if not shared:
                continue
            ft = face_index[t].get(shared)
            fs = face_index[s].get(shared)
            if ft is None or fs is None:
                rep.add(kind="unverifiable", cells=(t, s))
            elif ft != fs:
                rep.add(kind="intersection", cells=(t, s))
    if geometric:
        maximal = CubicComplex(cells, n).maximal_cells() if not rep.violations else nonempty
        maximal = [c for c in maximal if not c.is_empty]
        for i, t in enumerate(maximal):
            for s in maximal[i + 1:]:
                shared = vsets[t] & vsets[s]
                if _overlap_outside_face(t, s, shared) or _overlap_outside_face(s, t, shared):
                    rep.add(kind="overlap", cells=(t, s))
    return rep


def complex_join(K: CubicComplex, L: CubicComplex) -> CubicComplex:
    """``{s * t : s in K, t in L}`` for complexes in the same R^n."""
    cells = []
    for s in K:
        for t in L:
            try:
                cells.append(join(s, t))
            except JoinDegenerate as e:
                raise JoinDegenerate(f"join of {s!r} and {t!r} is degenerate") from e
    return CubicComplex(cells, K.ambient_dim)


def complex_product(K: CubicComplex, L: CubicComplex, anchor=None) -> CubicComplex:
    """``{s x t : s in K, t in L}`` glued at one anchor for all pairs.

    Without an anchor, the affine hulls of |K| and |L| must meet in a
    single point.
    """
    if anchor is None:
        a = intersect_affine(affine_hull(K.vertices()), affine_hull(L.vertices()))
        if not isinstance(a, RatVec):
            raise ProductDegenerate("hulls of the two complexes do not meet in one point")
        anchor = a
    cells = []
    for s in K:
        for t in L:
            try:
                cells.append(product(s, t, anchor=anchor))
            except ProductDegenerate as e:
                raise ProductDegenerate(f"product of {s!r} and {t!r} is degenerate") from e
    return CubicComplex(cells, K.ambient_dim)


# external constructions: C(n) x C(m) -> C(n+m+1) and C(n+m)

def _embedder(n: int, m: int, slot: int, offset):
    def f(v):
        v = list(v)
        if slot == 0:
            return RatVec(v + list(offset) + [0] * m)
        return RatVec([0] * n + list(offset) + v)
    return f


def external_join(K: CubicComplex, L: CubicComplex) -> CubicComplex:
    """Join of complexes in R^n and R^m inside R^n x R x R^m.

    K sits at height 1 and L at height 2 of the middle coordinate.
    """
    n, m = K.ambient_dim, L.ambient_dim
    K2 = CubicComplex([affine_image(c, _embedder(n, m, 0, [1])) for c in K], n + m + 1)
    L2 = CubicComplex([affine_image(c, _embedder(n, m, 1, [2])) for c in L], n + m + 1)
    return complex_join(K2, L2)


def external_product(K: CubicComplex, L: CubicComplex) -> CubicComplex:
    """Product of complexes in R^n and R^m inside R^(n+m), anchored at 0."""
    n, m = K.ambient_dim, L.ambient_dim
    K2 = CubicComplex([affine_image(c, _embedder(n, m, 0, [])) for c in K], n + m)
    L2 = CubicComplex([affine_image(c, _embedder(n, m, 1, [])) for c in L], n + m)
    return complex_product(K2, L2, anchor=RatVec.zeros(n + m))


# ---------------------------------------------------------------------------
# cubic maps


@dataclass
class CubicMapSpec:
    source: CubicComplex
    target: CubicComplex
    assignment: Mapping[CubicSet, CubicSet]


def verify_cubic_map(m: CubicMapSpec) -> Report:
    """Check order preservation, ``φ⁻¹(∅) = {∅}`` and face lifting."""
    rep = Report()
    src, tgt = m.source, m.target
    phi = dict(m.assignment)
    for s in src:
        if s not in phi:
            rep.add(kind="not_total", cell=s)
        elif phi[s] not in tgt:
            rep.add(kind="not_a_target_cell", cell=s)
    if not rep.ok:
        return rep
    e_src, e_tgt = empty(src.ambient_dim), empty(tgt.ambient_dim)
    pre_empty = [s for s in src if phi[s] == e_tgt]
    if pre_empty != [e_src]:
        rep.add(kind="empty_preimage", cells=pre_empty)
    for s in src:
        src_faces = [t for t in faces(s) if t in src]
        img_faces = set(faces(phi[s]))
        for t in src_faces:
            rep.checked += 1
            if phi[t] not in img_faces:
                rep.add(kind="order", face=t, cell=s)
        lifted = {phi[t] for t in src_faces}
        for tp in faces(phi[s]):
            if tp in tgt and tp not in lifted:
                rep.add(kind="face_lifting", cell=s, target_face=tp)
    return rep


def trivial_map(K: CubicComplex, star: CubicSet) -> CubicMapSpec:
    """``∅ ↦ ∅`` and every other cell to the point ``star``."""
    target = cell_complex(star)
    e = empty(star.ambient_dim)
    return CubicMapSpec(K, target, {c: (e if c.is_empty else star) for c in K})


def inclusion_map(L: CubicComplex, K: CubicComplex) -> CubicMapSpec:
    return CubicMapSpec(L, K, {c: c for c in L})


def join_map(m1: CubicMapSpec, m2: CubicMapSpec) -> CubicMapSpec:
    src = complex_join(m1.source, m2.source)
    tgt = complex_join(m1.target, m2.target)
    assign = {}
    for a in m1.source:
        for b in m2.source:
            assign[join(a, b)] = join(m1.assignment[a], m2.assignment[b])
    return CubicMapSpec(src, tgt, assign)


def product_map(m1: CubicMapSpec, m2: CubicMapSpec, src_anchor=None, tgt_anchor=None) -> CubicMapSpec:
    src = complex_product(m1.source, m2.source, anchor=src_anchor)
    tgt = complex_product(m1.target, m2.target, anchor=tgt_anchor)
    sa = next(c.anchor for c in src if c.kind == PRODUCT) if src_anchor is None else RatVec(src_anchor)
    ta = next(c.anchor for c in tgt if c.kind == PRODUCT) if tgt_anchor is None else RatVec(tgt_anchor)
    assign = {}
    for a in m1.source:
        for b in m2.source:
            assign[product(a, b, anchor=sa)] = product(m1.assignment[a], m2.assignment[b], anchor=ta)
    return CubicMapSpec(src, tgt, assign)


# ---------------------------------------------------------------------------
# JSON

def _normalize(c: CubicSet) -> CubicSet:
    """Drop products with a point factor sitting at the anchor (they equal the other factor)."""
    if c.kind == PRODUCT:
        a, b = (_normalize(ch) for ch in c.children)
        if a.kind == POINT and a.vertices[0] == c.anchor:
            return b
        if b.kind == POINT and b.vertices[0] == c.anchor:
            return a
        return _make_product(a, b, c.anchor)
    if c.kind == JOIN:
        a, b = (_normalize(ch) for ch in c.children)
        return _make_join(a, b)
    return c


def _tree_to_json(c: CubicSet) -> dict:
    if c.kind == EMPTY:
        return {"kind": EMPTY}
    if c.kind == POINT:
        return {"kind": POINT, "vertex": c.vertices[0].to_json()}
    out = {"kind": c.kind, "children": [_tree_to_json(ch) for ch in c.children]}
    if c.anchor is not None:
        out["anchor"] = c.anchor.to_json()
    return out


def _tree_from_json(t: Mapping, n: int) -> CubicSet:
    kind = t["kind"]
    if kind == EMPTY:
        return empty(n)
    if kind == POINT:
        return point(RatVec(t["vertex"]))
    a, b = (_tree_from_json(ch, n) for ch in t["children"])
    return join(a, b) if kind == JOIN else product(a, b, anchor=RatVec(t["anchor"]))


def complex_to_json(K: CubicComplex) -> dict:
    """Serialize a complex; ids follow the canonical (dim, vertex list) order.

    ``children`` holds the ids of the two construction factors when both
    are cells of K; otherwise the full construction goes in ``tree``.
    """
    ids = {c: i for i, c in enumerate(K.cells)}
    cells = []
    for c in K.cells:
        c = _normalize(c)
        entry = {"id": ids[c], "dim": c.dim, "kind": c.kind}
        child_ids = [ids.get(ch) for ch in c.children]
        if all(i is not None and i != ids[c] for i in child_ids):
            entry["children"] = child_ids
        else:
            entry["children"] = []
            entry["tree"] = _tree_to_json(c)
        entry["vertices"] = [v.to_json() for v in c.vertices]
        if c.anchor is not None:
            entry["anchor"] = c.anchor.to_json()
        cells.append(entry)
    faces_out = sorted((ids[t], ids[s]) for t, s in K.face_pairs())
    return {"ambient_dim": K.ambient_dim, "cells": cells, "faces": [list(p) for p in faces_out]}


def complex_from_json(data: Mapping) -> CubicComplex:
    """Rebuild a complex; construction trees come from ``children`` (or ``tree``)."""
    n = int(data["ambient_dim"])
    raw = {int(c["id"]): c for c in data["cells"]}
    built: dict[int, CubicSet] = {}
    active: set[int] = set()

    def build(i):
        if i in built:
            return built[i]
        if i in active:
            raise UsageError(f"cell {i}: cyclic children")
        active.add(i)
        c = raw[i]
        kind = c["kind"]
        verts = [RatVec(v) for v in c["vertices"]]
        if kind == EMPTY:
            cell = empty(n)
        elif kind == POINT:
            cell = point(verts[0])
        elif "tree" in c:
            cell = _tree_from_json(c["tree"], n)
        else:
            ch = c.get("children") or []
            if len(ch) != 2 or any(x is None for x in ch):
                raise UsageError(f"cell {i}: {kind} needs two child ids")
            a, b = build(int(ch[0])), build(int(ch[1]))
            cell = join(a, b) if kind == JOIN else product(a, b, anchor=RatVec(c["anchor"]))
        if set(cell.vertices) != set(verts):
            raise UsageError(f"cell {i}: vertices do not match its construction")
        built[i] = cell
        active.discard(i)
        return cell

    return CubicComplex([build(i) for i in raw], n)
