import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ainfty import cubic as C
from ainfty.associahedron import build_complex
from ainfty.geometry import RatVec, convex_combination, rank, rv


def seg(a, b):
    return C.join(C.point(a), C.point(b))


P, Q = rv(0, 0, 2), rv(0, 1, 1)
K3_SEGMENT = seg(P, Q)
X_AXIS = seg(rv(0, 0), rv(1, 0))
Y_AXIS = seg(rv(0, 0), rv(0, 1))
SQUARE = C.product(X_AXIS, Y_AXIS, anchor=rv(0, 0))


def random_point_in(cell, rng, den=12):
    raw = [rng.randint(0, den) for _ in cell.vertices]
    raw[0] += 1
    tot = sum(raw)
    return convex_combination(cell.vertices, [Fraction(x, tot) for x in raw])


# --- construction ----------------------------------------------------------

def test_join_of_k3_endpoints():
    assert K3_SEGMENT.dim == 1
    assert K3_SEGMENT.vertices == (P, Q)
    assert K3_SEGMENT.contains(rv(0, "1/2", "3/2"))


def test_join_with_empty_is_identity():
    e = C.empty(3)
    assert C.join(K3_SEGMENT, e) == K3_SEGMENT
    assert C.join(e, K3_SEGMENT) == K3_SEGMENT
    assert C.join(e, e).is_empty


def test_join_triangle():
    tri = C.join(X_AXIS, C.point(rv(0, 1)))
    assert tri.dim == 2 and len(tri.vertices) == 3
    assert tri.contains(rv("1/3", "1/3"))
    assert not tri.contains(rv(1, 1))


def test_join_degenerate():
    with pytest.raises(C.JoinDegenerate):
        C.join(X_AXIS, C.point(rv(2, 0)))
    with pytest.raises(C.JoinDegenerate):
        C.join(C.point(P), C.point(P))


def test_product_square():
    assert SQUARE.dim == 2
    assert set(SQUARE.vertices) == {rv(0, 0), rv(1, 0), rv(0, 1), rv(1, 1)}
    assert SQUARE.anchor == rv(0, 0)


def test_product_with_point_translates():
    # with the anchor on σ, the product is σ translated by p - anchor
    p = C.point(rv(3, 5))
    shifted = C.product(p, X_AXIS, anchor=rv(0, 0))
    assert set(shifted.vertices) == {rv(3, 5), rv(4, 5)}
    assert shifted.dim == 1


def test_product_of_coincident_points():
    # the K(3) facet product: both factors are the point ∂_1(b_2, b_2)
    a = C.point(Q)
    assert C.product(a, a, anchor=Q) == a


def test_product_degenerate():
    with pytest.raises(C.ProductDegenerate):
        C.product(X_AXIS, seg(rv(0, 1), rv(1, 1)))  # parallel, hulls disjoint
    with pytest.raises(C.ProductDegenerate):
        C.product(X_AXIS, X_AXIS, anchor=rv(0, 0))  # shared direction


# --- faces ---------------------------------------------------------------------

def test_face_counts():
    assert set(C.faces(C.point(P))) == {C.empty(3), C.point(P)}
    assert set(C.faces(K3_SEGMENT)) == {C.empty(3), C.point(P), C.point(Q), K3_SEGMENT}
    fs = C.faces(SQUARE)
    assert len(fs) == 10
    dims = sorted(f.dim for f in fs)
    assert dims == [-1, 0, 0, 0, 0, 1, 1, 1, 1, 2]


def unit_cube(q):
    cell = C.point(RatVec.zeros(q))
    for i in range(q):
        cell = C.product(cell, seg(RatVec.zeros(q), RatVec.unit(q, i)), anchor=RatVec.zeros(q))
    return cell


@pytest.mark.parametrize("q", [1, 2, 3])
def test_interval_product_face_count(q):
    assert len(C.faces(unit_cube(q))) == 3 ** q + 1


def test_is_face():
    assert C.is_face(C.point(P), K3_SEGMENT)
    assert C.is_face(C.empty(3), K3_SEGMENT)
    assert not C.is_face(C.point(rv(0, "1/2", "3/2")), K3_SEGMENT)


# --- boundary and complexes ------------------------------------------------------

def test_boundary_of_point_and_segment():
    assert set(C.boundary_complex(C.point(P))) == {C.empty(3)}
    assert set(C.boundary_complex(K3_SEGMENT)) == {C.empty(3), C.point(P), C.point(Q)}


def test_boundary_of_square_by_sampling():
    bd = C.boundary_complex(SQUARE)
    assert bd.f_vector() == {-1: 1, 0: 4, 1: 4}
    assert SQUARE not in bd
    edges = bd.cells_of_dim(1)
    rng = random.Random(3)
    for _ in range(20):
        x = Fraction(rng.randint(1, 9), 10)
        for p in (rv(x, 0), rv(x, 1), rv(0, x), rv(1, x)):
            assert sum(e.contains(p) for e in edges) == 1
    assert not any(e.contains(rv("1/2", "1/2")) for e in edges)


def test_verify_complex_ok_and_closure_violation():
    assert C.verify_complex(C.boundary_complex(K3_SEGMENT)).ok
    rep = C.verify_complex([C.empty(3), K3_SEGMENT])
    assert not rep.ok
    assert {v["kind"] for v in rep.violations} == {"closure"}
    rep = C.verify_complex([K3_SEGMENT, C.point(P), C.point(Q)])
    assert "missing_empty" in {v["kind"] for v in rep.violations}


def test_verify_complex_detects_overlap():
    # two triangles overlapping in their interiors
    t1 = C.join(X_AXIS, C.point(rv(0, 1)))
    t2 = C.join(seg(rv("1/2", 0), rv(2, 0)), C.point(rv(1, 1)))
    cells = set(C.faces(t1)) | set(C.faces(t2))
    assert not C.verify_complex(cells, geometric=True).ok


def test_k4_complex_verifies():
    K = build_complex(4).complex
    assert C.verify_complex(list(K)).ok


def test_complex_join_of_points():
    K = C.complex_join(C.cell_complex(C.point(P)), C.cell_complex(C.point(Q)))
    assert set(K) == set(C.faces(K3_SEGMENT))
    assert K.dim == 1


def test_complex_product_of_segments():
    K = C.complex_product(C.cell_complex(X_AXIS), C.cell_complex(Y_AXIS))
    assert len(K) == 10
    assert K.dim == 2 and K.verify().ok


def test_external_constructions_dims():
    a, b = C.cell_complex(seg(rv(0), rv(1))), C.cell_complex(seg(rv(0), rv(2)))
    J = C.external_join(a, b)
    assert J.dim == 3 and J.ambient_dim == 3 and J.verify().ok
    Pr = C.external_product(a, b)
    assert Pr.dim == 2 and Pr.ambient_dim == 2 and Pr.verify().ok


def test_join_of_products_realization():
    # (σ*a) x (τ*b) has the same realization as L*c with
    # L = (σ*a) x τ ∪ σ x (τ*b) and c the product of the two apexes
    sigma, a = rv(0, 0, 0), rv(1, 0, 0)
    tau, b = rv(0, 0, 0), rv(0, 1, 0)
    origin = rv(0, 0, 0)
    lhs = C.product(seg(sigma, a), seg(tau, b), anchor=origin)
    c = a + b - origin
    L = [C.product(seg(sigma, a), C.point(tau), anchor=origin),
         C.product(C.point(sigma), seg(tau, b), anchor=origin)]
    rhs = [C.join(cell, C.point(c)) for cell in L]
    rng = random.Random(11)
    for _ in range(25):
        p = random_point_in(lhs, rng)
        assert any(cell.contains(p) for cell in rhs)
        part = rng.choice(rhs)
        assert lhs.contains(random_point_in(part, rng))


# --- cubic maps ------------------------------------------------------------------

def test_trivial_and_inclusion_maps():
    K = build_complex(4).complex
    assert C.verify_cubic_map(C.trivial_map(K, C.point(rv(0, 0, 0, 3)))).ok
    sub = K.subcomplex([c for c in K if c.dim <= 0])
    assert C.verify_cubic_map(C.inclusion_map(sub, K)).ok


def test_face_lifting_violation():
    src = C.cell_complex(seg(rv(0), rv(1)))
    tgt = C.cell_complex(seg(rv(5), rv(6)))
    p, q, e = C.point(rv(5)), C.point(rv(6)), C.empty(1)
    assign = {C.empty(1): e, C.point(rv(0)): p, C.point(rv(1)): p, seg(rv(0), rv(1)): seg(rv(5), rv(6))}
    rep = C.verify_cubic_map(C.CubicMapSpec(src, tgt, assign))
    assert {v["kind"] for v in rep.violations} == {"face_lifting"}


def test_order_violation_and_empty_preimage():
    src = C.cell_complex(seg(rv(0), rv(1)))
    tgt = C.cell_complex(seg(rv(5), rv(6)))
    p, q, e = C.point(rv(5)), C.point(rv(6)), C.empty(1)
    # the edge collapses to p while one endpoint goes to q
    assign = {C.empty(1): e, C.point(rv(0)): p, C.point(rv(1)): q, seg(rv(0), rv(1)): p}
    kinds = {v["kind"] for v in C.verify_cubic_map(C.CubicMapSpec(src, tgt, assign)).violations}
    assert "order" in kinds
    assign = {C.empty(1): e, C.point(rv(0)): e, C.point(rv(1)): q, seg(rv(0), rv(1)): q}
    kinds = {v["kind"] for v in C.verify_cubic_map(C.CubicMapSpec(src, tgt, assign)).violations}
    assert "empty_preimage" in kinds


def test_join_and_product_of_maps_are_maps():
    m1 = C.inclusion_map(C.cell_complex(C.point(rv(0, 0, 0))), C.cell_complex(seg(rv(0, 0, 0), rv(1, 0, 0))))
    m2 = C.inclusion_map(C.cell_complex(C.point(rv(0, 1, 0))), C.cell_complex(seg(rv(0, 1, 0), rv(0, 1, 1))))
    assert C.verify_cubic_map(C.join_map(m1, m2)).ok
    a = C.inclusion_map(C.cell_complex(X_AXIS), C.cell_complex(X_AXIS))
    b = C.inclusion_map(C.cell_complex(Y_AXIS), C.cell_complex(Y_AXIS))
    assert C.verify_cubic_map(C.product_map(a, b)).ok


# --- serialization -----------------------------------------------------------------

def test_json_roundtrip_and_ids():
    K = build_complex(4).complex
    data = C.complex_to_json(K)
    assert data["ambient_dim"] == 4
    assert data["cells"][0]["kind"] == "empty" and data["cells"][0]["id"] == 0
    assert [c["dim"] for c in data["cells"]] == sorted(c["dim"] for c in data["cells"])
    back = C.complex_from_json(data)
    assert set(back) == set(K)
    assert C.complex_to_json(back) == data


# --- invariants ------------------------------------------------------------------

coords = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def general_cells(draw):
    """Random simplices (joins of points) in R^3 in general position."""
    k = draw(st.integers(1, 4))
    pts = [RatVec(draw(st.lists(coords, min_size=3, max_size=3))) for _ in range(k)]
    if rank([p - pts[0] for p in pts[1:]]) != k - 1:
        return None
    cell = C.point(pts[0])
    for p in pts[1:]:
        cell = C.join(cell, C.point(p))
    return cell


@settings(max_examples=40, deadline=None)
@given(general_cells(), st.randoms(use_true_random=False))
def test_cell_invariants(cell, rng):
    if cell is None:
        return
    assert cell.dim == cell.hull.dim
    assert cell.contains(random_point_in(cell, rng))
    # a point pushed off the hull is rejected
    if cell.dim < 3:
        normal = next(v for v in (rv(1, 0, 0), rv(0, 1, 0), rv(0, 0, 1)) if not cell.hull.contains_direction(v))
        assert not cell.contains(cell.vertices[0] + normal)
    fs = C.faces(cell)
    assert len(fs) == 2 ** len(cell.vertices)  # a simplex: all vertex subsets
    assert C.verify_complex(fs).ok


def test_json_tree_fallback_for_foreign_children():
    # anchor (1/2, 0) is not a vertex, so the factors are not faces of the cell
    cross = C.product(X_AXIS, seg(rv("1/2", -1), rv("1/2", 1)))
    assert cross.anchor == rv("1/2", 0)
    K = C.cell_complex(cross)
    data = C.complex_to_json(K)
    top = data["cells"][-1]
    assert top["children"] == [] and top["tree"]["kind"] == "product"
    assert set(C.complex_from_json(data)) == set(K)
