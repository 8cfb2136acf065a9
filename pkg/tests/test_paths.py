import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from ainfty import engine
from ainfty.geometry import UsageError, rv
from ainfty.paths import (BUMP, BUMP_SQ, ComposabilityError, Curve, bump, bump_derivative, check_composable,
                          clamp, const_curve, coordinate_functional, finite_diff, flatness_probe, iota,
                          line_curve, make_path, naive_path, one_sided_diff, poly_curve, random_chain,
                          random_functional, smoothness_probe, trig_curve)

LINE = make_path(poly_curve([[0, 1]]))


def test_clamp():
    assert clamp(-0.5) == 0
    assert clamp(0.3) == 0.3
    assert clamp(2) == 1
    for t in (-3.0, -0.1, 0.0, 0.2, 0.5, 0.9, 1.0, 7.0):
        assert clamp(clamp(t)) == clamp(t)
        assert clamp(t) + clamp(1 - t) == 1


def test_bump_values():
    assert bump(0.5) == 0.5
    assert bump(-1) == 0 and bump(0) == 0 and bump(1) == 1 and bump(3) == 1
    assert abs(bump(0.25) + bump(0.75) - 1) <= 1e-15
    # independent closed form at 1/4: exp(-4) / (exp(-4) + exp(-4/3))
    assert bump(0.25) == pytest.approx(math.exp(-4) / (math.exp(-4) + math.exp(-4 / 3)), rel=1e-15)
    assert bump(0.25) == pytest.approx(0.06496916912866406, abs=1e-16)


@pytest.mark.parametrize("lam", [BUMP, BUMP_SQ], ids=lambda b: b.name)
def test_bump_properties_on_10k_points(lam):
    rng = random.Random(0)
    for _ in range(10_000):
        t = rng.uniform(-1, 2)
        v = lam(t)
        assert 0 <= v <= 1
        assert abs(v + lam(1 - t) - 1) <= 1e-15
        if t <= 0:
            assert v == 0
        if t >= 1:
            assert v == 1
    grid = [lam(i / 1000) for i in range(0, 1001)]
    assert all(a <= b for a, b in zip(grid, grid[1:]))
    # near the ends λ and 1-λ fall below double resolution, so strictness is only visible inside
    inner = grid[200:801]
    assert all(a < b for a, b in zip(inner, inner[1:]))


def test_bump_derivative_oracles():
    assert bump_derivative(0.5) == 2.0
    fwd = one_sided_diff(bump, 0.5, 1, side=1)
    assert abs(finite_diff(bump, 0.5, 1) - fwd) <= 1e-6
    assert abs(finite_diff(bump, 0.3, 1) - bump_derivative(0.3)) <= 1e-6


def test_finite_diff_examples():
    assert abs(finite_diff(lambda t: t * t, 0.7, 2) - 2) <= 1e-8
    assert abs(finite_diff(lambda t: t * t, -3.0, 2) - 2) <= 1e-8
    assert abs(finite_diff(math.sin, 0.0, 1) - 1) <= 1e-8
    assert finite_diff(lambda t: 5.0, 0.1, 0) == 5.0
    assert abs(finite_diff(lambda t: t ** 4, 0.0, 4) - 24) <= 1e-4
    with pytest.raises(UsageError):
        finite_diff(math.sin, 0.0, 5)
    with pytest.raises(UsageError):
        finite_diff(math.sin, 0.0, 1, h=0)


def test_one_sided_matches_exact_polynomial_derivatives():
    f = lambda t: t ** 3 - 2 * t
    for side in (-1, 1):
        assert abs(one_sided_diff(f, 0.4, 1, side=side) - (3 * 0.16 - 2)) <= 1e-7
        assert abs(one_sided_diff(f, 0.4, 3, side=side) - 6) <= 1e-4


def test_make_path_line():
    assert LINE(0) == (0.0,) and LINE(1) == (1.0,) and LINE(0.5) == (0.5,)
    assert LINE.start == rv(0) and LINE.end == rv(1)


def test_constant_curve_is_iota():
    u = make_path(const_curve(["1/2", 3]))
    c = iota(rv("1/2", 3))
    for t in (-1, 0, 0.3, 1, 2):
        assert u(t) == c(t) == (0.5, 3.0)
    assert u.start == u.end == rv("1/2", 3)


def test_half_circle():
    u = make_path(trig_curve([0, 0], [[1], [0]], [[0], [1]]))
    assert u.start == rv(1, 0) and u.end == rv(-1, 0)
    x, y = u(0.5)
    assert abs(x) <= 1e-15 and y == pytest.approx(1.0)
    for t in (0.1, 0.4, 0.8):
        x, y = u(t)
        assert x * x + y * y == pytest.approx(1.0)


def test_curve_json():
    spec = {"kind": "poly", "coeffs": [["1/2", 1], [0, 0, "-1/3"]]}
    c = Curve.from_json(spec)
    assert c.d == 2
    assert c.value_at(0) == rv("1/2", 0) and c.value_at(1) == rv("3/2", "-1/3")
    assert Curve.from_json(c.to_json()).to_json() == c.to_json()
    t = Curve.from_json({"kind": "trig", "offset": [1], "cos": [[0, 2]], "sin": [[1]]})
    assert t.value_at(0) == rv(3) and t.value_at(1) == rv(3)
    assert Curve.from_json({"kind": "const", "value": [2, 3]}).d == 2
    with pytest.raises(UsageError):
        Curve.from_json({"kind": "spline"})


def test_composability():
    a = make_path(line_curve([0, 0], [1, 0]))
    b = make_path(line_curve([1, 0], [1, 1]))
    c = make_path(line_curve([0, 0], [2, 2]))
    check_composable([a, b])
    with pytest.raises(ComposabilityError, match="junction 1->2"):
        check_composable([a, b, c])


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5, allow_nan=False), st.integers(0, 1000))
def test_paths_are_stationary(t, seed):
    u = random_chain(1, 2, seed)[0]
    assert u(t) == u(clamp(t))


def test_flatness_probe_constant_path():
    rep = flatness_probe(iota(rv(1, 2)), lambda x: x[0] * x[1] ** 2, 0.0, 3)
    assert rep.passed and all(e.estimate == 0 for e in rep.entries)
    assert rep.to_json()[0].keys() == {"order", "estimate", "tol", "pass"}


def test_flatness_probe_line_at_zero():
    rep = flatness_probe(LINE, lambda x: x[0], 0.0, 3)
    assert rep.passed
    # analytic oracle: λ and its derivatives are below exp(-1/(2h)) * poly(1/h) on the stencil
    assert all(abs(e.estimate) <= 1e-5 for e in rep.entries)


def test_flatness_probe_rejects_kink():
    rep = flatness_probe(naive_path(poly_curve([[0, 1]])), lambda x: x[0], 0.0, 3)
    assert not rep.passed
    assert not rep.entries[0].passed


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 3))
def test_flatness_for_factory_paths(seed, d):
    rng = random.Random(seed)
    u = random_chain(1, d, seed)[0]
    phis = [coordinate_functional(d, 0), random_functional(d, rng, degree=3)]
    for f in phis:
        for t0 in (0.0, 1.0):
            assert flatness_probe(u, f, t0, 3, h=1e-2, tol=1e-5).passed


def test_smoothness_interior():
    u = make_path(poly_curve([[0, 1, "-1/2", 1], [1, -1, 0, "1/3"]]))
    assert smoothness_probe(u, 0.5, 3).passed
    assert smoothness_probe(u, 0.3, 3).passed


def test_smoothness_at_mu_junction():
    u, v = random_chain(2, 2, 7)
    assert smoothness_probe(engine.mu(u, v), 0.5, 3).passed


def test_smoothness_rejects_naive_concatenation():
    a = poly_curve([[0, 1]])
    b = poly_curve([[1, 3]])
    w = engine.mu(naive_path(a), naive_path(b))
    rep = smoothness_probe(w, 0.5, 3)
    assert not rep.passed
    first = rep.entries[0]
    assert first.left == pytest.approx(2.0, abs=1e-6) and first.right == pytest.approx(6.0, abs=1e-6)
