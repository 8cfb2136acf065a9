"""Stationary smooth paths in R^d and finite-difference probes.

A path is a map R -> R^d that is constant on (-inf, 0] and on [1, inf).
Test paths are curves reparametrized through a bump function, which makes
every derivative vanish at both ends.  Endpoints are carried exactly (as
rationals) so that composability can be checked without tolerances;
evaluation itself is double precision.
"""

from __future__ import annotations

import functools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .geometry import RatVec, UsageError

# pointwise identities (pure re-bracketing) vs. derivative probes
TOL_POINT = 1e-12
TOL_DERIV = 1e-5
PROBE_H = 1e-2
# one-sided stencils need a smaller step: at h = 1e-2 they reach into the
# exp(-1/t) transition layer, whose derivatives are O(10) there
SMOOTH_H = 2e-3


class ComposabilityError(ValueError):
    """Consecutive paths do not meet: ``end(u_i) != start(u_{i+1})``."""


def clamp(t: float) -> float:
    """max(0, min(1, t))."""
    return 0.0 if t <= 0 else (1.0 if t >= 1 else t)


# ---------------------------------------------------------------------------
# bump functions


def _g_exp(t: float) -> float:
    return math.exp(-1.0 / t) if t > 0 else 0.0


def _g_exp_sq(t: float) -> float:
    return math.exp(-1.0 / (t * t)) if t > 0 else 0.0


@dataclass(frozen=True)
class BumpFn:
    """λ = g(t) / (g(t) + g(1-t)) for a flat germ g vanishing on t <= 0.

    Any such λ is 0 for t <= 0, 1 for t >= 1, satisfies
    λ(t) + λ(1-t) = 1 and is strictly increasing on (0, 1).
    """

    name: str
    germ: Callable[[float], float]

    def __call__(self, t: float) -> float:
        if t <= 0:
            return 0.0
        if t >= 1:
            return 1.0
        a, b = self.germ(t), self.germ(1.0 - t)
        return a / (a + b)


BUMP = BumpFn("exp", _g_exp)
BUMP_SQ = BumpFn("exp_sq", _g_exp_sq)
BUMPS = {b.name: b for b in (BUMP, BUMP_SQ)}


def bump(t: float) -> float:
    return BUMP(t)


def bump_derivative(t: float) -> float:
    """Closed form of d/dt bump(t) for the default germ exp(-1/t)."""
    if t <= 0 or t >= 1:
        return 0.0
    a, b = _g_exp(t), _g_exp(1.0 - t)
    da, db = a / (t * t), b / ((1.0 - t) ** 2)
    return (da * b + a * db) / (a + b) ** 2


# ---------------------------------------------------------------------------
# curves


def _rat_loose(x) -> Fraction:
    # floats are accepted here (exact binary value); geometry code stays strict
    return Fraction(x) if not isinstance(x, str) else Fraction(x.strip())


@dataclass(frozen=True)
class Curve:
    """A curve [0,1] -> R^d with exactly known endpoints.

    kinds:
      ``const``  value[i]
      ``poly``   coeffs[i][k] is the coefficient of s**k in coordinate i
      ``trig``   offset[i] + sum_m cos[i][m-1] cos(pi m s) + sin[i][m-1] sin(pi m s)
    """

    kind: str
    data: dict = field(hash=False, compare=False)
    key: tuple = ()

    @property
    def d(self) -> int:
        if self.kind == "const":
            return len(self.data["value"])
        if self.kind == "poly":
            return len(self.data["coeffs"])
        return len(self.data["offset"])

    def __call__(self, s: float) -> tuple[float, ...]:
        if self.kind == "const":
            return self.data["_fvalue"]
        if self.kind == "poly":
            out = []
            for cs in self.data["_fcoeffs"]:
                acc = 0.0
                for c in reversed(cs):
                    acc = acc * s + c
                out.append(acc)
            return tuple(out)
        out = []
        for o, cs, ss in zip(self.data["_foffset"], self.data["_fcos"], self.data["_fsin"]):
            acc = o
            for m, c in enumerate(cs, 1):
                acc += c * math.cos(math.pi * m * s)
            for m, c in enumerate(ss, 1):
                acc += c * math.sin(math.pi * m * s)
            out.append(acc)
        return tuple(out)

    def value_at(self, end: int) -> RatVec:
        """Exact value at s = 0 or s = 1."""
        if self.kind == "const":
            return RatVec(self.data["value"])
        if self.kind == "poly":
            if end == 0:
                return RatVec(cs[0] if cs else 0 for cs in self.data["coeffs"])
            return RatVec(sum(cs, Fraction(0)) for cs in self.data["coeffs"])
        sign = 1 if end == 0 else -1
        return RatVec(o + sum((c * sign ** m for m, c in enumerate(cs, 1)), Fraction(0))
                      for o, cs in zip(self.data["offset"], self.data["cos"]))

    def to_json(self) -> dict:
        from .geometry import rat_to_str
        if self.kind == "const":
            return {"kind": "const", "value": [rat_to_str(v) for v in self.data["value"]]}
        if self.kind == "poly":
            return {"kind": "poly", "coeffs": [[rat_to_str(c) for c in cs] for cs in self.data["coeffs"]]}
        return {"kind": "trig",
                "offset": [rat_to_str(v) for v in self.data["offset"]],
                "cos": [[rat_to_str(c) for c in cs] for cs in self.data["cos"]],
                "sin": [[rat_to_str(c) for c in cs] for cs in self.data["sin"]]}

    @classmethod
    def from_json(cls, spec: dict) -> "Curve":
        kind = spec.get("kind")
        if kind == "const":
            return const_curve(spec["value"])
        if kind == "poly":
            return poly_curve(spec["coeffs"])
        if kind == "trig":
            d = len(spec["offset"])
            return trig_curve(spec["offset"], spec.get("cos", [[]] * d), spec.get("sin", [[]] * d))
        raise UsageError(f"unknown curve kind {kind!r}")


def const_curve(value: Sequence) -> Curve:
    v = tuple(_rat_loose(x) for x in value)
    return Curve("const", {"value": v, "_fvalue": tuple(float(x) for x in v)}, ("const", v))


def poly_curve(coeffs: Sequence[Sequence]) -> Curve:
    cs = tuple(tuple(_rat_loose(c) for c in row) for row in coeffs)
    if not cs:
        raise UsageError("poly curve needs at least one coordinate")
    data = {"coeffs": cs, "_fcoeffs": tuple(tuple(float(c) for c in row) for row in cs)}
    return Curve("poly", data, ("poly", cs))


def trig_curve(offset: Sequence, cos: Sequence[Sequence], sin: Sequence[Sequence]) -> Curve:
    off = tuple(_rat_loose(x) for x in offset)
    cc = tuple(tuple(_rat_loose(c) for c in row) for row in cos)
    ss = tuple(tuple(_rat_loose(c) for c in row) for row in sin)
    if not (len(off) == len(cc) == len(ss)):
        raise UsageError("trig curve: offset, cos and sin need one row per coordinate")
    data = {"offset": off, "cos": cc, "sin": ss,
            "_foffset": tuple(map(float, off)),
            "_fcos": tuple(tuple(map(float, r)) for r in cc),
            "_fsin": tuple(tuple(map(float, r)) for r in ss)}
    return Curve("trig", data, ("trig", off, cc, ss))


def line_curve(a: Sequence, b: Sequence) -> Curve:
    """Straight segment from a to b."""
    a = [_rat_loose(x) for x in a]
    b = [_rat_loose(x) for x in b]
    return poly_curve([[x, y - x] for x, y in zip(a, b)])


def random_poly_curve(d: int, rng: random.Random, degree: int = 3, start=None, den: int = 64) -> Curve:
    """Seeded polynomial curve with rational coefficients in [-1, 1]."""
    rows = []
    for i in range(d):
        cs = [Fraction(rng.randint(-den, den), den) for _ in range(degree + 1)]
        if start is not None:
            cs[0] = Fraction(start[i])
        rows.append(cs)
    return poly_curve(rows)


# ---------------------------------------------------------------------------
# paths


class SmoothPath:
    """u : R -> R^d with u(t) = u(clamp(t)).

    ``fn`` is only ever called on [0, 1]; ``start``/``end`` are exact.
    ``construction`` is a nested tuple describing how the path was built.
    """

    __slots__ = ("fn", "d", "start", "end", "construction")

    def __init__(self, fn, d: int, start: RatVec, end: RatVec, construction=("custom",)):
        self.fn = fn
        self.d = d
        self.start = RatVec(start)
        self.end = RatVec(end)
        self.construction = construction

    def __call__(self, t: float) -> tuple[float, ...]:
        return self.fn(clamp(float(t)))

    def __repr__(self):
        return f"SmoothPath(d={self.d}, {self.construction[0]}, {self.start!r} -> {self.end!r})"


def make_path(curve: Curve, bump_fn: BumpFn = BUMP) -> SmoothPath:
    """u(t) = curve(λ(clamp(t))): flat to all orders at t = 0 and t = 1."""
    return SmoothPath(lambda t: curve(bump_fn(t)), curve.d, curve.value_at(0), curve.value_at(1),
                      ("curve", curve.kind, bump_fn.name))


def naive_path(curve: Curve) -> SmoothPath:
    """u(t) = curve(clamp(t)) with no reparametrization.

    Generally NOT smooth (kinks at 0 and 1); used as a counterexample.
    """
    return SmoothPath(curve, curve.d, curve.value_at(0), curve.value_at(1), ("naive", curve.kind))


def iota(x) -> SmoothPath:
    """The constant path at x."""
    x = RatVec(x)
    fx = x.to_floats()
    return SmoothPath(lambda t: fx, len(x), x, x, ("const",))


def src(u: SmoothPath) -> RatVec:
    return u.start


def tgt(u: SmoothPath) -> RatVec:
    return u.end


def check_composable(paths: Sequence[SmoothPath]):
    if not paths:
        raise UsageError("need at least one path")
    d = paths[0].d
    for i in range(len(paths) - 1):
        if paths[i + 1].d != d:
            raise ComposabilityError(f"paths {i} and {i + 1} have different dimensions")
        if paths[i].end != paths[i + 1].start:
            raise ComposabilityError(
                f"junction {i}->{i + 1}: end {paths[i].end!r} != start {paths[i + 1].start!r}")


def random_chain(n: int, d: int, seed: int, degree: int = 3, bump_fn: BumpFn = BUMP) -> list[SmoothPath]:
    """n composable factory paths with seeded polynomial curves."""
    rng = random.Random(f"chain-{n}-{d}-{seed}")
    paths = []
    start = None
    for _ in range(n):
        c = random_poly_curve(d, rng, degree, start=start)
        paths.append(make_path(c, bump_fn))
        start = c.value_at(1)
    return paths


# ---------------------------------------------------------------------------
# finite differences

_CENTRAL = {
    0: ((0, 1.0),),
    1: ((1, 0.5), (-1, -0.5)),
    2: ((1, 1.0), (0, -2.0), (-1, 1.0)),
    3: ((2, 0.5), (1, -1.0), (-1, 1.0), (-2, -0.5)),
    4: ((2, 1.0), (1, -4.0), (0, 6.0), (-1, -4.0), (-2, 1.0)),
}


def _central(f, t0, m, h):
    return sum(w * f(t0 + j * h) for j, w in _CENTRAL[m]) / h ** m


def finite_diff(f: Callable[[float], float], t0: float, m: int, h: float = PROBE_H) -> float:
    """Central-difference estimate of f^(m)(t0), Richardson-extrapolated.

    The base stencils are second order; combining steps h and h/2 cancels
    the h^2 term, leaving an O(h^4) truncation error.
    """
    if not 0 <= m <= 4:
        raise UsageError("order must be between 0 and 4")
    if h <= 0:
        raise UsageError("h must be positive")
    d1 = _central(f, t0, m, h)
    d2 = _central(f, t0, m, h / 2)
    return (4 * d2 - d1) / 3


@functools.lru_cache(maxsize=None)
def _one_sided_weights(m: int, npts: int) -> tuple[Fraction, ...]:
    """Exact weights w_j with sum_j w_j f(j h) ~ h^m f^(m)(0), j = 0..npts-1."""
    from .geometry import solve_linear
    cols = [[Fraction(j) ** p for p in range(npts)] for j in range(npts)]
    rhs = [Fraction(math.factorial(m)) if p == m else Fraction(0) for p in range(npts)]
    x, _ = solve_linear(cols, rhs)
    return tuple(x)


_ONE_SIDED_ACCURACY = 3


def one_sided_diff(f: Callable[[float], float], t0: float, m: int, h: float = SMOOTH_H,
                   side: int = 1) -> float:
    """One-sided estimate of f^(m)(t0) using points on one side only.

    ``side=+1`` samples t0, t0+h, ...; ``side=-1`` samples t0, t0-h, ....
    A third-order stencil at steps h and h/2 is Richardson-combined, so
    the truncation error is O(h^4).
    """
    npts = m + _ONE_SIDED_ACCURACY
    w = [float(x) for x in _one_sided_weights(m, npts)]
    sgn = float(side) ** m

    def est(step):
        return sgn * sum(wj * f(t0 + side * j * step) for j, wj in enumerate(w)) / step ** m

    p = 2 ** _ONE_SIDED_ACCURACY
    return (p * est(h / 2) - est(h)) / (p - 1)


@dataclass
class ProbeEntry:
    order: int
    estimate: float
    tol: float
    passed: bool
    coord: int = 0
    left: float | None = None
    right: float | None = None

    def to_json(self) -> dict:
        out = {"order": self.order, "estimate": self.estimate, "tol": self.tol, "pass": self.passed}
        if self.left is not None:
            out.update(coord=self.coord, left=self.left, right=self.right)
        return out


@dataclass
class ProbeReport:
    t0: float
    entries: list[ProbeEntry]

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def to_json(self) -> list[dict]:
        return [e.to_json() for e in self.entries]


def flatness_probe(u, phi: Callable[[Sequence[float]], float], t0: float, max_order: int = 3,
                   h: float = PROBE_H, tol: float = TOL_DERIV) -> ProbeReport:
    """Check that every derivative of phi∘u up to ``max_order`` vanishes at t0."""
    f = lambda t: phi(u(t))
    entries = []
    for m in range(1, max_order + 1):
        est = finite_diff(f, t0, m, h)
        entries.append(ProbeEntry(m, est, tol, abs(est) <= tol))
    return ProbeReport(t0, entries)


def smoothness_probe(u, t0: float, max_order: int = 3, h: float = SMOOTH_H,
                     tol: float = TOL_DERIV) -> ProbeReport:
    """Compare left and right one-sided derivatives of each coordinate at t0.

    Passes when ``|left - right| <= tol * max(1, |left|, |right|)`` for
    orders 1..max_order; a jump in any derivative fails.  Points deep in
    the transition layer of the bump (t within ~0.05 of an end of a
    bumped segment) can give false failures: the derivatives there vary on
    a scale comparable to the stencil.
    """
    d = len(u(t0))
    entries = []
    for i in range(d):
        f = lambda t, i=i: u(t)[i]
        for m in range(1, max_order + 1):
            left = one_sided_diff(f, t0, m, h, side=-1)
            right = one_sided_diff(f, t0, m, h, side=1)
            dev = abs(left - right)
            scale = max(1.0, abs(left), abs(right))
            entries.append(ProbeEntry(m, dev, tol, dev <= tol * scale, coord=i, left=left, right=right))
    return ProbeReport(t0, entries)


@dataclass(frozen=True)
class PolyFunctional:
    """phi(x) = sum_i c_i * prod_j x_j ** e_ij, a polynomial test functional on R^d."""

    terms: tuple  # of (coefficient, exponent tuple)

    @property
    def degree(self) -> int:
        return max((sum(ex) for _, ex in self.terms), default=0)

    def __call__(self, x: Sequence[float]) -> float:
        total = 0.0
        for c, ex in self.terms:
            term = c
            for xi, k in zip(x, ex):
                if k:
                    term *= xi ** k
            total += term
        return total


def coordinate_functional(d: int, i: int) -> PolyFunctional:
    return PolyFunctional(((1.0, tuple(1 if j == i else 0 for j in range(d))),))


def random_functional(d: int, rng: random.Random, degree: int = 3, terms: int = 4) -> PolyFunctional:
    """Seeded polynomial of total degree <= ``degree`` with coefficients in [-1, 1]."""
    out = []
    for _ in range(terms):
        ex = [0] * d
        for _ in range(rng.randint(1, degree)):
            ex[rng.randrange(d)] += 1
        out.append((rng.uniform(-1, 1), tuple(ex)))
    return PolyFunctional(tuple(out))
