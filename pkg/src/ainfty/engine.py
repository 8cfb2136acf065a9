"""Parameter spaces, concatenation evaluators and the A-infinity forms.

Two flavours are implemented side by side:

* plain: weights in the open simplex E_n, concatenation ``beta``, cone map
  ``phi`` and the forms ``M(n) = beta o phi``;
* stable: weights with plateau widths in D_n, concatenation ``alpha``,
  cone map ``psi`` and ``M_stable(n) = alpha o psi``.

Weights and cone maps are exact rationals.  Only path evaluation is in
floating point; the verification predicates at the bottom compare the two
sides of each coherence identity pointwise.
"""

from __future__ import annotations

import functools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import associahedron as assoc
from .associahedron import DomainError, FaceIndex
from .geometry import RatVec, UsageError, rat, rat_to_str
from .paths import (BUMP, BumpFn, SmoothPath, check_composable, clamp, iota, make_path,
                    random_chain, random_poly_curve, smoothness_probe, SMOOTH_H, TOL_DERIV, TOL_POINT)

STRICT_UNIT_RATIO = 0.1
GRID_POINTS = 101


# ---------------------------------------------------------------------------
# weights


@dataclass(frozen=True)
class ConcatWeights:
    """A point of E_n: positive rationals summing to 1."""

    r: RatVec

    def __post_init__(self):
        r = RatVec(self.r)
        object.__setattr__(self, "r", r)
        if not r:
            raise UsageError("weights must be non-empty")
        if any(x <= 0 for x in r):
            raise DomainError(f"weights must be positive (boundary of E_n is excluded): {r!r}")
        if sum(r, Fraction(0)) != 1:
            raise DomainError(f"weights must sum to 1: {r!r}")

    @property
    def n(self) -> int:
        return len(self.r)

    def breakpoints(self) -> list[Fraction]:
        """v_1, ..., v_{n-1} with v_i = r_1 + ... + r_i."""
        out, acc = [], Fraction(0)
        for x in self.r[:-1]:
            acc += x
            out.append(acc)
        return out

    def to_json(self) -> dict:
        return {"r": self.r.to_json()}


@dataclass(frozen=True)
class StableConcatWeights:
    """A point of D_n: n widths r_i and n-1 plateau widths eps_i, all positive, total 1."""

    r: RatVec
    eps: RatVec

    def __post_init__(self):
        r, eps = RatVec(self.r), RatVec(self.eps)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "eps", eps)
        if not r or len(eps) != len(r) - 1:
            raise UsageError("need n widths and n-1 plateau widths")
        if any(x <= 0 for x in r) or any(x <= 0 for x in eps):
            raise DomainError(f"entries must be positive: {r!r}; {eps!r}")
        if sum(r, Fraction(0)) + sum(eps, Fraction(0)) != 1:
            raise DomainError(f"entries must sum to 1: {r!r}; {eps!r}")

    @property
    def n(self) -> int:
        return len(self.r)

    def starts(self) -> list[Fraction]:
        """s_1, ..., s_{n-1}: s_i = r_1+...+r_i + eps_1+...+eps_{i-1} (plateau i is [s_i, s_i+eps_i])."""
        out, acc = [], Fraction(0)
        for i in range(self.n - 1):
            acc += self.r[i]
            out.append(acc)
            acc += self.eps[i]
        return out

    def breakpoints(self) -> list[Fraction]:
        out = []
        for s, e in zip(self.starts(), self.eps):
            out += [s, s + e]
        return out

    def to_json(self) -> dict:
        return {"r": self.r.to_json(), "eps": self.eps.to_json()}


def e(n: int) -> ConcatWeights:
    """Barycentre (1/n, ..., 1/n) of E_n."""
    if n < 1:
        raise UsageError("n must be >= 1")
    return ConcatWeights(RatVec([Fraction(1, n)] * n))


def d(n: int) -> StableConcatWeights:
    """(2, ..., 2; 1, ..., 1) / (3n - 1)."""
    if n < 1:
        raise UsageError("n must be >= 1")
    q = 3 * n - 1
    return StableConcatWeights(RatVec([Fraction(2, q)] * n), RatVec([Fraction(1, q)] * (n - 1)))


def _check_index(k, r, s, x_n, y_n):
    if not assoc.in_index_set(k, r, s):
        raise IndexError(f"({k},{r},{s}) is not in A({r + s - 1})")
    if x_n != r or y_n != s:
        raise UsageError(f"weights have sizes ({x_n},{y_n}), expected ({r},{s})")


def dE(k: int, r: int, s: int, x: ConcatWeights, y: ConcatWeights) -> ConcatWeights:
    """Substitute y, scaled by x_k, into slot k of x."""
    _check_index(k, r, s, x.n, y.n)
    xk = x.r[k - 1]
    return ConcatWeights(RatVec(list(x.r[:k - 1]) + [xk * v for v in y.r] + list(x.r[k:])))


def dD(k: int, r: int, s: int, x: StableConcatWeights, y: StableConcatWeights) -> StableConcatWeights:
    """Stable face map: widths as in dE, inner plateaus scaled by x_k."""
    _check_index(k, r, s, x.n, y.n)
    xk = x.r[k - 1]
    rr = list(x.r[:k - 1]) + [xk * v for v in y.r] + list(x.r[k:])
    ee = list(x.eps[:k - 1]) + [xk * v for v in y.eps] + list(x.eps[k - 1:])
    return StableConcatWeights(RatVec(rr), RatVec(ee))


# ---------------------------------------------------------------------------
# concatenation


def _as_weights(w, stable: bool):
    if stable:
        if isinstance(w, StableConcatWeights):
            return w
        r, eps = w
        return StableConcatWeights(RatVec(r), RatVec(eps))
    return w if isinstance(w, ConcatWeights) else ConcatWeights(RatVec(w))


def beta(w, paths: Sequence[SmoothPath]) -> SmoothPath:
    """Concatenate n paths with time widths r_i.

    On [v_{i-1}, v_i] the value is u_i((t - v_{i-1}) / r_i); the first piece
    covers t <= v_1 and the last t >= v_{n-1}.
    """
    w = _as_weights(w, stable=False)
    paths = list(paths)
    if len(paths) != w.n:
        raise UsageError(f"{w.n} weights but {len(paths)} paths")
    check_composable(paths)
    if w.n == 1:
        return paths[0]
    lo = [0.0] + [float(v) for v in w.breakpoints()]
    width = [float(x) for x in w.r]
    first, last = paths[0], paths[-1]
    n = w.n

    def fn(t):
        if t <= 0.0:
            return first(0.0)
        if t >= 1.0:
            return last(1.0)
        for i in range(n - 1):
            if t < lo[i + 1]:
                return paths[i]((t - lo[i]) / width[i])
        return last((t - lo[-1]) / width[-1])

    return SmoothPath(fn, paths[0].d, paths[0].start, paths[-1].end,
                      ("beta", w.r, tuple(p.construction for p in paths)))


def alpha(w, paths: Sequence[SmoothPath]) -> SmoothPath:
    """Stable concatenation: piece i has width r_i, then a constant plateau of width eps_i."""
    w = _as_weights(w, stable=True)
    paths = list(paths)
    if len(paths) != w.n:
        raise UsageError(f"{w.n} widths but {len(paths)} paths")
    check_composable(paths)
    if w.n == 1:
        return paths[0]
    n = w.n
    starts = w.starts()
    # piece i (0-based) starts at s_i + eps_i, with s_0 + eps_0 = 0
    lo = [0.0] + [float(s + e_) for s, e_ in zip(starts, w.eps)]
    width = [float(x) for x in w.r]
    first, last = paths[0], paths[-1]

    def fn(t):
        if t <= 0.0:
            return first(0.0)
        if t >= 1.0:
            return last(1.0)
        for i in range(n - 1):
            if t < lo[i + 1]:
                return paths[i]((t - lo[i]) / width[i])
        return last((t - lo[-1]) / width[-1])

    return SmoothPath(fn, paths[0].d, paths[0].start, paths[-1].end,
                      ("alpha", w.r, w.eps, tuple(p.construction for p in paths)))


def mu(u: SmoothPath, v: SmoothPath) -> SmoothPath:
    """u(2t) for t <= 1/2, v(2t - 1) after."""
    return beta(e(2), [u, v])


def mu_eps(eps, u: SmoothPath, v: SmoothPath) -> SmoothPath:
    """Concatenation with a constant plateau of width eps in the middle."""
    eps = rat(eps)
    if not 0 < eps < 1:
        raise UsageError("eps must lie in (0, 1)")
    half = (1 - eps) / 2
    return alpha(StableConcatWeights(RatVec([half, half]), RatVec([eps])), [u, v])


def src(u: SmoothPath) -> RatVec:
    return u.start


def tgt(u: SmoothPath) -> RatVec:
    return u.end


# ---------------------------------------------------------------------------
# cone maps K_n -> E_n and K_n -> D_n


def _cone_map(n, t, via, base, face, center):
    t = RatVec(t)
    if n <= 2:
        if not assoc.contains(n, t):
            raise DomainError(f"{t!r} is not in K_{n}")
        return center(n)
    dec = assoc.facet_decompose(n, t, prefer=via)
    if dec.c == 1:
        return center(n)
    k, r, s = dec.index
    inner = face(k, r, s, base(r, dec.rho), base(s, dec.sigma))
    return inner, dec.c


@functools.lru_cache(maxsize=None)
def _phi(n: int, t: RatVec, via) -> ConcatWeights:
    out = _cone_map(n, t, via, lambda m, x: _phi(m, x, None), dE, e)
    if isinstance(out, ConcatWeights):
        return out
    inner, c = out
    center = e(n).r
    return ConcatWeights(RatVec(a * (1 - c) + b * c for a, b in zip(inner.r, center)))


@functools.lru_cache(maxsize=None)
def _psi(n: int, t: RatVec, via) -> StableConcatWeights:
    out = _cone_map(n, t, via, lambda m, x: _psi(m, x, None), dD, d)
    if isinstance(out, StableConcatWeights):
        return out
    inner, c = out
    center = d(n)
    return StableConcatWeights(
        RatVec(a * (1 - c) + b * c for a, b in zip(inner.r, center.r)),
        RatVec(a * (1 - c) + b * c for a, b in zip(inner.eps, center.eps)))


def phi(n: int, t, via: FaceIndex | None = None) -> ConcatWeights:
    """Cone map K_n -> E_n, extended radially from the facets.

    ``t = (1-c) * ∂_k(rho, sigma) + c * b_n`` gives
    ``phi(t) = (1-c) * dE_k(phi(rho), phi(sigma)) + c * e(n)``.
    ``via`` forces the outermost facet (for ridge checks).
    """
    return _phi(n, RatVec(t), FaceIndex(*via) if via is not None else None)


def psi(n: int, t, via: FaceIndex | None = None) -> StableConcatWeights:
    """Stable cone map K_n -> D_n, same recursion with dD and d(n)."""
    return _psi(n, RatVec(t), FaceIndex(*via) if via is not None else None)


def _perturbed(w: ConcatWeights, delta: Fraction) -> ConcatWeights:
    if not delta or w.n < 2:
        return w
    r = list(w.r)
    r[0] += delta
    r[1] -= delta
    return ConcatWeights(RatVec(r))


def M(n: int, t, paths: Sequence[SmoothPath], perturb=0) -> SmoothPath:
    """The n-ary form beta(phi(n, t), paths).

    ``perturb`` shifts weight from r_2 to r_1 by an exact amount; it exists
    only so the harness can check that it detects a broken form.
    """
    w = phi(n, t)
    if perturb:
        w = _perturbed(w, rat(perturb))
    return beta(w, paths)


def M_stable(n: int, t, paths: Sequence[SmoothPath]) -> SmoothPath:
    return alpha(psi(n, t), paths)


# ---------------------------------------------------------------------------
# verification


@dataclass
class AInftyReport:
    """Outcome of one coherence check; ``passed`` iff ``max_dev <= tol`` (or >= for strict unit failure)."""

    condition: str
    n: int | None
    max_dev: float
    tol: float
    samples: int
    passed: bool
    k: int | None = None
    r: int | None = None
    s: int | None = None
    j: int | None = None
    flavor: str = "plain"
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"condition": self.condition, "flavor": self.flavor, "n": self.n}
        for key in ("k", "r", "s", "j"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        out.update(samples=self.samples, max_dev=self.max_dev, tol=self.tol, **self.extra)
        out["pass"] = self.passed
        return out


def time_grid(breaks: Sequence = (), points: int = GRID_POINTS) -> list[float]:
    """``points`` equispaced times in [0, 1] plus the given breakpoints, sorted."""
    ts = {i / (points - 1) for i in range(points)}
    ts.update(float(b) for b in breaks)
    return sorted(ts)


def _dist_inf(a, b) -> float:
    return max(abs(x - y) for x, y in zip(a, b))


def _dist2(a, b) -> float:
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(a, b)))


def _max_dev(f, g, ts) -> float:
    return max(_dist_inf(f(t), g(t)) for t in ts)


def _form(stable: bool):
    return (M_stable, psi, dD, alpha) if stable else (M, phi, dE, beta)


def verify_condition0(n: int, t, paths: Sequence[SmoothPath], stable: bool = False) -> AInftyReport:
    """Endpoints of M(n)(t; paths) are the start of the first and end of the last path.

    Checks the exact endpoint data and that evaluation at t <= 0 and t >= 1
    reproduces the endpoint values bit for bit.
    """
    form = _form(stable)[0]
    out = form(n, t, paths)
    exact = out.start == paths[0].start and out.end == paths[-1].end
    dev = 0.0
    for tt, ref in ((-1.0, paths[0](0.0)), (0.0, paths[0](0.0)), (1.0, paths[-1](1.0)), (2.0, paths[-1](1.0))):
        dev = max(dev, _dist_inf(out(tt), ref))
    return AInftyReport("0", n, dev, 0.0, 1, exact and dev == 0.0,
                        flavor="stable" if stable else "plain")


def _pair_samples(r: int, s: int, count: int, seed: int, den: int):
    rhos = list(dict.fromkeys(assoc.sample_points(r, count, seed, den)))
    sigmas = list(dict.fromkeys(assoc.sample_points(s, count, seed + 1, den)))
    pairs = [(a, b) for a in rhos for b in sigmas]
    rng = random.Random(f"pairs-{r}-{s}-{seed}")
    head, tail = pairs[:1], pairs[1:]
    rng.shuffle(tail)
    pairs = head + tail
    # K_2 is a point, so small cases repeat pairs (each gets fresh paths)
    return [pairs[i % len(pairs)] for i in range(count)]


def verify_condition1(n: int, k: int, r: int, s: int, samples: int = 3, d_: int = 2, seed: int = 0,
                      den: int = 8, tol: float = TOL_POINT, stable: bool = False,
                      perturb=0, grid: int = GRID_POINTS) -> AInftyReport:
    """M(n)(∂_k(rho, sigma); g) against M(r)(rho; ..., M(s)(sigma; g_k..), ...).

    ``samples`` (rho, sigma) pairs are drawn from rational grids (b_r, b_s
    first), each with a fresh seeded chain of polynomial factory paths in
    R^d_.  Comparison is pointwise on a 101-point grid plus all breakpoints.
    """
    if r + s - 1 != n or not assoc.in_index_set(k, r, s, n):
        raise IndexError(f"({k},{r},{s}) is not in A({n})")
    form, cone, _, concat = _form(stable)
    worst, configs, points = 0.0, 0, 0
    for idx, (rho, sigma) in enumerate(_pair_samples(r, s, samples, seed, den)):
        g = random_chain(n, d_, seed * 1000 + idx)
        t = assoc.d_face(k, r, s, rho, sigma)
        if stable:
            lhs = M_stable(n, t, g)
            inner = M_stable(s, sigma, g[k - 1:k + s - 1])
            rhs = M_stable(r, rho, g[:k - 1] + [inner] + g[k + s - 1:])
        else:
            lhs = M(n, t, g, perturb=perturb)
            inner = M(s, sigma, g[k - 1:k + s - 1])
            rhs = M(r, rho, g[:k - 1] + [inner] + g[k + s - 1:])
        w = cone(n, t)
        outer = cone(r, rho)
        ts = time_grid(list(w.breakpoints()) + list(outer.breakpoints()), grid)
        worst = max(worst, _max_dev(lhs, rhs, ts))
        configs += 1
        points += len(ts)
    return AInftyReport("1", n, worst, tol, configs, worst <= tol, k=k, r=r, s=s,
                        flavor="stable" if stable else "plain", extra={"points": points})


def _unit_chain(d_: int, seed: int, bump_fn: BumpFn = BUMP):
    rng = random.Random(f"unit-{d_}-{seed}")
    curve = random_poly_curve(d_, rng, degree=3)
    return make_path(curve, bump_fn)


def verify_condition2prime(g: SmoothPath, stable: bool = False, tol: float = TOL_POINT,
                           grid: int = GRID_POINTS) -> AInftyReport:
    """Both units are reparametrizations of g.

    plain:  M(2)(b_2; ι(x), g)(t) = g(clamp(2t-1)),  M(2)(b_2; g, ι(y))(t) = g(clamp(2t))
    stable: the same with the widths (r_1, r_2; ε_1) of d(2).
    """
    b2 = assoc.interior_point(2)
    left = [iota(g.start), g]
    right = [g, iota(g.end)]
    if stable:
        w = d(2)
        r1, r2, e1 = (float(x) for x in (w.r[0], w.r[1], w.eps[0]))
        lhs_l, lhs_r = M_stable(2, b2, left), M_stable(2, b2, right)
        wit_l = lambda t: g(clamp((t - r1 - e1) / r2))
        wit_r = lambda t: g(clamp(t / r1))
        breaks = w.breakpoints()
    else:
        lhs_l, lhs_r = M(2, b2, left), M(2, b2, right)
        wit_l = lambda t: g(clamp(2 * t - 1))
        wit_r = lambda t: g(clamp(2 * t))
        breaks = [Fraction(1, 2)]
    ts = time_grid(breaks, grid)
    dev = max(_max_dev(lhs_l, wit_l, ts), _max_dev(lhs_r, wit_r, ts))
    return AInftyReport("2'", 2, dev, tol, 2 * len(ts), dev <= tol,
                        flavor="stable" if stable else "plain")


def image_diameter(g: SmoothPath, ts: Sequence[float]) -> float:
    pts = [g(t) for t in ts]
    return max((_dist2(a, b) for i, a in enumerate(pts) for b in pts[i + 1:]), default=0.0)


def verify_strict_unit_failure(g: SmoothPath, stable: bool = False,
                               ratio: float = STRICT_UNIT_RATIO, grid: int = GRID_POINTS) -> AInftyReport:
    """Show that ι is not a strict unit: M(2)(b_2; ι(x), g) differs visibly from g.

    Passes when the max Euclidean deviation is at least ``ratio`` times the
    diameter of g's sampled image.  Raises UsageError for constant g.
    """
    b2 = assoc.interior_point(2)
    ts = time_grid((), grid)
    diam = image_diameter(g, ts)
    if diam == 0:
        raise UsageError("strict-unit check needs a non-constant path")
    form = M_stable if stable else M
    out = form(2, b2, [iota(g.start), g])
    dev = max(_dist2(out(t), g(t)) for t in ts)
    threshold = ratio * diam
    return AInftyReport("2", 2, dev, threshold, len(ts), dev >= threshold,
                        flavor="stable" if stable else "plain",
                        extra={"diameter": diam, "mode": "expect_failure"})


def verify_plateaus(w: StableConcatWeights, paths: Sequence[SmoothPath], tol: float = TOL_POINT,
                    per_plateau: int = 11) -> AInftyReport:
    """alpha(w, paths) is constant, equal to u_i(1), on each [s_i, s_i + eps_i]."""
    out = alpha(w, paths)
    worst, count = 0.0, 0
    for i, (s, e_) in enumerate(zip(w.starts(), w.eps)):
        ref = paths[i](1.0)
        for j in range(per_plateau):
            t = float(s + e_ * Fraction(j, per_plateau - 1))
            worst = max(worst, _dist_inf(out(t), ref))
            count += 1
    return AInftyReport("plateau", w.n, worst, tol, count, worst <= tol, flavor="stable")


def verify_mu_eps_smoothness(eps, u: SmoothPath, v: SmoothPath, max_order: int = 3,
                             tol: float = TOL_DERIV) -> AInftyReport:
    """Smoothness probes of mu_eps(u, v) at both plateau ends and its middle.

    The step is measured in the pieces' own parameter: each piece has width
    (1-eps)/2, so the probe uses ``SMOOTH_H * (1-eps)`` (equal to SMOOTH_H
    for plain mu).  A fixed step would sample ever deeper into the bump's
    transition layer as eps grows.
    """
    eps = rat(eps)
    out = mu_eps(eps, u, v)
    h = SMOOTH_H * float(1 - eps)
    worst, count, ok = 0.0, 0, True
    for t0 in ((1 - eps) / 2, Fraction(1, 2), (1 + eps) / 2):
        rep = smoothness_probe(out, float(t0), max_order, h=h, tol=tol)
        ok = ok and rep.passed
        for entry in rep.entries:
            worst = max(worst, entry.estimate / max(1.0, abs(entry.left), abs(entry.right)))
            count += 1
    return AInftyReport("smooth", 2, worst, tol, count, ok, flavor="stable",
                        extra={"eps": rat_to_str(eps), "h": h})


def ridge_consistency(n: int, count: int = 10, seed: int = 0, stable: bool = False) -> AInftyReport:
    """phi (or psi) evaluated through every facet containing the exit point agrees exactly."""
    cone = psi if stable else phi
    pts = assoc.ridge_points(n, count, seed)
    bad = 0
    for t in pts:
        p, _ = assoc.ray_to_boundary(n, t)
        vals = {cone(n, t, via=idx) for idx in assoc.facets_containing(n, p)}
        bad += len(vals) > 1
    return AInftyReport("ridge", n, float(bad), 0.0, len(pts), bad == 0 and len(pts) >= min(count, 1),
                        flavor="stable" if stable else "plain")


def check_cone_invariants(n: int, t) -> bool:
    """phi(t) in E_n and psi(t) in D_n exactly (constructors validate)."""
    try:
        phi(n, t)
        psi(n, t)
    except DomainError:
        return False
    return True
