"""Command-line front end.

    ainfty build --n 5 [--complex] [--out FILE]
    ainfty verify --suite {cubic,assoc,ainfty,stable,all} --n 4 --d 2 [--seed S]
    ainfty dump-phi --n 3 --den 4

Exit codes: 0 all checks pass, 1 a verification failed, 2 usage error.
Reports are JSON and byte-identical for identical flags.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

from . import associahedron as assoc
from . import cubic, engine, paths
from .geometry import RatVec, UsageError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUITES = ("cubic", "assoc", "ainfty", "stable", "all")
EPS_SAMPLES = (Fraction(1, 10), Fraction(1, 5), Fraction(1, 2))


@dataclass
class RunConfig:
    command: str
    n: int
    d: int = 2
    suite: str = "all"
    samples: int = 3
    tol_point: float = paths.TOL_POINT
    tol_deriv: float = paths.TOL_DERIV
    seed: int = 0
    out: str | None = None
    max_n: int = assoc.DEFAULT_MAX_N
    den: int = 8
    complex: bool = False

    def validate(self):
        if self.tol_point <= 0 or self.tol_deriv <= 0:
            raise UsageError("tolerances must be positive")
        if self.samples < 1:
            raise UsageError("--samples must be >= 1")
        if self.d < 1:
            raise UsageError("--d must be >= 1")
        if self.den < 1:
            raise UsageError("--den must be >= 1")
        if self.max_n < 1:
            raise UsageError("--max-n must be >= 1")
        low = 1 if self.command == "build" else 2
        if self.n < low:
            raise UsageError(f"--n must be >= {low}")
        if self.command != "build" and self.n > self.max_n:
            raise UsageError(f"--n {self.n} exceeds the cap {self.max_n} (raise --max-n or AINFTY_MAX_N)")

    def to_json(self) -> dict:
        out = asdict(self)
        out.pop("out")
        return out


# ---------------------------------------------------------------------------
# build / dump-phi


def cmd_build(cfg: RunConfig) -> tuple[dict, bool]:
    n = cfg.n
    data = {
        "n": n,
        "dim": max(n - 2, 0),
        "b": assoc.interior_point(n).to_json(),
        "vertices": [v.to_json() for v in assoc.vertices(n)],
        "facets": [idx._asdict() for idx in assoc.face_indices(n)],
    }
    ok = True
    if cfg.complex:
        K = assoc.build_complex(n, cfg.max_n).complex
        rep = K.verify()
        ok = rep.ok
        data["complex"] = cubic.complex_to_json(K)
        data["complex_check"] = {"pass": rep.ok, "checked": rep.checked, "violations": rep.violations[:20]}
    return data, ok


def lattice_points(n: int, den: int) -> list[RatVec]:
    """Points of K_n whose coordinates lie in (1/den)Z, in lexicographic order."""
    out = []

    def rec(prefix, total):
        k = len(prefix) + 1  # 1-based index of the next coordinate
        if k == n:
            out.append(RatVec(prefix + [Fraction(n - 1) - total]))
            return
        top = Fraction(k - 1) - total
        for i in range(int(top * den) + 1):
            x = Fraction(i, den)
            rec(prefix + [x], total + x)

    if n == 1:
        return [RatVec([0])]
    rec([Fraction(0)], Fraction(0))
    return sorted(out)


def cmd_dump_phi(cfg: RunConfig) -> tuple[dict, bool]:
    rows = []
    for t in lattice_points(cfg.n, cfg.den):
        rows.append({"t": t.to_json(), "phi": engine.phi(cfg.n, t).r.to_json(),
                     "psi": engine.psi(cfg.n, t).to_json()})
    return {"n": cfg.n, "den": cfg.den, "rows": rows}, True


# ---------------------------------------------------------------------------
# verification suites


def _entry(condition, passed, **fields) -> dict:
    out = {"condition": condition}
    out.update(fields)
    out["pass"] = bool(passed)
    return out


def suite_cubic(cfg: RunConfig) -> list[dict]:
    res = []
    for m in range(2, cfg.n + 1):
        ac = assoc.build_complex(m, cfg.max_n)
        K = ac.complex
        rep = K.verify()
        res.append(_entry("complex", rep.ok, n=m, cells=len(K), checked=rep.checked,
                          violations=len(rep.violations)))
        res.append(_entry("dim", K.dim == m - 2 and K.hull_rank() == m - 2, n=m,
                          dim=K.dim, hull_rank=K.hull_rank(), expected=m - 2))
        if m >= 3:
            chi = ac.boundary().euler_characteristic()
            want = 1 + (-1) ** (m - 3)  # boundary is a (m-3)-sphere
            res.append(_entry("euler_boundary", chi == want, n=m, value=chi, expected=want))
        for idx, L in ac.facets.items():
            mrep = cubic.verify_cubic_map(cubic.inclusion_map(L, K))
            res.append(_entry("facet_inclusion", mrep.ok, n=m, k=idx.k, r=idx.r, s=idx.s))
    return res


def suite_assoc(cfg: RunConfig) -> list[dict]:
    res = []
    for m in range(2, cfg.n + 1):
        vs = assoc.vertices(m)
        want = assoc.catalan(m - 1)
        res.append(_entry("vertex_count", len(vs) == want, n=m, value=len(vs), expected=want))
        nf = len(assoc.face_indices(m))
        want_f = sum(m - s + 1 for s in range(2, m))
        res.append(_entry("facet_count", nf == want_f, n=m, value=nf, expected=want_f))
        inside = all(assoc.contains(m, v) for v in vs)
        res.append(_entry("vertices_in_polytope", inside, n=m))
        if m >= 3:
            drep = assoc.verify_degeneracies(m, cfg.samples, cfg.seed, cfg.den)
            res.append(drep.to_json())
    return res


def _flatness(cfg: RunConfig) -> dict:
    worst, count = 0.0, 0
    rng = random.Random(f"flat-{cfg.d}-{cfg.seed}")
    chains = [paths.random_chain(2, cfg.d, cfg.seed * 1000 + i) for i in range(cfg.samples)]
    factory = [p for ch in chains for p in ch]
    factory.append(paths.iota([0] * cfg.d))
    functionals = [paths.coordinate_functional(cfg.d, i) for i in range(cfg.d)]
    functionals += [paths.random_functional(cfg.d, rng, degree=3) for _ in range(cfg.samples)]
    for u in factory:
        for f in functionals:
            for t0 in (0.0, 1.0):
                rep = paths.flatness_probe(u, f, t0, 3, tol=cfg.tol_deriv)
                worst = max([worst] + [abs(e.estimate) for e in rep.entries])
                count += len(rep.entries)
    return _entry("flatness", worst <= cfg.tol_deriv, d=cfg.d, samples=count, max_dev=worst,
                  tol=cfg.tol_deriv, h=paths.PROBE_H)


def _form_suite(cfg: RunConfig, stable: bool) -> list[dict]:
    res = []
    for m in range(1, cfg.n + 1):
        for i, t in enumerate(assoc.sample_points(m, cfg.samples, cfg.seed, cfg.den)):
            g = paths.random_chain(m, cfg.d, cfg.seed * 1000 + 500 + i)
            res.append(engine.verify_condition0(m, t, g, stable=stable).to_json())
    for m in range(3, cfg.n + 1):
        for idx in assoc.face_indices(m):
            rep = engine.verify_condition1(m, *idx, samples=cfg.samples, d_=cfg.d, seed=cfg.seed,
                                           den=cfg.den, tol=cfg.tol_point, stable=stable)
            res.append(rep.to_json())
    rng = random.Random(f"unit-{cfg.d}-{cfg.seed}")
    g = paths.make_path(paths.random_poly_curve(cfg.d, rng))
    res.append(engine.verify_condition2prime(g, stable=stable, tol=cfg.tol_point).to_json())
    res.append(engine.verify_strict_unit_failure(g, stable=stable).to_json())
    for m in range(4, cfg.n + 1):
        res.append(engine.ridge_consistency(m, max(10, cfg.samples), cfg.seed, stable=stable).to_json())
    return res


def suite_ainfty(cfg: RunConfig) -> list[dict]:
    return _form_suite(cfg, stable=False) + [_flatness(cfg)]


def suite_stable(cfg: RunConfig) -> list[dict]:
    res = _form_suite(cfg, stable=True)
    for m in range(2, cfg.n + 1):
        for i, t in enumerate(assoc.sample_points(m, cfg.samples, cfg.seed, cfg.den)):
            g = paths.random_chain(m, cfg.d, cfg.seed * 1000 + 700 + i)
            res.append(engine.verify_plateaus(engine.psi(m, t), g, tol=cfg.tol_point).to_json())
    for i, eps in enumerate(EPS_SAMPLES):
        u, v = paths.random_chain(2, cfg.d, cfg.seed * 1000 + 900 + i)
        res.append(engine.verify_mu_eps_smoothness(eps, u, v, tol=cfg.tol_deriv).to_json())
    return res


SUITE_FUNCS = {"cubic": suite_cubic, "assoc": suite_assoc, "ainfty": suite_ainfty, "stable": suite_stable}


def cmd_verify(cfg: RunConfig) -> tuple[dict, bool]:
    names = list(SUITE_FUNCS) if cfg.suite == "all" else [cfg.suite]
    results = []
    for name in names:
        if name == "cubic" and cfg.n > cfg.max_n:
            raise UsageError(f"cubic suite: n={cfg.n} exceeds the complex cap {cfg.max_n}")
        for entry in SUITE_FUNCS[name](cfg):
            results.append({"suite": name, **entry})
    ok = all(r["pass"] for r in results)
    return {"results": results, "pass": ok}, ok


# ---------------------------------------------------------------------------
# argument handling


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ainfty", description="Cubical associahedra and A-infinity checks")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, n_default):
        sp.add_argument("--n", type=int, default=n_default)
        sp.add_argument("--out", default=None, help="write the JSON here instead of stdout")
        sp.add_argument("--max-n", type=int, default=None, help="complex size cap (default: $AINFTY_MAX_N or 6)")
        sp.add_argument("--format", choices=["json"], default="json")

    b = sub.add_parser("build", help="write K_n data (and optionally the K(n) complex) as JSON")
    common(b, 4)
    b.add_argument("--complex", action="store_true", help="include the verified cubic complex K(n)")

    v = sub.add_parser("verify", help="run verification suites")
    common(v, 4)
    v.add_argument("--suite", choices=SUITES, default="all")
    v.add_argument("--d", type=int, default=2, help="dimension of the target space R^d")
    v.add_argument("--samples", type=int, default=3)
    v.add_argument("--tol-point", type=float, default=paths.TOL_POINT)
    v.add_argument("--tol-deriv", type=float, default=paths.TOL_DERIV)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--den", type=int, default=8, help="denominator of the rational sample grids")

    dp = sub.add_parser("dump-phi", help="tabulate phi and psi on a rational grid of K_n")
    common(dp, 3)
    dp.add_argument("--den", type=int, default=4)
    return p


def _config(ns: argparse.Namespace) -> RunConfig:
    kw = {k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__ and v is not None}
    if ns.max_n is None:
        kw["max_n"] = assoc.max_complex_n()
    return RunConfig(**kw)


COMMANDS = {"build": cmd_build, "verify": cmd_verify, "dump-phi": cmd_dump_phi}


def main(argv=None) -> int:
    parser = _parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad flags, 0 on --help
        return int(exc.code or 0)
    try:
        cfg = _config(ns)
        cfg.validate()
        payload, ok = COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        print(f"ainfty: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    doc = {"command": cfg.command, "config": cfg.to_json(), **payload}
    text = json.dumps(doc, indent=2) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not ok:
        for r in doc.get("results", []):
            if not r["pass"]:
                print("FAIL " + json.dumps(r), file=sys.stderr)
        if cfg.command == "build":
            print("FAIL complex verification", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK
