"""Command line driver: runs the verification suites and writes deterministic JSON.

Exit codes: 0 all selected checks pass, 1 some check failed, 2 usage error or
empty suite selection, 3 a size guard was violated by an explicit request.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from fractions import Fraction
from typing import Callable

from . import curve, fgl, frobenius, reps, tate
from .algebra import make_prime_context

SUITES = ("curve", "reps", "slopes", "fgl", "tate")
SUPPORTED_PRIMES = (3, 5, 7, 11, 13)
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


def artifact_version() -> str:
    try:
        from importlib.metadata import version

        return version("artifact")
    except Exception:
        return "0.1.0"


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    p: int = 3
    prec: int = 2
    wmax: int | None = None
    ydeg: int | None = None
    udeg: int = 1
    suites: tuple = SUITES
    output: str | None = None
    threads: int | None = None
    method: str = "both"
    module: str = "both"
    corrupt_tau: bool = False
    timings: bool = False

    def resolved_threads(self) -> int:
        if self.threads:
            return self.threads
        env = os.environ.get("LTLAB_THREADS")
        if env:
            return max(1, int(env))
        return os.cpu_count() or 1

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                v = ""
            elif isinstance(v, tuple):
                v = ",".join(v)
            elif isinstance(v, bool):
                v = "true" if v else "false"
            lines.append(f"{f.name}={v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RunConfig":
        kw: dict = {}
        types = {f.name: f for f in fields(cls)}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"config line without '=': {raw!r}")
            k, v = (s.strip() for s in line.split("=", 1))
            if k not in types:
                raise UsageError(f"unknown config key {k!r}")
            kw[k] = _parse_value(k, v)
        return cls(**kw)


def _parse_value(key: str, v: str):
    if key in ("wmax", "ydeg", "output", "threads"):
        if v == "":
            return None
        return v if key == "output" else int(v)
    if key in ("p", "prec", "udeg"):
        return int(v)
    if key == "suites":
        return tuple(s for s in (x.strip() for x in v.split(",")) if s)
    if key in ("corrupt_tau", "timings"):
        if v.lower() not in ("true", "false"):
            raise UsageError(f"{key} must be true or false")
        return v.lower() == "true"
    return v


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class CheckRecord:
    id: str
    anchor: str
    status: str  # pass | fail | skipped
    data: dict = field(default_factory=dict)
    seconds: float = 0.0

    def as_dict(self, timings: bool) -> dict:
        d = {"id": self.id, "anchor": self.anchor, "status": self.status, "data": _jsonable(self.data)}
        if timings:
            d["seconds"] = round(self.seconds, 3)
        return d


@dataclass
class Report:
    suite: str
    p: int
    records: list
    version: str = field(default_factory=artifact_version)

    @property
    def failed(self) -> list:
        return [r for r in self.records if r.status == "fail"]

    def as_dict(self, timings: bool = False) -> dict:
        ids = [r.id for r in self.records]
        if len(ids) != len(set(ids)):
            raise RuntimeError("duplicate check ids in report")
        return {
            "suite": self.suite,
            "p": self.p,
            "version": self.version,
            "summary": {s: sum(r.status == s for r in self.records) for s in ("pass", "fail", "skipped")},
            "checks": [r.as_dict(timings) for r in self.records],
        }

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.as_dict(timings), sort_keys=True, indent=2) + "\n"

    def table(self) -> str:
        width = max([len(r.id) for r in self.records] + [10])
        lines = [f"{'check':<{width}}  status   seconds"]
        for r in self.records:
            lines.append(f"{r.id:<{width}}  {r.status:<7}  {r.seconds:7.2f}")
        s = self.as_dict()["summary"]
        lines.append(f"{s['pass']} pass, {s['fail']} fail, {s['skipped']} skipped")
        return "\n".join(lines)


def _jsonable(x):
    if isinstance(x, Fraction):
        return [x.numerator, x.denominator]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item"):
        return x.item()
    return x


@dataclass
class Check:
    id: str
    anchor: str
    fn: Callable[[], tuple]  # -> (ok, data)
    skip_reason: str | None = None


def run_checks(checks: list[Check], threads: int = 1) -> list[CheckRecord]:
    def one(c: Check) -> CheckRecord:
        if c.skip_reason:
            return CheckRecord(c.id, c.anchor, "skipped", {"reason": c.skip_reason})
        t0 = time.perf_counter()
        try:
            ok, data = c.fn()
            status = "pass" if ok else "fail"
        except tate.GuardError as e:
            status, data = "skipped", {"reason": str(e)}
        except (ArithmeticError, AssertionError, ValueError) as e:
            status, data = "fail", {"error": f"{type(e).__name__}: {e}"}
        return CheckRecord(c.id, c.anchor, status, data, time.perf_counter() - t0)

    if threads > 1 and len(checks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            out = list(ex.map(one, checks))
    else:
        out = [one(c) for c in checks]
    return sorted(out, key=lambda r: r.id)


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def curve_checks(cfg: RunConfig) -> list[Check]:
    ctx = make_prime_context(cfg.p)
    p = cfg.p

    def autos():
        try:
            rep = curve.automorphism_group(ctx, corrupt_tau=cfg.corrupt_tau)
        except curve.RelationError as e:
            return False, {"failed_relation": str(e)}
        return rep.ok, {"relations": rep.relations, "distinct_words": rep.words_checked}

    def ram():
        px = curve.ramification(ctx, "p_x")
        py = curve.ramification(ctx, "p_y")
        ok = px.riemann_hurwitz_ok() and py.riemann_hurwitz_ok()
        ok &= len(py.points) == p + 1 and all(c == p - 2 for _, c in py.points)
        return ok, {"p_x": px.as_dict(), "p_y": py.as_dict()}

    def branch():
        b = curve.branch_permutations(ctx)
        return b.group_order == p * (p - 1) and b.faithful, b.as_dict()

    def diffs():
        basis = curve.differential_basis(ctx)
        sizes = sorted(len(v) for v in basis.values())
        zeta = curve.zeta_eigendifferentials(ctx)
        ok = sizes == list(range(1, p - 1)) and 0 not in basis
        ok &= [(d.i, d.j) for d in zeta] == [(p - 3, 0)]
        return ok, {
            "sizes": {str(k): len(v) for k, v in basis.items()},
            "zeta_eigendifferentials": [d.label() for d in zeta],
            "genus": curve.differential_genus(ctx),
        }

    def deform():
        n = curve.deformation_dimension(ctx)
        return n == p - 2, {"dimension": n}

    return [
        Check("curve.automorphisms", "sigma, tau generate C_p x| C_(p-1)^2 acting on y^p - y = x^(p-1)", autos),
        Check("curve.ramification", "Riemann-Hurwitz for both quotient maps; p_y tame over P^1(F_p)", ram),
        Check("curve.branch_permutations", "G'/G embeds in Sym(F_p) with image of order p(p-1)", branch),
        Check("curve.differentials", "holomorphic differentials split into characters of sizes 1..p-2", diffs),
        Check("curve.deformation_dimension", "3 g_Y - 3 + |B| for the tame quotient", deform),
    ]


def reps_checks(cfg: RunConfig) -> list[Check]:
    ctx = make_prime_context(cfg.p)
    p = cfg.p

    def idem():
        flags = reps.idempotent_axioms(reps.central_idempotents(p - 1, p, cfg.prec))
        return all(flags.values()), flags

    def rich():
        r = reps.rich_basis_check(ctx)
        ok = r.det_is_unit and r.intertwines_sigma and r.intertwines_tau and r.augmentation == 0
        return ok, {"det_mod_p": r.det % p, "intertwines_sigma": r.intertwines_sigma, "intertwines_tau": r.intertwines_tau}

    def richp():
        r = reps.richp_check(p)
        return r.leading_congruence and r.generates and r.augmentation == 0, {
            "ybar_u": r.ybar_u,
            "span_rank": r.span_rank,
        }

    def module():
        W = min(cfg.wmax if cfg.wmax is not None else p + 1, p + 1)
        while W > 1 and tate.piece_dimension(p, "L", W) > 2000:
            W -= 1
        pieces = reps.semidirect_module(ctx, W, "L")
        return all(pc.ok for pc in pieces.values()), {"w_checked": W, "dims": [pc.piece.dim for pc in pieces.values()]}

    def norm():
        d = reps.norm_element_check(ctx)
        return d["P_tau d = d"] and d["d_nonzero"], d

    return [
        Check("reps.idempotents", "central idempotents of Z_p[C_(p-1)] mod p^prec", idem),
        Check("reps.rich", "standard rep restricted to C_p x| C_(p-1) is rho-bar up to eta twist", rich),
        Check("reps.richp", "ybar = -(t-1) + ... generates rho-bar mod p", richp),
        Check("reps.semidirect_relations", "graded pieces of Sym(rho-bar) carry the semidirect action", module),
        Check("reps.norm_element", "tau fixes the norm element d up to eta^p", norm),
    ]


def slopes_checks(cfg: RunConfig) -> list[Check]:
    p = cfg.p
    method = cfg.method
    if method not in ("gauss", "zeta", "both"):
        raise UsageError("method must be gauss, zeta or both")
    out = []

    def stick():
        t = frobenius.stickelberger_check(p, strict=False)
        return t.passed and t.valuations_ok, t.as_dict()

    out.append(Check("slopes.stickelberger", "Gauss sums have lambda-valuation j with Stickelberger unit", stick))
    if method in ("gauss", "both"):

        def gs():
            g = frobenius.gauss_slopes(p)
            return g == frobenius.expected_slopes(p), {"slopes": g.as_list()}

        out.append(Check("slopes.gauss", "slopes j/(p-1) with multiplicity p-1 from Gauss sums", gs))
    if method in ("zeta", "both"):
        skip = None if p in (3, 5) else "zeta route limited to p <= 5"

        def zs():
            z = frobenius.zeta_slopes(p)
            return z == frobenius.expected_slopes(p), {"slopes": z.as_list()}

        out.append(Check("slopes.zeta", "Newton polygon of the L-polynomial", zs, skip))
    if method == "both":

        def agree():
            g = frobenius.gauss_slopes(p)
            z = frobenius.zeta_slopes(p)
            return sorted(g.multiset()) == sorted(z.multiset()), {"gauss": g.as_list(), "zeta": z.as_list()}

        out.append(
            Check(
                "slopes.agreement",
                "two independent slope oracles agree",
                agree,
                None if p in (3, 5) else "zeta route limited to p <= 5",
            )
        )
    return out


def fgl_checks(cfg: RunConfig, which: tuple = ("axioms", "recognize", "height")) -> list[Check]:
    p = cfg.p
    skip = None if p in (3, 5) else f"formal group suite runs for p <= 5 (p = {p})"

    def axioms():
        D = 18 if p == 3 else 30
        diff = fgl.invariant_differential(p, 0, D, p + 2)
        F = fgl.fgl_from_log(fgl.logarithm(diff), D)
        flags = F.checks(assoc_degree=min(D, fgl.ASSOC_DEGREE))
        flags["density_quotient_route"] = fgl.density_quotient_route(diff)
        return all(flags.values()), flags

    def recognize():
        r = fgl.recognition_check(p, cfg.udeg, cfg.ydeg, strict=False)
        return r.passed, {
            "rank": r.rank,
            "rank_display": r.rank_display,
            "v_linear": r.v_linear,
            "display_linear": r.display_linear,
        }

    def height():
        h = fgl.height_check(p, cfg.ydeg if cfg.ydeg and cfg.ydeg >= p ** (p - 1) else None)
        ok = h.height == p - 1 and h.support_ok and h.linear_ok
        return ok, {
            "height": h.height,
            "first_exponent": h.first_exponent,
            "leading_unit": h.leading_unit,
            "v_mod_p": h.v_mod_p,
        }

    table = {
        "axioms": Check("fgl.axioms", "formal group law from the invariant differential", axioms, skip),
        "recognize": Check("fgl.recognize", "v_1..v_(p-2) have independent linear parts in u", recognize, skip),
        "height": Check("fgl.height", "[p](x) mod p starts at x^(p^(p-1))", height, skip),
    }
    return [table[k] for k in which]


def tate_checks(cfg: RunConfig) -> list[Check]:
    p = cfg.p
    guard = tate.WMAX_DEFAULT.get(p)
    skip = None if guard is not None else f"Tate cohomology suite runs for p <= 7 (p = {p})"
    wmax = cfg.wmax if cfg.wmax is not None else (guard or 0)
    modules = ("A", "L") if cfg.module == "both" else (cfg.module,)
    out = []

    for mod in modules:

        def ranks(mod=mod):
            cells = [tate.tate_rank(p, mod, w, cfg.prec) for w in range(wmax + 1)]
            bad = [c.w for c in cells if not c.match or not all(c.checks.values())]
            return not bad, {"cells": [c.as_dict() for c in cells], "mismatched_w": bad}

        out.append(Check(f"tate.ranks.{mod}", f"Tate cohomology of C_p on graded pieces of {mod}", ranks, skip))

    if "L" in modules:

        def table():
            tb = tate.invariant_count(p, wrange=range(wmax + 1), prec=cfg.prec)
            return tb.passed, tb.as_dict()

        def mult():
            flags = tate.multiplication_action_check(p, wmax, cfg.prec)
            return all(flags.values()), flags

        def welldef():
            ws = [w for w in range(min(wmax, 2 * p + 1) + 1) if w % p in (0, 1)]
            ok = all(tate.tau_well_defined(p, w, cfg.prec) and tate.tau_order_ok(p, w, cfg.prec) for w in ws)
            return ok, {"w_checked": ws, "b_exponent": tate.b_exponent(p, cfg.prec)}

        out += [
            Check("tate.invariants", "G' invariants match the monomials in alpha, beta, Delta", table, skip),
            Check("tate.multiplication", "(1 - sigma) y_0 and x act by zero on Tate cohomology", mult, skip),
            Check("tate.tau_well_defined", "tau action independent of representative", welldef, skip),
        ]
        if p == 3:

            def brute():
                rows = [tate.brute_force_gprime(3, w) for w in range(min(wmax, 12) + 1)]
                return all(r["agree"] for r in rows), {"rows": rows}

            out.append(Check("tate.brute_force", "H^0(G') by brute force over the whole group", brute, skip))
    return out


SUITE_BUILDERS = {
    "curve": curve_checks,
    "reps": reps_checks,
    "slopes": slopes_checks,
    "fgl": fgl_checks,
    "tate": tate_checks,
}


def verify_all(cfg: RunConfig) -> Report:
    if not cfg.suites:
        raise UsageError("empty suite selection")
    unknown = set(cfg.suites) - set(SUITES)
    if unknown:
        raise UsageError(f"unknown suites {sorted(unknown)}")
    if cfg.p not in SUPPORTED_PRIMES:
        raise tate.GuardError(f"p must be one of {SUPPORTED_PRIMES}")
    checks = []
    for s in SUITES:
        if s in cfg.suites:
            checks += SUITE_BUILDERS[s](cfg)
    return Report("verify-all", cfg.p, run_checks(checks, cfg.resolved_threads()))


# ---------------------------------------------------------------------------
# argparse
# ---------------------------------------------------------------------------


def _common(sp: argparse.ArgumentParser):
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--prec", type=int, default=None)
    sp.add_argument("--config", default=None, help="key=value configuration file")
    sp.add_argument("--output", default=None, help="write the JSON report here")
    sp.add_argument("--json", action="store_true", help="print JSON instead of a table")
    sp.add_argument("--threads", type=int, default=None)
    sp.add_argument("--timings", action="store_true", help="include wall-clock seconds in JSON")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ltlab", description="Exact checks for the Artin-Schreier curve y^p - y = x^(p-1)")
    sub = ap.add_subparsers(dest="command", required=True)
    c = sub.add_parser("curve")
    _common(c)
    c.add_argument("--corrupt-tau", action="store_true", help="perturb tau to exercise the failure path")
    r = sub.add_parser("reps")
    _common(r)
    s = sub.add_parser("slopes")
    _common(s)
    s.add_argument("--method", choices=("gauss", "zeta", "both"), default="both")
    f = sub.add_parser("fgl")
    f.add_argument("action", choices=("recognize", "height", "axioms"))
    _common(f)
    f.add_argument("--ydeg", type=int, default=None)
    f.add_argument("--udeg", type=int, default=None)
    t = sub.add_parser("tate")
    _common(t)
    t.add_argument("--max-w", type=int, default=None)
    t.add_argument("--module", choices=("A", "L", "both"), default="both")
    v = sub.add_parser("verify-all")
    _common(v)
    v.add_argument("--suites", default=None, help="comma separated subset of " + ",".join(SUITES))
    v.add_argument("--max-w", type=int, default=None)
    v.add_argument("--corrupt-tau", action="store_true")
    return ap


def config_from_args(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        with open(args.config) as fh:
            cfg = RunConfig.from_text(fh.read())
    for name, attr in (("p", "p"), ("prec", "prec"), ("output", "output"), ("threads", "threads"), ("ydeg", "ydeg"), ("udeg", "udeg"), ("max_w", "wmax"), ("method", "method"), ("module", "module")):
        v = getattr(args, name, None)
        if v is not None:
            setattr(cfg, attr, v)
    if getattr(args, "corrupt_tau", False):
        cfg.corrupt_tau = True
    if args.timings:
        cfg.timings = True
    if getattr(args, "suites", None) is not None:
        cfg.suites = tuple(s for s in (x.strip() for x in args.suites.split(",")) if s)
    return cfg


def _guard(cfg: RunConfig, command: str):
    if cfg.p not in SUPPORTED_PRIMES:
        raise tate.GuardError(f"p must be one of {SUPPORTED_PRIMES}")
    if cfg.prec < 2:
        raise tate.GuardError("prec must be at least 2")
    if command == "tate":
        lim = tate.WMAX_DEFAULT.get(cfg.p)
        if lim is None:
            raise tate.GuardError(f"Tate cohomology is guarded to p <= 7 (p = {cfg.p})")
        if cfg.wmax is not None and cfg.wmax > lim:
            raise tate.GuardError(f"--max-w {cfg.wmax} exceeds guard {lim} for p = {cfg.p}")
    if command == "fgl" and cfg.p not in (3, 5):
        raise tate.GuardError(f"formal group computations are guarded to p <= 5 (p = {cfg.p})")
    if command == "slopes" and cfg.method in ("zeta", "both") and cfg.p not in (3, 5):
        raise tate.GuardError("zeta route limited to p <= 5")


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        cfg = config_from_args(args)
        cmd = args.command
        if cmd == "verify-all":
            if cfg.wmax is not None:
                lim = tate.WMAX_DEFAULT.get(cfg.p)
                if lim is not None and cfg.wmax > lim:
                    raise tate.GuardError(f"--max-w {cfg.wmax} exceeds guard {lim}")
            report = verify_all(cfg)
        else:
            _guard(cfg, cmd)
            if cmd == "fgl":
                checks = fgl_checks(cfg, (args.action,))
            else:
                checks = SUITE_BUILDERS[cmd](cfg)
            report = Report(cmd, cfg.p, run_checks(checks, cfg.resolved_threads()))
    except UsageError as e:
        print(f"ltlab: {e}", file=sys.stderr)
        return EXIT_USAGE
    except tate.GuardError as e:
        print(f"ltlab: guard: {e}", file=sys.stderr)
        return EXIT_GUARD
    text = report.to_json(cfg.timings)
    if cfg.output:
        with open(cfg.output, "w") as fh:
            fh.write(text)
    if args.json:
        sys.stdout.write(text)
    else:
        print(report.table())
        for r in report.failed:
            print(f"FAILED {r.id}: {json.dumps(_jsonable(r.data), sort_keys=True)[:400]}")
    return EXIT_FAIL if report.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
