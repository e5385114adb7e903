"""Formal group law of the invariant differential dy/x on the universal curve.

Universal curve: x^(p-1) = y^p + u_1 y^(p-1) + ... + u_{p-2} y^2 + b y with
b = -(1 + u_1 + ... + u_{p-2}).  At infinity put W = 1/x and Y = y/x, so

    W = Y^p + u_1 W Y^(p-1) + ... + u_{p-2} W^(p-2) Y^2 + b W^(p-1) Y.

Writing W = Y^p * g, the unit g is a series in z = Y^(p-1) solving
g = 1 + sum_k u_k g^k z^k + b g^(p-1) z^(p-1).  Since dy/x = (1 - Y W'/W) dY
and Y W'/W = p + Y g'/g, the differential is -(p-1) * (1 + z g_z / g) dY.
The normalized density 1 + z g_z/g has constant term 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import PrimeContext, TruncatedSeries, _check_prime, rank_mod_p, vp

P7_HEIGHT_GUARD = 5  # largest p whose height check runs without opt-in
ASSOC_DEGREE = 12  # trivariate associativity is checked up to this total degree


def _p_of(ctx_or_p) -> int:
    return ctx_or_p.p if isinstance(ctx_or_p, PrimeContext) else int(ctx_or_p)


def _uvars(p: int, udeg: int) -> tuple:
    return tuple(f"u{k}" for k in range(1, p - 1)) if udeg > 0 else ()


# ---------------------------------------------------------------------------
# Series helpers
# ---------------------------------------------------------------------------


def _const_like(s: TruncatedSeries, vec, prec: int | None = None) -> TruncatedSeries:
    out = s.like(None, 0, prec if prec is not None else s.prec)
    out.data[:, 0] = np.array([int(v) % out.modulus for v in vec], dtype=out.data.dtype)
    return out


def _lift(s: TruncatedSeries, prec: int) -> TruncatedSeries:
    """Reinterpret the numerators as exact integers at a higher precision."""
    if s.shift:
        raise ValueError("lift needs an integral series")
    return s.like(s.data, 0, max(prec, s.prec))


def series_inverse(f: TruncatedSeries, max_iter: int = 64) -> TruncatedSeries:
    """1/f by Newton iteration; f must have a unit constant term."""
    if f.shift:
        raise ValueError("inverse of a non-integral series")
    c0 = int(f.data[0, 0])
    if c0 % f.p == 0:
        raise ArithmeticError("constant term is not a unit")
    r = f.data.shape[0]
    g = _const_like(f, [pow(c0, -1, f.modulus)] + [0] * (r - 1))
    for _ in range(max_iter):
        g2 = g * (2 - f * g)
        if g2 == g:
            return g2
        g = g2
    raise ArithmeticError("series inverse did not stabilize")


def compose(outer: TruncatedSeries, inner: TruncatedSeries) -> TruncatedSeries:
    """outer(inner) for univariate outer, by Horner over the stride of outer's support.

    If outer = x^e0 * h(x^d), only deg(h) products by inner^d are needed.
    """
    if outer.nvars != 1:
        raise ValueError("outer series must be univariate")
    if inner.shift:
        raise ValueError("inner series must be integral")
    if outer.params != inner.params or outer.pardeg != inner.pardeg:
        raise ValueError("parameter rings differ")
    P = min(outer.prec, inner.prec)
    inner = inner.with_prec(P)
    E = [int(e) for e in np.flatnonzero(outer.data.any(axis=0))]
    if not E:
        return inner.like(None, 0, P)
    if E[0] > 0 and inner.data[:, 0].any():
        raise ValueError("inner series must have zero constant term")
    e0 = E[0]
    d = 0
    for e in E:
        d = math.gcd(d, e - e0)
    d = d or 1
    step = inner**d
    acc = None
    kmax = (E[-1] - e0) // d
    for k in range(kmax, -1, -1):
        c = _const_like(inner, outer.data[:, e0 + d * k] % inner.p**P, P)
        acc = c if acc is None else acc * step + c
    if e0:
        acc = acc * inner**e0
    return acc.like(acc.data, outer.shift, acc.prec).renormalize()


def stretch(s: TruncatedSeries, factor: int, offset: int, maxdeg: int, var: str = "Y") -> TruncatedSeries:
    """Univariate substitution z -> Y^factor followed by multiplication by Y^offset."""
    out = TruncatedSeries((var,), maxdeg, s.p, s.prec, None, s.shift, s.params, s.pardeg)
    for n in range(s.maxdeg + 1):
        e = offset + factor * n
        if e > maxdeg:
            break
        out.data[:, e] = s.data[:, n]
    return out


def newton_solve(L: TruncatedSeries, dL: TruncatedSeries, R: TruncatedSeries, phi0: TruncatedSeries) -> TruncatedSeries:
    """phi with L(phi) = R to the truncation degree of R.

    dL = L' must be integral with unit constant term.  Each step doubles the
    correct degree; the residual truncated at the new degree is integral and
    its integrality is asserted before dividing by dL(phi).
    """
    D = R.maxdeg
    P = L.prec
    phi = phi0
    n = 1
    while True:
        n2 = min(2 * n + 1, D)
        phi = _lift(phi, P)
        res = (compose(L, phi) - R).truncate(n2).renormalize()
        if res.shift and not res.is_zero():
            raise ArithmeticError(f"non-integral Newton residual at degree {n2}")
        res = res.like(res.data, 0, res.prec)
        delta = (res * series_inverse(compose(dL, phi).with_prec(res.prec))).truncate(n2)
        phi = (phi.with_prec(delta.prec) - delta).truncate(n2)
        if n2 >= D:
            break
        n = n2
    final = (compose(L, _lift(phi, P)) - R).renormalize()
    if not final.is_zero():
        raise ArithmeticError("Newton solution does not satisfy the equation")
    return phi


# ---------------------------------------------------------------------------
# Local expansion at infinity
# ---------------------------------------------------------------------------


@dataclass
class LocalSolution:
    p: int
    udeg: int
    ydeg: int
    prec: int
    g: TruncatedSeries  # unit factor in z = Y^(p-1)
    W: TruncatedSeries  # W(Y) = Y^p g(Y^(p-1))
    rounds: int
    method: str


def _u_equation(p: int, zdeg: int, prec: int, udeg: int):
    params = _uvars(p, udeg)
    kw = dict(params=params, pardeg=udeg)
    z = TruncatedSeries.variable(0, ("z",), zdeg, p, prec, **kw)
    one = TruncatedSeries.one(("z",), zdeg, p, prec, **kw)
    us = [TruncatedSeries.param(k, ("z",), zdeg, p, prec, params, udeg) for k in range(len(params))]
    b = -one
    for u in us:
        b = b - u
    zp = [one]
    for _ in range(p - 1):
        zp.append(zp[-1] * z)

    def rhs(g):
        acc = one + b * g ** (p - 1) * zp[p - 1]
        for k, u in enumerate(us, start=1):
            acc = acc + u * g**k * zp[k]
        return acc

    def phi(g):
        return g - rhs(g)

    def dphi(g):
        acc = one - b * (p - 1) * g ** (p - 2) * zp[p - 1]
        for k, u in enumerate(us, start=1):
            acc = acc - u * k * g ** (k - 1) * zp[k]
        return acc

    return one, rhs, phi, dphi, b, us


def solve_local_equation(ctx_or_p, udeg: int = 1, ydeg: int | None = None, prec: int | None = None, method: str = "newton") -> LocalSolution:
    p = _p_of(ctx_or_p)
    _check_prime(p)
    if p == 2:
        raise ValueError("p must be odd")
    ydeg = ydeg if ydeg is not None else p ** (p - 2) + p
    if ydeg < p:
        raise ValueError("ydeg must be at least p")
    prec = prec if prec is not None else p + 2
    zdeg = ydeg // (p - 1)
    one, rhs, phi, dphi, _, _ = _u_equation(p, zdeg, prec, udeg)
    g = one
    rounds = 0
    limit = zdeg + udeg + 2 if method == "fixed_point" else 64
    while True:
        rounds += 1
        if method == "fixed_point":
            g2 = rhs(g)
        elif method == "newton":
            g2 = g - phi(g) * series_inverse(dphi(g))
        else:
            raise ValueError(f"unknown method {method}")
        if g2 == g:
            break
        g = g2
        if rounds > limit:
            raise ArithmeticError("local equation iteration did not stabilize")
    if not phi(g).is_zero():
        raise ArithmeticError("local equation residual is nonzero")
    W = stretch(g, p - 1, p, ydeg)
    return LocalSolution(p, udeg, ydeg, prec, g, W, rounds, method)


def local_equation_residual(sol: LocalSolution) -> TruncatedSeries:
    """W - (Y^p + sum_k u_k W^k Y^(p-k) + b W^(p-1) Y) evaluated in Y."""
    p, W = sol.p, sol.W
    kw = dict(params=W.params, pardeg=W.pardeg)
    Y = TruncatedSeries.variable(0, ("Y",), W.maxdeg, p, W.prec, **kw)
    one = TruncatedSeries.one(("Y",), W.maxdeg, p, W.prec, **kw)
    us = [TruncatedSeries.param(k, ("Y",), W.maxdeg, p, W.prec, W.params, W.pardeg) for k in range(len(W.params))]
    b = -one
    for u in us:
        b = b - u
    rhs = Y**p + b * W ** (p - 1) * Y
    for k, u in enumerate(us, start=1):
        rhs = rhs + u * W**k * Y ** (p - k)
    return W - rhs


# ---------------------------------------------------------------------------
# Invariant differential
# ---------------------------------------------------------------------------


@dataclass
class InvariantDifferential:
    p: int
    udeg: int
    ydeg: int
    prec: int
    density: TruncatedSeries  # normalized, constant term 1
    raw: TruncatedSeries  # Y W'/W - 1 = -(dy/x)/dY, constant term p - 1
    density_z: TruncatedSeries
    local: LocalSolution

    def coefficient(self, e: int, which: str = "density") -> list[int]:
        s = self.density if which == "density" else self.raw
        return s.ring_coefficient((e,))

    def support_mod_p(self) -> list[int]:
        """Exponents of Y with a coefficient nonzero mod p at u = 0."""
        row = self.density.data[0]
        return [int(e) for e in np.flatnonzero(row % self.p)]


def invariant_differential(ctx_or_p, udeg: int = 1, ydeg: int | None = None, prec: int | None = None, local: LocalSolution | None = None) -> InvariantDifferential:
    p = _p_of(ctx_or_p)
    sol = local or solve_local_equation(p, udeg, ydeg, prec)
    g = sol.g
    z = TruncatedSeries.variable(0, ("z",), g.maxdeg, p, g.prec, g.params, g.pardeg)
    dens_z = 1 + z * g.derivative(0) * series_inverse(g)
    density = stretch(dens_z, p - 1, 0, sol.ydeg)
    raw = density * (p - 1)
    return InvariantDifferential(p, sol.udeg, sol.ydeg, sol.prec, density, raw, dens_z, sol)


def density_quotient_route(diff: InvariantDifferential) -> bool:
    """Recompute Y W'/W - 1 directly in Y and compare with the z-route.

    Y W' and W both start at Y^p; the terms below Y^p must vanish before the
    quotient is formed, so the negative powers of Y cancel by computation.
    """
    p, W = diff.p, diff.local.W
    Y = TruncatedSeries.variable(0, ("Y",), W.maxdeg, p, W.prec, W.params, W.pardeg)
    YW = Y * W.derivative(0)
    if YW.data[:, :p].any() or W.data[:, :p].any():
        raise ArithmeticError("negative powers of Y survive")
    D = W.maxdeg - p
    num = TruncatedSeries(("Y",), D, p, W.prec, YW.data[:, p : p + D + 1], 0, W.params, W.pardeg)
    den = TruncatedSeries(("Y",), D, p, W.prec, W.data[:, p : p + D + 1], 0, W.params, W.pardeg)
    q = num * series_inverse(den) - 1
    return _trunc_eq(q, diff.raw, D)


def _trunc_eq(a: TruncatedSeries, b: TruncatedSeries, D: int) -> bool:
    bb = TruncatedSeries(a.variables, D, a.p, b.prec, b.data[:, : D + 1], b.shift, b.params, b.pardeg)
    return a == bb


def logarithm(diff: InvariantDifferential) -> TruncatedSeries:
    return diff.density.integrate(0)


def log_from_rationals(coeffs: dict[int, Fraction], p: int, maxdeg: int, prec: int, var: str = "x") -> TruncatedSeries:
    """sum_n coeffs[n] x^n as a shifted series (denominators prime to p allowed)."""
    items = {n: Fraction(c) for n, c in coeffs.items() if n <= maxdeg and c}
    s = max((max(0, -vp(c.numerator, p) + vp(c.denominator, p)) for c in items.values()), default=0)
    M = p ** (prec + s)
    terms = {}
    for n, c in items.items():
        num = c * p**s
        if num.denominator % p == 0:
            raise ArithmeticError("unexpected denominator")
        terms[(n,)] = num.numerator * pow(num.denominator, -1, M) % M
    return TruncatedSeries.from_dict((var,), maxdeg, p, prec + s, terms, s).renormalize()


# ---------------------------------------------------------------------------
# Formal group laws
# ---------------------------------------------------------------------------


@dataclass
class FormalGroupLaw:
    F: TruncatedSeries
    log: TruncatedSeries
    p_typical: bool = False

    @property
    def maxdeg(self) -> int:
        return self.F.maxdeg

    def _vars(self, names):
        return [
            TruncatedSeries.variable(i, names, self.maxdeg, self.F.p, self.F.prec, self.F.params, self.F.pardeg)
            for i in range(len(names))
        ]

    def unit_ok(self) -> bool:
        x = self._vars(("x",))[0]
        zero = x.like(None, 0)
        return self.F.substitute([x, zero]) == x and self.F.substitute([zero, x]) == x

    def commutative(self) -> bool:
        x, y = self._vars(("x", "y"))
        return self.F.substitute([y, x]) == self.F

    def associative(self, degree: int | None = None) -> bool:
        D = min(degree or ASSOC_DEGREE, self.maxdeg)
        F = self.F if D == self.maxdeg else TruncatedSeries(
            self.F.variables, D, self.F.p, self.F.prec, None, 0, self.F.params, self.F.pardeg
        )
        if D != self.maxdeg:
            for key, c in self.F.coeffs.items():
                if sum(key[:2]) <= D:
                    F.data[self.F.ring_monomials.index(key[2:]) if self.F.params else 0, F.pack(key[:2])] = c
        mk = lambda i: TruncatedSeries.variable(i, ("x", "y", "z"), D, F.p, F.prec, F.params, F.pardeg)
        x, y, z = mk(0), mk(1), mk(2)
        Fxy = F.substitute([x, y])
        Fyz = F.substitute([y, z])
        return F.substitute([Fxy, z]) == F.substitute([x, Fyz])

    def log_round_trip(self) -> bool:
        x, y = self._vars(("x", "y"))
        lx = compose(self.log, x)
        ly = compose(self.log, y)
        return compose(self.log, self.F) == lx + ly

    def is_integral(self) -> bool:
        return self.F.shift == 0

    def checks(self, assoc_degree: int | None = None) -> dict[str, bool]:
        return {
            "integral": self.is_integral(),
            "unit": self.unit_ok(),
            "commutative": self.commutative(),
            "associative": self.associative(assoc_degree),
            "log_round_trip": self.log_round_trip(),
        }


def _bivariate(log: TruncatedSeries, maxdeg: int):
    mk = lambda i: TruncatedSeries.variable(i, ("x", "y"), maxdeg, log.p, log.prec, log.params, log.pardeg)
    return mk(0), mk(1)


def _univariate_truncate(s: TruncatedSeries, maxdeg: int) -> TruncatedSeries:
    return TruncatedSeries(s.variables, maxdeg, s.p, s.prec, s.data[:, : maxdeg + 1], s.shift, s.params, s.pardeg)


def fgl_from_log(log: TruncatedSeries, maxdeg: int | None = None, p_typical: bool = False) -> FormalGroupLaw:
    """F(x, y) = log^{-1}(log x + log y), solved by Newton with integrality asserted."""
    D = min(maxdeg or log.maxdeg, log.maxdeg)
    L = _univariate_truncate(log, D)
    if int(L.data[0, 1]) != L.p**L.shift % L.modulus or L.data[1:, 1].any():
        raise ValueError("log must start with x")
    dL = L.derivative(0)
    if dL.shift:
        raise ArithmeticError("log' must be integral")
    x, y = _bivariate(L, D)
    R = compose(L, x) + compose(L, y)
    F = newton_solve(L, dL, R, x + y)
    if F.shift:
        raise ArithmeticError("formal group law is not integral")
    return FormalGroupLaw(F, L, p_typical)


def p_typicalize(log: TruncatedSeries) -> TruncatedSeries:
    """Keep only the x^(p^k) terms of a univariate log."""
    keep = np.zeros(log.data.shape[1], dtype=bool)
    e = 1
    while e <= log.maxdeg:
        keep[e] = True
        e *= log.p
    return log.like(log.data * keep).renormalize()


def strict_isomorphism(log: TruncatedSeries, log_typ: TruncatedSeries | None = None) -> TruncatedSeries:
    """phi = exp'(log(x)) with exp' inverse to the p-typical log; integrality asserted."""
    log_typ = log_typ if log_typ is not None else p_typicalize(log)
    x = TruncatedSeries.variable(0, log.variables, log.maxdeg, log.p, log.prec, log.params, log.pardeg)
    return newton_solve(log_typ, log_typ.derivative(0), log, x)


def isomorphism_check(log: TruncatedSeries, maxdeg: int) -> dict[str, bool]:
    L = _univariate_truncate(log, maxdeg)
    Lt = p_typicalize(L)
    F = fgl_from_log(L)
    Ft = fgl_from_log(Lt, p_typical=True)
    phi = strict_isomorphism(L, Lt)
    x, y = _bivariate(L, maxdeg)
    phix = compose(phi, x)
    phiy = compose(phi, y)
    lhs = Ft.F.substitute([phix, phiy])
    rhs = compose(phi, F.F)
    return {
        "phi_integral": phi.shift == 0,
        "phi_strict": int(phi.data[0, 1]) == 1 and not phi.data[1:, 1].any(),
        "carries_F_to_typical": lhs == rhs,
        "idempotent": p_typicalize(Lt) == Lt,
    }


# ---------------------------------------------------------------------------
# p-series, Hazewinkel generators, recognition and height
# ---------------------------------------------------------------------------


@dataclass
class PSeries:
    series: TruncatedSeries
    first_exponent_mod_p: int | None
    leading_unit: int | None

    def linear_ok(self) -> bool:
        return int(self.series.data[0, 1]) == self.series.p % self.series.modulus and not self.series.data[1:, 1].any()


def p_series(log: TruncatedSeries) -> PSeries:
    """[p](x) = log^{-1}(p log x) by Newton."""
    p = log.p
    x = TruncatedSeries.variable(0, log.variables, log.maxdeg, p, log.prec, log.params, log.pardeg)
    R = log * p
    ser = newton_solve(log, log.derivative(0), R, x * p)
    row = ser.data[0] % p
    nz = np.flatnonzero(row)
    first = int(nz[0]) if nz.size else None
    unit = int(row[first]) if first is not None else None
    return PSeries(ser, first, unit)


def p_series_iterated(F: FormalGroupLaw) -> TruncatedSeries:
    """[p](x) as the p-fold formal sum x +_F ... +_F x."""
    x = TruncatedSeries.variable(0, F.log.variables, F.maxdeg, F.F.p, F.F.prec, F.F.params, F.F.pardeg)
    acc = x
    for _ in range(F.F.p - 1):
        acc = F.F.substitute([x, acc])
    return acc


def _ring_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    """Product in Q[u_1..u_r]/(u)^2 on vectors (c, c_1, ..., c_r)."""
    out = [a[0] * b[0]] + [a[0] * b[i] + a[i] * b[0] for i in range(1, len(a))]
    return out


def _ring_pow(a: list[Fraction], e: int) -> list[Fraction]:
    if e == 0:
        return [Fraction(1)] + [Fraction(0)] * (len(a) - 1)
    c = a[0] ** e
    d = e * a[0] ** (e - 1) if e >= 1 else 0
    return [c] + [d * x for x in a[1:]]


def hazewinkel_v(diff: InvariantDifferential, kmax: int) -> list[list[Fraction]]:
    """v_1..v_kmax from p m_k = sum_{i<k} m_i v_{k-i}^(p^i), m_k = log coefficient at x^(p^k).

    Works in Z_(p)[u]/(u)^2 (linear part only).  Entries are p-integral
    Fractions whose residues mod p are reliable when prec > kmax.
    """
    p = diff.p
    if diff.udeg > 1:
        raise ValueError("only the linear part in u is supported")
    if p**kmax - 1 > diff.ydeg:
        raise ValueError("ydeg too small for the requested v_k")
    nr = 1 + (p - 2 if diff.udeg else 0)
    m = [[Fraction(1)] + [Fraction(0)] * (nr - 1)]
    for k in range(1, kmax + 1):
        c = diff.coefficient(p**k - 1)
        c = [Fraction(int(x)) for x in c[:nr]] + [Fraction(0)] * (nr - len(c[:nr]))
        m.append([x / p**k for x in c])
    v: list[list[Fraction]] = [None]
    for k in range(1, kmax + 1):
        acc = [p * x for x in m[k]]
        for i in range(1, k):
            t = _ring_mul(m[i], _ring_pow(v[k - i], p**i))
            acc = [a - b for a, b in zip(acc, t)]
        if any(x.denominator % p == 0 for x in acc):
            raise ArithmeticError(f"v_{k} is not p-integral")
        v.append(acc)
    return v[1:]


def _mod_p(x: Fraction, p: int) -> int:
    return x.numerator * pow(x.denominator, -1, p) % p


@dataclass
class RecognitionResult:
    p: int
    rank_display: int
    rank_v: int
    display_linear: list  # u-linear parts mod p of the raw density at Y^(j(p-1)), j < h
    v_linear: list  # u-linear parts mod p of v_1..v_{h-1}
    v_constant: list
    ppower_linear: list  # u-linear parts mod p of the raw density at Y^(p^j - 1)

    @property
    def rank(self) -> int:
        return self.rank_v

    @property
    def passed(self) -> bool:
        return self.rank_display == self.rank_v == self.p - 2 and not any(self.v_constant)


def recognition_check(ctx_or_p, udeg: int = 1, ydeg: int | None = None, prec: int | None = None, strict: bool = True) -> RecognitionResult:
    """Rank of the u-linear parts of v_1..v_{h-1} mod p, h = p - 1.

    Cross-check: the raw density coefficients at Y^(j(p-1)) have u-linear
    parts (p-j) u_j, which give the same rank.
    """
    p = _p_of(ctx_or_p)
    h = p - 1
    ydeg = ydeg if ydeg is not None else p ** (h - 1) + p
    prec = prec if prec is not None else p + 2
    if udeg < 1:
        raise ValueError("recognition needs udeg >= 1")
    diff = invariant_differential(p, 1, ydeg, prec)

    def lin(e):
        return [int(c) % p for c in diff.coefficient(e, "raw")[1 : p - 1]]

    display = [lin(j * (p - 1)) for j in range(1, h)]
    ppow = [lin(p**j - 1) for j in range(1, h)]
    v = hazewinkel_v(diff, h - 1)
    v_rows = [[_mod_p(x, p) for x in vk[1:]] for vk in v]
    v_const = [_mod_p(vk[0], p) for vk in v]
    shape = (h - 1, p - 2)
    ra = rank_mod_p(np.array(display, dtype=np.int64).reshape(shape), p)
    rv = rank_mod_p(np.array(v_rows, dtype=np.int64).reshape(shape), p)
    res = RecognitionResult(p, ra, rv, display, v_rows, v_const, ppow)
    if strict and not res.passed:
        raise ArithmeticError(f"recognition rank deficient: {ra}, {rv} < {p - 2}")
    return res


@dataclass
class HeightResult:
    p: int
    height: int
    first_exponent: int
    leading_unit: int
    v_mod_p: list  # v_1..v_h at u = 0, mod p
    support_ok: bool  # [p](x) mod p is a series in x^(p^h)
    linear_ok: bool


def height_check(ctx_or_p, ydeg: int | None = None, prec: int = 2, allow_large: bool = False) -> HeightResult:
    """Height of the special-fibre formal group from the first term of [p](x) mod p."""
    p = _p_of(ctx_or_p)
    if p > P7_HEIGHT_GUARD and not allow_large:
        raise ValueError(f"height check at p={p} is opt-in (allow_large=True)")
    ydeg = ydeg if ydeg is not None else p ** (p - 1)
    s = int(math.floor(math.log(ydeg, p) + 1e-9))
    work = max(prec + s + 1, p + 2)
    diff = invariant_differential(p, 0, ydeg, work)
    log = logarithm(diff)
    ps = p_series(log)
    if ps.first_exponent_mod_p is None:
        raise ArithmeticError("[p](x) vanishes mod p to the truncation degree")
    n = ps.first_exponent_mod_p
    h = round(math.log(n, p))
    if p**h != n:
        raise ArithmeticError(f"first term x^{n} is not at a power of p")
    kmax = min(h, int(math.floor(math.log(ydeg + 1, p) + 1e-9)))
    v = [_mod_p(vk[0], p) for vk in hazewinkel_v(diff, kmax)]
    row = ps.series.data[0] % p
    support = np.flatnonzero(row)
    support_ok = all(int(e) % p**h == 0 for e in support)
    return HeightResult(p, h, n, ps.leading_unit, v, support_ok, ps.linear_ok())
