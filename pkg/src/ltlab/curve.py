"""The Artin-Schreier curve X: y^p - y = x^{p-1} over F_{p^{p-1}}.

Automorphisms are kept as affine rules (x, y) -> (alpha x, beta y + gamma)
with coefficients in F_q and verified by exact reduction of the substituted
equation modulo the curve ideal.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass

from .algebra import FqElement, PrimeContext, discrete_log_mod_p, power_log_table


class RelationError(ArithmeticError):
    """A group relation or curve identity failed; the message names it."""


# ---------------------------------------------------------------------------
# Model and automorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CurveModel:
    ctx: PrimeContext
    exponents: tuple = ()
    deformation: tuple | None = None  # (u_1, ..., u_{p-2}) for the universal form

    def __post_init__(self):
        if not self.exponents:
            object.__setattr__(self, "exponents", (self.ctx.p, self.ctx.p - 1))

    @property
    def genus(self) -> int:
        p = self.ctx.p
        return (p - 1) * (p - 2) // 2

    @property
    def b(self):
        """b = -(1 + sum u_i) for the universal form; -1 on the special fiber."""
        if self.deformation is None:
            return -1
        return -(1 + sum(self.deformation))


@dataclass(frozen=True, eq=False)
class CurveAutomorphism:
    """(x, y) -> (alpha x, beta y + gamma)."""

    alpha: FqElement
    beta: FqElement
    gamma: FqElement
    label: str = ""

    def then(self, other: "CurveAutomorphism") -> "CurveAutomorphism":
        """Apply self first, then other: (other o self)."""
        return CurveAutomorphism(
            other.alpha * self.alpha,
            other.beta * self.beta,
            other.beta * self.gamma + other.gamma,
            f"{other.label}*{self.label}" if self.label and other.label else "",
        )

    def compose(self, other: "CurveAutomorphism") -> "CurveAutomorphism":
        """self o other."""
        return other.then(self)

    def inverse(self) -> "CurveAutomorphism":
        ai = self.alpha.inverse()
        bi = self.beta.inverse()
        return CurveAutomorphism(ai, bi, -(bi * self.gamma), f"{self.label}^-1" if self.label else "")

    def __pow__(self, n: int) -> "CurveAutomorphism":
        if n < 0:
            return self.inverse() ** (-n)
        F = self.alpha.field
        result = identity(F)
        base = self
        exp = n
        while n:
            if n & 1:
                result = result.compose(base)
            base = base.compose(base)
            n >>= 1
        return CurveAutomorphism(result.alpha, result.beta, result.gamma, f"{self.label}^{exp}")

    def key(self) -> tuple:
        return (self.alpha.coeffs, self.beta.coeffs, self.gamma.coeffs)

    def __eq__(self, other):
        return isinstance(other, CurveAutomorphism) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def is_identity(self) -> bool:
        return self.alpha == 1 and self.beta == 1 and self.gamma.is_zero()

    def describe(self) -> dict:
        return {
            "label": self.label,
            "x": f"({list(self.alpha.coeffs)})*x",
            "y": f"({list(self.beta.coeffs)})*y + ({list(self.gamma.coeffs)})",
        }


def identity(F) -> CurveAutomorphism:
    return CurveAutomorphism(F.one(), F.one(), F.zero(), "1")


def sigma(ctx: PrimeContext) -> CurveAutomorphism:
    F = ctx.field
    return CurveAutomorphism(F.one(), F.one(), F.one(), "sigma")


def tau(ctx: PrimeContext, corrupt: bool = False) -> CurveAutomorphism:
    p = ctx.p
    z = ctx.zeta
    beta = z if corrupt else z ** (p - 1)
    return CurveAutomorphism(z**p, beta, ctx.field.zero(), "tau")


# ---------------------------------------------------------------------------
# Polynomials over F_q in x, y (dict {(i, j): FqElement})
# ---------------------------------------------------------------------------


def _padd(P: dict, key, c: FqElement):
    if c.is_zero():
        return
    cur = P.get(key)
    s = c if cur is None else cur + c
    if s.is_zero():
        P.pop(key, None)
    else:
        P[key] = s


def curve_polynomial(ctx: PrimeContext) -> dict:
    """y^p - y - x^{p-1}."""
    F = ctx.field
    p = ctx.p
    P: dict = {}
    _padd(P, (0, p), F.one())
    _padd(P, (0, 1), -F.one())
    _padd(P, (p - 1, 0), -F.one())
    return P


def substitute_affine(P: dict, g: CurveAutomorphism, p: int) -> dict:
    """P(alpha x, beta y + gamma), by binomial expansion with coefficients mod p."""
    out: dict = {}
    for (i, j), c in P.items():
        ci = c * g.alpha**i
        for k in range(j + 1):
            binom = math.comb(j, k) % p
            if binom == 0:
                continue
            term = ci * (g.beta**k) * (g.gamma ** (j - k)) * binom
            _padd(out, (i, k), term)
    return out


def reduce_mod_curve(P: dict, p: int) -> dict:
    """Normal form modulo y^p - y - x^{p-1} (y-degree < p)."""
    P = dict(P)
    while True:
        big = [key for key in P if key[1] >= p]
        if not big:
            return P
        key = max(big, key=lambda t: t[1])
        c = P.pop(key)
        i, j = key
        _padd(P, (i, j - p + 1), c)
        _padd(P, (i + p - 1, j - p), c)


def preserves_curve(ctx: PrimeContext, g: CurveAutomorphism) -> bool:
    P = curve_polynomial(ctx)
    return not reduce_mod_curve(substitute_affine(P, g, ctx.p), ctx.p)


def element_order(g: CurveAutomorphism, bound: int) -> int:
    h = g
    for n in range(1, bound + 1):
        if h.is_identity():
            return n
        h = h.compose(g)
    raise RelationError(f"order of {g.label} exceeds {bound}")


@dataclass
class AutomorphismReport:
    generators: list
    relations: dict
    words_checked: int

    @property
    def ok(self) -> bool:
        return all(self.relations.values())


def automorphism_group(ctx: PrimeContext, corrupt_tau: bool = False, word_length: int = 4) -> AutomorphismReport:
    """Verify sigma, tau and the semidirect relation; raise on the first failure."""
    p = ctx.p
    s = sigma(ctx)
    t = tau(ctx, corrupt=corrupt_tau)
    rel: dict[str, bool] = {}

    def require(name: str, ok: bool):
        rel[name] = ok
        if not ok:
            raise RelationError(f"relation failed: {name}")

    require("sigma preserves y^p - y = x^(p-1)", preserves_curve(ctx, s))
    require("tau preserves y^p - y = x^(p-1)", preserves_curve(ctx, t))
    require(f"order(sigma) = {p}", element_order(s, p) == p)
    n = (p - 1) ** 2
    require(f"order(tau) = {n}", element_order(t, n) == n)
    conj = t.compose(s).compose(t.inverse())
    require(f"tau sigma tau^-1 = sigma^{ctx.a}", conj == s ** ctx.a)

    letters = [s, s.inverse(), t, t.inverse()]
    seen = set()
    for length in range(1, word_length + 1):
        for word in itertools.product(letters, repeat=length):
            g = word[0]
            for h in word[1:]:
                g = g.compose(h)
            if g.key() in seen:
                continue
            seen.add(g.key())
            if not preserves_curve(ctx, g):
                raise RelationError("a word of length <= 4 fails to preserve the curve")
    rel[f"all words of length <= {word_length} preserve the curve"] = True
    return AutomorphismReport([s, t], rel, len(seen))


def group_elements(ctx: PrimeContext) -> list[CurveAutomorphism]:
    """All p(p-1)^2 elements sigma^j tau^k of G'."""
    s = sigma(ctx)
    t = tau(ctx)
    out = []
    tk = identity(ctx.field)
    for k in range((ctx.p - 1) ** 2):
        sj = identity(ctx.field)
        for j in range(ctx.p):
            out.append(sj.compose(tk))
            sj = sj.compose(s)
        tk = tk.compose(t)
    return out


# ---------------------------------------------------------------------------
# Ramification
# ---------------------------------------------------------------------------


@dataclass
class RamificationDivisor:
    cover: str
    points: list  # [(projective coordinates, coefficient)]
    tame: bool
    degree_of_map: int
    genus_X: int
    genus_Y: int
    conductor: int | None = None

    @property
    def degree(self) -> int:
        return sum(c for _, c in self.points)

    def riemann_hurwitz_ok(self) -> bool:
        return 2 * self.genus_X - 2 == self.degree_of_map * (2 * self.genus_Y - 2) + self.degree

    def as_dict(self) -> dict:
        return {
            "cover": self.cover,
            "points": [[list(pt), c] for pt, c in self.points],
            "tame": self.tame,
            "degree": self.degree,
            "conductor": self.conductor,
            "genus_X": self.genus_X,
            "genus_Y": self.genus_Y,
            "riemann_hurwitz": self.riemann_hurwitz_ok(),
        }


def _valuations_at_infinity(p: int) -> tuple[int, int]:
    """Pole orders of x and y at the unique point at infinity.

    p v(y) = (p-1) v(x) balances the two leading terms; gcd(p, p-1) = 1 and
    total ramification of the degree-p map x give v(x) = -p, v(y) = -(p-1).
    """
    vx, vy = -p, -(p - 1)
    assert p * vy == (p - 1) * vx
    return vx, vy


def ramification(ctx: PrimeContext, cover: str) -> RamificationDivisor:
    p = ctx.p
    gX = differential_genus(ctx)
    if cover == "p_y":
        # quotient by x -> a x; fixed points: x = 0, y^p = y, and infinity
        g = tau(ctx) ** (p - 1)
        if not (g.beta == 1 and g.gamma.is_zero()):
            raise RelationError("tau^(p-1) should fix y")
        F = ctx.field
        ys = [i for i in range(p) if (F.from_int(i) ** p - F.from_int(i)).is_zero()]
        stab = element_order(g, p - 1)  # ramification index at each fixed point
        coeff = stab - 1  # tame: e - 1
        pts = [((0, i, 1), coeff) for i in ys] + [((1, 0, 0), coeff)]
        div = RamificationDivisor("p_y", pts, True, p - 1, gX, 0)
        div.genus_Y = _quotient_genus(gX, div.degree, p - 1)
        return div
    if cover == "p_x":
        vx, vy = _valuations_at_infinity(p)
        vpi = vy - vx  # pi = y / x is a uniformizer
        if vpi != 1:
            raise RelationError("y/x is not a uniformizer at infinity")
        # sigma^k(pi) - pi = k / x has valuation -vx = p for k != 0
        i_G = [-vx for _ in range(1, p)]
        different = sum(i_G)
        conductor = min(i_G) - 1
        assert different == (conductor + 1) * (p - 1)
        div = RamificationDivisor("p_x", [((1, 0, 0), different)], False, p, gX, 0, conductor)
        div.genus_Y = _quotient_genus(gX, div.degree, p)
        return div
    raise ValueError("cover must be 'p_x' or 'p_y'")


def _quotient_genus(gX: int, degR: int, d: int) -> int:
    num = 2 * gX - 2 - degR
    if num % (2 * d):
        raise RelationError("Riemann-Hurwitz gives a non-integral genus")
    return num // (2 * d) + 1


# ---------------------------------------------------------------------------
# Branch permutations
# ---------------------------------------------------------------------------


def _perm_of(g: CurveAutomorphism, p: int) -> tuple:
    """Action of g on the affine branch points y in F_p."""
    # y -> beta y + gamma preserves F_p iff gamma (image of 0) and beta lie in F_p
    if not (g.gamma.in_prime_field() and g.beta.in_prime_field()):
        raise RelationError("branch points are not permuted")
    b, c = g.beta.to_int(), g.gamma.to_int()
    return tuple((b * i + c) % p for i in range(p))


def cycle_notation(perm: tuple) -> str:
    seen = set()
    cycles = []
    for s in range(len(perm)):
        if s in seen or perm[s] == s:
            seen.add(s)
            continue
        cyc = [s]
        seen.add(s)
        j = perm[s]
        while j != s:
            cyc.append(j)
            seen.add(j)
            j = perm[j]
        cycles.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(cycles) or "()"


def multiplication_perm(a: int, p: int) -> tuple:
    return tuple(a * i % p for i in range(p))


def _closure(gens: list[tuple]) -> set:
    n = len(gens[0])
    ident = tuple(range(n))
    group = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for h in frontier:
            for g in gens:
                c = tuple(g[h[i]] for i in range(n))
                if c not in group:
                    group.add(c)
                    nxt.append(c)
        frontier = nxt
    return group


@dataclass
class BranchPermutations:
    perm_sigma: tuple
    perm_tau: tuple
    group_order: int
    kernel_order: int
    faithful: bool

    def as_dict(self) -> dict:
        return {
            "perm_sigma": cycle_notation(self.perm_sigma),
            "perm_tau": cycle_notation(self.perm_tau),
            "group_order": self.group_order,
            "kernel_order": self.kernel_order,
            "faithful_on_quotient": self.faithful,
        }


def branch_permutations(ctx: PrimeContext) -> BranchPermutations:
    p = ctx.p
    ps = _perm_of(sigma(ctx), p)
    pt = _perm_of(tau(ctx), p)
    order = len(_closure([ps, pt]))
    # kernel of G' -> Sym(F_p) must be G = <tau^(p-1)>, so G'/G embeds
    ident = tuple(range(p))
    elems = group_elements(ctx)
    kernel = [g for g in elems if _perm_of(g, p) == ident]
    G = {(tau(ctx) ** ((p - 1) * k)).key() for k in range(p - 1)}
    faithful = {g.key() for g in kernel} == G and order * len(kernel) == len(elems)
    return BranchPermutations(ps, pt, order, len(kernel), faithful)


# ---------------------------------------------------------------------------
# Holomorphic differentials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DifferentialBasisElement:
    i: int
    j: int
    char_exponent: int  # exponent of the character by which the order-(p-1) generator pushes forward
    pullback_exponent: int
    tau_exponent: int  # pushforward eigenvalue of tau is zeta^tau_exponent

    def label(self) -> str:
        return f"x^{self.i} y^{self.j} omega"


def _zeta_log(ctx: PrimeContext, v: FqElement) -> int:
    k = power_log_table(ctx.field, ctx.zeta.coeffs, ctx.root_order).get(v.coeffs)
    if k is None:
        raise ValueError("not a power of zeta")
    return k


def differential_basis(ctx: PrimeContext) -> dict[int, list[DifferentialBasisElement]]:
    """x^i y^j omega (omega = dx / F_y = -dx), grouped by character exponent.

    The order-(p-1) generator f = tau^(p-1) acts by x -> a x; its pullback on
    x^i y^j dx is a^(i+1), so the pushforward exponent is -(i+1) mod (p-1).
    """
    p = ctx.p
    f = tau(ctx) ** (p - 1)
    t = tau(ctx)
    if not (f.beta == 1 and f.gamma.is_zero()):
        raise RelationError("tau^(p-1) should fix y")
    groups: dict[int, list] = defaultdict(list)
    for i in range(p - 2):
        for j in range(p - 2 - i):
            scal = f.alpha ** (i + 1) * f.beta**j
            pull = discrete_log_mod_p(scal.to_int(), ctx.a, p)
            char = (-pull) % (p - 1)
            tscal = t.alpha ** (i + 1) * t.beta**j
            tpush = (-_zeta_log(ctx, tscal)) % ctx.root_order
            groups[char].append(DifferentialBasisElement(i, j, char, pull, tpush))
    return {k: groups[k] for k in sorted(groups)}


def differential_genus(ctx: PrimeContext) -> int:
    p = ctx.p
    return sum(1 for i in range(p - 2) for j in range(p - 2 - i))


def zeta_eigendifferentials(ctx: PrimeContext) -> list[DifferentialBasisElement]:
    return [d for grp in differential_basis(ctx).values() for d in grp if d.tau_exponent == 1]


def deformation_dimension(ctx: PrimeContext, subgroup: str = "C_{p-1}") -> int:
    if subgroup not in ("C_{p-1}", "C_{p−1}"):
        raise ValueError("only the order-(p-1) subgroup is supported")
    div = ramification(ctx, "p_y")
    branch = len(div.points)
    return 3 * div.genus_Y - 3 + branch
