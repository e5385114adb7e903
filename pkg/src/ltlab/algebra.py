"""Exact arithmetic foundations.

Residue rings Z/p^N, finite fields F_{p^m}, the cyclotomic quotient
(Z/p^N)[T]/Phi_p, truncated multivariate power series with a tracked
p-denominator, and integer / modular linear algebra (Smith form, blocked
elimination over Z/p^e).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
import sympy
from numba import njit
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_irreducible_p, gf_rem


class PrecisionError(ArithmeticError):
    """Raised when a p-adic computation runs out of reliable digits."""


def _check_prime(p: int) -> None:
    if p < 2 or not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")


# ---------------------------------------------------------------------------
# Z/p^N
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZmodPN:
    p: int
    prec: int
    value: int

    def __post_init__(self):
        if self.prec < 1:
            raise ValueError("prec must be positive")
        object.__setattr__(self, "value", self.value % self.modulus)

    @property
    def modulus(self) -> int:
        return self.p**self.prec

    def _coerce(self, other) -> int:
        if isinstance(other, ZmodPN):
            if other.p != self.p or other.prec != self.prec:
                raise ValueError("mismatched residue rings")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def _new(self, v: int) -> "ZmodPN":
        return ZmodPN(self.p, self.prec, v)

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value - o)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(o - self.value)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self._new(self.value * o)

    __rmul__ = __mul__

    def __neg__(self):
        return self._new(-self.value)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return self._new(pow(self.value, e, self.modulus))

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == other % self.modulus
        if isinstance(other, ZmodPN):
            return (self.p, self.prec, self.value) == (other.p, other.prec, other.value)
        return NotImplemented

    def __hash__(self):
        return hash((self.p, self.prec, self.value))

    def __int__(self):
        return self.value

    def is_unit(self) -> bool:
        return self.value % self.p != 0

    def inverse(self) -> "ZmodPN":
        if not self.is_unit():
            raise ZeroDivisionError(f"{self.value} is not a unit mod {self.p}^{self.prec}")
        return self._new(pow(self.value, -1, self.modulus))

    def valuation(self) -> int:
        """p-adic valuation of the residue; prec when the residue is 0."""
        if self.value == 0:
            return self.prec
        return vp(self.value, self.p)

    def signed(self) -> int:
        """Representative in (-M/2, M/2]."""
        M = self.modulus
        v = self.value
        return v - M if v > M // 2 else v


def vp(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def primitive_root(p: int) -> int:
    return int(sympy.primitive_root(p))


def discrete_log_mod_p(x: int, base: int, p: int) -> int:
    """Smallest k >= 0 with base^k = x mod p (brute force; p is small here)."""
    x %= p
    acc = 1
    for k in range(p - 1):
        if acc == x:
            return k
        acc = acc * base % p
    raise ValueError(f"{x} is not a power of {base} mod {p}")


def teichmuller(t: int, p: int, prec: int) -> ZmodPN:
    """Multiplicative lift of t in F_p^x to Z/p^prec: the fixed point of t -> t^p."""
    if t % p == 0:
        raise ValueError("Teichmuller lift of 0 is not a root of unity")
    M = p**prec
    w = t % M
    for _ in range(prec + 1):
        nxt = pow(w, p, M)
        if nxt == w:
            break
        w = nxt
    out = ZmodPN(p, prec, w)
    assert pow(w, p - 1, M) == 1 and (w - t) % p == 0
    return out


# ---------------------------------------------------------------------------
# Finite fields F_{p^m}
# ---------------------------------------------------------------------------


def _smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    """Lexicographically least monic irreducible, ordered by (c_{m-1}, ..., c_0).

    Returned high-to-low, leading 1 included (sympy galoistools convention).
    """
    if m == 1:
        return (1, 0)
    for tail in itertools.product(range(p), repeat=m):
        f = [1, *tail]
        if f[-1] == 0:
            continue
        if gf_irreducible_p(f, p, ZZ):
            return tuple(f)
    raise RuntimeError("no irreducible polynomial found")


class FiniteField:
    """F_{p^m} as F_p[x]/(f) with f the least irreducible of degree m.

    Elements are tuples of m coefficients, lowest degree first.  The field
    also records a generator of the multiplicative group: the first element
    (in base-p code order, low coefficient first) of full order.
    """

    def __init__(self, p: int, m: int):
        _check_prime(p)
        if m < 1:
            raise ValueError("degree must be positive")
        self.p = p
        self.m = m
        self.q = p**m
        self.modulus_hl = _smallest_irreducible(p, m)
        self.modulus = tuple(reversed(self.modulus_hl))  # low-to-high
        self._order_primes = sorted(sympy.factorint(self.q - 1))
        self.generator = self._find_generator()

    # element plumbing -----------------------------------------------------
    def element(self, coeffs: Iterable[int]) -> "FqElement":
        c = [int(x) % self.p for x in coeffs]
        if len(c) > self.m:
            hl = list(reversed(c))
            c = list(reversed(gf_rem(hl, list(self.modulus_hl), self.p, ZZ)))
        c = c + [0] * (self.m - len(c))
        return FqElement(self, tuple(c))

    def from_int(self, n: int) -> "FqElement":
        return self.element([n])

    def from_code(self, code: int) -> "FqElement":
        digits = []
        for _ in range(self.m):
            code, d = divmod(code, self.p)
            digits.append(d)
        return FqElement(self, tuple(digits))

    def zero(self) -> "FqElement":
        return FqElement(self, (0,) * self.m)

    def one(self) -> "FqElement":
        return FqElement(self, (1,) + (0,) * (self.m - 1))

    def gen_x(self) -> "FqElement":
        """The class of x in F_p[x]/(f)."""
        if self.m == 1:
            return self.element([-self.modulus[0]])
        return FqElement(self, (0, 1) + (0,) * (self.m - 2))

    def _mul(self, a: tuple, b: tuple) -> tuple:
        # schoolbook product, then fold the top m-1 terms using x^m = -(f - x^m)
        m, p = self.m, self.p
        c = [0] * (2 * m - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    c[i + j] += x * y
        tail = self.modulus
        for k in range(2 * m - 2, m - 1, -1):
            top = c[k] % p
            if top:
                base = k - m
                for t in range(m):
                    c[base + t] -= top * tail[t]
        return tuple(x % p for x in c[:m])

    def _find_generator(self) -> "FqElement":
        for code in range(1, self.q):
            g = self.from_code(code)
            if self.order_is_full(g):
                return g
        raise RuntimeError("no generator found")

    def order_is_full(self, g: "FqElement") -> bool:
        if g.is_zero():
            return False
        n = self.q - 1
        return all(g ** (n // r) != self.one() for r in self._order_primes)

    def multiplicative_order(self, g: "FqElement") -> int:
        if g.is_zero():
            raise ValueError("0 has no multiplicative order")
        n = self.q - 1
        for r, e in sympy.factorint(n).items():
            for _ in range(e):
                if g ** (n // r) == self.one():
                    n //= r
                else:
                    break
        return n

    def frobenius(self, a: "FqElement", k: int = 1) -> "FqElement":
        return a ** (self.p**k)

    def trace_to_prime(self, a: "FqElement") -> int:
        acc = self.zero()
        b = a
        for _ in range(self.m):
            acc = acc + b
            b = b**self.p
        if any(acc.coeffs[1:]):
            raise ArithmeticError("trace left the prime field")
        return acc.coeffs[0]

    def __eq__(self, other):
        return isinstance(other, FiniteField) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        return f"FiniteField({self.p}^{self.m})"


@dataclass(frozen=True, eq=False)
class FqElement:
    field: FiniteField
    coeffs: tuple

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def m(self) -> int:
        return self.field.m

    def _other(self, other) -> tuple:
        if isinstance(other, FqElement):
            return other.coeffs
        if isinstance(other, int):
            return self.field.from_int(other).coeffs
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FqElement(self.field, tuple((a + b) % self.p for a, b in zip(self.coeffs, o)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FqElement(self.field, tuple((a - b) % self.p for a, b in zip(self.coeffs, o)))

    def __rsub__(self, other):
        return -(self - other)

    def __neg__(self):
        return FqElement(self.field, tuple((-a) % self.p for a in self.coeffs))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FqElement(self.field, self.field._mul(self.coeffs, o))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.field.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> "FqElement":
        if self.is_zero():
            raise ZeroDivisionError("inverse of 0 in F_q")
        return self ** (self.field.q - 2)

    def __truediv__(self, other):
        if isinstance(other, int):
            other = self.field.from_int(other)
        return self * other.inverse()

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.field.from_int(other)
        if not isinstance(other, FqElement):
            return NotImplemented
        return self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def in_prime_field(self) -> bool:
        return not any(self.coeffs[1:])

    def to_int(self) -> int:
        if not self.in_prime_field():
            raise ValueError("element is not in F_p")
        return self.coeffs[0]

    def code(self) -> int:
        return sum(c * self.p**k for k, c in enumerate(self.coeffs))

    def __repr__(self):
        terms = [f"{c}" if k == 0 else f"{c}*x^{k}" for k, c in enumerate(self.coeffs) if c]
        return "Fq(" + (" + ".join(terms) if terms else "0") + ")"


# ---------------------------------------------------------------------------
# Prime context
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PrimeContext:
    p: int
    prec: int
    field: FiniteField
    zeta: FqElement  # exact order (p-1)^2
    eta: FqElement  # the (p-1)^2-root of the module twist; eta = zeta^-1, so eta^(p-1) = a^-1
    a: int  # zeta^(p-1), a primitive root mod p

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def root_order(self) -> int:
        return (self.p - 1) ** 2

    @property
    def genus(self) -> int:
        return (self.p - 1) * (self.p - 2) // 2

    def teich_a(self) -> ZmodPN:
        return teichmuller(self.a, self.p, self.prec)

    def describe(self) -> dict:
        return {
            "p": self.p,
            "prec": self.prec,
            "q": self.q,
            "modulus_low_to_high": list(self.field.modulus),
            "generator": list(self.field.generator.coeffs),
            "zeta": list(self.zeta.coeffs),
            "eta": list(self.eta.coeffs),
            "a": self.a,
        }


@lru_cache(maxsize=None)
def _field_for(p: int, m: int) -> FiniteField:
    return FiniteField(p, m)


@lru_cache(maxsize=64)
def power_log_table(field: FiniteField, base: tuple, n: int) -> dict:
    """Map coefficient tuples of base^k, 0 <= k < n, to k."""
    z = FqElement(field, base)
    acc = field.one()
    out = {}
    for k in range(n):
        out[acc.coeffs] = k
        acc = acc * z
    return out


def make_prime_context(p: int, prec: int = 2) -> PrimeContext:
    if p == 2:
        raise ValueError("p must be odd")
    _check_prime(p)
    if prec < 2:
        raise ValueError("prec must be at least 2")
    F = _field_for(p, p - 1)
    n = (p - 1) ** 2
    if (F.q - 1) % n:
        raise ArithmeticError("(p-1)^2 does not divide q-1")
    zeta = F.generator ** ((F.q - 1) // n)
    if F.multiplicative_order(zeta) != n:
        raise ArithmeticError("zeta does not have order (p-1)^2")
    z = zeta ** (p - 1)
    if not z.in_prime_field():
        raise ArithmeticError("zeta^(p-1) is not in F_p")
    a = z.to_int()
    if sympy.n_order(a, p) != p - 1:
        raise ArithmeticError("a is not a primitive root")
    return PrimeContext(p=p, prec=prec, field=F, zeta=zeta, eta=zeta.inverse(), a=a)


# ---------------------------------------------------------------------------
# (Z/p^N)[T]/Phi_p(T)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _eisenstein(p: int) -> tuple[int, ...]:
    # Phi_p(1 - L) = sum_k e_k L^k, e_0 = p, e_{p-1} = 1
    return tuple((-1) ** k * math.comb(p, k + 1) for k in range(p))


@dataclass(frozen=True)
class CyclotomicP:
    """Element of (Z/p^N)[T]/Phi_p(T) in the basis 1, T, ..., T^{p-2}."""

    p: int
    prec: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.p - 1:
            raise ValueError("need p-1 coefficients")
        M = self.p**self.prec
        object.__setattr__(self, "coeffs", tuple(int(c) % M for c in self.coeffs))

    @classmethod
    def from_powers(cls, p: int, prec: int, terms: dict[int, int] | Sequence[int]) -> "CyclotomicP":
        """Build from {exponent: coefficient} (any integer exponents)."""
        items = terms.items() if isinstance(terms, dict) else enumerate(terms)
        full = [0] * p
        for k, c in items:
            full[k % p] += int(c)
        return cls._reduce_full(p, prec, full)

    @classmethod
    def _reduce_full(cls, p, prec, full):
        top = full[p - 1]
        return cls(p, prec, tuple(full[k] - top for k in range(p - 1)))

    @classmethod
    def T(cls, p, prec, k=1):
        return cls.from_powers(p, prec, {k: 1})

    @classmethod
    def constant(cls, p, prec, c):
        return cls.from_powers(p, prec, {0: c})

    @classmethod
    def lam(cls, p, prec):
        return cls.from_powers(p, prec, {0: 1, 1: -1})

    @property
    def modulus(self) -> int:
        return self.p**self.prec

    def _check(self, other: "CyclotomicP"):
        if (self.p, self.prec) != (other.p, other.prec):
            raise ValueError("mismatched cyclotomic rings")

    def __add__(self, other):
        if isinstance(other, int):
            other = CyclotomicP.constant(self.p, self.prec, other)
        self._check(other)
        return CyclotomicP(self.p, self.prec, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicP(self.p, self.prec, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        return self + (-other if isinstance(other, CyclotomicP) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return CyclotomicP(self.p, self.prec, tuple(a * other for a in self.coeffs))
        self._check(other)
        p = self.p
        full = [0] * p
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        full[(i + j) % p] += a * b
        return CyclotomicP._reduce_full(p, self.prec, full)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = CyclotomicP.constant(self.p, self.prec, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def augmentation(self) -> int:
        """epsilon: T -> 1, as a residue mod p^N (note Phi_p(1) = p)."""
        return sum(self.coeffs) % self.modulus

    def conjugate(self) -> "CyclotomicP":
        """T -> T^{-1}."""
        return CyclotomicP.from_powers(self.p, self.prec, {-k: c for k, c in enumerate(self.coeffs)})

    def as_constant(self) -> int | None:
        """Integer value if the element lies in Z/p^N, else None."""
        if any(self.coeffs[1:]):
            return None
        return self.coeffs[0]

    def lambda_coords(self) -> list[int]:
        """d_j with x = sum_j d_j lambda^j, lambda = 1 - T."""
        p = self.p
        M = self.modulus
        return [
            sum(c * (-1) ** j * math.comb(k, j) for k, c in enumerate(self.coeffs)) % M
            for j in range(p - 1)
        ]

    @classmethod
    def from_lambda_coords(cls, p, prec, d: Sequence[int]) -> "CyclotomicP":
        full = [0] * p
        for j, dj in enumerate(d):
            for k in range(j + 1):
                full[k] += dj * math.comb(j, k) * (-1) ** k
        return cls._reduce_full(p, prec, full)

    def divide_by_lambda(self) -> "CyclotomicP":
        """Exact quotient x / lambda, returned at precision prec-1."""
        d = self.lambda_coords()
        precs = [self.prec] * (self.p - 1)
        q, qp = _lambda_divide(self.p, d, precs)
        if min(qp) < 1:
            raise PrecisionError("precision exhausted")
        out_prec = min(qp)
        return CyclotomicP.from_lambda_coords(self.p, out_prec, q)


def _lambda_divide(p: int, d: list[int], precs: list[int]) -> tuple[list[int], list[int]]:
    """One exact division by lambda in lambda-coordinates with per-coordinate precision."""
    if precs[0] < 1 or d[0] % p:
        raise ArithmeticError("not divisible by lambda")
    e = _eisenstein(p)
    c = d[0] // p
    cprec = precs[0] - 1
    out = [0] * (p - 1)
    outp = [0] * (p - 1)
    for j in range(1, p - 1):
        # e_j with 1 <= j <= p-2 is divisible by p, so c * e_j keeps precs[0]
        out[j - 1] = d[j] - c * e[j]
        outp[j - 1] = min(precs[j], cprec + vp(e[j], p))
    out[p - 2] = -c * e[p - 1]
    outp[p - 2] = cprec
    out = [x % p ** max(q, 1) for x, q in zip(out, outp)]
    return out, outp


def lambda_valuation(x: CyclotomicP) -> tuple[int, int]:
    """(v, u) with x = lambda^v * unit and u = epsilon(unit) mod p.

    Division by lambda is done as an exact solve, tracking the precision of
    each lambda-coordinate; v must stay below (p-1)(prec-1).
    """
    p = x.p
    bound = (p - 1) * (x.prec - 1)
    d = x.lambda_coords()
    precs = [x.prec] * (p - 1)
    v = 0
    while True:
        if precs[0] >= 1 and d[0] % p:
            break
        if v >= bound or min(precs) < 1:
            raise PrecisionError("precision exhausted")
        d, precs = _lambda_divide(p, d, precs)
        v += 1
    if v >= bound:
        raise PrecisionError("precision exhausted")
    return v, d[0] % p


def lambda_valuation_closed_form(x: CyclotomicP) -> tuple[int, int]:
    """Same answer via v = min_j ((p-1) v_p(d_j) + j) and p = -lambda^{p-1} mod lambda^p."""
    p = x.p
    d = x.lambda_coords()
    best = None
    for j, dj in enumerate(d):
        if dj == 0:
            continue
        e = vp(dj, p)
        cand = ((p - 1) * e + j, (dj // p**e) * (-1) ** e % p)
        if best is None or cand[0] < best[0]:
            best = cand
    if best is None or best[0] >= (p - 1) * (x.prec - 1):
        raise PrecisionError("precision exhausted")
    return best


# ---------------------------------------------------------------------------
# Truncated power series
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _param_ring(nparams: int, pardeg: int):
    """Monomials of degree <= pardeg in nparams variables and their product table."""
    mons = [()]
    if nparams:
        mons = []
        for deg in range(pardeg + 1):
            for combo in itertools.combinations_with_replacement(range(nparams), deg):
                e = [0] * nparams
                for i in combo:
                    e[i] += 1
                mons.append(tuple(e))
        mons.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    index = {m: i for i, m in enumerate(mons)}
    table = []
    for i, a in enumerate(mons):
        for j, b in enumerate(mons):
            c = tuple(x + y for x, y in zip(a, b))
            if sum(c) <= pardeg:
                table.append((i, j, index[c]))
    return tuple(mons), index, tuple(table)


@lru_cache(maxsize=None)
def _packing(nvars: int, maxdeg: int):
    """Packed layout: index = sum e_i S^i with S = 2*maxdeg+1 (no carries in products)."""
    S = maxdeg + 1 if nvars == 1 else 2 * maxdeg + 1
    L = sum(maxdeg * S**i for i in range(nvars)) + 1
    digits = np.zeros((L, nvars), dtype=np.int64)
    rem = np.arange(L, dtype=np.int64)
    for i in range(nvars):
        digits[:, i] = rem % S
        rem //= S
    tdeg = digits.sum(axis=1)
    valid = (digits <= maxdeg).all(axis=1) & (tdeg <= maxdeg)
    return S, L, digits, tdeg, valid


def _conv_mod(a: np.ndarray, b: np.ndarray, M: int, L: int) -> np.ndarray:
    """Truncated convolution of two coefficient rows modulo M."""
    na = int(np.flatnonzero(a)[-1]) + 1 if a.any() else 0
    nb = int(np.flatnonzero(b)[-1]) + 1 if b.any() else 0
    out = np.zeros(L, dtype=object if M >= 2**31 else np.int64)
    if na == 0 or nb == 0:
        return out
    a = a[:na]
    b = b[:nb]
    if M < 2**31 and (M - 1) ** 2 * min(na, nb) < 2**62:
        c = np.convolve(a.astype(np.int64), b.astype(np.int64))
    else:
        c = np.convolve(a.astype(object), b.astype(object))
    n = min(L, c.shape[0])
    out[:n] = c[:n] % M
    return out


def _scale_mod(arr: np.ndarray, c: int, M: int) -> np.ndarray:
    c %= M
    if M >= 2**31:
        return (arr.astype(object) % M) * c % M
    return (arr.astype(np.int64) % M) * c % M


class TruncatedSeries:
    """Power series over Z/p^prec truncated in total degree, divided by p^shift.

    Main variables are truncated at total degree ``maxdeg``; optional
    parameter variables (deformation coordinates) are truncated separately at
    total degree ``pardeg``.  Coefficients are stored densely in a packed
    exponent layout, one row per parameter monomial.  The represented object
    is (stored numerators) / p^shift, with numerators known modulo p^prec.
    """

    __slots__ = ("variables", "params", "maxdeg", "pardeg", "p", "prec", "shift", "data")

    def __init__(self, variables, maxdeg, p, prec, data=None, shift=0, params=(), pardeg=0):
        self.variables = tuple(variables)
        self.params = tuple(params)
        self.maxdeg = int(maxdeg)
        self.pardeg = int(pardeg) if self.params else 0
        self.p = int(p)
        self.prec = int(prec)
        self.shift = int(shift)
        if self.prec < 1:
            raise PrecisionError("series has no reliable digits")
        r = len(self.ring_monomials)
        L = self.layout[1]
        dt = object if self.modulus >= 2**31 else np.int64
        if data is None:
            data = np.zeros((r, L), dtype=dt)
        else:
            data = np.asarray(data)
            if data.shape != (r, L):
                raise ValueError(f"data shape {data.shape} != {(r, L)}")
            data = (data.astype(dt) % self.modulus) * self.layout[4]
        self.data = data

    # layout ---------------------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.variables)

    @property
    def layout(self):
        return _packing(self.nvars, self.maxdeg)

    @property
    def ring_monomials(self):
        return _param_ring(len(self.params), self.pardeg)[0]

    @property
    def ring_table(self):
        return _param_ring(len(self.params), self.pardeg)[2]

    @property
    def modulus(self) -> int:
        return self.p**self.prec

    @property
    def absolute_precision(self) -> int:
        return self.prec - self.shift

    def pack(self, exps: Sequence[int]) -> int:
        S = self.layout[0]
        if len(exps) != self.nvars:
            raise ValueError("exponent length mismatch")
        if sum(exps) > self.maxdeg or min(exps, default=0) < 0:
            raise IndexError("exponent outside truncation")
        return sum(e * S**i for i, e in enumerate(exps))

    def like(self, data=None, shift=None, prec=None) -> "TruncatedSeries":
        return TruncatedSeries(
            self.variables, self.maxdeg, self.p, self.prec if prec is None else prec, data,
            self.shift if shift is None else shift, self.params, self.pardeg,
        )

    def _same_shape(self, other: "TruncatedSeries"):
        if (self.variables, self.params, self.maxdeg, self.pardeg, self.p) != (
            other.variables, other.params, other.maxdeg, other.pardeg, other.p
        ):
            raise ValueError("series live in different rings")

    # constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, variables, maxdeg, p, prec, params=(), pardeg=0):
        return cls(variables, maxdeg, p, prec, None, 0, params, pardeg)

    @classmethod
    def from_dict(cls, variables, maxdeg, p, prec, terms: dict, shift=0, params=(), pardeg=0):
        """terms: {(main exponents..., param exponents...): int}."""
        s = cls.zero(variables, maxdeg, p, prec, params, pardeg)
        s.shift = shift
        nv = len(s.variables)
        idx = _param_ring(len(s.params), s.pardeg)[1]
        for e, c in terms.items():
            e = tuple(e)
            main, par = e[:nv], e[nv:] if s.params else ()
            if sum(main) > s.maxdeg or (s.params and sum(par) > s.pardeg):
                continue
            k = s.pack(main)
            s.data[idx[tuple(par)], k] = (s.data[idx[tuple(par)], k] + int(c)) % s.modulus
        return s

    @classmethod
    def variable(cls, i, variables, maxdeg, p, prec, params=(), pardeg=0):
        e = [0] * len(variables)
        e[i] = 1
        return cls.from_dict(variables, maxdeg, p, prec, {tuple(e) + (0,) * len(params): 1}, 0, params, pardeg)

    @classmethod
    def param(cls, i, variables, maxdeg, p, prec, params, pardeg):
        e = [0] * len(params)
        e[i] = 1
        return cls.from_dict(variables, maxdeg, p, prec, {(0,) * len(variables) + tuple(e): 1}, 0, params, pardeg)

    @classmethod
    def one(cls, variables, maxdeg, p, prec, params=(), pardeg=0):
        return cls.from_dict(variables, maxdeg, p, prec, {(0,) * (len(variables) + len(params)): 1}, 0, params, pardeg)

    @staticmethod
    def required_prec(p: int, prec_out: int, maxdeg: int) -> int:
        """Working precision so that integrating to maxdeg leaves prec_out digits."""
        return prec_out + int(math.floor(math.log(max(maxdeg, 1), p) + 1e-9)) + 1

    # inspection -----------------------------------------------------------
    @property
    def coeffs(self) -> dict:
        """Sparse view {(main exps..., param exps...): numerator}, lexicographic."""
        mons = self.ring_monomials
        digits = self.layout[2]
        out = {}
        for a in range(self.data.shape[0]):
            for k in np.flatnonzero(self.data[a]):
                key = tuple(int(x) for x in digits[k]) + (mons[a] if self.params else ())
                out[key] = int(self.data[a, k])
        return dict(sorted(out.items()))

    def coefficient(self, exps: Sequence[int], pexps: Sequence[int] = ()) -> ZmodPN:
        """Numerator of the coefficient (divide by p^shift for the true value)."""
        idx = _param_ring(len(self.params), self.pardeg)[1]
        a = idx[tuple(pexps)] if self.params else 0
        try:
            k = self.pack(exps)
        except IndexError:
            return ZmodPN(self.p, self.prec, 0)
        return ZmodPN(self.p, self.prec, int(self.data[a, k]))

    def ring_coefficient(self, exps: Sequence[int]) -> list[int]:
        """All parameter components of a main-variable coefficient."""
        k = self.pack(exps)
        return [int(x) for x in self.data[:, k]]

    def is_zero(self) -> bool:
        return not self.data.any()

    def is_integral(self) -> bool:
        return self.shift == 0

    def min_degree(self) -> int | None:
        nz = np.flatnonzero(self.data.any(axis=0))
        if nz.size == 0:
            return None
        return int(self.layout[3][nz].min())

    # arithmetic -------------------------------------------------------------
    def renormalize(self) -> "TruncatedSeries":
        out = self
        while out.shift > 0 and out.prec > 1 and not (out.data % out.p).any():
            out = out.like(out.data // out.p, out.shift - 1, out.prec - 1)
        return out

    def _aligned(self, other):
        self._same_shape(other)
        s = max(self.shift, other.shift)
        absprec = min(self.prec - self.shift, other.prec - other.shift)
        P = s + absprec
        if P < 1:
            raise PrecisionError("sum has no reliable digits")
        M = self.p**P
        a = _scale_mod(self.data, self.p ** (s - self.shift), M)
        b = _scale_mod(other.data, other.p ** (s - other.shift), M)
        return a, b, s, P

    def __add__(self, other):
        if isinstance(other, int):
            other = self._const(other)
        a, b, s, P = self._aligned(other)
        return self.like(a + b, s, P).renormalize()

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, int):
            other = self._const(other)
        a, b, s, P = self._aligned(other)
        return self.like(a - b, s, P).renormalize()

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self.like(-self.data)

    def _const(self, c: int) -> "TruncatedSeries":
        out = self.like(None, 0)
        out.data[0, 0] = c % out.modulus
        return out

    def __mul__(self, other):
        if isinstance(other, int):
            return self.like(_scale_mod(self.data, other, self.modulus)).renormalize()
        self._same_shape(other)
        P = min(self.prec, other.prec)
        M = self.p**P
        L = self.layout[1]
        valid = self.layout[4]
        out = np.zeros_like(self.data if M < 2**31 else self.data.astype(object))
        rows_a = [i for i in range(self.data.shape[0]) if self.data[i].any()]
        rows_b = set(i for i in range(other.data.shape[0]) if other.data[i].any())
        for i, j, k in self.ring_table:
            if i in rows_a and j in rows_b:
                out[k] = (out[k] + _conv_mod(self.data[i] % M, other.data[j] % M, M, L)) % M
        if self.nvars > 1:
            out = out * valid
        return self.like(out, self.shift + other.shift, P).renormalize()

    __rmul__ = __mul__

    def __pow__(self, e: int):
        result = self.one(self.variables, self.maxdeg, self.p, self.prec, self.params, self.pardeg)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def scale_ring(self, vec: Sequence[int]) -> "TruncatedSeries":
        """Multiply by a parameter-ring element given by its components."""
        out = np.zeros_like(self.data)
        for i, j, k in self.ring_table:
            if vec[i]:
                out[k] = out[k] + int(vec[i]) * self.data[j]
        return self.like(out % self.modulus).renormalize()

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        try:
            a, b, _, P = self._aligned(other)
        except (ValueError, PrecisionError):
            return False
        return not ((a - b) % self.p**P).any()

    def __hash__(self):
        return id(self)

    def truncate(self, deg: int) -> "TruncatedSeries":
        keep = self.layout[3] <= deg
        return self.like(self.data * keep)

    def mod_p(self) -> "TruncatedSeries":
        if self.shift:
            raise ValueError("reduction mod p needs an integral series")
        return self.like(self.data % self.p, 0, 1)

    def with_prec(self, prec: int) -> "TruncatedSeries":
        if prec > self.prec:
            raise PrecisionError("cannot raise precision")
        return self.like(self.data % self.p**prec, None, prec)

    def derivative(self, i: int = 0) -> "TruncatedSeries":
        S, L, digits, _, _ = self.layout
        out = np.zeros_like(self.data)
        e = digits[:, i]
        src = np.flatnonzero(e > 0)
        out[:, src - S**i] = self.data[:, src] * e[src]
        return self.like(out % self.modulus).renormalize()

    def integrate(self, i: int = 0) -> "TruncatedSeries":
        """Formal antiderivative in variable i; raises the shift by the largest v_p(e+1)."""
        S, L, digits, tdeg, valid = self.layout
        p = self.p
        src = [k for k in np.flatnonzero(self.data.any(axis=0)) if tdeg[k] < self.maxdeg]
        if not src:
            return self.like(np.zeros_like(self.data))
        vals = {k: vp(int(digits[k, i]) + 1, p) for k in src}
        Sft = max(vals.values())
        M = self.modulus
        out = np.zeros_like(self.data)
        for k in src:
            n = int(digits[k, i]) + 1
            v = vals[k]
            u = n // p**v
            factor = p ** (Sft - v) * pow(u, -1, M) % M
            out[:, k + S**i] = self.data[:, k] * factor % M
        res = self.like(out, self.shift + Sft)
        if res.absolute_precision < 1:
            raise PrecisionError("integration exhausted the working precision")
        return res.renormalize()

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """self(inner) for a univariate self; inner integral with zero constant term."""
        if self.nvars != 1:
            raise ValueError("compose needs a univariate outer series")
        return self.substitute([inner])

    def substitute(self, args: Sequence["TruncatedSeries"]) -> "TruncatedSeries":
        """Evaluate self at series args (one per main variable), Horner in the first.

        The outer parameter coefficients act through the parameter ring of the
        arguments, which must carry the same parameters.
        """
        if len(args) != self.nvars or self.nvars > 2:
            raise ValueError("substitute supports one or two main variables")
        for g in args:
            if g.shift:
                raise ValueError("arguments must be integral")
            if g.data[:, 0].any():
                raise ValueError("arguments must have zero constant term")
            if g.params != self.params or g.pardeg != self.pardeg:
                raise ValueError("parameter rings differ")
        tgt = args[0]
        P = min(self.prec, *(g.prec for g in args))
        M = self.p**P
        D = min(self.maxdeg, tgt.maxdeg)
        r = self.data.shape[0]

        def coeff_vec(k):
            return [int(self.data[a, k]) % M for a in range(r)]

        def const_series(vec):
            s = tgt.like(None, 0, P)
            s.data[:, 0] = np.array(vec, dtype=s.data.dtype) % M
            return s

        one = const_series([1] + [0] * (r - 1))
        if self.nvars == 1:
            acc = None
            for n in range(D, -1, -1):
                c = const_series(coeff_vec(n))
                acc = c if acc is None else acc * args[0] + c
            out = acc
        else:
            S = self.layout[0]
            y = args[1].with_prec(P)
            ypow = [one]
            for _ in range(D):
                ypow.append(ypow[-1] * y)
            acc = None
            for n in range(D, -1, -1):
                inner = tgt.like(None, 0, P)
                for m in range(0, D - n + 1):
                    vec = coeff_vec(n + m * S)
                    if any(vec):
                        inner = inner + ypow[m].scale_ring(vec)
                acc = inner if acc is None else acc * args[0].with_prec(P) + inner
            out = acc
        return out.like(out.data, self.shift, P).renormalize()


# ---------------------------------------------------------------------------
# Integer matrices and Smith form
# ---------------------------------------------------------------------------


class IntMatrix:
    """Dense integer matrix with exact Smith reduction (small sizes)."""

    def __init__(self, rows: Sequence[Sequence[int]]):
        self.rows = [[int(x) for x in r] for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.ncols for r in self.rows):
            raise ValueError("ragged matrix")

    @classmethod
    def from_array(cls, a) -> "IntMatrix":
        return cls([[int(x) for x in row] for row in np.asarray(a, dtype=object)])

    def to_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=object).reshape(self.nrows, self.ncols)

    def smith_diagonal(self) -> list[int]:
        """Nonzero elementary divisors d_1 | d_2 | ... (positive)."""
        A = [r[:] for r in self.rows]
        m, n = self.nrows, self.ncols
        diag = []
        t = 0
        while t < min(m, n):
            # pivot: smallest nonzero absolute value in the trailing block
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            i, j = best
            A[t], A[i] = A[i], A[t]
            for row in A:
                row[t], row[j] = row[j], row[t]
            while True:
                changed = False
                for i in range(t + 1, m):
                    if A[i][t]:
                        q = A[i][t] // A[t][t]
                        A[i] = [x - q * y for x, y in zip(A[i], A[t])]
                        if A[i][t]:
                            A[t], A[i] = A[i], A[t]
                            changed = True
                for j in range(t + 1, n):
                    if A[t][j]:
                        q = A[t][j] // A[t][t]
                        for row in A:
                            row[j] -= q * row[t]
                        if A[t][j]:
                            for row in A:
                                row[t], row[j] = row[j], row[t]
                            changed = True
                if changed:
                    continue
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if A[i][j] % A[t][t]:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                A[t] = [x + y for x, y in zip(A[t], A[bad])]
            diag.append(abs(A[t][t]))
            t += 1
        return diag

    def rank(self) -> int:
        return len(self.smith_diagonal())

    def elementary_divisor_valuations(self, p: int) -> list[int]:
        return [vp(d, p) for d in self.smith_diagonal()]

    def minors_gcd(self, k: int) -> int:
        """gcd of all k x k minors (oracle for small sizes)."""
        g = 0
        for rs in itertools.combinations(range(self.nrows), k):
            for cs in itertools.combinations(range(self.ncols), k):
                sub = sympy.Matrix([[self.rows[i][j] for j in cs] for i in rs])
                g = math.gcd(g, int(sub.det()))
        return g

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix((self.to_array().dot(other.to_array())).tolist())


# ---------------------------------------------------------------------------
# Blocked elimination over Z/m, m = p^e
# ---------------------------------------------------------------------------


@njit(cache=True)
def _inv_mod(a, m):
    t, newt = 0, 1
    r, newr = m, a % m
    while newr != 0:
        q = r // newr
        t, newt = newt, t - q * newt
        r, newr = newr, r - q * newr
    if t < 0:
        t += m
    return t


@njit(cache=True)
def _panel_lu(P, m, p, perm, pivflag, piv):
    h, bw = P.shape
    k = 0
    for c in range(bw):
        if k >= h:
            break
        sel = -1
        for i in range(k, h):
            if P[i, c] % p != 0:
                sel = i
                break
        if sel < 0:
            continue
        if sel != k:
            for j in range(bw):
                tmp = P[sel, j]
                P[sel, j] = P[k, j]
                P[k, j] = tmp
            tmp = perm[sel]
            perm[sel] = perm[k]
            perm[k] = tmp
        inv = _inv_mod(P[k, c], m)
        for i in range(k + 1, h):
            x = P[i, c]
            if x != 0:
                f = (x * inv) % m
                for j in range(bw):
                    if j > c or (j < c and pivflag[j] == 0):
                        P[i, j] = (P[i, j] - f * P[k, j]) % m
                P[i, c] = f
        pivflag[c] = 1
        piv[k] = c
        k += 1
    return k


@njit(cache=True)
def _unit_lower_inverse(Lm, m):
    k = Lm.shape[0]
    X = np.zeros((k, k), dtype=np.int64)
    for j in range(k):
        X[j, j] = 1
        for i in range(j + 1, k):
            s = 0
            for t in range(j, i):
                s = (s + Lm[i, t] * X[t, j]) % m
            X[i, j] = (-s) % m
    return X


def matmul_mod(X: np.ndarray, Y: np.ndarray, m: int) -> np.ndarray:
    """(X @ Y) mod m through float64 GEMM, chunking the inner dimension for exactness."""
    K = X.shape[1]
    if K == 0:
        return np.zeros((X.shape[0], Y.shape[1]), dtype=np.int64)
    chunk = max(1, int((2**52) // max((m - 1) ** 2, 1)))
    out = None
    for s in range(0, K, chunk):
        part = X[:, s:s + chunk].astype(np.float64) @ Y[s:s + chunk].astype(np.float64)
        part = np.fmod(part, m).astype(np.int64)
        out = part if out is None else (out + part) % m
    return out


@dataclass
class EchelonResult:
    rank: int
    pivots: list  # global pivot columns, increasing
    rows: np.ndarray | None  # echelon rows (rank x ncols) mod m
    rest: np.ndarray | None  # rows below the pivots restricted to non-pivot columns
    nonpivots: list
    modulus: int


def mod_echelon(A: np.ndarray, p: int, e: int = 1, block: int = 64, keep_rows: bool = False) -> EchelonResult:
    """Row-echelon form over Z/p^e with unit pivots, blocked for large matrices.

    Panels of ``block`` columns are factored by a compiled kernel; the trailing
    update is a float64 GEMM reduced modulo p^e.  For e > 1, columns without a
    unit pivot are carried along so the leftover block (all entries divisible
    by p) is exact, which is what the Smith recursion needs.
    """
    m = p**e
    if (m - 1) ** 2 * block >= 2**53:
        raise ValueError("modulus too large for exact float64 updates")
    A = np.array(A, dtype=np.int64) % m
    nr, nc = A.shape
    field_mode = e == 1
    r = 0
    pivots: list[int] = []
    deferred: list[int] = []
    c0 = 0
    while c0 < nc:
        if r >= nr:
            deferred.extend(range(c0, nc))
            break
        c1 = min(c0 + block, nc)
        h = nr - r
        P = np.ascontiguousarray(A[r:, c0:c1])
        perm = np.arange(h, dtype=np.int64)
        pivflag = np.zeros(c1 - c0, dtype=np.int64)
        piv = np.zeros(c1 - c0, dtype=np.int64)
        k = _panel_lu(P, m, p, perm, pivflag, piv)
        moved = np.flatnonzero(perm != np.arange(h))
        if moved.size:
            dst = r + moved
            src = r + perm[moved]
            if c1 < nc:
                A[dst, c1:] = A[src, c1:]
            if deferred and not field_mode:
                cols = np.array(deferred)
                A[np.ix_(dst, cols)] = A[np.ix_(src, cols)]
        A[r:, c0:c1] = P
        if k > 0:
            pc = piv[:k]
            Lfull = P[:, pc]
            L11 = np.tril(Lfull[:k], -1) + np.eye(k, dtype=np.int64)
            L21 = Lfull[k:]
            L11inv = _unit_lower_inverse(np.ascontiguousarray(L11), m)
            if c1 < nc:
                T = A[r:, c1:]
                B1 = matmul_mod(L11inv, T[:k], m)
                T[:k] = B1
                if h > k:
                    T[k:] = (T[k:] - matmul_mod(L21, B1, m)) % m
            if deferred and not field_mode:
                cols = np.array(deferred)
                T = A[r:][:, cols]
                B1 = matmul_mod(L11inv, T[:k], m)
                T[:k] = B1
                if h > k:
                    T[k:] = (T[k:] - matmul_mod(L21, B1, m)) % m
                A[r:, cols] = T
            pivots.extend(int(c0 + c) for c in pc)
        deferred.extend(c0 + j for j in range(c1 - c0) if not pivflag[j])
        r += k
        c0 = c1
    rank = r
    rows = None
    if keep_rows:
        rows = A[:rank].copy()
        colidx = np.arange(nc)
        for t, c in enumerate(pivots):
            rows[t, colidx < c] = 0
    rest = None
    if not field_mode:
        rest = A[rank:][:, deferred] if deferred else np.zeros((nr - rank, 0), dtype=np.int64)
    return EchelonResult(rank, pivots, rows, rest, deferred, m)


def rank_mod_p(A: np.ndarray, p: int) -> int:
    return mod_echelon(A, p, 1).rank


def smith_valuation_counts(A: np.ndarray, p: int, e: int) -> list[int]:
    """counts[v] = number of elementary divisors with p-adic valuation v, v < e.

    Divisors of valuation >= e (including zero) are invisible mod p^e.
    """
    counts = []
    M = np.array(A, dtype=np.int64)
    for level in range(e):
        if M.size == 0:
            counts.append(0)
            continue
        res = mod_echelon(M, p, e - level)
        counts.append(res.rank)
        if level == e - 1:
            break
        rest = res.rest
        if rest is None or rest.size == 0:
            counts.extend([0] * (e - level - 1))
            break
        if (rest % p).any():
            raise ArithmeticError("leftover block not divisible by p")
        M = rest // p
    return counts


class ColumnSpaceModP:
    """Column space of an integer matrix mod p with a membership test."""

    def __init__(self, A: np.ndarray, p: int):
        self.p = p
        self.n = A.shape[0]
        res = mod_echelon(np.asarray(A).T, p, 1, keep_rows=True)
        self.rank = res.rank
        self.rows = res.rows
        self.pivots = res.pivots
        self._inv = [pow(int(self.rows[t, c]), -1, p) for t, c in enumerate(self.pivots)]

    def reduce(self, v) -> np.ndarray:
        v = np.array(v, dtype=object) % self.p
        v = v.astype(np.int64)
        for t, c in enumerate(self.pivots):
            x = v[c]
            if x:
                v = (v - (x * self._inv[t]) % self.p * self.rows[t]) % self.p
        return v

    def contains(self, v) -> bool:
        return not self.reduce(v).any()
