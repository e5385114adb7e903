"""Group rings, idempotents, the standard representation and Sym-algebra modules.

The graded modules are A_w = Sym^w(rho) on y_0..y_{p-1} with sigma: y_i ->
y_{i+1} and Lambda_w = (A / s_1 A)_w, presented on monomials in y_0..y_{p-2}
after substituting y_{p-1} = -(y_0 + ... + y_{p-2}).  The complement acts by
tau = eta^w * P_tau with P_tau: y_i -> y_{a i}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from .algebra import (
    FqElement,
    PrimeContext,
    primitive_root,
    rank_mod_p,
    teichmuller,
)
from .curve import RelationError


# ---------------------------------------------------------------------------
# Cyclic group rings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupRingElement:
    """sum_k coeffs[k] g^k in (Z/p^prec)[C_n]."""

    n: int
    p: int
    prec: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != self.n:
            raise ValueError("need n coefficients")
        M = self.p**self.prec
        object.__setattr__(self, "coeffs", tuple(int(c) % M for c in self.coeffs))

    @classmethod
    def basis(cls, n, p, prec, k):
        c = [0] * n
        c[k % n] = 1
        return cls(n, p, prec, tuple(c))

    def _check(self, o):
        if (self.n, self.p, self.prec) != (o.n, o.p, o.prec):
            raise ValueError("different group rings")

    def __add__(self, o):
        self._check(o)
        return GroupRingElement(self.n, self.p, self.prec, tuple(a + b for a, b in zip(self.coeffs, o.coeffs)))

    def __sub__(self, o):
        self._check(o)
        return GroupRingElement(self.n, self.p, self.prec, tuple(a - b for a, b in zip(self.coeffs, o.coeffs)))

    def __mul__(self, o):
        if isinstance(o, int):
            return GroupRingElement(self.n, self.p, self.prec, tuple(a * o for a in self.coeffs))
        self._check(o)
        out = [0] * self.n
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(o.coeffs):
                    out[(i + j) % self.n] += a * b
        return GroupRingElement(self.n, self.p, self.prec, tuple(out))

    __rmul__ = __mul__

    def augmentation(self) -> int:
        return sum(self.coeffs) % self.p**self.prec

    def is_one(self) -> bool:
        return self.coeffs == (1,) + (0,) * (self.n - 1)

    def is_zero(self) -> bool:
        return not any(self.coeffs)


@dataclass(frozen=True)
class Idempotent:
    index: int
    element: GroupRingElement
    root: int  # the primitive n-th root of unity used for the characters


def central_idempotents(n: int, p: int, prec: int) -> list[Idempotent]:
    """e_i = (1/n) sum_k chi_i(g^k) g^{-k} with chi_i(g) = omega^i.

    omega is the Teichmuller lift of a primitive root raised to (p-1)/n.
    """
    if math.gcd(n, p) != 1 or (p - 1) % n:
        raise ValueError("n must divide p - 1")
    M = p**prec
    omega = pow(teichmuller(primitive_root(p), p, prec).value, (p - 1) // n, M)
    ninv = pow(n, -1, M)
    out = []
    for i in range(n):
        c = [0] * n
        for k in range(n):
            c[(-k) % n] += pow(omega, i * k, M) * ninv
        out.append(Idempotent(i, GroupRingElement(n, p, prec, tuple(c)), omega))
    return out


def idempotent_axioms(ids: list[Idempotent]) -> dict[str, bool]:
    n = len(ids)
    els = [e.element for e in ids]
    one = GroupRingElement.basis(els[0].n, els[0].p, els[0].prec, 0)
    total = els[0]
    for e in els[1:]:
        total = total + e
    M = els[0].p ** els[0].prec
    twisted = True
    for e in ids:
        g = GroupRingElement.basis(e.element.n, e.element.p, e.element.prec, 1)
        chi = pow(e.root, e.index, M)
        twisted &= (g * e.element) == e.element * chi
    return {
        "idempotent": all(e * e == e for e in els),
        "orthogonal": all((els[i] * els[j]).is_zero() for i in range(n) for j in range(n) if i != j),
        "complete": total == one,
        "character_twisted": twisted,
    }


def project_eigenvectors(ids: list[Idempotent], exponents: list[int]) -> dict[int, list[int]]:
    """Apply each e_i to vectors on which g acts by omega^c; return the surviving indices.

    e_i acts on such a vector by the scalar (1/n) sum_k omega^{ik} omega^{-kc}.
    """
    out: dict[int, list[int]] = {}
    for e in ids:
        n = e.element.n
        M = e.element.p ** e.element.prec
        keep = []
        for idx, c in enumerate(exponents):
            scal = 0
            for k in range(n):
                # e_i = sum_k coeff[-k] g^{-k}; g^{-k} acts by omega^{-kc}
                scal += e.element.coeffs[(-k) % n] * pow(e.root, (-k * c) % n, M)
            scal %= M
            if scal == 1:
                keep.append(idx)
            elif scal != 0:
                raise ArithmeticError("idempotent acts by a non-projector scalar")
        out[e.index] = keep
    return out


# ---------------------------------------------------------------------------
# Matrices and the standard representation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RepMatrix:
    entries: tuple  # rows
    label: str = ""
    modulus: int | None = None

    @property
    def dim(self) -> int:
        return len(self.entries)

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=object).reshape(self.dim, self.dim)

    @classmethod
    def from_array(cls, a, label="", modulus=None):
        a = np.asarray(a, dtype=object)
        if modulus:
            a = a % modulus
        return cls(tuple(tuple(int(x) for x in row) for row in a), label, modulus)

    def __matmul__(self, other: "RepMatrix") -> "RepMatrix":
        m = self.modulus or other.modulus
        return RepMatrix.from_array(self.array().dot(other.array()), "", m)

    def __eq__(self, other):
        if not isinstance(other, RepMatrix):
            return NotImplemented
        m = self.modulus or other.modulus
        a, b = self.array(), other.array()
        if m:
            return not ((a - b) % m).any()
        return bool((a == b).all())

    def __hash__(self):
        return hash(self.entries)

    def identity_like(self) -> "RepMatrix":
        return RepMatrix.from_array(np.eye(self.dim, dtype=object), "1", self.modulus)

    def order(self, bound: int = 10_000) -> int:
        one = self.identity_like()
        acc = self
        for k in range(1, bound + 1):
            if acc == one:
                return k
            acc = acc @ self
        raise ArithmeticError("order exceeds bound")

    def trace(self) -> int:
        t = sum(self.entries[i][i] for i in range(self.dim))
        return t % self.modulus if self.modulus else t

    def det(self) -> int:
        import sympy

        d = int(sympy.Matrix(self.entries).det())
        return d % self.modulus if self.modulus else d


def standard_rep_matrix(perm: tuple | list) -> RepMatrix:
    """Matrix of y_i -> y_{perm[i]} on [y_0..y_{n-2}] with y_{n-1} = -(y_0+...+y_{n-2})."""
    n = len(perm)
    M = np.zeros((n - 1, n - 1), dtype=object)
    for i in range(n - 1):
        j = perm[i]
        if j == n - 1:
            M[:, i] = -1
        else:
            M[j, i] = 1
    return RepMatrix.from_array(M)


def standard_rep(n: int) -> dict[str, RepMatrix]:
    if n < 2:
        raise ValueError("n >= 2")
    transposition = [1, 0] + list(range(2, n))
    cycle = [(i + 1) % n for i in range(n)]
    return {
        "transposition": standard_rep_matrix(transposition),
        "cycle": standard_rep_matrix(cycle),
    }


def restrict_word(gens: dict[str, tuple], word: list[str], n: int) -> RepMatrix:
    """lambda(w) for a word in named permutations (applied right to left)."""
    perm = tuple(range(n))
    for name in reversed(word):
        g = gens[name]
        perm = tuple(g[perm[i]] for i in range(n))
    return standard_rep_matrix(perm)


# ---------------------------------------------------------------------------
# The change of basis into rho-bar and the generation check
# ---------------------------------------------------------------------------


@dataclass
class RichResult:
    matrix: RepMatrix
    det: int
    det_is_unit: bool
    zeta: int
    intertwines_sigma: bool
    intertwines_tau: bool
    augmentation: int


def _rhobar_coords(vec: dict[int, int], p: int, M: int) -> list[int]:
    """Coordinates in the basis t^i - 1 (i = 1..p-1) of an augmentation-zero element."""
    if sum(vec.values()) % M:
        raise ValueError("element is not in the augmentation ideal")
    return [vec.get(i, 0) % M for i in range(1, p)]


def rich_basis_check(ctx: PrimeContext, zeta: int | None = None) -> RichResult:
    """y = sum_{k=1}^{p-1} zeta^k t^{a^k} and the matrix [y, sigma y, ..., sigma^{p-2} y].

    zeta defaults to the inverse Teichmuller lift of a, the choice that makes y
    a cyclic generator (any other (p-1)-th root gives a singular matrix mod p).
    """
    p, prec, a = ctx.p, ctx.prec, ctx.a
    M = p**prec
    if zeta is None:
        zeta = pow(teichmuller(a, p, prec).value, -1, M)
    y: dict[int, int] = {}
    for k in range(1, p):
        e = pow(a, k, p)
        y[e] = (y.get(e, 0) + pow(zeta, k, M)) % M
    cols = []
    for i in range(p - 1):
        shifted = {(e + i) % p: c for e, c in y.items()}
        cols.append(_rhobar_coords(shifted, p, M))
    mat = RepMatrix.from_array(np.array(cols, dtype=object).T, "rich", M)
    det = mat.det()
    # sigma on rho-bar in basis t^i - 1: t^i - 1 -> (t^{i+1} - 1) - (t - 1)
    S = np.zeros((p - 1, p - 1), dtype=object)
    for i in range(1, p):
        img = {(i + 1) % p: 1, 1: -1}
        if (i + 1) % p == 0:
            img = {1: -1}
        for j, c in img.items():
            S[j - 1, i - 1] += c
    sig_rb = RepMatrix.from_array(S, "sigma_rhobar", M)
    T = np.zeros((p - 1, p - 1), dtype=object)
    for i in range(1, p):
        T[(a * i) % p - 1, i - 1] = 1
    tau_rb = RepMatrix.from_array(T, "tau_rhobar", M)
    lam_sigma = standard_rep_matrix([(i + 1) % p for i in range(p)])
    lam_tau = standard_rep_matrix([(a * i) % p for i in range(p)])
    lam_sigma = RepMatrix(lam_sigma.entries, "sigma_lambda", M)
    lam_tau = RepMatrix(lam_tau.entries, "tau_lambda", M)
    zinv = pow(zeta, -1, M)
    lhs_tau = tau_rb @ mat
    rhs_tau = RepMatrix.from_array(mat.array().dot(lam_tau.array()) * zinv, "", M)
    return RichResult(
        matrix=mat,
        det=det,
        det_is_unit=det % p != 0,
        zeta=zeta,
        intertwines_sigma=(mat @ lam_sigma) == (sig_rb @ mat),
        intertwines_tau=lhs_tau == rhs_tau,
        augmentation=sum(y.values()) % M,
    )


@dataclass
class RichpResult:
    ybar_u: list  # coefficients of ybar in u = t - 1 (mod p)
    leading_congruence: bool
    span_rank: int
    generates: bool
    augmentation: int


def richp_check(p: int) -> RichpResult:
    """ybar = sum_{i in F_p^x} i^{-1} t^i in F_p[t]/(t-1)^p, worked in u = t - 1."""
    if p == 2 or p % 2 == 0:
        raise ValueError("p must be odd")

    def to_u(vec: dict[int, int]) -> list[int]:
        out = [0] * p
        for i, c in vec.items():
            for k in range(p):
                out[k] = (out[k] + c * math.comb(i, k)) % p
        return out

    ybar = {i: pow(i, -1, p) for i in range(1, p)}
    yu = to_u(ybar)
    lead = yu[0] == 0 and yu[1] == (-1) % p
    rows = []
    for k in range(p):
        rows.append(to_u({(i + k) % p if (i + k) % p else p: c for i, c in ybar.items()}))
    # every t^k ybar has no constant term in u, and together they span (u)
    in_ideal = all(r[0] == 0 for r in rows)
    rk = rank_mod_p(np.array(rows, dtype=np.int64), p)
    return RichpResult(yu, lead, rk, in_ideal and rk == p - 1, sum(ybar.values()) % p)


# ---------------------------------------------------------------------------
# Graded pieces of Sym(rho) and Sym(rho-bar)
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def monomials(nvars: int, w: int) -> np.ndarray:
    """Exponent vectors of total degree w, in lexicographically decreasing order."""
    out = []

    def rec(prefix, left, k):
        if k == nvars - 1:
            out.append(prefix + [left])
            return
        for e in range(left, -1, -1):
            rec(prefix + [e], left - e, k + 1)

    if nvars == 0:
        return np.zeros((1 if w == 0 else 0, 0), dtype=np.int64)
    rec([], w, 0)
    arr = np.array(out, dtype=np.int64).reshape(len(out), nvars)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def _multinomials(nvars: int, t: int):
    beta = monomials(nvars, t)
    f = [math.factorial(k) for k in range(t + 1)]
    coef = [f[t] // math.prod(f[int(b)] for b in row) for row in beta]
    if max(coef, default=0) >= 2**62:
        raise OverflowError("multinomial coefficient exceeds int64")
    return beta, np.array(coef, dtype=np.int64)


class GradedPiece:
    """One graded piece A_w or Lambda_w with exact sparse sigma and P_tau."""

    def __init__(self, p: int, kind: str, w: int, a: int):
        if kind not in ("A", "L"):
            raise ValueError("kind must be 'A' or 'L'")
        self.p = p
        self.kind = kind
        self.w = w
        self.a = a
        self.nvars = p if kind == "A" else p - 1
        self.basis = monomials(self.nvars, w)
        self.dim = self.basis.shape[0]
        self.radix = w + 1
        if self.radix ** self.nvars >= 2**62:
            raise OverflowError("monomial codes overflow")
        self._codes = self._encode(self.basis)
        self._order = np.argsort(self._codes)
        self._sorted = self._codes[self._order]
        self.sigma = self.substitution([(i + 1) % p for i in range(self.nvars)])
        self.tau_perm = self.substitution([(a * i) % p for i in range(self.nvars)])

    @property
    def internal_degree(self) -> int:
        return -2 * self.w

    @property
    def eta_exponent(self) -> int:
        """tau = eta^w * P_tau on this piece."""
        return self.w

    def _encode(self, E: np.ndarray) -> np.ndarray:
        pw = self.radix ** np.arange(self.nvars, dtype=np.int64)
        return E @ pw

    def index_of(self, E: np.ndarray) -> np.ndarray:
        codes = self._encode(np.atleast_2d(E))
        pos = np.searchsorted(self._sorted, codes)
        if (pos >= self.dim).any() or (self._sorted[np.minimum(pos, self.dim - 1)] != codes).any():
            raise KeyError("monomial not in basis")
        return self._order[pos]

    def substitution(self, images: list[int]) -> sp.csc_matrix:
        """Matrix of y_i -> y_{images[i]}; image p-1 in Lambda means -(y_0+...+y_{p-2})."""
        n, nv, p = self.dim, self.nvars, self.p
        E = self.basis
        base = np.zeros_like(E)
        t = np.zeros(n, dtype=np.int64)
        for i, j in enumerate(images):
            if self.kind == "L" and j == p - 1:
                t += E[:, i]
            else:
                base[:, j] += E[:, i]
        rows, cols, data = [], [], []
        for tv in np.unique(t):
            src = np.flatnonzero(t == tv)
            beta, coef = _multinomials(nv, int(tv))
            tgt = (base[src][:, None, :] + beta[None, :, :]).reshape(-1, nv)
            rows.append(self.index_of(tgt))
            cols.append(np.repeat(src, beta.shape[0]))
            data.append(np.tile(coef * (-1) ** int(tv), src.size))
        rows = np.concatenate(rows) if rows else np.zeros(0, np.int64)
        cols = np.concatenate(cols) if cols else np.zeros(0, np.int64)
        data = np.concatenate(data) if data else np.zeros(0, np.int64)
        return sp.csc_matrix((data, (rows, cols)), shape=(n, n), dtype=np.int64)

    def vector(self, poly: dict[tuple, int]) -> np.ndarray:
        """Coordinates of a polynomial given on y_0..y_{p-1} (y_{p-1} substituted in Lambda)."""
        v = np.zeros(self.dim, dtype=object)
        for e, c in poly.items():
            e = tuple(e)
            if self.kind == "A":
                idx = int(self.index_of(np.array(e))[0])
                v[idx] += c
                continue
            head = np.array(e[: self.p - 1], dtype=np.int64)
            tv = e[self.p - 1] if len(e) == self.p else 0
            beta, coef = _multinomials(self.nvars, tv)
            idx = self.index_of(head[None, :] + beta)
            for k, cc in zip(idx, coef):
                v[int(k)] += c * int(cc) * (-1) ** tv
        return v

    def norm_power(self, m: int) -> np.ndarray:
        """d^m with d = y_0 ... y_{p-1}."""
        return self.vector({(m,) * self.p: 1})

    def trace_sigma(self) -> int:
        return int(sum(int(x) for x in self.sigma.diagonal().astype(object)))


def sparse_power_apply(S: sp.csc_matrix, X, k: int, modulus: int | None):
    """S^k X, exact (object) when modulus is None, else modulo modulus in int64."""
    if modulus is None:
        X = np.array(X, dtype=object)
        C = S.tocoo()
        rows, cols, data = C.row, C.col, C.data.astype(object)
        for _ in range(k):
            Y = np.zeros_like(X)
            if X.ndim == 1:
                np.add.at(Y, rows, data * X[cols])
            else:
                np.add.at(Y, rows, data[:, None] * X[cols])
            X = Y
        return X
    Sm = S.copy()
    Sm.data = Sm.data % modulus
    X = np.array(X, dtype=object) % modulus
    X = X.astype(np.int64)
    for _ in range(k):
        X = (Sm @ X) % modulus
    return X


@dataclass
class ModulePiece:
    piece: GradedPiece
    relations: dict

    @property
    def ok(self) -> bool:
        return all(self.relations.values())


def check_piece_relations(piece: GradedPiece, exact_limit: int = 400, modulus: int | None = None) -> dict[str, bool]:
    """sigma^p = 1, P_tau sigma = sigma^a P_tau and P_tau^(p-1) = 1 on a graded piece."""
    p, n = piece.p, piece.dim
    m = None if n <= exact_limit else (modulus or p**3)
    if m is None:
        eye = np.eye(n, dtype=np.int64)
    else:
        # large pieces: randomized (Freivalds) check on a block of test vectors
        eye = np.random.default_rng(n).integers(0, m, size=(n, 8), dtype=np.int64)
    s_p = sparse_power_apply(piece.sigma, eye, p, m)
    lhs = sparse_power_apply(piece.tau_perm, sparse_power_apply(piece.sigma, eye, 1, m), 1, m)
    rhs = sparse_power_apply(piece.sigma, sparse_power_apply(piece.tau_perm, eye, 1, m), piece.a, m)
    t_order = sparse_power_apply(piece.tau_perm, eye, p - 1, m)

    def same(A, B):
        if m is None:
            return bool((np.array(A, dtype=object) == np.array(B, dtype=object)).all())
        return not ((np.array(A, dtype=np.int64) - np.array(B, dtype=np.int64)) % m).any()

    return {
        "sigma^p = 1": same(s_p, eye),
        "tau sigma tau^-1 = sigma^a": same(lhs, rhs),
        "P_tau^(p-1) = 1": same(t_order, eye),
    }


def semidirect_module(ctx: PrimeContext, W: int, kind: str = "L", exact_limit: int = 400) -> dict[int, ModulePiece]:
    """sigma and tau on every graded piece w <= W, with relations verified."""
    out = {}
    for w in range(W + 1):
        piece = GradedPiece(ctx.p, kind, w, ctx.a)
        rel = check_piece_relations(piece, exact_limit, ctx.p ** max(ctx.prec, 3))
        if not all(rel.values()):
            bad = [k for k, v in rel.items() if not v]
            raise RelationError(f"w={w}: {bad}")
        out[w] = ModulePiece(piece, rel)
    return out


def tau_scalar(ctx: PrimeContext, w: int) -> FqElement:
    return ctx.eta**w


def norm_element_check(ctx: PrimeContext, dense_limit: int = 5000) -> dict:
    """In Lambda_p: P_tau d = d, so tau(d) = eta^p d.

    Above dense_limit the piece is not built; tau permutes the y_i, so the
    check is made on the exponent vector of d = y_0 ... y_{p-1} in A_p.
    """
    p = ctx.p
    if math.comb(2 * p - 2, p - 2) > dense_limit:
        e = (1,) * p
        img = tuple(e[(ctx.a * i) % p] for i in range(p))
        return {"P_tau d = d": img == e, "eta_exponent": p, "d_nonzero": True, "route": "symbolic"}
    piece = GradedPiece(p, "L", p, ctx.a)
    d = piece.norm_power(1)
    img = sparse_power_apply(piece.tau_perm, d, 1, None)
    return {"P_tau d = d": bool((img == d).all()), "eta_exponent": piece.eta_exponent, "d_nonzero": bool(any(d)), "route": "matrix"}
