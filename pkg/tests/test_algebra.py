import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from ltlab.algebra import (
    ColumnSpaceModP,
    CyclotomicP,
    FiniteField,
    IntMatrix,
    PrecisionError,
    TruncatedSeries,
    ZmodPN,
    _field_for,
    lambda_valuation,
    lambda_valuation_closed_form,
    make_prime_context,
    rank_mod_p,
    smith_valuation_counts,
    teichmuller,
    vp,
)

PRIMES = [3, 5, 7, 11, 13]


# ---------------------------------------------------------------- Z/p^N


@given(st.sampled_from(PRIMES), st.integers(1, 4), st.integers(), st.integers(), st.integers())
def test_zmodpn_ring_axioms(p, n, a, b, c):
    x, y, z = (ZmodPN(p, n, v) for v in (a, b, c))
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert (x - x).value == 0


@given(st.sampled_from(PRIMES), st.integers(1, 4), st.integers())
def test_zmodpn_inverse(p, n, a):
    x = ZmodPN(p, n, a)
    if a % p == 0:
        with pytest.raises(ZeroDivisionError):
            x.inverse()
    else:
        assert (x * x.inverse()).value == 1


def test_vp():
    assert vp(54, 3) == 3
    assert vp(-250, 5) == 3
    with pytest.raises(ValueError):
        vp(0, 3)


# ---------------------------------------------------------------- contexts


def test_prime_context_examples():
    c3 = make_prime_context(3)
    assert c3.q == 9 and c3.a == 2
    assert c3.field.multiplicative_order(c3.zeta) == 4
    c5 = make_prime_context(5)
    assert c5.q == 625 and c5.field.multiplicative_order(c5.zeta) == 16
    assert c5.a in (2, 3)


@pytest.mark.parametrize("p", PRIMES)
def test_prime_context_roots(p):
    ctx = make_prime_context(p)
    n = (p - 1) ** 2
    assert ctx.field.multiplicative_order(ctx.zeta) == n
    assert ctx.field.multiplicative_order(ctx.field.generator) == ctx.q - 1
    assert sympy.n_order(ctx.a, p) == p - 1
    # eta is the inverse of zeta, so eta^(p-1) reads as a^-1 in F_p
    assert (ctx.eta * ctx.zeta) == ctx.field.one()
    assert (ctx.eta ** (p - 1)).to_int() * ctx.a % p == 1


def test_prime_context_rejects():
    with pytest.raises(ValueError):
        make_prime_context(2)
    with pytest.raises(ValueError):
        make_prime_context(3, prec=1)


@given(st.sampled_from([(3, 2), (5, 2), (7, 1), (2, 5)]), st.data())
@settings(max_examples=60)
def test_finite_field_axioms(pm, data):
    F = FiniteField(*pm)
    codes = st.integers(0, F.q - 1)
    x, y, z = (F.from_code(data.draw(codes)) for _ in range(3))
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert (x + y) * z == x * z + y * z
    if not x.is_zero():
        assert x * x.inverse() == F.one()


# ---------------------------------------------------------------- Teichmuller


def test_teichmuller_examples():
    assert teichmuller(1, 3, 4).value == 1
    assert teichmuller(2, 3, 2).value == 8
    assert teichmuller(2, 5, 2).value == 7
    with pytest.raises(ValueError):
        teichmuller(0, 5, 2)


@given(st.sampled_from(PRIMES), st.integers(2, 5), st.integers(1, 1000), st.integers(1, 1000))
def test_teichmuller_multiplicative(p, n, s, t):
    if s % p == 0 or t % p == 0:
        return
    ws, wt, wst = teichmuller(s, p, n), teichmuller(t, p, n), teichmuller(s * t, p, n)
    assert wst == ws * wt
    assert pow(ws.value, p - 1, p**n) == 1


# ---------------------------------------------------------------- cyclotomic


def test_lambda_valuation_examples():
    for p in (3, 5, 7):
        lam = CyclotomicP.lam(p, 3)
        assert lambda_valuation(lam) == (1, 1)
        v, u = lambda_valuation(CyclotomicP.constant(p, 3, p))
        assert v == p - 1 and u % p
    x = CyclotomicP.from_powers(3, 3, {1: -1, 2: 1})
    assert lambda_valuation(x) == (1, 2)


def test_lambda_valuation_precision():
    with pytest.raises(PrecisionError):
        lambda_valuation(CyclotomicP.constant(3, 2, 9))


def _cyclo(p, prec):
    return st.lists(st.integers(-50, 50), min_size=p - 1, max_size=p - 1).map(
        lambda c: CyclotomicP(p, prec, tuple(c))
    )


@given(st.sampled_from([3, 5, 7]).flatmap(lambda p: st.tuples(_cyclo(p, 4), _cyclo(p, 4))))
@settings(max_examples=80)
def test_lambda_valuation_additive_and_two_routes(pair):
    x, y = pair
    try:
        vx, ux = lambda_valuation(x)
        vy, uy = lambda_valuation(y)
    except PrecisionError:
        return
    p = x.p
    assert (vx, ux) == lambda_valuation_closed_form(x)
    if vx + vy < (p - 1) * (x.prec - 1):
        vxy, uxy = lambda_valuation(x * y)
        assert vxy == vx + vy
        assert uxy == ux * uy % p


# ---------------------------------------------------------------- series


def _series(draw_ints, p=3, prec=3, D=6):
    terms = {(i, j): c for (i, j), c in draw_ints.items() if i + j <= D}
    return TruncatedSeries.from_dict(("x", "y"), D, p, prec, terms)


series_terms = st.dictionaries(st.tuples(st.integers(0, 6), st.integers(0, 6)), st.integers(-20, 20), max_size=8)


@given(series_terms, series_terms, series_terms)
@settings(max_examples=60)
def test_series_ring_axioms(a, b, c):
    x, y, z = _series(a), _series(b), _series(c)
    assert ((x * y) * z - x * (y * z)).is_zero()
    assert ((x + y) * z - (x * z + y * z)).is_zero()
    assert (x * y - y * x).is_zero()


# ---------------------------------------------------------------- linear algebra


small_mats = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


@given(small_mats)
@settings(max_examples=80, deadline=None)
def test_smith_against_minors(rows):
    M = IntMatrix(rows)
    d = M.smith_diagonal()
    for i in range(len(d) - 1):
        assert d[i + 1] % d[i] == 0
    k = len(d)
    assert k == sympy.Matrix(rows).rank()
    if k:
        prod = 1
        for x in d:
            prod *= x
        assert prod == M.minors_gcd(k)


@given(small_mats, st.sampled_from([2, 3, 5]))
@settings(max_examples=80, deadline=None)
def test_valuation_counts_match_smith(rows, p):
    vals = IntMatrix(rows).elementary_divisor_valuations(p)
    counts = smith_valuation_counts(np.array(rows, dtype=np.int64) % p**3, p, 3)
    assert counts == [sum(v == k for v in vals) for k in range(3)]


@given(st.integers(0, 2**31))
@settings(max_examples=20, deadline=None)
def test_smith_counts_permutation_invariant(seed):
    rng = np.random.default_rng(seed)
    A = rng.integers(-4, 5, size=(7, 6)) * rng.integers(1, 4, size=(7, 1))
    c1 = smith_valuation_counts(A % 27, 3, 3)
    P = rng.permutation(7)
    Q = rng.permutation(6)
    c2 = smith_valuation_counts(A[P][:, Q] % 27, 3, 3)
    assert c1 == c2


def _gf_rank(A, p):
    from sympy import GF
    from sympy.polys.matrices import DomainMatrix

    return DomainMatrix.from_list_sympy(*A.shape, A.tolist()).convert_to(GF(p)).rank()


def test_blocked_elimination_against_field_rank():
    # sizes beyond one 64-column panel exercise the blocked update
    rng = np.random.default_rng(7)
    for n, r in ((150, 90), (200, 141)):
        A = (rng.integers(0, 5, size=(n, r)) @ rng.integers(0, 5, size=(r, n))) % 5
        assert rank_mod_p(A, 5) == _gf_rank(A, 5)
        assert rank_mod_p(A, 5) <= r


def test_rank_mod_p_small_oracle():
    rng = np.random.default_rng(3)
    for _ in range(20):
        A = rng.integers(0, 3, size=(6, 5))
        assert rank_mod_p(A, 3) == _gf_rank(A, 3)


def test_column_space_membership():
    rng = np.random.default_rng(11)
    A = rng.integers(0, 7, size=(30, 12))
    cs = ColumnSpaceModP(A, 7)
    v = A @ rng.integers(0, 7, size=12)
    assert cs.contains(v % 7)
    assert cs.rank == rank_mod_p(A, 7)
    if cs.rank < 30:
        e = np.zeros(30, dtype=np.int64)
        hits = 0
        for i in range(30):
            e[:] = 0
            e[i] = 1
            hits += cs.contains(e)
        assert hits < 30


@given(st.sampled_from([(3, 2), (5, 4), (13, 12), (2, 5)]), st.data())
@settings(max_examples=60, deadline=None)
def test_finite_field_mul_against_galoistools(pm, data):
    from sympy import ZZ
    from sympy.polys.galoistools import gf_mul, gf_rem

    F = _field_for(*pm)
    x, y = (F.from_code(data.draw(st.integers(0, F.q - 1))) for _ in range(2))
    hl = gf_rem(gf_mul(list(reversed(x.coeffs)), list(reversed(y.coeffs)), F.p, ZZ), list(F.modulus_hl), F.p, ZZ)
    low = list(reversed(hl))
    assert (x * y).coeffs == tuple(low + [0] * (F.m - len(low)))
