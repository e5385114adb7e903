import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltlab import curve
from ltlab.algebra import make_prime_context

PRIMES = [3, 5, 7, 11, 13]


@pytest.fixture(scope="module", params=PRIMES)
def ctx(request):
    return make_prime_context(request.param)


def test_automorphism_relations(ctx):
    rep = curve.automorphism_group(ctx)
    assert rep.ok
    assert len(rep.relations) == 6


def test_tau_shape_p3():
    ctx = make_prime_context(3)
    t = curve.tau(ctx)
    assert t.alpha == ctx.zeta**3 and t.beta == ctx.zeta**2 and t.gamma.is_zero()
    assert curve.preserves_curve(ctx, t)


def test_sigma_order(ctx):
    s = curve.sigma(ctx)
    assert (s ** ctx.p).is_identity()
    assert not (s ** (ctx.p - 1)).is_identity()


def test_corrupted_tau_names_relation():
    ctx = make_prime_context(3)
    with pytest.raises(curve.RelationError, match="tau preserves"):
        curve.automorphism_group(ctx, corrupt_tau=True)


@given(st.sampled_from([3, 5, 7]), st.lists(st.sampled_from("sStT"), min_size=1, max_size=6))
@settings(max_examples=40, deadline=None)
def test_random_words_preserve_curve(p, word):
    ctx = make_prime_context(p)
    s, t = curve.sigma(ctx), curve.tau(ctx)
    gens = {"s": s, "S": s.inverse(), "t": t, "T": t.inverse()}
    g = gens[word[0]]
    for ch in word[1:]:
        g = g.compose(gens[ch])
    assert curve.preserves_curve(ctx, g)


def test_group_has_expected_order(ctx):
    p = ctx.p
    elems = curve.group_elements(ctx)
    assert len({g.key() for g in elems}) == p * (p - 1) ** 2


# ---------------------------------------------------------------- ramification


def test_ramification_examples():
    c5, c3 = make_prime_context(5), make_prime_context(3)
    py = curve.ramification(c5, "p_y")
    assert len(py.points) == 6 and {c for _, c in py.points} == {3} and py.degree == 18
    py3 = curve.ramification(c3, "p_y")
    assert py3.degree == 4 and py3.genus_X == 1
    px3 = curve.ramification(c3, "p_x")
    assert px3.points == [((1, 0, 0), 6)]
    assert px3.riemann_hurwitz_ok()


def test_ramification_general(ctx):
    p = ctx.p
    py = curve.ramification(ctx, "p_y")
    assert py.tame and py.riemann_hurwitz_ok() and py.genus_Y == 0
    assert sorted(pt for pt, _ in py.points) == sorted([(0, i, 1) for i in range(p)] + [(1, 0, 0)])
    assert all(c == p - 2 for _, c in py.points)
    px = curve.ramification(ctx, "p_x")
    assert not px.tame and px.riemann_hurwitz_ok() and px.genus_Y == 0
    assert px.degree == p * (p - 1) and px.conductor == p - 1


# ---------------------------------------------------------------- branch permutations


def test_branch_permutations(ctx):
    p = ctx.p
    b = curve.branch_permutations(ctx)
    assert b.perm_sigma == tuple((i + 1) % p for i in range(p))
    assert b.perm_tau == curve.multiplication_perm(ctx.a, p)
    assert b.group_order == p * (p - 1)
    assert b.faithful and b.kernel_order == p - 1


def test_branch_tau_is_long_cycle():
    # a primitive root acts on F_p^x as a single (p-1)-cycle fixing 0
    for p in PRIMES:
        ctx = make_prime_context(p)
        note = curve.cycle_notation(curve.branch_permutations(ctx).perm_tau)
        assert note.count("(") == 1 and len(note.strip("()").split()) == p - 1


def test_branch_p3_is_s3():
    ctx = make_prime_context(3)
    b = curve.branch_permutations(ctx)
    assert b.group_order == 6


def test_cycle_notation():
    assert curve.cycle_notation((0, 2, 4, 1, 3)) == "(1 2 4 3)"
    assert curve.cycle_notation((0, 1, 2)) == "()"


def test_branch_words_act_faithfully_on_quotient():
    # no element outside the kernel of order p-1 fixes every branch point
    p = 5
    ctx = make_prime_context(p)
    s, t = curve.sigma(ctx), curve.tau(ctx)
    ident = tuple(range(p))
    kernel = {(t ** ((p - 1) * k)).key() for k in range(p - 1)}
    for j, k in itertools.product(range(p), range((p - 1) ** 2)):
        g = (s**j).compose(t**k)
        if curve._perm_of(g, p) == ident:
            assert g.key() in kernel


# ---------------------------------------------------------------- differentials


def test_differential_sizes(ctx):
    p = ctx.p
    basis = curve.differential_basis(ctx)
    assert sorted(len(v) for v in basis.values()) == list(range(1, p - 1))
    assert 0 not in basis
    assert sum(len(v) for v in basis.values()) == ctx.genus == curve.differential_genus(ctx)
    # the chi^k group has exactly k elements
    assert all(len(v) == k for k, v in basis.items())


def test_differential_character_formula(ctx):
    # pushforward exponent is (p - 2 - i) mod (p - 1), independent of j
    p = ctx.p
    for grp in curve.differential_basis(ctx).values():
        for d in grp:
            assert d.char_exponent == (p - 2 - d.i) % (p - 1)


def test_unique_zeta_eigendifferential(ctx):
    z = curve.zeta_eigendifferentials(ctx)
    assert [(d.i, d.j) for d in z] == [(ctx.p - 3, 0)]
    assert z[0].label() == f"x^{ctx.p - 3} y^0 omega"


def test_p3_single_differential():
    ctx = make_prime_context(3)
    basis = curve.differential_basis(ctx)
    assert basis == {1: basis[1]} and [(d.i, d.j) for d in basis[1]] == [(0, 0)]


def test_deformation_dimension(ctx):
    assert curve.deformation_dimension(ctx) == ctx.p - 2
    with pytest.raises(ValueError):
        curve.deformation_dimension(ctx, "C_p")
