import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltlab import curve, reps
from ltlab.algebra import make_prime_context

PRIMES = [3, 5, 7, 11, 13]


# ---------------------------------------------------------------- group rings and idempotents


def test_idempotents_example():
    ids = reps.central_idempotents(2, 3, 2)
    assert ids[0].element.coeffs == (5, 5)
    assert ids[1].element.coeffs == (5, 4)
    assert ids[0].element * ids[0].element == ids[0].element


@pytest.mark.parametrize("p", PRIMES)
def test_idempotent_axioms_all_divisors(p):
    for n in range(1, p):
        if (p - 1) % n:
            continue
        for prec in (1, 2, 3):
            flags = reps.idempotent_axioms(reps.central_idempotents(n, p, prec))
            assert all(flags.values()), (n, prec, flags)


def test_idempotents_reject_bad_order():
    with pytest.raises(ValueError):
        reps.central_idempotents(3, 5, 2)


@given(
    st.sampled_from([(2, 3), (4, 5), (6, 7)]),
    st.lists(st.integers(-30, 30), min_size=6, max_size=6),
    st.lists(st.integers(-30, 30), min_size=6, max_size=6),
    st.lists(st.integers(-30, 30), min_size=6, max_size=6),
)
def test_group_ring_axioms(np_, a, b, c):
    n, p = np_
    x, y, z = (reps.GroupRingElement(n, p, 2, tuple(v[:n])) for v in (a, b, c))
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert (x + y) * z == x * z + y * z
    M = p**2
    assert (x * y).augmentation() == x.augmentation() * y.augmentation() % M


@pytest.mark.parametrize("p", [5, 7, 11])
def test_idempotents_split_differentials(p):
    ctx = make_prime_context(p)
    basis = curve.differential_basis(ctx)
    flat = [d for grp in basis.values() for d in grp]
    # the order-(p-1) generator acts on the pushforward by a^(char); rewrite as a
    # power of the primitive root used by the idempotents
    from ltlab.algebra import discrete_log_mod_p, primitive_root

    g = primitive_root(p)
    la = discrete_log_mod_p(ctx.a, g, p)
    exps = [d.char_exponent * la % (p - 1) for d in flat]
    proj = reps.project_eigenvectors(reps.central_idempotents(p - 1, p, 2), exps)
    assert sorted(i for v in proj.values() for i in v) == list(range(len(flat)))
    by_proj = {frozenset(v) for v in proj.values() if v}
    start = 0
    by_curve = set()
    for grp in basis.values():
        by_curve.add(frozenset(range(start, start + len(grp))))
        start += len(grp)
    assert by_proj == by_curve


# ---------------------------------------------------------------- standard representation


def test_standard_rep_examples():
    fam = reps.standard_rep(3)
    assert fam["cycle"].entries == ((0, -1), (1, -1))
    assert fam["cycle"].order() == 3
    assert fam["transposition"].order() == 2
    for n in range(2, 8):
        assert reps.standard_rep(n)["cycle"].trace() == -1


def test_restrict_identity_word():
    gens = {"c": (1, 2, 0)}
    assert reps.restrict_word(gens, [], 3) == reps.standard_rep_matrix((0, 1, 2))
    assert reps.restrict_word(gens, ["c", "c", "c"], 3) == reps.standard_rep_matrix((0, 1, 2))


@given(st.permutations(range(6)), st.permutations(range(6)))
def test_standard_rep_is_homomorphism(s, t):
    comp = tuple(s[t[i]] for i in range(6))
    assert reps.standard_rep_matrix(comp) == reps.standard_rep_matrix(s) @ reps.standard_rep_matrix(t)


# ---------------------------------------------------------------- rich / richp


def test_rich_p3_matrix():
    r = reps.rich_basis_check(make_prime_context(3))
    assert r.matrix.entries == ((1, 0), (8, 1))
    assert r.det % 3 == 1 and r.augmentation == 0


@pytest.mark.parametrize("p", PRIMES)
def test_rich_all_primes(p):
    r = reps.rich_basis_check(make_prime_context(p))
    assert r.det_is_unit and r.intertwines_sigma and r.intertwines_tau and r.augmentation == 0


def test_rich_wrong_root_is_singular():
    # a (p-1)-th root other than the inverse Teichmuller lift of a fails to generate
    ctx = make_prime_context(5)
    good = reps.rich_basis_check(ctx).zeta
    others = [z for z in range(2, 25) if pow(z, 4, 25) == 1 and z != good]
    assert others and all(not reps.rich_basis_check(ctx, z).det_is_unit for z in others)


def test_richp_p3():
    r = reps.richp_check(3)
    assert r.ybar_u == [0, 2, 2]
    assert r.leading_congruence and r.generates and r.span_rank == 2


@pytest.mark.parametrize("p", PRIMES)
def test_richp_all(p):
    r = reps.richp_check(p)
    assert r.leading_congruence and r.generates and r.span_rank == p - 1 and r.augmentation == 0


# ---------------------------------------------------------------- graded pieces


def test_piece_w1_matches_standard_rep():
    piece = reps.GradedPiece(3, "L", 1, 2)
    S = piece.sigma.toarray()
    # basis of Lambda_1 is y_0, y_1 in decreasing lex order
    assert piece.basis.tolist() == [[1, 0], [0, 1]]
    assert S.tolist() == [[0, -1], [1, -1]]


def test_piece_w0_identity():
    for kind in ("A", "L"):
        piece = reps.GradedPiece(5, kind, 0, 3)
        assert piece.dim == 1
        assert piece.sigma.toarray().tolist() == [[1]] and piece.tau_perm.toarray().tolist() == [[1]]


@given(st.sampled_from([3, 5, 7]), st.integers(0, 6), st.sampled_from(["A", "L"]))
@settings(max_examples=30, deadline=None)
def test_piece_relations(p, w, kind):
    ctx = make_prime_context(p)
    piece = reps.GradedPiece(p, kind, w, ctx.a)
    rel = reps.check_piece_relations(piece)
    assert all(rel.values()), rel


def test_piece_relations_random_vector_route():
    piece = reps.GradedPiece(7, "L", 8, 3)
    assert piece.dim > 400
    assert all(reps.check_piece_relations(piece).values())


def test_semidirect_module_dims():
    ctx = make_prime_context(5)
    pieces = reps.semidirect_module(ctx, 6)
    from math import comb

    assert [pc.piece.dim for pc in pieces.values()] == [comb(w + 3, 3) for w in range(7)]
    assert all(pc.ok for pc in pieces.values())


@pytest.mark.parametrize("p", PRIMES)
def test_norm_element(p):
    d = reps.norm_element_check(make_prime_context(p))
    assert d["P_tau d = d"] and d["d_nonzero"] and d["eta_exponent"] == p


def test_norm_element_routes_agree():
    ctx = make_prime_context(5)
    a = reps.norm_element_check(ctx)
    b = reps.norm_element_check(ctx, dense_limit=0)
    assert a["route"] == "matrix" and b["route"] == "symbolic"
    assert a["P_tau d = d"] == b["P_tau d = d"]


def test_vector_substitution():
    # in Lambda, y_{p-1} = -(y_0 + ... + y_{p-2})
    piece = reps.GradedPiece(3, "L", 1, 2)
    v = piece.vector({(0, 0, 1): 1})
    assert list(v) == [-1, -1]
    # d = y_0 y_1 y_2 in Lambda_3: y_0 y_1 (-y_0 - y_1)
    p3 = reps.GradedPiece(3, "L", 3, 2)
    d = p3.norm_power(1)
    expect = p3.vector({(2, 1, 0): -1, (1, 2, 0): -1})
    assert np.array_equal(d, expect)
