import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltlab import tate
from ltlab.algebra import make_prime_context


def _pair(tr):
    return tr.even, tr.odd


# ---------------------------------------------------------------- small pieces


def test_small_pieces_p3():
    assert _pair(tate.tate_rank(3, "L", 0)) == (1, 0)
    assert _pair(tate.tate_rank(3, "L", 1)) == (0, 1)
    assert _pair(tate.tate_rank(3, "L", 2)) == (0, 0)


def test_small_pieces_p5():
    assert _pair(tate.tate_rank(5, "L", 5)) == (1, 0)
    assert _pair(tate.tate_rank(5, "L", 6)) == (0, 1)
    assert _pair(tate.tate_rank(5, "A", 5)) == (1, 0)
    assert _pair(tate.tate_rank(5, "A", 6)) == (0, 0)


def test_rank_record_contents():
    tr = tate.tate_rank(3, "L", 3)
    d = tr.as_dict()
    assert d["internal_degree"] == -6 and d["match"]
    assert set(d["routes"]) >= {"definition", "smith", "herbrand"}
    assert all(d["checks"].values())
    assert tr.even_reps and not tr.odd_reps


@given(st.sampled_from([3, 5, 7]), st.integers(0, 9), st.sampled_from(["A", "L"]))
@settings(max_examples=25, deadline=None)
def test_routes_agree_and_match_prediction(p, w, module):
    tr = tate.tate_rank(p, module, w)
    assert len(set(tr.routes.values())) == 1
    assert tr.match and all(tr.checks.values())


@given(st.sampled_from([3, 5]), st.integers(0, 12))
@settings(max_examples=15, deadline=None)
def test_periodic_in_w(p, w):
    # multiplication by the norm element shifts w by p and is an isomorphism on Tate cohomology
    assert _pair(tate.tate_rank(p, "L", w)) == _pair(tate.tate_rank(p, "L", w + p))


def test_piece_dimension():
    assert tate.piece_dimension(3, "L", 4) == 5
    assert tate.piece_dimension(3, "A", 4) == 15
    assert tate.piece_dimension(5, "A", 25) == 23751


def test_large_A_piece_uses_orbit_census():
    tr = tate.tate_rank(5, "A", 25, reps=False)
    assert _pair(tr) == (1, 0)
    assert "definition" not in tr.routes and "orbit_census" in tr.routes


def test_guards():
    with pytest.raises(tate.GuardError):
        tate.tate_rank(3, "L", 61)
    with pytest.raises(tate.GuardError):
        tate.tate_rank(13, "L", 8)
    with pytest.raises(ValueError):
        tate.tate_rank(3, "B", 1)


# ---------------------------------------------------------------- tau eigenvalues


def test_tau_examples_p3():
    assert tate.tau_eigenvalue(3, 0, 0).exponent == 0
    assert tate.tau_eigenvalue(3, 1, 1).exponent == 3
    for m in range(4):
        te = tate.tau_eigenvalue(3, 0, 3 * m)
        assert te.exponent % 4 == (3 * m) % 4


def test_b_exponent():
    # b transforms by a^-1 under the order-(p-1) quotient, i.e. eta^(p-1)
    assert tate.b_exponent(3) == 2
    assert tate.b_exponent(5) == 4


def test_tau_eigenvalue_rejects_empty_cell():
    with pytest.raises(ValueError):
        tate.tau_eigenvalue(3, 0, 1)
    with pytest.raises(ValueError):
        tate.tau_eigenvalue(3, 1, 1, module="A")


@given(st.sampled_from([3, 5]), st.integers(0, 15), st.integers(0, 7))
@settings(max_examples=25, deadline=None)
def test_tau_exponents(p, w, s):
    s %= 2 * (p - 1)
    tr = tate.tate_rank(p, "L", w, reps=False)
    if (tr.even, tr.odd)[s % 2] == 0:
        return
    te = tate.tau_eigenvalue(p, s, w)
    assert te.ok
    assert 0 <= te.exponent < (p - 1) ** 2


@pytest.mark.parametrize("p,w", [(3, 0), (3, 1), (3, 4), (5, 5), (5, 6), (5, 11)])
def test_tau_well_defined(p, w):
    assert tate.tau_well_defined(p, w)
    assert tate.tau_order_ok(p, w)


# ---------------------------------------------------------------- invariant table


def test_census():
    assert tate.census_predicts(3, 0, 0) == 1
    assert tate.census_predicts(3, 1, 1) == 0
    assert tate.census_predicts(3, 3, 4) == 1
    assert tate.census_predicts(3, 0, 12) == 1


def test_invariant_table_p3():
    T = tate.invariant_count(3, wrange=range(25))
    assert T.passed
    cells = sorted((c.s, c.w) for c in T.cells if c.invariant_rank)
    assert cells == [(0, 0), (0, 12), (0, 24), (1, 10), (1, 22), (2, 6), (2, 18), (3, 4), (3, 16)]
    d = T.as_dict()
    assert d["mismatches"] == 0 and len(d["cells"]) == 4 * 25


def test_multiplication_maps_p3():
    assert all(tate.multiplication_action_check(3, 12).values())


def test_x_element_has_no_norm_monomial():
    for p in (3, 5, 7):
        x = tate.x_element(p)
        assert x.get((1,) * p, 0) % p == 0


@pytest.mark.parametrize("w", range(0, 13))
def test_brute_force_p3(w):
    r = tate.brute_force_gprime(3, w)
    assert r["group_order"] == 12
    assert r["agree"]


# ---------------------------------------------------------------- engine internals


def test_complex_exact_and_trace():
    eng = tate.PieceCohomology(make_prime_context(5), "L", 7)
    assert eng.complex_exact()
    assert eng.trace_powers_equal()
    v = np.arange(eng.n) % 5
    assert not (eng.apply_T(eng.apply_N(v, 5), 5) % 5).any()
