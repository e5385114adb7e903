from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltlab import fgl
from ltlab.algebra import rank_mod_p


def _log(p, coeffs, maxdeg=12, prec=4):
    return fgl.log_from_rationals(coeffs, p, maxdeg, prec)


def mult_log(p, maxdeg=12):
    # log(1 + x)
    return _log(p, {n: Fraction((-1) ** (n + 1), n) for n in range(1, maxdeg + 1)}, maxdeg)


# ---------------------------------------------------------------- toy formal groups


@pytest.mark.parametrize("p", [3, 5])
def test_additive_law(p):
    F = fgl.fgl_from_log(_log(p, {1: 1}))
    assert F.F.coeffs == {(1, 0): 1, (0, 1): 1}
    assert all(F.checks().values())


@pytest.mark.parametrize("p", [3, 5, 7])
def test_multiplicative_law(p):
    F = fgl.fgl_from_log(mult_log(p))
    assert F.F.coeffs == {(1, 0): 1, (0, 1): 1, (1, 1): 1}
    assert all(F.checks().values())


@pytest.mark.parametrize("p", [3, 5])
def test_multiplicative_height_one(p):
    ps = fgl.p_series(mult_log(p))
    assert ps.linear_ok()
    assert ps.first_exponent_mod_p == p and ps.leading_unit == 1


def test_p_typicalize_keeps_prime_powers():
    L = mult_log(3, 27)
    Lt = fgl.p_typicalize(L)
    assert {k[0] for k in Lt.coeffs} == {1, 3, 9, 27}
    assert fgl.p_typicalize(Lt) == Lt


@pytest.mark.parametrize("p", [3, 5])
def test_isomorphism_to_typical(p):
    assert all(fgl.isomorphism_check(mult_log(p), 12).values())


@pytest.mark.parametrize("p", [3, 5])
def test_p_series_two_routes(p):
    L = mult_log(p)
    F = fgl.fgl_from_log(L)
    assert fgl.p_series_iterated(F) == fgl.p_series(L).series


def test_non_strict_log_rejected():
    with pytest.raises(ValueError):
        fgl.fgl_from_log(_log(3, {1: 2, 2: 1}))


@given(st.integers(-5, 5), st.integers(-5, 5))
@settings(max_examples=15, deadline=None)
def test_hazewinkel_logs_give_integral_laws(v1, v2):
    # f(x) = x + (v1/p) x^p + (v1^(1+p)/p^2 + v2/p) x^(p^2) always has an integral law
    p = 3
    L = _log(p, {1: 1, 3: Fraction(v1, 3), 9: Fraction(v1**4, 9) + Fraction(v2, 3)}, maxdeg=9)
    F = fgl.fgl_from_log(L)
    assert F.is_integral() and F.commutative() and F.unit_ok()
    assert F.associative(6)
    ps = fgl.p_series(L)
    # height 1 iff v1 is a unit, height 2 iff only v2 is
    if v1 % 3:
        assert ps.first_exponent_mod_p == 3
    elif v2 % 3:
        assert ps.first_exponent_mod_p == 9


# ---------------------------------------------------------------- the curve's formal group


@pytest.mark.parametrize("p", [3, 5])
def test_local_equation_routes(p):
    a = fgl.solve_local_equation(p, method="newton")
    b = fgl.solve_local_equation(p, method="fixed_point")
    assert a.W == b.W
    assert fgl.local_equation_residual(a).is_zero()
    assert a.rounds <= b.rounds


def test_local_equation_rejects():
    with pytest.raises(ValueError):
        fgl.solve_local_equation(3, method="bogus")
    with pytest.raises(ValueError):
        fgl.solve_local_equation(5, ydeg=2)


@pytest.mark.parametrize("p", [3, 5])
def test_invariant_differential(p):
    d = fgl.invariant_differential(p)
    assert d.coefficient(0)[0] == 1 and not any(d.coefficient(0)[1:])
    assert fgl.density_quotient_route(d)


@pytest.mark.parametrize("p", [3, 5])
def test_curve_law_axioms(p):
    d = fgl.invariant_differential(p, 0)
    F = fgl.fgl_from_log(fgl.logarithm(d), maxdeg=min(d.ydeg, 2 * p + 3))
    assert all(F.checks().values())


@pytest.mark.parametrize("p,rank", [(3, 1), (5, 3)])
def test_recognition(p, rank):
    r = fgl.recognition_check(p)
    assert r.rank == r.rank_display == rank == p - 2
    assert r.passed


def test_recognition_ppower_rows_are_degenerate():
    # the p^j - 1 coefficients alone do not see all deformation directions
    r = fgl.recognition_check(5)
    assert rank_mod_p(np.array(r.ppower_linear, dtype=np.int64), 5) < 3


@pytest.mark.parametrize("p,h,n", [(3, 2, 9), (5, 4, 625)])
def test_height(p, h, n):
    r = fgl.height_check(p)
    assert (r.height, r.first_exponent) == (h, n)
    assert r.linear_ok and r.support_ok
    assert r.v_mod_p[-1] != 0 and not any(r.v_mod_p[:-1])


def test_height_p7_opt_in():
    with pytest.raises(ValueError):
        fgl.height_check(7)


@pytest.mark.parametrize("p", [3, 5])
def test_special_fibre_density_support(p):
    # the order-(p-1) symmetry Y -> zeta Y forces support in multiples of p - 1
    d = fgl.invariant_differential(p, 0)
    support = d.support_mod_p()
    assert support[0] == 0
    assert all(e % (p - 1) == 0 for e in support)
    assert any(e % p not in (0, p - 1) for e in support)


@pytest.mark.slow
@pytest.mark.parametrize("p,D,assoc", [(3, 18, 18), (5, 30, 20)])
def test_curve_law_associative_deep(p, D, assoc):
    d = fgl.invariant_differential(p, 0, D, p + 2)
    F = fgl.fgl_from_log(fgl.logarithm(d), D)
    assert F.associative(assoc)
