from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltlab import frobenius as fr
from ltlab.algebra import CyclotomicP, lambda_valuation, lambda_valuation_closed_form

PRIMES = [3, 5, 7, 11, 13]


def test_gauss_sum_p3():
    g11 = fr.gauss_sum(3, 1, 1, 3).value
    assert g11 == CyclotomicP.from_powers(3, 3, {1: -1, 2: 1})
    g21 = fr.gauss_sum(3, 2, 1, 3).value
    assert g21 == CyclotomicP.from_powers(3, 3, {2: -1, 1: 1})


def test_gauss_sum_index_errors():
    with pytest.raises(ValueError):
        fr.gauss_sum(5, 0, 1)
    with pytest.raises(ValueError):
        fr.gauss_sum(5, 1, 4)
    with pytest.raises(ValueError):
        fr.gauss_sum(5, 1, 1, prec=1)


@pytest.mark.parametrize("p", PRIMES)
def test_stickelberger_two_routes(p):
    # valuation j, unit (-i)^j / j!, and the closed-form route agrees row by row
    t = fr.stickelberger_check(p)
    assert t.passed and t.valuations_ok
    assert len(t.rows) == (p - 1) * (p - 2)
    for r in t.rows:
        g = fr.gauss_sum(p, r.i, r.j, t.prec).value
        assert lambda_valuation(g) == lambda_valuation_closed_form(g) == (r.j, r.unit)


def test_stickelberger_p3_example():
    row = [r for r in fr.stickelberger_check(3).rows if (r.i, r.j) == (1, 1)][0]
    assert (row.valuation, row.unit) == (1, 2)
    assert row.literal_ok


def test_stickelberger_unit_is_i_dependent():
    # for j >= 2 the unit genuinely depends on i
    assert len({fr.stickelberger_unit(5, i, 2) for i in range(1, 5)}) > 1
    assert fr.stickelberger_unit(5, 1, 2) == 3
    assert fr.stickelberger_literal_unit(5, 2) == 2


@pytest.mark.parametrize("p", PRIMES)
def test_gauss_norm(p):
    assert fr.gauss_norm_check(p)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_conjugate_symmetry(p):
    assert fr.conjugate_symmetry(p)


# ---------------------------------------------------------------- point counts


def test_point_count_examples():
    assert fr.point_count(3, 1) == 4
    assert [fr.point_count(3, k) for k in (1, 2, 3)] == [4, 16, 28]


@pytest.mark.parametrize("pk", [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2), (7, 1), (7, 2)])
def test_point_count_naive_agrees(pk):
    assert fr.point_count(*pk) == fr.point_count_naive(*pk)


@given(st.sampled_from([(3, k) for k in range(1, 7)] + [(5, k) for k in range(1, 5)] + [(7, 1), (7, 2)]))
@settings(max_examples=12, deadline=None)
def test_point_count_congruent_to_one(pk):
    assert fr.point_count(*pk) % pk[0] == 1


def test_point_count_guard():
    with pytest.raises(ValueError):
        fr.point_count(13, 9)


# ---------------------------------------------------------------- L-polynomial and slopes


def test_l_polynomial_p3():
    assert fr.l_polynomial(3).coeffs == (1, 0, 3)


def test_l_polynomial_p5():
    L = fr.l_polynomial(5)
    assert L.coeffs == (1, 0, -10, 0, 55, 0, -300, 0, 1375, 0, -6250, 0, 15625)
    assert abs(L.coeffs[-1]) == 5**6


def test_l_polynomial_functional_equation_enforced():
    with pytest.raises(ValueError):
        fr.LPolynomial(3, 1, (1, 0, 4))


def test_l_polynomial_predicts_higher_counts():
    # counts for k > g are not used to build L, so they are an independent check
    L = fr.l_polynomial(3)
    s = L.power_sums(4)
    assert [3**k + 1 - s[k - 1] for k in (2, 3, 4)] == [fr.point_count(3, k) for k in (2, 3, 4)]


def test_zeta_slopes():
    assert fr.zeta_slopes(3).multiset() == [Fraction(1, 2)] * 2
    z5 = fr.zeta_slopes(5)
    assert z5.as_list() == [[1, 4, 4], [1, 2, 4], [3, 4, 4]]
    assert sum(z5.multiset()) == 6 and z5.total_length() == 12
    with pytest.raises(ValueError):
        fr.zeta_slopes(7)


@pytest.mark.parametrize("p", PRIMES)
def test_gauss_slopes(p):
    g = fr.gauss_slopes(p)
    assert g == fr.expected_slopes(p)
    assert g.total_length() == (p - 1) * (p - 2)


@pytest.mark.parametrize("p", [3, 5])
def test_slope_oracles_agree(p):
    assert sorted(fr.gauss_slopes(p).multiset()) == sorted(fr.zeta_slopes(p).multiset())


@pytest.mark.parametrize("p", [3, 5])
def test_gauss_power_sums_match_counts(p):
    assert fr.gauss_power_sum_check(p)


def test_newton_polygon_simple():
    L = fr.LPolynomial(3, 1, (1, 0, 3))
    assert fr.newton_polygon(L).as_list() == [[1, 2, 2]]
