import random

import pytest

from synmod.chart import Chart, Divisor, EisensteinData
from synmod.forms import wedge
from synmod.outcome import HYP_NOT_MET
from synmod.poly import TruncatedPoly
from synmod.symbols import (MonoidElement, SymbolInput, base_changed_chart,
                            check_graded_symbol_map, check_product_iso,
                            check_symbol_filtration, check_tame_base_change,
                            dphi_over_p_dlog, random_symbol, symbol_cocycle,
                            unit_log_ratio)


@pytest.fixture
def chart():
    return Chart(3, 2, 9)


@pytest.fixture
def divisor(chart):
    return Divisor(chart, {1: 1, 2: 2})


def unit(chart, exps, c=1):
    R = chart.mod_p2
    return (TruncatedPoly.one(R, chart.nvars, chart.window)
            + TruncatedPoly.monomial(R, chart.nvars, chart.window, exps, c))


def test_trivial_symbol(chart, divisor):
    R = chart.mod_p2
    one = TruncatedPoly.one(R, chart.nvars, chart.window)
    x, y = symbol_cocycle(chart, SymbolInput(one, []), divisor)
    assert x.is_zero() and y.is_zero()


def test_q1_symbol_series(chart, divisor):
    # q=1: first component dlog x expands into the alternating series
    tw = list(divisor.twist_exps())
    tw[0] += 1
    sym = SymbolInput(unit(chart, tw), [])
    xpart, ypart = symbol_cocycle(chart, sym, divisor)
    assert xpart.degrees() == [1]
    assert len(xpart.terms) >= 2  # the unit inverse produces a series


def test_q2_product_formula_sign(chart, divisor):
    # the y-part of {x, a} is p^{-1}log(x^p phi x^{-1}) dphi/p(dlog a)
    #                      - p^{-1}log(a^p phi a^{-1}) dlog x
    from synmod.forms import LogForm
    from synmod.symbols import _field_poly, _reduce_form
    from synmod.forms import dlog_of_unit
    tw = list(divisor.twist_exps())
    tw[0] += 1
    x = unit(chart, tw)
    a = unit(chart, (0, 0, 1, 0), 2)
    sym = SymbolInput(x, [MonoidElement(a, (0,) * chart.nvars)])
    xpart, ypart = symbol_cocycle(chart, sym, divisor)
    lead = LogForm.from_poly(chart, _field_poly(chart, unit_log_ratio(chart, x)))
    want = wedge(lead, dphi_over_p_dlog(chart, MonoidElement(a, (0,) * chart.nvars)))
    corr = LogForm.from_poly(chart, _field_poly(chart, unit_log_ratio(chart, a)))
    want = want - wedge(corr, _reduce_form(dlog_of_unit(chart, x)))
    assert ypart == want


def test_monomial_tails_drop_log_terms(chart, divisor):
    # a_i = pi (a monomial): a^p phi(a)^{-1} = 1 so only the lead survives
    tw = list(divisor.twist_exps())
    tw[0] += 1
    sym = SymbolInput(unit(chart, tw),
                      [MonoidElement(None, (1, 0, 0, 0))])
    xpart, ypart = symbol_cocycle(chart, sym, divisor)
    lead_only = symbol_cocycle(
        chart, SymbolInput(unit(chart, tw), [MonoidElement(None, (1, 0, 0, 0))]),
        divisor)[1]
    assert ypart == lead_only


def test_random_symbols_are_cocycles(chart, divisor):
    rng = random.Random(11)
    for _ in range(25):
        sym = random_symbol(chart, divisor, rng.choice([1, 2]), 1, rng)
        symbol_cocycle(chart, sym, divisor)  # raises on violation


def test_symbol_filtration_memberships(chart, divisor):
    R = chart.mod_p2
    tw = divisor.twist_exps()
    xt = TruncatedPoly.monomial(R, chart.nvars, chart.window, tw)
    for m in (1, 2, 3):
        o = check_symbol_filtration(chart, divisor, m, xt)
        assert o.ok(), (m, o.notes)
    o = check_symbol_filtration(chart, divisor, 1,
                                TruncatedPoly.zero(R, chart.nvars, chart.window))
    assert o.ok()


def test_symbol_filtration_rejects_bad_input(chart, divisor):
    R = chart.mod_p2
    bad = TruncatedPoly.monomial(R, chart.nvars, chart.window, (0, 0, 1, 0))
    with pytest.raises(ValueError):
        check_symbol_filtration(chart, divisor, 1, bad)  # not in the ideal


def test_graded_symbol_map(chart, divisor):
    for q in (1, 2):
        for m in (0, 1, 2, 3):
            o = check_graded_symbol_map(chart, divisor, chart.eisenstein, q, m,
                                        n_symbols=8)
            assert o.ok(), (q, m, o.notes)


def test_product_iso_p3_e2():
    ch = Chart(3, 2, 9, eisenstein=EisensteinData(2, (1, 2)))
    D = Divisor(ch, {1: 1, 2: 2})
    for (q, r) in ((0, 0), (0, 1), (1, 1)):
        o = check_product_iso(ch, D, ch.eisenstein, q, r)
        assert o.ok(), (q, r, o.notes)
    # fractional m_0: hypothesis not met, never asserted
    ch1 = Chart(3, 1, 9)  # e = 1: m_0 = 3/2
    o = check_product_iso(ch1, Divisor(ch1), ch1.eisenstein, 0, 1)
    assert o.status == HYP_NOT_MET


def test_product_iso_generic_a0_over_F9():
    ch = Chart(3, 1, 9, s=2, eisenstein=EisensteinData(2, (2, 0)))
    assert 2 in ch.field.pth_power_coset()
    o = check_product_iso(ch, Divisor(ch, {1: 1}), ch.eisenstein, 0, 1)
    assert o.ok(), o.notes


def test_product_iso_bad_a0_rejected():
    ch = Chart(3, 1, 9, eisenstein=EisensteinData(2, (2, 0)))
    with pytest.raises(ValueError, match="primitive"):
        check_product_iso(ch, Divisor(ch), ch.eisenstein, 0, 1)


def test_base_changed_chart():
    ch = Chart(3, 1, 9, eisenstein=EisensteinData(2, (2, 1)))
    ch2 = base_changed_chart(ch, 2)
    assert ch2.eisenstein.e == 4
    assert ch2.eisenstein.coeffs == (2, 0, 1, 0)


def test_tame_base_change(chart):
    ch = Chart(3, 2, 9, eisenstein=EisensteinData(2, (1, 2)))
    D = Divisor(ch, {1: 1, 2: 2})
    for w in (1, 2):
        o = check_tame_base_change(ch, D, ch.eisenstein, 1, 1, w)
        assert o.ok(), (w, o.notes)
    o = check_tame_base_change(ch, D, ch.eisenstein, 1, 1, 3)
    assert o.ok(), o.notes
    assert o.dims["tame"] is False
