import pytest

from synmod.chart import Chart, Divisor
from synmod.fields import zmod
from synmod.pd import PDElement, PDRing
from synmod.poly import DivisibilityError, TruncatedPoly
from synmod.syntomic import check_pd_envelope


@pytest.fixture
def ring():
    return PDRing(Chart(3, 1, 6), k=1)


def test_pd_multiplication_structure(ring):
    g1 = ring.g1()
    sq = g1 * g1
    # g1 * g1 = 2 * g1^[2]
    assert sq.terms == {((0,), 1 + 1 - 2, 0): 2} or sq.terms == {((0,), 2, 0): 2}


def test_divided_power_of_generator(ring):
    g2 = ring.g2()
    dp = ring.divided_power(g2, 2)
    assert dp.terms == {((0,), 0, 2): 1}
    # x^[1] = x
    assert ring.divided_power(g2, 1) == g2


def test_divided_power_of_sum(ring):
    # (g1 + g2)^[2] = g1^[2] + g1 g2 + g2^[2]
    s = ring.g1() + ring.g2()
    dp = ring.divided_power(s, 2)
    want = {((0,), 2, 0): 1, ((0,), 1, 1): 1, ((0,), 0, 2): 1}
    assert dp.terms == want


def test_from_chart_poly_substitution():
    chart = Chart(3, 1, 6)
    R = PDRing(chart, k=1)
    # T_0 = T1...Td - g2 (d = 1: T_0 = T_1 - g2), T_oo = g1
    t0 = chart.poly_var(0)
    img = R.from_chart_poly(t0)
    assert img == R.tbar() - R.g2()
    too = chart.poly_var(chart.inf)
    assert R.from_chart_poly(too) == R.g1()


def test_frobenius_g2_vanishes_mod_p():
    # phi(g2) = Tbar^p - T0^p is p * (...) + p! g2^[p]: zero mod p
    R = PDRing(Chart(3, 1, 9), k=1)
    assert R.frobenius(R.g2()).is_zero()


def test_phi_r_divisibility_budget():
    # \phi on J^[r]-span is divisible by p^r for r <= p-2
    chart = Chart(5, 1, 8)
    for r in (1, 2, 3):
        R = PDRing(chart, k=r + 1)
        probes = [R.divided_power(R.g2(), r),
                  R.divided_power(R.g1(), r),
                  R.g1() * R.divided_power(R.g2(), max(r - 1, 0))]
        for x in probes:
            if not x.in_pd_ideal(r):
                continue
            y = R.phi_r(x, r)  # raises DivisibilityError on failure
            assert y.ring.k == 1


def test_phi_1_linearity_through_p():
    chart = Chart(3, 1, 6)
    R = PDRing(chart, k=2)
    y = R.one() + R.t(1)
    py = y.scale(3)
    assert py.in_pd_ideal(1)
    got = R.phi_r(py, 1)
    want = R.frobenius(y).reduce_ring(got.ring)
    assert got == want


def test_phi_1_kills_pd_degree_p():
    chart = Chart(3, 1, 6)
    R = PDRing(chart, k=2)
    g1p = R.divided_power(R.g1(), 3)
    out = R.phi_r(g1p, 1)
    assert out.is_zero()


def test_phi_0_g2_in_graded_pieces():
    # phi_0 = phi: on g2 the image is zero mod p, so it dies in every
    # graded piece
    R = PDRing(Chart(3, 1, 6), k=1)
    assert R.phi_r(R.g2(), 0).is_zero()


def test_pd_envelope_check_passes():
    chart = Chart(3, 1, 6)
    for mv in ((0,), (1,), (2,)):
        o = check_pd_envelope(chart, Divisor.from_vector(chart, mv))
        assert o.ok(), (mv, o.notes)


def test_pd_envelope_check_d2():
    chart = Chart(3, 2, 6)
    o = check_pd_envelope(chart, Divisor(chart, {1: 1, 2: 2}))
    assert o.ok()
    assert o.dims["coker_dim"] == o.dims["module_rank"]


def test_graded_piece_kills_pd_parts():
    # fact (+): in the T^m graded piece T^m * g2 is congruent to the
    # polynomial T^m * Tbar: the PD correction enters at strictly deeper
    # T_0-filtration
    chart = Chart(3, 2, 6)
    R = PDRing(chart, k=1)
    t0 = R.from_chart_poly(chart.poly_var(0))
    x = t0 * R.g2()
    poly_part = t0 * (R.tbar() - t0)
    assert x == poly_part  # g2 = Tbar - T0 exactly in canonical coordinates
