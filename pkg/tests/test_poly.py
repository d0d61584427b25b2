import random

import pytest
from hypothesis import given, settings, strategies as st

from synmod.chart import Chart
from synmod.fields import gf, zmod
from synmod.poly import (DivisibilityError, TruncatedPoly, WindowError,
                         exact_divide_by_p, frobenius_poly, lift_to, pd_log,
                         principal_unit_inverse, reduce_mod_p)


def P(ring, nvars, window):
    return lambda exps, c=1: TruncatedPoly.monomial(ring, nvars, window, exps, c)


def test_trunc_mul_basic():
    F = gf(3)
    one = TruncatedPoly.one(F, 1, 5)
    T = TruncatedPoly.variable(F, 1, 5, 0)
    prod = (one + T) * (one - T)
    assert prod == one - T * T


def test_trunc_mul_truncation():
    F = gf(3)
    T3 = TruncatedPoly.monomial(F, 1, 5, (3,))
    assert (T3 * T3).is_zero()


def test_trunc_mul_convolution_oracle():
    # (1 + T1 + T2)^2 over F_3, window 4, against a brute-force convolution
    F = gf(3)
    one = TruncatedPoly.one(F, 2, 4)
    f = one + TruncatedPoly.variable(F, 2, 4, 0) + TruncatedPoly.variable(F, 2, 4, 1)
    sq = f * f
    conv = {}
    for e1, c1 in f.terms.items():
        for e2, c2 in f.terms.items():
            e = (e1[0] + e2[0], e1[1] + e2[1])
            if sum(e) <= 4:
                conv[e] = (conv.get(e, 0) + c1 * c2) % 3
    conv = {e: c for e, c in conv.items() if c}
    assert sq.terms == conv


def test_window_mismatch_is_config_error():
    F = gf(3)
    a = TruncatedPoly.one(F, 1, 5)
    b = TruncatedPoly.one(F, 1, 6)
    with pytest.raises(WindowError):
        a * b


def test_principal_unit_inverse():
    F = gf(5)
    one = TruncatedPoly.one(F, 1, 3)
    T = TruncatedPoly.variable(F, 1, 3, 0)
    inv = principal_unit_inverse(one + T)
    # geometric series 1 - T + T^2 - T^3
    want = one - T + T * T - T * T * T
    assert inv == want
    assert (one + T) * inv == one
    assert principal_unit_inverse(one) == one
    with pytest.raises(WindowError):
        principal_unit_inverse(T)


@given(st.integers(0, 124))
@settings(max_examples=30, deadline=None)
def test_unit_inverse_multiplies_back(seed):
    rng = random.Random(seed)
    F = gf(5)
    one = TruncatedPoly.one(F, 2, 4)
    terms = {}
    for _ in range(3):
        e = (rng.randrange(0, 3), rng.randrange(0, 3))
        if sum(e) == 0 or sum(e) > 4:
            continue
        terms[e] = rng.randrange(1, 5)
    u = one + TruncatedPoly(F, 2, 4, terms)
    assert u * principal_unit_inverse(u) == one


def test_pd_log_trivial():
    R = zmod(5, 2)
    one = TruncatedPoly.one(R, 1, 3)
    assert pd_log(one).is_zero()


def test_pd_log_homomorphism():
    # log((1+T)(1+S)) = log(1+T) + log(1+S) at p=5, window 3
    R = zmod(5, 2)
    one = TruncatedPoly.one(R, 2, 3)
    T = TruncatedPoly.variable(R, 2, 3, 0)
    S = TruncatedPoly.variable(R, 2, 3, 1)
    lhs = pd_log((one + T) * (one + S))
    rhs = pd_log(one + T) + pd_log(one + S)
    assert lhs == rhs


def test_pd_log_safe_policy_raises():
    R = zmod(3, 2)
    one = TruncatedPoly.one(R, 1, 4)
    T = TruncatedPoly.variable(R, 1, 4, 0)
    with pytest.raises(WindowError):
        pd_log(one + T)  # needs the k = 3 term


def test_pd_log_extended_mode():
    # extended mode agrees with safe mode where both apply
    R = zmod(5, 2)
    one = TruncatedPoly.one(R, 1, 3)
    T = TruncatedPoly.variable(R, 1, 3, 0)
    assert pd_log(one + T) == pd_log(one + T, extended=True)
    # p-divisible argument: log(1 + p T) = p T exactly mod p^2
    R3 = zmod(3, 2)
    one3 = TruncatedPoly.one(R3, 1, 8)
    T3 = TruncatedPoly.variable(R3, 1, 8, 0)
    u = one3 + T3.scale(3)
    assert pd_log(u, extended=True) == T3.scale(3)


def test_d_log_equals_dlog():
    # d(pd_log u) = dlog u as 1-forms, p=5, comparing inside the safe
    # window (total degree < p, where the log series needs no p-division)
    from synmod.forms import LogForm, dlog_of_unit, poly_differential
    chart = Chart(5, 1, 5)
    R = chart.mod_p2
    one = TruncatedPoly.one(R, chart.nvars, 3)
    T = TruncatedPoly.variable(R, chart.nvars, 3, 1)
    u = one + T
    logs = pd_log(u)

    def cut(form):
        return LogForm(chart, form.ring, form.mode,
                       {k: c for k, c in form.terms.items() if sum(k[0]) <= 3})

    lhs = cut(poly_differential(chart, logs))
    rhs = cut(dlog_of_unit(chart, u))
    assert lhs == rhs


def test_exact_divide_by_p():
    R = zmod(3, 2)
    T = TruncatedPoly.variable(R, 1, 4, 0)
    assert exact_divide_by_p(T.scale(3)) == reduce_mod_p(T)
    assert exact_divide_by_p(TruncatedPoly.zero(R, 1, 4)).is_zero()
    with pytest.raises(DivisibilityError):
        exact_divide_by_p(T)


def test_exact_divide_binomial_oracle():
    # ((1+T)^p - (1+T^p))/p = T + T^2 over Z/9 (C(3,1)/3 = C(3,2)/3 = 1)
    R = zmod(3, 2)
    one = TruncatedPoly.one(R, 1, 4)
    T = TruncatedPoly.variable(R, 1, 4, 0)
    Tp = TruncatedPoly.monomial(R, 1, 4, (3,))
    f = (one + T).pow(3) - (one + Tp)
    got = exact_divide_by_p(f)
    want = reduce_mod_p(T + T * T)
    assert got == want
    # and multiply-by-p then divide is the identity on mod-p polys
    g = reduce_mod_p(T + T * T)
    assert exact_divide_by_p(lift_to(g, R).scale(3)) == g


def test_frobenius_poly():
    F = gf(3, 2)
    f = TruncatedPoly(F, 1, 9, {(1,): 3, (0,): 5})
    g = frobenius_poly(f)
    assert g.terms == {(3,): F.frob(3), (0,): F.frob(5)}


@given(st.integers(0, 10 ** 6))
@settings(max_examples=25, deadline=None)
def test_ring_axioms_random(seed):
    rng = random.Random(seed)
    F = gf(3)

    def rand_poly():
        terms = {}
        for _ in range(rng.randrange(1, 4)):
            e = (rng.randrange(3), rng.randrange(3))
            terms[e] = rng.randrange(3)
        return TruncatedPoly(F, 2, 4, terms)

    a, b, c = rand_poly(), rand_poly(), rand_poly()
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
