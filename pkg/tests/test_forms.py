import pytest

from synmod.chart import Chart, Divisor, filtration_chain
from synmod.fields import gf
from synmod.forms import (LogForm, cartier_inverse, differential_twisted,
                          dlog_of_monomial, dlog_of_unit, frobenius_pullback,
                          poly_differential, relative_projection, residue,
                          wedge)
from synmod.poly import WindowError


@pytest.fixture
def chart():
    return Chart(3, 2, 9)  # p=3, d=2: T0, T1, T2, Too


def dl(chart, i):
    return LogForm.dlog_var(chart, i)


def test_wedge_repeated_index_vanishes(chart):
    w = dl(chart, 1)
    assert wedge(w, w).is_zero()


def test_wedge_antisymmetry(chart):
    a, b = dl(chart, 1), dl(chart, 2)
    assert wedge(a, b) == -wedge(b, a)


def test_wedge_bilinear_expansion(chart):
    # (T1 dlogT1) ^ (T2 dlogT2 + dlogT1) = T1 T2 dlogT1^dlogT2
    F = chart.field
    t1 = chart.poly_var(1)
    t2 = chart.poly_var(2)
    a = dl(chart, 1).poly_mul(t1)
    b = dl(chart, 2).poly_mul(t2) + dl(chart, 1)
    got = wedge(a, b)
    want = wedge(dl(chart, 1), dl(chart, 2)).poly_mul(t1 * t2)
    assert got == want


def test_wedge_graded_commutative(chart):
    a = wedge(dl(chart, 0), dl(chart, 1))   # degree 2
    b = dl(chart, 2)                         # degree 1
    assert wedge(a, b) == wedge(b, a)        # (-1)^{2*1} = +1
    c = dl(chart, 1)
    assert wedge(c, b) == -wedge(b, c)       # (-1)^{1*1}


def test_differential_twisted_examples(chart):
    one = LogForm.from_poly(chart, chart.poly_one())
    D2 = Divisor(chart, {1: 2})
    got = differential_twisted(one, D2)
    assert got == dl(chart, 1).scale(2)
    Dp = Divisor(chart, {1: 3})
    assert differential_twisted(one, Dp).is_zero()


def test_differential_expansion(chart):
    # d_D(T2 dlogT1), D = 1*{T1} -> -T2 dlogT1 ^ dlogT2
    D = Divisor(chart, {1: 1})
    t2 = chart.poly_var(2)
    omega = dl(chart, 1).poly_mul(t2)
    got = differential_twisted(omega, D)
    want = -wedge(dl(chart, 1), dl(chart, 2)).poly_mul(t2)
    assert got == want


def test_differential_squares_to_zero(chart):
    import random
    rng = random.Random(3)
    for mults in ({}, {1: 1}, {1: 2, 2: 5}):
        D = Divisor(chart, mults)
        terms = {}
        for _ in range(6):
            alpha = tuple(rng.randrange(0, 2) for _ in range(chart.nvars))
            I = tuple(sorted(rng.sample([0, 1, 2], rng.randrange(0, 3))))
            if alpha[chart.inf] == 0 and chart.inf in I:
                continue
            terms[(alpha, I)] = rng.randrange(1, 3)
        omega = LogForm(chart, chart.field, "full", terms)
        assert differential_twisted(differential_twisted(omega, D), D).is_zero()


def test_differential_preserves_multidegree(chart):
    D = Divisor(chart, {2: 1})
    alpha = (0, 2, 1, 1)
    omega = LogForm.monomial_form(chart, alpha, (1,))
    d = differential_twisted(omega, D)
    assert all(a == alpha for (a, _) in d.terms)


def test_residue_examples(chart):
    w12 = wedge(dl(chart, 1), dl(chart, 2))
    assert residue(w12, 1) == dl(chart, 2)
    # no dlog T1 factor -> 0
    t2form = dl(chart, 2).poly_mul(chart.poly_var(2))
    assert residue(t2form, 1).is_zero()
    with pytest.raises(ValueError):
        residue(w12, chart.inf)


def test_residue_homotopy_identity():
    # d Res + Res d = m_mu * id on the mod-T_mu piece, p=5, m_1 = 2
    chart = Chart(5, 2, 9)
    D = Divisor(chart, {1: 2})
    x = LogForm.dlog_var(chart, 2, mode="y")
    lhs = differential_twisted(residue(x, 1), D) + residue(differential_twisted(x, D), 1)
    assert lhs == x.scale(2)


def test_frobenius_pullback(chart):
    assert frobenius_pullback(dl(chart, 0)) == dl(chart, 0)
    t1 = chart.poly_var(1)
    got = frobenius_pullback(dl(chart, 1).poly_mul(t1))
    want = dl(chart, 1).poly_mul(chart.poly_monomial((0, 3, 0, 0)))
    assert got == want
    # semilinearity on scalars over F_9
    ch9 = Chart(3, 1, 9, s=2)
    c = 3  # a non-prime-field element
    form = LogForm.from_poly(ch9, ch9.poly_one().scale(c))
    assert frobenius_pullback(form) == LogForm.from_poly(
        ch9, ch9.poly_one().scale(ch9.field.frob(c)))
    # window error outside the safe zone
    big = LogForm.monomial_form(chart, (0, 4, 0, 0), ())
    with pytest.raises(WindowError):
        frobenius_pullback(big)
    assert frobenius_pullback(big, truncate=True).is_zero()


def test_cartier_inverse_examples(chart):
    one = LogForm.from_poly(chart, chart.poly_one())
    assert cartier_inverse(one) == one
    assert cartier_inverse(dl(chart, 1)) == dl(chart, 1)
    # T1 dlogT1 -> T1^p dlogT1 and the class is not a boundary at D=0
    t1 = chart.poly_var(1)
    img = cartier_inverse(dl(chart, 1).poly_mul(t1))
    assert img == dl(chart, 1).poly_mul(chart.poly_monomial((0, 3, 0, 0)))
    # d(T^p) = p T^{p-1} dT = 0, so B^1 at multidegree p vanishes: the class
    # survives (checked through the cell machinery)
    from synmod.verify_derham import y_complex
    Y = y_complex(chart, Divisor(chart))
    cell = Y.cell((0, 3, 0, 0))
    assert cell.coh(1)["B"].dim == 0
    vec = Y.form_to_vec(img, (0, 3, 0, 0), 1)
    assert cell.class_coords(1, vec) is not None and any(cell.class_coords(1, vec))


def test_cartier_twisted_shift(chart):
    # coefficient form shift: p*alpha + p*m' - m
    D = Divisor(chart, {1: 4})
    Dp = D.prime()  # m' = 2
    omega = dl(chart, 1)
    got = cartier_inverse(omega, src_twist=Dp.twist_exps(), dst_twist=D.twist_exps())
    assert list(got.terms) == [((0, 2, 0, 0), (1,))]


def test_cartier_output_closed(chart):
    # C^{-1} output is d_D-closed (target weights all vanish mod p)
    D = Divisor(chart, {1: 1, 2: 2})
    Dp = D.prime()
    import random
    rng = random.Random(0)
    for _ in range(10):
        alpha = tuple(rng.randrange(0, 2) for _ in range(chart.nvars))
        omega = LogForm.monomial_form(chart, alpha, (1,), mode="full")
        try:
            img = cartier_inverse(omega, Dp.twist_exps(), D.twist_exps())
        except WindowError:
            continue
        assert differential_twisted(img, D).is_zero()


def test_relative_projection(chart):
    rel, res = relative_projection(dl(chart, 0))
    assert rel.is_zero() and res == LogForm.from_poly(chart, chart.poly_one(),
                                                      mode="relative")
    rel, res = relative_projection(dl(chart, 1))
    assert res.is_zero() and rel == LogForm.dlog_var(chart, 1, mode="relative")
    # sorted-wedge sign convention
    w = wedge(dl(chart, 1), dl(chart, 0))
    rel, res = relative_projection(w)
    assert rel.is_zero()
    assert res == -LogForm.dlog_var(chart, 1, mode="relative")
    # reassembly: omega = dlogT0 ^ res + rel
    mixed = w + wedge(dl(chart, 1), dl(chart, 2)).poly_mul(chart.poly_var(2))
    rel, res = relative_projection(mixed)
    re_res = LogForm(chart, chart.field, "full", res.terms)
    re_rel = LogForm(chart, chart.field, "full", rel.terms)
    assert wedge(dl(chart, 0), re_res) + re_rel == mixed


def test_dlog_of_monomial_negative_exponents(chart):
    got = dlog_of_monomial(chart, (0, -1, 2, 0))
    want = -dl(chart, 1) + dl(chart, 2).scale(2)
    assert got == want
    with pytest.raises(ValueError):
        dlog_of_monomial(chart, (0, 0, 0, 1))


def test_mode_guards(chart):
    with pytest.raises(ValueError):
        LogForm(chart, chart.field, "relative", {((0, 0, 0, 0), (0,)): 1})
    with pytest.raises(ValueError):
        LogForm(chart, chart.field, "full", {((0, 0, 0, 0), (chart.inf,)): 1})
    # special fiber drops positive T0 coefficients silently (quotient ring)
    f = LogForm(chart, chart.field, "special_fiber", {((1, 0, 0, 0), ()): 1})
    assert f.is_zero()


def test_filtration_chain_structure(chart):
    D = Divisor(chart, {1: 2, 2: 5})
    levels, steps = filtration_chain(D)
    assert levels[0] == D
    assert levels[-1] == D.prime().scale(3)
    assert len(steps) == len(levels) - 1
    for i, mu in enumerate(steps):
        assert levels[i + 1].get(mu) == levels[i].get(mu) + 1
