import pytest

from synmod.chart import Chart, Divisor, EisensteinData
from synmod.outcome import PASS
from synmod.syntomic import (GradedFiberPiece, build_syntomic_gr,
                             check_gr_structure, check_gr_vanishing_above,
                             eis_digit, eisenstein_phi, filt_level, gr_case,
                             verify_eisenstein_identity)


def test_eisenstein_phi_values():
    ch = Chart(3, 1, 12, eisenstein=EisensteinData(2, (1, 2)))
    assert eisenstein_phi(ch, ch.eisenstein, 0) == ch.poly_one()
    # e=1: a_0^p, constant
    ch1 = Chart(3, 1, 9, eisenstein=EisensteinData(1, (2,)))
    v = eisenstein_phi(ch1, ch1.eisenstein, 1)
    assert v.terms == {(0,) * ch1.nvars: ch1.field.pow(2, 3)}
    # e=2: a_0^p + a_1^p T_0^p
    v2 = eisenstein_phi(ch, ch.eisenstein, 1)
    e0 = (0,) * ch.nvars
    e3 = tuple(3 if i == 0 else 0 for i in range(ch.nvars))
    assert v2.terms == {e0: 1, e3: ch.field.pow(2, 3)}


def test_eis_digit():
    ch = Chart(3, 1, 12, eisenstein=EisensteinData(2, (1, 2)))
    assert eis_digit(ch, ch.eisenstein, 1, 0) == 1
    assert eis_digit(ch, ch.eisenstein, 1, 1) == ch.field.pow(2, 3)
    assert eis_digit(ch, ch.eisenstein, 2, 0) == 1
    assert eis_digit(ch, ch.eisenstein, 1, 5) == 0


def test_integer_eisenstein_oracle():
    assert verify_eisenstein_identity(3, 1, [1])
    assert verify_eisenstein_identity(3, 2, [1, 2])
    assert verify_eisenstein_identity(3, 2, [2, 1])
    assert verify_eisenstein_identity(5, 1, [4])
    assert verify_eisenstein_identity(5, 2, [2, 3])


def test_filtration_levels_r_equals_q():
    # degree q-1 slot carries max(e + ceil(m/p), m), degree q carries m
    eis = EisensteinData(2, (1, 1))
    p = 3
    assert filt_level(eis, p, 1, 1, 4) == 4
    assert filt_level(eis, p, 1, 0, 4) == max(2 + 2, 4)
    assert filt_level(eis, p, 1, 0, 9) == 9  # m >= pe/(p-1) regime


def test_gr_case_integer_splits():
    eis = EisensteinData(1, (1,))
    assert gr_case(eis, 3, 1, 1, 0) == "endpoint"
    assert gr_case(eis, 3, 1, 1, 1) == "interior"
    assert gr_case(eis, 3, 1, 1, 2) == "above"
    eis2 = EisensteinData(2, (1, 1))
    assert gr_case(eis2, 3, 0, 1, 2) == "below"
    assert gr_case(eis2, 3, 0, 1, 3) == "endpoint"
    assert gr_case(eis2, 3, 0, 1, 4) == "interior"
    assert gr_case(eis2, 3, 0, 1, 6) == "above"


def test_phi_scalar_table():
    ch = Chart(3, 1, 12, eisenstein=EisensteinData(2, (2, 1)))
    fib = build_syntomic_gr(ch, Divisor(ch), ch.eisenstein, 0, 1, 3)
    # endpoint: the degree-q scalar is a_0^{p(r-q)}
    assert fib.phi_scalar[0] == ch.field.pow(2, 3)
    # interior p∤m: all scalars vanish and A^{q-1} is absent
    fib2 = build_syntomic_gr(ch, Divisor(ch), ch.eisenstein, 0, 1, 4)
    assert not any(fib2.phi_scalar.values())


def test_gr_structure_case_table_p3():
    ch = Chart(3, 1, 9)
    eis = ch.eisenstein
    for mv in ((0,), (1,), (2,), (3,), (6,)):
        D = Divisor.from_vector(ch, mv)
        for m in range(0, 4):
            o = check_gr_structure(ch, D, eis, 1, 1, m)
            assert o.ok(), (mv, m, o.notes, o.dims)


def test_gr_structure_endpoint_assembly():
    # H^q(gr^0) = K + windowed Artin-Schreier kernel, exactly
    ch = Chart(3, 1, 9)
    D = Divisor.from_vector(ch, (3,))
    o = check_gr_structure(ch, D, ch.eisenstein, 1, 1, 0)
    assert o.ok()
    assert o.dims["H^q_fib_dim_fp"] == o.dims["K_dim"] + o.dims["kernel_dim_fp"]
    assert o.dims["K_dim"] > 0


def test_gr_structure_a0_generic_vs_one():
    # q=0 endpoint: dim H = 1 iff a_0 is a (p-1)-st power (here: a_0 = 1)
    for a0, want in ((1, 1), (2, 0)):
        ch = Chart(3, 1, 12, eisenstein=EisensteinData(2, (a0, 1)))
        o = check_gr_structure(ch, Divisor(ch), ch.eisenstein, 0, 1, 3)
        assert o.ok()
        assert o.dims["H^q_fib_dim_fp"] == want


def test_gr_structure_below_obstruction_finding():
    # q < r below the band: the displayed vanishing needs the K-correction
    # exactly when the divisor has a multiplicity >= 2
    ch = Chart(5, 2, 25)
    D = Divisor.from_vector(ch, (1, 2))
    o = check_gr_structure(ch, D, ch.eisenstein, 1, 2, 0)
    assert o.ok()
    assert o.dims["H^q_fib_dim_fp"] > 0
    assert any("obstruction correction" in n for n in o.notes)
    # reduced divisor: genuine vanishing
    o2 = check_gr_structure(ch, Divisor.from_vector(ch, (1, 1)), ch.eisenstein,
                            1, 2, 0)
    assert o2.ok() and o2.dims["H^q_fib_dim_fp"] == 0


def test_gr_structure_interior_p_divides():
    # r = q with e = 3: the band is (0, 9/2), so m = 3 is interior with
    # p | m; a multiplicity-2 divisor makes the K obstruction visible
    ch = Chart(3, 1, 9, eisenstein=EisensteinData(3, (1, 1, 1)))
    o = check_gr_structure(ch, Divisor(ch, {1: 2}), ch.eisenstein, 1, 1, 3)
    assert o.params["case"] == "interior"
    assert o.ok(), o.notes
    assert o.dims["K_dim"] > 0
    assert o.dims["H^q_fib_dim_fp"] == (o.dims["K_dim"]
                                        + o.dims["kernel_dim_fp"])


def test_gr_vanishing_above():
    ch = Chart(3, 1, 9)
    o = check_gr_vanishing_above(ch, Divisor(ch, {1: 2}), ch.eisenstein, 1, 1)
    assert o.ok() and o.dims["levels_checked"] > 0


def test_fiber_differential_squares_to_zero():
    ch = Chart(3, 1, 9, eisenstein=EisensteinData(2, (2, 1)))
    for m in (0, 1, 3, 4):
        fib = GradedFiberPiece(ch, Divisor(ch, {1: 2}), ch.eisenstein, 0, 1, m)
        for seed in list(fib.window_seeds())[:10]:
            fib.assert_d_squared_zero(fib.orbit_chain(seed))


def test_param_guards():
    ch = Chart(3, 1, 9)
    with pytest.raises(ValueError):
        build_syntomic_gr(ch, Divisor(ch), ch.eisenstein, 2, 1, 0)  # q > r
    with pytest.raises(ValueError):
        build_syntomic_gr(ch, Divisor(ch), ch.eisenstein, 0, 2, 0)  # r > p-2
    with pytest.raises(ValueError):
        build_syntomic_gr(ch, Divisor(ch), ch.eisenstein, 0, 0, -1)
