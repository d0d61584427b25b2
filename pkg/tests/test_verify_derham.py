import pytest

from synmod.chart import Chart, Divisor
from synmod.outcome import HYP_NOT_MET, PASS
from synmod.verify_derham import (check_cartier_modulus,
                                  check_connecting_identity,
                                  check_graded_acyclicity, check_log_kernel,
                                  check_ml_transition,
                                  check_quasi_iso_inclusion,
                                  check_tm_sequences, divisor_prime,
                                  obstruction_dims)


@pytest.fixture
def chart():
    return Chart(3, 1, 9)


def test_divisor_prime(chart):
    assert divisor_prime(Divisor(chart)).vector() == (0,)
    assert divisor_prime(Divisor(chart, {1: 7})).vector() == (3,)
    assert divisor_prime(Divisor(chart, {1: 6})).vector() == (2,)


def test_cartier_modulus_passes(chart):
    for mv in ((0,), (1,), (2,), (3,), (4,), (6,)):
        for q in (0, 1):
            o = check_cartier_modulus(chart, Divisor.from_vector(chart, mv), q)
            assert o.status == PASS, (mv, q, o.notes)


def test_cartier_modulus_p_divides_all(chart):
    # p | m: reduces to the untwisted Cartier twisted by a monomial
    o = check_cartier_modulus(chart, Divisor(chart, {1: 3}), 1)
    assert o.ok()


def test_cartier_h0_kernel_match(chart):
    o = check_cartier_modulus(chart, Divisor(chart, {1: 1}), 0)
    assert o.ok()


def test_quasi_iso_inclusion(chart):
    for mv in ((0,), (1,), (3,)):
        o = check_quasi_iso_inclusion(chart, Divisor.from_vector(chart, mv), 1)
        assert o.ok()


def test_graded_acyclicity_two_oracles(chart):
    o = check_graded_acyclicity(chart, Divisor(chart, {1: 2}), random_forms=25)
    assert o.ok()
    assert o.dims["steps_with_hypothesis"] >= 1


def test_graded_acyclicity_hypothesis_not_met():
    chart = Chart(3, 2, 9)
    # a chain step drops through a multiple of p: recorded, never asserted
    o = check_graded_acyclicity(chart, Divisor(chart, {1: 4, 2: 3}))
    assert o.status in (PASS, HYP_NOT_MET)
    if o.status == HYP_NOT_MET:
        assert any("not asserted" in n for n in o.notes)


def test_connecting_identity_values(chart):
    D = Divisor(chart, {1: 1})
    table = {(1, 0): 1, (1, 1): 2, (2, 0): 2, (2, 1): 1, (3, 0): 0, (3, 1): 0}
    for (m, q), scalar in table.items():
        o = check_connecting_identity(chart, D, m, q)
        assert o.ok()
        assert o.dims["expected_scalar"] == scalar


def test_connecting_identity_p5():
    chart = Chart(5, 2, 25)
    o = check_connecting_identity(chart, Divisor(chart, {1: 2}), 2, 2)
    assert o.ok() and o.dims["expected_scalar"] == 2


def test_tm_sequences(chart):
    D = Divisor(chart, {1: 1})
    for m in (1, 2, 3, 4, 6):
        for q in (1, 2):
            o = check_tm_sequences(chart, D, m, q)
            assert o.ok(), (m, q, o.notes)
    with pytest.raises(ValueError):
        check_tm_sequences(chart, D, 0, 1)


def test_tm_sequence_degenerate_q1(chart):
    # q = 1: the left term is zero and the sequence degenerates
    o = check_tm_sequences(chart, Divisor(chart), 1, 1)
    assert o.ok()


def test_log_kernel_exact_match(chart):
    for mv, q in (((0,), 1), ((1,), 1), ((2,), 1)):
        o = check_log_kernel(chart, Divisor.from_vector(chart, mv), q, bound=5)
        assert o.ok(), (mv, q, o.notes)
        assert o.dims["kernel_dim_fp"] == o.dims["generator_span_dim"]


def test_log_kernel_q0(chart):
    o = check_log_kernel(chart, Divisor(chart), 0, bound=5)
    assert o.ok() and o.dims["kernel_dim_fp"] == 1
    o = check_log_kernel(chart, Divisor(chart, {1: 2}), 0, bound=5)
    assert o.ok() and o.dims["kernel_dim_fp"] == 0


def test_ml_transition(chart):
    D = Divisor(chart, {1: 2})
    o = check_ml_transition(chart, D, D.scale(3), 1)
    assert o.ok() and o.dims["transition_zero"] is True
    o = check_ml_transition(chart, Divisor(chart, {1: 2}), Divisor(chart, {1: 3}), 1)
    assert o.ok() and o.dims["transition_zero"] is False
    with pytest.raises(ValueError):
        check_ml_transition(chart, Divisor(chart, {1: 2}), Divisor(chart, {1: 1}), 1)


def test_ml_reduced_divisor_zero_obstruction():
    chart = Chart(3, 2, 9)
    D = Divisor(chart, {1: 1, 2: 1})
    dims = obstruction_dims(chart, D, 1, bound=5)
    assert all(v == 0 for v in dims.values())
    o = check_ml_transition(chart, D, D.scale(2), 1)
    assert o.ok()


def test_obstruction_dims_nonzero():
    chart = Chart(3, 1, 9)
    dims = obstruction_dims(chart, Divisor(chart, {1: 2}), 1, bound=4)
    assert any(v > 0 for v in dims.values())
