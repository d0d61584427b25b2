import pytest
from hypothesis import given, settings, strategies as st

from synmod.fields import GF, Zmod, gf, smallest_irreducible, zmod


def test_prime_field_basics():
    F = gf(3)
    assert F.add(2, 2) == 1
    assert F.mul(2, 2) == 1
    assert F.inv(2) == 2
    assert F.neg(1) == 2
    with pytest.raises(ZeroDivisionError):
        F.inv(0)


def test_p_must_be_odd_prime():
    for bad in (2, 4, 9, 1):
        with pytest.raises(ValueError):
            GF(bad, 1)


def test_extension_field_tables():
    F = gf(3, 2)
    assert F.order == 9
    # the modulus polynomial is irreducible of degree 2
    assert len(F.modpoly) == 3 and F.modpoly[-1] == 1
    for a in F.elements():
        if a:
            assert F.mul(a, F.inv(a)) == 1
        assert F.add(a, F.neg(a)) == 0


def test_frobenius_is_automorphism():
    F = gf(5, 2)
    for a in range(F.order):
        for b in range(F.order):
            assert F.frob(F.mul(a, b)) == F.mul(F.frob(a), F.frob(b))
            assert F.frob(F.add(a, b)) == F.add(F.frob(a), F.frob(b))
    # identity on the prime field
    for a in range(5):
        assert F.frob(F.from_int(a)) == F.from_int(a)
    # order s
    for a in range(F.order):
        assert F.frob(F.frob(a)) == a


def test_pth_power_coset_has_generic_elements():
    # (k^*)^(p-1) over F_9 contains an element != 1 (generic a_0 exists)
    F = gf(3, 2)
    coset = F.pth_power_coset()
    assert 1 in coset and any(c != 1 for c in coset)
    b = F.root_p_minus_1(coset[1])
    assert F.pow(b, 2) == coset[1]
    # over F_p the coset is just {1}
    assert gf(5).pth_power_coset() == [1]


def test_zmod_ring():
    R = zmod(3, 2)
    assert R.modulus == 9
    assert R.mul(4, 7) == 1
    assert R.inv(4) == 7
    assert not R.is_unit(3)
    with pytest.raises(ZeroDivisionError):
        R.inv(6)


@given(st.sampled_from([3, 5]), st.data())
@settings(max_examples=40, deadline=None)
def test_field_axioms_random(p, data):
    F = gf(p, 2)
    a = data.draw(st.integers(0, F.order - 1))
    b = data.draw(st.integers(0, F.order - 1))
    c = data.draw(st.integers(0, F.order - 1))
    assert F.mul(a, F.mul(b, c)) == F.mul(F.mul(a, b), c)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.mul(a, b) == F.mul(b, a)


def test_irreducible_search_deterministic():
    assert smallest_irreducible(3, 2) == smallest_irreducible(3, 2)
    poly = smallest_irreducible(5, 2)
    # no roots in F_5
    for x in range(5):
        assert sum(c * x ** i for i, c in enumerate(poly)) % 5 != 0
