import pytest

from synmod.cells import ComplexFamily, iter_multidegrees
from synmod.chart import Chart, Divisor
from synmod.cohomology import (SemilinearKernel, cartier_map,
                               graded_cohomology, induced_on_H,
                               naive_cohomology_dim, twist_inclusion)
from synmod.forms import LogForm, dlog_of_unit, wedge
from synmod.verify_derham import (omega_sequence, semilinear_kernel,
                                  y_complex)


@pytest.fixture
def chart():
    return Chart(3, 1, 9)


def test_graded_cohomology_examples(chart):
    Y = y_complex(chart, Divisor(chart))
    # q=1, alpha=(p): one class, T^p dlog T
    cb = graded_cohomology(Y, 1, (0, 3, 0))
    assert cb.dim_H == 1
    assert cb.representatives[0].terms == {((0, 3, 0), (1,)): 1}
    # p does not divide k: nothing
    assert graded_cohomology(Y, 1, (0, 2, 0)).dim_H == 0
    # constants at q=0
    assert graded_cohomology(Y, 0, (0, 0, 0)).dim_H == 1


def test_naive_oracle_agreement(chart):
    Y = y_complex(chart, Divisor(chart, {1: 2}))
    for alpha in Y.multidegrees(6):
        for q in (0, 1, 2):
            assert Y.cell(alpha).dimH(q) == naive_cohomology_dim(Y, q, alpha)


def test_rank_nullity_every_cell(chart):
    G = ComplexFamily(chart, Divisor(chart, {1: 1}), wedge_t0=True,
                      reduce_t0=True, t0_weight=2)
    for alpha in G.multidegrees(5):
        cell = G.cell(alpha)
        for q in range(3):
            c = cell.coh(q)
            assert c["dimZ"] - c["dimB"] == c["dimH"]


def test_induced_identity(chart):
    Y = y_complex(chart, Divisor(chart))
    ident = twist_inclusion(Y, Y)
    m, beta = induced_on_H(ident, 1, (0, 3, 0))
    assert m.data == [[1]]


def test_induced_multiplication_injective(chart):
    # multiplication by T1^p is a chain map of the untwisted complex and
    # stays injective on H in the window
    src = y_complex(chart, Divisor(chart, {1: 3}))
    tgt = y_complex(chart, Divisor(chart))
    inc = twist_inclusion(src, tgt)
    for alpha in src.multidegrees(4):
        mat, beta = induced_on_H(inc, 1, alpha)
        if beta is None:
            continue
        from synmod.linalg import rank_kernel_image
        rank, kern, _ = rank_kernel_image(mat)
        assert not kern


def test_cartier_two_path_agreement(chart):
    # the cell-level Cartier map agrees with the form-level cartier_inverse
    # composed with class-of
    from synmod.forms import cartier_inverse
    D = Divisor(chart, {1: 1})
    Dp = D.prime()
    src = y_complex(chart, Dp)
    tgt = y_complex(chart, D)
    cm = cartier_map(src, tgt)
    alpha = (0, 1, 0)
    beta = cm.alpha_map(alpha)
    cell = tgt.cell(beta)
    for I in src.basis(alpha, 1):
        form = LogForm.monomial_form(chart, alpha, I, mode="y")
        img_form = cartier_inverse(form, Dp.twist_exps(), D.twist_exps())
        vec_direct = tgt.form_to_vec(img_form, beta, 1)
        vec_cell = cm.apply(alpha, 1, src.form_to_vec(form, alpha, 1))
        assert vec_direct == vec_cell


def test_connecting_map_examples(chart):
    D = Divisor(chart, {1: 1})
    # p | m: zero connecting map
    ses = omega_sequence(chart, D, 3)
    m = ses.connecting_map(1, (0, 2, 0))
    assert all(v == 0 for row in m.data for v in row)
    # m = 1, q = 1: multiplication by (-1)^1 * 1 = 2 mod 3
    ses1 = omega_sequence(chart, D, 1)
    alpha = (0, 2, 0)  # weight 0 cell: H^1 nonzero
    mat = ses1.connecting_map(1, alpha)
    assert mat.rows == mat.cols == 1 and mat.data[0][0] == 2


def test_split_sequence_zero_connecting(chart):
    # a split exact sequence: the m = 0 graded sequence at D = 0 in a cell
    # whose connecting scalar (-1)^q * 0 vanishes
    ses = omega_sequence(chart, Divisor(chart), 0)
    mat = ses.connecting_map(1, (0, 0, 0))
    assert all(v == 0 for row in mat.data for v in row)


def test_semilinear_kernel_constants(chart):
    ker = semilinear_kernel(chart, Divisor(chart), 0, 1, bound=6)
    assert ker.dim_fp == 1  # the Artin-Schreier constants F_p
    sols = ker.fixed_solutions((0, 0, 0))
    assert sols and sols[0] == [1]


def test_semilinear_kernel_contains_dlog_unit(chart):
    # dlog(1+T1) lies in the windowed kernel of 1 - C^{-1} at D = 1*{T1}
    D = Divisor(chart, {1: 1})
    ker = semilinear_kernel(chart, D, 1, 1, bound=6)
    Y = ker.family
    u = chart.poly_one() + chart.poly_var(1)
    form = dlog_of_unit(chart, u, mode="y")
    tw = D.twist_exps()
    shifted = {}
    for (a, I), c in form.terms.items():
        s = tuple(x - t for x, t in zip(a, tw))
        assert all(v >= 0 for v in s)
        shifted[(s, I)] = c
    coeff = LogForm(chart, chart.field, "y", shifted)
    comps = {}
    for alpha in coeff.multidegrees():
        if sum(alpha) <= 6:
            comps[alpha] = Y.form_to_vec(coeff, alpha, 1)
    assert ker.contains(comps)
    # perturbing one chain component breaks the forward condition
    bad = dict(comps)
    a0 = (0, 1, 0)
    orig = bad.get(a0, [0])
    bad[a0] = [chart.field.add(orig[0], 1)]
    assert not ker.contains(bad)


def test_semilinear_a_zero_forbidden(chart):
    with pytest.raises(ValueError):
        semilinear_kernel(chart, Divisor(chart), 0, 0)


def test_semilinear_kernel_dim_matches_basis(chart):
    D = Divisor(chart, {1: 2})
    ker = semilinear_kernel(chart, D, 1, 1, bound=5)
    els = ker.basis_elements()
    assert len(els) == ker.dim_fp
    for el in els:
        assert ker.contains(el)


def test_induced_on_semilinear_kernel_vanishes(chart):
    # 1 - C^{-1} applied to a kernel element is zero in H, cell by cell
    D = Divisor(chart)
    ker = semilinear_kernel(chart, D, 1, 1, bound=4)
    Y = ker.family
    op = ker.op
    for el in ker.basis_elements()[:5]:
        for alpha, vec in el.items():
            cell = Y.cell(alpha)
            img = list(vec)
            pre = ker.pre_alpha(alpha)
            if pre is not None and pre in el:
                ip = op.apply(pre, 1, el[pre])
                img = [Y.field.sub(a, b) for a, b in zip(img, ip)]
            assert cell.coh(1)["B"].contains(img)


def test_multidegree_iteration_counts():
    assert len(list(iter_multidegrees(3, 4))) == 35  # C(7,3)
    Y = y_complex(Chart(3, 1, 9), Divisor(Chart(3, 1, 9)))
    assert sum(1 for _ in Y.multidegrees(9)) == 55  # C(11,2)
