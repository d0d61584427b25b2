"""Executable verifications for the modulus de Rham complex.

Each check brute-forces a lemma-shaped statement cell by cell over the
chart window: Cartier bijectivity with modulus, residue-homotopy
acyclicity of the filtration graded pieces, the log-kernel sequence, the
T^m-graded short exact sequences, the connecting-homomorphism scalar,
and the finite Mittag-Leffler transition on the obstruction quotient.
"""

from __future__ import annotations

import random

from .chart import Chart, Divisor, filtration_chain
from .cells import ComplexFamily
from .cohomology import (GradedMap, ShortExactSequence, cartier_map,
                         graded_cohomology, label_matrix, twist_inclusion,
                         SemilinearKernel)
from .forms import (LogForm, differential_twisted, dlog_of_monomial,
                    dlog_of_unit, residue, wedge)
from .linalg import FpMatrix, Quotient, Subspace, rank_kernel_image
from .outcome import (CheckOutcome, FAIL, HYP_NOT_MET, INCONCLUSIVE, PASS,
                      SignatureScan, serialize_form)
from .poly import TruncatedPoly


def divisor_prime(D: Divisor) -> Divisor:
    """Componentwise smallest l with p*l >= m."""
    return D.prime()


# -- complex constructors ---------------------------------------------------

def y_complex(chart, divisor):
    """omega_{Y|D}: twisted special-fiber complex, no dlog T_0 slot."""
    return ComplexFamily(chart, divisor, wedge_t0=False, reduce_t0=True,
                         label="omega_Y")


def graded_piece(chart, divisor, m):
    """(T^m O_{Z_1} / T^{m+1} O_{Z_1}) tensor omega_{Z_1|D}."""
    return ComplexFamily(chart, divisor, wedge_t0=True, reduce_t0=True,
                         t0_weight=m, label="T^%d-graded" % m)


def residue_piece(chart, divisor, mu):
    """The filtration graded piece along T_mu (coefficients mod T_mu)."""
    return ComplexFamily(chart, divisor, wedge_t0=False, reduce_t0=True,
                         zero_coeff_vars=(mu,), label="res-piece T%d" % mu)


# -- Cartier with modulus ---------------------------------------------------

def check_cartier_modulus(chart: Chart, divisor: Divisor, q: int) -> CheckOutcome:
    """C^{-1}: (omega^q_{Y|D'})_alpha -> H^q(omega_{Y|D})_{p*alpha + pm' - m}
    bijective for every admissible alpha, and H^q vanishes at every
    multidegree not hit by the twist-adjusted Frobenius scaling."""
    out = CheckOutcome("cartier_modulus",
                       {"p": chart.p, "d": chart.d, "q": q,
                        "mult": divisor.vector(), "N": chart.window})
    Dp = divisor.prime()
    src = y_complex(chart, Dp)
    tgt = y_complex(chart, divisor)
    cmap = cartier_map(src, tgt)
    shift = cmap.alpha_shift
    p = chart.p

    def reachable(beta):
        alpha = []
        for b, t in zip(beta, shift):
            r = b - t
            if r < 0 or r % p:
                return None
            alpha.append(r // p)
        alpha = tuple(alpha)
        return alpha if src.admissible(alpha) else None

    def sig(beta):
        alpha = reachable(beta)
        asig = None if alpha is None else src.weights(alpha)
        return (asig, tgt.weights(beta), beta[chart.inf] >= 1,
                None if alpha is None else alpha[chart.inf] >= 1)

    def evaluate(beta):
        tcell = tgt.cell(beta)
        dimH = tcell.dimH(q)
        alpha = reachable(beta)
        if alpha is None:
            return (dimH == 0, {"dimH": dimH, "reachable": False})
        scell = src.cell(alpha)
        n = scell.dim(q)
        if dimH != n:
            return (False, {"dimH": dimH, "dim_src": n, "reachable": True})
        if n == 0:
            return (True, {"dimH": 0, "reachable": True})
        cols = []
        for i in range(n):
            vec = [0] * n
            vec[i] = 1
            img = cmap.apply(alpha, q, vec)
            cc = tcell.class_coords(q, img)
            if cc is None:
                return (False, {"note": "cartier image not closed"})
            cols.append(cc)
        m = FpMatrix(chart.field, dimH, n)
        for j, col in enumerate(cols):
            for i, v in enumerate(col):
                m.data[i][j] = v
        rank, _, _ = rank_kernel_image(m)
        return (rank == n, {"dimH": dimH, "rank": rank, "reachable": True})

    scan = SignatureScan()
    ok, bad, _ = scan.run(tgt.multidegrees(), sig, evaluate)
    out.cells_checked = scan.cells
    if not ok:
        info = scan.cache[sig(bad)][1]
        out.fail(witness={"kind": "cartier-cell", "beta": list(bad), "info": info},
                 note="Cartier bijectivity / vanishing failed at %r" % (bad,))
    return out


def check_quasi_iso_inclusion(chart: Chart, divisor: Divisor, q: int) -> CheckOutcome:
    """The twist inclusion omega_{Y|pD'} -> omega_{Y|D} induces bijections
    on H^q per multidegree (cells outside the image must have H = 0)."""
    out = CheckOutcome("quasi_iso_inclusion",
                       {"p": chart.p, "d": chart.d, "q": q,
                        "mult": divisor.vector(), "N": chart.window})
    pDp = divisor.prime().scale(chart.p)
    src = y_complex(chart, pDp)
    tgt = y_complex(chart, divisor)
    inc = twist_inclusion(src, tgt)
    delta = inc.alpha_shift

    def back(beta):
        alpha = tuple(b - t for b, t in zip(beta, delta))
        if any(x < 0 for x in alpha) or not src.admissible(alpha):
            return None
        return alpha

    def sig(beta):
        alpha = back(beta)
        return (None if alpha is None else src.weights(alpha),
                tgt.weights(beta))

    def evaluate(beta):
        tcell = tgt.cell(beta)
        dimH = tcell.dimH(q)
        alpha = back(beta)
        if alpha is None:
            return (dimH == 0, {"dimH": dimH, "hit": False})
        scell = src.cell(alpha)
        if scell.dimH(q) != dimH:
            return (False, {"dimH_src": scell.dimH(q), "dimH_tgt": dimH})
        if dimH == 0:
            return (True, {"dimH": 0})
        cols = []
        for r in scell.coh(q)["H_reps"]:
            img = inc.apply(alpha, q, r)
            cc = tcell.class_coords(q, img)
            if cc is None:
                return (False, {"note": "inclusion image not closed"})
            cols.append(cc)
        m = FpMatrix(chart.field, dimH, len(cols))
        for j, col in enumerate(cols):
            for i, v in enumerate(col):
                m.data[i][j] = v
        rank, _, _ = rank_kernel_image(m)
        return (rank == dimH, {"dimH": dimH, "rank": rank})

    scan = SignatureScan()
    ok, bad, _ = scan.run(tgt.multidegrees(), sig, evaluate)
    out.cells_checked = scan.cells
    if not ok:
        out.fail(witness={"kind": "quasi-iso-cell", "beta": list(bad),
                          "info": scan.cache[sig(bad)][1]})
    return out


# -- residue homotopy and graded acyclicity --------------------------------

def _residue_matrix(fam: ComplexFamily, alpha, q, mu):
    """Cell matrix of the interior product against dlog T_mu."""
    F = fam.field
    src = fam.basis(alpha, q)
    dst = {I: i for i, I in enumerate(fam.basis(alpha, q - 1))}
    m = FpMatrix(F, len(dst), len(src))
    for col, I in enumerate(src):
        if mu not in I:
            continue
        pos = I.index(mu)
        J = I[:pos] + I[pos + 1:]
        m.data[dst[J]][col] = F.one if pos % 2 == 0 else F.neg(F.one)
    return m


def check_graded_acyclicity(chart: Chart, divisor: Divisor,
                            random_forms: int = 25, seed: int = 0) -> CheckOutcome:
    """Walk the canonical filtration chain from D to p*D'; on every step
    with p not dividing the dropped multiplicity, prove acyclicity twice:
    by direct cell cohomology and by the residue homotopy
    d Res + Res d = m_mu id (also sampled on random explicit forms)."""
    out = CheckOutcome("graded_acyclicity",
                       {"p": chart.p, "d": chart.d, "mult": divisor.vector(),
                        "N": chart.window, "random_forms": random_forms})
    levels, steps = filtration_chain(divisor)
    if not steps:
        out.note("D = p*D'; chain empty, nothing to prove")
        return out
    rng = random.Random(seed)
    p = chart.p
    hyp_met = 0
    for i, mu in enumerate(steps):
        level = levels[i]
        m_mu = level.get(mu)
        fam = residue_piece(chart, level, mu)
        if m_mu % p == 0:
            out.merge_status(HYP_NOT_MET)
            out.note("step %d: p | m_mu = %d, acyclicity not asserted" % (i, m_mu))
            continue
        hyp_met += 1
        scan = SignatureScan()

        def evaluate(alpha, fam=fam, m_mu=m_mu, mu=mu):
            cell = fam.cell(alpha)
            n = len(fam.wedge_set(alpha))
            # oracle 1: direct cohomology
            for q in range(n + 1):
                if cell.dimH(q) != 0:
                    return (False, {"q": q, "dimH": cell.dimH(q), "oracle": "direct"})
            # oracle 2: homotopy identity on the whole cell
            F = fam.field
            target = F.from_int(m_mu)
            for q in range(n + 1):
                dq = cell.d_matrix(q)
                res_next = _residue_matrix(fam, alpha, q + 1, mu)
                res_here = _residue_matrix(fam, alpha, q, mu)
                dprev = cell.d_matrix(q - 1)
                lhs = res_next.matmul(dq)
                if res_here.rows and dprev.rows:
                    add = dprev.matmul(res_here)
                    for r in range(lhs.rows):
                        for c in range(lhs.cols):
                            lhs.data[r][c] = F.add(lhs.data[r][c], add.data[r][c])
                for r in range(lhs.rows):
                    for c in range(lhs.cols):
                        want = target if r == c else 0
                        if lhs.data[r][c] != want:
                            return (False, {"q": q, "oracle": "homotopy"})
            return (True, {})

        ok, bad, _ = scan.run(fam.multidegrees(), lambda a: fam.weights(a), evaluate)
        out.cells_checked += scan.cells
        if not ok:
            out.fail(witness={"kind": "acyclicity-cell", "step": i,
                              "alpha": list(bad),
                              "info": scan.cache[fam.weights(bad)][1]})
            return out
        # random explicit forms through the forms layer (independent path)
        for _ in range(random_forms):
            q = rng.randrange(0, chart.d + 1)
            omega = _random_form(chart, fam, q, rng)
            lhs = differential_twisted(residue(omega, mu), level) + \
                residue(differential_twisted(omega, level), mu)
            want = omega.scale(chart.field.from_int(m_mu))
            if lhs != want:
                return out.fail(witness={"kind": "homotopy-form", "step": i,
                                         "form": serialize_form(omega)},
                                note="residue homotopy failed on a sampled form")
    out.record_dim("steps", len(steps))
    out.record_dim("steps_with_hypothesis", hyp_met)
    return out


def _random_form(chart, fam, q, rng):
    terms = {}
    for _ in range(4):
        alphas = None
        for _try in range(20):
            alpha = tuple(rng.randrange(0, 3) if v in fam.free_vars else 0
                          for v in range(chart.nvars))
            if sum(alpha) <= chart.window:
                alphas = alpha
                break
        if alphas is None:
            continue
        basis = fam.basis(alphas, q)
        if not basis:
            continue
        I = basis[rng.randrange(len(basis))]
        c = rng.randrange(1, chart.field.order)
        terms[(alphas, I)] = c
    mode = "y" if not fam.wedge_t0 else "special_fiber"
    return LogForm(chart, chart.field, mode, terms)


# -- connecting homomorphism -------------------------------------------------

def omega_sequence(chart: Chart, divisor: Divisor, m: int) -> ShortExactSequence:
    """0 -> omega_{Y|D}[-1] --^dlog T0--> T^m-graded -> omega_{Y|D} -> 0."""
    sub = y_complex(chart, divisor)
    mid = graded_piece(chart, divisor, m)
    quot = y_complex(chart, divisor)
    F = chart.field

    def inj_matrix(alpha, q):
        src = sub.basis(alpha, q)
        dst = {I: i for i, I in enumerate(mid.basis(alpha, q + 1))}
        mat = FpMatrix(F, len(dst), len(src))
        for col, I in enumerate(src):
            K = (0,) + I
            v = F.one if len(I) % 2 == 0 else F.neg(F.one)  # eta ^ dlog T0
            mat.data[dst[K]][col] = v
        return mat

    def proj_matrix(alpha, q):
        src = mid.basis(alpha, q)
        dst = {I: i for i, I in enumerate(quot.basis(alpha, q))}
        mat = FpMatrix(F, len(dst), len(src))
        for col, I in enumerate(src):
            if I and I[0] == 0:
                continue
            mat.data[dst[I]][col] = F.one
        return mat

    ident = lambda a: a
    inj = GradedMap(sub, mid, ident, inj_matrix, label="wedge dlogT0")
    proj = GradedMap(mid, quot, ident, proj_matrix, label="drop dlogT0")
    return ShortExactSequence(sub, mid, quot, inj, proj, degree_shift=1)


def check_connecting_identity(chart: Chart, divisor: Divisor, m: int, q: int) -> CheckOutcome:
    """The connecting map of the T^m graded sequence is (-1)^q * m * id on
    H^q per multidegree; in particular zero when p | m."""
    out = CheckOutcome("connecting_identity",
                       {"p": chart.p, "d": chart.d, "q": q, "m": m,
                        "mult": divisor.vector(), "N": chart.window})
    ses = omega_sequence(chart, divisor, m)
    F = chart.field
    expected = F.from_int(((-1) ** q) * m)
    quot = ses.quot

    def evaluate(alpha):
        dimH = quot.cell(alpha).dimH(q)
        mat = ses.connecting_map(q, alpha)
        for i in range(mat.rows):
            for j in range(mat.cols):
                want = expected if i == j else 0
                if mat.data[i][j] != want:
                    return (False, {"dimH": dimH, "entry": (i, j),
                                    "got": mat.data[i][j], "want": want})
        return (True, {"dimH": dimH})

    scan = SignatureScan()
    ok, bad, _ = scan.run(quot.multidegrees(), lambda a: quot.weights(a), evaluate)
    out.cells_checked = scan.cells
    out.record_dim("expected_scalar", expected)
    if not ok:
        out.fail(witness={"kind": "connecting-cell", "alpha": list(bad),
                          "info": scan.cache[quot.weights(bad)][1]})
    return out


# -- T^m short exact sequences (Lem2 shape) ---------------------------------

def check_tm_sequences(chart: Chart, divisor: Divisor, m: int, q: int) -> CheckOutcome:
    """Exactness and end terms of
       0 -> omega^{q-2}/Z^{q-2} -> B^q(T^m-graded) -> omega^{q-1}/(B or Z) -> 0
    realized in G^{q-1}/Z^{q-1}(G) coordinates (iso to B^q via d), with the
    stated generator assignments."""
    if m < 1:
        raise ValueError("m >= 1 required")
    out = CheckOutcome("tm_sequences",
                       {"p": chart.p, "d": chart.d, "q": q, "m": m,
                        "mult": divisor.vector(), "N": chart.window})
    p = chart.p
    p_divides = (m % p == 0)
    G = graded_piece(chart, divisor, m)
    Y = y_complex(chart, divisor)
    F = chart.field

    def evaluate(alpha):
        gcell = G.cell(alpha)
        ycell = Y.cell(alpha)
        nG = gcell.dim(q - 1)
        V = Quotient(F, nG, gcell.Z(q - 1))          # iso to B^q(G) via d
        # left: Y^{q-2}/Z^{q-2} -> V by eta -> class of eta ^ dlog T0
        ybasis2 = Y.basis(alpha, q - 2)
        gpos = {I: i for i, I in enumerate(G.basis(alpha, q - 1))}
        lcols = []
        sign = F.one if (q - 2) % 2 == 0 else F.neg(F.one)
        for I in ybasis2:
            vec = [0] * nG
            vec[gpos[(0,) + I]] = sign
            lcols.append(V.coords(vec))
        # right: V -> Y^{q-1}/(B or Z) by dropping dlog T0 labels
        denom = ycell.B(q - 1) if not p_divides else ycell.Z(q - 1)
        W = Quotient(F, ycell.dim(q - 1), denom)
        ypos1 = {I: i for i, I in enumerate(Y.basis(alpha, q - 1))}
        rcols = []
        for vrep in V.basis.rows:
            yvec = [0] * ycell.dim(q - 1)
            for c, I in zip(vrep, G.basis(alpha, q - 1)):
                if c and (not I or I[0] != 0):
                    yvec[ypos1[I]] = c
            rcols.append(W.coords(yvec))
        # right map well-defined: proj(Z^{q-1}(G)) inside the denominator
        for zrow in gcell.Z(q - 1).rows:
            yvec = [0] * ycell.dim(q - 1)
            for c, I in zip(zrow, G.basis(alpha, q - 1)):
                if c and (not I or I[0] != 0):
                    yvec[ypos1[I]] = c
            if not W.is_zero(yvec):
                return (False, {"stage": "right map ill-defined"})
        # left map: kernel must be exactly Z^{q-2}_Y
        YQ2 = Quotient(F, ycell.dim(q - 2), ycell.Z(q - 2))
        lmat = FpMatrix(F, V.dim, len(ybasis2))
        for j, col in enumerate(lcols):
            for i, v in enumerate(col):
                lmat.data[i][j] = v
        # factor through the quotient: columns for the quotient basis
        lq_cols = []
        for rep in YQ2.basis.rows:
            acc = [0] * V.dim
            for c, col in zip(rep, lcols):
                if c:
                    acc = [F.add(a, F.mul(c, b)) for a, b in zip(acc, col)]
            lq_cols.append(acc)
        lq = FpMatrix(F, V.dim, len(lq_cols))
        for j, col in enumerate(lq_cols):
            for i, v in enumerate(col):
                lq.data[i][j] = v
        rk_l, kern_l, _ = rank_kernel_image(lq)
        if kern_l:
            return (False, {"stage": "left map not injective"})
        # well-defined: image of Z^{q-2}_Y is zero in V
        for zrow in ycell.Z(q - 2).rows:
            acc = [0] * V.dim
            for c, col in zip(zrow, lcols):
                if c:
                    acc = [F.add(a, F.mul(c, b)) for a, b in zip(acc, col)]
            if any(acc):
                return (False, {"stage": "left map ill-defined on Z"})
        rq = FpMatrix(F, W.dim, V.dim)
        for j, col in enumerate(rcols):
            for i, v in enumerate(col):
                rq.data[i][j] = v
        rk_r, _, _ = rank_kernel_image(rq)
        if rk_r != W.dim:
            return (False, {"stage": "right map not surjective"})
        # composition zero and dimension exactness
        comp = rq.matmul(lq)
        if not comp.is_zero():
            return (False, {"stage": "r o l != 0"})
        if rk_l + rk_r != V.dim:
            return (False, {"stage": "middle exactness",
                            "dimV": V.dim, "rk_l": rk_l, "rk_r": rk_r})
        return (True, {"dimB": V.dim, "left": YQ2.dim, "right": W.dim})

    scan = SignatureScan()
    ok, bad, _ = scan.run(Y.multidegrees(),
                          lambda a: (G.weights(a), Y.weights(a)), evaluate)
    out.cells_checked = scan.cells
    out.record_dim("p_divides_m", p_divides)
    if not ok:
        out.fail(witness={"kind": "tm-sequence-cell", "alpha": list(bad),
                          "info": scan.cache[(G.weights(bad), Y.weights(bad))][1]})
    return out


# -- log-kernel sequence -----------------------------------------------------

def log_generators(chart: Chart, divisor: Divisor, q: int, bound: int):
    """Truncations of the predicted kernel generators
       dlog(1 + c T^gamma T^m) ^ dlog T_{j_2} ^ ... ^ dlog T_{j_q},
    with unit slots allowed in later positions too; for D = 0 the pure
    coordinate products join the family (classical generators)."""
    F = chart.field
    tw = divisor.twist_exps()
    gens = []
    coords = [j for j in range(1, chart.d + 1)]
    # the coefficient form of dlog(1 + c T^e) with e = gamma + tw seeds the
    # window cell gamma, so gamma (not e) runs over the probe window
    unit_exps = []
    for gamma in _small_exps(chart, bound):
        e = tuple(a + b for a, b in zip(gamma, tw))
        if sum(e) > 0 and sum(e) <= chart.window:
            unit_exps.append(e)
    basis_scalars = [F.from_coords([1 if i == c else 0 for i in range(F.s)])
                     for c in range(F.s)]
    from itertools import combinations

    def as_twisted(omega):
        # elements of omega_{Y|D} are stored as coefficient forms for T^tw
        out = {}
        for (alpha, I), c in omega.terms.items():
            shifted = tuple(a - t for a, t in zip(alpha, tw))
            if any(x < 0 for x in shifted):
                raise ValueError("generator not divisible by the divisor twist")
            out[(shifted, I)] = c
        return LogForm(chart, F, "y", out)

    tails = list(combinations(coords, q - 1)) if q >= 1 else []
    for e in unit_exps:
        for c in basis_scalars:
            u = chart.poly_one() + chart.poly_monomial(e, c)
            lead = dlog_of_unit(chart, u, mode="y")
            for tail in tails:
                omega = lead
                for j in tail:
                    omega = wedge(omega, LogForm.dlog_var(chart, j, mode="y"))
                if not omega.is_zero():
                    gens.append(as_twisted(omega))
    # a second unit slot (q >= 2): first factor twisted, second any unit
    if q >= 2:
        free_exps = [e for e in _small_exps(chart, bound) if 0 < sum(e)]
        for e1 in unit_exps:
            for e2 in free_exps:
                if sum(e1) - sum(tw) + sum(e2) > bound:
                    continue
                u1 = chart.poly_one() + chart.poly_monomial(e1)
                u2 = chart.poly_one() + chart.poly_monomial(e2)
                omega = wedge(dlog_of_unit(chart, u1, mode="y"),
                              dlog_of_unit(chart, u2, mode="y"))
                for tail in combinations(coords, q - 2):
                    o = omega
                    for j in tail:
                        o = wedge(o, LogForm.dlog_var(chart, j, mode="y"))
                    if not o.is_zero():
                        gens.append(as_twisted(o))
    if divisor.is_zero():
        for I in combinations(coords, q):
            o = LogForm(chart, F, "y", {(chart.zero_exp(), tuple(I)): F.one})
            gens.append(o)
    return gens


def _small_exps(chart, bound):
    from .cells import iter_multidegrees
    free = [v for v in range(chart.nvars) if v != 0]
    for comp in iter_multidegrees(len(free), bound):
        alpha = [0] * chart.nvars
        for v, c in zip(free, comp):
            alpha[v] = c
        yield tuple(alpha)


def semilinear_kernel(chart: Chart, divisor: Divisor, q: int, a_scalar=1,
                      bound=None) -> SemilinearKernel:
    """Windowed kernel of 1 - a*C^{-1} on Z^q(omega_{Y|D})."""
    if a_scalar == 0:
        raise ValueError("a must be a nonzero scalar")
    Y = y_complex(chart, divisor)
    op = cartier_map(Y, Y, scalar=a_scalar)
    return SemilinearKernel(op, q, bound=bound)


def check_log_kernel(chart: Chart, divisor: Divisor, q: int, a_scalar=1,
                     bound=None) -> CheckOutcome:
    """(i) every predicted log generator is killed by 1 - a C^{-1} modulo
    boundaries at each window degree; (ii) the windowed kernel is contained
    in the generator span, inconclusive where orbits exit the window."""
    out = CheckOutcome("log_kernel",
                       {"p": chart.p, "d": chart.d, "q": q, "a": a_scalar,
                        "mult": divisor.vector(), "N": chart.window,
                        "bound": bound or chart.window})
    bound = bound or chart.window
    ker = semilinear_kernel(chart, divisor, q, a_scalar, bound)
    Y = ker.family
    gens = log_generators(chart, divisor, q, bound) if a_scalar == 1 else []
    if a_scalar != 1:
        out.note("generator comparison only defined for a = 1; kernel stats only")
    # (i) membership of every generator
    for g in gens:
        comps = {}
        okform = True
        for alpha in g.multidegrees():
            if sum(alpha) > bound:
                continue
            try:
                comps[alpha] = Y.form_to_vec(g, alpha, q)
            except ValueError:
                okform = False
                break
        if not okform:
            continue
        if not ker.contains(comps):
            return out.fail(witness={"kind": "generator-not-in-kernel",
                                     "form": serialize_form(g)},
                            note="a predicted log generator is not killed by 1-aC^{-1}")
    out.record_dim("generators_checked", len(gens))
    out.record_dim("kernel_dim_fp", ker.dim_fp)
    if a_scalar != 1:
        return out
    # (ii) kernel inside the generator span
    coords_index = {}
    offset = 0
    for alpha in ker.cells:
        n = Y.cell(alpha).dim(q)
        coords_index[alpha] = (offset, n)
        offset += n
    total = offset
    F = chart.field

    def embed(components):
        vec = [0] * total
        for alpha, v in components.items():
            if alpha not in coords_index:
                continue
            off, n = coords_index[alpha]
            for i in range(n):
                vec[off + i] = v[i]
        return vec

    gen_vectors = []
    for g in gens:
        comps = {}
        for alpha in g.multidegrees():
            if alpha in coords_index:
                comps[alpha] = Y.form_to_vec(g, alpha, q)
        gen_vectors.append(embed(comps))
    span = Subspace(F, total, gen_vectors)
    missing = 0
    edge_only = True
    for el in ker.basis_elements():
        v = embed(el)
        if span.contains(v):
            continue
        missing += 1
        red = span.reduce(v)
        for alpha, (off, n) in coords_index.items():
            if any(red[off:off + n]) and alpha not in ker.edge_cells \
                    and not ker.is_fixed(alpha):
                edge_only = False
    out.record_dim("generator_span_dim", span.dim)
    out.record_dim("kernel_elements_outside_span", missing)
    if missing:
        if edge_only:
            out.merge_status(INCONCLUSIVE)
            out.note("kernel exceeds generator span only along window-edge orbits")
        else:
            out.fail(note="windowed kernel not explained by log generators")
    return out


# -- Mittag-Leffler transition on the obstruction quotient -------------------

def obstruction_dims(chart: Chart, divisor: Divisor, q: int, bound=None):
    """Dimension table of K^q(D) = (O_Y (x) omega^{q-1}_{Z|D'}) /
    (O_Y (x) omega^{q-1}_{Z|D}) per multidegree."""
    num = ComplexFamily(chart, divisor.prime(), wedge_t0=True, reduce_t0=True)
    den = ComplexFamily(chart, divisor, wedge_t0=True, reduce_t0=True)
    inc = twist_inclusion(den, num)
    delta = inc.alpha_shift
    dims = {}
    for beta in num.multidegrees(bound):
        n = num.cell(beta).dim(q - 1)
        back = tuple(b - t for b, t in zip(beta, delta))
        hit = (all(x >= 0 for x in back) and den.admissible(back))
        dims[beta] = 0 if hit else n
    return dims


def check_ml_transition(chart: Chart, div1: Divisor, div2: Divisor, q: int,
                        bound=None) -> CheckOutcome:
    """The transition K^q(D2) -> K^q(D1) vanishes exactly when
    m'_2 >= m_1 componentwise (so D2 = p*D1 always kills the obstruction)."""
    if not div2.dominates(div1):
        raise ValueError("need D2 >= D1 componentwise")
    out = CheckOutcome("ml_transition",
                       {"p": chart.p, "d": chart.d, "q": q,
                        "mult1": div1.vector(), "mult2": div2.vector(),
                        "N": chart.window})
    bound = bound if bound is not None else chart.window
    m1 = div1.vector()
    m2p = div2.prime().vector()
    expect_zero = all(a >= b for a, b in zip(m2p, m1))
    num2 = ComplexFamily(chart, div2.prime(), wedge_t0=True, reduce_t0=True)
    den2 = ComplexFamily(chart, div2, wedge_t0=True, reduce_t0=True)
    num1 = ComplexFamily(chart, div1.prime(), wedge_t0=True, reduce_t0=True)
    den1 = ComplexFamily(chart, div1, wedge_t0=True, reduce_t0=True)
    inc_num = twist_inclusion(num2, num1)   # D2' >= D1'
    d_den2 = twist_inclusion(den2, num2).alpha_shift
    d_den1 = twist_inclusion(den1, num1).alpha_shift
    d_tran = inc_num.alpha_shift
    found_nonzero = None
    k2_total = 0
    skipped = 0
    for beta in num2.multidegrees(bound):
        n = num2.cell(beta).dim(q - 1)
        if n == 0:
            continue
        back2 = tuple(b - t for b, t in zip(beta, d_den2))
        if all(x >= 0 for x in back2):
            continue  # K^q(D2) vanishes at beta
        k2_total += n
        # transition image in K^q(D1): beta + d_tran, zero iff inside den1
        beta1 = tuple(b + t for b, t in zip(beta, d_tran))
        if sum(beta1) > chart.window:
            skipped += 1
            continue
        back1 = tuple(b - t for b, t in zip(beta1, d_den1))
        if not all(x >= 0 for x in back1):
            found_nonzero = beta
            break
    is_zero = found_nonzero is None
    out.record_dim("K2_dim_window", k2_total)
    out.record_dim("transition_zero", is_zero)
    out.record_dim("expected_zero", expect_zero)
    if div1.is_reduced() and not div1.is_zero():
        dims1 = obstruction_dims(chart, div1, q, bound=min(bound, 2 * chart.p))
        if any(dims1.values()):
            out.fail(note="reduced divisor should have K = 0")
    if is_zero != expect_zero:
        if is_zero and skipped:
            out.merge_status(INCONCLUSIVE)
            out.note("expected a nonzero transition but every candidate left "
                     "the window (%d skipped)" % skipped)
        else:
            out.fail(witness={"kind": "ml-transition",
                              "beta": None if is_zero else list(found_nonzero)},
                     note="transition vanishing disagrees with the m'_2 >= m_1 criterion")
    return out
