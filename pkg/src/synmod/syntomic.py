"""The syntomic side: filtration graded pieces of the mapping fiber of
1 - phi_r, built on polynomial graded pieces through the standard
identifications, plus the divided-power sanity checks.

The filtration level of the degree-j term of the J^[r-.]-side is
c_j(m) = max(e*(r-j) + ceil(m/p), m) for j < r and m for j >= r; a graded
piece survives at degree j iff c_j(m+1) = c_j(m) + 1.  The graded
Frobenius picks the T_0^m-homogeneous component of
phi_{r-j}(T_0^{g_j} x) = Phi_e^{r-j} * T_0^{p(g_j - e(r-j))} * x^(p),
which is nonzero only when p | m, with the Eisenstein scalar
Phi_e^k[i*] at i* = m/p - g_j + e(r-j).
"""

from __future__ import annotations

from functools import lru_cache

from .chart import Chart, Divisor, EisensteinData
from .cells import ComplexFamily
from .cohomology import SemilinearKernel
from .fields import gf, zmod
from .linalg import FpMatrix, Subspace, rank_kernel_image
from .outcome import (CheckOutcome, FAIL, HYP_NOT_MET, INCONCLUSIVE, PASS,
                      SignatureScan)
from .pd import PDElement, PDRing
from .poly import DivisibilityError, TruncatedPoly
from .verify_derham import graded_piece, y_complex


# -- Eisenstein data --------------------------------------------------------

def eisenstein_phi(chart: Chart, eis: EisensteinData, k: int) -> TruncatedPoly:
    """(a_0^p + a_1^p T_0^p + ... + a_{e-1}^p T_0^{(e-1)p})^k, truncated;
    the divided-power tail (T_0^e)^[p] is dropped (it dies in every graded
    piece, being a J^[p] element)."""
    if k < 0:
        raise ValueError("k >= 0 required")
    F = chart.field
    base = TruncatedPoly.zero(F, chart.nvars, chart.window)
    for i, a in enumerate(eis.coeffs):
        e = [0] * chart.nvars
        e[0] = chart.p * i
        base = base + chart.poly_monomial(e, F.frob(a))
    return base.pow(k)


def eis_digit(chart: Chart, eis: EisensteinData, k: int, istar: int):
    """Coefficient of T_0^(p*istar) in eisenstein_phi(..., k)."""
    if istar < 0 or istar > (eis.e - 1) * k:
        return 0
    F = chart.field
    coeffs = [F.frob(a) for a in eis.coeffs]
    acc = [F.one]
    for _ in range(k):
        nxt = [0] * (len(acc) + eis.e - 1)
        for i, x in enumerate(acc):
            if not x:
                continue
            for j, y in enumerate(coeffs):
                if y:
                    nxt[i + j] = F.add(nxt[i + j], F.mul(x, y))
        acc = nxt
    return acc[istar] if istar < len(acc) else 0


def verify_eisenstein_identity(p: int, e: int, int_coeffs) -> bool:
    """Exact-integer oracle for the divided Frobenius of the Eisenstein
    polynomial.  With E = T^e + p*u(T), u = a_{e-1}T^{e-1}+...+a_0:

      (a) T^{pe} = sum_k C(p,k) E^k (-p u)^{p-k}     as a Z[T] identity,
      (b) phi(E) - E^p is divisible by p in Z[T],
      (c) (phi(E) - E^p)/p == u(T^p) mod p.

    (c) is the graded value used everywhere downstream (E^p/p is the
    divided-power tail living in J^[p]); a_i^p == a_i mod p makes this the
    displayed coefficient formula.
    """
    from math import comb

    def pmul(f, g):
        out = [0] * (len(f) + len(g) - 1)
        for i, a in enumerate(f):
            if a:
                for j, b in enumerate(g):
                    out[i + j] += a * b
        return out

    def padd(f, g):
        n = max(len(f), len(g))
        return [(f[i] if i < len(f) else 0) + (g[i] if i < len(g) else 0)
                for i in range(n)]

    def pscale(f, c):
        return [c * a for a in f]

    u = list(int_coeffs)  # a_0 .. a_{e-1}
    E = [0] * e + [1]
    for i, a in enumerate(u):
        E[i] += p * a
    neg_pu = pscale(u, -p)
    target = [0] * (p * e) + [1]
    expanded = [0]
    for k in range(p + 1):
        Ek = [1]
        for _ in range(k):
            Ek = pmul(Ek, E)
        pu_pow = [1]
        for _ in range(p - k):
            pu_pow = pmul(pu_pow, neg_pu)
        expanded = padd(expanded, pscale(pmul(Ek, pu_pow), comb(p, k)))
    if any(a != b for a, b in
           zip(expanded + [0] * len(target), target + [0] * len(expanded))):
        return False
    phiE = list(target)
    for i, a in enumerate(u):
        if len(phiE) <= p * i:
            phiE += [0] * (p * i - len(phiE) + 1)
        phiE[p * i] += p * a
    Ep = [1]
    for _ in range(p):
        Ep = pmul(Ep, E)
    rest = padd(phiE, pscale(Ep, -1))
    if any(c % p for c in rest):
        return False
    graded = [(c // p) % p for c in rest]
    want = [0] * max(len(graded), p * (e - 1) + 1)
    for i, a in enumerate(u):
        want[p * i] = a % p
    return all((c - (want[i] if i < len(want) else 0)) % p == 0
               for i, c in enumerate(graded))


# -- filtration levels -------------------------------------------------------

def filt_level(eis: EisensteinData, p: int, r: int, j: int, m: int) -> int:
    """c_j(m): T_0 exponent of the level-m filtration step at degree j."""
    k = r - j
    if k <= 0:
        return m
    return max(eis.e * k + -(-m // p), m)


def gr_case(eis: EisensteinData, p: int, q: int, r: int, m: int) -> str:
    """Position of m against [e p (r-q)/(p-1), e p (r-q+1)/(p-1)), decided
    in exact integer arithmetic."""
    lo = eis.e * p * (r - q)
    hi = eis.e * p * (r - q + 1)
    v = m * (p - 1)
    if v < lo:
        return "below"
    if v == lo:
        return "endpoint"
    if v < hi:
        return "interior"
    return "above"


def build_syntomic_gr(chart, divisor, eis, q, r, m):
    """Construct the graded syntomic fiber piece (the SyntomicGrPiece)."""
    return GradedFiberPiece(chart, divisor, eis, q, r, m)


class GradedFiberPiece:
    """gr^m of the mapping fiber of 1 - phi_r, realized on polynomial
    graded pieces; degrees q-1, q, q+1 on the J-side, q-2..q on the
    O_E-side (the exact shape needed for H^{q-1}, H^q)."""

    def __init__(self, chart: Chart, divisor: Divisor, eis: EisensteinData,
                 q: int, r: int, m: int):
        if not (0 <= q <= r <= chart.p - 2):
            raise ValueError("need 0 <= q <= r <= p-2")
        if m < 0:
            raise ValueError("m >= 0 required")
        self.chart = chart
        self.divisor = divisor
        self.eis = eis
        self.q, self.r, self.m = q, r, m
        p = chart.p
        self.levels = {}
        self.present = {}
        self.A = {}
        for j in range(q - 1, q + 2):
            g = filt_level(eis, p, r, j, m)
            g1 = filt_level(eis, p, r, j, m + 1)
            self.levels[j] = g
            self.present[j] = (g1 == g + 1)
            if g1 not in (g, g + 1):
                raise AssertionError("filtration step jumped by more than one")
            if self.present[j]:
                self.A[j] = graded_piece(chart, divisor, g)
        self.B = graded_piece(chart, divisor, m)
        tw = divisor.twist_exps()
        self.sigma_shift = tuple((p - 1) * t for t in tw)
        self.phi_scalar = {j: self._phi_scalar(j) for j in range(q - 1, q + 2)}

    def _phi_scalar(self, j):
        """Scalar of the graded Frobenius A_j -> B_j (0 when it dies)."""
        if not self.present.get(j, False):
            return 0
        p, m, r = self.chart.p, self.m, self.r
        k = r - j
        g = self.levels[j]
        if k <= 0:
            if k < 0:
                return 0  # p^(j-r) * phi vanishes mod p
            return 1 if m == 0 else 0  # phi(T^m x) = T^{pm} x^(p)
        if m % p:
            return 0
        istar = m // p - g + self.eis.e * k
        return eis_digit(self.chart, self.eis, k, istar)

    def sigma(self, alpha):
        p = self.chart.p
        beta = tuple(p * a + t for a, t in zip(alpha, self.sigma_shift))
        if sum(beta) > self.chart.window or not self.B.admissible(beta):
            return None
        return beta

    def sigma_pre(self, beta):
        p = self.chart.p
        alpha = []
        for b, t in zip(beta, self.sigma_shift):
            v = b - t
            if v < 0 or v % p:
                return None
            alpha.append(v // p)
        alpha = tuple(alpha)
        return alpha if self.B.admissible(alpha) else None

    def has_coupling(self):
        return any(self.phi_scalar.values())

    # -- block dimension helpers ----------------------------------------
    def a_dim(self, alpha, n):
        if not self.keep_a(alpha, n):
            return 0
        return self.A[n].cell(alpha).dim(n)

    def b_dim(self, alpha, n):
        if n < self.q - 2 or n > self.q:
            return 0
        return self.B.cell(alpha).dim(n)

    def fib_dim(self, alpha, n):
        return self.a_dim(alpha, n) + self.b_dim(alpha, n - 1)

    # -- orbit complexes -------------------------------------------------
    def orbit_chain(self, seed):
        chain = [seed]
        cur = seed
        while True:
            nxt = self.sigma(cur)
            if nxt is None or nxt == cur:
                break
            chain.append(nxt)
            cur = nxt
        return chain

    def window_seeds(self, bound=None):
        for alpha in self.B.multidegrees(bound):
            if self.sigma_pre(alpha) is None or self.sigma(alpha) == alpha:
                yield alpha

    def orbit_signature(self, chain):
        q = self.q
        return (tuple(self.B.weights(a) for a in chain),
                tuple(a[self.chart.inf] >= 1 for a in chain),
                tuple(tuple(self.keep_a(a, n) for n in (q - 1, q, q + 1))
                      for a in chain))

    def _fib_layout(self, chain, n):
        """[(kind, t, dim)] block layout of Fib^n over the chain."""
        out = []
        for t, alpha in enumerate(chain):
            out.append(("A", t, self.a_dim(alpha, n)))
        for t, alpha in enumerate(chain):
            out.append(("B", t, self.b_dim(alpha, n - 1)))
        return out

    def _fib_matrix_fp(self, chain, n):
        """F_p matrix of d: Fib^n -> Fib^(n+1) over the whole orbit."""
        F = self.chart.field
        s = F.s
        src = self._fib_layout(chain, n)
        dst = self._fib_layout(chain, n + 1)
        src_off, tot_s = _offsets(src, s)
        dst_off, tot_d = _offsets(dst, s)
        rows = [[0] * tot_s for _ in range(tot_d)]

        def put_block(dkey, skey, mat, frob=0, negate=False, scalar=1):
            if mat is None:
                return
            ro = dst_off.get(dkey)
            co = src_off.get(skey)
            if ro is None or co is None:
                return
            for i in range(mat.rows):
                for jj in range(mat.cols):
                    v = mat.data[i][jj]
                    if not v:
                        continue
                    if scalar != 1:
                        v = F.mul(scalar, v)
                    if negate:
                        v = F.neg(v)
                    _fp_insert(rows, F, ro + i * s, co + jj * s, v, frob)

        for t, alpha in enumerate(chain):
            # d_A: A_n(alpha) -> A_{n+1}(alpha) iff levels match
            if self.present.get(n, False) and self.present.get(n + 1, False):
                if self.levels[n] == self.levels[n + 1] and self.a_dim(alpha, n):
                    put_block(("A", t), ("A", t), self.A[n].cell(alpha).d_matrix(n))
            # (1 - phi) x into the B column of Fib^{n+1} (B-part at degree n)
            if self.present.get(n, False) and self.a_dim(alpha, n):
                from .cohomology import label_matrix
                if self.levels[n] == self.m and self.b_dim(alpha, n):
                    put_block(("B", t), ("A", t),
                              label_matrix(self.A[n], self.B, alpha, alpha, n))
                sc = self.phi_scalar[n]
                if sc:
                    beta = self.sigma(alpha)
                    if beta == alpha:  # fixed cell: phi couples to itself
                        put_block(("B", t), ("A", t),
                                  label_matrix(self.A[n], self.B, alpha, beta, n),
                                  frob=1, negate=True, scalar=sc)
                    elif beta is not None and t + 1 < len(chain) and chain[t + 1] == beta:
                        put_block(("B", t + 1), ("A", t),
                                  label_matrix(self.A[n], self.B, alpha, beta, n),
                                  frob=1, negate=True, scalar=sc)
            # -d_B: B_{n-1}(alpha) -> B_n(alpha)
            if self.b_dim(alpha, n - 1) and self.b_dim(alpha, n):
                put_block(("B", t), ("B", t),
                          self.B.cell(alpha).d_matrix(n - 1), negate=True)
        return rows, tot_s, tot_d

    def keep_a(self, alpha, n):
        """Drop an A-block exactly when its Frobenius condition is the sole
        constraint (graded level off the B-level, nonzero scalar) and the
        condition target left the window: asserting anything about such a
        block would let truncation leak into a verdict."""
        if not self.present.get(n, False):
            return False
        if (self.phi_scalar.get(n) and self.levels[n] != self.m
                and self.sigma(alpha) is None):
            return False
        return True

    def safe_a(self, alpha):
        """All A-blocks at this cell enforceable (legacy aggregate form)."""
        return all(self.keep_a(alpha, n) or not self.present.get(n, False)
                   for n in self.present)

    def orbit_H_dims(self, chain):
        """(dim_fp H^{q-1}, dim_fp H^q) of the safe fiber over one orbit."""
        F = self.chart.field
        q = self.q
        mats = {}
        for n in (q - 2, q - 1, q):
            mats[n] = self._fib_matrix_fp(chain, n)
        pf = gf(F.p, 1)
        dims = []
        for n in (q - 1, q):
            rows_n, tot_s, _ = mats[n]
            if tot_s == 0:
                dims.append(0)
                continue
            m_n = FpMatrix.from_rows(pf, rows_n) if rows_n else FpMatrix(pf, 0, tot_s)
            rk_n, kvecs, _ = rank_kernel_image(m_n)
            kern = len(kvecs)
            rows_p, tot_sp, _ = mats[n - 1]
            if rows_p and tot_sp:
                m_p = FpMatrix.from_rows(pf, rows_p)
                rk_p, _, _ = rank_kernel_image(m_p)
            else:
                rk_p = 0
            dims.append(kern - rk_p)
        return tuple(dims)

    def orbit_H_reps(self, chain, n):
        """H^n representatives of the safe orbit fiber as (vec, layout)."""
        F = self.chart.field
        pf = gf(F.p, 1)
        rows_n, tot_s, _ = self._fib_matrix_fp(chain, n)
        m_n = FpMatrix.from_rows(pf, rows_n) if rows_n else FpMatrix(pf, 0, tot_s)
        _, kvecs, _ = rank_kernel_image(m_n)
        rows_p, tot_sp, _ = self._fib_matrix_fp(chain, n - 1)
        bvecs = []
        if rows_p and tot_sp:
            m_p = FpMatrix.from_rows(pf, rows_p)
            for c in range(m_p.cols):
                bvecs.append([m_p.data[r][c] for r in range(m_p.rows)])
        B = Subspace(pf, tot_s, bvecs)
        reps = []
        for k in kvecs:
            r = B.reduce(k)
            if any(r):
                reps.append(r)
        H = Subspace(pf, tot_s, reps)
        layout = self._fib_layout(chain, n)
        return H.rows, layout, B

    def assert_d_squared_zero(self, chain):
        pf = gf(self.chart.field.p, 1)
        q = self.q
        for n in (q - 2, q - 1):
            rows_a, tot_s, tot_m = self._fib_matrix_fp(chain, n)
            rows_b, tot_m2, tot_d = self._fib_matrix_fp(chain, n + 1)
            if not rows_a or not rows_b:
                continue
            assert tot_m == tot_m2
            A = FpMatrix.from_rows(pf, rows_a)
            Bm = FpMatrix.from_rows(pf, rows_b)
            if not Bm.matmul(A).is_zero():
                raise AssertionError("fiber differential does not square to zero")


def _offsets(layout, s):
    off = {}
    pos = 0
    for kind, t, dim in layout:
        off[(kind, t)] = pos
        pos += dim * s
    return off, pos


def _fp_insert(rows, F, r0, c0, value, frob):
    """Insert the F_p block of x -> value * frob^f(x) at (r0, c0)."""
    s = F.s
    if s == 1:
        rows[r0][c0] = (rows[r0][c0] + value) % F.p
        return
    for c in range(s):
        e = F.from_coords([1 if i == c else 0 for i in range(s)])
        x = e
        if frob:
            x = F.frob(x)
        y = F.mul(value, x)
        for rj, coord in enumerate(F.coords(y)):
            if coord:
                rows[r0 + rj][c0 + c] = (rows[r0 + rj][c0 + c] + coord) % F.p


# -- the case-table check ----------------------------------------------------

def _coker_table(fib: GradedFiberPiece, bound=None):
    """Per-cell cokernel of the graded Frobenius at degree q-1, with the
    obstruction-quotient identification.

    For every window cell beta: coker_beta = dim H^{q-1}(grB)_beta minus
    the A^{q-1}-image when beta is hit.  The identification asserts,
    cell by cell, that coker_beta equals the K-quotient dimension at the
    Cartier source of beta (Lem-style (blacktriangle) square), and that
    hits match the D-submodule exactly.
    Returns (ok, total_coker, total_K, first_bad).
    """
    chart = fib.chart
    q, m = fib.q, fib.m
    B = fib.B
    Dp = fib.divisor.prime()
    tw = fib.divisor.twist_exps()
    twp = Dp.twist_exps()
    p = chart.p
    # Cartier source for H^{q-1}(grB)_beta: beta = p*alphaprime + (p m' - m)
    cshift = tuple(p * a - b for a, b in zip(twp, tw))
    total_coker = 0
    total_K = 0
    cache = {}
    first_bad = None
    for beta in B.multidegrees(bound):
        sig = (B.weights(beta), beta[chart.inf] >= 1,
               tuple(min(b - t, 2) for b, t in zip(beta, cshift)),
               tuple(min((b - t) % p, 1) for b, t in zip(beta, cshift)),
               fib.sigma_pre(beta) is not None)
        if sig not in cache:
            cache[sig] = _coker_cell(fib, beta, cshift)
        ok, ck, kk = cache[sig]
        if not ok and first_bad is None:
            first_bad = beta
        total_coker += ck
        total_K += kk
    return first_bad is None, total_coker, total_K, first_bad


def _coker_cell(fib: GradedFiberPiece, beta, cshift):
    """(ok, coker_dim, K_dim) at one B-window cell."""
    chart = fib.chart
    q, m = fib.q, fib.m
    p = chart.p
    hdim = fib.B.cell(beta).dimH(q - 1)
    # image of the degree q-1 graded Frobenius
    alpha = fib.sigma_pre(beta)
    hit = 0
    if alpha is not None and fib.phi_scalar.get(q - 1) and fib.keep_a(alpha, q - 1):
        hit = fib.A[q - 1].cell(alpha).dim(q - 1)
    coker = hdim - hit
    # K-quotient at the Cartier source alpha' of beta
    src = []
    for b, t in zip(beta, cshift):
        v = b - t
        if v < 0 or v % p:
            src = None
            break
        src.append(v // p)
    if src is None:
        kdim = 0
        ok = (hdim == 0)
        return ok, coker if coker > 0 else 0, kdim
    src = tuple(src)
    num = ComplexFamily(chart, fib.divisor.prime(), wedge_t0=True, reduce_t0=True)
    den_gap = tuple(a - b for a, b in
                    zip(fib.divisor.twist_exps(), fib.divisor.prime().twist_exps()))
    ndim = num.cell(src).dim(q - 1) if num.admissible(src) else 0
    in_den = all(s >= g for s, g in zip(src, den_gap))
    kdim = 0 if in_den else ndim
    # Lem1(3): H^{q-1}(grB)_beta must match the D'-module cell, the hit must
    # match the D-submodule part, and the cokernel must match K.
    ok = (hdim == ndim) and (hit == (ndim if in_den else 0)) and (coker == kdim)
    if fib.phi_scalar.get(q - 1, 0) == 0 or not fib.present.get(q - 1, False):
        # no Frobenius at q-1: table only meaningful when H vanishes
        ok = (hdim == 0)
        kdim = 0
        coker = hdim
    return ok, coker, kdim


def _interior_cell_check(fib: GradedFiberPiece, alpha):
    """p not dividing m, interior: H^q(Fib)_alpha maps bijectively onto
    B^q of the T^m-graded piece via the x-part."""
    chart = fib.chart
    q = fib.q
    pf = gf(chart.field.p, 1)
    chain = [alpha]
    reps, layout, Bsub = fib.orbit_H_reps(chain, q)
    bcell = fib.B.cell(alpha)
    target = bcell.coh(q)["B"]
    s = chart.field.s
    adim = fib.a_dim(alpha, q)
    if len(reps) != target.dim * s:
        return False, {"dimH_fib": len(reps), "dimB": target.dim}
    cols = []
    F = chart.field
    for rep in reps:
        xpart = _unpack_block(rep, layout, ("A", 0), adim, F)
        if xpart is None:
            return False, {"note": "x-part extraction failed"}
        if not target.contains(xpart):
            return False, {"note": "x-part of a fiber cocycle is not a boundary"}
        cols.append(target.coords_in_basis(xpart))
    # injectivity over F_p
    flat = []
    for col in cols:
        v = []
        for c in col:
            v.extend(F.coords(c))
        flat.append(v)
    M = FpMatrix.from_rows(pf, _transpose(flat)) if flat else FpMatrix(pf, 0, 0)
    if flat:
        rank, _, _ = rank_kernel_image(M)
        if rank != len(reps):
            return False, {"note": "x-part map not injective", "rank": rank}
    return True, {"dimH_fib": len(reps), "dimB": target.dim}


def _unpack_block(vec, layout, key, dim, F):
    s = F.s
    pos = 0
    for kind, t, d in layout:
        if (kind, t) == key:
            coords = vec[pos: pos + d * s]
            out = []
            for i in range(d):
                out.append(F.from_coords(coords[i * s: (i + 1) * s]))
            return out
        pos += d * s
    return [0] * dim if dim == 0 else None


def _transpose(rows):
    if not rows:
        return []
    return [[rows[i][j] for i in range(len(rows))] for j in range(len(rows[0]))]


def check_gr_structure(chart: Chart, divisor: Divisor, eis: EisensteinData,
                       q: int, r: int, m: int, kernel_bound=None) -> CheckOutcome:
    """The full case table for H^q(gr^m) of the syntomic fiber:

    below/above the activity band  -> H^q = 0 on every safe orbit;
    interior, p not dividing m     -> H^q = B^q(T^m-graded), cell by cell;
    interior, p | m                -> H^q -> B^q onto with kernel K^q,
                                      K matched cell-wise through the
                                      Cartier square;
    endpoint                       -> H^q assembles from K^q and the
                                      windowed kernel of 1 - a_0^{p(r-q)} C^{-1}
                                      (its Z^q/Z^{q-1} split checked), the
                                      Eisenstein scalar checked against the
                                      exact-integer oracle.
    """
    out = CheckOutcome("gr_structure",
                       {"p": chart.p, "d": chart.d, "q": q, "r": r, "m": m,
                        "mult": divisor.vector(), "e": eis.e,
                        "a0": eis.coeffs[0], "N": chart.window})
    fib = GradedFiberPiece(chart, divisor, eis, q, r, m)
    case = gr_case(eis, chart.p, q, r, m)
    out.params["case"] = case
    p = chart.p
    s = chart.field.s
    F = chart.field

    # structural facts about levels and scalars per case
    if case in ("interior", "endpoint"):
        if fib.levels[q] != m or not fib.present[q]:
            return out.fail(note="degree-q level table broken: %r" % (fib.levels,))
        if m % p == 0:
            istar = m // p - fib.levels[q - 1] + eis.e * (r - q + 1)
            want = eis_digit(chart, eis, r - q + 1, istar)
            if fib.present.get(q - 1) and fib.phi_scalar[q - 1] != want:
                return out.fail(note="Eisenstein scalar mismatch at degree q-1")
    if case == "endpoint":
        expected_scalar = F.pow(eis.a0, p * (r - q)) if r > q else F.one
        if fib.phi_scalar[q] != expected_scalar:
            return out.fail(note="endpoint scalar != a_0^{p(r-q)}",
                            witness={"kind": "scalar", "got": fib.phi_scalar[q],
                                     "want": expected_scalar})
        if chart.s == 1:
            ints = list(eis.coeffs)
            if not verify_eisenstein_identity(p, eis.e, ints):
                return out.fail(note="exact-integer Eisenstein oracle failed")
    if case == "interior" and m % p:
        if fib.present.get(q - 1, False):
            return out.fail(note="A^{q-1} graded piece should vanish (p∤m interior)")
        if any(fib.phi_scalar.values()):
            return out.fail(note="graded Frobenius should vanish at p∤m interior")

    # orbit-wise safe H^q and the case assertions
    total_Hq = 0
    per_case_fail = None
    cache = {}
    checked = 0
    for seed in fib.window_seeds():
        chain = fib.orbit_chain(seed)
        sig = fib.orbit_signature(chain)
        if sig not in cache:
            fib.assert_d_squared_zero(chain)
            hq = fib.orbit_H_dims(chain)[1]
            cellinfo = None
            if case == "interior" and m % p:
                okc, cellinfo = _interior_cell_check(fib, seed)
                if not okc:
                    cellinfo["alpha"] = list(seed)
            cache[sig] = (hq, cellinfo)
        hq, cellinfo = cache[sig]
        checked += len(chain)
        total_Hq += hq
        if cellinfo is not None and per_case_fail is None and "note" in cellinfo:
            per_case_fail = cellinfo
    out.cells_checked = checked
    out.record_dim("H^q_fib_dim_fp", total_Hq)

    if case == "above":
        if total_Hq != 0:
            return out.fail(note="H^q(gr^m) should vanish in case %r" % case,
                            witness={"kind": "gr-vanishing", "dim": total_Hq})
        return out

    if case == "below":
        # The stated vanishing needs the obstruction correction: the degree
        # q-1 graded Frobenius reaches only the deeper-twisted part, leaving
        # exactly the D'/D quotient cells when p | m; with that correction
        # H^q(gr^m) is the obstruction quotient (zero iff the quotient is).
        if m % p or not fib.present.get(q - 1, False):
            if total_Hq != 0:
                return out.fail(note="H^q(gr^m) should vanish (below, p∤m)",
                                witness={"kind": "gr-vanishing", "dim": total_Hq})
            return out
        okc, total_coker, total_K, bad = _coker_table(fib)
        out.record_dim("coker_dim", total_coker)
        out.record_dim("K_dim", total_K)
        if not okc:
            return out.fail(witness={"kind": "K-mismatch", "beta": list(bad)},
                            note="below-case cokernel does not match K^q")
        if total_Hq != s * total_coker:
            return out.fail(note="below-case H^q(gr^m) != obstruction quotient",
                            witness={"kind": "below-assembly", "H": total_Hq,
                                     "coker": total_coker})
        if total_coker:
            out.note("paper's displayed vanishing holds only after the "
                     "obstruction correction: H^q(gr^%d) = K-type of dim %d"
                     % (m, total_coker))
        return out

    if case == "interior" and m % p:
        if per_case_fail:
            return out.fail(witness={"kind": "interior-cell", **per_case_fail})
        return out

    # p | m: coker table with the K identification
    okc, total_coker, total_K, bad = _coker_table(fib)
    out.record_dim("coker_dim", total_coker)
    out.record_dim("K_dim", total_K)
    if not okc:
        return out.fail(witness={"kind": "K-mismatch", "beta": list(bad)},
                        note="coker of the graded Frobenius does not match K^q")
    # kernel ingredient at degree q
    op = _phi_operator(fib)
    ker = SemilinearKernel(op, q)
    # subtract boundaries of grA (nonzero only when levels match at q-1,q)
    b_gra = 0
    if fib.present.get(q - 1) and fib.levels[q - 1] == fib.levels[q]:
        for alpha in fib.B.multidegrees():
            if fib.keep_a(alpha, q - 1):
                b_gra += fib.A[q - 1].cell(alpha).coh(q)["B"].dim
    ker_fp = ker.dim_fp
    out.record_dim("kernel_dim_fp", ker_fp)
    out.record_dim("grA_boundary_dim", b_gra)
    expect = s * total_coker + ker_fp - s * b_gra
    if case == "interior":
        # kernel ingredient must be exactly the boundaries B^q
        btot = 0
        for alpha in fib.B.multidegrees():
            btot += fib.B.cell(alpha).coh(q)["B"].dim
        if ker_fp != s * btot:
            return out.fail(note="interior kernel ingredient is not B^q",
                            witness={"kind": "interior-kernel", "got": ker_fp,
                                     "want": s * btot})
    if case == "endpoint":
        # the kernel splits as the two Y-level twisted Artin-Schreier kernels
        split_ok, info = _endpoint_split(chart, divisor, q, fib.phi_scalar[q],
                                         kernel_bound)
        out.record_dim("endpoint_split", info)
        if not split_ok:
            return out.fail(note="endpoint kernel did not split along dlog T_0",
                            witness={"kind": "endpoint-split", **info})
    if total_Hq != expect:
        return out.fail(note="H^q(gr^m) does not assemble from K and the kernel",
                        witness={"kind": "assembly", "H": total_Hq,
                                 "coker": total_coker, "ker": ker_fp,
                                 "grA_B": b_gra})
    return out


def _phi_operator(fib: GradedFiberPiece):
    """The degree-q graded Frobenius as a GradedMap on the level-m family."""
    from .cohomology import GradedMap, label_matrix
    B = fib.B
    scalar = fib.phi_scalar.get(fib.q, 0)
    chart = fib.chart

    def amap(alpha):
        return fib.sigma(alpha)

    def mat(alpha, qq):
        beta = amap(alpha)
        if beta is None:
            return FpMatrix(chart.field, 0, len(B.basis(alpha, qq)))
        return label_matrix(B, B, alpha, beta, qq, scalar)

    return GradedMap(B, B, amap, mat, frob_twist=1, label="graded-phi",
                     alpha_scale=chart.p, alpha_shift=fib.sigma_shift)


def _endpoint_split(chart, divisor, q, scalar, bound=None):
    """Windowed dim of ker(1 - a C^{-1}) on Z^q(O_Y (x) omega_{Z|D}) equals
    the sum of the Y-level kernels at degrees q and q-1 (the dlog T_0
    label split of the twisted Artin-Schreier sequence)."""
    from .cohomology import cartier_map
    bound = bound if bound is not None else min(chart.window, 2 * chart.p)
    big = ComplexFamily(chart, divisor, wedge_t0=True, reduce_t0=True)
    Y = y_complex(chart, divisor)
    op_big = cartier_map(big, big, scalar=scalar)
    op_y = cartier_map(Y, Y, scalar=scalar)
    k_big = SemilinearKernel(op_big, q, bound=bound).dim_fp
    k_q = SemilinearKernel(op_y, q, bound=bound).dim_fp
    k_q1 = SemilinearKernel(op_y, q - 1, bound=bound).dim_fp
    info = {"big": k_big, "upper": k_q, "lower": k_q1, "bound": bound}
    return k_big == k_q + k_q1, info


# -- vanishing above the band at the filtered (non-graded) level -------------

def check_gr_vanishing_above(chart: Chart, divisor: Divisor, eis: EisensteinData,
                             q: int, r: int) -> CheckOutcome:
    """Nilpotence of the graded Frobenius above the band: on every level
    m with m(p-1) > e*p*(r-q+1) ... actually on each graded level above
    pe/(p-1) (r = q shape), 1 - phi is bijective because phi strictly
    raises the filtration; verified by the scalar table and by explicit
    invertibility on the graded fiber (H^{q-1} = H^q = 0)."""
    out = CheckOutcome("gr_vanishing_above",
                       {"p": chart.p, "d": chart.d, "q": q, "r": r,
                        "mult": divisor.vector(), "e": eis.e, "N": chart.window})
    p = chart.p
    lo = eis.e * p * (r - q + 1)
    mmax = eis.e * p * (r + 1)
    found = 0
    for m in range(0, mmax + 1):
        if m * (p - 1) < lo:
            continue
        found += 1
        fib = GradedFiberPiece(chart, divisor, eis, q, r, m)
        if fib.phi_scalar[q] not in (0,) and m > 0:
            return out.fail(note="graded Frobenius should vanish above the band",
                            witness={"kind": "phi-above", "m": m})
        total = 0
        for seed in fib.window_seeds():
            chain = fib.orbit_chain(seed)
            total += fib.orbit_H_dims(chain)[1]
        if total:
            return out.fail(note="H^q(gr^m) nonzero above the band at m=%d" % m,
                            witness={"kind": "above-band", "m": m, "dim": total})
    out.record_dim("levels_checked", found)
    return out


# -- PD envelope sanity -------------------------------------------------------

def check_pd_envelope(chart: Chart, divisor: Divisor, pd_cap=None,
                      src_window=None) -> CheckOutcome:
    """(i) multiplication by f = prod T_lambda^{m_lambda} - T_oo is
    injective on the truncated envelope (matrix kernel zero, computed into
    an enlarged target window so truncation cannot fake a kernel), over
    Z/p and over Z/p^2; (ii) the two-term p-multiplication sequence over
    Z/p^2 is exact on the window module and its cokernel is the mod-p
    module."""
    out = CheckOutcome("pd_envelope",
                       {"p": chart.p, "d": chart.d, "mult": divisor.vector(),
                        "N": chart.window})
    p = chart.p
    cap = pd_cap if pd_cap is not None else p - 1
    src_w = src_window if src_window is not None else min(chart.window, p + 1)
    tw = divisor.twist_exps()
    deg_f = max(sum(tw[1: chart.d + 1]), 1)
    tgt_w = src_w + deg_f
    for k in (1, 2):
        ring = zmod(p, k)
        pdr = PDRing(chart, k=k, window=tgt_w)
        beta_tw = tuple(tw[1: chart.d + 1])
        f = (PDElement.t_monomial(ring, chart.d, tgt_w, beta_tw)
             - PDElement.gen(ring, chart.d, tgt_w, 1))
        src_basis = _pd_window_basis(chart.d, src_w, cap)
        cols = {}
        images = []
        for key in src_basis:
            x = PDElement(ring, chart.d, tgt_w, {key: 1})
            y = f * x
            images.append(y)
            for kk in y.terms:
                cols.setdefault(kk, len(cols))
        # F_p-linearized matrix (basis e, pe, ... for Z/p^k)
        pf = gf(p, 1)
        rows = [[0] * (len(src_basis) * k) for _ in range(len(cols) * k)]
        for j, y in enumerate(images):
            for kk, c in y.terms.items():
                i = cols[kk]
                for dig in range(k):
                    cc = c * (p ** dig) % (p ** k)
                    digits = []
                    t = cc
                    for _ in range(k):
                        digits.append(t % p)
                        t //= p
                    for rr, dv in enumerate(digits):
                        if dv:
                            rows[i * k + rr][j * k + dig] = dv
        M = FpMatrix.from_rows(pf, rows) if rows else FpMatrix(pf, 0, len(src_basis) * k)
        _, kern, _ = rank_kernel_image(M)
        if kern:
            return out.fail(note="multiplication by f has a kernel over Z/p^%d" % k,
                            witness={"kind": "pd-zero-divisor", "k": k})
    # (ii) the p-sequence on the window module over Z/p^2
    nbasis = len(_pd_window_basis(chart.d, src_w, cap))
    pf = gf(p, 1)
    n2 = nbasis * 2
    rows = [[0] * n2 for _ in range(n2)]
    for i in range(nbasis):
        # multiplication by p sends e_i -> p e_i, p e_i -> 0
        rows[i * 2 + 1][i * 2] = 1
    M = FpMatrix.from_rows(pf, rows)
    rank, kern, _ = rank_kernel_image(M)
    ker_sp = Subspace(pf, n2, kern)
    im_cols = [[M.data[r][c] for r in range(n2)] for c in range(n2)]
    im_sp = Subspace(pf, n2, im_cols)
    if not (ker_sp.equals(im_sp) and rank == nbasis):
        return out.fail(note="p-sequence exactness failed on the window module")
    out.record_dim("module_rank", nbasis)
    out.record_dim("coker_dim", n2 - rank)
    if n2 - rank != nbasis:
        return out.fail(note="coker(x p) is not the mod-p module")
    return out


def _pd_window_basis(d, window, cap):
    from .cells import iter_multidegrees
    out = []
    for beta in iter_multidegrees(d, window):
        for i in range(cap + 1):
            for j in range(cap + 1 - i):
                out.append((tuple(beta), i, j))
    return out
