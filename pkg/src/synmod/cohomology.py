"""Cohomology of graded complexes: induced maps, connecting maps, and
kernels of semilinear operators 1 - a*C^{-1}.

Everything is exact linear algebra on the per-multidegree cells from
cells.py.  Operators that move multidegrees (Frobenius-built maps send
alpha to p*alpha + shift) are handled by degree stratification: within a
finite window such an operator couples cells along finitely many forward
orbits, so kernels are computed chain by chain instead of pretending the
operator were linear over F_{p^s}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cells import ComplexFamily
from .linalg import FpMatrix, Subspace, rank_kernel_image, solve
from .poly import exp_add, exp_scale


@dataclass
class CohomologyBasis:
    q: int
    alpha: tuple
    dim_Z: int
    dim_B: int
    dim_H: int
    representatives: list = field(default_factory=list)


def graded_cohomology(family: ComplexFamily, q, alpha) -> CohomologyBasis:
    cell = family.cell(alpha)
    c = cell.coh(q)
    reps = [family.vec_to_form(r, alpha, q) for r in c["H_reps"]]
    return CohomologyBasis(q, tuple(alpha), c["dimZ"], c["dimB"], c["dimH"], reps)


def naive_cohomology_dim(family: ComplexFamily, q, alpha):
    """Independent oracle: dim H via naive dense elimination ranks only."""
    from .linalg import gauss_rank_naive
    cell = family.cell(alpha)
    dq = cell.d_matrix(q)
    dprev = cell.d_matrix(q - 1)
    rk_q = gauss_rank_naive(family.field, dq.data) if dq.rows and dq.cols else 0
    rk_prev = gauss_rank_naive(family.field, dprev.data) if dprev.rows and dprev.cols else 0
    return cell.dim(q) - rk_q - rk_prev


class GradedMap:
    """A family of cell maps source -> target.

    alpha_map(alpha) gives the target multidegree (None kills the cell);
    matrix(alpha, q) the cell matrix in the wedge-label bases; frob_twist
    counts how many coordinatewise Frobenius twists the map applies before
    the matrix (semilinear maps have frob_twist = 1).
    """

    def __init__(self, source: ComplexFamily, target: ComplexFamily,
                 alpha_map, matrix, frob_twist=0, label="", alpha_scale=None,
                 alpha_shift=None):
        self.source = source
        self.target = target
        self.alpha_map = alpha_map
        self._matrix = matrix
        self.frob_twist = frob_twist
        self.label = label
        # affine multidegree action alpha -> alpha_scale * alpha + alpha_shift,
        # when the map has one (used by the stratified kernel solver)
        self.alpha_scale = alpha_scale
        self.alpha_shift = alpha_shift

    def matrix(self, alpha, q) -> FpMatrix:
        return self._matrix(alpha, q)

    def apply(self, alpha, q, vec):
        F = self.source.field
        v = vec
        for _ in range(self.frob_twist):
            v = [F.frob(x) for x in v]
        return self.matrix(alpha, q).mul_vec(v)

    def is_chain_map_at(self, alpha, q):
        """d_target o f == f o d_source on the (alpha, q) cell."""
        beta = self.alpha_map(alpha)
        src = self.source.cell(alpha)
        if beta is None:
            return all(v == 0 for row in self.matrix(alpha, q).data for v in row)
        tgt = self.target.cell(beta)
        F = self.source.field
        n = src.dim(q)
        for i in range(n):
            vec = [0] * n
            vec[i] = 1
            left = tgt.apply_d(q, self.apply(alpha, q, vec))
            right = self.apply(alpha, q + 1, src.apply_d(q, vec))
            if left != right:
                return False
        return True


def label_matrix(source: ComplexFamily, target: ComplexFamily, alpha, beta, q,
                 scalar=1):
    """Matrix of the label-preserving map dlog T_I -> scalar * dlog T_I."""
    F = source.field
    src = source.basis(alpha, q)
    dst = {I: i for i, I in enumerate(target.basis(beta, q))}
    m = FpMatrix(F, len(dst), len(src))
    for col, I in enumerate(src):
        if I in dst:
            m.data[dst[I]][col] = scalar
        elif scalar:
            raise ValueError("wedge label %r missing in target cell" % (I,))
    return m


def twist_inclusion(source: ComplexFamily, target: ComplexFamily) -> GradedMap:
    """Multiplication by the twist gap monomial: the inclusion of the more
    deeply twisted complex into the less twisted one (coefficient shift)."""
    delta = tuple(s - t for s, t in zip(source.divisor.twist_exps(),
                                        target.divisor.twist_exps()))
    if any(x < 0 for x in delta):
        raise ValueError("source divisor must dominate target divisor")
    extra = source.t0_weight - target.t0_weight
    if extra < 0:
        raise ValueError("source T_0 level must dominate target level")
    delta = (delta[0] + extra,) + delta[1:]

    def amap(alpha):
        beta = exp_add(alpha, delta)
        if sum(beta) > target.chart.window or not target.admissible(beta):
            return None
        return beta

    def mat(alpha, q):
        beta = amap(alpha)
        if beta is None:
            return FpMatrix(source.field, 0, len(source.basis(alpha, q)))
        return label_matrix(source, target, alpha, beta, q)

    return GradedMap(source, target, amap, mat, label="twist-inclusion",
                     alpha_scale=1, alpha_shift=delta)


def cartier_map(source: ComplexFamily, target: ComplexFamily, scalar=1) -> GradedMap:
    """a dlog T_I -> scalar * a^(p) dlog T_I as a map of twisted coefficient
    complexes: alpha -> p*alpha + (p*m_src - m_tgt) + (p*l_src - l_tgt) e_0."""
    chart = source.chart
    p = chart.p
    shift = [p * s - t for s, t in zip(source.divisor.twist_exps(),
                                       target.divisor.twist_exps())]
    shift[0] += p * source.t0_weight - target.t0_weight
    shift = tuple(shift)
    if any(x < 0 for x in shift):
        raise ValueError("Cartier shift has a negative component: %r" % (shift,))

    def amap(alpha):
        beta = exp_add(exp_scale(alpha, p), shift)
        if sum(beta) > chart.window or not target.admissible(beta):
            return None
        return beta

    def mat(alpha, q):
        beta = amap(alpha)
        if beta is None:
            return FpMatrix(source.field, 0, len(source.basis(alpha, q)))
        return label_matrix(source, target, alpha, beta, q, scalar)

    return GradedMap(source, target, amap, mat, frob_twist=1, label="cartier",
                     alpha_scale=p, alpha_shift=shift)


def induced_on_H(f: GradedMap, q, alpha, check_lift_independence=True):
    """Matrix of the induced map H^q(source)_alpha -> H^q(target)_f(alpha).

    Asserts f is a chain map on the cells involved and (optionally) that
    the answer is independent of the representative choice.
    """
    if not (f.is_chain_map_at(alpha, q) and f.is_chain_map_at(alpha, q - 1)):
        raise ValueError("not a chain map at alpha=%r" % (alpha,))
    src = f.source.cell(alpha)
    beta = f.alpha_map(alpha)
    reps = src.coh(q)["H_reps"]
    if beta is None:
        return FpMatrix(f.source.field, 0, len(reps)), None
    tgt = f.target.cell(beta)
    cols = []
    for r in reps:
        img = f.apply(alpha, q, r)
        cc = tgt.class_coords(q, img)
        if cc is None:
            raise ValueError("image of a cocycle is not closed")
        cols.append(cc)
        if check_lift_independence and src.coh(q)["B"].rows:
            shifted = [f.source.field.add(a, b)
                       for a, b in zip(r, src.coh(q)["B"].rows[0])]
            cc2 = tgt.class_coords(q, f.apply(alpha, q, shifted))
            assert cc2 == cc, "induced map depends on the representative"
    m = FpMatrix(f.source.field, tgt.dimH(q), len(reps))
    for j, col in enumerate(cols):
        for i, v in enumerate(col):
            m.data[i][j] = v
    return m, beta


class ShortExactSequence:
    """A short exact sequence of graded complexes with label-level maps.

    inj and proj are GradedMaps sub -> mid -> quot preserving multidegree
    (alpha_map the identity).  Exactness is asserted cell by cell before
    any connecting map is trusted.
    """

    def __init__(self, sub: ComplexFamily, mid: ComplexFamily, quot: ComplexFamily,
                 inj: GradedMap, proj: GradedMap, degree_shift=0):
        self.sub = sub
        self.mid = mid
        self.quot = quot
        self.inj = inj
        self.proj = proj
        self.degree_shift = degree_shift  # inj raises degree by this much

    def assert_exact_at(self, alpha, q):
        """Exactness of 0 -> sub^(q-shift) -> mid^q -> quot^q -> 0."""
        F = self.mid.field
        qs = q - self.degree_shift
        inj_m = self.inj.matrix(alpha, qs)
        proj_m = self.proj.matrix(alpha, q)
        rk_i, kern_i, im_i = rank_kernel_image(inj_m)
        assert not kern_i, "inj has a kernel at %r" % (alpha,)
        rk_p, kern_p, _ = rank_kernel_image(proj_m)
        assert rk_p == proj_m.rows, "proj not surjective at %r" % (alpha,)
        comp = proj_m.matmul(inj_m)
        assert comp.is_zero(), "proj o inj != 0"
        assert rk_i + rk_p == proj_m.cols, "middle exactness fails at %r" % (alpha,)

    def connecting_map(self, q, alpha, second_lift=True):
        """Snake map H^q(quot)_alpha -> H^(q+shift... the sub-degree) via
        lift, d, pull back.  Returns (matrix, sub_degree)."""
        F = self.mid.field
        self.assert_exact_at(alpha, q)
        self.assert_exact_at(alpha, q + 1)
        qs = q - self.degree_shift
        quot_cell = self.quot.cell(alpha)
        mid_cell = self.mid.cell(alpha)
        sub_cell = self.sub.cell(alpha)
        reps = quot_cell.coh(q)["H_reps"]
        out_dim = sub_cell.dimH(qs + 1)
        m = FpMatrix(F, out_dim, len(reps))
        proj_m = self.proj.matrix(alpha, q)
        inj_next = self.inj.matrix(alpha, qs + 1)
        for j, z in enumerate(reps):
            cc = self._connect_one(alpha, q, z, proj_m, inj_next, mid_cell,
                                   sub_cell, qs)
            for i, v in enumerate(cc):
                m.data[i][j] = v
            if second_lift:
                # a different lift must give the same class
                x0 = solve(proj_m, z)
                kern = rank_kernel_image(proj_m)[1]
                if kern:
                    x1 = [F.add(a, b) for a, b in zip(x0, kern[0])]
                    cc2 = self._connect_vec(alpha, q, x1, inj_next, mid_cell,
                                            sub_cell, qs)
                    assert cc2 == cc, "connecting map depends on the lift"
        return m

    def _connect_one(self, alpha, q, z, proj_m, inj_next, mid_cell, sub_cell, qs):
        x = solve(proj_m, z)
        assert x is not None, "cocycle did not lift"
        return self._connect_vec(alpha, q, x, inj_next, mid_cell, sub_cell, qs)

    def _connect_vec(self, alpha, q, x, inj_next, mid_cell, sub_cell, qs):
        dx = mid_cell.apply_d(q, x)
        y = solve(inj_next, dx)
        assert y is not None, "d(lift) did not come from the subcomplex"
        cc = sub_cell.class_coords(qs + 1, y)
        assert cc is not None, "connecting value is not closed"
        return cc


# ---------------------------------------------------------------------------
# degree-stratified kernels of 1 - a * C^{-1}
# ---------------------------------------------------------------------------

class SemilinearKernel:
    """Windowed kernel of z |-> class(z - op(z)) on Z^q, op = a*C^{-1}-shape.

    The operator strictly raises |alpha| except on the fixed cell, so a
    window element lies in the kernel iff every cell condition
       class(omega_beta - op(omega_pre(beta))) == 0
    holds; seeds (cells with no admissible pre) need omega in B.  The
    basis is assembled by forward propagation of free B-parts.
    """

    def __init__(self, op: GradedMap, q, bound=None):
        self.op = op
        self.q = q
        fam = op.source
        self.family = fam
        self.bound = fam.chart.window if bound is None else bound
        self.cells = [a for a in fam.multidegrees(self.bound)]
        self.cell_set = set(self.cells)
        self._analyze()

    def next_alpha(self, alpha):
        return self.op.alpha_map(alpha)

    def pre_alpha(self, beta):
        scale, shift = self.op.alpha_scale, self.op.alpha_shift
        if scale is None:
            raise ValueError("operator lacks an affine multidegree action")
        alpha = []
        for b, t in zip(beta, shift):
            r = b - t
            if r < 0 or r % scale:
                return None
            alpha.append(r // scale)
        alpha = tuple(alpha)
        if not self.family.admissible(alpha):
            return None
        return alpha

    def is_fixed(self, alpha):
        return self.next_alpha(alpha) == alpha

    def _analyze(self):
        fam = self.family
        F = fam.field
        s = F.s
        self.fixed_cells = []
        self.edge_cells = []
        total = 0
        for alpha in self.cells:
            cell = fam.cell(alpha)
            nxt = self.next_alpha(alpha)
            if nxt == alpha:
                self.fixed_cells.append(alpha)
                total += self._fixed_dim(alpha)
                continue
            if nxt is None or nxt not in self.cell_set:
                self.edge_cells.append(alpha)
            total += s * cell.coh(self.q)["B"].dim
        self.dim_fp = total

    def _fixed_linearized(self, alpha):
        """F_p matrix of z -> reduce_B(z - op z) on Z at the fixed cell."""
        fam = self.family
        F = fam.field
        s = F.s
        cell = fam.cell(alpha)
        coh = cell.coh(self.q)
        Zb = coh["Z"].rows
        B = coh["B"]
        cols = []
        for zrow in Zb:
            for c in range(s):
                scalar = F.from_coords([1 if i == c else 0 for i in range(s)])
                z = [F.mul(scalar, v) for v in zrow]
                img = self.op.apply(alpha, self.q, z)
                diff = [F.sub(a, b) for a, b in zip(z, img)]
                red = B.reduce(diff)
                colfp = []
                for v in red:
                    colfp.extend(F.coords(v))
                cols.append(colfp)
        rows = len(cols[0]) if cols else 0
        m = FpMatrix(_prime_field(F), rows, len(cols))
        for j, col in enumerate(cols):
            for i, v in enumerate(col):
                m.data[i][j] = v
        return m, Zb

    def _fixed_dim(self, alpha):
        m, _ = self._fixed_linearized(alpha)
        if m.cols == 0:
            return 0
        _, kern, _ = rank_kernel_image(m)
        return len(kern)

    def fixed_solutions(self, alpha):
        """Explicit Z-cell vectors solving (1 - op)z in B at the fixed cell."""
        fam = self.family
        F = fam.field
        s = F.s
        m, Zb = self._fixed_linearized(alpha)
        if m.cols == 0:
            return []
        _, kern, _ = rank_kernel_image(m)
        out = []
        for k in kern:
            vec = [0] * (len(Zb[0]) if Zb else 0)
            for idx, coeff in enumerate(k):
                if not coeff:
                    continue
                zi, ci = divmod(idx, s)
                scalar = F.mul(coeff, F.from_coords([1 if i == ci else 0
                                                     for i in range(s)]))
                vec = [F.add(a, F.mul(scalar, b)) for a, b in zip(vec, Zb[zi])]
            out.append(vec)
        return out

    def contains(self, components):
        """components: dict alpha -> cell vector (degree q).  Exact check of
        every window condition."""
        fam = self.family
        F = fam.field
        for alpha in self.cells:
            cell = fam.cell(alpha)
            v = components.get(alpha, [0] * cell.dim(self.q))
            if not cell.coh(self.q)["Z"].contains(v):
                return False
            prev = self.pre_alpha(alpha)
            acc = list(v)
            if prev is not None and prev in self.cell_set:
                pv = components.get(prev, [0] * fam.cell(prev).dim(self.q))
                img = self.op.apply(prev, self.q, pv)
                acc = [F.sub(a, b) for a, b in zip(acc, img)]
            if not cell.coh(self.q)["B"].contains(acc):
                return False
        return True

    def basis_elements(self):
        """Explicit kernel basis as dicts alpha -> vector (small windows)."""
        fam = self.family
        F = fam.field
        s = F.s
        out = []
        for alpha in self.cells:
            if self.is_fixed(alpha):
                for z in self.fixed_solutions(alpha):
                    out.append(self._propagate(alpha, z))
                continue
            B = fam.cell(alpha).coh(self.q)["B"]
            for row in B.rows:
                for c in range(s):
                    scalar = F.from_coords([1 if i == c else 0 for i in range(s)])
                    out.append(self._propagate(alpha, [F.mul(scalar, v) for v in row]))
        return out

    def _propagate(self, alpha, vec):
        comp = {alpha: vec}
        cur, v = alpha, vec
        while True:
            nxt = self.next_alpha(cur)
            if nxt is None or nxt == cur or nxt not in self.cell_set:
                break
            v = self.op.apply(cur, self.q, v)
            comp[nxt] = v
            cur = nxt
        return comp


def _prime_field(F):
    from .fields import gf
    return gf(F.p, 1)
