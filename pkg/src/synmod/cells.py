"""Per-multidegree cells of twisted log de Rham complexes.

Because the twisted differential preserves the coefficient multidegree
alpha, every complex in the workbench splits into finite cells: the cell
at alpha has basis {dlog T_I} over the available wedge coordinates, and
the differential is exterior multiplication by the weight covector
w_j = alpha_j + (twist weight)_j mod p.  Cells with equal weight
signatures are isomorphic, so their cohomology is computed once and
cached; window scans then only pay for signature lookups.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

from .chart import Chart, Divisor
from .linalg import FpMatrix, Subspace, rank_kernel_image
from .fields import GF


@lru_cache(maxsize=None)
def _compositions(total, k):
    """All k-tuples of non-negative ints summing to total, lexicographic."""
    if k == 0:
        return ((),) if total == 0 else ()
    if k == 1:
        return ((total,),)
    out = []
    for first in range(total + 1):
        for rest in _compositions(total - first, k - 1):
            out.append((first,) + rest)
    return tuple(out)


def iter_multidegrees(nfree, bound):
    for total in range(bound + 1):
        for c in _compositions(total, nfree):
            yield c


class CellCohomology:
    """Exact cohomology data of one Koszul-type cell.

    basis_sizes[q] = C(n, q); matrices map coordinates at degree q to
    degree q+1.  All bases echelonized with lexicographic pivoting.
    """

    def __init__(self, field: GF, n: int, weights):
        self.field = field
        self.n = n
        self.weights = tuple(weights)
        self.bases = [tuple(combinations(range(n), q)) for q in range(n + 1)]
        self.index = [
            {I: i for i, I in enumerate(b)} for b in self.bases
        ]
        self.d_mats = [self._dmat(q) for q in range(n + 1)]
        self._coh = {}

    def basis(self, q):
        if 0 <= q <= self.n:
            return self.bases[q]
        return ()

    def dim(self, q):
        return len(self.basis(q))

    def _dmat(self, q):
        F = self.field
        src = self.basis(q)
        dst = self.basis(q + 1)
        if not src or not dst:
            return FpMatrix(F, len(dst), len(src))
        idx = self.index[q + 1]
        m = FpMatrix(F, len(dst), len(src))
        for col, I in enumerate(src):
            for j in range(self.n):
                w = self.weights[j]
                if not w or j in I:
                    continue
                pos = sum(1 for i in I if i < j)
                K = tuple(sorted(I + (j,)))
                v = w if pos % 2 == 0 else F.neg(w)
                m.data[idx[K]][col] = F.add(m.data[idx[K]][col], v)
        return m

    def d_matrix(self, q):
        if 0 <= q <= self.n:
            return self.d_mats[q]
        return FpMatrix(self.field, self.dim(q + 1), self.dim(q))

    def apply_d(self, q, vec):
        return self.d_matrix(q).mul_vec(vec)

    def _compute(self, q):
        F = self.field
        nq = self.dim(q)
        if nq == 0:
            z = Subspace(F, 0)
            return {"Z": z, "B": z, "H": z, "dimZ": 0, "dimB": 0, "dimH": 0,
                    "H_reps": []}
        dq = self.d_matrix(q)
        _, kern, _ = rank_kernel_image(dq)
        Z = Subspace(F, nq, kern)
        if 0 < q <= self.n and self.dim(q - 1):
            dprev = self.d_matrix(q - 1)
            cols = []
            for c in range(dprev.cols):
                cols.append([dprev.data[r][c] for r in range(dprev.rows)])
            B = Subspace(F, nq, cols)
        else:
            B = Subspace(F, nq)
        reps = []
        for row in Z.rows:
            r = B.reduce(row)
            if any(r):
                reps.append(r)
        Hsp = Subspace(F, nq, reps)
        assert Z.dim - B.dim == Hsp.dim, "quotient dimension bookkeeping failed"
        return {"Z": Z, "B": B, "H": Hsp, "dimZ": Z.dim, "dimB": B.dim,
                "dimH": Hsp.dim, "H_reps": Hsp.rows}

    def coh(self, q):
        if q not in self._coh:
            self._coh[q] = self._compute(q)
        return self._coh[q]

    def Z(self, q):
        return self.coh(q)["Z"]

    def B(self, q):
        return self.coh(q)["B"]

    def dimH(self, q):
        return self.coh(q)["dimH"]

    def class_coords(self, q, vec):
        """Coordinates of [vec] in the echelon H-basis; None if vec not closed."""
        c = self.coh(q)
        if not c["Z"].contains(vec):
            return None
        red = c["B"].reduce(vec)
        return c["H"].coords_in_basis(red)


@lru_cache(maxsize=None)
def _cell_cache(field: GF, weights):
    return CellCohomology(field, len(weights), weights)


class ComplexFamily:
    """A multidegree-graded family of twisted complexes over a chart.

    Parameters pick the home of the complex:
      divisor        -- twist O(-D); contributes to the weights
      wedge_t0       -- dlog T_0 available (ambient / graded) or not (Y-level)
      reduce_t0      -- coefficients mod T_0 (Y-level, T^m-graded slices)
      t0_weight      -- extra T_0 weight (the level m of a T^m-graded slice)
      zero_coeff_vars-- coordinates with coefficient exponent forced to 0
                        (e.g. T_mu for the residue graded pieces)
      wedge_drop     -- log coordinates excluded from the wedge set
    T_oo always participates: its wedge slot exists where alpha_oo >= 1.
    """

    def __init__(self, chart: Chart, divisor: Divisor = None, *, wedge_t0=True,
                 reduce_t0=False, t0_weight=0, zero_coeff_vars=(), wedge_drop=(),
                 label=""):
        self.chart = chart
        self.divisor = divisor if divisor is not None else Divisor(chart)
        self.wedge_t0 = wedge_t0
        self.reduce_t0 = reduce_t0
        self.t0_weight = t0_weight
        self.zero_coeff_vars = tuple(sorted(zero_coeff_vars))
        self.wedge_drop = tuple(sorted(wedge_drop))
        self.label = label
        self.field = chart.field
        base = []
        for j in chart.log_vars:
            if j == 0 and not wedge_t0:
                continue
            if j in self.wedge_drop:
                continue
            base.append(j)
        self._wedge_base = tuple(base)
        offs = [0] * chart.nvars
        for lam, m in self.divisor.mult.items():
            offs[lam] = m
        offs[0] += t0_weight
        self.offsets = tuple(offs)
        zero = set(self.zero_coeff_vars)
        if reduce_t0:
            zero.add(0)
        self._zero = tuple(sorted(zero))
        self.free_vars = tuple(v for v in range(chart.nvars) if v not in zero)

    # -- multidegree layout -------------------------------------------
    def multidegrees(self, bound=None):
        """All admissible coefficient multidegrees with |alpha| <= bound."""
        bound = self.chart.window if bound is None else bound
        nfree = len(self.free_vars)
        for comp in iter_multidegrees(nfree, bound):
            alpha = [0] * self.chart.nvars
            for v, c in zip(self.free_vars, comp):
                alpha[v] = c
            yield tuple(alpha)

    def admissible(self, alpha):
        if sum(alpha) > self.chart.window:
            return False
        return all(alpha[v] == 0 for v in self._zero)

    def wedge_set(self, alpha):
        if alpha[self.chart.inf] >= 1:
            return self._wedge_base + (self.chart.inf,)
        return self._wedge_base

    def weights(self, alpha):
        p = self.chart.p
        return tuple((alpha[j] + self.offsets[j]) % p for j in self.wedge_set(alpha))

    def cell(self, alpha) -> CellCohomology:
        return _cell_cache(self.field, self.weights(alpha))

    def basis(self, alpha, q):
        """Cell basis at (alpha, q) as wedge index tuples (chart labels)."""
        S = self.wedge_set(alpha)
        return tuple(tuple(S[i] for i in I) for I in self.cell(alpha).basis(q))

    def signature(self, alpha):
        return self.weights(alpha)

    def form_to_vec(self, omega, alpha, q):
        """Coordinates of the alpha-component of a LogForm in the cell basis."""
        S = self.wedge_set(alpha)
        pos = {tuple(I): i for i, I in enumerate(self.basis(alpha, q))}
        vec = [0] * len(pos)
        for (a, I), c in omega.terms.items():
            if a != alpha or len(I) != q:
                continue
            if I not in pos:
                raise ValueError("term %r not supported on this cell" % ((a, I),))
            vec[pos[I]] = self.field.add(vec[pos[I]], c)
        return vec

    def vec_to_form(self, vec, alpha, q, ring=None, mode=None):
        from .forms import LogForm
        mode = mode or ("special_fiber" if self.reduce_t0 and self.wedge_t0 else
                        "y" if self.reduce_t0 else
                        "full" if self.wedge_t0 else "relative")
        terms = {}
        for c, I in zip(vec, self.basis(alpha, q)):
            if c:
                terms[(tuple(alpha), I)] = c
        return LogForm(self.chart, ring or self.field, mode, terms)

    def key(self):
        return (self.chart.key(), self.divisor.vector(), self.wedge_t0,
                self.reduce_t0, self.t0_weight, self.zero_coeff_vars,
                self.wedge_drop)

    def __repr__(self):
        return "ComplexFamily(%s%r, t0w=%d, wedge_t0=%s, reduce_t0=%s)" % (
            self.label + " " if self.label else "", self.divisor,
            self.t0_weight, self.wedge_t0, self.reduce_t0)
