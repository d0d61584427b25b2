"""Exact dense/sparse linear algebra over F_{p^s}.

Matrices are lists of rows; rows are lists of packed field elements
(ints).  Pivoting is lexicographic on column order so every basis the
workbench reports is reproducible.  rank-nullity is asserted after every
factorization.
"""

from __future__ import annotations

from .fields import GF


class FpMatrix:
    """A rows x cols matrix over a GF field, built from sparse triplets."""

    def __init__(self, field: GF, rows: int, cols: int, triplets=()):
        self.field = field
        self.rows = rows
        self.cols = cols
        self.data = [[0] * cols for _ in range(rows)]
        for (i, j, v) in triplets:
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError("triplet (%d,%d) out of range" % (i, j))
            self.data[i][j] = self.field.add(self.data[i][j], v % field.order)

    @classmethod
    def from_rows(cls, field, rowdata):
        rows = len(rowdata)
        cols = len(rowdata[0]) if rows else 0
        m = cls(field, rows, cols)
        m.data = [list(r) for r in rowdata]
        return m

    def triplets(self):
        for i, row in enumerate(self.data):
            for j, v in enumerate(row):
                if v:
                    yield (i, j, v)

    def transpose(self):
        out = FpMatrix(self.field, self.cols, self.rows)
        for i in range(self.rows):
            row = self.data[i]
            for j in range(self.cols):
                if row[j]:
                    out.data[j][i] = row[j]
        return out

    def mul_vec(self, vec):
        F = self.field
        out = [0] * self.rows
        for i, row in enumerate(self.data):
            acc = 0
            for j, v in enumerate(row):
                if v and vec[j]:
                    acc = F.add(acc, F.mul(v, vec[j]))
            out[i] = acc
        return out

    def matmul(self, other: "FpMatrix") -> "FpMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch %dx%d @ %dx%d"
                             % (self.rows, self.cols, other.rows, other.cols))
        F = self.field
        out = FpMatrix(F, self.rows, other.cols)
        for i in range(self.rows):
            arow = self.data[i]
            orow = out.data[i]
            for k, a in enumerate(arow):
                if a:
                    brow = other.data[k]
                    for j, b in enumerate(brow):
                        if b:
                            orow[j] = F.add(orow[j], F.mul(a, b))
        return out

    def is_zero(self):
        return all(v == 0 for row in self.data for v in row)

    def __repr__(self):
        return "FpMatrix(%r, %dx%d)" % (self.field, self.rows, self.cols)


def rref(field, rowdata):
    """Reduced row echelon form; returns (rows, pivot_cols).

    Pivot search scans columns left to right (lexicographic pivot order),
    rows top to bottom, so the result is deterministic.
    """
    F = field
    mat = [list(r) for r in rowdata]
    nrows = len(mat)
    ncols = len(mat[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, nrows):
            if mat[i][c]:
                pivot = i
                break
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = F.inv(mat[r][c])
        if inv != 1:
            mat[r] = [F.mul(inv, v) for v in mat[r]]
        for i in range(nrows):
            if i != r and mat[i][c]:
                f = mat[i][c]
                row_i, row_r = mat[i], mat[r]
                for j in range(c, ncols):
                    if row_r[j]:
                        row_i[j] = F.sub(row_i[j], F.mul(f, row_r[j]))
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return mat[:r], pivots


def rank_kernel_image(M: FpMatrix):
    """(rank, kernel_basis, image_basis): echelonized, deterministic.

    kernel vectors live in F^cols (right kernel), image vectors in F^rows
    (echelon basis of the column space).  Asserts rank-nullity.
    """
    F = M.field
    red, pivots = rref(F, M.data) if M.rows else ([], [])
    rank = len(pivots)
    # kernel basis from free columns
    kernel = []
    pivot_set = set(pivots)
    for c in range(M.cols):
        if c in pivot_set:
            continue
        vec = [0] * M.cols
        vec[c] = 1
        for r, pc in enumerate(pivots):
            if red[r][c]:
                vec[pc] = F.neg(red[r][c])
        kernel.append(vec)
    # image basis: echelonize the columns (rows of the transpose)
    timage, _ = rref(F, M.transpose().data) if M.cols else ([], [])
    image = timage
    assert rank + len(kernel) == M.cols, "rank-nullity violated"
    assert len(image) == rank, "column rank != row rank"
    return rank, kernel, image


class Subspace:
    """A subspace of F^n held as RREF rows; deterministic representative basis."""

    def __init__(self, field: GF, n: int, vectors=()):
        self.field = field
        self.n = n
        vecs = [list(v) for v in vectors if any(v)]
        self.rows, self.pivots = rref(field, vecs) if vecs else ([], [])

    @property
    def dim(self):
        return len(self.rows)

    def contains(self, vec):
        F = self.field
        v = list(vec)
        for row, pc in zip(self.rows, self.pivots):
            if v[pc]:
                f = v[pc]
                for j in range(self.n):
                    if row[j]:
                        v[j] = F.sub(v[j], F.mul(f, row[j]))
        return not any(v)

    def reduce(self, vec):
        """Canonical coset representative of vec modulo this subspace."""
        F = self.field
        v = list(vec)
        for row, pc in zip(self.rows, self.pivots):
            if v[pc]:
                f = v[pc]
                for j in range(self.n):
                    if row[j]:
                        v[j] = F.sub(v[j], F.mul(f, row[j]))
        return v

    def contains_space(self, other: "Subspace"):
        return all(self.contains(r) for r in other.rows)

    def sum(self, other: "Subspace"):
        return Subspace(self.field, self.n, self.rows + other.rows)

    def equals(self, other: "Subspace"):
        return self.dim == other.dim and self.contains_space(other)

    def coords_in_basis(self, vec):
        """Coordinates of vec in this RREF basis, or None if not a member."""
        F = self.field
        v = list(vec)
        coords = [0] * self.dim
        for i, (row, pc) in enumerate(zip(self.rows, self.pivots)):
            if v[pc]:
                f = v[pc]
                coords[i] = f
                for j in range(self.n):
                    if row[j]:
                        v[j] = F.sub(v[j], F.mul(f, row[j]))
        if any(v):
            return None
        return coords

    def __repr__(self):
        return "Subspace(dim=%d, n=%d)" % (self.dim, self.n)


def solve(M: FpMatrix, b):
    """One solution x of M x = b, or None.  Deterministic (free vars = 0)."""
    F = M.field
    aug = [list(row) + [bv] for row, bv in zip(M.data, b)]
    red, pivots = rref(F, aug) if M.rows else ([], [])
    x = [0] * M.cols
    for r, pc in enumerate(pivots):
        if pc == M.cols:
            return None  # inconsistent row 0...0 | 1
        x[pc] = red[r][-1]
    return x


def quotient_dim(field, n, numerator: Subspace, denominator: Subspace):
    """dim(numerator / (numerator intersect denominator))."""
    if not numerator.rows:
        return 0
    joined = denominator.sum(numerator)
    return joined.dim - denominator.dim


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Subspace intersection via kernel of the stacked coordinate map."""
    if a.dim == 0 or b.dim == 0:
        return Subspace(a.field, a.n)
    F = a.field
    # rows of a and b as generators; intersection = {x : x in span(a), x in span(b)}
    # Solve [A^T | -B^T] kernel.
    cols = a.dim + b.dim
    rows = a.n
    m = FpMatrix(F, rows, cols)
    for i, r in enumerate(a.rows):
        for j in range(a.n):
            if r[j]:
                m.data[j][i] = r[j]
    for i, r in enumerate(b.rows):
        for j in range(b.n):
            if r[j]:
                m.data[j][a.dim + i] = F.neg(r[j])
    _, kern, _ = rank_kernel_image(m)
    gens = []
    for k in kern:
        vec = [0] * a.n
        for i, c in enumerate(k[: a.dim]):
            if c:
                for j in range(a.n):
                    if a.rows[i][j]:
                        vec[j] = F.add(vec[j], F.mul(c, a.rows[i][j]))
        gens.append(vec)
    return Subspace(F, a.n, gens)


class Quotient:
    """F^n modulo a subspace, with canonical coordinates.

    Basis = the echelonized images of the standard basis vectors; the
    coordinate map factors through Subspace.reduce so results do not
    depend on representative choices.
    """

    def __init__(self, field, n, denominator: Subspace):
        self.field = field
        self.n = n
        self.denom = denominator
        reps = []
        for i in range(n):
            v = [0] * n
            v[i] = 1
            r = denominator.reduce(v)
            if any(r):
                reps.append(r)
        self.basis = Subspace(field, n, reps)

    @property
    def dim(self):
        return self.basis.dim

    def coords(self, vec):
        r = self.denom.reduce(vec)
        c = self.basis.coords_in_basis(r)
        assert c is not None, "reduction left the representative space"
        return c

    def is_zero(self, vec):
        return not any(self.denom.reduce(vec))


def map_matrix(field, out_dim, columns):
    m = FpMatrix(field, out_dim, len(columns))
    for j, col in enumerate(columns):
        for i, v in enumerate(col):
            m.data[i][j] = v
    return m


def gauss_rank_naive(field, rowdata):
    """Independent dense elimination oracle (no pivoting discipline shared
    with rref): forward elimination only, counts nonzero rows."""
    F = field
    mat = [list(r) for r in rowdata]
    n = len(mat)
    m = len(mat[0]) if n else 0
    rank = 0
    row = 0
    for col in range(m):
        sel = None
        for i in range(row, n):
            if mat[i][col]:
                sel = i
                break
        if sel is None:
            continue
        mat[row], mat[sel] = mat[sel], mat[row]
        for i in range(row + 1, n):
            if mat[i][col]:
                f = F.mul(mat[i][col], F.inv(mat[row][col]))
                mat[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(mat[i], mat[row])]
        rank += 1
        row += 1
        if row == n:
            break
    return rank
