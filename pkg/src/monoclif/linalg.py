"""Exact linear algebra over field scalars.

Dense matrices are lists of rows; sparse linear maps are stored column-wise
as dicts, which keeps the large equivariance checks cheap (most operators in
this package have O(1) entries per column).  Elimination uses deterministic
first-nonzero-column pivoting so kernel bases are reproducible.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import abs_size, is_zero

_ONE = Fraction(1)


class SparseMap:
    """Linear map stored as one {row: value} dict per column."""

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows, ncols, cols=None):
        self.nrows = nrows
        self.ncols = ncols
        self.cols = [dict() for _ in range(ncols)] if cols is None else cols

    @classmethod
    def from_columns(cls, nrows, columns):
        cols = []
        for col in columns:
            cols.append({i: v for i, v in col.items() if not is_zero(v)})
        return cls(nrows, len(cols), cols)

    @classmethod
    def identity(cls, n, one=_ONE):
        return cls(n, n, [{i: one} for i in range(n)])

    def set(self, row, col, value):
        if is_zero(value):
            self.cols[col].pop(row, None)
        else:
            self.cols[col][row] = value

    def apply(self, vec):
        """Apply to a {index: value} dict, returning the same shape."""
        out = {}
        for j, vj in vec.items():
            if is_zero(vj):
                continue
            for i, aij in self.cols[j].items():
                out[i] = out.get(i, 0) + aij * vj
        return {i: v for i, v in out.items() if not is_zero(v)}

    def apply_list(self, vec):
        out = self.apply({j: v for j, v in enumerate(vec) if not is_zero(v)})
        dense = [0] * self.nrows
        for i, v in out.items():
            dense[i] = v
        return dense

    def compose(self, other):
        """self o other."""
        if other.nrows != self.ncols:
            raise ValueError("shape mismatch in composition")
        cols = [self.apply(c) for c in other.cols]
        return SparseMap(self.nrows, other.ncols, cols)

    def __add__(self, other):
        cols = []
        for c1, c2 in zip(self.cols, other.cols):
            c = dict(c1)
            for i, v in c2.items():
                c[i] = c.get(i, 0) + v
            cols.append({i: v for i, v in c.items() if not is_zero(v)})
        return SparseMap(self.nrows, self.ncols, cols)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, s):
        return SparseMap(
            self.nrows, self.ncols,
            [{i: s * v for i, v in c.items()} for c in self.cols],
        )

    def max_abs(self):
        return max((abs_size(v) for c in self.cols for v in c.values()), default=0.0)

    def is_zero(self, tol=None):
        return all(is_zero(v, tol) for c in self.cols for v in c.values())

    def frobenius(self, other):
        """Entrywise pairing sum_ij A_ij B_ij."""
        total = 0
        for c1, c2 in zip(self.cols, other.cols):
            for i, v in c1.items():
                w = c2.get(i)
                if w is not None:
                    total += v * w
        return total

    def to_dense(self):
        rows = [[0] * self.ncols for _ in range(self.nrows)]
        for j, c in enumerate(self.cols):
            for i, v in c.items():
                rows[i][j] = v
        return rows

    def nnz(self):
        return sum(len(c) for c in self.cols)


def rref(rows):
    """Reduced row echelon form; returns (rref_rows, pivot_cols, free_cols).

    Column sweep is left to right, pivot row is the topmost nonzero entry in
    the remaining rows.
    """
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = None
        for i in range(r, nrows):
            if not is_zero(m[i][c]):
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(nrows):
            if i != r and not is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in set(pivots)]
    return m, pivots, free


def rank(rows):
    _, pivots, _ = rref(rows)
    return len(pivots)


def kernel_basis(rows):
    """Kernel basis vectors (as dense lists), one per free column.

    The basis is in free-column coordinates: vector k has a 1 at free column
    k and the back-substituted pivot entries, so the coordinates of any kernel
    element are just its entries at the free columns.
    """
    m, pivots, free = rref(rows)
    ncols = len(rows[0]) if rows else 0
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = _ONE
        for r, pc in enumerate(pivots):
            v[pc] = -m[r][fc]
        basis.append(v)
    return basis, pivots, free


def solve_square(a, b):
    """Solve A x = b for square exact A; raises on singular input."""
    n = len(a)
    aug = [list(row) + [b[i]] for i, row in enumerate(a)]
    m, pivots, _ = rref(aug)
    if len(pivots) < n or any(p >= n for p in pivots):
        raise ValueError("singular system")
    x = [0] * n
    for r, pc in enumerate(pivots):
        x[pc] = m[r][n]
    return x


def invert(a):
    """Exact inverse by Gauss-Jordan; raises on singular input."""
    n = len(a)
    aug = [list(row) + [_ONE if i == j else 0 for j in range(n)] for i, row in enumerate(a)]
    m, pivots, _ = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in m]


def matmul(a, b):
    n, k = len(a), len(b)
    p = len(b[0])
    out = [[0] * p for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            ait = ai[t]
            if is_zero(ait):
                continue
            bt = b[t]
            for j in range(p):
                if not is_zero(bt[j]):
                    oi[j] = oi[j] + ait * bt[j]
    return out


def mat_max_abs(a):
    return max((abs_size(v) for row in a for v in row), default=0.0)
