"""so(n) actions and the first-order conformal-weight extractor.

The Lie algebra so(n) is identified with grade-2 elements of the exterior
algebra: the blade e_i^e_j acts on vectors by w |-> e_i<e_j,w> - e_j<e_i,w>.
Against that identification this module provides

* the standard (tensor) action, both on vectors and extended to all grades
  as a derivation over the wedge,
* the spin action  sigma(e_i^e_j) e = -1/4 (e_i.e_j.e - e_j.e_i.e),  which
  mixes grades,
* ``iota``, the map  W -> W (x) so(n)  whose slot a is -(e_a ^ w),
* symbol maps W (x) E -> F with attached actions on E and F, together with
  machine checks that an action is a representation and that a symbol is a
  module homomorphism,
* ``conformal_weight``: given an equivariant symbol pi, forms the composite
  M = pi o (Id (x) rho) o (iota (x) Id) on W (x) E and decides exactly whether
  M = w*pi for a constant w.  When it does, pi is the symbol of an invariant
  first-order operator between densities of weight w and w-1; when it does
  not (the Hodge-de Rham case), the report carries a positive residual.

Everything here runs in exact rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .linalg import SparseMap, rank
from .multivector import Multivector, clifford_mul_vec, left_mul_table, wedge
from .scalars import is_zero

_ONE = Fraction(1)
_HALF = Fraction(1, 2)


def bivector_pairs(n):
    """Basis bivector index pairs (i, j), 1 <= i < j <= n, in lex order."""
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def blade_bivector(n, i, j):
    """The blade e_i ^ e_j as a multivector, for any i != j."""
    if i == j:
        return Multivector.zero(n)
    if i < j:
        return Multivector.blade(n, [i, j])
    return -Multivector.blade(n, [j, i])


def so_bracket(x, y):
    """Lie bracket on grade-2 elements, transported from the vector action.

    On blades:  [e_i^e_j, e_k^e_l] = d_jk e_i^e_l + d_il e_j^e_k
                                   - d_jl e_i^e_k - d_ik e_j^e_l.
    """
    if x.n != y.n:
        raise ValueError("dimension mismatch")
    n = x.n
    out = Multivector.zero(n)
    for (i, j) in bivector_pairs(n):
        ci = x.coeffs[(1 << (i - 1)) | (1 << (j - 1))]
        if is_zero(ci):
            continue
        for (k, l) in bivector_pairs(n):
            cj = y.coeffs[(1 << (k - 1)) | (1 << (l - 1))]
            if is_zero(cj):
                continue
            c = ci * cj
            for (p, q, s) in (
                (i, l, 1 if j == k else 0),
                (j, k, 1 if i == l else 0),
                (i, k, -1 if j == l else 0),
                (j, l, -1 if i == k else 0),
            ):
                if s:
                    out = out + (s * c) * blade_bivector(n, p, q)
    return out


def iota(w):
    """Slot-a bivectors of the canonical map W -> W (x) so(n).

    Returns the list over a = 1..n of -(e_a ^ w); feeding these to an action
    and contracting back is the algebraic shadow of a conformal change of
    connection.
    """
    n = w.n
    if not w.is_vector():
        raise ValueError("iota expects a grade-1 element")
    return [-wedge(Multivector.basis_vector(n, a), w) for a in range(1, n + 1)]


class RepAction:
    """An so(n) action: a matrix for every basis bivector e_i^e_j."""

    def __init__(self, n, dim, matrices, name=""):
        self.n = n
        self.dim = dim
        self.matrices = matrices  # {(i, j): SparseMap}
        self.name = name

    def matrix(self, i, j):
        if i < j:
            return self.matrices[(i, j)]
        return self.matrices[(j, i)].scale(-1)

    def matrix_of(self, bv):
        """Matrix of a general grade-2 element given by blade coefficients."""
        out = SparseMap(self.dim, self.dim)
        for (i, j) in bivector_pairs(self.n):
            c = bv.coeffs[(1 << (i - 1)) | (1 << (j - 1))]
            if not is_zero(c):
                out = out + self.matrices[(i, j)].scale(c)
        return out

    def apply(self, bv, vec):
        return self.matrix_of(bv).apply(vec)


def _columns_from_action(n, dim, fn):
    """Build {(i,j): SparseMap} from a per-basis-bivector column function."""
    out = {}
    for (i, j) in bivector_pairs(n):
        m = SparseMap(dim, dim)
        for col in range(dim):
            for row, val in fn(i, j, col).items():
                m.set(row, col, val)
        out[(i, j)] = m
    return out


def std_rep_vectors(n):
    """The defining action on W: e_i^e_j sends e_j to e_i and e_i to -e_j."""

    def col(i, j, k):
        if k == j - 1:
            return {i - 1: _ONE}
        if k == i - 1:
            return {j - 1: -_ONE}
        return {}

    return RepAction(n, n, _columns_from_action(n, n, col), name="std")


def std_rep_forms(n):
    """Derivation extension of the vector action to all of the blade algebra."""
    dim = 1 << n

    def col(i, j, mask):
        out = {}
        ibit, jbit = 1 << (i - 1), 1 << (j - 1)
        # replace e_j by e_i and e_i by -e_j, one factor at a time
        for (src, dst, sgn) in ((jbit, ibit, 1), (ibit, jbit, -1)):
            if mask & src and not mask & dst:
                rest = mask ^ src
                s = 1 if (rest & (src - 1)).bit_count() % 2 == 0 else -1
                t = 1 if (rest & (dst - 1)).bit_count() % 2 == 0 else -1
                out[rest | dst] = out.get(rest | dst, 0) + Fraction(sgn * s * t)
        return {k: v for k, v in out.items() if not is_zero(v)}

    return RepAction(n, dim, _columns_from_action(n, dim, col), name="forms")


def spin_rep(n, quarter=Fraction(-1, 4)):
    """Grade-mixing action  e_i^e_j |-> quarter*(L_i L_j - L_j L_i).

    With quarter = -1/4 this is a representation of so(n); any other value
    breaks the bracket compatibility and is exposed by check_representation.
    """
    dim = 1 << n
    tables = {i: left_mul_table(n, i) for i in range(1, n + 1)}
    matrices = {}
    for (i, j) in bivector_pairs(n):
        permi, signi = tables[i]
        permj, signj = tables[j]
        m = SparseMap(dim, dim)
        # out[k] = signi[k] * (L_j in)[permi[k]] = signi[k]*signj[permi[k]] * in[permj[permi[k]]]
        for k in range(dim):
            mid = permi[k]
            src = permj[mid]
            s_ij = signi[k] * signj[mid]
            # the reverse order L_j L_i
            mid2 = permj[k]
            src2 = permi[mid2]
            s_ji = signj[k] * signi[mid2]
            val = 0
            if src == src2:
                val = quarter * (s_ij - s_ji)
                if not is_zero(val):
                    m.set(k, src, val)
            else:
                m.set(k, src, quarter * s_ij)
                m.set(k, src2, -quarter * s_ji)
        matrices[(i, j)] = m
    return RepAction(n, dim, matrices, name="spin")


def trivial_rep(n, dim=1):
    zero = {pq: SparseMap(dim, dim) for pq in bivector_pairs(n)}
    return RepAction(n, dim, zero, name="trivial")


def _accum(m, row, col, val):
    m.set(row, col, m.cols[col].get(row, 0) + val)


def tensor_rep(rep_a, rep_b, name=""):
    """Action X (x) Id + Id (x) X on the tensor product, a-major indexing."""
    n = rep_a.n
    da, db = rep_a.dim, rep_b.dim
    dim = da * db
    matrices = {}
    for (i, j) in bivector_pairs(n):
        ma, mb = rep_a.matrices[(i, j)], rep_b.matrices[(i, j)]
        m = SparseMap(dim, dim)
        for ca in range(da):
            for ra, va in ma.cols[ca].items():
                for cb in range(db):
                    _accum(m, ra * db + cb, ca * db + cb, va)
        for cb in range(db):
            for rb, vb in mb.cols[cb].items():
                for ca in range(da):
                    _accum(m, ca * db + rb, ca * db + cb, vb)
        matrices[(i, j)] = m
    return RepAction(n, dim, matrices, name=name or f"{rep_a.name}(x){rep_b.name}")


def check_representation(rep):
    """Max defect of rep([X,Y]) - [rep(X), rep(Y)] over basis bivector pairs."""
    n = rep.n
    pairs = bivector_pairs(n)
    worst = 0.0
    for a in range(len(pairs)):
        i, j = pairs[a]
        for b in range(a + 1, len(pairs)):
            k, l = pairs[b]
            bracket = so_bracket(blade_bivector(n, i, j), blade_bivector(n, k, l))
            lhs = rep.matrix_of(bracket)
            x, y = rep.matrices[(i, j)], rep.matrices[(k, l)]
            comm = x.compose(y) - y.compose(x)
            worst = max(worst, (lhs - comm).max_abs())
    return worst


@dataclass
class SymbolMap:
    """A homomorphism pi: W (x) E -> F with the actions it must intertwine.

    Source indexing is a-major: slot (a, u) sits at column (a-1)*dimE + u.
    """

    name: str
    n: int
    dimE: int
    dimF: int
    matrix: SparseMap
    repE: RepAction
    repF: RepAction

    def source_dim(self):
        return self.n * self.dimE

    def ambient_action(self, i, j):
        """X (x) Id + Id (x) repE(X) on W (x) E for the basis bivector (i, j)."""
        n, dE = self.n, self.dimE
        m = SparseMap(n * dE, n * dE)
        me = self.repE.matrices[(i, j)]
        for a in range(n):
            base = a * dE
            for c in range(dE):
                for r, v in me.cols[c].items():
                    _accum(m, base + r, base + c, v)
        # vector part: e_j -> e_i, e_i -> -e_j
        for c in range(dE):
            _accum(m, (i - 1) * dE + c, (j - 1) * dE + c, _ONE)
            _accum(m, (j - 1) * dE + c, (i - 1) * dE + c, -_ONE)
        return m


def check_equivariance(sym):
    """Max defect of pi o (X.) - repF(X) o pi over basis bivectors."""
    worst = 0.0
    for (i, j) in bivector_pairs(sym.n):
        lhs = sym.matrix.compose(sym.ambient_action(i, j))
        rhs = sym.repF.matrices[(i, j)].compose(sym.matrix)
        worst = max(worst, (lhs - rhs).max_abs())
    return worst


@dataclass
class WeightReport:
    symbol: str
    n: int
    weight: Optional[Fraction]
    residual: Fraction
    operator: str

    def to_json_dict(self):
        return {
            "symbol": self.symbol,
            "n": self.n,
            "weight": None if self.weight is None else str(self.weight),
            "residual": str(self.residual),
            "operator": self.operator,
        }


def _format_weight(w):
    return str(w)


def composite_matrix(sym):
    """M = pi o (Id (x) rho) o (iota (x) Id) as a sparse map on W (x) E."""
    n, dE = sym.n, sym.dimE
    cols = []
    for b in range(1, n + 1):
        for u in range(dE):
            acc = {}
            for a in range(1, n + 1):
                if a == b:
                    continue
                # iota(e_b) slot a = -(e_a ^ e_b)
                sgn = -1 if a < b else 1  # -(e_a^e_b) in terms of the blade
                lo, hi = min(a, b), max(a, b)
                col = sym.repE.matrices[(lo, hi)].cols[u]
                base = (a - 1) * dE
                for r, v in col.items():
                    acc[base + r] = acc.get(base + r, 0) + sgn * v
            cols.append(sym.matrix.apply(acc))
    return SparseMap(sym.dimF, n * dE, cols)


def conformal_weight(sym, check=True):
    """Decide exactly whether the composite equals w * pi and extract w.

    Requires pi to be a module homomorphism (re-derived, not assumed) and
    nonzero.  Least squares in the Frobenius pairing gives the candidate w;
    the verdict is the exact vanishing of M - w*pi.
    """
    if sym.matrix.is_zero():
        raise ValueError("zero symbol map")
    if check:
        defect = check_equivariance(sym)
        if defect != 0:
            raise ValueError(
                f"symbol {sym.name!r} is not a module map (defect {defect})"
            )
    m = composite_matrix(sym)
    denom = sym.matrix.frobenius(sym.matrix)
    w = Fraction(m.frobenius(sym.matrix), denom)
    diff = m - sym.matrix.scale(w)
    residual = max(
        (abs(v) for c in diff.cols for v in c.values()), default=Fraction(0)
    )
    residual = Fraction(residual)
    if residual == 0:
        op = f"E[{_format_weight(w)}] -> F[{_format_weight(w - 1)}]"
        return WeightReport(sym.name, sym.n, w, Fraction(0), op)
    return WeightReport(sym.name, sym.n, None, residual, "none")


# -- concrete symbols ---------------------------------------------------------


def epsilon_symbol(n, rep=None, scale=_ONE):
    """The Clifford symbol v (x) e |-> v.e on W (x) Lambda*, dim 2^n target.

    The attached action is the spin action by default; passing the forms
    action instead produces the Hodge-de Rham symbol, whose weight extraction
    fails (by design).
    """
    dim = 1 << n
    m = SparseMap(dim, n * dim)
    for i in range(1, n + 1):
        perm, signs = left_mul_table(n, i)
        base = (i - 1) * dim
        for k in range(dim):
            m.set(k, base + perm[k], scale * signs[k])
    rep = rep or spin_rep(n)
    name = "clifford" if rep.name == "spin" else "hodge"
    return SymbolMap(name, n, dim, dim, m, rep, rep)


def _tensor2_rep(n):
    std = std_rep_vectors(n)
    return tensor_rep(std, std, name="std(x)std")


def symbol_skew(n):
    """Projection of W (x) W onto its antisymmetric part."""
    if n < 2:
        raise ValueError("needs n >= 2")
    m = SparseMap(n * n, n * n)
    for a in range(n):
        for b in range(n):
            c = a * n + b
            m.set(a * n + b, c, m.cols[c].get(a * n + b, 0) + _HALF)
            m.set(b * n + a, c, m.cols[c].get(b * n + a, 0) - _HALF)
    return SymbolMap("skew", n, n, n * n, m, std_rep_vectors(n), _tensor2_rep(n))


def symbol_sym0(n):
    """Projection of W (x) W onto trace-free symmetric tensors."""
    if n < 2:
        raise ValueError("needs n >= 2")
    m = SparseMap(n * n, n * n)
    for a in range(n):
        for b in range(n):
            c = a * n + b
            m.set(a * n + b, c, m.cols[c].get(a * n + b, 0) + _HALF)
            m.set(b * n + a, c, m.cols[c].get(b * n + a, 0) + _HALF)
            if a == b:
                for t in range(n):
                    m.set(t * n + t, c, m.cols[c].get(t * n + t, 0) - Fraction(1, n))
    return SymbolMap("sym0", n, n, n * n, m, std_rep_vectors(n), _tensor2_rep(n))


def symbol_trace(n):
    """Full metric trace W (x) W -> R."""
    if n < 2:
        raise ValueError("needs n >= 2")
    m = SparseMap(1, n * n)
    for a in range(n):
        m.set(0, a * n + a, _ONE)
    return SymbolMap("trace", n, n, 1, m, std_rep_vectors(n), trivial_rep(n))


def trace_lift(n):
    """Embedding R -> W (x) W sending 1 to (1/n) * sum_a e_a (x) e_a."""
    m = SparseMap(n * n, 1)
    for a in range(n):
        m.set(a * n + a, 0, Fraction(1, n))
    return m


def epsilon_rank(n):
    """Rank of the Clifford symbol matrix (expected 2^n: surjective)."""
    return rank(epsilon_symbol(n).matrix.to_dense())


def gamma_term(upsilon, phi, rep):
    """Slot-a values rep(iota(upsilon)_a)(phi), the connection-change term.

    ``phi`` is a multivector (the actions here live on the blade algebra);
    the return is the list over a of multivectors.
    """
    n = upsilon.n
    slots = []
    for bv in iota(upsilon):
        vec = {k: v for k, v in enumerate(phi.coeffs) if not is_zero(v)}
        out = rep.apply(bv, vec)
        mvout = Multivector.zero(n)
        for k, v in out.items():
            mvout.coeffs[k] = v
        slots.append(mvout)
    return slots


def epsilon_contract(slots, g=None):
    """sum_a e_a . slot_a for a list of slot multivectors."""
    n = slots[0].n
    out = Multivector.zero(n)
    for a, s in enumerate(slots, start=1):
        out = out + clifford_mul_vec(Multivector.basis_vector(n, a), s, g)
    return out
