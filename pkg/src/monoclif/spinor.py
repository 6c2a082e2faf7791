"""Complexified Clifford structure: null splitting, gamma matrices, and the
factorization of the full blade module into spinor copies.

For even n the complexification CW splits as U + U* with both halves totally
null and the bilinear (not Hermitian) pairing between them.  The sqrt(2)-
weighted creation/annihilation action

    v : (s (x) t) = sqrt(2) * (alpha ^ s - beta _| s) (x) t,
    v = alpha + beta in U + U*,

acts on the U factor only, satisfies the same Clifford relation as v.e, and
its restriction to Lambda*U is the gamma-matrix representation.  ``build_phi``
constructs the unique unital isomorphism between the blade realization and
the endomorphism realization by pushing Clifford words of basis vectors onto
the identity element; the inductive consistency identities are asserted
during construction rather than assumed.

For odd n the analogous splitting comes from the central complex volume
element: its +/-1 eigenspaces each carry 2^((n-1)/2) copies of the spinor
module of dimension 2^((n-1)/2).

Exact scalars live in Q(i, sqrt2); a float mode (complex arithmetic, numpy
for rank/inverse) covers larger n.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .linalg import SparseMap, kernel_basis, matmul, rank
from .multivector import Multivector, clifford_mul_vec, left_mul_table
from .scalars import IMAG, QI2, SQRT2, is_zero


class SpinorConsistencyError(RuntimeError):
    """An internal identity of the construction failed."""


@dataclass
class NullSplitting:
    """Totally null coordinates u_k, u*_k for the complexified metric.

    u_k = (e_{2k-1} - i e_{2k})/sqrt2 and u*_k = (e_{2k-1} + i e_{2k})/sqrt2,
    so that <u_j, u_k> = <u*_j, u*_k> = 0 and <u_j, u*_k> = delta_jk under
    the bilinear extension of the Euclidean form.
    """

    n: int
    exact: bool = True
    u: list = field(init=False)
    ustar: list = field(init=False)

    def __post_init__(self):
        if self.n % 2:
            raise ValueError("null splitting needs even n")
        m = self.n // 2
        if self.exact:
            half = QI2(0, Fraction(1, 2))            # 1/sqrt2
            ihalf = QI2(0, 0, 0, Fraction(1, 2))     # i/sqrt2
        else:
            half = 1.0 / 2 ** 0.5
            ihalf = 1j / 2 ** 0.5
        self.u, self.ustar = [], []
        for k in range(m):
            a, b = 2 * k + 1, 2 * k + 2
            ea = Multivector.basis_vector(self.n, a)
            eb = Multivector.basis_vector(self.n, b)
            self.u.append(half * ea + (-ihalf) * eb)
            self.ustar.append(half * ea + ihalf * eb)

    @property
    def m(self):
        return self.n // 2

    def sqrt2(self):
        return SQRT2 if self.exact else 2 ** 0.5

    def decompose(self, v):
        """Coefficients (alphas, betas) of v in the u / u* basis."""
        comps = v.vector_components()
        alphas, betas = [], []
        for k in range(self.m):
            us, uu = self.ustar[k].vector_components(), self.u[k].vector_components()
            alphas.append(sum(c * s for c, s in zip(comps, us)))
            betas.append(sum(c * s for c, s in zip(comps, uu)))
        return alphas, betas

    def pairing(self, alphas, betas):
        return sum(a * b for a, b in zip(alphas, betas))


def make_null_splitting(n, exact=True):
    return NullSplitting(n, exact)


def _creation_annihilation(alphas, betas, smask, m):
    """Terms of (alpha^ - beta_|) on the U-blade smask: [(mask, value)]."""
    out = []
    for k in range(m):
        bit = 1 << k
        sign = -1 if (smask & (bit - 1)).bit_count() & 1 else 1
        if smask & bit:
            b = betas[k]
            if not is_zero(b):
                out.append((smask ^ bit, -(b if sign > 0 else -b)))
        else:
            a = alphas[k]
            if not is_zero(a):
                out.append((smask | bit, a if sign > 0 else -a))
    return out


def colon_apply(split, v, elem):
    """Apply v: to an element of Lambda*U (x) Lambda*U* given as {index: value}.

    Index convention: the pair (S, T) of U- and U*-blades sits at S*2^m + T;
    the T factor rides along untouched.
    """
    m = split.m
    alphas, betas = split.decompose(v)
    s2 = split.sqrt2()
    out = {}
    for st, c in elem.items():
        smask, t = st >> m, st & ((1 << m) - 1)
        for mask, val in _creation_annihilation(alphas, betas, smask, m):
            key = (mask << m) | t
            out[key] = out.get(key, 0) + s2 * val * c
    return {k: v2 for k, v2 in out.items() if not is_zero(v2)}


def gamma_matrix(v, split):
    """Matrix of sqrt2*(alpha^ - beta_|) on Lambda*U in the blade basis."""
    m = split.m
    dim = 1 << m
    alphas, betas = split.decompose(v)
    s2 = split.sqrt2()
    cols = [dict() for _ in range(dim)]
    for smask in range(dim):
        for mask, val in _creation_annihilation(alphas, betas, smask, m):
            cols[smask][mask] = cols[smask].get(mask, 0) + s2 * val
    out = [[0] * dim for _ in range(dim)]
    for c, colvals in enumerate(cols):
        for r, val in colvals.items():
            out[r][c] = val
    return out


def endo_matrix(elem, m):
    """The endomorphism of Lambda*U represented by an element of U (x) U*.

    u_S (x) u*_T acts as the elementary matrix mapping u_T to u_S under the
    blade extension of the dual pairing.
    """
    dim = 1 << m
    out = [[0] * dim for _ in range(dim)]
    for st, c in elem.items():
        s, t = st >> m, st & (dim - 1)
        out[s][t] = out[s][t] + c
    return out


@dataclass
class PhiMap:
    """The unital intertwiner from the blade module to Lambda*U (x) Lambda*U*.

    ``cols[mask]`` holds the image of the real blade with bit pattern ``mask``
    as an {S*2^m+T: value} dict.
    """

    n: int
    split: NullSplitting
    cols: list
    order: str
    exact: bool = True

    @property
    def dim(self):
        return 1 << self.n

    def apply(self, mv):
        out = {}
        for mask, c in enumerate(mv.coeffs):
            if is_zero(c):
                continue
            for st, v in self.cols[mask].items():
                out[st] = out.get(st, 0) + c * v
        return {k: v for k, v in out.items() if not is_zero(v)}

    def to_dense(self):
        rows = [[0] * self.dim for _ in range(self.dim)]
        for c, col in enumerate(self.cols):
            for r, v in col.items():
                rows[r][c] = v
        return rows

    def is_invertible(self):
        if self.exact:
            return rank(self.to_dense()) == self.dim
        import numpy as np

        a = np.array([[complex(x) for x in row] for row in self.to_dense()])
        return np.linalg.matrix_rank(a) == self.dim

    def inverse_dense(self):
        if self.exact:
            from .linalg import invert

            return invert(self.to_dense())
        import numpy as np

        a = np.array([[complex(x) for x in row] for row in self.to_dense()])
        return np.linalg.inv(a).tolist()


def phi_identity_element(m, one=None):
    """Sum of all diagonal blades u_S (x) u*_S: the identity endomorphism."""
    if one is None:
        one = QI2(1)
    return {(s << m) | s: one for s in range(1 << m)}


def _word_for_mask(mask, order):
    bits = [i + 1 for i in range(mask.bit_length()) if mask >> i & 1]
    if order == "lex":
        return bits, 1
    if order == "revlex":
        k = len(bits)
        sign = -1 if (k * (k - 1) // 2) % 2 else 1
        return list(reversed(bits)), sign
    raise ValueError(f"unknown construction order {order!r}")


def build_phi(n, order="lex", exact=True):
    """Construct the unital isomorphism by pushing Clifford words onto 1.

    The image of a real blade e_{i1}^...^e_{ik} is the corresponding colon
    word applied to the identity element.  The pairwise consistency identity
    v:Phi(w) + w:Phi(v) = -2<v,w> Phi(1) over the null basis is asserted, as
    is invertibility of the result.
    """
    if n % 2:
        raise ValueError("even n required")
    split = make_null_splitting(n, exact)
    m = split.m
    one = QI2(1) if exact else 1.0
    phi1 = phi_identity_element(m, one)
    cols = [None] * (1 << n)
    cols[0] = dict(phi1)
    for mask in range(1, 1 << n):
        word, sign = _word_for_mask(mask, order)
        elem = phi1
        for i in reversed(word):
            elem = colon_apply(split, Multivector.basis_vector(n, i), elem)
        if sign < 0:
            elem = {k: -v for k, v in elem.items()}
        cols[mask] = elem
    phi = PhiMap(n, split, cols, order, exact)
    _assert_pair_consistency(phi)
    if not phi.is_invertible():
        raise SpinorConsistencyError("constructed map is singular")
    return phi


def _assert_pair_consistency(phi):
    split = phi.split
    tol = None if phi.exact else 1e-9
    basis = list(split.u) + list(split.ustar)
    phi1 = phi.cols[0]
    for v in basis:
        for w in basis:
            lhs = _dict_add(
                colon_apply(split, v, phi.apply(w)),
                colon_apply(split, w, phi.apply(v)),
            )
            av, bv = split.decompose(v)
            aw, bw = split.decompose(w)
            pair = split.pairing(av, bw) + split.pairing(aw, bv)
            rhs = {k: -2 * pair * val for k, val in phi1.items()}
            if not _dict_eq(lhs, rhs, tol):
                raise SpinorConsistencyError("pairwise Clifford consistency failed")


def _dict_add(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if not is_zero(v)}


def _dict_eq(a, b, tol=None):
    keys = set(a) | set(b)
    return all(is_zero(a.get(k, 0) - b.get(k, 0), tol) for k in keys)


def phi_intertwining_defect(phi, vectors=None):
    """Max defect of Phi(v.e) = v:Phi(e) over basis vectors and blades."""
    n = phi.n
    split = phi.split
    vectors = vectors or [Multivector.basis_vector(n, a) for a in range(1, n + 1)]
    worst = 0.0
    for v in vectors:
        for mask in range(1 << n):
            basis = Multivector.zero(n)
            basis.coeffs[mask] = QI2(1) if phi.exact else 1.0
            lhs = phi.apply(clifford_mul_vec(v, basis))
            rhs = colon_apply(split, v, phi.cols[mask])
            keys = set(lhs) | set(rhs)
            for k in keys:
                worst = max(worst, abs(lhs.get(k, 0) - rhs.get(k, 0)))
    return worst


def block_decompose_even(n, exact=True):
    """Verify that left Clifford multiplication factors as gamma (x) Id.

    Checks, for every basis vector v, the identity Phi o L(v) = (gamma(v)
    (x) Id) o Phi entrywise, plus invertibility of Phi; together these give
    the conjugation form with N = 2^(n/2) passenger copies.  Also confirms
    that the two construction orders yield the same map.
    """
    phi = build_phi(n, "lex", exact)
    phi_rev = build_phi(n, "revlex", exact)
    orders_agree = all(
        _dict_eq(a, b, None if exact else 1e-9)
        for a, b in zip(phi.cols, phi_rev.cols)
    )
    m = phi.split.m
    dim = 1 << n
    worst = 0.0
    for a in range(1, n + 1):
        gam = gamma_matrix(Multivector.basis_vector(n, a), phi.split)
        _, signs = left_mul_table(n, a)
        bit = 1 << (a - 1)
        for cmask in range(dim):
            # column of Phi o L(e_a):  L(e_a) blade_c = signs[c^bit] * blade_{c^bit}
            target = cmask ^ bit
            s = signs[target]
            lhs = {st: s * val for st, val in phi.cols[target].items()}
            # column of (gamma(e_a) (x) Id) o Phi
            rhs = {}
            for st, val in phi.cols[cmask].items():
                sblade, t = st >> m, st & ((1 << m) - 1)
                for r in range(1 << m):
                    g = gam[r][sblade]
                    if is_zero(g):
                        continue
                    key = (r << m) | t
                    rhs[key] = rhs.get(key, 0) + g * val
            for k in set(lhs) | set(rhs):
                worst = max(worst, abs(lhs.get(k, 0) - rhs.get(k, 0)))
    return {
        "n": n,
        "copies": 1 << (n // 2),
        "spinor_dim": 1 << (n // 2),
        "defect": worst,
        "invertible": True,  # build_phi raised otherwise
        "construction_orders_agree": orders_agree,
        "dimension_identity": dim == (1 << (n // 2)) ** 2,
    }


def spin_transport_blocks(n):
    """Conjugate the grade-mixing so(n) action through Phi.

    For every basis bivector the conjugated matrix must have the block
    pattern M (x) Id: entries vanish between different passenger columns and
    do not depend on the passenger index.  Returns the max deviation.
    """
    from .represent import bivector_pairs, spin_rep

    phi = build_phi(n)
    m = phi.split.m
    dim = 1 << n
    inv = phi.inverse_dense()
    dense = phi.to_dense()
    sp = spin_rep(n)
    worst = 0.0
    for (i, j) in bivector_pairs(n):
        sig = sp.matrices[(i, j)].to_dense()
        conj = matmul(dense, matmul(sig, inv))
        for r in range(dim):
            sr, tr = r >> m, r & ((1 << m) - 1)
            for c in range(dim):
                sc, tc = c >> m, c & ((1 << m) - 1)
                val = conj[r][c]
                if tr != tc:
                    worst = max(worst, abs(val))
                else:
                    ref = conj[sr << m][sc << m]  # passenger index 0
                    worst = max(worst, abs(val - ref))
    return worst


def volume_operator(n, exact=True):
    """The complex volume element i^ceil(n/2) e_1.e_2...e_n as a matrix.

    For odd n it is central and squares to the identity.
    """
    dim = 1 << n
    unit = QI2(1) if exact else 1.0
    imag = IMAG if exact else 1j
    cols = [{c: unit} for c in range(dim)]
    # apply L(e_n) first, then ... then L(e_1): word acts right to left
    for a in range(n, 0, -1):
        _, signs = left_mul_table(n, a)
        bit = 1 << (a - 1)
        new_cols = []
        for col in cols:
            out = {}
            for row, val in col.items():
                tgt = row ^ bit
                out[tgt] = out.get(tgt, 0) + signs[tgt] * val
            new_cols.append(out)
        cols = new_cols
    phase = unit
    for _ in range((n + 1) // 2):
        phase = phase * imag
    cols = [{r: phase * v for r, v in col.items()} for col in cols]
    return SparseMap(dim, dim, cols)


def decompose_odd(n):
    """Split the complexified blade module by the central volume idempotents.

    Verifies that the volume element squares to the identity and is central,
    extracts the two eigenspaces exactly, restricts the Clifford action to
    each, re-checks the Clifford relation there, and counts spinor copies:
    each eigenspace carries dim/2^((n-1)/2) of them.
    """
    if n % 2 == 0:
        raise ValueError("odd n required")
    dim = 1 << n
    om = volume_operator(n)
    ident = SparseMap.identity(dim, QI2(1))
    sq_defect = (om.compose(om) - ident).max_abs()

    lmaps = []
    for a in range(1, n + 1):
        _, signs = left_mul_table(n, a)
        bit = 1 << (a - 1)
        cols = []
        for c in range(dim):
            tgt = c ^ bit
            cols.append({tgt: QI2(signs[tgt])})
        lmaps.append(SparseMap(dim, dim, cols))
    central_defect = max(
        (om.compose(lv) - lv.compose(om)).max_abs() for lv in lmaps
    )

    spin_dim = 1 << ((n - 1) // 2)
    eig = {}
    for sign_label, s in (("plus", 1), ("minus", -1)):
        rows = (om - ident.scale(s)).to_dense()
        basis, _, free = kernel_basis(rows)
        d = len(basis)
        # restricted Clifford generators, read off in free-column coordinates
        restricted = []
        incl_cols = [
            {r: v for r, v in enumerate(vec) if not is_zero(v)} for vec in basis
        ]
        incl = SparseMap(dim, d, incl_cols)
        restrict_defect = 0.0
        for lv in lmaps:
            image = lv.compose(incl)
            rmat = SparseMap(d, d, [
                {k: col.get(fc, 0) for k, fc in enumerate(free) if not is_zero(col.get(fc, 0))}
                for col in image.cols
            ])
            restrict_defect = max(restrict_defect, (incl.compose(rmat) - image).max_abs())
            restricted.append(rmat)
        rel_defect = 0.0
        for i in range(n):
            for j in range(i, n):
                anti = restricted[i].compose(restricted[j]) + restricted[j].compose(
                    restricted[i]
                )
                expect = SparseMap(d, d) if i != j else SparseMap.identity(d, QI2(-2))
                rel_defect = max(rel_defect, (anti - expect).max_abs())
        eig[sign_label] = {
            "dimension": d,
            "multiplicity": d // spin_dim,
            "invariant_defect": restrict_defect,
            "clifford_relation_defect": rel_defect,
        }

    total_copies = eig["plus"]["multiplicity"] + eig["minus"]["multiplicity"]
    return {
        "n": n,
        "volume_square_defect": sq_defect,
        "centrality_defect": central_defect,
        "eigenspaces": eig,
        "spinor_dim": spin_dim,
        "copies": total_copies,
        "copies_expected": 1 << ((n + 1) // 2),
        "dimension_identity": eig["plus"]["dimension"] + eig["minus"]["dimension"] == dim,
    }


def commutant_dimension(n, sign=1):
    """Dimension of the commutant of the restricted action on one eigenspace.

    For d/spin_dim copies of an absolutely irreducible module the commutant
    has dimension (d/spin_dim)^2; checking it certifies the multiplicity
    count beyond bare dimension bookkeeping.  Exact but quartic in the
    eigenspace dimension, so intended for small odd n.
    """
    if n % 2 == 0:
        raise ValueError("odd n required")
    dim = 1 << n
    om = volume_operator(n)
    ident = SparseMap.identity(dim, QI2(1))
    rows = (om - ident.scale(sign)).to_dense()
    basis, _, free = kernel_basis(rows)
    d = len(basis)
    incl_cols = [{r: v for r, v in enumerate(vec) if not is_zero(v)} for vec in basis]
    incl = SparseMap(dim, d, incl_cols)
    restricted = []
    for a in range(1, n + 1):
        _, signs = left_mul_table(n, a)
        bit = 1 << (a - 1)
        cols = []
        for c in range(dim):
            tgt = c ^ bit
            cols.append({tgt: QI2(signs[tgt])})
        lv = SparseMap(dim, dim, cols)
        image = lv.compose(incl)
        restricted.append([
            [image.cols[c].get(fc, 0) for c in range(d)] for fc in free
        ])
    # linear system [X, R] = 0 for all generators; unknowns X_{pq}
    rows_sys = []
    for r in restricted:
        for i in range(d):
            for j in range(d):
                row = [0] * (d * d)
                for k in range(d):
                    row[i * d + k] = row[i * d + k] + r[k][j]
                    row[k * d + j] = row[k * d + j] - r[i][k]
                rows_sys.append(row)
    basis_c, _, _ = kernel_basis(rows_sys)
    return len(basis_c)
