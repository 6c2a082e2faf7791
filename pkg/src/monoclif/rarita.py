"""Twisted Dirac (Rarita-Schwinger) construction and its symmetric analogues.

The kernel F of the Clifford symbol eps: W (x) E -> E is an invariant
subspace of dimension (n-1) 2^n.  The identity sum_a e_a.(e_a.e) = -n e
yields a canonical splitting: with  Lam(e) = sum_a e_a (x) e_a.e,

    Pi = Id + (1/n) Lam o eps

is the equivariant projection of W (x) E onto F along the image of Lam.  The
twisted symbol theta on W (x) F is Pi o eps~ o (Id (x) incl), where eps~
swaps the two vector slots and Clifford-acts with the first:
eps~(w (x) v (x) e) = v (x) w.e.  Feeding theta to the conformal-weight
extractor reproduces the Dirac weight -(n-1)/2.

For the degree-j symmetric analogue the same scheme runs on the kernel F_j
of Id (x) eps on Sym^j W (x) E, with the splitting built from the insertion
map Lam_j(s (x) e) = sum_a (e_a . s) (x) e_a.e; for j = 1 this reduces to Pi
above.  Kernel bases come from exact elimination with first-nonzero-column
pivoting, so all coordinates (the free columns of the echelon form) are
reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

from .linalg import SparseMap, invert, kernel_basis
from .multivector import left_mul_table
from .represent import (
    RepAction,
    SymbolMap,
    WeightReport,
    bivector_pairs,
    check_equivariance,
    check_representation,
    composite_matrix,
    conformal_weight,
    spin_rep,
    std_rep_vectors,
    tensor_rep,
)
from .scalars import is_zero

_ONE = Fraction(1)


def epsilon_map(n):
    """eps: W (x) E -> E as a sparse map, slot-a-major source indexing."""
    dim = 1 << n
    m = SparseMap(dim, n * dim)
    for a in range(1, n + 1):
        perm, signs = left_mul_table(n, a)
        base = (a - 1) * dim
        for k in range(dim):
            m.set(k, base + perm[k], Fraction(signs[k]))
    return m


def lambda_map(n):
    """Lam: E -> W (x) E, e |-> sum_a e_a (x) e_a.e; satisfies eps o Lam = -n."""
    dim = 1 << n
    m = SparseMap(n * dim, dim)
    for a in range(1, n + 1):
        perm, signs = left_mul_table(n, a)
        base = (a - 1) * dim
        for k in range(dim):
            m.set(base + k, perm[k], Fraction(signs[k]))
    return m


def splitting_pi(n):
    """The idempotent Pi = Id + (1/n) Lam o eps on W (x) E, image F."""
    dim = n * (1 << n)
    correction = lambda_map(n).compose(epsilon_map(n)).scale(Fraction(1, n))
    return SparseMap.identity(dim) + correction


@dataclass
class TwistedSpace:
    """The kernel of the Clifford contraction with a chosen exact basis."""

    n: int
    j: int
    ambient_dim: int
    dim: int
    incl: SparseMap          # ambient x dim
    free_cols: list          # coordinates of F = entries at these columns
    eps: SparseMap           # the contraction whose kernel F is
    pi: SparseMap            # equivariant idempotent ambient -> ambient
    ambient_rep: RepAction   # combined action on the ambient space

    def coords(self, vec):
        """F-coordinates of an ambient vector known to lie in F."""
        return {k: vec[fc] for k, fc in enumerate(self.free_cols) if not is_zero(vec.get(fc, 0))}

    def coords_map(self, m):
        """Compose an ambient-valued sparse map with the coordinate read-off."""
        cols = [self.coords(c) for c in m.cols]
        return SparseMap(self.dim, m.ncols, cols)

    def pi_to_coords(self):
        return self.coords_map(self.pi)


def build_F(n):
    """Exact kernel of eps with the canonical splitting attached."""
    if n < 2:
        raise ValueError("needs n >= 2")
    eps = epsilon_map(n)
    basis, _, free = kernel_basis(eps.to_dense())
    ambient = n * (1 << n)
    incl = SparseMap(ambient, len(basis), [
        {r: v for r, v in enumerate(vec) if not is_zero(v)} for vec in basis
    ])
    ambient_rep = tensor_rep(std_rep_vectors(n), spin_rep(n), name="combined")
    return TwistedSpace(
        n=n, j=1, ambient_dim=ambient, dim=len(basis), incl=incl,
        free_cols=free, eps=eps, pi=splitting_pi(n), ambient_rep=ambient_rep,
    )


def eps_tilde(n):
    """Slot swap plus Clifford action: w (x) v (x) e |-> v (x) w.e.

    Source index of (e_a, e_b, blade u) is ((a-1) n + (b-1)) 2^n + u.
    """
    dim = 1 << n
    m = SparseMap(n * dim, n * n * dim)
    for a in range(1, n + 1):
        perm, signs = left_mul_table(n, a)
        for b in range(1, n + 1):
            src_base = ((a - 1) * n + (b - 1)) * dim
            dst_base = (b - 1) * dim
            for k in range(dim):
                m.set(dst_base + k, src_base + perm[k], Fraction(signs[k]))
    return m


def tau_rep(ts):
    """The combined action restricted to F, in F-coordinates."""
    matrices = {}
    for (i, j) in bivector_pairs(ts.n):
        amb = ts.ambient_rep.matrices[(i, j)]
        matrices[(i, j)] = ts.coords_map(amb.compose(ts.incl))
    return RepAction(ts.n, ts.dim, matrices, name="tau")


def tau_action(ts, bv, ambient_vec):
    """Apply the combined action to an ambient vector required to lie in F."""
    if ts.eps.apply(ambient_vec):
        raise ValueError("vector is not in the kernel of the Clifford contraction")
    return ts.ambient_rep.matrix_of(bv).apply(ambient_vec)


def theta_symbol(n, ts=None):
    """theta = Pi o eps~ o (Id (x) incl): W (x) F -> F, with its action."""
    ts = ts or build_F(n)
    dim = 1 << n
    et = eps_tilde(n)
    pi_coords = ts.pi_to_coords()
    tau = tau_rep(ts)
    cols = []
    for c in range(1, n + 1):
        for f in range(ts.dim):
            big = {}
            for r, v in ts.incl.cols[f].items():
                a, u = divmod(r, dim)
                big[((c - 1) * n + a) * dim + u] = v
            cols.append(pi_coords.apply(et.apply(big)))
    matrix = SparseMap(ts.dim, n * ts.dim, cols)
    return SymbolMap("rarita", n, ts.dim, ts.dim, matrix, tau, tau)


def part_one_map(n):
    """First piece of the twisted composite, with the algebra factor riding.

    e_c (x) e_d (x) u  |->  e_d (x) e_c (x) u - delta_cd sum_a e_a (x) e_a (x) u.
    Composed with eps~ its image is spanned by Lam-lifts, hence dies under Pi.
    """
    dim = 1 << n
    size = n * n * dim
    m = SparseMap(size, size)
    for c in range(n):
        for d in range(n):
            for u in range(dim):
                col = (c * n + d) * dim + u
                m.set((d * n + c) * dim + u, col,
                      m.cols[col].get((d * n + c) * dim + u, 0) + _ONE)
                if c == d:
                    for a in range(n):
                        row = (a * n + a) * dim + u
                        m.set(row, col, m.cols[col].get(row, 0) - _ONE)
    return m


def part_two_check(n):
    """Exact check that the slot-passenger piece contracts to -(n-1)/2 eps~.

    The piece pairs the incoming vector with the grade-mixing action on the
    algebra factor while the second vector slot rides along; after eps~ it
    must equal -(n-1)/2 eps~ on the whole of W (x) W (x) E.
    """
    dim = 1 << n
    sp = spin_rep(n)
    et = eps_tilde(n)
    cols = []
    for c in range(1, n + 1):
        for d in range(1, n + 1):
            for u in range(dim):
                acc = {}
                for a in range(1, n + 1):
                    if a == c:
                        continue
                    sgn = -1 if a < c else 1
                    lo, hi = min(a, c), max(a, c)
                    col = sp.matrices[(lo, hi)].cols[u]
                    for r, v in col.items():
                        key = ((a - 1) * n + (d - 1)) * dim + r
                        acc[key] = acc.get(key, 0) + sgn * v
                cols.append(et.apply(acc))
    lhs = SparseMap(n * dim, n * n * dim, cols)
    rhs = et.scale(Fraction(-(n - 1), 2))
    return (lhs - rhs).max_abs()


def verify_rs_weight(n, ts=None):
    """Full twisted-weight certificate.

    Exactness and splitting invariants, the kernel-annihilation of the first
    composite piece, the scalar identity for the second, the entrywise
    identity (composite = -(n-1)/2 theta), and the extracted weight.

    n = 2 is degenerate: the twisted symbol is identically zero there (the
    action on F has weights +-3/2 while W (x) F has +-1/2, +-5/2, so every
    equivariant map between them vanishes).  The entrywise identity then
    holds as 0 = 0 but no weight is extractable; the report says so instead
    of raising.
    """
    ts = ts or build_F(n)
    dim = 1 << n
    checks = {}

    checks["dim_F"] = ts.dim == (n - 1) * dim
    checks["eps_incl_zero"] = ts.eps.compose(ts.incl).is_zero()
    pi_incl = ts.pi.compose(ts.incl)
    checks["pi_incl_identity"] = (ts.coords_map(pi_incl) - SparseMap.identity(ts.dim)).is_zero()
    checks["pi_idempotent"] = (ts.pi.compose(ts.pi) - ts.pi).is_zero()
    lam = lambda_map(n)
    checks["pi_kills_lifts"] = ts.pi.compose(lam).is_zero()

    # first piece lands in ker Pi after the slot swap
    et = eps_tilde(n)
    p1 = part_one_map(n)
    worst = 0.0
    for c in range(1, n + 1):
        for f in range(ts.dim):
            big = {}
            for r, v in ts.incl.cols[f].items():
                a, u = divmod(r, dim)
                big[((c - 1) * n + a) * dim + u] = v
            out = ts.pi.apply(et.apply(p1.apply(big)))
            if out:
                worst = max(worst, max(abs(x) for x in out.values()))
    checks["part_one_in_kernel"] = worst == 0

    checks["part_two_identity"] = part_two_check(n) == 0

    theta = theta_symbol(n, ts)
    degenerate = theta.matrix.is_zero()
    checks["theta_nonzero"] = not degenerate
    target = Fraction(-(n - 1), 2)
    composite = composite_matrix(theta)
    checks["weight_identity_entrywise"] = (
        composite - theta.matrix.scale(target)
    ).is_zero()
    if degenerate:
        report = WeightReport(theta.name, n, None, Fraction(0),
                              "degenerate: zero symbol")
    else:
        report = conformal_weight(theta)
    return {"n": n, "dims": {"ambient": ts.ambient_dim, "F": ts.dim},
            "weight": report, "checks": checks, "degenerate": degenerate}


# -- symmetric-power analogues ------------------------------------------------


def monomials(n, j):
    """Exponent multisets of degree j over n letters, lex over index tuples."""
    return [tuple(c) for c in combinations_with_replacement(range(1, n + 1), j)]


def _mono_index(monos):
    return {m: k for k, m in enumerate(monos)}


def _remove(mono, i):
    out = list(mono)
    out.remove(i)
    return tuple(out)


def _insert(mono, i):
    return tuple(sorted(mono + (i,)))


def sym_contraction_map(n, j):
    """Id (x) eps on Sym^j W (x) E under the averaging symmetrizer.

    A monomial s with exponent m feeds each letter i into the Clifford action
    with weight m_i / j.
    """
    dim = 1 << n
    monos_j = monomials(n, j)
    monos_jm1 = monomials(n, j - 1)
    idx = _mono_index(monos_jm1)
    tables = {i: left_mul_table(n, i) for i in range(1, n + 1)}
    m = SparseMap(len(monos_jm1) * dim, len(monos_j) * dim)
    for col_m, mono in enumerate(monos_j):
        for i in sorted(set(mono)):
            weight = Fraction(mono.count(i), j)
            tgt = idx[_remove(mono, i)]
            perm, signs = tables[i]
            for k in range(dim):
                row = tgt * dim + k
                col = col_m * dim + perm[k]
                m.set(row, col, m.cols[col].get(row, 0) + weight * signs[k])
    return m


def sym_insertion_map(n, j):
    """Lam_j: Sym^(j-1) W (x) E -> Sym^j W (x) E, s (x) e -> sum_a (e_a.s) (x) e_a.e."""
    dim = 1 << n
    monos_j = monomials(n, j)
    monos_jm1 = monomials(n, j - 1)
    idx = _mono_index(monos_j)
    m = SparseMap(len(monos_j) * dim, len(monos_jm1) * dim)
    for col_m, mono in enumerate(monos_jm1):
        for a in range(1, n + 1):
            tgt = idx[_insert(mono, a)]
            perm, signs = left_mul_table(n, a)
            for k in range(dim):
                row = tgt * dim + k
                col = col_m * dim + perm[k]
                m.set(row, col, m.cols[col].get(row, 0) + Fraction(signs[k]))
    return m


def sym_rep(n, j):
    """Derivation action on Sym^j W in the monomial basis."""
    monos = monomials(n, j)
    idx = _mono_index(monos)
    matrices = {}
    for (i, jj) in bivector_pairs(n):
        m = SparseMap(len(monos), len(monos))
        for col, mono in enumerate(monos):
            # e_i^e_jj sends e_jj -> e_i and e_i -> -e_jj in each slot
            if jj in mono:
                tgt = idx[_insert(_remove(mono, jj), i)]
                m.set(tgt, col, m.cols[col].get(tgt, 0) + Fraction(mono.count(jj)))
            if i in mono:
                tgt = idx[_insert(_remove(mono, i), jj)]
                m.set(tgt, col, m.cols[col].get(tgt, 0) - Fraction(mono.count(i)))
        matrices[(i, jj)] = m
    return RepAction(n, len(monos), matrices, name=f"sym{j}")


def build_Fj(n, j, size_limit=20000):
    """Kernel of Id (x) eps on Sym^j W (x) E with its equivariant splitting.

    The complement is the image of the insertion map; the pairing of the two
    is inverted exactly, which reduces to the -n of the j = 1 case.  Raises
    if the exact workspace would be unreasonably large.
    """
    if j < 1:
        raise ValueError("j >= 1 required")
    if n < 2:
        raise ValueError("needs n >= 2")
    dim = 1 << n
    monos_j = monomials(n, j)
    ambient = len(monos_j) * dim
    if ambient * len(monomials(n, j - 1)) * dim > size_limit ** 2:
        raise ValueError(
            f"exact workspace too large: ambient {ambient}, "
            f"target {len(monomials(n, j - 1)) * dim}"
        )
    a_map = sym_contraction_map(n, j)
    basis, _, free = kernel_basis(a_map.to_dense())
    incl = SparseMap(ambient, len(basis), [
        {r: v for r, v in enumerate(vec) if not is_zero(v)} for vec in basis
    ])
    lam = sym_insertion_map(n, j)
    b = a_map.compose(lam)
    b_inv = invert(b.to_dense())
    b_inv_map = SparseMap.from_columns(
        b.nrows, [{i: b_inv[i][c] for i in range(len(b_inv))} for c in range(len(b_inv))]
    )
    pi = SparseMap.identity(ambient) - lam.compose(b_inv_map).compose(a_map)
    ambient_rep = tensor_rep(sym_rep(n, j), spin_rep(n), name=f"combined{j}")
    return TwistedSpace(
        n=n, j=j, ambient_dim=ambient, dim=len(basis), incl=incl,
        free_cols=free, eps=a_map, pi=pi, ambient_rep=ambient_rep,
    )


def theta_symbol_j(n, j, ts=None):
    """The degree-j twisted symbol Pi_j o eps~_j o (Id (x) incl)."""
    ts = ts or build_Fj(n, j)
    dim = 1 << n
    monos = monomials(n, j)
    pi_coords = ts.pi_to_coords()
    tau = tau_rep(ts)
    tables = {c: left_mul_table(n, c) for c in range(1, n + 1)}
    cols = []
    for c in range(1, n + 1):
        _, signs = tables[c]
        bit = 1 << (c - 1)
        for f in range(ts.dim):
            # eps~_j (e_c (x) s (x) u) = s (x) e_c.u, and e_c.blade_u lands
            # on the single blade u^bit
            out = {}
            for r, v in ts.incl.cols[f].items():
                mono_i, u = divmod(r, dim)
                k = u ^ bit
                out[mono_i * dim + k] = out.get(mono_i * dim + k, 0) + signs[k] * v
            cols.append(pi_coords.apply(out))
    matrix = SparseMap(ts.dim, n * ts.dim, cols)
    return SymbolMap(f"rarita-j{j}", n, ts.dim, ts.dim, matrix, tau, tau)


def verify_rs_weight_j(n, j):
    """Weight certificate for the degree-j analogue; j = 1 matches build_F."""
    ts = build_Fj(n, j)
    dim_expected = (len(monomials(n, j)) - len(monomials(n, j - 1))) * (1 << n)
    checks = {
        "dim_Fj": ts.dim == dim_expected,
        "eps_incl_zero": ts.eps.compose(ts.incl).is_zero(),
        "pi_idempotent": (ts.pi.compose(ts.pi) - ts.pi).is_zero(),
        "pi_incl_identity": (
            ts.coords_map(ts.pi.compose(ts.incl)) - SparseMap.identity(ts.dim)
        ).is_zero(),
        "tau_is_representation": check_representation(tau_rep(ts)) == 0,
    }
    theta = theta_symbol_j(n, j, ts)
    degenerate = theta.matrix.is_zero()
    checks["theta_nonzero"] = not degenerate
    checks["theta_equivariant"] = check_equivariance(theta) == 0
    if degenerate:
        report = WeightReport(theta.name, n, None, Fraction(0),
                              "degenerate: zero symbol")
    else:
        report = conformal_weight(theta)
    return {"n": n, "j": j,
            "dims": {"ambient": ts.ambient_dim, "F": ts.dim},
            "weight": report, "checks": checks, "degenerate": degenerate}
