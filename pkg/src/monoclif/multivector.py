"""Exact exterior algebra on R^n with the Clifford action v.e = v^e - v_|e.

Elements are stored densely: 2^n blade coefficients indexed by subsets of
{1..n} under the binary encoding (bit i-1 set <=> e_i present in the blade).
The wedge and the interior product are the unweighted blade operations; with
that normalization the contraction is the antiderivation adjoint to the wedge,

    u ^ (v _| w) + v _| (u ^ w) = <u, v> w,

holds exactly, and iterating the vector action v.e = v^e - v_|e realizes a
Clifford module structure:  u.(v.e) + v.(u.e) = -2<u,v> e.

All values are immutable after construction and every operation is pure.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import is_zero, scalar_json_fields, scalar_from_json_fields

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _wedge_sign(a, b):
    """Sign of sorting the concatenation of disjoint blades a, b (bitmasks)."""
    swaps = 0
    t = b
    while t:
        j = (t & -t).bit_length() - 1
        swaps += (a >> (j + 1)).bit_count()
        t &= t - 1
    return -1 if swaps & 1 else 1


class Metric:
    """Symmetric bilinear form on R^n; the default is the Euclidean identity."""

    __slots__ = ("n", "g", "_euclidean")

    def __init__(self, n, rows=None):
        self.n = n
        if rows is None:
            self.g = None
            self._euclidean = True
            return
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError("metric must be n x n")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("metric must be symmetric")
        self.g = [list(r) for r in rows]
        self._euclidean = all(
            rows[i][j] == (1 if i == j else 0) for i in range(n) for j in range(n)
        )

    @classmethod
    def euclidean(cls, n):
        return cls(n)

    def lower(self, v):
        """Covector components <v, e_j> of a coefficient list v."""
        if self._euclidean:
            return list(v)
        return [sum(v[i] * self.g[i][j] for i in range(self.n)) for j in range(self.n)]

    def inner(self, u, v):
        if self._euclidean:
            return sum(ui * vi for ui, vi in zip(u, v))
        w = self.lower(v)
        return sum(ui * wi for ui, wi in zip(u, w))


class Multivector:
    """Element of the full exterior algebra on R^n (or its complexification)."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n, coeffs):
        if n < 1:
            raise ValueError("dimension must be positive")
        if len(coeffs) != 1 << n:
            raise ValueError(f"expected {1 << n} coefficients, got {len(coeffs)}")
        self.n = n
        self.coeffs = list(coeffs)

    @classmethod
    def zero(cls, n):
        return cls(n, [_ZERO] * (1 << n))

    @classmethod
    def scalar(cls, n, value):
        c = [_ZERO] * (1 << n)
        c[0] = value
        return cls(n, c)

    @classmethod
    def basis_vector(cls, n, i):
        if not 1 <= i <= n:
            raise ValueError(f"basis index {i} out of range 1..{n}")
        c = [_ZERO] * (1 << n)
        c[1 << (i - 1)] = _ONE
        return cls(n, c)

    @classmethod
    def blade(cls, n, indices, value=_ONE):
        mask = 0
        for i in indices:
            if not 1 <= i <= n:
                raise ValueError(f"blade index {i} out of range 1..{n}")
            bit = 1 << (i - 1)
            if mask & bit:
                raise ValueError("repeated blade index")
            mask |= bit
        c = [_ZERO] * (1 << n)
        c[mask] = value
        return cls(n, c)

    @classmethod
    def vector(cls, n, comps):
        if len(comps) != n:
            raise ValueError("vector needs n components")
        c = [_ZERO] * (1 << n)
        for i, v in enumerate(comps):
            c[1 << i] = v
        return cls(n, c)

    # -- structure ----------------------------------------------------------

    def vector_components(self):
        """Grade-1 components; raises unless the support is purely grade 1."""
        if not self.is_vector():
            raise ValueError("not a grade-1 element")
        return [self.coeffs[1 << i] for i in range(self.n)]

    def is_vector(self):
        return all(
            is_zero(c) for m, c in enumerate(self.coeffs) if m.bit_count() != 1
        )

    def grade_project(self, k):
        if not 0 <= k <= self.n:
            raise ValueError(f"grade {k} out of range 0..{self.n}")
        c = [v if m.bit_count() == k else _ZERO for m, v in enumerate(self.coeffs)]
        return Multivector(self.n, c)

    def grades(self):
        return sorted({m.bit_count() for m, c in enumerate(self.coeffs) if not is_zero(c)})

    def is_zero(self, tol=None):
        return all(is_zero(c, tol) for c in self.coeffs)

    # -- arithmetic ---------------------------------------------------------

    def _check(self, other):
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        self._check(other)
        return Multivector(self.n, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return Multivector(self.n, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return Multivector(self.n, [-a for a in self.coeffs])

    def __mul__(self, s):
        return Multivector(self.n, [c * s for c in self.coeffs])

    def __rmul__(self, s):
        return Multivector(self.n, [s * c for c in self.coeffs])

    def __eq__(self, other):
        if not isinstance(other, Multivector) or self.n != other.n:
            return NotImplemented
        return all((a - b) == 0 for a, b in zip(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.n, tuple(self.coeffs)))

    def __repr__(self):
        terms = []
        for m, c in enumerate(self.coeffs):
            if is_zero(c):
                continue
            name = "1" if m == 0 else "e" + "".join(
                str(i + 1) for i in range(self.n) if m >> i & 1
            )
            terms.append(f"{c}*{name}")
        return "MV(" + (" + ".join(terms) if terms else "0") + ")"

    # -- serialization ------------------------------------------------------

    def to_json_dict(self):
        entries = []
        for m, c in enumerate(self.coeffs):
            if is_zero(c):
                continue
            blade = [i + 1 for i in range(self.n) if m >> i & 1]
            entries.append({"blade": blade, **scalar_json_fields(c)})
        return {"n": self.n, "coeffs": entries}

    @classmethod
    def from_json_dict(cls, d):
        mv = cls.zero(d["n"])
        for entry in d["coeffs"]:
            mask = 0
            for i in entry["blade"]:
                mask |= 1 << (i - 1)
            mv.coeffs[mask] = scalar_from_json_fields(entry)
        return mv


# -- products ---------------------------------------------------------------


def wedge(a, b):
    """Exterior product, graded-anticommutative and associative."""
    a._check(b)
    out = [_ZERO] * (1 << a.n)
    for ma, ca in enumerate(a.coeffs):
        if is_zero(ca):
            continue
        for mb, cb in enumerate(b.coeffs):
            if is_zero(cb) or (ma & mb):
                continue
            s = _wedge_sign(ma, mb)
            term = ca * cb
            out[ma | mb] = out[ma | mb] + (term if s > 0 else -term)
    return Multivector(a.n, out)


def contract(v, a, g=None):
    """Interior product of the grade-1 element v into a.

    Grade-lowering antiderivation; its normalization is fixed by the identity
    u^(v_|w) + v_|(u^w) = <u,v> w against the blade wedge.
    """
    v._check(a)
    g = g or Metric.euclidean(v.n)
    w = g.lower(v.vector_components())
    out = [_ZERO] * (1 << a.n)
    for m, c in enumerate(a.coeffs):
        if is_zero(c):
            continue
        t = m
        while t:
            bit = t & -t
            j = bit.bit_length() - 1
            t &= t - 1
            if is_zero(w[j]):
                continue
            sign = -1 if (m & (bit - 1)).bit_count() & 1 else 1
            term = w[j] * c
            out[m ^ bit] = out[m ^ bit] + (term if sign > 0 else -term)
    return Multivector(a.n, out)


def clifford_mul_vec(v, a, g=None):
    """The Clifford action v.a = v ^ a - v _| a of a grade-1 element."""
    v._check(a)
    g = g or Metric.euclidean(v.n)
    vc = v.vector_components()
    w = g.lower(vc)
    out = [_ZERO] * (1 << a.n)
    for m, c in enumerate(a.coeffs):
        if is_zero(c):
            continue
        for j in range(v.n):
            bit = 1 << j
            sign = -1 if (m & (bit - 1)).bit_count() & 1 else 1
            if m & bit:
                if is_zero(w[j]):
                    continue
                term = w[j] * c  # contraction enters with a minus sign
                out[m ^ bit] = out[m ^ bit] - (term if sign > 0 else -term)
            else:
                if is_zero(vc[j]):
                    continue
                term = vc[j] * c
                out[m | bit] = out[m | bit] + (term if sign > 0 else -term)
    return Multivector(a.n, out)


def clifford_word(vs, a, g=None):
    """Right-to-left iterated Clifford action; an empty word returns a."""
    g = g or Metric.euclidean(a.n)
    out = a
    for v in reversed(list(vs)):
        out = clifford_mul_vec(v, out, g)
    return out


def matrix_of_left_mul(v, g=None):
    """Dense 2^n x 2^n matrix of e |-> v.e in the blade basis."""
    n = v.n
    g = g or Metric.euclidean(n)
    dim = 1 << n
    cols = []
    for m in range(dim):
        basis = Multivector.zero(n)
        basis.coeffs[m] = _ONE
        cols.append(clifford_mul_vec(v, basis, g).coeffs)
    return [[cols[j][i] for j in range(dim)] for i in range(dim)]


def left_mul_table(n, i):
    """(source_index, sign) pairs for the action of e_i on every blade.

    Entry k of the returned lists gives the unique source blade m and sign s
    with (e_i . blade_m) = s * blade_k, i.e. out[k] = s * in[m].
    """
    bit = 1 << (i - 1)
    perm = []
    signs = []
    for k in range(1 << n):
        m = k ^ bit
        pos_sign = -1 if (m & (bit - 1)).bit_count() & 1 else 1
        if m & bit:
            # source has the factor: k = m \ {i}, contraction, extra -1
            perm.append(m)
            signs.append(-pos_sign)
        else:
            perm.append(m)
            signs.append(pos_sign)
    return perm, signs
