"""Exact scalar arithmetic.

All algebra in this package is generic over the scalars it is handed.  Four
kinds are used in practice:

* ``fractions.Fraction`` -- exact rationals, the default everywhere,
* ``QI2`` -- the field Q(i, sqrt(2)), needed once complexification and the
  sqrt(2)-weighted creation/annihilation action enter the picture,
* ``float`` / ``complex`` -- for grids and for large-n fallbacks.

Operations never branch on the scalar type; mixed Fraction/int inputs coerce
into ``QI2`` through the reflected operators.
"""

from __future__ import annotations

from fractions import Fraction


class QI2:
    """An element a + b*sqrt(2) + (c + d*sqrt(2))*i with a, b, c, d rational.

    Closed under +, -, * and / by nonzero elements; equality is exact.
    """

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a=0, b=0, c=0, d=0):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.c = Fraction(c)
        self.d = Fraction(d)

    @staticmethod
    def _coerce(x):
        if isinstance(x, QI2):
            return x
        if isinstance(x, (int, Fraction)):
            return QI2(x)
        return None

    def __add__(self, other):
        o = QI2._coerce(other)
        if o is None:
            return NotImplemented
        return QI2(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __sub__(self, other):
        o = QI2._coerce(other)
        if o is None:
            return NotImplemented
        return QI2(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __rsub__(self, other):
        o = QI2._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self):
        return QI2(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other):
        o = QI2._coerce(other)
        if o is None:
            return NotImplemented
        # (x1 + i y1)(x2 + i y2) with x, y in Q(sqrt2) as (p, q) ~ p + q*sqrt2.
        x1, y1 = (self.a, self.b), (self.c, self.d)
        x2, y2 = (o.a, o.b), (o.c, o.d)
        rr = _mul2(x1, x2)
        ii = _mul2(y1, y2)
        ri = _mul2(x1, y2)
        ir = _mul2(y1, x2)
        return QI2(rr[0] - ii[0], rr[1] - ii[1], ri[0] + ir[0], ri[1] + ir[1])

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = QI2._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = QI2._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def inverse(self):
        if not self:
            raise ZeroDivisionError("QI2 division by zero")
        # 1/(x + iy) = (x - iy)/(x^2 + y^2); the norm lies in Q(sqrt2) and is
        # inverted by its own conjugate since p^2 = 2 q^2 has no rational
        # solution besides p = q = 0.
        x, y = (self.a, self.b), (self.c, self.d)
        p, q = _add2(_mul2(x, x), _mul2(y, y))
        den = p * p - 2 * q * q
        np_, nq = p / den, -q / den
        conj = QI2(self.a, self.b, -self.c, -self.d)
        return QI2(np_, nq) * conj

    def conjugate(self):
        return QI2(self.a, self.b, -self.c, -self.d)

    def __eq__(self, other):
        o = QI2._coerce(other)
        if o is None:
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == (o.a, o.b, o.c, o.d)

    def __hash__(self):
        return hash((self.a, self.b, self.c, self.d))

    def __bool__(self):
        return bool(self.a or self.b or self.c or self.d)

    def __complex__(self):
        s = 2 ** 0.5
        return complex(float(self.a) + s * float(self.b),
                       float(self.c) + s * float(self.d))

    def __abs__(self):
        return abs(complex(self))

    def is_rational(self):
        return not (self.b or self.c or self.d)

    def to_fraction(self):
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.a

    def __repr__(self):
        parts = []
        for coef, tag in ((self.a, ""), (self.b, "*s2"), (self.c, "*i"), (self.d, "*i*s2")):
            if coef:
                parts.append(f"{coef}{tag}")
        return "QI2(" + (" + ".join(parts) if parts else "0") + ")"


def _mul2(x, y):
    # product in Q(sqrt2) on (p, q) pairs
    return (x[0] * y[0] + 2 * x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _add2(x, y):
    return (x[0] + y[0], x[1] + y[1])


SQRT2 = QI2(0, 1, 0, 0)
IMAG = QI2(0, 0, 1, 0)


def is_zero(x, tol=None):
    """Exact zero test for exact scalars, tolerance test for floats."""
    if isinstance(x, (int, Fraction, QI2)):
        return not x
    return abs(x) <= (tol if tol is not None else 1e-12)


def abs_size(x):
    """Magnitude as a float, exact zero mapping to 0.0."""
    if isinstance(x, Fraction):
        return abs(float(x)) if x else 0.0
    return abs(x)


def scalar_json_fields(x):
    """The four-component rendering used by all JSON dumps."""
    if isinstance(x, QI2):
        return {"re": str(x.a), "im": str(x.c), "s2re": str(x.b), "s2im": str(x.d)}
    if isinstance(x, (int, Fraction)):
        return {"re": str(Fraction(x)), "im": "0", "s2re": "0", "s2im": "0"}
    if isinstance(x, complex):
        return {"re": repr(x.real), "im": repr(x.imag), "s2re": "0", "s2im": "0"}
    return {"re": repr(float(x)), "im": "0", "s2re": "0", "s2im": "0"}


def scalar_from_json_fields(d):
    def _num(s):
        if "/" in s or s.lstrip("+-").isdigit():
            return Fraction(s)
        return float(s)

    re, im = _num(d.get("re", "0")), _num(d.get("im", "0"))
    s2re, s2im = _num(d.get("s2re", "0")), _num(d.get("s2im", "0"))
    if isinstance(re, float) or isinstance(im, float):
        return complex(re, im) if im else float(re)
    if im or s2re or s2im:
        return QI2(re, s2re, im, s2im)
    return re


def random_fraction(rng, span=9, den=9):
    """Small random rational, for seeded property checks."""
    return Fraction(rng.randint(-span, span), rng.randint(1, den))
