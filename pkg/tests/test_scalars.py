import random
from fractions import Fraction

import pytest

from monoclif.scalars import (
    IMAG,
    QI2,
    SQRT2,
    is_zero,
    random_fraction,
    scalar_from_json_fields,
    scalar_json_fields,
)


def rand_qi2(rng):
    return QI2(*(random_fraction(rng) for _ in range(4)))


def test_defining_relations():
    assert IMAG * IMAG == QI2(-1)
    assert SQRT2 * SQRT2 == QI2(2)
    assert (IMAG * SQRT2) * (IMAG * SQRT2) == QI2(-2)


def test_field_closure_random():
    rng = random.Random(1)
    for _ in range(200):
        x, y = rand_qi2(rng), rand_qi2(rng)
        assert (x + y) - y == x
        assert x * y == y * x
        if y:
            assert (x / y) * y == x


def test_division_and_inverse():
    x = QI2(3, Fraction(1, 2), -2, Fraction(5, 7))
    assert x * x.inverse() == QI2(1)
    with pytest.raises(ZeroDivisionError):
        QI2(0).inverse()


def test_mixed_arithmetic_with_rationals():
    x = QI2(1, 1)
    assert Fraction(1, 2) * x == QI2(Fraction(1, 2), Fraction(1, 2))
    assert 1 + x == QI2(2, 1)
    assert (x - 1) == SQRT2
    assert Fraction(3) / QI2(0, 1) == QI2(0, Fraction(3, 2))


def test_distributivity_random():
    rng = random.Random(2)
    for _ in range(100):
        x, y, z = rand_qi2(rng), rand_qi2(rng), rand_qi2(rng)
        assert x * (y + z) == x * y + x * z


def test_is_zero_modes():
    assert is_zero(Fraction(0))
    assert not is_zero(Fraction(1, 10**9))
    assert is_zero(1e-15)
    assert not is_zero(1e-3)
    assert is_zero(QI2(0))


def test_json_round_trip():
    for x in (Fraction(-3, 7), QI2(1, 2, 3, 4), 0.25, complex(1.5, -2.0)):
        back = scalar_from_json_fields(scalar_json_fields(x))
        assert back == x


def test_complex_embedding():
    z = complex(QI2(1, 1, 1, 0))
    assert abs(z - complex(1 + 2**0.5, 1.0)) < 1e-12
