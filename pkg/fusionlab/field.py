"""
Exact scalars.

Lengths, volumes, frequencies and eigenvalue candidates are either rationals
(``int`` or ``fractions.Fraction``) or elements ``p + q*phi`` of the golden
field, where ``phi`` is the golden ratio (``phi**2 == phi + 1``). The latter
are represented by QuadraticNumber. Nothing in this module ever rounds: floats
only appear when a value is explicitly read out.

Copyright (C) 2020 Nicholas H.Tollervey (ntoll@ntoll.org).

This program is free software: you can redistribute it and/or modify
it under the terms of the GNU Affero General Public License as
published by the Free Software Foundation, either version 3 of the
License, or (at your option) any later version.

This program is distributed in the hope that it will be useful,
but WITHOUT ANY WARRANTY; without even the implied warranty of
MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
GNU Affero General Public License for more details.

You should have received a copy of the GNU Affero General Public License
along with this program.  If not, see <https://www.gnu.org/licenses/>
"""
import math
import mpmath  # type: ignore
from fractions import Fraction
from functools import total_ordering
from typing import Union


Rational = Union[int, Fraction]


def normalize(value):
    """
    Return an int for integral rationals, and the value unchanged otherwise.
    Keeps integer arithmetic on the fast path.
    """
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    if isinstance(value, QuadraticNumber) and value.phi == 0:
        return normalize(value.rat)
    return value


@total_ordering
class QuadraticNumber:
    """
    The exact number ``rat + phi * φ`` with rational coefficients.
    """

    __slots__ = ("rat", "phi")

    def __init__(self, rat: Rational = 0, phi: Rational = 0) -> None:
        self.rat = Fraction(rat)
        self.phi = Fraction(phi)

    @classmethod
    def coerce(cls, value) -> "QuadraticNumber":
        if isinstance(value, QuadraticNumber):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value, 0)
        raise TypeError(f"Cannot treat {value!r} as a golden field element.")

    def __repr__(self) -> str:
        return f"QuadraticNumber({self.rat}, {self.phi})"

    def __str__(self) -> str:
        if self.phi == 0:
            return str(self.rat)
        if self.rat == 0:
            return f"{self.phi} phi"
        return f"{self.rat} + {self.phi} phi"

    def __hash__(self) -> int:
        if self.phi == 0:
            return hash(self.rat)
        return hash((self.rat, self.phi))

    def __eq__(self, other) -> bool:
        try:
            other = QuadraticNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self.rat == other.rat and self.phi == other.phi

    def __lt__(self, other) -> bool:
        try:
            other = QuadraticNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return (self - other).sign() < 0

    def __bool__(self) -> bool:
        return bool(self.rat) or bool(self.phi)

    def __neg__(self) -> "QuadraticNumber":
        return QuadraticNumber(-self.rat, -self.phi)

    def __pos__(self) -> "QuadraticNumber":
        return self

    def __abs__(self) -> "QuadraticNumber":
        return -self if self.sign() < 0 else self

    def __add__(self, other):
        try:
            other = QuadraticNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadraticNumber(self.rat + other.rat, self.phi + other.phi)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = QuadraticNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return QuadraticNumber(self.rat - other.rat, self.phi - other.phi)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        try:
            other = QuadraticNumber.coerce(other)
        except TypeError:
            return NotImplemented
        # (a + bφ)(c + dφ) = ac + bd + (ad + bc + bd)φ, using φ² = φ + 1.
        a, b, c, d = self.rat, self.phi, other.rat, other.phi
        return QuadraticNumber(a * c + b * d, a * d + b * c + b * d)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        """
        The field norm: the product with the Galois conjugate.
        """
        a, b = self.rat, self.phi
        return a * a + a * b - b * b

    def conjugate(self) -> "QuadraticNumber":
        # φ maps to 1 - φ.
        return QuadraticNumber(self.rat + self.phi, -self.phi)

    def inverse(self) -> "QuadraticNumber":
        norm = self.norm()
        if norm == 0:
            raise ZeroDivisionError("Division by zero in the golden field.")
        conj = self.conjugate()
        return QuadraticNumber(conj.rat / norm, conj.phi / norm)

    def __truediv__(self, other):
        try:
            other = QuadraticNumber.coerce(other)
        except TypeError:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return QuadraticNumber.coerce(other) * self.inverse()

    def __pow__(self, exponent: int) -> "QuadraticNumber":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return self.inverse() ** -exponent
        result = QuadraticNumber(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def _surd(self):
        """
        Integers (a, b, d) with ``self == (a + b*sqrt(5)) / (2*d)``, d > 0.
        """
        twice_rat = 2 * self.rat + self.phi
        d = math.lcm(twice_rat.denominator, self.phi.denominator)
        a = twice_rat.numerator * (d // twice_rat.denominator)
        b = self.phi.numerator * (d // self.phi.denominator)
        return a, b, d

    def sign(self) -> int:
        """
        Exact sign (-1, 0 or 1).
        """
        a, b, _ = self._surd()
        if a >= 0 and b >= 0:
            return 0 if a == 0 and b == 0 else 1
        if a <= 0 and b <= 0:
            return -1
        # Opposite signs: compare a² with 5b².
        difference = a * a - 5 * b * b
        if a > 0:
            return 1 if difference > 0 else -1
        return 1 if difference < 0 else -1

    def __floor__(self) -> int:
        a, b, d = self._surd()
        if b == 0:
            return a // (2 * d)
        root = math.isqrt(5 * b * b)  # floor(|b| * sqrt(5)), never exact.
        floor_b_sqrt5 = root if b > 0 else -root - 1
        # a + b*sqrt(5) lies strictly between a + floor_b_sqrt5 and the next
        # integer, so its floor division by 2d is that of the integer part.
        return (a + floor_b_sqrt5) // (2 * d)

    def __float__(self) -> float:
        return float(self.to_mpf(64))

    def to_mpf(self, bits: int = 64):
        """
        The value as an mpmath float, computed with enough working precision
        that the requested number of bits survive cancellation.
        """
        a, b, d = self._surd()
        work = bits + max(a.bit_length(), b.bit_length()) + 16
        with mpmath.workprec(work):
            value = (mpmath.mpf(a) + mpmath.mpf(b) * mpmath.sqrt(5)) / (2 * d)
        return value


Scalar = Union[int, Fraction, QuadraticNumber]


def fractional_part(value: Scalar) -> Scalar:
    """
    Exact reduction modulo 1, into the half open interval [0, 1).
    """
    return normalize(value - math.floor(value))


def to_float(value: Scalar) -> float:
    return float(value)


def circle_distance(theta: Scalar) -> float:
    """
    ``|exp(2 pi i theta) - 1|`` for an exact theta, evaluated after exact
    reduction of theta modulo 1.
    """
    frac = fractional_part(theta)
    if frac == 0:
        return 0.0
    with mpmath.workprec(96):
        if isinstance(frac, QuadraticNumber):
            x = frac.to_mpf(96)
        else:
            x = mpmath.mpf(frac.numerator) / frac.denominator
        return float(2 * abs(mpmath.sin(mpmath.pi * x)))


def is_rational(value: Scalar) -> bool:
    return not isinstance(normalize(value), QuadraticNumber)


def as_json(value: Scalar):
    """
    Canonical JSON form: ints stay ints, rationals print as "p/q" and golden
    field elements as ``{"rat": "p/q", "phi": "p/q"}``.
    """
    value = normalize(value)
    if isinstance(value, bool):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return {
        "rat": f"{value.rat.numerator}/{value.rat.denominator}",
        "phi": f"{value.phi.numerator}/{value.phi.denominator}",
    }


#: The golden ratio itself.
PHI = QuadraticNumber(0, 1)
