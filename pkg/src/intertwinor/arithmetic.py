"""Exact and floating scalar arithmetic with pole tracking.

All spectral quantities in this package are quotients of gamma functions at
half-integer-shifted arguments.  When the two gamma arguments differ by an
integer the quotient reduces to a rational rising factorial and is evaluated
exactly over ``fractions.Fraction``; otherwise it is evaluated in floating
point through log-gamma with explicit sign tracking for negative arguments.

Poles and zeros of these quotients are meaningful spectral data (kernels and
cokernels of the intertwinors), so the value domain is extended by an explicit
pole marker instead of raising on division by zero.  Truly indeterminate
configurations (0/0, pole times zero) are always reported as errors, never
silently resolved.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

Rational = Union[int, Fraction]
ScalarLike = Union[int, Fraction, float]

#: default proximity radius around nonpositive integers treated as a gamma pole
EPS_POLE = 1e-8


class IndeterminateError(ArithmeticError):
    """An expression of the form 0/0 or pole*0 was encountered."""


class ExtendedScalar:
    """A rational or floating value extended with a pole marker.

    Instances are immutable.  ``Finite(0)`` is a legal value distinct from
    the pole.  The pole absorbs multiplication by any nonzero finite value;
    pole times zero raises :class:`IndeterminateError`.
    """

    __slots__ = ("_value",)

    def __init__(self, value: Union[Fraction, float, None]):
        # None encodes the pole
        object.__setattr__(self, "_value", value)

    def __setattr__(self, *_):
        raise AttributeError("ExtendedScalar is immutable")

    # -- constructors -------------------------------------------------------

    @classmethod
    def exact(cls, value: Rational) -> "ExtendedScalar":
        return cls(Fraction(value))

    @classmethod
    def floating(cls, value: float) -> "ExtendedScalar":
        return cls(float(value))

    @classmethod
    def pole(cls) -> "ExtendedScalar":
        return cls(None)

    # -- predicates ----------------------------------------------------------

    @property
    def is_pole(self) -> bool:
        return self._value is None

    @property
    def is_zero(self) -> bool:
        return self._value is not None and self._value == 0

    @property
    def is_exact(self) -> bool:
        return isinstance(self._value, Fraction)

    @property
    def value(self) -> Union[Fraction, float]:
        if self._value is None:
            raise ValueError("pole has no finite value")
        return self._value

    def to_float(self) -> float:
        return float(self.value)

    # -- arithmetic ----------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "ExtendedScalar":
        if isinstance(other, ExtendedScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return ExtendedScalar.exact(other)
        if isinstance(other, float):
            return ExtendedScalar.floating(other)
        return NotImplemented

    def __mul__(self, other) -> "ExtendedScalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_pole or other.is_pole:
            if (not self.is_pole and self.is_zero) or (not other.is_pole and other.is_zero):
                raise IndeterminateError("pole * 0 is indeterminate")
            return POLE
        return ExtendedScalar(self._value * other._value)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "ExtendedScalar":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_pole and other.is_pole:
            raise IndeterminateError("pole / pole is indeterminate")
        if self.is_pole:
            return POLE
        if other.is_pole:
            return ExtendedScalar(0 * self._value)  # finite / pole = 0, keeps exactness
        if other.is_zero:
            if self.is_zero:
                raise IndeterminateError("0 / 0 is indeterminate")
            return POLE
        return ExtendedScalar(self._value / other._value)

    def __neg__(self) -> "ExtendedScalar":
        if self.is_pole:
            return POLE
        return ExtendedScalar(-self._value)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, float)):
            return not self.is_pole and self._value == other
        if isinstance(other, ExtendedScalar):
            if self.is_pole or other.is_pole:
                return self.is_pole and other.is_pole
            return self._value == other._value
        return NotImplemented

    def __hash__(self):
        return hash(self._value)

    def __repr__(self) -> str:
        if self.is_pole:
            return "ExtendedScalar.pole()"
        return f"ExtendedScalar({self._value!r})"

    def serialize(self) -> str:
        """Fixed string form: 'pole', 'num/den' for exact, repr for floats."""
        if self.is_pole:
            return "pole"
        if self.is_exact:
            return format_fraction(self._value)
        return repr(self._value)


#: the shared pole value
POLE = ExtendedScalar(None)


def format_fraction(x: Rational) -> str:
    """Serialize a rational as ``num`` or ``num/den`` (den > 0, lowest terms)."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def is_integral(r: ScalarLike) -> bool:
    """True for ints and integer-valued Fractions; floats are never integral."""
    if isinstance(r, bool):
        return False
    if isinstance(r, int):
        return True
    if isinstance(r, Fraction):
        return r.denominator == 1
    return False


def rising_factorial(z: Rational, m: int) -> Fraction:
    """Exact rising factorial z (z+1) ... (z+m-1); the empty product is 1.

    Realizes the gamma quotient G(z+m)/G(z) for nonnegative integer m,
    including the regularized finite limit when both arguments sit at poles.
    """
    if m < 0:
        raise ValueError(f"rising_factorial needs m >= 0, got {m}")
    z = Fraction(z)
    out = Fraction(1)
    for i in range(m):
        out *= z + i
    return out


def quotient(num: Rational, den: Rational) -> ExtendedScalar:
    """num/den as an extended scalar: pole at den == 0, error at 0/0."""
    num, den = Fraction(num), Fraction(den)
    if den == 0:
        if num == 0:
            raise IndeterminateError("0 / 0 is indeterminate")
        return POLE
    return ExtendedScalar.exact(num / den)


def gamma_ratio(x: Rational, r: int) -> ExtendedScalar:
    """G((x+r)/2) / G((x-r)/2) for rational x and integer r, exactly.

    For r >= 0 this is the rising factorial of length r starting at (x-r)/2;
    a zero value is legal (the denominator gamma sits at a pole).  For r < 0
    it is the reciprocal, which is a pole when the rising factorial vanishes.
    Configurations where both gammas sit at poles reduce to the finite limit
    value of the quotient, which is what the rising factorial computes.
    """
    if not is_integral(r):
        raise ValueError(f"exact gamma_ratio needs integer r, got {r!r}; "
                         "use gamma_ratio_numeric")
    r = int(r)
    if r >= 0:
        return ExtendedScalar.exact(rising_factorial(Fraction(x - r, 2), r))
    inv = rising_factorial(Fraction(x + r, 2), -r)
    if inv == 0:
        return POLE
    return ExtendedScalar.exact(1 / inv)


def _gamma_sign(v: float) -> int:
    """Sign of G(v) for non-pole v; negative arguments alternate by interval."""
    if v > 0:
        return 1
    return 1 if math.floor(v) % 2 == 0 else -1


def _near_nonpositive_integer(v: float, eps: float) -> bool:
    n = round(v)
    return n <= 0 and abs(v - n) < eps


def gamma_ratio_numeric(x: float, r: float, eps_pole: float = EPS_POLE) -> ExtendedScalar:
    """G((x+r)/2) / G((x-r)/2) in floating point.

    Negative arguments are handled through log-gamma of the absolute value
    with the reflection sign tracked explicitly.  Arguments within
    ``eps_pole`` of a nonpositive integer are treated as gamma poles: a pole
    in the numerator gives a pole result, one in the denominator gives 0.0,
    and one on both sides raises :class:`IndeterminateError` naming the
    offending arguments.
    """
    a = (float(x) + float(r)) / 2.0
    b = (float(x) - float(r)) / 2.0
    a_pole = _near_nonpositive_integer(a, eps_pole)
    b_pole = _near_nonpositive_integer(b, eps_pole)
    if a_pole and b_pole:
        raise IndeterminateError(
            f"both gamma arguments at poles: (x+r)/2={a!r}, (x-r)/2={b!r}")
    if a_pole:
        return POLE
    if b_pole:
        return ExtendedScalar.floating(0.0)
    sign = _gamma_sign(a) * _gamma_sign(b)
    return ExtendedScalar.floating(sign * math.exp(math.lgamma(a) - math.lgamma(b)))


def sqrt_exact(x: Rational) -> Fraction:
    """Exact square root of a nonnegative rational that is a perfect square."""
    x = Fraction(x)
    if x < 0:
        raise ValueError(f"negative radicand {x}")
    num = math.isqrt(x.numerator)
    den = math.isqrt(x.denominator)
    if num * num != x.numerator or den * den != x.denominator:
        raise ValueError(f"{x} is not the square of a rational")
    return Fraction(num, den)
