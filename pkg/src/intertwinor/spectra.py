"""K-type bookkeeping and spectral formulas on products of spheres.

Forms on S^(p-1) x S^(q-1) split under K = SO(p) x SO(q) into two families of
multiplicity-one modules (both factors coexact-type, or both exact-type) and
one multiplicity-two family (a mixed pair).  Each module is indexed by the
pair of harmonic levels (j', j); the spectral formulas are functions of the
shifted levels J' = j' + (p-2)/2 and J = j + (q-2)/2.

Conventions: every transition quantity is oriented target over source, with
the four neighbor directions given by unit steps in (j', j).  The degree range
predicate :func:`ktype_exists` centralizes which Hodge summands are nonempty;
adjust there if a different boundary convention is needed.
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .arithmetic import (
    POLE,
    ExtendedScalar,
    IndeterminateError,
    ScalarLike,
    format_fraction,
    gamma_ratio,
    gamma_ratio_numeric,
    is_integral,
    quotient,
)


class NonexistentKTypeError(ValueError):
    """The requested (family, j', j) labels an empty module."""


class DegenerateNormalizationError(ValueError):
    """A normalization constant degenerates (vanishing denominator)."""


class Family(enum.Enum):
    """The three module families: coexact pair, exact pair, mixed 2x2 pair."""

    COEXACT = "coexact"
    EXACT = "exact"
    MIXED = "mixed"

    @classmethod
    def parse(cls, name: str) -> "Family":
        aliases = {
            "coexact": cls.COEXACT,
            "exact": cls.EXACT,
            "mixed": cls.MIXED,
            "m1-delta": cls.COEXACT,
            "m1-d": cls.EXACT,
            "m2": cls.MIXED,
        }
        try:
            return aliases[name.lower()]
        except KeyError:
            raise ValueError(f"unknown family {name!r}") from None


@dataclass(frozen=True)
class BundleParams:
    """Geometry and bidegree: sphere parameters (p, q), form degree k, split a.

    The first wedge factor carries degree k - a on S^(p-1), the second degree
    a on S^(q-1); both must fit on their spheres.
    """

    p: int
    q: int
    k: int
    a: int

    def __post_init__(self):
        if self.p < 2 or self.q < 2:
            raise ValueError(f"require p, q >= 2, got p={self.p}, q={self.q}")
        if not 0 <= self.a <= self.k:
            raise ValueError(f"require 0 <= a <= k, got a={self.a}, k={self.k}")
        if self.k - self.a > self.p - 1:
            raise ValueError(f"first factor degree {self.k - self.a} exceeds dim {self.p - 1}")
        if self.a > self.q - 1:
            raise ValueError(f"second factor degree {self.a} exceeds dim {self.q - 1}")

    @property
    def n(self) -> int:
        """Total dimension p + q - 2."""
        return self.p + self.q - 2

    @property
    def s(self) -> Fraction:
        """Half of n - 2k; the conformal weight parameter of the bundle."""
        return Fraction(self.p + self.q - 2 - 2 * self.k, 2)

    @property
    def shift1(self) -> Fraction:
        """(p-2)/2, the level shift on the first factor."""
        return Fraction(self.p - 2, 2)

    @property
    def shift2(self) -> Fraction:
        """(q-2)/2, the level shift on the second factor."""
        return Fraction(self.q - 2, 2)


@dataclass(frozen=True)
class KTypeLabel:
    family: Family
    jp: int
    j: int


@dataclass(frozen=True)
class SpectralPoint:
    """Shifted levels (J', J) = (j' + (p-2)/2, j + (q-2)/2), kept exact."""

    Jp: Fraction
    J: Fraction


@dataclass(frozen=True)
class Direction:
    """One of the four diagonal neighbor steps in the (j', j) lattice."""

    djp: int
    dj: int

    def __post_init__(self):
        if self.djp not in (-1, 1) or self.dj not in (-1, 1):
            raise ValueError("direction components must be +1 or -1")


UP_LEFT = Direction(-1, +1)
UP_RIGHT = Direction(+1, +1)
DOWN_LEFT = Direction(-1, -1)
DOWN_RIGHT = Direction(+1, -1)
DIRECTIONS = (UP_LEFT, UP_RIGHT, DOWN_LEFT, DOWN_RIGHT)


# -- factor sphere spectra ----------------------------------------------------

def coexact_laplacian(dim: int, c: int, j: int) -> Fraction:
    """Riemannian (delta d)-eigenvalue on coexact c-forms of level j on S^dim."""
    return Fraction((j + c) * (j + dim - 1 - c))


def exact_laplacian(dim: int, c: int, j: int) -> Fraction:
    """Riemannian (d delta)-eigenvalue on exact c-forms of level j on S^dim."""
    return Fraction((j + c - 1) * (j + dim - c))


def coexact_exists(dim: int, c: int, j: int) -> bool:
    """Nonemptiness of the coexact summand; c = 0, j = 0 are the constants."""
    if c == 0:
        return j >= 0
    return 1 <= c <= dim - 1 and j >= 1


def exact_exists(dim: int, c: int, j: int) -> bool:
    return 1 <= c <= dim and j >= 1


def ktype_exists(params: BundleParams, label: KTypeLabel) -> bool:
    """Whether (family, j', j) labels a nonempty module for these parameters.

    Mixed labels require both constituents of the pair, so the 2x2 machinery
    applies; single-summand boundary degenerations are treated as nonexistent
    here and handled separately where they matter (the torus realization).
    """
    p1, p2 = params.p - 1, params.q - 1
    c1, c2 = params.k - params.a, params.a
    jp, j = label.jp, label.j
    if jp < 0 or j < 0:
        return False
    if label.family is Family.COEXACT:
        return coexact_exists(p1, c1, jp) and coexact_exists(p2, c2, j)
    if label.family is Family.EXACT:
        return exact_exists(p1, c1, jp) and exact_exists(p2, c2, j)
    return (coexact_exists(p1, c1, jp) and exact_exists(p2, c2, j)
            and exact_exists(p1, c1 + 1, jp) and coexact_exists(p2, c2 - 1, j))


def spectral_point(params: BundleParams, jp: int, j: int,
                   family: Optional[Family] = None) -> SpectralPoint:
    """Shifted levels for integer harmonic levels (j', j) >= 0.

    When a family is given, the label is required to exist.
    """
    if jp < 0 or j < 0:
        raise NonexistentKTypeError(f"negative levels ({jp}, {j})")
    if family is not None and not ktype_exists(params, KTypeLabel(family, jp, j)):
        raise NonexistentKTypeError(
            f"{family.value} type at (j'={jp}, j={j}) is empty for "
            f"p={params.p}, q={params.q}, k={params.k}, a={params.a}")
    return SpectralPoint(jp + params.shift1, j + params.shift2)


# -- transition quantities and eigenvalue formulas ----------------------------

def _ratio(num, den) -> ExtendedScalar:
    if isinstance(num, float) or isinstance(den, float):
        if den == 0.0:
            if num == 0.0:
                raise IndeterminateError("0 / 0 in transition quantity")
            return POLE
        return ExtendedScalar.floating(num / den)
    return quotient(num, den)


def mult1_transition(pt: SpectralPoint, r: ScalarLike, direction: Direction) -> ExtendedScalar:
    """Eigenvalue quotient to the (dj', dj) neighbor on a multiplicity-one type.

    With x = dj'*J' + dj*J + 1, the quotient is (x + r)/(x - r): a pole at
    x = r, zero at x = -r, indeterminate when x = r = 0.
    """
    x = direction.djp * pt.Jp + direction.dj * pt.J + 1
    if isinstance(r, float):
        x = float(x)
    return _ratio(x + r, x - r)


def mult1_eigenvalue(pt: SpectralPoint, r: ScalarLike) -> ExtendedScalar:
    """The gamma-quotient eigenvalue on a multiplicity-one type.

    Product of the two gamma ratios at arguments J' + J + 1 and J' - J + 1;
    exact (rising factorial) for integer r, floating otherwise.
    """
    xs = (pt.Jp + pt.J + 1, pt.Jp - pt.J + 1)
    if is_integral(r):
        out = ExtendedScalar.exact(1)
        for x in xs:
            out = out * gamma_ratio(x, int(r))
        return out
    out = ExtendedScalar.floating(1.0)
    for x in xs:
        out = out * gamma_ratio_numeric(float(x), float(r))
    return out


def cross_type_quotient(params: BundleParams, r: ScalarLike) -> ExtendedScalar:
    """Quotient from the coexact family to the exact family: (s - r)/(s + r)."""
    s = params.s
    if isinstance(r, float):
        return _ratio(float(s) - r, float(s) + r)
    return _ratio(s - r, s + r)


def mult2_transition(pt: SpectralPoint, r: ScalarLike, direction: Direction) -> ExtendedScalar:
    """Determinant quotient to the (dj', dj) neighbor on a mixed pair.

    With x = dj'*J' + dj*J, the quotient is the two-step product
    (x+r)(x+2+r) / ((x-r)(x+2-r)), evaluated as a product of extended-scalar
    ratios so that pole/zero collisions are reported, not silently cancelled.
    """
    x = direction.djp * pt.Jp + direction.dj * pt.J
    if isinstance(r, float):
        x = float(x)
    return _ratio(x + r, x - r) * _ratio(x + 2 + r, x + 2 - r)


def mult2_det(pt: SpectralPoint, r: ScalarLike) -> ExtendedScalar:
    """Determinant of the intertwinor on a mixed pair (gamma-quotient form)."""
    xs = (pt.Jp + pt.J, pt.Jp + pt.J + 2, pt.Jp - pt.J, pt.Jp - pt.J + 2)
    if is_integral(r):
        out = ExtendedScalar.exact(1)
        for x in xs:
            out = out * gamma_ratio(x, int(r))
        return out
    out = ExtendedScalar.floating(1.0)
    for x in xs:
        out = out * gamma_ratio_numeric(float(x), float(r))
    return out


@dataclass(frozen=True)
class RadicalValue:
    """A value coeff * sqrt(radicand) with the radical kept symbolic.

    The radicand is the only irrational (possibly negative) factor appearing
    in the normalized eigenvalues; keeping it split lets exact tests avoid
    floating square roots.  It is a Fraction on the exact path and a float
    on the floating path.
    """

    coeff: ExtendedScalar
    radicand: Union[Fraction, float]

    def to_complex(self) -> complex:
        return complex(self.coeff.to_float()) * cmath.sqrt(complex(self.radicand))

    def to_float(self) -> float:
        z = self.to_complex()
        if z.imag != 0.0:
            raise ValueError(f"value {self} is not real")
        return z.real

    def serialize(self) -> dict:
        radicand = format_fraction(self.radicand) \
            if isinstance(self.radicand, Fraction) else repr(self.radicand)
        return {"coeff": self.coeff.serialize(), "radicand": radicand}


def normalized_eigenvalue(family: Family, params: BundleParams,
                          pt: SpectralPoint, r: ScalarLike) -> RadicalValue:
    """Normalized intertwinor eigenvalue on a multiplicity-one family.

    The gamma-quotient part is carried exactly in ``coeff``; the family's
    normalization radical sqrt((s+r)/(s-r)) (coexact) or its reciprocal
    (exact) is returned as the radicand.  Degenerates when s = +-r.
    """
    if family is Family.MIXED:
        raise ValueError("mixed family carries a 2x2 block, not a single eigenvalue")
    s = params.s
    if s == r or s == -r:
        raise DegenerateNormalizationError(
            f"normalization breaks at s = {format_fraction(s)} with r = {r}")
    if isinstance(r, float):
        ratio = (float(s) + r) / (float(s) - r)
        radicand = ratio if family is Family.COEXACT else 1.0 / ratio
    elif family is Family.COEXACT:
        radicand = Fraction(s + r) / Fraction(s - r)
    else:
        radicand = Fraction(s - r) / Fraction(s + r)
    return RadicalValue(mult1_eigenvalue(pt, r), radicand)
