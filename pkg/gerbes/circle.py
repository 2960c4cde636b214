"""
U(1) values written additively as angles in R/Z.

The group element is exp(2*pi*i*angle). The exact backend keeps angles as
``Fraction`` in [0, 1); the floating backend keeps floats in [0, 1).
"""

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np

EXACT = 'exact'
FLOAT = 'float'


def wrap(x):
    """Representative of x mod 1 in [-1/2, 1/2), elementwise for arrays"""
    if isinstance(x, Rational):
        r = Fraction(x) % 1
        return r - 1 if r >= Fraction(1, 2) else r
    return np.asarray(x, dtype=float) - np.floor(np.asarray(x, dtype=float) + 0.5)


def circular_distance(a, b):
    """Distance between two angles on R/Z, in [0, 1/2]"""
    return abs(wrap(a - b))


def format_angle(angle):
    """Exact rationals as 'p/q', floats with 12 significant digits"""
    if isinstance(angle, Rational):
        value = Fraction(angle) % 1
        return str(value)
    value = float(angle) % 1.0
    if 1.0 - value < 1e-12:
        value = 0.0
    return f'{value:.12g}'


@dataclass(frozen=True)
class CircleValue:
    """An element of U(1) stored as an angle"""
    angle: object
    backend: str = FLOAT

    def __post_init__(self):
        if self.backend == EXACT:
            object.__setattr__(self, 'angle', Fraction(self.angle) % 1)
        else:
            value = float(self.angle) % 1.0
            if value >= 1.0:
                value = 0.0
            object.__setattr__(self, 'angle', value)

    @classmethod
    def of(cls, angle):
        if isinstance(angle, Rational):
            return cls(Fraction(angle), EXACT)
        return cls(float(angle), FLOAT)

    @classmethod
    def identity(cls, backend=EXACT):
        return cls(0, backend)

    def _combine(self, other, angle):
        backend = EXACT if self.backend == EXACT and other.backend == EXACT else FLOAT
        return CircleValue(angle if backend == EXACT else float(angle), backend)

    def __add__(self, other):
        return self._combine(other, self.angle + other.angle)

    def __sub__(self, other):
        return self._combine(other, self.angle - other.angle)

    def __neg__(self):
        return CircleValue(-self.angle, self.backend)

    def __mul__(self, n):
        if not isinstance(n, int):
            raise TypeError('CircleValue can only be raised to integer powers')
        return CircleValue(self.angle * n, self.backend)

    __rmul__ = __mul__

    def distance(self, other):
        return float(circular_distance(self.angle, other.angle))

    def close_to(self, other, tol):
        if self.backend == EXACT and other.backend == EXACT:
            return self.angle == other.angle
        return self.distance(other) <= tol

    def to_complex(self):
        return complex(np.exp(2j * np.pi * float(self.angle)))

    def __str__(self):
        return format_angle(self.angle)
