"""
Differential forms and U(1)-valued functions given by vectorised evaluators.

Forms are stored as real coefficients of (form / 2*pi*i), so that periods of
curvature forms of Deligne classes are integers. Every evaluator takes a
chart id, points of shape (m, n) and tangent vectors of shape (m, r, n), and
returns an array of shape (m,). All charts share the ambient coordinates.
"""

import logging
from fractions import Fraction

import numpy as np

from .circle import wrap
from .conf import setting

logger = logging.getLogger(__name__)


def _directional(fn, points, direction, h):
    return (-fn(points + 2 * h * direction) + 8 * fn(points + h * direction)
            - 8 * fn(points - h * direction) + fn(points - 2 * h * direction)) / (12 * h)


def _minor_determinants(vectors, index):
    if len(index) == 0:
        return np.ones(vectors.shape[0])
    sub = vectors[:, :, list(index)]
    return np.linalg.det(sub)


class FormField:
    """A differential form of fixed degree with an optional analytic derivative"""
    analytic = False

    def __init__(self, degree):
        self.degree = degree

    def evaluate(self, chart, points, vectors):
        raise NotImplementedError

    def exterior_derivative(self):
        return None

    def derivative(self):
        analytic = self.exterior_derivative()
        if analytic is not None:
            return analytic
        return FiniteDifferenceDerivative(self)

    def __add__(self, other):
        return LinearCombination([(1.0, self), (1.0, other)])

    def __sub__(self, other):
        return LinearCombination([(1.0, self), (-1.0, other)])

    def __neg__(self):
        return LinearCombination([(-1.0, self)])

    def __rmul__(self, scalar):
        return LinearCombination([(float(scalar), self)])

    def __call__(self, chart, points, vectors):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        vectors = np.asarray(vectors, dtype=float).reshape(points.shape[0], self.degree, points.shape[1])
        return self.evaluate(chart, points, vectors)


class ZeroForm(FormField):
    analytic = True

    def evaluate(self, chart, points, vectors):
        return np.zeros(points.shape[0])

    def exterior_derivative(self):
        return ZeroForm(self.degree + 1)


class ConstantForm(FormField):
    """Sum of c_I dx^I with constant coefficients"""
    analytic = True

    def __init__(self, degree, coefficients):
        super().__init__(degree)
        self.coefficients = {tuple(index): float(value) for index, value in coefficients.items()}
        for index in self.coefficients:
            if len(index) != degree:
                raise ValueError(f'multi-index {index} does not match degree {degree}')

    def evaluate(self, chart, points, vectors):
        total = np.zeros(points.shape[0])
        for index, value in self.coefficients.items():
            total += value * _minor_determinants(vectors, index)
        return total

    def exterior_derivative(self):
        return ZeroForm(self.degree + 1)


class TrigForm(FormField):
    """Sum of a * sin(2*pi*k.x + phase) dx^I; the derivative is again a TrigForm"""
    analytic = True

    def __init__(self, degree, terms):
        super().__init__(degree)
        self.terms = [(tuple(index), float(a), np.asarray(k, dtype=float), float(phase))
                      for index, a, k, phase in terms]

    @classmethod
    def random(cls, degree, dim, rng, count=3, max_frequency=1, amplitude=0.3):
        terms = []
        for _ in range(count):
            index = tuple(sorted(rng.choice(dim, size=degree, replace=False).tolist())) if degree else ()
            k = rng.integers(-max_frequency, max_frequency + 1, size=dim)
            terms.append((index, amplitude * rng.uniform(-1, 1), k, rng.uniform(0, 2 * np.pi)))
        return cls(degree, terms)

    def evaluate(self, chart, points, vectors):
        total = np.zeros(points.shape[0])
        for index, a, k, phase in self.terms:
            total += a * np.sin(2 * np.pi * points @ k + phase) * _minor_determinants(vectors, index)
        return total

    def exterior_derivative(self):
        terms = []
        for index, a, k, phase in self.terms:
            for j, kj in enumerate(k):
                if kj != 0 and j not in index:
                    terms.append(((j,) + index, a * 2 * np.pi * kj, k, phase + np.pi / 2))
        return TrigForm(self.degree + 1, terms)


class CallableForm(FormField):
    def __init__(self, degree, fn, derivative=None):
        super().__init__(degree)
        self.fn = fn
        self._derivative = derivative
        self.analytic = derivative is not None

    def evaluate(self, chart, points, vectors):
        return np.asarray(self.fn(chart, points, vectors), dtype=float)

    def exterior_derivative(self):
        return self._derivative


class LinearCombination(FormField):
    def __init__(self, terms):
        flat = []
        for coefficient, form in terms:
            if isinstance(form, LinearCombination):
                flat.extend((coefficient * c, f) for c, f in form.terms)
            elif not isinstance(form, ZeroForm):
                flat.append((coefficient, form))
        degrees = {form.degree for _, form in terms}
        if len(degrees) > 1:
            raise ValueError(f'cannot add forms of degrees {sorted(degrees)}')
        super().__init__(degrees.pop() if degrees else 0)
        self.terms = flat
        self.analytic = all(form.analytic for _, form in flat)

    def evaluate(self, chart, points, vectors):
        total = np.zeros(points.shape[0])
        for coefficient, form in self.terms:
            total += coefficient * form.evaluate(chart, points, vectors)
        return total

    def exterior_derivative(self):
        if not self.analytic:
            return None
        if not self.terms:
            return ZeroForm(self.degree + 1)
        return LinearCombination([(c, form.derivative()) for c, form in self.terms])


class FiniteDifferenceDerivative(FormField):
    """d(omega)(u_0..u_r) = sum_i (-1)^i D_{u_i} omega(u_0..^u_i..u_r), fourth-order stencil"""

    def __init__(self, form, step=None):
        super().__init__(form.degree + 1)
        self.form = form
        self.step = setting('FINITE_DIFFERENCE_STEP') if step is None else step

    def evaluate(self, chart, points, vectors):
        total = np.zeros(points.shape[0])
        r = self.degree
        for i in range(r):
            rest = np.delete(vectors, i, axis=1)
            direction = vectors[:, i, :]
            total += (-1) ** i * _directional(
                lambda p: self.form.evaluate(chart, p, rest), points, direction, self.step)
        return total


class PulledBackForm(FormField):
    """phi^* omega for a smooth map given by ``map`` and its pushforward"""

    def __init__(self, form, mapping, pushforward, chart_map=None):
        super().__init__(form.degree)
        self.form = form
        self.mapping = mapping
        self.pushforward = pushforward
        self.chart_map = chart_map or (lambda chart: chart)
        self.analytic = form.analytic

    def evaluate(self, chart, points, vectors):
        images = self.mapping(points)
        pushed = self.pushforward(points, vectors)
        return self.form.evaluate(self.chart_map(chart), images, pushed)

    def exterior_derivative(self):
        if not self.form.analytic:
            return None
        return PulledBackForm(self.form.derivative(), self.mapping, self.pushforward, self.chart_map)


class AngleField:
    """A U(1)-valued function written as an angle in R/Z"""
    analytic = False
    exact_value = None

    def evaluate(self, chart, points):
        raise NotImplementedError

    def logarithmic_derivative(self):
        return None

    def derivative(self):
        """The 1-form d(angle), i.e. (d log g) / 2*pi*i"""
        analytic = self.logarithmic_derivative()
        if analytic is not None:
            return analytic
        return AngleDifferential(self)

    def __add__(self, other):
        return AngleCombination([(1, self), (1, other)])

    def __sub__(self, other):
        return AngleCombination([(1, self), (-1, other)])

    def __neg__(self):
        return AngleCombination([(-1, self)])

    def __rmul__(self, n):
        return AngleCombination([(n, self)])


class ConstantAngle(AngleField):
    analytic = True

    def __init__(self, value):
        if isinstance(value, float):
            self.exact_value = None
            self.value = value % 1.0
        else:
            self.exact_value = Fraction(value) % 1
            self.value = float(self.exact_value)

    def evaluate(self, chart, points):
        return np.full(np.atleast_2d(points).shape[0], self.value)

    def logarithmic_derivative(self):
        return ZeroForm(1)


class CallableAngle(AngleField):
    def __init__(self, fn, derivative=None):
        self.fn = fn
        self._derivative = derivative
        self.analytic = derivative is not None

    def evaluate(self, chart, points):
        return np.asarray(self.fn(chart, np.atleast_2d(points)), dtype=float)

    def logarithmic_derivative(self):
        return self._derivative


class TrigAngle(AngleField):
    """Sum of a * sin(2*pi*k.x + phase), taken mod 1"""
    analytic = True

    def __init__(self, terms):
        self.terms = [(float(a), np.asarray(k, dtype=float), float(phase)) for a, k, phase in terms]

    @classmethod
    def random(cls, dim, rng, count=3, max_frequency=1, amplitude=0.3):
        return cls([(amplitude * rng.uniform(-1, 1), rng.integers(-max_frequency, max_frequency + 1, size=dim),
                     rng.uniform(0, 2 * np.pi)) for _ in range(count)])

    def evaluate(self, chart, points):
        points = np.atleast_2d(points)
        total = np.zeros(points.shape[0])
        for a, k, phase in self.terms:
            total += a * np.sin(2 * np.pi * points @ k + phase)
        return total

    def logarithmic_derivative(self):
        terms = []
        for a, k, phase in self.terms:
            for j, kj in enumerate(k):
                if kj != 0:
                    terms.append(((j,), a * 2 * np.pi * kj, k, phase + np.pi / 2))
        return TrigForm(1, terms)


class AngleCombination(AngleField):
    def __init__(self, terms):
        flat = []
        for coefficient, angle in terms:
            if isinstance(angle, AngleCombination):
                flat.extend((coefficient * c, a) for c, a in angle.terms)
            else:
                flat.append((coefficient, angle))
        self.terms = flat
        self.analytic = all(angle.analytic for _, angle in flat)
        if all(angle.exact_value is not None for _, angle in flat):
            self.exact_value = sum((c * angle.exact_value for c, angle in flat), Fraction(0)) % 1

    def evaluate(self, chart, points):
        total = np.zeros(np.atleast_2d(points).shape[0])
        for coefficient, angle in self.terms:
            total += coefficient * angle.evaluate(chart, points)
        return total

    def logarithmic_derivative(self):
        if not self.analytic:
            return None
        if not self.terms:
            return ZeroForm(1)
        return LinearCombination([(float(c), angle.derivative()) for c, angle in self.terms])


class PulledBackAngle(AngleField):
    def __init__(self, angle, mapping, pushforward, chart_map=None):
        self.angle = angle
        self.mapping = mapping
        self.pushforward = pushforward
        self.chart_map = chart_map or (lambda chart: chart)
        self.analytic = angle.analytic
        self.exact_value = angle.exact_value

    def evaluate(self, chart, points):
        return self.angle.evaluate(self.chart_map(chart), self.mapping(np.atleast_2d(points)))

    def logarithmic_derivative(self):
        if not self.angle.analytic:
            return None
        return PulledBackForm(self.angle.derivative(), self.mapping, self.pushforward, self.chart_map)


class AngleDifferential(FormField):
    """Finite-difference d(angle), differencing on the circle"""

    def __init__(self, angle, step=None):
        super().__init__(1)
        self.angle = angle
        self.step = setting('FINITE_DIFFERENCE_STEP') if step is None else step

    def evaluate(self, chart, points, vectors):
        base = self.angle.evaluate(chart, points)
        direction = vectors[:, 0, :]

        def lifted(p):
            return base + wrap(self.angle.evaluate(chart, p) - base)

        return _directional(lifted, points, direction, self.step)


def antisymmetry_residual(form, chart, points, rng):
    """Largest relative defect of multilinearity and antisymmetry at ``points``"""
    m, n = points.shape
    r = form.degree
    if r == 0:
        return 0.0
    vectors = rng.normal(size=(m, r, n))
    base = form.evaluate(chart, points, vectors)
    scale = max(1.0, float(np.max(np.abs(base))))
    residual = 0.0
    if r >= 2:
        swapped = vectors.copy()
        swapped[:, [0, 1]] = swapped[:, [1, 0]]
        residual = max(residual, float(np.max(np.abs(form.evaluate(chart, points, swapped) + base))))
    extra = rng.normal(size=(m, n))
    a, b = rng.uniform(-2, 2, size=2)
    mixed = vectors.copy()
    mixed[:, 0] = a * vectors[:, 0] + b * extra
    other = vectors.copy()
    other[:, 0] = extra
    expected = a * base + b * form.evaluate(chart, points, other)
    residual = max(residual, float(np.max(np.abs(form.evaluate(chart, points, mixed) - expected))))
    return residual / scale
