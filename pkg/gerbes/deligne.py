"""
Deligne cochains (g, omega^1, ..., omega^p) over a finite cover.

Conventions: the Cech differential is (delta c)_{i0..iq+1} = sum_k (-1)^k
c_{i0..^ik..iq+1}. A degree-p cochain is a cocycle when delta g = 0 mod 1
and delta omega^r = (-1)^(p-r) d omega^(r-1) for r = 1..p, with omega^0 = g
and d g the logarithmic derivative (divided by 2*pi*i). Values are stored
for sorted chart tuples; other orders are resolved by the alternating rule.
"""

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .circle import EXACT, FLOAT, wrap
from .conf import setting
from .exceptions import EvaluationError, ParameterError, PreconditionError, StructuralError
from .forms import (AngleCombination, AngleField, ConstantAngle, FormField, LinearCombination,
                    PulledBackAngle, PulledBackForm, TrigAngle, TrigForm, ZeroForm)
from .quadrature import permutation_sign
from .simplicial import sample_points

logger = logging.getLogger(__name__)


def _sorted_with_sign(charts):
    charts = tuple(charts)
    order = sorted(range(len(charts)), key=lambda i: charts[i])
    return tuple(charts[i] for i in order), permutation_sign(order)


class CechCochain:
    """Values on (q+1)-tuples of chart ids: angle fields (form_degree 0) or forms"""

    def __init__(self, degree, values=None, form_degree=0):
        self.degree = degree
        self.form_degree = form_degree
        self._values = {}
        for charts, value in (values or {}).items():
            self[charts] = value

    @property
    def is_angle(self):
        return self.form_degree == 0

    def _zero(self):
        return ConstantAngle(0) if self.is_angle else ZeroForm(self.form_degree)

    def __setitem__(self, charts, value):
        charts = tuple(charts)
        if len(charts) != self.degree + 1:
            raise StructuralError(f'tuple {charts} does not have {self.degree + 1} charts')
        if len(set(charts)) != len(charts):
            return
        key, sign = _sorted_with_sign(charts)
        self._values[key] = value if sign > 0 else -value

    def keys(self):
        return sorted(self._values)

    def stored(self, key):
        return self._values.get(tuple(key))

    def component(self, charts):
        """Value on an ordered tuple; zero on repeated charts, None when absent"""
        charts = tuple(charts)
        if len(set(charts)) != len(charts):
            return self._zero()
        key, sign = _sorted_with_sign(charts)
        value = self._values.get(key)
        if value is None:
            return None
        return value if sign > 0 else -value

    def require(self, charts):
        value = self.component(charts)
        if value is None:
            raise StructuralError(f'missing value on overlap {tuple(charts)}')
        return value

    def mapped(self, fn):
        return CechCochain(self.degree, {key: fn(value) for key, value in self._values.items()},
                           self.form_degree)


@dataclass
class DeligneCochain:
    """Local data of a degree-p Deligne class: components[0] = g, components[r] = omega^r"""
    degree: int
    cover: object
    components: list
    backend: str = FLOAT
    name: str = ''

    def __post_init__(self):
        if self.degree not in (1, 2, 3):
            raise ParameterError('Deligne degree must be 1, 2 or 3')
        if len(self.components) != self.degree + 1:
            raise StructuralError('a degree-p cochain has p+1 components')
        for r, component in enumerate(self.components):
            if component.degree != self.degree - r or component.form_degree != r:
                raise StructuralError(f'component {r} has the wrong shape')

    @property
    def g(self):
        return self.components[0]

    def omega(self, r):
        return self.components[r]


def _all_tuples(cover, length):
    return list(itertools.combinations(cover.ids, length))


def trivial(cover, degree, backend=EXACT):
    """The identity class: g = 1 and every omega zero, stored on all chart tuples"""
    components = []
    for r in range(degree + 1):
        zero = ConstantAngle(0) if r == 0 else ZeroForm(r)
        components.append(CechCochain(degree - r, {c: zero for c in _all_tuples(cover, degree - r + 1)}, r))
    return DeligneCochain(degree, cover, components, backend, 'trivial')


def _differential(value):
    """d of a component value: logarithmic derivative for angles"""
    return value.derivative()


def cech_delta(cochain, charts):
    """(delta c) on an ordered tuple as a lazily combined field"""
    terms = []
    for k in range(len(charts)):
        face = charts[:k] + charts[k + 1:]
        terms.append(((-1) ** k, cochain.require(face)))
    if cochain.is_angle:
        return AngleCombination(terms)
    return LinearCombination([(float(c), v) for c, v in terms])


def nerve(cover, points, max_length):
    """Sorted chart tuples with nonempty sampled support, mapped to point indices"""
    membership = np.column_stack([cover.contains(chart_id, points) for chart_id in cover.ids])
    ids = cover.ids
    support = {}
    for length in range(1, max_length + 1):
        for combo in itertools.combinations(range(len(ids)), length):
            mask = np.all(membership[:, combo], axis=1)
            if mask.any():
                support[tuple(ids[i] for i in combo)] = np.flatnonzero(mask)
    return support


def _point_pool(K, points, samples, cover, seed):
    if points is not None:
        return np.asarray(points, dtype=float)
    if K is None:
        raise ParameterError('either a complex or explicit sample points are required')
    rng = np.random.default_rng(seed)
    return sample_points(K, max(samples * len(cover.ids) * 4, 200), rng)


@dataclass
class DifferentialReport:
    """Per-rung maximum residuals of the total differential"""
    residuals: list
    worst: dict = field(default_factory=dict)
    checked: dict = field(default_factory=dict)

    @property
    def maximum(self):
        return max(self.residuals) if self.residuals else 0.0

    def as_dict(self):
        return {
            'residuals': [float(r) for r in self.residuals],
            'worst': {str(r): list(t) for r, t in sorted(self.worst.items())},
            'checked': {str(r): n for r, n in sorted(self.checked.items())},
        }


def deligne_differential(xi, K=None, points=None, samples=None, seed=None):
    """Residuals of delta g = 0 and delta omega^r = (-1)^(p-r) d omega^(r-1)"""
    samples = setting('COCYCLE_SAMPLES') if samples is None else samples
    seed = setting('SEED') if seed is None else seed
    p = xi.degree
    pool = _point_pool(K, points, samples, xi.cover, seed)
    support = nerve(xi.cover, pool, p + 2)
    rng = np.random.default_rng(seed + 1)
    residuals, worst, checked = [], {}, {}

    for rung in range(p + 1):
        length = p - rung + 2
        worst_value, count = 0.0, 0
        for charts, indices in support.items():
            if len(charts) != length:
                continue
            count += 1
            at = pool[indices[:samples]]
            if rung == 0:
                delta = cech_delta(xi.g, charts)
                if xi.backend == EXACT and delta.exact_value is not None:
                    residual = float(abs(wrap(delta.exact_value)))
                else:
                    values = delta.evaluate(charts[0], at)
                    if not np.all(np.isfinite(values)):
                        raise EvaluationError(f'g is undefined on overlap {charts}')
                    residual = float(np.max(np.abs(wrap(values))))
            else:
                vectors = rng.normal(size=(at.shape[0], rung, at.shape[1]))
                lhs = cech_delta(xi.omega(rung), charts).evaluate(charts[0], at, vectors)
                below = xi.components[rung - 1].require(charts)
                rhs = (-1) ** (p - rung) * _differential(below).evaluate(charts[0], at, vectors)
                residual = float(np.max(np.abs(lhs - rhs)))
            if residual > worst_value:
                worst_value, worst[rung] = residual, charts
        residuals.append(worst_value)
        checked[rung] = count
    logger.debug('differential residuals %s', residuals)
    return DifferentialReport(residuals, worst, checked)


def is_cocycle(xi, tol=None, samples=None, K=None, points=None, seed=None):
    """True iff every rung residual is at most ``tol``; the report is returned alongside"""
    tol = setting('COCYCLE_TOLERANCE') if tol is None else tol
    if tol <= 0:
        raise ParameterError('tolerance must be positive')
    report = deligne_differential(xi, K=K, points=points, samples=samples, seed=seed)
    if xi.backend == EXACT and report.residuals and report.residuals[0] != 0 and _all_exact(xi.g):
        return False, report
    ok = report.maximum <= tol
    if not ok:
        logger.warning('cocycle check failed for %s: residuals %s', xi.name or 'cochain', report.residuals)
    return ok, report


def _all_exact(cochain):
    return all(cochain.stored(key).exact_value is not None for key in cochain.keys())


class CurvatureForm(FormField):
    """d omega^p read in whichever chart the caller names"""

    def __init__(self, xi):
        super().__init__(xi.degree + 1)
        self.xi = xi
        self._by_chart = {}

    def chart_form(self, chart):
        if chart not in self._by_chart:
            self._by_chart[chart] = self.xi.omega(self.xi.degree).require((chart,)).derivative()
        return self._by_chart[chart]

    def evaluate(self, chart, points, vectors):
        return self.chart_form(chart).evaluate(chart, points, vectors)


@dataclass
class GlobalityReport:
    residual: float
    passed: bool
    worst: tuple = ()


def curvature(xi, K=None, points=None, tol=None, samples=None, seed=None):
    """The curvature form and a report on chart agreement over pairwise overlaps"""
    tol = setting('COCYCLE_TOLERANCE') if tol is None else tol
    samples = setting('COCYCLE_SAMPLES') if samples is None else samples
    seed = setting('SEED') if seed is None else seed
    form = CurvatureForm(xi)
    if K is None and points is None:
        return form, GlobalityReport(0.0, True)
    pool = _point_pool(K, points, samples, xi.cover, seed)
    rng = np.random.default_rng(seed + 2)
    worst, worst_pair = 0.0, ()
    for charts, indices in nerve(xi.cover, pool, 2).items():
        if len(charts) != 2:
            continue
        at = pool[indices[:samples]]
        vectors = rng.normal(size=(at.shape[0], xi.degree + 1, at.shape[1]))
        i, j = charts
        residual = float(np.max(np.abs(form.evaluate(i, at, vectors) - form.evaluate(j, at, vectors))))
        if residual > worst:
            worst, worst_pair = residual, charts
    passed = worst <= tol
    if not passed:
        logger.warning('curvature disagrees on overlap %s by %.3g', worst_pair, worst)
    return form, GlobalityReport(worst, passed, worst_pair)


def _lift_along(angle, chart, start, start_value, target, path_map, period, steps=64):
    delta = target - start
    for axis, p in enumerate(period):
        if p:
            delta[axis] -= p * np.round(delta[axis] / p)
    t = np.linspace(0.0, 1.0, steps + 1)[:, None]
    path = path_map(start[None, :] + t * delta[None, :])
    values = angle.evaluate(chart, path)
    if not np.all(np.isfinite(values)):
        raise EvaluationError('g is undefined along a lifting path')
    increments = wrap(np.diff(values))
    return start_value + float(np.sum(increments))


def characteristic_class(xi, K, points=None, samples=None, seed=None, offsets_seed=None, tol=0.25):
    """Integer Cech (p+1)-cocycle from continuous logarithms of g on each overlap.

    Each (p+1)-fold overlap gets a principal logarithm at its first sample
    point (plus a random integer when ``offsets_seed`` is given), continued
    along straight paths pushed through the complex's parametrization.
    Overlaps must be star-shaped about that base point for the continuation.
    """
    samples = setting('COCYCLE_SAMPLES') if samples is None else samples
    seed = setting('SEED') if seed is None else seed
    p = xi.degree
    pool = _point_pool(K, points, samples, xi.cover, seed)
    support = nerve(xi.cover, pool, p + 2)
    offsets = np.random.default_rng(offsets_seed) if offsets_seed is not None else None
    period = K.period if K is not None else (None,) * pool.shape[1]
    path_map = K.parametrization.map if K is not None else (lambda x: x)

    bases = {}
    for charts, indices in support.items():
        if len(charts) != p + 1:
            continue
        g = xi.g.require(charts)
        base = pool[indices[0]]
        value = g.evaluate(charts[0], base[None, :])[0]
        if not np.isfinite(value):
            raise EvaluationError(f'g is undefined at the base point of {charts}')
        principal = float(value % 1.0)
        if offsets is not None:
            principal += int(offsets.integers(-3, 4))
        bases[charts] = (g, base, principal)

    cocycle = {}
    for charts, indices in support.items():
        if len(charts) != p + 2:
            continue
        x = pool[indices[0]]
        total = 0.0
        for k in range(len(charts)):
            face = charts[:k] + charts[k + 1:]
            g, base, start = bases[face]
            total += (-1) ** k * _lift_along(g, face[0], base.copy(), start, x.copy(), path_map, period)
        rounded = int(np.round(total))
        if abs(total - rounded) > tol:
            raise EvaluationError(f'winding defect on {charts} is not close to an integer ({total:.4f})')
        cocycle[charts] = rounded
    return cocycle


def pair_with_nerve_cycle(cocycle, cycle):
    """Evaluate an integer cocycle on an integer chain of nerve simplices"""
    total = 0
    for charts, coefficient in cycle.items():
        key, sign = _sorted_with_sign(charts)
        if key not in cocycle:
            raise StructuralError(f'nerve simplex {key} has empty overlap')
        total += sign * coefficient * cocycle[key]
    return total


@dataclass
class LowerDeligneData:
    """eta = (f, eta^1, ..., eta^(p-1)) generating the coboundary D(eta) of degree p"""
    degree: int
    components: list


def coboundary(eta, cover, backend=FLOAT):
    """D(eta): g = delta f, omega^r = delta eta^r + (-1)^(p-r) d eta^(r-1), omega^p = d eta^(p-1)"""
    p = eta.degree
    if len(eta.components) != p:
        raise StructuralError('lower Deligne data of degree p has p components')
    components = []
    for r in range(p + 1):
        cochain = CechCochain(p - r, {}, r)
        for charts in _all_tuples(cover, p - r + 1):
            if r == 0:
                cochain[charts] = cech_delta(eta.components[0], charts)
                continue
            terms = [((-1) ** (p - r), _differential(eta.components[r - 1].require(charts)))]
            if r < p:
                terms.append((1, cech_delta(eta.components[r], charts)))
            cochain[charts] = LinearCombination([(float(c), v) for c, v in terms])
        components.append(cochain)
    return DeligneCochain(p, cover, components, backend, 'coboundary')


def random_coboundary_data(cover, degree, dim, rng, amplitude=0.3, max_frequency=1):
    """Seeded smooth eta on every chart tuple; integer frequencies keep tori periodic"""
    components = []
    for r in range(degree):
        cochain = CechCochain(degree - 1 - r, {}, r)
        for charts in _all_tuples(cover, degree - r):
            if r == 0:
                cochain[charts] = TrigAngle.random(dim, rng, amplitude=amplitude, max_frequency=max_frequency)
            else:
                cochain[charts] = TrigForm.random(r, dim, rng, amplitude=amplitude, max_frequency=max_frequency)
        components.append(cochain)
    return LowerDeligneData(degree, components)


def _combine(a, b, sign):
    if a is None and b is None:
        return None
    if isinstance(a, AngleField) or isinstance(b, AngleField):
        a = a if a is not None else ConstantAngle(0)
        b = b if b is not None else ConstantAngle(0)
        return AngleCombination([(1, a), (sign, b)])
    terms = [(1.0, a)] if a is not None else []
    if b is not None:
        terms.append((float(sign), b))
    return LinearCombination(terms)


def add(xi, eta, sign=1):
    """Componentwise sum (the group law); both cochains must share cover and degree"""
    if xi.degree != eta.degree or xi.cover.ids != eta.cover.ids:
        raise StructuralError('cannot add cochains over different covers or degrees')
    components = []
    for a, b in zip(xi.components, eta.components):
        keys = sorted(set(a.keys()) | set(b.keys()))
        components.append(CechCochain(a.degree, {k: _combine(a.stored(k), b.stored(k), sign) for k in keys},
                                      a.form_degree))
    backend = EXACT if xi.backend == EXACT and eta.backend == EXACT else FLOAT
    return DeligneCochain(xi.degree, xi.cover, components, backend, f'{xi.name}+{eta.name}')


def negate(xi):
    return DeligneCochain(xi.degree, xi.cover, [c.mapped(lambda v: -v) for c in xi.components],
                          xi.backend, f'-{xi.name}')


def global_form_class(rho, cover, backend=FLOAT):
    """The class [1, 0, ..., rho] of a global p-form, with explicit zeros on every overlap"""
    p = rho.degree
    components = []
    for r in range(p):
        zero = ConstantAngle(0) if r == 0 else ZeroForm(r)
        components.append(CechCochain(p - r, {c: zero for c in _all_tuples(cover, p - r + 1)}, r))
    components.append(CechCochain(0, {(chart,): rho for chart in cover.ids}, p))
    return DeligneCochain(p, cover, components, backend, 'global form')


def pullback(xi, cover, chart_map, mapping, pushforward):
    """f^* xi for a smooth map f sending each new chart into the old chart ``chart_map[new]``"""
    for new, old in chart_map.items():
        if new not in cover or old not in xi.cover:
            raise StructuralError(f'chart mismatch on pullback: {new} -> {old}')
    components = []
    for r, component in enumerate(xi.components):
        cochain = CechCochain(component.degree, {}, r)
        for charts in _all_tuples(cover, component.degree + 1):
            old = tuple(chart_map[c] for c in charts)
            value = component.component(old)
            if value is None:
                continue
            if r == 0:
                cochain[charts] = PulledBackAngle(value, mapping, pushforward, lambda c, m=chart_map: m.get(c, c))
            else:
                cochain[charts] = PulledBackForm(value, mapping, pushforward, lambda c, m=chart_map: m.get(c, c))
        components.append(cochain)
    return DeligneCochain(xi.degree, cover, components, xi.backend, f'pullback of {xi.name}')


def check_precondition(xi, K=None, points=None, tol=None):
    ok, report = is_cocycle(xi, tol=tol, K=K, points=points)
    if not ok:
        raise PreconditionError(f'{xi.name or "cochain"} is not a cocycle (residuals {report.residuals})')
    return report


