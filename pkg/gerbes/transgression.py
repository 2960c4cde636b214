"""
Integration over the circle: degree-3 data on S^1 x N to degree-2 data on N.

The circle coordinate comes first. Fibre integration contracts d/dt in the
last slot, pi(w)(v_1..v_k) = int_0^1 w((t, x); v_1, .., v_k, d/dt) dt, so that
d pi = pi d. The transgressed holonomy of a 2-cycle c is the holonomy of the
input on the prism chain S^1 x c, which for 2-cycles agrees with c x S^1.
"""

import itertools
import logging

import numpy as np

from .circle import FLOAT, wrap
from .conf import setting
from .deligne import CechCochain, CurvatureForm, DeligneCochain, characteristic_class, nerve, pair_with_nerve_cycle
from .exceptions import ParameterError, PreconditionError, StructuralError
from .forms import AngleField, FiniteDifferenceDerivative, FormField
from .holonomy import holonomy
from .multiplicative import ColoringCharacter, cocycle_violations, mapping_cylinder_weight
from .quadrature import circle_nodes
from .reports import CheckReport
from .simplicial import (Cover, boundary, circle_product_chain, integrate_form, product_subordination,
                         product_with_circle, sample_points)

logger = logging.getLogger(__name__)


class DifferentialCharacter:
    """A holonomy oracle on p-cycles together with its curvature (p+1)-form"""

    def __init__(self, degree, oracle, curvature, name=''):
        self.degree = degree
        self.oracle = oracle
        self.curvature = curvature
        self.name = name
        self.reports = []

    def holonomy(self, K, cycle, subordination):
        if not boundary(cycle).is_empty():
            raise PreconditionError('holonomy is only defined on cycles')
        return self.oracle(K, cycle, subordination)

    def check(self, K, sigma, subordination, tol=None):
        """Character property: holonomy of the boundary against the curvature integral"""
        tol = setting('HOLONOMY_TOLERANCE') if tol is None else tol
        value = self.holonomy(K, boundary(sigma), subordination)
        flux, _ = integrate_form(self.curvature, K, sigma, subordination)
        residual = float(abs(wrap(float(value.angle) - flux)))
        passed = residual <= tol
        if not passed:
            logger.warning('character property of %s fails by %.3g', self.name, residual)
        return CheckReport(f'character property {self.name}'.strip(), passed, residual,
                           {'holonomy': value, 'flux': flux})

    def tabulate(self, K, cycles, subordination):
        return {name: str(self.holonomy(K, cycle, subordination)) for name, cycle in sorted(cycles.items())}


def split_product_cover(cover):
    """Circle arcs and base charts of a product cover"""
    if not cover.charts or not cover.is_product():
        raise StructuralError('transgression needs a cover by products of circle arcs and base charts')
    arcs, bases = {}, {}
    for chart in cover.charts:
        arcs.setdefault(chart.params['left'].id, chart.params['left'])
        bases.setdefault(chart.params['right'].id, chart.params['right'])
    for arc in arcs.values():
        for base in bases.values():
            if f'{arc.id}|{base.id}' not in cover:
                raise StructuralError(f'product chart {arc.id}|{base.id} is missing')
    return Cover(arcs.values()), Cover(bases.values())


class FiberIntegral(FormField):
    """pi(w) for a form w on S^1 x N, trapezoid rule on the circle factor"""

    def __init__(self, form, arcs, nodes=None):
        super().__init__(form.degree - 1)
        if form.degree < 1:
            raise ParameterError('only forms of positive degree can be integrated over the fibre')
        self.form = form
        self.arcs = arcs
        self.nodes = setting('CIRCLE_NODES') if nodes is None else nodes
        self.analytic = form.analytic
        times, weights = circle_nodes(self.nodes)
        self._times = times
        self._weights = weights
        self._arc_of = [self._arc_at(t) for t in times]

    def _arc_at(self, t):
        for arc in sorted(self.arcs.charts, key=lambda c: c.id):
            if arc.contains(np.array([[t]]))[0]:
                return arc.id
        raise StructuralError(f'no circle arc contains t = {t}')

    def evaluate(self, chart, points, vectors):
        m, n = points.shape
        k = vectors.shape[1]
        lifted_vectors = np.zeros((m, k + 1, n + 1))
        lifted_vectors[:, :k, 1:] = vectors
        lifted_vectors[:, k, 0] = 1.0
        total = np.zeros(m)
        for t, weight, arc in zip(self._times, self._weights, self._arc_of):
            lifted = np.column_stack([np.full(m, t), points])
            total += weight * self.form.evaluate(f'{arc}|{chart}', lifted, lifted_vectors)
        return total

    def exterior_derivative(self):
        if not self.form.analytic:
            return None
        return FiberIntegral(self.form.derivative(), self.arcs, self.nodes)


class FiberAngle(AngleField):
    """The real function pi(A) of a 1-form, read as an angle"""

    def __init__(self, form, arcs, nodes=None):
        self.integral = FiberIntegral(form, arcs, nodes)
        self.analytic = form.analytic

    def evaluate(self, chart, points):
        points = np.atleast_2d(points)
        return self.integral.evaluate(chart, points, np.zeros((points.shape[0], 0, points.shape[1])))

    def logarithmic_derivative(self):
        return self.integral.exterior_derivative()


def transgress_over_circle(xi, n_circle=3, nodes=None, test_chains=()):
    """The degree-2 character on N whose holonomy is hol(xi, S^1 x c) and curvature pi(curv xi).

    ``test_chains`` holds (K, sigma, subordination) triples on which the
    character property is verified; the reports land on ``character.reports``.
    """
    if xi.degree != 3:
        raise ParameterError('transgression takes degree-3 data')
    arcs, _ = split_product_cover(xi.cover)

    def oracle(K, cycle, subordination):
        product = product_with_circle(K, n_circle)
        chain = circle_product_chain(cycle, len(K.coordinates), n_circle)
        s = product_subordination(product, subordination, arcs)
        return holonomy(xi, product, chain, s).value

    character = DifferentialCharacter(2, oracle, FiberIntegral(CurvatureForm(xi), arcs, nodes),
                                      f'transgression of {xi.name}')
    for K, sigma, subordination in test_chains:
        character.reports.append(character.check(K, sigma, subordination))
    return character


def transgress_cochain(xi, nodes=None):
    """Cochain-level fibre integral (pi A, pi B, pi C) for a cover whose circle factor is one whole arc"""
    if xi.degree != 3:
        raise ParameterError('transgression takes degree-3 data')
    arcs, base = split_product_cover(xi.cover)
    if len(arcs.charts) != 1 or not arcs.charts[0].contains(np.linspace(0, 1, 17)[:, None]).all():
        raise StructuralError('cochain transgression needs a single whole-circle arc')
    arc = arcs.ids[0]

    def lift(charts):
        return tuple(f'{arc}|{c}' for c in charts)

    components = [CechCochain(2, {}, 0), CechCochain(1, {}, 1), CechCochain(0, {}, 2)]
    for r, component in enumerate(components):
        length = 3 - r
        source = xi.omega(r + 1)
        for charts in itertools.combinations(base.ids, length):
            value = source.component(lift(charts))
            if value is None:
                continue
            component[charts] = FiberAngle(value, arcs, nodes) if r == 0 else FiberIntegral(value, arcs, nodes)
    return DeligneCochain(2, base, components, FLOAT, f'pi({xi.name})')


def _base_pool(K, points, samples, seed):
    if points is not None:
        return np.asarray(points, dtype=float)
    return sample_points(K, samples, np.random.default_rng(seed))


def curvature_diagram_check(xi, K, points=None, samples=100, seed=None, tol=1e-6, nodes=None):
    """d(pi C) by finite differences against pi(curv xi), chart by chart at sample points"""
    seed = setting('SEED') if seed is None else seed
    transgressed = transgress_cochain(xi, nodes)
    arcs, base = split_product_cover(xi.cover)
    fibre_curvature = FiberIntegral(CurvatureForm(xi), arcs, nodes)
    pool = _base_pool(K, points, samples, seed)
    rng = np.random.default_rng(seed + 3)
    worst, worst_chart = 0.0, None
    for chart in base.ids:
        inside = pool[base.contains(chart, pool)]
        if not len(inside):
            continue
        vectors = rng.normal(size=(inside.shape[0], 3, inside.shape[1]))
        lhs = FiniteDifferenceDerivative(transgressed.omega(2).require((chart,))).evaluate(chart, inside, vectors)
        rhs = fibre_curvature.evaluate(chart, inside, vectors)
        residual = float(np.max(np.abs(lhs - rhs)))
        if residual > worst:
            worst, worst_chart = residual, chart
    passed = worst <= tol
    if not passed:
        logger.warning('curvature diagram fails on chart %s by %.3g', worst_chart, worst)
    return CheckReport('curvature diagram', passed, worst, {'points': int(pool.shape[0]), 'worst_chart': worst_chart})


def fibre_windings(xi, K, points=None, samples=None, seed=None, steps=None):
    """Winding numbers of g along the circle fibre over each base 4-fold overlap"""
    samples = setting('COCYCLE_SAMPLES') if samples is None else samples
    seed = setting('SEED') if seed is None else seed
    steps = setting('CIRCLE_NODES') if steps is None else steps
    arcs, base = split_product_cover(xi.cover)
    arc = arcs.ids[0]
    pool = _base_pool(K, points, max(samples * len(base.ids) * 4, 200), seed)
    times = np.linspace(0.0, 1.0, steps + 1)
    windings = {}
    for charts, indices in nerve(base, pool, 4).items():
        if len(charts) != 4:
            continue
        x = pool[indices[0]]
        g = xi.g.require(tuple(f'{arc}|{c}' for c in charts))
        path = np.column_stack([times, np.tile(x, (len(times), 1))])
        values = g.evaluate(f'{arc}|{charts[0]}', path)
        windings[charts] = int(np.round(np.sum(wrap(np.diff(values)))))
    return windings, pool


def _integer_defects(cocycle, support):
    defects = []
    for charts in support:
        if len(charts) != 5:
            continue
        total = sum((-1) ** k * cocycle.get(charts[:k] + charts[k + 1:], 0) for k in range(5))
        if total:
            defects.append(list(charts))
    return defects


def class_diagram_check(xi, K, nerve_cycles=(), points=None, samples=None, seed=None, nodes=None):
    """Integer class of pi(xi) against the fibre windings of g (the slant of the input class)"""
    windings, pool = fibre_windings(xi, K, points=points, samples=samples, seed=seed)
    transgressed = transgress_cochain(xi, nodes)
    integer_class = characteristic_class(transgressed, K, points=pool)
    support = nerve(transgressed.cover, pool, 5)
    defects = _integer_defects(integer_class, support) + _integer_defects(windings, support)
    pairings = []
    for cycle in nerve_cycles:
        pairings.append({'cycle': {','.join(k): v for k, v in cycle.items()},
                         'transgressed': pair_with_nerve_cycle(integer_class, cycle),
                         'slant': pair_with_nerve_cycle(windings, cycle)})
    mismatched = [p for p in pairings if p['transgressed'] != p['slant']]
    passed = not defects and not mismatched
    if not passed:
        logger.warning('class diagram fails: %d cocycle defects, %d mismatched pairings', len(defects), len(mismatched))
    return CheckReport('class diagram', passed, len(defects) + len(mismatched),
                       {'transgressed': {','.join(k): v for k, v in sorted(integer_class.items())},
                        'slant': {','.join(k): v for k, v in sorted(windings.items())},
                        'pairings': pairings, 'defects': defects})


def psi_finite_group(group, omega, n_circle=3):
    """Transgressed 2-holonomy in the finite model: DW weight of S^1 x Sigma with circle holonomy x"""
    violations = cocycle_violations(omega)
    if violations:
        point, defect = violations[0]
        raise PreconditionError(f'{omega.name or "omega"} fails the cocycle identity at '
                                f'{tuple(group.label(g) for g in point)} by {defect}')
    return ColoringCharacter(group, lambda x, coloring: mapping_cylinder_weight(omega, coloring, x, n_circle),
                             f'psi({omega.name})')


def character_from_cochain(xi):
    """The character (hol, curv) of a Deligne cocycle, for comparison with transgressed characters"""
    def oracle(K, cycle, subordination):
        return holonomy(xi, K, cycle, subordination).value
    return DifferentialCharacter(xi.degree, oracle, CurvatureForm(xi), xi.name)

