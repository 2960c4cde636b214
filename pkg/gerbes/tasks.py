"""
Scenario tasks: build the referenced built-ins, run the computation and its checks.

Every task returns a ``TaskResult``; ``execute`` wraps it into the report
dictionary that the management commands render.
"""

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import registry
from .catalog import layered
from .chern_simons import (CUBIC_CONVENTIONS, CField, InvariantPolynomial, TEST_CYCLES, cfield_act,
                           cfield_equivalence_check, cs_explicit, cs_form_path, gauge_act_cfield, gauge_shift_check,
                           pure_gauge_constant, torus_integral)
from .circle import CircleValue
from .conf import setting
from .deligne import is_cocycle
from .exceptions import StructuralError
from .holonomy import character_property_check, holonomy
from .multiplicative import (check_triple, coloring_weight, commuting_tuples, dw_invariant, finite_triple,
                             genus_two_coloring, grid_coloring, multiplicativity_check)
from .reports import CheckReport, summarize
from .serializers import ColoringSerializer, build_inline
from .simplicial import barycentric_subdivide, genus_two_surface, torus
from .transgression import curvature_diagram_check, psi_finite_group, transgress_cochain, transgress_over_circle

logger = logging.getLogger(__name__)


@dataclass
class RunContext:
    seed: int
    tolerance: float = None
    threads: int = 1


@dataclass
class TaskResult:
    values: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)


def _tolerance(context, name):
    return context.tolerance if context.tolerance is not None else setting(name)


def _build(table, reference, **context):
    if 'format' in reference:
        return build_inline(reference, **context)
    return table.build(reference['name'], reference.get('params'), **context)


def _chain(scene, name):
    if name not in scene.chains:
        raise StructuralError(f'unknown chain {name!r}; the scene offers {", ".join(sorted(scene.chains))}')
    return scene.chains[name]


def _dimension(scene):
    return scene.K.ambient_dimension


def run_check_cocycle(inputs, context):
    scene = _build(registry.scenes, inputs['scene'])
    xi = _build(registry.cochains, inputs['cochain'], scene=scene)
    if inputs['layered_seed'] is not None:
        xi = layered(xi, _dimension(scene), inputs['layered_seed'])
    ok, report = is_cocycle(xi, tol=_tolerance(context, 'COCYCLE_TOLERANCE'), samples=inputs['samples'],
                            K=scene.K, seed=context.seed)
    passed = ok == inputs['expect_cocycle']
    return TaskResult({'cochain': xi.name, 'residuals': report.residuals},
                      [CheckReport(f'cocycle {xi.name}', passed, report.maximum, report.as_dict())])


def run_holonomy(inputs, context):
    tol = _tolerance(context, 'HOLONOMY_TOLERANCE')
    scene = _build(registry.scenes, inputs['scene'])
    xi = _build(registry.cochains, inputs['cochain'], scene=scene)
    K, s, cycle = scene.K, scene.subordination, _chain(scene, inputs['cycle'])
    sigma = _chain(scene, inputs['sigma']) if inputs.get('sigma') else None
    if inputs['subdivide']:
        K, s = barycentric_subdivide(scene.K, scene.subordination)
        cycle = K.subdivide_chain(cycle)
        sigma = K.subdivide_chain(sigma) if sigma is not None else None
    result = holonomy(xi, K, cycle, s, threads=context.threads)
    checks = []
    values = {'holonomy': result.value, 'diagnostics': result.diagnostics}
    if 'expected' in inputs:
        expected = CircleValue.of(inputs['expected'])
        distance = result.value.distance(expected)
        checks.append(CheckReport('expected holonomy', distance <= tol, distance,
                                  {'expected': expected, 'value': result.value}))
    for seed in inputs['layered_seeds']:
        other = holonomy(layered(xi, _dimension(scene), seed), K, cycle, s, threads=context.threads).value
        distance = result.value.distance(other)
        checks.append(CheckReport(f'representative invariance ({seed})', distance <= tol, distance,
                                  {'layered': other}))
    if sigma is not None:
        report = character_property_check(xi, K, sigma, s, tol)
        checks.append(CheckReport('character property', report.passed, report.residual, report.as_dict()))
    return TaskResult(values, checks)


def run_transgress(inputs, context):
    tol = _tolerance(context, 'HOLONOMY_TOLERANCE')
    scene = _build(registry.scenes, inputs['scene'])
    xi = _build(registry.cochains, inputs['cochain'], scene=scene)
    base = scene.base
    character = transgress_over_circle(xi, scene.n_circle)
    values, checks = {'cochain': xi.name}, []
    if inputs.get('cycle'):
        cycle = _chain(base, inputs['cycle'])
        value = character.holonomy(base.K, cycle, base.subordination)
        values['holonomy'] = value
        if 'expected' in inputs:
            expected = CircleValue.of(inputs['expected'])
            checks.append(CheckReport('expected transgressed holonomy', value.distance(expected) <= tol,
                                      value.distance(expected), {'expected': expected}))
        if inputs['cochain_level']:
            cochain = transgress_cochain(xi)
            other = holonomy(cochain, base.K, cycle, base.subordination, threads=context.threads).value
            checks.append(CheckReport('cochain transgression', value.distance(other) <= tol, value.distance(other),
                                      {'cochain_holonomy': other}))
    checks.append(curvature_diagram_check(xi, base.K, samples=inputs['samples'], seed=context.seed,
                                          tol=context.tolerance or 1e-6))
    return TaskResult(values, checks)


def _parse_number(text):
    try:
        return Fraction(text)
    except ValueError:
        return complex(text.replace(' ', ''))


def _multiplicativity_pairs(group, count, seed, surface='torus'):
    """Pairs ((x, colouring), (x', colouring')) on one surface; the first pair repeats a non-identity x"""
    if surface == 'genus_two':
        K = genus_two_surface()

        def colour(generators):
            return genus_two_coloring(K, group, generators)
        tuples = commuting_tuples(group, 5)
    else:
        K = torus(3, 2)

        def colour(generators):
            return grid_coloring(K, group, generators, 3)
        tuples = commuting_tuples(group, 3)
    rng = np.random.default_rng(seed)
    chosen = [next(t for t in tuples if t[0] != group.identity)] * 2
    indices = rng.integers(len(tuples), size=(count - 1, 2))
    pairs = [tuple(chosen)] + [(tuples[i], tuples[j]) for i, j in indices]
    return [tuple((t[0], colour(t[1:])) for t in pair) for pair in pairs]


def run_dw(inputs, context):
    group = _build(registry.groups, inputs['group'])
    omega = _build(registry.group_cocycles, inputs['cocycle'], group=group)
    values, checks = {'group': group.name, 'cocycle': omega.name}, []
    if 'complex' in inputs:
        K = _build(registry.complexes, inputs['complex'])
        state_sum = dw_invariant(K, group, omega, threads=context.threads)
        values['state_sum'] = state_sum
        if 'expected' in inputs:
            expected = complex(_parse_number(inputs['expected']))
            distance = abs(state_sum.value - expected)
            checks.append(CheckReport('expected state sum', distance <= _tolerance(context, 'COCYCLE_TOLERANCE'),
                                      distance, {'expected': inputs['expected']}))
        if 'coloring' in inputs:
            coloring = ColoringSerializer(context={'complex': K, 'group': group}).create(inputs['coloring'])
            defects = coloring.defects()
            values['coloring'] = {'weight': coloring_weight(K, omega, coloring) if not defects else None,
                                  'edges': coloring.as_dict()}
            checks.append(CheckReport('coloring flatness', not defects, len(defects),
                                      {'defects': [list(t) for t in defects[:10]]}))
    block = inputs.get('multiplicativity')
    if block:
        character = psi_finite_group(group, omega, block['n_circle'])
        if block['perturbed']:
            character = character.perturbed()
        pairs = _multiplicativity_pairs(group, block['pairs'], context.seed, block['surface'])
        checks.append(multiplicativity_check(character, pairs))
    return TaskResult(values, checks)


def run_triple(inputs, context):
    group = _build(registry.groups, inputs['group'])
    omega = _build(registry.group_cocycles, inputs['cocycle'], group=group)
    return TaskResult({'group': group.name, 'cocycle': omega.name}, [check_triple(finite_triple(group, omega))])


def run_cs(inputs, context):
    A = _build(registry.connections, inputs['connection'])
    phi = InvariantPolynomial(inputs['level'], inputs['kind'])
    grid = inputs.get('grid')
    cubic = inputs['cubic'] if 'cubic' in inputs else setting('CS_CUBIC_COEFFICIENT')
    values = {'cs': cs_explicit(A, phi, grid, cubic), 'cubic': cubic,
              'rho': {str(c): pure_gauge_constant(c) for c in CUBIC_CONVENTIONS}}
    checks = []
    if 'gauge' in inputs:
        g = _build(registry.gauges, inputs['gauge'])
        report = gauge_shift_check(A, g, phi, grid, tol=context.tolerance or 1e-3, cubic=cubic)
        checks.append(report)
        if 'expected_shift' in inputs:
            shift, expected = report.details['shift'], inputs['expected_shift']
            checks.append(CheckReport('expected shift', report.details['nearest_integer'] == expected,
                                      abs(shift - expected), {'shift': shift, 'expected': expected}))
        if 'expected_degree' in inputs:
            degree = report.details['degree']
            distance = abs(degree - inputs['expected_degree'])
            checks.append(CheckReport('degree oracle', distance <= (context.tolerance or 0.05), distance,
                                      {'degree': degree}))
    if inputs['path_check']:
        path = torus_integral(cs_form_path(A, phi), grid)
        explicit = {str(c): cs_explicit(A, phi, grid, c) for c in sorted(set(CUBIC_CONVENTIONS) | {cubic})}
        distance = abs(path - explicit[str(cubic)])
        checks.append(CheckReport('path against explicit', distance <= (context.tolerance or 1e-4), distance,
                                  {'path': path, 'cubic': cubic, 'explicit': explicit, 'rho': values['rho']}))
    return TaskResult(values, checks)


def run_cfield(inputs, context):
    tol = context.tolerance or 1e-4
    A = _build(registry.connections, inputs['connection'])
    phi = InvariantPolynomial(inputs['level'], inputs['kind'])
    grid = inputs.get('grid')
    cf = CField(A, _build(registry.three_forms, inputs['c']), 'C')
    checks = []
    for reference in inputs['gauges']:
        g = _build(registry.gauges, reference)
        report = cfield_equivalence_check(cf, gauge_act_cfield(g, cf, phi), TEST_CYCLES, phi, grid, tol)
        report.name = f'gauge equivalence {g.name}'
        checks.append(report)
    if 'alpha' in inputs:
        alpha = _build(registry.connections, inputs['alpha'])
        report = cfield_equivalence_check(cf, cfield_act(alpha, None, cf, phi, grid), TEST_CYCLES, phi, grid, tol)
        report.name = f'shift equivalence {alpha.name}'
        checks.append(report)
    return TaskResult({'cycles': [[list(r) for r in M] for M in TEST_CYCLES]}, checks)


def run_suite(inputs, context):
    from .suites import run_suites

    results = run_suites(inputs['names'] or registry.DEFAULT_SUITES, context)
    checks = [check for result in results for check in result['checks']]
    return TaskResult({'scenarios': [r['scenario'] for r in results]}, checks)


TASKS = {
    'check-cocycle': run_check_cocycle,
    'holonomy': run_holonomy,
    'transgress': run_transgress,
    'dw': run_dw,
    'triple': run_triple,
    'cs': run_cs,
    'cfield': run_cfield,
    'suite': run_suite,
}


def execute(scenario, raw_inputs=None, context=None):
    """Run a validated scenario; the report echoes the inputs as written"""
    context = context or RunContext(scenario.get('seed', setting('SEED')), scenario.get('tolerance'))
    started = time.perf_counter()
    result = TASKS[scenario['task']](scenario['inputs'], context)
    report = {
        'task': scenario['task'],
        'seed': context.seed,
        'inputs': raw_inputs if raw_inputs is not None else scenario['inputs'],
        'values': result.values,
        'checks': [check.as_dict() for check in result.checks],
        'summary': summarize(result.checks),
    }
    if setting('REPORT_TIMINGS'):
        report['timings'] = {'seconds': round(time.perf_counter() - started, 3)}
    return report, result.checks

