"""
Holonomy of Deligne cocycles on triangulated cycles.

The amplitude of a top simplex sigma with chart i_sigma sums, over all
flags sigma > tau_1 > ... > tau_j of faces with charts i_1, ..., i_j, the
term (product of face signs) * integral over tau_j of
omega^(p-j)_(i_sigma, i_1, ..., i_j); for j = p the integral is the value of
g at the vertex. Flags whose charts repeat contribute nothing.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .circle import EXACT, FLOAT, CircleValue, circular_distance
from .conf import setting
from .deligne import CurvatureForm
from .exceptions import PreconditionError, StructuralError
from .forms import LinearCombination, ZeroForm
from .quadrature import integrate_simplex
from .simplicial import boundary, faces_of, integrate_form

logger = logging.getLogger(__name__)


@dataclass
class HolonomyResult:
    """Holonomy value, per-simplex amplitudes and quadrature diagnostics"""
    value: CircleValue
    amplitudes: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self, include_amplitudes=False):
        data = {'value': str(self.value), 'backend': self.value.backend, 'diagnostics': self.diagnostics}
        if include_amplitudes:
            data['amplitudes'] = {','.join(map(str, key)): str(v) for key, v in sorted(self.amplitudes.items())}
        return data


def _is_zero_form(form):
    return isinstance(form, ZeroForm) or (isinstance(form, LinearCombination) and not form.terms)


def local_amplitude(xi, K, key, subordination, tol=None):
    """Amplitude of one top simplex as ``(CircleValue, quadrature error estimate)``"""
    tol = setting('HOLONOMY_TOLERANCE') if tol is None else tol
    p = xi.degree
    key = tuple(key)
    if len(key) != p + 1:
        raise StructuralError(f'{key} is not a {p}-simplex')
    exact_part = Fraction(0)
    float_part = 0.0
    error = 0.0
    inexact = False

    def visit(face, charts, sign):
        nonlocal exact_part, float_part, error, inexact
        charts = charts + (subordination.chart(face),)
        if len(set(charts)) < len(charts):
            return
        depth = len(charts) - 1
        if depth == p:
            g = xi.g.require(charts)
            if g.exact_value is not None:
                exact_part += sign * g.exact_value
            else:
                inexact = True
                float_part += sign * float(g.evaluate(charts[0], K.points(face, np.ones((1, 1))))[0])
            return
        form = xi.omega(p - depth).require(charts)
        if not _is_zero_form(form):
            chart = charts[-1]

            def integrand(bary, directions):
                return form.evaluate(chart, K.points(face, bary), K.tangents(face, bary, directions))

            value, estimate = integrate_simplex(integrand, len(face) - 1)
            float_part += sign * value
            error += estimate
            inexact = True
        for i, sub in faces_of(face):
            visit(sub, charts, sign * (-1) ** i)

    visit(key, (), 1)
    if error > tol:
        logger.debug('quadrature estimate %.3g on %s exceeds tolerance', error, key)
    if not inexact and xi.backend == EXACT:
        return CircleValue(exact_part, EXACT), error
    return CircleValue(float(exact_part) + float_part, FLOAT), error


def holonomy(xi, K, cycle, subordination, threads=None, tol=None):
    """Product of local amplitudes raised to the chain coefficients"""
    threads = setting('THREADS') if threads is None else threads
    tol = setting('HOLONOMY_TOLERANCE') if tol is None else tol
    if not cycle.is_empty() and cycle.dimension != xi.degree:
        raise StructuralError(f'a degree-{xi.degree} class is evaluated on {xi.degree}-cycles')
    for key in cycle:
        if key not in K:
            raise StructuralError(f'unknown simplex {key}')
    if not boundary(cycle).is_empty():
        raise PreconditionError('holonomy is only defined on cycles')
    keys = list(cycle)

    def amplitude(key):
        return local_amplitude(xi, K, key, subordination, tol)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(amplitude, keys))
    else:
        results = [amplitude(key) for key in keys]

    amplitudes = {}
    value = CircleValue.identity(xi.backend)
    total_error = 0.0
    flagged = []
    for key, (amp, estimate) in zip(keys, results):
        amplitudes[key] = amp
        value = value + cycle[key] * amp
        total_error += abs(cycle[key]) * estimate
        if estimate > tol:
            flagged.append(list(key))
    diagnostics = {'quadrature_error': float(total_error), 'flagged': flagged}
    logger.info('holonomy of %s on %d simplices: %s', xi.name or 'cochain', len(keys), value)
    return HolonomyResult(value, amplitudes, diagnostics)


def integrate_curvature(xi, K, chain, subordination):
    """Integral of the curvature over a (p+1)-chain, each simplex read in its assigned chart"""
    value, _ = integrate_form(CurvatureForm(xi), K, chain, subordination)
    return value


@dataclass
class CharacterReport:
    residual: float
    holonomy: CircleValue
    flux: float
    passed: bool

    def as_dict(self):
        return {'residual': self.residual, 'holonomy': str(self.holonomy), 'flux': self.flux, 'passed': self.passed}


def character_property_check(xi, K, sigma, subordination, tol=None):
    """Circular distance between hol(boundary sigma) and the curvature integral over sigma"""
    tol = setting('HOLONOMY_TOLERANCE') if tol is None else tol
    if not sigma.is_empty() and sigma.dimension != xi.degree + 1:
        raise StructuralError('the character property is tested on (p+1)-chains')
    result = holonomy(xi, K, boundary(sigma), subordination)
    flux = integrate_curvature(xi, K, sigma, subordination)
    residual = float(circular_distance(float(result.value.angle), flux))
    passed = residual <= tol
    if not passed:
        logger.warning('character property defect %.3g', residual)
    return CharacterReport(residual, result.value, flux, passed)
