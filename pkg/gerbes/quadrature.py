"""
Quadrature on simplices, tori and the unit interval.

Simplex integrals use Grundmann-Moeller rules in barycentric coordinates.
An integrand receives barycentric points of the reference simplex together
with the barycentric directions spanning the (sub)simplex being integrated,
so sub-simplices produced by adaptive refinement reuse the same callback.
"""

import itertools
import logging
from functools import lru_cache
from math import factorial

import numpy as np
from numpy.polynomial import legendre

from .conf import setting
from .exceptions import ParameterError

logger = logging.getLogger(__name__)


def _compositions(total, parts):
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        previous = -1
        composition = []
        for bar in bars:
            composition.append(bar - previous - 1)
            previous = bar
        composition.append(total + parts - 2 - previous)
        yield composition


@lru_cache(maxsize=None)
def simplex_rule(n, s):
    """Grundmann-Moeller rule of order s (exact to degree 2s+1) on the n-simplex.

    Returns barycentric points of shape (m, n+1) and weights summing to 1/n!.
    """
    if n < 0 or s < 0:
        raise ParameterError(f'invalid simplex rule n={n}, s={s}')
    if n == 0:
        return np.ones((1, 1)), np.ones(1)
    d = 2 * s + 1
    points, weights = [], []
    for i in range(s + 1):
        w = (-1) ** i * 2.0 ** (-2 * s) * (d + n - 2 * i) ** d / (factorial(i) * factorial(d + n - i))
        for beta in _compositions(s - i, n + 1):
            points.append([(2 * b + 1) / (d + n - 2 * i) for b in beta])
            weights.append(w)
    points = np.array(points)
    weights = np.array(weights)
    points.setflags(write=False)
    weights.setflags(write=False)
    return points, weights


@lru_cache(maxsize=None)
def _barycentric_pieces(n):
    pieces = []
    for perm in itertools.permutations(range(n + 1)):
        vertices = np.zeros((n + 1, n + 1))
        for k in range(n + 1):
            vertices[k, list(perm[:k + 1])] = 1.0 / (k + 1)
        pieces.append((permutation_sign(perm), vertices))
    return tuple(pieces)


def permutation_sign(perm):
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def _apply_rule(integrand, vertices, s):
    bary, weights = simplex_rule(vertices.shape[0] - 1, s)
    points = bary @ vertices
    directions = vertices[1:] - vertices[0]
    return float(np.dot(weights, integrand(points, directions)))


def integrate_simplex(integrand, n, order=None, tol=None, max_depth=None):
    """Integrate over the reference n-simplex, refining barycentrically when the
    order-s and order-(s+1) estimates disagree.

    Returns ``(value, error_estimate)``.
    """
    order = setting('QUADRATURE_DEGREE') if order is None else order
    tol = setting('QUADRATURE_REFINE_TOLERANCE') if tol is None else tol
    max_depth = setting('QUADRATURE_MAX_DEPTH') if max_depth is None else max_depth

    def recurse(vertices, depth):
        if n == 0:
            return _apply_rule(integrand, vertices, 0), 0.0
        coarse = _apply_rule(integrand, vertices, order)
        fine = _apply_rule(integrand, vertices, order + 1)
        error = abs(fine - coarse)
        if error <= tol or depth >= max_depth:
            return fine, error
        logger.debug('refining %d-simplex at depth %d (estimate %.3g)', n, depth, error)
        total, total_error = 0.0, 0.0
        for sign, piece in _barycentric_pieces(n):
            value, piece_error = recurse(piece @ vertices, depth + 1)
            total += sign * value
            total_error += piece_error
        return total, total_error

    return recurse(np.eye(n + 1), 0)


def periodic_grid(n, dim):
    """Trapezoid nodes of the unit dim-torus and the common cell weight"""
    axes = np.meshgrid(*([np.arange(n) / n] * dim), indexing='ij')
    points = np.stack([axis.ravel() for axis in axes], axis=-1)
    return points, 1.0 / n ** dim


def circle_nodes(n):
    """Trapezoid nodes on [0, 1) for periodic fibre integrals"""
    if n < 3:
        raise ParameterError('circle quadrature needs at least 3 nodes')
    return np.arange(n) / n, np.full(n, 1.0 / n)


def interval_rule(n):
    """Gauss-Legendre nodes and weights on [0, 1]"""
    x, w = legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0
