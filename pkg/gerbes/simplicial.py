"""
Simplicial complexes, chains, covers and chart subordination.

Vertices are integers indexing rows of a coordinate array. A simplex is
identified by its sorted vertex tuple (its key); orientation lives in chain
coefficients. The i-th face of an ordered simplex is obtained by deleting
vertex i and carries the sign (-1)**i. All charts share the ambient
coordinates; periodic axes are unwrapped relative to the first vertex of
each simplex, and an optional parametrization maps flat coordinates to the
ambient space (used for exact spheres).
"""

import itertools
import logging
from collections.abc import Mapping
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .exceptions import ParameterError, StructuralError
from .quadrature import integrate_simplex, permutation_sign, simplex_rule

logger = logging.getLogger(__name__)


def canonical(vertices):
    """Sorted key of an ordered vertex tuple and the sign of the sorting permutation"""
    vertices = tuple(int(v) for v in vertices)
    if len(set(vertices)) != len(vertices):
        raise StructuralError(f'simplex {vertices} has repeated vertices')
    order = sorted(range(len(vertices)), key=lambda i: vertices[i])
    return tuple(vertices[i] for i in order), permutation_sign(order)


def faces_of(key):
    """(index, face key) pairs of a sorted simplex key"""
    return [(i, key[:i] + key[i + 1:]) for i in range(len(key))]


def closure(keys):
    found = set()
    stack = list(keys)
    while stack:
        key = stack.pop()
        if key in found:
            continue
        found.add(key)
        if len(key) > 1:
            stack.extend(face for _, face in faces_of(key))
    return found


@dataclass(frozen=True)
class Simplex:
    """An ordered simplex with an orientation sign"""
    vertices: tuple
    orientation: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'vertices', tuple(int(v) for v in self.vertices))
        if self.orientation not in (1, -1):
            raise StructuralError('orientation must be +1 or -1')
        canonical(self.vertices)

    @property
    def dimension(self):
        return len(self.vertices) - 1

    @property
    def key(self):
        return canonical(self.vertices)[0]

    @property
    def sign(self):
        return self.orientation * canonical(self.vertices)[1]


class Chain(Mapping):
    """Finite integer combination of simplices keyed by sorted vertex tuples"""

    def __init__(self, terms=()):
        coefficients = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for simplex, coefficient in items:
            if isinstance(simplex, Simplex):
                key, sign = simplex.key, simplex.sign
            else:
                key, sign = canonical(simplex)
            coefficients[key] = coefficients.get(key, 0) + sign * int(coefficient)
        self._terms = {key: value for key, value in sorted(coefficients.items()) if value != 0}

    def __getitem__(self, key):
        return self._terms[key]

    def __iter__(self):
        return iter(self._terms)

    def __len__(self):
        return len(self._terms)

    def __add__(self, other):
        return Chain(list(self.items()) + list(other.items()))

    def __neg__(self):
        return Chain([(key, -value) for key, value in self.items()])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, n):
        return Chain([(key, n * value) for key, value in self.items()])

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, Chain) and self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __repr__(self):
        return f'Chain({self._terms})'

    @property
    def dimension(self):
        dims = {len(key) - 1 for key in self}
        if len(dims) > 1:
            raise StructuralError(f'chain mixes dimensions {sorted(dims)}')
        return dims.pop() if dims else -1

    def is_empty(self):
        return not self._terms


def boundary(c, complex=None):
    """Alternating sum of codimension-1 faces"""
    terms = []
    for key, coefficient in c.items():
        if complex is not None and key not in complex:
            raise StructuralError(f'unknown simplex {key}')
        if len(key) == 1:
            continue
        for i, face in faces_of(key):
            terms.append((face, (-1) ** i * coefficient))
    return Chain(terms)


class Parametrization:
    """Identity parametrization of the flat coordinates"""

    def map(self, points):
        return points

    def push(self, points, vectors):
        return vectors

    def shifted(self, offset):
        return self

    def describe(self):
        return 'affine'


class RadialParametrization(Parametrization):
    """x -> x/|x| on the coordinate slice [start, stop)"""

    def __init__(self, start=0, stop=None):
        self.start = start
        self.stop = stop

    def _slice(self, points):
        stop = points.shape[-1] if self.stop is None else self.stop
        return slice(self.start, stop)

    def map(self, points):
        out = np.array(points, dtype=float, copy=True)
        part = self._slice(out)
        block = out[..., part]
        out[..., part] = block / np.linalg.norm(block, axis=-1, keepdims=True)
        return out

    def push(self, points, vectors):
        out = np.array(vectors, dtype=float, copy=True)
        part = self._slice(points)
        block = points[:, part]
        norms = np.linalg.norm(block, axis=-1)
        unit = block / norms[:, None]
        v = out[:, :, part]
        radial = np.einsum('mrk,mk->mr', v, unit)
        out[:, :, part] = (v - radial[:, :, None] * unit[:, None, :]) / norms[:, None, None]
        return out

    def shifted(self, offset):
        stop = None if self.stop is None else self.stop + offset
        return RadialParametrization(self.start + offset, stop)

    def describe(self):
        return 'radial'


PARAMETRIZATIONS = {'affine': Parametrization, 'radial': RadialParametrization}


class SimplicialComplex:
    """A finite simplicial complex with vertex coordinates and optional fundamental chain"""

    def __init__(self, coordinates, top_simplices, period=None, parametrization=None, fundamental=None):
        self.coordinates = np.array(coordinates, dtype=float).reshape(len(coordinates), -1) \
            if len(coordinates) else np.zeros((0, 0))
        self.coordinates.setflags(write=False)
        self.ambient_dimension = self.coordinates.shape[1]
        self.period = tuple(period) if period is not None else (None,) * self.ambient_dimension
        if len(self.period) != self.ambient_dimension:
            raise StructuralError('period must list one entry per coordinate axis')
        self.parametrization = parametrization or Parametrization()
        keys = []
        for simplex in top_simplices:
            key = simplex.key if isinstance(simplex, Simplex) else canonical(simplex)[0]
            if key and max(key) >= len(self.coordinates):
                raise StructuralError(f'simplex {key} references a vertex without coordinates')
            keys.append(key)
        all_keys = closure(keys)
        by_dimension = {}
        for key in all_keys:
            by_dimension.setdefault(len(key) - 1, []).append(key)
        self.simplices = {d: tuple(sorted(v)) for d, v in sorted(by_dimension.items())}
        self._keys = frozenset(all_keys)
        self.fundamental = fundamental if fundamental is not None else Chain()
        for key in self.fundamental:
            if key not in self._keys:
                raise StructuralError(f'fundamental chain uses unknown simplex {key}')

    @classmethod
    def from_chain(cls, coordinates, chain, **kwargs):
        return cls(coordinates, list(chain), fundamental=chain, **kwargs)

    def __contains__(self, key):
        return tuple(key) in self._keys

    def __len__(self):
        return len(self._keys)

    @property
    def dimension(self):
        return max(self.simplices) if self.simplices else -1

    def all_simplices(self):
        for d in sorted(self.simplices):
            yield from self.simplices[d]

    def maximal_simplices(self):
        faces = set()
        for key in self._keys:
            if len(key) > 1:
                faces.update(face for _, face in faces_of(key))
        return sorted(key for key in self._keys if key not in faces)

    def face(self, key, index):
        """Face incidence: delete the vertex at ``index``"""
        key = tuple(key)
        if key not in self:
            raise StructuralError(f'unknown simplex {key}')
        return key[:index] + key[index + 1:]

    def euler_characteristic(self):
        return sum((-1) ** d * len(keys) for d, keys in self.simplices.items())

    def realize(self, vertices):
        """Flat coordinates of an ordered vertex tuple, unwrapped relative to its first vertex"""
        block = np.array(self.coordinates[list(vertices)], dtype=float)
        for axis, period in enumerate(self.period):
            if period:
                delta = block[:, axis] - block[0, axis]
                block[:, axis] = block[0, axis] + delta - period * np.round(delta / period)
        return block

    def points(self, vertices, bary):
        return self.parametrization.map(bary @ self.realize(vertices))

    def tangents(self, vertices, bary, directions):
        """Ambient tangent vectors of shape (m, r, n) for barycentric ``directions`` (r, k+1)"""
        flat = self.realize(vertices)
        base = bary @ flat
        vectors = np.broadcast_to(directions @ flat, (base.shape[0],) + (directions.shape[0], flat.shape[1]))
        return self.parametrization.push(base, vectors)

    def vertex_images(self):
        return self.parametrization.map(self.coordinates)

    def signed_volume(self, vertices):
        flat = self.realize(vertices)
        edges = flat[1:] - flat[0]
        if edges.shape[0] != edges.shape[1]:
            raise StructuralError('signed volume needs a full-dimensional simplex')
        return float(np.linalg.det(edges)) / factorial(edges.shape[0])

    def restricted(self, chain):
        """Same coordinates, simplices spanned by the chain only"""
        return SimplicialComplex(self.coordinates, list(chain), period=self.period,
                                 parametrization=self.parametrization, fundamental=chain)


def _mod(values, period):
    return np.mod(values, period)


@dataclass(frozen=True)
class Chart:
    """A chart of a cover, given by a named built-in domain type and its parameters"""
    id: str
    domain: str = 'whole'
    params: dict = field(default_factory=dict)

    def contains(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        p = self.params
        if self.domain == 'whole':
            return np.ones(points.shape[0], dtype=bool)
        if self.domain == 'halfspace':
            return p.get('sign', 1) * points[:, p['axis']] > p.get('offset', 0.0)
        if self.domain == 'cap':
            center = np.asarray(p['center'], dtype=float)
            center = center / np.linalg.norm(center)
            block = points[:, p.get('start', 0):p.get('start', 0) + len(center)]
            unit = block / np.linalg.norm(block, axis=1, keepdims=True)
            return unit @ center > np.cos(np.radians(p['radius']))
        if self.domain == 'interval':
            period = p.get('period', 1.0)
            if p['length'] >= period:
                return np.ones(points.shape[0], dtype=bool)
            offset = _mod(points[:, p['axis']] - p['start'], period)
            return (offset > 0) & (offset < p['length'])
        if self.domain == 'product':
            left, right = p['left'], p['right']
            split = p['split']
            return left.contains(points[:, :split]) & right.contains(points[:, split:])
        raise StructuralError(f'unknown chart domain {self.domain!r}')


class Cover:
    """An ordered finite family of charts with membership oracles"""

    def __init__(self, charts):
        self.charts = tuple(charts)
        self._by_id = {chart.id: chart for chart in self.charts}
        if len(self._by_id) != len(self.charts):
            raise StructuralError('chart ids must be unique')

    @property
    def ids(self):
        return tuple(sorted(self._by_id))

    def __contains__(self, chart_id):
        return chart_id in self._by_id

    def __getitem__(self, chart_id):
        try:
            return self._by_id[chart_id]
        except KeyError:
            raise StructuralError(f'unknown chart {chart_id!r}') from None

    def contains(self, chart_id, points):
        return self[chart_id].contains(points)

    def is_product(self):
        return all(chart.domain == 'product' for chart in self.charts)


def product_cover(arcs, base):
    """Charts 'arc|base' on S^1 x N, the circle coordinate first"""
    charts = []
    for arc in arcs.charts:
        for chart in base.charts:
            charts.append(Chart(f'{arc.id}|{chart.id}', 'product',
                                {'left': arc, 'right': chart, 'split': 1}))
    return Cover(charts)


class Subordination(Mapping):
    """Chart assignment for faces of any codimension"""

    def __init__(self, assignment=()):
        items = assignment.items() if isinstance(assignment, Mapping) else assignment
        self._assignment = {}
        for face, chart_id in items:
            self._assignment[canonical(face)[0]] = chart_id

    def __getitem__(self, key):
        return self._assignment[tuple(key)]

    def __iter__(self):
        return iter(sorted(self._assignment))

    def __len__(self):
        return len(self._assignment)

    def reassigned(self, face, chart_id):
        updated = dict(self._assignment)
        updated[canonical(face)[0]] = chart_id
        return Subordination(updated)

    def chart(self, key):
        try:
            return self._assignment[tuple(key)]
        except KeyError:
            raise StructuralError(f'face {tuple(key)} has no chart assigned') from None


def sample_barycentric(r, samples):
    """Vertices followed by Grundmann-Moeller points of growing order, ``samples`` in total"""
    points = [np.eye(r + 1)]
    count = r + 1
    order = 0
    while count < samples:
        bary, _ = simplex_rule(r, order)
        points.append(bary)
        count += bary.shape[0]
        order += 1
    return np.concatenate(points)[:max(samples, 1)] if samples > r else np.eye(r + 1)


@dataclass
class SubordinationReport:
    results: dict
    passed: bool

    @property
    def failures(self):
        return [face for face, ok in self.results.items() if not ok]


def verify_subordination(K, U, s, samples=8, faces=None):
    """Check the membership oracle at vertices and sample points of every face"""
    if samples < 1:
        raise ParameterError('samples must be at least 1')
    faces = sorted(closure(faces)) if faces is not None else list(K.all_simplices())
    results = {}
    for key in faces:
        chart_id = s.get(key)
        if chart_id is None or chart_id not in U:
            results[key] = False
            continue
        bary = sample_barycentric(len(key) - 1, samples)
        results[key] = bool(np.all(U.contains(chart_id, K.points(key, bary))))
    passed = all(results.values())
    if not passed:
        logger.info('subordination failed on %d faces', len(results) - sum(results.values()))
    return SubordinationReport(results, passed)


def assign_charts(K, U, faces=None, samples=8):
    """Greedy assignment: the first chart whose oracle holds at all sample points"""
    faces = sorted(closure(faces)) if faces is not None else list(K.all_simplices())
    assignment = {}
    for key in faces:
        points = K.points(key, sample_barycentric(len(key) - 1, samples))
        for chart in sorted(U.charts, key=lambda c: c.id):
            if np.all(chart.contains(points)):
                assignment[key] = chart.id
                break
        else:
            raise StructuralError(f'no chart contains face {key}')
    return Subordination(assignment)


def _flags(key):
    for perm in itertools.permutations(range(len(key))):
        yield permutation_sign(perm), [tuple(sorted(key[i] for i in perm[:k + 1])) for k in range(len(key))]


def barycentric_subdivide(K, s=None):
    """Barycentric subdivision of K and of the subordination.

    Each new face inherits the chart of the smallest original face
    containing it. The new complex records ``origin``: new vertex -> original key.
    """
    s = s if s is not None else Subordination()
    originals = list(K.all_simplices())
    if not originals:
        empty = SimplicialComplex([], [], period=K.period, parametrization=K.parametrization)
        empty.origin = {}
        return empty, Subordination()
    index = {key: i for i, key in enumerate(originals)}
    coordinates = []
    for key in originals:
        center = K.realize(key).mean(axis=0)
        for axis, period in enumerate(K.period):
            if period:
                center[axis] = center[axis] % period
        coordinates.append(center)

    def subdivide(chain):
        terms = []
        for key, coefficient in chain.items():
            for sign, flag in _flags(key):
                terms.append((tuple(index[f] for f in flag), sign * coefficient))
        return Chain(terms)

    tops = []
    for key in K.maximal_simplices():
        for _, flag in _flags(key):
            tops.append(tuple(index[f] for f in flag))
    subdivided = SimplicialComplex(coordinates, tops, period=K.period, parametrization=K.parametrization,
                                   fundamental=subdivide(K.fundamental))
    subdivided.origin = {i: key for key, i in index.items()}
    subdivided.subdivide_chain = subdivide
    assignment = {}
    for key in subdivided.all_simplices():
        largest = max((subdivided.origin[v] for v in key), key=len)
        if largest in s:
            assignment[key] = s[largest]
    return subdivided, Subordination(assignment)


def product_with_circle(K, n_circle):
    """Prism triangulation of S^1 x |K|; vertex (a, v) has id a*|V| + v and coordinates (a/n, x_v)"""
    if n_circle < 3:
        raise ParameterError('n_circle must be at least 3')
    n_vertices = len(K.coordinates)
    coordinates = np.zeros((n_circle * n_vertices, K.ambient_dimension + 1))
    for a in range(n_circle):
        coordinates[a * n_vertices:(a + 1) * n_vertices, 0] = a / n_circle
        coordinates[a * n_vertices:(a + 1) * n_vertices, 1:] = K.coordinates
    chain = circle_product_chain(K.fundamental, n_vertices, n_circle)
    tops = list(circle_product_chain(Chain([(key, 1) for key in K.maximal_simplices()]), n_vertices, n_circle))
    product = SimplicialComplex(coordinates, tops, period=(1.0,) + K.period,
                                parametrization=K.parametrization.shifted(1), fundamental=chain)
    product.base_vertices = n_vertices
    product.n_circle = n_circle
    return product


def circle_product_chain(chain, n_vertices, n_circle):
    """The chain S^1 x c in the prism triangulation"""
    terms = []
    for key, coefficient in chain.items():
        for a in range(n_circle):
            lower = [a * n_vertices + v for v in key]
            upper = [((a + 1) % n_circle) * n_vertices + v for v in key]
            for j in range(len(key)):
                terms.append((tuple(lower[:j + 1] + upper[j:]), (-1) ** j * coefficient))
    return Chain(terms)


def product_subordination(product, base_subordination, arcs, samples=8):
    """Assign 'arc|base' charts: base chart from the projected face, arc chosen greedily"""
    assignment = {}
    n_vertices = product.base_vertices
    for key in product.all_simplices():
        base_face = tuple(sorted({v % n_vertices for v in key}))
        base_chart = base_subordination.get(base_face)
        if base_chart is None:
            continue
        times = product.points(key, sample_barycentric(len(key) - 1, samples))[:, :1]
        for arc in sorted(arcs.charts, key=lambda c: c.id):
            if np.all(arc.contains(times)):
                assignment[key] = f'{arc.id}|{base_chart}'
                break
        else:
            raise StructuralError(f'no circle arc contains the projection of {key}')
    return Subordination(assignment)


def circle(n):
    if n < 3:
        raise ParameterError('a triangulated circle needs at least 3 edges')
    chain = Chain([((i, (i + 1) % n), 1) for i in range(n)])
    return SimplicialComplex.from_chain(np.arange(n)[:, None] / n, chain, period=(1.0,))


def point():
    return SimplicialComplex([[0.0]], [(0,)], fundamental=Chain([((0,), 1)]))


def kuhn_chain(n, dim, cells=None):
    """Kuhn simplices of the grid cubes with the given base cells (default: all)"""
    grid = list(itertools.product(range(n), repeat=dim))
    ids = {cell: i for i, cell in enumerate(grid)}
    terms = []
    for base in (grid if cells is None else [tuple(c) for c in cells]):
        for perm in itertools.permutations(range(dim)):
            current = list(base)
            vertices = [ids[tuple(current)]]
            for axis in perm:
                current[axis] = (current[axis] + 1) % n
                vertices.append(ids[tuple(current)])
            terms.append((tuple(vertices), permutation_sign(perm)))
    return Chain(terms)


def torus(n, dim=2):
    """Kuhn triangulation of the unit dim-torus with n >= 3 vertices per side"""
    if n < 3:
        raise ParameterError('torus triangulation needs n >= 3')
    grid = list(itertools.product(range(n), repeat=dim))
    coordinates = np.array(grid, dtype=float) / n
    return SimplicialComplex.from_chain(coordinates, kuhn_chain(n, dim), period=(1.0,) * dim)


def boundary_of_simplex(d):
    """S^(d-1) as the boundary of the standard d-simplex"""
    coordinates = np.eye(d + 1)
    chain = boundary(Chain([(tuple(range(d + 1)), 1)]))
    return SimplicialComplex.from_chain(coordinates, chain)


def lens_space(n):
    """L(n, 1) as the quotient of the join of two polygons by the diagonal Z/n rotation.

    The join of two p-gons (p = n*r) is S^3 with tetrahedra [a_i, a_i+1, b_j, b_j+1];
    rotating both polygons by r steps is free. The quotient is taken on the
    barycentric subdivision: its vertices are orbits of join simplices, so
    the result is a simplicial complex with a +1 orientation pushed down from
    the join. Coordinates are zero; the complex is combinatorial only.
    """
    if n < 1:
        raise ParameterError('lens spaces need n >= 1')
    r = 2 if n > 1 else 3
    p = n * r

    def shift(v, t):
        side, i = divmod(v, p)
        return side * p + (i + t * r) % p

    def orbit(face):
        return min(tuple(sorted(shift(v, t) for v in face)) for t in range(n))

    flags = []
    for i in range(r):
        for j in range(p):
            for sign, flag in _flags((i, (i + 1) % p, p + j, p + (j + 1) % p)):
                flags.append(([orbit(face) for face in flag], sign))
    ids = {key: index for index, key in enumerate(sorted({key for flag, _ in flags for key in flag}))}
    chain = Chain([(tuple(ids[key] for key in flag), sign) for flag, sign in flags])
    K = SimplicialComplex.from_chain(np.zeros((len(ids), 1)), chain)
    K.lens_order = n
    return K


# Sides of the genus-two octagon: (letter, +1 forward or -1 backward) for a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1.
GENUS_TWO_WORD = ((0, 1), (1, 1), (0, -1), (1, -1), (2, 1), (3, 1), (2, -1), (3, -1))


def genus_two_surface():
    """Closed oriented genus-two surface from the octagon a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1.

    Each side carries two interior vertices, an inner ring of 24 vertices
    separates the boundary from a centre vertex, so no triangle sees an
    identified vertex twice. ``octagon`` lists the vertex at each of the 24
    boundary positions counter-clockwise; position 3q is the corner.
    """
    octagon = []
    for letter, direction in GENUS_TWO_WORD:
        first, second = 1 + 2 * letter, 2 + 2 * letter
        octagon.extend([0, first, second] if direction > 0 else [0, second, first])
    ring = [9 + t for t in range(24)]
    center = 33
    triangles = []
    for t in range(24):
        u = (t + 1) % 24
        triangles.append((center, ring[t], ring[u]))
        triangles.append((ring[t], octagon[t], octagon[u]))
        triangles.append((ring[t], octagon[u], ring[u]))
    K = SimplicialComplex.from_chain(np.zeros((34, 2)), Chain([(t, 1) for t in triangles]))
    K.octagon = tuple(octagon)
    K.ring = tuple(ring)
    K.center = center
    return K


def octahedral_sphere(levels=2):
    """Unit S^2 from the octahedron, each triangle split in four ``levels`` times, radially parametrised"""
    coordinates = [list(v) for v in (np.vstack([np.eye(3), -np.eye(3)]))]
    triangles = []
    for sx, sy, sz in itertools.product((1, -1), repeat=3):
        a, b, c = (0 if sx > 0 else 3), (1 if sy > 0 else 4), (2 if sz > 0 else 5)
        triangles.append((a, b, c) if sx * sy * sz > 0 else (a, c, b))
    for _ in range(levels):
        midpoints = {}

        def midpoint(u, w):
            edge = (min(u, w), max(u, w))
            if edge not in midpoints:
                midpoints[edge] = len(coordinates)
                coordinates.append(list((np.asarray(coordinates[u]) + np.asarray(coordinates[w])) / 2))
            return midpoints[edge]

        refined = []
        for a, b, c in triangles:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined.extend([(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)])
        triangles = refined
    chain = Chain([(t, 1) for t in triangles])
    return SimplicialComplex.from_chain(np.array(coordinates), chain, parametrization=RadialParametrization())


def equator_loop(K):
    """Counter-clockwise equator of an octahedral sphere as a 1-cycle"""
    flat = K.coordinates
    on_equator = [v for v in range(len(flat)) if abs(flat[v, 2]) < 1e-12]
    on_equator.sort(key=lambda v: np.arctan2(flat[v, 1], flat[v, 0]))
    edges = [((u, w), 1) for u, w in zip(on_equator, on_equator[1:] + on_equator[:1])]
    return Chain(edges)


def hemisphere(K, north=True):
    """Triangles of the fundamental chain in the closed northern (or southern) hemisphere"""
    sign = 1 if north else -1
    flat = K.coordinates
    return Chain([(key, c) for key, c in K.fundamental.items()
                  if np.all(sign * flat[list(key), 2] >= -1e-12)])


def stellar_move(K, key):
    """Replace one top simplex by the cone over its boundary from a new barycentre vertex"""
    key = tuple(key)
    if key not in K.fundamental:
        raise StructuralError(f'{key} is not a top simplex of the fundamental chain')
    new = len(K.coordinates)
    center = K.realize(key).mean(axis=0)
    coordinates = np.vstack([K.coordinates, center])
    coefficient = K.fundamental[key]
    terms = [(k, c) for k, c in K.fundamental.items() if k != key]
    for i in range(len(key)):
        vertices = list(key)
        vertices[i] = new
        terms.append((tuple(vertices), coefficient))
    return SimplicialComplex.from_chain(coordinates, Chain(terms), period=K.period,
                                        parametrization=K.parametrization)


def sample_points(K, count, rng, chain=None):
    """Random ambient points on the top simplices of ``chain`` (default: the fundamental chain)"""
    keys = list(chain if chain is not None else K.fundamental) or K.maximal_simplices()
    picks = rng.integers(len(keys), size=count)
    points = []
    for index in picks:
        key = keys[index]
        bary = rng.dirichlet(np.ones(len(key)))[None, :]
        points.append(K.points(key, bary)[0])
    return np.array(points)


def integrate_form(form, K, chain, subordination):
    """Sum over chain terms of coefficient * integral of the form in the face's chart"""
    total, error = 0.0, 0.0
    for key, coefficient in chain.items():
        chart = subordination.chart(key)

        def integrand(bary, directions, key=key, chart=chart):
            return form.evaluate(chart, K.points(key, bary), K.tangents(key, bary, directions))

        value, estimate = integrate_simplex(integrand, len(key) - 1)
        total += coefficient * value
        error += abs(coefficient) * estimate
    return total, error
