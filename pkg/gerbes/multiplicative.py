"""
Simplicial and finite-group structure of multiplicative gerbes.

Group elements are indices 0..|G|-1 into a multiplication table and group
cochains take exact rational angles in [0, 1). Level n of the nerve BG is
G^n with faces d_0(g_1..g_n) = (g_2..g_n), d_i = (.., g_i g_(i+1), ..) for
0 < i < n, and d_n(g_1..g_n) = (g_1..g_(n-1)).

Dijkgraaf-Witten state sums colour the oriented edges (i < j) of a branched
triangulation by group elements; a colouring is flat when
c(i,j) c(j,k) = c(i,k) on every triangle, and a tetrahedron with orientation
sign e contributes e * omega(c01, c12, c23).
"""

import itertools
import logging
from collections import Counter, deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .circle import EXACT, CircleValue, wrap
from .conf import setting
from .exceptions import ParameterError, PreconditionError, StructuralError
from .forms import PulledBackForm
from .quadrature import periodic_grid, permutation_sign
from .reports import CheckReport
from .simplicial import GENUS_TWO_WORD, boundary, faces_of, product_with_circle

logger = logging.getLogger(__name__)


class FiniteGroupModel:
    """A finite group given by its multiplication table on element indices"""

    def __init__(self, table, labels=None, name=''):
        table = np.asarray(table, dtype=int)
        n = table.shape[0] if table.ndim == 2 else 0
        if n == 0 or table.shape != (n, n):
            raise StructuralError('multiplication table must be square and nonempty')
        if table.min() < 0 or table.max() >= n:
            raise StructuralError('multiplication table has entries outside the group')
        self.table = table
        self.table.setflags(write=False)
        self.labels = [str(label) for label in labels] if labels is not None else [str(i) for i in range(n)]
        if len(self.labels) != n:
            raise StructuralError('one label per group element is required')
        self.name = name or f'G{n}'
        everything = np.arange(n)
        identities = [e for e in range(n) if np.array_equal(table[e], everything)
                      and np.array_equal(table[:, e], everything)]
        if not identities:
            raise StructuralError(f'{self.name} has no identity element')
        self.identity = identities[0]
        left = table[table]
        right = table[everything[:, None, None], table[None, :, :]]
        if not np.array_equal(left, right):
            raise StructuralError(f'{self.name} is not associative')
        hits = table == self.identity
        if not np.all(hits.sum(axis=1) == 1):
            raise StructuralError(f'{self.name} has elements without inverses')
        self._inverse = np.argmax(hits, axis=1)

    def __len__(self):
        return self.table.shape[0]

    def __iter__(self):
        return iter(range(len(self)))

    def multiply(self, a, b):
        return int(self.table[a, b])

    def product(self, *elements):
        result = self.identity
        for g in elements:
            result = self.multiply(result, g)
        return result

    def inverse(self, a):
        return int(self._inverse[a])

    def commute(self, a, b):
        return self.multiply(a, b) == self.multiply(b, a)

    def label(self, a):
        return self.labels[a]

    def index(self, label):
        try:
            return self.labels.index(str(label))
        except ValueError:
            raise StructuralError(f'{label!r} is not an element of {self.name}') from None

    def as_dict(self):
        return {'name': self.name, 'labels': list(self.labels), 'table': self.table.tolist()}


def cyclic(n):
    if n < 1:
        raise ParameterError('cyclic groups need n >= 1')
    table = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    return FiniteGroupModel(table, name=f'Z{n}')


def direct_product(G, H):
    m = len(H)
    table = np.zeros((len(G) * m, len(G) * m), dtype=int)
    for (a, b), (c, d) in itertools.product(itertools.product(G, H), repeat=2):
        table[a * m + b, c * m + d] = G.multiply(a, c) * m + H.multiply(b, d)
    labels = [f'({x},{y})' for x in G.labels for y in H.labels]
    return FiniteGroupModel(table, labels, f'{G.name}x{H.name}')


def symmetric(n):
    """S_n on permutation tuples in lexicographic order; (p q)(x) = p(q(x))"""
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(p[q[x]] for x in range(n))] for q in perms] for p in perms]
    return FiniteGroupModel(table, [''.join(map(str, p)) for p in perms], f'S{n}')


def face_map(group, i, point):
    """d_i: G^n -> G^(n-1)"""
    point = tuple(point)
    n = len(point)
    if not 0 <= i <= n or n == 0:
        raise ParameterError(f'face index {i} out of range for a {n}-tuple')
    if i == 0:
        return point[1:]
    if i == n:
        return point[:-1]
    return point[:i - 1] + (group.multiply(point[i - 1], point[i]),) + point[i + 1:]


class GroupCochain:
    """A normalized U(1)-valued q-cochain on G, tabulated with exact angles"""

    def __init__(self, group, degree, values, name=''):
        self.group = group
        self.degree = degree
        self.name = name
        self.values = {}
        for point in itertools.product(range(len(group)), repeat=degree):
            value = values(point) if callable(values) else values.get(point, 0)
            self.values[point] = Fraction(value) % 1
        if not self.is_normalized():
            raise ParameterError(f'cochain {name or ""} is not normalized')

    def __call__(self, *point):
        return self.values[tuple(point)]

    def is_normalized(self):
        e = self.group.identity
        return all(v == 0 for point, v in self.values.items() if e in point)

    def __add__(self, other):
        if other.group is not self.group or other.degree != self.degree:
            raise StructuralError('cochains live on different groups or degrees')
        return GroupCochain(self.group, self.degree, lambda p: self.values[p] + other.values[p],
                            f'{self.name}+{other.name}')

    def __neg__(self):
        return GroupCochain(self.group, self.degree, lambda p: -self.values[p], f'-{self.name}')

    def perturbed(self, point, delta):
        """A copy with one value shifted; used to build broken cocycles"""
        values = dict(self.values)
        values[tuple(point)] += Fraction(delta)
        return GroupCochain(self.group, self.degree, values, f'{self.name}~')

    def as_dict(self):
        return {'degree': self.degree, 'name': self.name,
                'values': {','.join(self.group.label(g) for g in p): str(v)
                           for p, v in self.values.items() if v}}


def trivial_cochain(group, degree=3):
    return GroupCochain(group, degree, {}, 'trivial')


def cyclic_cocycle(n, k, group=None):
    """omega(a, b, c) = k a (b + c - [b + c]_n) / n^2 on Z/n"""
    group = group or cyclic(n)
    if len(group) != n:
        raise ParameterError('the group must be cyclic of order n')
    return GroupCochain(group, 3, lambda p: Fraction(k * p[0] * (p[1] + p[2] - (p[1] + p[2]) % n), n * n),
                        f'omega({n},{k})')


def group_coboundary(beta):
    """(delta beta)(x) = sum_i (-1)^i beta(d_i x)"""
    G = beta.group
    q = beta.degree + 1
    return GroupCochain(G, q, lambda p: sum(((-1) ** i * beta.values[face_map(G, i, p)] for i in range(q + 1)),
                                            Fraction(0)), f'd({beta.name})')


def product_cochain(first, second, group):
    """omega1(a1, b1, c1) + omega2(a2, b2, c2) on a direct product"""
    m = len(second.group)

    def value(p):
        return first.values[tuple(g // m for g in p)] + second.values[tuple(g % m for g in p)]
    return GroupCochain(group, first.degree, value, f'{first.name}x{second.name}')


def cocycle_violations(omega):
    """All 4-tuples where the group 3-cocycle identity fails, with the defect"""
    G = omega.group
    violations = []
    for point in itertools.product(range(len(G)), repeat=omega.degree + 1):
        defect = sum(((-1) ** i * omega.values[face_map(G, i, point)] for i in range(omega.degree + 2)),
                     Fraction(0)) % 1
        if defect:
            violations.append((point, defect))
    return violations


@dataclass
class FamilyLevel:
    """Charts of X_n as membership predicates, refinement maps lambda_i to level n-1 and sample points"""
    charts: dict
    refinements: dict = field(default_factory=dict)
    points: list = field(default_factory=list)

    @property
    def ids(self):
        return sorted(self.charts)

    def support(self, length):
        """Chart tuples of ``length`` distinct charts with the sample points in their overlap"""
        membership = {chart: [bool(self.charts[chart](x)) for x in self.points] for chart in self.ids}
        overlaps = {}
        for combo in itertools.combinations(self.ids, length):
            hits = [x for j, x in enumerate(self.points) if all(membership[c][j] for c in combo)]
            if hits:
                overlaps[combo] = hits
        return overlaps

    def refine(self, i, chart):
        try:
            return self.refinements[i][chart]
        except KeyError:
            raise StructuralError(f'no refinement lambda_{i} for chart {chart!r}') from None


@dataclass
class SimplicialCocycleTriple:
    """(g, h, k) over a covering family of X_1, X_2, X_3 (and X_4 for the last relation).

    ``g``, ``h`` and ``k`` map sorted chart tuples of lengths 3, 2 and 1 to
    angle-valued functions of a point. ``faces(i, x)`` is d_i on points.
    """
    levels: dict
    faces: object
    g: dict = field(default_factory=dict)
    h: dict = field(default_factory=dict)
    k: dict = field(default_factory=dict)
    name: str = ''


def _alternating(values, charts, point):
    charts = tuple(charts)
    if len(set(charts)) < len(charts):
        return 0
    order = sorted(range(len(charts)), key=lambda i: charts[i])
    key = tuple(charts[i] for i in order)
    fn = values.get(key)
    if fn is None:
        return 0
    return permutation_sign(order) * fn(point)


def _delta(values, charts, point):
    return sum((-1) ** j * _alternating(values, charts[:j] + charts[j + 1:], point) for j in range(len(charts)))


def _pulled_sum(triple, values, level, charts, point):
    """sum_i (-1)^i values(lambda_i charts)(d_i point)"""
    total = 0
    for i in range(level + 1):
        images = tuple(triple.levels[level].refine(i, c) for c in charts)
        total += (-1) ** i * _alternating(values, images, triple.faces(i, point))
    return total


def _angle_size(value):
    if isinstance(value, (int, Fraction)):
        return abs(wrap(Fraction(value)))
    return float(abs(wrap(float(value))))


def check_triple(triple, tol=None):
    """Verify the four relations of a simplicial Cech cocycle triple at the sample points:
    delta g = 0, d*g = delta h, d*h = delta k, d*k = 0 (alternating pullback sums)."""
    tol = setting('COCYCLE_TOLERANCE') if tol is None else tol
    rungs = []
    for rung, (level, length) in enumerate(((1, 4), (2, 3), (3, 2), (4, 1))):
        if level not in triple.levels:
            rungs.append({'residual': 0, 'violation': None, 'checked': 0})
            continue
        worst, violation, checked = 0, None, 0
        for charts, points in triple.levels[level].support(length).items():
            for x in points:
                checked += 1
                if rung == 0:
                    defect = _delta(triple.g, charts, x)
                elif rung == 1:
                    defect = _pulled_sum(triple, triple.g, 2, charts, x) - _delta(triple.h, charts, x)
                elif rung == 2:
                    defect = _pulled_sum(triple, triple.h, 3, charts, x) - _delta(triple.k, charts, x)
                else:
                    defect = _pulled_sum(triple, triple.k, 4, charts, x)
                size = _angle_size(defect)
                if size > worst:
                    worst, violation = size, {'charts': list(charts), 'point': x}
        rungs.append({'residual': worst, 'violation': violation, 'checked': checked})
    residual = max(r['residual'] for r in rungs)
    passed = residual <= tol
    if not passed:
        logger.warning('cocycle triple %s fails: %s', triple.name, [r['residual'] for r in rungs])
    return CheckReport(f'triple {triple.name}'.strip(), passed, residual, {'rungs': rungs})


def group_family(group, chart_ids=('*',)):
    """Levels 1..4 of BG, every chart the whole level and lambda_i the identity on chart ids"""
    levels = {}
    for n in range(1, 5):
        charts = {c: (lambda x: True) for c in chart_ids}
        refinements = {i: {c: c for c in chart_ids} for i in range(n + 1)}
        levels[n] = FamilyLevel(charts, refinements, list(itertools.product(range(len(group)), repeat=n)))
    return levels


def finite_triple(group, omega):
    """The finite specialization: single charts, g = h = 0 and k = omega"""
    levels = group_family(group)
    return SimplicialCocycleTriple(levels, lambda i, x: face_map(group, i, x), {}, {},
                                   {('*',): lambda x: omega.values[tuple(x)]}, omega.name)


def shift_by_cech_coboundary(triple, f):
    """(g + delta f, h + sum_i (-1)^i d_i^* f, k) for a Cech 1-cochain f on the cover of X_1"""
    g = dict(triple.g)
    h = dict(triple.h)
    level1 = triple.levels[1]
    for combo in itertools.combinations(level1.ids, 3):
        old = g.get(combo)
        g[combo] = (lambda x, c=combo, o=old: (o(x) if o else 0) + _delta(f, c, x))
    level2 = triple.levels[2]
    for combo in itertools.combinations(level2.ids, 2):
        old = h.get(combo)

        def shifted(x, c=combo, o=old):
            extra = 0
            for i in range(3):
                images = tuple(level2.refine(i, chart) for chart in c)
                extra += (-1) ** i * _alternating(f, images, triple.faces(i, x))
            return (o(x) if o else 0) + extra
        h[combo] = shifted
    return SimplicialCocycleTriple(triple.levels, triple.faces, g, h, dict(triple.k), f'{triple.name}+cech')


def refine_covering_family(previous, face_count, faces, points, base=None):
    """Charts U_a = {x : d_i x in U_(a_i) for all i} (intersected with ``base`` charts when given),
    lambda_i(a) = a_i; charts without sample points are dropped."""
    base = base or {'': lambda x: True}
    charts, refinements = {}, {i: {} for i in range(face_count)}
    for base_id, combo in itertools.product(sorted(base), itertools.product(previous.ids, repeat=face_count)):
        chart_id = (f'{base_id}:' if base_id else '') + ','.join(combo)

        def member(x, combo=combo, inside=base[base_id]):
            return inside(x) and all(previous.charts[c](faces(i, x)) for i, c in enumerate(combo))
        if not any(member(x) for x in points):
            continue
        charts[chart_id] = member
        for i, c in enumerate(combo):
            refinements[i][chart_id] = c
    logger.debug('refined family level has %d charts', len(charts))
    return FamilyLevel(charts, refinements, list(points))


class Coloring:
    """Group elements on the sorted edges (i < j) of a complex"""

    def __init__(self, K, group, values):
        self.K = K
        self.group = group
        self.values = {tuple(edge): int(g) for edge, g in values.items()}
        for edge in K.simplices.get(1, ()):
            if edge not in self.values:
                raise StructuralError(f'edge {edge} is not coloured')

    def along(self, u, w):
        """Colour of the directed edge u -> w"""
        if u == w:
            return self.group.identity
        if u < w:
            return self.values[(u, w)]
        return self.group.inverse(self.values[(w, u)])

    def defects(self):
        G = self.group
        return [t for t in self.K.simplices.get(2, ())
                if G.multiply(self.values[(t[0], t[1])], self.values[(t[1], t[2])]) != self.values[(t[0], t[2])]]

    def is_flat(self):
        return not self.defects()

    def __mul__(self, other):
        if other.K is not self.K:
            raise StructuralError('colourings live on different complexes')
        values = {e: self.group.multiply(g, other.values[e]) for e, g in self.values.items()}
        return Coloring(self.K, self.group, values)

    def as_dict(self):
        return {f'{u},{w}': self.group.label(g) for (u, w), g in sorted(self.values.items())}


def check_closed_manifold(K):
    """Structural check that the fundamental chain is a closed oriented 3-pseudomanifold"""
    chain = K.fundamental
    if chain.is_empty() or chain.dimension != 3:
        raise StructuralError('the state sum needs a 3-dimensional fundamental chain')
    if any(abs(c) != 1 for c in chain.values()):
        raise StructuralError('fundamental chain coefficients must be +1 or -1')
    if not boundary(chain).is_empty():
        raise StructuralError('the triangulation is not closed and oriented')
    incidence = Counter(face for key in chain for _, face in faces_of(key))
    if any(count != 2 for count in incidence.values()):
        raise StructuralError('some triangle is not shared by exactly two tetrahedra')


def _components(K):
    parent = {v: v for key in K.all_simplices() for v in key}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v
    tree = []
    for u, w in K.simplices.get(1, ()):
        a, b = find(u), find(w)
        if a != b:
            parent[max(a, b)] = min(a, b)
            tree.append((u, w))
    roots = {find(v) for v in parent}
    return len(roots), tree


def flat_colorings(K, group):
    """Every flat colouring with spanning-tree edges set to the identity, in a deterministic order"""
    edges = list(K.simplices.get(1, ()))
    position = {edge: i for i, edge in enumerate(edges)}
    triangles = [((t[0], t[1]), (t[1], t[2]), (t[0], t[2])) for t in K.simplices.get(2, ())]
    triangles = [tuple(position[e] for e in t) for t in triangles]
    touching = [[] for _ in edges]
    for index, t in enumerate(triangles):
        for e in t:
            touching[e].append(index)
    G = group

    def propagate(values, queue):
        queue = deque(queue)
        while queue:
            a, b, c = triangles[queue.popleft()]
            va, vb, vc = values[a], values[b], values[c]
            known = (va is not None) + (vb is not None) + (vc is not None)
            if known == 3:
                if G.multiply(va, vb) != vc:
                    return False
                continue
            if known < 2:
                continue
            if vc is None:
                edge, value = c, G.multiply(va, vb)
            elif vb is None:
                edge, value = b, G.multiply(G.inverse(va), vc)
            else:
                edge, value = a, G.multiply(vc, G.inverse(vb))
            values[edge] = value
            queue.extend(touching[edge])
        return True

    _, tree = _components(K)
    start = [None] * len(edges)
    for edge in tree:
        start[position[edge]] = G.identity
    if not propagate(start, range(len(triangles))):
        return []
    found = []

    def search(values):
        free = next((i for i, v in enumerate(values) if v is None), None)
        if free is None:
            found.append(Coloring(K, G, {edges[i]: v for i, v in enumerate(values)}))
            return
        for g in G:
            trial = list(values)
            trial[free] = g
            if propagate(trial, touching[free]):
                search(trial)

    search(start)
    logger.debug('%d gauge-fixed flat colourings on %d edges', len(found), len(edges))
    return found


def coloring_weight(K, omega, coloring):
    """sum over tetrahedra of e * omega(c01, c12, c23), an exact angle"""
    total = Fraction(0)
    for (v0, v1, v2, v3), sign in K.fundamental.items():
        total += sign * omega.values[(coloring.values[(v0, v1)], coloring.values[(v1, v2)],
                                      coloring.values[(v2, v3)])]
    return total % 1


@dataclass
class StateSum:
    """normalization * sum over weights w of multiplicity * exp(2 pi i w), kept exactly"""
    normalization: Fraction
    weights: Counter

    @property
    def value(self):
        total = sum(count * np.exp(2j * np.pi * float(w)) for w, count in self.weights.items())
        return complex(float(self.normalization) * total)

    def __eq__(self, other):
        return self.normalization == other.normalization and self.weights == other.weights

    def as_dict(self):
        value = self.value
        return {'value': [round(value.real, 12), round(value.imag, 12)], 'normalization': str(self.normalization),
                'weights': {str(w): c for w, c in sorted(self.weights.items())}}


def dw_invariant(K, group, omega, colorings=None, threads=None):
    """Dijkgraaf-Witten state sum, normalized by 1/|G| per connected component after gauge fixing"""
    threads = setting('THREADS') if threads is None else threads
    check_closed_manifold(K)
    if cocycle_violations(omega):
        raise PreconditionError(f'{omega.name or "omega"} fails the group cocycle identity')
    colorings = flat_colorings(K, group) if colorings is None else colorings
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            weights = list(pool.map(lambda c: coloring_weight(K, omega, c), colorings))
    else:
        weights = [coloring_weight(K, omega, c) for c in colorings]
    components, _ = _components(K)
    result = StateSum(Fraction(1, len(group) ** components), Counter(weights))
    logger.info('state sum over %d colourings of %s: %s', len(colorings), group.name, result.value)
    return result


def grid_coloring(K, group, generators, n):
    """Colouring of a Kuhn torus: crossing the seam along axis j contributes ``generators[j]``"""
    dim = len(generators)
    for a, b in itertools.combinations(generators, 2):
        if not group.commute(a, b):
            raise PreconditionError('torus colourings need pairwise commuting generators')
    cells = list(itertools.product(range(n), repeat=dim))
    values = {}
    for u, w in K.simplices[1]:
        cu, cw = cells[u], cells[w]
        steps = [(cw[j] - cu[j]) % n for j in range(dim)]
        forward = all(s in (0, 1) for s in steps)
        source = cu if forward else cw
        crossing = [j for j in range(dim) if steps[j] and source[j] == n - 1]
        g = group.product(*(generators[j] for j in crossing))
        values[(u, w)] = g if forward else group.inverse(g)
    return Coloring(K, group, values)


def commuting_tuples(group, size):
    return [t for t in itertools.product(group, repeat=size)
            if all(group.commute(a, b) for a, b in itertools.combinations(t, 2))]


def surface_relator(group, generators):
    """[a1, b1][a2, b2] for generators (a1, b1, a2, b2)"""
    a1, b1, a2, b2 = generators
    inv = group.inverse
    return group.product(a1, b1, inv(a1), inv(b1), a2, b2, inv(a2), inv(b2))


def genus_two_tuples(group):
    """Every (a1, b1, a2, b2) with [a1, b1][a2, b2] = e, i.e. Hom(pi_1 of the genus-two surface, G)"""
    return [t for t in itertools.product(group, repeat=4) if surface_relator(group, t) == group.identity]


def genus_two_coloring(K, group, generators):
    """Colouring of ``genus_two_surface`` with side holonomies ``generators``.

    A gauge phi is set per polygon position: the identity on the centre and
    the ring, the partial word product w_q at corner q, and on each side the
    value its interior vertices need to glue. Edge u -> w gets phi(u)^-1 phi(w).
    """
    if surface_relator(group, generators) != group.identity:
        raise PreconditionError('the generators do not satisfy [a1, b1][a2, b2] = e')
    G = group
    phase = [G.identity] * 24
    corner = G.identity
    for q, (letter, direction) in enumerate(GENUS_TWO_WORD):
        g = generators[letter] if direction > 0 else G.inverse(generators[letter])
        following = G.multiply(corner, g)
        phase[3 * q] = corner
        phase[3 * q + 1] = phase[3 * q + 2] = following if direction > 0 else corner
        corner = following
    values = {}

    def colour(pairs):
        for (u, pu), (w, pw) in itertools.combinations(pairs, 2):
            if u > w:
                (u, pu), (w, pw) = (w, pw), (u, pu)
            value = G.multiply(G.inverse(pu), pw)
            if values.setdefault((u, w), value) != value:
                raise StructuralError(f'edge {(u, w)} receives two colours')

    e = G.identity
    for t in range(24):
        s = (t + 1) % 24
        colour([(K.center, e), (K.ring[t], e), (K.ring[s], e)])
        colour([(K.ring[t], e), (K.octagon[t], phase[t]), (K.octagon[s], phase[s])])
        colour([(K.ring[t], e), (K.octagon[s], phase[s]), (K.ring[s], e)])
    return Coloring(K, G, values)


def surface_partition_function(K, group):
    """Untwisted state sum of a closed surface: gauge-fixed flat colourings over |G|^components"""
    components, _ = _components(K)
    return Fraction(len(flat_colorings(K, group)), len(group) ** components)


def lens_state_sum(n, m, k):
    """Closed form for L(n, 1) with Z/m and omega(m, k): (1/m) sum over x with n x = 0 of exp(2 pi i k n x^2 / m^2)"""
    weights = Counter(Fraction(k * n * x * x, m * m) % 1 for x in range(m) if (n * x) % m == 0)
    return StateSum(Fraction(1, m), weights)


def product_coloring(product, surface_coloring, x):
    """Colouring of S^1 x Sigma: base colours on horizontal edges, x on the step from the last slice to the first"""
    G = surface_coloring.group
    nV = product.base_vertices
    n = product.n_circle
    base = surface_coloring

    def step(a):
        return x if a == n - 1 else G.identity

    values = {}
    for p, q in product.simplices[1]:
        rp, rq = p // nV, q // nV
        bp, bq = p % nV, q % nV
        if rp == rq:
            values[(p, q)] = base.along(bp, bq)
        elif rq == (rp + 1) % n:
            values[(p, q)] = G.multiply(step(rp), base.along(bp, bq))
        else:
            values[(p, q)] = G.inverse(G.multiply(step(rq), base.along(bq, bp)))
    return Coloring(product, G, values)


class ColoringCharacter:
    """A U(1)-valued function of (x, surface colouring) pairs"""

    def __init__(self, group, fn, name=''):
        self.group = group
        self.fn = fn
        self.name = name

    def __call__(self, x, coloring):
        return self.fn(x, coloring)

    def perturbed(self, phase=Fraction(1, 4)):
        """Adds ``phase`` whenever x is not the identity: not a homomorphism"""
        e = self.group.identity
        return ColoringCharacter(self.group, lambda x, c: self.fn(x, c) + CircleValue(phase if x != e else 0, EXACT),
                                 f'{self.name}~')


def trivial_character(group):
    return ColoringCharacter(group, lambda x, c: CircleValue.identity(EXACT), 'trivial')


def mapping_cylinder_weight(omega, coloring, x, n_circle=3):
    """DW weight of S^1 x Sigma with circle holonomy x and surface colouring ``coloring``"""
    surface = coloring.K
    product = product_with_circle(surface, n_circle)
    lifted = product_coloring(product, coloring, x)
    if not lifted.is_flat():
        raise PreconditionError('x must commute with the surface colouring')
    return CircleValue(coloring_weight(product, omega, lifted), EXACT)


def multiplicativity_check(character, pairs):
    """Defect hol(s1 s2) - hol(s1) - hol(s2) per pair of (x, colouring) arguments on one surface"""
    G = character.group
    rows, skipped = [], []
    worst = Fraction(0)
    for index, ((x1, c1), (x2, c2)) in enumerate(pairs):
        x = G.multiply(x1, x2)
        c = c1 * c2
        if not c.is_flat() or not all(G.commute(x, g) for g in c.values.values()):
            logger.info('pair %d skipped: product colouring is not flat', index)
            skipped.append(index)
            continue
        defect = character(x, c) - character(x1, c1) - character(x2, c2)
        size = abs(wrap(defect.angle)) if defect.backend == EXACT else float(abs(wrap(defect.angle)))
        worst = max(worst, size)
        rows.append({'pair': index, 'defect': defect})
    passed = worst == 0
    if not passed:
        logger.warning('%s is not multiplicative (defect %s)', character.name or 'character', worst)
    return CheckReport(f'multiplicativity {character.name}'.strip(), passed, worst,
                       {'pairs': rows, 'skipped': skipped})


class TorusGroupModel:
    """The torus group R^d/Z^d; level n of its nerve is T^(nd) with coordinates (a_1, .., a_n)"""

    def __init__(self, dim):
        if dim < 1:
            raise ParameterError('torus dimension must be positive')
        self.dim = dim

    def face_matrix(self, i, n):
        """The linear face map d_i: T^(nd) -> T^((n-1)d) as an integer matrix"""
        d = self.dim
        blocks = np.zeros((n - 1, n), dtype=int)
        for row in range(n - 1):
            if i == 0:
                blocks[row, row + 1] = 1
            elif i == n or row < i - 1:
                blocks[row, row] = 1
            elif row == i - 1:
                blocks[row, row] = blocks[row, row + 1] = 1
            else:
                blocks[row, row + 1] = 1
        return np.kron(blocks, np.eye(d, dtype=int))

    def face_pullback(self, form, i, n):
        M = self.face_matrix(i, n).astype(float)
        return PulledBackForm(form, lambda p: (p @ M.T) % 1.0, lambda p, v: v @ M.T)


def b_field_integrality_check(group, curv_h, b_field, pairs, tol=None, samples=None, seed=None, grid=None):
    """Integrals over T^2 of (s1, s2)^* B for linear maps s_i, after checking d0*H - d1*H + d2*H = dB.

    ``pairs`` holds integer matrices (d x 2) describing s_i(x) = M_i x mod 1.
    """
    tol = setting('HOLONOMY_TOLERANCE') if tol is None else tol
    samples = setting('COCYCLE_SAMPLES') if samples is None else samples
    seed = setting('SEED') if seed is None else seed
    grid = setting('CS_GRID') if grid is None else grid
    d = group.dim
    rng = np.random.default_rng(seed)
    points = rng.uniform(0, 1, size=(samples, 2 * d))
    vectors = rng.normal(size=(samples, 3, 2 * d))
    lhs = sum((-1) ** i * group.face_pullback(curv_h, i, 2).evaluate(None, points, vectors) for i in range(3))
    rhs = b_field.derivative().evaluate(None, points, vectors)
    defects = np.abs(lhs - rhs)
    worst = int(np.argmax(defects))
    if defects[worst] > tol:
        raise PreconditionError(f'd0*H - d1*H + d2*H != dB at sample {points[worst].tolist()} '
                                f'(defect {defects[worst]:.3g})')
    nodes, weight = periodic_grid(grid, 2)
    rows = []
    worst_distance = 0.0
    for index, (m1, m2) in enumerate(pairs):
        M = np.vstack([np.asarray(m1, dtype=float).reshape(d, 2), np.asarray(m2, dtype=float).reshape(d, 2)])
        images = (nodes @ M.T) % 1.0
        pushed = np.broadcast_to(M.T[None, :, :], (nodes.shape[0], 2, 2 * d))
        value = float(weight * np.sum(b_field.evaluate(None, images, pushed)))
        distance = abs(value - round(value))
        worst_distance = max(worst_distance, distance)
        rows.append({'pair': index, 'integral': value, 'distance': distance, 'integral_ok': distance <= tol})
    passed = worst_distance <= tol
    if not passed:
        logger.warning('B-field integrals are not integral (worst distance %.3g)', worst_distance)
    return CheckReport('b-field integrality', passed, worst_distance, {'pairs': rows})
