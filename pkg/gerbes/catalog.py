"""
Named built-in covers, cochains and geometric scenarios.

Monopole of charge n (forms are the real reductions omega / 2*pi*i):
A_N = (n/4pi)(x dy - y dx)/(r(r+z)), A_S = -(n/4pi)(x dy - y dx)/(r(r-z)),
g_NS = -n*phi/2pi, so that A_S - A_N = d g_NS and the curvature is
(n/4pi)(x dy^dz + y dz^dx + z dx^dy)/r^3.
"""

import numpy as np

from .circle import EXACT, FLOAT
from .deligne import CechCochain, DeligneCochain, add, coboundary, global_form_class, random_coboundary_data
from .exceptions import StructuralError
from .forms import CallableAngle, CallableForm, ConstantAngle, ConstantForm, TrigForm
from .simplicial import (Chart, Cover, assign_charts, equator_loop, hemisphere, kuhn_chain, octahedral_sphere,
                         product_cover, product_subordination, product_with_circle, torus)

TETRAHEDRAL_POLAR = np.degrees(np.arccos(-1.0 / 3.0))


def whole_cover(chart_id='M'):
    return Cover([Chart(chart_id, 'whole')])


def hemisphere_cover(margin=0.25):
    return Cover([
        Chart('N', 'halfspace', {'axis': 2, 'sign': 1, 'offset': -margin}),
        Chart('S', 'halfspace', {'axis': 2, 'sign': -1, 'offset': -margin}),
    ])


def tetrahedral_cover(radius=80.0):
    """Four caps around the vertices of a tetrahedron, the first at the north pole"""
    theta = np.radians(TETRAHEDRAL_POLAR)
    charts = [Chart('c1', 'cap', {'center': [0.0, 0.0, 1.0], 'radius': radius})]
    for j, phi in enumerate((0.0, 120.0, 240.0), start=2):
        phi = np.radians(phi)
        center = [float(np.sin(theta) * np.cos(phi)), float(np.sin(theta) * np.sin(phi)), float(np.cos(theta))]
        charts.append(Chart(f'c{j}', 'cap', {'center': center, 'radius': radius}))
    return Cover(charts)


def slab_cover(axis=0, count=3, length=0.7, offset=-0.1, prefix='x'):
    """Periodic slabs along one axis of a unit torus"""
    return Cover([Chart(f'{prefix}{j}', 'interval',
                        {'axis': axis, 'start': (j / count + offset) % 1.0, 'length': length})
                  for j in range(count)])


def circle_arcs(count=1, length=0.7):
    """Arcs of the circle factor; a single arc is the whole circle"""
    if count == 1:
        return Cover([Chart('S1', 'interval', {'axis': 0, 'start': 0.0, 'length': 1.0})])
    return Cover([Chart(f'a{j}', 'interval', {'axis': 0, 'start': (j / count - 0.1) % 1.0, 'length': length})
                  for j in range(count)])


def _rho_z(points):
    x, y, z = points[:, 0], points[:, 1], points[:, 2]
    return x, y, z, np.sqrt(x * x + y * y + z * z)


def _rotation_1form(vectors, x, y):
    """(x dy - y dx) applied to the first tangent vector"""
    return x * vectors[:, 0, 1] - y * vectors[:, 0, 0]


def _monopole_flux(n):
    def fn(chart, points, vectors):
        x, y, z, r = _rho_z(points)
        u, v = vectors[:, 0], vectors[:, 1]
        cross = np.cross(u, v)
        return n / (4 * np.pi) * (x * cross[:, 0] + y * cross[:, 1] + z * cross[:, 2]) / r ** 3
    return CallableForm(2, fn, derivative=CallableForm(3, lambda c, p, v: np.zeros(p.shape[0])))


def monopole_potential(n, north):
    flux = _monopole_flux(n)

    def fn(chart, points, vectors):
        x, y, z, r = _rho_z(points)
        if north:
            return n / (4 * np.pi) * _rotation_1form(vectors, x, y) / (r * (r + z))
        return -n / (4 * np.pi) * _rotation_1form(vectors, x, y) / (r * (r - z))
    return CallableForm(1, fn, derivative=flux)


def azimuth_angle(n):
    def differential(chart, points, vectors):
        x, y = points[:, 0], points[:, 1]
        return -n / (2 * np.pi) * _rotation_1form(vectors, x, y) / (x * x + y * y)

    def fn(chart, points):
        return -n * np.arctan2(points[:, 1], points[:, 0]) / (2 * np.pi)
    return CallableAngle(fn, derivative=CallableForm(1, differential))


def monopole(n, cover='hemispheres'):
    """Charge-n line bundle with connection on S^2 over the hemisphere or tetrahedral cover"""
    if cover == 'hemispheres':
        U = hemisphere_cover()
        kinds = {'N': True, 'S': False}
    elif cover == 'tetrahedral':
        U = tetrahedral_cover()
        kinds = {'c1': True, 'c2': False, 'c3': False, 'c4': False}
    else:
        raise StructuralError(f'unknown monopole cover {cover!r}')
    potentials = {(chart,): monopole_potential(n, north) for chart, north in kinds.items()}
    transitions = {}
    for i in U.ids:
        for j in U.ids:
            if i < j and kinds[i] and not kinds[j]:
                transitions[(i, j)] = azimuth_angle(n)
            elif i < j and not kinds[i] and kinds[j]:
                transitions[(i, j)] = -azimuth_angle(n)
            elif i < j:
                transitions[(i, j)] = ConstantAngle(0)
    g = CechCochain(1, transitions)
    omega = CechCochain(0, potentials, form_degree=1)
    return DeligneCochain(1, U, [g, omega], FLOAT, f'monopole({n})')


def flat_gerbe(b, cover=None):
    """[1, 0, b dx^dy] on the unit 2-torus"""
    return _named(global_form_class(ConstantForm(2, {(0, 1): float(b)}), cover or whole_cover()), f'flat_gerbe({b})')


def flat_3form(c, cover=None, axes=(0, 1, 2)):
    """[1, 0, 0, c dx^dy^dz] on a torus of dimension >= 3"""
    return _named(global_form_class(ConstantForm(3, {tuple(axes): float(c)}), cover or whole_cover()),
                  f'flat_3form({c})')


def _named(xi, name):
    xi.name = name
    return xi


def layered(xi, dim, seed, amplitude=0.3):
    """xi plus the coboundary of seeded smooth lower data: nontrivial g, A, B with the same class"""
    rng = np.random.default_rng(seed)
    shift = coboundary(random_coboundary_data(xi.cover, xi.degree, dim, rng, amplitude=amplitude), xi.cover)
    return _named(add(xi, shift), f'{xi.name}+D(eta[{seed}])')


def trig_global_class(degree, dim, seed, cover=None, count=3):
    rng = np.random.default_rng(seed)
    form = TrigForm.random(degree, dim, rng, count=count)
    return _named(global_form_class(form, cover or whole_cover()), f'trig_form({degree},{seed})')


class Scene:
    """A complex, a cover, a subordination and named chains on it"""

    def __init__(self, K, cover, subordination, chains):
        self.K = K
        self.cover = cover
        self.subordination = subordination
        self.chains = chains


def sphere_scene(cover='hemispheres', levels=2):
    K = octahedral_sphere(levels)
    U = hemisphere_cover() if cover == 'hemispheres' else tetrahedral_cover()
    equator = equator_loop(K)
    north = hemisphere(K, north=True)
    south = hemisphere(K, north=False)
    faces = None if cover == 'hemispheres' else list(equator)
    s = assign_charts(K, U, faces=faces)
    return Scene(K, U, s, {'fundamental': K.fundamental, 'equator': equator, 'north': north, 'south': south})


def torus_scene(dim, n=3, slabs=True):
    K = torus(n, dim)
    U = slab_cover() if slabs else whole_cover()
    s = assign_charts(K, U)
    chains = {'fundamental': K.fundamental}
    if dim == 3:
        chains['solid_torus'] = kuhn_chain(n, 3, [(0, 0, k) for k in range(n)])
        chains['block'] = kuhn_chain(n, 3, [(0, 0, 0)])
    if dim == 2:
        chains['strip'] = kuhn_chain(n, 2, [(0, k) for k in range(n)])
    return Scene(K, U, s, chains)


def circle_product_scene(base_dim, n=3, n_circle=3, arcs=1, slabs=False):
    """S^1 x T^d with product charts 'arc|base'"""
    base = torus_scene(base_dim, n, slabs=slabs)
    K = product_with_circle(base.K, n_circle)
    arc_cover = circle_arcs(arcs)
    U = product_cover(arc_cover, base.cover)
    s = product_subordination(K, base.subordination, arc_cover)
    return Scene(K, U, s, {'fundamental': K.fundamental}), base, arc_cover


BACKENDS = (EXACT, FLOAT)


def global_3form(seed, base_dim=3, cover=None, count=3):
    """A trig 3-form on S^1 x T^d as a degree-3 class; the circle coordinate comes first"""
    if cover is None:
        cover = product_cover(circle_arcs(1), whole_cover())
    return _named(trig_global_class(3, base_dim + 1, seed, cover, count), f'global_3form({seed})')
