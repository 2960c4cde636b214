"""
Name tables for the built-ins a scenario file may reference.

Each table maps a name to a builder; scenario serializers offer exactly the
registered names as choices.
"""

from fractions import Fraction

import numpy as np

from . import catalog, chern_simons, multiplicative
from .exceptions import StructuralError
from .forms import ConstantAngle, ConstantForm, TrigAngle, TrigForm, ZeroForm
from .simplicial import boundary_of_simplex, genus_two_surface, lens_space, product_with_circle, torus


class Registry:
    """Builders for one kind of built-in, looked up by name"""

    def __init__(self, kind):
        self.kind = kind
        self._builders = {}

    def register(self, name, builder):
        self._builders[name] = builder

    def names(self):
        return sorted(self._builders)

    def __contains__(self, name):
        return name in self._builders

    def build(self, name, params=None, **context):
        if name not in self._builders:
            raise StructuralError(f'unknown {self.kind} {name!r}; known: {", ".join(self.names())}')
        return self._builders[name](*context.values(), **(params or {}))


def parse_angle(value):
    """'1/3' and integers stay exact; anything else is a float"""
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int):
        return Fraction(value)
    return float(value)


scenes = Registry('scene')
scenes.register('sphere', lambda cover='hemispheres', levels=2: catalog.sphere_scene(cover, levels))
scenes.register('torus', lambda dim=2, n=3, slabs=False: catalog.torus_scene(dim, n, slabs))


def _circle_product(base_dim=2, n=3, n_circle=3, slabs=False):
    scene, base, _ = catalog.circle_product_scene(base_dim, n, n_circle, 1, slabs)
    scene.base = base
    scene.n_circle = n_circle
    return scene


scenes.register('circle_product', _circle_product)

# Builders receive the scene first; its cover is used where the cochain is not tied to one.
cochains = Registry('cochain')
cochains.register('monopole', lambda scene, n=1, cover='hemispheres': catalog.monopole(n, cover))
cochains.register('flat_gerbe', lambda scene, b='1/4': catalog.flat_gerbe(float(parse_angle(b)), scene.cover))
cochains.register('flat_3form', lambda scene, c='1/4': catalog.flat_3form(float(parse_angle(c)), scene.cover))
cochains.register('global_3form', lambda scene, seed=0, base_dim=3: catalog.global_3form(seed, base_dim, scene.cover))
cochains.register('trig_form', lambda scene, degree=2, seed=0, dim=2:
                  catalog.trig_global_class(degree, dim, seed, scene.cover))


def _indices(key):
    """'0,1' -> (0, 1)"""
    return tuple(int(part) for part in str(key).split(',') if part.strip())


angles = Registry('angle')
angles.register('constant', lambda value='0': ConstantAngle(parse_angle(value)))
angles.register('azimuth', lambda n=1: catalog.azimuth_angle(n))
angles.register('trig', lambda terms=(): TrigAngle(terms))


def _monopole_form(degree, n=1, north=True):
    if degree != 1:
        raise StructuralError('monopole potentials are 1-forms')
    return catalog.monopole_potential(n, north)


# Builders receive the form degree first.
forms = Registry('form')
forms.register('zero', lambda degree: ZeroForm(degree))
forms.register('constant', lambda degree, coefficients=None: ConstantForm(
    degree, {_indices(index): float(parse_angle(value)) for index, value in (coefficients or {}).items()}))
forms.register('trig', lambda degree, terms=(): TrigForm(degree, terms))
forms.register('monopole_potential', _monopole_form)

complexes = Registry('complex')
complexes.register('torus', lambda n=3, dim=3: torus(n, dim))
complexes.register('sphere', lambda dim=3: boundary_of_simplex(dim + 1))
complexes.register('lens', lambda n=2: lens_space(n))
complexes.register('circle_times_genus_two', lambda n_circle=3: product_with_circle(genus_two_surface(), n_circle))


def _product_group(factors=(2, 2)):
    group = multiplicative.cyclic(factors[0])
    for n in factors[1:]:
        group = multiplicative.direct_product(group, multiplicative.cyclic(n))
    return group


groups = Registry('group')
groups.register('cyclic', lambda n=2: multiplicative.cyclic(n))
groups.register('symmetric', lambda n=3: multiplicative.symmetric(n))
groups.register('product', _product_group)

group_cocycles = Registry('group cocycle')
group_cocycles.register('trivial', lambda group: multiplicative.trivial_cochain(group))
group_cocycles.register('cyclic', lambda group, k=1: multiplicative.cyclic_cocycle(len(group), k, group))
group_cocycles.register('cyclic_cocycle', lambda group, k=1, n=None:
                        multiplicative.cyclic_cocycle(n or len(group), k, group))


def _connection_constant(components=((0, 0, 0), (0, 0, 0), (0, 0, 0))):
    return chern_simons.constant(components)


connections = Registry('connection')
connections.register('flat', lambda dim=3: chern_simons.flat(dim))
connections.register('constant', _connection_constant)
connections.register('trig', lambda seed=0, count=4, amplitude=0.3: chern_simons.trig(seed, 3, count, amplitude))
connections.register('abelian_flux', lambda n=1, m=1: chern_simons.abelian_flux(n, m))

gauges = Registry('gauge')
gauges.register('constant', lambda components=(0.3, -0.2, 0.5): chern_simons.constant_gauge(components))
gauges.register('bump_degree', lambda w=1, radius=0.45: chern_simons.bump_degree(w, radius))
gauges.register('abelian_winding', lambda w=1, axis=0: chern_simons.abelian_winding(w, axis))
gauges.register('trig', lambda seed=0, amplitude=1.0: chern_simons.trig_gauge(seed, amplitude))

three_forms = Registry('3-form')
three_forms.register('zero', lambda: ZeroForm(3))
three_forms.register('constant', lambda value=0.25: ConstantForm(3, {(0, 1, 2): float(parse_angle(value))}))
three_forms.register('trig', lambda seed=0, count=3: TrigForm.random(3, 3, np.random.default_rng(seed), count=count))

# Shipped scenario fixtures grouped into property suites.
SUITES = {
    'invariance': ('holonomy_monopole', 'holonomy_tetrahedral', 'holonomy_flat_gerbe', 'cocycle_layered_monopole',
                   'holonomy_inline_monopole'),
    'exchange': ('holonomy_inline_circle', 'dw_inline_z2', 'triple_inline_z2'),
    'transgression': ('transgress_flat_3form', 'transgress_global_3form'),
    'multiplicativity': ('dw_torus_z3', 'dw_sphere_z4', 'dw_lens_z3', 'dw_lens_z4', 'triple_z4', 'multiplicativity_z2',
                         'multiplicativity_z3', 'multiplicativity_z4', 'multiplicativity_genus_two_z2'),
    'cs-gauge': ('cs_gauge_winding', 'cs_gauge_constant', 'cs_path_trig', 'cfield_trig', 'cs_bump_degree_minus1',
                 'cs_bump_degree_1', 'cs_bump_degree_2', 'cs_bump_degree_1_third'),
    'negative': ('negative_perturbed_character',),
}
DEFAULT_SUITES = ('invariance', 'exchange', 'transgression', 'multiplicativity', 'cs-gauge')
