import itertools
from collections import Counter
from fractions import Fraction

from django.test import SimpleTestCase

from gerbes.catalog import circle_arcs, circle_product_scene, flat_3form, flat_gerbe, global_3form, whole_cover
from gerbes.circle import CircleValue
from gerbes.exceptions import ParameterError, PreconditionError, StructuralError
from gerbes.holonomy import holonomy
from gerbes.multiplicative import (GroupCochain, StateSum, commuting_tuples, cyclic, cyclic_cocycle, direct_product,
                                   dw_invariant, grid_coloring, group_coboundary, product_cochain, symmetric,
                                   trivial_cochain)
from gerbes.simplicial import product_cover, product_with_circle, torus
from gerbes.transgression import (FiberIntegral, character_from_cochain, class_diagram_check,
                                  curvature_diagram_check, psi_finite_group, split_product_cover,
                                  transgress_cochain, transgress_over_circle)

TOL = 1e-6


class FlatTransgressionTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.scene, cls.base, cls.arcs = circle_product_scene(2)

    def test_flat_3form_transgresses_to_its_coefficient(self):
        for c in (Fraction(1, 3), Fraction(1, 5)):
            xi = flat_3form(c, cover=self.scene.cover)
            character = transgress_over_circle(xi)
            value = character.holonomy(self.base.K, self.base.K.fundamental, self.base.subordination)
            self.assertLess(value.distance(CircleValue.of(c)), TOL, c)

    def test_cochain_level_agrees_with_the_character(self):
        xi = flat_3form(Fraction(1, 3), cover=self.scene.cover)
        cochain = transgress_cochain(xi)
        self.assertEqual(cochain.degree, 2)
        self.assertEqual(cochain.cover.ids, ('M',))
        value = holonomy(cochain, self.base.K, self.base.K.fundamental, self.base.subordination).value
        self.assertLess(value.distance(CircleValue.of(Fraction(1, 3))), TOL)

    def test_fibre_integral_contracts_the_circle_direction(self):
        xi = flat_3form(Fraction(1, 2), cover=self.scene.cover)
        fibre = FiberIntegral(xi.omega(3).require(('S1|M',)), self.arcs, nodes=8)
        value = fibre('M', [[0.2, 0.7]], [[[1.0, 0.0], [0.0, 1.0]]])
        self.assertAlmostEqual(float(value[0]), 0.5, places=12)

    def test_class_diagram_without_fourfold_overlaps(self):
        xi = flat_3form(Fraction(1, 3), cover=self.scene.cover)
        report = class_diagram_check(xi, self.base.K)
        self.assertTrue(report.passed)
        self.assertEqual(report.details['defects'], [])

    def test_non_cycles_are_rejected(self):
        character = transgress_over_circle(flat_3form(Fraction(1, 3), cover=self.scene.cover))
        with self.assertRaises(PreconditionError):
            character.holonomy(self.base.K, self.base.chains['strip'], self.base.subordination)


class SmoothTransgressionTests(SimpleTestCase):
    def test_curvature_diagram_commutes(self):
        scene, base, _ = circle_product_scene(3)
        for seed in (0, 1):
            report = curvature_diagram_check(global_3form(seed, base_dim=3, cover=scene.cover), base.K,
                                             samples=40, seed=seed)
            self.assertTrue(report.passed, report.residual)

    def test_transgressed_character_property(self):
        scene, base, _ = circle_product_scene(3)
        xi = global_3form(4, base_dim=3, cover=scene.cover)
        character = transgress_over_circle(
            xi, test_chains=[(base.K, base.chains['block'], base.subordination)])
        self.assertEqual(len(character.reports), 1)
        self.assertLess(character.reports[0].residual, 1e-5)

    def test_character_from_cochain(self):
        scene, base, _ = circle_product_scene(2)
        character = character_from_cochain(flat_gerbe(Fraction(1, 4), base.cover))
        value = character.holonomy(base.K, base.K.fundamental, base.subordination)
        self.assertLess(value.distance(CircleValue.of(Fraction(1, 4))), TOL)
        self.assertEqual(character.degree, 2)


class TransgressionErrorTests(SimpleTestCase):
    def test_degree_three_only(self):
        with self.assertRaises(ParameterError):
            transgress_over_circle(flat_gerbe(Fraction(1, 4)))

    def test_cover_must_be_a_product(self):
        with self.assertRaises(StructuralError):
            transgress_over_circle(flat_3form(Fraction(1, 3), cover=whole_cover()))
        with self.assertRaises(StructuralError):
            split_product_cover(whole_cover())

    def test_cochain_transgression_needs_one_whole_arc(self):
        xi = flat_3form(Fraction(1, 3), cover=product_cover(circle_arcs(3), whole_cover()))
        with self.assertRaises(StructuralError):
            transgress_cochain(xi)

    def test_finite_transgression_needs_a_cocycle(self):
        broken = cyclic_cocycle(3, 1).perturbed((1, 1, 1), Fraction(1, 3))
        with self.assertRaises(PreconditionError):
            psi_finite_group(cyclic(3), broken)


class FiniteTransgressionTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.surface = torus(3, 2)
        cls.product = product_with_circle(cls.surface, 3)
        klein = direct_product(cyclic(2), cyclic(2))
        cls.cases = [
            (cyclic(3), None),
            (cyclic(4), None),
            (klein, product_cochain(cyclic_cocycle(2, 1), cyclic_cocycle(2, 1), klein)),
            (symmetric(3), trivial_cochain(symmetric(3))),
        ]

    def omega(self, G, omega):
        return omega if omega is not None else cyclic_cocycle(len(G), 1, G)

    def transgressed_state_sum(self, G, omega):
        psi = psi_finite_group(G, omega)
        weights = Counter(psi(x, grid_coloring(self.surface, G, (a, b), 3)).angle % 1
                          for x, a, b in commuting_tuples(G, 3))
        return StateSum(Fraction(1, len(G)), weights)

    def test_psi_sums_to_the_state_sum_of_the_product(self):
        for G, omega in self.cases:
            omega = self.omega(G, omega)
            self.assertEqual(self.transgressed_state_sum(G, omega), dw_invariant(self.product, G, omega), G.name)

    def test_psi_is_unchanged_by_coboundaries(self):
        for G, omega in self.cases[:3]:
            omega = self.omega(G, omega)
            n = len(G)
            entries = [p for p in itertools.product(G, repeat=2) if G.identity not in p]
            beta = GroupCochain(G, 2, {p: Fraction(i % n, n) for i, p in enumerate(entries, 1)}, 'beta')
            shifted = omega + group_coboundary(beta)
            psi, shifted_psi = psi_finite_group(G, omega), psi_finite_group(G, shifted)
            for x, a, b in commuting_tuples(G, 3):
                coloring = grid_coloring(self.surface, G, (a, b), 3)
                self.assertEqual(psi(x, coloring).angle % 1, shifted_psi(x, coloring).angle % 1, (G.name, x, a, b))
