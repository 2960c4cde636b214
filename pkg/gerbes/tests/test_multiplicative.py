import itertools
from collections import Counter
from fractions import Fraction
from math import gcd

import numpy as np
from django.test import SimpleTestCase

from gerbes.exceptions import ParameterError, PreconditionError, StructuralError
from gerbes.forms import ConstantForm, TrigForm, ZeroForm
from gerbes.multiplicative import (FamilyLevel, FiniteGroupModel, GroupCochain, SimplicialCocycleTriple,
                                   TorusGroupModel, b_field_integrality_check, check_closed_manifold, check_triple,
                                   coloring_weight, commuting_tuples, cocycle_violations, cyclic, cyclic_cocycle,
                                   direct_product, dw_invariant, face_map, finite_triple, flat_colorings,
                                   genus_two_coloring, genus_two_tuples, grid_coloring, group_coboundary,
                                   group_family, lens_state_sum, multiplicativity_check, product_cochain,
                                   refine_covering_family, shift_by_cech_coboundary, surface_partition_function,
                                   surface_relator, symmetric, trivial_character, trivial_cochain)
from gerbes.simplicial import boundary_of_simplex, genus_two_surface, lens_space, product_with_circle, torus
from gerbes.transgression import psi_finite_group


def normalized_two_cochains(G, everything=True):
    """Every normalized 2-cochain with values in (1/|G|)Z, or one per entry and value when ``everything`` is off"""
    n = len(G)
    entries = [p for p in itertools.product(range(n), repeat=2) if G.identity not in p]
    if everything:
        for values in itertools.product(range(n), repeat=len(entries)):
            yield GroupCochain(G, 2, {p: Fraction(v, n) for p, v in zip(entries, values)}, 'beta')
        return
    for p in entries:
        for v in range(1, n):
            yield GroupCochain(G, 2, {p: Fraction(v, n)}, 'beta')
    yield GroupCochain(G, 2, {p: Fraction(1, n) for p in entries}, 'beta')


class GroupModelTests(SimpleTestCase):
    def test_cyclic_group(self):
        G = cyclic(4)
        self.assertEqual(len(G), 4)
        self.assertEqual(G.identity, 0)
        self.assertEqual(G.inverse(1), 3)
        self.assertEqual(G.product(1, 2, 3), 2)

    def test_symmetric_group_is_not_abelian(self):
        G = symmetric(3)
        self.assertEqual(len(G), 6)
        self.assertFalse(all(G.commute(a, b) for a in G for b in G))
        self.assertEqual(len(commuting_tuples(G, 2)), 18)

    def test_direct_product(self):
        G = direct_product(cyclic(2), cyclic(3))
        self.assertEqual(len(G), 6)
        self.assertTrue(all(G.commute(a, b) for a in G for b in G))
        self.assertEqual(G.label(5), '(1,2)')

    def test_invalid_tables(self):
        with self.assertRaises(StructuralError):
            FiniteGroupModel([[0, 1], [1, 1]])
        with self.assertRaises(StructuralError):
            FiniteGroupModel([[0, 1, 2], [1, 2, 0]])
        with self.assertRaises(ParameterError):
            cyclic(0)

    def test_face_maps(self):
        G = cyclic(5)
        self.assertEqual(face_map(G, 0, (1, 2, 3)), (2, 3))
        self.assertEqual(face_map(G, 1, (1, 2, 3)), (3, 3))
        self.assertEqual(face_map(G, 2, (1, 2, 3)), (1, 0))
        self.assertEqual(face_map(G, 3, (1, 2, 3)), (1, 2))


class GroupCochainTests(SimpleTestCase):
    def test_cyclic_cocycles(self):
        for n in range(2, 7):
            for k in range(n):
                self.assertEqual(cocycle_violations(cyclic_cocycle(n, k)), [], (n, k))

    def test_coboundaries_are_cocycles(self):
        G = symmetric(3)
        rng = np.random.default_rng(4)
        beta = GroupCochain(G, 2, lambda p: 0 if G.identity in p else Fraction(int(rng.integers(12)), 12))
        self.assertEqual(cocycle_violations(group_coboundary(beta)), [])

    def test_product_cocycle(self):
        G = direct_product(cyclic(2), cyclic(3))
        omega = product_cochain(cyclic_cocycle(2, 1), cyclic_cocycle(3, 2), G)
        self.assertEqual(cocycle_violations(omega), [])

    def test_perturbation_breaks_the_identity(self):
        broken = cyclic_cocycle(3, 1).perturbed((1, 1, 1), Fraction(1, 3))
        self.assertTrue(cocycle_violations(broken))

    def test_cochains_must_be_normalized(self):
        with self.assertRaises(ParameterError):
            GroupCochain(cyclic(2), 3, {(0, 1, 1): Fraction(1, 2)})

    def test_cyclic_cocycle_needs_the_right_order(self):
        with self.assertRaises(ParameterError):
            cyclic_cocycle(3, 1, group=cyclic(4))


class CocycleTripleTests(SimpleTestCase):
    def test_finite_triples(self):
        for n in range(2, 7):
            for k in range(n):
                report = check_triple(finite_triple(cyclic(n), cyclic_cocycle(n, k)))
                self.assertTrue(report.passed, (n, k, report.details))
                self.assertEqual(report.residual, 0)

    def test_product_cocycle_triple(self):
        G = direct_product(cyclic(2), cyclic(2))
        omega = product_cochain(cyclic_cocycle(2, 1), cyclic_cocycle(2, 1), G)
        self.assertTrue(check_triple(finite_triple(G, omega)).passed)

    def test_broken_cocycle_fails_the_last_relation(self):
        broken = cyclic_cocycle(3, 1).perturbed((1, 1, 1), Fraction(1, 3))
        report = check_triple(finite_triple(cyclic(3), broken))
        self.assertFalse(report.passed)
        self.assertGreater(report.details['rungs'][3]['residual'], 0)
        self.assertEqual(report.details['rungs'][0]['residual'], 0)

    def test_cech_shift_keeps_the_relations(self):
        G = cyclic(3)
        omega = cyclic_cocycle(3, 1)
        ids = ('a', 'b', 'c', 'd')
        triple = SimplicialCocycleTriple(group_family(G, ids), lambda i, x: face_map(G, i, x), {}, {},
                                         {(c,): (lambda x: omega.values[tuple(x)]) for c in ids}, 'omega')
        self.assertTrue(check_triple(triple).passed)
        f = {pair: (lambda x, j=j: Fraction((x[0] + j) % 3, 5))
             for j, pair in enumerate([('a', 'b'), ('a', 'c'), ('b', 'd'), ('c', 'd')])}
        shifted = shift_by_cech_coboundary(triple, f)
        report = check_triple(shifted)
        self.assertTrue(report.passed, report.details)
        self.assertEqual(report.details['rungs'][0]['checked'], 3)

    def test_refined_family_covers_the_next_level(self):
        G = cyclic(4)
        previous = FamilyLevel({'hi': lambda x: x[0] >= 1, 'lo': lambda x: x[0] < 2}, {}, [(g,) for g in G])
        points = [(a, b) for a in G for b in G]
        level = refine_covering_family(previous, 3, lambda i, x: face_map(G, i, x), points)
        self.assertTrue(all(any(level.charts[c](x) for c in level.ids) for x in points))
        for chart in level.ids:
            self.assertEqual(level.refine(1, chart), chart.split(',')[1])
        with self.assertRaises(StructuralError):
            level.refine(1, 'missing')


class StateSumTests(SimpleTestCase):
    def test_flat_colorings_of_the_three_torus(self):
        self.assertEqual(len(flat_colorings(torus(3, 3), cyclic(2))), 8)

    def test_three_torus(self):
        K = torus(3, 3)
        for n in (2, 3):
            for k in range(n):
                state_sum = dw_invariant(K, cyclic(n), cyclic_cocycle(n, k))
                self.assertAlmostEqual(abs(state_sum.value - n * n), 0, places=9)
                self.assertEqual(state_sum.weights, Counter({Fraction(0): n ** 3}))

    def test_three_sphere(self):
        state_sum = dw_invariant(boundary_of_simplex(4), cyclic(4), cyclic_cocycle(4, 1))
        self.assertEqual(state_sum.normalization, Fraction(1, 4))
        self.assertAlmostEqual(abs(state_sum.value - 0.25), 0, places=12)

    def test_coboundary_shift_leaves_the_state_sum_unchanged(self):
        G = cyclic(3)
        beta = GroupCochain(G, 2, lambda p: 0 if 0 in p else Fraction(p[0] * p[1], 9))
        omega = cyclic_cocycle(3, 1, G)
        K = torus(3, 3)
        self.assertEqual(dw_invariant(K, G, omega), dw_invariant(K, G, omega + group_coboundary(beta)))

    def test_coboundary_sweep(self):
        K = torus(3, 3)
        Z2, Z3, Z4 = cyclic(2), cyclic(3), cyclic(4)
        klein = direct_product(Z2, Z2)
        cases = (
            (Z2, cyclic_cocycle(2, 1, Z2), True),
            (Z3, cyclic_cocycle(3, 2, Z3), True),
            (Z4, cyclic_cocycle(4, 1, Z4), False),
            (klein, product_cochain(cyclic_cocycle(2, 1), cyclic_cocycle(2, 1), klein), False),
        )
        for G, omega, everything in cases:
            colorings = flat_colorings(K, G)
            reference = dw_invariant(K, G, omega, colorings=colorings)
            for beta in normalized_two_cochains(G, everything):
                shift = group_coboundary(beta)
                self.assertTrue(all(coloring_weight(K, shift, c) == 0 for c in colorings), (G.name, beta.values))
                self.assertEqual(dw_invariant(K, G, omega + shift, colorings=colorings), reference,
                                 (G.name, beta.values))

    def test_threads_do_not_change_the_state_sum(self):
        K = torus(3, 3)
        omega = cyclic_cocycle(2, 1)
        self.assertEqual(dw_invariant(K, cyclic(2), omega, threads=1), dw_invariant(K, cyclic(2), omega, threads=2))

    def test_surfaces_are_rejected(self):
        with self.assertRaises(StructuralError):
            dw_invariant(torus(3, 2), cyclic(2), trivial_cochain(cyclic(2)))

    def test_broken_cocycle_is_rejected(self):
        broken = cyclic_cocycle(3, 1).perturbed((1, 1, 1), Fraction(1, 3))
        with self.assertRaises(PreconditionError):
            dw_invariant(boundary_of_simplex(4), cyclic(3), broken)


class MultiplicativityTests(SimpleTestCase):
    def setUp(self):
        self.G = cyclic(3)
        self.surface = torus(3, 2)

    def pairs(self):
        def colour(a, b):
            return grid_coloring(self.surface, self.G, (a, b), 3)
        return [((1, colour(1, 0)), (1, colour(1, 0))), ((1, colour(0, 2)), (2, colour(1, 1))),
                ((2, colour(2, 1)), (0, colour(1, 2)))]

    def test_grid_colorings_are_flat(self):
        for a, b in commuting_tuples(self.G, 2):
            self.assertTrue(grid_coloring(self.surface, self.G, (a, b), 3).is_flat())

    def test_noncommuting_generators(self):
        G = symmetric(3)
        a, b = next((a, b) for a in G for b in G if not G.commute(a, b))
        with self.assertRaises(PreconditionError):
            grid_coloring(self.surface, G, (a, b), 3)

    def test_transgressed_character_is_multiplicative(self):
        for k in range(3):
            report = multiplicativity_check(psi_finite_group(self.G, cyclic_cocycle(3, k)), self.pairs())
            self.assertTrue(report.passed, report.details)
            self.assertEqual(report.details['skipped'], [])

    def test_perturbed_character_is_not(self):
        character = psi_finite_group(self.G, cyclic_cocycle(3, 1)).perturbed()
        report = multiplicativity_check(character, self.pairs())
        self.assertFalse(report.passed)
        self.assertEqual(report.residual, Fraction(1, 2))

    def test_trivial_character(self):
        self.assertTrue(multiplicativity_check(trivial_character(self.G), self.pairs()).passed)

    def torus_pairs(self, G, count, seed):
        triples = commuting_tuples(G, 3)
        rng = np.random.default_rng(seed)
        first = next(t for t in triples if t[0] != G.identity)
        indices = rng.integers(len(triples), size=(count, 2))
        chosen = [(first, first)] + [(triples[i], triples[j]) for i, j in indices]
        return [tuple((t[0], grid_coloring(self.surface, G, t[1:], 3)) for t in pair) for pair in chosen]

    def test_cyclic_characters_of_order_two_and_four(self):
        for n in (2, 4):
            G = cyclic(n)
            pairs = self.torus_pairs(G, 16, n)
            for k in range(n):
                report = multiplicativity_check(psi_finite_group(G, cyclic_cocycle(n, k, G)), pairs)
                self.assertTrue(report.passed, (n, k, report.details))
                self.assertEqual(report.details['skipped'], [])
            self.assertFalse(multiplicativity_check(psi_finite_group(G, cyclic_cocycle(n, 1, G)).perturbed(),
                                                    pairs).passed)

    def test_product_cocycle_character(self):
        G = direct_product(cyclic(2), cyclic(2))
        omega = product_cochain(cyclic_cocycle(2, 1), cyclic_cocycle(2, 1), G)
        pairs = self.torus_pairs(G, 16, 7)
        report = multiplicativity_check(psi_finite_group(G, omega), pairs)
        self.assertTrue(report.passed, report.details)
        self.assertFalse(multiplicativity_check(psi_finite_group(G, omega).perturbed(), pairs).passed)

    def test_genus_two_surface_pairs(self):
        G = cyclic(2)
        K = genus_two_surface()
        tuples = commuting_tuples(G, 5)
        pairs = [((a[0], genus_two_coloring(K, G, a[1:])), (b[0], genus_two_coloring(K, G, b[1:])))
                 for a, b in ((tuples[3], tuples[17]), (tuples[31], tuples[31]), (tuples[12], tuples[9]))]
        report = multiplicativity_check(psi_finite_group(G, cyclic_cocycle(2, 1, G)), pairs)
        self.assertTrue(report.passed, report.details)
        self.assertEqual(report.details['skipped'], [])



class TorusGroupTests(SimpleTestCase):
    def test_face_matrices(self):
        T = TorusGroupModel(1)
        np.testing.assert_array_equal(T.face_matrix(0, 2), [[0, 1]])
        np.testing.assert_array_equal(T.face_matrix(1, 2), [[1, 1]])
        np.testing.assert_array_equal(T.face_matrix(2, 2), [[1, 0]])
        with self.assertRaises(ParameterError):
            TorusGroupModel(0)

    def test_integral_b_field(self):
        pairs = [([1, 0], [0, 1]), ([1, 1], [0, 1]), ([2, 0], [1, 3])]
        report = b_field_integrality_check(TorusGroupModel(1), ZeroForm(3), ConstantForm(2, {(0, 1): 2.0}),
                                           pairs, grid=8)
        self.assertTrue(report.passed, report.details)
        integrals = [row['integral'] for row in report.details['pairs']]
        np.testing.assert_allclose(integrals, [2.0, 2.0, 12.0])

    def test_fractional_b_field(self):
        report = b_field_integrality_check(TorusGroupModel(1), ZeroForm(3), ConstantForm(2, {(0, 1): 0.5}),
                                           [([1, 0], [0, 1])], grid=8)
        self.assertFalse(report.passed)

    def test_descent_condition_is_checked(self):
        b_field = TrigForm(2, [((0, 1), 0.3, [0, 0, 1, 0], 0.0)])
        with self.assertRaises(PreconditionError):
            b_field_integrality_check(TorusGroupModel(2), ZeroForm(3), b_field,
                                      [([1, 0, 0, 1], [0, 1, 1, 0])], grid=8)


class LensSpaceTests(SimpleTestCase):
    def test_state_sums_match_the_closed_form(self):
        for n in range(1, 5):
            K = lens_space(n)
            for m in range(2, 5):
                G = cyclic(m)
                colorings = flat_colorings(K, G)
                self.assertEqual(len(colorings), gcd(n, m), (n, m))
                for k in range(m):
                    state_sum = dw_invariant(K, G, cyclic_cocycle(m, k, G), colorings=colorings)
                    self.assertEqual(state_sum, lens_state_sum(n, m, k), (n, m, k))

    def test_closed_form_values(self):
        self.assertAlmostEqual(abs(lens_state_sum(4, 4, 1).value - (0.5 + 0.5j)), 0, places=12)
        self.assertAlmostEqual(abs(lens_state_sum(3, 3, 1).value - 1j / np.sqrt(3)), 0, places=12)
        self.assertEqual(lens_state_sum(1, 5, 2).weights, Counter({Fraction(0): 1}))
        self.assertEqual(lens_state_sum(2, 3, 1).normalization, Fraction(1, 3))

    def test_untwisted_lens_space_counts_homomorphisms(self):
        state_sum = dw_invariant(lens_space(2), symmetric(3), trivial_cochain(symmetric(3)))
        self.assertEqual(sum(state_sum.weights.values()), 4)
        self.assertAlmostEqual(state_sum.value, 4 / 6, places=12)


class GenusTwoTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.K = genus_two_surface()

    def test_homomorphism_counts(self):
        for G, count in ((cyclic(2), 16), (cyclic(3), 81), (direct_product(cyclic(2), cyclic(2)), 256),
                         (symmetric(3), 486)):
            self.assertEqual(len(genus_two_tuples(G)), count, G.name)
        self.assertEqual(len(commuting_tuples(symmetric(3), 2)), 18)

    def test_colorings_are_flat(self):
        for G in (cyclic(3), symmetric(3)):
            for generators in genus_two_tuples(G)[::7]:
                self.assertTrue(genus_two_coloring(self.K, G, generators).is_flat(), generators)

    def test_partition_function(self):
        for G in (cyclic(2), cyclic(3)):
            self.assertEqual(surface_partition_function(self.K, G), len(G) ** 3, G.name)
        self.assertEqual(surface_partition_function(self.K, symmetric(3)), 81)

    def test_distinct_generators_give_distinct_colorings(self):
        G = cyclic(3)
        seen = {tuple(sorted(genus_two_coloring(self.K, G, t).values.items())) for t in genus_two_tuples(G)}
        self.assertEqual(len(seen), 81)

    def test_relator_must_vanish(self):
        G = symmetric(3)
        bad = next(t for t in itertools.product(G, repeat=4) if surface_relator(G, t) != G.identity)
        with self.assertRaises(PreconditionError):
            genus_two_coloring(self.K, G, bad)

    def test_circle_times_genus_two(self):
        G = cyclic(2)
        product = product_with_circle(self.K, 3)
        check_closed_manifold(product)
        state_sum = dw_invariant(product, G, trivial_cochain(G))
        self.assertEqual(state_sum.normalization, Fraction(1, 2))
        self.assertAlmostEqual(state_sum.value, 16, places=9)
        twisted = dw_invariant(product, G, cyclic_cocycle(2, 1, G))
        self.assertEqual(sum(twisted.weights.values()), 32)
