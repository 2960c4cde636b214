import numpy as np
from django.test import SimpleTestCase

from gerbes.catalog import hemisphere_cover, whole_cover
from gerbes.exceptions import ParameterError, StructuralError
from gerbes.forms import CallableForm, ConstantForm, TrigForm, antisymmetry_residual
from gerbes.simplicial import (Chain, Chart, Cover, assign_charts, barycentric_subdivide, boundary,
                               boundary_of_simplex, circle, equator_loop, genus_two_surface, hemisphere, lens_space,
                               octahedral_sphere, product_with_circle, stellar_move, torus, verify_subordination,
                               integrate_form)


class ChainTests(SimpleTestCase):
    def test_keys_are_sorted_with_orientation_sign(self):
        self.assertEqual(Chain([((1, 0), 1)]), Chain([((0, 1), -1)]))

    def test_opposite_terms_cancel(self):
        chain = Chain([((0, 1, 2), 1), ((1, 0, 2), 1)])
        self.assertTrue(chain.is_empty())
        self.assertEqual(chain.dimension, -1)

    def test_repeated_vertices_are_rejected(self):
        with self.assertRaises(StructuralError):
            Chain([((0, 0, 1), 1)])

    def test_mixed_dimensions_are_rejected(self):
        with self.assertRaises(StructuralError):
            Chain([((0, 1), 1), ((0, 1, 2), 1)]).dimension

    def test_boundary_of_boundary_vanishes(self):
        simplex = Chain([((0, 1, 2, 3), 1)])
        self.assertEqual(len(boundary(simplex)), 4)
        self.assertTrue(boundary(boundary(simplex)).is_empty())


class BuiltinComplexTests(SimpleTestCase):
    def test_torus_fundamental_is_a_cycle(self):
        for dim in (2, 3):
            K = torus(3, dim)
            self.assertTrue(boundary(K.fundamental).is_empty())
            self.assertEqual(K.euler_characteristic(), 0)

    def test_spheres(self):
        self.assertEqual(boundary_of_simplex(3).euler_characteristic(), 2)
        self.assertEqual(boundary_of_simplex(4).euler_characteristic(), 0)
        K = octahedral_sphere(1)
        self.assertEqual(len(K.fundamental), 32)
        self.assertEqual(K.euler_characteristic(), 2)
        self.assertTrue(boundary(K.fundamental).is_empty())

    def test_small_triangulations_are_rejected(self):
        with self.assertRaises(ParameterError):
            circle(2)
        with self.assertRaises(ParameterError):
            torus(2)

    def test_north_hemisphere_bounds_the_equator(self):
        K = octahedral_sphere(2)
        equator = equator_loop(K)
        self.assertEqual(len(equator), 16)
        self.assertEqual(boundary(hemisphere(K, north=True)), equator)
        self.assertEqual(boundary(hemisphere(K, north=False)), -equator)

    def test_vertex_images_lie_on_the_unit_sphere(self):
        K = octahedral_sphere(2)
        np.testing.assert_allclose(np.linalg.norm(K.vertex_images(), axis=1), 1.0)

    def test_lens_spaces_are_closed_three_manifolds(self):
        for n in range(1, 5):
            K = lens_space(n)
            self.assertEqual(K.lens_order, n)
            self.assertTrue(boundary(K.fundamental).is_empty(), n)
            self.assertEqual(K.euler_characteristic(), 0, n)
        with self.assertRaises(ParameterError):
            lens_space(0)

    def test_genus_two_surface(self):
        K = genus_two_surface()
        self.assertEqual([len(K.simplices[d]) for d in range(3)], [34, 108, 72])
        self.assertEqual(K.euler_characteristic(), -2)
        self.assertTrue(boundary(K.fundamental).is_empty())
        self.assertEqual(len(set(K.octagon)), 9)
        self.assertEqual(K.octagon[0::3], (0,) * 8)


class SubdivisionTests(SimpleTestCase):
    def test_barycentric_subdivision_keeps_the_cycle(self):
        K = torus(3, 2)
        s = assign_charts(K, whole_cover())
        refined, refined_s = barycentric_subdivide(K, s)
        self.assertEqual(len(refined.fundamental), 6 * len(K.fundamental))
        self.assertTrue(boundary(refined.fundamental).is_empty())
        self.assertEqual(refined.euler_characteristic(), 0)
        self.assertTrue(all(refined_s[key] == 'M' for key in refined.all_simplices()))

    def test_subdivided_chain_has_the_same_boundary_support(self):
        K = octahedral_sphere(1)
        refined, _ = barycentric_subdivide(K)
        north = refined.subdivide_chain(hemisphere(K, north=True))
        equator = refined.subdivide_chain(equator_loop(K))
        self.assertEqual(boundary(north), equator)

    def test_stellar_move(self):
        K = torus(3, 2)
        key = next(iter(K.fundamental))
        moved = stellar_move(K, key)
        self.assertEqual(len(moved.fundamental), len(K.fundamental) + 2)
        self.assertTrue(boundary(moved.fundamental).is_empty())
        self.assertEqual(moved.euler_characteristic(), 0)
        with self.assertRaises(StructuralError):
            stellar_move(K, (0, 1))

    def test_product_with_circle(self):
        K = product_with_circle(circle(3), 3)
        self.assertEqual(len(K.fundamental), 18)
        self.assertTrue(boundary(K.fundamental).is_empty())
        self.assertEqual(K.euler_characteristic(), 0)
        with self.assertRaises(ParameterError):
            product_with_circle(circle(3), 2)


class SubordinationTests(SimpleTestCase):
    def test_hemisphere_cover_subordinates_the_sphere(self):
        K = octahedral_sphere(2)
        U = hemisphere_cover()
        s = assign_charts(K, U)
        report = verify_subordination(K, U, s)
        self.assertTrue(report.passed)
        self.assertEqual(report.failures, [])

    def test_wrong_assignment_is_reported(self):
        K = octahedral_sphere(2)
        U = hemisphere_cover()
        s = assign_charts(K, U)
        south_pole = int(np.argmin(K.coordinates[:, 2]))
        report = verify_subordination(K, U, s.reassigned((south_pole,), 'N'))
        self.assertFalse(report.passed)
        self.assertEqual(report.failures, [(south_pole,)])

    def test_uncovered_face(self):
        K = octahedral_sphere(1)
        U = Cover([Chart('N', 'halfspace', {'axis': 2, 'sign': 1, 'offset': 0.0})])
        with self.assertRaises(StructuralError):
            assign_charts(K, U)


class IntegrationTests(SimpleTestCase):
    def test_area_form_over_the_torus(self):
        K = torus(3, 2)
        s = assign_charts(K, whole_cover())
        value, error = integrate_form(ConstantForm(2, {(0, 1): 0.75}), K, K.fundamental, s)
        self.assertAlmostEqual(value, 0.75, places=10)
        self.assertLess(error, 1e-8)

    def test_volume_form_over_the_three_torus(self):
        K = torus(3, 3)
        s = assign_charts(K, whole_cover())
        value, _ = integrate_form(ConstantForm(3, {(0, 1, 2): 1.0}), K, K.fundamental, s)
        self.assertAlmostEqual(value, 1.0, places=10)

    def test_forms_are_alternating(self):
        rng = np.random.default_rng(6)
        points = rng.uniform(0, 1, size=(10, 3))
        self.assertLess(antisymmetry_residual(TrigForm.random(2, 3, rng), 'M', points, rng), 1e-10)
        dot = CallableForm(2, lambda chart, p, v: np.einsum('mi,mi->m', v[:, 0], v[:, 1]))
        self.assertGreater(antisymmetry_residual(dot, 'M', points, rng), 1e-3)
