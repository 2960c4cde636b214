import json
from fractions import Fraction

from django.test import SimpleTestCase

from gerbes.catalog import sphere_scene
from gerbes.circle import EXACT
from gerbes.exceptions import ParameterError, ScenarioError, StructuralError
from gerbes.multiplicative import check_closed_manifold, cyclic, cyclic_cocycle
from gerbes.serializers import (AngleField, CochainSerializer, ColoringSerializer, CSSerializer,
                                GroupCochainTableSerializer, GroupTableSerializer, MeshSerializer, ScenarioSerializer,
                                TriangulationSerializer)
from gerbes.simplicial import Simplex
from gerbes.suites import FIXTURES, parse_scenario


def exchange(name):
    return json.loads((FIXTURES / 'exchange' / name).read_text())


class ScenarioSerializerTests(SimpleTestCase):
    def scenario(self, task, inputs, **extra):
        return ScenarioSerializer(data={'task': task, 'inputs': inputs, **extra})

    def test_holonomy_scenario(self):
        serializer = self.scenario('holonomy', {
            'scene': {'name': 'sphere'},
            'cochain': {'name': 'monopole', 'params': {'n': 2}},
            'cycle': 'equator',
            'expected': '0',
        }, seed=3)
        self.assertTrue(serializer.is_valid(), serializer.errors)
        inputs = serializer.validated_data['inputs']
        self.assertEqual(inputs['cochain']['params'], {'n': 2})
        self.assertEqual(inputs['expected'], Fraction(0))
        self.assertEqual(inputs['layered_seeds'], [])
        self.assertFalse(inputs['subdivide'])

    def test_unknown_task(self):
        serializer = self.scenario('integrate', {})
        self.assertFalse(serializer.is_valid())
        self.assertIn('task', serializer.errors)

    def test_unknown_builtin_lists_the_choices(self):
        serializer = self.scenario('holonomy', {
            'scene': {'name': 'klein_bottle'},
            'cochain': {'name': 'monopole'},
            'cycle': 'equator',
        })
        self.assertFalse(serializer.is_valid())
        message = str(serializer.errors['inputs']['scene']['name'][0])
        self.assertIn('klein_bottle', message)
        self.assertIn('circle_product', message)

    def test_transgression_needs_a_circle_product(self):
        serializer = self.scenario('transgress', {
            'scene': {'name': 'torus', 'params': {'dim': 3}},
            'cochain': {'name': 'flat_3form'},
        })
        self.assertFalse(serializer.is_valid())
        self.assertIn('scene', serializer.errors['inputs'])

    def test_dw_needs_a_complex_or_a_multiplicativity_block(self):
        serializer = self.scenario('dw', {'group': {'name': 'cyclic'}, 'cocycle': {'name': 'trivial'}})
        self.assertFalse(serializer.is_valid())
        serializer = self.scenario('dw', {'group': {'name': 'cyclic'}, 'cocycle': {'name': 'trivial'},
                                          'multiplicativity': {}})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data['inputs']['multiplicativity']['pairs'], 12)

    def test_tolerance_must_be_positive(self):
        serializer = self.scenario('triple', {'group': {'name': 'cyclic'}, 'cocycle': {'name': 'trivial'}},
                                   tolerance=0)
        self.assertFalse(serializer.is_valid())
        self.assertIn('tolerance', serializer.errors)

    def test_cs_grid_and_kind(self):
        self.assertFalse(CSSerializer(data={'connection': {'name': 'trig'}, 'grid': 2}).is_valid())
        self.assertFalse(CSSerializer(data={'connection': {'name': 'trig'}, 'kind': 'euler'}).is_valid())
        serializer = CSSerializer(data={'connection': {'name': 'trig'}, 'cubic': '1/3'})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data['cubic'], Fraction(1, 3))
        self.assertEqual(serializer.validated_data['level'], 1)

    def test_suite_names(self):
        self.assertTrue(self.scenario('suite', {'names': ['negative']}).is_valid())
        self.assertFalse(self.scenario('suite', {'names': ['everything']}).is_valid())


class AngleFieldTests(SimpleTestCase):
    def test_rationals_and_decimals(self):
        field = AngleField()
        self.assertEqual(field.to_internal_value('1/3'), Fraction(1, 3))
        self.assertEqual(field.to_internal_value('0.25'), Fraction(1, 4))
        self.assertEqual(field.to_internal_value(2), Fraction(2))

    def test_garbage(self):
        with self.assertRaisesMessage(Exception, 'is not a rational or decimal angle'):
            AngleField().to_internal_value('half')


class ParseScenarioTests(SimpleTestCase):
    def test_invalid_json_reports_the_position(self):
        with self.assertRaises(ScenarioError) as caught:
            parse_scenario('{"task": "dw",', 'broken.json')
        self.assertIn('broken.json', str(caught.exception))
        self.assertIn('json', caught.exception.errors)

    def test_top_level_must_be_an_object(self):
        with self.assertRaises(ScenarioError):
            parse_scenario('[1, 2]')

    def test_schema_errors_are_collected(self):
        with self.assertRaises(ScenarioError) as caught:
            parse_scenario(json.dumps({'task': 'holonomy', 'inputs': {'scene': {'name': 'sphere'}}}))
        errors = caught.exception.errors['inputs']
        self.assertIn('cochain', errors)
        self.assertIn('cycle', errors)

    def test_raw_inputs_are_kept(self):
        text = json.dumps({'task': 'triple', 'inputs': {'group': {'name': 'cyclic', 'params': {'n': 4}},
                                                        'cocycle': {'name': 'cyclic'}}})
        scenario, raw = parse_scenario(text)
        self.assertEqual(scenario['task'], 'triple')
        self.assertEqual(raw['group'], {'name': 'cyclic', 'params': {'n': 4}})


class MeshSerializerTests(SimpleTestCase):
    def build(self, data):
        serializer = MeshSerializer(data=data)
        self.assertTrue(serializer.is_valid(), serializer.errors)
        return serializer.save()

    def test_circle_mesh(self):
        scene = self.build(exchange('circle_mesh.json'))
        self.assertEqual(scene.K.dimension, 1)
        self.assertEqual(len(scene.K.simplices[0]), 6)
        self.assertEqual(scene.K.euler_characteristic(), 0)
        self.assertEqual(scene.cover.ids, ('a', 'b', 'c'))
        self.assertEqual(scene.K.fundamental[(0, 5)], -1)
        self.assertEqual(set(scene.chains), {'fundamental', 'reversed'})
        self.assertEqual(scene.chains['reversed'], -scene.K.fundamental)
        self.assertEqual(scene.subordination[(3,)], 'b')
        self.assertEqual(scene.K.coordinates[0, 0], 0.0)

    def test_charts_are_assigned_when_no_subordination_is_given(self):
        data = exchange('circle_mesh.json')
        del data['subordination']
        scene = self.build(data)
        self.assertEqual(len(scene.subordination), 12)
        self.assertEqual(scene.subordination[(0,)], 'a')

    def test_per_chart_coordinates_must_agree_modulo_the_period(self):
        data = exchange('circle_mesh.json')
        data['vertices'][0] = {'a': [0.0], 'c': [0.5]}
        serializer = MeshSerializer(data=data)
        self.assertFalse(serializer.is_valid())
        self.assertIn('disagreeing', str(serializer.errors['vertices'][0]))

    def test_unknown_chart_in_the_subordination(self):
        data = exchange('circle_mesh.json')
        data['subordination']['3'] = 'z'
        serializer = MeshSerializer(data=data)
        self.assertFalse(serializer.is_valid())
        self.assertIn('subordination', serializer.errors)

    def test_vertex_ids_are_bounded(self):
        data = exchange('circle_mesh.json')
        data['simplices'].append([5, 6])
        serializer = MeshSerializer(data=data)
        self.assertFalse(serializer.is_valid())
        self.assertIn('simplices', serializer.errors)

    def test_mixed_dimensions_are_rejected(self):
        data = exchange('circle_mesh.json')
        data['simplices'].append([0, 1, 2])
        self.assertFalse(MeshSerializer(data=data).is_valid())

    def test_simplex_orientation(self):
        serializer = MeshSerializer(data={**exchange('circle_mesh.json'),
                                          'simplices': [{'vertices': [0, 1], 'orientation': 2}]})
        self.assertFalse(serializer.is_valid())

    def test_broken_subordination_is_a_structural_error(self):
        data = exchange('circle_mesh.json')
        data['subordination']['3'] = 'a'
        serializer = MeshSerializer(data=data)
        self.assertTrue(serializer.is_valid(), serializer.errors)
        with self.assertRaises(StructuralError):
            serializer.save()

    def test_product_charts_nest(self):
        data = {
            'vertices': [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]],
            'simplices': [[0, 1, 2]],
            'cover': [{'id': 'p', 'domain': 'product', 'params': {
                'split': 1,
                'left': {'id': 'l', 'domain': 'whole'},
                'right': {'id': 'r', 'domain': 'halfspace', 'params': {'axis': 0, 'offset': -1.0}},
            }}],
        }
        scene = self.build(data)
        chart = scene.cover['p']
        self.assertEqual(chart.params['left'].domain, 'whole')
        self.assertEqual(chart.params['right'].params['axis'], 0)

    def test_product_charts_report_factor_errors(self):
        serializer = MeshSerializer(data={
            'vertices': [[0.0], [1.0]],
            'simplices': [[0, 1]],
            'cover': [{'id': 'p', 'domain': 'product', 'params': {'split': 1, 'left': {'id': 'l'},
                                                                   'right': {'id': 'r', 'domain': 'cap'}}}],
        })
        self.assertFalse(serializer.is_valid())
        self.assertIn('right', str(serializer.errors['cover']))


class CochainSerializerTests(SimpleTestCase):
    def setUp(self):
        mesh = MeshSerializer(data=exchange('circle_mesh.json'))
        mesh.is_valid(raise_exception=True)
        self.scene = mesh.save()

    def test_circle_cochain(self):
        serializer = CochainSerializer(data=exchange('circle_cochain.json'), context={'scene': self.scene})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        xi = serializer.save()
        self.assertEqual(xi.degree, 1)
        self.assertEqual(xi.backend, EXACT)
        self.assertEqual(xi.name, 'flat_circle_bundle')
        self.assertEqual(xi.g.stored(('a', 'b')).exact_value, Fraction(1, 5))
        self.assertEqual(xi.omega(1).stored(('c',)).degree, 1)

    def test_reversed_keys_flip_the_sign(self):
        data = exchange('circle_cochain.json')
        data['g'] = {'b,a': '1/5'}
        serializer = CochainSerializer(data=data, context={'scene': self.scene})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.save().g.stored(('a', 'b')).exact_value, Fraction(4, 5))

    def test_key_arity(self):
        data = exchange('circle_cochain.json')
        data['g']['a'] = '1/2'
        serializer = CochainSerializer(data=data)
        self.assertFalse(serializer.is_valid())
        self.assertIn('2 chart(s)', str(serializer.errors['g']))

    def test_components_follow_the_degree(self):
        data = exchange('circle_cochain.json')
        del data['omega_1']
        data['omega_2'] = {'a,b': {'name': 'zero'}}
        serializer = CochainSerializer(data=data)
        self.assertFalse(serializer.is_valid())
        self.assertIn('omega_1', serializer.errors)
        self.assertIn('omega_2', serializer.errors)

    def test_named_angles_and_forms(self):
        serializer = CochainSerializer(data={
            'degree': 1,
            'g': {'N,S': {'name': 'azimuth', 'params': {'n': 2}}},
            'omega_1': {'N': {'name': 'monopole_potential', 'params': {'n': 2}},
                        'S': {'name': 'monopole_potential', 'params': {'n': 2, 'north': False}}},
        }, context={'scene': sphere_scene()})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        xi = serializer.save()
        self.assertEqual(xi.name, 'inline')
        self.assertIsNone(getattr(xi.g.stored(('N', 'S')), 'exact_value', None))

    def test_unknown_names(self):
        serializer = CochainSerializer(data={'degree': 1, 'g': {'N,S': {'name': 'spiral'}},
                                             'omega_1': {'N': {'name': 'wavy'}}})
        self.assertFalse(serializer.is_valid())
        self.assertIn('g', serializer.errors)
        self.assertIn('omega_1', serializer.errors)

    def test_charts_outside_the_cover(self):
        data = exchange('circle_cochain.json')
        data['g']['a,z'] = '1/2'
        serializer = CochainSerializer(data=data, context={'scene': self.scene})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        with self.assertRaisesMessage(StructuralError, 'outside the cover'):
            serializer.save()

    def test_monopole_potentials_are_one_forms(self):
        data = {'degree': 2, 'g': {}, 'omega_1': {}, 'omega_2': {'N': {'name': 'monopole_potential'}}}
        serializer = CochainSerializer(data=data, context={'scene': sphere_scene()})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        with self.assertRaises(StructuralError):
            serializer.save()


class GroupSerializerTests(SimpleTestCase):
    def group(self):
        serializer = GroupTableSerializer(data=exchange('z2_table.json'))
        self.assertTrue(serializer.is_valid(), serializer.errors)
        return serializer.save()

    def test_group_table(self):
        group = self.group()
        self.assertEqual(len(group), 2)
        self.assertEqual(group.name, 'Z2')
        self.assertEqual(group.index('a'), 1)
        self.assertEqual(group.inverse(1), 1)

    def test_tables_must_define_a_group(self):
        for table in ([[0, 1]], [[0, 0], [0, 0]], [[0, 2], [2, 0]]):
            serializer = GroupTableSerializer(data={'table': table})
            self.assertFalse(serializer.is_valid(), table)
            self.assertIn('table', serializer.errors)

    def test_labels_are_distinct(self):
        serializer = GroupTableSerializer(data={'table': [[0, 1], [1, 0]], 'labels': ['e', 'e']})
        self.assertFalse(serializer.is_valid())
        self.assertIn('labels', serializer.errors)

    def test_tabulated_cocycle_matches_the_cyclic_formula(self):
        group = self.group()
        serializer = GroupCochainTableSerializer(data={'values': [{'at': ['a', 'a', 'a'], 'angle': '1/2'}]},
                                                 context={'group': group})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        omega = serializer.save()
        self.assertEqual(omega.name, 'tabulated')
        self.assertEqual(omega.values, cyclic_cocycle(2, 1, group).values)

    def test_tabulated_points_have_the_degree(self):
        serializer = GroupCochainTableSerializer(data={'values': [{'at': ['a', 'a'], 'angle': '1/2'}]})
        self.assertFalse(serializer.is_valid())
        self.assertIn('values', serializer.errors)

    def test_tabulated_cochains_are_normalized(self):
        serializer = GroupCochainTableSerializer(data={'values': [{'at': ['e', 'a', 'a'], 'angle': '1/2'}]},
                                                 context={'group': self.group()})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        with self.assertRaises(ParameterError):
            serializer.save()

    def test_unknown_labels(self):
        serializer = GroupCochainTableSerializer(data={'values': [{'at': ['b', 'a', 'a'], 'angle': '1/2'}]},
                                                 context={'group': cyclic(2)})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        with self.assertRaises(StructuralError):
            serializer.save()


class TriangulationSerializerTests(SimpleTestCase):
    def test_boundary_of_the_4_simplex(self):
        serializer = TriangulationSerializer(data=exchange('boundary_4simplex.json'))
        self.assertTrue(serializer.is_valid(), serializer.errors)
        K = serializer.save()
        check_closed_manifold(K)
        self.assertEqual(len(K.fundamental), 5)
        self.assertEqual(K.fundamental[(0, 2, 3, 4)], -1)
        self.assertEqual(K.euler_characteristic(), 0)

    def test_only_tetrahedra(self):
        serializer = TriangulationSerializer(data={'tetrahedra': [[0, 1, 2]]})
        self.assertFalse(serializer.is_valid())
        self.assertIn('tetrahedra', serializer.errors)

    def test_coloring_of_a_triangulation(self):
        triangulation = TriangulationSerializer(data=exchange('boundary_4simplex.json'))
        triangulation.is_valid(raise_exception=True)
        K, group = triangulation.save(), cyclic(2)
        edges = {f'{u},{w}': '0' for u, w in K.simplices[1]}
        edges.pop('0,1')
        edges['1,0'] = '1'
        serializer = ColoringSerializer(data={'edges': edges}, context={'complex': K, 'group': group})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        coloring = serializer.save()
        self.assertEqual(coloring.values[(0, 1)], 1)
        self.assertFalse(coloring.is_flat())

    def test_coloring_keys_are_edges(self):
        for key in ('0,1,2', '1,1', 'a,b'):
            serializer = ColoringSerializer(data={'edges': {key: '0'}})
            self.assertFalse(serializer.is_valid(), key)
            self.assertIn('edges', serializer.errors)


class InlineReferenceTests(SimpleTestCase):
    def holonomy(self, scene, cochain, base_dir=FIXTURES):
        return ScenarioSerializer(data={'task': 'holonomy', 'inputs': {'scene': scene, 'cochain': cochain,
                                                                        'cycle': 'fundamental'}},
                                  context={'base_dir': base_dir})

    def test_file_references_resolve_against_the_scenario_directory(self):
        serializer = self.holonomy({'file': 'exchange/circle_mesh.json'}, {'file': 'exchange/circle_cochain.json'})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        inputs = serializer.validated_data['inputs']
        self.assertEqual(inputs['scene']['format'], 'mesh')
        self.assertEqual(inputs['cochain']['format'], 'cochain')
        self.assertEqual(inputs['cochain']['data']['g'][('a', 'c')], Fraction(1, 6))

    def test_builtin_references_stay_references(self):
        serializer = self.holonomy({'name': 'sphere'}, {'name': 'monopole', 'params': {'n': 1}})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(serializer.validated_data['inputs']['scene'], {'name': 'sphere', 'params': {}})

    def test_missing_files(self):
        serializer = self.holonomy({'file': 'exchange/nowhere.json'}, {'name': 'monopole'})
        self.assertFalse(serializer.is_valid())
        self.assertIn('cannot read', str(serializer.errors['inputs']['scene']['file'][0]))

    def test_inline_errors_are_nested(self):
        serializer = self.holonomy({'vertices': [[0.0]], 'simplices': [[0, 1]]}, {'name': 'monopole'})
        self.assertFalse(serializer.is_valid())
        self.assertIn('cover', serializer.errors['inputs']['scene'])

    def test_non_objects_are_rejected(self):
        serializer = self.holonomy('sphere', {'name': 'monopole'})
        self.assertFalse(serializer.is_valid())
        self.assertIn('scene', serializer.errors['inputs'])

    def test_dw_accepts_inline_groups_and_triangulations(self):
        scenario, raw = parse_scenario((FIXTURES / 'dw_inline_z2.json').read_text(), 'dw_inline_z2.json', FIXTURES)
        inputs = scenario['inputs']
        self.assertEqual(inputs['complex']['format'], 'triangulation')
        self.assertEqual(inputs['group']['format'], 'group_table')
        self.assertEqual(inputs['cocycle']['format'], 'group_cochain')
        self.assertEqual(inputs['coloring']['edges'][(0, 1)], 'a')
        self.assertEqual(raw['group'], {'file': 'exchange/z2_table.json'})
        self.assertEqual(inputs['complex']['data']['tetrahedra'][1], Simplex((0, 2, 3, 4), -1))

    def test_a_coloring_needs_a_complex(self):
        serializer = ScenarioSerializer(data={'task': 'dw', 'inputs': {
            'group': {'name': 'cyclic'}, 'cocycle': {'name': 'trivial'}, 'multiplicativity': {},
            'coloring': {'edges': {'0,1': '0'}}}})
        self.assertFalse(serializer.is_valid())
        self.assertIn('coloring', serializer.errors['inputs'])

    def test_multiplicativity_surfaces(self):
        inputs = {'group': {'name': 'cyclic'}, 'cocycle': {'name': 'trivial'}}
        good = ScenarioSerializer(data={'task': 'dw',
                                        'inputs': {**inputs, 'multiplicativity': {'surface': 'genus_two'}}})
        self.assertTrue(good.is_valid(), good.errors)
        bad = ScenarioSerializer(data={'task': 'dw', 'inputs': {**inputs, 'multiplicativity': {'surface': 'klein'}}})
        self.assertFalse(bad.is_valid())
