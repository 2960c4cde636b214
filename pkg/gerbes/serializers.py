import json
from fractions import Fraction
from pathlib import Path

import numpy as np
from rest_framework import serializers

from . import registry
from .catalog import BACKENDS, Scene
from .circle import FLOAT
from .deligne import CechCochain, DeligneCochain
from .exceptions import StructuralError
from .forms import ConstantAngle
from .multiplicative import Coloring, FiniteGroupModel, GroupCochain
from .simplicial import (PARAMETRIZATIONS, Chain, Chart, Cover, Simplex, SimplicialComplex, Subordination,
                         assign_charts, verify_subordination)

TASK_KINDS = ('check-cocycle', 'holonomy', 'transgress', 'dw', 'triple', 'cs', 'cfield', 'suite')


class BuiltinReferenceSerializer(serializers.Serializer):
    """Serializer for a reference to a registered built-in"""
    registry = None
    name = serializers.CharField()
    params = serializers.DictField(required=False, default=dict)

    def validate_name(self, value):
        if value not in self.registry:
            raise serializers.ValidationError(
                f'Unknown {self.registry.kind} "{value}". Choose one of: {", ".join(self.registry.names())}.')
        return value


class SceneReferenceSerializer(BuiltinReferenceSerializer):
    registry = registry.scenes


class CochainReferenceSerializer(BuiltinReferenceSerializer):
    registry = registry.cochains


class ComplexReferenceSerializer(BuiltinReferenceSerializer):
    registry = registry.complexes


class GroupReferenceSerializer(BuiltinReferenceSerializer):
    registry = registry.groups


class GroupCocycleReferenceSerializer(BuiltinReferenceSerializer):
    registry = registry.group_cocycles


class ConnectionReferenceSerializer(BuiltinReferenceSerializer):
    registry = registry.connections


class GaugeReferenceSerializer(BuiltinReferenceSerializer):
    registry = registry.gauges


class ThreeFormReferenceSerializer(BuiltinReferenceSerializer):
    registry = registry.three_forms


class AngleReferenceSerializer(BuiltinReferenceSerializer):
    registry = registry.angles


class FormReferenceSerializer(BuiltinReferenceSerializer):
    registry = registry.forms


class AngleField(serializers.CharField):
    """An angle written as a rational ('1/2') or a decimal"""

    def to_internal_value(self, data):
        text = super().to_internal_value(str(data))
        try:
            value = Fraction(text)
        except ValueError:
            raise serializers.ValidationError(f'"{text}" is not a rational or decimal angle.')
        return value


def _vertex_key(text):
    """'0,1' -> (0, 1)"""
    try:
        key = tuple(int(part) for part in str(text).split(','))
    except ValueError:
        raise serializers.ValidationError(f'"{text}" is not a comma-separated list of vertex ids.')
    if len(set(key)) != len(key) or min(key) < 0:
        raise serializers.ValidationError(f'"{text}" repeats a vertex or uses a negative id.')
    return key


def _chart_key(text):
    """'N,S' -> ('N', 'S')"""
    key = tuple(part.strip() for part in str(text).split(','))
    if not all(key):
        raise serializers.ValidationError(f'"{text}" is not a comma-separated list of chart ids.')
    return key


# Exchange formats: inline documents standing in for a registered built-in.

class SimplexField(serializers.Field):
    """A simplex as a vertex list, or as {"vertices": [...], "orientation": -1}"""

    def to_internal_value(self, data):
        orientation = 1
        if isinstance(data, dict):
            orientation = data.get('orientation', 1)
            data = data.get('vertices')
        if not isinstance(data, list) or not data or \
                not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in data):
            raise serializers.ValidationError('A simplex is a nonempty list of vertex ids.')
        if orientation not in (1, -1):
            raise serializers.ValidationError('Orientation must be 1 or -1.')
        if len(set(data)) != len(data):
            raise serializers.ValidationError(f'Simplex {data} repeats a vertex.')
        return Simplex(tuple(data), orientation)

    def to_representation(self, value):
        return {'vertices': list(value.vertices), 'orientation': value.orientation}


class VertexField(serializers.Field):
    """Vertex coordinates, either one list or one list per chart id"""

    def to_internal_value(self, data):
        if isinstance(data, dict):
            if not data:
                raise serializers.ValidationError('Give coordinates in at least one chart.')
            return {str(chart): self._point(point) for chart, point in data.items()}
        return self._point(data)

    @staticmethod
    def _point(data):
        if not isinstance(data, list) or not data:
            raise serializers.ValidationError('Coordinates are a nonempty list of numbers.')
        try:
            return [float(x) for x in data]
        except (TypeError, ValueError):
            raise serializers.ValidationError('Coordinates are a nonempty list of numbers.')

    def to_representation(self, value):
        return value


CHART_PARAMS = {
    'whole': (),
    'halfspace': ('axis',),
    'cap': ('center', 'radius'),
    'interval': ('axis', 'start', 'length'),
    'product': ('left', 'right', 'split'),
}


class ChartSerializer(serializers.Serializer):
    """Serializer for one chart of a cover; product charts nest their two factors"""
    id = serializers.CharField()
    domain = serializers.ChoiceField(choices=sorted(CHART_PARAMS), default='whole')
    params = serializers.DictField(required=False, default=dict)

    def validate(self, attrs):
        missing = [key for key in CHART_PARAMS[attrs['domain']] if key not in attrs['params']]
        if missing:
            raise serializers.ValidationError({'params': [f'{attrs["domain"]} charts need {", ".join(missing)}.']})
        if attrs['domain'] == 'product':
            params = dict(attrs['params'])
            for side in ('left', 'right'):
                factor = ChartSerializer(data=params[side])
                if not factor.is_valid():
                    raise serializers.ValidationError({'params': {side: factor.errors}})
                params[side] = factor.validated_data
            attrs['params'] = params
        return attrs

    def create(self, validated_data):
        params = dict(validated_data['params'])
        if validated_data['domain'] == 'product':
            params['left'] = self.create(params['left'])
            params['right'] = self.create(params['right'])
        return Chart(validated_data['id'], validated_data['domain'], params)


class MeshSerializer(serializers.Serializer):
    """Serializer for a mesh: vertices, top simplices, cover, subordination and named chains.

    The top simplices, all of one dimension, form the fundamental chain. A
    vertex given per chart must agree across charts modulo the period. When
    no subordination is given, charts are assigned greedily.
    """
    format = 'mesh'
    vertices = serializers.ListField(child=VertexField(), allow_empty=False)
    simplices = serializers.ListField(child=SimplexField(), allow_empty=False)
    period = serializers.ListField(child=serializers.FloatField(allow_null=True), required=False)
    parametrization = serializers.ChoiceField(choices=sorted(PARAMETRIZATIONS), default='affine')
    cover = ChartSerializer(many=True, allow_empty=False)
    subordination = serializers.DictField(child=serializers.CharField(), required=False)
    chains = serializers.DictField(child=serializers.ListField(child=SimplexField()), required=False, default=dict)

    def validate(self, attrs):
        charts = [chart['id'] for chart in attrs['cover']]
        if len(set(charts)) != len(charts):
            raise serializers.ValidationError({'cover': ['Chart ids must be unique.']})
        if len({simplex.dimension for simplex in attrs['simplices']}) > 1:
            raise serializers.ValidationError({'simplices': ['All top simplices have one dimension.']})
        count = len(attrs['vertices'])
        everything = attrs['simplices'] + [s for chain in attrs['chains'].values() for s in chain]
        if any(max(simplex.vertices) >= count for simplex in everything):
            raise serializers.ValidationError({'simplices': [f'Vertex ids run from 0 to {count - 1}.']})
        points = [p for v in attrs['vertices'] for p in (v.values() if isinstance(v, dict) else [v])]
        widths = {len(p) for p in points}
        if len(widths) > 1:
            raise serializers.ValidationError({'vertices': ['Every vertex needs the same number of coordinates.']})
        period = attrs.get('period')
        if period is not None and len(period) != widths.pop():
            raise serializers.ValidationError({'period': ['Give one period entry per coordinate axis.']})
        attrs['vertices'] = [self._reconcile(i, vertex, period, charts) for i, vertex in enumerate(attrs['vertices'])]
        if 'subordination' in attrs:
            assignment = {}
            for key, chart in attrs['subordination'].items():
                if chart not in charts:
                    raise serializers.ValidationError({'subordination': [f'Unknown chart "{chart}" for "{key}".']})
                assignment[_vertex_key(key)] = chart
            attrs['subordination'] = assignment
        return attrs

    @staticmethod
    def _reconcile(index, vertex, period, charts):
        if not isinstance(vertex, dict):
            return vertex
        unknown = [chart for chart in vertex if chart not in charts]
        if unknown:
            raise serializers.ValidationError({'vertices': [f'Vertex {index} uses unknown chart(s) {unknown}.']})
        ordered = [np.asarray(vertex[chart]) for chart in sorted(vertex)]
        reference = ordered[0]
        for other in ordered[1:]:
            delta = other - reference
            for axis, step in enumerate(period or ()):
                if step:
                    delta[axis] -= step * np.round(delta[axis] / step)
            if np.max(np.abs(delta)) > 1e-9:
                raise serializers.ValidationError({'vertices': [f'Vertex {index} has disagreeing chart coordinates.']})
        return reference.tolist()

    def create(self, validated_data):
        coordinates = np.array(validated_data['vertices'], dtype=float)
        parametrization = PARAMETRIZATIONS[validated_data['parametrization']]()
        K = SimplicialComplex.from_chain(coordinates, Chain([(s, 1) for s in validated_data['simplices']]),
                                         period=validated_data.get('period'), parametrization=parametrization)
        U = Cover([ChartSerializer().create(chart) for chart in validated_data['cover']])
        if 'subordination' in validated_data:
            s = Subordination(validated_data['subordination'])
            report = verify_subordination(K, U, s)
            if not report.passed:
                raise StructuralError(f'subordination fails on faces {report.failures[:5]}')
        else:
            s = assign_charts(K, U)
        chains = {'fundamental': K.fundamental}
        for name, simplices in validated_data['chains'].items():
            chain = Chain([(simplex, 1) for simplex in simplices])
            unknown = [key for key in chain if key not in K]
            if unknown:
                raise StructuralError(f'chain {name!r} uses simplices outside the mesh: {unknown[:5]}')
            chains[name] = chain
        return Scene(K, U, s, chains)


class AngleEntryField(serializers.Field):
    """A rational angle, or a reference to a registered angle field"""

    def to_internal_value(self, data):
        if isinstance(data, dict):
            reference = AngleReferenceSerializer(data=data)
            if not reference.is_valid():
                raise serializers.ValidationError(reference.errors)
            return dict(reference.validated_data)
        return AngleField().to_internal_value(data)

    def to_representation(self, value):
        return value if isinstance(value, dict) else str(value)


class CochainSerializer(serializers.Serializer):
    """Serializer for a Deligne cochain (g, omega_1, ..., omega_p) over the scene's cover.

    Keys are comma-separated chart ids: p+1 of them for g, p+1-r for omega_r.
    Values of g are rational angles or named angle fields; forms are named.
    """
    format = 'cochain'
    degree = serializers.IntegerField(min_value=1, max_value=3)
    backend = serializers.ChoiceField(choices=BACKENDS, default=FLOAT)
    name = serializers.CharField(required=False, default='inline')
    g = serializers.DictField(child=AngleEntryField())
    omega_1 = serializers.DictField(child=FormReferenceSerializer(), required=False)
    omega_2 = serializers.DictField(child=FormReferenceSerializer(), required=False)
    omega_3 = serializers.DictField(child=FormReferenceSerializer(), required=False)

    def validate(self, attrs):
        p = attrs['degree']
        errors = {}
        for r in range(p + 1):
            field = 'g' if r == 0 else f'omega_{r}'
            if field not in attrs:
                errors[field] = [f'A degree-{p} cochain needs {field}.']
                continue
            table = {}
            for key, value in attrs[field].items():
                charts = _chart_key(key)
                if len(charts) != p + 1 - r:
                    errors.setdefault(field, []).append(f'"{key}" must name {p + 1 - r} chart(s).')
                table[charts] = value
            attrs[field] = table
        for r in range(p + 1, 4):
            if f'omega_{r}' in attrs:
                errors[f'omega_{r}'] = [f'A degree-{p} cochain has no omega_{r}.']
        if errors:
            raise serializers.ValidationError(errors)
        return attrs

    def create(self, validated_data):
        cover = self.context['scene'].cover
        p = validated_data['degree']
        components = []
        for r in range(p + 1):
            field = 'g' if r == 0 else f'omega_{r}'
            values = {}
            for charts, entry in validated_data[field].items():
                unknown = [chart for chart in charts if chart not in cover]
                if unknown:
                    raise StructuralError(f'{field} uses charts {unknown} outside the cover {list(cover.ids)}')
                values[charts] = self._angle(entry) if r == 0 else \
                    registry.forms.build(entry['name'], entry['params'], degree=r)
            components.append(CechCochain(p - r, values, r))
        return DeligneCochain(p, cover, components, validated_data['backend'], validated_data['name'])

    @staticmethod
    def _angle(entry):
        if isinstance(entry, dict):
            return registry.angles.build(entry['name'], entry['params'])
        return ConstantAngle(entry)


class GroupTableSerializer(serializers.Serializer):
    """Serializer for a finite group given by its multiplication table on indices 0..n-1"""
    format = 'group_table'
    table = serializers.ListField(child=serializers.ListField(child=serializers.IntegerField(min_value=0)),
                                  allow_empty=False)
    labels = serializers.ListField(child=serializers.CharField(), required=False)
    name = serializers.CharField(required=False, default='')

    def validate_table(self, value):
        if any(len(row) != len(value) for row in value):
            raise serializers.ValidationError('The multiplication table must be square.')
        return value

    def validate(self, attrs):
        labels = attrs.get('labels')
        if labels is not None and len(set(labels)) != len(labels):
            raise serializers.ValidationError({'labels': ['Labels must be distinct.']})
        try:
            FiniteGroupModel(attrs['table'], labels, attrs['name'])
        except StructuralError as exc:
            raise serializers.ValidationError({'table': [str(exc)]})
        return attrs

    def create(self, validated_data):
        return FiniteGroupModel(validated_data['table'], validated_data.get('labels'), validated_data['name'])


class CochainEntrySerializer(serializers.Serializer):
    at = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    angle = AngleField()


class GroupCochainTableSerializer(serializers.Serializer):
    """Serializer for a tabulated group cochain: angles at tuples of element labels, zero elsewhere"""
    format = 'group_cochain'
    degree = serializers.IntegerField(min_value=1, default=3)
    values = CochainEntrySerializer(many=True, default=list)
    name = serializers.CharField(required=False, default='tabulated')

    def validate(self, attrs):
        wrong = [entry['at'] for entry in attrs['values'] if len(entry['at']) != attrs['degree']]
        if wrong:
            raise serializers.ValidationError({'values': [f'Points {wrong} do not have {attrs["degree"]} entries.']})
        return attrs

    def create(self, validated_data):
        group = self.context['group']
        values = {tuple(group.index(label) for label in entry['at']): entry['angle']
                  for entry in validated_data['values']}
        return GroupCochain(group, validated_data['degree'], values, validated_data['name'])


class TriangulationSerializer(serializers.Serializer):
    """Serializer for a branched triangulation: oriented tetrahedra, branched by vertex id order"""
    format = 'triangulation'
    tetrahedra = serializers.ListField(child=SimplexField(), allow_empty=False)

    def validate_tetrahedra(self, value):
        if any(simplex.dimension != 3 for simplex in value):
            raise serializers.ValidationError('Every tetrahedron has four vertices.')
        return value

    def create(self, validated_data):
        tetrahedra = validated_data['tetrahedra']
        count = max(max(simplex.vertices) for simplex in tetrahedra) + 1
        return SimplicialComplex.from_chain(np.zeros((count, 1)), Chain([(simplex, 1) for simplex in tetrahedra]))


class ColoringSerializer(serializers.Serializer):
    """Serializer for an edge colouring: "u,w" -> label of the directed edge u -> w"""
    edges = serializers.DictField(child=serializers.CharField(), allow_empty=False)

    def validate_edges(self, value):
        parsed = {}
        for key, label in value.items():
            edge = _vertex_key(key)
            if len(edge) != 2:
                raise serializers.ValidationError(f'"{key}" is not an edge.')
            parsed[edge] = label
        return parsed

    def create(self, validated_data):
        K, group = self.context['complex'], self.context['group']
        values = {}
        for (u, w), label in validated_data['edges'].items():
            g = group.index(label)
            values[(min(u, w), max(u, w))] = g if u < w else group.inverse(g)
        return Coloring(K, group, values)


INLINE_FORMATS = {serializer.format: serializer for serializer in
                  (MeshSerializer, CochainSerializer, GroupTableSerializer, GroupCochainTableSerializer,
                   TriangulationSerializer)}


class BuiltinOrInlineField(serializers.Field):
    """A built-in reference {"name", "params"}, an inline exchange document, or {"file": path} holding one.

    Validates to the reference itself or to {"format": ..., "data": ...};
    files are read relative to the scenario's directory.
    """

    def __init__(self, reference, inline, **kwargs):
        self.reference = reference
        self.inline = inline
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        if isinstance(data, dict) and set(data) == {'file'}:
            data = self._load(data['file'])
        if not isinstance(data, dict):
            raise serializers.ValidationError('Expected a built-in reference or an inline object.')
        if 'name' in data and set(data) <= {'name', 'params'}:
            serializer = self.reference(data=data)
            if not serializer.is_valid():
                raise serializers.ValidationError(serializer.errors)
            return dict(serializer.validated_data)
        serializer = self.inline(data=data, context=self.context)
        if not serializer.is_valid():
            raise serializers.ValidationError(serializer.errors)
        return {'format': self.inline.format, 'data': serializer.validated_data}

    def _load(self, name):
        path = Path(self.context.get('base_dir') or '.') / str(name)
        try:
            text = path.read_text()
        except OSError as exc:
            raise serializers.ValidationError({'file': [f'cannot read {path}: {exc.strerror}']})
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise serializers.ValidationError(
                {'file': [f'{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}']})

    def to_representation(self, value):
        return value


def build_inline(reference, **context):
    """Object described by a validated inline document"""
    return INLINE_FORMATS[reference['format']](context=context).create(reference['data'])


class CheckCocycleSerializer(serializers.Serializer):
    """Serializer for check-cocycle inputs"""
    scene = BuiltinOrInlineField(SceneReferenceSerializer, MeshSerializer)
    cochain = BuiltinOrInlineField(CochainReferenceSerializer, CochainSerializer)
    layered_seed = serializers.IntegerField(required=False, allow_null=True, default=None)
    samples = serializers.IntegerField(min_value=1, default=50)
    expect_cocycle = serializers.BooleanField(default=True)


class HolonomySerializer(serializers.Serializer):
    """Serializer for holonomy inputs"""
    scene = BuiltinOrInlineField(SceneReferenceSerializer, MeshSerializer)
    cochain = BuiltinOrInlineField(CochainReferenceSerializer, CochainSerializer)
    cycle = serializers.CharField()
    sigma = serializers.CharField(required=False)
    subdivide = serializers.BooleanField(default=False)
    layered_seeds = serializers.ListField(child=serializers.IntegerField(), default=list)
    expected = AngleField(required=False)


class TransgressSerializer(serializers.Serializer):
    """Serializer for transgress inputs"""
    scene = SceneReferenceSerializer()
    cochain = BuiltinOrInlineField(CochainReferenceSerializer, CochainSerializer)
    cycle = serializers.CharField(required=False)
    samples = serializers.IntegerField(min_value=1, default=100)
    expected = AngleField(required=False)
    cochain_level = serializers.BooleanField(default=True)

    def validate_scene(self, value):
        if value['name'] != 'circle_product':
            raise serializers.ValidationError('Transgression runs on a circle_product scene.')
        return value


class MultiplicativitySerializer(serializers.Serializer):
    """Serializer for the multiplicativity block of dw inputs"""
    perturbed = serializers.BooleanField(default=False)
    pairs = serializers.IntegerField(min_value=1, default=12)
    n_circle = serializers.IntegerField(min_value=3, default=3)
    surface = serializers.ChoiceField(choices=['torus', 'genus_two'], default='torus')


class DWSerializer(serializers.Serializer):
    """Serializer for dw inputs"""
    complex = BuiltinOrInlineField(ComplexReferenceSerializer, TriangulationSerializer, required=False)
    group = BuiltinOrInlineField(GroupReferenceSerializer, GroupTableSerializer)
    cocycle = BuiltinOrInlineField(GroupCocycleReferenceSerializer, GroupCochainTableSerializer)
    coloring = ColoringSerializer(required=False)
    expected = serializers.CharField(required=False)
    multiplicativity = MultiplicativitySerializer(required=False)

    def validate(self, attrs):
        if 'complex' not in attrs and 'multiplicativity' not in attrs:
            raise serializers.ValidationError('Give a complex, a multiplicativity block, or both.')
        if 'coloring' in attrs and 'complex' not in attrs:
            raise serializers.ValidationError({'coloring': ['A colouring needs a complex.']})
        return attrs


class TripleSerializer(serializers.Serializer):
    """Serializer for triple inputs"""
    group = BuiltinOrInlineField(GroupReferenceSerializer, GroupTableSerializer)
    cocycle = BuiltinOrInlineField(GroupCocycleReferenceSerializer, GroupCochainTableSerializer)


class CSSerializer(serializers.Serializer):
    """Serializer for cs inputs"""
    connection = ConnectionReferenceSerializer()
    gauge = GaugeReferenceSerializer(required=False)
    level = serializers.IntegerField(default=1)
    kind = serializers.ChoiceField(choices=['second_chern', 'trace_square'], default='second_chern')
    grid = serializers.IntegerField(min_value=4, required=False)
    cubic = AngleField(required=False)
    path_check = serializers.BooleanField(default=False)
    expected_degree = serializers.IntegerField(required=False)
    expected_shift = serializers.IntegerField(required=False)


class CFieldSerializer(serializers.Serializer):
    """Serializer for cfield inputs"""
    connection = ConnectionReferenceSerializer()
    c = ThreeFormReferenceSerializer()
    gauges = GaugeReferenceSerializer(many=True, required=False, default=list)
    alpha = ConnectionReferenceSerializer(required=False)
    level = serializers.IntegerField(default=1)
    kind = serializers.ChoiceField(choices=['second_chern', 'trace_square'], default='second_chern')
    grid = serializers.IntegerField(min_value=4, required=False)


class SuiteSerializer(serializers.Serializer):
    """Serializer for suite inputs"""
    names = serializers.ListField(child=serializers.ChoiceField(choices=sorted(registry.SUITES)), default=list)


TASK_SERIALIZERS = {
    'check-cocycle': CheckCocycleSerializer,
    'holonomy': HolonomySerializer,
    'transgress': TransgressSerializer,
    'dw': DWSerializer,
    'triple': TripleSerializer,
    'cs': CSSerializer,
    'cfield': CFieldSerializer,
    'suite': SuiteSerializer,
}


class ScenarioSerializer(serializers.Serializer):
    """Serializer for a scenario file; ``base_dir`` in the context resolves file references"""
    task = serializers.ChoiceField(choices=TASK_KINDS)
    seed = serializers.IntegerField(required=False)
    tolerance = serializers.FloatField(required=False)
    description = serializers.CharField(required=False, allow_blank=True)
    inputs = serializers.DictField(required=False, default=dict)

    def validate_tolerance(self, value):
        if value <= 0:
            raise serializers.ValidationError('Tolerance must be positive.')
        return value

    def validate(self, attrs):
        inputs = TASK_SERIALIZERS[attrs['task']](data=attrs.get('inputs', {}), context=self.context)
        if not inputs.is_valid():
            raise serializers.ValidationError({'inputs': inputs.errors})
        attrs['inputs'] = inputs.validated_data
        return attrs
