# harness/serializers.py
import copy

from django.conf import settings
from django.core.exceptions import ValidationError as DomainValidationError
from rest_framework import serializers

from algorithms.registry import ALGORITHMS, RELAXED_ALGORITHMS
from algorithms.types import ETA_PRESETS, EtaRelaxation
from diffusion.utils import MODELS
from fixtures.utils import FIXTURES
from graph_core.utils import COMMUNITY_SCHEMES

from .types import AlgorithmSpec, ExperimentConfig

INSTANCE_KINDS = ('barabasi_albert', 'fixture', 'file')
COMMUNITY_SOURCES = COMMUNITY_SCHEMES + ('file', 'fixture')

PRESETS = {
    'random_singleton': {
        'name': 'random_singleton',
        'instance': {'kind': 'barabasi_albert', 'n': 200, 'm_attach': 2},
        'communities': {'scheme': 'singleton'},
        'model': 'IC',
        'w_max': 0.4,
        'k': 25,
        'algorithms': [
            {'id': 'grdy_im'},
            {'id': 'grdy_maxmin'},
            {'id': 'grdy_prop'},
            {'id': 'myopic'},
            {'id': 'uniform'},
            {'id': 'mult_weight'},
            {'id': 'ind_lp', 'etas': list(ETA_PRESETS['ind_lp'])},
            {'id': 'grdy_grp+lp', 'etas': list(ETA_PRESETS['distribution'])},
            {'id': 'maxmin+lp', 'etas': list(ETA_PRESETS['distribution'])},
        ],
        'instances': 5,
        'repetitions': 10,
    },
}


class InstanceSerializer(serializers.Serializer):
    """
    Where the graph comes from: a generator, a theory fixture, or an edge-list file
    """

    kind = serializers.ChoiceField(choices=INSTANCE_KINDS)
    n = serializers.IntegerField(min_value=2, required=False)
    m_attach = serializers.IntegerField(min_value=1, default=2)
    name = serializers.CharField(required=False)
    params = serializers.DictField(required=False, default=dict)
    graph = serializers.CharField(required=False, help_text="Path of an edge-list file")
    directed = serializers.BooleanField(default=True)
    largest_component = serializers.BooleanField(default=False)

    def validate_name(self, value):
        """Fixture names must be known"""
        if value not in FIXTURES:
            raise serializers.ValidationError(f"Unknown fixture {value!r}; choose one of {sorted(FIXTURES)}.")
        return value

    def validate(self, attrs):
        kind = attrs['kind']
        if kind == 'barabasi_albert':
            if 'n' not in attrs:
                raise serializers.ValidationError({'n': "The generator needs n."})
            if attrs['n'] <= attrs['m_attach']:
                raise serializers.ValidationError({'n': "n must exceed m_attach."})
        elif kind == 'fixture' and 'name' not in attrs:
            raise serializers.ValidationError({'name': "A fixture instance needs its name."})
        elif kind == 'file' and not attrs.get('graph'):
            raise serializers.ValidationError({'graph': "A file instance needs the edge-list path."})
        return attrs


class CommunitySerializer(serializers.Serializer):
    scheme = serializers.ChoiceField(choices=COMMUNITY_SOURCES, default='singleton')
    m = serializers.IntegerField(min_value=1, required=False)
    path = serializers.CharField(required=False)

    def validate(self, attrs):
        scheme = attrs['scheme']
        if scheme == 'file' and not attrs.get('path'):
            raise serializers.ValidationError({'path': "A community file path is required."})
        if scheme in ('random', 'bfs', 'random_overlap') and 'm' not in attrs:
            raise serializers.ValidationError({'m': f"The {scheme} scheme needs m."})
        return attrs


class AlgorithmSpecSerializer(serializers.Serializer):
    id = serializers.ChoiceField(choices=ALGORITHMS)
    etas = serializers.ListField(child=serializers.CharField(), required=False, allow_empty=False)

    def validate(self, attrs):
        algorithm = attrs['id']
        etas = attrs.get('etas')
        if algorithm not in RELAXED_ALGORITHMS:
            if etas:
                raise serializers.ValidationError({'etas': f"{algorithm} takes no eta."})
            attrs['etas'] = ['']
            return attrs

        etas = etas or ['0']
        for label in etas:
            try:
                relaxation = EtaRelaxation.parse(label, reference=1.0)
            except DomainValidationError as exc:
                raise serializers.ValidationError({'etas': exc.messages})
            if algorithm == 'ind_lp' and not EtaRelaxation.is_relative(label) and relaxation.eta >= 1.0:
                raise serializers.ValidationError({'etas': "ind_lp needs eta < 1."})
        if len(set(etas)) != len(etas):
            raise serializers.ValidationError({'etas': "Duplicate eta presets."})
        attrs['etas'] = [label.strip() for label in etas]
        return attrs


class ExperimentConfigSerializer(serializers.Serializer):
    """
    Serializer for experiment configuration documents

    Sample sizes left out fall back to the FAIRSPREAD settings.
    """

    name = serializers.CharField(default='experiment')
    instance = InstanceSerializer()
    communities = CommunitySerializer(required=False)
    algorithms = AlgorithmSpecSerializer(many=True)
    k = serializers.IntegerField(min_value=0, required=False)
    model = serializers.ChoiceField(choices=MODELS, default='IC')
    w_max = serializers.FloatField(min_value=0.0, max_value=1.0, default=0.4)
    algorithm_samples = serializers.IntegerField(min_value=1, required=False)
    evaluation_samples = serializers.IntegerField(min_value=1, required=False)
    independent_draws = serializers.IntegerField(min_value=1, required=False)
    repetitions = serializers.IntegerField(min_value=1, default=1)
    instances = serializers.IntegerField(min_value=1, default=1)
    seed = serializers.IntegerField(min_value=0, default=0)
    exact = serializers.BooleanField(default=False)
    mult_weight_iterations = serializers.IntegerField(min_value=1, required=False)
    mult_weight_step = serializers.FloatField(required=False)

    def validate_algorithms(self, value):
        """Each algorithm may appear once"""
        ids = [spec['id'] for spec in value]
        if len(set(ids)) != len(ids):
            raise serializers.ValidationError("Algorithms must be listed once each.")
        return value

    def validate_mult_weight_step(self, value):
        if not 0.0 < value < 1.0:
            raise serializers.ValidationError("The step must lie in (0, 1).")
        return value

    def validate(self, attrs):
        fixture = attrs['instance']['kind'] == 'fixture'
        communities = attrs.setdefault('communities', {'scheme': 'fixture' if fixture else 'singleton'})
        if not fixture:
            if 'k' not in attrs:
                raise serializers.ValidationError({'k': "k is required unless the instance is a fixture."})
            if communities['scheme'] == 'fixture':
                raise serializers.ValidationError({'communities': "Fixture communities need a fixture instance."})

        relative = any(EtaRelaxation.is_relative(eta) for spec in attrs['algorithms'] for eta in spec['etas'])
        if relative and 'grdy_im' not in {spec['id'] for spec in attrs['algorithms']}:
            raise serializers.ValidationError({'algorithms': "Presets relative to x need grdy_im in the run."})

        if attrs['exact'] and attrs['model'] != 'IC':
            raise serializers.ValidationError({'exact': "Exact evaluation is available for IC only."})

        defaults = settings.FAIRSPREAD
        attrs.setdefault('algorithm_samples', defaults['ALGORITHM_SAMPLES'])
        attrs.setdefault('evaluation_samples', defaults['EVALUATION_SAMPLES'])
        attrs.setdefault('independent_draws', defaults['INDEPENDENT_DRAWS'])
        return attrs

    def create(self, validated_data):
        data = dict(validated_data)
        data['algorithms'] = tuple(AlgorithmSpec(spec['id'], tuple(spec['etas'])) for spec in data['algorithms'])
        data['instance'] = dict(data['instance'])
        data['communities'] = dict(data['communities'])
        return ExperimentConfig(**data)


def load_config(data):
    """
    Validate a configuration document (optionally starting from a preset)

    Returns:
        ExperimentConfig

    Raises:
        rest_framework.serializers.ValidationError: on invalid documents
    """
    if not isinstance(data, dict):
        raise serializers.ValidationError("A configuration must be a JSON object.")
    data = dict(data)
    preset = data.pop('preset', None)
    if preset is not None:
        if preset not in PRESETS:
            raise serializers.ValidationError({'preset': [f"Unknown preset {preset!r}."]})
        merged = copy.deepcopy(PRESETS[preset])
        merged.update(data)
        data = merged
    serializer = ExperimentConfigSerializer(data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.save()
