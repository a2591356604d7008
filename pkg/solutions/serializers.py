# solutions/serializers.py
from django.core.exceptions import ValidationError as DomainValidationError
from rest_framework import serializers

from .types import IndependentSolution, SeedSet, SetDistribution


class SolutionSerializer(serializers.Serializer):
    """
    Base for the three solution kinds

    Subclasses set `solution_class`; validation builds the domain object so
    every invariant of the solution types is enforced on input.
    """

    solution_class = None
    kind = serializers.ChoiceField(choices=[SeedSet.kind, IndependentSolution.kind, SetDistribution.kind])

    def validate_kind(self, value):
        """Kind must match the serializer"""
        if value != self.solution_class.kind:
            raise serializers.ValidationError(f"Expected kind {self.solution_class.kind!r}.")
        return value

    def validate(self, attrs):
        try:
            self.build(attrs)
        except DomainValidationError as exc:
            raise serializers.ValidationError(exc.messages)
        return attrs

    def build(self, attrs):
        raise NotImplementedError

    def create(self, validated_data):
        return self.build(validated_data)


class SeedSetSerializer(SolutionSerializer):
    solution_class = SeedSet

    nodes = serializers.ListField(child=serializers.IntegerField(min_value=0))
    k = serializers.IntegerField(min_value=0)

    def build(self, attrs):
        return SeedSet(attrs['nodes'], attrs['k'])


class IndependentSolutionSerializer(SolutionSerializer):
    solution_class = IndependentSolution

    x = serializers.ListField(child=serializers.FloatField(min_value=0.0, max_value=1.0))
    k = serializers.FloatField(min_value=0.0)

    def build(self, attrs):
        return IndependentSolution(attrs['x'], attrs['k'])


class SupportEntrySerializer(serializers.Serializer):
    nodes = serializers.ListField(child=serializers.IntegerField(min_value=0))
    weight = serializers.FloatField(min_value=0.0, max_value=1.0)


class SetDistributionSerializer(SolutionSerializer):
    solution_class = SetDistribution

    support = SupportEntrySerializer(many=True)
    k = serializers.FloatField(min_value=0.0)

    def validate_support(self, value):
        """Support sets must be distinct"""
        keys = [tuple(sorted(entry['nodes'])) for entry in value]
        if len(set(keys)) != len(keys):
            raise serializers.ValidationError("Support sets must be distinct.")
        return value

    def build(self, attrs):
        return SetDistribution(
            [(entry['nodes'], entry['weight']) for entry in attrs['support']], attrs['k']
        )


SERIALIZERS = {
    SeedSet.kind: SeedSetSerializer,
    IndependentSolution.kind: IndependentSolutionSerializer,
    SetDistribution.kind: SetDistributionSerializer,
}


def dump_solution(solution):
    """JSON-ready dict for any solution kind"""
    return dict(SERIALIZERS[solution.kind](solution).data)


def load_solution(data):
    """
    Validate a JSON document and return the solution it describes

    Raises:
        rest_framework.serializers.ValidationError: on malformed input
    """
    kind = data.get('kind') if isinstance(data, dict) else None
    if kind not in SERIALIZERS:
        raise serializers.ValidationError({'kind': [f"Unknown solution kind {kind!r}."]})
    serializer = SERIALIZERS[kind](data=data)
    serializer.is_valid(raise_exception=True)
    return serializer.save()
