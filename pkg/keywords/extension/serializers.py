"""
Serializers

Validation for the structured inputs of the engine (table-scorer records and
synthetic dataset specs) and the representation of recorded evaluation runs.
"""

import math

from rest_framework import serializers

from keywords.extension.models import EvaluationRun

DISTRIBUTION_TOLERANCE = 1e-6


class TokenProbabilityField(serializers.Field):
    """A ``[token, probability]`` pair with a non-negative probability."""

    default_error_messages = {
        "invalid": "Expected a [token, probability] pair.",
        "negative": "Probability must be a finite non-negative number.",
    }

    def to_internal_value(self, data):
        if not isinstance(data, list | tuple) or len(data) != 2:  # noqa: PLR2004
            self.fail("invalid")
        token, probability = data
        if not isinstance(token, str) or isinstance(probability, bool):
            self.fail("invalid")
        try:
            probability = float(probability)
        except (TypeError, ValueError):
            self.fail("invalid")
        if not math.isfinite(probability) or probability < 0:
            self.fail("negative")
        return token, probability

    def to_representation(self, value):
        token, probability = value
        return [token, probability]


class TableRecordSerializer(serializers.Serializer):
    query = serializers.CharField(
        required=False,
        allow_null=True,
        allow_blank=True,
        trim_whitespace=False,
        default=None,
    )
    prefix = serializers.CharField(allow_blank=True, trim_whitespace=False)
    dists = serializers.ListField(
        child=serializers.ListField(child=TokenProbabilityField(), allow_empty=False),
        allow_empty=False,
    )

    def validate_dists(self, value):
        for position, pairs in enumerate(value, start=1):
            tokens = [token for token, _ in pairs]
            if len(set(tokens)) != len(tokens):
                msg = f"distribution {position} lists a token twice"
                raise serializers.ValidationError(msg)
            total = sum(probability for _, probability in pairs)
            if abs(total - 1.0) > DISTRIBUTION_TOLERANCE:
                msg = f"distribution {position} sums to {total:.6g}, expected 1"
                raise serializers.ValidationError(msg)
        return value


class SynthSpecSerializer(serializers.Serializer):
    """Parameters of the synthetic adversarial benchmark generator."""

    queries = serializers.IntegerField(min_value=1)
    noise = serializers.FloatField(min_value=0, default=0.2)
    trap = serializers.FloatField(min_value=0, default=0.4)
    fork = serializers.FloatField(min_value=0, default=0.4)
    trap_branch_count = serializers.IntegerField(min_value=1, default=50)
    trap_prefix_count = serializers.IntegerField(min_value=1, default=5)
    fork_width = serializers.IntegerField(min_value=2, default=6)
    fork_children = serializers.IntegerField(min_value=1, default=8)
    noise_distractors = serializers.IntegerField(min_value=1, default=5)
    noise_children = serializers.IntegerField(min_value=1, default=40)

    def validate(self, attrs):
        if attrs["noise"] + attrs["trap"] + attrs["fork"] <= 0:
            msg = "at least one scenario family needs a positive weight"
            raise serializers.ValidationError(msg)
        return attrs


class EvaluationRunSerializer(serializers.ModelSerializer):
    class Meta:
        model = EvaluationRun
        fields = [
            "id",
            "name",
            "status",
            "query_count",
            "manifest",
            "report",
            "processing_time",
            "created_at",
        ]
        read_only_fields = ["id", "created_at"]


def first_error(errors):
    """Flatten a DRF ``errors`` structure into one readable message."""
    if isinstance(errors, dict):
        for key, value in errors.items():
            message = first_error(value)
            return message if key == "non_field_errors" else f"{key}: {message}"
    if isinstance(errors, list) and errors:
        return first_error(errors[0])
    return str(errors)
