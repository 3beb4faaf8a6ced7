from rest_framework import serializers

from .models import OutputFormat, RunConfig


class RunConfigSerializer(serializers.Serializer):
    """
    Validates command-line options and builds a `RunConfig`.

    Attributes:
        command (CharField): Command name.
        n (IntegerField): Input dimension, at least 1.
        d (IntegerField): Output dimension, at least 1.
        k (IntegerField): Tensor power, at least 1.
        lam (FloatField): λ in [0, 1], optional.
        t (FloatField): t in [0, 1], optional.
        rank (IntegerField): Kraus rank, optional.
        count (IntegerField): Number of isometries, optional.
        samples (IntegerField): At least 2.
        seed (IntegerField): Non-negative 64-bit seed.
        tol (FloatField): Positive exact tolerance.
        sigma (FloatField): Non-negative stderr multiplier.
        bound_tol (FloatField): Non-negative bound slack.
        output (CharField): Output path, optional.
        format (ChoiceField): `text`, `json` or `csv`.
        workers (IntegerField): At least 1.
        chunk_elements (IntegerField): At least 1.

    Examples:
        ```
        serializer = RunConfigSerializer(data={'command': 'verify', 'n': 2, 'seed': 7})
        serializer.is_valid(raise_exception=True)
        config = serializer.save()
        ```
    """
    command = serializers.CharField()
    n = serializers.IntegerField(min_value=1)
    d = serializers.IntegerField(min_value=1)
    k = serializers.IntegerField(min_value=1)
    lam = serializers.FloatField(min_value=0.0, max_value=1.0, required=False, allow_null=True)
    t = serializers.FloatField(min_value=0.0, max_value=1.0, required=False, allow_null=True)
    rank = serializers.IntegerField(min_value=1, required=False, allow_null=True)
    count = serializers.IntegerField(min_value=1, required=False, allow_null=True)
    samples = serializers.IntegerField(min_value=2)
    seed = serializers.IntegerField(min_value=0, max_value=2 ** 64 - 1)
    tol = serializers.FloatField()
    sigma = serializers.FloatField(min_value=0.0)
    bound_tol = serializers.FloatField(min_value=0.0)
    output = serializers.CharField(required=False, allow_null=True)
    format = serializers.ChoiceField(choices=OutputFormat.choices, default=OutputFormat.TEXT)
    workers = serializers.IntegerField(min_value=1)
    chunk_elements = serializers.IntegerField(min_value=1)

    def validate_tol(self, value):
        if not value > 0:
            raise serializers.ValidationError("Tolerance must be positive.")
        return value

    def create(self, validated_data):
        return RunConfig(**validated_data)
