from rest_framework import serializers

from tensor_core.serializers import MatrixSerializer, to_jsonable


class MCEstimateSerializer(serializers.Serializer):
    """
    Read-only serializer for `MCEstimate`.

    Attributes:
        mean (MatrixSerializer): Sample mean in matrix JSON (scalars as 1x1).
        stderr (MatrixSerializer): Per-entry standard error in matrix JSON.
        samples (IntegerField): Number of samples N.
    """
    mean = MatrixSerializer(read_only=True)
    stderr = MatrixSerializer(read_only=True)
    samples = serializers.IntegerField(read_only=True)


class TwirlFitSerializer(serializers.Serializer):
    """
    Read-only serializer for `TwirlFit`.

    Complex coefficients are emitted as `[re, im]` pairs.

    Attributes:
        lam (SerializerMethodField): λ.
        mu (SerializerMethodField): μ.
        combined (SerializerMethodField): λ + μ.
        trace_constraint (SerializerMethodField): nλ + n²μ.
        residual (FloatField): Fit residual.
        dim (IntegerField): Input dimension n.
        samples (IntegerField): Haar unitaries averaged, 0 for an exact fit.
        identifiable (BooleanField): False when only λ + μ is determined.
    """
    lam = serializers.SerializerMethodField()
    mu = serializers.SerializerMethodField()
    combined = serializers.SerializerMethodField()
    trace_constraint = serializers.SerializerMethodField()
    residual = serializers.FloatField(read_only=True)
    dim = serializers.IntegerField(read_only=True)
    samples = serializers.IntegerField(read_only=True)
    identifiable = serializers.BooleanField(read_only=True)

    def get_lam(self, instance):
        return to_jsonable(instance.lam)

    def get_mu(self, instance):
        return to_jsonable(instance.mu)

    def get_combined(self, instance):
        return to_jsonable(instance.combined)

    def get_trace_constraint(self, instance):
        return to_jsonable(instance.trace_constraint)
