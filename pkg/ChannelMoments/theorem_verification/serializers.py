from rest_framework import serializers

from channel_management.models import ChannelNorms
from channel_management.serializers import ChannelNormsSerializer
from haar_integration.models import MCEstimate, TwirlFit
from haar_integration.serializers import MCEstimateSerializer, TwirlFitSerializer
from tensor_core.serializers import MatrixSerializer, to_jsonable

from .models import PurityVerdict, SweepRow


def report_value(value):
    """
    JSON form of one entry of `VerificationReport.values`.

    Domain records go through their serializers; everything else through
    `to_jsonable`.
    """
    if isinstance(value, ChannelNorms):
        return ChannelNormsSerializer(value).data
    if isinstance(value, MCEstimate):
        return MCEstimateSerializer(value).data
    if isinstance(value, TwirlFit):
        return TwirlFitSerializer(value).data
    if isinstance(value, PurityVerdict):
        return PurityVerdictSerializer(value).data
    if isinstance(value, SweepRow):
        return SweepRowSerializer(value).data
    if isinstance(value, dict):
        return {str(key): report_value(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [report_value(item) for item in value]
    return to_jsonable(value)


class PurityVerdictSerializer(serializers.Serializer):
    """
    Read-only serializer for `PurityVerdict`.

    Attributes:
        kind (CharField): `Isometric`, `Replacement` or `Not`.
        isometry (MatrixSerializer): V, only for `Isometric`.
        state (MatrixSerializer): ψ as a column, only for `Replacement`.
        witness (MatrixSerializer): The impure-image input as a column, only for `Not`.
        defect (FloatField): 1 - tr(E(xx*)²) at the witness.
        kraus_rank (IntegerField): Minimal number of Kraus operators.
    """
    kind = serializers.CharField(read_only=True)
    isometry = MatrixSerializer(read_only=True, allow_null=True)
    state = MatrixSerializer(read_only=True, allow_null=True)
    witness = MatrixSerializer(read_only=True, allow_null=True)
    defect = serializers.FloatField(read_only=True)
    kraus_rank = serializers.IntegerField(read_only=True)

    def to_representation(self, instance):
        data = super().to_representation(instance)
        return {key: value for key, value in data.items() if value is not None}


class SweepRowSerializer(serializers.Serializer):
    """
    Read-only serializer for `SweepRow`; its fields are the sweep table columns.

    Attributes:
        parameter (FloatField): λ or t.
        hs_sq (FloatField): ||E||_2².
        comp_hs_sq (FloatField): ||Ẽ||_2².
        sum (FloatField): Their sum.
        lower_bound (FloatField): (n+n²)/d.
        upper_bound (FloatField): n²+n.
    """
    parameter = serializers.FloatField(read_only=True)
    hs_sq = serializers.FloatField(read_only=True)
    comp_hs_sq = serializers.FloatField(read_only=True)
    sum = serializers.FloatField(read_only=True)
    lower_bound = serializers.FloatField(read_only=True)
    upper_bound = serializers.FloatField(read_only=True)


class VerificationReportSerializer(serializers.Serializer):
    """
    Read-only serializer for `VerificationReport`.

    Attributes:
        check (CharField): Check id.
        pass (BooleanField): Outcome; `passed` on the model, `pass` on the wire.
        params (SerializerMethodField): Parameters, seed included.
        tolerance (DictField): Exact tolerance, Monte Carlo sigma and bound slack.
        values (SerializerMethodField): Values, estimates and defects.
        failures (ListField): One message per failed sub-check.

    Examples:
        ```
        report = run_check('prop8', CheckOptions(n=2, k=3))
        JSONRenderer().render(VerificationReportSerializer(report).data)
        ```
    """
    check = serializers.CharField(read_only=True)
    params = serializers.SerializerMethodField()
    tolerance = serializers.DictField(child=serializers.FloatField(), read_only=True)
    values = serializers.SerializerMethodField()
    failures = serializers.ListField(child=serializers.CharField(), read_only=True)

    def get_fields(self):
        fields = super().get_fields()
        # `pass` is a keyword, so it cannot be a class attribute
        return {
            'check': fields.pop('check'),
            'pass': serializers.BooleanField(source='passed', read_only=True),
            **fields,
        }

    def get_params(self, instance):
        return report_value(instance.params)

    def get_values(self, instance):
        return report_value(instance.values)
