from rest_framework import serializers

from tensor_core.exceptions import ChannelMomentsError
from tensor_core.serializers import MatrixSerializer

from .models import KrausChannel


class ChannelSerializer(serializers.Serializer):
    """
    Serializer for the channel JSON format `{"dim_in": n, "dim_out": d, "kraus": [matrix, ...]}`.

    Keys other than these three (such as the `validation` summary written by
    `gen`) are ignored on input.

    Attributes:
        dim_in (IntegerField): Input dimension n.
        dim_out (IntegerField): Output dimension d.
        kraus (MatrixSerializer): __many=True__ <br>
            The Kraus operators in matrix JSON, each d x n.

    Methods:
        validate:
            Checks that every Kraus operator is d x n.
        create:
            Builds the `KrausChannel`.

    Examples:
        ```
        serializer = ChannelSerializer(data=JSONParser().parse(stream))
        serializer.is_valid(raise_exception=True)
        channel = serializer.save()
        ```
    """
    dim_in = serializers.IntegerField(min_value=1)
    dim_out = serializers.IntegerField(min_value=1)
    kraus = MatrixSerializer(many=True, allow_empty=False)

    def validate(self, attrs):
        """
        Validates the shape of every Kraus operator against the declared dimensions.

        Raises:
            ValidationError: If some operator is not dim_out x dim_in.
        """
        for index, operator in enumerate(attrs['kraus']):
            if (operator['rows'], operator['cols']) != (attrs['dim_out'], attrs['dim_in']):
                raise serializers.ValidationError({
                    'kraus': f"Operator {index} is {operator['rows']}x{operator['cols']}, "
                             f"expected {attrs['dim_out']}x{attrs['dim_in']}."
                })
        return attrs

    def create(self, validated_data):
        operators = tuple(MatrixSerializer().create(item) for item in validated_data['kraus'])
        try:
            return KrausChannel(validated_data['dim_in'], validated_data['dim_out'], operators)
        except ChannelMomentsError as error:
            raise serializers.ValidationError({'kraus': str(error)})


class CPTPReportSerializer(serializers.Serializer):
    """
    Read-only serializer for `CPTPReport`, the `validation` block of channel files.

    Attributes:
        tp_defect (FloatField): ||Σ A_i* A_i - I||_∞.
        cp (BooleanField): Complete positivity.
        warnings (ListField): Borderline Choi eigenvalue messages.
    """
    tp_defect = serializers.FloatField(read_only=True)
    cp = serializers.BooleanField(read_only=True)
    warnings = serializers.ListField(child=serializers.CharField(), read_only=True)


class ChannelNormsSerializer(serializers.Serializer):
    """
    Read-only serializer for `ChannelNorms`.

    Attributes:
        dim_in (IntegerField): Input dimension n.
        dim_out (IntegerField): Output dimension d.
        hs_sq (FloatField): ||E||_2².
        comp_hs_sq (FloatField): ||Ẽ||_2².
        sum (FloatField): ||E||_2² + ||Ẽ||_2².
        p2p (DictField): ||E||_{p→p} keyed by "1", "2" and "inf".
    """
    dim_in = serializers.IntegerField(read_only=True)
    dim_out = serializers.IntegerField(read_only=True)
    hs_sq = serializers.FloatField(read_only=True)
    comp_hs_sq = serializers.FloatField(read_only=True)
    sum = serializers.FloatField(read_only=True)
    p2p = serializers.DictField(child=serializers.FloatField(), read_only=True)
