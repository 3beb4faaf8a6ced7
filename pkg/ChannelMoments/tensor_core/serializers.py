import math

import numpy as np
from rest_framework import serializers


class MatrixSerializer(serializers.Serializer):
    """
    Serializer for the matrix JSON format `{"rows": r, "cols": c, "data": [[re, im], ...]}`.

    Entries are listed row-major, each as a real/imaginary pair.

    Attributes:
        rows (IntegerField): Number of rows, at least 1.
        cols (IntegerField): Number of columns, at least 1.
        data (ListField): `rows * cols` pairs of floats.

    Methods:
        validate:
            Checks the entry count and that every entry is finite.
        create:
            Builds the complex numpy array.
        to_representation:
            Emits the wire form of a numpy array.

    Examples:
        ```
        serializer = MatrixSerializer(data={"rows": 1, "cols": 2, "data": [[1, 0], [0, 1]]})
        serializer.is_valid(raise_exception=True)
        matrix = serializer.save()  # array([[1.+0.j, 0.+1.j]])
        ```
    """
    rows = serializers.IntegerField(min_value=1)
    cols = serializers.IntegerField(min_value=1)
    data = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2)
    )

    def validate(self, attrs):
        """
        Validates that `data` holds exactly `rows * cols` finite pairs.

        Raises:
            ValidationError: On a count mismatch or a NaN/infinite entry.
        """
        expected = attrs['rows'] * attrs['cols']
        if len(attrs['data']) != expected:
            raise serializers.ValidationError(
                f"Expected {expected} entries for a {attrs['rows']}x{attrs['cols']} matrix, "
                f"got {len(attrs['data'])}."
            )
        if not all(math.isfinite(part) for pair in attrs['data'] for part in pair):
            raise serializers.ValidationError("Matrix entries must be finite.")
        return attrs

    def create(self, validated_data):
        pairs = np.asarray(validated_data['data'], dtype=float)
        values = pairs[:, 0] + 1j * pairs[:, 1]
        return values.reshape(validated_data['rows'], validated_data['cols'])

    def to_representation(self, instance):
        matrix = np.asarray(instance, dtype=complex)
        if matrix.ndim < 2:
            matrix = matrix.reshape(-1, 1)
        return {
            'rows': int(matrix.shape[0]),
            'cols': int(matrix.shape[1]),
            'data': [[float(z.real), float(z.imag)] for z in matrix.reshape(-1)],
        }


def to_jsonable(value):
    """
    Convert report values into plain JSON types.

    Complex scalars become `[re, im]`, arrays become matrix JSON, numpy scalars
    become Python numbers; dicts, lists and tuples are converted recursively.
    """
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return MatrixSerializer(value).data
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    return value
