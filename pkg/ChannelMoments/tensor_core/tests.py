import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose
from rest_framework import serializers

from .exceptions import DimensionError, InvalidParameterError, ShapeMismatchError
from .models import Permutation, TensorSpace
from .operators import (
    hs_inner,
    hs_norm,
    kron,
    kron_all,
    partial_trace,
    permutation_operator,
    permutation_sum,
    swap_operator,
    symmetric_projector,
    tensor_power_vectors,
    unit_matrix,
)
from .serializers import MatrixSerializer, to_jsonable


def random_matrix(rng, rows, cols=None):
    cols = cols or rows
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_vector(rng, n):
    vector = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return vector / np.linalg.norm(vector)


class TensorSpaceTests(SimpleTestCase):

    def test_dimension_and_factors(self):
        space = TensorSpace(3, 2)
        self.assertEqual(space.dim, 9)
        self.assertEqual(space.dims, [3, 3])

    def test_degenerate_space_is_legal(self):
        self.assertEqual(TensorSpace(1, 4).dim, 1)

    def test_rejects_oversized_space(self):
        with self.assertRaises(DimensionError):
            TensorSpace(2, 21)

    def test_rejects_empty_space(self):
        with self.assertRaises(DimensionError):
            TensorSpace(0, 2)


class PermutationTests(SimpleTestCase):

    def test_rejects_non_bijection(self):
        with self.assertRaises(InvalidParameterError):
            Permutation((0, 0, 1))

    def test_compose_and_inverse(self):
        s = Permutation((1, 2, 0))
        self.assertTrue((s * s.inverse()).is_identity())
        self.assertEqual((s * s)(0), 2)

    def test_all_lists_k_factorial(self):
        self.assertEqual(len(Permutation.all(4)), 24)


class KronTests(SimpleTestCase):

    def test_identity(self):
        assert_allclose(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_diagonal_expansion(self):
        assert_allclose(kron(np.diag([1, 2]), np.diag([3, 4])), np.diag([3, 4, 6, 8]))

    def test_trace_is_multiplicative(self):
        rng = np.random.default_rng(1)
        a, b = random_matrix(rng, 3), random_matrix(rng, 3)
        self.assertAlmostEqual(np.trace(kron(a, b)), np.trace(a) * np.trace(b), places=10)

    def test_acts_factorwise_on_product_vectors(self):
        rng = np.random.default_rng(2)
        a, b = random_matrix(rng, 2, 3), random_matrix(rng, 4, 2)
        x, y = random_vector(rng, 3), random_vector(rng, 2)
        assert_allclose(kron(a, b) @ np.kron(x, y), np.kron(a @ x, b @ y), atol=1e-12)

    def test_associative(self):
        rng = np.random.default_rng(3)
        a, b, c = random_matrix(rng, 2), random_matrix(rng, 3), random_matrix(rng, 2)
        assert_allclose(kron(kron(a, b), c), kron(a, kron(b, c)), atol=1e-12)
        assert_allclose(kron_all(a, b, c), kron(a, kron(b, c)), atol=1e-12)

    def test_rejects_overflow(self):
        with self.assertRaises(DimensionError):
            kron(np.ones((2 ** 11, 1)), np.ones((2 ** 10, 1)))


class PartialTraceTests(SimpleTestCase):

    def test_product_operator(self):
        rng = np.random.default_rng(4)
        a, b = random_matrix(rng, 3), random_matrix(rng, 3)
        assert_allclose(partial_trace(kron(a, b), [3, 3], keep=[1]), np.trace(a) * b, atol=1e-12)
        assert_allclose(partial_trace(kron(a, b), [3, 3], keep=[0]), np.trace(b) * a, atol=1e-12)

    def test_identity(self):
        assert_allclose(partial_trace(np.eye(9), [3, 3], keep=[0]), 3 * np.eye(3))

    def test_tracing_everything_returns_scalar_trace(self):
        rng = np.random.default_rng(5)
        a = random_matrix(rng, 6)
        result = partial_trace(a, [2, 3], keep=[])
        self.assertEqual(result.shape, (1, 1))
        self.assertAlmostEqual(result[0, 0], np.trace(a), places=12)

    def test_trace_is_preserved(self):
        rng = np.random.default_rng(6)
        a = random_matrix(rng, 12)
        self.assertAlmostEqual(np.trace(partial_trace(a, [2, 3, 2], keep=[0, 2])), np.trace(a), places=10)

    def test_matches_brute_force_index_contraction(self):
        rng = np.random.default_rng(7)
        dims = [2, 2, 2, 2]
        a = random_matrix(rng, 16)
        keep = [1, 3]
        expected = np.zeros((4, 4), dtype=complex)
        tensor = a.reshape(dims + dims)
        for r1 in range(2):
            for r3 in range(2):
                for c1 in range(2):
                    for c3 in range(2):
                        total = 0
                        for t0 in range(2):
                            for t2 in range(2):
                                total += tensor[t0, r1, t2, r3, t0, c1, t2, c3]
                        expected[2 * r1 + r3, 2 * c1 + c3] = total
        assert_allclose(partial_trace(a, dims, keep), expected, atol=1e-12)

    def test_chain_rule(self):
        rng = np.random.default_rng(8)
        a = random_matrix(rng, 8)
        one_at_a_time = partial_trace(partial_trace(a, [2, 2, 2], keep=[0, 2]), [2, 2], keep=[1])
        assert_allclose(one_at_a_time, partial_trace(a, [2, 2, 2], keep=[2]), atol=1e-12)

    def test_dims_mismatch(self):
        with self.assertRaises(ShapeMismatchError):
            partial_trace(np.eye(5), [2, 2], keep=[0])


class PermutationOperatorTests(SimpleTestCase):

    def test_swap_on_one_dimension(self):
        assert_allclose(swap_operator(1), [[1]])

    def test_swap_properties(self):
        for n in (2, 3, 4):
            swap = swap_operator(n)
            assert_allclose(swap @ swap, np.eye(n * n))
            assert_allclose(swap, swap.conj().T)
            self.assertAlmostEqual(np.trace(swap).real, n)

    def test_swap_exchanges_factors(self):
        rng = np.random.default_rng(9)
        x, y = random_vector(rng, 4), random_vector(rng, 4)
        assert_allclose(swap_operator(4) @ np.kron(x, y), np.kron(y, x), atol=1e-12)

    def test_transposition_is_swap(self):
        assert_allclose(permutation_operator(TensorSpace(3, 2), Permutation.transposition(2, 0, 1)),
                        swap_operator(3))

    def test_three_cycle_trace(self):
        gamma = permutation_operator(TensorSpace(2, 3), Permutation.cycle(3))
        self.assertAlmostEqual(np.trace(gamma).real, 2)

    def test_moves_slot_i_to_slot_s_of_i(self):
        rng = np.random.default_rng(10)
        xs = [random_vector(rng, 3) for _ in range(3)]
        s = Permutation((1, 2, 0))
        inverse = s.inverse()
        expected = kron_all(*[xs[inverse(j)].reshape(-1, 1) for j in range(3)]).reshape(-1)
        product = kron_all(*[x.reshape(-1, 1) for x in xs]).reshape(-1)
        assert_allclose(permutation_operator(TensorSpace(3, 3), s) @ product, expected, atol=1e-12)

    def test_unitary_representation(self):
        for n, k in ((2, 3), (2, 4), (3, 3)):
            space = TensorSpace(n, k)
            operators = {s: permutation_operator(space, s) for s in Permutation.all(k)}
            for s, gamma_s in operators.items():
                assert_allclose(gamma_s.conj().T @ gamma_s, np.eye(space.dim))
                for t, gamma_t in operators.items():
                    np.testing.assert_array_equal(gamma_s @ gamma_t, operators[s * t])

    def test_identity_permutation(self):
        assert_allclose(permutation_operator(TensorSpace(2, 3), Permutation.identity(3)), np.eye(8))

    def test_wrong_point_count(self):
        with self.assertRaises(InvalidParameterError):
            permutation_operator(TensorSpace(2, 3), Permutation((1, 0)))


class SymmetricProjectorTests(SimpleTestCase):

    def test_suite_over_desk_scale(self):
        for n in range(1, 5):
            for k in range(1, 5):
                if n ** k > 256:
                    continue
                with self.subTest(n=n, k=k):
                    projector = symmetric_projector(TensorSpace(n, k))
                    assert_allclose(projector, projector.conj().T, atol=1e-12)
                    assert_allclose(projector @ projector, projector, atol=1e-10)
                    self.assertAlmostEqual(np.trace(projector).real, math.comb(n + k - 1, k), places=9)

    def test_first_power_is_identity(self):
        assert_allclose(symmetric_projector(TensorSpace(3, 1)), np.eye(3))

    def test_known_ranks(self):
        self.assertAlmostEqual(np.trace(symmetric_projector(TensorSpace(3, 2))).real, 6)
        self.assertAlmostEqual(np.trace(symmetric_projector(TensorSpace(2, 3))).real, 4)

    def test_fixes_symmetric_product_vectors(self):
        rng = np.random.default_rng(11)
        for n, k in ((2, 4), (3, 3)):
            x = random_vector(rng, n)
            power = tensor_power_vectors(x.reshape(1, -1), k)[0]
            assert_allclose(symmetric_projector(TensorSpace(n, k)) @ power, power, atol=1e-12)

    def test_numerator_is_k_factorial_idempotent(self):
        total = permutation_sum(TensorSpace(2, 3))
        assert_allclose(total @ total, 6 * total, atol=1e-9)

    def test_factor_limit(self):
        with self.assertRaises(DimensionError):
            symmetric_projector(TensorSpace(2, 5))


class HilbertSchmidtTests(SimpleTestCase):

    def test_identity(self):
        self.assertAlmostEqual(hs_inner(np.eye(3), np.eye(3)), 3)

    def test_rank_one_unit(self):
        unit = unit_matrix(3, 0, 1)
        self.assertAlmostEqual(hs_inner(unit, unit), 1)

    def test_cauchy_schwarz(self):
        rng = np.random.default_rng(12)
        a, b = random_matrix(rng, 4), random_matrix(rng, 4)
        self.assertLessEqual(abs(hs_inner(a, b)), hs_norm(a) * hs_norm(b) + 1e-12)
        self.assertAlmostEqual(hs_inner(a, b), np.trace(a @ b.conj().T), places=10)
        self.assertAlmostEqual(hs_norm(a) ** 2, hs_inner(a, a).real, places=10)

    def test_shape_mismatch(self):
        with self.assertRaises(ShapeMismatchError):
            hs_inner(np.eye(2), np.eye(3))


class MatrixSerializerTests(SimpleTestCase):

    def test_parses_wire_format(self):
        serializer = MatrixSerializer(data={'rows': 1, 'cols': 2, 'data': [[1, 0], [0, 1]]})
        serializer.is_valid(raise_exception=True)
        assert_allclose(serializer.save(), [[1, 1j]])

    def test_rejects_wrong_entry_count(self):
        serializer = MatrixSerializer(data={'rows': 2, 'cols': 2, 'data': [[1, 0]]})
        self.assertFalse(serializer.is_valid())

    def test_rejects_non_pairs(self):
        serializer = MatrixSerializer(data={'rows': 1, 'cols': 1, 'data': [[1, 0, 3]]})
        with self.assertRaises(serializers.ValidationError):
            serializer.is_valid(raise_exception=True)

    def test_emits_wire_format(self):
        data = MatrixSerializer(np.array([[1 + 2j], [3]])).data
        self.assertEqual(data, {'rows': 2, 'cols': 1, 'data': [[1.0, 2.0], [3.0, 0.0]]})

    def test_jsonable_values(self):
        self.assertEqual(to_jsonable({'z': 1 + 1j, 'x': np.float64(0.5), 'ok': np.bool_(True)}),
                         {'z': [1.0, 1.0], 'x': 0.5, 'ok': True})
