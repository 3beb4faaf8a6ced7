import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from tensor_core.exceptions import DimensionError, InvalidParameterError, ShapeMismatchError
from tensor_core.models import TensorSpace
from tensor_core.operators import hs_inner, kron, partial_trace, permutation_sum, swap_operator, unit_matrix

from .integrals import (
    exact_cor6a,
    exact_cor6b,
    exact_fourth_weighted,
    exact_moment,
    exact_pair_scalar,
    exact_sandwich1,
    exact_sandwich2,
    exact_third_matrix_weighted,
    exact_third_scalar_weighted,
    exact_unit_weighted,
    exact_weighted2,
    mc_cor6a,
    mc_cor6b,
    mc_fourth_weighted,
    mc_moment,
    mc_pair_scalar,
    mc_sandwich1,
    mc_sandwich2,
    mc_third_matrix_weighted,
    mc_third_scalar_weighted,
    mc_weighted2,
)
from .models import SphereSampler
from .montecarlo import chunk_plan, concurrent_chunks, mc_estimate
from .sampling import sample_isometry, sample_sphere, sample_unitary, stream
from .serializers import MCEstimateSerializer, TwirlFitSerializer
from .twirl import twirl_fit


def random_matrix(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def random_hermitian(rng, n):
    a = random_matrix(rng, n)
    return (a + a.conj().T) / 2


class SamplingTests(SimpleTestCase):

    def test_named_streams_are_reproducible_and_distinct(self):
        first = stream(7, 'mc', 3).standard_normal(4)
        assert_allclose(first, stream(7, 'mc', 3).standard_normal(4))
        self.assertFalse(np.allclose(first, stream(7, 'mc', 4).standard_normal(4)))
        self.assertFalse(np.allclose(first, stream(8, 'mc', 3).standard_normal(4)))

    def test_negative_seed_rejected(self):
        with self.assertRaises(InvalidParameterError):
            stream(-1)

    def test_sphere_samples_are_unit_vectors(self):
        vectors = sample_sphere(stream(1), 5, 1000)
        assert_allclose(np.linalg.norm(vectors, axis=1), 1.0, atol=1e-12)

    def test_one_dimensional_sphere_is_a_phase(self):
        value = sample_sphere(stream(2), 1)
        self.assertEqual(value.shape, (1,))
        self.assertAlmostEqual(abs(value[0]), 1.0, places=12)

    def test_sampler_replays_with_same_seed(self):
        first, second = SphereSampler(3, seed=11), SphereSampler(3, seed=11)
        assert_allclose(first.draw(), second.draw())
        assert_allclose(first.draw(10), second.draw(10))
        self.assertEqual(first.counter, 2)

    def test_unitary_is_unitary(self):
        for n in (1, 2, 4):
            u = sample_unitary(n, stream(3, n))
            assert_allclose(u.conj().T @ u, np.eye(n), atol=1e-12)

    def test_batched_unitaries(self):
        batch = sample_unitary(3, stream(4), 50)
        products = np.einsum('bji,bjk->bik', batch.conj(), batch)
        assert_allclose(products, np.broadcast_to(np.eye(3), (50, 3, 3)), atol=1e-12)

    def test_isometry_columns_orthonormal(self):
        v = sample_isometry(4, 2, stream(5))
        self.assertEqual(v.shape, (4, 2))
        assert_allclose(v.conj().T @ v, np.eye(2), atol=1e-12)

    def test_isometry_needs_room(self):
        with self.assertRaises(InvalidParameterError):
            sample_isometry(2, 3, stream(5))

    def test_unitary_conjugation_averages_to_trace(self):
        rng = np.random.default_rng(6)
        a = random_matrix(rng, 3)

        def integrand(generator, count):
            u = sample_unitary(3, generator, count)
            return u @ a @ u.conj().transpose(0, 2, 1)

        estimate = mc_estimate(integrand, (3, 3), 10000, seed=6, name='conjugation')
        self.assertTrue(estimate.agrees_with(np.trace(a) * np.eye(3) / 3))

    def test_sphere_first_moment(self):
        estimate = mc_moment(3, 1, 100000, seed=12)
        self.assertTrue(estimate.agrees_with(np.eye(3) / 3))


class MonteCarloEngineTests(SimpleTestCase):

    def test_result_independent_of_worker_count(self):
        single = mc_moment(2, 2, 20000, seed=3, workers=1)
        pooled = mc_moment(2, 2, 20000, seed=3, workers=4)
        np.testing.assert_array_equal(single.mean, pooled.mean)
        np.testing.assert_array_equal(single.stderr, pooled.stderr)

    def test_result_independent_of_memory_cap(self):
        roomy = mc_moment(2, 2, 20000, seed=3, workers=4)
        tight = mc_moment(2, 2, 20000, seed=3, workers=4, chunk_elements=16 * 1000)
        np.testing.assert_array_equal(roomy.mean, tight.mean)
        np.testing.assert_array_equal(roomy.stderr, tight.stderr)

    def test_chunk_layout_ignores_memory_cap(self):
        self.assertEqual(chunk_plan(20000, 16), (4096, 5))
        self.assertEqual(concurrent_chunks(4096, 16, workers=8), 8)
        self.assertEqual(concurrent_chunks(4096, 16, workers=8, chunk_elements=16 * 1000), 1)
        self.assertEqual(concurrent_chunks(4096, 16, workers=8, chunk_elements=3 * 4096 * 16), 3)

    def test_stderr_shrinks_like_root_n(self):
        small = mc_moment(2, 2, 20000, seed=5)
        large = mc_moment(2, 2, 40000, seed=5)
        ratio = np.median(large.stderr) / np.median(small.stderr)
        self.assertGreaterEqual(ratio, 0.65)
        self.assertLessEqual(ratio, 0.76)

    def test_mean_is_trace_one_hermitian(self):
        estimate = mc_moment(2, 3, 20000, seed=9)
        self.assertAlmostEqual(np.trace(estimate.mean).real, 1.0, places=10)
        assert_allclose(estimate.mean, estimate.mean.conj().T, atol=1e-12)
        self.assertTrue(np.all(estimate.stderr >= 0))

    def test_needs_two_samples(self):
        with self.assertRaises(InvalidParameterError):
            mc_moment(2, 1, 1, seed=0)

    def test_dense_limit(self):
        with self.assertRaises(DimensionError):
            mc_moment(2, 11, 100, seed=0)


class ExactMomentTests(SimpleTestCase):

    def test_first_moment(self):
        assert_allclose(exact_moment(4, 1), np.eye(4) / 4)

    def test_second_moment(self):
        for n in (1, 2, 3):
            assert_allclose(exact_moment(n, 2), (np.eye(n * n) + swap_operator(n)) / (n * (n + 1)))

    def test_third_moment_numerator_trace(self):
        self.assertAlmostEqual(np.trace(permutation_sum(TensorSpace(2, 3))).real, 24)
        self.assertAlmostEqual(np.trace(exact_moment(2, 3)).real, 1.0, places=12)

    def test_fourth_moment_trace(self):
        self.assertAlmostEqual(np.trace(exact_moment(2, 4)).real, 1.0, places=12)

    def test_k_limit(self):
        with self.assertRaises(DimensionError):
            exact_moment(2, 5)

    def test_seeded_moments_match_exact(self):
        for n, k in ((2, 2), (3, 2), (2, 3)):
            with self.subTest(n=n, k=k):
                estimate = mc_moment(n, k, 200000, seed=2024)
                self.assertTrue(estimate.agrees_with(exact_moment(n, k), sigma=5.0))

    def test_repeated_seeds_pass_nineteen_of_twenty(self):
        exact = exact_moment(2, 2)
        passed = sum(mc_moment(2, 2, 200000, seed=seed).agrees_with(exact) for seed in range(20))
        self.assertGreaterEqual(passed, 19)


class WeightedIntegralTests(SimpleTestCase):

    def setUp(self):
        self.rng = np.random.default_rng(42)

    def test_weighted2_reductions(self):
        assert_allclose(exact_weighted2(np.eye(3)), np.eye(3) / 3)
        assert_allclose(exact_weighted2(unit_matrix(2, 0, 1)), unit_matrix(2, 0, 1) / 6)

    def test_unit_weighted_matches_general_form(self):
        for i in range(3):
            for j in range(3):
                assert_allclose(exact_unit_weighted(3, i, j), exact_weighted2(unit_matrix(3, i, j)), atol=1e-15)

    def test_pair_scalar_values(self):
        self.assertAlmostEqual(exact_pair_scalar(np.eye(4), np.eye(4)), 1.0)
        unit = unit_matrix(2, 0, 0)
        self.assertAlmostEqual(exact_pair_scalar(unit, unit), 1 / 3)

    def test_pair_scalar_is_symmetric(self):
        a, b = random_matrix(self.rng, 3), random_matrix(self.rng, 3)
        self.assertAlmostEqual(exact_pair_scalar(a, b), exact_pair_scalar(b, a), places=12)

    def test_cor6_specialisations(self):
        a = random_matrix(self.rng, 3)
        self.assertAlmostEqual(exact_cor6a(a), exact_pair_scalar(a, a.conj().T).real, places=12)
        self.assertAlmostEqual(exact_cor6b(a), np.trace(a) / 3, places=12)

    def test_equivalent_forms_agree(self):
        a, b = random_matrix(self.rng, 3), random_matrix(self.rng, 3)
        pair = exact_pair_scalar(a, b)
        self.assertAlmostEqual(hs_inner(kron(a, b), exact_moment(3, 2)), pair, places=12)
        self.assertAlmostEqual(hs_inner(exact_weighted2(a), b.conj().T), pair, places=12)
        recombined = sum(a[i, j] * exact_unit_weighted(3, i, j) for i in range(3) for j in range(3))
        assert_allclose(recombined, exact_weighted2(a), atol=1e-12)

    def test_linearity(self):
        a, b, c = (random_matrix(self.rng, 2) for _ in range(3))
        alpha, beta = 0.3 - 1.2j, 2.0 + 0.5j
        mix = alpha * a + beta * c
        assert_allclose(exact_weighted2(mix), alpha * exact_weighted2(a) + beta * exact_weighted2(c), atol=1e-12)
        assert_allclose(exact_third_scalar_weighted(mix, b),
                        alpha * exact_third_scalar_weighted(a, b) + beta * exact_third_scalar_weighted(c, b),
                        atol=1e-12)
        assert_allclose(exact_fourth_weighted(b, mix),
                        alpha * exact_fourth_weighted(b, a) + beta * exact_fourth_weighted(b, c), atol=1e-12)

    def test_unitary_covariance(self):
        a = random_matrix(self.rng, 3)
        u = sample_unitary(3, stream(8))
        assert_allclose(exact_weighted2(u @ a @ u.conj().T), u @ exact_weighted2(a) @ u.conj().T, atol=1e-12)

    def test_sandwich_reductions(self):
        for n in (2, 3):
            assert_allclose(exact_sandwich1(np.eye(n * n)), np.eye(n * n) / n, atol=1e-15)
            assert_allclose(exact_sandwich2(np.eye(n * n)), np.eye(n * n) / n ** 2, atol=1e-15)

    def test_sandwich_on_product_operators(self):
        b, c = random_matrix(self.rng, 2), random_matrix(self.rng, 2)
        expected1 = (kron(b, c) + np.trace(b) * kron(np.eye(2), c)) / 6
        assert_allclose(exact_sandwich1(kron(b, c)), expected1, atol=1e-12)
        assert_allclose(exact_sandwich2(kron(b, c)), kron(exact_weighted2(b), exact_weighted2(c)), atol=1e-12)

    def test_sandwich_needs_pair_space(self):
        with self.assertRaises(ShapeMismatchError):
            exact_sandwich1(np.eye(3))

    def test_third_scalar_reductions(self):
        b = random_matrix(self.rng, 3)
        assert_allclose(exact_third_scalar_weighted(np.eye(3), np.eye(3)), np.eye(3) / 3, atol=1e-15)
        assert_allclose(exact_third_scalar_weighted(np.eye(3), b), exact_weighted2(b), atol=1e-12)

    def test_third_matrix_reductions(self):
        a = random_hermitian(self.rng, 3)
        assert_allclose(exact_third_matrix_weighted(np.eye(3)), exact_moment(3, 2), atol=1e-15)
        assert_allclose(partial_trace(exact_third_matrix_weighted(a), [3, 3], keep=[0]), exact_weighted2(a),
                        atol=1e-12)
        result = exact_third_matrix_weighted(a)
        assert_allclose(result, result.conj().T, atol=1e-12)

    def test_fourth_reductions(self):
        b = random_matrix(self.rng, 2)
        assert_allclose(exact_fourth_weighted(np.eye(2), np.eye(2)), exact_moment(2, 2), atol=1e-15)
        assert_allclose(exact_fourth_weighted(np.eye(2), b), exact_third_matrix_weighted(b), atol=1e-12)

    def test_closed_forms_match_permutation_sums(self):
        for n in (2, 3):
            a, b = random_matrix(self.rng, n), random_matrix(self.rng, n)
            with self.subTest(n=n):
                assert_allclose(exact_third_scalar_weighted(a, b),
                                exact_third_scalar_weighted(a, b, method='permutation'), atol=1e-10)
                assert_allclose(exact_third_matrix_weighted(a),
                                exact_third_matrix_weighted(a, method='permutation'), atol=1e-10)
                assert_allclose(exact_fourth_weighted(a, b),
                                exact_fourth_weighted(a, b, method='permutation'), atol=1e-10)

    def test_unknown_method(self):
        with self.assertRaises(InvalidParameterError):
            exact_fourth_weighted(np.eye(2), np.eye(2), method='quadrature')


class MonteCarloAgreementTests(SimpleTestCase):

    def setUp(self):
        self.rng = np.random.default_rng(7)

    def test_scalar_integrals(self):
        a, b = random_matrix(self.rng, 3), random_matrix(self.rng, 3)
        self.assertTrue(mc_pair_scalar(a, b, 100000, seed=1).agrees_with(exact_pair_scalar(a, b)))
        self.assertTrue(mc_cor6a(a, 100000, seed=2).agrees_with(exact_cor6a(a)))
        self.assertTrue(mc_cor6b(a, 100000, seed=3).agrees_with(exact_cor6b(a)))

    def test_weighted_integrals(self):
        for n in (2, 3):
            a, b = random_matrix(self.rng, n), random_matrix(self.rng, n)
            with self.subTest(n=n):
                self.assertTrue(mc_weighted2(a, 200000, seed=4).agrees_with(exact_weighted2(a)))
                self.assertTrue(mc_third_scalar_weighted(a, b, 200000, seed=5)
                                .agrees_with(exact_third_scalar_weighted(a, b)))
                self.assertTrue(mc_third_matrix_weighted(a, 200000, seed=6)
                                .agrees_with(exact_third_matrix_weighted(a)))

    def test_sandwich_integrals(self):
        a = random_matrix(self.rng, 4)
        self.assertTrue(mc_sandwich1(a, 100000, seed=7).agrees_with(exact_sandwich1(a)))
        self.assertTrue(mc_sandwich2(a, 100000, seed=8).agrees_with(exact_sandwich2(a)))

    def test_fourth_weighted(self):
        a, b = random_matrix(self.rng, 2), random_matrix(self.rng, 2)
        self.assertTrue(mc_fourth_weighted(a, b, 400000, seed=9).agrees_with(exact_fourth_weighted(a, b)))


class TwirlTests(SimpleTestCase):

    def test_identity_map(self):
        fit = twirl_fit(np.eye(9), 3, samples=1000, seed=0)
        self.assertAlmostEqual(fit.lam, 1.0)
        self.assertAlmostEqual(fit.mu, 0.0)
        self.assertLessEqual(fit.residual, 1e-10)
        self.assertEqual(fit.samples, 0)

    def test_depolarizing_map(self):
        n = 3
        vec_identity = np.eye(n).reshape(-1)
        fit = twirl_fit(np.outer(vec_identity, vec_identity) / n, n, samples=1000, seed=0)
        self.assertAlmostEqual(fit.lam, 0.0)
        self.assertAlmostEqual(fit.mu, 1 / n)
        self.assertLessEqual(fit.residual, 1e-10)

    def test_random_trace_preserving_map(self):
        n, rank = 2, 3
        isometry = sample_isometry(n * rank, n, stream(21))
        kraus = isometry.reshape(n, rank, n).transpose(1, 0, 2)
        superop = sum(np.kron(a, a.conj()) for a in kraus)
        fit = twirl_fit(superop, n, samples=50000, seed=21)
        self.assertEqual(fit.samples, 50000)
        self.assertLessEqual(fit.residual, 0.05)
        self.assertLessEqual(abs(fit.trace_constraint - n), 0.02)

    def test_one_dimensional_map_is_not_identifiable(self):
        fit = twirl_fit(np.array([[0.5]]), 1, samples=10, seed=0)
        self.assertFalse(fit.identifiable)
        self.assertAlmostEqual(fit.combined, 0.5)

    def test_shape_mismatch(self):
        with self.assertRaises(ShapeMismatchError):
            twirl_fit(np.eye(4), 3, samples=10, seed=0)


class SerializerTests(SimpleTestCase):

    def test_estimate_wire_format(self):
        data = MCEstimateSerializer(mc_cor6b(np.eye(2), 10, seed=0)).data
        self.assertEqual(data['samples'], 10)
        self.assertEqual(data['mean']['rows'], 1)
        self.assertAlmostEqual(data['mean']['data'][0][0], 1.0)

    def test_twirl_wire_format(self):
        data = TwirlFitSerializer(twirl_fit(np.eye(4), 2, samples=10, seed=0)).data
        assert_allclose(data['lam'], [1.0, 0.0], atol=1e-12)
        self.assertTrue(data['identifiable'])
