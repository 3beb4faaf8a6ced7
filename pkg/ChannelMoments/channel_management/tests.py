import itertools
import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from haar_integration.sampling import sample_isometry, sample_unitary, stream
from tensor_core.exceptions import (
    InvalidParameterError,
    NotIsometryError,
    NotPositiveError,
    ShapeMismatchError,
    UnsupportedNormError,
)
from tensor_core.operators import hs_inner, unit_matrix

from .channels import (
    adjoint_apply,
    adjoint_channel,
    apply,
    channel_from_stinespring,
    channel_norms,
    choi_matrix,
    comp_hs_norm_sq,
    complementary,
    complementary_apply,
    hs_norm_bounds,
    comp_hs_norm_bounds,
    hs_norm_sq,
    kraus_from_choi,
    kraus_remix,
    minimize_kraus,
    p2p_lower_bound,
    p2p_norm,
    stinespring_isometry,
    stinespring_outputs,
    superoperator_matrix,
    validate_choi,
    validate_cptp,
)
from .generators import (
    build_channel,
    cor10_t,
    depolarizing,
    e_lambda,
    haar_isometry,
    identity,
    isometric,
    random_cptp,
    random_isometric,
    random_unit_vector,
    replacement,
    vij_basis,
)
from .models import ChoiMatrix, KrausChannel
from .serializers import ChannelNormsSerializer, ChannelSerializer


DIMENSIONS = list(itertools.product(range(1, 5), repeat=2))


def random_matrix(rng, rows, cols=None):
    cols = cols or rows
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def ensemble(count, seed=0):
    """Seeded random channels cycling through (n, d) in {1..4}² and every admissible rank."""
    channels = []
    for index in range(count):
        n, d = DIMENSIONS[index % len(DIMENSIONS)]
        ranks = range(math.ceil(n / d), n * d + 1)
        rank = ranks[(index // len(DIMENSIONS)) % len(ranks)]
        channels.append(random_cptp(n, d, rank, seed=seed + index))
    return channels


def basis_inputs(n):
    return [unit_matrix(n, i, j) for i in range(n) for j in range(n)]


class KrausChannelTests(SimpleTestCase):

    def test_rejects_mismatched_operators(self):
        with self.assertRaises(ShapeMismatchError):
            KrausChannel(2, 2, (np.eye(2), np.eye(3)))

    def test_rejects_empty_kraus_list(self):
        with self.assertRaises(ShapeMismatchError):
            KrausChannel(2, 2, ())

    def test_operators_are_read_only(self):
        channel = identity(2)
        with self.assertRaises(ValueError):
            channel.kraus[0][0, 0] = 5


class ValidationTests(SimpleTestCase):

    def test_identity_is_trace_preserving(self):
        report = validate_cptp(identity(3))
        self.assertEqual(report.tp_defect, 0.0)
        self.assertTrue(report.cp)

    def test_depolarizing_is_trace_preserving(self):
        self.assertLessEqual(validate_cptp(depolarizing(2, 2)).tp_defect, 1e-12)

    def test_scaled_identity_defect(self):
        report = validate_cptp(KrausChannel(3, 3, (np.eye(3) / 2,)))
        self.assertAlmostEqual(report.tp_defect, 0.75)
        self.assertFalse(report.is_trace_preserving())

    def test_choi_validation(self):
        report = validate_choi(choi_matrix(random_cptp(2, 3, 2, seed=4)))
        self.assertTrue(report.cp)
        self.assertLessEqual(report.tp_defect, 1e-10)
        self.assertGreaterEqual(report.min_choi_eigenvalue, -1e-10)


class ApplyTests(SimpleTestCase):

    def setUp(self):
        self.rng = np.random.default_rng(1)

    def test_identity(self):
        x = random_matrix(self.rng, 3)
        assert_allclose(apply(identity(3), x), x)
        assert_allclose(adjoint_apply(identity(3), x), x)

    def test_depolarizing_action(self):
        for n, d in ((2, 2), (2, 3), (3, 2), (4, 1)):
            x = random_matrix(self.rng, n)
            assert_allclose(apply(depolarizing(n, d), x), np.trace(x) * np.eye(d) / d, atol=1e-10)
            y = random_matrix(self.rng, d)
            assert_allclose(adjoint_apply(depolarizing(n, d), y), np.trace(y) * np.eye(n) / d, atol=1e-10)

    def test_replacement_action(self):
        psi = random_unit_vector(3, seed=2)
        x = random_matrix(self.rng, 2)
        assert_allclose(apply(replacement(psi, 2), x), np.trace(x) * np.outer(psi, psi.conj()), atol=1e-12)

    def test_adjoint_duality(self):
        channel = random_cptp(3, 2, 4, seed=3)
        x, y = random_matrix(self.rng, 3), random_matrix(self.rng, 2)
        self.assertAlmostEqual(hs_inner(apply(channel, x), y), hs_inner(x, adjoint_apply(channel, y)), places=10)

    def test_trace_preserving_channels_are_unital_in_adjoint(self):
        channel = random_cptp(2, 4, 3, seed=5)
        assert_allclose(adjoint_apply(channel, np.eye(4)), np.eye(2), atol=1e-10)

    def test_positivity_and_trace(self):
        channel = random_cptp(3, 3, 2, seed=6)
        a = random_matrix(self.rng, 3)
        state = a @ a.conj().T
        image = apply(channel, state)
        self.assertAlmostEqual(np.trace(image), np.trace(state), places=10)
        self.assertGreaterEqual(np.linalg.eigvalsh(image).min(), -1e-10)

    def test_dimension_mismatch(self):
        with self.assertRaises(ShapeMismatchError):
            apply(identity(2), np.eye(3))
        with self.assertRaises(ShapeMismatchError):
            adjoint_apply(depolarizing(2, 3), np.eye(2))


class ChoiTests(SimpleTestCase):

    def test_identity_choi(self):
        choi = choi_matrix(identity(2)).matrix
        self.assertEqual(np.linalg.matrix_rank(choi), 1)
        self.assertAlmostEqual(np.trace(choi).real, 2)

    def test_depolarizing_choi(self):
        for n in (2, 3):
            assert_allclose(choi_matrix(depolarizing(n, n)).matrix, np.eye(n * n) / n, atol=1e-12)

    def test_replacement_choi(self):
        psi = random_unit_vector(2, seed=7)
        expected = np.kron(np.outer(psi, psi.conj()), np.eye(3))
        assert_allclose(choi_matrix(replacement(psi, 3)).matrix, expected, atol=1e-12)

    def test_choi_is_sum_of_images(self):
        channel = random_cptp(2, 3, 3, seed=8)
        expected = sum(np.kron(apply(channel, unit_matrix(2, i, j)), unit_matrix(2, i, j))
                       for i in range(2) for j in range(2))
        assert_allclose(choi_matrix(channel).matrix, expected, atol=1e-12)

    def test_round_trip(self):
        for channel in ensemble(16, seed=100):
            choi = choi_matrix(channel)
            assert_allclose(choi_matrix(kraus_from_choi(choi)).matrix, choi.matrix, atol=1e-9)

    def test_depolarizing_minimal_form(self):
        minimal = kraus_from_choi(choi_matrix(depolarizing(2, 2)))
        self.assertEqual(minimal.rank, 4)
        for operator in minimal.kraus:
            self.assertAlmostEqual(np.linalg.norm(operator) ** 2, 0.5, places=10)

    def test_rank_one_choi(self):
        self.assertEqual(minimize_kraus(haar_isometry(2, 3, seed=9)).rank, 1)

    def test_minimisation_removes_redundant_operators(self):
        channel = random_cptp(3, 3, 2, seed=10)
        doubled = KrausChannel(3, 3, tuple(a / math.sqrt(2) for a in channel.kraus * 2))
        self.assertEqual(doubled.rank, 4)
        self.assertEqual(minimize_kraus(doubled).rank, 2)

    def test_not_positive(self):
        with self.assertRaises(NotPositiveError):
            kraus_from_choi(ChoiMatrix(1, 2, np.diag([1.0, -0.5])))


class ComplementaryTests(SimpleTestCase):

    def setUp(self):
        self.rng = np.random.default_rng(11)

    def test_identity_complement_is_trace(self):
        x = random_matrix(self.rng, 3)
        image = apply(complementary(identity(3)), x)
        self.assertEqual(image.shape, (1, 1))
        self.assertAlmostEqual(image[0, 0], np.trace(x), places=12)

    def test_depolarizing_complement(self):
        channel = complementary(depolarizing(2, 2))
        self.assertAlmostEqual(np.trace(apply(channel, np.eye(2))).real, 2, places=12)
        self.assertAlmostEqual(hs_norm_sq(channel), 2, places=12)

    def test_matches_matrix_of_traces(self):
        channel = random_cptp(3, 2, 4, seed=12)
        x = random_matrix(self.rng, 3)
        assert_allclose(apply(complementary(channel), x), complementary_apply(channel, x), atol=1e-10)

    def test_diagonal_on_pure_inputs(self):
        channel = random_cptp(2, 2, 3, seed=13)
        phi = random_unit_vector(2, seed=14)
        image = complementary_apply(channel, np.outer(phi, phi.conj()))
        expected = [np.vdot(a @ phi, a @ phi) for a in channel.kraus]
        assert_allclose(np.diag(image), expected, atol=1e-12)

    def test_stinespring_consistency(self):
        channel = random_cptp(2, 3, 3, seed=15)
        isometry = stinespring_isometry(channel)
        assert_allclose(isometry.conj().T @ isometry, np.eye(2), atol=1e-12)
        x = random_matrix(self.rng, 2)
        output, environment = stinespring_outputs(isometry, x, 3, 3)
        assert_allclose(output, apply(channel, x), atol=1e-12)
        assert_allclose(environment, complementary_apply(channel, x), atol=1e-12)

    def test_stinespring_from_random_isometry(self):
        isometry = sample_isometry(6, 2, stream(16))
        channel = channel_from_stinespring(isometry, 3)
        self.assertEqual((channel.dim_in, channel.dim_out, channel.rank), (2, 3, 2))
        assert_allclose(stinespring_isometry(channel), isometry, atol=1e-14)
        phi = random_unit_vector(2, seed=17)
        rho = np.outer(phi, phi.conj())
        output, environment = stinespring_outputs(isometry, rho, 3, 2)
        assert_allclose(output, apply(channel, rho), atol=1e-12)
        assert_allclose(environment, apply(complementary(channel), rho), atol=1e-12)
        self.assertAlmostEqual(hs_norm_sq(complementary(channel)), comp_hs_norm_sq(channel), places=10)


class NormTests(SimpleTestCase):

    def test_identity_norms(self):
        channel = identity(2)
        self.assertAlmostEqual(hs_norm_sq(channel), 4)
        self.assertAlmostEqual(comp_hs_norm_sq(channel), 2)
        for p in (1, 2, math.inf):
            self.assertAlmostEqual(p2p_norm(channel, p), 1.0, places=12)

    def test_depolarizing_norms(self):
        channel = depolarizing(2, 2)
        self.assertAlmostEqual(hs_norm_sq(channel), 1.0, places=12)
        self.assertAlmostEqual(comp_hs_norm_sq(channel), 2.0, places=12)
        self.assertAlmostEqual(np.linalg.norm(superoperator_matrix(channel)) ** 2, 1.0, places=12)

    def test_e_lambda_norms(self):
        channel = e_lambda(0.5, random_unit_vector(2, seed=1), 2, 2)
        self.assertAlmostEqual(hs_norm_sq(channel), 1.25, places=12)
        self.assertAlmostEqual(comp_hs_norm_sq(channel), 2.5, places=12)

    def test_depolarizing_attains_p2p_bounds(self):
        for n, d in itertools.product(range(1, 5), repeat=2):
            channel = depolarizing(n, d)
            self.assertAlmostEqual(p2p_norm(channel, 'inf'), n / d, delta=1e-10)
            self.assertAlmostEqual(p2p_norm(channel, 2), math.sqrt(n / d), delta=1e-10)

    def test_unsupported_norm(self):
        with self.assertRaises(UnsupportedNormError):
            p2p_norm(identity(2), 3)
        with self.assertRaises(UnsupportedNormError):
            p2p_lower_bound(2, 2, 'fro')

    def test_formula_matches_superoperator(self):
        for channel in ensemble(100):
            superop = superoperator_matrix(channel)
            self.assertAlmostEqual(hs_norm_sq(channel), np.linalg.norm(superop) ** 2, delta=1e-10)

    def test_complement_norm_three_ways(self):
        for channel in ensemble(100, seed=1000):
            direct = comp_hs_norm_sq(channel)
            traces = sum(np.trace(aj.conj().T @ ai @ ai.conj().T @ aj)
                         for ai in channel.kraus for aj in channel.kraus).real
            self.assertAlmostEqual(direct, traces, delta=1e-10)
            self.assertAlmostEqual(direct, hs_norm_sq(complementary(channel)), delta=1e-10)

    def test_remix_invariance(self):
        rng = np.random.default_rng(18)
        for channel in ensemble(100, seed=2000):
            remixed = kraus_remix(channel, sample_unitary(channel.rank, stream(19, channel.rank)))
            x = random_matrix(rng, channel.dim_in)
            assert_allclose(apply(remixed, x), apply(channel, x), atol=1e-10)
            self.assertAlmostEqual(hs_norm_sq(remixed), hs_norm_sq(channel), delta=1e-10)
            self.assertAlmostEqual(comp_hs_norm_sq(remixed), comp_hs_norm_sq(channel), delta=1e-10)

    def test_remix_needs_unitary(self):
        channel = depolarizing(2, 2)
        with self.assertRaises(NotIsometryError):
            kraus_remix(channel, 2 * np.eye(4))

    def test_adjoint_superoperator(self):
        channel = random_cptp(3, 2, 3, seed=20)
        assert_allclose(superoperator_matrix(adjoint_channel(channel)),
                        superoperator_matrix(channel).conj().T, atol=1e-12)

    def test_ensemble_satisfies_ranges(self):
        for channel in ensemble(100, seed=3000):
            n, d = channel.dim_in, channel.dim_out
            norms = channel_norms(channel)
            hs_low, hs_high = hs_norm_bounds(n, d)
            comp_low, comp_high = comp_hs_norm_bounds(n, d)
            self.assertGreaterEqual(norms.hs_sq, hs_low - 1e-8)
            self.assertLessEqual(norms.hs_sq, hs_high + 1e-8)
            self.assertGreaterEqual(norms.comp_hs_sq, comp_low - 1e-8)
            self.assertLessEqual(norms.comp_hs_sq, comp_high + 1e-8)
            self.assertAlmostEqual(norms.p2p['1'], 1.0, delta=1e-10)
            self.assertGreaterEqual(norms.p2p['2'], p2p_lower_bound(n, d, 2) - 1e-10)
            self.assertGreaterEqual(norms.p2p['inf'], p2p_lower_bound(n, d, 'inf') - 1e-10)

    def test_upper_bound_when_input_is_larger(self):
        self.assertEqual(hs_norm_bounds(5, 2), (2.5, 4 * 2 + 1))
        self.assertEqual(hs_norm_bounds(2, 3), (2 / 3, 4.0))


class GeneratorTests(SimpleTestCase):

    def test_vij_basis(self):
        for n, d in ((2, 2), (2, 3), (3, 3)):
            basis = vij_basis(n, d)
            self.assertEqual(len(basis), n * d)
            for v in basis:
                assert_allclose(v.conj().T @ v, np.eye(n), atol=1e-12)
            for (k, a), (l, b) in itertools.combinations(enumerate(basis), 2):
                self.assertLessEqual(abs(hs_inner(a, b)), 1e-12)
            for x in basis_inputs(n):
                average = sum(v @ x @ v.conj().T for v in basis) / (n * d)
                assert_allclose(average, np.trace(x) * np.eye(d) / d, atol=1e-10)

    def test_vij_basis_trivial_and_invalid(self):
        assert_allclose(vij_basis(1, 1)[0], [[1]])
        with self.assertRaises(InvalidParameterError):
            vij_basis(3, 2)

    def test_depolarizing_kraus_count(self):
        self.assertEqual(depolarizing(2, 2).rank, 4)
        self.assertEqual(depolarizing(3, 2).rank, 6)
        self.assertEqual(depolarizing(1, 1).rank, 1)

    def test_depolarizing_is_trace_preserving_everywhere(self):
        for n, d in DIMENSIONS:
            self.assertLessEqual(validate_cptp(depolarizing(n, d)).tp_defect, 1e-12)

    def test_isometric(self):
        self.assertEqual(isometric(np.eye(3)).rank, 1)
        embedding = np.eye(3, 2)
        norms = channel_norms(isometric(embedding))
        self.assertAlmostEqual(norms.sum, 6, places=12)
        self.assertAlmostEqual(channel_norms(haar_isometry(2, 3, seed=21)).sum, 6, places=10)

    def test_isometric_rejects_non_isometry(self):
        with self.assertRaises(NotIsometryError) as context:
            isometric(np.array([[1.0, 0.0], [0.0, 2.0]]))
        self.assertIn('deviates', str(context.exception))

    def test_replacement(self):
        psi = random_unit_vector(3, seed=22)
        channel = replacement(psi, 2)
        self.assertAlmostEqual(channel_norms(channel).sum, 6, places=12)
        with self.assertRaises(InvalidParameterError):
            replacement(2 * psi, 2)

    def test_replacement_with_one_input_is_isometric(self):
        psi = random_unit_vector(2, seed=23)
        channel = replacement(psi, 1)
        self.assertEqual(channel.rank, 1)
        assert_allclose(channel.kraus[0].conj().T @ channel.kraus[0], [[1]], atol=1e-12)

    def test_e_lambda_endpoints(self):
        psi = random_unit_vector(3, seed=24)
        n, d = 2, 3
        self.assertAlmostEqual(channel_norms(e_lambda(0.0, psi, n, d)).sum, (n + n * n) / d, places=12)
        self.assertAlmostEqual(channel_norms(e_lambda(1.0, psi, n, d)).sum, n + n * n, places=12)
        self.assertAlmostEqual(channel_norms(e_lambda(0.5, random_unit_vector(2, seed=1), 2, 2)).sum, 3.75,
                               places=12)
        with self.assertRaises(InvalidParameterError):
            e_lambda(1.5, psi, n, d)

    def test_random_isometric(self):
        single = random_isometric([1.0], [np.eye(2)])
        self.assertEqual(single.rank, 1)
        pair = random_isometric([0.5, 0.5], [sample_isometry(3, 2, stream(25, j)) for j in range(2)])
        self.assertLessEqual(comp_hs_norm_sq(pair), 2 + 1e-10)
        self.assertGreaterEqual(comp_hs_norm_sq(pair), 4 / 3 - 1e-10)
        with self.assertRaises(InvalidParameterError):
            random_isometric([0.7, 0.7], [np.eye(2), np.eye(2)])
        with self.assertRaises(NotIsometryError):
            random_isometric([1.0], [2 * np.eye(2)])

    def test_cor10_t_at_zero_is_depolarizing(self):
        norms = channel_norms(cor10_t(0.0, 2, 3))
        self.assertAlmostEqual(norms.sum, (2 + 4) / 3, places=12)

    def test_random_cptp(self):
        first = random_cptp(3, 2, 4, seed=7)
        second = random_cptp(3, 2, 4, seed=7)
        for a, b in zip(first.kraus, second.kraus):
            np.testing.assert_array_equal(a, b)
        self.assertLessEqual(validate_cptp(first).tp_defect, 1e-10)
        self.assertAlmostEqual(channel_norms(random_cptp(2, 3, 1, seed=8)).sum, 6, places=10)
        with self.assertRaises(InvalidParameterError):
            random_cptp(2, 2, 5, seed=0)
        with self.assertRaises(InvalidParameterError):
            random_cptp(4, 2, 1, seed=0)

    def test_build_channel(self):
        channel = build_channel('elambda', lam=0.5, n=2, d=2, seed=0)
        self.assertAlmostEqual(channel_norms(channel).sum, 3.75, places=12)
        self.assertEqual(build_channel('depolarizing', n=2, d=2).rank, 4)
        with self.assertRaises(InvalidParameterError):
            build_channel('unknown', n=2, d=2)
        with self.assertRaises(InvalidParameterError):
            build_channel('cor10_t', n=2, d=2)


class ChannelSerializerTests(SimpleTestCase):

    def test_round_trip(self):
        channel = random_cptp(2, 3, 2, seed=30)
        data = dict(ChannelSerializer(channel).data)
        data['validation'] = {'tp_defect': 0.0}
        serializer = ChannelSerializer(data=data)
        serializer.is_valid(raise_exception=True)
        parsed = serializer.save()
        self.assertEqual((parsed.dim_in, parsed.dim_out, parsed.rank), (2, 3, 2))
        for a, b in zip(parsed.kraus, channel.kraus):
            assert_allclose(a, b)

    def test_rejects_wrong_operator_shape(self):
        data = {'dim_in': 2, 'dim_out': 2, 'kraus': [{'rows': 1, 'cols': 1, 'data': [[1, 0]]}]}
        self.assertFalse(ChannelSerializer(data=data).is_valid())

    def test_norms_wire_format(self):
        data = ChannelNormsSerializer(channel_norms(identity(2))).data
        self.assertAlmostEqual(data['sum'], 6.0)
        self.assertEqual(set(data['p2p']), {'1', '2', 'inf'})
