import itertools
import json
import math

import numpy as np
from django.test import SimpleTestCase
from numpy.testing import assert_allclose
from rest_framework.renderers import JSONRenderer

from channel_management.channels import channel_norms
from channel_management.generators import (
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
from channel_management.models import KrausChannel
from haar_integration.models import MCEstimate
from haar_integration.sampling import sample_isometry, sample_unitary, stream
from tensor_core.exceptions import InvalidParameterError
from tensor_core.operators import matrix_units, swap_operator

from .broadcasting import (
    broadcast_defects,
    broadcasting_verify,
    canonical_broadcast,
    m_closed,
    m_from_integrals,
    mixing_weight,
)
from .models import CheckOptions, Classification, PurityKind, SweepFamily
from .norm_sum import equivalence_conditions, sum_bounds, theorem1_equiv_check, theorem1_report
from .purity import fix_phase, output_purity, purity_classify
from .random_isometric import cor10a_check, cor10b_check
from .recorder import CheckRecorder
from .serializers import VerificationReportSerializer
from .sweeps import range_sweep, sweep_defects
from .verifiers import VERIFIERS, classify_channel, norms_check, run_check, sweep_check


DIMENSIONS = list(itertools.product(range(1, 5), repeat=2))


def random_channel(index, seed=0):
    n, d = DIMENSIONS[index % len(DIMENSIONS)]
    ranks = range(math.ceil(n / d), n * d + 1)
    return random_cptp(n, d, ranks[index % len(ranks)], seed + index)


class Theorem1ReportTests(SimpleTestCase):

    def test_depolarizing_attains_lower_bound(self):
        report = theorem1_report(depolarizing(3, 2))
        self.assertAlmostEqual(report.sum, 6.0, places=12)
        self.assertAlmostEqual(report.lower_bound, 6.0)
        self.assertEqual(report.classification, Classification.DEPOLARIZING)
        self.assertLessEqual(report.depolarizing_defect, 1e-12)

    def test_identity_attains_upper_bound(self):
        report = theorem1_report(identity(3))
        self.assertAlmostEqual(report.sum, 12.0, places=12)
        self.assertEqual(report.classification, Classification.ISOMETRIC)
        self.assertEqual(report.purity.kind, PurityKind.ISOMETRIC)

    def test_replacement_attains_upper_bound(self):
        report = theorem1_report(replacement(random_unit_vector(3, seed=1), 2))
        self.assertAlmostEqual(report.sum, 6.0, places=12)
        self.assertEqual(report.classification, Classification.REPLACEMENT)

    def test_interior(self):
        report = theorem1_report(e_lambda(0.5, random_unit_vector(2, seed=2), 2, 2))
        self.assertAlmostEqual(report.sum, 3.75, places=12)
        self.assertEqual(report.classification, Classification.INTERIOR)
        self.assertIsNone(report.purity)

    def test_extremal_families_everywhere(self):
        for n, d in DIMENSIONS:
            self.assertAlmostEqual(channel_norms(depolarizing(n, d)).sum, (n + n * n) / d, delta=1e-12)
            psi = random_unit_vector(d, seed=n)
            self.assertAlmostEqual(channel_norms(replacement(psi, n)).sum, n * n + n, delta=1e-12)
            if n <= d:
                self.assertAlmostEqual(channel_norms(isometric(np.eye(d, n))).sum, n * n + n, delta=1e-12)

    def test_bounds_on_random_ensemble(self):
        for index in range(1000):
            report = theorem1_report(random_channel(index))
            self.assertTrue(report.within_bounds(1e-8), f"channel {index}: {report.sum}")

    def test_output_purity_bridge(self):
        for index, (n, d) in enumerate(DIMENSIONS):
            report = theorem1_report(random_channel(index, seed=50), mc_samples=100000, seed=index)
            self.assertEqual((report.n, report.d), (n, d))
            self.assertTrue(report.mc_check.agrees_with(report.mc_predicted, sigma=5.0),
                            f"n={n}, d={d}: {report.mc_check.max_sigma(report.mc_predicted):.2f} sigma")

    def test_near_lower_bound_needs_depolarizing_action(self):
        # sum - lower = 3ε² while the defect is ε
        epsilon = 1e-5
        operators = tuple(np.sqrt(1 - epsilon) * a for a in depolarizing(2, 2).kraus)
        channel = KrausChannel(2, 2, operators + (np.sqrt(epsilon) * np.eye(2),))
        report = theorem1_report(channel)
        self.assertLess(report.sum - report.lower_bound, 1e-8)
        self.assertAlmostEqual(report.depolarizing_defect, epsilon, delta=1e-12)
        self.assertEqual(report.classification, Classification.INTERIOR)
        verification = run_check('thm1', CheckOptions(n=2, d=2, samples=0, channel=channel))
        self.assertTrue(verification.passed, verification.failures)
        self.assertEqual(verification.values['classification'], 'Interior')

    def test_sum_bounds(self):
        self.assertEqual(sum_bounds(2, 3), (2.0, 6.0))
        with self.assertRaises(InvalidParameterError):
            sum_bounds(0, 2)


class EquivalenceTests(SimpleTestCase):

    def test_depolarizing_conditions(self):
        conditions = equivalence_conditions(depolarizing(2, 2), tolerance=1e-10)
        self.assertTrue(all(holds for holds, _ in conditions.values()))
        norms = channel_norms(depolarizing(2, 2))
        self.assertAlmostEqual(norms.sum, 3.0, places=12)
        self.assertAlmostEqual(math.sqrt(norms.hs_sq) + math.sqrt(norms.comp_hs_sq),
                               (math.sqrt(2) + 2) / math.sqrt(2), places=12)

    def test_mixture_fails_every_condition(self):
        conditions = equivalence_conditions(e_lambda(0.1, random_unit_vector(2, seed=3), 2, 2))
        self.assertFalse(any(holds for holds, _ in conditions.values()))

    def test_perturbations_fail_together(self):
        for n, d in ((2, 2), (2, 3), (3, 2)):
            result = theorem1_equiv_check(n, d, seed=4)
            self.assertEqual(result['violations'], [])
            self.assertEqual(result['all_fail'], 50)

    def test_scalar_channels_satisfy_everything(self):
        result = theorem1_equiv_check(1, 1, seed=5)
        self.assertEqual(result['violations'], [])
        self.assertEqual(result['all_hold'], 50)


class PurityTests(SimpleTestCase):

    def test_isometric_recovers_isometry(self):
        V = sample_isometry(3, 2, stream(6))
        verdict = purity_classify(isometric(V))
        self.assertEqual(verdict.kind, PurityKind.ISOMETRIC)
        assert_allclose(verdict.isometry, fix_phase(V), atol=1e-8)

    def test_replacement_recovers_state(self):
        psi = random_unit_vector(3, seed=7)
        verdict = purity_classify(replacement(psi, 2))
        self.assertEqual(verdict.kind, PurityKind.REPLACEMENT)
        assert_allclose(verdict.state, fix_phase(psi), atol=1e-8)
        self.assertAlmostEqual(np.linalg.norm(verdict.state), 1.0, places=8)

    def test_depolarizing_is_not_purity_preserving(self):
        verdict = purity_classify(depolarizing(2, 2))
        self.assertEqual(verdict.kind, PurityKind.NOT)
        self.assertAlmostEqual(verdict.defect, 0.5, places=12)
        self.assertAlmostEqual(np.linalg.norm(verdict.witness), 1.0, places=12)

    def test_random_channels_are_not_purity_preserving(self):
        for n, d in ((2, 2), (2, 3), (3, 2), (4, 4)):
            verdict = purity_classify(random_cptp(n, d, 2, seed=n + d))
            self.assertEqual(verdict.kind, PurityKind.NOT)
            self.assertGreater(verdict.defect, 1e-6)

    def test_verdict_agrees_with_norm_sum(self):
        channels = [haar_isometry(2, 3, seed=8), replacement(random_unit_vector(2, seed=9), 3),
                    depolarizing(3, 3), random_cptp(3, 2, 3, seed=10), e_lambda(0.3, random_unit_vector(3, 11), 2, 3)]
        for channel in channels:
            report = theorem1_report(channel)
            at_upper = report.sum >= report.upper_bound - 1e-8
            self.assertEqual(purity_classify(channel).preserves_purity, at_upper)

    def test_output_purity(self):
        phi = random_unit_vector(3, seed=12)
        self.assertAlmostEqual(output_purity(identity(3), phi[None, :])[0], 1.0, places=12)
        self.assertAlmostEqual(output_purity(depolarizing(3, 3), phi[None, :])[0], 1 / 3, places=12)

    def test_fix_phase(self):
        vector = np.array([0.1, -0.9j, 0.2])
        fixed = fix_phase(vector)
        self.assertAlmostEqual(fixed[1], 0.9)
        self.assertAlmostEqual(abs(np.vdot(fixed, vector)), np.linalg.norm(vector) ** 2)


class SweepTests(SimpleTestCase):

    def test_e_lambda_three_points(self):
        rows = range_sweep(2, 2, 3, SweepFamily.E_LAMBDA)
        assert_allclose([row.sum for row in rows], [3.0, 3.75, 6.0], atol=1e-12)

    def test_cor10_t_matches_e_lambda(self):
        rows = range_sweep(2, 2, 3, SweepFamily.COR10_T)
        assert_allclose([row.sum for row in rows], [3.0, 3.75, 6.0], atol=1e-12)

    def test_two_points_are_the_bounds(self):
        rows = range_sweep(2, 3, 2, SweepFamily.COR10_T)
        self.assertAlmostEqual(rows[0].sum, 2.0, places=12)
        self.assertAlmostEqual(rows[1].sum, 6.0, places=12)

    def test_fine_grid_matches_closed_forms(self):
        for family in SweepFamily.values:
            for n, d in ((2, 2), (2, 3), (3, 4)):
                defects = sweep_defects(range_sweep(n, d, 101, family, seed=13))
                for name, value in defects.items():
                    self.assertLessEqual(value, 1e-10, f"{family} {n}x{d} {name}")

    def test_each_family_norms(self):
        row = range_sweep(2, 3, 3, SweepFamily.COR10_T)[1]
        self.assertAlmostEqual(row.hs_sq, 4 * 0.25 + 2 * 0.75 / 3, places=12)
        self.assertAlmostEqual(row.comp_hs_sq, 4 * 0.75 / 3 + 2 * 0.25, places=12)
        self.assertAlmostEqual(channel_norms(cor10_t(0.5, 2, 3)).hs_sq, row.hs_sq, places=12)

    def test_rejections(self):
        with self.assertRaises(InvalidParameterError):
            range_sweep(2, 2, 1, SweepFamily.E_LAMBDA)
        with self.assertRaises(InvalidParameterError):
            range_sweep(3, 2, 5, SweepFamily.COR10_T)
        with self.assertRaises(InvalidParameterError):
            range_sweep(2, 2, 5, 'spiral')


class RandomIsometricTests(SimpleTestCase):

    def test_common_isometry_attains_upper_bound(self):
        V = sample_isometry(3, 2, stream(14))
        result = cor10a_check(random_isometric([0.6, 0.4], [V, V]))
        self.assertAlmostEqual(result['comp_hs_sq'], 2.0, places=12)
        self.assertTrue(result['at_upper_bound'])
        self.assertLessEqual(result['range_defect'], 1e-8)
        for U in result['unitaries']:
            assert_allclose(U, np.eye(2), atol=1e-8)

    def test_shared_range_with_unitaries(self):
        V = sample_isometry(4, 2, stream(15))
        U = sample_unitary(2, stream(16))
        result = cor10a_check(random_isometric([0.5, 0.5], [V, V @ U]))
        self.assertTrue(result['at_upper_bound'])
        assert_allclose(result['unitaries'][1], U, atol=1e-8)
        self.assertLessEqual(result['unitary_defect'], 1e-8)

    def test_vij_mixture_attains_lower_bound(self):
        n, d = 2, 3
        basis = vij_basis(n, d)
        result = cor10a_check(random_isometric(np.full(len(basis), 1 / len(basis)), basis))
        self.assertAlmostEqual(result['comp_hs_sq'], n * n / d, places=12)
        self.assertFalse(result['at_upper_bound'])

    def test_square_case_collapses(self):
        unitaries = [sample_unitary(3, stream(17, j)) for j in range(3)]
        result = cor10a_check(random_isometric([0.2, 0.3, 0.5], unitaries))
        self.assertAlmostEqual(result['comp_hs_sq'], 3.0, places=12)
        self.assertEqual(result['lower_bound'], result['upper_bound'])

    def test_rejects_other_channels(self):
        with self.assertRaises(InvalidParameterError):
            cor10a_check(random_cptp(2, 3, 3, seed=18))
        with self.assertRaises(InvalidParameterError):
            cor10a_check(depolarizing(3, 2))

    def test_depolarizing_is_random_isometric(self):
        for n, d in ((2, 2), (2, 3), (3, 3)):
            result = cor10b_check(n, d)
            self.assertEqual(result['operators'], n * d)
            self.assertLessEqual(result['isometry_defect'], 1e-12)
            self.assertLessEqual(result['max_overlap'], 1e-12)
            self.assertLessEqual(result['mixture_defect'], 1e-10)
            self.assertLessEqual(result['channel_defect'], 1e-10)


class BroadcastingTests(SimpleTestCase):

    def test_mixing_weight(self):
        self.assertAlmostEqual(mixing_weight(2), 0.75)
        self.assertAlmostEqual(mixing_weight(1), 8 / 9)

    def test_identity_input(self):
        for n in (1, 2, 3):
            assert_allclose(canonical_broadcast(np.eye(n)), swap_operator(n), atol=1e-14)

    def test_identity_on_matrix_units(self):
        for n in (2, 3, 4):
            result = broadcasting_verify(n)
            self.assertLessEqual(result['identity'], 1e-10)
            self.assertLessEqual(result['integral_route'], 1e-10)
            self.assertLessEqual(result['trace'], 1e-10)

    def test_random_hermitian_input(self):
        z = np.random.default_rng(19).standard_normal((3, 3)) + 1j * np.random.default_rng(20).standard_normal((3, 3))
        X = (z + z.conj().T) / 2
        for value in broadcast_defects(X).values():
            self.assertLessEqual(value, 1e-10)
        assert_allclose(m_from_integrals(X), m_closed(X), atol=1e-10)

    def test_monte_carlo(self):
        result = broadcasting_verify(2, mc_samples=50000, seed=21)
        self.assertTrue(result['estimate'].agrees_with(result['exact']))

    def test_trace_preservation(self):
        for _, _, unit in matrix_units(3):
            self.assertAlmostEqual(np.trace(m_closed(unit)), np.trace(unit), places=12)


class VerifierTests(SimpleTestCase):

    def test_haar_checks_pass(self):
        for check in ('prop3a', 'prop3b', 'prop3c', 'prop3d', 'cor6a', 'cor6b', 'cor7a', 'cor7b',
                      'thm9a', 'thm9b', 'remark3'):
            for n in (2, 3):
                if check == 'remark3' and n == 3:
                    continue
                report = run_check(check, CheckOptions(n=n, samples=20000, seed=22))
                self.assertTrue(report.passed, f"{check} n={n}: {report.failures}")

    def test_prop8(self):
        for n, k in ((2, 2), (2, 3), (3, 2), (2, 4)):
            report = run_check('prop8', CheckOptions(n=n, k=k, samples=20000, seed=23))
            self.assertTrue(report.passed, report.failures)
            self.assertEqual(report.values['rank'], math.comb(n + k - 1, k))

    def test_twirl(self):
        report = run_check('twirl', CheckOptions(n=2, samples=50000, seed=24))
        self.assertTrue(report.passed, report.failures)
        self.assertEqual(report.values['identity'].samples, 0)
        self.assertAlmostEqual(report.values['depolarizing'].mu, 0.5, places=10)

    def test_channel_checks(self):
        channel = random_cptp(3, 2, 4, seed=7)
        report = run_check('thm1', CheckOptions(samples=20000, seed=7, channel=channel))
        self.assertTrue(report.passed, report.failures)
        self.assertEqual(report.values['classification'], 'Interior')
        for check in ('thm1equiv', 'cor10a', 'cor10b', 'eq51'):
            report = run_check(check, CheckOptions(n=2, d=3, samples=20000, seed=25))
            self.assertTrue(report.passed, f"{check}: {report.failures}")

    def test_norm_sum_needs_channel(self):
        with self.assertRaises(InvalidParameterError):
            run_check('thm1', CheckOptions())

    def test_unknown_check(self):
        with self.assertRaises(InvalidParameterError):
            run_check('thm99', CheckOptions())

    def test_registry_ids(self):
        self.assertEqual(set(VERIFIERS), {
            'prop3a', 'prop3b', 'prop3c', 'prop3d', 'cor6a', 'cor6b', 'cor7a', 'cor7b', 'prop8',
            'thm9a', 'thm9b', 'remark3', 'twirl', 'thm1', 'thm1equiv', 'cor10a', 'cor10b', 'eq51',
        })

    def test_classify_channel(self):
        report = classify_channel(CheckOptions(channel=replacement(random_unit_vector(2, seed=26), 2)))
        self.assertTrue(report.passed, report.failures)
        self.assertEqual(report.values['purity'].kind, PurityKind.REPLACEMENT)

    def test_norms_check(self):
        report = norms_check(CheckOptions(channel=depolarizing(3, 2)))
        self.assertTrue(report.passed, report.failures)
        self.assertAlmostEqual(report.values['norms'].p2p['inf'], 1.5, places=10)
        self.assertAlmostEqual(report.values['norms'].p2p['2'], math.sqrt(1.5), places=10)

    def test_norms_check_rejects_non_trace_preserving(self):
        report = norms_check(CheckOptions(channel=KrausChannel(2, 2, (2 * np.eye(2),))))
        self.assertFalse(report.passed)
        self.assertFalse(report.values['trace_preserving'])

    def test_sweep_check(self):
        rows, report = sweep_check(CheckOptions(n=2, d=2), SweepFamily.E_LAMBDA, 11)
        self.assertEqual(len(rows), 11)
        self.assertTrue(report.passed, report.failures)

    def test_failing_check_is_reported(self):
        report = run_check('prop3a', CheckOptions(n=2, samples=2000, seed=27, tol=1e-10, sigma=0.0))
        self.assertFalse(report.passed)
        self.assertTrue(any('Monte Carlo' in failure for failure in report.failures))


class ReportSerializerTests(SimpleTestCase):

    def test_wire_format(self):
        report = run_check('cor10b', CheckOptions(n=2, d=2))
        data = json.loads(JSONRenderer().render(VerificationReportSerializer(report).data))
        self.assertEqual(list(data)[:2], ['check', 'pass'])
        self.assertTrue(data['pass'])
        self.assertEqual(data['params'], {'n': 2, 'd': 2, 'seed': 0})
        self.assertEqual(data['values']['operators'], 4)
        self.assertEqual(data['failures'], [])

    def test_nested_values(self):
        report = classify_channel(CheckOptions(channel=depolarizing(2, 2)))
        data = VerificationReportSerializer(report).data
        purity = data['values']['purity']
        self.assertEqual(purity['kind'], 'Not')
        self.assertEqual(purity['witness']['rows'], 2)
        self.assertNotIn('isometry', purity)

    def test_zero_stderr_deviation_stays_strict_json(self):
        recorder = CheckRecorder('prop3a', CheckOptions())
        estimate = MCEstimate(mean=np.array([[1.0 + 0j]]), stderr=np.array([[0.0]]), samples=10)
        self.assertFalse(recorder.monte_carlo('moment', estimate, np.zeros((1, 1))))
        report = recorder.report()
        data = json.loads(JSONRenderer().render(VerificationReportSerializer(report).data))
        self.assertFalse(data['pass'])
        self.assertIsNone(data['values']['moment_mc']['max_sigma'])
        self.assertEqual(data['values']['moment_mc']['max_deviation'], 1.0)
