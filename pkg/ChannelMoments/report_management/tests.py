import csv
import json
import os
import re
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from io import StringIO

from django.core.management import call_command, execute_from_command_line
from django.core.management.base import CommandError
from django.test import SimpleTestCase
from numpy.testing import assert_allclose

from theorem_verification.models import VerificationReport

from .base import ReportCommand
from .models import OutputFormat, RunConfig
from .serializers import RunConfigSerializer


class CommandTestCase(SimpleTestCase):
    """Runs commands in a scratch directory and collects their output."""

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)

    def path(self, name):
        return os.path.join(self.directory.name, name)

    def write_json(self, name, data):
        with open(self.path(name), 'w', encoding='utf-8') as stream:
            json.dump(data, stream)
        return self.path(name)

    def call(self, *args, **options):
        out = StringIO()
        call_command(*args, stdout=out, **options)
        return out.getvalue()

    def call_json(self, *args, **options):
        return json.loads(self.call(*args, json=True, **options))

    def assert_exit_code(self, code, *args, **options):
        with self.assertRaises(CommandError) as context:
            self.call(*args, **options)
        self.assertEqual(context.exception.returncode, code, str(context.exception))
        return str(context.exception)


class GenCommandTests(CommandTestCase):

    def test_depolarizing_file(self):
        output = self.call('gen', 'depolarizing', n=2, d=2, out=self.path('depolarizing.json'))
        self.assertIn('Wrote', output)
        with open(self.path('depolarizing.json'), encoding='utf-8') as stream:
            data = json.load(stream)
        self.assertEqual((data['dim_in'], data['dim_out']), (2, 2))
        self.assertEqual(len(data['kraus']), 4)
        self.assertLessEqual(data['validation']['tp_defect'], 1e-12)
        self.assertTrue(data['validation']['cp'])

    def test_elambda_round_trip_through_norms(self):
        self.call('gen', 'elambda', lam=0.5, n=2, d=2, seed=3, out=self.path('elambda.json'))
        report = self.call_json('norms', channel=self.path('elambda.json'))
        self.assertTrue(report['pass'])
        self.assertAlmostEqual(report['values']['norms']['sum'], 3.75, places=10)

    def test_d_defaults_to_n(self):
        data = json.loads(self.call('gen', 'depolarizing', n=3))
        self.assertEqual(data['dim_out'], 3)

    def test_non_isometry_is_an_input_error(self):
        matrix = self.write_json('V.json', {'rows': 2, 'cols': 1, 'data': [[1, 0], [1, 0]]})
        message = self.assert_exit_code(2, 'gen', 'isometric', matrix=matrix)
        self.assertIn('deviates from I_1', message)

    def test_missing_parameter(self):
        message = self.assert_exit_code(2, 'gen', 'elambda', n=2, d=2)
        self.assertIn('lam', message)

    def test_psi_file(self):
        psi = self.write_json('psi.json', {'rows': 2, 'cols': 1, 'data': [[0, 0], [0, 1]]})
        self.call('gen', 'replacement', n=3, d=2, psi=psi, out=self.path('replacement.json'))
        report = self.call_json('classify', channel=self.path('replacement.json'))
        self.assertEqual(report['values']['purity']['kind'], 'Replacement')
        assert_allclose(report['values']['purity']['state']['data'], [[0, 0], [1, 0]], atol=1e-12)

    def test_same_config_same_bytes(self):
        first = self.call('gen', 'random', n=3, d=2, rank=3, seed=11)
        second = self.call('gen', 'random', n=3, d=2, rank=3, seed=11)
        self.assertEqual(first, second)
        self.assertNotEqual(first, self.call('gen', 'random', n=3, d=2, rank=3, seed=12))


class VerifyCommandTests(CommandTestCase):

    def test_prop8(self):
        output = self.call('verify', 'prop8', n=2, k=3, samples=20000)
        self.assertIn('prop8', output)
        self.assertIn('pass', output)

    def test_broadcasting_check(self):
        report = self.call_json('verify', 'eq51', n=3, samples=5000)
        self.assertTrue(report['pass'])
        self.assertEqual(list(report)[:2], ['check', 'pass'])
        self.assertLessEqual(report['values']['identity_defect'], 1e-10)
        self.assertAlmostEqual(report['values']['p'], 16 / 25)

    def test_norm_sum_on_generated_channel(self):
        report = self.call_json('verify', 'thm1', gen='random', n=3, d=2, seed=7, samples=20000)
        self.assertTrue(report['pass'])
        self.assertEqual(report['values']['classification'], 'Interior')
        self.assertEqual(report['params']['seed'], 7)

    def test_norm_sum_needs_a_channel(self):
        message = self.assert_exit_code(2, 'verify', 'thm1')
        self.assertIn('--channel', message)

    def test_failure_exit_code(self):
        self.assert_exit_code(1, 'verify', 'prop3a', samples=1000, sigma=0.0)

    def test_report_is_reproducible(self):
        first = self.call('verify', 'prop3d', json=True, n=2, samples=5000, seed=4)
        second = self.call('verify', 'prop3d', json=True, n=2, samples=5000, seed=4)
        self.assertEqual(first, second)

    def test_report_file(self):
        self.call('verify', 'cor10b', json=True, n=2, d=3, out=self.path('report.json'))
        with open(self.path('report.json'), encoding='utf-8') as stream:
            report = json.load(stream)
        self.assertEqual(report['values']['operators'], 6)
        self.assertEqual(report['tolerance'], {'exact': 1e-10, 'sigma': 5.0, 'bound': 1e-8})

    def test_invalid_options(self):
        self.assert_exit_code(2, 'verify', 'prop3a', samples=1)
        self.assert_exit_code(2, 'verify', 'prop3a', n=0)
        self.assert_exit_code(2, 'verify', 'prop3a', tol=0.0)


class SweepCommandTests(CommandTestCase):

    def test_e_lambda_table(self):
        rows = list(csv.DictReader(StringIO(self.call('sweep', family='e_lambda', n=2, d=2, grid=11))))
        self.assertEqual(len(rows), 11)
        self.assertEqual(list(rows[0]), ['parameter', 'hs_sq', 'comp_hs_sq', 'sum', 'lower_bound', 'upper_bound'])
        self.assertAlmostEqual(float(rows[0]['sum']), 3.0, places=12)
        self.assertAlmostEqual(float(rows[-1]['sum']), 6.0, places=12)

    def test_cor10_t_json(self):
        report = self.call_json('sweep', family='cor10_t', n=2, d=3, grid=3)
        self.assertTrue(report['pass'])
        sums = [row['sum'] for row in report['values']['rows']]
        self.assertAlmostEqual(sums[0], 2.0, places=12)
        self.assertAlmostEqual(sums[-1], 6.0, places=12)

    def test_single_point_rejected(self):
        message = self.assert_exit_code(2, 'sweep', grid=1)
        self.assertIn('at least 2', message)


class ChannelCommandTests(CommandTestCase):

    def test_norms_text(self):
        output = self.call('norms', gen='depolarizing', n=3, d=2)
        self.assertIn('norms (n=3, d=2, seed=0): pass', output)
        self.assertAlmostEqual(float(re.search(r'p2p_inf: (\S+)', output).group(1)), 1.5, places=12)

    def test_classify(self):
        output = self.call('classify', gen='haar_isometric', n=2, d=3, seed=5)
        self.assertIn('purity: Isometric', output)

    def test_twirl(self):
        report = self.call_json('twirl', n=2, samples=50000, seed=6)
        self.assertTrue(report['pass'])
        self.assertEqual(report['values']['depolarizing']['samples'], 0)

    def test_malformed_channel_file(self):
        with open(self.path('broken.json'), 'w', encoding='utf-8') as stream:
            stream.write('{"dim_in": 2,')
        self.assert_exit_code(2, 'norms', channel=self.path('broken.json'))

    def test_wrong_kraus_shape(self):
        channel = self.write_json('channel.json', {
            'dim_in': 2, 'dim_out': 2, 'kraus': [{'rows': 1, 'cols': 2, 'data': [[1, 0], [0, 0]]}],
        })
        message = self.assert_exit_code(2, 'classify', channel=channel)
        self.assertIn('kraus', message)

    def test_missing_channel_file(self):
        self.assert_exit_code(2, 'norms', channel=self.path('missing.json'))

    def test_non_trace_preserving_channel_fails(self):
        channel = self.write_json('scaled.json', {
            'dim_in': 1, 'dim_out': 1, 'kraus': [{'rows': 1, 'cols': 1, 'data': [[2, 0]]}],
        })
        self.assert_exit_code(1, 'norms', channel=channel)


class ExitCodeTests(CommandTestCase):
    """The 0 / 1 / 2 contract of every command, as seen by a shell."""

    def run_from_shell(self, *argv):
        out, err = StringIO(), StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            try:
                execute_from_command_line(['manage.py', *argv])
            except SystemExit as exit:
                return exit.code
        return 0

    def test_contract(self):
        channel = self.path('channel.json')
        cases = [
            (0, ['gen', 'depolarizing', '--n', '2', '--d', '2', '--out', channel]),
            (0, ['norms', '--channel', channel]),
            (0, ['classify', '--channel', channel]),
            (0, ['verify', 'prop3a', '--n', '2', '--samples', '5000']),
            (0, ['sweep', '--family', 'cor10_t', '--n', '2', '--d', '3', '--grid', '3']),
            (0, ['twirl', '--gen', 'depolarizing', '--n', '2', '--json']),
            (1, ['verify', 'prop3a', '--samples', '1000', '--sigma', '0']),
            (1, ['norms', '--channel', self.write_json('scaled.json', {
                'dim_in': 1, 'dim_out': 1, 'kraus': [{'rows': 1, 'cols': 1, 'data': [[2, 0]]}]})]),
            (2, ['gen', 'elambda', '--lambda', '1.5', '--n', '2']),
            (2, ['gen', 'no_such_family']),
            (2, ['norms']),
            (2, ['classify', '--channel', self.path('missing.json')]),
            (2, ['verify', 'thm99']),
            (2, ['verify', 'prop3a', '--samples', 'many']),
            (2, ['sweep', '--grid', '1']),
            (2, ['twirl', '--gen', 'depolarizing', '--n', '2', '--d', '3']),
        ]
        for code, argv in cases:
            with self.subTest(argv=' '.join(argv)):
                self.assertEqual(self.run_from_shell(*argv), code)


class RunConfigTests(SimpleTestCase):

    def config_data(self, **overrides):
        return {'command': 'verify', 'n': 2, 'd': 3, 'k': 2, 'samples': 1000, 'seed': 1, 'tol': 1e-10,
                'sigma': 5.0, 'bound_tol': 1e-8, 'workers': 1, 'chunk_elements': 1024, **overrides}

    def test_builds_config(self):
        serializer = RunConfigSerializer(data=self.config_data(lam=0.25))
        self.assertTrue(serializer.is_valid(), serializer.errors)
        config = serializer.save()
        self.assertIsInstance(config, RunConfig)
        self.assertEqual(config.format, OutputFormat.TEXT)
        self.assertEqual(config.generator_params(), {'n': 2, 'd': 3, 'lam': 0.25, 'seed': 1})

    def test_rejections(self):
        for field, value in (('samples', 1), ('tol', 0.0), ('lam', 1.5), ('seed', -1), ('format', 'xml')):
            serializer = RunConfigSerializer(data=self.config_data(**{field: value}))
            self.assertFalse(serializer.is_valid())
            self.assertIn(field, serializer.errors)

    def test_check_options(self):
        config = RunConfig(command='verify', n=3, d=4, samples=500, seed=9, workers=2)
        options = config.check_options()
        self.assertEqual((options.n, options.d, options.samples, options.seed, options.workers), (3, 4, 500, 9, 2))
        self.assertIsNone(options.channel)


class TextOutputTests(SimpleTestCase):

    def test_unbounded_deviation(self):
        report = VerificationReport(
            check='prop3a',
            params={'n': 1, 'seed': 0},
            values={'moment_mc': {'samples': 10, 'max_deviation': 1.0, 'max_stderr': 0.0, 'max_sigma': None}},
            passed=False,
            failures=('moment: Monte Carlo deviates by inf standard errors',),
        )
        lines = ReportCommand().to_text(report).splitlines()
        self.assertEqual(lines[0], 'prop3a (n=1, seed=0): FAIL')
        self.assertEqual(lines[1], '  moment_mc: unbounded standard errors over 10 samples')
