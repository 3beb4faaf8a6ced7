import logging

import numpy as np
from django.conf import settings
from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import APIException
from rest_framework.parsers import JSONParser
from rest_framework.renderers import JSONRenderer

from channel_management.generators import build_channel
from channel_management.models import Generator
from channel_management.serializers import ChannelSerializer
from tensor_core.exceptions import ChannelMomentsError, InvalidParameterError
from tensor_core.serializers import MatrixSerializer
from theorem_verification.serializers import VerificationReportSerializer

from .models import OutputFormat
from .serializers import RunConfigSerializer

logger = logging.getLogger(__name__)


# Exit codes besides 0 (pass).
VERIFICATION_FAILED = 1
INPUT_ERROR = 2


def describe(detail):
    """Flatten DRF error details into `field: message` text."""
    if isinstance(detail, dict):
        return '; '.join(f"{key}: {describe(value)}" for key, value in detail.items())
    if isinstance(detail, list):
        return '; '.join(describe(item) for item in detail)
    return str(detail)


def read_json(path):
    with open(path, 'rb') as stream:
        return JSONParser().parse(stream)


def read_matrix(path):
    """A matrix JSON file as a complex array."""
    serializer = MatrixSerializer(data=read_json(path))
    serializer.is_valid(raise_exception=True)
    return serializer.save()


def read_channel(path):
    """A channel JSON file as a `KrausChannel`."""
    serializer = ChannelSerializer(data=read_json(path))
    serializer.is_valid(raise_exception=True)
    return serializer.save()


def render_json(data):
    return JSONRenderer().render(data, renderer_context={'indent': 2}).decode('utf-8')


class ReportCommand(BaseCommand):
    """
    Base class of the channel commands.

    Adds the global flags, turns them into a validated `RunConfig`, reads or
    generates the channel, writes the result to stdout or `--out` and maps
    outcomes to exit codes: 0 pass, 1 verification failure, 2 input error.

    Subclasses implement `perform(config, channel, options)` and may override
    `to_data`, `to_text`, `render` and `passed` for results other than a
    `VerificationReport`.

    Attributes:
        channel_input (bool): Whether `--channel` and `--gen` are accepted.
        formats (tuple): Output formats besides `--json`.
    """
    channel_input = False
    formats = (OutputFormat.TEXT, OutputFormat.JSON)

    def add_arguments(self, parser):
        defaults = settings.CHANNEL_MOMENTS
        parser.add_argument('--seed', type=int, default=defaults['DEFAULT_SEED'], help="Seed of every random choice")
        parser.add_argument('--json', action='store_true', help="Write the result as JSON")
        parser.add_argument('--out', default=None, help="Write to this file instead of stdout")
        parser.add_argument('--tol', type=float, default=defaults['EXACT_TOLERANCE'], help="Exact tolerance")
        parser.add_argument('--sigma', type=float, default=defaults['SIGMA'],
                            help="Monte Carlo acceptance in standard errors")
        parser.add_argument('--bound-tol', type=float, default=defaults['BOUND_TOLERANCE'],
                            help="Slack on norm bounds")
        parser.add_argument('--samples', type=int, default=defaults['DEFAULT_SAMPLES'], help="Monte Carlo samples")
        parser.add_argument('--n', type=int, default=2, help="Input dimension")
        parser.add_argument('--d', type=int, default=None, help="Output dimension, defaults to --n")
        parser.add_argument('--k', type=int, default=2, help="Tensor power")
        if self.channel_input:
            self.add_channel_arguments(parser)

    def add_channel_arguments(self, parser):
        source = parser.add_mutually_exclusive_group()
        source.add_argument('--channel', default=None, help="Channel JSON file")
        source.add_argument('--gen', choices=Generator.values, default=None, help="Generate the channel")
        self.add_generator_arguments(parser)

    def add_generator_arguments(self, parser):
        parser.add_argument('--lambda', dest='lam', type=float, default=None, help="λ of elambda")
        parser.add_argument('--t', type=float, default=None, help="t of cor10_t")
        parser.add_argument('--rank', type=int, default=None, help="Kraus rank of random")
        parser.add_argument('--count', type=int, default=None, help="Isometries of random_isometric")
        parser.add_argument('--matrix', default=None, help="Matrix JSON file with the isometry of isometric")
        parser.add_argument('--psi', default=None, help="Matrix JSON file with the unit vector of replacement/elambda")

    def output_format(self, options):
        return OutputFormat.JSON if options['json'] else self.formats[0]

    def run_config(self, options):
        defaults = settings.CHANNEL_MOMENTS
        serializer = RunConfigSerializer(data={
            'command': self.__module__.rsplit('.', 1)[-1],
            'n': options['n'],
            'd': options['d'] if options['d'] is not None else options['n'],
            'k': options['k'],
            'lam': options.get('lam'),
            't': options.get('t'),
            'rank': options.get('rank'),
            'count': options.get('count'),
            'samples': options['samples'],
            'seed': options['seed'],
            'tol': options['tol'],
            'sigma': options['sigma'],
            'bound_tol': options['bound_tol'],
            'output': options['out'],
            'format': self.output_format(options),
            'workers': defaults['THREADS'],
            'chunk_elements': defaults['CHUNK_ELEMENTS'],
        })
        serializer.is_valid(raise_exception=True)
        return serializer.save()

    def load_channel(self, config, options):
        """The channel named by `--channel` or `--gen`, or None."""
        if options.get('channel'):
            return read_channel(options['channel'])
        if not options.get('gen'):
            return None
        return self.generate(options['gen'], config, options)

    def generate(self, name, config, options):
        params = config.generator_params()
        if options.get('matrix'):
            params['matrix'] = read_matrix(options['matrix'])
        if options.get('psi'):
            params['psi'] = read_matrix(options['psi']).reshape(-1)
        return build_channel(name, **params)

    def perform(self, config, channel, options):
        raise NotImplementedError

    def passed(self, result):
        return result.passed

    def to_data(self, result):
        return VerificationReportSerializer(result).data

    def to_text(self, result):
        """Summary lines of a `VerificationReport`."""
        status = 'pass' if result.passed else 'FAIL'
        params = ', '.join(f"{key}={value}" for key, value in result.params.items())
        lines = [f"{result.check} ({params}): {status}"]
        for name, value in result.values.items():
            if isinstance(value, (bool, int, float, complex, str, np.number, np.bool_)):
                lines.append(f"  {name}: {value}")
            elif name.endswith('_mc'):
                sigma = 'unbounded' if value['max_sigma'] is None else f"{value['max_sigma']:.2f}"
                lines.append(f"  {name}: {sigma} standard errors over {value['samples']} samples")
        lines.extend(f"  {failure}" for failure in result.failures)
        return '\n'.join(lines)

    def render(self, config, result):
        if config.format == OutputFormat.JSON:
            return render_json(self.to_data(result))
        return self.to_text(result)

    def write(self, config, content):
        if config.output is None:
            self.stdout.write(content)
            return
        with open(config.output, 'w', encoding='utf-8', newline='') as stream:
            stream.write(content if content.endswith('\n') else content + '\n')
        self.stdout.write(self.style.SUCCESS(f"Wrote {config.output}"))

    def handle(self, *args, **options):
        try:
            config = self.run_config(options)
            logger.debug("Running %s with %s", config.command, config)
            channel = self.load_channel(config, options) if self.channel_input else None
            result = self.perform(config, channel, options)
            self.write(config, self.render(config, result))
        except ChannelMomentsError as error:
            raise CommandError(str(error), returncode=INPUT_ERROR)
        except APIException as error:
            raise CommandError(f"Invalid input: {describe(error.detail)}", returncode=INPUT_ERROR)
        except OSError as error:
            raise CommandError(f"{error.filename}: {error.strerror}", returncode=INPUT_ERROR)
        if not self.passed(result):
            raise CommandError(f"{config.command} failed", returncode=VERIFICATION_FAILED)

    def require_channel(self, channel):
        if channel is None:
            raise InvalidParameterError("This command needs a channel (--channel FILE or --gen NAME).")
        return channel
