from report_management.base import ReportCommand
from theorem_verification.verifiers import VERIFIERS, run_check


class Command(ReportCommand):
    """
    Django management command that runs one registered check and exits 0 only if it passes.

    Checks that need a channel (`thm1`, and optionally `twirl` and `cor10a`)
    take it from `--channel` or `--gen`.

    Examples:
        ```
        python manage.py verify prop8 --n 2 --k 3 --samples 200000
        python manage.py verify eq51 --n 3 --json
        python manage.py verify thm1 --gen random --n 3 --d 2 --seed 7
        ```
    """
    help = 'Verifies an identity exactly and against Monte Carlo'
    channel_input = True

    def add_arguments(self, parser):
        parser.add_argument('check', choices=list(VERIFIERS), help="Check id")
        super().add_arguments(parser)

    def perform(self, config, channel, options):
        return run_check(options['check'], config.check_options(channel))
