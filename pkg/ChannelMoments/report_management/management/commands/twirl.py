from report_management.base import ReportCommand
from theorem_verification.verifiers import run_check


class Command(ReportCommand):
    """
    Django management command that twirls a channel and fits λX + μ tr(X)I.

    Without a channel a seeded random one on M_n is used.

    Examples:
        ```
        python manage.py twirl --n 3 --samples 50000
        python manage.py twirl --gen depolarizing --n 2 --json
        ```
    """
    help = 'Fits the twirl of a channel to the covariant form'
    channel_input = True

    def perform(self, config, channel, options):
        return run_check('twirl', config.check_options(channel))

    def to_text(self, result):
        fit = result.values['channel']
        return '\n'.join([super().to_text(result), f"lambda: {fit.lam!r}", f"mu: {fit.mu!r}"])
