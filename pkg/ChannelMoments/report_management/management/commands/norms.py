from report_management.base import ReportCommand
from theorem_verification.verifiers import norms_check


class Command(ReportCommand):
    """
    Django management command that prints the norms of a channel with their range checks.

    Examples:
        ```
        python manage.py norms --channel depolarizing.json --json
        python manage.py norms --gen random --n 3 --d 2 --seed 7
        ```
    """
    help = 'Computes ||E||_2, ||Ẽ||_2 and the p->p norms of a channel'
    channel_input = True

    def perform(self, config, channel, options):
        return norms_check(config.check_options(self.require_channel(channel)))

    def to_text(self, result):
        norms = result.values['norms']
        lines = [
            f"hs_sq: {norms.hs_sq!r}",
            f"comp_hs_sq: {norms.comp_hs_sq!r}",
            f"sum: {norms.sum!r}",
            *(f"p2p_{key}: {value!r}" for key, value in norms.p2p.items()),
        ]
        return '\n'.join([super().to_text(result), *lines])
