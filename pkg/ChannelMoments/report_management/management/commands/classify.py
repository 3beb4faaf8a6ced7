from report_management.base import ReportCommand
from theorem_verification.verifiers import classify_channel


class Command(ReportCommand):
    """
    Django management command that decides whether a channel preserves purity.

    Examples:
        ```
        python manage.py classify --channel channel.json
        python manage.py classify --gen replacement --n 2 --d 3 --json
        ```
    """
    help = 'Classifies a channel as isometric, pure-state replacement or neither'
    channel_input = True

    def perform(self, config, channel, options):
        return classify_channel(config.check_options(self.require_channel(channel)))

    def to_text(self, result):
        verdict = result.values['purity']
        return '\n'.join([super().to_text(result), f"purity: {verdict.kind}"])
