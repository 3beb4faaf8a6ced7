from channel_management.channels import validate_cptp
from channel_management.models import Generator
from channel_management.serializers import ChannelSerializer, CPTPReportSerializer
from report_management.base import ReportCommand
from report_management.models import OutputFormat


class Command(ReportCommand):
    """
    Django management command that generates a channel and writes it as channel JSON.

    The file carries a `validation` block with the trace-preservation defect.

    Examples:
        ```
        python manage.py gen depolarizing --n 2 --d 2 --out depolarizing.json
        python manage.py gen elambda --lambda 0.5 --n 2 --d 2 --seed 3
        python manage.py gen isometric --matrix V.json
        ```
    """
    help = 'Generates a channel file'
    formats = (OutputFormat.JSON,)

    def add_arguments(self, parser):
        parser.add_argument('generator', choices=Generator.values, help="Channel family")
        super().add_arguments(parser)
        self.add_generator_arguments(parser)

    def perform(self, config, channel, options):
        channel = self.generate(options['generator'], config, options)
        return channel, validate_cptp(channel)

    def passed(self, result):
        return True

    def to_data(self, result):
        channel, validation = result
        return {**ChannelSerializer(channel).data, 'validation': CPTPReportSerializer(validation).data}
