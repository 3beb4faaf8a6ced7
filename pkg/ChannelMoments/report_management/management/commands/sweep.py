import csv
import io

from report_management.base import ReportCommand, render_json
from report_management.models import OutputFormat
from theorem_verification.models import SweepFamily
from theorem_verification.serializers import SweepRowSerializer, VerificationReportSerializer
from theorem_verification.verifiers import sweep_check


class Command(ReportCommand):
    """
    Django management command that tabulates the norm sum along a channel family.

    Writes one CSV row per grid point, or with `--json` the report with its rows.

    Examples:
        ```
        python manage.py sweep --family e_lambda --n 2 --d 2 --grid 11
        python manage.py sweep --family cor10_t --n 2 --d 3 --grid 3 --out sweep.csv
        ```
    """
    help = 'Sweeps e_lambda or cor10_t between the depolarizing and an extremal channel'
    formats = (OutputFormat.CSV, OutputFormat.JSON)
    columns = ('parameter', 'hs_sq', 'comp_hs_sq', 'sum', 'lower_bound', 'upper_bound')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--family', choices=SweepFamily.values, default=SweepFamily.E_LAMBDA,
                            help="Channel family")
        parser.add_argument('--grid', type=int, default=11, help="Grid points on [0, 1]")
        parser.add_argument('--format', choices=self.formats, default=OutputFormat.CSV, help="Output format")

    def output_format(self, options):
        return OutputFormat.JSON if options['json'] else options['format']

    def perform(self, config, channel, options):
        return sweep_check(config.check_options(), options['family'], options['grid'])

    def passed(self, result):
        return result[1].passed

    def render(self, config, result):
        rows, report = result
        if config.format == OutputFormat.JSON:
            return render_json(VerificationReportSerializer(report).data)
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=self.columns, lineterminator='\n')
        writer.writeheader()
        writer.writerows(SweepRowSerializer(rows, many=True).data)
        return buffer.getvalue()
